use clap::{Args, Subcommand};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use cww_core::arith::{parse_rational, DyadicRational, RatInterval, Rational};
use cww_core::bridge::{big_b, bridge_inverse, bridge_value, tilde_b, BridgeCache};
use cww_core::certify::{prove, prove_all, Certificate};
use cww_core::extremal::{
    build_extremal, dp_oracle, square_function_sup, tail_measure, DpGrid, Threshold,
};
use cww_core::poly::{linear_test, parse_polynomial};
use cww_core::Error;

use crate::output::{Output, Table};
use crate::{Failure, Global, EXIT_FAILURE};

pub type Outcome = Result<(Output, u8), Failure>;

const MAX_PLOT_LEVEL: u32 = 14;

#[derive(Debug, Subcommand)]
pub enum BridgeCmd {
    /// Enclose A(t) for dyadic t in [0, 1/2].
    Eval { t: String },
    /// Bracket A^{-1}(x) for x in [0, 1].
    Invert {
        x: String,
        /// Bracket width, a power of two such as 1/1024.
        #[arg(long, default_value = "1/2^20")]
        tol: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BellmanCmd {
    /// Enclose B(x); known exactly for x <= 1.
    Eval { x: String },
}

#[derive(Debug, Subcommand)]
pub enum ExtremalCmd {
    /// Build the extremal function for dyadic t in [0, 1/2].
    Build {
        t: String,
        /// Certify the tail measure 1 - t and sup (Sf)^2 <= 1.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub id: String,
}

#[derive(Debug, Subcommand)]
pub enum PlotCmd {
    /// Rows t, A_lo, A_hi on D_level.
    Bridge {
        #[arg(long, default_value_t = 10)]
        level: u32,
    },
    /// Rows x, B_lo, B_hi, tilde_b on the grid k/2^level of [0, 1].
    Bellman {
        #[arg(long, default_value_t = 10)]
        level: u32,
    },
    /// Dynamic-programming lower bounds on the grid k/xgrid of [0, 1].
    Oracle {
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 256)]
        xgrid: u32,
        #[arg(long, default_value_t = 512)]
        taugrid: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolyCmd {
    /// Partial-sum non-negativity test on the unit cube.
    Test {
        expr: String,
        /// Comma-separated variables of the polynomial.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        /// Elimination order, outermost first; defaults to the variables reversed.
        #[arg(long, value_delimiter = ',')]
        order: Vec<String>,
    },
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::usage(e.to_string()))
}

fn dyadic(s: &str) -> Result<DyadicRational, Failure> {
    let q = rational(s)?;
    DyadicRational::from_rational(&q)
        .ok_or_else(|| Error::Domain(format!("{s} is not a dyadic rational")).into())
}

fn approx(v: &RatInterval) -> String {
    format!("approx {:.17}", v.midpoint().to_f64().unwrap_or(f64::NAN))
}

fn interval_doc(key: &str, arg: &str, v: &RatInterval, g: &Global) -> Output {
    let mut json = json!({ key: arg, "lo": v.lo().to_string(), "hi": v.hi().to_string() });
    let mut table = Table::new(&[key, "lo", "hi"]);
    let mut row = vec![arg.to_string(), v.lo().to_string(), v.hi().to_string()];
    if g.decimal {
        json["approx"] = Value::String(approx(v));
        table.headers.push("approx".into());
        row.push(approx(v));
    }
    table.push(row);
    Output::Doc { json, table }
}

pub fn bridge(cmd: BridgeCmd, g: &Global) -> Outcome {
    match cmd {
        BridgeCmd::Eval { t } => {
            let d = dyadic(&t)?;
            let v = bridge_value(&d, g.precision())?;
            Ok((interval_doc("t", &d.to_string(), &v, g), 0))
        }
        BridgeCmd::Invert { x, tol } => {
            let xq = rational(&x)?;
            let tol = dyadic(&tol)?;
            let (lo, hi) = bridge_inverse(&xq, &tol, g.precision())?;
            let json =
                json!({ "x": xq.to_string(), "t_lo": lo.to_string(), "t_hi": hi.to_string() });
            let mut table = Table::new(&["x", "t_lo", "t_hi"]);
            table.push(vec![xq.to_string(), lo.to_string(), hi.to_string()]);
            Ok((Output::Doc { json, table }, 0))
        }
    }
}

pub fn bellman(cmd: BellmanCmd, g: &Global) -> Outcome {
    match cmd {
        BellmanCmd::Eval { x } => {
            let xq = rational(&x)?;
            let v = big_b(&xq, g.precision())?;
            Ok((interval_doc("x", &xq.to_string(), &v, g), 0))
        }
    }
}

pub fn extremal(cmd: ExtremalCmd, g: &Global) -> Outcome {
    let ExtremalCmd::Build { t, verify } = cmd;
    let d = dyadic(&t)?;
    let tree = build_extremal(&d, g.precision())?;
    let leaves = tree.leaves()?;
    let mut json = json!({ "t": d.to_string(), "tree": tree.root() });
    let mut table = Table::new(&["interval", "value_lo", "value_hi", "square_lo", "square_hi"]);
    for leaf in &leaves {
        table.push(vec![
            leaf.interval.to_string(),
            leaf.value.lo().to_string(),
            leaf.value.hi().to_string(),
            leaf.square.lo().to_string(),
            leaf.square.hi().to_string(),
        ]);
    }
    let mut code = 0;
    if verify {
        let tail = tail_measure(&tree, &Threshold::Bridge(d.clone()))?;
        let square = square_function_sup(&tree);
        let expected = Rational::one() - d.to_rational();
        let ok = tail.measure.to_rational() == expected && square.bounded;
        json["verification"] = json!({
            "tail_measure": tail.measure.to_string(),
            "expected": expected.to_string(),
            "sq_sup_le_1": square.bounded,
            "ok": ok,
        });
        if !ok {
            code = EXIT_FAILURE;
        }
    }
    Ok((Output::Doc { json, table }, code))
}

fn certificates_doc(certs: &[Certificate], single: bool) -> Output {
    let json = if single {
        serde_json::to_value(&certs[0])
    } else {
        serde_json::to_value(certs)
    }
    .expect("certificates serialize");
    let mut table = Table::new(&["pipeline", "status", "step", "kind", "ok", "desc"]);
    for c in certs {
        for (i, s) in c.steps.iter().enumerate() {
            let kind = serde_json::to_value(s.kind).expect("kind serializes");
            let status = serde_json::to_value(c.status).expect("status serializes");
            table.push(vec![
                c.pipeline.clone(),
                status.as_str().unwrap_or_default().to_string(),
                i.to_string(),
                kind.as_str().unwrap_or_default().to_string(),
                s.ok.to_string(),
                s.desc.clone(),
            ]);
        }
    }
    Output::Doc { json, table }
}

pub fn certify(args: CertifyArgs, _g: &Global) -> Outcome {
    let certs = if args.id == "all" {
        prove_all()
    } else {
        vec![prove(&args.id)
            .ok_or_else(|| Failure::usage(format!("unknown pipeline {:?}", args.id)))?]
    };
    let code = if certs.iter().all(Certificate::succeeded) {
        0
    } else {
        EXIT_FAILURE
    };
    Ok((certificates_doc(&certs, args.id != "all"), code))
}

fn check_level(level: u32) -> Result<(), Failure> {
    if level == 0 || level > MAX_PLOT_LEVEL {
        return Err(Error::Domain(format!("level {level} is not in 1..={MAX_PLOT_LEVEL}")).into());
    }
    Ok(())
}

pub fn plot(cmd: PlotCmd, g: &Global) -> Outcome {
    let p = g.precision();
    let table = match cmd {
        PlotCmd::Bridge { level } => {
            check_level(level)?;
            let cache = BridgeCache::build(level, p)?;
            let mut t = Table::new(&["t", "A_lo", "A_hi"]);
            for (s, v) in cache.iter() {
                t.push(vec![s.to_string(), v.lo().to_string(), v.hi().to_string()]);
            }
            t
        }
        PlotCmd::Bellman { level } => {
            check_level(level)?;
            let n = 1u64 << level;
            let rows: Result<Vec<Vec<String>>, Error> = (0..=n)
                .into_par_iter()
                .map(|k| {
                    let x = DyadicRational::new(k, level).to_rational();
                    let b = big_b(&x, p)?;
                    Ok(vec![
                        x.to_string(),
                        b.lo().to_string(),
                        b.hi().to_string(),
                        tilde_b(&x).to_string(),
                    ])
                })
                .collect();
            let mut t = Table::new(&["x", "B_lo", "B_hi", "tilde_b"]);
            t.rows = rows?;
            t
        }
        PlotCmd::Oracle {
            depth,
            xgrid,
            taugrid,
        } => {
            if xgrid == 0 || xgrid > 1 << 16 {
                return Err(Error::Domain(format!("xgrid {xgrid} is not in 1..=65536")).into());
            }
            let step = Rational::new(1.into(), xgrid.into());
            let grid = dp_oracle(DpGrid::new(
                depth,
                step,
                Rational::from_integer(4.into()),
                taugrid,
            )?);
            let rows: Result<Vec<Vec<String>>, Error> = (0..=xgrid)
                .into_par_iter()
                .map(|i| {
                    let x = Rational::new(i.into(), xgrid.into());
                    let b = big_b(&x, p)?;
                    Ok(vec![
                        x.to_string(),
                        grid.lower_bound(&x).to_string(),
                        b.hi().to_string(),
                        tilde_b(&x).to_string(),
                    ])
                })
                .collect();
            let mut t = Table::new(&["x", "dp_lower", "B_hi", "tilde_b"]);
            t.rows = rows?;
            t
        }
    };
    Ok((Output::Table(table), 0))
}

pub fn poly(cmd: PolyCmd, _g: &Global) -> Outcome {
    let PolyCmd::Test { expr, vars, order } = cmd;
    let p = parse_polynomial(&expr, &vars).map_err(|e| Failure::usage(e.to_string()))?;
    let order = if order.is_empty() {
        vars.iter().rev().cloned().collect()
    } else {
        order
    };
    let report = linear_test(&p, &order);
    let json = serde_json::to_value(&report).expect("reports serialize");
    let mut table = Table::new(&["verdict", "prefix", "partial_sum"]);
    table.push(vec![
        format!("{:?}", report.verdict),
        report
            .witness
            .as_ref()
            .map(|w| format!("{:?}", w.prefix))
            .unwrap_or_default(),
        report
            .witness
            .as_ref()
            .map(|w| w.partial_sum.to_string())
            .unwrap_or_default(),
    ]);
    let code = if report.passed() { 0 } else { EXIT_FAILURE };
    Ok((Output::Doc { json, table }, code))
}
