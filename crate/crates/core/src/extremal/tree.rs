use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{sqrt_enclosure, DyadicRational, Precision, RatInterval, Rational};
use crate::bridge::{tau_of, x_map, BridgeCache};
use crate::error::{Error, Result};

/// One node of an extremal Haar tree on a dyadic interval `I`.
///
/// `Split` is `tau * h_I + sqrt(1 - tau^2) * (left on I-, right on I+)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// The zero function.
    Leaf,
    /// The Haar function `h_I` itself (`tau = 1` exactly).
    PureHaar,
    Split {
        t: DyadicRational,
        tau: RatInterval,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    /// The point of `D` whose extremal function this node realises.
    pub fn t(&self) -> DyadicRational {
        match self {
            Node::Leaf => DyadicRational::zero(),
            Node::PureHaar => DyadicRational::half(),
            Node::Split { t, .. } => t.clone(),
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            Node::Leaf => 0,
            Node::PureHaar => 1,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        match self {
            Node::Leaf => map.serialize_entry("leaf", &true)?,
            Node::PureHaar => map.serialize_entry("pure_haar", &true)?,
            Node::Split {
                t,
                tau,
                left,
                right,
            } => {
                map.serialize_entry("t", &t.to_string())?;
                map.serialize_entry("tau", tau)?;
                map.serialize_entry("left", left)?;
                map.serialize_entry("right", right)?;
            }
        }
        map.end()
    }
}

/// An extremal function for `x = A(t)`, together with the precision its enclosures were built at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalTree {
    #[serde(serialize_with = "crate::extremal::tree::display_string")]
    t: DyadicRational,
    #[serde(skip)]
    precision: Precision,
    root: Node,
}

pub(crate) fn display_string<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Builds the extremal function for `t` in `D`.
///
/// At a split point with parents `t-` and `t+`, the half where `h_I = -1` carries
/// the function built for `t+` and the other half the one built for `t-`: on the
/// left half `f >= x` reads `f_left >= X(x, tau) = A(t+)`, on the right half
/// `f_right >= X(x, -tau) = A(t-)`.
pub fn build_extremal(t: &DyadicRational, p: Precision) -> Result<ExtremalTree> {
    if !t.in_half_unit() {
        return Err(Error::Domain(format!("{t} is not in [0, 1/2]")));
    }
    let work = p.plus(t.level() + 16);
    let cache = BridgeCache::build(t.level().max(1), work)?;
    let root = build_node(t, &cache, work)?;
    Ok(ExtremalTree {
        t: t.clone(),
        precision: p,
        root,
    })
}

fn build_node(t: &DyadicRational, cache: &BridgeCache, p: Precision) -> Result<Node> {
    if t.to_rational().is_zero() {
        return Ok(Node::Leaf);
    }
    if *t == DyadicRational::half() {
        return Ok(Node::PureHaar);
    }
    let (minus, plus) = t.parents().expect("interior grid points have parents");
    let value = |s: &DyadicRational| cache.get(s).cloned().expect("grid contains all ancestors");
    let tau = tau_of(&value(&minus), &value(&plus), p);
    Ok(Node::Split {
        t: t.clone(),
        tau,
        left: Box::new(build_node(&plus, cache, p)?),
        right: Box::new(build_node(&minus, cache, p)?),
    })
}

/// A dyadic subinterval `[k/2^level, (k+1)/2^level]` of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicInterval {
    pub k: u64,
    pub level: u32,
}

impl DyadicInterval {
    pub fn measure(&self) -> Rational {
        Rational::new(One::one(), num_bigint::BigInt::one() << self.level)
    }

    fn children(&self) -> (DyadicInterval, DyadicInterval) {
        (
            DyadicInterval {
                k: 2 * self.k,
                level: self.level + 1,
            },
            DyadicInterval {
                k: 2 * self.k + 1,
                level: self.level + 1,
            },
        )
    }
}

impl std::fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let start = DyadicRational::new(self.k, self.level);
        let end = DyadicRational::new(self.k + 1, self.level);
        write!(f, "[{start}, {end}]")
    }
}

/// Haar coefficient of the extremal function on one dyadic interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarCoefficient {
    pub interval: DyadicInterval,
    pub coefficient: RatInterval,
}

/// A maximal interval on which the function is constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafValue {
    pub interval: DyadicInterval,
    pub value: RatInterval,
    /// Square function squared on the interval.
    pub square: RatInterval,
}

fn sqrt_one_minus_square(tau: &RatInterval, p: Precision) -> Result<RatInterval> {
    let r = &RatInterval::one() - &tau.square();
    let r = if r.lo() < &Rational::zero() {
        RatInterval::new(Rational::zero(), r.hi().clone())
    } else {
        r
    };
    sqrt_enclosure(&r, p)
}

impl ExtremalTree {
    pub fn t(&self) -> &DyadicRational {
        &self.t
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn depth(&self) -> u32 {
        self.root.depth()
    }

    fn work(&self) -> Precision {
        self.precision.plus(self.depth() + 16)
    }

    /// Same function with enclosures built at doubled precision.
    pub fn refined(&self) -> Result<Self> {
        let next = self
            .precision
            .doubled()
            .ok_or_else(|| Error::Inconclusive {
                what: format!("extremal tree for {}", self.t),
                cap: self.precision.cap(),
            })?;
        build_extremal(&self.t, next)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trees serialize")
    }

    /// Haar coefficients in depth-first order (parent before children, left first).
    pub fn haar_coefficients(&self) -> Result<Vec<HaarCoefficient>> {
        let mut out = Vec::new();
        let p = self.work();
        fn walk(
            node: &Node,
            j: DyadicInterval,
            scale: RatInterval,
            p: Precision,
            out: &mut Vec<HaarCoefficient>,
        ) -> Result<()> {
            match node {
                Node::Leaf => {}
                Node::PureHaar => out.push(HaarCoefficient {
                    interval: j,
                    coefficient: scale,
                }),
                Node::Split {
                    tau, left, right, ..
                } => {
                    out.push(HaarCoefficient {
                        interval: j.clone(),
                        coefficient: (&scale * tau).coarsen(p.bits()),
                    });
                    let next = (&scale * &sqrt_one_minus_square(tau, p)?).coarsen(p.bits());
                    let (l, r) = j.children();
                    walk(left, l, next.clone(), p, out)?;
                    walk(right, r, next, p, out)?;
                }
            }
            Ok(())
        }
        walk(
            &self.root,
            DyadicInterval { k: 0, level: 0 },
            RatInterval::one(),
            p,
            &mut out,
        )?;
        Ok(out)
    }

    /// Values of the function and of `(Sf)^2` on each constancy interval, left to right.
    pub fn leaves(&self) -> Result<Vec<LeafValue>> {
        let p = self.work();
        let mut out = Vec::new();
        struct Path {
            value: RatInterval,
            scale: RatInterval,
            square: RatInterval,
        }
        fn walk(
            node: &Node,
            j: DyadicInterval,
            path: Path,
            p: Precision,
            out: &mut Vec<LeafValue>,
        ) -> Result<()> {
            match node {
                Node::Leaf => out.push(LeafValue {
                    interval: j,
                    value: path.value,
                    square: path.square,
                }),
                Node::PureHaar => {
                    let (l, r) = j.children();
                    let coeff = path.scale.clone();
                    let sq = (&path.square + &coeff.square()).coarsen(p.bits());
                    out.push(LeafValue {
                        interval: l,
                        value: (&path.value - &coeff).coarsen(p.bits()),
                        square: sq.clone(),
                    });
                    out.push(LeafValue {
                        interval: r,
                        value: (&path.value + &coeff).coarsen(p.bits()),
                        square: sq,
                    });
                }
                Node::Split {
                    tau, left, right, ..
                } => {
                    let coeff = (&path.scale * tau).coarsen(p.bits());
                    let sq = (&path.square + &coeff.square()).coarsen(p.bits());
                    let next = (&path.scale * &sqrt_one_minus_square(tau, p)?).coarsen(p.bits());
                    let (l, r) = j.children();
                    walk(
                        left,
                        l,
                        Path {
                            value: (&path.value - &coeff).coarsen(p.bits()),
                            scale: next.clone(),
                            square: sq.clone(),
                        },
                        p,
                        out,
                    )?;
                    walk(
                        right,
                        r,
                        Path {
                            value: (&path.value + &coeff).coarsen(p.bits()),
                            scale: next,
                            square: sq,
                        },
                        p,
                        out,
                    )?;
                }
            }
            Ok(())
        }
        walk(
            &self.root,
            DyadicInterval { k: 0, level: 0 },
            Path {
                value: RatInterval::zero(),
                scale: RatInterval::one(),
                square: RatInterval::zero(),
            },
            p,
            &mut out,
        )?;
        Ok(out)
    }
}

/// Per-leaf report of `(Sf)^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareLeaf {
    pub interval: DyadicInterval,
    /// `1 - prod(1 - tau_k^2)` along the path, or exactly 1 when the path ends in `h_J`.
    pub square: RatInterval,
    pub exactly_one: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareReport {
    pub sup: RatInterval,
    /// Certified `sup <= 1`.
    pub bounded: bool,
    pub leaves: Vec<SquareLeaf>,
}

/// Enclosure of `ess sup (Sf)^2` with a per-leaf breakdown.
///
/// Along a path with coefficients `tau_k`, the squared coefficients telescope:
/// `sum tau_k^2 prod_{j<k} (1 - tau_j^2) = 1 - prod (1 - tau_k^2)`, and a final
/// `h_J` contributes the whole remaining product, giving exactly 1.
pub fn square_function_sup(tree: &ExtremalTree) -> SquareReport {
    let p = tree.work();
    let mut leaves = Vec::new();
    fn walk(
        node: &Node,
        j: DyadicInterval,
        prod: RatInterval,
        p: Precision,
        out: &mut Vec<SquareLeaf>,
    ) {
        match node {
            Node::Leaf => out.push(SquareLeaf {
                interval: j,
                square: (&RatInterval::one() - &prod).coarsen(p.bits()),
                exactly_one: false,
            }),
            Node::PureHaar => {
                let (l, r) = j.children();
                for half in [l, r] {
                    out.push(SquareLeaf {
                        interval: half,
                        square: RatInterval::one(),
                        exactly_one: true,
                    });
                }
            }
            Node::Split {
                tau, left, right, ..
            } => {
                let factor = &RatInterval::one() - &tau.square();
                let next = (&prod * &factor).coarsen(p.bits());
                let (l, r) = j.children();
                walk(left, l, next.clone(), p, out);
                walk(right, r, next, p, out);
            }
        }
    }
    walk(
        tree.root(),
        DyadicInterval { k: 0, level: 0 },
        RatInterval::one(),
        p,
        &mut leaves,
    );
    let sup = leaves
        .iter()
        .map(|l| l.square.clone())
        .reduce(|a, b| RatInterval::new(a.lo().max(b.lo()).clone(), a.hi().max(b.hi()).clone()))
        .unwrap_or_else(RatInterval::zero);
    let bounded = sup.hi() <= &Rational::one();
    SquareReport {
        sup,
        bounded,
        leaves,
    }
}

/// The level `x` at which the tail `{f >= x}` is measured.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    /// The exact value `A(t)`.
    Bridge(DyadicRational),
    Value(Rational),
    Enclosure(RatInterval),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailResult {
    #[serde(serialize_with = "display_string")]
    pub measure: DyadicRational,
    pub threshold: RatInterval,
    /// Smallest `|f - x|` enclosure among leaves decided by numeric comparison;
    /// `None` when every leaf was decided through exact identities.
    pub strict_margin: Option<RatInterval>,
}

enum Thr {
    Exact(DyadicRational),
    Approx(RatInterval),
}

struct TailWalk<'a> {
    p: Precision,
    cache: &'a BridgeCache,
    inside: Rational,
    margin: Option<RatInterval>,
    undecided: bool,
}

impl TailWalk<'_> {
    fn bridge(&self, s: &DyadicRational) -> RatInterval {
        self.cache
            .get(s)
            .cloned()
            .expect("threshold point is on the grid")
    }

    fn decide(&mut self, value: &RatInterval, x: &RatInterval, weight: &Rational) {
        let gap = value - x;
        if gap.is_point() && gap.lo().is_zero() || gap.lo() > &Rational::zero() {
            self.inside += weight;
        } else if gap.hi() < &Rational::zero() {
        } else {
            self.undecided = true;
            return;
        }
        let abs = gap.abs();
        if self.margin.as_ref().is_none_or(|m| abs.lo() < m.lo()) {
            self.margin = Some(abs);
        }
    }

    fn walk(&mut self, node: &Node, thr: Thr, weight: Rational) -> Result<()> {
        if self.undecided {
            return Ok(());
        }
        let thr = match thr {
            Thr::Exact(s) if s != node.t() => Thr::Approx(self.bridge(&s)),
            other => other,
        };
        let half = &weight / Rational::from_integer(2.into());
        match (node, thr) {
            // f = 0 >= A(0) = 0
            (Node::Leaf, Thr::Exact(_)) => self.inside += weight,
            (Node::Leaf, Thr::Approx(x)) => self.decide(&RatInterval::zero(), &x, &weight),
            // h_I >= A(1/2) = 1 exactly on the right half
            (Node::PureHaar, Thr::Exact(_)) => self.inside += half,
            (Node::PureHaar, Thr::Approx(x)) => {
                self.decide(&RatInterval::from_integer(-1), &x, &half);
                self.decide(&RatInterval::one(), &x, &half);
            }
            // X(A(t), tau) = A(t+) and X(A(t), -tau) = A(t-) by the choice of tau
            (
                Node::Split {
                    tau, left, right, ..
                },
                Thr::Exact(s),
            ) => {
                let x = self.bridge(&s);
                let (lt, rt) = (left.t(), right.t());
                let lx = x_map(&x, tau, self.p)?;
                let rx = x_map(&x, &-tau.clone(), self.p)?;
                if !lx.overlaps(&self.bridge(&lt)) || !rx.overlaps(&self.bridge(&rt)) {
                    return Err(Error::Domain(format!(
                        "threshold transport at {s} disagrees with the grid"
                    )));
                }
                self.walk(left, Thr::Exact(lt), half.clone())?;
                self.walk(right, Thr::Exact(rt), half)?;
            }
            (
                Node::Split {
                    tau, left, right, ..
                },
                Thr::Approx(x),
            ) => {
                let lx = x_map(&x, tau, self.p)?;
                let rx = x_map(&x, &-tau.clone(), self.p)?;
                self.walk(left, Thr::Approx(lx), half.clone())?;
                self.walk(right, Thr::Approx(rx), half)?;
            }
        }
        Ok(())
    }
}

/// Exact measure of `{f >= x}` for the tree's function.
///
/// Comparisons that interval arithmetic cannot settle trigger a rebuild of the
/// tree at doubled precision, up to the cap.
pub fn tail_measure(tree: &ExtremalTree, x: &Threshold) -> Result<TailResult> {
    let mut current = tree.clone();
    loop {
        if let Some(result) = tail_once(&current, x)? {
            return Ok(result);
        }
        current = current.refined().map_err(|e| match e {
            Error::Inconclusive { cap, .. } => Error::Inconclusive {
                what: format!("tail of the extremal function for {} at {:?}", tree.t, x),
                cap,
            },
            other => other,
        })?;
    }
}

fn tail_once(tree: &ExtremalTree, x: &Threshold) -> Result<Option<TailResult>> {
    let p = tree.work();
    let level = match x {
        Threshold::Bridge(s) => {
            if !s.in_half_unit() {
                return Err(Error::Domain(format!("{s} is not in [0, 1/2]")));
            }
            tree.t.level().max(s.level())
        }
        _ => tree.t.level(),
    };
    let cache = BridgeCache::build(level.max(1), p)?;
    let (thr, enclosure) = match x {
        Threshold::Bridge(s) => (
            Thr::Exact(s.clone()),
            cache.get(s).cloned().expect("on grid"),
        ),
        Threshold::Value(q) => (
            Thr::Approx(RatInterval::point(q.clone())),
            RatInterval::point(q.clone()),
        ),
        Threshold::Enclosure(iv) => (Thr::Approx(iv.clone()), iv.clone()),
    };
    let mut walk = TailWalk {
        p,
        cache: &cache,
        inside: Rational::zero(),
        margin: None,
        undecided: false,
    };
    walk.walk(&tree.root, thr, Rational::one())?;
    if walk.undecided {
        return Ok(None);
    }
    let measure = DyadicRational::from_rational(&walk.inside).expect("leaf weights are dyadic");
    Ok(Some(TailResult {
        measure,
        threshold: enclosure,
        strict_margin: walk.margin,
    }))
}
