use std::cmp::Ordering::Greater;

use super::certificate::Certificate;
use super::engine::Pipeline;
use crate::poly::Verdict::{Fail, Pass};

const SPOT_SAMPLES: usize = 1000;

/// `M[M[y,x],M[z,x]] >= M[M[y,z],x]` for `y, z` on the same side of `x`.
pub fn mean_assoc_pipeline() -> Pipeline {
    Pipeline::new("4.3", &["x", "y", "z"])
        .define("Den[x_,y_]=4+(x-y)^2")
        .define("MM[x_,y_]=(x+y)^2/Den[x,y]")
        .define("U[x_,y_,z_]=2+x^2+MM[y,z]")
        .define("V[x_,y_,z_]=x^2+MM[y,z]-MM[y,x]-MM[z,x]")
        .define("W[x_,y_,z_]=(2+MM[y,x]+MM[z,x])*x")
        .define("F[x_,y_,z_]=U[x,y,z]^2*MM[y,x]*MM[z,x]-V[x,y,z]^2-W[x,y,z]^2*MM[y,z]")
        .define("G[x_,y_,z_]=F[x,y,z]^2-4*V[x,y,z]^2*W[x,y,z]^2*MM[y,z]")
        .sign(
            "4*(x-y)*(x-z)/(Den[x,y]^2*Den[x,z]^2*Den[y,z]^2)",
            &[("x", "1/2"), ("y", "1/4"), ("z", "1/8")],
            Greater,
        )
        .poly(
            "P1",
            "F[x,y,z]*Den[x,y]^2*Den[x,z]^2*Den[y,z]^2/4/(x-y)/(x-z)",
            &["x", "y", "z"],
        )
        .linear_test("P1[x,y,z]", &["x", "y", "z"], &["z", "y", "x"], Fail)
        .identity(
            "P1[0,y,z]",
            "y*(y-z)^2*z*(y+z)^2*(20+9*y^2-4*y*z+9*z^2+2*y^2*z^2)",
        )
        .linear_test(
            "20+9*y^2-4*y*z+9*z^2+2*y^2*z^2",
            &["y", "z"],
            &["z", "y"],
            Pass,
        )
        .linear_test(
            "P1[x,y,z]-P1[0,y,z]",
            &["x", "y", "z"],
            &["z", "y", "x"],
            Pass,
        )
        .sign(
            "16*(x-y)^2*(x-z)^2*(y-z)^2/(Den[x,y]^4*Den[x,z]^4*Den[y,z]^4)",
            &[("x", "1/2"), ("y", "1/4"), ("z", "1/8")],
            Greater,
        )
        .poly(
            "P2",
            "G[x,y,z]*Den[x,y]^4*Den[x,z]^4*Den[y,z]^4/16/(x-y)^2/(x-z)^2/(y-z)^2",
            &["x", "y", "z"],
        )
        .identity("P2[0,y,z]*(y-z)^2", "P1[0,y,z]^2")
        .linear_test(
            "P2[x,y,z]-P2[0,y,z]",
            &["x", "y", "z"],
            &["z", "y", "x"],
            Pass,
        )
        .spot_check("P2[x,y,z]-P2[0,y,z]", &["x", "y", "z"], SPOT_SAMPLES, 43)
}

/// `M[M[x,y],M[z,w]] <= max{M[x,w], M[y,z]}` for `x <= y <= z <= w`.
pub fn merge_max_pipeline() -> Pipeline {
    Pipeline::new("4.4", &["u", "t", "s", "x", "y", "z"])
        .define("Y[u_,t_]=((1+t^2)*u+2*t)/(1-t^2)")
        .define("MM[u_,t_,s_]=(Y[u,t]+Y[u,s])^2/(4+(Y[u,t]-Y[u,s])^2)")
        .define("F[u_,t_,s_]=(4*u^2-(1-u^2)*(MM[u,-t,-s]+MM[u,t,s]))^2-4*MM[u,-t,-s]*MM[u,t,s]*(1+u^2)^2")
        .define("Den[u_,t_,s_]=4+(Y[u,t]-Y[u,s])^2")
        .define("G[u_,t_,s_]=F[u,t,s]*Den[u,-t,-s]^2*Den[u,t,s]^2")
        .sign(
            "(1-s^2)^8*(1-t^2)^8/4096/(s^2-t^2)^2/u^2/(1-s*t+s*u-t*u)/(1-s*t-s*u+t*u)",
            &[("u", "3/4"), ("s", "1/8"), ("t", "1/16")],
            Greater,
        )
        .poly(
            "P1",
            "G[u,s,t]*(1-s^2)^8*(1-t^2)^8/4096/(s^2-t^2)^2/u^2/(1-s*t+s*u-t*u)/(1-s*t-s*u+t*u)",
            &["u", "s", "t"],
        )
        .degree("P1", "u", 8)
        .poly("P2", "(1+z^2/16)^8*P1[z/2/(1+z^2/16)+x,z/4,y*z/4]", &["x", "y", "z"])
        .poly("P3", "4^36*P2[x,y,z]", &["x", "y", "z"])
        .integral("P3")
        .linear_test("P3[x,y,z]", &["x", "y", "z"], &["z", "y", "x"], Fail)
        .linear_test("P3[x,1-y,z]", &["x", "y", "z"], &["z", "y", "x"], Pass)
        .spot_check("P3[x,1-y,z]", &["x", "y", "z"], SPOT_SAMPLES, 44)
}

/// The tail-ratio inequality for `0 < x- < x < 1 < x+`.
pub fn tail_ratio_pipeline() -> Pipeline {
    Pipeline::new("4.5", &["x", "t", "y", "z"])
        .define("F[x_,t_]=(1-t^2)/(1+2*x*t+x^2)")
        .define("RHS[x_,t_]=(F[x,t]-F[x,x])/(1/2-F[x,x])")
        .define("U[x_,t_]=4*x*(1+x^2)*(1-t^2)")
        .define("V[x_,t_]=(1+10*x^2-3*x^4)*(1-t^2)-(x-t)^2*(1-x^2)^2/RHS[x,t]^2")
        .define("G[x_,t_]=U[x,t]^2*(2-x^2)-V[x,t]^2")
        .identity("x^2+2*x*(2/3*(1-x))+2*(2/3*(1-x))^2", "(8-4*x+5*x^2)/9")
        .linear_test("9-(8-4*x+5*x^2)", &["x"], &["x"], Pass)
        .sign(
            "16*(t+3*x+3*t*x^2+x^3)^4/(1-x^2)^2/(-1+2*t^2+2*t*x+x^2)/(5*x^2-1)^2",
            &[("x", "4/5"), ("t", "1/2")],
            Greater,
        )
        .poly(
            "P1",
            "G[x,t]*16*(t+3*x+3*t*x^2+x^3)^4/(1-x^2)^2/(-1+2*t^2+2*t*x+x^2)/(5*x^2-1)^2",
            &["x", "t"],
        )
        .poly("P2", "5^14*P1[1-3*y*z/5,y-3*y*z/5]", &["y", "z"])
        .integral("P2")
        .poly("P3", "P2[y,z]/y", &["y", "z"])
        .linear_test("P3[y,z]", &["y", "z"], &["z", "y"], Fail)
        .linear_test("2^13*P3[(1-y)/2,1-z]", &["y", "z"], &["z", "y"], Pass)
        .spot_check("2^13*P3[(1-y)/2,1-z]", &["y", "z"], SPOT_SAMPLES, 451)
        .linear_test("2^13*P3[1-y/2,1-z]", &["y", "z"], &["z", "y"], Pass)
        .spot_check("2^13*P3[1-y/2,1-z]", &["y", "z"], SPOT_SAMPLES, 452)
}

/// `M[z,y] <= M[(z+M[z,y])/2, M[M[z,y],y]]` for `0 <= z <= y <= 1`, `y - z <= 3/4`.
pub fn midpoint_step_pipeline() -> Pipeline {
    Pipeline::new("4.6", &["x", "t", "y", "z"])
        .define("Y[x_,t_]=((1+t^2)*x+2*t)/(1-t^2)")
        .define("U[x_,t_]=(Y[x,-t]+x)/2")
        .define("Den[x_,t_]=4+(x-Y[x,t])^2")
        .define("AA[x_,t_]=(x+Y[x,t])^2/Den[x,t]")
        .define("F[x_,t_]=4*U[x,t]^2*AA[x,t]*(1+x^2)^2-(4*x^2-(1-x^2)*(U[x,t]^2+AA[x,t]))^2")
        .define("G[x_,t_]=F[x,t]*Den[x,t]^2")
        .sign(
            "(1-t^2)^8/16/t^2/(1-t*x)",
            &[("x", "1/2"), ("t", "1/10")],
            Greater,
        )
        .poly("P1", "G[x,t]*(1-t^2)^8/16/t^2/(1-t*x)", &["x", "t"])
        .poly("P2", "10^20*P1[y+3*z/10,z/5]", &["y", "z"])
        .integral("P2")
        .linear_test("P2[y,z]", &["y", "z"], &["z", "y"], Pass)
        .spot_check("P2[y,z]", &["y", "z"], SPOT_SAMPLES, 46)
}

pub fn prove_mean_assoc() -> Certificate {
    mean_assoc_pipeline().run()
}

pub fn prove_merge_max() -> Certificate {
    merge_max_pipeline().run()
}

pub fn prove_tail_ratio() -> Certificate {
    tail_ratio_pipeline().run()
}

pub fn prove_midpoint_step() -> Certificate {
    midpoint_step_pipeline().run()
}

/// The four polynomial pipelines, each fed a perturbed final polynomial.
pub fn negative_controls() -> Vec<Certificate> {
    [
        mean_assoc_pipeline(),
        merge_max_pipeline(),
        tail_ratio_pipeline(),
        midpoint_step_pipeline(),
    ]
    .iter()
    .map(|p| p.perturbed().run())
    .collect()
}
