//! Extremal functions as finite Haar trees, and a dynamic-programming lower bound for `B`.

mod dp;
mod tree;

pub use dp::{dp_oracle, DpGrid};
pub use tree::{
    build_extremal, square_function_sup, tail_measure, DyadicInterval, ExtremalTree,
    HaarCoefficient, LeafValue, Node, SquareLeaf, SquareReport, TailResult, Threshold,
};
