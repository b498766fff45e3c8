//! Reductions from combinatorial problems to layered DP instances.

pub mod msc;
pub mod tsp;

pub use msc::{
    brute_force_msc, decode_msc, encode_msc, gen_msc_instance, MscEncoding, MscInstance,
    MscSolution, MscState, MSC_SCHEMA,
};
pub use tsp::{
    brute_force_tsp, decode_tsp, encode_tsp, gen_tsp_graph, TspEncoding, TspGraph, TspState,
    TSP_SCHEMA,
};
