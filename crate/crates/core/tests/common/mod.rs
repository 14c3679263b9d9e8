#![allow(dead_code)]

use uea_lab::families::{abelian, bott_samelson_shadow, example_z3, random_nilpotent};
use uea_lab::{DGLAPresentation, PrimeContext};

pub const CUTOFF: usize = 10;
pub const RANDOM_SEEDS: u64 = 20;

pub fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).unwrap()
}

/// Named presentations used by the property suites.
pub fn corpus() -> Vec<(String, DGLAPresentation)> {
    let mut out = vec![("example_z3".to_string(), example_z3())];
    for p in [3, 5] {
        for degrees in [&[2, 3][..], &[3, 5], &[1, 2, 4], &[2, 2, 5]] {
            out.push((format!("abelian{degrees:?}/p{p}"), abelian(ctx(p), degrees).unwrap()));
        }
        out.push((format!("bott_samelson_shadow/p{p}"), bott_samelson_shadow(ctx(p), CUTOFF).unwrap()));
    }
    for seed in 0..RANDOM_SEEDS {
        let p = if seed % 2 == 0 { 3 } else { 5 };
        let gens = 3 + (seed % 3) as usize;
        out.push((format!("random_nilpotent/s{seed}/p{p}"), random_nilpotent(ctx(p), seed, gens).unwrap()));
    }
    out
}
