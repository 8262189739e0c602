#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use shrinker_core::{solve_geodesic, DiscreteCurve, SolveConfig};

/// Solved curve at `m` points, solved once per test binary.
pub fn curve(m: usize) -> &'static DiscreteCurve {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static DiscreteCurve>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache.entry(m).or_insert_with(|| {
        Box::leak(Box::new(
            solve_geodesic(&SolveConfig::with_points(m)).unwrap(),
        ))
    })
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
