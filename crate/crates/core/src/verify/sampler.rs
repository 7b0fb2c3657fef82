//! Deterministic counter-based sampling of in-domain phase points.

use crate::catalog::System;
use crate::error::{Error, Result};
use crate::phase::PhasePoint;
use crate::tolerances::{BOX_P, BOX_XY, BOX_Z};

/// SplitMix64 over an explicit counter. Every draw is a pure function of
/// (seed, counter), so reports are byte-identical across runs and platforms.
#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self
            .seed
            .wrapping_add(self.counter.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + (hi - lo) * u
    }
}

const MAX_REJECTIONS: usize = 1000;

/// Draw `count` points from the Cartesian sampling box, rejecting anything
/// that violates the system's domain predicate at the given margin.
pub fn sample_points(
    system: &System,
    count: usize,
    seed: u64,
    margin: f64,
) -> Result<Vec<PhasePoint>> {
    let mut rng = CounterRng::new(seed);
    let n = system.dim();
    let chart = system.cartesian_chart();
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0usize;
    while out.len() < count {
        let mut q = [0.0; 3];
        let mut p = [0.0; 3];
        q[0] = rng.uniform(BOX_XY.0, BOX_XY.1);
        q[1] = rng.uniform(BOX_XY.0, BOX_XY.1);
        if n == 3 {
            q[2] = rng.uniform(BOX_Z.0, BOX_Z.1);
        }
        for slot in p.iter_mut().take(n) {
            *slot = rng.uniform(BOX_P.0, BOX_P.1);
        }
        let z = PhasePoint::new(chart, &q[..n], &p[..n])?;
        if system.domain_ok(&z, margin) {
            out.push(z);
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= MAX_REJECTIONS {
                return Err(Error::SamplerExhausted(MAX_REJECTIONS));
            }
        }
    }
    Ok(out)
}
