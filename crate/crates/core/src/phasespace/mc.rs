//! Monte Carlo integration over `(S²)²` with the uniform measure
//! `dΩ = sinθa dθa dφa sinθb dθb dφb`.
//!
//! Samples are split into fixed-size chunks. Chunk `k` draws from its own
//! ChaCha8 stream (`seed`, stream `k`), and chunk statistics are merged in
//! chunk order, so estimates do not depend on the number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PhasePoint;
use crate::error::{Error, Result};

/// `∫ dΩ` over both spheres.
pub const PHASE_SPACE_VOLUME: f64 = 16.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Upper bound on the fraction of samples allowed to produce non-finite values.
pub const MAX_NON_FINITE_FRACTION: f64 = 1e-4;

pub const MIN_SAMPLES: u64 = 1000;

pub const DEFAULT_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, chunk: DEFAULT_CHUNK }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::config("samples", format!("must be at least {MIN_SAMPLES}, got {}", self.samples)));
        }
        if self.chunk == 0 {
            return Err(Error::config("chunk", "must be positive"));
        }
        Ok(())
    }

    fn chunks(&self) -> u64 {
        self.samples.div_ceil(self.chunk)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, stderr: self.stderr * k.abs() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOutcome {
    pub estimates: Vec<Estimate>,
    pub samples: u64,
    /// Samples the integrand flagged as dropped (e.g. `Q` below the floor).
    pub discarded: u64,
    pub non_finite: u64,
}

impl McOutcome {
    pub fn discarded_fraction(&self) -> f64 {
        self.discarded as f64 / self.samples as f64
    }
}

/// Uniform on the open interval (0, 1).
fn open_unit(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

fn draw_point(rng: &mut ChaCha8Rng) -> PhasePoint {
    let tau = 2.0 * std::f64::consts::PI;
    let ca = 2.0 * open_unit(rng.next_u64()) - 1.0;
    let pa = tau * open_unit(rng.next_u64());
    let cb = 2.0 * open_unit(rng.next_u64()) - 1.0;
    let pb = tau * open_unit(rng.next_u64());
    PhasePoint::new(ca.acos(), pa, cb.acos(), pb)
}

/// Per-output running moments, shifted by the first value to keep the
/// sum-of-squares well conditioned.
#[derive(Debug, Clone)]
struct Moments {
    n: u64,
    shift: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn new(outputs: usize) -> Self {
        Self { n: 0, shift: vec![0.0; outputs], sum: vec![0.0; outputs], sum_sq: vec![0.0; outputs] }
    }

    fn push(&mut self, values: &[f64]) {
        if self.n == 0 {
            self.shift.copy_from_slice(values);
        }
        self.n += 1;
        for (i, &x) in values.iter().enumerate() {
            let d = x - self.shift[i];
            self.sum[i] += d;
            self.sum_sq[i] += d * d;
        }
    }

    /// (n, mean, M2) per output.
    fn finish(&self) -> Vec<(f64, f64, f64)> {
        let n = self.n as f64;
        (0..self.sum.len())
            .map(|i| {
                if self.n == 0 {
                    return (0.0, 0.0, 0.0);
                }
                let mean_d = self.sum[i] / n;
                let m2 = (self.sum_sq[i] - self.sum[i] * mean_d).max(0.0);
                (n, self.shift[i] + mean_d, m2)
            })
            .collect()
    }
}

struct ChunkResult {
    stats: Vec<(f64, f64, f64)>,
    discarded: u64,
    non_finite: u64,
}

fn run_chunk<F>(k: u64, outputs: usize, cfg: &MCConfig, f: &F) -> ChunkResult
where
    F: Fn(&PhasePoint, &mut [f64]) -> bool + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(k);
    let start = k * cfg.chunk;
    let len = cfg.chunk.min(cfg.samples - start);
    let mut moments = Moments::new(outputs);
    let mut buf = vec![0.0; outputs];
    let (mut discarded, mut non_finite) = (0u64, 0u64);
    for _ in 0..len {
        let p = draw_point(&mut rng);
        buf.iter_mut().for_each(|x| *x = 0.0);
        if !f(&p, &mut buf) {
            discarded += 1;
        }
        if buf.iter().any(|x| !x.is_finite()) {
            non_finite += 1;
            buf.iter_mut().filter(|x| !x.is_finite()).for_each(|x| *x = 0.0);
        }
        moments.push(&buf);
    }
    ChunkResult { stats: moments.finish(), discarded, non_finite }
}

/// Integrates a vector-valued integrand over `(S²)²`.
///
/// `f` writes one value per output into a zeroed buffer and returns `false`
/// when it deliberately dropped the sample (the sample still counts, with
/// whatever it wrote, normally zeros). Non-finite values are replaced by zero;
/// if they occur in more than 0.01% of samples the run fails.
pub fn mc_integrate_many<F>(outputs: usize, f: F, cfg: &MCConfig) -> Result<McOutcome>
where
    F: Fn(&PhasePoint, &mut [f64]) -> bool + Sync,
{
    cfg.validate()?;
    let chunks: Vec<ChunkResult> =
        (0..cfg.chunks()).into_par_iter().map(|k| run_chunk(k, outputs, cfg, &f)).collect();

    let mut acc = vec![(0.0f64, 0.0f64, 0.0f64); outputs];
    let (mut discarded, mut non_finite) = (0u64, 0u64);
    for c in &chunks {
        discarded += c.discarded;
        non_finite += c.non_finite;
        for (a, &(nb, mb, m2b)) in acc.iter_mut().zip(&c.stats) {
            let (na, ma, m2a) = *a;
            let n = na + nb;
            if n == 0.0 {
                continue;
            }
            let delta = mb - ma;
            *a = (n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n);
        }
    }
    if non_finite as f64 > MAX_NON_FINITE_FRACTION * cfg.samples as f64 {
        return Err(Error::NonFinite { non_finite, samples: cfg.samples });
    }
    let estimates = acc
        .into_iter()
        .map(|(n, mean, m2)| {
            let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
            Estimate { value: PHASE_SPACE_VOLUME * mean, stderr: PHASE_SPACE_VOLUME * (var / n).sqrt() }
        })
        .collect();
    Ok(McOutcome { estimates, samples: cfg.samples, discarded, non_finite })
}

/// `∫ f dΩ` for a scalar integrand.
pub fn mc_integrate<F>(f: F, cfg: &MCConfig) -> Result<Estimate>
where
    F: Fn(&PhasePoint) -> f64 + Sync,
{
    let out = mc_integrate_many(
        1,
        |p, buf| {
            buf[0] = f(p);
            true
        },
        cfg,
    )?;
    Ok(out.estimates[0])
}
