//! Wehrl entropy and its production/flux split in the Husimi picture, plus
//! the von Neumann production rate used as a reference.
//!
//! All phase-space functionals carry the normalisation `((2J+1)/4π)²` and
//! are estimated by Monte Carlo. A whole batch of states is evaluated on one
//! shared set of sample points, so estimates along a trajectory (or across a
//! family of related states) are correlated and their differences are far
//! less noisy than the individual standard errors suggest.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelSpec, Trajectory};
use crate::error::{Error, Result};
use crate::phasespace::{
    measure_prefactor, mc_integrate_many, Estimate, Frame, HusimiSample, MCConfig, Subsystem, SPIN_HALF,
};
use crate::qstate::{log_state, CoherenceReport, DensityMatrix4};

/// Husimi values below this are treated as zero in the `1/Q` integrands.
pub const Q_FLOOR: f64 = 1e-12;

/// Integrand values at one phase point, before the measure prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDensities {
    pub wehrl: f64,
    pub pi: f64,
    pub phi: f64,
    /// `Q` fell below [`Q_FLOOR`] and the production term was dropped.
    pub guarded: bool,
}

fn neg_q_ln_q(q: f64) -> f64 {
    if q > 0.0 {
        -q * q.ln()
    } else {
        0.0
    }
}

/// `N − cosθ` computed as `2n̄ + 2 sin²(θ/2)`, accurate near the north pole.
fn n_minus_cos(nbar: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * nbar + 2.0 * s * s
}

pub fn point_densities(frame: &Frame, s: &HusimiSample, spec: &ChannelSpec) -> PointDensities {
    let q = s.q;
    let wehrl = neg_q_ln_q(q);
    let guarded = q < Q_FLOOR;
    let j = SPIN_HALF;
    let mut pi = 0.0;
    let mut phi = 0.0;
    for (sub, bath) in [(Subsystem::A, &spec.a), (Subsystem::B, &spec.b)] {
        if bath.rate == 0.0 {
            continue;
        }
        match spec.kind {
            ChannelKind::Dephasing => {
                if !guarded {
                    let d = s.d_phi(sub);
                    pi += 0.5 * bath.rate * d * d / q;
                }
            }
            ChannelKind::AmplitudeDamping => {
                let n = 2.0 * bath.nbar + 1.0;
                let cos = frame.cos_theta(sub);
                let sin = frame.sin_theta(sub);
                let theta = frame.point.angles(sub).0;
                let denom = n_minus_cos(bath.nbar, theta);
                let dth = s.d_theta(sub);
                if !guarded {
                    let radial = 2.0 * j * q * sin + (cos - n) * dth;
                    let r = s.dphi_per_sin(sub);
                    pi += 0.5 * bath.rate * (radial * radial / denom + r * r * (n * cos - 1.0) * cos) / q;
                }
                phi += j * bath.rate * (2.0 * j * q * sin * sin / denom - sin * dth);
            }
        }
    }
    PointDensities { wehrl, pi, phi, guarded }
}

/// Wehrl entropy, production and flux of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceRates {
    pub wehrl: Estimate,
    pub pi: Estimate,
    pub phi: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub rates: Vec<PhaseSpaceRates>,
    pub samples: u64,
    /// Samples at which at least one state hit the `Q` floor.
    pub discarded: u64,
}

impl BatchOutcome {
    pub fn discarded_fraction(&self) -> f64 {
        self.discarded as f64 / self.samples as f64
    }
}

/// Evaluates every state on the same sample points.
pub fn evaluate_states(states: &[DensityMatrix4], spec: &ChannelSpec, cfg: &MCConfig) -> Result<BatchOutcome> {
    spec.validate()?;
    let k = states.len();
    let out = mc_integrate_many(
        3 * k,
        |p, buf| {
            let frame = Frame::new(*p);
            let mut kept = true;
            for (i, rho) in states.iter().enumerate() {
                let s = frame.sample(rho.matrix());
                let d = point_densities(&frame, &s, spec);
                kept &= !d.guarded;
                buf[3 * i] = d.wehrl;
                buf[3 * i + 1] = d.pi;
                buf[3 * i + 2] = d.phi;
            }
            kept
        },
        cfg,
    )?;
    let pre = measure_prefactor(SPIN_HALF);
    let rates = out
        .estimates
        .chunks_exact(3)
        .map(|e| PhaseSpaceRates { wehrl: e[0].scaled(pre), pi: e[1].scaled(pre), phi: e[2].scaled(pre) })
        .collect();
    Ok(BatchOutcome { rates, samples: out.samples, discarded: out.discarded })
}

fn single(rho: &DensityMatrix4, spec: &ChannelSpec, cfg: &MCConfig) -> Result<PhaseSpaceRates> {
    Ok(evaluate_states(std::slice::from_ref(rho), spec, cfg)?.rates[0])
}

/// `S_Q = −((2J+1)/4π)² ∫ Q ln Q dΩ`.
pub fn wehrl_entropy(rho: &DensityMatrix4, cfg: &MCConfig) -> Result<Estimate> {
    // the channel is irrelevant for S_Q; a zero-rate one skips the currents
    Ok(single(rho, &ChannelSpec::dephasing(0.0), cfg)?.wehrl)
}

/// Wehrl entropy production under local dephasing at rate `lambda`.
pub fn pi_dephasing(rho: &DensityMatrix4, lambda: f64, cfg: &MCConfig) -> Result<Estimate> {
    Ok(single(rho, &ChannelSpec::dephasing(lambda), cfg)?.pi)
}

/// Wehrl entropy production under local amplitude damping.
pub fn pi_ad(rho: &DensityMatrix4, gamma: f64, nbar: f64, cfg: &MCConfig) -> Result<Estimate> {
    Ok(single(rho, &ChannelSpec::amplitude_damping(gamma, nbar), cfg)?.pi)
}

/// Wehrl entropy flux under local amplitude damping.
pub fn phi_ad(rho: &DensityMatrix4, gamma: f64, nbar: f64, cfg: &MCConfig) -> Result<Estimate> {
    Ok(single(rho, &ChannelSpec::amplitude_damping(gamma, nbar), cfg)?.phi)
}

/// `Π_vN = −Tr[D(ρ)(ln ρ − ln ρ_eq)]`, the production rate of the relative
/// entropy to the channel's fixed point. Needs a full-rank `ρ` and fixed point.
pub fn pi_von_neumann(rho: &DensityMatrix4, spec: &ChannelSpec) -> Result<f64> {
    let eq = spec.equilibrium().ok_or_else(|| {
        Error::config("channel", "dephasing has no unique fixed point; Π_vN is undefined")
    })?;
    let log_eq = log_state(&eq)?;
    let log_rho = log_state(rho)?;
    let d = spec.dissipator(rho.matrix());
    Ok(-(d * (log_rho - log_eq)).trace().re)
}

/// One row of an experiment's output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub t: f64,
    pub pi: Estimate,
    pub phi: Estimate,
    pub wehrl: Estimate,
    /// `None` where `Π_vN` is undefined (dephasing, or a singular state).
    pub pi_vn: Option<f64>,
    pub c_l1: f64,
    pub c_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutcome {
    pub records: Vec<EntropyRecord>,
    pub samples: u64,
    pub discarded: u64,
}

/// All entropy quantities along a trajectory, on shared sample points.
pub fn trajectory_records(traj: &Trajectory, spec: &ChannelSpec, cfg: &MCConfig) -> Result<CurveOutcome> {
    let batch = evaluate_states(traj.states(), spec, cfg)?;
    let records = traj
        .iter()
        .zip(&batch.rates)
        .map(|((t, rho), r)| {
            let c = CoherenceReport::of(rho);
            EntropyRecord {
                t,
                pi: r.pi,
                phi: r.phi,
                wehrl: r.wehrl,
                pi_vn: pi_von_neumann(rho, spec).ok(),
                c_l1: c.l1,
                c_rel: c.relative,
            }
        })
        .collect();
    Ok(CurveOutcome { records, samples: batch.samples, discarded: batch.discarded })
}
