//! Spin-coherent-state phase space of two spin-½ systems.
//!
//! A point `Ω = (θa, φa, θb, φb)` labels the product coherent state
//! `|Ω⟩ = |θa, φa⟩ ⊗ |θb, φb⟩`, and `Q(Ω) = ⟨Ω|ρ|Ω⟩`. All angular derivatives
//! of `Q` are evaluated in closed form from the derivatives of the coherent
//! vectors, never by differencing.

mod mc;

pub use mc::{mc_integrate, mc_integrate_many, Estimate, MCConfig, McOutcome, PHASE_SPACE_VOLUME};

use serde::{Deserialize, Serialize};

use crate::qstate::{CMatrix4, DensityMatrix4, C64};

/// Spin of each subsystem. The current formulas keep `J` symbolic; states
/// are only ever spin-½.
pub const SPIN_HALF: f64 = 0.5;

/// `((2J+1)/(4π))²`, the bipartite phase-space normalisation.
pub fn measure_prefactor(j: f64) -> f64 {
    let f = (2.0 * j + 1.0) / (4.0 * std::f64::consts::PI);
    f * f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub theta_a: f64,
    pub phi_a: f64,
    pub theta_b: f64,
    pub phi_b: f64,
}

impl PhasePoint {
    pub fn new(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> Self {
        Self { theta_a, phi_a, theta_b, phi_b }
    }

    pub fn angles(&self, sub: Subsystem) -> (f64, f64) {
        match sub {
            Subsystem::A => (self.theta_a, self.phi_a),
            Subsystem::B => (self.theta_b, self.phi_b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub const BOTH: [Subsystem; 2] = [Subsystem::A, Subsystem::B];
}

/// `(cos(θ/2), e^{iφ} sin(θ/2))`: the spin-½ coherent state `|θ, φ⟩` up to a
/// global phase, with `|0⟩` at the north pole.
pub fn coherent_vector(theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [C64::from(c), C64::from_polar(s, phi)]
}

/// `Q` and its first angular partials at one phase point.
///
/// `dphi_per_sin_*` hold `∂φQ / sinθ`, which stays finite at the poles and is
/// what the `cot θ ∂φ` and `∂φ²/sin²θ` terms are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiSample {
    pub q: f64,
    pub d_theta_a: f64,
    pub d_phi_a: f64,
    pub d_theta_b: f64,
    pub d_phi_b: f64,
    pub dphi_per_sin_a: f64,
    pub dphi_per_sin_b: f64,
}

impl HusimiSample {
    pub fn d_theta(&self, sub: Subsystem) -> f64 {
        match sub {
            Subsystem::A => self.d_theta_a,
            Subsystem::B => self.d_theta_b,
        }
    }

    pub fn d_phi(&self, sub: Subsystem) -> f64 {
        match sub {
            Subsystem::A => self.d_phi_a,
            Subsystem::B => self.d_phi_b,
        }
    }

    pub fn dphi_per_sin(&self, sub: Subsystem) -> f64 {
        match sub {
            Subsystem::A => self.dphi_per_sin_a,
            Subsystem::B => self.dphi_per_sin_b,
        }
    }
}

/// Trigonometry and coherent vectors at one phase point, reusable across
/// many states.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub point: PhasePoint,
    pub cos_theta: [f64; 2],
    pub sin_theta: [f64; 2],
    va: [C64; 2],
    vb: [C64; 2],
    v: [C64; 4],
    dv_theta_a: [C64; 4],
    dv_theta_b: [C64; 4],
    phase_a: C64,
    phase_b: C64,
}

fn kron2(x: &[C64; 2], y: &[C64; 2]) -> [C64; 4] {
    [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
}

impl Frame {
    pub fn new(point: PhasePoint) -> Self {
        let (sa, ca) = (point.theta_a / 2.0).sin_cos();
        let (sb, cb) = (point.theta_b / 2.0).sin_cos();
        let phase_a = C64::from_polar(1.0, point.phi_a);
        let phase_b = C64::from_polar(1.0, point.phi_b);
        let va = [C64::from(ca), phase_a * sa];
        let vb = [C64::from(cb), phase_b * sb];
        // ∂θ (cos(θ/2), e^{iφ} sin(θ/2)) = ½ (−sin(θ/2), e^{iφ} cos(θ/2))
        let dva = [C64::from(-0.5 * sa), phase_a * (0.5 * ca)];
        let dvb = [C64::from(-0.5 * sb), phase_b * (0.5 * cb)];
        Self {
            point,
            cos_theta: [point.theta_a.cos(), point.theta_b.cos()],
            sin_theta: [point.theta_a.sin(), point.theta_b.sin()],
            va,
            vb,
            v: kron2(&va, &vb),
            dv_theta_a: kron2(&dva, &vb),
            dv_theta_b: kron2(&va, &dvb),
            phase_a,
            phase_b,
        }
    }

    pub fn cos_theta(&self, sub: Subsystem) -> f64 {
        self.cos_theta[sub as usize]
    }

    pub fn sin_theta(&self, sub: Subsystem) -> f64 {
        self.sin_theta[sub as usize]
    }

    pub fn vector(&self) -> &[C64; 4] {
        &self.v
    }

    /// Husimi value and partials of `rho` (any Hermitian 4×4 matrix).
    pub fn sample(&self, rho: &CMatrix4) -> HusimiSample {
        let v = &self.v;
        let mut w = [C64::from(0.0); 4];
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = rho[(i, 0)] * v[0] + rho[(i, 1)] * v[1] + rho[(i, 2)] * v[2] + rho[(i, 3)] * v[3];
        }
        let dot = |u: &[C64; 4]| -> f64 {
            // Re(u† ρ v) = Re(u† w)
            (0..4).map(|i| (u[i].conj() * w[i]).re).sum()
        };
        let q = dot(v);
        let d_theta_a = 2.0 * dot(&self.dv_theta_a);
        let d_theta_b = 2.0 * dot(&self.dv_theta_b);

        // ∂φa Q = sinθa · Re[i e^{iφa} X_a],  X_a = vb† ρ_{(0,1) block of a} vb
        let (va, vb) = (&self.va, &self.vb);
        let mut xa = C64::from(0.0);
        let mut xb = C64::from(0.0);
        for k in 0..2 {
            for l in 0..2 {
                xa += vb[k].conj() * rho[(k, 2 + l)] * vb[l];
                xb += va[k].conj() * rho[(2 * k, 2 * l + 1)] * va[l];
            }
        }
        let ra = -(self.phase_a * xa).im;
        let rb = -(self.phase_b * xb).im;
        HusimiSample {
            q,
            d_theta_a,
            d_phi_a: self.sin_theta[0] * ra,
            d_theta_b,
            d_phi_b: self.sin_theta[1] * rb,
            dphi_per_sin_a: ra,
            dphi_per_sin_b: rb,
        }
    }

    /// `⟨Ω|m|Ω⟩` only.
    pub fn expectation(&self, m: &CMatrix4) -> f64 {
        let v = &self.v;
        let mut acc = 0.0;
        for i in 0..4 {
            let mut wi = C64::from(0.0);
            for j in 0..4 {
                wi += m[(i, j)] * v[j];
            }
            acc += (v[i].conj() * wi).re;
        }
        acc
    }
}

/// `Q(Ω) = ⟨Ω|ρ|Ω⟩` with its angular gradient.
pub fn husimi(rho: &DensityMatrix4, p: &PhasePoint) -> HusimiSample {
    Frame::new(*p).sample(rho.matrix())
}

/// `∂φ_j Q`, the real part behind `𝒥z(Q) = −i ∂φQ`.
pub fn current_jz(s: &HusimiSample, sub: Subsystem) -> f64 {
    s.d_phi(sub)
}

/// `𝒥₊(Q) = e^{iφ}(∂θ + i cotθ ∂φ)Q`.
pub fn current_j_plus(s: &HusimiSample, p: &PhasePoint, sub: Subsystem) -> C64 {
    let (theta, phi) = p.angles(sub);
    C64::from_polar(1.0, phi) * C64::new(s.d_theta(sub), theta.cos() * s.dphi_per_sin(sub))
}

/// `𝒥₋(Q) = −e^{−iφ}(∂θ − i cotθ ∂φ)Q`.
pub fn current_j_minus(s: &HusimiSample, p: &PhasePoint, sub: Subsystem) -> C64 {
    let (theta, phi) = p.angles(sub);
    -C64::from_polar(1.0, -phi) * C64::new(s.d_theta(sub), -theta.cos() * s.dphi_per_sin(sub))
}

/// Amplitude-damping current
/// `f_j(Q) = ½[2JQ − 𝒥z(Q)] e^{iφ} sinθ + ½[cosθ − (2n̄+1)] 𝒥₊(Q)`.
pub fn f_current(s: &HusimiSample, p: &PhasePoint, nbar: f64, j: f64, sub: Subsystem) -> C64 {
    let (theta, phi) = p.angles(sub);
    let jz = C64::new(0.0, -s.d_phi(sub));
    let first = (C64::from(2.0 * j * s.q) - jz) * C64::from_polar(0.5 * theta.sin(), phi);
    let second = current_j_plus(s, p, sub) * (0.5 * (theta.cos() - (2.0 * nbar + 1.0)));
    first + second
}
