//! Two-qubit density matrices and their information-theoretic measures.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with `|0⟩` the `σz = +1`
//! eigenstate. The first tensor factor is qubit `a`.

mod families;
mod text;

pub use families::{
    random_family, random_state, AmplitudeDampingFamily, CoherenceClass, DephasingFamily,
    FamilyKind, StateFamily,
};
pub use text::{format_state, parse_matrix, parse_state};

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix4 = Matrix4<C64>;

/// Tolerance on `ρ − ρ†`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Tolerance on `Tr ρ − 1`.
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Smallest admissible eigenvalue.
pub const PSD_TOLERANCE: f64 = -1e-10;
/// Reference states with an eigenvalue below this are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

/// A validated two-qubit state: Hermitian, unit trace, positive semi-definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    m: CMatrix4,
}

impl DensityMatrix4 {
    /// Validates `m` and wraps it.
    pub fn new(m: CMatrix4) -> Result<Self> {
        check_hermitian(&m)?;
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let rho = Self::from_raw(m);
        let min = rho.min_eigenvalue();
        if !(min >= PSD_TOLERANCE) {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(rho)
    }

    /// Wraps a matrix known to be a state up to round-off (propagator output).
    pub(crate) fn from_raw(m: CMatrix4) -> Self {
        Self { m }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_raw(CMatrix4::identity() * C64::from(0.25))
    }

    /// `|k⟩⟨k|` for basis index `k ∈ 0..4`.
    pub fn basis_state(k: usize) -> Self {
        assert!(k < 4, "basis index out of range");
        let mut m = CMatrix4::zeros();
        m[(k, k)] = C64::from(1.0);
        Self::from_raw(m)
    }

    /// Projector on the (normalised) pure state `psi`.
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let v = Vector4::from(psi);
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = v / C64::from(norm);
        Ok(Self::from_raw(v * v.adjoint()))
    }

    /// Product state `ρa ⊗ ρb` from two single-qubit 2×2 matrices.
    pub fn product(a: &nalgebra::Matrix2<C64>, b: &nalgebra::Matrix2<C64>) -> Result<Self> {
        Self::new(a.kronecker(b))
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix4 {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn populations(&self) -> [f64; 4] {
        [
            self.m[(0, 0)].re,
            self.m[(1, 1)].re,
            self.m[(2, 2)].re,
            self.m[(3, 3)].re,
        ]
    }

    /// Diagonal part `ξ` (dephased state).
    pub fn diagonal(&self) -> Self {
        let mut m = CMatrix4::zeros();
        for i in 0..4 {
            m[(i, i)] = C64::from(self.m[(i, i)].re);
        }
        Self::from_raw(m)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Multiplies every off-diagonal entry by `mu`, keeping the populations.
    pub fn rescale_coherences(&self, mu: f64) -> Result<Self> {
        let mut m = self.m;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    m[(i, j)] *= mu;
                }
            }
        }
        Self::new(m)
    }

    /// Hermiticity, trace and positivity residuals, for assertions.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.m).map(|_| ())
    }
}

fn check_hermitian(m: &CMatrix4) -> Result<()> {
    for i in 0..4 {
        for j in 0..4 {
            let a = m[(i, j)];
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::InvalidState(format!("entry ({i},{j}) is not finite")));
            }
            if (a - m[(j, i)].conj()).norm() > HERMITIAN_TOLERANCE {
                return Err(Error::InvalidState(format!(
                    "not Hermitian at ({i},{j}): {a} vs {}",
                    m[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn l1_coherence(rho: &DensityMatrix4) -> f64 {
    let m = rho.matrix();
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// `S(ξ) − S(ρ)` in nats, clamped at zero against round-off.
pub fn relative_coherence(rho: &DensityMatrix4) -> f64 {
    let c = von_neumann_entropy(&rho.diagonal()) - von_neumann_entropy(rho);
    if c < 0.0 && c > -1e-12 {
        0.0
    } else {
        c
    }
}

/// Coherence of a state under both quantifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub l1: f64,
    pub relative: f64,
}

impl CoherenceReport {
    pub fn of(rho: &DensityMatrix4) -> Self {
        Self {
            l1: l1_coherence(rho),
            relative: relative_coherence(rho),
        }
    }
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `−Tr ρ ln ρ`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix4) -> f64 {
    -rho.eigenvalues().iter().map(|&p| xlnx(p)).sum::<f64>()
}

/// `Tr(ρ ln ρ − ρ ln σ)`.
pub fn relative_entropy(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> Result<f64> {
    let eig = SymmetricEigen::new(*sigma.matrix());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= SINGULAR_TOLERANCE) {
        return Err(Error::SingularReference {
            min_eigenvalue: min,
        });
    }
    let neg_s = -von_neumann_entropy(rho);
    let mut cross = 0.0;
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        cross += w * eig.eigenvalues[k].ln();
    }
    Ok(neg_s - cross)
}

/// Matrix logarithm of a positive-definite state.
pub fn log_state(rho: &DensityMatrix4) -> Result<CMatrix4> {
    let eig = SymmetricEigen::new(*rho.matrix());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= SINGULAR_TOLERANCE) {
        return Err(Error::SingularReference {
            min_eigenvalue: min,
        });
    }
    let logs = eig.eigenvalues.map(|l| C64::from(l.ln()));
    let v = &eig.eigenvectors;
    Ok(v * CMatrix4::from_diagonal(&logs) * v.adjoint())
}

/// Inverse bath temperature fixed by detailed balance,
/// `β ε = ln((n̄+1)/n̄)`. Infinite for `n̄ = 0`.
pub fn inverse_temperature(nbar: f64, eps: f64) -> f64 {
    if nbar <= 0.0 {
        f64::INFINITY
    } else {
        ((nbar + 1.0) / nbar).ln() / eps
    }
}

/// `e^{−β H}/Z` for `H = (εa/2) σz⊗1 + (εb/2) 1⊗σz`.
pub fn gibbs_state(eps_a: f64, eps_b: f64, beta: f64) -> DensityMatrix4 {
    // excited (|0⟩) weight of one qubit: 1/(1+e^{βε}); well defined for β = ∞
    let excited = |eps: f64| {
        if beta == 0.0 {
            0.5
        } else {
            1.0 / (1.0 + (beta * eps).exp())
        }
    };
    let pa = excited(eps_a);
    let pb = excited(eps_b);
    let pops = [pa * pb, pa * (1.0 - pb), (1.0 - pa) * pb, (1.0 - pa) * (1.0 - pb)];
    let mut m = CMatrix4::zeros();
    for (k, p) in pops.iter().enumerate() {
        m[(k, k)] = C64::from(*p);
    }
    DensityMatrix4::from_raw(m)
}

/// Gibbs state of the bath with occupation `nbar`, for equal splittings `eps`.
pub fn thermal_state(nbar: f64, eps: f64) -> DensityMatrix4 {
    gibbs_state(eps, eps, inverse_temperature(nbar, eps))
}
