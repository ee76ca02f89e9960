//! Parametrised state families whose coherences are grouped by the dynamical
//! law they obey under each channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CMatrix4, DensityMatrix4, C64};
use crate::error::{Error, Result};

/// Hard cap on rejection-sampling attempts in [`random_state`].
pub const MAX_REJECTIONS: usize = 10_000;

/// Coherence pattern for dephasing channels.
///
/// `alpha` sits on the anti-diagonal `(1,4), (2,3)`; `beta` on
/// `(1,2), (1,3), (2,4), (3,4)`. All entries real and symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingFamily {
    pub populations: [f64; 4],
    pub alpha: f64,
    pub beta: f64,
}

/// Coherence pattern for amplitude damping channels.
///
/// `alpha` on `(1,2), (1,3)`; `beta` on `(2,4), (3,4)`; `gamma` on
/// `(1,4), (2,3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDampingFamily {
    pub populations: [f64; 4],
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

const ANTI_DIAGONAL: [(usize, usize); 2] = [(0, 3), (1, 2)];

fn check_populations(p: &[f64; 4]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidState(format!("populations must be non-negative, got {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > super::TRACE_TOLERANCE {
        return Err(Error::InvalidState(format!("populations sum to {s}, expected 1")));
    }
    Ok(())
}

fn layout(populations: &[f64; 4], slots: &[(&[(usize, usize)], f64)]) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    for (k, p) in populations.iter().enumerate() {
        m[(k, k)] = C64::from(*p);
    }
    for (cells, value) in slots {
        for &(i, j) in cells.iter() {
            m[(i, j)] = C64::from(*value);
            m[(j, i)] = C64::from(*value);
        }
    }
    m
}

impl DephasingFamily {
    pub fn x_state(populations: [f64; 4], alpha: f64) -> Self {
        Self { populations, alpha, beta: 0.0 }
    }

    pub fn build(&self) -> Result<DensityMatrix4> {
        check_populations(&self.populations)?;
        DensityMatrix4::new(layout(
            &self.populations,
            &[
                (&ANTI_DIAGONAL, self.alpha),
                (&[(0, 1), (0, 2), (1, 3), (2, 3)], self.beta),
            ],
        ))
    }

    /// `4|α| + 8|β|`.
    pub fn l1(&self) -> f64 {
        4.0 * (self.alpha.abs() + 2.0 * self.beta.abs())
    }
}

impl AmplitudeDampingFamily {
    pub fn build(&self) -> Result<DensityMatrix4> {
        check_populations(&self.populations)?;
        DensityMatrix4::new(layout(
            &self.populations,
            &[
                (&[(0, 1), (0, 2)], self.alpha),
                (&[(1, 3), (2, 3)], self.beta),
                (&ANTI_DIAGONAL, self.gamma),
            ],
        ))
    }

    /// `4(|α| + |β| + |γ|)`.
    pub fn l1(&self) -> f64 {
        4.0 * (self.alpha.abs() + self.beta.abs() + self.gamma.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Dephasing,
    AmplitudeDamping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceClass {
    Alpha,
    Beta,
    Gamma,
}

/// Either family, so that experiments can treat them uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateFamily {
    Dephasing(DephasingFamily),
    AmplitudeDamping(AmplitudeDampingFamily),
}

impl StateFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            StateFamily::Dephasing(_) => FamilyKind::Dephasing,
            StateFamily::AmplitudeDamping(_) => FamilyKind::AmplitudeDamping,
        }
    }

    pub fn build(&self) -> Result<DensityMatrix4> {
        match self {
            StateFamily::Dephasing(f) => f.build(),
            StateFamily::AmplitudeDamping(f) => f.build(),
        }
    }

    pub fn l1(&self) -> f64 {
        match self {
            StateFamily::Dephasing(f) => f.l1(),
            StateFamily::AmplitudeDamping(f) => f.l1(),
        }
    }

    pub fn populations(&self) -> [f64; 4] {
        match self {
            StateFamily::Dephasing(f) => f.populations,
            StateFamily::AmplitudeDamping(f) => f.populations,
        }
    }

    /// Scales each coherence class by its own factor. Factors are given in
    /// `(α, β, γ)` order; `γ` is ignored for the dephasing family.
    pub fn rescaled(&self, factors: [f64; 3]) -> Self {
        let [fa, fb, fg] = factors;
        match *self {
            StateFamily::Dephasing(f) => StateFamily::Dephasing(DephasingFamily {
                alpha: f.alpha * fa,
                beta: f.beta * fb,
                ..f
            }),
            StateFamily::AmplitudeDamping(f) => {
                StateFamily::AmplitudeDamping(AmplitudeDampingFamily {
                    alpha: f.alpha * fa,
                    beta: f.beta * fb,
                    gamma: f.gamma * fg,
                    ..f
                })
            }
        }
    }

    /// Same factor on every class.
    pub fn rescaled_uniform(&self, mu: f64) -> Self {
        self.rescaled([mu; 3])
    }
}

/// Draws a random family member: populations `ξi ~ U[0,1]` normalised by
/// their sum, each active coherence class `~ U[lo, hi]`, inactive classes
/// zero. Redraws until the state is PSD.
pub fn random_family(
    kind: FamilyKind,
    active: &[CoherenceClass],
    bounds: (f64, f64),
    seed: u64,
) -> Result<StateFamily> {
    let (lo, hi) = bounds;
    if !(0.0..=0.5).contains(&lo) || !(0.0..=0.5).contains(&hi) || lo > hi {
        return Err(Error::config(
            "coherence bounds",
            format!("need 0 <= lo <= hi <= 0.5, got [{lo}, {hi}]"),
        ));
    }
    if kind == FamilyKind::Dephasing && active.contains(&CoherenceClass::Gamma) {
        return Err(Error::config("coherence classes", "dephasing family has no gamma class"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let mut xi = [0.0f64; 4];
        for x in xi.iter_mut() {
            *x = rng.random::<f64>();
        }
        let total: f64 = xi.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let mut populations = xi.map(|x| x / total);
        // absorb the normalisation round-off in the last population
        populations[3] = 1.0 - populations[..3].iter().sum::<f64>();

        let mut draw = |class: CoherenceClass| {
            let v = rng.random_range(lo..=hi);
            if active.contains(&class) {
                v
            } else {
                0.0
            }
        };
        let alpha = draw(CoherenceClass::Alpha);
        let beta = draw(CoherenceClass::Beta);
        let gamma = draw(CoherenceClass::Gamma);

        let family = match kind {
            FamilyKind::Dephasing => StateFamily::Dephasing(DephasingFamily { populations, alpha, beta }),
            FamilyKind::AmplitudeDamping => StateFamily::AmplitudeDamping(AmplitudeDampingFamily {
                populations,
                alpha,
                beta,
                gamma,
            }),
        };
        match family.build() {
            Ok(_) => return Ok(family),
            Err(Error::NotPositive { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Exhausted {
        attempts: MAX_REJECTIONS,
    })
}

/// [`random_family`], built.
pub fn random_state(
    kind: FamilyKind,
    active: &[CoherenceClass],
    bounds: (f64, f64),
    seed: u64,
) -> Result<DensityMatrix4> {
    random_family(kind, active, bounds, seed)?.build()
}
