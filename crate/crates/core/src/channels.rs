//! Local Lindblad channels on two qubits, in the interaction picture.
//!
//! Both channels factorise as `E_a ⊗ E_b`, which is what the closed-form
//! propagators below exploit. [`rk4_evolve`] integrates `ρ̇ = D(ρ)` directly
//! and serves as the independent check on them.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{CMatrix4, DensityMatrix4, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Dephasing,
    AmplitudeDamping,
}

/// Rate and occupation of the bath attached to one qubit. For dephasing only
/// `rate` (λ) is read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalBath {
    pub rate: f64,
    pub nbar: f64,
}

impl LocalBath {
    /// `Γ̄ = Γ(2n̄+1)`.
    pub fn gamma_bar(&self) -> f64 {
        self.rate * (2.0 * self.nbar + 1.0)
    }

    /// Stationary excited-state (`|0⟩`) population, `n̄/(2n̄+1)`.
    pub fn excited_fraction(&self) -> f64 {
        self.nbar / (2.0 * self.nbar + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub a: LocalBath,
    pub b: LocalBath,
    pub eps_a: f64,
    pub eps_b: f64,
}

impl ChannelSpec {
    /// Equal dephasing rate `λ` on both qubits.
    pub fn dephasing(lambda: f64) -> Self {
        let bath = LocalBath { rate: lambda, nbar: 0.0 };
        Self { kind: ChannelKind::Dephasing, a: bath, b: bath, eps_a: 1.0, eps_b: 1.0 }
    }

    /// Equal damping rate `Γ` and occupation `n̄` on both qubits.
    pub fn amplitude_damping(gamma: f64, nbar: f64) -> Self {
        let bath = LocalBath { rate: gamma, nbar };
        Self { kind: ChannelKind::AmplitudeDamping, a: bath, b: bath, eps_a: 1.0, eps_b: 1.0 }
    }

    /// Amplitude damping with `Γ` chosen so that `Γ̄ = 1`; times are then in
    /// units of `1/Γ̄`.
    pub fn amplitude_damping_unit(nbar: f64) -> Self {
        Self::amplitude_damping(1.0 / (2.0 * nbar + 1.0), nbar)
    }

    pub fn with_splittings(mut self, eps_a: f64, eps_b: f64) -> Self {
        self.eps_a = eps_a;
        self.eps_b = eps_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, bath) in [("a", &self.a), ("b", &self.b)] {
            if !(bath.rate >= 0.0) || !bath.rate.is_finite() {
                return Err(Error::config(&format!("rate_{name}"), "must be finite and >= 0"));
            }
            if !(bath.nbar >= 0.0) || !bath.nbar.is_finite() {
                return Err(Error::config(&format!("nbar_{name}"), "must be finite and >= 0"));
            }
        }
        for (name, eps) in [("eps_a", self.eps_a), ("eps_b", self.eps_b)] {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::config(name, "level splitting must be > 0"));
            }
        }
        Ok(())
    }

    /// Largest decay rate of the generator, used to bound RK4 steps.
    pub fn max_rate(&self) -> f64 {
        match self.kind {
            ChannelKind::Dephasing => self.a.rate.max(self.b.rate),
            ChannelKind::AmplitudeDamping => self.a.gamma_bar().max(self.b.gamma_bar()),
        }
    }

    /// Fixed point the channel thermalises to; `None` for dephasing, which
    /// keeps every diagonal state.
    pub fn equilibrium(&self) -> Option<DensityMatrix4> {
        match self.kind {
            ChannelKind::Dephasing => None,
            // product Gibbs state at the detailed-balance temperature of
            // each bath: excited weight n̄/(2n̄+1) per qubit
            ChannelKind::AmplitudeDamping => Some(product_populations(
                self.a.excited_fraction(),
                self.b.excited_fraction(),
            )),
        }
    }

    /// `D(ρ) = D_a(ρ) + D_b(ρ)`.
    pub fn dissipator(&self, rho: &CMatrix4) -> CMatrix4 {
        dissipator_matrix(rho, self)
    }

    /// Closed-form `e^{tD} ρ`.
    pub fn propagate(&self, rho: &DensityMatrix4, t: f64) -> DensityMatrix4 {
        match self.kind {
            ChannelKind::Dephasing => dephasing_local(rho, self.a.rate, self.b.rate, t),
            ChannelKind::AmplitudeDamping => ad_local(rho, &self.a, &self.b, t),
        }
    }
}

fn product_populations(pa: f64, pb: f64) -> DensityMatrix4 {
    let pops = [pa * pb, pa * (1.0 - pb), (1.0 - pa) * pb, (1.0 - pa) * (1.0 - pb)];
    let mut m = CMatrix4::zeros();
    for (k, p) in pops.iter().enumerate() {
        m[(k, k)] = C64::from(*p);
    }
    DensityMatrix4::from_raw(m)
}

fn sigma_minus() -> Matrix2<C64> {
    // |0⟩ (σz = +1) → |1⟩
    Matrix2::new(C64::from(0.0), C64::from(0.0), C64::from(1.0), C64::from(0.0))
}

fn sigma_z() -> Matrix2<C64> {
    Matrix2::new(C64::from(1.0), C64::from(0.0), C64::from(0.0), C64::from(-1.0))
}

fn on_a(op: &Matrix2<C64>) -> CMatrix4 {
    op.kronecker(&Matrix2::identity())
}

fn on_b(op: &Matrix2<C64>) -> CMatrix4 {
    Matrix2::identity().kronecker(op)
}

fn lindblad_term(l: &CMatrix4, rho: &CMatrix4, rate: f64) -> CMatrix4 {
    if rate == 0.0 {
        return CMatrix4::zeros();
    }
    let ld = l.adjoint();
    let ldl = ld * l;
    (l * rho * ld - (ldl * rho + rho * ldl) * C64::from(0.5)) * C64::from(rate)
}

fn double_commutator(z: &CMatrix4, rho: &CMatrix4) -> CMatrix4 {
    let inner = z * rho - rho * z;
    z * inner - inner * z
}

fn dissipator_matrix(rho: &CMatrix4, spec: &ChannelSpec) -> CMatrix4 {
    match spec.kind {
        ChannelKind::Dephasing => {
            // −(λ/2)[Jz,[Jz,ρ]] with Jz = σz/2
            let za = on_a(&sigma_z());
            let zb = on_b(&sigma_z());
            double_commutator(&za, rho) * C64::from(-spec.a.rate / 8.0)
                + double_commutator(&zb, rho) * C64::from(-spec.b.rate / 8.0)
        }
        ChannelKind::AmplitudeDamping => {
            let sm = sigma_minus();
            let sp = sm.adjoint();
            let mut out = CMatrix4::zeros();
            for (bath, lower, raise) in [(&spec.a, on_a(&sm), on_a(&sp)), (&spec.b, on_b(&sm), on_b(&sp))] {
                out += lindblad_term(&lower, rho, bath.rate * (bath.nbar + 1.0));
                out += lindblad_term(&raise, rho, bath.rate * bath.nbar);
            }
            out
        }
    }
}

/// `D(ρ)` for the given channel; traceless and Hermitian.
pub fn dissipator_apply(rho: &DensityMatrix4, spec: &ChannelSpec) -> CMatrix4 {
    dissipator_matrix(rho.matrix(), spec)
}

fn hermitian_fill(m: &mut CMatrix4) {
    for i in 0..4 {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..4 {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
}

fn dephasing_local(rho: &DensityMatrix4, lambda_a: f64, lambda_b: f64, t: f64) -> DensityMatrix4 {
    let src = rho.matrix();
    let mut m = *src;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let differs_a = (i >> 1) != (j >> 1);
            let differs_b = (i & 1) != (j & 1);
            let mut rate = 0.0;
            if differs_a {
                rate += lambda_a / 2.0;
            }
            if differs_b {
                rate += lambda_b / 2.0;
            }
            m[(i, j)] = src[(i, j)] * (-rate * t).exp();
        }
    }
    hermitian_fill(&mut m);
    DensityMatrix4::from_raw(m)
}

/// Closed-form dephasing: populations fixed, `ρ14, ρ23` decay as `e^{−λt}`,
/// every other coherence as `e^{−λt/2}`.
pub fn dephasing_propagate(rho: &DensityMatrix4, lambda: f64, t: f64) -> DensityMatrix4 {
    dephasing_local(rho, lambda, lambda, t)
}

/// Single-qubit Pauli relaxation over time `t`, as a column-stochastic map on
/// `(p_excited, p_ground)`.
fn relaxation(bath: &LocalBath, t: f64) -> [[f64; 2]; 2] {
    let pe = bath.excited_fraction();
    let e = (-bath.gamma_bar() * t).exp();
    [
        [pe + (1.0 - pe) * e, pe * (1.0 - e)],
        [(1.0 - pe) * (1.0 - e), (1.0 - pe) + pe * e],
    ]
}

fn apply2(p: &[[f64; 2]; 2], x: C64, y: C64) -> (C64, C64) {
    (x * p[0][0] + y * p[0][1], x * p[1][0] + y * p[1][1])
}

fn ad_local(rho: &DensityMatrix4, a: &LocalBath, b: &LocalBath, t: f64) -> DensityMatrix4 {
    let src = rho.matrix();
    let pa = relaxation(a, t);
    let pb = relaxation(b, t);
    let mut m = CMatrix4::zeros();

    // populations: (P_a ⊗ P_b) acting on (ρ11, ρ22, ρ33, ρ44)
    let pops: Vec<f64> = (0..4).map(|k| src[(k, k)].re).collect();
    for i in 0..4 {
        let mut acc = 0.0;
        for j in 0..4 {
            acc += pa[i >> 1][j >> 1] * pb[i & 1][j & 1] * pops[j];
        }
        m[(i, i)] = C64::from(acc);
    }

    // (ρ12, ρ34): coherence on b, populations on a
    let cb = (-b.gamma_bar() * t / 2.0).exp();
    let (x, y) = apply2(&pa, src[(0, 1)], src[(2, 3)]);
    m[(0, 1)] = x * cb;
    m[(2, 3)] = y * cb;

    // (ρ13, ρ24): coherence on a, populations on b
    let ca = (-a.gamma_bar() * t / 2.0).exp();
    let (x, y) = apply2(&pb, src[(0, 2)], src[(1, 3)]);
    m[(0, 2)] = x * ca;
    m[(1, 3)] = y * ca;

    // (ρ14, ρ23): coherence on both
    let cab = ca * cb;
    m[(0, 3)] = src[(0, 3)] * cab;
    m[(1, 2)] = src[(1, 2)] * cab;

    hermitian_fill(&mut m);
    DensityMatrix4::from_raw(m)
}

/// Closed-form amplitude damping with equal baths.
///
/// `ρ12/ρ34` (and `ρ13/ρ24`) mix through the classical relaxation of the
/// other qubit while decaying at `Γ̄/2`; `ρ14, ρ23` decay at `Γ̄`; populations
/// follow the product of two single-qubit Pauli relaxations.
pub fn ad_propagate(rho: &DensityMatrix4, gamma: f64, nbar: f64, t: f64) -> DensityMatrix4 {
    let bath = LocalBath { rate: gamma, nbar };
    ad_local(rho, &bath, &bath, t)
}

/// Largest tolerated trace drift in [`rk4_evolve`].
pub const RK4_TRACE_DRIFT: f64 = 1e-8;

/// Fixed-step classical RK4 integration of `ρ̇ = D(ρ)` up to time `t`.
///
/// The step is shrunk so that an integer number of steps lands on `t`.
/// Requires `dt ≤ 10⁻³ / max_rate`.
pub fn rk4_evolve(rho0: &DensityMatrix4, spec: &ChannelSpec, t: f64, dt: f64) -> Result<DensityMatrix4> {
    let mut rho = *rho0.matrix();
    let mut now = 0.0;
    rk4_advance(&mut rho, spec, &mut now, t, dt)?;
    Ok(DensityMatrix4::from_raw(rho))
}

fn rk4_advance(rho: &mut CMatrix4, spec: &ChannelSpec, now: &mut f64, until: f64, dt: f64) -> Result<()> {
    let limit = 1e-3 / spec.max_rate();
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge(format!("dt = {dt} exceeds 1e-3/max_rate = {limit}")));
    }
    if until < *now {
        return Err(Error::config("t", "integration time must not decrease"));
    }
    let span = until - *now;
    let steps = (span / dt).ceil().max(if span > 0.0 { 1.0 } else { 0.0 }) as u64;
    if steps == 0 {
        return Ok(());
    }
    let h = span / steps as f64;
    let half = C64::from(h / 2.0);
    let sixth = C64::from(h / 6.0);
    let two = C64::from(2.0);
    for _ in 0..steps {
        let k1 = dissipator_matrix(rho, spec);
        let k2 = dissipator_matrix(&(*rho + k1 * half), spec);
        let k3 = dissipator_matrix(&(*rho + k2 * half), spec);
        let k4 = dissipator_matrix(&(*rho + k3 * C64::from(h)), spec);
        *rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        *rho = (*rho + rho.adjoint()) * C64::from(0.5);
        let drift = (rho.trace().re - 1.0).abs();
        if drift > RK4_TRACE_DRIFT {
            return Err(Error::StepTooLarge(format!("trace drift {drift:e}")));
        }
    }
    *now = until;
    Ok(())
}

/// States on a time grid. The grid starts at 0 and is strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix4>,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::config("time grid", "must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::config("time grid", "must be finite and strictly increasing"));
    }
    Ok(())
}

/// `points` equally spaced times on `[0, tmax]`.
pub fn time_grid(tmax: f64, points: usize) -> Result<Vec<f64>> {
    if !(tmax > 0.0) || !tmax.is_finite() {
        return Err(Error::config("tmax", "must be finite and > 0"));
    }
    if points < 2 {
        return Err(Error::config("steps", "need at least 2 grid points"));
    }
    let n = (points - 1) as f64;
    Ok((0..points).map(|k| tmax * k as f64 / n).collect())
}

impl Trajectory {
    /// Closed-form propagation of `rho0` to every grid time.
    pub fn analytic(rho0: &DensityMatrix4, spec: &ChannelSpec, times: &[f64]) -> Result<Self> {
        check_grid(times)?;
        spec.validate()?;
        let states = times.iter().map(|&t| spec.propagate(rho0, t)).collect();
        Ok(Self { times: times.to_vec(), states })
    }

    /// RK4 propagation through the grid, continuing from one grid time to the
    /// next.
    pub fn rk4(rho0: &DensityMatrix4, spec: &ChannelSpec, times: &[f64], dt: f64) -> Result<Self> {
        check_grid(times)?;
        spec.validate()?;
        let mut rho = *rho0.matrix();
        let mut now = 0.0;
        let mut states = Vec::with_capacity(times.len());
        for &t in times {
            rk4_advance(&mut rho, spec, &mut now, t, dt)?;
            states.push(DensityMatrix4::from_raw(rho));
        }
        Ok(Self { times: times.to_vec(), states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix4] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix4)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{l1_coherence, thermal_state, AmplitudeDampingFamily, DephasingFamily};
    use approx::assert_abs_diff_eq;

    fn max_diff(a: &CMatrix4, b: &CMatrix4) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn fig3_state() -> DensityMatrix4 {
        AmplitudeDampingFamily { populations: [0.1, 0.2, 0.1, 0.6], alpha: 0.02, beta: 0.15, gamma: 0.02 }
            .build()
            .unwrap()
    }

    #[test]
    fn dephasing_rates_by_entry() {
        let rho = DephasingFamily { populations: [0.25; 4], alpha: 0.1, beta: 0.05 }.build().unwrap();
        let t = 0.7;
        let out = dephasing_propagate(&rho, 1.0, t);
        assert_eq!(out.populations(), rho.populations());
        assert_abs_diff_eq!(out.entry(0, 3).re, 0.1 * (-t).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.entry(2, 1).re, 0.1 * (-t).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.entry(0, 1).re, 0.05 * (-t / 2.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.entry(3, 2).re, 0.05 * (-t / 2.0).exp(), epsilon = 1e-15);

        assert_eq!(dephasing_propagate(&rho, 1.0, 0.0), rho);
        let gone = dephasing_propagate(&rho, 1.0, 50.0);
        assert!(max_diff(gone.matrix(), rho.diagonal().matrix()) < 1e-12);
    }

    /// Closed forms for `ρ12, ρ34` written out exactly as derived by hand from
    /// the coupled equations, with `Γ̄ = Γ(2n̄+1)`.
    fn coupled_pair(x0: f64, y0: f64, nbar: f64, gbar: f64, t: f64) -> (f64, f64) {
        let pre = (-1.5 * gbar * t).exp() / (1.0 + 2.0 * nbar);
        let grow = (gbar * t).exp();
        let x = pre * ((1.0 + nbar) * x0 - nbar * y0 + nbar * grow * (x0 + y0));
        let y = pre * (nbar * y0 - (1.0 + nbar) * x0 + (nbar + 1.0) * grow * (x0 + y0));
        (x, y)
    }

    #[test]
    fn ad_coherence_pairs_follow_coupled_closed_form() {
        let rho = fig3_state();
        let (gamma, nbar) = (0.4, 1.5);
        let gbar = gamma * (2.0 * nbar + 1.0);
        for &t in &[0.0, 0.3, 1.1, 4.0] {
            let out = ad_propagate(&rho, gamma, nbar, t);
            let (x, y) = coupled_pair(rho.entry(0, 1).re, rho.entry(2, 3).re, nbar, gbar, t);
            assert_abs_diff_eq!(out.entry(0, 1).re, x, epsilon = 1e-14);
            assert_abs_diff_eq!(out.entry(2, 3).re, y, epsilon = 1e-14);
            let (x, y) = coupled_pair(rho.entry(0, 2).re, rho.entry(1, 3).re, nbar, gbar, t);
            assert_abs_diff_eq!(out.entry(0, 2).re, x, epsilon = 1e-14);
            assert_abs_diff_eq!(out.entry(1, 3).re, y, epsilon = 1e-14);
            assert_abs_diff_eq!(out.entry(0, 3).re, rho.entry(0, 3).re * (-gbar * t).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn dissipator_fixed_points() {
        let deph = ChannelSpec::dephasing(1.0);
        let d = dissipator_apply(&DensityMatrix4::maximally_mixed(), &deph);
        assert_eq!(max_diff(&d, &CMatrix4::zeros()), 0.0);

        for nbar in [0.0, 0.5, 1.5, 4.0] {
            let spec = ChannelSpec::amplitude_damping(0.8, nbar);
            let eq = spec.equilibrium().unwrap();
            let d = dissipator_apply(&eq, &spec);
            assert!(max_diff(&d, &CMatrix4::zeros()) < 1e-12, "n̄ = {nbar}");
            assert!(max_diff(eq.matrix(), thermal_state(nbar, 1.0).matrix()) < 1e-15);
        }
    }

    #[test]
    fn ground_flow_from_doubly_excited_state() {
        // hand expansion: each qubit emits at Γ when n̄ = 0
        let gamma = 0.7;
        let spec = ChannelSpec::amplitude_damping(gamma, 0.0);
        let d = dissipator_apply(&DensityMatrix4::basis_state(0), &spec);
        assert_abs_diff_eq!(d[(0, 0)].re, -2.0 * gamma, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(1, 1)].re, gamma, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(2, 2)].re, gamma, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(3, 3)].re, 0.0, epsilon = 1e-15);

        // finite difference of the RK4 flow agrees
        let h = 1e-4;
        let plus = rk4_evolve(&DensityMatrix4::basis_state(0), &spec, h, 1e-5).unwrap();
        let fd = (plus.matrix() - DensityMatrix4::basis_state(0).matrix()) / C64::from(h);
        assert_abs_diff_eq!(fd[(0, 0)].re, -2.0 * gamma, epsilon = 1e-3);
        assert_abs_diff_eq!(fd[(1, 1)].re, gamma, epsilon = 1e-3);
    }

    #[test]
    fn dissipator_is_traceless_and_hermitian() {
        let rho = fig3_state();
        for spec in [ChannelSpec::dephasing(1.3), ChannelSpec::amplitude_damping(0.9, 0.5)] {
            let d = dissipator_apply(&rho, &spec);
            assert!(d.trace().norm() < 1e-15);
            assert!(max_diff(&d, &d.adjoint()) < 1e-15);
        }
    }

    #[test]
    fn rk4_matches_closed_forms() {
        let rho = fig3_state();
        for spec in [ChannelSpec::dephasing(1.0), ChannelSpec::amplitude_damping_unit(0.5)] {
            let t = 2.5;
            let num = rk4_evolve(&rho, &spec, t, 1e-3).unwrap();
            let exact = spec.propagate(&rho, t);
            assert!(max_diff(num.matrix(), exact.matrix()) < 1e-8);
        }
    }

    #[test]
    fn rk4_with_zero_rates_is_identity() {
        let rho = fig3_state();
        let spec = ChannelSpec::amplitude_damping(0.0, 0.3);
        let out = rk4_evolve(&rho, &spec, 3.0, 1e-2).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn rk4_rejects_large_steps() {
        let spec = ChannelSpec::dephasing(1.0);
        let err = rk4_evolve(&DensityMatrix4::maximally_mixed(), &spec, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge(_)));
    }

    #[test]
    fn long_time_limit_is_thermal() {
        let rho = fig3_state();
        let spec = ChannelSpec::amplitude_damping_unit(1.5);
        let out = spec.propagate(&rho, 50.0);
        let eq = thermal_state(1.5, 1.0);
        assert!(max_diff(out.matrix(), eq.matrix()) < 1e-10);
        assert!(max_diff(&dissipator_apply(&out, &spec), &CMatrix4::zeros()) < 1e-10);
    }

    #[test]
    fn coherence_decreases_along_both_channels() {
        let rho = fig3_state();
        for spec in [ChannelSpec::dephasing(1.0), ChannelSpec::amplitude_damping_unit(0.5)] {
            let grid = time_grid(5.0, 60).unwrap();
            let traj = Trajectory::analytic(&rho, &spec, &grid).unwrap();
            let c: Vec<f64> = traj.states().iter().map(l1_coherence).collect();
            assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{c:?}");
        }
    }

    #[test]
    fn grids_are_validated() {
        assert!(Trajectory::analytic(&fig3_state(), &ChannelSpec::dephasing(1.0), &[0.1, 0.2]).is_err());
        assert!(Trajectory::analytic(&fig3_state(), &ChannelSpec::dephasing(1.0), &[0.0, 0.2, 0.2]).is_err());
        assert!(time_grid(0.0, 10).is_err());
        assert!(time_grid(1.0, 1).is_err());
        let g = time_grid(3.0, 61).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[60], 3.0);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ChannelSpec::amplitude_damping(-1.0, 0.5).validate().is_err());
        assert!(ChannelSpec::amplitude_damping(1.0, f64::NAN).validate().is_err());
        assert!(ChannelSpec::dephasing(1.0).with_splittings(0.0, 1.0).validate().is_err());
    }
}
