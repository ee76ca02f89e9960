use proptest::prelude::*;

use spinphase::channels::{time_grid, ChannelSpec, Trajectory};
use spinphase::entropy::{evaluate_states, pi_ad, pi_dephasing, wehrl_entropy};
use spinphase::phasespace::{husimi, MCConfig, PhasePoint};
use spinphase::qstate::{
    l1_coherence, random_family, relative_entropy, AmplitudeDampingFamily, CMatrix4, CoherenceClass, DensityMatrix4,
    FamilyKind, StateFamily, C64,
};

use CoherenceClass::*;

fn ad_state(seed: u64) -> DensityMatrix4 {
    random_family(FamilyKind::AmplitudeDamping, &[Alpha, Beta, Gamma], (0.0, 0.25), seed).unwrap().build().unwrap()
}

fn channels() -> [ChannelSpec; 3] {
    [ChannelSpec::dephasing(1.0), ChannelSpec::amplitude_damping_unit(0.5), ChannelSpec::amplitude_damping(1.0, 0.0)]
}

fn max_diff(a: &CMatrix4, b: &CMatrix4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn point() -> impl Strategy<Value = PhasePoint> {
    let tau = 2.0 * std::f64::consts::PI;
    (0.0..std::f64::consts::PI, 0.0..tau, 0.0..std::f64::consts::PI, 0.0..tau)
        .prop_map(|(a, b, c, d)| PhasePoint::new(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup(seed in any::<u64>(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let rho = ad_state(seed);
        for spec in channels() {
            let two_step = spec.propagate(&spec.propagate(&rho, t1), t2);
            let one_step = spec.propagate(&rho, t1 + t2);
            prop_assert!(max_diff(two_step.matrix(), one_step.matrix()) < 1e-10);
        }
    }

    #[test]
    fn trajectories_stay_physical(seed in any::<u64>()) {
        let rho = ad_state(seed);
        let grid = time_grid(5.0, 26).unwrap();
        for spec in channels() {
            for s in Trajectory::analytic(&rho, &spec, &grid).unwrap().states() {
                prop_assert!(s.validate().is_ok());
            }
        }
    }

    #[test]
    fn dephasing_keeps_populations(seed in any::<u64>(), t in 0.0..10.0f64) {
        let rho = ad_state(seed);
        let out = ChannelSpec::dephasing(1.0).propagate(&rho, t);
        prop_assert_eq!(out.populations(), rho.populations());
    }

    #[test]
    fn coherence_never_grows(seed in any::<u64>()) {
        let rho = ad_state(seed);
        let grid = time_grid(5.0, 40).unwrap();
        for spec in channels() {
            let traj = Trajectory::analytic(&rho, &spec, &grid).unwrap();
            let c: Vec<f64> = traj.states().iter().map(l1_coherence).collect();
            prop_assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{:?}", c);
        }
    }

    #[test]
    fn gamma_class_is_closed_and_alpha_beta_never_reach_it(seed in any::<u64>(), t in 0.0..5.0f64) {
        let spec = ChannelSpec::amplitude_damping_unit(0.5);
        let gamma_only = random_family(FamilyKind::AmplitudeDamping, &[Gamma], (0.0, 0.25), seed).unwrap();
        let out = spec.propagate(&gamma_only.build().unwrap(), t);
        for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            prop_assert!(out.entry(i, j).norm() < 1e-12);
        }
        for classes in [&[Alpha][..], &[Beta][..], &[Alpha, Beta][..]] {
            let f = random_family(FamilyKind::AmplitudeDamping, classes, (0.0, 0.25), seed).unwrap();
            let out = spec.propagate(&f.build().unwrap(), t);
            for (i, j) in [(0, 3), (1, 2)] {
                prop_assert!(out.entry(i, j).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn husimi_is_bounded_and_linear(s1 in any::<u64>(), s2 in any::<u64>(), w in 0.0..1.0f64, p in point()) {
        let (a, b) = (ad_state(s1), ad_state(s2));
        let mix = DensityMatrix4::new(a.matrix() * C64::from(w) + b.matrix() * C64::from(1.0 - w)).unwrap();
        let (qa, qb, qm) = (husimi(&a, &p), husimi(&b, &p), husimi(&mix, &p));
        prop_assert!((0.0..=1.0).contains(&qa.q));
        let lin = |x: f64, y: f64| w * x + (1.0 - w) * y;
        prop_assert!((qm.q - lin(qa.q, qb.q)).abs() < 1e-14);
        prop_assert!((qm.d_theta_a - lin(qa.d_theta_a, qb.d_theta_a)).abs() < 1e-14);
        prop_assert!((qm.d_phi_b - lin(qa.d_phi_b, qb.d_phi_b)).abs() < 1e-14);
    }

    #[test]
    fn phi_independent_states_have_no_azimuthal_gradient(seed in any::<u64>(), p in point()) {
        let f = random_family(FamilyKind::AmplitudeDamping, &[], (0.0, 0.0), seed).unwrap();
        let s = husimi(&f.build().unwrap(), &p);
        prop_assert_eq!(s.d_phi_a, 0.0);
        prop_assert_eq!(s.d_phi_b, 0.0);
    }

    #[test]
    fn relative_entropy_is_non_negative(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (ad_state(s1), ad_state(s2));
        let mixed = DensityMatrix4::maximally_mixed();
        let d = relative_entropy(&a, &mixed).unwrap();
        prop_assert!(d >= -1e-12);
        if b.min_eigenvalue() > 1e-6 {
            prop_assert!(relative_entropy(&a, &b).unwrap() >= -1e-10);
            prop_assert!(relative_entropy(&b, &b).unwrap().abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ad_production_is_not_significantly_negative(seed in any::<u64>(), nbar in 0.0..3.0f64) {
        let e = pi_ad(&ad_state(seed), 1.0, nbar, &MCConfig::new(20_000, seed)).unwrap();
        prop_assert!(e.value >= -3.0 * e.stderr, "{:?}", e);
    }

    #[test]
    fn rescaled_families_are_ordered(seed in any::<u64>(), mu in 0.05..0.95f64) {
        let f = random_family(FamilyKind::Dephasing, &[Alpha, Beta], (0.0, 0.25), seed).unwrap();
        let states = [f.rescaled_uniform(mu).build().unwrap(), f.build().unwrap()];
        let out = evaluate_states(&states, &ChannelSpec::dephasing(1.0), &MCConfig::new(5_000, seed)).unwrap();
        prop_assert!(out.rates[0].pi.value <= out.rates[1].pi.value);
    }
}

#[test]
fn production_vanishes_at_long_times() {
    let rho = AmplitudeDampingFamily { populations: [0.1, 0.2, 0.1, 0.6], alpha: 0.02, beta: 0.15, gamma: 0.02 }
        .build()
        .unwrap();
    let cfg = MCConfig::new(100_000, 5);
    // the slowest coherences decay as e^{−λt/2}, so Π(10)/Π(0) ~ e^{−10}
    let deph = ChannelSpec::dephasing(1.0);
    let late = pi_dephasing(&deph.propagate(&rho, 10.0), 1.0, &cfg).unwrap();
    let initial = pi_dephasing(&rho, 1.0, &cfg).unwrap();
    assert!(late.value < 1e-4 * initial.value, "{late:?} vs {initial:?}");
    let spec = ChannelSpec::amplitude_damping_unit(0.5);
    let late = pi_ad(&spec.propagate(&rho, 10.0), spec.a.rate, 0.5, &cfg).unwrap();
    let initial = pi_ad(&rho, spec.a.rate, 0.5, &cfg).unwrap();
    assert!(late.value < 1e-4 * initial.value, "{late:?} vs {initial:?}");
}

#[test]
fn azimuthal_rotation_leaves_wehrl_entropy_unchanged() {
    // conjugation by e^{−icσz/2} on qubit a multiplies ρ_ij by e^{−ic(s_i − s_j)}, s = ±½
    let rho = StateFamily::AmplitudeDamping(AmplitudeDampingFamily {
        populations: [0.3, 0.2, 0.4, 0.1],
        alpha: 0.1,
        beta: 0.08,
        gamma: 0.12,
    })
    .build()
    .unwrap();
    let c = 1.3;
    let spin_a = |k: usize| if k < 2 { 0.5 } else { -0.5 };
    let mut m = *rho.matrix();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] *= C64::from_polar(1.0, -c * (spin_a(i) - spin_a(j)));
        }
    }
    let rotated = DensityMatrix4::new(m).unwrap();
    let cfg = MCConfig::new(400_000, 17);
    let (a, b) = (wehrl_entropy(&rho, &cfg).unwrap(), wehrl_entropy(&rotated, &cfg).unwrap());
    assert!((a.value - b.value).abs() < 3.0 * a.stderr.hypot(b.stderr), "{a:?} vs {b:?}");
    // and Q itself is just shifted in φa
    let p = PhasePoint::new(1.0, 0.4, 2.0, 5.0);
    let shifted = PhasePoint::new(1.0, 0.4 + c, 2.0, 5.0);
    assert!((husimi(&rho, &p).q - husimi(&rotated, &shifted).q).abs() < 1e-14);
}
