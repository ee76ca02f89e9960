//! Canned experiments, coherence-rescaling scans and their CSV output.
//!
//! Every experiment resolves to a channel, a time grid and a list of curves
//! (one initial state each). All curves of a run share the Monte Carlo
//! sample stream, so differences between curves are not masked by
//! independent sampling noise.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{time_grid, ChannelKind, ChannelSpec, Trajectory};
use crate::entropy::{trajectory_records, EntropyRecord};
use crate::error::{Error, Result};
use crate::phasespace::MCConfig;
use crate::qstate::{
    parse_state, random_family, AmplitudeDampingFamily, CoherenceClass, CoherenceReport, DensityMatrix4,
    DephasingFamily, FamilyKind, StateFamily,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_STEPS: usize = 60;
/// Default `λ t_max`.
pub const DEPHASING_TMAX: f64 = 3.0;
/// Default `Γ̄ t_max`.
pub const AD_TMAX: f64 = 5.0;

pub const CSV_COLUMNS: &str = "curve_id,t,pi,pi_stderr,phi,phi_stderr,wehrl,wehrl_stderr,pi_vn,c_l1,c_rel";

/// `fig1`: X-state and non-X state with the same `C_l1 = 0.14`.
pub const FIG1_POPULATIONS: [f64; 4] = [0.25; 4];
pub const FIG1_ALPHA: f64 = 0.035;
pub const FIG1_BETA: f64 = 0.0175;

pub const FIG3_FAMILY: AmplitudeDampingFamily =
    AmplitudeDampingFamily { populations: [0.1, 0.2, 0.1, 0.6], alpha: 0.02, beta: 0.15, gamma: 0.02 };
pub const FIG3_NBAR: f64 = 1.5;
/// Bath occupation for `fig4*` and `fig5b`.
pub const FIG4_NBAR: f64 = 0.5;

/// Random state pairs examined by the `fig5*` scans.
pub const FIG5_PAIRS: usize = 50;
/// A pair counts as a counterexample when the gap exceeds this many
/// combined standard errors.
pub const COUNTEREXAMPLE_SIGMAS: f64 = 3.0;
/// Production estimates below this many standard errors under zero are
/// reported in the output header.
pub const NEGATIVE_PI_SIGMAS: f64 = 3.0;

pub const DEFAULT_MU: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
/// `fig2d`: `μα:μβ` pairs, each componentwise above the previous one.
pub const FIG2D_MU: [(f64, f64); 4] = [(0.2, 0.4), (0.4, 0.7), (0.7, 0.9), (1.0, 0.95)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Fig1,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
    Fig5a,
    Fig5b,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Experiment::Fig1,
        Experiment::Fig2a,
        Experiment::Fig2b,
        Experiment::Fig2c,
        Experiment::Fig2d,
        Experiment::Fig3,
        Experiment::Fig4a,
        Experiment::Fig4b,
        Experiment::Fig4c,
        Experiment::Fig4d,
        Experiment::Fig5a,
        Experiment::Fig5b,
        Experiment::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig2c => "fig2c",
            Experiment::Fig2d => "fig2d",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4a => "fig4a",
            Experiment::Fig4b => "fig4b",
            Experiment::Fig4c => "fig4c",
            Experiment::Fig4d => "fig4d",
            Experiment::Fig5a => "fig5a",
            Experiment::Fig5b => "fig5b",
            Experiment::Custom => "custom",
        }
    }

    /// Seed of the random initial state(s), for the experiments that draw one.
    pub fn default_state_seed(self) -> Option<u64> {
        match self {
            Experiment::Fig2a => Some(2001),
            Experiment::Fig2b => Some(2002),
            Experiment::Fig2c => Some(2003),
            Experiment::Fig2d => Some(2004),
            Experiment::Fig4a => Some(4001),
            Experiment::Fig4b => Some(4002),
            Experiment::Fig4c => Some(4003),
            Experiment::Fig4d => Some(4004),
            Experiment::Fig5a => Some(5001),
            Experiment::Fig5b => Some(5002),
            _ => None,
        }
    }

    fn is_scan(self) -> bool {
        self.family_setup().is_some() && !self.is_pair_scan()
    }

    fn is_pair_scan(self) -> bool {
        matches!(self, Experiment::Fig5a | Experiment::Fig5b)
    }

    /// Family kind, active coherence classes and draw bounds.
    fn family_setup(self) -> Option<(FamilyKind, &'static [CoherenceClass], (f64, f64))> {
        use CoherenceClass::*;
        let deph = FamilyKind::Dephasing;
        let ad = FamilyKind::AmplitudeDamping;
        Some(match self {
            Experiment::Fig2a => (deph, &[Alpha], (0.0, 0.25)),
            Experiment::Fig2b => (deph, &[Beta], (0.0, 0.25)),
            Experiment::Fig2c | Experiment::Fig2d => (deph, &[Alpha, Beta], (0.0, 0.5)),
            Experiment::Fig4a => (ad, &[Alpha], (0.0, 0.25)),
            Experiment::Fig4b => (ad, &[Beta], (0.0, 0.25)),
            Experiment::Fig4c => (ad, &[Gamma], (0.0, 0.25)),
            Experiment::Fig4d => (ad, &[Alpha, Beta, Gamma], (0.0, 0.25)),
            Experiment::Fig5a => (deph, &[Alpha, Beta], (0.0, 0.25)),
            Experiment::Fig5b => (ad, &[Alpha, Beta, Gamma], (0.0, 0.25)),
            _ => return None,
        })
    }

    fn channel_kind(self) -> Option<ChannelKind> {
        match self {
            Experiment::Fig1 | Experiment::Fig2a | Experiment::Fig2b | Experiment::Fig2c | Experiment::Fig2d => {
                Some(ChannelKind::Dephasing)
            }
            Experiment::Fig5a => Some(ChannelKind::Dephasing),
            Experiment::Custom => None,
            _ => Some(ChannelKind::AmplitudeDamping),
        }
    }

    fn default_nbar(self) -> f64 {
        match self {
            Experiment::Fig3 => FIG3_NBAR,
            _ => FIG4_NBAR,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::config("experiment", format!("unknown experiment `{s}`")))
    }
}

impl Serialize for Experiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Experiment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rescaling factors for the `(α, β, γ)` coherence classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuFactors {
    Uniform(f64),
    PerClass(ClassFactors),
}

/// `[μα, μβ, μγ]`, with the arity it was written with (2 or 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassFactors {
    pub factors: [f64; 3],
    pub arity: usize,
}

impl MuFactors {
    pub fn factors(&self) -> [f64; 3] {
        match self {
            MuFactors::Uniform(m) => [*m; 3],
            MuFactors::PerClass(v) => v.factors,
        }
    }
}

impl fmt::Display for MuFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuFactors::Uniform(m) => write!(f, "{m}"),
            MuFactors::PerClass(v) => {
                let parts: Vec<String> = v.factors[..v.arity].iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(":"))
            }
        }
    }
}

impl Serialize for MuFactors {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MuFactors {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_mu_entry(&s).map_err(serde::de::Error::custom)
    }
}

fn parse_mu_value(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config("mu", format!("`{s}` is not a number")))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::config("mu", format!("factors must be finite and > 0, got `{s}`")));
    }
    Ok(v)
}

/// One entry: `μ`, `μα:μβ` or `μα:μβ:μγ`.
pub fn parse_mu_entry(s: &str) -> Result<MuFactors> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(MuFactors::Uniform(parse_mu_value(parts[0])?)),
        2 | 3 => {
            let mut factors = [1.0; 3];
            for (slot, p) in factors.iter_mut().zip(&parts) {
                *slot = parse_mu_value(p)?;
            }
            Ok(MuFactors::PerClass(ClassFactors { factors, arity: parts.len() }))
        }
        _ => Err(Error::config("mu", format!("`{s}` has more than three factors"))),
    }
}

/// Comma-separated list of [`parse_mu_entry`] entries.
pub fn parse_mu_list(s: &str) -> Result<Vec<MuFactors>> {
    if s.trim().is_empty() {
        return Err(Error::config("mu", "empty list"));
    }
    s.split(',').map(parse_mu_entry).collect()
}

/// Everything that determines a run. Serialised verbatim into the output
/// header; the output path is left out so that it does not affect the bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub mc: MCConfig,
    pub tmax: Option<f64>,
    pub steps: usize,
    pub nbar: Option<f64>,
    pub mu: Option<Vec<MuFactors>>,
    pub state_seed: Option<u64>,
    /// Only for `custom`.
    pub channel: Option<ChannelKind>,
    /// Only for `custom`.
    pub state_file: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            mc: MCConfig::new(DEFAULT_SAMPLES, DEFAULT_SEED),
            tmax: None,
            steps: DEFAULT_STEPS,
            nbar: None,
            mu: None,
            state_seed: None,
            channel: None,
            state_file: None,
            out: None,
        }
    }

    fn channel_kind(&self) -> ChannelKind {
        self.experiment.channel_kind().or(self.channel).unwrap_or(ChannelKind::Dephasing)
    }

    pub fn validate(&self) -> Result<()> {
        let exp = self.experiment;
        self.mc.validate()?;
        if let Some(t) = self.tmax {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::config("tmax", format!("must be finite and > 0, got {t}")));
            }
        }
        if self.steps < 2 {
            return Err(Error::config("steps", format!("need at least 2 grid points, got {}", self.steps)));
        }
        if let Some(n) = self.nbar {
            if self.channel_kind() != ChannelKind::AmplitudeDamping {
                return Err(Error::config("nbar", "only applies to amplitude-damping runs"));
            }
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::config("nbar", format!("must be finite and >= 0, got {n}")));
            }
        }
        if self.channel.is_some() && exp != Experiment::Custom {
            return Err(Error::config("channel", "only applies to the custom experiment"));
        }
        match (&self.state_file, exp) {
            (None, Experiment::Custom) => {
                return Err(Error::config("state-file", "the custom experiment needs a state file"))
            }
            (Some(_), e) if e != Experiment::Custom => {
                return Err(Error::config("state-file", "only applies to the custom experiment"))
            }
            _ => {}
        }
        if self.state_seed.is_some() && exp.default_state_seed().is_none() {
            return Err(Error::config("state-seed", format!("{exp} does not draw a random state")));
        }
        if let Some(mu) = &self.mu {
            if !(exp.is_scan() || exp == Experiment::Custom) {
                return Err(Error::config("mu", format!("{exp} does not take a rescaling list")));
            }
            if mu.is_empty() {
                return Err(Error::config("mu", "empty list"));
            }
            for m in mu {
                let bad = match (m, exp.family_setup().map(|s| s.0)) {
                    (MuFactors::Uniform(_), _) => None,
                    (MuFactors::PerClass(_), None) => Some("per-class factors need a state family"),
                    (MuFactors::PerClass(v), Some(FamilyKind::Dephasing)) if v.arity != 2 => {
                        Some("dephasing families take `μα:μβ`")
                    }
                    (MuFactors::PerClass(v), Some(FamilyKind::AmplitudeDamping)) if v.arity != 3 => {
                        Some("amplitude-damping families take `μα:μβ:μγ`")
                    }
                    _ => None,
                };
                if let Some(msg) = bad {
                    return Err(Error::config("mu", format!("`{m}`: {msg}")));
                }
            }
        }
        Ok(())
    }

    fn channel_spec(&self) -> ChannelSpec {
        match self.channel_kind() {
            ChannelKind::Dephasing => ChannelSpec::dephasing(1.0),
            ChannelKind::AmplitudeDamping => {
                ChannelSpec::amplitude_damping_unit(self.nbar.unwrap_or(self.experiment.default_nbar()))
            }
        }
    }

    fn grid(&self) -> Result<Vec<f64>> {
        let tmax = self.tmax.unwrap_or(match self.channel_kind() {
            ChannelKind::Dephasing => DEPHASING_TMAX,
            ChannelKind::AmplitudeDamping => AD_TMAX,
        });
        time_grid(tmax, self.steps)
    }

    fn mu_list(&self) -> Vec<MuFactors> {
        if let Some(mu) = &self.mu {
            return mu.clone();
        }
        match self.experiment {
            Experiment::Fig2d => FIG2D_MU
                .iter()
                .map(|&(a, b)| MuFactors::PerClass(ClassFactors { factors: [a, b, 1.0], arity: 2 }))
                .collect(),
            _ => DEFAULT_MU.iter().map(|&m| MuFactors::Uniform(m)).collect(),
        }
    }
}

/// Starting point of a rescaling scan.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanBase {
    Family(StateFamily),
    State(DensityMatrix4),
}

impl ScanBase {
    fn rescaled(&self, mu: &MuFactors) -> Result<(DensityMatrix4, Option<StateFamily>)> {
        match self {
            ScanBase::Family(f) => {
                let g = f.rescaled(mu.factors());
                Ok((g.build()?, Some(g)))
            }
            ScanBase::State(rho) => match mu {
                MuFactors::Uniform(m) => Ok((rho.rescale_coherences(*m)?, None)),
                MuFactors::PerClass(_) => Err(Error::config("mu", "per-class factors need a state family")),
            },
        }
    }
}

/// One output curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub id: String,
    pub family: Option<StateFamily>,
    pub initial: CoherenceReport,
    pub records: Vec<EntropyRecord>,
    pub discarded: u64,
}

fn evaluate_curve(
    id: String,
    rho0: &DensityMatrix4,
    family: Option<StateFamily>,
    spec: &ChannelSpec,
    grid: &[f64],
    cfg: &MCConfig,
) -> Result<Curve> {
    let traj = Trajectory::analytic(rho0, spec, grid)?;
    let out = trajectory_records(&traj, spec, cfg)?;
    Ok(Curve { id, family, initial: CoherenceReport::of(rho0), records: out.records, discarded: out.discarded })
}

/// One curve per rescaling entry, all on the same sample stream.
pub fn scan_rescale(
    base: &ScanBase,
    mu: &[MuFactors],
    spec: &ChannelSpec,
    grid: &[f64],
    cfg: &MCConfig,
) -> Result<Vec<Curve>> {
    let states = mu.iter().map(|m| base.rescaled(m)).collect::<Result<Vec<_>>>()?;
    mu.par_iter()
        .zip(states.into_par_iter())
        .map(|(m, (rho, fam))| evaluate_curve(format!("mu={m}"), &rho, fam, spec, grid, cfg))
        .collect()
}

/// First grid time at which `hi` (the curve with the larger initial `C_l1`)
/// produces entropy more slowly than `lo` by more than `sigmas` combined
/// standard errors.
pub fn coherence_violation(hi: &Curve, lo: &Curve, sigmas: f64) -> Option<f64> {
    if !(hi.initial.l1 > lo.initial.l1) {
        return None;
    }
    hi.records.iter().zip(&lo.records).find_map(|(a, b)| {
        let combined = a.pi.stderr.hypot(b.pi.stderr);
        (a.pi.value < b.pi.value - sigmas * combined).then_some(a.t)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub pair: usize,
    pub t: f64,
}

/// Draws up to `pairs` pairs of random states and stops at the first pair
/// where the more coherent state has the lower production rate somewhere on
/// the grid. Returns all evaluated curves, higher-coherence curve first in
/// each pair.
#[allow(clippy::too_many_arguments)]
pub fn scan_pairs(
    kind: FamilyKind,
    classes: &[CoherenceClass],
    bounds: (f64, f64),
    state_seed: u64,
    pairs: usize,
    spec: &ChannelSpec,
    grid: &[f64],
    cfg: &MCConfig,
) -> Result<(Vec<Curve>, Option<Counterexample>)> {
    let mut curves = Vec::new();
    for k in 0..pairs {
        let seed = state_seed.wrapping_add(2 * k as u64);
        let fa = random_family(kind, classes, bounds, seed)?;
        let fb = random_family(kind, classes, bounds, seed.wrapping_add(1))?;
        let (fhi, flo) = if fa.l1() >= fb.l1() { (fa, fb) } else { (fb, fa) };
        let (hi, lo) = rayon::join(
            || evaluate_curve(format!("pair{k:02}_hi"), &fhi.build()?, Some(fhi), spec, grid, cfg),
            || evaluate_curve(format!("pair{k:02}_lo"), &flo.build()?, Some(flo), spec, grid, cfg),
        );
        let (hi, lo) = (hi?, lo?);
        let found = coherence_violation(&hi, &lo, COUNTEREXAMPLE_SIGMAS);
        curves.push(hi);
        curves.push(lo);
        if let Some(t) = found {
            return Ok((curves, Some(Counterexample { pair: k, t })));
        }
    }
    Ok((curves, None))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub config: RunConfig,
    pub channel: ChannelSpec,
    pub curves: Vec<Curve>,
    pub notes: Vec<String>,
}

impl RunOutput {
    /// Fraction of (sample, curve) evaluations that hit the `Q` floor.
    pub fn discarded_fraction(&self) -> f64 {
        if self.curves.is_empty() {
            return 0.0;
        }
        let total: u64 = self.curves.iter().map(|c| c.discarded).sum();
        total as f64 / (self.config.mc.samples as f64 * self.curves.len() as f64)
    }

    pub fn curve(&self, id: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# spinphase {VERSION}\n"));
        s.push_str(&format!("# config {}\n", json(&self.config)));
        s.push_str(&format!("# channel {}\n", json(&self.channel)));
        s.push_str(&format!("# seed {}\n", self.config.mc.seed));
        s.push_str(&format!("# samples {}\n", self.config.mc.samples));
        s.push_str(&format!("# discarded_fraction {}\n", self.discarded_fraction()));
        for c in &self.curves {
            s.push_str(&format!("# curve {} c_l1={} c_rel={}", c.id, c.initial.l1, c.initial.relative));
            if let Some(f) = &c.family {
                s.push_str(&format!(" state={}", json(f)));
            }
            s.push('\n');
        }
        for n in &self.notes {
            s.push_str(&format!("# {n}\n"));
        }
        s.push_str(CSV_COLUMNS);
        s.push('\n');
        for c in &self.curves {
            for r in &c.records {
                let pi_vn = r.pi_vn.map_or_else(|| "nan".to_string(), |v| v.to_string());
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    c.id,
                    r.t,
                    r.pi.value,
                    r.pi.stderr,
                    r.phi.value,
                    r.phi.stderr,
                    r.wehrl.value,
                    r.wehrl.stderr,
                    pi_vn,
                    r.c_l1,
                    r.c_rel
                ));
            }
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("header values serialise")
}

/// Header notes for every record whose production estimate is significantly
/// negative. Only the integral is expected to be non-negative, so these are
/// reported rather than clipped.
pub fn negative_production_notes(curves: &[Curve]) -> Vec<String> {
    curves
        .iter()
        .flat_map(|c| c.records.iter().map(move |r| (c, r)))
        .filter(|(_, r)| r.pi.value < -NEGATIVE_PI_SIGMAS * r.pi.stderr)
        .map(|(c, r)| format!("negative_pi curve={} t={} pi={} stderr={}", c.id, r.t, r.pi.value, r.pi.stderr))
        .collect()
}

fn single_curve(id: &str, family: StateFamily, spec: &ChannelSpec, grid: &[f64], cfg: &MCConfig) -> Result<Curve> {
    evaluate_curve(id.to_string(), &family.build()?, Some(family), spec, grid, cfg)
}

/// Runs an experiment in memory.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let spec = config.channel_spec();
    let grid = config.grid()?;
    let cfg = &config.mc;
    let exp = config.experiment;
    let mut notes = Vec::new();

    let curves = match exp {
        Experiment::Fig1 => {
            let x = StateFamily::Dephasing(DephasingFamily::x_state(FIG1_POPULATIONS, FIG1_ALPHA));
            let nonx =
                StateFamily::Dephasing(DephasingFamily { populations: FIG1_POPULATIONS, alpha: 0.0, beta: FIG1_BETA });
            let (a, b) = rayon::join(
                || single_curve("x_alpha", x, &spec, &grid, cfg),
                || single_curve("nonx_beta", nonx, &spec, &grid, cfg),
            );
            vec![a?, b?]
        }
        Experiment::Fig3 => vec![single_curve("fig3", StateFamily::AmplitudeDamping(FIG3_FAMILY), &spec, &grid, cfg)?],
        Experiment::Custom => {
            let path = config.state_file.as_ref().expect("validated");
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("state-file", format!("{}: {e}", path.display())))?;
            let rho = parse_state(&text)?;
            match &config.mu {
                Some(mu) => scan_rescale(&ScanBase::State(rho), mu, &spec, &grid, cfg)?,
                None => vec![evaluate_curve("custom".into(), &rho, None, &spec, &grid, cfg)?],
            }
        }
        e if e.is_pair_scan() => {
            let (kind, classes, bounds) = e.family_setup().expect("pair scans draw states");
            let seed = config.state_seed.or(e.default_state_seed()).expect("pair scans are seeded");
            let (curves, found) = scan_pairs(kind, classes, bounds, seed, FIG5_PAIRS, &spec, &grid, cfg)?;
            notes.push(match found {
                Some(c) => format!("counterexample pair={} t={}", c.pair, c.t),
                None => format!("counterexample none in {FIG5_PAIRS} pairs"),
            });
            curves
        }
        e => {
            let (kind, classes, bounds) = e.family_setup().expect("scans draw states");
            let seed = config.state_seed.or(e.default_state_seed()).expect("scans are seeded");
            let base = random_family(kind, classes, bounds, seed)?;
            scan_rescale(&ScanBase::Family(base), &config.mu_list(), &spec, &grid, cfg)?
        }
    };
    notes.extend(negative_production_notes(&curves));
    Ok(RunOutput { config: config.clone(), channel: spec, curves, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(exp: Experiment) -> RunConfig {
        let mut c = RunConfig::new(exp);
        c.mc = MCConfig::new(2000, 3);
        c.steps = 4;
        c
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.as_str().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("fig6".parse::<Experiment>(), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn mu_lists() {
        let l = parse_mu_list("0.5,1").unwrap();
        assert_eq!(l, vec![MuFactors::Uniform(0.5), MuFactors::Uniform(1.0)]);
        let l = parse_mu_list("0.2:0.4, 1:0.5:0.25").unwrap();
        assert_eq!(l[0].factors(), [0.2, 0.4, 1.0]);
        assert_eq!(l[0].to_string(), "0.2:0.4");
        assert_eq!(l[1].factors(), [1.0, 0.5, 0.25]);
        for bad in ["", "0", "-1", "x", "1:2:3:4", "nan", "inf", "0.5,,1", ":"] {
            assert!(parse_mu_list(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = quick(Experiment::Fig2d);
        c.mu = Some(parse_mu_list("0.5:1,1:1").unwrap());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn validation_names_the_field() {
        let field_of = |c: &RunConfig| match c.validate() {
            Err(Error::InvalidConfig { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        let mut c = quick(Experiment::Fig1);
        c.nbar = Some(1.0);
        assert_eq!(field_of(&c), "nbar");
        let mut c = quick(Experiment::Fig3);
        c.mu = Some(vec![MuFactors::Uniform(0.5)]);
        assert_eq!(field_of(&c), "mu");
        let mut c = quick(Experiment::Fig3);
        c.mc.samples = 10;
        assert_eq!(field_of(&c), "samples");
        let mut c = quick(Experiment::Fig4a);
        c.mu = Some(parse_mu_list("0.5:1").unwrap());
        assert_eq!(field_of(&c), "mu");
        assert_eq!(field_of(&quick(Experiment::Custom)), "state-file");
        let mut c = quick(Experiment::Fig1);
        c.state_seed = Some(1);
        assert_eq!(field_of(&c), "state-seed");
        let mut c = quick(Experiment::Fig3);
        c.tmax = Some(-1.0);
        assert_eq!(field_of(&c), "tmax");
    }

    #[test]
    fn fig1_has_two_curves_with_equal_coherence() {
        let out = run(&quick(Experiment::Fig1)).unwrap();
        assert_eq!(out.curves.len(), 2);
        for c in &out.curves {
            assert!((c.initial.l1 - 0.14).abs() < 1e-12);
            assert_eq!(c.records.len(), 4);
        }
    }

    #[test]
    fn scan_with_unit_factor_matches_base_run() {
        let mut c = quick(Experiment::Fig2a);
        c.mu = Some(vec![MuFactors::Uniform(1.0)]);
        let scanned = run(&c).unwrap();
        let spec = c.channel_spec();
        let base = random_family(FamilyKind::Dephasing, &[CoherenceClass::Alpha], (0.0, 0.25), 2001).unwrap();
        let direct = single_curve("x", base, &spec, &c.grid().unwrap(), &c.mc).unwrap();
        assert_eq!(scanned.curves[0].records, direct.records);
    }

    #[test]
    fn csv_layout() {
        let out = run(&quick(Experiment::Fig3)).unwrap();
        let csv = out.to_csv();
        let header: Vec<&str> = csv.lines().filter(|l| l.starts_with('#')).collect();
        assert!(header[0].starts_with("# spinphase "));
        assert!(header.iter().any(|l| l.starts_with("# config {")));
        assert!(header.iter().any(|l| l.starts_with("# seed 3")));
        assert!(header.iter().any(|l| l.starts_with("# samples 2000")));
        assert!(header.iter().any(|l| l.starts_with("# discarded_fraction ")));
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], CSV_COLUMNS);
        assert_eq!(body.len(), 1 + 4);
        assert!(body[1..].iter().all(|l| l.split(',').count() == 11 && l.starts_with("fig3,")));
    }

    #[test]
    fn dephasing_runs_write_nan_for_von_neumann_rate() {
        let csv = run(&quick(Experiment::Fig1)).unwrap().to_csv();
        let row = csv.lines().find(|l| l.starts_with("x_alpha,")).unwrap();
        assert_eq!(row.split(',').nth(8), Some("nan"));
    }

    #[test]
    fn violation_needs_strictly_larger_coherence() {
        let mk = |l1: f64, pi: f64| Curve {
            id: String::new(),
            family: None,
            initial: CoherenceReport { l1, relative: 0.0 },
            records: vec![EntropyRecord {
                t: 0.5,
                pi: crate::phasespace::Estimate { value: pi, stderr: 0.01 },
                phi: crate::phasespace::Estimate::exact(0.0),
                wehrl: crate::phasespace::Estimate::exact(1.0),
                pi_vn: None,
                c_l1: l1,
                c_rel: 0.0,
            }],
            discarded: 0,
        };
        assert_eq!(coherence_violation(&mk(0.5, 0.1), &mk(0.3, 0.2), 3.0), Some(0.5));
        let mut flagged = mk(0.5, -0.05);
        flagged.id = "x".into();
        assert_eq!(negative_production_notes(&[mk(0.5, -0.02), flagged]), ["negative_pi curve=x t=0.5 pi=-0.05 stderr=0.01"]);
        assert_eq!(coherence_violation(&mk(0.5, 0.1), &mk(0.3, 0.13), 3.0), None);
        assert_eq!(coherence_violation(&mk(0.3, 0.1), &mk(0.3, 0.2), 3.0), None);
    }

    proptest::proptest! {
        #[test]
        fn mu_lists_round_trip_through_display(s in "[0-9.:,e-]{0,24}") {
            if let Ok(list) = parse_mu_list(&s) {
                let joined = list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
                proptest::prop_assert_eq!(parse_mu_list(&joined).unwrap(), list);
            }
        }
    }
}
