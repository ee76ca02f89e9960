use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spinphase::channels::ChannelKind;
use spinphase::experiment::{self, parse_mu_list, Experiment, MuFactors, RunConfig};
use spinphase::phasespace::MCConfig;
use spinphase::Error;

/// Wehrl entropy production of two qubits under local dephasing or
/// amplitude damping. Writes one CSV row per grid time per curve.
///
/// Times are in units of 1/λ (dephasing) or 1/Γ̄ (amplitude damping).
/// The default of 10⁶ Monte Carlo samples keeps standard errors well below
/// the visible scale of the curves. SPINPHASE_THREADS caps the number of
/// worker threads; results do not depend on it.
#[derive(Debug, Parser)]
#[command(name = "spinphase", version)]
struct Args {
    /// fig1, fig2a-d, fig3, fig4a-d, fig5a-b or custom
    #[arg(value_parser = parse_experiment)]
    experiment: Experiment,

    /// Monte Carlo samples per estimate
    #[arg(long, default_value_t = experiment::DEFAULT_SAMPLES)]
    samples: u64,

    /// Monte Carlo seed
    #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
    seed: u64,

    /// Seed of the random initial state(s) (fig2*, fig4*, fig5*)
    #[arg(long)]
    state_seed: Option<u64>,

    /// End of the time grid [default: 3 for dephasing, 5 for amplitude damping]
    #[arg(long)]
    tmax: Option<f64>,

    /// Number of grid points
    #[arg(long, default_value_t = experiment::DEFAULT_STEPS)]
    steps: usize,

    /// Output CSV [default: <experiment>.csv]
    #[arg(long)]
    out: Option<PathBuf>,

    /// Initial state for `custom`: four lines of four `re+imi` entries
    #[arg(long)]
    state_file: Option<PathBuf>,

    /// Bath occupation for amplitude-damping runs
    #[arg(long)]
    nbar: Option<f64>,

    /// Rescaling factors, comma separated: `μ`, `μα:μβ` or `μα:μβ:μγ`
    #[arg(long, value_parser = parse_mu)]
    mu: Option<MuList>,

    /// Channel for `custom`: dephasing or ad
    #[arg(long, value_parser = parse_channel)]
    channel: Option<ChannelKind>,
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone)]
struct MuList(Vec<MuFactors>);

fn parse_mu(s: &str) -> Result<MuList, String> {
    parse_mu_list(s).map(MuList).map_err(|e| e.to_string())
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    match s {
        "dephasing" => Ok(ChannelKind::Dephasing),
        "ad" | "amplitude_damping" | "amplitude-damping" => Ok(ChannelKind::AmplitudeDamping),
        _ => Err(format!("unknown channel `{s}` (expected dephasing or ad)")),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("SPINPHASE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig {
            field: "SPINPHASE_THREADS".into(),
            msg: format!("must be a positive integer, got `{v}`"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig { field: "SPINPHASE_THREADS".into(), msg: e.to_string() })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        experiment: args.experiment,
        mc: MCConfig::new(args.samples, args.seed),
        tmax: args.tmax,
        steps: args.steps,
        nbar: args.nbar,
        mu: args.mu.map(|m| m.0),
        state_seed: args.state_seed,
        channel: args.channel,
        state_file: args.state_file,
        out: args.out,
    };
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", config.experiment)));
    let result = init_threads()
        .and_then(|()| experiment::run(&config))
        .and_then(|output| {
            for n in output.notes.iter().filter(|n| n.starts_with("negative_pi")) {
                eprintln!("spinphase: warning: {n}");
            }
            output.write_csv(&out)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinphase: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
