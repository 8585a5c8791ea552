use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hybridsim::config::SimConfig;
use hybridsim::experiment::{run_experiment, sweep, Experiment, ExperimentError, Matrix, Workload};
use hybridsim::metrics::{cost_estimate, Format, MetricsReport};
use hybridsim::optical::{reference_operating_points, BerModel};
use hybridsim::platform::{Mode, Platform};
use hybridsim::workload::SyntheticWorkloadSpec;

#[derive(Parser)]
#[command(name = "hybridsim", version, about = "Optical DRAM/XPoint memory system simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one platform on one workload.
    Simulate(SimulateArgs),
    /// Run every combination listed in a matrix file.
    Sweep {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Itemized component cost.
    Cost {
        #[arg(long)]
        platform: Platform,
        #[arg(long)]
        mode: Mode,
        #[arg(long, default_value_t = 24)]
        devices: u64,
    },
    /// Fit the BER model to the measured operating points.
    CalibrateBer {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    trace: Option<PathBuf>,
    /// Bundled workload name and/or key=value overrides, comma separated.
    #[arg(long)]
    synthetic: Option<SyntheticWorkloadSpec>,
    #[arg(long)]
    platform: Platform,
    #[arg(long)]
    mode: Mode,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(String),
    Protocol(String),
    Io(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_protocol_violation() {
            Failure::Protocol(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<SimConfig, Failure> {
    match path {
        Some(p) => SimConfig::load(p).map_err(|e| Failure::Config(e.to_string())),
        None => Ok(SimConfig::default()),
    }
}

fn emit(report: &MetricsReport, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    match out {
        Some(p) => report
            .write(p, format)
            .map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{}", report.render(format));
            Ok(())
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let cfg = load_config(a.config.as_deref())?;
    let workload = match (a.trace, a.synthetic) {
        (Some(t), _) => Workload::Trace(t),
        (None, Some(s)) => Workload::Synthetic(s),
        (None, None) => return Err(Failure::Config("need --trace or --synthetic".into())),
    };
    let exp = Experiment {
        platform: a.platform,
        mode: a.mode,
        workload,
        seed: a.seed,
    };
    let report = run_experiment(&cfg, &exp)?;
    emit(&report, a.out.as_deref(), a.format)
}

fn run_sweep(matrix_path: &Path) -> Result<(), Failure> {
    let matrix = Matrix::load(matrix_path)?;
    let base = matrix_path.parent().unwrap_or(Path::new("."));
    let cfg = load_config(matrix.config.as_ref().map(|c| base.join(c)).as_deref())?;
    let exps = matrix.experiments()?;
    let out_dir = matrix.out_dir.as_ref().map(|d| base.join(d));
    if let Some(d) = &out_dir {
        std::fs::create_dir_all(d).map_err(|e| Failure::Io(format!("{}: {e}", d.display())))?;
    }
    let ext = match matrix.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    println!("workload,seed,platform,mode,avg_latency_ns,wasted_bw,energy_j");
    let mut first_err = None;
    for (i, res) in sweep(&cfg, &exps).into_iter().enumerate() {
        match res {
            Ok(r) => {
                let m = &r.meta;
                println!(
                    "{},{},{},{},{:.3},{:.4},{:.6e}",
                    m.workload, m.seed, m.platform, m.mode, r.latency.avg_ns, r.wasted_bw, r.energy_total_j
                );
                if let Some(d) = &out_dir {
                    let name = format!("{i:03}-{}-{}-{}.{ext}", m.workload, m.platform, m.mode);
                    emit(&r, Some(&d.join(name)), matrix.format)?;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                first_err.get_or_insert(Failure::from(e));
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn cost(platform: Platform, mode: Mode, devices: u64) {
    let c = cost_estimate(platform, mode, devices);
    println!("platform   {platform}");
    println!("mode       {mode}");
    println!("devices    {}", c.devices);
    println!("modulators {}", c.modulators);
    println!("detectors  {}", c.detectors);
    println!("mrr        ${:.2}", c.mrr_usd);
    println!("dram       ${:.2}", c.dram_usd);
    println!("xpoint     ${:.2}", c.xpoint_usd);
    println!("vcsel      ${:.2}", c.vcsel_usd);
    println!("total      ${:.2}", c.total_usd());
}

fn calibrate(config: Option<&Path>) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let (model, rows) = BerModel::calibrate(&cfg.power_model(), &reference_operating_points())
        .map_err(|e| Failure::Config(e.to_string()))?;
    println!("A = {:.6e}", model.a);
    println!("k = {:.6} /mW", model.k);
    println!("point,received_mw,measured,predicted,relative_error");
    for r in rows {
        println!(
            "{},{:.6},{:.3e},{:.3e},{:.4}",
            r.name, r.received_mw, r.measured, r.predicted, r.relative_error
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Sweep { matrix } => run_sweep(&matrix),
        Cmd::Cost { platform, mode, devices } => {
            cost(platform, mode, devices);
            Ok(())
        }
        Cmd::CalibrateBer { config } => calibrate(config.as_deref()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Protocol(m)) => {
            eprintln!("protocol violation: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
