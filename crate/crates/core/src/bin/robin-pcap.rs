use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robin_pcap::experiments::{
    cmd_curve, cmd_hscan, cmd_regimes, cmd_solve, cmd_verify, curve_csv, regimes_csv, regimes_summary,
    CampaignSettings, PairConfig, PhiMode,
};
use robin_pcap::fem::SolveOptions;
use robin_pcap::{Error, ProblemParams};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_MESH: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "robin-pcap", version, about = "Robin p-capacity of star-shaped pairs: radial formulas, FEM solves and campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Physics {
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Args)]
struct MeshArgs {
    /// Angular resolution; overrides the config file.
    #[arg(long = "mesh-theta")]
    mesh_theta: Option<usize>,
    /// Radial resolution; overrides the config file.
    #[arg(long = "mesh-radial")]
    mesh_radial: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the ball energy curve for (n, p, beta).
    Regimes {
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate E(B_1, B_r) for one or more beta values.
    Curve {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long)]
        p: f64,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
        #[arg(long = "r-min", default_value_t = 1.0)]
        r_min: f64,
        #[arg(long = "r-max", default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one configured pair.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Write the nodal field as x,y,u.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare FEM energies of random pairs with the ball bound (n = 2).
    Verify {
        #[command(flatten)]
        physics: Physics,
        /// Volume cap on Omega.
        #[arg(long = "M")]
        volume_cap: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.15)]
        amplitude: f64,
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan H(t, phi) over the levels of a solved pair.
    Hscan {
        config: PathBuf,
        /// solution_ratio | constant[:c] | derearranged
        #[arg(long, default_value = "solution_ratio")]
        phi: String,
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParams(_) => EXIT_CONFIG,
            Error::Mesh(_) => EXIT_MESH,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// CSV goes to `out` when given, otherwise to stdout after the summary.
fn emit(summary: &str, csv: &str, out: Option<&Path>) -> Result<(), Failure> {
    print!("{summary}");
    match out {
        Some(path) => fs::write(path, csv).map_err(|e| Failure {
            code: EXIT_FAILURE,
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn load_config(path: &Path, mesh: &MeshArgs) -> Result<PairConfig, Failure> {
    let mut cfg = PairConfig::load(path)?;
    if let Some(t) = mesh.mesh_theta {
        cfg.n_theta = t;
    }
    if let Some(r) = mesh.mesh_radial {
        cfg.n_radial = r;
    }
    Ok(cfg)
}

fn not_converged() -> Failure {
    Failure {
        code: EXIT_NOT_CONVERGED,
        message: "solver did not reach the gradient tolerance".into(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Regimes { physics, out } => {
            let params = ProblemParams::new(physics.n, physics.p, physics.beta)?;
            let report = cmd_regimes(&params)?;
            emit(&regimes_summary(&report), &regimes_csv(&report), out.as_deref())
        }
        Command::Curve {
            n,
            p,
            beta,
            r_min,
            r_max,
            samples,
            out,
        } => {
            let params = ProblemParams::new(n, p, beta[0])?;
            let curves = cmd_curve(&params, &beta, r_min, r_max, samples)?;
            emit("", &curve_csv(&curves), out.as_deref())
        }
        Command::Solve { config, mesh, out } => {
            let cfg = load_config(&config, &mesh)?;
            let report = cmd_solve(&cfg, &SolveOptions::default())?;
            let summary = report.summary();
            match out {
                Some(path) => emit(&summary, &report.field_csv(), Some(&path))?,
                None => print!("{summary}"),
            }
            if report.converged {
                Ok(())
            } else {
                Err(not_converged())
            }
        }
        Command::Verify {
            physics,
            volume_cap,
            count,
            seed,
            amplitude,
            mesh,
            out,
        } => {
            let params = ProblemParams::new(physics.n, physics.p, physics.beta)?;
            let mut settings = CampaignSettings::new(params, volume_cap, count, seed, amplitude);
            if let Some(t) = mesh.mesh_theta {
                settings.n_theta = t;
            }
            if let Some(r) = mesh.mesh_radial {
                settings.n_radial = r;
            }
            let report = cmd_verify(&settings)?;
            emit(&report.summary(), &report.to_csv(), out.as_deref())
        }
        Command::Hscan { config, phi, mesh, out } => {
            let mode: PhiMode = phi.parse()?;
            let cfg = load_config(&config, &mesh)?;
            let report = cmd_hscan(&cfg, mode, &SolveOptions::default())?;
            emit(&report.summary(), &report.to_csv(), out.as_deref())?;
            if report.solve.converged {
                Ok(())
            } else {
                Err(not_converged())
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("robin-pcap: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
