use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spiral_core::denoise::{
    denoise_canonical_l1, denoise_l1_dual, denoise_tv, rdp_fit, rdp_ti_fit, ShiftSet, SubConfig,
};
use spiral_core::harness::io::{read_image, write_image};
use spiral_core::harness::{make_phantom, run_experiment, ExperimentConfig};
use spiral_core::operators::{OrthoBasis, WaveletFamily};
use spiral_core::Signal;
use spiral_oracles::OracleReport;
use spiral_validation::{run_suite, SUITES};

#[derive(Parser)]
#[command(
    name = "spiral",
    version,
    about = "Penalized Poisson-likelihood reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tomography experiment described by a JSON config.
    Run {
        /// JSON file with any subset of the experiment fields; the rest default.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "spiral-out")]
        out_dir: PathBuf,
    },
    /// Denoise one image (PGM or CSV) under a single penalty.
    Denoise {
        #[arg(long, value_enum)]
        penalty: PenaltyArg,
        #[arg(long)]
        kappa: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the emission phantom and attenuation map.
    Phantom {
        #[arg(long, default_value_t = 64)]
        side: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run oracle suites and print their reports as CSV.
    Oracle {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    /// `‖f‖₁` with the closed-form solution.
    L1,
    /// `‖Wᵀf‖₁` with an orthonormal Haar basis.
    L1w,
    Tv,
    Rdp,
    RdpTi,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { config, out_dir } => run(config, out_dir),
        Command::Denoise {
            penalty,
            kappa,
            input,
            out,
        } => denoise(penalty, kappa, input, out),
        Command::Phantom { side, out_dir } => phantom(side, out_dir),
        Command::Oracle { suite } => oracle(&suite),
    }
}

fn run(config: Option<PathBuf>, out_dir: PathBuf) -> Result<()> {
    let config: ExperimentConfig = match config {
        Some(path) => {
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    log::info!(
        "{} trials x {} methods on a {}x{} image, output in {}",
        config.trials,
        config.methods.len(),
        config.side,
        config.side,
        out_dir.display()
    );
    let report = run_experiment(&config, Some(&out_dir))?;
    println!("method,mean_rmse_percent,mean_seconds");
    for method in &config.methods {
        let rmse = report
            .mean(&method.name, |r| r.rmse_percent)
            .unwrap_or(f64::NAN);
        let secs = report
            .mean(&method.name, |r| r.wall_seconds)
            .unwrap_or(f64::NAN);
        println!("{},{rmse:.3},{secs:.4}", method.name);
    }
    Ok(())
}

fn denoise(penalty: PenaltyArg, kappa: f64, input: PathBuf, out: PathBuf) -> Result<()> {
    let s = read_image(&input).with_context(|| format!("reading {}", input.display()))?;
    let f: Signal = match penalty {
        PenaltyArg::L1 => s.with_values(denoise_canonical_l1(s.values(), kappa)?)?,
        PenaltyArg::L1w => {
            let Some((rows, cols)) = s.shape() else {
                bail!("{} is not an image", input.display());
            };
            let basis = OrthoBasis::new_2d(WaveletFamily::Haar, rows, cols)?;
            let coeffs = basis.analysis(s.values())?;
            let sol = denoise_l1_dual(&coeffs, kappa, &basis, &SubConfig::tight(), None)?;
            log::info!("dual sweeps {}, relative gap {:.2e}", sol.sweeps, sol.gap);
            s.with_values(sol.f)?
        }
        PenaltyArg::Tv => {
            let sol = denoise_tv(&s, kappa, &SubConfig::tv_default(), None)?;
            log::info!("TV iterations {}", sol.iterations);
            sol.f
        }
        PenaltyArg::Rdp => {
            let fit = rdp_fit(&s, kappa)?;
            log::info!("{} cells", fit.partition.len());
            fit.estimate
        }
        PenaltyArg::RdpTi => {
            let fit = rdp_ti_fit(&s, kappa, &ShiftSet::default())?;
            log::info!("{:.1} cells per shift on average", fit.mean_cells);
            fit.estimate
        }
    };
    write_image(&out, &f).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn phantom(side: usize, out_dir: PathBuf) -> Result<()> {
    fs::create_dir_all(&out_dir)?;
    let (truth, mu) = make_phantom(side)?;
    write_image(&out_dir.join("phantom.pgm"), &truth)?;
    write_image(&out_dir.join("attenuation.pgm"), &mu)?;
    Ok(())
}

fn oracle(suite: &str) -> Result<()> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        bail!(
            "unknown suite {suite}; expected one of {} or all",
            SUITES.join(", ")
        );
    };
    println!("{}", OracleReport::CSV_HEADER);
    let mut failed = 0;
    for name in names {
        let reports = run_suite(name).expect("listed suite");
        for r in &reports {
            println!("{}", r.csv_row());
        }
        failed += reports.iter().filter(|r| !r.pass).count();
    }
    if failed > 0 {
        bail!("{failed} oracle checks failed");
    }
    Ok(())
}
