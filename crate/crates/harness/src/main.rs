use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dnls_core::diagnostics::{fit_slope, BilinearOptions};
use dnls_harness::config::{ExperimentConfig, Sign};
use dnls_harness::experiments::{bilinear_experiment, diagnostic_run, diagnostic_sweep, SweepRow};
use dnls_harness::io::{to_json_pretty, RunWriter};
use dnls_harness::report::{
    acl_csv, bilinear_csv, bilinear_rows, render_report, sweep_csv, AclSummary, Format,
};
use dnls_harness::run::{converge_in, run_dir_name, run_single, stored_norm};
use dnls_harness::{HarnessError, Result};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "dnls",
    version,
    about = "Lattice NLS continuum-limit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// h-sweep comparing reconstructed lattice solutions with the continuum system
    Converge {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Every diagnostic at one lattice spacing, written to a run directory
    Single {
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Drift of the frequency-truncated mass over dyadic cutoffs
    Acl {
        #[arg(long, value_delimiter = ',')]
        kappas: Option<Vec<f64>>,
        /// Defaults to the smallest spacing in the h list
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Bilinear free-flow estimate over a sweep of high-frequency scales
    Bilinear {
        #[arg(long = "K", value_parser = parse_number, default_value = "1/64")]
        k: f64,
        #[arg(long = "L-list", value_delimiter = ',', value_parser = parse_number,
              default_value = "1/8,1/4,1/2,1")]
        l_list: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = 50.0)]
        window: f64,
        /// First seed; `--seeds` consecutive seeds are run
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value_t = 4096)]
        m: usize,
        #[arg(long, default_value_t = 0.05)]
        dtau: f64,
        #[arg(long, default_value = "runs")]
        output_dir: PathBuf,
    },
    /// Oscillatory cross terms and their phase-removed controls over the h list
    Nonres {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Space-time norm of a stored run, or the Strichartz sweep of a config
    Norms {
        #[arg(long, conflicts_with = "config")]
        run: Option<PathBuf>,
        #[arg(long, default_value = "6", value_parser = parse_number)]
        q: f64,
        #[arg(long, default_value = "6", value_parser = parse_number)]
        p: f64,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

/// Overrides applied on top of the config file (or the defaults).
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    h_list: Option<Vec<f64>>,
    #[arg(long)]
    sign: Option<Sign>,
    #[arg(long = "T", alias = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    torus_length: Option<f64>,
    #[arg(long)]
    m_ref: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    ref_dt: Option<f64>,
    #[arg(long)]
    snapshot_count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(
            h_list,
            sign,
            t_end,
            gamma,
            torus_length,
            m_ref,
            dt,
            ref_dt,
            snapshot_count,
            seed,
            output_dir
        );
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Accepts decimals, `inf`, and fractions such as `1/64`.
fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once('/') {
        Some((a, b)) => Ok(parse(a)? / parse(b)?),
        None => parse(s),
    }
}

fn json_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v)
        .map_err(|e| HarnessError::Numerical(format!("cannot serialise output: {e}")))
}

fn converge(cfg: &ExperimentConfig, jobs: usize) -> Result<()> {
    let dir = cfg.output_dir.join("converge");
    let study = converge_in(cfg, jobs, &dir)?;
    print!("{}", render_report(&study.report, Format::Csv)?);
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn acl(cfg: &mut ExperimentConfig, kappas: Option<Vec<f64>>, h: Option<f64>) -> Result<()> {
    if let Some(k) = kappas {
        cfg.acl.kappas = k;
    }
    let h = h.unwrap_or_else(|| cfg.h_list.iter().copied().fold(f64::INFINITY, f64::min));
    cfg.h_list = vec![h];
    cfg.validate()?;
    let run = diagnostic_run(cfg, h)?;
    let summary = AclSummary::new(h, &run.acl);
    let csv = acl_csv(&run.acl);
    let mut out = RunWriter::create(cfg.output_dir.join(run_dir_name("acl", h)))?;
    out.write("acl.csv", csv.as_bytes())?;
    out.write_json("acl.json", &summary)?;
    let dir = out.finish("acl", cfg, json_value(&summary)?)?;
    print!("{csv}");
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn sweep(cfg: &ExperimentConfig, command: &str) -> Result<()> {
    let rows: Vec<SweepRow> = diagnostic_sweep(cfg)?
        .into_iter()
        .map(|(row, _)| row)
        .collect();
    let csv = sweep_csv(&rows);
    let mut out = RunWriter::create(cfg.output_dir.join(command))?;
    out.write("sweep.csv", csv.as_bytes())?;
    out.write_json("sweep.json", &rows)?;
    let dir = out.finish(command, cfg, json!({ "rows": rows.len() }))?;
    print!("{csv}");
    eprintln!("wrote {}", dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bilinear(
    k: f64,
    ls: &[f64],
    trials: usize,
    window: f64,
    seed: u64,
    seeds: u64,
    options: BilinearOptions<f64>,
    output_dir: PathBuf,
) -> Result<()> {
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for s in seed..seed + seeds.max(1) {
        let sweep = bilinear_experiment(k, ls, trials, window, s, &options)?;
        slopes.push(sweep.fitted_slope);
        rows.extend(bilinear_rows(&sweep));
    }
    let pooled = {
        let xs: Vec<f64> = rows.iter().map(|r| r.l.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.median_lhs.ln()).collect();
        fit_slope(&xs, &ys)
    };
    let csv = bilinear_csv(&rows);
    let cfg = ExperimentConfig {
        seed,
        output_dir,
        ..ExperimentConfig::default()
    };
    let summary = json!({
        "K": k,
        "L_list": ls,
        "trials": trials,
        "window": window,
        "m": options.m,
        "dtau": options.dtau,
        "seeds": (seed..seed + seeds.max(1)).collect::<Vec<_>>(),
        "fitted_slopes": slopes,
        "pooled_slope": pooled,
    });
    let mut out = RunWriter::create(cfg.output_dir.join("bilinear"))?;
    out.write("bilinear.csv", csv.as_bytes())?;
    out.write_json("bilinear.json", &rows)?;
    let dir = out.finish("bilinear", &cfg, summary)?;
    print!("{csv}");
    eprintln!("fitted slopes {slopes:?}, pooled {pooled:?}");
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Converge { cfg, jobs } => converge(&cfg.resolve()?, jobs),
        Command::Single { h, cfg } => {
            let dir = run_single(&cfg.resolve()?, h)?;
            println!("{}", dir.display());
            Ok(())
        }
        Command::Acl { kappas, h, cfg } => acl(&mut cfg.resolve()?, kappas, h),
        Command::Bilinear {
            k,
            l_list,
            trials,
            window,
            seed,
            seeds,
            m,
            dtau,
            output_dir,
        } => bilinear(
            k,
            &l_list,
            trials,
            window,
            seed,
            seeds,
            BilinearOptions { m, dtau },
            output_dir,
        ),
        Command::Nonres { cfg } => sweep(&cfg.resolve()?, "nonres"),
        Command::Norms { run, q, p, cfg } => match run {
            Some(dir) => {
                print!("{}", to_json_pretty(&stored_norm(&dir, q, p)?)?);
                Ok(())
            }
            None => sweep(&cfg.resolve()?, "norms"),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
