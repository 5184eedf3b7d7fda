//! Experiment runner: density trajectories, delay/goodput sweeps, and the
//! formula verification suites, with CSV outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use idnc::config::{ExperimentSpec, Mode};
use idnc::sim::{self, ExperimentConfig};
use idnc::verify::{self, VerifyParams};

#[derive(Debug, Parser)]
#[command(
    name = "idnc",
    about = "Simulator for instantly decodable network coding over broadcast erasure channels",
    long_about = "Runs coding-density, completion-delay, and receiver-goodput experiments, \
                  or the formula verification suites. Options given on the command line \
                  override the config file."
)]
struct Cli {
    /// TOML config file (keys documented in the README).
    #[arg(long)]
    config: Option<PathBuf>,

    /// density | delay | goodput | verify
    #[arg(long)]
    mode: Option<String>,

    /// Number of receivers M.
    #[arg(long)]
    receivers: Option<usize>,

    /// Number of packets per frame N.
    #[arg(long)]
    packets: Option<usize>,

    /// Lower end of the per-receiver erasure probability range.
    #[arg(long = "erasure-lo")]
    erasure_lo: Option<f64>,

    /// Upper end of the per-receiver erasure probability range.
    #[arg(long = "erasure-hi")]
    erasure_hi: Option<f64>,

    /// Replace the upper end of the erasure range (worst receiver erasure).
    #[arg(long = "erasure-worst")]
    erasure_worst: Option<f64>,

    /// Strategy name, comma list, or "all": rnd | mc | mwc-r | mowps | wort.
    #[arg(long)]
    strategy: Option<String>,

    /// Clique solver: exact | greedy.
    #[arg(long)]
    solver: Option<String>,

    /// Biasing exponent n in the mowps/wort weights.
    #[arg(long = "bias-n")]
    bias_n: Option<f64>,

    /// Iterations (frames) per experiment.
    #[arg(long)]
    iterations: Option<usize>,

    /// Root seed; reruns with the same seed are byte-identical.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Delay/goodput sweep points with M = N (comma list).
    #[arg(long = "sweep-mn", value_delimiter = ',')]
    sweep_mn: Option<Vec<usize>>,

    /// Sweep over receiver counts, packets fixed (comma list).
    #[arg(long = "sweep-m", value_delimiter = ',')]
    sweep_m: Option<Vec<usize>>,

    /// Sweep over packet counts, receivers fixed (comma list).
    #[arg(long = "sweep-n", value_delimiter = ',')]
    sweep_n: Option<Vec<usize>>,

    /// Density-mode sweep over worst erasures (comma list).
    #[arg(long = "sweep-ew", value_delimiter = ',')]
    sweep_ew: Option<Vec<f64>>,

    /// Run reduced-size verification suites (smoke check).
    #[arg(long, default_value_t = false)]
    quick: bool,
}

impl Cli {
    fn into_spec(self) -> Result<(ExperimentSpec, bool)> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_file(path)?,
            None => ExperimentSpec::default(),
        };
        if let Some(mode) = &self.mode {
            spec.mode = mode.parse::<Mode>()?;
        }
        if let Some(v) = self.receivers {
            spec.receivers = v;
        }
        if let Some(v) = self.packets {
            spec.packets = v;
        }
        if let Some(v) = self.erasure_lo {
            spec.erasure_low = v;
        }
        if let Some(v) = self.erasure_hi {
            spec.erasure_high = v;
        }
        if let Some(v) = self.erasure_worst {
            spec.erasure_worst = Some(v);
        }
        if let Some(v) = &self.strategy {
            spec.strategy = v.clone();
        }
        if let Some(v) = &self.solver {
            spec.solver = v.clone();
        }
        if let Some(v) = self.bias_n {
            spec.bias_n = v;
        }
        if let Some(v) = self.iterations {
            spec.iterations = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.out {
            spec.out = v;
        }
        if let Some(v) = self.sweep_mn {
            spec.sweep_mn = v;
        }
        if let Some(v) = self.sweep_m {
            spec.sweep_m = v;
        }
        if let Some(v) = self.sweep_n {
            spec.sweep_n = v;
        }
        if let Some(v) = self.sweep_ew {
            spec.sweep_ew = v;
        }
        spec.validate()?;
        Ok((spec, self.quick))
    }
}

fn write_file(dir: &std::path::Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn experiment_config(spec: &ExperimentSpec, m: usize, n: usize) -> Result<ExperimentConfig> {
    let strategies = spec.strategies()?;
    let mut cfg = ExperimentConfig::new(
        spec.channel()?,
        m,
        n,
        spec.strategy_config(strategies[0])?,
        spec.iterations,
        spec.seed,
    );
    cfg.goodput_aggregation = spec.goodput_aggregation()?;
    Ok(cfg)
}

fn run_density(spec: &ExperimentSpec) -> Result<()> {
    std::fs::create_dir_all(&spec.out)
        .with_context(|| format!("cannot create {}", spec.out.display()))?;
    let strategies = spec.strategies()?;
    let worst_values: Vec<Option<f64>> = if spec.sweep_ew.is_empty() {
        vec![None]
    } else {
        spec.sweep_ew.iter().copied().map(Some).collect()
    };
    for worst in worst_values {
        let mut cfg = experiment_config(spec, spec.receivers, spec.packets)?;
        let suffix = match worst {
            Some(w) => {
                cfg.channel = spec.channel_with_worst(w)?;
                format!("_ew{w}")
            }
            None => String::new(),
        };
        let strategy_configs = strategies
            .iter()
            .map(|&k| spec.strategy_config(k))
            .collect::<idnc::Result<Vec<_>>>()?;
        let table = sim::compare_strategies(&cfg, &strategy_configs)?;
        for result in &table.results {
            let name = format!("density_{}{suffix}.csv", result.config.strategy.kind);
            let path = write_file(&spec.out, &name, &sim::trajectory_csv(result))?;
            println!(
                "wrote {} (mean delay {:.2}, mean goodput {:.4})",
                path.display(),
                result.mean_delay,
                result.mean_goodput
            );
        }
        let summary_name = format!("summary{suffix}.csv");
        let path = write_file(&spec.out, &summary_name, &sim::summary_csv(&table))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_sweep(spec: &ExperimentSpec, mode: Mode) -> Result<()> {
    std::fs::create_dir_all(&spec.out)
        .with_context(|| format!("cannot create {}", spec.out.display()))?;
    let strategies = spec.strategies()?;
    let strategy_configs = strategies
        .iter()
        .map(|&k| spec.strategy_config(k))
        .collect::<idnc::Result<Vec<_>>>()?;
    let mut csv = String::from(
        "m,n,strategy,mean_delay,delay_ci95,mean_goodput,goodput_ci95\n",
    );
    for (m, n) in spec.sweep_points() {
        let cfg = experiment_config(spec, m, n)?;
        let table = sim::compare_strategies(&cfg, &strategy_configs)?;
        for row in &table.rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                m,
                n,
                row.strategy,
                row.mean_delay,
                row.delay_ci95,
                row.mean_goodput,
                row.goodput_ci95
            ));
            println!(
                "M={m} N={n} {}: delay {:.2} ± {:.2}, goodput {:.4} ± {:.4}",
                row.strategy, row.mean_delay, row.delay_ci95, row.mean_goodput, row.goodput_ci95
            );
        }
    }
    let name = match mode {
        Mode::Delay => "delay_sweep.csv",
        _ => "goodput_sweep.csv",
    };
    let path = write_file(&spec.out, name, &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_verify(quick: bool) -> Result<bool> {
    let params = if quick {
        VerifyParams::quick()
    } else {
        VerifyParams::default()
    };
    let outcomes = verify::run_all(&params);
    let mut all_passed = true;
    for outcome in &outcomes {
        println!("{}", outcome.summary_line());
        all_passed &= outcome.passed();
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (spec, quick) = match cli.into_spec() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let run = || -> Result<bool> {
        match spec.mode {
            Mode::Density => run_density(&spec).map(|_| true),
            Mode::Delay => run_sweep(&spec, Mode::Delay).map(|_| true),
            Mode::Goodput => run_sweep(&spec, Mode::Goodput).map(|_| true),
            Mode::Verify => run_verify(quick),
        }
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
