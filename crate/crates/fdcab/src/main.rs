//! Thin command-line front end over the `fdcab` library.
//!
//! Exit codes: 0 success, 1 validation failure (or runtime error), 2 bad
//! arguments.

use clap::{Args, Parser, Subcommand};
use fdcab::montecarlo::{ergodic_efficiency, simulate_cab, simulate_hd};
use fdcab::optimizer::{
    brute_force_optimum, cab_duration_approx, cab_loss_bound, gain_lower_bound,
    hd_duration_approx, hd_loss_bound, round_to_cycle, Strategy,
};
use fdcab::rates::{cab_efficiency, genie_zf_rate_mc, hd_efficiency};
use fdcab::rng::block_rng;
use fdcab::sweep::{sweep_block_length, sweep_snr, write_outputs, Mode, SweepRow};
use fdcab::{channel, validate, ConfigFile, RateModel, SystemConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fdcab", version, about = "Full-duplex open-loop training simulator")]
struct Cli {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML); flags below override its values.
    #[arg(long, global = true, env = "FDCAB_CONFIG")]
    config: Option<PathBuf>,
    /// Base-station antennas = users.
    #[arg(long = "M", global = true, env = "FDCAB_M")]
    m: Option<usize>,
    /// Coherence block length in symbols.
    #[arg(long = "T", global = true, env = "FDCAB_T")]
    t: Option<usize>,
    /// SNR in dB (converted to linear power against unit noise).
    #[arg(long, global = true, env = "FDCAB_SNR_DB")]
    snr_db: Option<f64>,
    /// User feedback power fraction in (0, 1].
    #[arg(long, global = true, env = "FDCAB_F")]
    f: Option<f64>,
    /// INI strength factor (interference power = alpha*f*P).
    #[arg(long, global = true, env = "FDCAB_ALPHA")]
    alpha: Option<f64>,
    /// Monte Carlo repetitions.
    #[arg(long, global = true, env = "FDCAB_TRIALS")]
    trials: Option<usize>,
    /// RNG seed.
    #[arg(long, global = true, env = "FDCAB_SEED")]
    seed: Option<u64>,
    /// Rate source for optimization and sweeps.
    #[arg(long, global = true, env = "FDCAB_MODE", value_parser = parse_mode)]
    mode: Option<Mode>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "analytic" => Ok(Mode::Analytic),
        "simulated" => Ok(Mode::Simulated),
        other => Err(format!("unknown mode {other:?} (analytic|simulated)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every closed-form rate expression at the operating point.
    Rates {
        /// Also cross-check the genie rate by Monte Carlo.
        #[arg(long)]
        with_mc: bool,
    },
    /// Optimal training durations for both strategies.
    Optimize,
    /// Monte Carlo simulation of both protocols at fixed training durations.
    Simulate {
        /// Training symbols (default: rounded closed-form optimum per strategy).
        #[arg(long)]
        t_tr: Option<usize>,
        /// Write per-block traces as CSV (block_id, cycle, rate_noini, rate_ini, data_rate).
        #[arg(long)]
        traces_out: Option<PathBuf>,
        /// Dump the sampled channel blocks (binary) for audits.
        #[arg(long)]
        dump_blocks: Option<PathBuf>,
    },
    /// Sweep the block length T (block-length experiment).
    SweepT {
        /// Comma list or start:stop:step, e.g. "500,1000,2000" or "500:5000:500".
        #[arg(long, default_value = "500,1000,2000,5000,10000,20000,50000")]
        grid: String,
        #[arg(long, default_value = "sweep_t.csv")]
        out: PathBuf,
    },
    /// Sweep the SNR in dB (SNR experiment).
    SweepSnr {
        #[arg(long, default_value = "-5,0,5,10,15,20")]
        grid: String,
        #[arg(long, default_value = "sweep_snr.csv")]
        out: PathBuf,
    },
    /// Run the full validation suite; exits 1 if any check fails.
    Validate,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].parse().map_err(|_| format!("bad grid start {:?}", parts[0]))?;
        let stop: f64 = parts[1].parse().map_err(|_| format!("bad grid stop {:?}", parts[1]))?;
        let step: f64 = parts[2].parse().map_err(|_| format!("bad grid step {:?}", parts[2]))?;
        if step <= 0.0 || stop < start {
            return Err("grid requires start <= stop and step > 0".into());
        }
        let mut v = Vec::new();
        let mut x = start;
        while x <= stop + 1e-9 {
            v.push(x);
            x += step;
        }
        return Ok(v);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad grid value {s:?}")))
        .collect()
}

/// Anything wrong with the invocation itself exits 2; failures while doing
/// the work exit 1.
enum CliError {
    BadArgs(String),
    Runtime(String),
}

impl CliError {
    fn runtime<E: std::fmt::Display>(e: E) -> CliError {
        CliError::Runtime(e.to_string())
    }
}

fn resolve_config(args: &ScenarioArgs) -> Result<SystemConfig, CliError> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path).map_err(|e| CliError::BadArgs(e.to_string()))?,
        None => ConfigFile::default(),
    };
    let overrides = ConfigFile {
        m: args.m,
        t: args.t,
        snr_db: args.snr_db,
        f: args.f,
        alpha: args.alpha,
        trials: args.trials,
        seed: args.seed,
    };
    file.resolve(&overrides)
        .map_err(|e| CliError::BadArgs(e.to_string()))
}

fn print_sweep_errors(rows: &[SweepRow]) {
    for row in rows {
        if let Err(e) = row {
            eprintln!("warning: {}={} skipped: {}", e.variable.as_str(), e.value, e.message);
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let cfg = resolve_config(&cli.scenario)?;
    let mode = cli.scenario.mode.unwrap_or_default();
    match cli.command {
        Command::Rates { with_mc } => {
            let model = RateModel::new(&cfg);
            println!("operating point: M={} T={} snr={:.2} dB f={} alpha={}",
                cfg.antennas, cfg.block_len, cfg.snr_db(), cfg.feedback_fraction, cfg.ini_factor);
            println!("genie zf rate        : {:.6} bits/s/Hz", model.zf_rate);
            if with_mc {
                let mc = genie_zf_rate_mc(&cfg, cfg.trials, 1);
                println!("genie zf rate (mc)   : {:.6} ± {:.6} ({} trials)", mc.mean, mc.std_err, mc.samples);
            }
            println!("invariant ini loss   : {:.6}", model.invariant_ini_loss);
            println!("loss bound  cab / hd : {:.6} / {:.6}",
                cab_loss_bound(&cfg, &model), hd_loss_bound(&cfg, &model));
            println!();
            println!("{:>6} {:>14} {:>14}", "beta", "data_loss", "ini_loss");
            for beta in [1usize, 2, 5, 10, 20, 50] {
                if beta <= cfg.max_cycles() {
                    println!(
                        "{beta:>6} {:>14.6} {:>14.6}",
                        model.data_phase_loss(beta * cfg.antennas),
                        model.training_loss_with_ini(beta)
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize => {
            let model = RateModel::new(&cfg);
            let tables = match mode {
                Mode::Analytic => None,
                Mode::Simulated => Some(fdcab::montecarlo::estimate_rate_tables(
                    &cfg,
                    cfg.max_training() / cfg.antennas,
                    2,
                )),
            };
            println!("mode: {}", mode.as_str());
            for (name, strategy) in [("cab", Strategy::Cab), ("hd ", Strategy::HalfDuplex)] {
                let plan = match &tables {
                    None => brute_force_optimum(&cfg, &model, &model, strategy),
                    Some(t) => brute_force_optimum(&cfg, &model, t, strategy),
                };
                println!(
                    "{name}: t*={:>6} (approx {:>9.2}) ar*={:.6} ar(approx)={:.6}",
                    plan.exact_duration, plan.approx_duration,
                    plan.rate_at_exact, plan.rate_at_approx
                );
            }
            let t_gain = round_to_cycle(&cfg, hd_duration_approx(&cfg, &model)).max(2 * cfg.antennas);
            println!(
                "gain lower bound at t={}: {:.6}",
                t_gain,
                gain_lower_bound(&cfg, &model, t_gain).map_err(CliError::runtime)?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { t_tr, traces_out, dump_blocks } => {
            let model = RateModel::new(&cfg);
            let t_cab = t_tr.unwrap_or_else(|| round_to_cycle(&cfg, cab_duration_approx(&cfg, &model)));
            let t_hd = t_tr.unwrap_or_else(|| round_to_cycle(&cfg, hd_duration_approx(&cfg, &model)));
            let cab_traces: Vec<_> = (0..cfg.trials as u64)
                .map(|b| simulate_cab(&cfg, t_cab, &mut block_rng(cfg.seed, 3, b)))
                .collect();
            let hd_traces: Vec<_> = (0..cfg.trials as u64)
                .map(|b| simulate_hd(&cfg, t_hd, &mut block_rng(cfg.seed, 4, b)))
                .collect();
            let cab = ergodic_efficiency(&cfg, t_cab, &cab_traces);
            let hd = ergodic_efficiency(&cfg, t_hd, &hd_traces);
            let cab_analytic = cab_efficiency(&cfg, &model, t_cab).map_err(CliError::runtime)?;
            let hd_analytic = hd_efficiency(&cfg, &model, t_hd).map_err(CliError::runtime)?;
            println!("cab: t_tr={t_cab} simulated {:.6} ± {:.6}  analytic(bound) {:.6}",
                cab.mean, cab.std_err, cab_analytic);
            println!("hd : t_tr={t_hd} simulated {:.6} ± {:.6}  analytic(bound) {:.6}",
                hd.mean, hd.std_err, hd_analytic);
            if let Some(path) = traces_out {
                let mut w = csv::Writer::from_path(&path).map_err(CliError::runtime)?;
                w.write_record(["block_id", "cycle", "rate_noini", "rate_ini", "data_rate"])
                    .map_err(CliError::runtime)?;
                for (b, trace) in cab_traces.iter().enumerate() {
                    for (i, (f, g)) in trace.no_ini_rates.iter().zip(&trace.ini_rates).enumerate() {
                        w.write_record([
                            b.to_string(),
                            (i + 2).to_string(),
                            format!("{f:.6}"),
                            format!("{g:.6}"),
                            format!("{:.6}", trace.data_rate),
                        ])
                        .map_err(CliError::runtime)?;
                    }
                }
                w.flush().map_err(CliError::runtime)?;
                println!("traces written to {}", path.display());
            }
            if let Some(path) = dump_blocks {
                let blocks: Vec<_> = (0..cfg.trials as u64)
                    .map(|b| channel::sample_block(&cfg, &mut block_rng(cfg.seed, 3, b)))
                    .collect();
                channel::write_blocks_to_path(&path, &blocks).map_err(CliError::runtime)?;
                println!("channel blocks written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepT { grid, out } => {
            let started = Instant::now();
            let grid: Vec<usize> = parse_grid(&grid)
                .map_err(CliError::BadArgs)?
                .into_iter()
                .map(|x| x as usize)
                .collect();
            let rows = sweep_block_length(&cfg, &grid, mode);
            print_sweep_errors(&rows);
            write_outputs(&out, &rows, &cfg, mode, started).map_err(CliError::runtime)?;
            println!("{} rows -> {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepSnr { grid, out } => {
            let started = Instant::now();
            let grid = parse_grid(&grid).map_err(CliError::BadArgs)?;
            let rows = sweep_snr(&cfg, &grid, mode);
            print_sweep_errors(&rows);
            write_outputs(&out, &rows, &cfg, mode, started).map_err(CliError::runtime)?;
            println!("{} rows -> {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate => {
            let report = validate::run_all(&cfg);
            print!("{}", report.render());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // exits 2 on bad arguments
    match run(cli) {
        Ok(code) => code,
        Err(CliError::BadArgs(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
