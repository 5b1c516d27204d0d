//! Parameter sweeps over block length and SNR, serialized as CSV.
//!
//! Every row echoes the full parameter set, the optimal training durations
//! (grid-exact and closed-form), the resulting spectral efficiencies, the
//! loss bounds, and the full-duplex gain bound evaluated at the rounded
//! half-duplex closed form. Rows are computed in parallel but written in
//! grid order; with a fixed seed the CSV bytes are identical across runs and
//! worker counts. A sidecar `*.meta.toml` records seed, version, and timing
//! (the only fields allowed to differ between reruns).

use crate::config::{db_to_linear, SystemConfig};
use crate::montecarlo::estimate_rate_tables;
use crate::optimizer::{
    brute_force_optimum, cab_loss_bound, gain_lower_bound, hd_duration_approx, hd_loss_bound,
    round_to_cycle, Strategy, TrainingPlan,
};
use crate::rates::RateModel;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

/// Rate source for sweep evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Bound-based analytic rates; fast and fully deterministic.
    #[default]
    Analytic,
    /// Monte Carlo ergodic rate tables (`trials` blocks per grid point).
    Simulated,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Simulated => "simulated",
        }
    }
}

/// Which scenario parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    BlockLength,
    SnrDb,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::BlockLength => "T",
            SweepVariable::SnrDb => "snr_db",
        }
    }
}

/// One sweep row: parameters in, durations/efficiencies/bounds out.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub value: f64,
    pub cfg: SystemConfig,
    pub mode: Mode,
    pub cab: TrainingPlan,
    pub hd: TrainingPlan,
    pub ar_genie: f64,
    /// 100·(ar_cab_opt - ar_hd_opt)/ar_hd_opt; `None` when ar_hd_opt = 0.
    pub gain_pct: Option<f64>,
    pub loss_bound_cab: f64,
    pub loss_bound_hd: f64,
    /// Gain bound evaluated at round_to_cycle(t_hd_approx), clamped to its
    /// own domain [2M, T-M].
    pub gain_lower_bound: f64,
}

/// A sweep keeps going past bad points; failures are reported per row.
pub type SweepRow = Result<SweepResult, SweepRowError>;

#[derive(Debug, Clone)]
pub struct SweepRowError {
    pub variable: SweepVariable,
    pub value: f64,
    pub message: String,
}

fn evaluate_point(
    cfg: &SystemConfig,
    variable: SweepVariable,
    value: f64,
    mode: Mode,
    scope: u64,
) -> SweepResult {
    let model = RateModel::new(cfg);
    let (cab, hd) = match mode {
        Mode::Analytic => (
            brute_force_optimum(cfg, &model, &model, Strategy::Cab),
            brute_force_optimum(cfg, &model, &model, Strategy::HalfDuplex),
        ),
        Mode::Simulated => {
            let tables = estimate_rate_tables(cfg, cfg.max_training() / cfg.antennas, scope);
            (
                brute_force_optimum(cfg, &model, &tables, Strategy::Cab),
                brute_force_optimum(cfg, &model, &tables, Strategy::HalfDuplex),
            )
        }
    };
    let gain_pct = (hd.rate_at_exact > 0.0)
        .then(|| 100.0 * (cab.rate_at_exact - hd.rate_at_exact) / hd.rate_at_exact);
    let t_gain = round_to_cycle(cfg, hd_duration_approx(cfg, &model)).max(2 * cfg.antennas);
    SweepResult {
        variable,
        value,
        cfg: *cfg,
        mode,
        cab,
        hd,
        ar_genie: model.zf_rate,
        gain_pct,
        loss_bound_cab: cab_loss_bound(cfg, &model),
        loss_bound_hd: hd_loss_bound(cfg, &model),
        gain_lower_bound: gain_lower_bound(cfg, &model, t_gain)
            .expect("rounded duration lies in the bound's domain"),
    }
}

fn run_sweep<F>(values: &[f64], variable: SweepVariable, mode: Mode, make_cfg: F) -> Vec<SweepRow>
where
    F: Fn(f64) -> Result<SystemConfig, String> + Sync,
{
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| match make_cfg(v) {
            Ok(cfg) => Ok(evaluate_point(&cfg, variable, v, mode, i as u64)),
            Err(message) => Err(SweepRowError {
                variable,
                value: v,
                message,
            }),
        })
        .collect()
}

/// One row per block length, all other parameters from the template.
pub fn sweep_block_length(template: &SystemConfig, grid: &[usize], mode: Mode) -> Vec<SweepRow> {
    let values: Vec<f64> = grid.iter().map(|&t| t as f64).collect();
    run_sweep(&values, SweepVariable::BlockLength, mode, |v| {
        SystemConfig {
            block_len: v as usize,
            ..*template
        }
        .validate()
        .map_err(|e| e.to_string())
    })
}

/// One row per SNR point (dB), all other parameters from the template.
pub fn sweep_snr(template: &SystemConfig, grid_db: &[f64], mode: Mode) -> Vec<SweepRow> {
    run_sweep(grid_db, SweepVariable::SnrDb, mode, |db| {
        SystemConfig {
            power: db_to_linear(db),
            ..*template
        }
        .validate()
        .map_err(|e| e.to_string())
    })
}

pub const CSV_HEADER: [&str; 22] = [
    "sweep",
    "value",
    "M",
    "T",
    "snr_db",
    "f",
    "alpha",
    "trials",
    "seed",
    "mode",
    "t_cab_exact",
    "t_cab_approx",
    "t_hd_exact",
    "t_hd_approx",
    "ar_genie",
    "ar_cab_opt",
    "ar_hd_opt",
    "gain_pct",
    "loss_bound_cab",
    "loss_bound_hd",
    "gain_lower_bound",
    "error",
];

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn record(row: &SweepRow) -> Vec<String> {
    match row {
        Ok(r) => vec![
            r.variable.as_str().to_string(),
            fmt(r.value),
            r.cfg.antennas.to_string(),
            r.cfg.block_len.to_string(),
            fmt(r.cfg.snr_db()),
            fmt(r.cfg.feedback_fraction),
            fmt(r.cfg.ini_factor),
            r.cfg.trials.to_string(),
            r.cfg.seed.to_string(),
            r.mode.as_str().to_string(),
            r.cab.exact_duration.to_string(),
            fmt(r.cab.approx_duration),
            r.hd.exact_duration.to_string(),
            fmt(r.hd.approx_duration),
            fmt(r.ar_genie),
            fmt(r.cab.rate_at_exact),
            fmt(r.hd.rate_at_exact),
            r.gain_pct.map(fmt).unwrap_or_default(),
            fmt(r.loss_bound_cab),
            fmt(r.loss_bound_hd),
            fmt(r.gain_lower_bound),
            String::new(),
        ],
        Err(e) => {
            let mut rec = vec![String::new(); CSV_HEADER.len()];
            rec[0] = e.variable.as_str().to_string();
            rec[1] = fmt(e.value);
            rec[CSV_HEADER.len() - 1] = e.message.clone();
            rec
        }
    }
}

/// Serializes a sweep as CSV with a header row.
pub fn write_csv<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(record(row))?;
    }
    writer.flush()?;
    Ok(())
}

/// CSV bytes of a sweep; what the determinism guarantee is stated over.
pub fn csv_bytes(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    buf
}

/// Writes `<out>` plus the `<out stem>.meta.toml` sidecar.
pub fn write_outputs(
    out: &Path,
    rows: &[SweepRow],
    template: &SystemConfig,
    mode: Mode,
    started: Instant,
) -> std::io::Result<()> {
    std::fs::write(out, csv_bytes(rows))?;
    let meta = format!(
        "kind = {:?}\nversion = {:?}\nseed = {}\ntrials = {}\nmode = {:?}\nrows = {}\nelapsed_ms = {}\n",
        rows.first()
            .map(|r| match r {
                Ok(s) => s.variable.as_str(),
                Err(e) => e.variable.as_str(),
            })
            .unwrap_or("empty"),
        env!("CARGO_PKG_VERSION"),
        template.seed,
        template.trials,
        mode.as_str(),
        rows.len(),
        started.elapsed().as_millis(),
    );
    std::fs::write(out.with_extension("meta.toml"), meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> SystemConfig {
        SystemConfig {
            antennas: 8,
            block_len: 2000,
            power: 10.0,
            feedback_fraction: 0.1,
            ini_factor: 0.1,
            trials: 200,
            seed: 5,
        }
    }

    #[test]
    fn block_length_sweep_reports_decreasing_fractions() {
        let rows = sweep_block_length(&template(), &[500, 1000, 2000, 5000], Mode::Analytic);
        let mut last_cab = f64::MAX;
        let mut last_hd = f64::MAX;
        for row in &rows {
            let r = row.as_ref().unwrap();
            let cab_frac = r.cab.exact_duration as f64 / r.cfg.block_len as f64;
            let hd_frac = r.hd.exact_duration as f64 / r.cfg.block_len as f64;
            assert!(cab_frac < last_cab && hd_frac < last_hd);
            assert!(cab_frac > hd_frac);
            last_cab = cab_frac;
            last_hd = hd_frac;
        }
    }

    #[test]
    fn snr_sweep_keeps_genie_on_top() {
        let rows = sweep_snr(&template(), &[0.0, 10.0, 20.0], Mode::Analytic);
        for row in &rows {
            let r = row.as_ref().unwrap();
            assert!(r.ar_genie >= r.cab.rate_at_exact);
            assert!(r.cab.rate_at_exact >= r.hd.rate_at_exact);
            assert!(r.hd.rate_at_exact >= 0.0);
        }
    }

    #[test]
    fn bad_points_become_error_rows() {
        let rows = sweep_block_length(&template(), &[8, 2000], Mode::Analytic);
        assert!(rows[0].is_err());
        assert!(rows[1].is_ok());
        let bytes = csv_bytes(&rows);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("T must be >= 2M"));
    }

    #[test]
    fn csv_is_byte_identical_across_runs_and_thread_counts() {
        let t = template();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    csv_bytes(&sweep_snr(&t, &[0.0, 5.0, 10.0], Mode::Simulated))
                })
        };
        let a = run(1);
        let b = run(4);
        let c = run(4);
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn rows_echo_the_full_parameter_set() {
        let rows = sweep_snr(&template(), &[10.0], Mode::Analytic);
        let text = String::from_utf8(csv_bytes(&rows)).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), CSV_HEADER.len());
        let row = lines.next().unwrap();
        for field in ["snr_db", "8", "2000", "0.100000", "200", "5", "analytic"] {
            assert!(row.contains(field) || header.contains(field), "{field}");
        }
    }
}
