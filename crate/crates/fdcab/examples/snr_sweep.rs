//! Spectral efficiency versus SNR: genie, optimal full-duplex, and optimal
//! half-duplex efficiencies with the relative gain, one CSV row per SNR.
//!
//! ```bash
//! cargo run --release --example snr_sweep > snr.csv
//! ```

use fdcab::sweep::{sweep_snr, write_csv, Mode};
use fdcab::SystemConfig;

fn main() {
    let cfg = SystemConfig::default(); // M=8, T=2000, f=alpha=0.1
    let grid = [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    let rows = sweep_snr(&cfg, &grid, Mode::Analytic);

    for row in rows.iter().flatten() {
        eprintln!(
            "{:>5.1} dB: genie {:.4}, cab {:.4} (t*={}), hd {:.4} (t*={}), gain {}",
            row.value,
            row.ar_genie,
            row.cab.rate_at_exact,
            row.cab.exact_duration,
            row.hd.rate_at_exact,
            row.hd.exact_duration,
            row.gain_pct
                .map(|g| format!("{g:.1}%"))
                .unwrap_or_else(|| "n/a".into()),
        );
    }
    write_csv(std::io::stdout().lock(), &rows).expect("write CSV");
}
