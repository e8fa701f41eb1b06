//! Phase-damping sweep over random two-qubit states: average created
//! coherence and its ratio to the maximally entangled partner's, against
//! the entanglement of the input.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rcc_core::channel::{phase_damping, Channel};
use rcc_core::linalg::{haar_random_unitary, SeededRng};
use rcc_core::numfmt::{format_f64, serialize_f64};
use rcc_core::rcc::factorization_check;
use rcc_core::state::BipartitePureState;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::parallel::map_indexed;

pub const CSV_HEADER: [&str; 8] = [
    "sample",
    "seed",
    "r",
    "omega0",
    "entanglement",
    "avg_rcc",
    "avg_rcc_maxent",
    "ratio",
];

/// Samples drawn per rate in the SVG scatter.
pub const PLOT_POINT_CAP: usize = 2000;

/// Paired drops in the mean larger than this many standard errors are flagged.
const NOISE_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub sample: usize,
    pub r: f64,
    pub omega0: f64,
    pub entanglement: f64,
    pub avg_rcc: f64,
    pub avg_rcc_maxent: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateMean {
    #[serde(serialize_with = "serialize_f64")]
    pub r: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub mean_avg_rcc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Summary {
    pub rows: usize,
    /// Max `|ratio − E|` over rows that have a ratio.
    #[serde(serialize_with = "serialize_f64")]
    pub max_ratio_deviation: f64,
    pub rows_without_ratio: usize,
    /// Means in increasing `r`.
    pub means: Vec<RateMean>,
    pub strictly_increasing: bool,
    /// Consecutive rate pairs `(r_lo, r_hi)` whose mean drops beyond sampling noise.
    pub monotonicity_flags: Vec<(f64, f64)>,
}

/// `√ω₀|0⟩|β₀⟩ + √(1−ω₀)|1⟩|β₁⟩` with `ω₀` uniform and `β` the columns of
/// a Haar unitary, drawn from stream `index` of `seed`.
pub fn sample_state(seed: u64, index: usize) -> (f64, BipartitePureState) {
    let mut rng = SeededRng::new(seed, index as u64);
    let omega0 = rng.uniform();
    let u = haar_random_unitary(2, &mut rng);
    let psi = BipartitePureState::from_schmidt_terms(&[omega0, 1.0 - omega0], &[u.column(0), u.column(1)])
        .expect("unit weights and Haar columns");
    (omega0, psi)
}

/// One row per (sample, rate), samples in order and rates as configured.
pub fn compute_rows(config: &ExperimentConfig) -> Result<Vec<Fig1Row>> {
    config.validate()?;
    let channels: Vec<(f64, Channel)> = config
        .damping_rates
        .iter()
        .map(|&r| Ok((r, phase_damping(r)?.into())))
        .collect::<Result<_>>()?;
    let per_sample = map_indexed(config.samples, |i| -> Result<Vec<Fig1Row>> {
        let (omega0, psi) = sample_state(config.seed, i);
        channels
            .iter()
            .map(|(r, ch)| {
                let f = factorization_check(&psi, ch)?;
                Ok(Fig1Row {
                    sample: i,
                    r: *r,
                    omega0,
                    entanglement: f.entanglement,
                    avg_rcc: f.average,
                    avg_rcc_maxent: f.maxent_average,
                    ratio: f.ratio,
                })
            })
            .collect()
    })?;
    let mut rows = Vec::with_capacity(config.samples * channels.len());
    for chunk in per_sample {
        rows.extend(chunk?);
    }
    Ok(rows)
}

pub fn summarize(rows: &[Fig1Row], rates: &[f64]) -> Fig1Summary {
    let with_ratio = rows.iter().filter_map(|row| row.ratio.map(|q| (q - row.entanglement).abs()));
    let max_ratio_deviation = with_ratio.clone().fold(0.0, f64::max);
    let rows_without_ratio = rows.len() - with_ratio.count();

    let mut sorted: Vec<(usize, f64)> = rates.iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let k = rates.len();
    let column = |slot: usize| -> Vec<f64> {
        rows.iter().skip(slot).step_by(k.max(1)).map(|row| row.avg_rcc).collect()
    };
    let columns: Vec<Vec<f64>> = sorted.iter().map(|&(slot, _)| column(slot)).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let means: Vec<RateMean> = sorted
        .iter()
        .zip(&columns)
        .map(|(&(_, r), col)| RateMean { r, mean_avg_rcc: mean(col) })
        .collect();
    let strictly_increasing = means.windows(2).all(|w| w[1].mean_avg_rcc > w[0].mean_avg_rcc);

    let mut monotonicity_flags = Vec::new();
    for (w, cols) in means.windows(2).zip(columns.windows(2)) {
        let diffs: Vec<f64> = cols[1].iter().zip(&cols[0]).map(|(hi, lo)| hi - lo).collect();
        let n = diffs.len() as f64;
        let m = mean(&diffs);
        let var = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        if m < -NOISE_SIGMAS * (var / n).sqrt() {
            monotonicity_flags.push((w[0].r, w[1].r));
        }
    }

    Fig1Summary {
        rows: rows.len(),
        max_ratio_deviation,
        rows_without_ratio,
        means,
        strictly_increasing,
        monotonicity_flags,
    }
}

pub fn write_csv<W: Write>(rows: &[Fig1Row], seed: u64, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.sample.to_string(),
            seed.to_string(),
            format_f64(row.r),
            format_f64(row.omega0),
            format_f64(row.entanglement),
            format_f64(row.avg_rcc),
            format_f64(row.avg_rcc_maxent),
            row.ratio.map(format_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scatter of `(E, C̄)` in blue, darker for larger `r`, and `(E, ratio)` in red.
pub fn render_svg(rows: &[Fig1Row], rates: &[f64]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 56.0;
    let x = |e: f64| M + e.clamp(0.0, 1.0) * (W - 2.0 * M);
    let y = |v: f64| H - M - v.clamp(0.0, 1.0) * (H - 2.0 * M);

    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let shade = |r: f64| {
        let rank = sorted.iter().position(|&s| s == r).unwrap_or(0);
        let t = if sorted.len() > 1 { rank as f64 / (sorted.len() - 1) as f64 } else { 1.0 };
        let light = (200.0 * (1.0 - t)) as u8;
        format!("rgb({light},{light},255)")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{} {} L{} {} L{} {}" fill="none" stroke="black"/>"#,
        x(0.0),
        y(1.0),
        x(0.0),
        y(0.0),
        x(1.0),
        y(0.0)
    );
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{t}</text>"#,
            x(t),
            y(0.0) + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{t}</text>"#,
            x(0.0) - 6.0,
            y(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">entanglement E</text>"#,
        W / 2.0,
        H - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">average RCC / ratio</text>"#,
        H / 2.0,
        H / 2.0
    );

    let shown = rows.iter().filter(|row| row.sample < PLOT_POINT_CAP);
    for row in shown.clone() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}"/>"#,
            x(row.entanglement),
            y(row.avg_rcc),
            shade(row.r)
        );
    }
    for row in shown {
        if let Some(q) = row.ratio {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="red"/>"#,
                x(row.entanglement),
                y(q)
            );
        }
    }
    for (k, r) in sorted.iter().enumerate() {
        let ly = M + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{ly:.1}" r="4" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="11">r = {r}</text>"#,
            M + 12.0,
            shade(*r),
            M + 22.0,
            ly + 4.0
        );
    }
    let ly = M + 14.0 * sorted.len() as f64;
    let _ = writeln!(
        s,
        r#"<circle cx="{:.1}" cy="{ly:.1}" r="4" fill="red"/><text x="{:.1}" y="{:.1}" font-size="11">ratio</text>"#,
        M + 12.0,
        M + 22.0,
        ly + 4.0
    );
    s.push_str("</svg>\n");
    s
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| LabError::Write {
        path: path.to_owned(),
        source,
    })
}

fn write_error(path: &Path, e: impl Into<std::io::Error>) -> LabError {
    LabError::Write {
        path: path.to_owned(),
        source: e.into(),
    }
}

/// Computes the sweep, writes the CSV and, if configured, the SVG.
pub fn run_fig1(config: &ExperimentConfig) -> Result<Fig1Summary> {
    let rows = compute_rows(config)?;
    let out = create(&config.output_path)?;
    write_csv(&rows, config.seed, out).map_err(|e| write_error(&config.output_path, e))?;
    if let Some(plot) = config.resolved_plot_path() {
        let mut f = create(&plot)?;
        f.write_all(render_svg(&rows, &config.damping_rates).as_bytes())
            .and_then(|_| f.flush())
            .map_err(|e| write_error(&plot, e))?;
    }
    Ok(summarize(&rows, &config.damping_rates))
}
