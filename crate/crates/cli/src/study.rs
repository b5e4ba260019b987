//! Convergence sweeps over sample count and thickness, written as CSV.

use std::io::{Read, Write};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use layerquad_core::geometry::{Integrand, SurfaceSpec};

use crate::pipeline::{generate_fixture, integrate, resolve_epsilon, solve, PipelineKind, SolveOptions};

pub const CSV_HEADER: [&str; 8] = ["N", "eps", "lambda", "residual", "integral", "ref", "rel_err", "seconds"];

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub fixture: SurfaceSpec,
    pub counts: Vec<usize>,
    /// Thickness as a multiple of the median spacing; ignored by closed and S^2 runs.
    pub eps_factors: Vec<f64>,
    pub integrand: Integrand,
    /// Template for every run; its seed is offset per row.
    pub options: SolveOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub eps: f64,
    pub lambda: f64,
    pub residual: f64,
    pub integral: f64,
    pub reference: f64,
    pub rel_err: f64,
    pub seconds: f64,
}

fn uses_thickness(kind: PipelineKind) -> bool {
    matches!(kind, PipelineKind::Collar | PipelineKind::Tube)
}

/// Runs every `(N, eps)` pair in order; rows use seeds `seed`, `seed + 1`, ...
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    ensure!(!config.counts.is_empty(), "study needs at least one sample count");
    let thick = uses_thickness(config.options.pipeline);
    let factors: Vec<Option<f64>> = if thick {
        ensure!(!config.eps_factors.is_empty(), "study needs at least one thickness factor");
        config.eps_factors.iter().map(|&f| Some(f)).collect()
    } else {
        vec![None]
    };
    let reference = config
        .fixture
        .reference(config.integrand)
        .context("fixture has no reference value for this integrand")?;
    let mut rows = Vec::new();
    let mut seed = config.options.seed;
    for &n in &config.counts {
        for factor in &factors {
            let start = Instant::now();
            let sample = generate_fixture(&config.fixture, n, seed)?;
            let mut opts = config.options.clone();
            opts.seed = seed;
            let eps = match factor {
                Some(f) => {
                    ensure!(*f > 0.0, "thickness factors must be positive");
                    let e = f * sample.cloud().median_spacing();
                    opts.epsilon = Some(e);
                    resolve_epsilon(&opts, sample.cloud())?
                }
                None => 0.0,
            };
            let solved = solve(&sample, &opts)?;
            let value = integrate(&sample, &solved.weights, config.integrand)?;
            let rel_err = if reference == 0.0 {
                (value.value - reference).abs()
            } else {
                (value.value - reference).abs() / reference.abs()
            };
            rows.push(StudyRow {
                n,
                eps,
                lambda: solved.weights.lambda,
                residual: solved.weights.residual,
                integral: value.value,
                reference,
                rel_err,
                seconds: start.elapsed().as_secs_f64(),
            });
            seed = seed.wrapping_add(1);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.eps.to_string(),
            r.lambda.to_string(),
            r.residual.to_string(),
            r.integral.to_string(),
            r.reference.to_string(),
            r.rel_err.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<StudyRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    ensure!(header == CSV_HEADER, "unexpected study header {header:?}");
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let f = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .with_context(|| format!("row {}: bad {}", line + 1, CSV_HEADER[i]))
        };
        rows.push(StudyRow {
            n: record[0]
                .parse()
                .with_context(|| format!("row {}: bad N", line + 1))?,
            eps: f(1)?,
            lambda: f(2)?,
            residual: f(3)?,
            integral: f(4)?,
            reference: f(5)?,
            rel_err: f(6)?,
            seconds: f(7)?,
        });
    }
    Ok(rows)
}

/// Number of consecutive steps in which the error did not grow.
pub fn nonincreasing_steps(rows: &[StudyRow]) -> usize {
    rows.windows(2).filter(|w| w[1].rel_err <= w[0].rel_err).count()
}
