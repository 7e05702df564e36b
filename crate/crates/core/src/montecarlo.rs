//! Replicated simulate, periodogram, estimate runs.
//!
//! Replication `r` draws one path of length `N` from stream `r` of
//! `base_seed` and estimates `d` on it for every `(g, rule)` cell. Work is
//! split into fixed-size blocks of consecutive replications that run in
//! parallel; every replication writes only its own slot and the summaries
//! are reduced in replication order, so results are bitwise identical for
//! any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimator::{
    estimate_with_regressor, resolve_bandwidth, BandwidthRule, Regressor, Z_95,
};
use crate::model::ArfimaModel;
use crate::simulate::{simulate_streams, SimConfig, DEFAULT_BURN_IN};
use crate::spectral::{averaged_periodogram_with, EpochLayout, EpochTransform};

pub const MC_SCHEMA_VERSION: u32 = 1;

/// Replications sharing one Durbin-Levinson pass.
const BLOCK: usize = 16;

fn default_level() -> f64 {
    0.95
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

fn default_schema() -> u32 {
    MC_SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub model: ArfimaModel,
    pub total_length: usize,
    pub epoch_counts: Vec<usize>,
    pub bandwidth_rules: Vec<BandwidthRule>,
    pub replications: usize,
    pub base_seed: u64,
    #[serde(default = "default_level")]
    pub nominal_level: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub regressor: Regressor,
}

impl McConfig {
    pub fn new(
        model: ArfimaModel,
        total_length: usize,
        epoch_counts: Vec<usize>,
        bandwidth_rules: Vec<BandwidthRule>,
        replications: usize,
        base_seed: u64,
    ) -> Self {
        McConfig {
            schema_version: MC_SCHEMA_VERSION,
            model,
            total_length,
            epoch_counts,
            bandwidth_rules,
            replications,
            base_seed,
            nominal_level: default_level(),
            burn_in: DEFAULT_BURN_IN,
            regressor: Regressor::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MC_SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema_version {} (expected {MC_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.model.validate()?;
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.epoch_counts.is_empty() {
            return Err(Error::InvalidConfig("epoch_counts is empty".into()));
        }
        if self.bandwidth_rules.is_empty() {
            return Err(Error::InvalidConfig("bandwidth_rules is empty".into()));
        }
        if !(self.nominal_level > 0.0 && self.nominal_level < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "nominal_level {} must lie in (0, 1)",
                self.nominal_level
            )));
        }
        self.cells().map(|_| ())
    }

    /// `(layout, rule, m)` for every requested cell.
    fn cells(&self) -> Result<Vec<(EpochLayout, BandwidthRule, usize)>> {
        let mut out = Vec::new();
        for &g in &self.epoch_counts {
            let layout = EpochLayout::new(self.total_length, g)?;
            for &rule in &self.bandwidth_rules {
                let m = resolve_bandwidth(rule, &layout, Some(&self.model))?;
                out.push((layout, rule, m));
            }
        }
        Ok(out)
    }
}

/// Two-sided critical value for `level`. 0.95 maps to the conventional
/// 1.96; other levels use the normal quantile from `statrs` (inverse
/// complementary error function, accurate to about 1e-15).
pub fn critical_value(level: f64) -> Result<f64> {
    if level == 0.95 {
        return Ok(Z_95);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level {level} outside (0, 1)"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + 0.5 * level))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub total_length: usize,
    pub g: usize,
    pub rule: BandwidthRule,
    pub m: usize,
    /// Replications that produced an estimate.
    pub replications: usize,
    pub mean: f64,
    pub bias: f64,
    pub mse: f64,
    /// Coverage (percent) of `d_hat +- z sigma_r`.
    pub cr_r: f64,
    /// Coverage (percent) of `d_hat +- z sigma_a`.
    pub cr_a: f64,
    pub failures: usize,
    /// Standard error of `mean`.
    pub mc_se: f64,
    /// Per-replication estimates in replication order; `None` marks a failure.
    #[serde(skip)]
    pub estimates: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    d_hat: f64,
    covered_r: bool,
    covered_a: bool,
}

pub fn run_mc(config: &McConfig) -> Result<Vec<McSummary>> {
    config.validate()?;
    let cells = config.cells()?;
    let z = critical_value(config.nominal_level)?;
    let d_true = config.model.d;
    let sim = SimConfig {
        model: config.model,
        length: config.total_length,
        seed: config.base_seed,
        burn_in: config.burn_in,
    };

    let blocks: Vec<(u64, u64)> = (0..config.replications)
        .step_by(BLOCK)
        .map(|start| {
            (
                start as u64,
                (start + BLOCK).min(config.replications) as u64,
            )
        })
        .collect();

    // outcomes[r][c] for replication r and cell c
    let per_block: Vec<Vec<Vec<Option<Outcome>>>> = blocks
        .par_iter()
        .map(|&(start, end)| -> Result<Vec<Vec<Option<Outcome>>>> {
            let paths = simulate_streams(&sim, start..end)?;
            let mut transforms: Vec<(usize, EpochTransform)> = Vec::new();
            let mut rows = Vec::with_capacity(paths.len());
            for path in &paths {
                let mut row = Vec::with_capacity(cells.len());
                for (layout, _, m) in &cells {
                    let n = layout.epoch_length();
                    let pos = match transforms.iter().position(|(len, _)| *len == n) {
                        Some(p) => p,
                        None => {
                            transforms.push((n, EpochTransform::new(n)));
                            transforms.len() - 1
                        }
                    };
                    let ibar = averaged_periodogram_with(&mut transforms[pos].1, path, layout)?;
                    let outcome = estimate_with_regressor(&ibar, *m, config.regressor)
                        .ok()
                        .map(|rep| Outcome {
                            d_hat: rep.d_hat,
                            covered_r: (rep.d_hat - d_true).abs() <= z * rep.sigma_r,
                            covered_a: (rep.d_hat - d_true).abs() <= z * rep.sigma_a,
                        });
                    row.push(outcome);
                }
                rows.push(row);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<Vec<Option<Outcome>>> = per_block.into_iter().flatten().collect();

    let summaries = cells
        .iter()
        .enumerate()
        .map(|(c, (layout, rule, m))| {
            let column: Vec<Option<Outcome>> = outcomes.iter().map(|row| row[c]).collect();
            summarize(
                config.total_length,
                layout.epochs(),
                *rule,
                *m,
                d_true,
                &column,
            )
        })
        .collect();
    Ok(summaries)
}

fn summarize(
    total_length: usize,
    g: usize,
    rule: BandwidthRule,
    m: usize,
    d_true: f64,
    column: &[Option<Outcome>],
) -> McSummary {
    let ok: Vec<Outcome> = column.iter().flatten().copied().collect();
    let count = ok.len();
    let failures = column.len() - count;
    let nf = count as f64;
    let mean = ok.iter().map(|o| o.d_hat).sum::<f64>() / nf;
    let mse = ok.iter().map(|o| (o.d_hat - d_true).powi(2)).sum::<f64>() / nf;
    let var = if count > 1 {
        ok.iter().map(|o| (o.d_hat - mean).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let pct = |hits: usize| 100.0 * hits as f64 / nf;
    McSummary {
        total_length,
        g,
        rule,
        m,
        replications: count,
        mean,
        bias: mean - d_true,
        mse,
        cr_r: pct(ok.iter().filter(|o| o.covered_r).count()),
        cr_a: pct(ok.iter().filter(|o| o.covered_a).count()),
        failures,
        mc_se: (var / nf).sqrt(),
        estimates: column.iter().map(|o| o.map(|o| o.d_hat)).collect(),
    }
}

pub const TABLE_HEADER: &str = "N,g,rule,m,mean,bias,mse,cr_r,cr_a,failures,mc_se";

/// CSV table, rows ordered by `N`, then `g`, then rule name.
pub fn emit_table(summaries: &[McSummary]) -> Result<String> {
    if summaries.is_empty() {
        return Err(Error::InvalidArgument("no summaries to emit".into()));
    }
    let mut rows: Vec<&McSummary> = summaries.iter().collect();
    rows.sort_by(|a, b| {
        (a.total_length, a.g, a.rule.to_string()).cmp(&(b.total_length, b.g, b.rule.to_string()))
    });
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for s in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            s.total_length,
            s.g,
            s.rule,
            s.m,
            s.mean,
            s.bias,
            s.mse,
            s.cr_r,
            s.cr_a,
            s.failures,
            s.mc_se
        ));
    }
    Ok(out)
}
