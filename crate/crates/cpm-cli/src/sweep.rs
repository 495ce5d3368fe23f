// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps and log-log fits of cycle counts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::WorkloadConfig;
use crate::report::{run, Report};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct SweepSpec {
    /// Keys set to each value; several keys move together.
    pub params: Vec<String>,
    pub values: Vec<u64>,
    /// Keys minimized over per row; fewest macro cycles wins, micro cycles
    /// break ties.
    pub min_over: Vec<String>,
    /// Candidates for `min_over`; powers of two up to the matching
    /// dimension when absent.
    pub candidates: Option<Vec<u64>>,
    pub fit: bool,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub chosen: BTreeMap<String, u64>,
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    /// Slope of log(macro cycles) against log(product of swept keys).
    pub exponent: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub param: String,
    pub rows: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
}

impl SweepTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.report.passed())
    }
}

/// Ordinary least squares of `ln y` on `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(Fit {
        exponent,
        intercept: my - exponent * mx,
        points: pts.len(),
    })
}

/// Accepts `8,16,64` and `2^k` terms.
pub fn parse_values(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = |t: &str| CliError::Config(format!("values: cannot read {t:?}"));
    let out: Vec<u64> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.split_once('^') {
            Some((b, e)) => {
                let b: u64 = b.trim().parse().map_err(|_| bad(t))?;
                let e: u32 = e.trim().parse().map_err(|_| bad(t))?;
                b.checked_pow(e).ok_or_else(|| bad(t))
            }
            None => t.parse().map_err(|_| bad(t)),
        })
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::Config("values: empty value list".into()));
    }
    Ok(out)
}

fn default_candidates(cfg: &WorkloadConfig, key: &str) -> Result<Vec<u64>, CliError> {
    let bound = match key {
        "m" => cfg.n,
        "mx" => cfg.nx,
        "my" => cfg.ny,
        _ => None,
    }
    .ok_or_else(|| {
        CliError::Config(format!(
            "min-over: no default candidates for {key}; pass --candidates"
        ))
    })?;
    Ok((0..64)
        .map(|k| 1u64 << k)
        .take_while(|&c| c <= bound as u64)
        .collect())
}

fn combos(lists: &[Vec<u64>]) -> Vec<Vec<u64>> {
    lists.iter().fold(vec![vec![]], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn best_row(cfg: &WorkloadConfig, spec: &SweepSpec, value: u64) -> Result<SweepRow, CliError> {
    let mut base = cfg.clone();
    for p in &spec.params {
        base = base.with_param(p, value)?;
    }
    if spec.min_over.is_empty() {
        let (report, _) = run(&base, spec.timing)?;
        return Ok(SweepRow {
            value,
            chosen: BTreeMap::new(),
            report,
        });
    }
    let lists = spec
        .min_over
        .iter()
        .map(|k| match &spec.candidates {
            Some(c) => Ok(c.clone()),
            None => default_candidates(&base, k),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let runs = combos(&lists)
        .into_par_iter()
        .map(|combo| {
            let mut c = base.clone();
            for (k, &v) in spec.min_over.iter().zip(&combo) {
                c = c.with_param(k, v)?;
            }
            let (report, _) = run(&c, spec.timing)?;
            Ok((combo, report))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    // Fewest macro cycles, then fewest micro cycles, then the earliest.
    let cost = |r: &Report| (r.macro_cycles, r.micro_cycles);
    let (combo, report) = runs
        .into_iter()
        .reduce(|a, b| if cost(&b.1) < cost(&a.1) { b } else { a })
        .ok_or_else(|| CliError::Config("candidates: empty list".into()))?;
    Ok(SweepRow {
        value,
        chosen: spec.min_over.iter().cloned().zip(combo).collect(),
        report,
    })
}

pub fn sweep(cfg: &WorkloadConfig, spec: &SweepSpec) -> Result<SweepTable, CliError> {
    if spec.values.is_empty() {
        return Err(CliError::Config("values: empty value list".into()));
    }
    if spec.params.is_empty() {
        return Err(CliError::Config("param: no parameter named".into()));
    }
    let rows = spec
        .values
        .par_iter()
        .map(|&v| best_row(cfg, spec, v))
        .collect::<Result<Vec<_>, _>>()?;
    let fit = if spec.fit {
        let k = spec.params.len() as i32;
        let xs: Vec<f64> = rows.iter().map(|r| (r.value as f64).powi(k)).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.report.macro_cycles as f64).collect();
        fit_loglog(&xs, &ys)
    } else {
        None
    };
    Ok(SweepTable {
        param: spec.params.join(","),
        rows,
        fit,
    })
}
