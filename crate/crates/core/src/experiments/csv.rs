//! Ensemble tables: `k,moment_q{q},se_q{q},...,q{p},...[,bound]`, one row
//! per checkpoint, floats in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use super::config::value_label;
use super::ensemble::EnsembleStats;
use crate::error::{Error, Result};
use crate::kv::fmt_f64;
use crate::theory::BoundCurve;

pub fn ensemble_csv_string(stats: &EnsembleStats, bound: Option<&BoundCurve>) -> Result<String> {
    if let Some(b) = bound {
        if b.checkpoints != stats.checkpoints {
            return Err(Error::InvalidParameter(
                "bound curve and ensemble use different checkpoint grids".into(),
            ));
        }
    }
    let mut header = vec!["k".to_string()];
    for &q in &stats.moment_orders {
        let l = value_label(q);
        header.push(format!("moment_q{l}"));
        header.push(format!("se_q{l}"));
    }
    for &p in &stats.quantile_levels {
        header.push(format!("q{}", value_label(p)));
    }
    if bound.is_some() {
        header.push("bound".into());
    }
    let mut out = header.join(",");
    out.push('\n');
    for (c, k) in stats.checkpoints.iter().enumerate() {
        write!(out, "{k}").unwrap();
        for (m, se) in stats.moments.iter().zip(&stats.moment_se) {
            write!(out, ",{},{}", fmt_f64(m[c]), fmt_f64(se[c])).unwrap();
        }
        for q in &stats.quantiles {
            write!(out, ",{}", fmt_f64(q[c])).unwrap();
        }
        if let Some(b) = bound {
            write!(out, ",{}", fmt_f64(b.values[c])).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_ensemble_csv(stats: &EnsembleStats, bound: Option<&BoundCurve>, path: &Path) -> Result<()> {
    let text = ensemble_csv_string(stats, bound)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A numeric table read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    /// Column-major values.
    pub columns: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |msg: String| Error::Config {
            path: origin.to_string(),
            msg,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| err("empty file".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut columns = vec![Vec::new(); header.len()];
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != header.len() {
                return Err(err(format!(
                    "row {} has {} fields, header has {}",
                    i + 2,
                    fields.len(),
                    header.len()
                )));
            }
            for (col, f) in columns.iter_mut().zip(fields) {
                let v = f
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("row {}: `{f}` is not a number", i + 2)))?;
                col.push(v);
            }
        }
        Ok(CsvTable { header, columns })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        CsvTable::parse(&text, &path.display().to_string())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// The `k` column as integers.
    pub fn checkpoints(&self) -> Option<Vec<usize>> {
        self.column("k").map(|c| c.iter().map(|&v| v as usize).collect())
    }
}
