use std::str::FromStr;

use super::commands::allocate_model;
use super::spec::{ModelKind, ModelSpecFile};
use crate::binary::{allocate_binary_asym, binary_ceo_bound, mismatch_sum_rate, BinaryModel};
use crate::error::{Error, Result};
use crate::gaussian::{activation_threshold, single_active_boundary};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    /// Activation water level against SNR.
    #[value(name = "threshold")]
    Threshold,
    /// Optimal per-sensor rates against the budget.
    #[value(name = "alloc_vs_budget", alias = "alloc-vs-budget")]
    AllocVsBudget,
    /// Two-sensor single-active budget against the weaker SNR.
    #[value(name = "single_active", alias = "single-active")]
    SingleActive,
    /// Mismatched sum rate and CEO lower bound against target distortion.
    #[value(name = "ceo_binary", alias = "ceo-binary")]
    CeoBinary,
    /// Optimal first-sensor rate and distortion against source bias.
    #[value(name = "bernoulli_asym", alias = "bernoulli-asym")]
    BernoulliAsym,
}

impl SweepKind {
    pub fn columns(self, sensors: usize) -> Vec<String> {
        let fixed: &[&str] = match self {
            SweepKind::Threshold => &["gamma", "nu_boundary", "regime"],
            SweepKind::AllocVsBudget => {
                let mut c = vec!["R".to_string()];
                c.extend((1..=sensors).map(|l| format!("R{l}")));
                return c;
            }
            SweepKind::SingleActive => &["gamma2", "R_boundary"],
            SweepKind::CeoBinary => &["D", "R_mismatch", "R_ceo_bound"],
            SweepKind::BernoulliAsym => &["alpha", "R1_opt", "distortion"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Threshold => "threshold",
            SweepKind::AllocVsBudget => "alloc_vs_budget",
            SweepKind::SingleActive => "single_active",
            SweepKind::CeoBinary => "ceo_binary",
            SweepKind::BernoulliAsym => "bernoulli_asym",
        }
    }
}

/// `start,stop,points`: `points` evenly spaced values, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Range {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Range { start, stop, points }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let h = (self.stop - self.start) / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.stop
                        } else {
                            self.start + i as f64 * h
                        }
                    })
                    .collect()
            }
        }
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start,stop,points, got {s:?}"));
        };
        let start: f64 = a.parse().map_err(|e| format!("start {a:?}: {e}"))?;
        let stop: f64 = b.parse().map_err(|e| format!("stop {b:?}: {e}"))?;
        let points: usize = n.parse().map_err(|e| format!("points {n:?}: {e}"))?;
        if !(start.is_finite() && stop.is_finite()) {
            return Err("range ends must be finite".into());
        }
        if points == 0 {
            return Err("a range needs at least one point".into());
        }
        Ok(Range { start, stop, points })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

fn need_spec(spec: Option<&ModelSpecFile>, kind: SweepKind) -> Result<&ModelSpecFile> {
    spec.ok_or_else(|| Error::Domain(format!("the {} sweep needs a model", kind.name())))
}

fn two_binary(spec: &ModelSpecFile, kind: SweepKind) -> Result<(f64, f64)> {
    match (spec.model, spec.ps.as_deref()) {
        (ModelKind::Binary, Some(&[p1, p2])) => Ok((p1, p2)),
        _ => Err(Error::Domain(format!(
            "the {} sweep needs a binary model with two sensors",
            kind.name()
        ))),
    }
}

/// Default range for each kind, given the model if there is one.
pub fn default_range(kind: SweepKind, spec: Option<&ModelSpecFile>) -> Range {
    match kind {
        SweepKind::Threshold => Range::new(0.0, 3.0, 31),
        SweepKind::AllocVsBudget => {
            let stop = match spec {
                Some(s) if s.sum_rate > 0.0 => s.sum_rate,
                Some(s) => s.gammas.as_ref().or(s.ps.as_ref()).map_or(1.0, |v| v.len() as f64),
                None => 1.0,
            };
            Range::new(0.0, stop, 41)
        }
        SweepKind::SingleActive => {
            let g1 = spec.and_then(|s| s.gammas.as_ref()).and_then(|g| g.first()).copied();
            Range::new(0.0, g1.unwrap_or(1.0), 31)
        }
        SweepKind::CeoBinary => Range::new(0.02, 0.3, 15),
        SweepKind::BernoulliAsym => Range::new(0.01, 0.5, 50),
    }
}

pub fn cmd_sweep(kind: SweepKind, spec: Option<&ModelSpecFile>, range: Range, fallback: bool) -> Result<SweepTable> {
    let xs = range.values();
    let mut rows = Vec::with_capacity(xs.len());
    let mut columns = kind.columns(0);
    match kind {
        SweepKind::Threshold => {
            for g in xs {
                if !(g >= 0.0) {
                    return Err(Error::Domain(format!("SNR {g} must be nonnegative")));
                }
                let regime = if g <= 1.0 { "inverse" } else { "linear" };
                rows.push(vec![
                    Cell::Num(g),
                    Cell::Num(activation_threshold(g)),
                    Cell::Text(regime),
                ]);
            }
        }
        SweepKind::AllocVsBudget => {
            let spec = need_spec(spec, kind)?;
            let model = spec.build()?;
            let s = spec.settings();
            columns = kind.columns(model.len());
            for r in xs {
                let a = allocate_model(&model, r, &s, fallback)?;
                let mut row = vec![Cell::Num(r)];
                row.extend(a.rates.into_iter().map(Cell::Num));
                rows.push(row);
            }
        }
        SweepKind::SingleActive => {
            let spec = need_spec(spec, kind)?;
            let g1 = match (spec.model, spec.gammas.as_deref()) {
                (ModelKind::Gaussian, Some([g1, ..])) => *g1,
                _ => return Err(Error::Domain("the single_active sweep needs a gaussian model".into())),
            };
            let tol = spec.settings().tol.max(1e-12);
            for g2 in xs {
                let b = single_active_boundary(g1, g2, tol)?;
                rows.push(vec![Cell::Num(g2), Cell::Num(b.unwrap_or(f64::INFINITY))]);
            }
        }
        SweepKind::CeoBinary => {
            let spec = need_spec(spec, kind)?;
            let (p1, p2) = two_binary(spec, kind)?;
            let model = match spec.build()? {
                Model::Binary(m) if m.is_symmetric() => m,
                _ => return Err(Error::Domain("the ceo_binary sweep needs a uniform source".into())),
            };
            let tol = spec.settings().tol.max(1e-12);
            for d in xs {
                let mismatch = mismatch_sum_rate(&model, d, tol)?;
                let (_, _, bound) = binary_ceo_bound(p1, p2, d, d)?;
                rows.push(vec![Cell::Num(d), Cell::Num(mismatch), Cell::Num(bound)]);
            }
        }
        SweepKind::BernoulliAsym => {
            let spec = need_spec(spec, kind)?;
            let (p1, p2) = two_binary(spec, kind)?;
            let s = spec.settings();
            for alpha in xs {
                let m = BinaryModel::new(vec![p1, p2], alpha)?
                    .with_entropy_mode(s.entropy_mode)
                    .with_tie_rule(s.tie_rule);
                let a = allocate_binary_asym(&m, spec.sum_rate, s.step)?;
                rows.push(vec![Cell::Num(alpha), Cell::Num(a.rates[0]), Cell::Num(a.distortion)]);
            }
        }
    }
    Ok(SweepTable { kind, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "0,3,4".parse().unwrap();
        assert_eq!(r.values(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!("1,2,1".parse::<Range>().unwrap().values(), vec![1.0]);
        for bad in ["0,1", "0,1,0", "a,1,2", "0,inf,3", "0,1,2,3"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn threshold_rows_match_header() {
        let t = cmd_sweep(SweepKind::Threshold, None, Range::new(0.0, 3.0, 7), true).unwrap();
        assert_eq!(t.columns, vec!["gamma", "nu_boundary", "regime"]);
        assert!(t.rows.iter().all(|r| r.len() == 3));
        assert_eq!(t.rows[2], vec![Cell::Num(1.0), Cell::Num(1.0), Cell::Text("inverse")]);
    }

    #[test]
    fn model_sweeps_need_a_model() {
        assert!(cmd_sweep(SweepKind::CeoBinary, None, Range::new(0.1, 0.2, 2), true).is_err());
    }
}
