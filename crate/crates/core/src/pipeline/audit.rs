//! Dataset-wide assessment with per-pair failure isolation and the
//! below-20 filtering rule.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assess_pair, Config, PipelineError};
use crate::aa_score::WeightSet;

pub const AUDIT_SCHEMA: &str = "compass.audit/1";
/// Pairs enter the distribution only when every feature is below this.
pub const AUDIT_FILTER_LIMIT: f64 = 20.0;
pub const HISTOGRAM_BINS: usize = 50;

/// One pair folder: `protein.pdb` plus `ligand.sdf` or `ligand.mol2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairInput {
    pub pair_id: String,
    pub dir: PathBuf,
}

impl PairInput {
    fn ligand_path(&self) -> PathBuf {
        ["ligand.sdf", "ligand.mol2"]
            .iter()
            .map(|n| self.dir.join(n))
            .find(|p| p.is_file())
            .unwrap_or_else(|| self.dir.join("ligand.sdf"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub pair_id: String,
    pub affinity: f64,
    pub strain: f64,
    pub clashes: u32,
    pub favorable: bool,
}

impl AuditRow {
    pub fn passes_filter(&self) -> bool {
        self.affinity < AUDIT_FILTER_LIMIT
            && self.strain < AUDIT_FILTER_LIMIT
            && (self.clashes as f64) < AUDIT_FILTER_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub pair_id: String,
    pub stage: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub feature: String,
    pub mean: Option<f64>,
    /// Sample (n - 1) standard deviation.
    pub std: Option<f64>,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub schema: String,
    pub n_total: usize,
    pub n_scored: usize,
    pub n_filtered: usize,
    /// Favorable share of the scored pairs.
    pub favorability_rate: Option<f64>,
    /// Statistics over the filtered pairs: affinity, strain, clashes.
    pub features: Vec<FeatureStats>,
    /// Every scored pair, sorted by id.
    pub rows: Vec<AuditRow>,
    pub failures: Vec<PairFailure>,
}

/// Subdirectories of `root`, sorted by name.
pub fn discover_pairs(root: &Path) -> Result<Vec<PairInput>, PipelineError> {
    let io = |source| PipelineError::Io {
        path: root.display().to_string(),
        source,
    };
    let mut pairs = Vec::new();
    for entry in std::fs::read_dir(root).map_err(io)? {
        let entry = entry.map_err(io)?;
        if entry.path().is_dir() {
            pairs.push(PairInput {
                pair_id: entry.file_name().to_string_lossy().into_owned(),
                dir: entry.path(),
            });
        }
    }
    if pairs.is_empty() {
        return Err(PipelineError::EmptyDataset(root.display().to_string()));
    }
    pairs.sort();
    Ok(pairs)
}

fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let Some(lo) = values.iter().cloned().reduce(f64::min) else {
        return Vec::new();
    };
    let hi = values.iter().cloned().fold(lo, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut bins: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|k| HistogramBin {
            left: lo + k as f64 * width,
            right: if k + 1 == HISTOGRAM_BINS {
                hi
            } else {
                lo + (k + 1) as f64 * width
            },
            count: 0,
        })
        .collect();
    for v in values {
        let k = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
        bins[k].count += 1;
    }
    bins
}

fn feature_stats(name: &str, values: &[f64]) -> FeatureStats {
    let n = values.len() as f64;
    let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / n);
    let std = mean
        .filter(|_| values.len() > 1)
        .map(|m| (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    FeatureStats {
        feature: name.to_string(),
        mean,
        std,
        histogram: histogram(values),
    }
}

/// Summary statistics over already-scored rows; input order is irrelevant.
pub(crate) fn summarize(n_total: usize, mut rows: Vec<AuditRow>, mut failures: Vec<PairFailure>) -> AuditSummary {
    rows.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    failures.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    let kept: Vec<&AuditRow> = rows.iter().filter(|r| r.passes_filter()).collect();
    let column = |f: fn(&AuditRow) -> f64| kept.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let features = vec![
        feature_stats("affinity", &column(|r| r.affinity)),
        feature_stats("strain", &column(|r| r.strain)),
        feature_stats("clashes", &column(|r| r.clashes as f64)),
    ];
    let favorable = rows.iter().filter(|r| r.favorable).count();
    AuditSummary {
        schema: AUDIT_SCHEMA.to_string(),
        n_total,
        n_scored: rows.len(),
        n_filtered: kept.len(),
        favorability_rate: (!rows.is_empty()).then(|| favorable as f64 / rows.len() as f64),
        features,
        rows,
        failures,
    }
}

fn score_pair(pair: &PairInput, config: &Config, weights: &WeightSet) -> Result<AuditRow, PairFailure> {
    let report =
        assess_pair(&pair.dir.join("protein.pdb"), &pair.ligand_path(), config, weights).map_err(|e| PairFailure {
            pair_id: pair.pair_id.clone(),
            stage: e.stage().map(|s| s.to_string()),
            message: e.to_string(),
        })?;
    Ok(AuditRow {
        pair_id: pair.pair_id.clone(),
        affinity: report.triple.binding_affinity,
        strain: report.triple.strain_energy,
        clashes: report.triple.clash_count,
        favorable: report.favorability.is_favorable(),
    })
}

/// Scores the given pairs on `config.jobs` worker threads.
pub fn audit_pairs(pairs: &[PairInput], config: &Config, weights: &WeightSet) -> Result<AuditSummary, PipelineError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| PipelineError::Config(e.to_string()))?;
    let results: Vec<Result<AuditRow, PairFailure>> =
        pool.install(|| pairs.par_iter().map(|p| score_pair(p, config, weights)).collect());
    let (mut rows, mut failures) = (Vec::new(), Vec::new());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => {
                log::warn!("pair {} failed: {}", f.pair_id, f.message);
                failures.push(f);
            }
        }
    }
    Ok(summarize(pairs.len(), rows, failures))
}

pub fn audit_dataset(root: &Path, config: &Config, weights: &WeightSet) -> Result<AuditSummary, PipelineError> {
    audit_pairs(&discover_pairs(root)?, config, weights)
}

/// Raw triples as CSV: `pair_id,affinity,strain,clashes,favorable`.
pub fn triples_csv(summary: &AuditSummary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &summary.rows {
        w.serialize(row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, a: f64, s: f64, c: u32) -> AuditRow {
        AuditRow {
            pair_id: id.to_string(),
            affinity: a,
            strain: s,
            clashes: c,
            favorable: a < 0.0 && s < 5.0 && c < 5,
        }
    }

    #[test]
    fn filter_drops_large_values() {
        let rows = vec![row("a", -5.0, 1.0, 1), row("b", 25.0, 1.0, 1), row("c", -3.0, 2.0, 3)];
        let s = summarize(3, rows, vec![]);
        assert_eq!((s.n_scored, s.n_filtered), (3, 2));
        assert_eq!(s.features[0].mean, Some(-4.0));
        assert!((s.features[0].std.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        for f in &s.features {
            assert_eq!(f.histogram.len(), HISTOGRAM_BINS);
            assert_eq!(f.histogram.iter().map(|b| b.count).sum::<usize>(), 2);
        }
        assert!((s.favorability_rate.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn order_independent() {
        let rows: Vec<AuditRow> = (0..12)
            .map(|i| row(&format!("p{i:02}"), -(i as f64) * 0.7, i as f64 * 0.3, i % 4))
            .collect();
        let mut shuffled = rows.clone();
        shuffled.reverse();
        shuffled.swap(2, 9);
        assert_eq!(summarize(12, rows, vec![]), summarize(12, shuffled, vec![]));
    }

    #[test]
    fn degenerate_histogram() {
        let h = histogram(&[3.0, 3.0]);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 2);
        assert!(histogram(&[]).is_empty());
        let s = feature_stats("x", &[1.0]);
        assert_eq!((s.mean, s.std), (Some(1.0), None));
    }

    #[test]
    fn csv_layout() {
        let s = summarize(1, vec![row("a", -1.5, 0.25, 2)], vec![]);
        assert_eq!(
            triples_csv(&s),
            "pair_id,affinity,strain,clashes,favorable\na,-1.5,0.25,2,true\n"
        );
    }
}
