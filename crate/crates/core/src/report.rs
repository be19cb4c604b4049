//! CSV renderers shared by the command line and the browser demo.
//!
//! Every file starts with a `#` header block naming the tool version, seed,
//! a hash of the effective configuration and the metric settings.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::heuristics::HeuristicId;
use crate::metrics::{five_number, DatasetScorecard, MetricConfig, ProfileTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of `key=value` lines sorted by key.
pub fn config_hash(pairs: &[(String, String)]) -> String {
    let mut sorted: Vec<&(String, String)> = pairs.iter().collect();
    sorted.sort();
    let mut h = Sha256::new();
    for (k, v) in sorted {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub metrics: MetricConfig,
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str, seed: u64, config: &[(String, String)], metrics: MetricConfig) -> Self {
        Self {
            command: command.to_string(),
            seed,
            config_hash: config_hash(config),
            metrics,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# packbench {VERSION}\n# command: {}\n# seed: {}\n",
            self.command, self.seed
        );
        let _ = writeln!(s, "# config-hash: {}", self.config_hash);
        let _ = writeln!(s, "# falkenauer-k: {}", self.metrics.falkenauer_k);
        let _ = writeln!(s, "# lb-mode: {}", self.metrics.lb_mode);
        let _ = writeln!(s, "# candidates: {}", self.metrics.candidates);
        for (k, v) in &self.extra {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }

    /// Header followed by `body`.
    pub fn wrap(&self, body: &str) -> String {
        self.render() + body
    }
}

pub fn scorecard_csv(cards: &[DatasetScorecard]) -> String {
    let mut s = String::from("dataset,heuristic,mean_aeb,mean_falkenauer,win_fraction,instances\n");
    for card in cards {
        for r in &card.rows {
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{:.6},{}",
                card.dataset, r.heuristic, r.mean_aeb, r.mean_falkenauer, r.win_fraction, r.instances
            );
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapValue {
    Aeb,
    Falkenauer,
    Wins,
}

impl HeatmapValue {
    pub fn file_stem(self) -> &'static str {
        match self {
            Self::Aeb => "heatmap_aeb",
            Self::Falkenauer => "heatmap_falkenauer",
            Self::Wins => "heatmap_wins",
        }
    }
}

fn heuristic_columns(cards: &[DatasetScorecard]) -> Vec<HeuristicId> {
    let mut cols: Vec<HeuristicId> = Vec::new();
    for c in cards {
        for r in &c.rows {
            if !cols.contains(&r.heuristic) {
                cols.push(r.heuristic);
            }
        }
    }
    cols
}

/// Datasets as rows, heuristics as columns. Win fractions are percentages.
pub fn heatmap_csv(cards: &[DatasetScorecard], value: HeatmapValue) -> String {
    let cols = heuristic_columns(cards);
    let mut s = String::from("dataset");
    for h in &cols {
        let _ = write!(s, ",{h}");
    }
    s.push('\n');
    for card in cards {
        s.push_str(&card.dataset);
        for h in &cols {
            match card.rows.iter().find(|r| r.heuristic == *h) {
                Some(r) => {
                    let v = match value {
                        HeatmapValue::Aeb => r.mean_aeb,
                        HeatmapValue::Falkenauer => r.mean_falkenauer,
                        HeatmapValue::Wins => 100.0 * r.win_fraction,
                    };
                    let _ = write!(s, ",{v:.4}");
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    s
}

pub fn ranking_csv(ranking: &[(HeuristicId, f64)]) -> String {
    let mut s = String::from("rank,heuristic,summed_aeb\n");
    for (i, (h, v)) in ranking.iter().enumerate() {
        let _ = writeln!(s, "{},{h},{v:.4}", i + 1);
    }
    s
}

/// Threshold rows, heuristic columns, then a row counting instances not won.
/// Heuristics that won everything show `NA`.
pub fn profile_csv(table: &ProfileTable) -> String {
    let mut s = String::from("pct_excess_bins");
    for r in &table.rows {
        let _ = write!(s, ",{}", r.heuristic);
    }
    s.push('\n');
    for (t, x) in table.thresholds.iter().enumerate() {
        let _ = write!(s, "{x}");
        for r in &table.rows {
            match &r.fractions {
                Some(f) => {
                    let _ = write!(s, ",{:.2}", f[t]);
                }
                None => s.push_str(",NA"),
            }
        }
        s.push('\n');
    }
    s.push_str("not_won");
    for r in &table.rows {
        let _ = write!(s, ",{}", r.not_won);
    }
    s.push('\n');
    s
}

/// Five-number summaries across datasets of each heuristic's mean AEB
/// (capped at 100) and win fraction.
pub fn boxplot_csv(cards: &[DatasetScorecard]) -> String {
    let mut s = String::from("metric,heuristic,min,q1,median,q3,max,datasets\n");
    for (metric, pick) in [
        (
            "aeb_capped",
            (|r: &crate::metrics::ScorecardRow| r.mean_aeb.min(100.0)) as fn(&_) -> f64,
        ),
        ("win_fraction", |r| r.win_fraction),
    ] {
        for h in heuristic_columns(cards) {
            let xs: Vec<f64> = cards
                .iter()
                .filter_map(|c| c.rows.iter().find(|r| r.heuristic == h).map(pick))
                .collect();
            let f = five_number(&xs);
            let _ = writeln!(
                s,
                "{metric},{h},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
                f.min,
                f.q1,
                f.median,
                f.q3,
                f.max,
                xs.len()
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ScorecardRow;

    fn cards() -> Vec<DatasetScorecard> {
        let row = |h, a, w| ScorecardRow {
            heuristic: h,
            mean_aeb: a,
            mean_falkenauer: 0.9,
            win_fraction: w,
            instances: 4,
        };
        vec![
            DatasetScorecard {
                dataset: "A".into(),
                rows: vec![row(HeuristicId::Ff, 5.0, 0.5), row(HeuristicId::Bf, 4.0, 1.0)],
            },
            DatasetScorecard {
                dataset: "B".into(),
                rows: vec![row(HeuristicId::Ff, 150.0, 1.0), row(HeuristicId::Bf, 3.0, 0.25)],
            },
        ]
    }

    #[test]
    fn hash_ignores_order() {
        let a = vec![("x".to_string(), "1".to_string()), ("y".to_string(), "2".to_string())];
        let b = vec![a[1].clone(), a[0].clone()];
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        assert_ne!(config_hash(&a), config_hash(&a[..1]));
    }

    #[test]
    fn heatmap_layout() {
        let s = heatmap_csv(&cards(), HeatmapValue::Wins);
        assert_eq!(s, "dataset,FF,BF\nA,50.0000,100.0000\nB,100.0000,25.0000\n");
    }

    #[test]
    fn boxplot_caps_aeb() {
        let s = boxplot_csv(&cards());
        assert!(s.contains("aeb_capped,FF,5.0000,28.7500,52.5000,76.2500,100.0000,2"));
    }

    #[test]
    fn header_block() {
        let h = Header::new("bench", 7, &[], MetricConfig::default()).with("portfolio", "FF,BF");
        let r = h.render();
        assert!(r.starts_with("# packbench "));
        assert!(r.contains("# seed: 7\n# config-hash: "));
        assert!(r.contains("# falkenauer-k: 2\n# lb-mode: continuous\n"));
        assert!(r.ends_with("# portfolio: FF,BF\n"));
    }
}
