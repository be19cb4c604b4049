//! Excess bins, Falkenauer fitness, wins and the generalisation profile.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::{Heuristic, HeuristicId};
use crate::instance::{Dataset, Instance, LowerBound};
use crate::simulator::{CandidatePolicy, Engine, Solution};

/// Baseline used by the excess-bins metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LbMode {
    /// `Σ size / C` as is.
    #[default]
    Continuous,
    /// `⌈Σ size / C⌉`.
    Ceiled,
}

impl FromStr for LbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Self::Continuous),
            "ceil" | "ceiled" => Ok(Self::Ceiled),
            other => Err(Error::Config(format!("unknown lower-bound mode `{other}`"))),
        }
    }
}

impl fmt::Display for LbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Continuous => "continuous",
            Self::Ceiled => "ceil",
        })
    }
}

/// Percentage of bins above the lower bound.
pub fn excess_bins(bins_used: usize, lb: LowerBound, mode: LbMode) -> f64 {
    match mode {
        // 100·(b − V/C)/(V/C) = 100·(b·C − V)/V, evaluated from integers
        LbMode::Continuous => {
            let num = bins_used as f64 * lb.capacity as f64 - lb.volume as f64;
            100.0 * num / lb.volume as f64
        }
        LbMode::Ceiled => {
            let l = lb.ceil() as f64;
            100.0 * (bins_used as f64 - l) / l
        }
    }
}

pub fn aeb(solution: &Solution, inst: &Instance, mode: LbMode) -> f64 {
    excess_bins(solution.bins_used, inst.lower_bound(), mode)
}

/// Mean over used bins of `(fill / C)^k`.
pub fn falkenauer_fills(fills: &[u64], capacity: u64, k: f64) -> Result<f64> {
    if k.is_nan() || k <= 0.0 || k.is_infinite() {
        return Err(Error::Precondition(format!(
            "Falkenauer exponent must be positive, got {k}"
        )));
    }
    let used: Vec<u64> = fills.iter().copied().filter(|&f| f > 0).collect();
    if used.is_empty() {
        return Err(Error::Precondition("Falkenauer fitness of an empty packing".into()));
    }
    let c = capacity as f64;
    let integral = k.fract() == 0.0 && k <= i32::MAX as f64;
    let terms = used.iter().map(|&f| {
        let e = f as f64 / c;
        if integral {
            e.powi(k as i32)
        } else {
            e.powf(k)
        }
    });
    Ok(neumaier_sum(terms) / used.len() as f64)
}

pub fn falkenauer(solution: &Solution, inst: &Instance, k: f64) -> Result<f64> {
    let fills: Vec<u64> = solution.fills().collect();
    falkenauer_fills(&fills, inst.capacity, k)
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    neumaier_sum(xs.iter().copied()) / xs.len() as f64
}

/// Linearly interpolated quantile of `xs` (q in `[0, 1]`).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Minimum, quartiles and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number(xs: &[f64]) -> FiveNumber {
    FiveNumber {
        min: quantile(xs, 0.0),
        q1: quantile(xs, 0.25),
        median: quantile(xs, 0.5),
        q3: quantile(xs, 0.75),
        max: quantile(xs, 1.0),
    }
}

/// Bins used by each portfolio member on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioResult {
    pub instance_id: String,
    pub bins: Vec<(HeuristicId, usize)>,
    pub winners: Vec<HeuristicId>,
}

impl PortfolioResult {
    pub fn new(instance_id: impl Into<String>, bins: Vec<(HeuristicId, usize)>) -> Result<Self> {
        let best = bins
            .iter()
            .map(|&(_, b)| b)
            .min()
            .ok_or_else(|| Error::Precondition("empty portfolio".into()))?;
        let winners = bins.iter().filter(|&&(_, b)| b == best).map(|&(h, _)| h).collect();
        Ok(Self {
            instance_id: instance_id.into(),
            bins,
            winners,
        })
    }

    pub fn portfolio(&self) -> Vec<HeuristicId> {
        self.bins.iter().map(|&(h, _)| h).collect()
    }

    pub fn bins_of(&self, h: HeuristicId) -> Option<usize> {
        self.bins.iter().find(|&&(id, _)| id == h).map(|&(_, b)| b)
    }

    pub fn best(&self) -> usize {
        self.bins.iter().map(|&(_, b)| b).min().unwrap_or(0)
    }

    pub fn is_winner(&self, h: HeuristicId) -> bool {
        self.winners.contains(&h)
    }

    /// True when `h` alone attains the minimum.
    pub fn is_strict_win(&self, h: HeuristicId) -> bool {
        self.winners == [h]
    }
}

fn common_portfolio(results: &[PortfolioResult]) -> Result<Vec<HeuristicId>> {
    let first = results
        .first()
        .ok_or_else(|| Error::Precondition("no results".into()))?
        .portfolio();
    for r in results {
        let mut a = r.portfolio();
        let mut b = first.clone();
        a.sort();
        b.sort();
        if a != b {
            return Err(Error::Precondition(format!(
                "instance `{}` was evaluated on a different portfolio",
                r.instance_id
            )));
        }
    }
    Ok(first)
}

/// Fraction of instances on which each heuristic attains the minimum
/// (ties count for everyone tied).
pub fn wins(results: &[PortfolioResult]) -> Result<Vec<(HeuristicId, f64)>> {
    let portfolio = common_portfolio(results)?;
    let n = results.len() as f64;
    Ok(portfolio
        .into_iter()
        .map(|h| {
            let won = results.iter().filter(|r| r.is_winner(h)).count();
            (h, won as f64 / n)
        })
        .collect())
}

pub const DEFAULT_THRESHOLDS: [f64; 4] = [10.0, 5.0, 2.0, 1.0];

/// One row of the generalisation table; `None` when the heuristic won every
/// instance and the row is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub heuristic: HeuristicId,
    pub not_won: usize,
    pub fractions: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub thresholds: Vec<f64>,
    pub rows: Vec<ProfileRow>,
}

/// For each heuristic: among instances it did not win, the fraction within
/// `x` percent excess bins of the winning value, for every threshold `x`.
pub fn generalisation_profile(results: &[PortfolioResult], thresholds: &[f64]) -> Result<ProfileTable> {
    let portfolio = common_portfolio(results)?;
    let rows = portfolio
        .into_iter()
        .map(|h| {
            let gaps: Vec<(usize, usize)> = results
                .iter()
                .filter(|r| !r.is_winner(h))
                .map(|r| (r.bins_of(h).unwrap_or(0), r.best()))
                .collect();
            let fractions = (!gaps.is_empty()).then(|| {
                thresholds
                    .iter()
                    .map(|&x| {
                        // 100·(b − w)/w ≤ x  ⇔  100·(b − w) ≤ x·w, exact for integral x
                        let within = gaps
                            .iter()
                            .filter(|&&(b, w)| 100.0 * (b as f64 - w as f64) <= x * w as f64)
                            .count();
                        within as f64 / gaps.len() as f64
                    })
                    .collect()
            });
            ProfileRow {
                heuristic: h,
                not_won: gaps.len(),
                fractions,
            }
        })
        .collect();
    Ok(ProfileTable {
        thresholds: thresholds.to_vec(),
        rows,
    })
}

/// Metric settings shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub falkenauer_k: f64,
    pub lb_mode: LbMode,
    pub candidates: CandidatePolicy,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            falkenauer_k: 2.0,
            lb_mode: LbMode::Continuous,
            candidates: CandidatePolicy::default(),
        }
    }
}

/// Per-instance measurements of one heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceScore {
    pub bins_used: usize,
    pub aeb: f64,
    pub falkenauer: f64,
}

/// Every heuristic on every instance of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEvaluation {
    pub dataset: String,
    pub heuristics: Vec<HeuristicId>,
    /// `scores[i][h]`: instance `i`, heuristic position `h`.
    pub scores: Vec<Vec<InstanceScore>>,
    pub results: Vec<PortfolioResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorecardRow {
    pub heuristic: HeuristicId,
    pub mean_aeb: f64,
    pub mean_falkenauer: f64,
    pub win_fraction: f64,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetScorecard {
    pub dataset: String,
    pub rows: Vec<ScorecardRow>,
}

pub fn score_instance(
    engine: &mut Engine,
    inst: &Instance,
    h: &Heuristic,
    cfg: &MetricConfig,
) -> Result<InstanceScore> {
    let fills = engine.fills(inst, h)?;
    Ok(InstanceScore {
        bins_used: fills.len(),
        aeb: excess_bins(fills.len(), inst.lower_bound(), cfg.lb_mode),
        falkenauer: falkenauer_fills(&fills, inst.capacity, cfg.falkenauer_k)?,
    })
}

/// Packs every instance with every heuristic. Instances are evaluated in
/// parallel; output order follows the dataset.
pub fn evaluate_dataset(dataset: &Dataset, heuristics: &[Heuristic], cfg: &MetricConfig) -> Result<DatasetEvaluation> {
    if heuristics.is_empty() {
        return Err(Error::Config("empty portfolio".into()));
    }
    let per_instance: Vec<Result<(Vec<InstanceScore>, PortfolioResult)>> = dataset
        .instances
        .par_iter()
        .map_init(
            || Engine::new(cfg.candidates),
            |engine, inst| {
                let scores = heuristics
                    .iter()
                    .map(|h| score_instance(engine, inst, h, cfg))
                    .collect::<Result<Vec<_>>>()?;
                let bins = heuristics
                    .iter()
                    .zip(&scores)
                    .map(|(h, s)| (h.id, s.bins_used))
                    .collect();
                Ok((scores, PortfolioResult::new(inst.id.clone(), bins)?))
            },
        )
        .collect();
    let mut scores = Vec::with_capacity(per_instance.len());
    let mut results = Vec::with_capacity(per_instance.len());
    for r in per_instance {
        let (s, p) = r?;
        scores.push(s);
        results.push(p);
    }
    Ok(DatasetEvaluation {
        dataset: dataset.name.clone(),
        heuristics: heuristics.iter().map(|h| h.id).collect(),
        scores,
        results,
    })
}

impl DatasetEvaluation {
    pub fn scorecard(&self) -> Result<DatasetScorecard> {
        let win = wins(&self.results)?;
        let rows = self
            .heuristics
            .iter()
            .enumerate()
            .map(|(k, &h)| {
                let aebs: Vec<f64> = self.scores.iter().map(|s| s[k].aeb).collect();
                let falk: Vec<f64> = self.scores.iter().map(|s| s[k].falkenauer).collect();
                ScorecardRow {
                    heuristic: h,
                    mean_aeb: mean(&aebs),
                    mean_falkenauer: mean(&falk),
                    win_fraction: win[k].1,
                    instances: aebs.len(),
                }
            })
            .collect();
        Ok(DatasetScorecard {
            dataset: self.dataset.clone(),
            rows,
        })
    }
}

/// Heuristics ranked by summed mean excess bins across datasets, ascending.
pub fn summed_aeb_ranking(cards: &[DatasetScorecard]) -> Vec<(HeuristicId, f64)> {
    let mut order: Vec<HeuristicId> = Vec::new();
    for card in cards {
        for row in &card.rows {
            if !order.contains(&row.heuristic) {
                order.push(row.heuristic);
            }
        }
    }
    let mut ranking: Vec<(HeuristicId, f64)> = order
        .into_iter()
        .map(|h| {
            let total = neumaier_sum(
                cards
                    .iter()
                    .flat_map(|c| c.rows.iter().filter(move |r| r.heuristic == h).map(|r| r.mean_aeb)),
            );
            (h, total)
        })
        .collect();
    ranking.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranking
}
