//! Budgeted parameter search for the evolved heuristics.
//!
//! Spaces with a small integer grid are enumerated. Otherwise 70% of the
//! budget goes to uniform samples and the rest to coordinate steps around the
//! incumbent. The objective is mean excess bins on a training set.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::{default_params, Heuristic, HeuristicId, ParamKind, ParamSpace, ParameterVector};
use crate::instance::{generate_uniform, generate_weibull, Dataset};
use crate::metrics::{evaluate_dataset, excess_bins, mean, MetricConfig};
use crate::rng::{derive_seed, Stream};
use crate::simulator::Engine;

pub const RANDOM_FRACTION: f64 = 0.7;

/// The space searched for `id`. Classical heuristics have nothing to tune.
pub fn tuning_space(id: HeuristicId) -> Result<ParamSpace> {
    if id.is_classical() {
        return Err(Error::Config(format!("{id} has no parameters to tune")));
    }
    Ok(ParamSpace::of(id))
}

/// Regenerated training distribution of each evolved heuristic: OR1-style
/// uniform instances for the FunSearch pair, Weibull(3, 45) for the rest.
pub fn training_set(id: HeuristicId, instances: usize, weibull_items: usize, seed: u64) -> Result<Dataset> {
    tuning_space(id)?;
    let mut out = Vec::with_capacity(instances);
    for k in 0..instances {
        let s = derive_seed(seed, &[k as u64]);
        let mut inst = match id {
            HeuristicId::Fs1 | HeuristicId::Fs2 => generate_uniform(120, 20, 100, 150, s)?,
            _ => generate_weibull(weibull_items, 3.0, 45.0, 100, s)?,
        };
        inst.id = format!("train_{}_{k:02}", id.name());
        out.push(inst);
    }
    Dataset::new(format!("train_{}", id.name()), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Enumerate,
    Random,
    Local,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Enumerate => "enumerate",
            Self::Random => "random",
            Self::Local => "local",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub eval: usize,
    pub phase: Phase,
    pub params: Vec<f64>,
    pub train_aeb: f64,
    pub incumbent_aeb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningReport {
    pub heuristic: HeuristicId,
    pub method: &'static str,
    pub log: Vec<LogEntry>,
    pub best: ParameterVector,
    pub best_aeb: f64,
    pub default_aeb: f64,
}

impl TuningReport {
    /// The search found a point strictly better than the published constants.
    pub fn improved(&self) -> bool {
        self.best_aeb < self.default_aeb
    }

    pub fn log_csv(&self) -> String {
        let names: Vec<String> = ParamSpace::of(self.heuristic)
            .defs
            .into_iter()
            .map(|d| d.name)
            .collect();
        let mut out = format!("eval,phase,{},train_aeb,incumbent_aeb\n", names.join(","));
        for e in &self.log {
            let params: Vec<String> = e.params.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6}\n",
                e.eval,
                e.phase.as_str(),
                params.join(","),
                e.train_aeb,
                e.incumbent_aeb
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneConfig {
    pub budget: usize,
    pub seed: u64,
    pub metrics: MetricConfig,
}

/// Mean excess bins of `id` with `values` over `train`.
pub fn objective(id: HeuristicId, values: &[f64], train: &Dataset, metrics: &MetricConfig) -> Result<f64> {
    let h = Heuristic::with_params(id, values.to_vec())?;
    let mut engine = Engine::new(metrics.candidates);
    let mut aebs = Vec::with_capacity(train.instances.len());
    for inst in &train.instances {
        aebs.push(excess_bins(
            engine.bins_used(inst, &h)?,
            inst.lower_bound(),
            metrics.lb_mode,
        ));
    }
    Ok(mean(&aebs))
}

fn sample(space: &ParamSpace, rng: &mut Stream) -> Vec<f64> {
    let mut v: Vec<f64> = space
        .defs
        .iter()
        .map(|d| match d.kind {
            ParamKind::Integer => rng.range_i64(d.lo as i64, d.hi as i64) as f64,
            ParamKind::Real => rng.uniform(d.lo, d.hi),
        })
        .collect();
    if let Some((a, b)) = space.increasing {
        // distinct integers via a partial shuffle of the range, then sorted
        let lo = space.defs[a].lo as i64;
        let mut pool: Vec<i64> = (lo..=space.defs[a].hi as i64).collect();
        let k = b - a;
        for i in 0..k {
            let j = i + rng.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut picked = pool[..k].to_vec();
        picked.sort_unstable();
        for (slot, x) in v[a..b].iter_mut().zip(picked) {
            *slot = x as f64;
        }
    }
    v
}

fn enumerate(space: &ParamSpace) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for d in &space.defs {
        let mut next = Vec::new();
        for p in &points {
            for x in d.lo as i64..=d.hi as i64 {
                let mut q: Vec<f64> = p.clone();
                q.push(x as f64);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

struct Search<'a> {
    id: HeuristicId,
    train: &'a Dataset,
    metrics: MetricConfig,
    log: Vec<LogEntry>,
    best: Vec<f64>,
    best_aeb: f64,
}

impl Search<'_> {
    /// Evaluates a batch in parallel and folds it into the log in order.
    fn run(&mut self, phase: Phase, points: Vec<Vec<f64>>) -> Result<()> {
        let scores: Vec<Result<f64>> = points
            .par_iter()
            .map(|p| objective(self.id, p, self.train, &self.metrics))
            .collect();
        for (p, s) in points.into_iter().zip(scores) {
            let aeb = s?;
            if aeb < self.best_aeb {
                self.best_aeb = aeb;
                self.best = p.clone();
            }
            self.log.push(LogEntry {
                eval: self.log.len() + 1,
                phase,
                params: p,
                train_aeb: aeb,
                incumbent_aeb: self.best_aeb,
            });
        }
        Ok(())
    }
}

fn neighbour(space: &ParamSpace, base: &[f64], j: usize, step: f64) -> Option<Vec<f64>> {
    let d = &space.defs[j];
    let mut v = base.to_vec();
    let x = (base[j] + step).clamp(d.lo, d.hi);
    v[j] = if d.kind == ParamKind::Integer { x.round() } else { x };
    (v[j] != base[j] && space.check(&v).is_ok()).then_some(v)
}

/// Minimises mean excess bins over `train` within `cfg.budget` evaluations.
pub fn tune(id: HeuristicId, train: &Dataset, cfg: &TuneConfig) -> Result<TuningReport> {
    let space = tuning_space(id)?;
    let defaults = default_params(id)?;
    if train.instances.is_empty() {
        return Err(Error::Precondition("training set is empty".into()));
    }
    if cfg.budget == 0 {
        return Err(Error::Precondition("budget must be at least 1".into()));
    }
    let default_aeb = objective(id, defaults.values(), train, &cfg.metrics)?;
    let mut search = Search {
        id,
        train,
        metrics: cfg.metrics,
        log: Vec::new(),
        best: Vec::new(),
        best_aeb: f64::INFINITY,
    };
    let grid = space
        .cardinality()
        .filter(|&c| space.enumerable && c as usize <= cfg.budget);
    let method = if grid.is_some() {
        search.run(Phase::Enumerate, enumerate(&space))?;
        "enumeration"
    } else {
        let mut rng = Stream::new(cfg.seed);
        let n_random = ((cfg.budget as f64 * RANDOM_FRACTION).ceil() as usize).clamp(1, cfg.budget);
        let points = (0..n_random).map(|_| sample(&space, &mut rng)).collect();
        search.run(Phase::Random, points)?;
        local_search(&space, &mut search, &mut rng, cfg.budget)?;
        "random+local"
    };
    Ok(TuningReport {
        heuristic: id,
        method,
        best: ParameterVector::new(id, search.best)?,
        best_aeb: search.best_aeb,
        default_aeb,
        log: search.log,
    })
}

fn local_search(space: &ParamSpace, search: &mut Search, rng: &mut Stream, budget: usize) -> Result<()> {
    let mut steps: Vec<f64> = space
        .defs
        .iter()
        .map(|d| match d.kind {
            ParamKind::Integer => ((d.hi - d.lo) * 0.1).round().max(1.0),
            ParamKind::Real => (d.hi - d.lo) * 0.1,
        })
        .collect();
    let floor: Vec<f64> = space
        .defs
        .iter()
        .map(|d| match d.kind {
            ParamKind::Integer => 1.0,
            ParamKind::Real => (d.hi - d.lo) * 1e-6,
        })
        .collect();
    while search.log.len() < budget {
        let centre = search.best.clone();
        let before = search.best_aeb;
        let mut moves = Vec::new();
        for (j, step) in steps.iter().enumerate() {
            for sign in [1.0, -1.0] {
                if let Some(v) = neighbour(space, &centre, j, sign * step) {
                    moves.push(v);
                }
            }
        }
        moves.truncate(budget - search.log.len());
        search.run(Phase::Local, moves)?;
        if search.best_aeb < before {
            continue;
        }
        let at_floor = steps.iter().zip(&floor).all(|(s, f)| s <= f);
        if at_floor {
            // converged: spend what is left on fresh samples
            let rest = budget - search.log.len();
            let points = (0..rest).map(|_| sample(space, rng)).collect();
            search.run(Phase::Random, points)?;
            break;
        }
        for (s, f) in steps.iter_mut().zip(&floor) {
            *s = (*s / 2.0).max(*f);
        }
    }
    Ok(())
}

/// Default and tuned excess bins of one heuristic on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub dataset: String,
    pub heuristic: HeuristicId,
    pub default_aeb: f64,
    pub tuned_aeb: f64,
}

impl ComparisonRow {
    pub fn delta(&self) -> f64 {
        self.tuned_aeb - self.default_aeb
    }
}

pub fn compare(tuned: &Heuristic, datasets: &[Dataset], metrics: &MetricConfig) -> Result<Vec<ComparisonRow>> {
    let default = Heuristic::new(tuned.id)?;
    datasets
        .iter()
        .map(|ds| {
            let ev = evaluate_dataset(ds, &[default.clone(), tuned.clone()], metrics)?;
            let card = ev.scorecard()?;
            Ok(ComparisonRow {
                dataset: ds.name.clone(),
                heuristic: tuned.id,
                default_aeb: card.rows[0].mean_aeb,
                tuned_aeb: card.rows[1].mean_aeb,
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("dataset,heuristic,untuned_aeb,tuned_aeb,delta\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.4},{:.4},{:.4}\n",
            r.dataset,
            r.heuristic,
            r.default_aeb,
            r.tuned_aeb,
            r.delta()
        ));
    }
    out
}

/// Mean percentage gain in AEB over the datasets (positive means the tuned
/// heuristic packs better) and the percentage of datasets that improved.
pub fn summarize(rows: &[ComparisonRow]) -> (f64, f64) {
    if rows.is_empty() {
        return (0.0, 0.0);
    }
    let gains: Vec<f64> = rows
        .iter()
        .map(|r| {
            if r.default_aeb == 0.0 {
                0.0
            } else {
                100.0 * (r.default_aeb - r.tuned_aeb) / r.default_aeb
            }
        })
        .collect();
    let improved = rows.iter().filter(|r| r.tuned_aeb < r.default_aeb).count();
    (mean(&gains), 100.0 * improved as f64 / rows.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(budget: usize) -> TuneConfig {
        TuneConfig {
            budget,
            seed: 3,
            metrics: MetricConfig::default(),
        }
    }

    #[test]
    fn spaces() {
        assert!(tuning_space(HeuristicId::Bf).is_err());
        let fsw = tuning_space(HeuristicId::Fsw).unwrap();
        assert_eq!(fsw.dim(), 5);
        assert!(fsw
            .defs
            .iter()
            .all(|d| d.kind == ParamKind::Integer && d.lo == 1.0 && d.hi == 8.0));
        let fs2 = tuning_space(HeuristicId::Fs2).unwrap();
        assert_eq!((fs2.defs[0].lo, fs2.defs[0].hi), (50.0, 10_000.0));
        assert!(tuning_space(HeuristicId::Eoc).unwrap().enumerable);
        assert_eq!(enumerate(&ParamSpace::of(HeuristicId::Eoc)).len(), 100);
    }

    #[test]
    fn samples_stay_inside() {
        let mut rng = Stream::new(1);
        for id in [HeuristicId::Fs1, HeuristicId::Fs2, HeuristicId::Fsw, HeuristicId::Eoh] {
            let space = ParamSpace::of(id);
            for _ in 0..200 {
                space.check(&sample(&space, &mut rng)).unwrap();
            }
        }
    }

    #[test]
    fn budget_one_returns_the_sample() {
        let train = training_set(HeuristicId::Fs2, 2, 200, 1).unwrap();
        let r = tune(HeuristicId::Fs2, &train, &cfg(1)).unwrap();
        assert_eq!(r.log.len(), 1);
        assert_eq!(r.best.values(), &r.log[0].params[..]);
    }

    #[test]
    fn incumbent_never_worsens() {
        let train = training_set(HeuristicId::Fs1, 2, 200, 1).unwrap();
        let r = tune(HeuristicId::Fs1, &train, &cfg(40)).unwrap();
        assert_eq!(r.log.len(), 40);
        assert!(r.log.windows(2).all(|w| w[1].incumbent_aeb <= w[0].incumbent_aeb));
        let space = ParamSpace::of(HeuristicId::Fs1);
        assert!(r.log.iter().all(|e| space.check(&e.params).is_ok()));
        assert_eq!(r, tune(HeuristicId::Fs1, &train, &cfg(40)).unwrap());
    }

    #[test]
    fn summary_signs() {
        let row = |d, t| ComparisonRow {
            dataset: "x".into(),
            heuristic: HeuristicId::Fs2,
            default_aeb: d,
            tuned_aeb: t,
        };
        let (gain, share) = summarize(&[row(10.0, 9.0), row(4.0, 5.0)]);
        assert!((gain - (10.0 - 25.0) / 2.0).abs() < 1e-12);
        assert_eq!(share, 50.0);
    }

    #[test]
    fn eoc_is_not_implemented() {
        let train = training_set(HeuristicId::Eoc, 1, 50, 1).unwrap();
        assert!(matches!(
            tune(HeuristicId::Eoc, &train, &cfg(100)),
            Err(Error::NotImplemented(_))
        ));
    }
}
