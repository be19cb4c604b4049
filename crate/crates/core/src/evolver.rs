//! Evolution of instances that one heuristic wins outright.
//!
//! The genome is the item sequence. Each run is a mutation-only generational
//! EA with tournament selection and elitism, stopped as soon as any member of
//! the population is a strict bins win for the target.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::{Heuristic, HeuristicId};
use crate::instance::{Instance, Source};
use crate::metrics::{falkenauer_fills, PortfolioResult};
use crate::rng::{derive_seed, Stream};
use crate::simulator::{CandidatePolicy, Engine};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolverConfig {
    pub target: HeuristicId,
    pub portfolio: Vec<HeuristicId>,
    pub n_items: usize,
    pub capacity: u64,
    pub item_lo: u64,
    pub item_hi: u64,
    pub population: usize,
    pub tournament: usize,
    pub elitism: usize,
    pub max_generations: usize,
    /// Probability that a child gets one swap of two positions.
    pub swap_rate: f64,
    /// Probability that a child gets one item resampled.
    pub resample_rate: f64,
    pub seed: u64,
    pub instances_wanted: usize,
    /// Number of independent runs before giving up.
    pub max_runs: usize,
    pub falkenauer_k: f64,
    pub candidates: CandidatePolicy,
}

impl EvolverConfig {
    /// Defaults for `target` against every other available heuristic.
    pub fn new(target: HeuristicId) -> Self {
        Self {
            target,
            portfolio: HeuristicId::available(),
            n_items: 120,
            capacity: 150,
            item_lo: 20,
            item_hi: 100,
            population: 20,
            tournament: 2,
            elitism: 1,
            max_generations: 500,
            swap_rate: 0.8,
            resample_rate: 0.2,
            seed: 0,
            instances_wanted: 100,
            max_runs: 200,
            falkenauer_k: 2.0,
            candidates: CandidatePolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !self.portfolio.contains(&self.target) {
            return bad(format!("target {} is not in the portfolio", self.target));
        }
        if self.portfolio.len() < 2 {
            return bad("portfolio needs at least two heuristics".into());
        }
        let mut seen = HashSet::new();
        if !self.portfolio.iter().all(|h| seen.insert(*h)) {
            return bad("portfolio lists a heuristic twice".into());
        }
        if self.item_lo == 0 || self.item_lo > self.item_hi || self.item_hi > self.capacity {
            return bad(format!(
                "item range [{}, {}] must lie within (0, {}]",
                self.item_lo, self.item_hi, self.capacity
            ));
        }
        if self.n_items == 0 {
            return bad("n_items must be positive".into());
        }
        if self.population == 0 || self.tournament == 0 {
            return bad("population and tournament size must be positive".into());
        }
        if self.elitism >= self.population {
            return bad("elitism must leave room for children".into());
        }
        for (name, p) in [("swap_rate", self.swap_rate), ("resample_rate", self.resample_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Portfolio outcome of one candidate sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub bins: Vec<usize>,
}

struct Evaluator<'a> {
    cfg: &'a EvolverConfig,
    heuristics: Vec<Heuristic>,
    target_pos: usize,
}

impl<'a> Evaluator<'a> {
    fn new(cfg: &'a EvolverConfig) -> Result<Self> {
        cfg.validate()?;
        let heuristics = cfg
            .portfolio
            .iter()
            .map(|&id| Heuristic::new(id))
            .collect::<Result<Vec<_>>>()?;
        let target_pos = cfg.portfolio.iter().position(|&h| h == cfg.target).unwrap();
        Ok(Self {
            cfg,
            heuristics,
            target_pos,
        })
    }

    fn evaluate(&self, engine: &mut Engine, inst: &Instance) -> Result<Evaluation> {
        let mut bins = Vec::with_capacity(self.heuristics.len());
        let mut target = 0.0;
        let mut rival = f64::NEG_INFINITY;
        for (k, h) in self.heuristics.iter().enumerate() {
            let fills = engine.fills(inst, h)?;
            let f = falkenauer_fills(&fills, inst.capacity, self.cfg.falkenauer_k)?;
            bins.push(fills.len());
            if k == self.target_pos {
                target = f;
            } else {
                rival = rival.max(f);
            }
        }
        Ok(Evaluation {
            fitness: target - rival,
            bins,
        })
    }

    fn strict_win(&self, bins: &[usize]) -> bool {
        let t = bins[self.target_pos];
        bins.iter().enumerate().all(|(k, &b)| k == self.target_pos || t < b)
    }

    fn evaluate_all(&self, pop: &[Vec<u64>]) -> Result<Vec<Evaluation>> {
        pop.par_iter()
            .map_init(
                || Engine::new(self.cfg.candidates),
                |engine, items| self.evaluate(engine, &self.instance("candidate", items.clone())),
            )
            .collect()
    }

    fn instance(&self, id: &str, items: Vec<u64>) -> Instance {
        Instance {
            id: id.to_string(),
            capacity: self.cfg.capacity,
            items,
            source: Source::Evolved,
            best_known: None,
        }
    }
}

/// Falkenauer fitness of the target minus the best rival's.
pub fn fitness(candidate: &Instance, cfg: &EvolverConfig) -> Result<f64> {
    candidate.validate()?;
    let eval = Evaluator::new(cfg)?;
    Ok(eval.evaluate(&mut Engine::new(cfg.candidates), candidate)?.fitness)
}

/// A strict-win instance with the bins every portfolio member used.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedInstance {
    pub instance: Instance,
    pub result: PortfolioResult,
    pub run: usize,
    pub generation: usize,
    pub run_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedSet {
    pub target: HeuristicId,
    pub portfolio: Vec<HeuristicId>,
    pub instances: Vec<EvolvedInstance>,
    pub runs: usize,
    pub duplicates: usize,
}

impl EvolvedSet {
    /// No strict win found within the budget.
    pub fn is_hard_target(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn report(&self) -> String {
        if self.is_hard_target() {
            format!(
                "hard target: no instance won outright by {} after {} runs",
                self.target, self.runs
            )
        } else {
            format!(
                "{} instances won outright by {} in {} runs ({} duplicates dropped)",
                self.instances.len(),
                self.target,
                self.runs,
                self.duplicates
            )
        }
    }

    /// Re-packs every stored instance and checks the recorded bins and the
    /// strict-win predicate. Returns the id of the first mismatch.
    pub fn replay(&self, candidates: CandidatePolicy) -> Result<Option<String>> {
        let heuristics = self
            .portfolio
            .iter()
            .map(|&id| Heuristic::new(id))
            .collect::<Result<Vec<_>>>()?;
        let mut engine = Engine::new(candidates);
        for e in &self.instances {
            let mut bins = Vec::with_capacity(heuristics.len());
            for h in &heuristics {
                bins.push((h.id, engine.bins_used(&e.instance, h)?));
            }
            if bins != e.result.bins || !PortfolioResult::new(e.instance.id.clone(), bins)?.is_strict_win(self.target) {
                return Ok(Some(e.instance.id.clone()));
            }
        }
        Ok(None)
    }

    /// Manifest CSV: id, bins per heuristic, generation, run seed.
    pub fn manifest_csv(&self) -> String {
        let mut out = String::from("id");
        for h in &self.portfolio {
            out.push_str(&format!(",bins_{h}"));
        }
        out.push_str(",generations,seed\n");
        for e in &self.instances {
            out.push_str(&e.instance.id);
            for (_, b) in &e.result.bins {
                out.push_str(&format!(",{b}"));
            }
            out.push_str(&format!(",{},{}\n", e.generation, e.run_seed));
        }
        out
    }
}

struct RunOutcome {
    items: Vec<u64>,
    bins: Vec<usize>,
    generation: usize,
}

fn run_once(eval: &Evaluator, run_seed: u64) -> Result<Option<RunOutcome>> {
    let cfg = eval.cfg;
    let mut init = Stream::new(run_seed);
    let mut pop: Vec<Vec<u64>> = (0..cfg.population)
        .map(|_| {
            (0..cfg.n_items)
                .map(|_| init.range_inclusive(cfg.item_lo, cfg.item_hi))
                .collect()
        })
        .collect();
    let mut evals = eval.evaluate_all(&pop)?;
    for generation in 0..=cfg.max_generations {
        if let Some(k) = evals.iter().position(|e| eval.strict_win(&e.bins)) {
            return Ok(Some(RunOutcome {
                items: pop.swap_remove(k),
                bins: evals.swap_remove(k).bins,
                generation,
            }));
        }
        if generation == cfg.max_generations {
            break;
        }
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| evals[b].fitness.total_cmp(&evals[a].fitness).then(a.cmp(&b)));
        let mut next: Vec<Vec<u64>> = order[..cfg.elitism].iter().map(|&k| pop[k].clone()).collect();
        let mut next_evals: Vec<Evaluation> = order[..cfg.elitism].iter().map(|&k| evals[k].clone()).collect();
        let children: Vec<Vec<u64>> = (cfg.elitism..cfg.population)
            .map(|c| {
                let mut rng = Stream::new(derive_seed(run_seed, &[generation as u64, c as u64]));
                let parent = tournament(&mut rng, &evals, cfg.tournament);
                let mut child = pop[parent].clone();
                mutate(&mut rng, &mut child, cfg);
                child
            })
            .collect();
        next_evals.extend(eval.evaluate_all(&children)?);
        next.extend(children);
        pop = next;
        evals = next_evals;
    }
    Ok(None)
}

fn tournament(rng: &mut Stream, evals: &[Evaluation], size: usize) -> usize {
    let mut best = rng.below(evals.len() as u64) as usize;
    for _ in 1..size {
        let k = rng.below(evals.len() as u64) as usize;
        if evals[k].fitness > evals[best].fitness {
            best = k;
        }
    }
    best
}

fn mutate(rng: &mut Stream, items: &mut [u64], cfg: &EvolverConfig) {
    let n = items.len() as u64;
    if rng.chance(cfg.swap_rate) && n > 1 {
        let a = rng.below(n) as usize;
        let b = rng.below(n) as usize;
        items.swap(a, b);
    }
    if rng.chance(cfg.resample_rate) {
        let a = rng.below(n) as usize;
        items[a] = rng.range_inclusive(cfg.item_lo, cfg.item_hi);
    }
}

/// Repeats independent runs until `instances_wanted` distinct strict wins are
/// collected or `max_runs` is spent. Runs are evaluated in parallel batches but
/// consumed in run order, so the result does not depend on the thread count.
pub fn evolve_winners(cfg: &EvolverConfig) -> Result<EvolvedSet> {
    let eval = Evaluator::new(cfg)?;
    let mut set = EvolvedSet {
        target: cfg.target,
        portfolio: cfg.portfolio.clone(),
        instances: Vec::new(),
        runs: 0,
        duplicates: 0,
    };
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let batch = rayon::current_num_threads().max(1);
    let mut run = 0;
    while run < cfg.max_runs && set.instances.len() < cfg.instances_wanted {
        let end = (run + batch).min(cfg.max_runs);
        let outcomes: Vec<Result<Option<RunOutcome>>> = (run..end)
            .into_par_iter()
            .map(|r| run_once(&eval, derive_seed(cfg.seed, &[r as u64])))
            .collect();
        for (r, outcome) in (run..end).zip(outcomes) {
            if set.instances.len() >= cfg.instances_wanted {
                break;
            }
            set.runs = r + 1;
            let Some(o) = outcome? else { continue };
            if !seen.insert(o.items.clone()) {
                set.duplicates += 1;
                continue;
            }
            let id = format!("{}_{:03}", cfg.target.name(), set.instances.len());
            let bins = cfg.portfolio.iter().copied().zip(o.bins).collect();
            set.instances.push(EvolvedInstance {
                result: PortfolioResult::new(id.clone(), bins)?,
                instance: eval.instance(&id, o.items),
                run: r,
                generation: o.generation,
                run_seed: derive_seed(cfg.seed, &[r as u64]),
            });
        }
        run = end;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(target: HeuristicId, portfolio: Vec<HeuristicId>) -> EvolverConfig {
        EvolverConfig {
            portfolio,
            n_items: 12,
            capacity: 10,
            item_lo: 1,
            item_hi: 10,
            instances_wanted: 3,
            max_runs: 20,
            max_generations: 50,
            seed: 7,
            ..EvolverConfig::new(target)
        }
    }

    #[test]
    fn hand_instance_is_ff_win_over_nf() {
        let cfg = small(HeuristicId::Ff, vec![HeuristicId::Ff, HeuristicId::Nf]);
        let eval = Evaluator::new(&cfg).unwrap();
        let inst = Instance::new("x", 10, vec![5, 6, 5], Source::Evolved).unwrap();
        let e = eval.evaluate(&mut Engine::new(cfg.candidates), &inst).unwrap();
        assert_eq!(e.bins, vec![2, 3]);
        assert!(eval.strict_win(&e.bins));
        assert!(e.fitness > 0.0);
    }

    #[test]
    fn identical_packings_have_zero_fitness() {
        let cfg = small(HeuristicId::Ff, vec![HeuristicId::Ff, HeuristicId::Bf]);
        let inst = Instance::new("x", 10, vec![3, 3, 3], Source::Evolved).unwrap();
        assert_eq!(fitness(&inst, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn config_checks() {
        let mut cfg = small(HeuristicId::Ff, vec![HeuristicId::Bf, HeuristicId::Nf]);
        assert!(cfg.validate().is_err());
        cfg.portfolio.push(HeuristicId::Ff);
        assert!(cfg.validate().is_ok());
        cfg.item_hi = 11;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn finds_ff_wins_and_replays() {
        let cfg = small(HeuristicId::Ff, vec![HeuristicId::Ff, HeuristicId::Nf]);
        let set = evolve_winners(&cfg).unwrap();
        assert_eq!(set.instances.len(), 3);
        assert_eq!(set.replay(cfg.candidates).unwrap(), None);
        let again = evolve_winners(&cfg).unwrap();
        assert_eq!(set, again);
    }
}
