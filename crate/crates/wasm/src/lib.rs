//! Browser bindings: pack a typed-in instance, compare the portfolio on a
//! generated one, and run a small evolution. Every call returns JSON.

use packbench::evolver::{evolve_winners, EvolverConfig};
use packbench::heuristics::{instantiate, Heuristic, HeuristicId};
use packbench::instance::{self, Instance, Source};
use packbench::metrics::{aeb, falkenauer, LbMode, PortfolioResult};
use packbench::simulator::{CandidatePolicy, Engine};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Packing {
    heuristic: String,
    bins_used: usize,
    lower_bound: f64,
    aeb: f64,
    falkenauer: f64,
    bins: Vec<Vec<u64>>,
}

#[derive(Serialize)]
struct Comparison {
    capacity: u64,
    items: Vec<u64>,
    winners: Vec<String>,
    packings: Vec<Packing>,
}

#[derive(Serialize)]
struct Evolved {
    target: String,
    runs: usize,
    summary: String,
    instances: Vec<EvolvedRow>,
}

#[derive(Serialize)]
struct EvolvedRow {
    id: String,
    generation: usize,
    items: Vec<u64>,
    bins: Vec<(String, usize)>,
}

fn err(e: impl ToString) -> JsError {
    JsError::new(&e.to_string())
}

fn policy(candidates: &str) -> Result<CandidatePolicy, JsError> {
    if candidates.is_empty() {
        return Ok(CandidatePolicy::default());
    }
    candidates.parse().map_err(err)
}

fn packing(engine: &mut Engine, inst: &Instance, h: &Heuristic) -> Result<Packing, JsError> {
    let sol = engine.pack(inst, h).map_err(err)?;
    Ok(Packing {
        heuristic: h.id.name().to_string(),
        bins_used: sol.bins_used,
        lower_bound: inst.lower_bound().value(),
        aeb: aeb(&sol, inst, LbMode::Continuous),
        falkenauer: falkenauer(&sol, inst, 2.0).map_err(err)?,
        bins: sol.bins.into_iter().map(|b| b.items).collect(),
    })
}

fn json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(err)
}

/// Heuristic ids usable in the other calls.
#[wasm_bindgen]
pub fn heuristics() -> String {
    let names: Vec<&str> = HeuristicId::available().iter().map(|h| h.name()).collect();
    names.join(",")
}

/// Packs whitespace or comma separated sizes with one heuristic.
#[wasm_bindgen]
pub fn pack(items: &str, capacity: u32, heuristic: &str, candidates: &str) -> Result<String, JsError> {
    let sizes = items
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| err(format!("bad item size `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let inst = Instance::new("input", capacity.into(), sizes, Source::Generated).map_err(err)?;
    let id: HeuristicId = heuristic.parse().map_err(err)?;
    let h = Heuristic::new(id).map_err(err)?;
    json(&packing(&mut Engine::new(policy(candidates)?), &inst, &h)?)
}

/// Generates an instance (`uniform`: sizes 20..100 in bins of 150;
/// `weibull`: Weibull(3, 45) in bins of 100) and packs it with every heuristic.
#[wasm_bindgen]
pub fn compare(kind: &str, n: usize, seed: u32, candidates: &str) -> Result<String, JsError> {
    let inst = match kind {
        "uniform" => instance::generate_uniform(n, 20, 100, 150, seed.into()),
        "weibull" => instance::generate_weibull(n, 3.0, 45.0, 100, seed.into()),
        other => return Err(err(format!("unknown instance kind `{other}`"))),
    }
    .map_err(err)?;
    let mut engine = Engine::new(policy(candidates)?);
    let packings = instantiate(&HeuristicId::available())
        .map_err(err)?
        .iter()
        .map(|h| packing(&mut engine, &inst, h))
        .collect::<Result<Vec<_>, _>>()?;
    let bins = packings
        .iter()
        .zip(HeuristicId::available())
        .map(|(p, id)| (id, p.bins_used))
        .collect();
    let result = PortfolioResult::new("input", bins).map_err(err)?;
    json(&Comparison {
        capacity: inst.capacity,
        winners: result.winners.iter().map(|h| h.name().to_string()).collect(),
        items: inst.items,
        packings,
    })
}

/// Evolves up to `wanted` instances won outright by `target` (small budget).
#[wasm_bindgen]
pub fn evolve(target: &str, wanted: usize, generations: usize, seed: u32) -> Result<String, JsError> {
    let id: HeuristicId = target.parse().map_err(err)?;
    let mut cfg = EvolverConfig::new(id);
    cfg.instances_wanted = wanted.clamp(1, 5);
    cfg.max_generations = generations.clamp(1, 500);
    cfg.max_runs = 8;
    cfg.seed = seed.into();
    let set = evolve_winners(&cfg).map_err(err)?;
    let instances = set
        .instances
        .iter()
        .map(|e| EvolvedRow {
            id: e.instance.id.clone(),
            generation: e.generation,
            items: e.instance.items.clone(),
            bins: e.result.bins.iter().map(|(h, b)| (h.name().to_string(), *b)).collect(),
        })
        .collect();
    json(&Evolved {
        target: id.name().to_string(),
        runs: set.runs,
        summary: set.report(),
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_returns_bins() {
        let out = pack("5 6 5", 10, "FF", "").unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["bins_used"], 2);
        assert_eq!(v["bins"][0], serde_json::json!([5, 5]));
    }

    #[test]
    fn compare_lists_every_heuristic() {
        let out = compare("uniform", 60, 3, "no-fit").unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["packings"].as_array().unwrap().len(), HeuristicId::available().len());
        assert!(!v["winners"].as_array().unwrap().is_empty());
    }

    #[test]
    fn evolve_finds_ff_wins() {
        let out = evolve("FF", 2, 100, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["instances"].as_array().unwrap().len(), 2);
    }
}
