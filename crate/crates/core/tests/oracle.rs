//! Independent oracles: brute-force optimum for tiny instances and naive
//! reimplementations of the classical rules.

use packbench::heuristics::{instantiate, Heuristic, HeuristicId};
use packbench::instance::{Instance, Source};
use packbench::rng::Stream;
use packbench::simulator::{pack, verify};

/// Minimum bins over every set partition of `items` (canonical labelling:
/// item i joins an existing bin or opens bin number `open`).
fn brute_force_opt(items: &[u64], cap: u64) -> usize {
    fn go(items: &[u64], cap: u64, i: usize, loads: &mut Vec<u64>, best: &mut usize) {
        if loads.len() >= *best {
            return;
        }
        if i == items.len() {
            *best = loads.len();
            return;
        }
        for b in 0..loads.len() {
            if loads[b] + items[i] <= cap {
                loads[b] += items[i];
                go(items, cap, i + 1, loads, best);
                loads[b] -= items[i];
            }
        }
        loads.push(items[i]);
        go(items, cap, i + 1, loads, best);
        loads.pop();
    }
    let mut best = items.len() + 1;
    go(items, cap, 0, &mut Vec::new(), &mut best);
    best
}

/// Straight-line versions of the classical rules over (load, open) bins.
fn naive(id: HeuristicId, items: &[u64], cap: u64) -> Vec<usize> {
    let mut loads: Vec<u64> = Vec::new();
    let mut open: Vec<bool> = Vec::new();
    let mut out = Vec::new();
    for &x in items {
        let cands: Vec<usize> = (0..loads.len()).filter(|&b| open[b]).collect();
        let fits = |b: usize| loads[b] + x <= cap;
        let choice = match id {
            HeuristicId::Nf => cands.last().copied().filter(|&b| fits(b)),
            HeuristicId::Ff => cands.iter().copied().find(|&b| fits(b)),
            HeuristicId::Bf => {
                let mut fit: Vec<usize> = cands.iter().copied().filter(|&b| fits(b)).collect();
                fit.sort_by_key(|&b| (std::cmp::Reverse(loads[b]), b));
                fit.first().copied()
            }
            HeuristicId::Wf | HeuristicId::Awf => {
                let mut by_load = cands.clone();
                by_load.sort_by_key(|&b| (loads[b], b));
                if id == HeuristicId::Wf {
                    by_load.first().copied().filter(|&b| fits(b))
                } else {
                    match (by_load.first(), by_load.get(1)) {
                        (_, Some(&s)) if fits(s) => Some(s),
                        (Some(&f), _) if fits(f) => Some(f),
                        _ => None,
                    }
                }
            }
            _ => unreachable!(),
        };
        let b = match choice {
            Some(b) => b,
            None => {
                if id == HeuristicId::Nf {
                    open.iter_mut().for_each(|o| *o = false);
                }
                loads.push(0);
                open.push(true);
                loads.len() - 1
            }
        };
        loads[b] += x;
        out.push(b);
    }
    out
}

fn random_instance(rng: &mut Stream, id: String, max_n: u64, max_cap: u64) -> Instance {
    let cap = rng.range_inclusive(2, max_cap);
    let n = rng.range_inclusive(1, max_n) as usize;
    let items = (0..n).map(|_| rng.range_inclusive(1, cap)).collect();
    Instance::new(id, cap, items, Source::Generated).unwrap()
}

#[test]
fn brute_force_sanity() {
    assert_eq!(brute_force_opt(&[5, 6, 5], 10), 2);
    assert_eq!(brute_force_opt(&[4, 4, 4, 4, 4, 4], 12), 2);
    assert_eq!(brute_force_opt(&[7, 7, 7], 10), 3);
    assert_eq!(brute_force_opt(&[3, 3, 2, 2, 2, 2, 3, 3], 10), 2);
}

#[test]
fn optimum_sits_between_bound_and_portfolio() {
    let hs = instantiate(&HeuristicId::available()).unwrap();
    let mut rng = Stream::new(2024);
    let mut violations = 0;
    for k in 0..500 {
        let inst = random_instance(&mut rng, format!("tiny{k}"), 8, 20);
        let opt = brute_force_opt(&inst.items, inst.capacity);
        let lb = inst.lower_bound().ceil() as usize;
        let best = hs.iter().map(|h| pack(&inst, h).unwrap().bins_used).min().unwrap();
        if !(lb <= opt && opt <= best) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn classical_rules_match_naive_versions() {
    let mut rng = Stream::new(99);
    for k in 0..400 {
        let inst = random_instance(&mut rng, format!("r{k}"), 200, 150);
        for id in HeuristicId::CLASSICAL {
            let sol = pack(&inst, &Heuristic::new(id).unwrap()).unwrap();
            assert!(verify(&sol, &inst));
            let want = naive(id, &inst.items, inst.capacity);
            let bins = want.iter().max().unwrap() + 1;
            assert_eq!(sol.bins_used, bins, "{id} on {}", inst.id);
            // same grouping of items, compared through opening order
            let mut relabel = std::collections::HashMap::new();
            for (&got, &exp) in sol.assignment.iter().zip(&want) {
                let prev = relabel.insert(exp, got);
                assert!(prev.is_none() || prev == Some(got), "{id} on {}", inst.id);
            }
        }
    }
}
