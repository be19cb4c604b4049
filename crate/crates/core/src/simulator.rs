//! The online packing engine.
//!
//! The engine owns all bin bookkeeping; heuristics only choose. Bins live in
//! a slot array. Classical rules see the open bins in opening order. Score
//! rules see every slot whose remaining capacity admits the item, in slot
//! order, and the engine packs into the argmax (ties to the lowest slot).
//!
//! Under [`CandidatePolicy::FreshBinsCompete`] the slot array behaves like a
//! row of `n` pre-allocated empty bins, so untouched bins are scored next to
//! partially filled ones. Only the first two trailing untouched slots are
//! offered: any further slot has identical inputs and scores no better than
//! the second under every rule, so it could never win the lowest-index argmax.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heuristics::{argmax, choose_classical, Choice, Heuristic, OpenBin};
use crate::instance::Instance;

/// Which bins a score-based heuristic may choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidatePolicy {
    /// Untouched bins compete with partially filled ones.
    #[default]
    FreshBinsCompete,
    /// A new bin is opened only when no open bin fits.
    NewOnlyWhenNoFit,
}

impl FromStr for CandidatePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" | "skeleton" => Ok(Self::FreshBinsCompete),
            "no-fit" => Ok(Self::NewOnlyWhenNoFit),
            other => Err(Error::Config(format!(
                "unknown candidate policy `{other}` (fresh|no-fit)"
            ))),
        }
    }
}

impl fmt::Display for CandidatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FreshBinsCompete => "fresh",
            Self::NewOnlyWhenNoFit => "no-fit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bin {
    /// Opening-order ordinal.
    pub index: usize,
    pub load: u64,
    pub items: Vec<u64>,
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub instance_id: String,
    pub heuristic_id: String,
    /// Used bins in slot order.
    pub bins: Vec<Bin>,
    pub bins_used: usize,
    /// Position in `bins` of the bin receiving each arriving item.
    pub assignment: Vec<usize>,
}

impl Solution {
    pub fn fills(&self) -> impl Iterator<Item = u64> + '_ {
        self.bins.iter().map(|b| b.load)
    }
}

/// One packing step, for trace output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub step: usize,
    pub item: u64,
    pub bin: usize,
    pub load_after: u64,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("step,item,chosen_bin,load_after\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.step, r.item, r.bin, r.load_after));
    }
    out
}

/// Reusable packing engine. Holds scratch buffers so repeated runs do not
/// reallocate.
#[derive(Debug, Default)]
pub struct Engine {
    policy: CandidatePolicy,
    loads: Vec<u64>,
    opened_at: Vec<Option<usize>>,
    closed: Vec<bool>,
    used: Vec<usize>,
    cand_slot: Vec<usize>,
    cand_rem: Vec<u64>,
    view: Vec<OpenBin>,
    scores: Vec<f64>,
}

impl Engine {
    pub fn new(policy: CandidatePolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn policy(&self) -> CandidatePolicy {
        self.policy
    }

    /// Runs the simulation; `on_step` receives `(step, item, slot)`.
    fn run(&mut self, inst: &Instance, h: &Heuristic, mut on_step: impl FnMut(usize, u64, usize)) -> Result<()> {
        let capacity = inst.capacity;
        let n = inst.items.len();
        self.loads.clear();
        self.opened_at.clear();
        self.closed.clear();
        self.used.clear();
        let mut opened = 0usize;
        let violation = |step: usize, message: String| Error::ContractViolation {
            heuristic: h.id.to_string(),
            step,
            message,
        };

        for (step, &item) in inst.items.iter().enumerate() {
            if item == 0 || item > capacity {
                return Err(Error::Validation {
                    id: inst.id.clone(),
                    message: format!("item {step} of size {item} does not fit capacity {capacity}"),
                });
            }
            let slot = if h.is_score_based() {
                self.cand_slot.clear();
                self.cand_rem.clear();
                for (s, &load) in self.loads.iter().enumerate() {
                    if load + item <= capacity {
                        self.cand_slot.push(s);
                        self.cand_rem.push(capacity - load);
                    }
                }
                match self.policy {
                    CandidatePolicy::FreshBinsCompete => {
                        let untouched = n - self.loads.len();
                        for k in 0..untouched.min(2) {
                            self.cand_slot.push(self.loads.len() + k);
                            self.cand_rem.push(capacity);
                        }
                    }
                    CandidatePolicy::NewOnlyWhenNoFit => {
                        if self.cand_slot.is_empty() {
                            self.cand_slot.push(self.loads.len());
                            self.cand_rem.push(capacity);
                        }
                    }
                }
                h.score(item, &self.cand_rem, capacity, &mut self.scores)?;
                if self.scores.len() != self.cand_rem.len() {
                    return Err(violation(
                        step,
                        format!("{} scores for {} candidates", self.scores.len(), self.cand_rem.len()),
                    ));
                }
                match argmax(&self.scores) {
                    Ok(Some(i)) => self.cand_slot[i],
                    Ok(None) => return Err(violation(step, "no candidate bins".into())),
                    Err(i) => return Err(violation(step, format!("score for candidate {i} is NaN"))),
                }
            } else {
                self.view.clear();
                self.used.clear();
                for (s, &load) in self.loads.iter().enumerate() {
                    if load > 0 && !self.closed[s] {
                        self.used.push(s);
                        self.view.push(OpenBin { load });
                    }
                }
                match choose_classical(h.id, item, &self.view, capacity) {
                    Choice::Existing(i) => *self
                        .used
                        .get(i)
                        .ok_or_else(|| violation(step, format!("chose bin {i} of {} open", self.used.len())))?,
                    Choice::New => {
                        if h.keeps_single_open_bin() {
                            for &s in &self.used {
                                self.closed[s] = true;
                            }
                        }
                        self.loads.len()
                    }
                }
            };

            while self.loads.len() <= slot {
                self.loads.push(0);
                self.opened_at.push(None);
                self.closed.push(false);
            }
            if self.closed[slot] {
                return Err(violation(step, format!("chose closed bin {slot}")));
            }
            if self.loads[slot] + item > capacity {
                return Err(violation(
                    step,
                    format!("item {item} does not fit bin with load {}", self.loads[slot]),
                ));
            }
            if self.opened_at[slot].is_none() {
                self.opened_at[slot] = Some(opened);
                opened += 1;
            }
            self.loads[slot] += item;
            on_step(step, item, slot);
        }
        Ok(())
    }

    /// Number of bins used, without materialising the solution.
    pub fn bins_used(&mut self, inst: &Instance, h: &Heuristic) -> Result<usize> {
        self.run(inst, h, |_, _, _| {})?;
        Ok(self.loads.iter().filter(|&&l| l > 0).count())
    }

    /// Loads of the used bins in slot order.
    pub fn fills(&mut self, inst: &Instance, h: &Heuristic) -> Result<Vec<u64>> {
        self.run(inst, h, |_, _, _| {})?;
        Ok(self.loads.iter().copied().filter(|&l| l > 0).collect())
    }

    pub fn pack(&mut self, inst: &Instance, h: &Heuristic) -> Result<Solution> {
        self.pack_traced(inst, h).map(|(s, _)| s)
    }

    pub fn pack_traced(&mut self, inst: &Instance, h: &Heuristic) -> Result<(Solution, Vec<TraceRow>)> {
        let mut slot_items: Vec<Vec<u64>> = Vec::new();
        let mut slots = Vec::with_capacity(inst.items.len());
        let mut trace = Vec::with_capacity(inst.items.len());
        self.run(inst, h, |step, item, slot| {
            if slot_items.len() <= slot {
                slot_items.resize_with(slot + 1, Vec::new);
            }
            slot_items[slot].push(item);
            slots.push(slot);
            trace.push(TraceRow {
                step,
                item,
                bin: slot,
                load_after: slot_items[slot].iter().sum(),
            });
        })?;

        let mut position = vec![usize::MAX; slot_items.len()];
        let mut bins = Vec::new();
        for (s, items) in slot_items.into_iter().enumerate() {
            if items.is_empty() {
                continue;
            }
            position[s] = bins.len();
            bins.push(Bin {
                index: self.opened_at[s].expect("used slot has an opening ordinal"),
                load: self.loads[s],
                items,
                open: !self.closed[s],
            });
        }
        let assignment: Vec<usize> = slots.iter().map(|&s| position[s]).collect();
        for row in &mut trace {
            row.bin = position[row.bin];
        }
        Ok((
            Solution {
                instance_id: inst.id.clone(),
                heuristic_id: h.id.to_string(),
                bins_used: bins.len(),
                bins,
                assignment,
            },
            trace,
        ))
    }
}

/// Packs `inst` with the default candidate policy.
pub fn pack(inst: &Instance, h: &Heuristic) -> Result<Solution> {
    Engine::new(CandidatePolicy::default()).pack(inst, h)
}

/// Checks every solution invariant against `inst`, returning the first
/// violated one.
pub fn check(solution: &Solution, inst: &Instance) -> Result<(), String> {
    if solution.instance_id != inst.id {
        return Err(format!(
            "solution is for `{}`, instance is `{}`",
            solution.instance_id, inst.id
        ));
    }
    if solution.assignment.len() != inst.items.len() {
        return Err(format!(
            "{} assignments for {} items",
            solution.assignment.len(),
            inst.items.len()
        ));
    }
    let mut rebuilt: Vec<Vec<u64>> = vec![Vec::new(); solution.bins.len()];
    for (step, (&b, &item)) in solution.assignment.iter().zip(&inst.items).enumerate() {
        rebuilt
            .get_mut(b)
            .ok_or_else(|| format!("item {step} assigned to missing bin {b}"))?
            .push(item);
    }
    let mut ordinals = Vec::with_capacity(solution.bins.len());
    for (k, (bin, expected)) in solution.bins.iter().zip(&rebuilt).enumerate() {
        if bin.items != *expected {
            return Err(format!(
                "bin {k} holds {:?}, arrivals put {:?} there",
                bin.items, expected
            ));
        }
        let sum: u64 = bin.items.iter().sum();
        if bin.load != sum {
            return Err(format!("bin {k} load {} != item sum {sum}", bin.load));
        }
        if bin.load > inst.capacity {
            return Err(format!("bin {k} overloaded: {} > {}", bin.load, inst.capacity));
        }
        if bin.items.is_empty() {
            return Err(format!("bin {k} is empty"));
        }
        ordinals.push(bin.index);
    }
    ordinals.sort_unstable();
    if ordinals.iter().enumerate().any(|(i, &o)| i != o) {
        return Err("bin opening ordinals are not a permutation".into());
    }
    if solution.bins_used != solution.bins.iter().filter(|b| !b.items.is_empty()).count() {
        return Err(format!(
            "bins_used {} disagrees with {} non-empty bins",
            solution.bins_used,
            solution.bins.len()
        ));
    }
    Ok(())
}

pub fn verify(solution: &Solution, inst: &Instance) -> bool {
    check(solution, inst).is_ok()
}
