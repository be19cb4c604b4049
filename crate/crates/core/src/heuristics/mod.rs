//! The ten online bin-choice rules.
//!
//! Classical any-fit rules pick a bin directly from the open-bin view.
//! Score-based rules (the evolved ones, see [`llm`]) return one score per
//! candidate bin and the engine packs into the argmax, lowest index first.

pub mod llm;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeuristicId {
    Nf,
    Ff,
    Bf,
    Wf,
    Awf,
    Fs1,
    Fs2,
    Fsw,
    Eoh,
    Eoc,
}

impl HeuristicId {
    pub const ALL: [HeuristicId; 10] = [
        Self::Nf,
        Self::Ff,
        Self::Bf,
        Self::Wf,
        Self::Awf,
        Self::Fs1,
        Self::Fs2,
        Self::Fsw,
        Self::Eoh,
        Self::Eoc,
    ];

    pub const CLASSICAL: [HeuristicId; 5] = [Self::Nf, Self::Ff, Self::Bf, Self::Wf, Self::Awf];

    pub const EVOLVED: [HeuristicId; 5] = [Self::Fs1, Self::Fs2, Self::Fsw, Self::Eoh, Self::Eoc];

    pub fn name(self) -> &'static str {
        match self {
            Self::Nf => "NF",
            Self::Ff => "FF",
            Self::Bf => "BF",
            Self::Wf => "WF",
            Self::Awf => "AWF",
            Self::Fs1 => "FS1",
            Self::Fs2 => "FS2",
            Self::Fsw => "FSW",
            Self::Eoh => "EoH",
            Self::Eoc => "EoC",
        }
    }

    pub fn is_classical(self) -> bool {
        Self::CLASSICAL.contains(&self)
    }

    /// Whether a scoring body is available for this heuristic.
    pub fn is_available(self) -> bool {
        self.is_classical() || llm::is_transcribed(self)
    }

    /// Every heuristic that can actually be run, in canonical order.
    pub fn available() -> Vec<HeuristicId> {
        Self::ALL.into_iter().filter(|h| h.is_available()).collect()
    }
}

impl fmt::Display for HeuristicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeuristicId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|h| h.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownHeuristic(s.to_string()))
    }
}

/// Parses a comma-separated list of heuristic ids. `all` expands to every
/// available heuristic.
pub fn parse_portfolio(spec: &str) -> Result<Vec<HeuristicId>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(HeuristicId::available());
    }
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let id: HeuristicId = part.parse()?;
        if out.contains(&id) {
            return Err(Error::Config(format!("heuristic {id} listed twice")));
        }
        out.push(id);
    }
    if out.is_empty() {
        return Err(Error::Config("empty portfolio".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Integer,
    Real,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Integer => "integer",
            Self::Real => "real",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDef {
    pub name: String,
    pub kind: ParamKind,
    pub lo: f64,
    pub hi: f64,
}

impl ParamDef {
    fn int(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Integer,
            lo: lo as f64,
            hi: hi as f64,
        }
    }

    fn real(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            kind: ParamKind::Real,
            lo,
            hi,
        }
    }

    pub fn admits(&self, v: f64) -> bool {
        v.is_finite() && v >= self.lo && v <= self.hi && (self.kind == ParamKind::Real || v.fract() == 0.0)
    }
}

/// The admissible parameter space of one heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    pub heuristic: HeuristicId,
    pub defs: Vec<ParamDef>,
    /// Half-open index range of parameters that must be strictly increasing.
    pub increasing: Option<(usize, usize)>,
    /// Small enough to enumerate exhaustively.
    pub enumerable: bool,
}

impl ParamSpace {
    pub fn of(id: HeuristicId) -> Self {
        let (defs, increasing, enumerable) = match id {
            HeuristicId::Nf | HeuristicId::Ff | HeuristicId::Bf | HeuristicId::Wf | HeuristicId::Awf => {
                (Vec::new(), None, true)
            }
            HeuristicId::Fs1 => {
                let mut defs: Vec<ParamDef> = (0..10).map(|j| ParamDef::int(format!("x{j}"), 0, 100)).collect();
                defs.extend((0..10).map(|j| ParamDef::real(format!("y{j}"), 0.0, 10.0)));
                (defs, Some((0, 10)), false)
            }
            HeuristicId::Fs2 => (
                vec![ParamDef::int("penalty", 50, 10_000), ParamDef::int("power", 1, 10)],
                None,
                false,
            ),
            HeuristicId::Fsw => (
                (0..5).map(|j| ParamDef::int(format!("p{j}"), 1, 8)).collect(),
                None,
                false,
            ),
            HeuristicId::Eoh => (
                vec![
                    ParamDef::real("gap_factor", 0.0, 10.0),
                    ParamDef::real("wide_gap_add", 0.0, 10.0),
                    ParamDef::real("narrow_gap_add", 0.0, 10.0),
                    ParamDef::real("exp_add", 0.0, 10.0),
                ],
                None,
                false,
            ),
            HeuristicId::Eoc => (vec![ParamDef::int("a", 1, 10), ParamDef::int("b", 1, 10)], None, true),
        };
        Self {
            heuristic: id,
            defs,
            increasing,
            enumerable,
        }
    }

    pub fn dim(&self) -> usize {
        self.defs.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.defs.iter().position(|d| d.name == name)
    }

    /// Number of points when every parameter is integral, `None` otherwise.
    pub fn cardinality(&self) -> Option<u64> {
        if self.increasing.is_some() {
            return None;
        }
        self.defs.iter().try_fold(1u64, |acc, d| match d.kind {
            ParamKind::Integer => acc.checked_mul((d.hi - d.lo) as u64 + 1),
            ParamKind::Real => None,
        })
    }

    pub fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.defs.len() {
            return Err(Error::Config(format!(
                "{} expects {} parameters, got {}",
                self.heuristic,
                self.defs.len(),
                values.len()
            )));
        }
        for (d, &v) in self.defs.iter().zip(values) {
            if !d.admits(v) {
                return Err(Error::Config(format!(
                    "{}.{} = {v} outside {} range [{}, {}]",
                    self.heuristic, d.name, d.kind, d.lo, d.hi
                )));
            }
        }
        if let Some((a, b)) = self.increasing {
            if values[a..b].windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!(
                    "{} thresholds must be strictly increasing",
                    self.heuristic
                )));
            }
        }
        Ok(())
    }
}

/// A validated assignment of values to a heuristic's parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    id: HeuristicId,
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(id: HeuristicId, values: Vec<f64>) -> Result<Self> {
        ParamSpace::of(id).check(&values)?;
        Ok(Self { id, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        ParamSpace::of(self.id).index_of(name).map(|i| self.values[i])
    }

    /// Applies a `name=value` override, revalidating the whole vector.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let i = ParamSpace::of(self.id)
            .index_of(name)
            .ok_or_else(|| Error::Config(format!("{} has no parameter `{name}`", self.id)))?;
        let mut values = self.values.clone();
        values[i] = value;
        *self = Self::new(self.id, values)?;
        Ok(())
    }

    /// `name=value` pairs separated by spaces, in declaration order.
    pub fn describe(&self) -> String {
        ParamSpace::of(self.id)
            .defs
            .iter()
            .zip(&self.values)
            .map(|(d, v)| format!("{}={v}", d.name))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The published constants of each heuristic.
pub fn default_params(id: HeuristicId) -> Result<ParameterVector> {
    let values = match id {
        HeuristicId::Nf | HeuristicId::Ff | HeuristicId::Bf | HeuristicId::Wf | HeuristicId::Awf => Vec::new(),
        HeuristicId::Fs1 => llm::fs1::DEFAULTS.to_vec(),
        HeuristicId::Fs2 => llm::fs2::DEFAULTS.to_vec(),
        HeuristicId::Fsw => llm::fsw::DEFAULTS.to_vec(),
        HeuristicId::Eoh => llm::eoh::DEFAULTS.to_vec(),
        HeuristicId::Eoc => return Err(Error::NotImplemented(id.to_string())),
    };
    ParameterVector::new(id, values)
}

/// One entry of the open-bin view handed to a classical rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenBin {
    pub load: u64,
}

/// Outcome of a bin-choice rule: a position in the candidate view, or a new bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    Existing(usize),
    New,
}

/// Classical any-fit rules. `bins` lists open bins in opening order.
pub fn choose_classical(id: HeuristicId, item: u64, bins: &[OpenBin], capacity: u64) -> Choice {
    let fits = |b: &OpenBin| b.load + item <= capacity;
    let pick = |i: Option<usize>| i.map_or(Choice::New, Choice::Existing);
    match id {
        HeuristicId::Nf => match bins.last() {
            Some(b) if fits(b) => Choice::Existing(bins.len() - 1),
            _ => Choice::New,
        },
        HeuristicId::Ff => pick(bins.iter().position(fits)),
        HeuristicId::Bf => {
            let mut best: Option<usize> = None;
            for (i, b) in bins.iter().enumerate() {
                if fits(b) && best.is_none_or(|j| b.load > bins[j].load) {
                    best = Some(i);
                }
            }
            pick(best)
        }
        HeuristicId::Wf => {
            let emptiest = emptiest_two(bins).0;
            pick(emptiest.filter(|&i| fits(&bins[i])))
        }
        HeuristicId::Awf => {
            let (first, second) = emptiest_two(bins);
            match (first, second) {
                (_, Some(s)) if fits(&bins[s]) => Choice::Existing(s),
                (Some(f), _) if fits(&bins[f]) => Choice::Existing(f),
                _ => Choice::New,
            }
        }
        _ => panic!("{id} is not a classical heuristic"),
    }
}

/// Positions of the emptiest and second-emptiest bins, ordered by (load, position).
fn emptiest_two(bins: &[OpenBin]) -> (Option<usize>, Option<usize>) {
    let mut first: Option<usize> = None;
    let mut second: Option<usize> = None;
    for (i, b) in bins.iter().enumerate() {
        match first {
            None => first = Some(i),
            Some(f) if b.load < bins[f].load => {
                second = first;
                first = Some(i);
            }
            _ => {
                if second.is_none_or(|s| b.load < bins[s].load) {
                    second = Some(i);
                }
            }
        }
    }
    (first, second)
}

/// Argmax with ties to the lowest index. `None` for an empty slice, or
/// `Err(position)` when a score is NaN.
pub fn argmax(scores: &[f64]) -> Result<Option<usize>, usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            return Err(i);
        }
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    Ok(best)
}

/// A named heuristic bound to a validated parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Heuristic {
    pub id: HeuristicId,
    pub params: ParameterVector,
}

impl Heuristic {
    /// The heuristic with its published constants.
    pub fn new(id: HeuristicId) -> Result<Self> {
        Ok(Self {
            id,
            params: default_params(id)?,
        })
    }

    pub fn with_params(id: HeuristicId, values: Vec<f64>) -> Result<Self> {
        if !id.is_available() {
            return Err(Error::NotImplemented(id.to_string()));
        }
        Ok(Self {
            id,
            params: ParameterVector::new(id, values)?,
        })
    }

    /// Applies `name=value` overrides.
    pub fn with_overrides<'a>(mut self, overrides: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        for (name, value) in overrides {
            self.params.set(name, value)?;
        }
        Ok(self)
    }

    pub fn is_score_based(&self) -> bool {
        !self.id.is_classical()
    }

    /// NF closes the current bin whenever it opens a new one.
    pub fn keeps_single_open_bin(&self) -> bool {
        self.id == HeuristicId::Nf
    }

    /// Scores every candidate remaining capacity.
    pub fn score(&self, item: u64, remaining: &[u64], capacity: u64, out: &mut Vec<f64>) -> Result<()> {
        llm::score_into(self.id, item, remaining, capacity, self.params.values(), out)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// Builds the default heuristic for every id in `portfolio`.
pub fn instantiate(portfolio: &[HeuristicId]) -> Result<Vec<Heuristic>> {
    portfolio.iter().map(|&id| Heuristic::new(id)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view(loads: &[u64]) -> Vec<OpenBin> {
        loads.iter().map(|&load| OpenBin { load }).collect()
    }

    #[test]
    fn ids_round_trip_names() {
        for id in HeuristicId::ALL {
            assert_eq!(id.name().parse::<HeuristicId>().unwrap(), id);
        }
        assert_eq!("eoh".parse::<HeuristicId>().unwrap(), HeuristicId::Eoh);
        assert!("XF".parse::<HeuristicId>().is_err());
    }

    #[test]
    fn portfolio_parsing() {
        let p = parse_portfolio("BF, FF,FS1").unwrap();
        assert_eq!(p, vec![HeuristicId::Bf, HeuristicId::Ff, HeuristicId::Fs1]);
        assert!(parse_portfolio("BF,BF").is_err());
        assert!(parse_portfolio("").is_err());
        assert!(matches!(parse_portfolio("BF,ZZ"), Err(Error::UnknownHeuristic(_))));
        assert!(!parse_portfolio("all").unwrap().contains(&HeuristicId::Eoc));
    }

    #[test]
    fn nf_uses_only_last_bin() {
        assert_eq!(choose_classical(HeuristicId::Nf, 3, &view(&[2, 8]), 10), Choice::New);
        assert_eq!(
            choose_classical(HeuristicId::Nf, 2, &view(&[2, 8]), 10),
            Choice::Existing(1)
        );
        assert_eq!(choose_classical(HeuristicId::Nf, 2, &[], 10), Choice::New);
    }

    #[test]
    fn ff_first_fitting() {
        assert_eq!(
            choose_classical(HeuristicId::Ff, 3, &view(&[9, 6, 1]), 10),
            Choice::Existing(1)
        );
        assert_eq!(choose_classical(HeuristicId::Ff, 5, &view(&[9, 6]), 10), Choice::New);
    }

    #[test]
    fn bf_fullest_fitting_ties_low_index() {
        assert_eq!(
            choose_classical(HeuristicId::Bf, 3, &view(&[4]), 10),
            Choice::Existing(0)
        );
        assert_eq!(choose_classical(HeuristicId::Bf, 6, &view(&[7]), 10), Choice::New);
        assert_eq!(
            choose_classical(HeuristicId::Bf, 2, &view(&[5, 7, 9, 7]), 10),
            Choice::Existing(1)
        );
    }

    #[test]
    fn wf_emptiest_only() {
        assert_eq!(
            choose_classical(HeuristicId::Wf, 4, &view(&[6, 5]), 10),
            Choice::Existing(1)
        );
        assert_eq!(
            choose_classical(HeuristicId::Wf, 3, &view(&[6, 5, 5]), 10),
            Choice::Existing(1)
        );
        assert_eq!(choose_classical(HeuristicId::Wf, 6, &view(&[6, 5]), 10), Choice::New);
    }

    #[test]
    fn awf_second_emptiest() {
        // second-emptiest of [6,5,9] is the load-6 bin
        assert_eq!(
            choose_classical(HeuristicId::Awf, 4, &view(&[6, 5, 9]), 10),
            Choice::Existing(0)
        );
        // does not fit the second emptiest, falls back to the emptiest
        assert_eq!(
            choose_classical(HeuristicId::Awf, 5, &view(&[6, 5, 9]), 10),
            Choice::Existing(1)
        );
        assert_eq!(
            choose_classical(HeuristicId::Awf, 6, &view(&[6, 5, 9]), 10),
            Choice::New
        );
        // single open bin: emptiest
        assert_eq!(
            choose_classical(HeuristicId::Awf, 3, &view(&[7]), 10),
            Choice::Existing(0)
        );
        assert_eq!(choose_classical(HeuristicId::Awf, 3, &[], 10), Choice::New);
        // equal minimum loads: the later one is the second-emptiest
        assert_eq!(
            choose_classical(HeuristicId::Awf, 3, &view(&[4, 4]), 10),
            Choice::Existing(1)
        );
    }

    #[test]
    fn argmax_ties_and_nan() {
        assert_eq!(argmax(&[]), Ok(None));
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Ok(Some(1)));
        assert_eq!(argmax(&[-5.0]), Ok(Some(0)));
        assert_eq!(argmax(&[1.0, f64::NAN]), Err(1));
        assert_eq!(argmax(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), Ok(Some(0)));
    }

    #[test]
    fn declared_arities() {
        let arity = |id| ParamSpace::of(id).dim();
        assert_eq!(arity(HeuristicId::Fs1), 20);
        assert_eq!(arity(HeuristicId::Fs2), 2);
        assert_eq!(arity(HeuristicId::Fsw), 5);
        assert_eq!(arity(HeuristicId::Eoh), 4);
        assert_eq!(arity(HeuristicId::Eoc), 2);
        let kinds = |id| ParamSpace::of(id).defs.iter().map(|d| d.kind).collect::<Vec<_>>();
        assert!(kinds(HeuristicId::Fsw).iter().all(|&k| k == ParamKind::Integer));
        assert!(kinds(HeuristicId::Eoh).iter().all(|&k| k == ParamKind::Real));
        assert!(kinds(HeuristicId::Eoc).iter().all(|&k| k == ParamKind::Integer));
        assert_eq!(kinds(HeuristicId::Fs1)[..10], [ParamKind::Integer; 10]);
        assert_eq!(kinds(HeuristicId::Fs1)[10..], [ParamKind::Real; 10]);
    }

    #[test]
    fn defaults_are_admissible() {
        for id in HeuristicId::available() {
            let p = default_params(id).unwrap();
            ParamSpace::of(id).check(p.values()).unwrap();
        }
        assert!(matches!(
            default_params(HeuristicId::Eoc),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn range_checks() {
        let mut fs2 = default_params(HeuristicId::Fs2).unwrap();
        assert!(fs2.set("penalty", 49.0).is_err());
        assert!(fs2.set("penalty", 50.0).is_ok());
        assert!(fs2.set("penalty", 10_001.0).is_err());
        assert!(fs2.set("penalty", 60.5).is_err());
        let mut fsw = default_params(HeuristicId::Fsw).unwrap();
        assert!(fsw.set("p0", 9.0).is_err());
        assert!(fsw.set("p0", 8.0).is_ok());
        let mut fs1 = default_params(HeuristicId::Fs1).unwrap().values().to_vec();
        fs1[0] = 3.0;
        fs1[1] = 2.0;
        assert!(ParameterVector::new(HeuristicId::Fs1, fs1).is_err());
        assert!(ParameterVector::new(HeuristicId::Fs2, vec![1000.0]).is_err());
        let mut eoh = default_params(HeuristicId::Eoh).unwrap();
        assert!(eoh.set("exp_add", 10.5).is_err());
        assert!(eoh.set("nope", 1.0).is_err());
    }

    #[test]
    fn eoc_space_is_enumerable() {
        let s = ParamSpace::of(HeuristicId::Eoc);
        assert!(s.enumerable);
        assert_eq!(s.cardinality(), Some(100));
        assert_eq!(ParamSpace::of(HeuristicId::Fs1).cardinality(), None);
    }
}
