//! Instances, datasets, file formats and instance generators.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rng::{fnv1a64, Stream};

/// Where an instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    File,
    Generated,
    Evolved,
}

/// A bin capacity plus the ordered sequence of arriving item sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub id: String,
    pub capacity: u64,
    pub items: Vec<u64>,
    pub source: Source,
    /// Best known bin count carried by OR-Library files. Never used as a baseline.
    pub best_known: Option<u64>,
}

impl Instance {
    /// Builds an instance, checking that it is non-empty and every item fits.
    pub fn new(id: impl Into<String>, capacity: u64, items: Vec<u64>, source: Source) -> Result<Self> {
        let inst = Self {
            id: id.into(),
            capacity,
            items,
            source,
            best_known: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::Validation {
            id: self.id.clone(),
            message,
        };
        if self.capacity == 0 {
            return Err(invalid("capacity must be positive".into()));
        }
        if self.items.is_empty() {
            return Err(invalid("instance has no items".into()));
        }
        for (pos, &s) in self.items.iter().enumerate() {
            if s == 0 {
                return Err(invalid(format!("item {pos} has size 0")));
            }
            if s > self.capacity {
                return Err(invalid(format!(
                    "item {pos} of size {s} exceeds capacity {}",
                    self.capacity
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn volume(&self) -> u64 {
        self.items.iter().sum()
    }

    pub fn lower_bound(&self) -> LowerBound {
        lower_bound(self)
    }

    /// Serializes to the BPPLib text layout: `n`, `C`, then one size per line.
    pub fn to_bpplib(&self) -> String {
        let mut out = String::with_capacity(8 * (self.items.len() + 2));
        out.push_str(&format!("{}\n{}\n", self.items.len(), self.capacity));
        for s in &self.items {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

/// Continuous volume bound `Σ size / C`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBound {
    pub volume: u64,
    pub capacity: u64,
}

impl LowerBound {
    pub fn value(&self) -> f64 {
        self.volume as f64 / self.capacity as f64
    }

    pub fn ceil(&self) -> u64 {
        self.volume.div_ceil(self.capacity)
    }

    pub fn is_integral(&self) -> bool {
        self.volume.is_multiple_of(self.capacity)
    }
}

impl fmt::Display for LowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.volume, self.capacity)
    }
}

pub fn lower_bound(inst: &Instance) -> LowerBound {
    LowerBound {
        volume: inst.volume(),
        capacity: inst.capacity,
    }
}

/// An ordered, named collection of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub instances: Vec<Instance>,
    pub shuffle_seed: Option<u64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, instances: Vec<Instance>) -> Result<Self> {
        let name = name.into();
        let mut seen = HashSet::new();
        for inst in &instances {
            if !seen.insert(inst.id.as_str()) {
                return Err(Error::Validation {
                    id: inst.id.clone(),
                    message: format!("duplicate instance id in dataset `{name}`"),
                });
            }
        }
        Ok(Self {
            name,
            instances,
            shuffle_seed: None,
        })
    }

    /// Reorders every instance's items under `seed`; see [`shuffle_instance`].
    pub fn shuffled(mut self, seed: u64) -> Self {
        self.instances = self.instances.iter().map(|inst| shuffle_instance(inst, seed)).collect();
        self.shuffle_seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }
}

struct Tokens<'a> {
    source_id: &'a str,
    inner: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, source_id: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| line.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        Self {
            source_id,
            inner,
            pos: 0,
        }
    }

    fn remaining(&self) -> usize {
        self.inner.len() - self.pos
    }

    fn last_line(&self) -> usize {
        self.inner.last().map_or(1, |t| t.0)
    }

    fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        let t = self.inner.get(self.pos).copied();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn next_int(&mut self, what: &str) -> Result<(usize, u64)> {
        let (line, tok) = self.next_raw().ok_or_else(|| Error::Parse {
            source_id: self.source_id.to_string(),
            line: self.last_line(),
            message: format!("unexpected end of input, expected {what}"),
        })?;
        let value = parse_int(tok).ok_or_else(|| Error::Parse {
            source_id: self.source_id.to_string(),
            line,
            message: format!("malformed {what} `{tok}`"),
        })?;
        Ok((line, value))
    }
}

/// Accepts plain integers and integral decimals such as `40.0`.
fn parse_int(tok: &str) -> Option<u64> {
    if let Ok(v) = tok.parse::<u64>() {
        return Some(v);
    }
    let (whole, frac) = tok.split_once('.')?;
    if !frac.is_empty() && frac.bytes().all(|b| b == b'0') {
        whole.parse().ok()
    } else {
        None
    }
}

/// Parses a BPPLib instance: `n`, `C`, then exactly `n` item sizes.
pub fn parse_bpplib(text: &str, id: &str) -> Result<Instance> {
    let mut toks = Tokens::new(text, id);
    let (_, n) = toks.next_int("item count")?;
    let (_, capacity) = toks.next_int("capacity")?;
    let n = n as usize;
    if toks.remaining() != n {
        return Err(Error::CountMismatch {
            source_id: id.to_string(),
            what: "item sizes",
            expected: n,
            found: toks.remaining(),
        });
    }
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        items.push(toks.next_int("item size")?.1);
    }
    Instance::new(id, capacity, items, Source::File)
}

/// Parses an OR-Library multi-problem file.
///
/// Layout: problem count `P`, then per problem an identifier, a line
/// `C n best_known`, and `n` item sizes.
pub fn parse_orlib(text: &str, source_id: &str) -> Result<Vec<Instance>> {
    let mut toks = Tokens::new(text, source_id);
    let (_, problems) = toks.next_int("problem count")?;
    let problems = problems as usize;
    let mut out = Vec::with_capacity(problems);
    for k in 0..problems {
        let Some((_, name)) = toks.next_raw() else {
            return Err(Error::CountMismatch {
                source_id: source_id.to_string(),
                what: "problems",
                expected: problems,
                found: k,
            });
        };
        let (_, capacity) = toks.next_int("capacity")?;
        let (_, n) = toks.next_int("item count")?;
        let (_, best) = toks.next_int("best known")?;
        let n = n as usize;
        if toks.remaining() < n {
            return Err(Error::CountMismatch {
                source_id: format!("{source_id}:{name}"),
                what: "item sizes",
                expected: n,
                found: toks.remaining(),
            });
        }
        let mut items = Vec::with_capacity(n);
        for _ in 0..n {
            items.push(toks.next_int("item size")?.1);
        }
        let mut inst = Instance::new(name, capacity, items, Source::File)?;
        inst.best_known = Some(best);
        out.push(inst);
    }
    if toks.remaining() != 0 {
        return Err(Error::CountMismatch {
            source_id: source_id.to_string(),
            what: "trailing tokens",
            expected: 0,
            found: toks.remaining(),
        });
    }
    Ok(out)
}

/// Writes instances in OR-Library layout.
pub fn to_orlib(instances: &[Instance]) -> String {
    let mut out = format!("{}\n", instances.len());
    for inst in instances {
        out.push_str(&format!(
            " {}\n {} {} {}\n",
            inst.id,
            inst.capacity,
            inst.items.len(),
            inst.best_known.unwrap_or_else(|| inst.lower_bound().ceil())
        ));
        for s in &inst.items {
            out.push_str(&format!(" {s}\n"));
        }
    }
    out
}

/// Permutes the items with Fisher–Yates driven by a [`Stream`] seeded with
/// `seed XOR fnv1a64(id)`.
pub fn shuffle_instance(inst: &Instance, seed: u64) -> Instance {
    let mut out = inst.clone();
    let mut rng = Stream::new(seed ^ fnv1a64(inst.id.as_bytes()));
    rng.shuffle(&mut out.items);
    out
}

/// `n` items drawn i.i.d. uniformly from the integers `lo..=hi`.
pub fn generate_uniform(n: usize, lo: u64, hi: u64, capacity: u64, seed: u64) -> Result<Instance> {
    if n == 0 || lo == 0 || lo > hi || hi > capacity {
        return Err(Error::Precondition(format!(
            "uniform generator needs n >= 1 and 0 < lo <= hi <= C (got n={n}, lo={lo}, hi={hi}, C={capacity})"
        )));
    }
    let mut rng = Stream::new(seed);
    let items = (0..n).map(|_| rng.range_inclusive(lo, hi)).collect();
    Instance::new(
        format!("u{n}_{lo}_{hi}_c{capacity}_s{seed}"),
        capacity,
        items,
        Source::Generated,
    )
}

/// Weibull sizes `λ·(−ln(1−u))^(1/k)`, clipped to `[1, C]` and rounded half away from zero.
pub fn generate_weibull(n: usize, shape: f64, scale: f64, capacity: u64, seed: u64) -> Result<Instance> {
    if n == 0 || shape <= 0.0 || scale <= 0.0 || capacity == 0 || !shape.is_finite() || !scale.is_finite() {
        return Err(Error::Precondition(format!(
            "weibull generator needs n >= 1, positive shape/scale and C > 0 (got n={n}, k={shape}, λ={scale}, C={capacity})"
        )));
    }
    let mut rng = Stream::new(seed);
    let items = (0..n)
        .map(|_| {
            let u = rng.unit();
            let x = scale * (-(1.0 - u).ln()).powf(1.0 / shape);
            x.clamp(1.0, capacity as f64).round() as u64
        })
        .collect();
    Instance::new(
        format!("w{n}_k{shape}_l{scale}_c{capacity}_s{seed}"),
        capacity,
        items,
        Source::Generated,
    )
}

/// The OR-Library `binpack1..4` shape: C=150, sizes U[20,100].
pub const OR_CLASS_SIZES: [usize; 4] = [120, 250, 500, 1000];

/// Regenerates an OR-style dataset (20 instances, C=150, items U[20,100]).
pub fn or_like_dataset(index: usize, instances: usize, seed: u64) -> Result<Dataset> {
    let n = *OR_CLASS_SIZES
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("OR class index {index} out of range 0..4")))?;
    let mut out = Vec::with_capacity(instances);
    for k in 0..instances {
        let s = crate::rng::derive_seed(seed, &[index as u64, k as u64]);
        let mut inst = generate_uniform(n, 20, 100, 150, s)?;
        inst.id = format!("u{n}_{k:02}");
        out.push(inst);
    }
    Dataset::new(format!("OR{}", index + 1), out)
}

/// Weibull dataset with the default training shape (k=3, λ=45, C=100).
pub fn weibull_dataset(name: &str, n: usize, instances: usize, seed: u64) -> Result<Dataset> {
    let mut out = Vec::with_capacity(instances);
    for k in 0..instances {
        let s = crate::rng::derive_seed(seed, &[n as u64, k as u64]);
        let mut inst = generate_weibull(n, 3.0, 45.0, 100, s)?;
        inst.id = format!("{name}_{k:02}");
        out.push(inst);
    }
    Dataset::new(name, out)
}

/// Randomly generated class: every combination of item count, capacity and
/// size band `[αC, βC]`, `per_cell` instances each.
pub fn random_class_dataset(per_cell: usize, seed: u64) -> Result<Dataset> {
    const NS: [usize; 8] = [50, 100, 200, 300, 400, 500, 750, 1000];
    const CS: [u64; 12] = [50, 75, 100, 120, 125, 150, 200, 300, 400, 500, 750, 1000];
    const BANDS: [(u64, u64); 4] = [(10, 70), (10, 80), (20, 70), (20, 80)];
    let mut out = Vec::new();
    for &n in &NS {
        for &c in &CS {
            for &(a, b) in &BANDS {
                let lo = (c * a).div_ceil(100).max(1);
                let hi = c * b / 100;
                for k in 0..per_cell {
                    let s = crate::rng::derive_seed(seed, &[n as u64, c, a, b, k as u64]);
                    let mut inst = generate_uniform(n, lo, hi, c, s)?;
                    inst.id = format!("rand_n{n}_c{c}_a{a}_b{b}_{k}");
                    out.push(inst);
                }
            }
        }
    }
    Dataset::new("Random", out)
}

fn uniform_cells(name: &str, cells: &[(usize, u64, u64, u64)], per_cell: usize, seed: u64) -> Result<Dataset> {
    let mut out = Vec::with_capacity(cells.len() * per_cell);
    for (cell, &(n, c, lo, hi)) in cells.iter().enumerate() {
        for k in 0..per_cell {
            let s = crate::rng::derive_seed(seed, &[fnv1a64(name.as_bytes()), cell as u64, k as u64]);
            let mut inst = generate_uniform(n, lo, hi, c, s)?;
            inst.id = format!("{name}_n{n}_c{c}_{lo}-{hi}_{k}");
            out.push(inst);
        }
    }
    Dataset::new(name, out)
}

/// Scholl class 1: n ∈ {50,100,200,500}, C ∈ {100,120,150}, sizes in
/// [1,100], [20,100] or [30,100].
pub fn scholl1_dataset(per_cell: usize, seed: u64) -> Result<Dataset> {
    let mut cells = Vec::new();
    for n in [50, 100, 200, 500] {
        for c in [100, 120, 150] {
            for lo in [1, 20, 30] {
                cells.push((n, c, lo, 100));
            }
        }
    }
    uniform_cells("Scholl_1", &cells, per_cell, seed)
}

/// Scholl class 2: C = 1000, mean size C/3..C/9 with spread 20/50/90 %.
pub fn scholl2_dataset(per_cell: usize, seed: u64) -> Result<Dataset> {
    let mut cells = Vec::new();
    for n in [50, 100, 200, 500] {
        for div in [3u64, 5, 7, 9] {
            for spread in [20u64, 50, 90] {
                let mean = 1000 / div;
                let lo = (mean * (100 - spread)).div_ceil(100).max(1);
                let hi = mean * (100 + spread) / 100;
                cells.push((n, 1000, lo, hi));
            }
        }
    }
    uniform_cells("Scholl_2", &cells, per_cell, seed)
}

/// Scholl hard class: n = 200, C = 100 000, sizes in [20 000, 35 000].
pub fn scholl_hard_dataset(instances: usize, seed: u64) -> Result<Dataset> {
    uniform_cells("Scholl_Hard", &[(200, 100_000, 20_000, 35_000)], instances, seed)
}

/// Schwerin classes: C = 1000, sizes in [150, 200], n = 100 or 120.
pub fn schwerin_dataset(n: usize, instances: usize, seed: u64) -> Result<Dataset> {
    let name = if n == 100 { "Schwerin_1" } else { "Schwerin_2" };
    uniform_cells(name, &[(n, 1000, 150, 200)], instances, seed)
}

/// Desk-scale regeneration of the independent benchmark classes.
pub fn benchmark_suite(seed: u64) -> Result<Vec<Dataset>> {
    Ok(vec![
        random_class_dataset(1, seed)?,
        scholl1_dataset(2, seed)?,
        scholl2_dataset(2, seed)?,
        scholl_hard_dataset(10, seed)?,
        schwerin_dataset(100, 20, seed)?,
        schwerin_dataset(120, 20, seed)?,
        weibull_dataset("Weibull", 10_000, 5, seed)?,
    ])
}

/// OR1..OR4 with 20 instances each.
pub fn or_suite(seed: u64) -> Result<Vec<Dataset>> {
    (0..4).map(|i| or_like_dataset(i, 20, seed)).collect()
}

/// Dataset file layout listed in a manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Bpplib,
    Orlib,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bpplib" => Ok(Self::Bpplib),
            "orlib" => Ok(Self::Orlib),
            other => Err(Error::Config(format!("unknown dataset format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Bpplib => "bpplib",
            Self::Orlib => "orlib",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShufflePolicy {
    None,
    Seed(u64),
}

impl std::str::FromStr for ShufflePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Self::None);
        }
        s.strip_prefix("seed=")
            .and_then(|v| v.parse().ok())
            .map(Self::Seed)
            .ok_or_else(|| Error::Config(format!("bad shuffle policy `{s}` (want none|seed=<u64>)")))
    }
}

impl fmt::Display for ShufflePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Seed(s) => write!(f, "seed={s}"),
        }
    }
}

/// One manifest line: `<name> <dir> <format> <shuffle>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub dir: String,
    pub format: Format,
    pub shuffle: ShufflePolicy,
}

/// Parses a dataset manifest. Blank lines and `#` comments are ignored.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out: Vec<ManifestEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, dir, format, shuffle] = fields[..] else {
            return Err(Error::Parse {
                source_id: "manifest".into(),
                line: i + 1,
                message: format!(
                    "expected 4 fields `<name> <dir> <format> <shuffle>`, got {}",
                    fields.len()
                ),
            });
        };
        if out.iter().any(|e| e.name == name) {
            return Err(Error::Parse {
                source_id: "manifest".into(),
                line: i + 1,
                message: format!("duplicate dataset name `{name}`"),
            });
        }
        out.push(ManifestEntry {
            name: name.to_string(),
            dir: dir.to_string(),
            format: format.parse()?,
            shuffle: shuffle.parse()?,
        });
    }
    Ok(out)
}

pub fn format_manifest(entries: &[ManifestEntry]) -> String {
    entries
        .iter()
        .map(|e| format!("{} {} {} {}\n", e.name, e.dir, e.format, e.shuffle))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpplib_basic() {
        let inst = parse_bpplib("3\n10\n5\n6\n5", "t").unwrap();
        assert_eq!(inst.capacity, 10);
        assert_eq!(inst.items, vec![5, 6, 5]);
        assert_eq!(inst.source, Source::File);
    }

    #[test]
    fn bpplib_item_equal_to_capacity() {
        let inst = parse_bpplib("1\n100\n100", "t").unwrap();
        assert_eq!(inst.items, vec![100]);
    }

    #[test]
    fn bpplib_item_exceeds_capacity() {
        let err = parse_bpplib("2\n10\n5\n11", "t").unwrap_err();
        assert!(matches!(err, Error::Validation { .. }), "{err}");
    }

    #[test]
    fn bpplib_count_mismatch() {
        let err = parse_bpplib("3\n10\n5\n6", "t").unwrap_err();
        assert!(
            matches!(
                err,
                Error::CountMismatch {
                    expected: 3,
                    found: 2,
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_bpplib("1\n10\n5\n6", "t").unwrap_err();
        assert!(matches!(err, Error::CountMismatch { .. }));
    }

    #[test]
    fn bpplib_malformed_token_names_line() {
        let err = parse_bpplib("3\n10\n5\nsix\n5", "t").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                source_id: "t".into(),
                line: 4,
                message: "malformed item size `six`".into()
            }
        );
    }

    #[test]
    fn bpplib_zero_item_rejected() {
        assert!(parse_bpplib("2\n10\n0\n3", "t").is_err());
        assert!(parse_bpplib("0\n10\n", "t").is_err());
    }

    #[test]
    fn bpplib_accepts_integral_decimals() {
        let inst = parse_bpplib("2 10 4.0 5", "t").unwrap();
        assert_eq!(inst.items, vec![4, 5]);
        assert!(parse_bpplib("2 10 4.5 5", "t").is_err());
    }

    #[test]
    fn orlib_single_problem() {
        let v = parse_orlib("1\n u120_00\n 150 3 2\n 50 60 70", "f").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].id, "u120_00");
        assert_eq!(v[0].capacity, 150);
        assert_eq!(v[0].items, vec![50, 60, 70]);
        assert_eq!(v[0].best_known, Some(2));
    }

    #[test]
    fn orlib_problem_count_mismatch() {
        let err = parse_orlib("2\n u120_00\n 150 3 2\n 50 60 70", "f").unwrap_err();
        assert!(
            matches!(
                err,
                Error::CountMismatch {
                    what: "problems",
                    expected: 2,
                    found: 1,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn orlib_round_trip() {
        let a = Instance::new("a", 150, vec![20, 30, 100], Source::File).unwrap();
        let b = Instance::new("b", 100, vec![99], Source::File).unwrap();
        let text = to_orlib(&[a.clone(), b.clone()]);
        let back = parse_orlib(&text, "f").unwrap();
        assert_eq!(back[0].items, a.items);
        assert_eq!(back[1].capacity, 100);
        assert_eq!(back[0].best_known, Some(1));
    }

    #[test]
    fn lower_bound_values() {
        let inst = Instance::new("x", 10, vec![5, 6, 5], Source::File).unwrap();
        let lb = lower_bound(&inst);
        assert_eq!(lb.value(), 1.6);
        assert_eq!(lb.ceil(), 2);
        let inst = Instance::new("x", 10, vec![5, 5, 4, 6], Source::File).unwrap();
        assert_eq!(lower_bound(&inst).value(), 2.0);
        assert!(lower_bound(&inst).is_integral());
        let inst = Instance::new("x", 150, vec![20; 120], Source::File).unwrap();
        // 120 * 20 = 2400 = 16 * 150
        assert_eq!(lower_bound(&inst).value(), 16.0);
    }

    #[test]
    fn shuffle_singleton_and_determinism() {
        let one = Instance::new("one", 10, vec![7], Source::File).unwrap();
        assert_eq!(shuffle_instance(&one, 99).items, vec![7]);
        let inst = generate_uniform(50, 1, 40, 50, 3).unwrap();
        let a = shuffle_instance(&inst, 42);
        let b = shuffle_instance(&inst, 42);
        assert_eq!(a, b);
        let mut sa = a.items.clone();
        let mut si = inst.items.clone();
        sa.sort_unstable();
        si.sort_unstable();
        assert_eq!(sa, si);
    }

    #[test]
    fn shuffle_depends_on_id() {
        let mut a = Instance::new("a", 100, (1..=30).collect(), Source::File).unwrap();
        let sa = shuffle_instance(&a, 5).items;
        a.id = "b".into();
        let sb = shuffle_instance(&a, 5).items;
        assert_ne!(sa, sb);
    }

    #[test]
    fn uniform_generator_contract() {
        let inst = generate_uniform(120, 20, 100, 150, 1).unwrap();
        assert_eq!(inst.len(), 120);
        assert!(inst.items.iter().all(|&s| (20..=100).contains(&s)));
        assert_eq!(inst, generate_uniform(120, 20, 100, 150, 1).unwrap());
        let flat = generate_uniform(10, 50, 50, 150, 9).unwrap();
        assert!(flat.items.iter().all(|&s| s == 50));
        assert!(generate_uniform(10, 0, 5, 10, 0).is_err());
        assert!(generate_uniform(10, 6, 5, 10, 0).is_err());
        assert!(generate_uniform(10, 5, 11, 10, 0).is_err());
        assert!(generate_uniform(0, 5, 5, 10, 0).is_err());
    }

    #[test]
    fn uniform_generator_hits_both_ends() {
        let inst = generate_uniform(2000, 20, 100, 150, 12).unwrap();
        assert!(inst.items.contains(&20));
        assert!(inst.items.contains(&100));
    }

    #[test]
    fn weibull_generator_in_range() {
        let inst = generate_weibull(5000, 3.0, 45.0, 100, 4).unwrap();
        assert!(inst.items.iter().all(|&s| (1..=100).contains(&s)));
        // mean of Weibull(k=3, λ=45) is 45·Γ(4/3) ≈ 40.19
        let mean = inst.volume() as f64 / inst.len() as f64;
        assert!((mean - 40.19).abs() < 1.0, "{mean}");
    }

    #[test]
    fn or_like_shape() {
        let ds = or_like_dataset(1, 20, 7).unwrap();
        assert_eq!(ds.name, "OR2");
        assert_eq!(ds.len(), 20);
        assert!(ds.instances.iter().all(|i| i.len() == 250 && i.capacity == 150));
    }

    #[test]
    fn random_class_size() {
        let ds = random_class_dataset(1, 0).unwrap();
        assert_eq!(ds.len(), 8 * 12 * 4);
        for inst in &ds.instances {
            let c = inst.capacity;
            assert!(inst.items.iter().all(|&s| s * 10 >= c && s * 10 <= 8 * c));
        }
    }

    #[test]
    fn dataset_rejects_duplicate_ids() {
        let a = Instance::new("a", 10, vec![1], Source::File).unwrap();
        assert!(Dataset::new("d", vec![a.clone(), a]).is_err());
    }

    #[test]
    fn manifest_parse() {
        let text = "# datasets\nOR1 or1 bpplib seed=42\nW  weibull orlib none  # inline\n\n";
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].shuffle, ShufflePolicy::Seed(42));
        assert_eq!(m[1].format, Format::Orlib);
        assert_eq!(parse_manifest(&format_manifest(&m)).unwrap(), m);
        assert!(parse_manifest("A a xml none").is_err());
        assert!(parse_manifest("A a bpplib seed=x").is_err());
        assert!(parse_manifest("A a bpplib").is_err());
        assert!(parse_manifest("A a bpplib none\nA b bpplib none").is_err());
    }
}
