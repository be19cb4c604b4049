//! Instance-space analysis: a fixed set of sequence features, backward
//! feature elimination and a principal-component projection to the plane.
//!
//! Features are computed over r_t = size_t / C. Sums of sizes and squared
//! sizes are exact integers, so means, variances and mean comparisons do not
//! drift under reordering or scaling. Conventions for short sequences: with
//! fewer than two items the autocorrelation, successive difference and slope
//! are 0; whenever the variance is 0 so are skewness, kurtosis and
//! autocorrelation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metrics::{neumaier_sum, quantile};

pub const FEATURE_NAMES: [&str; 16] = [
    "mean",
    "std",
    "min",
    "max",
    "median",
    "skewness",
    "kurtosis",
    "autocorr_lag1",
    "mean_abs_diff",
    "slope",
    "above_mean_frac",
    "frac_gt_half",
    "frac_gt_third",
    "entropy",
    "longest_increasing_run",
    "log_n",
];

/// Tag written into every output so readers know which feature set and
/// projection produced it.
pub const METHOD_TAG: &str = "native16 features; pca projection";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub instance_id: String,
    pub label: String,
    pub values: Vec<f64>,
}

pub fn extract_features(inst: &Instance, label: &str) -> FeatureVector {
    let n = inst.items.len();
    let nf = n as f64;
    let c = inst.capacity as f64;
    let r: Vec<f64> = inst.items.iter().map(|&s| s as f64 / c).collect();

    let sum: u128 = inst.items.iter().map(|&s| s as u128).sum();
    let sum_sq: u128 = inst.items.iter().map(|&s| (s as u128) * (s as u128)).sum();
    let n128 = n as u128;
    let cap = inst.capacity as u128;
    let mean = sum as f64 / (n128 * cap) as f64;
    let var_num = n128 * sum_sq - sum * sum;
    let var = var_num as f64 / (n128 * n128 * cap * cap) as f64;
    let flat = var_num == 0;

    let centred: Vec<f64> = r.iter().map(|x| x - mean).collect();
    let m3 = neumaier_sum(centred.iter().map(|d| d * d * d)) / nf;
    let m4 = neumaier_sum(centred.iter().map(|d| d * d * d * d)) / nf;
    let (skew, kurt) = if flat {
        (0.0, 0.0)
    } else {
        (m3 / var.powf(1.5), m4 / (var * var) - 3.0)
    };

    let autocorr = if flat || n < 2 {
        0.0
    } else {
        let num = neumaier_sum(centred.windows(2).map(|w| w[0] * w[1]));
        let den = neumaier_sum(centred.iter().map(|d| d * d));
        num / den
    };
    let masd = if n < 2 {
        0.0
    } else {
        neumaier_sum(r.windows(2).map(|w| (w[1] - w[0]).abs())) / (nf - 1.0)
    };
    let slope = if n < 2 {
        0.0
    } else {
        let tbar = (nf - 1.0) / 2.0;
        let num = neumaier_sum(centred.iter().enumerate().map(|(t, d)| (t as f64 - tbar) * d));
        let den = nf * (nf * nf - 1.0) / 12.0;
        num / den
    };

    let frac = |pred: &dyn Fn(u128) -> bool| inst.items.iter().filter(|&&s| pred(s as u128)).count() as f64 / nf;
    let above_mean = frac(&|s| s * n128 > sum);
    let gt_half = frac(&|s| 2 * s > cap);
    let gt_third = frac(&|s| 3 * s > cap);

    let mut hist = [0usize; 10];
    for &s in &inst.items {
        let b = ((s as u128 * 10) / cap).min(9) as usize;
        hist[b] += 1;
    }
    let entropy = -neumaier_sum(hist.iter().filter(|&&k| k > 0).map(|&k| {
        let p = k as f64 / nf;
        p * p.ln()
    }));
    let entropy = if entropy == 0.0 { 0.0 } else { entropy };

    let mut longest = 1usize;
    let mut run = 1usize;
    for w in inst.items.windows(2) {
        run = if w[1] > w[0] { run + 1 } else { 1 };
        longest = longest.max(run);
    }

    let min = *inst.items.iter().min().unwrap() as f64 / c;
    let max = *inst.items.iter().max().unwrap() as f64 / c;
    FeatureVector {
        instance_id: inst.id.clone(),
        label: label.to_string(),
        values: vec![
            mean,
            var.sqrt(),
            min,
            max,
            quantile(&r, 0.5),
            skew,
            kurt,
            autocorr,
            masd,
            slope,
            above_mean,
            gt_half,
            gt_third,
            entropy,
            longest as f64 / nf,
            nf.ln(),
        ],
    }
}

/// Features of labelled instances, extracted in parallel, returned in input order.
pub fn extract_all(labelled: &[(&Instance, String)]) -> Vec<FeatureVector> {
    labelled
        .par_iter()
        .map(|(inst, label)| extract_features(inst, label))
        .collect()
}

/// A labelled numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub names: Vec<String>,
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Corpus {
    pub fn from_features(features: &[FeatureVector]) -> Self {
        Self {
            names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            ids: features.iter().map(|f| f.instance_id.clone()).collect(),
            labels: features.iter().map(|f| f.label.clone()).collect(),
            rows: features.iter().map(|f| f.values.clone()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (id, row) in self.ids.iter().zip(&self.rows) {
            if row.len() != self.names.len() {
                return Err(Error::Precondition(format!("row `{id}` has {} values", row.len())));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Precondition(format!(
                    "row `{id}` has non-finite {}",
                    self.names[j]
                )));
            }
        }
        Ok(())
    }

    /// Keeps only the named columns, in the given order.
    pub fn restrict(&self, names: &[String]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::Config(format!("unknown feature `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            names: names.to_vec(),
            ids: self.ids.clone(),
            labels: self.labels.clone(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
        })
    }

    fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[j])
    }

    /// Columns shifted to zero mean and scaled to unit population variance.
    /// Constant columns become zero.
    fn standardized(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len() as f64;
        let d = self.names.len();
        let mut out = vec![vec![0.0; d]; self.rows.len()];
        for j in 0..d {
            let mu = neumaier_sum(self.column(j)) / n;
            let sd = (neumaier_sum(self.column(j).map(|x| (x - mu) * (x - mu))) / n).sqrt();
            if sd <= 1e-12 * (1.0 + mu.abs()) {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.rows) {
                o[j] = (r[j] - mu) / sd;
            }
        }
        out
    }
}

fn column_variance(z: &[Vec<f64>], j: usize) -> f64 {
    let n = z.len() as f64;
    let mu = neumaier_sum(z.iter().map(|r| r[j])) / n;
    neumaier_sum(z.iter().map(|r| (r[j] - mu) * (r[j] - mu))) / n
}

/// Leave-one-out nearest-centroid hits using the columns in `cols`.
fn loo_hits(z: &[Vec<f64>], labels: &[usize], classes: usize, cols: &[usize]) -> usize {
    let d = z.first().map_or(0, |r| r.len());
    let mut sums = vec![vec![0.0; d]; classes];
    let mut counts = vec![0usize; classes];
    for (row, &c) in z.iter().zip(labels) {
        counts[c] += 1;
        for &j in cols {
            sums[c][j] += row[j];
        }
    }
    let mut hits = 0;
    for (row, &own) in z.iter().zip(labels) {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..classes {
            let (k, excl) = if c == own {
                (counts[c] - 1, true)
            } else {
                (counts[c], false)
            };
            if k == 0 {
                continue;
            }
            let dist: f64 = cols
                .iter()
                .map(|&j| {
                    let s = if excl { sums[c][j] - row[j] } else { sums[c][j] };
                    let diff = row[j] - s / k as f64;
                    diff * diff
                })
                .sum();
            if best.is_none_or(|(b, _)| dist < b) {
                best = Some((dist, c));
            }
        }
        if best.is_some_and(|(_, c)| c == own) {
            hits += 1;
        }
    }
    hits
}

/// Drops constant and duplicated columns, then removes features one at a time
/// until `k` remain, each time dropping the one whose removal keeps the best
/// leave-one-out nearest-centroid accuracy. Ties drop the alphabetically last
/// name. Returns the retained names in corpus order.
pub fn select_features(corpus: &Corpus, k: usize) -> Result<Vec<String>> {
    corpus.validate()?;
    if corpus.rows.len() < 2 {
        return Err(Error::Precondition(
            "feature selection needs at least two instances".into(),
        ));
    }
    let z = corpus.standardized();
    let d = corpus.names.len();
    let mut keep: Vec<usize> = (0..d).filter(|&j| column_variance(&z, j) >= 1e-9).collect();

    // a column perfectly correlated with another adds nothing
    let n = z.len() as f64;
    let mut dropped = vec![false; d];
    for a in 0..keep.len() {
        for b in a + 1..keep.len() {
            let (ja, jb) = (keep[a], keep[b]);
            if dropped[ja] || dropped[jb] {
                continue;
            }
            let r = neumaier_sum(z.iter().map(|row| row[ja] * row[jb])) / n;
            if r.abs() >= 1.0 - 1e-9 {
                let later = if corpus.names[ja] > corpus.names[jb] { ja } else { jb };
                dropped[later] = true;
            }
        }
    }
    keep.retain(|&j| !dropped[j]);
    if k > keep.len() {
        return Err(Error::Precondition(format!(
            "asked for {k} features but only {} are informative",
            keep.len()
        )));
    }

    let class_of: BTreeMap<&str, usize> = {
        let mut names: Vec<&str> = corpus.labels.iter().map(String::as_str).collect();
        names.sort_unstable();
        names.dedup();
        names.into_iter().enumerate().map(|(i, s)| (s, i)).collect()
    };
    let labels: Vec<usize> = corpus.labels.iter().map(|l| class_of[l.as_str()]).collect();
    while keep.len() > k {
        let mut best: Option<(usize, usize)> = None;
        for (pos, &j) in keep.iter().enumerate() {
            let rest: Vec<usize> = keep.iter().copied().filter(|&x| x != j).collect();
            let hits = loo_hits(&z, &labels, class_of.len(), &rest);
            let better = match best {
                None => true,
                Some((bh, bpos)) => hits > bh || hits == bh && corpus.names[j] > corpus.names[keep[bpos]],
            };
            if better {
                best = Some((hits, pos));
            }
        }
        keep.remove(best.unwrap().1);
    }
    Ok(keep.into_iter().map(|j| corpus.names[j].clone()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D {
    pub names: Vec<String>,
    /// Two rows of length d.
    pub loadings: [Vec<f64>; 2],
    pub points: Vec<(f64, f64)>,
    /// Share of total standardized variance on each axis.
    pub explained_variance: (f64, f64),
}

/// Top two principal directions of the standardized corpus. Each loading
/// row is signed so its largest-magnitude entry is positive.
pub fn project(corpus: &Corpus) -> Result<Projection2D> {
    corpus.validate()?;
    let n = corpus.rows.len();
    let d = corpus.names.len();
    if n < 3 {
        return Err(Error::Precondition("projection needs at least 3 instances".into()));
    }
    if d < 2 {
        return Err(Error::Precondition("projection needs at least 2 features".into()));
    }
    let z = corpus.standardized();
    let live = (0..d).filter(|&j| column_variance(&z, j) >= 1e-9).count();
    if live < 2 {
        return Err(Error::Precondition(format!(
            "standardized corpus has rank below 2 ({live} non-constant features)"
        )));
    }
    let cov = DMatrix::from_fn(d, d, |a, b| neumaier_sum(z.iter().map(|r| r[a] * r[b])) / n as f64);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();

    let axis = |k: usize| -> Vec<f64> {
        let col = eig.eigenvectors.column(order[k]);
        let mut v: Vec<f64> = col.iter().copied().collect();
        let mut lead = 0;
        for j in 1..d {
            if v[j].abs() > v[lead].abs() {
                lead = j;
            }
        }
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    let loadings = [axis(0), axis(1)];
    let dot = |row: &[f64], l: &[f64]| neumaier_sum(row.iter().zip(l).map(|(a, b)| a * b));
    let points = z.iter().map(|r| (dot(r, &loadings[0]), dot(r, &loadings[1]))).collect();
    let share = |k: usize| eig.eigenvalues[order[k]].max(0.0) / total;
    Ok(Projection2D {
        names: corpus.names.clone(),
        loadings,
        points,
        explained_variance: (share(0), share(1)),
    })
}

pub fn features_csv(features: &[FeatureVector]) -> String {
    let mut out = format!("id,label,{}\n", FEATURE_NAMES.join(","));
    for f in features {
        let vals: Vec<String> = f.values.iter().map(|v| format!("{v:.12}")).collect();
        let _ = writeln!(out, "{},{},{}", f.instance_id, f.label, vals.join(","));
    }
    out
}

pub fn projection_csv(corpus: &Corpus, p: &Projection2D) -> String {
    let mut out = String::from("id,label,z1,z2\n");
    for ((id, label), (a, b)) in corpus.ids.iter().zip(&corpus.labels).zip(&p.points) {
        let _ = writeln!(out, "{id},{label},{a:.12},{b:.12}");
    }
    out
}

pub fn loadings_csv(p: &Projection2D) -> String {
    let mut out = String::from("feature,pc1,pc2\n");
    for (j, name) in p.names.iter().enumerate() {
        let _ = writeln!(out, "{name},{:.12},{:.12}", p.loadings[0][j], p.loadings[1][j]);
    }
    let _ = writeln!(
        out,
        "explained_variance,{:.12},{:.12}",
        p.explained_variance.0, p.explained_variance.1
    );
    out
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Static scatter of the projected points coloured by label.
pub fn scatter_svg(corpus: &Corpus, p: &Projection2D) -> String {
    let (w, h, pad) = (640.0, 520.0, 40.0);
    let plot_w = w - 2.0 * pad - 120.0;
    let plot_h = h - 2.0 * pad;
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = p.points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = p.points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        (lo, if hi > lo { hi - lo } else { 1.0 })
    };
    let (x0, xs) = span(|q| q.0);
    let (y0, ys) = span(|q| q.1);
    let mut labels: Vec<&str> = corpus.labels.iter().map(String::as_str).collect();
    labels.sort_unstable();
    labels.dedup();
    let colour = |l: &str| PALETTE[labels.iter().position(|x| *x == l).unwrap() % PALETTE.len()];

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{pad}" y="{pad}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#999"/>"##
    );
    for ((x, y), l) in p.points.iter().zip(&corpus.labels) {
        let cx = pad + (x - x0) / xs * plot_w;
        let cy = pad + plot_h - (y - y0) / ys * plot_h;
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#,
            colour(l)
        );
    }
    for (i, l) in labels.iter().enumerate() {
        let y = pad + 14.0 + 18.0 * i as f64;
        let x = w - pad - 100.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{x}" cy="{}" r="5" fill="{}"/><text x="{}" y="{y}">{l}</text>"#,
            y - 4.0,
            colour(l),
            x + 10.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">z1 ({:.1}%)</text>"#,
        pad + plot_w / 2.0,
        h - 10.0,
        100.0 * p.explained_variance.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">z2 ({:.1}%)</text>"#,
        pad + plot_h / 2.0,
        pad + plot_h / 2.0,
        100.0 * p.explained_variance.1
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Source;

    fn inst(c: u64, items: Vec<u64>) -> Instance {
        Instance::new("t", c, items, Source::Generated).unwrap()
    }

    fn get(f: &FeatureVector, name: &str) -> f64 {
        f.values[FEATURE_NAMES.iter().position(|n| *n == name).unwrap()]
    }

    #[test]
    fn constant_sequence() {
        let f = extract_features(&inst(10, vec![5; 7]), "x");
        assert_eq!(get(&f, "mean"), 0.5);
        for name in [
            "std",
            "slope",
            "entropy",
            "autocorr_lag1",
            "skewness",
            "kurtosis",
            "above_mean_frac",
        ] {
            assert_eq!(get(&f, name), 0.0, "{name}");
        }
    }

    #[test]
    fn increasing_run_and_single_item() {
        let f = extract_features(&inst(10, vec![1, 2, 3, 4]), "x");
        assert_eq!(get(&f, "longest_increasing_run"), 1.0);
        assert!(get(&f, "slope") > 0.0);
        let one = extract_features(&inst(10, vec![4]), "x");
        assert!(one.values.iter().all(|v| v.is_finite()));
        assert_eq!(get(&one, "log_n"), 0.0);
    }

    #[test]
    fn doubling_scale_keeps_features() {
        let a = extract_features(&inst(100, vec![13, 57, 22, 91, 40, 40, 3]), "x");
        let b = extract_features(&inst(200, vec![26, 114, 44, 182, 80, 80, 6]), "x");
        assert_eq!(a.values, b.values);
    }

    fn toy() -> Corpus {
        let rows = vec![
            vec![0.0, 1.0, 5.0, 0.3],
            vec![0.2, 1.1, 5.0, 0.1],
            vec![3.0, 0.9, 5.0, 0.2],
            vec![3.1, 1.0, 5.0, 0.4],
            vec![0.1, 1.2, 5.0, 0.0],
            vec![2.9, 0.8, 5.0, 0.5],
        ];
        Corpus {
            names: ["a", "b", "konst", "d"].map(String::from).to_vec(),
            ids: (0..6).map(|i| format!("i{i}")).collect(),
            labels: ["p", "p", "q", "q", "p", "q"].map(String::from).to_vec(),
            rows,
        }
    }

    #[test]
    fn selection() {
        let c = toy();
        assert_eq!(select_features(&c, 1).unwrap(), vec!["a".to_string()]);
        assert_eq!(select_features(&c, 3).unwrap().len(), 3);
        assert!(!select_features(&c, 3).unwrap().contains(&"konst".to_string()));
        assert!(select_features(&c, 4).is_err());
    }

    #[test]
    fn duplicate_columns_keep_one() {
        let mut c = toy();
        c.names.push("a_copy".into());
        for r in &mut c.rows {
            r.push(r[0] * 2.0 + 1.0);
        }
        let kept = select_features(&c, 3).unwrap();
        assert!(!(kept.contains(&"a".into()) && kept.contains(&"a_copy".into())));
    }

    #[test]
    fn projection_basics() {
        let c = toy().restrict(&["a".into(), "b".into(), "d".into()]).unwrap();
        let p = project(&c).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let dot: f64 = p.loadings[a].iter().zip(&p.loadings[b]).map(|(x, y)| x * y).sum();
                assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
        assert!(p.explained_variance.0 >= p.explained_variance.1);
        assert!(project(&toy().restrict(&["konst".into(), "a".into()]).unwrap()).is_err());
    }
}
