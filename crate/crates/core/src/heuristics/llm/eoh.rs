//! EoH: utilisation-weighted square-root slack plus an exponentially
//! decaying exact-fit bonus.
//!
//! Source: the online bin-packing heuristic published with Evolution of
//! Heuristics (FeiLiu36/EoH):
//!
//! ```python
//! def score(item, bins):
//!     diff = bins-item
//!     exp = np.exp(diff)
//!     sqrt = np.sqrt(diff)
//!     ulti = 1-diff/bins
//!     comb = ulti * sqrt
//!     adjust = np.where(diff > (item * 3), comb + 0.8, comb + 0.3)
//!     hybrid_exp = bins / ((exp + 0.7) *exp)
//!     scores = hybrid_exp + adjust
//!     return scores
//! ```
//!
//! Parameters: `gap_factor` (3), `wide_gap_add` (0.8), `narrow_gap_add` (0.3),
//! `exp_add` (0.7).

pub const DEFAULTS: [f64; 4] = [3.0, 0.8, 0.3, 0.7];

pub(super) fn score(item: f64, remaining: &[u64], params: &[f64], out: &mut Vec<f64>) {
    let [gap_factor, wide_add, narrow_add, exp_add] = [params[0], params[1], params[2], params[3]];
    out.extend(remaining.iter().map(|&bin| {
        let bins = bin as f64;
        let diff = bins - item;
        let exp = diff.exp();
        let sqrt = diff.sqrt();
        let ulti = 1.0 - diff / bins;
        let comb = ulti * sqrt;
        let adjust = if diff > item * gap_factor {
            comb + wide_add
        } else {
            comb + narrow_add
        };
        // exp overflows to inf for wide gaps; bins / inf == 0 as in numpy
        let hybrid_exp = bins / ((exp + exp_add) * exp);
        hybrid_exp + adjust
    }));
}
