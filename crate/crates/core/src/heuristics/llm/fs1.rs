//! FS1: threshold ladder over the slack left after packing.
//!
//! Source: the OR-Library heuristic in the FunSearch bin-packing notebook
//! (google-deepmind/funsearch, `bin_packing/bin_packing.ipynb`):
//!
//! ```python
//! def s(bin, item):
//!   if bin - item <= 2:      return 4
//!   elif (bin - item) <= 3:  return 3
//!   elif (bin - item) <= 5:  return 2
//!   elif (bin - item) <= 7:  return 1
//!   elif (bin - item) <= 9:  return 0.9
//!   elif (bin - item) <= 12: return 0.95
//!   elif (bin - item) <= 15: return 0.97
//!   elif (bin - item) <= 18: return 0.98
//!   elif (bin - item) <= 20: return 0.98
//!   elif (bin - item) <= 21: return 0.98
//!   else:                    return 0.99
//! return np.array([s(b, item) for b in bins])
//! ```
//!
//! Parameters: thresholds `x0..x9` then scores `y0..y9`. The final `else`
//! score is a fixed constant.

pub const DEFAULTS: [f64; 20] = [
    2.0, 3.0, 5.0, 7.0, 9.0, 12.0, 15.0, 18.0, 20.0, 21.0, // x
    4.0, 3.0, 2.0, 1.0, 0.9, 0.95, 0.97, 0.98, 0.98, 0.98, // y
];

pub const ELSE_SCORE: f64 = 0.99;

pub(super) fn score(item: f64, remaining: &[u64], params: &[f64], out: &mut Vec<f64>) {
    let (x, y) = params.split_at(10);
    out.extend(remaining.iter().map(|&bin| {
        let slack = bin as f64 - item;
        x.iter()
            .zip(y)
            .find(|(&threshold, _)| slack <= threshold)
            .map_or(ELSE_SCORE, |(_, &s)| s)
    }));
}
