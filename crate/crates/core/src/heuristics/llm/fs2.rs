//! FS2: penalise roomy bins, then reward the tightest bin by item size.
//!
//! Source: the OR-Library heuristic published with FunSearch
//! (google-deepmind/funsearch):
//!
//! ```python
//! def heuristic(item: float, bins: np.ndarray) -> np.ndarray:
//!   score = 1000 * np.ones(bins.shape)
//!   # Penalize bins with large capacities.
//!   score -= bins * (bins - item)
//!   # Extract index of bin with best fit.
//!   index = np.argmin(bins)
//!   # Scale score of best fit bin by item size.
//!   score[index] *= item
//!   # Penalize best fit bin if fit is not tight.
//!   score[index] -= (bins[index] - item)**4
//!   return score
//! ```
//!
//! Parameters: `penalty` (1000) and `power` (4).

pub const DEFAULTS: [f64; 2] = [1000.0, 4.0];

pub(super) fn score(item: f64, remaining: &[u64], params: &[f64], out: &mut Vec<f64>) {
    let (penalty, power) = (params[0], params[1] as i32);
    out.extend(remaining.iter().map(|&bin| {
        let bin = bin as f64;
        penalty - bin * (bin - item)
    }));
    // np.argmin: first minimum
    let mut index = None::<usize>;
    for (i, &bin) in remaining.iter().enumerate() {
        if index.is_none_or(|j| bin < remaining[j]) {
            index = Some(i);
        }
    }
    if let Some(i) = index {
        out[i] *= item;
        out[i] -= (remaining[i] as f64 - item).powi(power);
    }
}
