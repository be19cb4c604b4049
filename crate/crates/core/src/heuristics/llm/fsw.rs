//! FSW: three power terms with a sign flip and a neighbour difference.
//!
//! Source: the Weibull heuristic published with FunSearch
//! (google-deepmind/funsearch):
//!
//! ```python
//! def priority(item: float, bins: np.ndarray) -> np.ndarray:
//!   max_bin_cap = max(bins)
//!   score = (bins - max_bin_cap)**2 / item + bins**2 / (item**2) + bins**2 / (item**3)
//!   score[bins > item] = -score[bins > item]
//!   score[1:] -= score[:-1]
//!   return score
//! ```
//!
//! Parameters `p0..p4` are the five exponents `2, 2, 2, 2, 3` in reading order.
//! The difference in the last line uses the pre-subtraction scores, as
//! numpy's overlap handling does.

pub const DEFAULTS: [f64; 5] = [2.0, 2.0, 2.0, 2.0, 3.0];

pub(super) fn score(item: f64, remaining: &[u64], params: &[f64], out: &mut Vec<f64>) {
    let p: Vec<i32> = params.iter().map(|&v| v as i32).collect();
    let max_bin_cap = remaining.iter().copied().max().unwrap_or(0) as f64;
    out.extend(remaining.iter().map(|&bin| {
        let b = bin as f64;
        let s = (b - max_bin_cap).powi(p[0]) / item + b.powi(p[1]) / item.powi(p[2]) + b.powi(p[3]) / item.powi(p[4]);
        if b > item {
            -s
        } else {
            s
        }
    }));
    for i in (1..out.len()).rev() {
        out[i] -= out[i - 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_hand_evaluation() {
        let mut out = Vec::new();
        score(2.0, &[2, 4], &DEFAULTS, &mut out);
        // bin 2: (2-4)^2/2 + 4/4 + 4/8 = 2 + 1 + 0.5 = 3.5 (exact fit, kept positive)
        // bin 4: -(0 + 16/4 + 16/8) = -6, minus previous 3.5
        assert_eq!(out, vec![3.5, -9.5]);
    }

    #[test]
    fn repeated_fresh_bins_difference_to_zero() {
        let mut out = Vec::new();
        score(10.0, &[30, 100, 100, 100], &DEFAULTS, &mut out);
        assert_eq!(out[2], 0.0);
        assert_eq!(out[3], 0.0);
    }
}
