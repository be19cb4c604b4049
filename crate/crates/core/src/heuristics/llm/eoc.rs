//! EoC: the code-only Evolution of Heuristics variant.
//!
//! The body has not been transcribed: its source was not available when
//! this crate was written. The parameter space (two integers) is declared so
//! the tuner and registry can describe it, and every attempt to score
//! reports [`Error::NotImplemented`] instead of substituting another rule.

use crate::error::{Error, Result};

pub const TRANSCRIBED: bool = false;

pub(super) fn score(
    _item: f64,
    _remaining: &[u64],
    _capacity: u64,
    _params: &[f64],
    _out: &mut Vec<f64>,
) -> Result<()> {
    Err(Error::NotImplemented("EoC".into()))
}
