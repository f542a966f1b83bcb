//! Longest-common-prefix similarity and the ultrametric it induces.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Sequence, Symbol};
use crate::error::{Error, Result};

/// Length of a shared prefix, in symbols. Always within `[0, L]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LcpValue(u32);

impl LcpValue {
    pub const ZERO: LcpValue = LcpValue(0);

    pub fn new(value: u32) -> Self {
        LcpValue(value)
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for LcpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of leading positions on which `a` and `b` agree.
///
/// No shape checks; callers guarantee equal lengths where it matters.
#[inline]
pub fn common_prefix_len(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn check_pair(s: &Sequence, t: &Sequence) -> Result<()> {
    if s.alphabet() != t.alphabet() {
        return Err(Error::invalid(format!(
            "alphabet mismatch: {} vs {}",
            s.alphabet(),
            t.alphabet()
        )));
    }
    if s.len() != t.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            s.len(),
            t.len()
        )));
    }
    Ok(())
}

/// Largest `j` such that the first `j` symbols of `s` and `t` agree.
pub fn lcp(s: &Sequence, t: &Sequence) -> Result<LcpValue> {
    check_pair(s, t)?;
    Ok(LcpValue(common_prefix_len(s.symbols(), t.symbols()) as u32))
}

/// `L - lcp(s, t)`. Satisfies the strong triangle inequality.
pub fn ultrametric_distance(s: &Sequence, t: &Sequence) -> Result<u32> {
    let shared = lcp(s, t)?;
    Ok(s.len() as u32 - shared.get())
}
