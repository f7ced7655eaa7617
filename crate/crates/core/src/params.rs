//! Construction parameters and seed derivation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("edge-deletion budget r must be at least 1 (got {0})")]
    BudgetTooSmall(usize),
    #[error("target chromatic number k must be at least 2 (got {0})")]
    ChromaticTooSmall(usize),
    #[error("constant C must be positive and finite (got {0})")]
    BadConstant(f64),
    #[error("parameters too large: {0}")]
    Overflow(&'static str),
}

/// Every quantity the construction derives from `(r, k, C)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    /// Number of edges that may be deleted.
    pub r: usize,
    /// Uniformity of the sampled hypergraph, `r + 3`.
    pub s: usize,
    /// Sparsity window, `2^(s+1)`.
    pub m: usize,
    /// Target chromatic number.
    pub k: usize,
    /// Vertex count, `s(k-1) + 1`.
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    /// Amplification rounds, `ceil(2 log2 n)`.
    pub l: usize,
    /// Single-round probability evaluated at `n - 1`.
    pub p: f64,
    /// Sampling probability, `min(1, l p)`.
    pub q: f64,
}

/// `2 (s-1)!`, twice the sharp perfect-matching constant.
pub fn default_constant(s: usize) -> f64 {
    2.0 * (1..s).map(|i| i as f64).product::<f64>()
}

/// `min(1, C ln(n) / n^(s-1))`.
pub fn shamir_p(n: usize, s: usize, c: f64) -> f64 {
    let p = c * (n as f64).ln() / (n as f64).powi(s as i32 - 1);
    p.min(1.0)
}

/// Smallest `l` with `2^l >= n^2`, i.e. `ceil(2 log2 n)` computed exactly.
pub fn amplification_rounds(n: usize) -> usize {
    let sq = (n as u128) * (n as u128);
    if sq <= 1 {
        0
    } else {
        (128 - (sq - 1).leading_zeros()) as usize
    }
}

pub fn derive_params(r: usize, k: usize, c: f64) -> Result<ConstructionParams, ParamError> {
    if r < 1 {
        return Err(ParamError::BudgetTooSmall(r));
    }
    if k < 2 {
        return Err(ParamError::ChromaticTooSmall(k));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(ParamError::BadConstant(c));
    }
    let s = r + 3;
    let m = u32::try_from(s + 1)
        .ok()
        .and_then(|e| 1usize.checked_shl(e))
        .filter(|&m| m > 0)
        .ok_or(ParamError::Overflow("sparsity window 2^(s+1)"))?;
    let n = (k - 1)
        .checked_mul(s)
        .and_then(|x| x.checked_add(1))
        .ok_or(ParamError::Overflow("vertex count s(k-1)+1"))?;
    let l = amplification_rounds(n);
    let p = shamir_p(n - 1, s, c);
    let q = (l as f64 * p).min(1.0);
    Ok(ConstructionParams { r, s, m, k, n, c, l, p, q })
}

/// A 64-bit seed. Sub-seeds are derived by seeding ChaCha8 with the parent
/// value, selecting the ChaCha stream given by the derivation index, and
/// taking the first output word; sampling reads from `ChaCha8Rng::seed_from_u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn derive(self, index: u64) -> Seed {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        Seed(rng.next_u64())
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_params_examples() {
        let a = derive_params(1, 6, 12.0).unwrap();
        assert_eq!((a.s, a.m, a.n), (4, 32, 21));
        let b = derive_params(2, 6, 48.0).unwrap();
        assert_eq!((b.s, b.m, b.n), (5, 64, 26));
        let c = derive_params(1, 2, 12.0).unwrap();
        assert_eq!((c.s, c.m, c.n), (4, 32, 5));
    }

    #[test]
    fn derive_params_rejects_bad_input() {
        assert_eq!(derive_params(0, 6, 12.0), Err(ParamError::BudgetTooSmall(0)));
        assert_eq!(derive_params(1, 1, 12.0), Err(ParamError::ChromaticTooSmall(1)));
        assert!(matches!(derive_params(1, 4, 0.0), Err(ParamError::BadConstant(_))));
        assert!(matches!(derive_params(1, 4, f64::NAN), Err(ParamError::BadConstant(_))));
        assert!(matches!(derive_params(70, 4, 1.0), Err(ParamError::Overflow(_))));
    }

    #[test]
    fn derived_fields_are_consistent() {
        let p = derive_params(1, 16, 12.0).unwrap();
        assert_eq!(p.n, 61);
        assert_eq!(p.n % p.s, 1);
        assert_eq!(p.l, 12); // 2^11 = 2048 < 3721 <= 4096
        let expected = 12.0 * 60f64.ln() / 60f64.powi(3);
        assert!((p.p - expected).abs() < 1e-15);
        assert!((p.q - 12.0 * expected).abs() < 1e-15);
    }

    #[test]
    fn amplification_rounds_matches_float_formula() {
        for n in 2..5000usize {
            let float = (2.0 * (n as f64).log2()).ceil() as usize;
            assert_eq!(amplification_rounds(n), float, "n = {n}");
        }
    }

    #[test]
    fn shamir_p_examples() {
        assert!((shamir_p(16, 2, 1.0) - 0.17329).abs() < 5e-6);
        assert_eq!(shamir_p(2, 2, 100.0), 1.0);
        // 4 ln 27 / 729 = 0.01808415...
        assert!((shamir_p(27, 3, 4.0) - 0.0180842).abs() < 1e-7);
    }

    #[test]
    fn default_constant_doubles_factorial() {
        assert_eq!(default_constant(3), 4.0);
        assert_eq!(default_constant(4), 12.0);
        assert_eq!(default_constant(5), 48.0);
    }

    #[test]
    fn seed_derivation_is_stable_and_distinct() {
        let s = Seed(7);
        assert_eq!(s.derive(3), s.derive(3));
        assert_ne!(s.derive(3), s.derive(4));
        assert_ne!(s.derive(0), Seed(7));
    }
}
