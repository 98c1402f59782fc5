//! Classes of the elementary varieties that appear as fibres and strata:
//! projective spaces, complements of nested projective subspaces, and
//! symmetric powers of punctured projective lines.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// Motivic dimension of `P(A) \ P(A')` for subspaces of codimension `a` and
/// `a + b`: `q^a + q^(a+1) + ... + q^(a+b-1)`.
pub fn qgeom(a: u64, b: u64) -> LaurentPoly {
    LaurentPoly::from_terms((a..a + b).map(|k| (-(k as i64), 1)))
}

/// Class of `P^(d-1)`: `1 + L + ... + L^(d-1)`; zero for `d = 0`.
pub fn projective_class(d: u64) -> LaurentPoly {
    LaurentPoly::from_terms((0..d).map(|k| (k as i64, 1)))
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Class of the `n`-th symmetric power of `P^1` minus `2 - chi` points.
///
/// Coefficient of `t^n` in `(sum_k L^k t^k) * (1 - t)^(1 - chi)`; `chi = 2`
/// gives `S^n P^1 = P^n`.
pub fn sym_power_class(chi: i64, n: u64) -> Result<LaurentPoly> {
    if chi > 2 {
        return Err(Error::InvalidInput(format!(
            "Euler characteristic {chi} exceeds that of P^1"
        )));
    }
    let n_i = n as i64;
    if chi == 2 {
        return Ok(projective_class(n + 1));
    }
    let e = (1 - chi) as u64;
    let mut out = LaurentPoly::zero();
    for j in 0..=n.min(e) {
        let c = binomial(e, j);
        let c = if j % 2 == 0 { c } else { -c };
        out.add_term(n_i - j as i64, c);
    }
    Ok(out)
}
