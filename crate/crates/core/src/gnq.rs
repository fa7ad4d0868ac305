//! The polynomials `g_{n,q}` defined by
//! `sum_{a in F_q} (x + a)^n = g_{n,q}(x^q - x)` and the classification of
//! desirable triples `(q^{2i} - q - 1, 2; q)`.

use std::sync::Arc;

use thiserror::Error;

use crate::binom_mod::binom_lucas;
use crate::ffield::{FieldCtx, FieldError, PrimePowerDesc};
use crate::fpoly::{DensePoly, PolyError};
use crate::permtest::is_pp_bruteforce;
use crate::report::CheckRecord;

/// Largest `n` for which `g_{n,q}` is computed directly.
pub const DEFAULT_MAX_N: u64 = 30_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GnqError {
    #[error("n = {n} exceeds the degree bound {bound}")]
    DegreeBound { n: u64, bound: u64 },
    #[error("polynomial is not a polynomial in x^q - x (residual at degree {0})")]
    NotComposite(usize),
    #[error("coefficient of y^{0} lies outside the prime field")]
    OutsidePrimeField(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone)]
pub struct GnqResult {
    pub n: u64,
    pub desc: PrimePowerDesc,
    /// `g_{n,q}` in the variable `y = x^q - x`.
    pub g: DensePoly,
    /// `g` reduced modulo `x^{q^2} - x`.
    pub reduced: DensePoly,
}

fn check_bound(n: u64) -> Result<(), GnqError> {
    if n > DEFAULT_MAX_N {
        return Err(GnqError::DegreeBound {
            n,
            bound: DEFAULT_MAX_N,
        });
    }
    Ok(())
}

/// `sum_{a in F_q} (x + a)^n`, expanded as
/// `sum_k C(n, k) (sum_a a^{n-k}) x^k`. The inner sum is `-1` when
/// `n - k > 0` and `(q-1) | (n - k)`, and `0` otherwise.
pub fn gnq_lhs(n: u64, fq: &Arc<FieldCtx>) -> Result<DensePoly, GnqError> {
    check_bound(n)?;
    let q = fq.order();
    let p = fq.characteristic();
    let minus_one = fq.neg(fq.one());
    let mut coeffs = vec![fq.zero(); n as usize + 1];
    let mut m = q - 1;
    while m <= n {
        let k = n - m;
        let c = binom_lucas(n, k, p);
        if c != 0 {
            coeffs[k as usize] = fq.mul(minus_one, fq.from_u64(c));
        }
        m += q - 1;
    }
    Ok(DensePoly::new(fq, coeffs))
}

/// Solves `g(x^q - x) = h` by peeling the top power of `x^q - x`: the
/// leading term of `(x^q - x)^d` is `x^{qd}`, and
/// `(x^q - x)^d = sum_j C(d, j) (-1)^{d-j} x^{(q-1)j + d}`.
pub fn gnq_decompose(h: &DensePoly, fq: &Arc<FieldCtx>) -> Result<DensePoly, GnqError> {
    let q = fq.order() as usize;
    let p = fq.characteristic();
    let lifted;
    let h = if h.ctx().id() == fq.id() {
        h
    } else {
        lifted = h.lift_to(fq)?;
        &lifted
    };
    let Some(deg) = h.degree() else {
        return Ok(DensePoly::zero(fq));
    };
    let top = deg / q;
    let mut residual = h.coeffs().to_vec();
    let mut g = vec![fq.zero(); top + 1];
    for d in (0..=top).rev() {
        let c = residual.get(q * d).copied().unwrap_or_else(|| fq.zero());
        if c.is_zero() {
            continue;
        }
        if fq.prime_residue(c).is_none() {
            return Err(GnqError::OutsidePrimeField(d));
        }
        g[d] = c;
        for j in 0..=d as u64 {
            let b = binom_lucas(d as u64, j, p);
            if b == 0 {
                continue;
            }
            let mut term = fq.mul(c, fq.from_u64(b));
            if (d as u64 - j) % 2 == 1 {
                term = fq.neg(term);
            }
            let idx = (q - 1) * j as usize + d;
            residual[idx] = fq.sub(residual[idx], term);
        }
    }
    if let Some(bad) = residual.iter().position(|c| !c.is_zero()) {
        return Err(GnqError::NotComposite(bad));
    }
    Ok(DensePoly::new(fq, g))
}

pub fn gnq_compute(n: u64, fq: &Arc<FieldCtx>) -> Result<GnqResult, GnqError> {
    let h = gnq_lhs(n, fq)?;
    let g = gnq_decompose(&h, fq)?;
    let reduced = g.reduce_mod_field(2);
    Ok(GnqResult {
        n,
        desc: fq.desc(),
        g,
        reduced,
    })
}

/// `q^{2i} - q - 1`, if it fits.
pub fn section4_degree(q: u64, i: u32) -> Option<u64> {
    q.checked_pow(2 * i)?.checked_sub(q + 1)
}

/// `(i-1) x^{q^2-q-1} - i x^{q-2}` over `F_q`.
pub fn section4_expected(fq: &Arc<FieldCtx>, i: u64) -> DensePoly {
    let q = fq.order() as usize;
    let i = i as i64;
    DensePoly::from_terms(
        fq,
        &[
            (q * q - q - 1, fq.from_int(i - 1)),
            (q - 2, fq.neg(fq.from_int(i))),
        ],
    )
}

/// Compares `g_{q^{2i}-q-1, q} mod (x^{q^2} - x)` with the expected
/// binomial; out-of-bound degrees come back skipped.
pub fn section4_congruence_check(fq: &Arc<FieldCtx>, i: u32) -> CheckRecord {
    let q = fq.order();
    let params = [("q", q.to_string()), ("i", i.to_string())];
    let check = "gnq.congruence";
    let Some(n) = section4_degree(q, i).filter(|&n| n <= DEFAULT_MAX_N) else {
        return CheckRecord::skipped(
            check,
            &params,
            format!("q^(2i)-q-1 exceeds the degree bound {DEFAULT_MAX_N}"),
        );
    };
    let expected = section4_expected(fq, i as u64);
    match gnq_compute(n, fq) {
        Ok(res) => CheckRecord::compare(check, &params, &expected, &res.reduced),
        Err(e) => CheckRecord::outcome(check, &params, &expected, format!("error: {e}"), false),
    }
}

/// True iff `g_{n,q}` permutes `F_{q^e}`, by enumeration.
pub fn is_desirable(n: u64, e: u32, fq: &Arc<FieldCtx>) -> Result<bool, GnqError> {
    let res = gnq_compute(n, fq)?;
    let desc = fq.desc();
    let big = FieldCtx::new(desc.p(), desc.e() * e)?;
    let g = res.g.lift_to(&big)?.reduce_mod_field(1);
    Ok(is_pp_bruteforce(&g).is_pp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Thm41Verdict {
    /// `i = 0` or `1 (mod p)`; no claim is made.
    Excluded,
    CaseI,
    CaseII,
    CaseIII,
    None,
}

impl Thm41Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Thm41Verdict::Excluded => "excluded",
            Thm41Verdict::CaseI => "case-i",
            Thm41Verdict::CaseII => "case-ii",
            Thm41Verdict::CaseIII => "case-iii",
            Thm41Verdict::None => "none",
        }
    }

    pub fn is_desirable(&self) -> Option<bool> {
        match self {
            Thm41Verdict::Excluded => None,
            Thm41Verdict::None => Some(false),
            _ => Some(true),
        }
    }
}

/// Predicts whether `(q^{2i} - q - 1, 2; q)` is desirable.
pub fn thm41_classify(desc: PrimePowerDesc, i: u64) -> Thm41Verdict {
    let (p, q) = (desc.p(), desc.q());
    let r = i % p;
    if r == 0 || r == 1 {
        return Thm41Verdict::Excluded;
    }
    if (2 * r) % p == 1 && q % 4 == 1 {
        Thm41Verdict::CaseI
    } else if (2 * r + 1) % p == 0 && (q % 12 == 1 || q % 12 == 11) {
        Thm41Verdict::CaseII
    } else if (4 * r) % p == 1 && q % 6 == 5 {
        Thm41Verdict::CaseIII
    } else {
        Thm41Verdict::None
    }
}

/// The `t` with `(i-1) x^{q^2-q-1} - i x^{q-2} = -i (x^{q-2} + t x^{q^2-q-1})`,
/// namely `t = (1 - i) / i`. Needs `i != 0 (mod p)`.
pub fn equivalent_t(fq: &FieldCtx, i: u64) -> Result<crate::ffield::FieldElement, FieldError> {
    let iv = fq.from_u64(i);
    fq.div(fq.sub(fq.one(), iv), iv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Arc<FieldCtx> {
        FieldCtx::for_order(q).unwrap()
    }

    #[test]
    fn lhs_examples() {
        for q in [3, 5, 7, 9] {
            assert!(gnq_lhs(1, &f(q)).unwrap().is_zero());
            assert!(gnq_lhs(0, &f(q)).unwrap().is_zero());
        }
        let f3 = f(3);
        assert_eq!(gnq_lhs(5, &f3).unwrap(), DensePoly::from_ints(&f3, &[0, 1, 0, 2]));
        assert!(matches!(
            gnq_lhs(30_001, &f3),
            Err(GnqError::DegreeBound { .. })
        ));
    }

    #[test]
    fn lhs_matches_direct_summation() {
        // Oracle: sum_a (x+a)^n by repeated polynomial multiplication.
        for q in [3u64, 4, 5, 9] {
            let fq = f(q);
            for n in [0u64, 1, 2, 5, 8, 13, 20, 33] {
                let mut total = DensePoly::zero(&fq);
                for a in fq.elements() {
                    let lin = DensePoly::new(&fq, vec![a, fq.one()]);
                    let mut pw = DensePoly::constant(&fq, fq.one());
                    for _ in 0..n {
                        pw = pw.mul(&lin).unwrap();
                    }
                    total = total.add(&pw).unwrap();
                }
                assert_eq!(gnq_lhs(n, &fq).unwrap(), total, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f3 = f(3);
        assert!(gnq_decompose(&DensePoly::zero(&f3), &f3).unwrap().is_zero());
        let h = DensePoly::from_ints(&f3, &[0, 1, 0, 2]);
        assert_eq!(gnq_decompose(&h, &f3).unwrap(), DensePoly::from_ints(&f3, &[0, 2]));
        let frob = DensePoly::from_ints(&f3, &[0, -1, 0, 1]);
        assert_eq!(gnq_decompose(&frob, &f3).unwrap(), DensePoly::x(&f3));
        let bad = DensePoly::from_ints(&f3, &[0, 0, 1]);
        assert!(matches!(gnq_decompose(&bad, &f3), Err(GnqError::NotComposite(_))));
        let f9 = f(9);
        let outside = DensePoly::new(&f9, vec![f9.element(4).unwrap()]);
        assert!(matches!(
            gnq_decompose(&outside, &f9),
            Err(GnqError::OutsidePrimeField(0))
        ));
    }

    #[test]
    fn compute_examples() {
        let f3 = f(3);
        let g5 = gnq_compute(5, &f3).unwrap();
        assert_eq!(g5.reduced, DensePoly::from_ints(&f3, &[0, 2]));
        for q in [3, 5, 7, 9] {
            assert!(gnq_compute(1, &f(q)).unwrap().g.is_zero());
        }
        let g77 = gnq_compute(77, &f3).unwrap();
        assert_eq!(g77.reduced, DensePoly::from_ints(&f3, &[0, 1, 0, 0, 0, 1]));
    }

    #[test]
    fn congruence_examples() {
        assert!(section4_congruence_check(&f(3), 1).pass);
        assert!(section4_congruence_check(&f(3), 2).pass);
        let r = section4_congruence_check(&f(5), 1);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.expected, "4*x^3");
        let skipped = section4_congruence_check(&f(3), 5);
        assert!(skipped.skipped && !skipped.pass);
    }

    #[test]
    fn desirable_examples() {
        assert!(is_desirable(5, 2, &f(3)).unwrap());
        assert!(!is_desirable(77, 2, &f(3)).unwrap());
        assert!(!is_desirable(19, 2, &f(5)).unwrap());
    }

    #[test]
    fn thm41_examples() {
        let d = |q| PrimePowerDesc::from_order(q).unwrap();
        assert_eq!(thm41_classify(d(7), 4), Thm41Verdict::None);
        assert_eq!(thm41_classify(d(13), 6), Thm41Verdict::CaseII);
        assert_eq!(thm41_classify(d(3), 2), Thm41Verdict::None);
        assert_eq!(thm41_classify(d(5), 6), Thm41Verdict::Excluded);
        assert_eq!(thm41_classify(d(5), 10), Thm41Verdict::Excluded);
        assert_eq!(thm41_classify(d(5), 3), Thm41Verdict::CaseI);
    }
}
