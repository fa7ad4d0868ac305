//! Binomial coefficients modulo `p` with integer and half-integer tops,
//! the closed form for the power sums of `x^{q-2} + t*x^{q^2-q-1}`, and the
//! classifier for when that binomial permutes `F_{q^2}`.
//!
//! A half-integer `z` is reduced to the integer `z'` in `[0, q-1]` with
//! `2z' = 2z (mod q)`. Since `q/2` lies in `q*Z_p` for odd `q`, this is the
//! representative for which `C(z, a) = C(z', a) (mod p)` whenever
//! `0 <= a <= q-1`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ffield::{FieldCtx, FieldElement, FieldError, PrimePowerDesc};
use crate::permtest::permutation_binomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinomError {
    #[error("lower index {a} outside 0..={max}")]
    LowerOutOfRange { a: u64, max: u64 },
    #[error("half-integer argument needs odd q, got q = {0}")]
    HalfIntegerEvenQ(u64),
    #[error("need 0 < alpha + beta*q < q^2 - 1 with 0 <= alpha, beta <= q-1 (alpha = {alpha}, beta = {beta}, q = {q})")]
    ExponentOutOfRange { alpha: u64, beta: u64, q: u64 },
    #[error("alpha = {alpha} must be odd with 0 < alpha < q - 1 = {}", q - 1)]
    BadAlpha { alpha: u64, q: u64 },
    #[error("t must be nonzero")]
    ZeroT,
    #[error("q must be odd, got {0}")]
    EvenQ(u64),
    #[error("q must exceed 2, got {0}")]
    SmallQ(u64),
    #[error("field sum left the subfield F_q")]
    NotInSubfield,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `C(m, a) mod p` from the base-`p` digits of `m` and `a`.
pub fn binom_lucas(mut m: u64, mut a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while a > 0 || m > 0 {
        let (mi, ai) = (m % p, a % p);
        if ai > mi {
            return 0;
        }
        acc = acc * small_binom_mod(mi, ai, p) % p;
        m /= p;
        a /= p;
    }
    acc % p
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// `C(m, a) mod p` for `0 <= a <= m < p`.
fn small_binom_mod(m: u64, a: u64, p: u64) -> u64 {
    let a = a.min(m - a);
    let mut num = 1u64;
    let mut den = 1u64;
    for j in 0..a {
        num = num * ((m - j) % p) % p;
        den = den * ((j + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

/// A rational number `z` stored as the integer `2z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwiceInt(BigInt);

impl TwiceInt {
    pub fn from_int(z: i64) -> Self {
        TwiceInt(BigInt::from(z) * 2)
    }

    pub fn from_bigint(z: &BigInt) -> Self {
        TwiceInt(z * 2)
    }

    /// The value `twice / 2`.
    pub fn from_twice(twice: impl Into<BigInt>) -> Self {
        TwiceInt(twice.into())
    }

    pub fn twice(&self) -> &BigInt {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_even()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| &self.0 / 2)
    }

    /// `z + n` for an integer `n`.
    pub fn plus_int(&self, n: &BigInt) -> Self {
        TwiceInt(&self.0 + n * 2)
    }
}

impl fmt::Display for TwiceInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_integer() {
            Some(z) => write!(f, "{z}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

/// `C(z, a) mod p` for `z` in `Z` or `Z[1/2]`, via the representative of
/// `z` modulo `q` in `[0, q-1]`.
pub fn binom_padic(z: &TwiceInt, a: u64, desc: PrimePowerDesc) -> Result<u64, BinomError> {
    let q = desc.q();
    if a > q - 1 {
        return Err(BinomError::LowerOutOfRange { a, max: q - 1 });
    }
    let qb = BigInt::from(q);
    let rep = match z.to_integer() {
        Some(n) => n.mod_floor(&qb),
        None => {
            if !desc.is_odd() {
                return Err(BinomError::HalfIntegerEvenQ(q));
            }
            let inv2 = BigInt::from((q + 1) / 2);
            (z.twice().mod_floor(&qb) * inv2).mod_floor(&qb)
        }
    };
    let rep = rep.to_u64().expect("representative below q");
    Ok(binom_lucas(rep, a, desc.p()))
}

/// Exact starred binomial: `C(z, a)` for integer `z` (any sign), and `0`
/// when `z` is not an integer.
pub fn binom_star_exact(z: &TwiceInt, a: u64) -> BigInt {
    let Some(z) = z.to_integer() else {
        return BigInt::zero();
    };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..a {
        num *= &z - BigInt::from(j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

fn check_exponent(desc: PrimePowerDesc, alpha: u64, beta: u64) -> Result<(), BinomError> {
    let q = desc.q();
    let s = alpha as u128 + beta as u128 * q as u128;
    if alpha > q - 1 || beta > q - 1 || s == 0 || s >= (q as u128 * q as u128 - 1) {
        return Err(BinomError::ExponentOutOfRange { alpha, beta, q });
    }
    Ok(())
}

fn sign(fq: &FieldCtx, exponent: u64) -> FieldElement {
    if exponent % 2 == 0 {
        fq.one()
    } else {
        fq.neg(fq.one())
    }
}

/// Closed form for `sum_{x in F_{q^2}^*} f(x)^{alpha + beta*q}` with
/// `f = x^{q-2} + t*x^{q^2-q-1}`, evaluated in `F_q` (odd `q`).
pub fn power_sum_closed(
    fq: &Arc<FieldCtx>,
    t: FieldElement,
    alpha: u64,
    beta: u64,
) -> Result<FieldElement, BinomError> {
    let desc = fq.desc();
    let q = desc.q();
    if !desc.is_odd() {
        return Err(BinomError::EvenQ(q));
    }
    check_exponent(desc, alpha, beta)?;
    if t.is_zero() {
        return Err(BinomError::ZeroT);
    }
    if alpha + beta != q - 1 {
        return Ok(fq.zero());
    }
    // Even alpha: every starred binomial has a half-integer top.
    if alpha % 2 == 0 {
        return Ok(fq.zero());
    }
    let top0 = (3 * alpha - 1) / 2;
    let shift = (q + 1) / 2;
    let mut first = fq.zero();
    let mut second = fq.zero();
    for i in 0..=alpha {
        let c = fq.from_u64(binom_lucas(alpha, i, desc.p()));
        if c.is_zero() {
            continue;
        }
        let sgn = sign(fq, i);
        let b1 = binom_padic(&TwiceInt::from_int((top0 - i) as i64), alpha, desc)?;
        let b2 = binom_padic(&TwiceInt::from_int((top0 - i + shift) as i64), alpha, desc)?;
        let base = fq.mul(c, sgn);
        let t2i = fq.pow(t, 2 * i);
        first = fq.add(first, fq.mul(fq.mul(base, fq.from_u64(b1)), fq.mul(t2i, t)));
        second = fq.add(second, fq.mul(fq.mul(base, fq.from_u64(b2)), t2i));
    }
    let lead = fq.mul(sign(fq, (q + 1) / 2), fq.pow(t, (q - 1) / 2));
    let bracket = fq.add(fq.mul(lead, first), second);
    let prefactor = fq.mul(
        fq.neg(sign(fq, (alpha + q) / 2)),
        fq.pow_signed(t, -(((3 * alpha + q) / 2) as i64))?,
    );
    Ok(fq.mul(prefactor, bracket))
}

/// The values `f(x)` for `x in F_{q^2}^*`, cached for repeated power sums.
pub struct PowerSumTable {
    fq: Arc<FieldCtx>,
    ext: Arc<FieldCtx>,
    values: Vec<FieldElement>,
}

impl PowerSumTable {
    pub fn new(ext: &Arc<FieldCtx>, t: FieldElement) -> Result<Self, BinomError> {
        let fq = ext.subfield().ok_or(FieldError::NoSubfield)?.clone();
        let f = permutation_binomial(ext, t)?;
        let all = f.eval_all();
        Ok(PowerSumTable {
            fq,
            ext: Arc::clone(ext),
            values: all[1..].to_vec(),
        })
    }

    /// `sum_{x != 0} f(x)^s`, pulled back to `F_q`.
    pub fn sum(&self, s: u64) -> Result<FieldElement, BinomError> {
        let ext = &self.ext;
        let total = self
            .values
            .iter()
            .fold(ext.zero(), |acc, &v| ext.add(acc, ext.pow(v, s)));
        debug_assert_eq!(ext.pow(total, self.fq.order()), total);
        ext.restrict(total).map_err(|_| BinomError::NotInSubfield)
    }
}

/// Brute-force `sum_{x in F_{q^2}^*} f(x)^{alpha + beta*q}`; any `q > 2`.
pub fn power_sum_direct(
    fq: &Arc<FieldCtx>,
    t: FieldElement,
    alpha: u64,
    beta: u64,
) -> Result<FieldElement, BinomError> {
    let desc = fq.desc();
    check_exponent(desc, alpha, beta)?;
    let ext = fq.extend_quadratic()?;
    PowerSumTable::new(&ext, t)?.sum(alpha + beta * desc.q())
}

/// `epsilon = (-1)^{(q+1)/2} * eta(t)`.
pub fn epsilon(fq: &FieldCtx, t: FieldElement) -> Result<i8, BinomError> {
    let q = fq.order();
    if q % 2 == 0 {
        return Err(BinomError::EvenQ(q));
    }
    let eta = fq.quad_char(t)?;
    Ok(if (q + 1) / 2 % 2 == 0 { eta } else { -eta })
}

/// The `alpha = 1, beta = q - 2` power-sum condition,
/// `epsilon*t + 3/2 - t^2/2`, which vanishes iff `t` is `-epsilon` or
/// `3*epsilon`.
pub fn alpha1_necessity(fq: &FieldCtx, t: FieldElement) -> Result<FieldElement, BinomError> {
    let eps = epsilon(fq, t)?;
    if t.is_zero() {
        return Err(BinomError::ZeroT);
    }
    let half = fq.inv(fq.from_int(2))?;
    let eps_t = fq.mul(fq.from_int(eps as i64), t);
    let tail = fq.mul(half, fq.sub(fq.from_int(3), fq.mul(t, t)));
    Ok(fq.add(eps_t, tail))
}

/// True iff `f` has no nonzero root in `F_{q^2}`, i.e. `(-t)^{(q+1)/2} != 1`.
pub fn root_check(fq: &FieldCtx, t: FieldElement) -> Result<bool, BinomError> {
    let q = fq.order();
    if q % 2 == 0 {
        return Err(BinomError::EvenQ(q));
    }
    if t.is_zero() {
        return Err(BinomError::ZeroT);
    }
    Ok(fq.pow(fq.neg(t), (q + 1) / 2) != fq.one())
}

/// The mod-`p` bracket that must vanish for odd `alpha`:
/// `sum_i C(a,i) C((3a-1)/2 - i, a) (-1)^i 3^{2i+1}
///  + sum_i C(a,i) C((3a-1)/2 - i + (q+1)/2, a) (-1)^i 3^{2i}`.
pub fn eq33_check(desc: PrimePowerDesc, alpha: u64) -> Result<u64, BinomError> {
    let q = desc.q();
    let p = desc.p();
    if !desc.is_odd() {
        return Err(BinomError::EvenQ(q));
    }
    if alpha % 2 == 0 || alpha == 0 || alpha >= q - 1 {
        return Err(BinomError::BadAlpha { alpha, q });
    }
    let top0 = (3 * alpha - 1) / 2;
    let shift = (q + 1) / 2;
    let mut acc = 0u64;
    for i in 0..=alpha {
        let c = binom_lucas(alpha, i, p);
        if c == 0 {
            continue;
        }
        let b1 = binom_padic(&TwiceInt::from_int((top0 - i) as i64), alpha, desc)?;
        let b2 = binom_padic(&TwiceInt::from_int((top0 - i + shift) as i64), alpha, desc)?;
        let term = (b1 * pow_mod(3, 2 * i + 1, p) + b2 * pow_mod(3, 2 * i, p)) % p;
        let term = c * term % p;
        acc = if i % 2 == 0 {
            (acc + term) % p
        } else {
            (acc + p - term) % p
        };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Thm11Case {
    CaseI,
    CaseII,
    CaseIII,
    None,
}

impl Thm11Case {
    pub fn tag(&self) -> &'static str {
        match self {
            Thm11Case::CaseI => "case-i",
            Thm11Case::CaseII => "case-ii",
            Thm11Case::CaseIII => "case-iii",
            Thm11Case::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thm11Verdict {
    pub is_pp: bool,
    pub case: Thm11Case,
}

/// Decides whether `x^{q-2} + t*x^{q^2-q-1}` permutes `F_{q^2}` from
/// `(q, t)` alone:
/// (i) `t = 1`, `q = 1 mod 4`; (ii) `t = -3`, `q = +-1 mod 12`;
/// (iii) `t = 3`, `q = -1 mod 6`.
pub fn thm11_classify(fq: &FieldCtx, t: FieldElement) -> Result<Thm11Verdict, BinomError> {
    let q = fq.order();
    if q <= 2 {
        return Err(BinomError::SmallQ(q));
    }
    if t.is_zero() {
        return Err(BinomError::ZeroT);
    }
    let case = if t == fq.one() && q % 4 == 1 {
        Thm11Case::CaseI
    } else if t == fq.from_int(-3) && (q % 12 == 1 || q % 12 == 11) {
        Thm11Case::CaseII
    } else if t == fq.from_int(3) && q % 6 == 5 {
        Thm11Case::CaseIII
    } else {
        Thm11Case::None
    };
    Ok(Thm11Verdict {
        is_pp: case != Thm11Case::None,
        case,
    })
}

/// [`thm11_classify`] with `t` given as an integer.
pub fn thm11_classify_int(fq: &FieldCtx, t: i64) -> Result<Thm11Verdict, BinomError> {
    thm11_classify(fq, fq.from_int(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn desc(q: u64) -> PrimePowerDesc {
        PrimePowerDesc::from_order(q).unwrap()
    }

    /// Oracle: exact `C(z, a)` in Q for `z = twice/2`, reduced mod `p`.
    fn binom_rational_mod(z: &TwiceInt, a: u64, p: u64) -> Option<u64> {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for j in 0..a {
            num *= z.twice() - BigInt::from(2 * j);
            den *= BigInt::from(2 * (j + 1));
        }
        let g = num.gcd(&den);
        let (num, den) = (num / &g, den / &g);
        let pb = BigInt::from(p);
        let d = den.abs().mod_floor(&pb).to_u64()?;
        if d == 0 {
            return None;
        }
        let d = if den.is_negative() { (p - d) % p } else { d };
        let n = num.mod_floor(&pb).to_u64()?;
        Some(n * pow_mod(d, p - 2, p) % p)
    }

    /// `C(m, a)` from factorials, for the Lucas oracle.
    fn factorial_binom(m: u64, a: u64) -> BigInt {
        if a > m {
            return BigInt::zero();
        }
        let fact = |n: u64| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
        fact(m) / (fact(a) * fact(m - a))
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(binom_lucas(6, 3, 7), 6);
        assert_eq!(binom_lucas(5, 2, 3), 1);
        assert_eq!(binom_lucas(123, 0, 5), 1);
    }

    #[test]
    fn lucas_matches_factorials() {
        for p in [2u64, 3, 5, 7, 11] {
            for m in 0..60 {
                for a in 0..=m {
                    let exact = factorial_binom(m, a) % BigInt::from(p);
                    assert_eq!(BigInt::from(binom_lucas(m, a, p)), exact, "C({m},{a}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn padic_examples() {
        let d5 = desc(5);
        assert_eq!(binom_padic(&TwiceInt::from_int(-1), 2, d5).unwrap(), 1);
        assert_eq!(binom_padic(&TwiceInt::from_int(12), 2, d5).unwrap(), 1);
        assert_eq!(binom_padic(&TwiceInt::from_twice(7), 1, d5).unwrap(), 1);
        assert_eq!(
            binom_padic(&TwiceInt::from_int(3), 5, d5),
            Err(BinomError::LowerOutOfRange { a: 5, max: 4 })
        );
        assert_eq!(
            binom_padic(&TwiceInt::from_twice(3), 1, desc(4)),
            Err(BinomError::HalfIntegerEvenQ(4))
        );
    }

    #[test]
    fn padic_matches_exact_rational_binomials() {
        // Oracle: exact C(z, a) in Q reduced mod p.
        for q in [3u64, 5, 7, 9, 25, 27] {
            let d = desc(q);
            for twice in -40i64..40 {
                if twice % 2 != 0 && !d.is_odd() {
                    continue;
                }
                let z = TwiceInt::from_twice(twice);
                for a in 0..q {
                    let oracle = binom_rational_mod(&z, a, d.p()).unwrap();
                    assert_eq!(binom_padic(&z, a, d).unwrap(), oracle, "z={z} a={a} q={q}");
                }
            }
        }
    }

    #[test]
    fn starred_binomials() {
        assert_eq!(binom_star_exact(&TwiceInt::from_twice(3), 1), BigInt::zero());
        assert_eq!(binom_star_exact(&TwiceInt::from_int(3), 1), BigInt::from(3));
        assert_eq!(binom_star_exact(&TwiceInt::from_int(0), 1), BigInt::zero());
        assert_eq!(binom_star_exact(&TwiceInt::from_int(-1), 3), BigInt::from(-1));
        assert_eq!(binom_star_exact(&TwiceInt::from_int(-3), 2), BigInt::from(6));
    }

    #[test]
    fn closed_form_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(power_sum_closed(&f3, f3.one(), 1, 1).unwrap(), f3.one());
        assert_eq!(
            power_sum_closed(&f3, f3.from_int(2), 1, 1).unwrap(),
            f3.from_int(2)
        );
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(power_sum_closed(&f5, f5.one(), 1, 2).unwrap(), f5.zero());
        for t in 1..5 {
            assert_eq!(
                power_sum_closed(&f5, f5.from_int(t), 2, 2).unwrap(),
                f5.zero()
            );
        }
        assert!(matches!(
            power_sum_closed(&f5, f5.one(), 0, 0),
            Err(BinomError::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            power_sum_closed(&f5, f5.one(), 4, 4),
            Err(BinomError::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn direct_sum_examples() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(power_sum_direct(&f3, f3.one(), 1, 1).unwrap(), f3.one());
        assert_eq!(
            power_sum_direct(&f3, f3.from_int(2), 1, 1).unwrap(),
            f3.from_int(2)
        );
        let f4 = FieldCtx::new(2, 2).unwrap();
        assert_eq!(power_sum_direct(&f4, f4.one(), 1, 2).unwrap(), f4.one());
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(power_sum_direct(&f5, f5.one(), 1, 3).unwrap(), f5.zero());
    }

    #[test]
    fn alpha1_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert_eq!(epsilon(&f5, f5.one()).unwrap(), -1);
        assert_eq!(alpha1_necessity(&f5, f5.one()).unwrap(), f5.zero());
        assert_eq!(epsilon(&f5, f5.from_int(2)).unwrap(), 1);
        assert_eq!(alpha1_necessity(&f5, f5.from_int(2)).unwrap(), f5.from_int(4));
        let f7 = FieldCtx::new(7, 1).unwrap();
        assert_eq!(epsilon(&f7, f7.one()).unwrap(), 1);
        assert_eq!(alpha1_necessity(&f7, f7.one()).unwrap(), f7.from_int(2));
        assert_eq!(alpha1_necessity(&f7, f7.zero()), Err(BinomError::ZeroT));
    }

    #[test]
    fn root_check_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert!(root_check(&f5, f5.one()).unwrap());
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert!(!root_check(&f3, f3.from_int(2)).unwrap());
        let f11 = FieldCtx::new(11, 1).unwrap();
        assert!(root_check(&f11, f11.from_int(3)).unwrap());
    }

    #[test]
    fn eq33_examples() {
        assert_eq!(eq33_check(desc(11), 1).unwrap(), 0);
        assert_eq!(eq33_check(desc(13), 3).unwrap(), 0);
        assert_eq!(eq33_check(desc(7), 5).unwrap(), 0);
        assert_eq!(
            eq33_check(desc(7), 2),
            Err(BinomError::BadAlpha { alpha: 2, q: 7 })
        );
        assert_eq!(
            eq33_check(desc(7), 6),
            Err(BinomError::BadAlpha { alpha: 6, q: 7 })
        );
    }

    #[test]
    fn classifier_examples() {
        let c = |q: u64, t: i64| {
            let f = FieldCtx::for_order(q).unwrap();
            thm11_classify_int(&f, t).unwrap().case
        };
        assert_eq!(c(5, 1), Thm11Case::CaseI);
        assert_eq!(c(13, 10), Thm11Case::CaseII);
        assert_eq!(c(11, 3), Thm11Case::CaseIII);
        assert_eq!(c(7, 1), Thm11Case::None);
        assert_eq!(c(9, 1), Thm11Case::CaseI);
        let f9 = FieldCtx::new(3, 2).unwrap();
        for t in f9.nonzero_elements() {
            let v = thm11_classify(&f9, t).unwrap();
            assert!(matches!(v.case, Thm11Case::CaseI | Thm11Case::None));
        }
        assert_eq!(thm11_classify_int(&f9, 3), Err(BinomError::ZeroT));
    }
}
