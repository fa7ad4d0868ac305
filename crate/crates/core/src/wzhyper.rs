//! Exact verification of the two-sum hypergeometric identity
//! `S1(n) + S2(n) = 0`: the summands, their shared second-order
//! recurrence, the telescoping certificates, and the `2F1` restatement.
//!
//! Everything here is exact integer or rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::report::CheckRecord;

/// Which of the two sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::One, Family::Two];

    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }

    /// Offset `c` in the product `prod_{j=1}^{2n+1} (6n - 2k + c - 2j)`.
    fn offset(self) -> i64 {
        match self {
            Family::One => 4,
            Family::Two => 5,
        }
    }

    /// Extra power of 3 on top of `3^{2k}`.
    fn three_shift(self) -> u32 {
        match self {
            Family::One => 1,
            Family::Two => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("series does not terminate: no numerator parameter is a nonpositive integer")]
    NotTerminating,
    #[error("lower parameter hits zero at index {0} before termination")]
    ZeroDenominator(u64),
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(big(n))
}

fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = k as u64;
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// The summand, straight from its defining product. `k` outside
/// `[0, 2n+1]` gives 0.
pub fn term_f(fam: Family, n: u64, k: i64) -> BigInt {
    let m = 2 * n + 1;
    let c = binomial(m, k);
    if c.is_zero() {
        return c;
    }
    let n = n as i64;
    let prod = (1..=m as i64).fold(BigInt::one(), |acc, j| {
        acc * big(6 * n - 2 * k + fam.offset() - 2 * j)
    });
    let sign = if k % 2 == 0 { 1 } else { -1 };
    c * prod * sign * BigInt::from(3u32).pow(2 * k as u32 + fam.three_shift())
}

/// `S_i(n) = sum_k F_i(n, k)`, accumulated through the exact term ratio
/// `F(n, k+1) / F(n, k)`.
pub fn sum_s(fam: Family, n: u64) -> BigInt {
    let m = 2 * n + 1;
    let ni = n as i64;
    let mut term = term_f(fam, n, 0);
    let mut total = term.clone();
    for k in 0..m as i64 {
        // F1: (-9)(2n+1-k)(n-k) / ((k+1)(3n+1-k))
        // F2: (-9)(2n+1-k)(2n+1-2k) / ((k+1)(6n+3-2k))
        let (num, den) = match fam {
            Family::One => (
                big(-9) * big(2 * ni + 1 - k) * big(ni - k),
                big(k + 1) * big(3 * ni + 1 - k),
            ),
            Family::Two => (
                big(-9) * big(2 * ni + 1 - k) * big(2 * ni + 1 - 2 * k),
                big(k + 1) * big(6 * ni + 3 - 2 * k),
            ),
        };
        let next = term * num;
        debug_assert!((&next % &den).is_zero());
        term = next / den;
        if term.is_zero() {
            break;
        }
        total += &term;
    }
    total
}

/// `sum_k F_i(n, k)` term by term from [`term_f`].
pub fn sum_s_direct(fam: Family, n: u64) -> BigInt {
    (0..=2 * n as i64 + 1).map(|k| term_f(fam, n, k)).sum()
}

/// Recurrence coefficients `(24(36n^2+126n+113), 46656(n+1)^2(2n+3)^2)`.
pub fn recurrence_coeffs(n: i64) -> (BigInt, BigInt) {
    let c1 = big(24) * big(36 * n * n + 126 * n + 113);
    let c0 = big(46656) * big(n + 1).pow(2) * big(2 * n + 3).pow(2);
    (c1, c0)
}

/// `S(n+2) + c1(n) S(n+1) + c0(n) S(n)` given the three sums.
pub fn recurrence_combination(n: u64, s0: &BigInt, s1: &BigInt, s2: &BigInt) -> BigInt {
    let (c1, c0) = recurrence_coeffs(n as i64);
    s2 + c1 * s1 + c0 * s0
}

/// Residual of the second-order recurrence for `S_i` at `n`.
pub fn recurrence_residual(fam: Family, n: u64) -> BigInt {
    recurrence_combination(n, &sum_s(fam, n), &sum_s(fam, n + 1), &sum_s(fam, n + 2))
}

/// Coefficients of the certificate numerators, `[n-degree][k-degree]`.
const R1_NUMERATOR: [[i64; 5]; 9] = [
    [264240, -321108, 142242, -27228, 1902],
    [1434774, -1559605, 612100, -102647, 6194],
    [3361281, -3199801, 1081204, -152528, 7484],
    [4437783, -3594830, 1003340, -111631, 3976],
    [3611829, -2388503, 515900, -40234, 784],
    [1855833, -938595, 139350, -5712, 0],
    [587970, -201978, 15444, 0, 0],
    [105030, -18360, 0, 0, 0],
    [8100, 0, 0, 0, 0],
];

const R2_NUMERATOR: [[i64; 5]; 9] = [
    [5518665, -6111039, 2516532, -455172, 30432],
    [29095596, -29034593, 10674112, -1703836, 99104],
    [66125967, -58228898, 18571132, -2512456, 119744],
    [84611256, -63891952, 16960112, -1823312, 63616],
    [66666108, -41422240, 8573312, -650912, 12544],
    [33120768, -15865680, 2273856, -91392, 0],
    [10132560, -3323808, 247104, 0, 0],
    [1745280, -293760, 0, 0, 0],
    [129600, 0, 0, 0, 0],
];

/// Two-variable Horner: outer in `n`, inner in `k`.
fn eval_table(table: &[[i64; 5]; 9], n: i64, k: i64) -> BigInt {
    let (n, k) = (big(n), big(k));
    table.iter().rev().fold(BigInt::zero(), |acc, row| {
        let inner = row
            .iter()
            .rev()
            .fold(BigInt::zero(), |a, &c| a * &k + big(c));
        acc * &n + inner
    })
}

/// The certificate denominator vanishes at `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pole {
    pub family: Family,
    pub n: i64,
    pub k: i64,
    /// Names of the vanishing denominator factors.
    pub factors: Vec<String>,
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R{} has a pole at (n={}, k={}): {}",
            self.family,
            self.n,
            self.k,
            self.factors.join(", ")
        )
    }
}

fn denominator_factors(fam: Family, n: i64, k: i64) -> Vec<(String, i64)> {
    let mut out = match fam {
        Family::One => vec![
            ("n-k+1".to_string(), n - k + 1),
            ("n-k+2".to_string(), n - k + 2),
        ],
        Family::Two => vec![
            ("2n-2k+3".to_string(), 2 * n - 2 * k + 3),
            ("2n-2k+5".to_string(), 2 * n - 2 * k + 5),
        ],
    };
    for j in 2..=5 {
        out.push((format!("2n-k+{j}"), 2 * n - k + j));
    }
    out
}

/// The certificate `R_i(n, k)` such that `G_i = F_i R_i` telescopes the
/// recurrence applied to `F_i`.
pub fn certificate(fam: Family, n: i64, k: i64) -> Result<BigRational, Pole> {
    let factors = denominator_factors(fam, n, k);
    let vanishing: Vec<String> = factors
        .iter()
        .filter(|(_, v)| *v == 0)
        .map(|(name, _)| name.clone())
        .collect();
    if !vanishing.is_empty() {
        return Err(Pole {
            family: fam,
            n,
            k,
            factors: vanishing,
        });
    }
    let den: BigInt = factors.iter().map(|(_, v)| big(*v)).product();
    let (lead, table) = match fam {
        Family::One => (big(-32) * big(k) * big(3 * n - k + 2), &R1_NUMERATOR),
        Family::Two => (big(-4) * big(k) * big(6 * n - 2 * k + 5), &R2_NUMERATOR),
    };
    Ok(BigRational::new(lead * eval_table(table, n, k), den))
}

/// `G_i(n, k) = F_i(n, k) R_i(n, k)`.
pub fn g_term(fam: Family, n: u64, k: i64) -> Result<BigRational, Pole> {
    let r = certificate(fam, n as i64, k)?;
    Ok(BigRational::from_integer(term_f(fam, n, k)) * r)
}

/// `F(n+2,k) + c1 F(n+1,k) + c0 F(n,k) - (G(n,k+1) - G(n,k))`; zero at
/// every point where neither certificate value has a pole.
pub fn certificate_residual(fam: Family, n: u64, k: i64) -> Result<BigRational, Pole> {
    let g_next = g_term(fam, n, k + 1)?;
    let g_here = g_term(fam, n, k)?;
    let (c1, c0) = recurrence_coeffs(n as i64);
    let lhs = term_f(fam, n + 2, k) + c1 * term_f(fam, n + 1, k) + c0 * term_f(fam, n, k);
    Ok(BigRational::from_integer(lhs) - (g_next - g_here))
}

/// `(a)_k = a (a+1) .. (a+k-1)`, with `(a)_0 = 1`.
pub fn rising_factorial(a: &BigRational, k: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut cur = a.clone();
    for _ in 0..k {
        acc *= &cur;
        cur += BigRational::one();
    }
    acc
}

fn nonpositive_integer(r: &BigRational) -> Option<u64> {
    (r.is_integer() && !r.is_positive()).then(|| (-r.to_integer()).to_u64().unwrap())
}

/// Terminating Gauss series `2F1[a, b; c | x]`.
pub fn hyp2f1_terminating(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    x: &BigRational,
) -> Result<BigRational, HyperError> {
    let last = match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(i), Some(j)) => i.min(j),
        (Some(i), None) | (None, Some(i)) => i,
        (None, None) => return Err(HyperError::NotTerminating),
    };
    let mut term = BigRational::one();
    let mut total = BigRational::one();
    for k in 0..last {
        let kr = BigRational::from_integer(BigInt::from(k));
        let ck = c + &kr;
        if ck.is_zero() {
            return Err(HyperError::ZeroDenominator(k));
        }
        term = term * (a + &kr) * (b + &kr) * x / (ck * (&kr + BigRational::one()));
        total += &term;
    }
    Ok(total)
}

fn pow_int(base: i64, e: u64) -> BigInt {
    big(base).pow(e as u32)
}

fn half(twice: i64) -> BigRational {
    BigRational::new(big(twice), big(2))
}

/// Both sides of the three `2F1` restatements at one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypForms {
    pub s1: BigInt,
    pub s2: BigInt,
    /// `(-1)^n 2^{2n+1} 3^{2n+1} (n+1)_{n+1} (n+2)_n 2F1[-n, 2n+2; n+2 | 1/9]`.
    pub s1_form: BigRational,
    /// `-2^{2n+1} 3^{4n+2} (-n+1/2)_{2n+1} 2F1[n+3/2, -2n-1; -n+1/2 | 1/9]`.
    pub s2_form: BigRational,
    /// `2F1[-n, 2n+2; n+2 | 1/9]`.
    pub lhs: BigRational,
    /// `(-1)^n 3^{2n+1} (-n+1/2)_{2n+1} / ((n+1)_{n+1} (n+2)_n)` times the
    /// second `2F1`.
    pub rhs: BigRational,
    /// The earlier form
    /// `-2^{2n+1} 3^{2n+1} (-2n-1)_{n+1} (2n+1)!/(n+1)! * sum_k ...`.
    pub s1_intermediate: BigRational,
}

pub fn hyp_forms(n: u64) -> HypForms {
    let ni = n as i64;
    let ninth = BigRational::new(big(1), big(9));
    let two_pow = BigRational::from_integer(pow_int(2, 2 * n + 1));
    let sign = if n % 2 == 0 { rat(1) } else { rat(-1) };

    let f_a = hyp2f1_terminating(&rat(-ni), &rat(2 * ni + 2), &rat(ni + 2), &ninth)
        .expect("-n is a nonpositive integer and n+2 > 0");
    let f_b = hyp2f1_terminating(&half(2 * ni + 3), &rat(-2 * ni - 1), &half(-2 * ni + 1), &ninth)
        .expect("-2n-1 terminates and -n+1/2 is never zero");

    let poch_a = rising_factorial(&rat(ni + 1), n + 1) * rising_factorial(&rat(ni + 2), n);
    let poch_half = rising_factorial(&half(-2 * ni + 1), 2 * n + 1);

    let s1_form = &sign
        * &two_pow
        * BigRational::from_integer(pow_int(3, 2 * n + 1))
        * &poch_a
        * &f_a;
    let s2_form = -(&two_pow * BigRational::from_integer(pow_int(3, 4 * n + 2)) * &poch_half * &f_b);
    let rhs = &sign * BigRational::from_integer(pow_int(3, 2 * n + 1)) * &poch_half / &poch_a * &f_b;

    // sum_k (-n)_k (2n+2)_k / (n+2)_k * (1/9)^k / k!, written out directly.
    let mut series = BigRational::zero();
    for k in 0..=n {
        let num = rising_factorial(&rat(-ni), k) * rising_factorial(&rat(2 * ni + 2), k);
        let den = rising_factorial(&rat(ni + 2), k) * rising_factorial(&rat(1), k);
        series += num / den * ninth.pow(k as i32);
    }
    let fact = |m: u64| (1..=m).fold(BigInt::one(), |acc, j| acc * j);
    let s1_intermediate = -(&two_pow
        * BigRational::from_integer(pow_int(3, 2 * n + 1))
        * rising_factorial(&rat(-2 * ni - 1), n + 1)
        * BigRational::new(fact(2 * n + 1), fact(n + 1))
        * series);

    HypForms {
        s1: sum_s(Family::One, n),
        s2: sum_s(Family::Two, n),
        s1_form,
        s2_form,
        lhs: f_a,
        rhs,
        s1_intermediate,
    }
}

fn show(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `S1(n) + S2(n) = 0` for `0 <= n <= n_max`.
pub fn identity_check(n_max: u64) -> Vec<CheckRecord> {
    (0..=n_max)
        .map(|n| {
            let total = sum_s(Family::One, n) + sum_s(Family::Two, n);
            CheckRecord::compare("thm12.identity", &[("n", n.to_string())], 0, total)
        })
        .collect()
}

/// The four records for one `n`: forms (a), (b), (c), and the intermediate
/// rewrite of `S1`, plus the equivalence of (a)∧(b)∧(c) with the identity.
pub fn hyp_forms_check(n: u64) -> Vec<CheckRecord> {
    let h = hyp_forms(n);
    let p = [("n", n.to_string())];
    let s1 = BigRational::from_integer(h.s1.clone());
    let s2 = BigRational::from_integer(h.s2.clone());
    let a = s1 == h.s1_form;
    let b = s2 == h.s2_form;
    let c = h.lhs == h.rhs;
    let identity = (&h.s1 + &h.s2).is_zero();
    vec![
        CheckRecord::compare("hyp.form_a", &p, &h.s1, show(&h.s1_form)),
        CheckRecord::compare("hyp.form_b", &p, &h.s2, show(&h.s2_form)),
        CheckRecord::compare("hyp.form_c", &p, show(&h.lhs), show(&h.rhs)),
        CheckRecord::compare("hyp.s1_intermediate", &p, show(&h.s1_form), show(&h.s1_intermediate)),
        CheckRecord::outcome(
            "hyp.chain",
            &p,
            format!("identity={identity}"),
            format!("a={a};b={b};c={c}"),
            identity && a && b && c,
        ),
    ]
}
