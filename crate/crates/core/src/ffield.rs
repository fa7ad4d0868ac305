//! Prime fields and tower extensions `F_{p^e}`.
//!
//! Every field is a chain of levels starting at `F_p`. Each level is a
//! simple extension of the level below it, defined by a monic irreducible
//! polynomial found by ascending search. Elements are packed as a single
//! index: a level element with coordinates `(c_0, .., c_{d-1})` over the
//! level below has index `c_0 + c_1*B + .. + c_{d-1}*B^{d-1}` where `B` is
//! the order of the level below. Because of this packing, an element of a
//! lower level keeps the same index in every level above it, so subfield
//! embedding is the identity on indices.
//!
//! `F_{p^e}` with `e` even is always built as a quadratic extension of
//! `F_{p^{e/2}}`; odd `e` is a flat extension of `F_p`.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, Sign};
use thiserror::Error;

/// Default upper bound on the cardinality of any constructed field.
pub const DEFAULT_MAX_FIELD_SIZE: u64 = 1 << 20;

/// Levels up to this order get full addition and multiplication tables.
const TABLE_MAX_ORDER: u32 = 1024;

/// Widest level extension degree the packed arithmetic supports.
const MAX_LEVEL_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{e} exceeds the configured bound {bound}")]
    TooLarge { p: u64, e: u32, bound: u64 },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("operands belong to different field contexts")]
    MixedContexts,
    #[error("quadratic character requires odd characteristic, got q = {0}")]
    EvenOrder(u64),
    #[error("element does not lie in the designated subfield")]
    NotInSubfield,
    #[error("field has no designated subfield")]
    NoSubfield,
    #[error("index {index} out of range for a field of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },
}

/// Field size bound, honoring `FFPERM_MAX_Q` when set.
pub fn max_field_size() -> u64 {
    static BOUND: OnceLock<u64> = OnceLock::new();
    *BOUND.get_or_init(|| {
        std::env::var("FFPERM_MAX_Q")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_FIELD_SIZE)
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, e)` when `q = p^e` for a prime `p`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// `q = p^e` with `p` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePowerDesc {
    p: u64,
    e: u32,
    q: u64,
}

impl PrimePowerDesc {
    pub fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = p
            .checked_pow(e)
            .ok_or(FieldError::TooLarge { p, e, bound: u64::MAX })?;
        Ok(Self { p, e, q })
    }

    pub fn from_order(q: u64) -> Option<Self> {
        let (p, e) = prime_power(q)?;
        Some(Self { p, e, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }
}

impl fmt::Display for PrimePowerDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

#[derive(Debug)]
struct Level {
    order: u32,
    base_order: u32,
    degree: usize,
    /// Monic defining polynomial over the level below, low degree first,
    /// leading 1 omitted. Empty for the prime level.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// Arithmetic over a chain of levels. Level 0 is `F_p`.
#[derive(Debug, Clone)]
struct Tower {
    p: u32,
    levels: Vec<Arc<Level>>,
}

impl Tower {
    fn prime(p: u32) -> Self {
        Tower {
            p,
            levels: vec![Arc::new(Level {
                order: p,
                base_order: 1,
                degree: 1,
                modulus: Vec::new(),
                tables: None,
            })],
        }
    }

    fn top(&self) -> usize {
        self.levels.len() - 1
    }

    fn order(&self, l: usize) -> u32 {
        self.levels[l].order
    }

    #[inline]
    fn split(&self, l: usize, a: u32, out: &mut [u32]) {
        let lv = &self.levels[l];
        let b = lv.base_order;
        let mut a = a;
        for c in out.iter_mut().take(lv.degree) {
            *c = a % b;
            a /= b;
        }
    }

    #[inline]
    fn pack(&self, l: usize, coords: &[u32]) -> u32 {
        let b = self.levels[l].base_order;
        coords.iter().rev().fold(0u32, |acc, &c| acc * b + c)
    }

    #[inline]
    fn add(&self, l: usize, a: u32, b: u32) -> u32 {
        if l == 0 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let lv = &self.levels[l];
        if let Some(t) = &lv.tables {
            return t.add[(a * lv.order + b) as usize];
        }
        let base = lv.base_order;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..lv.degree {
            let c = self.add(l - 1, a % base, b % base);
            out += c * scale;
            scale = scale.wrapping_mul(base);
            a /= base;
            b /= base;
        }
        out
    }

    #[inline]
    fn neg(&self, l: usize, a: u32) -> u32 {
        if l == 0 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let lv = &self.levels[l];
        if let Some(t) = &lv.tables {
            return t.neg[a as usize];
        }
        let base = lv.base_order;
        let mut a = a;
        let mut out = 0u32;
        let mut scale = 1u32;
        for _ in 0..lv.degree {
            out += self.neg(l - 1, a % base) * scale;
            scale = scale.wrapping_mul(base);
            a /= base;
        }
        out
    }

    #[inline]
    fn mul(&self, l: usize, a: u32, b: u32) -> u32 {
        if l == 0 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let lv = &self.levels[l];
        if let Some(t) = &lv.tables {
            return t.mul[(a * lv.order + b) as usize];
        }
        if a == 0 || b == 0 {
            return 0;
        }
        self.mul_coords(l, a, b)
    }

    /// Schoolbook product of coordinate vectors reduced by the level modulus.
    fn mul_coords(&self, l: usize, a: u32, b: u32) -> u32 {
        let lv = &self.levels[l];
        let d = lv.degree;
        let below = l - 1;
        let mut ca = [0u32; MAX_LEVEL_DEGREE];
        let mut cb = [0u32; MAX_LEVEL_DEGREE];
        self.split(l, a, &mut ca);
        self.split(l, b, &mut cb);
        let mut prod = [0u32; 2 * MAX_LEVEL_DEGREE];
        for i in 0..d {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..d {
                if cb[j] == 0 {
                    continue;
                }
                let m = self.mul(below, ca[i], cb[j]);
                prod[i + j] = self.add(below, prod[i + j], m);
            }
        }
        // x^d = -(m_0 + m_1 x + .. + m_{d-1} x^{d-1})
        for k in (d..2 * d - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            let nc = self.neg(below, c);
            for (i, &m) in lv.modulus.iter().enumerate() {
                if m != 0 {
                    let t = self.mul(below, nc, m);
                    prod[k - d + i] = self.add(below, prod[k - d + i], t);
                }
            }
            prod[k] = 0;
        }
        self.pack(l, &prod[..d])
    }

    fn pow(&self, l: usize, a: u32, mut n: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(l, acc, base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(l, base, base);
            }
        }
        acc
    }

    fn inv(&self, l: usize, a: u32) -> u32 {
        debug_assert!(a != 0);
        if l > 0 {
            if let Some(t) = &self.levels[l].tables {
                return t.inv[a as usize];
            }
        }
        self.pow(l, a, self.order(l) as u64 - 2)
    }

    /// Appends a level of the given degree over the current top, using the
    /// first monic irreducible polynomial in ascending coefficient order.
    fn extend(&mut self, degree: usize) {
        let base = self.top();
        let base_order = self.order(base);
        let modulus = find_irreducible(self, base, degree);
        let order = base_order.pow(degree as u32);
        self.levels.push(Arc::new(Level {
            order,
            base_order,
            degree,
            modulus,
            tables: None,
        }));
        if order <= TABLE_MAX_ORDER {
            let l = self.top();
            let tables = self.build_tables(l);
            let lv = Arc::get_mut(self.levels.last_mut().unwrap()).unwrap();
            lv.tables = Some(tables);
        }
    }

    fn build_tables(&self, l: usize) -> Tables {
        let n = self.order(l);
        let size = (n * n) as usize;
        let mut add = vec![0u32; size];
        let mut mul = vec![0u32; size];
        for a in 0..n {
            for b in 0..n {
                let idx = (a * n + b) as usize;
                add[idx] = self.add(l, a, b);
                mul[idx] = if a == 0 || b == 0 { 0 } else { self.mul_coords(l, a, b) };
            }
        }
        let neg = (0..n).map(|a| self.neg(l, a)).collect();
        let mut inv = vec![0u32; n as usize];
        for a in 1..n {
            if inv[a as usize] != 0 {
                continue;
            }
            for b in 1..n {
                if mul[(a * n + b) as usize] == 1 {
                    inv[a as usize] = b;
                    inv[b as usize] = a;
                    break;
                }
            }
        }
        Tables { add, mul, neg, inv }
    }
}

/// Polynomials over one tower level, used only to certify irreducibility.
mod level_poly {
    use super::Tower;

    pub(super) fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub(super) fn eval(t: &Tower, l: usize, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| t.add(l, t.mul(l, acc, x), c))
    }

    /// `a mod m` for a monic `m`.
    pub(super) fn rem_monic(t: &Tower, l: usize, a: &[u32], m: &[u32]) -> Vec<u32> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = r[k];
            let nc = t.neg(l, c);
            for (i, &mi) in m.iter().enumerate() {
                let s = t.mul(l, nc, mi);
                r[k - dm + i] = t.add(l, r[k - dm + i], s);
            }
            trim(&mut r);
        }
        r
    }

    pub(super) fn mul_mod(t: &Tower, l: usize, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut p = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let s = t.mul(l, x, y);
                p[i + j] = t.add(l, p[i + j], s);
            }
        }
        rem_monic(t, l, &p, m)
    }

    pub(super) fn pow_mod(t: &Tower, l: usize, a: &[u32], mut n: u64, m: &[u32]) -> Vec<u32> {
        let mut base = rem_monic(t, l, a, m);
        let mut acc = vec![1u32];
        while n > 0 {
            if n & 1 == 1 {
                acc = mul_mod(t, l, &acc, &base, m);
            }
            n >>= 1;
            if n > 0 {
                base = mul_mod(t, l, &base, &base, m);
            }
        }
        acc
    }

    pub(super) fn gcd(t: &Tower, l: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let lead_inv = t.inv(l, *b.last().unwrap());
            let monic: Vec<u32> = b.iter().map(|&c| t.mul(l, c, lead_inv)).collect();
            let r = rem_monic(t, l, &a, &monic);
            a = monic;
            b = r;
        }
        a
    }

    pub(super) fn sub(t: &Tower, l: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                t.add(l, x, t.neg(l, y))
            })
            .collect();
        trim(&mut out);
        out
    }
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Irreducibility of a monic `m` (low degree first, leading 1 included)
/// over level `l`.
fn is_irreducible(t: &Tower, l: usize, m: &[u32]) -> bool {
    let d = m.len() - 1;
    if d == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let order = t.order(l);
    if d <= 3 {
        return (0..order).all(|x| level_poly::eval(t, l, m, x) != 0);
    }
    // m is irreducible iff m | x^{Q^d} - x and gcd(x^{Q^{d/r}} - x, m) = 1
    // for every prime r dividing d.
    let x = vec![0u32, 1];
    let frob_iter = |times: usize| {
        let mut cur = x.clone();
        for _ in 0..times {
            cur = level_poly::pow_mod(t, l, &cur, order as u64, m);
        }
        cur
    };
    let full = level_poly::sub(t, l, &frob_iter(d), &x);
    if !level_poly::rem_monic(t, l, &full, m).is_empty() {
        return false;
    }
    prime_factors(d).into_iter().all(|r| {
        let h = level_poly::sub(t, l, &frob_iter(d / r), &x);
        level_poly::gcd(t, l, &h, m).len() == 1
    })
}

fn find_irreducible(t: &Tower, l: usize, degree: usize) -> Vec<u32> {
    let order = t.order(l);
    let mut coeffs = vec![0u32; degree];
    loop {
        // ascending counter over (c_0, .., c_{d-1})
        let mut i = 0;
        loop {
            coeffs[i] += 1;
            if coeffs[i] < order {
                break;
            }
            coeffs[i] = 0;
            i += 1;
            assert!(i < degree, "no irreducible polynomial of degree {degree}");
        }
        let mut monic = coeffs.clone();
        monic.push(1);
        if is_irreducible(t, l, &monic) {
            return coeffs;
        }
    }
}

fn next_ctx_id() -> u32 {
    static NEXT: AtomicU32 = AtomicU32::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

/// An element of some [`FieldCtx`]. Plain value; arithmetic lives on the
/// context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    ctx: u32,
    value: u32,
}

impl FieldElement {
    /// Packed index of the element, in `0..q`.
    pub fn index(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn ctx_id(&self) -> u32 {
        self.ctx
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Checked arithmetic request, see [`FieldCtx::arith`].
#[derive(Debug, Clone)]
pub enum ArithOp {
    Add(FieldElement, FieldElement),
    Mul(FieldElement, FieldElement),
    Inv(FieldElement),
    Pow(FieldElement, BigInt),
}

/// A finite field `F_{p^e}`. Immutable after construction.
#[derive(Debug)]
pub struct FieldCtx {
    id: u32,
    desc: PrimePowerDesc,
    tower: Tower,
    subfield: Option<Arc<FieldCtx>>,
}

impl FieldCtx {
    /// Builds `F_{p^e}` under the configured size bound.
    pub fn new(p: u64, e: u32) -> Result<Arc<Self>, FieldError> {
        Self::with_bound(p, e, max_field_size())
    }

    pub fn with_bound(p: u64, e: u32, bound: u64) -> Result<Arc<Self>, FieldError> {
        let desc = PrimePowerDesc::new(p, e).map_err(|err| match err {
            FieldError::TooLarge { p, e, .. } => FieldError::TooLarge { p, e, bound },
            other => other,
        })?;
        if desc.q > bound {
            return Err(FieldError::TooLarge { p, e, bound });
        }
        Ok(Self::build(desc))
    }

    pub fn for_order(q: u64) -> Result<Arc<Self>, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrime(q))?;
        Self::new(p, e)
    }

    fn build(desc: PrimePowerDesc) -> Arc<Self> {
        if desc.e % 2 == 0 {
            let half = PrimePowerDesc {
                p: desc.p,
                e: desc.e / 2,
                q: desc.p.pow(desc.e / 2),
            };
            return Self::quadratic_over(&Self::build(half));
        }
        let mut tower = Tower::prime(desc.p as u32);
        if desc.e > 1 {
            tower.extend(desc.e as usize);
        }
        Arc::new(FieldCtx {
            id: next_ctx_id(),
            desc,
            tower,
            subfield: None,
        })
    }

    fn quadratic_over(base: &Arc<FieldCtx>) -> Arc<Self> {
        let mut tower = base.tower.clone();
        tower.extend(2);
        let e = base.desc.e * 2;
        Arc::new(FieldCtx {
            id: next_ctx_id(),
            desc: PrimePowerDesc {
                p: base.desc.p,
                e,
                q: base.desc.p.pow(e),
            },
            tower,
            subfield: Some(Arc::clone(base)),
        })
    }

    /// `F_{q^2}` as a quadratic extension of this field, which becomes its
    /// designated subfield.
    pub fn extend_quadratic(self: &Arc<Self>) -> Result<Arc<Self>, FieldError> {
        let bound = max_field_size();
        let q2 = self.desc.q.saturating_mul(self.desc.q);
        if q2 > bound {
            return Err(FieldError::TooLarge {
                p: self.desc.p,
                e: self.desc.e * 2,
                bound,
            });
        }
        Ok(Self::quadratic_over(self))
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn desc(&self) -> PrimePowerDesc {
        self.desc
    }

    pub fn order(&self) -> u64 {
        self.desc.q
    }

    pub fn characteristic(&self) -> u64 {
        self.desc.p
    }

    /// Defining polynomials of the tower, base upward, each with its leading
    /// 1 omitted and coefficients given as packed indices of the level below.
    pub fn tower_moduli(&self) -> Vec<Vec<u32>> {
        self.tower.levels[1..]
            .iter()
            .map(|lv| lv.modulus.clone())
            .collect()
    }

    /// The designated copy of `F_{sqrt(q)}` for fields of even degree.
    pub fn subfield(&self) -> Option<&Arc<FieldCtx>> {
        self.subfield.as_ref()
    }

    /// True when `other`'s tower is a prefix of this one, so its elements
    /// embed here index-for-index.
    pub fn contains(&self, other: &FieldCtx) -> bool {
        if self.desc.p != other.desc.p || other.tower.levels.len() > self.tower.levels.len() {
            return false;
        }
        self.tower
            .levels
            .iter()
            .zip(&other.tower.levels)
            .all(|(a, b)| a.degree == b.degree && a.modulus == b.modulus)
    }

    #[inline]
    fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { ctx: self.id, value }
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        assert_eq!(a.ctx, self.id, "field element used with a foreign context");
    }

    pub fn owns(&self, a: FieldElement) -> bool {
        a.ctx == self.id
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement, FieldError> {
        if index >= self.desc.q {
            return Err(FieldError::IndexOutOfRange {
                index,
                order: self.desc.q,
            });
        }
        Ok(self.wrap(index as u32))
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.wrap(n.rem_euclid(self.desc.p as i64) as u32)
    }

    pub fn from_u64(&self, n: u64) -> FieldElement {
        self.wrap((n % self.desc.p) as u32)
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        let p = BigInt::from(self.desc.p);
        let r = ((n % &p) + &p) % &p;
        let v: u32 = r.try_into().expect("residue fits in u32");
        self.wrap(v)
    }

    /// Residue in `0..p` when `a` lies in the prime field.
    pub fn prime_residue(&self, a: FieldElement) -> Option<u64> {
        self.check(a);
        ((a.value as u64) < self.desc.p).then_some(a.value as u64)
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.desc.q as u32).map(move |v| self.wrap(v))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.desc.q as u32).map(move |v| self.wrap(v))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.wrap(self.tower.add(self.tower.top(), a.value, b.value))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        self.wrap(self.tower.neg(self.tower.top(), a.value))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.wrap(self.tower.mul(self.tower.top(), a.value, b.value))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a);
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.wrap(self.tower.inv(self.tower.top(), a.value)))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^n` for a machine-size exponent; `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        self.check(a);
        self.wrap(self.tower.pow(self.tower.top(), a.value, n))
    }

    /// `a^n` for an arbitrary-precision exponent. Negative exponents need a
    /// nonzero base.
    pub fn pow_big(&self, a: FieldElement, n: &BigInt) -> Result<FieldElement, FieldError> {
        self.check(a);
        let base = if n.sign() == Sign::Minus { self.inv(a)? } else { a };
        let mut acc = self.one();
        let mag = n.magnitude();
        for i in (0..mag.bits()).rev() {
            acc = self.mul(acc, acc);
            if mag.bit(i) {
                acc = self.mul(acc, base);
            }
        }
        Ok(acc)
    }

    /// Signed-exponent power with a machine-size exponent.
    pub fn pow_signed(&self, a: FieldElement, n: i64) -> Result<FieldElement, FieldError> {
        if n >= 0 {
            Ok(self.pow(a, n as u64))
        } else {
            Ok(self.pow(self.inv(a)?, n.unsigned_abs()))
        }
    }

    /// Checked entry point: context mismatches and zero inversion come
    /// back as errors instead of panics.
    pub fn arith(&self, op: ArithOp) -> Result<FieldElement, FieldError> {
        let owned = |a: &FieldElement| {
            if self.owns(*a) {
                Ok(())
            } else {
                Err(FieldError::MixedContexts)
            }
        };
        match op {
            ArithOp::Add(a, b) => {
                owned(&a)?;
                owned(&b)?;
                Ok(self.add(a, b))
            }
            ArithOp::Mul(a, b) => {
                owned(&a)?;
                owned(&b)?;
                Ok(self.mul(a, b))
            }
            ArithOp::Inv(a) => {
                owned(&a)?;
                self.inv(a)
            }
            ArithOp::Pow(a, n) => {
                owned(&a)?;
                self.pow_big(a, &n)
            }
        }
    }

    /// `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.desc.p)
    }

    /// Quadratic character: `+1` on nonzero squares, `-1` on non-squares,
    /// `0` at zero.
    pub fn quad_char(&self, t: FieldElement) -> Result<i8, FieldError> {
        self.check(t);
        if !self.desc.is_odd() {
            return Err(FieldError::EvenOrder(self.desc.q));
        }
        if t.is_zero() {
            return Ok(0);
        }
        let r = self.pow(t, (self.desc.q - 1) / 2);
        Ok(if r == self.one() { 1 } else { -1 })
    }

    /// Image of a subfield element in this field.
    pub fn embed(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let sub = self.subfield.as_ref().ok_or(FieldError::NoSubfield)?;
        if !sub.owns(a) {
            return Err(FieldError::MixedContexts);
        }
        Ok(self.wrap(a.value))
    }

    /// Preimage in the designated subfield, if `a` lies there.
    pub fn restrict(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a);
        let sub = self.subfield.as_ref().ok_or(FieldError::NoSubfield)?;
        if (a.value as u64) < sub.order() {
            Ok(sub.wrap(a.value))
        } else {
            Err(FieldError::NotInSubfield)
        }
    }

    /// Moves an element of a field this one [`contains`](Self::contains).
    pub fn lift_from(&self, from: &FieldCtx, a: FieldElement) -> Result<FieldElement, FieldError> {
        from.check(a);
        if !self.contains(from) {
            if (a.value as u64) < self.desc.p && from.desc.p == self.desc.p {
                return Ok(self.wrap(a.value));
            }
            return Err(FieldError::MixedContexts);
        }
        Ok(self.wrap(a.value))
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for FieldCtx {}
