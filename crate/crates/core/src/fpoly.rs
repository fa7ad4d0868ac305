//! Dense univariate polynomials over a [`FieldCtx`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ffield::{FieldCtx, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials belong to different field contexts")]
    MixedContexts,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Coefficients indexed by degree; the leading coefficient is nonzero
/// unless the polynomial is zero.
#[derive(Clone)]
pub struct DensePoly {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensePoly({})", self)
    }
}

impl fmt::Display for DensePoly {
    /// Renders as `c_d*x^d + ..` using packed element indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{d}")?,
            }
        }
        Ok(())
    }
}

impl PartialEq for DensePoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id() == other.ctx.id() && self.coeffs == other.coeffs
    }
}

impl Eq for DensePoly {}

impl DensePoly {
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: Vec<FieldElement>) -> Self {
        assert!(
            coeffs.iter().all(|&c| ctx.owns(c)),
            "coefficient from a foreign context"
        );
        let mut p = DensePoly {
            ctx: Arc::clone(ctx),
            coeffs,
        };
        p.trim();
        p
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        DensePoly {
            ctx: Arc::clone(ctx),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FieldElement) -> Self {
        Self::new(ctx, vec![c])
    }

    /// `c * x^d`.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: FieldElement, d: usize) -> Self {
        if c.is_zero() {
            return Self::zero(ctx);
        }
        let mut coeffs = vec![ctx.zero(); d + 1];
        coeffs[d] = c;
        Self::new(ctx, coeffs)
    }

    pub fn x(ctx: &Arc<FieldCtx>) -> Self {
        Self::monomial(ctx, ctx.one(), 1)
    }

    /// Builds from `(degree, coefficient)` pairs; repeated degrees add up.
    pub fn from_terms(ctx: &Arc<FieldCtx>, terms: &[(usize, FieldElement)]) -> Self {
        let top = terms.iter().map(|&(d, _)| d).max().unwrap_or(0);
        let mut coeffs = vec![ctx.zero(); top + 1];
        for &(d, c) in terms {
            coeffs[d] = ctx.add(coeffs[d], c);
        }
        Self::new(ctx, coeffs)
    }

    /// Coefficients given as small integers mapped into the prime field.
    pub fn from_ints(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> FieldElement {
        self.coeffs.get(d).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Nonzero terms as `(degree, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (usize, FieldElement)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, &c)| (d, c))
    }

    fn same_ctx(&self, other: &DensePoly) -> Result<(), PolyError> {
        if self.ctx.id() == other.ctx.id() {
            Ok(())
        } else {
            Err(PolyError::MixedContexts)
        }
    }

    pub fn add(&self, other: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(other)?;
        let f = &self.ctx;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(DensePoly::new(f, coeffs))
    }

    pub fn neg(&self) -> DensePoly {
        let f = &self.ctx;
        DensePoly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElement) -> DensePoly {
        let f = &self.ctx;
        DensePoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(other)?;
        let f = &self.ctx;
        if self.is_zero() || other.is_zero() {
            return Ok(DensePoly::zero(f));
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(DensePoly::new(f, out))
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, divisor: &DensePoly) -> Result<(DensePoly, DensePoly), PolyError> {
        self.same_ctx(divisor)?;
        let f = &self.ctx;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((DensePoly::zero(f), self.clone()));
        }
        let mut quot = vec![f.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[k - dd] = factor;
            for (i, &m) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + i] = f.sub(rem[k - dd + i], f.mul(factor, m));
            }
        }
        Ok((DensePoly::new(f, quot), DensePoly::new(f, rem)))
    }

    pub fn rem(&self, divisor: &DensePoly) -> Result<DensePoly, PolyError> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// `self^n mod modulus` by square-and-multiply in the quotient ring.
    pub fn pow_mod(&self, n: &BigUint, modulus: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(modulus)?;
        let base = self.rem(modulus)?;
        let mut acc = DensePoly::constant(&self.ctx, self.ctx.one()).rem(modulus)?;
        for i in (0..n.bits()).rev() {
            acc = acc.mul(&acc)?.rem(modulus)?;
            if n.bit(i) {
                acc = acc.mul(&base)?.rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// Horner evaluation. Sparse polynomials of high degree are evaluated
    /// term by term instead.
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        Evaluator::new(self).eval(x)
    }

    /// Values at every element of the context, in enumeration order.
    pub fn eval_all(&self) -> Vec<FieldElement> {
        let ev = Evaluator::new(self);
        self.ctx.elements().map(|x| ev.eval(x)).collect()
    }

    /// Reduction modulo `x^Q - x` with `Q = |ctx|^m`: every exponent
    /// `d >= Q` becomes `((d - 1) mod (Q - 1)) + 1`. The induced function on
    /// `F_Q` is unchanged.
    pub fn reduce_mod_field(&self, m: u32) -> DensePoly {
        let f = &self.ctx;
        let big_q = self
            .ctx
            .order()
            .checked_pow(m)
            .expect("field power overflows u64") as usize;
        if self.coeffs.len() <= big_q {
            return self.clone();
        }
        let mut out = vec![f.zero(); big_q];
        for (d, c) in self.terms() {
            let e = if d >= big_q { (d - 1) % (big_q - 1) + 1 } else { d };
            out[e] = f.add(out[e], c);
        }
        DensePoly::new(f, out)
    }

    /// `self(other)` by Horner's rule over polynomials.
    pub fn compose(&self, other: &DensePoly) -> Result<DensePoly, PolyError> {
        self.same_ctx(other)?;
        let f = &self.ctx;
        let mut acc = DensePoly::zero(f);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(other)?.add(&DensePoly::constant(f, c))?;
        }
        Ok(acc)
    }

    /// The same polynomial over a field that contains this one (or whose
    /// prime field holds every coefficient).
    pub fn lift_to(&self, target: &Arc<FieldCtx>) -> Result<DensePoly, PolyError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| target.lift_from(&self.ctx, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DensePoly::new(target, coeffs))
    }
}

/// Evaluation strategy fixed once per polynomial.
enum Evaluator<'a> {
    Horner(&'a DensePoly),
    Sparse(&'a Arc<FieldCtx>, Vec<(usize, FieldElement)>),
}

impl<'a> Evaluator<'a> {
    fn new(p: &'a DensePoly) -> Self {
        let len = p.coeffs.len();
        let terms: Vec<_> = p.terms().collect();
        let log = (usize::BITS - len.leading_zeros()) as usize;
        if terms.len() * 2 * log.max(1) < len {
            Evaluator::Sparse(&p.ctx, terms)
        } else {
            Evaluator::Horner(p)
        }
    }

    fn eval(&self, x: FieldElement) -> FieldElement {
        match self {
            Evaluator::Horner(p) => {
                let f = &p.ctx;
                p.coeffs
                    .iter()
                    .rev()
                    .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
            }
            Evaluator::Sparse(f, terms) => terms.iter().fold(f.zero(), |acc, &(d, c)| {
                f.add(acc, f.mul(c, f.pow(x, d as u64)))
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<FieldCtx> {
        FieldCtx::new(3, 1).unwrap()
    }

    #[test]
    fn square_of_x_plus_one_over_f3() {
        let f = f3();
        let p = DensePoly::from_ints(&f, &[1, 1]);
        assert_eq!(p.mul(&p).unwrap(), DensePoly::from_ints(&f, &[1, 2, 1]));
    }

    #[test]
    fn x_to_the_field_order_is_x_mod_frobenius() {
        let f = FieldCtx::new(3, 1).unwrap();
        let q2 = 9usize;
        let modulus = DensePoly::from_terms(&f, &[(q2, f.one()), (1, f.from_int(-1))]);
        let x = DensePoly::x(&f);
        let r = x.pow_mod(&BigUint::from(q2), &modulus).unwrap();
        assert_eq!(r, x);
    }

    #[test]
    fn scaling_by_zero_gives_zero() {
        let f = f3();
        let p = DensePoly::from_ints(&f, &[1, 2, 0, 1]);
        assert!(p.scale(f.zero()).is_zero());
    }

    #[test]
    fn mixed_contexts_rejected() {
        let a = DensePoly::x(&f3());
        let b = DensePoly::x(&f3());
        assert_eq!(a.add(&b), Err(PolyError::MixedContexts));
    }

    #[test]
    fn eval_basics() {
        let f = FieldCtx::new(5, 2).unwrap();
        let c = f.element(13).unwrap();
        let k = DensePoly::constant(&f, c);
        let sub = f.subfield().unwrap().clone();
        let x_qm1 = DensePoly::monomial(&f, f.one(), 4);
        for x in f.elements() {
            assert_eq!(k.eval(x), c);
            if !x.is_zero() && f.restrict(x).is_ok() {
                assert_eq!(x_qm1.eval(x), f.one());
            }
        }
        assert_eq!(sub.order(), 5);
    }

    #[test]
    fn reduction_examples() {
        let f = FieldCtx::new(3, 2).unwrap();
        let x9 = DensePoly::monomial(&f, f.one(), 9);
        assert_eq!(x9.reduce_mod_field(1), DensePoly::x(&f));
        let small = DensePoly::from_ints(&f, &[1, 0, 2, 1]);
        assert_eq!(small.reduce_mod_field(1), small);
        // exponent 0 stays 0, exponent Q-1 stays Q-1, exponent 2Q-2 -> Q-1
        let p = DensePoly::from_terms(&f, &[(0, f.one()), (16, f.one())]);
        assert_eq!(
            p.reduce_mod_field(1),
            DensePoly::from_terms(&f, &[(0, f.one()), (8, f.one())])
        );
    }

    #[test]
    fn division_round_trip() {
        let f = FieldCtx::new(7, 1).unwrap();
        let a = DensePoly::from_ints(&f, &[3, 1, 4, 1, 5, 9, 2]);
        let b = DensePoly::from_ints(&f, &[2, 0, 3]);
        let (qt, r) = a.div_rem(&b).unwrap();
        assert!(r.degree().is_none_or(|d| d < 2));
        assert_eq!(qt.mul(&b).unwrap().add(&r).unwrap(), a);
        assert_eq!(
            a.div_rem(&DensePoly::zero(&f)).unwrap_err(),
            PolyError::DivisionByZero
        );
    }

    #[test]
    fn sparse_and_horner_agree() {
        let f = FieldCtx::new(3, 2).unwrap();
        let p = DensePoly::from_terms(&f, &[(1, f.one()), (71, f.element(5).unwrap())]);
        for x in f.elements() {
            let horner = p
                .coeffs()
                .iter()
                .rev()
                .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c));
            assert_eq!(p.eval(x), horner);
        }
    }
}
