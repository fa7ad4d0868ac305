//! Three independent permutation tests: full enumeration, the power-sum
//! criterion, and the reduction to the `(q-1)`-st powers of `F_{q^2}^*`.

use std::sync::Arc;

use crate::ffield::{FieldCtx, FieldElement, FieldError};
use crate::fpoly::DensePoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpMethod {
    BruteForce,
    PowerSum,
    Zieve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpVerdict {
    pub is_pp: bool,
    pub method: PpMethod,
    /// Two distinct points with equal images, when one was found.
    pub witness: Option<(FieldElement, FieldElement)>,
}

/// `x^{q-2} + t*x^{q^2-q-1}` over `ext = F_{q^2}`, with `t` taken from the
/// designated subfield `F_q`.
pub fn permutation_binomial(ext: &Arc<FieldCtx>, t: FieldElement) -> Result<DensePoly, FieldError> {
    let sub = ext.subfield().ok_or(FieldError::NoSubfield)?;
    let q = sub.order() as usize;
    let t = ext.embed(t)?;
    Ok(DensePoly::from_terms(
        ext,
        &[(q - 2, ext.one()), (q * q - q - 1, t)],
    ))
}

/// Enumerates the image over the polynomial's own field.
pub fn is_pp_bruteforce(poly: &DensePoly) -> PpVerdict {
    let ctx = poly.ctx();
    let values = poly.eval_all();
    let mut first_preimage: Vec<Option<FieldElement>> = vec![None; ctx.order() as usize];
    for (x, y) in ctx.elements().zip(values) {
        let slot = &mut first_preimage[y.index() as usize];
        if let Some(prev) = *slot {
            return PpVerdict {
                is_pp: false,
                method: PpMethod::BruteForce,
                witness: Some((prev, x)),
            };
        }
        *slot = Some(x);
    }
    PpVerdict {
        is_pp: true,
        method: PpMethod::BruteForce,
        witness: None,
    }
}

/// Power-sum criterion: `g` permutes `F_Q` iff `sum_x g(x)^s` is `0` for
/// `1 <= s <= Q-2` and `-1` for `s = Q-1`.
pub fn is_pp_powersums(poly: &DensePoly) -> PpVerdict {
    let ctx = poly.ctx();
    let values = poly.eval_all();
    let verdict = |is_pp| PpVerdict {
        is_pp,
        method: PpMethod::PowerSum,
        witness: None,
    };
    let big_q = ctx.order();
    let mut powers = values.clone();
    for s in 1..big_q {
        let sum = powers.iter().fold(ctx.zero(), |acc, &v| ctx.add(acc, v));
        let want = if s == big_q - 1 { ctx.neg(ctx.one()) } else { ctx.zero() };
        if sum != want {
            return verdict(false);
        }
        if s + 1 < big_q {
            for (p, &v) in powers.iter_mut().zip(&values) {
                *p = ctx.mul(*p, v);
            }
        }
    }
    verdict(true)
}

/// With `h = x + t*x^q`, decides whether `s -> s^{q^2-2} * h(s)^{q-1}`
/// permutes `{y^{q-1} : y in F_{q^2}^*}`. Requires `q > 2`.
pub fn zieve_check(fq: &Arc<FieldCtx>, t: FieldElement) -> Result<bool, FieldError> {
    let ext = fq.extend_quadratic()?;
    let q = fq.order();
    assert!(q > 2, "reduction needs q > 2");
    let t = ext.embed(t)?;
    let h = DensePoly::from_terms(&ext, &[(1, ext.one()), (q as usize, t)]);

    let mut in_set = vec![false; ext.order() as usize];
    let mut set = Vec::with_capacity(q as usize + 1);
    for y in ext.nonzero_elements() {
        let s = ext.pow(y, q - 1);
        if !in_set[s.index() as usize] {
            in_set[s.index() as usize] = true;
            set.push(s);
        }
    }
    debug_assert_eq!(set.len() as u64, q + 1);

    let mut hit = vec![false; ext.order() as usize];
    for &s in &set {
        let image = ext.mul(ext.pow(s, q * q - 2), ext.pow(h.eval(s), q - 1));
        let idx = image.index() as usize;
        if !in_set[idx] || hit[idx] {
            return Ok(false);
        }
        hit[idx] = true;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_a_permutation() {
        let f = FieldCtx::new(3, 2).unwrap();
        let x = DensePoly::x(&f);
        assert!(is_pp_bruteforce(&x).is_pp);
        let f5 = FieldCtx::new(5, 1).unwrap();
        assert!(is_pp_powersums(&DensePoly::x(&f5)).is_pp);
    }

    #[test]
    fn cube_map_on_f7_collides() {
        let f = FieldCtx::new(7, 1).unwrap();
        let p = DensePoly::monomial(&f, f.one(), 3);
        let v = is_pp_bruteforce(&p);
        assert!(!v.is_pp);
        let (a, b) = v.witness.unwrap();
        assert_ne!(a, b);
        assert_eq!(p.eval(a), p.eval(b));
        // oracle: the image of x^3 on F_7 is {0, 1, 6}
        let mut image: Vec<u32> = f.elements().map(|x| p.eval(x).index()).collect();
        image.sort();
        image.dedup();
        assert_eq!(image, vec![0, 1, 6]);
    }

    #[test]
    fn square_map_on_f3_fails_first_power_sum() {
        let f = FieldCtx::new(3, 1).unwrap();
        let p = DensePoly::monomial(&f, f.one(), 2);
        assert!(!is_pp_powersums(&p).is_pp);
    }

    #[test]
    fn binomial_small_cases() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let e25 = f5.extend_quadratic().unwrap();
        let f = permutation_binomial(&e25, f5.one()).unwrap();
        assert!(is_pp_bruteforce(&f).is_pp);
        assert!(zieve_check(&f5, f5.one()).unwrap());

        let f7 = FieldCtx::new(7, 1).unwrap();
        let e49 = f7.extend_quadratic().unwrap();
        let g = permutation_binomial(&e49, f7.one()).unwrap();
        assert!(!is_pp_powersums(&g).is_pp);
        assert!(!is_pp_bruteforce(&g).is_pp);
        assert!(!zieve_check(&f7, f7.one()).unwrap());

        let f3 = FieldCtx::new(3, 1).unwrap();
        let e9 = f3.extend_quadratic().unwrap();
        let h = permutation_binomial(&e9, f3.from_int(2)).unwrap();
        assert!(!is_pp_bruteforce(&h).is_pp);
        assert!(!zieve_check(&f3, f3.from_int(2)).unwrap());
    }
}
