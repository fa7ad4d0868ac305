//! Parameter sweeps producing [`CheckRecord`]s. Each sweep fans out over
//! rayon's current pool and returns records in a fixed order regardless
//! of thread count; [`Report::new`](crate::report::Report::new) sorts them
//! again before rendering.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::binom_mod::{
    alpha1_necessity, binom_padic, epsilon, eq33_check, power_sum_closed, root_check,
    thm11_classify, thm11_classify_int, PowerSumTable, Thm11Verdict, TwiceInt,
};
use crate::ffield::{prime_power, FieldCtx, FieldError};
use crate::gnq::{
    equivalent_t, is_desirable, section4_congruence_check, section4_degree, thm41_classify,
    DEFAULT_MAX_N,
};
use crate::permtest::{is_pp_bruteforce, is_pp_powersums, permutation_binomial, zieve_check, PpVerdict};
use crate::report::CheckRecord;
use crate::wzhyper::{
    certificate_residual, hyp_forms_check, recurrence_combination, sum_s, Family,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("{name} must be at least {min}, got {value}")]
    BelowMinimum { name: &'static str, min: u64, value: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("q = {0} must be odd for this sweep")]
    EvenQ(u64),
    #[error("q = {q} is too large: {source}")]
    Field { q: u64, source: FieldError },
    #[error("empty parameter list")]
    EmptyList,
}

fn at_least(name: &'static str, value: u64, min: u64) -> Result<(), SweepError> {
    if value < min {
        return Err(SweepError::BelowMinimum { name, min, value });
    }
    Ok(())
}

/// Prime powers in `[lo, hi]`.
pub fn prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&q| prime_power(q).is_some()).collect()
}

fn field(q: u64) -> Result<Arc<FieldCtx>, SweepError> {
    if prime_power(q).is_none() {
        return Err(SweepError::NotPrimePower(q));
    }
    FieldCtx::for_order(q).map_err(|source| SweepError::Field { q, source })
}

fn quadratic(fq: &Arc<FieldCtx>) -> Result<Arc<FieldCtx>, SweepError> {
    fq.extend_quadratic().map_err(|source| SweepError::Field {
        q: fq.order(),
        source,
    })
}

fn pp_tag(is_pp: bool) -> &'static str {
    if is_pp {
        "pp"
    } else {
        "not-pp"
    }
}

fn classifier_tag(v: &Thm11Verdict) -> String {
    if v.is_pp {
        format!("pp:{}", v.case.tag())
    } else {
        "not-pp".to_string()
    }
}

fn verdict_tag(v: &PpVerdict) -> &'static str {
    pp_tag(v.is_pp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thm1Options {
    pub q_max: u64,
    /// Run the power-sum oracle for `q` up to this bound.
    pub powersum_max: Option<u64>,
    pub zieve: bool,
}

/// Classifier against enumeration for every prime power `3 <= q <= q_max`
/// and every `t` in `F_q^*`, plus the optional oracles and the auxiliary
/// necessity/sufficiency checks for odd `q`.
pub fn thm1(opts: Thm1Options) -> Result<Vec<CheckRecord>, SweepError> {
    at_least("q-max", opts.q_max, 3)?;
    let qs = prime_powers(3, opts.q_max);
    // validate every field up front so errors surface before any work
    for &q in &qs {
        quadratic(&field(q)?)?;
    }
    let per_q: Vec<Vec<CheckRecord>> = qs
        .par_iter()
        .map(|&q| thm1_for_q(q, opts))
        .collect::<Result<_, _>>()?;
    Ok(per_q.into_iter().flatten().collect())
}

fn thm1_for_q(q: u64, opts: Thm1Options) -> Result<Vec<CheckRecord>, SweepError> {
    let fq = field(q)?;
    let ext = quadratic(&fq)?;
    let mut out = Vec::new();
    for t in fq.nonzero_elements() {
        let params = [("q", q.to_string()), ("t", t.to_string())];
        let f = permutation_binomial(&ext, t).expect("t lies in the subfield");
        let bf = is_pp_bruteforce(&f);
        let witness_ok = bf
            .witness
            .is_none_or(|(a, b)| a != b && f.eval(a) == f.eval(b));
        let cls = thm11_classify(&fq, t).expect("q > 2 and t != 0");
        out.push(CheckRecord::outcome(
            "thm1.classify",
            &params,
            verdict_tag(&bf),
            classifier_tag(&cls),
            bf.is_pp == cls.is_pp && witness_ok,
        ));
        if opts.powersum_max.is_some_and(|m| q <= m) {
            let ps = is_pp_powersums(&f);
            out.push(CheckRecord::compare(
                "thm1.powersum",
                &params,
                verdict_tag(&bf),
                verdict_tag(&ps),
            ));
        }
        if opts.zieve {
            let z = zieve_check(&fq, t).expect("t lies in F_q");
            out.push(CheckRecord::compare(
                "thm1.zieve",
                &params,
                verdict_tag(&bf),
                pp_tag(z),
            ));
        }
        if fq.desc().is_odd() {
            // alpha = 1 condition vanishes exactly when (t + eps)(t - 3 eps) = 0
            let eps = fq.from_int(epsilon(&fq, t).expect("odd q") as i64);
            let product = fq.mul(
                fq.add(t, eps),
                fq.sub(t, fq.mul(fq.from_int(3), eps)),
            );
            let v = alpha1_necessity(&fq, t).expect("odd q, t != 0");
            out.push(CheckRecord::compare(
                "thm1.alpha1",
                &params,
                format!("zero={}", product.is_zero()),
                format!("zero={}", v.is_zero()),
            ));
            let has_nonzero_root = ext
                .nonzero_elements()
                .any(|x| f.eval(x).is_zero());
            let rc = root_check(&fq, t).expect("odd q, t != 0");
            out.push(CheckRecord::outcome(
                "thm1.root_check",
                &params,
                format!("only-root-zero={}", !has_nonzero_root),
                format!("only-root-zero={rc}"),
                rc == !has_nonzero_root && (!cls.is_pp || rc),
            ));
        }
    }
    if q % 4 == 1 {
        let table = PowerSumTable::new(&ext, fq.one()).expect("t = 1 lies in F_q");
        for alpha in (1..q - 1).step_by(2) {
            let s = alpha + (q - 1 - alpha) * q;
            let sum = table.sum(s).expect("sum lies in F_q");
            out.push(CheckRecord::compare(
                "thm1.case_i_sum",
                &[("q", q.to_string()), ("alpha", alpha.to_string())],
                0,
                sum,
            ));
        }
    }
    Ok(out)
}

/// Closed form against brute-force power sums for every `t` and every
/// admissible `(alpha, beta)`.
pub fn lemma31(q_list: &[u64]) -> Result<Vec<CheckRecord>, SweepError> {
    if q_list.is_empty() {
        return Err(SweepError::EmptyList);
    }
    let mut jobs = Vec::new();
    for &q in q_list {
        at_least("q", q, 3)?;
        if q % 2 == 0 {
            return Err(SweepError::EvenQ(q));
        }
        let fq = field(q)?;
        quadratic(&fq)?;
        for t in 1..q {
            jobs.push((q, t));
        }
    }
    let per: Vec<Vec<CheckRecord>> = jobs
        .par_iter()
        .map(|&(q, ti)| {
            let fq = field(q)?;
            let ext = quadratic(&fq)?;
            let t = fq.element(ti).expect("index below q");
            let table = PowerSumTable::new(&ext, t).expect("t in F_q");
            let mut out = Vec::new();
            for beta in 0..q {
                for alpha in 0..q {
                    let s = alpha + beta * q;
                    if s == 0 || s >= q * q - 1 {
                        continue;
                    }
                    let params = [
                        ("q", q.to_string()),
                        ("t", t.to_string()),
                        ("alpha", alpha.to_string()),
                        ("beta", beta.to_string()),
                    ];
                    let direct = table.sum(s).expect("sum lies in F_q");
                    let closed = match power_sum_closed(&fq, t, alpha, beta) {
                        Ok(v) => v.to_string(),
                        Err(e) => format!("error: {e}"),
                    };
                    out.push(CheckRecord::compare("lemma31.power_sum", &params, direct, closed));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, SweepError>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Randomized check that `C(z + q*w, a) = C(z, a) (mod p)` for integer and
/// half-integer `z`, `q <= 343`.
pub fn lemma30(seed: u64, samples: usize) -> Result<Vec<CheckRecord>, SweepError> {
    at_least("samples", samples as u64, 1)?;
    let qs = prime_powers(2, 343);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for idx in 0..samples {
        let q = qs[rng.gen_range(0..qs.len())];
        let (p, e) = prime_power(q).unwrap();
        let desc = crate::ffield::PrimePowerDesc::new(p, e).unwrap();
        let mut twice: i64 = rng.gen_range(-2_000_000..=2_000_000);
        if q % 2 == 0 {
            twice &= !1;
        }
        let z = TwiceInt::from_twice(twice);
        let w: i64 = rng.gen_range(-1000..=1000);
        let a = rng.gen_range(0..q);
        let shifted = z.plus_int(&(BigInt::from(q) * w));
        let params = [
            ("sample", idx.to_string()),
            ("q", q.to_string()),
            ("z", z.to_string()),
            ("w", w.to_string()),
            ("a", a.to_string()),
        ];
        let lhs = binom_padic(&shifted, a, desc).expect("valid inputs");
        let rhs = binom_padic(&z, a, desc).expect("valid inputs");
        out.push(CheckRecord::compare("lemma30.congruence", &params, rhs, lhs));
    }
    Ok(out)
}

pub fn identity(n_max: u64) -> Result<Vec<CheckRecord>, SweepError> {
    Ok((0..=n_max)
        .into_par_iter()
        .map(|n| {
            let total = sum_s(Family::One, n) + sum_s(Family::Two, n);
            CheckRecord::compare("thm12.identity", &[("n", n.to_string())], 0, total)
        })
        .collect())
}

/// Second-order recurrence for both sums at `0 <= n <= n_max`.
pub fn recurrence(n_max: u64) -> Result<Vec<CheckRecord>, SweepError> {
    let sums: Vec<(BigInt, BigInt)> = (0..=n_max + 2)
        .into_par_iter()
        .map(|n| (sum_s(Family::One, n), sum_s(Family::Two, n)))
        .collect();
    let mut out = Vec::new();
    for fam in Family::BOTH {
        let pick = |n: u64| match fam {
            Family::One => &sums[n as usize].0,
            Family::Two => &sums[n as usize].1,
        };
        for n in 0..=n_max {
            let r = recurrence_combination(n, pick(n), pick(n + 1), pick(n + 2));
            out.push(CheckRecord::compare(
                "thm12.recurrence",
                &[("i", fam.to_string()), ("n", n.to_string())],
                0,
                r,
            ));
        }
    }
    Ok(out)
}

/// Lowest `k` visited by the certificate sweep.
pub const CERT_K_MIN: i64 = -5;

/// Telescoping residuals on `[0, n_max] x [CERT_K_MIN, k_max]`; poles are
/// recorded as skipped.
pub fn certificate(n_max: u64, k_max: i64) -> Result<Vec<CheckRecord>, SweepError> {
    let mut points = Vec::new();
    for fam in Family::BOTH {
        for n in 0..=n_max {
            for k in CERT_K_MIN..=k_max {
                points.push((fam, n, k));
            }
        }
    }
    Ok(points
        .par_iter()
        .map(|&(fam, n, k)| {
            let params = [
                ("i", fam.to_string()),
                ("n", n.to_string()),
                ("k", k.to_string()),
            ];
            match certificate_residual(fam, n, k) {
                Ok(res) => CheckRecord::compare("thm12.certificate", &params, 0, res),
                Err(pole) => CheckRecord::skipped("thm12.certificate", &params, pole),
            }
        })
        .collect())
}

pub fn hyp(n_max: u64) -> Result<Vec<CheckRecord>, SweepError> {
    let ns: Vec<u64> = (0..=n_max).collect();
    Ok(ns.par_iter().flat_map_iter(|&n| hyp_forms_check(n)).collect())
}

/// The mod-`p` bracket for every odd prime power `q <= q_max` and odd
/// `0 < alpha < q - 1`.
pub fn eq33(q_max: u64) -> Result<Vec<CheckRecord>, SweepError> {
    at_least("q-max", q_max, 3)?;
    let qs: Vec<u64> = prime_powers(3, q_max).into_iter().filter(|q| q % 2 == 1).collect();
    let per: Vec<Vec<CheckRecord>> = qs
        .par_iter()
        .map(|&q| {
            let desc = crate::ffield::PrimePowerDesc::from_order(q).unwrap();
            (1..q.saturating_sub(1))
                .step_by(2)
                .map(|alpha| {
                    let params = [("q", q.to_string()), ("alpha", alpha.to_string())];
                    match eq33_check(desc, alpha) {
                        Ok(v) => CheckRecord::compare("eq33", &params, 0, v),
                        Err(e) => CheckRecord::outcome("eq33", &params, 0, format!("error: {e}"), false),
                    }
                })
                .collect()
        })
        .collect();
    Ok(per.into_iter().flatten().collect())
}

/// Congruence, desirability and the cross-check against the binomial
/// classifier for `1 <= i <= i_max`.
pub fn gnq(q_list: &[u64], i_max: u32) -> Result<Vec<CheckRecord>, SweepError> {
    if q_list.is_empty() {
        return Err(SweepError::EmptyList);
    }
    at_least("i-max", i_max as u64, 1)?;
    let mut jobs = Vec::new();
    for &q in q_list {
        at_least("q", q, 3)?;
        field(q)?;
        for i in 1..=i_max {
            jobs.push((q, i));
        }
    }
    let per: Vec<Vec<CheckRecord>> = jobs
        .par_iter()
        .map(|&(q, i)| gnq_for(q, i))
        .collect::<Result<_, _>>()?;
    Ok(per.into_iter().flatten().collect())
}

fn gnq_for(q: u64, i: u32) -> Result<Vec<CheckRecord>, SweepError> {
    let fq = field(q)?;
    let params = [("q", q.to_string()), ("i", i.to_string())];
    let mut out = vec![section4_congruence_check(&fq, i)];
    let verdict = thm41_classify(fq.desc(), i as u64);
    let n = section4_degree(q, i).filter(|&n| n <= DEFAULT_MAX_N);
    let Some(n) = n else {
        out.push(CheckRecord::skipped(
            "gnq.thm41",
            &params,
            format!("congruence-derived only: degree exceeds {DEFAULT_MAX_N} (predicted {})", verdict.tag()),
        ));
        return Ok(out);
    };
    let Some(predicted) = verdict.is_desirable() else {
        out.push(CheckRecord::skipped(
            "gnq.thm41",
            &params,
            "excluded: i = 0 or 1 mod p",
        ));
        return Ok(out);
    };
    let actual = match is_desirable(n, 2, &fq) {
        Ok(v) => v,
        Err(e) => {
            out.push(CheckRecord::outcome("gnq.thm41", &params, pp_tag(predicted), format!("error: {e}"), false));
            return Ok(out);
        }
    };
    out.push(CheckRecord::outcome(
        "gnq.thm41",
        &params,
        pp_tag(actual),
        format!("{}:{}", pp_tag(predicted), verdict.tag()),
        actual == predicted,
    ));
    let t = equivalent_t(&fq, i as u64).expect("i != 0 mod p");
    let cls = thm11_classify(&fq, t).expect("i != 1 mod p gives t != 0");
    out.push(CheckRecord::outcome(
        "gnq.thm11_consistency",
        &[("q", q.to_string()), ("i", i.to_string()), ("t", t.to_string())],
        pp_tag(actual),
        classifier_tag(&cls),
        actual == cls.is_pp,
    ));
    Ok(out)
}

/// One classifier-vs-enumeration record for `(q, t)`.
pub fn classify(q: u64, t: i64) -> Result<Vec<CheckRecord>, SweepError> {
    at_least("q", q, 3)?;
    let fq = field(q)?;
    let ext = quadratic(&fq)?;
    let te = fq.from_int(t);
    let params = [("q", q.to_string()), ("t", t.to_string())];
    if te.is_zero() {
        return Ok(vec![CheckRecord::skipped("classify", &params, "t = 0 in F_q")]);
    }
    let cls = thm11_classify_int(&fq, t).expect("q > 2, t != 0");
    let f = permutation_binomial(&ext, te).expect("t in F_q");
    let bf = is_pp_bruteforce(&f);
    Ok(vec![CheckRecord::outcome(
        "classify",
        &params,
        verdict_tag(&bf),
        classifier_tag(&cls),
        bf.is_pp == cls.is_pp,
    )])
}

/// Acceptance-scale parameters for `sweep all`.
pub mod defaults {
    pub const THM1_Q_MAX: u64 = 81;
    pub const POWERSUM_Q_MAX: u64 = 27;
    pub const LEMMA31_Q: [u64; 6] = [3, 5, 7, 9, 11, 13];
    pub const LEMMA30_SAMPLES: usize = 500;
    pub const IDENTITY_N_MAX: u64 = 300;
    pub const RECURRENCE_N_MAX: u64 = 298;
    pub const CERT_N_MAX: u64 = 40;
    pub const CERT_K_MAX: i64 = 50;
    pub const HYP_N_MAX: u64 = 100;
    pub const EQ33_Q_MAX: u64 = 121;
    pub const GNQ_Q: [u64; 4] = [3, 5, 7, 9];
    pub const GNQ_I_MAX: u32 = 4;
}

/// Every sweep at acceptance scale.
pub fn all(seed: u64) -> Result<Vec<CheckRecord>, SweepError> {
    use defaults::*;
    let mut out = thm1(Thm1Options {
        q_max: THM1_Q_MAX,
        powersum_max: Some(POWERSUM_Q_MAX),
        zieve: true,
    })?;
    out.extend(lemma31(&LEMMA31_Q)?);
    out.extend(lemma30(seed, LEMMA30_SAMPLES)?);
    out.extend(identity(IDENTITY_N_MAX)?);
    out.extend(recurrence(RECURRENCE_N_MAX)?);
    out.extend(certificate(CERT_N_MAX, CERT_K_MAX)?);
    out.extend(hyp(HYP_N_MAX)?);
    out.extend(eq33(EQ33_Q_MAX)?);
    out.extend(gnq(&GNQ_Q, GNQ_I_MAX)?);
    Ok(out)
}
