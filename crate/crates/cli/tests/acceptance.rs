//! End-to-end acceptance checks, one printed line per criterion.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ffperm::ffield::FieldCtx;
use ffperm::fpoly::DensePoly;
use ffperm::gnq::{gnq_compute, section4_degree, DEFAULT_MAX_N};
use ffperm::report::CheckRecord;
use ffperm::sweeps::{self, prime_powers, Thm1Options, CERT_K_MIN};
use ffperm::wzhyper::{certificate, sum_s, Family};
use num_bigint::BigInt;

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

fn no_failures(records: &[CheckRecord]) -> Result<(), String> {
    let bad: Vec<_> = records.iter().filter(|r| r.failed()).collect();
    match bad.first() {
        None => Ok(()),
        Some(first) => Err(format!(
            "{} failures, first {} [{}] expected={} observed={}",
            bad.len(),
            first.check,
            first.params_joined(),
            first.expected,
            first.observed
        )),
    }
}

fn of<'a>(records: &'a [CheckRecord], check: &str) -> Vec<&'a CheckRecord> {
    records.iter().filter(|r| r.check == check).collect()
}

fn passed_count(records: &[&CheckRecord]) -> usize {
    records.iter().filter(|r| r.pass).count()
}

fn expect_count(what: &str, got: usize, want: usize) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: {got} records, expected {want}"))
    }
}

fn criterion_1(thm1: &[CheckRecord]) -> Outcome {
    let cls = of(thm1, "thm1.classify");
    let owned: Vec<CheckRecord> = cls.iter().map(|r| (*r).clone()).collect();
    no_failures(&owned)?;
    let qs = prime_powers(3, 81);
    let want: u64 = qs.iter().map(|q| q - 1).sum();
    expect_count("classify", passed_count(&cls), want as usize)?;
    for even in [4, 8, 16, 32, 64] {
        let n = cls.iter().filter(|r| r.param("q") == Some(&even.to_string())).count();
        expect_count(&format!("classify q={even}"), n, even as usize - 1)?;
    }
    let pp = cls.iter().filter(|r| r.expected == "pp").count();
    Ok(format!("{} prime powers, {want} pairs, {pp} permutations", qs.len()))
}

fn criterion_2(thm1: &[CheckRecord]) -> Outcome {
    let ps = of(thm1, "thm1.powersum");
    let zv = of(thm1, "thm1.zieve");
    let all: Vec<CheckRecord> = ps.iter().chain(zv.iter()).map(|r| (*r).clone()).collect();
    no_failures(&all)?;
    let pairs = |bound: u64| prime_powers(3, bound).iter().map(|q| q - 1).sum::<u64>() as usize;
    expect_count("powersum", passed_count(&ps), pairs(27))?;
    let zieve_small = zv
        .iter()
        .filter(|r| r.pass && r.param("q").unwrap().parse::<u64>().unwrap() <= 49)
        .count();
    expect_count("zieve q<=49", zieve_small, pairs(49))?;
    Ok(format!("{} power-sum and {} reduction comparisons", ps.len(), zv.len()))
}

fn criterion_3() -> Outcome {
    let qs = [3u64, 5, 7, 9, 11, 13];
    let recs = sweeps::lemma31(&qs).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    let want: u64 = qs.iter().map(|q| (q - 1) * (q * q - 2)).sum();
    expect_count("power sums", passed_count(&recs.iter().collect::<Vec<_>>()), want as usize)?;
    Ok(format!("{want} (q, t, alpha, beta) tuples"))
}

fn criterion_4() -> Outcome {
    let recs = sweeps::identity(300).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    expect_count("identity", passed_count(&recs.iter().collect::<Vec<_>>()), 301)?;
    for (n, v) in [(0u64, 6i64), (1, -3312), (2, 6_462_720)] {
        let got = sum_s(Family::One, n);
        if got != BigInt::from(v) {
            return Err(format!("S1({n}) = {got}, expected {v}"));
        }
    }
    Ok("301 values of n, goldens S1(0..=2) match".into())
}

fn criterion_5() -> Outcome {
    let recs = sweeps::recurrence(298).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    expect_count("recurrence", passed_count(&recs.iter().collect::<Vec<_>>()), 2 * 299)?;
    Ok("both families, n = 0..=298".into())
}

fn criterion_6() -> Outcome {
    let recs = sweeps::certificate(40, 50).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    expect_count("points", recs.len(), 2 * 41 * (50 - CERT_K_MIN + 1) as usize)?;
    for fam in Family::BOTH {
        let tag = fam.to_string();
        let skipped = recs
            .iter()
            .filter(|r| r.skipped && r.param("i") == Some(tag.as_str()))
            .count();
        if skipped == 0 {
            return Err(format!("no pole exercised for R{fam}"));
        }
        let pole = (0..=40i64)
            .flat_map(|n| (CERT_K_MIN..=51).map(move |k| (n, k)))
            .find_map(|(n, k)| certificate(fam, n, k).err())
            .ok_or_else(|| format!("no pole of R{fam} on the grid"))?;
        if pole.factors.is_empty() {
            return Err(format!("pole of R{fam} has no factors"));
        }
    }
    let pass = recs.iter().filter(|r| r.pass).count();
    let skip = recs.iter().filter(|r| r.skipped).count();
    Ok(format!("{pass} zero residuals, {skip} pole points skipped"))
}

fn criterion_7() -> Outcome {
    let recs = sweeps::hyp(100).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    for check in ["hyp.form_a", "hyp.form_b", "hyp.form_c", "hyp.chain"] {
        expect_count(check, passed_count(&of(&recs, check)), 101)?;
    }
    Ok("n = 0..=100".into())
}

fn criterion_8() -> Outcome {
    let recs = sweeps::eq33(121).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    let want: u64 = prime_powers(3, 121)
        .iter()
        .filter(|q| *q % 2 == 1)
        .map(|q| (q - 1) / 2)
        .sum();
    expect_count("eq33", passed_count(&recs.iter().collect::<Vec<_>>()), want as usize)?;
    Ok(format!("{want} (q, alpha) pairs"))
}

fn criterion_9() -> Outcome {
    let qs = [3u64, 5, 7, 9];
    let recs = sweeps::gnq(&qs, 4).map_err(|e| e.to_string())?;
    no_failures(&recs)?;
    let cong = of(&recs, "gnq.congruence");
    for q in qs {
        for i in 1..=4u32 {
            let in_range = section4_degree(q, i).is_some_and(|n| n <= DEFAULT_MAX_N);
            let found = cong.iter().any(|r| {
                r.pass && r.param("q") == Some(&q.to_string()) && r.param("i") == Some(&i.to_string())
            });
            if in_range && !found {
                return Err(format!("congruence not verified at q={q} i={i}"));
            }
        }
    }
    let verified = passed_count(&of(&recs, "gnq.thm41"));
    if verified == 0 {
        return Err("no desirability verdict checked by enumeration".into());
    }
    let f3 = FieldCtx::for_order(3).unwrap();
    let g5 = gnq_compute(5, &f3).map_err(|e| e.to_string())?.reduced;
    if g5 != DensePoly::from_ints(&f3, &[0, 2]) {
        return Err(format!("g(5,3) reduced = {g5}"));
    }
    let g77 = gnq_compute(77, &f3).map_err(|e| e.to_string())?.reduced;
    if g77 != DensePoly::from_ints(&f3, &[0, 1, 0, 0, 0, 1]) {
        return Err(format!("g(77,3) reduced = {g77}"));
    }
    Ok(format!(
        "{} congruences, {verified} verdicts by enumeration, goldens match",
        passed_count(&cong)
    ))
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ffperm");
    let run = |jobs: &str| {
        let out = Command::new(bin)
            .args(["sweep", "all", "--jobs", jobs])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("--jobs {jobs} exited with {}", out.status));
        }
        Ok::<_, String>(out.stdout)
    };
    let one = run("1")?;
    let eight = run("8")?;
    if one != eight {
        return Err("reports differ between --jobs 1 and --jobs 8".into());
    }
    let summary = String::from_utf8_lossy(&one)
        .lines()
        .last()
        .unwrap_or_default()
        .to_string();
    Ok(format!("{} identical bytes; {summary}", one.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let thm1 = sweeps::thm1(Thm1Options {
        q_max: 81,
        powersum_max: Some(27),
        zieve: true,
    });
    let thm1_time = start.elapsed();
    let thm1 = match thm1 {
        Ok(r) => Ok(r),
        Err(e) => Err(e.to_string()),
    };
    let with_thm1 = |f: fn(&[CheckRecord]) -> Outcome| -> Criterion<'_> {
        let thm1 = &thm1;
        Box::new(move || f(thm1.as_ref().map_err(Clone::clone)?))
    };
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("classifier matches enumeration, 3 <= q <= 81", with_thm1(criterion_1)),
        ("power-sum and reduction oracles agree", with_thm1(criterion_2)),
        ("closed-form power sums", Box::new(criterion_3)),
        ("S1 + S2 = 0 for n <= 300", Box::new(criterion_4)),
        ("recurrence for n <= 298", Box::new(criterion_5)),
        ("certificate residuals on [0,40] x [-5,50]", Box::new(criterion_6)),
        ("hypergeometric forms for n <= 100", Box::new(criterion_7)),
        ("binomial bracket vanishes mod p, q <= 121", Box::new(criterion_8)),
        ("g(n,q) congruence and desirability", Box::new(criterion_9)),
        ("sweep all is byte-identical across --jobs", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let mut secs = t0.elapsed().as_secs_f64();
        if idx == 0 {
            secs += thm1_time.as_secs_f64();
        }
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail}) [{secs:.1}s]", idx + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({why}) [{secs:.1}s]", idx + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
