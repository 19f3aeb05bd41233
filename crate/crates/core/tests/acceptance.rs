//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Predictions in every record are re-derived here from plain integer gcds and
//! a trace computed by square-and-multiply, independently of the library's
//! `predict`.

use std::time::{Duration, Instant};

use cubicperm::field::FieldCtx;
use cubicperm::maps::FamilyId;
use cubicperm::verify::{
    admissible_l, check_deg1_lemmas, check_htilde_identities, check_remark, run_gcd_lemma,
    run_step1_batch, run_step2_batch, run_suite, write_jsonl, GridConfig, RemarkReading,
    VerificationRecord,
};

type Outcome = Result<String, String>;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The gcd criterion `gcd(q - 1, p^l + 1) = 1`.
fn coprime(p: u64, k: u32, l: u32) -> bool {
    gcd(p.pow(k) - 1, p.pow(l) + 1) == 1
}

/// `c + c^q + c^(q^2)` is nonzero, for `c` given by index in GF(q^3).
fn trace_nonzero(ctx: &FieldCtx, k: u32, c_index: u32) -> bool {
    let q = (ctx.characteristic() as u64).pow(k);
    let c = ctx.element_from_index(c_index as u64).unwrap();
    let t = ctx.add(
        ctx.add(c, ctx.pow_square_multiply(c, q)),
        ctx.pow_square_multiply(c, q * q),
    );
    !t.is_zero()
}

/// Runs grids, cross-checks every record with `oracle`, and returns the
/// serialized records (for the determinism criterion).
struct Grids {
    jsonl: Vec<u8>,
    configs: Vec<GridConfig>,
}

impl Grids {
    fn run(
        &mut self,
        cfg: GridConfig,
        oracle: impl Fn(&VerificationRecord) -> bool,
    ) -> Result<usize, String> {
        let out = run_suite(&cfg).map_err(|e| e.to_string())?;
        ensure(!out.summary.incomplete, || "incomplete run".into())?;
        ensure(out.summary.mismatched == 0, || {
            let r = out.records.iter().find(|r| !r.matched).unwrap();
            format!("{} mismatches, first {r:?}", out.summary.mismatched)
        })?;
        if let Some(r) = out.records.iter().find(|r| r.predicted != oracle(r)) {
            return Err(format!("prediction disagrees with oracle at {r:?}"));
        }
        write_jsonl(&out.records, &mut self.jsonl).map_err(|e| e.to_string())?;
        self.configs.push(cfg);
        Ok(out.records.len())
    }
}

fn grid(family: FamilyId, primes: &[u64], k_min: u32, k_max: u32) -> GridConfig {
    let mut cfg = GridConfig::new(family, primes.to_vec(), k_max);
    cfg.k_min = k_min;
    // The determinism rerun uses one worker.
    cfg.jobs = 4;
    cfg
}

fn ac1(grids: &mut Grids) -> Outcome {
    let t = Instant::now();
    let cfg = grid(FamilyId::KeyMap, &[2, 3, 5], 1, 6);
    let mut fields: Vec<(u64, u32)> = Vec::new();
    for p in [2u64, 3, 5] {
        fields.extend((1..=6).filter(|&k| p.pow(3 * k) <= 1 << 18).map(|k| (p, k)));
    }
    let n = grids.run(cfg, |r| coprime(r.p, r.k, r.l))?;
    let expected: usize = fields.iter().map(|&(_, k)| 3 * k as usize).sum();
    ensure(n == expected, || format!("{n} points, expected {expected}"))?;
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{n} points over {} fields in {elapsed:.2?}",
        fields.len()
    ))
}

fn ac2(grids: &mut Grids) -> Outcome {
    let t = Instant::now();
    let mut n = 0;
    for family in [FamilyId::F1, FamilyId::F2, FamilyId::F3, FamilyId::F4] {
        n += grids.run(grid(family, &[2], 1, 6), |r| coprime(r.p, r.k, r.l))?;
        n += grids.run(grid(family, &[3, 5], 1, 2), |r| coprime(r.p, r.k, r.l))?;
    }
    ensure(n == 4 * (63 + 2 * 9), || format!("{n} points"))?;
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{n} points in {elapsed:.2?}"))
}

fn ac3(grids: &mut Grids) -> Outcome {
    let oracle = |r: &VerificationRecord| {
        let q = r.p.pow(r.k);
        let rs = r.p.pow(r.m) + r.p.pow(r.n);
        coprime(r.p, r.k, r.l) && gcd(q - 1, rs) == 1
    };
    let mut n = grids.run(grid(FamilyId::Main1, &[2], 1, 4), oracle)?;
    n += grids.run(grid(FamilyId::Main1, &[3], 1, 2), oracle)?;
    // Exponent triples times |F_q^*| per field.
    let expected: usize = [(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)]
        .iter()
        .map(|&(p, k)| (3 * k as usize).pow(3) * (p.pow(k) as usize - 1))
        .sum();
    ensure(n == expected, || format!("{n} points, expected {expected}"))?;
    Ok(format!("{n} points"))
}

/// Trace-class oracle shared by the families whose `c` ranges over GF(q^3).
fn trace_oracle(
    base: impl Fn(&VerificationRecord) -> bool,
) -> impl Fn(&VerificationRecord) -> bool {
    let ctxs: Vec<FieldCtx> = (1..=3)
        .map(|k| FieldCtx::build(2, 3 * k).unwrap())
        .collect();
    move |r| {
        let ctx = if r.p == 2 {
            ctxs[r.k as usize - 1].clone()
        } else {
            FieldCtx::build(r.p, 3 * r.k).unwrap()
        };
        base(r) && trace_nonzero(&ctx, r.k, r.c_index.unwrap())
    }
}

fn ac4(grids: &mut Grids) -> Outcome {
    let cfg = grid(FamilyId::Main3, &[2], 1, 3);
    ensure(cfg.element_cap == 512, || "element cap is not 512".into())?;
    let n = grids.run(cfg, trace_oracle(|r| coprime(r.p, r.k, r.l)))?;
    // c ranges over all of GF(2^3), GF(2^6), and the 512-element sample of GF(2^9).
    let expected = 9 * 8 + 36 * 64 + 81 * 512;
    ensure(n == expected, || format!("{n} points, expected {expected}"))?;
    Ok(format!("{n} points"))
}

fn ac5(grids: &mut Grids) -> Outcome {
    let deg3 = |r: &VerificationRecord| r.p.pow(r.k) % 3 == 2;
    let mut n = 0;
    for (primes, k_max) in [(&[2u64][..], 3), (&[3, 5, 7][..], 1)] {
        n += grids.run(grid(FamilyId::KeyDeg3, primes, 1, k_max), deg3)?;
        n += grids.run(
            grid(FamilyId::MainDeg3, primes, 1, k_max),
            trace_oracle(deg3),
        )?;
        n += grids.run(grid(FamilyId::F6, primes, 1, k_max), deg3)?;
    }
    Ok(format!("{n} points over q in {{2, 4, 8, 3, 5, 7}}"))
}

fn ac6() -> Outcome {
    let t = Instant::now();
    let r = run_gcd_lemma();
    let elapsed = t.elapsed();
    ensure(r.checked == 60 * 61, || format!("checked {}", r.checked))?;
    ensure(r.mismatches == 0, || format!("{} mismatches", r.mismatches))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{} pairs in {elapsed:.2?}", r.checked))
}

fn ac7() -> Outcome {
    for q in [2u64, 3, 4, 5, 7, 8] {
        let r = check_deg1_lemmas(q).map_err(|e| e.to_string())?;
        ensure(r.passed, || format!("q = {q}: {r:?}"))?;
        for check in [&r.permutes_mu, &r.p1_onto_mu, &r.mu_onto_p1] {
            ensure(check.converse_failures == Some(0), || {
                format!("q = {q}: converse not enumerated cleanly")
            })?;
        }
        if q % 3 != 0 {
            let omega = r.omega.as_ref().ok_or(format!("q = {q}: no omega check"))?;
            ensure(omega.permutes_both == (q % 3 == 1), || {
                format!("q = {q}: {omega:?}")
            })?;
            ensure(omega.swaps == (q % 3 == 2), || {
                format!("q = {q}: {omega:?}")
            })?;
            if q % 2 == 0 {
                ensure(omega.involution == Some(true), || {
                    format!("q = {q}: {omega:?}")
                })?;
            }
        }
    }
    Ok("q in {2, 3, 4, 5, 7, 8}".into())
}

fn ac8() -> Outcome {
    let seed = 0x5EED;
    let mut lines = Vec::new();
    for (p, k) in [(2u64, 1u32), (2, 2), (3, 1)] {
        let r = run_step1_batch(p, k, 200, seed).map_err(|e| e.to_string())?;
        ensure(r.instances == 200 && r.passed(), || format!("{r:?}"))?;
        lines.push(format!("step1 GF({}^{})", p, 3 * k));
    }
    for (p, k) in [(2u64, 1u32), (2, 2), (5, 1)] {
        let r = run_step2_batch(p, k, 200, seed).map_err(|e| e.to_string())?;
        ensure(r.instances == 200 && r.passed(), || format!("{r:?}"))?;
        lines.push(format!("step2 GF({}^{})", p, 3 * k));
    }
    Ok(format!("200 instances each: {}", lines.join(", ")))
}

fn ac9() -> Outcome {
    let mut count = 0;
    for k in [1u32, 2] {
        for l in admissible_l(k, 6 * k) {
            let r = check_htilde_identities(k, l).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{r:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} (k, l) pairs"))
}

fn ac10() -> Outcome {
    let r = check_remark(2, 1, false).map_err(|e| e.to_string())?;
    ensure(r.literal.reading == RemarkReading::Literal, || {
        "reading order".into()
    })?;
    ensure(r.literal.empirical && r.trace.empirical, || {
        format!("{r:?}")
    })?;
    let r3 = check_remark(2, 3, false).map_err(|e| e.to_string())?;
    ensure(
        r3.literal.asserted.is_none() && r3.trace.asserted.is_none(),
        || "k = 3 must be report-only".into(),
    )?;
    Ok(format!(
        "k = 1 both true; k = 3 recorded: literal={}, trace={}",
        r3.literal.empirical, r3.trace.empirical
    ))
}

fn ac11(grids: &Grids) -> Outcome {
    ensure(!grids.jsonl.is_empty(), || {
        "no suite output to compare".into()
    })?;
    let mut again = Vec::new();
    for cfg in &grids.configs {
        let mut cfg = cfg.clone();
        cfg.jobs = 1;
        let out = run_suite(&cfg).map_err(|e| e.to_string())?;
        write_jsonl(&out.records, &mut again).map_err(|e| e.to_string())?;
    }
    ensure(again == grids.jsonl, || "outputs differ".into())?;
    Ok(format!(
        "{} bytes identical across runs and worker counts",
        again.len()
    ))
}

fn main() {
    let mut grids = Grids {
        jsonl: Vec::new(),
        configs: Vec::new(),
    };
    let results: Vec<(&str, &str, Outcome)> = vec![
        ("AC1", "key map on Γ, p in {2,3,5}", ac1(&mut grids)),
        ("AC2", "f1 to f4", ac2(&mut grids)),
        ("AC3", "Main1", ac3(&mut grids)),
        ("AC4", "Main3 with trace classes", ac4(&mut grids)),
        ("AC5", "degree-3 families", ac5(&mut grids)),
        ("AC6", "gcd lemma", ac6()),
        ("AC7", "degree-1 lemmas", ac7()),
        ("AC8", "step1/step2 random instances", ac8()),
        ("AC9", "h-tilde identities", ac9()),
        ("AC10", "remark readings", ac10()),
        ("AC11", "determinism", ac11(&grids)),
    ];
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
