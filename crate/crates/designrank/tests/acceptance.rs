//! Acceptance criteria 1-12. Each criterion prints one PASS/FAIL line with
//! its wall time; the test fails if any criterion does.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use designrank::engine::{self, Space};
use designrank_core::arith::{prime_divisors, primes_not_dividing};
use designrank_core::charsnf::{char_profile, snf_difference_set};
use designrank_core::diffsets::{dev, group_ring_check, hkm, is_difference_set, lin, singer, DifferenceSet};
use designrank_core::formulas::{klemm_check, plane_order_p2_snf, predict_ag_snf, predict_pg_snf, threes_count_lin};
use designrank_core::geometry::{incidence_ag, incidence_pg, verify_2design};
use designrank_core::snf::{p_local_profile, precision_for, rank_mod_p, snf_exact};
use designrank_core::unitals::{
    bm_rank2_report, bm_unital, conic_vectors_in_dual, default_beta, hermitian_unital, unital_params,
};
use designrank_core::{DesignParams, IncidenceMatrix, InvariantFactorMultiset};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = fn(&mut Ctx) -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Every SNF computed along the way, for the property checks.
struct Computed {
    label: String,
    params: DesignParams,
    inv: InvariantFactorMultiset,
    matrix: Option<IncidenceMatrix>,
}

#[derive(Default)]
struct Ctx {
    computed: Vec<Computed>,
}

impl Ctx {
    fn snf(&mut self, label: &str, m: IncidenceMatrix) -> Result<InvariantFactorMultiset, String> {
        let params = verify_2design(&m).map_err(err)?;
        let inv = snf_exact(&m, &params).map_err(err)?;
        self.computed.push(Computed {
            label: label.into(),
            params,
            inv: inv.clone(),
            matrix: Some(m),
        });
        Ok(inv)
    }

    fn keep(&mut self, label: &str, params: DesignParams, inv: &InvariantFactorMultiset) {
        self.computed.push(Computed {
            label: label.into(),
            params,
            inv: inv.clone(),
            matrix: None,
        });
    }
}

fn c1(ctx: &mut Ctx) -> Outcome {
    let a = incidence_pg(2, 2, 2).map_err(err)?;
    let rank2 = rank_mod_p(&a, 2).map_err(err)?;
    let inv = ctx.snf("PG(2,2)", a)?;
    let pred = predict_pg_snf(2, 2, 2).map_err(err)?;
    ensure!(inv == pred, "computed {inv} vs predicted {pred}");
    ensure!(inv.to_string() == "1^4 2^2 6^1", "got {inv}");
    ensure!(rank2 == 4, "rank_2 = {rank2}");
    let product: u64 = inv.diagonal().iter().product();
    ensure!(product == 24, "product {product}");
    Ok(format!("{inv}, rank_2 = {rank2}, product = {product}"))
}

fn c2(ctx: &mut Ctx) -> Outcome {
    let inv = ctx.snf("PG(2,4)", incidence_pg(2, 2, 4).map_err(err)?)?;
    let pred = predict_pg_snf(2, 2, 4).map_err(err)?;
    let plane = plane_order_p2_snf(2, 10).map_err(err)?;
    ensure!(
        inv == pred && inv == plane,
        "computed {inv}, predicted {pred}, plane formula {plane}"
    );
    ensure!(inv.to_string() == "1^10 2^2 4^8 20^1", "got {inv}");
    Ok(inv.to_string())
}

fn c3(ctx: &mut Ctx) -> Outcome {
    let a = incidence_pg(2, 2, 3).map_err(err)?;
    let rank3 = rank_mod_p(&a, 3).map_err(err)?;
    let inv = ctx.snf("PG(2,3)", a)?;
    ensure!(inv.to_string() == "1^7 3^5 12^1", "PG(2,3) got {inv}");
    ensure!(rank3 == 7, "PG(2,3) rank_3 = {rank3}");
    let b = incidence_pg(3, 3, 2).map_err(err)?;
    let rank2 = rank_mod_p(&b, 2).map_err(err)?;
    let planes = ctx.snf("PG(3,2) planes", b)?;
    ensure!(planes.to_string() == "1^5 2^6 4^3 28^1", "PG(3,2) planes got {planes}");
    ensure!(rank2 == 5, "PG(3,2) planes rank_2 = {rank2}");
    Ok(format!("PG(2,3) {inv}; PG(3,2) planes {planes}"))
}

fn c4(ctx: &mut Ctx) -> Outcome {
    let mut out = Vec::new();
    for (m, d, q, want) in [(2, 1, 3, "1^6 3^3"), (3, 2, 2, "1^4 2^3 4^1"), (2, 1, 2, "1^3 2^1")] {
        let label = format!("AG({m},{q}) d={d}");
        let inv = ctx.snf(&label, incidence_ag(m, d, q).map_err(err)?)?;
        let pred = predict_ag_snf(m, d, q).map_err(err)?;
        ensure!(inv == pred, "{label}: computed {inv} vs predicted {pred}");
        ensure!(inv.to_string() == want, "{label}: got {inv}");
        out.push(format!("{label} {inv}"));
    }
    Ok(out.join("; "))
}

fn c5(ctx: &mut Ctx) -> Outcome {
    let mut cases = Vec::new();
    for q in [2u64, 3, 4, 5, 8, 9] {
        for m in 2..=4u32 {
            cases.extend((2..=m).map(|d| (Space::Projective, m, d, q)));
            cases.extend((1..m).map(|d| (Space::Affine, m, d, q)));
        }
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|&(space, m, d, q)| engine::geometry_case(space, m, d, q).map(|r| (space, m, d, q, r)))
        .collect();
    let mut bad = Vec::new();
    for r in results {
        let (space, m, d, q, (outcome, predicted)) = r.map_err(err)?;
        let label = match space {
            Space::Projective => format!("PG({m},{q}) d={d}"),
            Space::Affine => format!("AG({m},{q}) d={d}"),
        };
        match outcome.invariants {
            Some(inv) if inv == predicted => {
                let small = outcome.params.v <= 400;
                let matrix = match (small, space) {
                    (true, Space::Projective) => Some(incidence_pg(m, d, q).map_err(err)?),
                    (true, Space::Affine) => Some(incidence_ag(m, d, q).map_err(err)?),
                    _ => None,
                };
                ctx.computed.push(Computed {
                    label,
                    params: outcome.params,
                    inv,
                    matrix,
                });
            }
            other => bad.push(format!("{label}: {other:?} vs {predicted}")),
        }
    }
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    Ok(format!("{} designs equal their predictions", cases.len()))
}

fn ternary(m: u32) -> (u64, u64, u64) {
    let p = |e: u32| 3u64.pow(e);
    ((p(m) - 1) / 2, p(m - 1), 2 * p(m - 2))
}

fn c6(_: &mut Ctx) -> Outcome {
    let singer_params = |m: u32, q: u64| {
        let g = |e: u32| (q.pow(e) - 1) / (q - 1);
        (g(m + 1), g(m), g(m - 1))
    };
    let sets: Vec<(String, DifferenceSet, (u64, u64, u64))> = vec![
        ("singer(2,2)".into(), singer(2, 2).map_err(err)?, singer_params(2, 2)),
        ("singer(2,3)".into(), singer(2, 3).map_err(err)?, singer_params(2, 3)),
        ("singer(3,2)".into(), singer(3, 2).map_err(err)?, singer_params(3, 2)),
        ("hkm(3,1)".into(), hkm(3, 1).map_err(err)?, ternary(3)),
        ("hkm(3,2)".into(), hkm(3, 2).map_err(err)?, ternary(6)),
        ("lin(5)".into(), lin(5).map_err(err)?, ternary(5)),
    ];
    for (label, d, (v, k, lambda)) in &sets {
        ensure!(
            d.v() == *v && d.k() == *k && d.lambda() == *lambda,
            "{label}: parameters"
        );
        let found = is_difference_set(d.elements(), *v).map_err(|e| format!("{label}: {e:?}"))?;
        ensure!(found == (*k, *lambda), "{label}: found {found:?}");
        ensure!(group_ring_check(d.elements(), *v), "{label}: group ring identity");
    }
    Ok(format!("{} difference sets verified", sets.len()))
}

fn profile_agreement(d: &DifferenceSet) -> Result<u64, String> {
    let params = d.params();
    let l = precision_for(&params, 3);
    let by_chars = char_profile(d, 3, l).map_err(err)?.to_valuation_profile();
    let by_elim = p_local_profile(&dev(d), 3, l).map_err(err)?;
    ensure!(
        by_chars == by_elim,
        "character profile {by_chars:?} vs elimination {by_elim:?}"
    );
    Ok(by_elim.rank())
}

fn c7(_: &mut Ctx) -> Outcome {
    let m = 5u64;
    let rank = profile_agreement(&lin(5).map_err(err)?)?;
    ensure!(rank == 40 && rank == 2 * m * m - 2 * m, "lin(5) rank_3 = {rank}");
    let rank_hkm = profile_agreement(&hkm(3, 2).map_err(err)?)?;
    ensure!(rank_hkm == 60, "hkm(3,2) rank_3 = {rank_hkm}");
    Ok(format!(
        "lin(5) rank_3 = {rank}, hkm(3,2) rank_3 = {rank_hkm}, profiles agree"
    ))
}

const LIN9: &str = "1^144 3^1440 9^1572 27^1764 81^1764 243^1572 729^1440 2187^144 6561^1";
const HKM9: &str = "1^144 3^1251 9^1842 27^1683 81^1683 243^1842 729^1251 2187^144 6561^1";

fn designrank(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_designrank"))
        .args(args)
        .output()
        .map_err(err)?;
    ensure!(
        out.status.success(),
        "designrank {}: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn c8(ctx: &mut Ctx) -> Outcome {
    for (label, d, want) in [
        ("lin(9)", lin(9).map_err(err)?, LIN9),
        ("hkm(3,3)", hkm(3, 3).map_err(err)?, HKM9),
    ] {
        let (inv, _) = snf_difference_set(&d).map_err(err)?;
        ensure!(inv.to_string() == want, "{label}: got {inv}");
        ctx.keep(label, d.params(), &inv);
    }
    let dir = tempfile::tempdir().map_err(err)?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    for (family, name) in [("lin", "lin9"), ("hkm", "hkm9")] {
        designrank(&["gen", family, "-m", "9", "--out", &path(&format!("{name}.ds"))])?;
        designrank(&[
            "snf",
            &path(&format!("{name}.ds")),
            "--method",
            "character-sum",
            "--out",
            &path(&format!("{name}.json")),
        ])?;
    }
    let verdict = designrank(&["compare", &path("lin9.json"), &path("hkm9.json")])?;
    ensure!(verdict == "distinct", "compare said {verdict}");
    Ok("both strings reproduced; compare: distinct".into())
}

fn c9(ctx: &mut Ctx) -> Outcome {
    let count = threes_count_lin(9, 1).map_err(err)?;
    ensure!(count == 1440, "threes_count_lin(9,1) = {count}");
    let lin9 = ctx
        .computed
        .iter()
        .find(|c| c.label == "lin(9)")
        .ok_or("criterion 8 did not record lin(9)")?;
    let observed = lin9.inv.multiplicity(3);
    ensure!(i128::from(observed) == count, "multiplicity of 3 is {observed}");
    Ok(format!("threes_count_lin(9,1) = {count} = multiplicity of 3"))
}

fn c10(ctx: &mut Ctx) -> Outcome {
    let mut out = Vec::new();
    for (q, want) in [(2, "1^6 3^3"), (3, "1^21 4^7"), (4, "1^52 5^13")] {
        let u = hermitian_unital(q).map_err(err)?;
        ensure!(u.params() == unital_params(q), "q={q}: parameters");
        let inv = ctx.snf(&format!("Hermitian q={q}"), u.blocks)?;
        ensure!(inv.to_string() == want, "q={q}: got {inv}");
        out.push(format!("q={q} {inv}"));
    }
    let ag = ctx
        .computed
        .iter()
        .find(|c| c.label == "AG(2,3) d=1")
        .ok_or("criterion 4 did not record AG(2,3)")?;
    let h2 = &ctx
        .computed
        .iter()
        .find(|c| c.label == "Hermitian q=2")
        .ok_or("no q=2")?
        .inv;
    ensure!(*h2 == ag.inv, "q=2 unital {h2} vs AG(2,3) {}", ag.inv);
    Ok(out.join("; "))
}

fn c11(ctx: &mut Ctx) -> Outcome {
    let mut out = Vec::new();
    for q in [3u64, 5] {
        let u = bm_unital(q, default_beta(q).map_err(err)?).map_err(err)?;
        let params = verify_2design(&u.blocks).map_err(err)?;
        ensure!(
            (params.v, params.k, params.lambda) == (q * q * q + 1, q + 1, 1),
            "q={q}: design parameters {params:?}"
        );
        ensure!(
            conic_vectors_in_dual(&u.blocks, &u.conics).map_err(err)?,
            "q={q}: conic vectors not in the dual code"
        );
        let rep = bm_rank2_report(&u).map_err(err)?;
        ensure!(
            rep.within_bound,
            "q={q}: rank_2 {} above {}",
            rep.computed,
            rep.conjectured
        );
        if q == 3 {
            ensure!(rep.equal && rep.computed == 25, "q=3: rank_2 {}", rep.computed);
        }
        ctx.snf(&format!("Buekenhout-Metz q={q}"), u.blocks)?;
        out.push(format!("q={q} rank_2 {} (q^3+1-q = {})", rep.computed, rep.conjectured));
    }
    Ok(out.join("; "))
}

fn non_defining_primes(params: &DesignParams) -> Vec<u64> {
    let mut ps: Vec<u64> = prime_divisors(params.k)
        .into_iter()
        .filter(|p| !params.n.is_multiple_of(*p))
        .collect();
    for p in primes_not_dividing(params.n, 6) {
        if ps.len() == 3 {
            break;
        }
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    ps.truncate(3);
    ps
}

fn qr11() -> Result<DifferenceSet, String> {
    let mut qr: Vec<u64> = (1..11u64).map(|x| x * x % 11).collect();
    qr.sort_unstable();
    qr.dedup();
    DifferenceSet::new(11, 5, 2, qr).map_err(err)
}

fn c12(ctx: &mut Ctx) -> Outcome {
    let mut failures = Vec::new();
    let mut rank_checks = 0;
    for c in &ctx.computed {
        let rep = klemm_check(&c.params, &c.inv);
        failures.extend(
            rep.failures()
                .map(|f| format!("{}: {} ({})", c.label, f.name, f.detail)),
        );
        for p in non_defining_primes(&c.params) {
            let want = if c.params.k % p == 0 {
                c.params.v - 1
            } else {
                c.params.v
            };
            let rank = match &c.matrix {
                Some(m) => rank_mod_p(m, p).map_err(err)?,
                None => c.inv.rank_mod(p),
            };
            if rank != want {
                failures.push(format!("{}: rank_{p} = {rank}, expected {want}", c.label));
            }
            rank_checks += 1;
        }
    }
    for (label, d, p) in [("Fano", singer(2, 2).map_err(err)?, 2), ("QR(11)", qr11()?, 3)] {
        let l = precision_for(&d.params(), p);
        let by_chars = char_profile(&d, p, l).map_err(err)?.to_valuation_profile();
        let by_elim = p_local_profile(&dev(&d), p, l).map_err(err)?;
        if by_chars != by_elim {
            failures.push(format!("{label}: character and elimination profiles differ at p={p}"));
        }
    }
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(format!(
        "{} SNFs satisfy every clause, {rank_checks} rank checks, 2 oracle comparisons",
        ctx.computed.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(Criterion, u64); 12] = [
        (c1, 1),
        (c2, 1),
        (c3, 2),
        (c4, 3),
        (c5, 600),
        (c6, 60),
        (c7, 300),
        (c8, 3600),
        (c9, 1),
        (c10, 120),
        (c11, 300),
        (c12, 300),
    ];
    let mut ctx = Ctx::default();
    let mut failed = Vec::new();
    for (i, (f, budget)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let result = f(&mut ctx);
        let elapsed = started.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(budget) {
                Err(format!("{detail}; took {elapsed:.1?}, budget {budget} s"))
            } else {
                Ok(detail)
            }
        });
        // written to the raw handle so the lines survive output capture
        let line = match result {
            Ok(detail) => format!("criterion {:>2}: PASS ({elapsed:.2?}) {detail}", i + 1),
            Err(e) => {
                failed.push(i + 1);
                format!("criterion {:>2}: FAIL ({elapsed:.2?}) {e}", i + 1)
            }
        };
        writeln!(std::io::stderr(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
