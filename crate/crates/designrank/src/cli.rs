use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use designrank_core::diffsets::{dev, hkm, lin, singer, DifferenceSet};
use designrank_core::formulas::{
    hkm_formula_applies, klemm_check, lin_formula_applies, predict_ag_snf, predict_pg_snf, rank3_hkm_lin,
    threes_count_hkm, threes_count_lin, ClauseStatus,
};
use designrank_core::geometry::{ag_design_params, incidence_ag, incidence_pg, pg_design_params, INCIDENCE_LIMIT};
use designrank_core::snf::candidate_primes;
use designrank_core::unitals::{bm_unital, default_beta, hermitian_snf_expected, hermitian_unital, unital_params};
use designrank_core::{DesignParams, IncidenceMatrix, InvariantFactorMultiset};
use serde_json::json;

use crate::engine::{self, Outcome, Space};
use crate::error::{CliError, Result};
use crate::formats::{self, Input};
use crate::record::{Job, Method, Record};

#[derive(Parser, Debug)]
#[command(name = "designrank", version, about = "Smith normal forms and p-ranks of 2-designs")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write an incidence matrix, or a difference set when --out ends in `.ds`.
    Gen(FamilyArgs),
    /// Compute invariant factors of a matrix or difference-set file.
    Snf(SnfArgs),
    /// Evaluate the closed-form prediction for a family.
    Predict(FamilyArgs),
    /// Run the divisibility checks on result records.
    Check {
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
    /// Compare the invariant factors of two records.
    Compare { a: PathBuf, b: PathBuf },
    /// Compare computed and predicted SNFs over a grid of geometries.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Pg,
    Ag,
    Singer,
    Hkm,
    Lin,
    Hermitian,
    Bm,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    pub family: Family,
    #[arg(short)]
    pub m: Option<u32>,
    #[arg(short)]
    pub d: Option<u32>,
    #[arg(short)]
    pub q: Option<u64>,
    /// Field code of beta in F_(q^2) for `bm`.
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SnfArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "elimination")]
    pub method: Method,
    /// Restrict to these primes (comma separated).
    #[arg(short, value_delimiter = ',')]
    pub p: Vec<u64>,
    /// Precision override.
    #[arg(short = 'L')]
    pub precision: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    pub family: Family,
    /// Largest dimension.
    #[arg(short)]
    pub m: u32,
    /// Field orders (comma separated).
    #[arg(short, value_delimiter = ',', required = true)]
    pub q: Vec<u64>,
    /// JSON lines output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T>(value: Option<T>, flag: &str, family: Family) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("{family:?} needs -{flag}").to_lowercase()))
}

fn family_name(f: Family) -> String {
    f.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn job(a: &FamilyArgs) -> Job {
    Job {
        family: Some(family_name(a.family)),
        m: a.m,
        d: a.d,
        q: a.q,
        beta: a.beta,
        ..Job::default()
    }
}

fn difference_set(a: &FamilyArgs) -> Result<Option<DifferenceSet>> {
    Ok(Some(match a.family {
        Family::Singer => singer(need(a.m, "m", a.family)?, need(a.q, "q", a.family)?)?,
        Family::Hkm => {
            let m = need(a.m, "m", a.family)?;
            if m % 3 != 0 {
                return Err(CliError::Usage(format!("hkm needs m divisible by 3, got {m}")));
            }
            hkm(a.q.unwrap_or(3), m / 3)?
        }
        Family::Lin => lin(need(a.m, "m", a.family)?)?,
        _ => return Ok(None),
    }))
}

fn generate_matrix(a: &FamilyArgs) -> Result<IncidenceMatrix> {
    if let Some(d) = difference_set(a)? {
        return Ok(dev(&d));
    }
    let f = a.family;
    Ok(match f {
        Family::Pg => incidence_pg(need(a.m, "m", f)?, need(a.d, "d", f)?, need(a.q, "q", f)?)?,
        Family::Ag => incidence_ag(need(a.m, "m", f)?, need(a.d, "d", f)?, need(a.q, "q", f)?)?,
        Family::Hermitian => hermitian_unital(need(a.q, "q", f)?)?.blocks,
        Family::Bm => {
            let q = need(a.q, "q", f)?;
            let beta = match a.beta {
                Some(b) => b,
                None => default_beta(q)?,
            };
            bm_unital(q, beta)?.blocks
        }
        Family::Singer | Family::Hkm | Family::Lin => unreachable!("handled above"),
    })
}

fn cmd_gen(a: &FamilyArgs) -> Result<()> {
    let path = a.out.as_deref();
    if path.is_some_and(formats::is_difference_set_path) {
        let d = difference_set(a)?
            .ok_or_else(|| CliError::Usage(format!("{} is not a difference-set family", family_name(a.family))))?;
        let out = formats::output(path)?;
        return formats::write_difference_set(&d, out).map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e));
    }
    let m = generate_matrix(a)?;
    let out = formats::output(path)?;
    formats::write_matrix(&m, out).map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))
}

fn outcome_record(o: &Outcome, job: Job, started: Instant) -> Record {
    let mut rec = Record::new(o.method, job, o.params);
    for prof in &o.profiles {
        rec.add_profile(prof);
    }
    if let Some(inv) = &o.invariants {
        rec.set_invariants(inv);
    }
    rec.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    rec
}

fn emit(rec: &Record, path: Option<&Path>) -> Result<()> {
    let mut out = formats::output(path)?;
    writeln!(out, "{}", rec.to_json())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))
}

fn cmd_snf(a: &SnfArgs) -> Result<()> {
    let started = Instant::now();
    let primes = (!a.p.is_empty()).then_some(&a.p[..]);
    let outcome = match (formats::read_input(&a.input)?, a.method) {
        (Input::Matrix(m), Method::Elimination) => engine::eliminate(&m, primes, a.precision)?,
        (Input::DifferenceSet(d), Method::Elimination) => engine::eliminate(&dev(&d), primes, a.precision)?,
        (Input::DifferenceSet(d), Method::CharacterSum) => engine::character_sum(&d, primes, a.precision)?,
        (Input::Matrix(m), Method::CharacterSum) => {
            let base = m
                .circulant_base()
                .ok_or_else(|| CliError::Usage("character-sum needs a circulant matrix or a .ds file".into()))?;
            let params = designrank_core::geometry::verify_2design(&m)?;
            let d = DifferenceSet::new(
                params.v,
                params.k,
                params.lambda,
                base.into_iter().map(u64::from).collect(),
            )?;
            engine::character_sum(&d, primes, a.precision)?
        }
        (_, Method::Formula) => return Err(CliError::Usage("snf computes; use `predict` for formulas".into())),
    };
    let job = Job {
        input: Some(a.input.display().to_string()),
        primes: a.p.clone(),
        precision: a.precision,
        ..Job::default()
    };
    emit(&outcome_record(&outcome, job, started), a.out.as_deref())
}

fn formula_record(a: &FamilyArgs, params: DesignParams, inv: Option<&InvariantFactorMultiset>) -> Record {
    let mut rec = Record::new(Method::Formula, job(a), params);
    if let Some(inv) = inv {
        rec.set_invariants(inv);
        for p in candidate_primes(&params) {
            rec.ranks.insert(p.to_string(), inv.rank_mod(p));
        }
    }
    rec
}

fn ternary_params(m: u32) -> Result<DesignParams> {
    let v = (3u64.pow(m) - 1) / 2;
    Ok(DesignParams::from_vkl(v, 3u64.pow(m - 1), 2 * 3u64.pow(m - 2))?)
}

fn cmd_predict(a: &FamilyArgs) -> Result<()> {
    let started = Instant::now();
    let f = a.family;
    let mut rec = match f {
        Family::Pg | Family::Singer => {
            let (m, q) = (need(a.m, "m", f)?, need(a.q, "q", f)?);
            let d = if f == Family::Singer { m } else { need(a.d, "d", f)? };
            formula_record(a, pg_design_params(m, d, q)?, Some(&predict_pg_snf(m, d, q)?))
        }
        Family::Ag => {
            let (m, d, q) = (need(a.m, "m", f)?, need(a.d, "d", f)?, need(a.q, "q", f)?);
            formula_record(a, ag_design_params(m, d, q)?, Some(&predict_ag_snf(m, d, q)?))
        }
        Family::Hermitian => {
            let q = need(a.q, "q", f)?;
            formula_record(a, unital_params(q), Some(&hermitian_snf_expected(q)?))
        }
        Family::Lin | Family::Hkm => {
            let m = need(a.m, "m", f)?;
            if m < 3 {
                return Err(CliError::Usage(format!("m must be at least 3, got {m}")));
            }
            let mut rec = formula_record(a, ternary_params(m)?, None);
            let rank = rank3_hkm_lin(m);
            rec.ranks.insert("3".into(), rank);
            let (counts, applies) = if f == Family::Lin {
                (
                    [threes_count_lin(m, 0)?, threes_count_lin(m, 1)?],
                    lin_formula_applies(m),
                )
            } else {
                (
                    [threes_count_hkm(m, 0)?, threes_count_hkm(m, 1)?],
                    hkm_formula_applies(m),
                )
            };
            rec.extra
                .insert("threes_count".into(), json!({"0": counts[0], "1": counts[1]}));
            rec.extra.insert("threes_formula_in_range".into(), json!(applies));
            rec
        }
        Family::Bm => {
            return Err(CliError::Usage(
                "no closed form for Buekenhout-Metz unitals; use `gen bm` and `snf`".into(),
            ))
        }
    };
    rec.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    emit(&rec, a.out.as_deref())
}

fn status_word(s: &ClauseStatus) -> &'static str {
    match s {
        ClauseStatus::Pass => "PASS",
        ClauseStatus::Fail => "FAIL",
        ClauseStatus::Skipped => "SKIP",
    }
}

fn cmd_check(records: &[PathBuf]) -> Result<()> {
    let mut failed = 0;
    for path in records {
        let rec = Record::load(path)?;
        let inv = rec
            .invariant_factors()?
            .ok_or_else(|| CliError::Usage(format!("{}: record has no invariant factors", path.display())))?;
        let params: DesignParams = rec.params.into();
        let report = klemm_check(&params, &inv);
        println!("{}:", path.display());
        for c in &report.clauses {
            if c.detail.is_empty() {
                println!("  {} {}", status_word(&c.status), c.name);
            } else {
                println!("  {} {}: {}", status_word(&c.status), c.name, c.detail);
            }
        }
        for (p, &rank) in &rec.ranks {
            let p: u64 = p
                .parse()
                .map_err(|_| CliError::Usage(format!("{}: bad prime key {p:?}", path.display())))?;
            let from_inv = inv.rank_mod(p);
            let ok = from_inv == rank;
            println!(
                "  {} rank_{p} matches invariants: recorded {rank}, from invariants {from_inv}",
                if ok { "PASS" } else { "FAIL" }
            );
            failed += usize::from(!ok);
        }
        failed += report.failures().count();
    }
    if failed > 0 {
        return Err(CliError::CheckFailed(format!("{failed} clause(s) failed")));
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path) -> Result<()> {
    let load = |p: &Path| -> Result<InvariantFactorMultiset> {
        Record::load(p)?
            .invariant_factors()?
            .ok_or_else(|| CliError::Usage(format!("{}: record has no invariant factors", p.display())))
    };
    if load(a)? == load(b)? {
        println!("equal");
    } else {
        println!("distinct");
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let space = match a.family {
        Family::Pg => Space::Projective,
        Family::Ag => Space::Affine,
        other => {
            return Err(CliError::Usage(format!(
                "sweep covers pg and ag, not {}",
                family_name(other)
            )));
        }
    };
    let mut lines = match &a.out {
        Some(p) => Some(formats::output(Some(p))?),
        None => None,
    };
    let mut mismatches = 0;
    for m in 2..=a.m {
        let ds = match space {
            Space::Projective => 2..=m,
            Space::Affine => 1..=m - 1,
        };
        for d in ds {
            for &q in &a.q {
                let label = match space {
                    Space::Projective => format!("PG({m},{q}) d={d}"),
                    Space::Affine => format!("AG({m},{q}) d={d}"),
                };
                let params = match space {
                    Space::Projective => pg_design_params(m, d, q)?,
                    Space::Affine => ag_design_params(m, d, q)?,
                };
                if params.b as u128 * params.k as u128 > INCIDENCE_LIMIT {
                    println!(
                        "{label}: skipped, b k = {} above the size guard",
                        params.b as u128 * params.k as u128
                    );
                    continue;
                }
                let started = Instant::now();
                let (outcome, predicted) = engine::geometry_case(space, m, d, q)?;
                let ok = outcome.invariants.as_ref() == Some(&predicted);
                mismatches += usize::from(!ok);
                let job = Job {
                    family: Some(family_name(a.family)),
                    m: Some(m),
                    d: Some(d),
                    q: Some(q),
                    ..Job::default()
                };
                let rec = outcome_record(&outcome, job, started);
                println!(
                    "{label}: v={} {:?} {} in {:.0} ms",
                    params.v,
                    outcome.method,
                    if ok { "matches prediction" } else { "MISMATCH" },
                    rec.wall_time_ms
                );
                if let Some(w) = lines.as_mut() {
                    writeln!(w, "{}", serde_json::to_string(&rec)?).map_err(|e| CliError::io("sweep output", e))?;
                }
            }
        }
    }
    if let Some(mut w) = lines {
        w.flush().map_err(|e| CliError::io("sweep output", e))?;
    }
    if mismatches > 0 {
        return Err(CliError::CheckFailed(format!(
            "{mismatches} case(s) differ from the prediction"
        )));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Snf(a) => cmd_snf(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Check { records } => cmd_check(records),
        Command::Compare { a, b } => cmd_compare(a, b),
        Command::Sweep(a) => cmd_sweep(a),
    })
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main() -> i32 {
    match run(Cli::parse()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
