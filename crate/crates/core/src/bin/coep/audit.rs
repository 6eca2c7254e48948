//! `coep audit`: one auditor over a generated population.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use coep::classification::{audit_cor8, audit_cor9, audit_thm5, audit_thm7, check_rem10, check_rem34};
use coep::lifted::{audit_prop8, check_pro37, check_pro38, check_thm39};
use coep::linalg::{ComplexMatrix, NormSpec, ToleranceConfig};
use coep::population::{population, Instance, InstanceClass};
use coep::pseudoinverse::{mp_inverse_euclidean, mp_search_diagonalizable, MpSearch};
use coep::random::{derive_seed, nonzero_scalar, rng_from_seed};
use coep::CoepError;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::output::{emit, matrix_block};
use crate::{Cli, Suite, EXIT_NEGATIVE, EXIT_OK};

#[derive(Serialize)]
struct Failure {
    index: usize,
    seed: u64,
    class: InstanceClass,
    n: usize,
    matrix: ComplexMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<Complex64>,
    detail: Value,
}

#[derive(Default, Serialize)]
struct Tally {
    checked: usize,
    agreed: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct Summary {
    suite: String,
    norm: NormSpec,
    seed: u64,
    count: usize,
    dims: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<usize>,
    checked: usize,
    skipped: usize,
    disagreements: usize,
    passed: bool,
    by_class: BTreeMap<InstanceClass, Tally>,
    failures: Vec<Failure>,
}

enum Outcome {
    Agree,
    Skip,
    Disagree(Vec<Failure>),
}

fn uses_scalars(suite: Suite) -> bool {
    matches!(suite, Suite::Thm7 | Suite::Cor8 | Suite::Prop8)
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Thm7 => "thm7",
        Suite::Thm5 => "thm5",
        Suite::Cor8 => "cor8",
        Suite::Cor9 => "cor9",
        Suite::Pro37 => "pro37",
        Suite::Pro38 => "pro38",
        Suite::Thm39 => "thm39",
        Suite::Prop8 => "prop8",
        Suite::Rem10 => "rem10",
        Suite::Rem34 => "rem34",
    }
}

fn detail<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// `Some(detail)` when the auditor disagrees for these scalars.
fn evaluate(
    suite: Suite,
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    scalars: Option<(Complex64, Complex64)>,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<Option<Value>, CoepError> {
    let (l, m) = scalars.unwrap_or((Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)));
    let verdict = |ok: bool, v: Value| if ok { None } else { Some(v) };
    Ok(match suite {
        Suite::Thm7 => {
            let r = audit_thm7(a, a_dag, l, m, cfg)?;
            verdict(r.all_agree, detail(&r))
        }
        Suite::Thm5 => {
            let r = audit_thm5(a, a_dag, norm, cfg)?;
            verdict(r.all_agree, detail(&r))
        }
        Suite::Cor8 => {
            let r = audit_cor8(a, a_dag, l, m, cfg)?;
            verdict(r.all_agree, detail(&r))
        }
        Suite::Cor9 => {
            let r = audit_cor9(a, a_dag, cfg)?;
            verdict(r.all_agree, detail(&r))
        }
        Suite::Pro37 => {
            let r = check_pro37(a, a_dag, cfg)?;
            verdict(r.agrees, detail(&r))
        }
        Suite::Pro38 => {
            let r = check_pro38(a, a_dag, cfg)?;
            verdict(r.agrees, detail(&r))
        }
        Suite::Thm39 => {
            let r = check_thm39(a, a_dag, cfg)?;
            verdict(r.agrees, detail(&r))
        }
        Suite::Prop8 => {
            let r = audit_prop8(a, a_dag, l, m, cfg)?;
            verdict(r.passed, detail(&r))
        }
        Suite::Rem10 => {
            let r = check_rem10(a, cfg)?;
            verdict(r.holds, detail(&r))
        }
        Suite::Rem34 => {
            let r = check_rem34(a, a_dag, cfg)?;
            verdict(r.holds, detail(&r))
        }
    })
}

fn run_instance(
    suite: Suite,
    inst: &Instance,
    pairs: usize,
    fixed: Option<(Complex64, Complex64)>,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<Outcome, CoepError> {
    let a = &inst.matrix;
    let a_dag = if norm.is_euclidean() {
        mp_inverse_euclidean(a, cfg)?.0
    } else {
        match mp_search_diagonalizable(a, norm, cfg)? {
            MpSearch::Found { inverse, .. } => inverse,
            MpSearch::NotFound { .. } => return Ok(Outcome::Skip),
        }
    };
    let scalar_list: Vec<Option<(Complex64, Complex64)>> = match (uses_scalars(suite), fixed) {
        (false, _) => vec![None],
        (true, Some(s)) => vec![Some(s)],
        (true, None) => {
            let mut rng = rng_from_seed(derive_seed(inst.seed, 0x5ca1a2));
            (0..pairs).map(|_| Some((nonzero_scalar(&mut rng), nonzero_scalar(&mut rng)))).collect()
        }
    };
    let mut failures = Vec::new();
    for scalars in scalar_list {
        if let Some(detail) = evaluate(suite, a, &a_dag, scalars, norm, cfg)? {
            failures.push(Failure {
                index: inst.index,
                seed: inst.seed,
                class: inst.class,
                n: inst.n,
                matrix: a.clone(),
                lambda: scalars.map(|s| s.0),
                mu: scalars.map(|s| s.1),
                detail,
            });
        }
    }
    Ok(if failures.is_empty() { Outcome::Agree } else { Outcome::Disagree(failures) })
}

pub fn run(
    cli: &Cli,
    suite: Suite,
    pairs: usize,
    fixed: Option<(Complex64, Complex64)>,
    class: Option<InstanceClass>,
    cfg: &ToleranceConfig,
) -> Result<u8, CoepError> {
    let common = &cli.common;
    let norm = common.norm;
    if !norm.is_euclidean() && suite != Suite::Thm5 {
        return Err(CoepError::InvalidInput(format!(
            "suite {} is evaluated under l2; --norm applies to thm5 only",
            suite_name(suite)
        )));
    }
    if uses_scalars(suite) && fixed.is_none() && pairs == 0 {
        return Err(CoepError::InvalidInput("--pairs must be at least 1".into()));
    }
    let instances = population(common.seed, common.count as usize, common.dims, class)?;
    let outcomes: Vec<Outcome> = instances
        .par_iter()
        .map(|inst| run_instance(suite, inst, pairs, fixed, &norm, cfg))
        .collect::<Result<_, _>>()?;

    let mut by_class: BTreeMap<InstanceClass, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    let (mut checked, mut skipped, mut disagreements) = (0, 0, 0);
    for (inst, outcome) in instances.iter().zip(outcomes) {
        let tally = by_class.entry(inst.class).or_default();
        match outcome {
            Outcome::Skip => {
                skipped += 1;
                tally.skipped += 1;
            }
            Outcome::Agree => {
                checked += 1;
                tally.checked += 1;
                tally.agreed += 1;
            }
            Outcome::Disagree(f) => {
                checked += 1;
                disagreements += 1;
                tally.checked += 1;
                failures.extend(f);
            }
        }
    }
    let summary = Summary {
        suite: suite_name(suite).into(),
        norm,
        seed: common.seed,
        count: instances.len(),
        dims: common.dims.to_string(),
        pairs: (uses_scalars(suite)).then_some(if fixed.is_some() { 1 } else { pairs }),
        checked,
        skipped,
        disagreements,
        passed: disagreements == 0,
        by_class,
        failures,
    };
    emit(common, &summary, || summary_table(&summary))?;
    Ok(if summary.passed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn summary_table(s: &Summary) -> String {
    let mut out =
        format!("suite {} | norm {} | seed {} | {} instances, dims {}\n", s.suite, s.norm, s.seed, s.count, s.dims);
    let _ = writeln!(out, "{:<20} {:>8} {:>8} {:>8}", "class", "checked", "agreed", "skipped");
    for (class, t) in &s.by_class {
        let _ = writeln!(out, "{:<20} {:>8} {:>8} {:>8}", class.name(), t.checked, t.agreed, t.skipped);
    }
    let _ = writeln!(out, "disagreements: {}", s.disagreements);
    for f in &s.failures {
        let mut title = format!("instance #{} ({}, n={}, seed={})", f.index, f.class, f.n, f.seed);
        if let (Some(l), Some(m)) = (f.lambda, f.mu) {
            let _ = write!(title, " λ={l} μ={m}");
        }
        out += &matrix_block(&title, &f.matrix);
    }
    let _ = writeln!(out, "passed: {}", if s.passed { "yes" } else { "no" });
    out
}
