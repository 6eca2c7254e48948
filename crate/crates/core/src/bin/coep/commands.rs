use std::fmt::Write as _;

use coep::classification::{classify, ClassificationReport};
use coep::io::read_matrix;
use coep::linalg::{ComplexMatrix, NormSpec, ToleranceConfig};
use coep::perturbation::{gen_perturbation, perturbation_report, PerturbationPair, PerturbationReport};
use coep::population::{population, Instance};
use coep::pseudoinverse::{mp_inverse_euclidean, mp_search_diagonalizable, mp_verify, MPCertificate, MpSearch};
use coep::random::derive_seed;
use coep::CoepError;
use serde::Serialize;

use crate::output::{emit, matrix_block, opt_bool, yes_no};
use crate::{audit, Cli, Command, EXIT_NEGATIVE, EXIT_OK};

pub fn run(cli: &Cli) -> Result<u8, CoepError> {
    let cfg = cli.common.tolerances()?;
    match &cli.command {
        Command::Mp { input, candidate } => {
            let a = read_matrix(input)?;
            let x = candidate.as_ref().map(read_matrix).transpose()?;
            mp(cli, &a, x.as_ref(), &cfg)
        }
        Command::Classify { input } => classify_cmd(cli, &read_matrix(input)?, &cfg),
        Command::Audit { suite, pairs, lambda, mu, class } => {
            let scalars = lambda.zip(*mu);
            audit::run(cli, *suite, *pairs, scalars, *class, &cfg)
        }
        Command::Perturb { input, eps } => perturb(cli, &read_matrix(input)?, eps, &cfg),
        Command::Gen { class } => gen(cli, *class),
    }
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
enum MpOutput {
    Computed { norm: NormSpec, inverse: ComplexMatrix, certificate: MPCertificate },
    Verified { norm: NormSpec, candidate: ComplexMatrix, certificate: MPCertificate },
    Searched { norm: NormSpec, search: MpSearch },
}

fn certificate_lines(s: &mut String, c: &MPCertificate) {
    let _ = writeln!(s, "residual axa - a: {:.3e}", c.residual_aba);
    let _ = writeln!(s, "residual xax - x: {:.3e}", c.residual_bab);
    let _ = writeln!(s, "ax hermitian:     {}", yes_no(c.ab_hermitian.is_hermitian));
    let _ = writeln!(s, "xa hermitian:     {}", yes_no(c.ba_hermitian.is_hermitian));
    let _ = writeln!(s, "valid:            {}", yes_no(c.valid));
}

fn mp(cli: &Cli, a: &ComplexMatrix, candidate: Option<&ComplexMatrix>, cfg: &ToleranceConfig) -> Result<u8, CoepError> {
    let norm = cli.common.norm;
    let (out, ok) = match candidate {
        Some(x) => {
            let certificate = mp_verify(a, x, &norm, cfg)?;
            let ok = certificate.valid;
            (MpOutput::Verified { norm, candidate: x.clone(), certificate }, ok)
        }
        None if norm.is_euclidean() => {
            let (inverse, certificate) = mp_inverse_euclidean(a, cfg)?;
            let ok = certificate.valid;
            (MpOutput::Computed { norm, inverse, certificate }, ok)
        }
        None => {
            let search = mp_search_diagonalizable(a, &norm, cfg)?;
            let ok = search.inverse().is_some();
            (MpOutput::Searched { norm, search }, ok)
        }
    };
    emit(&cli.common, &out, || {
        let mut s = format!("norm: {norm}\n");
        match &out {
            MpOutput::Computed { inverse, certificate, .. } => {
                s += &matrix_block("inverse", inverse);
                certificate_lines(&mut s, certificate);
            }
            MpOutput::Verified { candidate, certificate, .. } => {
                s += &matrix_block("candidate", candidate);
                certificate_lines(&mut s, certificate);
            }
            MpOutput::Searched { search, .. } => match search {
                MpSearch::Found { inverse, certificate, range_idempotent, kernel_idempotent } => {
                    s += &matrix_block("inverse", inverse);
                    let _ = writeln!(s, "ax = {range_idempotent}, xa = {kernel_idempotent}");
                    certificate_lines(&mut s, certificate);
                }
                MpSearch::NotFound { pairs_tried, .. } => {
                    let _ = writeln!(s, "no Moore-Penrose inverse among {pairs_tried} candidate pairs");
                }
            },
        }
        s
    })?;
    Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
}

fn classify_cmd(cli: &Cli, a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<u8, CoepError> {
    let report = classify(a, &cli.common.norm, cfg)?;
    emit(&cli.common, &report, || classification_table(&report))?;
    Ok(if report.mp_invertible { EXIT_OK } else { EXIT_NEGATIVE })
}

fn classification_table(r: &ClassificationReport) -> String {
    let mut s = format!("norm:               {}\n", r.norm);
    let _ = writeln!(s, "MP-invertible:      {}", yes_no(r.mp_invertible));
    if let Some(note) = &r.note {
        let _ = writeln!(s, "note:               {note}");
    }
    let _ = writeln!(s, "EP:                 {}", opt_bool(r.is_ep));
    let _ = writeln!(s, "co-EP:              {}", opt_bool(r.is_co_ep));
    let _ = writeln!(s, "bi-EP:              {}", opt_bool(r.is_bi_ep));
    let _ = writeln!(s, "hermitian co-EP:    {}", opt_bool(r.is_hermitian_co_ep));
    for (k, v) in &r.margins {
        let _ = writeln!(s, "margin {k:<12} {v:.3e}");
    }
    for (name, m) in [("inverse", &r.mp_inverse), ("h", &r.h), ("k", &r.k)] {
        if let Some(m) = m {
            s += &matrix_block(name, m);
        }
    }
    s
}

#[derive(Serialize)]
struct PerturbRow {
    eps: f64,
    seed: u64,
    b: ComplexMatrix,
    /// Every consequence of condition (P) verified.
    holds: bool,
    report: PerturbationReport,
}

#[derive(Serialize)]
struct PerturbOutput {
    norm: NormSpec,
    seed: u64,
    a_dag: ComplexMatrix,
    rows: Vec<PerturbRow>,
    passed: bool,
}

fn base_inverse(a: &ComplexMatrix, norm: &NormSpec, cfg: &ToleranceConfig) -> Result<ComplexMatrix, CoepError> {
    if norm.is_euclidean() {
        return Ok(mp_inverse_euclidean(a, cfg)?.0);
    }
    match mp_search_diagonalizable(a, norm, cfg)? {
        MpSearch::Found { inverse, .. } => Ok(inverse),
        MpSearch::NotFound { .. } => {
            Err(CoepError::NotMpInvertible(format!("no Moore-Penrose inverse of the input found under {norm}")))
        }
    }
}

fn perturb(cli: &Cli, a: &ComplexMatrix, eps: &[f64], cfg: &ToleranceConfig) -> Result<u8, CoepError> {
    let norm = cli.common.norm;
    let a_dag = base_inverse(a, &norm, cfg)?;
    let mut rows = Vec::with_capacity(eps.len());
    for (i, &e) in eps.iter().enumerate() {
        let seed = derive_seed(cli.common.seed, i as u64);
        let b = gen_perturbation(a, &a_dag, e, &norm, seed)?;
        let pair = PerturbationPair::new(a.clone(), a_dag.clone(), b.clone(), norm, cfg)?;
        let report = perturbation_report(&pair, cfg)?;
        rows.push(PerturbRow { eps: e, seed, b, holds: report.consequences_hold(), report });
    }
    let passed = rows.iter().all(|r| r.holds);
    let out = PerturbOutput { norm, seed: cli.common.seed, a_dag, rows, passed };
    emit(&cli.common, &out, || perturb_table(&out))?;
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn perturb_table(out: &PerturbOutput) -> String {
    let mut s = format!("norm: {}\n", out.norm);
    let _ = writeln!(
        s,
        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>8} {:>6}",
        "eps", "contraction", "realized", "bound", "lower", "norm b†", "upper", "reverse", "holds"
    );
    for r in &out.rows {
        let rep = &r.report;
        let (realized, bound) = rep.error_bound.map_or((f64::NAN, f64::NAN), |e| (e.realized, e.bound));
        let (lo, val, hi) = rep.bracket.map_or((f64::NAN, f64::NAN, f64::NAN), |b| (b.lower, b.value, b.upper));
        let reverse = match &rep.reverse {
            Some(rc) if !rc.applicable => "n/a",
            Some(rc) => yes_no(rc.holds),
            None => "-",
        };
        let _ = writeln!(
            s,
            "{:>6.3} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>8} {:>6}",
            r.eps,
            rep.condition.contraction,
            realized,
            bound,
            lo,
            val,
            hi,
            reverse,
            yes_no(r.holds)
        );
    }
    let _ = writeln!(s, "passed: {}", yes_no(out.passed));
    s
}

fn gen(cli: &Cli, class: Option<coep::population::InstanceClass>) -> Result<u8, CoepError> {
    let instances = population(cli.common.seed, cli.common.count as usize, cli.common.dims, class)?;
    emit(&cli.common, &instances, || {
        let mut s = String::new();
        for Instance { index, seed, class, n, matrix } in &instances {
            s += &matrix_block(&format!("#{index} {class} n={n} seed={seed}"), matrix);
        }
        s
    })?;
    Ok(EXIT_OK)
}
