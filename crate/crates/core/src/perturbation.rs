//! Perturbations obeying condition (P) and the pseudo-inverse calculus they
//! admit.
//!
//! `b` obeys (P) at `a` when `b - a = aa†(b - a)a†a` and
//! `||a†(b - a)|| < 1`. Then `b† = (1 + a†(b - a))⁻¹ a†` in closed form,
//! `bb† = aa†`, `b†b = a†a`, and the relative change of the inverse is
//! controlled by `c = ||a†(b - a)||`. Every norm in one report is the pair's
//! norm.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::classification::{canonical_idempotents, classify_with, relative_gap};
use crate::error::{CoepError, Result};
use crate::linalg::{
    inverse, is_invertible, operator_norm_unchecked, relative, ComplexMatrix, NormSpec, ToleranceConfig,
};
use crate::pseudoinverse::{mp_inverse_euclidean, mp_verify, require_mp_pair, MPCertificate};
use crate::random::{ginibre, rng_from_seed};

/// (P) requires `c < 1 - STRICTNESS`.
pub const STRICTNESS: f64 = 1e-9;

/// Relative slack granted to the proved inequalities for rounding.
pub const BOUND_SLACK: f64 = 1e-12;

/// A Moore-Penrose pair `(a, a†)` and a perturbation `b`, under one norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationPair {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub b: ComplexMatrix,
    pub norm: NormSpec,
}

impl PerturbationPair {
    /// Checks shapes and certifies `a_dag` under `norm`.
    pub fn new(
        a: ComplexMatrix,
        a_dag: ComplexMatrix,
        b: ComplexMatrix,
        norm: NormSpec,
        cfg: &ToleranceConfig,
    ) -> Result<Self> {
        let n = a.require_square("perturbation base")?;
        if b.rows() != n || b.cols() != n {
            return Err(CoepError::Shape(format!("perturbation: a is {n}x{n} but b is {}x{}", b.rows(), b.cols())));
        }
        require_mp_pair(&a, &a_dag, &norm, cfg)?;
        Ok(Self { a, a_dag, b, norm })
    }

    /// Pair under the Euclidean norm, with `a†` from the SVD.
    pub fn euclidean(a: ComplexMatrix, b: ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let (a_dag, _) = mp_inverse_euclidean(&a, cfg)?;
        Self::new(a, a_dag, b, NormSpec::l2(), cfg)
    }

    fn norm_of(&self, x: &ComplexMatrix) -> f64 {
        operator_norm_unchecked(x, &self.norm)
    }

    fn delta(&self) -> ComplexMatrix {
        &self.b - &self.a
    }

    /// `c = ||a†(b - a)||`.
    pub fn contraction(&self) -> f64 {
        self.norm_of(&(&self.a_dag * self.delta()))
    }
}

/// Evidence for condition (P).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionP {
    pub holds: bool,
    /// `||(b - a) - aa†(b - a)a†a||`.
    pub projection_residual: f64,
    /// Larger of `||(b - a) - aa†(b - a)||` and `||(b - a) - (b - a)a†a||`.
    pub split_residual: f64,
    pub contraction: f64,
}

/// Evaluates both parts of (P) and the split form of the projection
/// identity. Residuals are absolute; they are thresholded against the
/// residual tolerance times `max(1, ||b - a||)`.
pub fn satisfies_condition_p(pair: &PerturbationPair, cfg: &ToleranceConfig) -> ConditionP {
    let d = pair.delta();
    let aad = &pair.a * &pair.a_dag;
    let ada = &pair.a_dag * &pair.a;
    let projection_residual = pair.norm_of(&(&d - &aad * &d * &ada));
    let split_residual = pair.norm_of(&(&d - &aad * &d)).max(pair.norm_of(&(&d - &d * &ada)));
    let contraction = pair.contraction();
    let scale = pair.norm_of(&d).max(1.0);
    let holds = projection_residual <= cfg.residual * scale
        && split_residual <= cfg.residual * scale
        && contraction < 1.0 - STRICTNESS;
    ConditionP { holds, projection_residual, split_residual, contraction }
}

fn require_p(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<ConditionP> {
    let p = satisfies_condition_p(pair, cfg);
    if !p.holds {
        return Err(CoepError::Precondition(format!(
            "b does not obey condition (P) at a: projection residual {:.3e}, contraction {:.6}",
            p.projection_residual, p.contraction
        )));
    }
    Ok(p)
}

/// The factorizations of `b` through `a` and the swap identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    /// `||b - a(1 + a†(b - a))||`.
    pub left_factorization: f64,
    /// `||b - (1 + (b - a)a†)a||`.
    pub right_factorization: f64,
    /// Reciprocal condition numbers of `1 + a†(b - a)` and `1 + (b - a)a†`.
    pub left_factor_rcond: f64,
    pub right_factor_rcond: f64,
    /// `||(1 + a†(b - a))⁻¹a† - a†(1 + (b - a)a†)⁻¹||`.
    pub swap_residual: f64,
    pub holds: bool,
}

pub fn lemma_factorizations(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<LemmaReport> {
    require_p(pair, cfg)?;
    let n = pair.a.rows();
    let id = ComplexMatrix::identity(n);
    let d = pair.delta();
    let left = &id + &pair.a_dag * &d;
    let right = &id + &d * &pair.a_dag;
    let scale = pair.norm_of(&pair.b).max(1.0);
    let left_factorization = pair.norm_of(&(&pair.b - &pair.a * &left)) / scale;
    let right_factorization = pair.norm_of(&(&pair.b - &right * &pair.a)) / scale;
    let (li, ri) = (is_invertible(&left, cfg), is_invertible(&right, cfg));
    let swap_residual = if li.invertible && ri.invertible {
        let lhs = inverse(&left, cfg)? * &pair.a_dag;
        let rhs = &pair.a_dag * inverse(&right, cfg)?;
        relative(pair.norm_of(&(&lhs - &rhs)), pair.norm_of(&pair.a_dag))
    } else {
        f64::INFINITY
    };
    let holds = left_factorization <= cfg.residual
        && right_factorization <= cfg.residual
        && li.invertible
        && ri.invertible
        && swap_residual <= cfg.residual;
    Ok(LemmaReport {
        left_factorization,
        right_factorization,
        left_factor_rcond: li.rcond,
        right_factor_rcond: ri.rcond,
        swap_residual,
        holds,
    })
}

/// Closed-form `b† = (1 + a†(b - a))⁻¹ a†` with its certificate under the
/// pair's norm. Fails with a contract error unless the certificate is valid
/// and `bb† = aa†`, `b†b = a†a`.
pub fn perturbed_mp(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<(ComplexMatrix, MPCertificate)> {
    require_p(pair, cfg)?;
    let id = ComplexMatrix::identity(pair.a.rows());
    let factor = &id + &pair.a_dag * pair.delta();
    let b_dag = inverse(&factor, cfg)? * &pair.a_dag;
    let cert = mp_verify(&pair.b, &b_dag, &pair.norm, cfg)?;
    let range_gap = relative_gap(&(&pair.b * &b_dag), &(&pair.a * &pair.a_dag));
    let kernel_gap = relative_gap(&(&b_dag * &pair.b), &(&pair.a_dag * &pair.a));
    let gap = range_gap.max(kernel_gap);
    if !cert.valid || gap > cfg.residual {
        return Err(CoepError::Contract {
            what: "closed-form perturbed Moore-Penrose inverse".into(),
            residual: gap.max(cert.residual_aba).max(cert.residual_bab),
        });
    }
    Ok((b_dag, cert))
}

/// Realized relative error of the inverse against its bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorBound {
    /// `||b† - a†|| / ||a†||`.
    pub realized: f64,
    /// `c / (1 - c)`.
    pub bound: f64,
    pub holds: bool,
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + BOUND_SLACK) + f64::EPSILON
}

fn error_bound_from(pair: &PerturbationPair, b_dag: &ComplexMatrix, c: f64) -> ErrorBound {
    let realized = relative(pair.norm_of(&(b_dag - &pair.a_dag)), pair.norm_of(&pair.a_dag));
    let bound = c / (1.0 - c);
    ErrorBound { realized, bound, holds: within(realized, bound) }
}

pub fn error_bound(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<ErrorBound> {
    let p = require_p(pair, cfg)?;
    let (b_dag, _) = perturbed_mp(pair, cfg)?;
    Ok(error_bound_from(pair, &b_dag, p.contraction))
}

/// `||a†|| / (1 + c) <= ||b†|| <= ||a†|| / (1 - c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormBracket {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
}

fn norm_bracket_from(pair: &PerturbationPair, b_dag: &ComplexMatrix, c: f64) -> NormBracket {
    let nd = pair.norm_of(&pair.a_dag);
    let lower = nd / (1.0 + c);
    let upper = nd / (1.0 - c);
    let value = pair.norm_of(b_dag);
    let holds = within(lower, value) && within(value, upper);
    NormBracket { lower, value, upper, holds }
}

pub fn norm_bracket(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<NormBracket> {
    let p = require_p(pair, cfg)?;
    let (b_dag, _) = perturbed_mp(pair, cfg)?;
    Ok(norm_bracket_from(pair, &b_dag, p.contraction))
}

/// Condition (P) for `a` at `b`, checked when `c < 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReverseCondition {
    /// `c < 1/2`; otherwise nothing is checked and `holds` is vacuous.
    pub applicable: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverse: Option<ConditionP>,
}

fn reverse_from(pair: &PerturbationPair, b_dag: &ComplexMatrix, c: f64, cfg: &ToleranceConfig) -> ReverseCondition {
    if c >= 0.5 {
        return ReverseCondition { applicable: false, holds: true, reverse: None };
    }
    let swapped = PerturbationPair { a: pair.b.clone(), a_dag: b_dag.clone(), b: pair.a.clone(), norm: pair.norm };
    let reverse = satisfies_condition_p(&swapped, cfg);
    ReverseCondition { applicable: true, holds: reverse.holds, reverse: Some(reverse) }
}

pub fn reverse_condition(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<ReverseCondition> {
    let p = require_p(pair, cfg)?;
    let (b_dag, _) = perturbed_mp(pair, cfg)?;
    Ok(reverse_from(pair, &b_dag, p.contraction, cfg))
}

/// Relative error of the inverse against the condition number `||a|| ||a†||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionNumberBound {
    /// `||a†|| ||b - a|| < 1`; otherwise the bound is not asserted.
    pub applicable: bool,
    pub condition_number: f64,
    /// `||b - a|| / ||a||`.
    pub relative_perturbation: f64,
    pub realized: f64,
    /// `k r / (1 - k r)` with `k` the condition number, `r` the relative
    /// perturbation; infinite when not applicable.
    pub bound: f64,
    pub holds: bool,
}

fn condition_bound_from(pair: &PerturbationPair, b_dag: &ComplexMatrix) -> ConditionNumberBound {
    let na = pair.norm_of(&pair.a);
    let nd = pair.norm_of(&pair.a_dag);
    let nb = pair.norm_of(&pair.delta());
    let condition_number = na * nd;
    let relative_perturbation = relative(nb, na);
    let realized = relative(pair.norm_of(&(b_dag - &pair.a_dag)), nd);
    let applicable = nd * nb < 1.0;
    let kr = condition_number * relative_perturbation;
    let bound = if applicable { kr / (1.0 - kr) } else { f64::INFINITY };
    let holds = !applicable || within(realized, bound);
    ConditionNumberBound { applicable, condition_number, relative_perturbation, realized, bound, holds }
}

pub fn condition_number_bound(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<ConditionNumberBound> {
    require_p(pair, cfg)?;
    let (b_dag, _) = perturbed_mp(pair, cfg)?;
    Ok(condition_bound_from(pair, &b_dag))
}

/// One product of `a`, `b` and their inverses against its claimed inverse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductCheck {
    /// `"ab†"`, `"b†a"`, `"ba†"` or `"a†b"`.
    pub product: String,
    pub claimed_inverse: String,
    pub certificate: MPCertificate,
    /// Whether the product is co-EP; evaluated only when `a` is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub co_ep: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductReport {
    pub checks: Vec<ProductCheck>,
    /// Every claimed inverse is certified.
    pub identities_hold: bool,
    pub base_co_ep: bool,
    /// Every product is co-EP; `None` unless `a` is co-EP.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub co_ep_holds: Option<bool>,
}

fn products_from(pair: &PerturbationPair, b_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ProductReport> {
    let (a, b, a_dag) = (&pair.a, &pair.b, &pair.a_dag);
    let base_co_ep = is_invertible(&(a * a_dag - a_dag * a), cfg).invertible;
    let cases = [
        ("ab†", a * b_dag, "ba†", b * a_dag),
        ("b†a", b_dag * a, "a†b", a_dag * b),
        ("ba†", b * a_dag, "ab†", a * b_dag),
        ("a†b", a_dag * b, "b†a", b_dag * a),
    ];
    let mut checks = Vec::with_capacity(4);
    for (label, product, inv_label, claimed) in cases {
        let certificate = mp_verify(&product, &claimed, &pair.norm, cfg)?;
        let co_ep = if base_co_ep && certificate.valid {
            Some(classify_with(&product, &claimed, &pair.norm, cfg)?.co_ep())
        } else if base_co_ep {
            Some(false)
        } else {
            None
        };
        checks.push(ProductCheck { product: label.into(), claimed_inverse: inv_label.into(), certificate, co_ep });
    }
    let identities_hold = checks.iter().all(|c| c.certificate.valid);
    let co_ep_holds = base_co_ep.then(|| checks.iter().all(|c| c.co_ep == Some(true)));
    Ok(ProductReport { checks, identities_hold, base_co_ep, co_ep_holds })
}

/// Certifies `(ab†)† = ba†`, `(b†a)† = a†b`, `(ba†)† = ab†`, `(a†b)† = b†a`,
/// and, for co-EP `a`, classifies each product.
pub fn product_mps(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<ProductReport> {
    require_p(pair, cfg)?;
    let (b_dag, _) = perturbed_mp(pair, cfg)?;
    products_from(pair, &b_dag, cfg)
}

/// For co-EP `a`: `b` is co-EP with the same idempotents `h` and `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassPreservation {
    pub b_co_ep: bool,
    /// Relative distances between the idempotents of `a` and `b`.
    pub h_gap: f64,
    pub k_gap: f64,
    pub holds: bool,
}

fn class_preservation(
    pair: &PerturbationPair,
    b_dag: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<Option<ClassPreservation>> {
    let Some((ha, ka)) = canonical_idempotents(&pair.a, &pair.a_dag, cfg)? else {
        return Ok(None);
    };
    Ok(Some(match canonical_idempotents(&pair.b, b_dag, cfg)? {
        Some((hb, kb)) => {
            let (h_gap, k_gap) = (relative_gap(&ha, &hb), relative_gap(&ka, &kb));
            ClassPreservation { b_co_ep: true, h_gap, k_gap, holds: h_gap.max(k_gap) <= cfg.residual }
        }
        None => ClassPreservation { b_co_ep: false, h_gap: f64::INFINITY, k_gap: f64::INFINITY, holds: false },
    }))
}

/// Everything known about one perturbation. Fields after `condition` are
/// present only when (P) holds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub norm: NormSpec,
    pub condition: ConditionP,
    pub condition_number: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_dag: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MPCertificate>,
    /// Relative distance of `b†` to the SVD pseudo-inverse of `b`; Euclidean
    /// norm only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svd_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<ErrorBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<NormBracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverse: Option<ReverseCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_bound: Option<ConditionNumberBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub products: Option<ProductReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_preservation: Option<ClassPreservation>,
}

impl PerturbationReport {
    /// (P) holds and every consequence checked in the report verified.
    pub fn consequences_hold(&self) -> bool {
        self.condition.holds
            && self.lemma.as_ref().is_some_and(|l| l.holds)
            && self.error_bound.is_some_and(|e| e.holds)
            && self.bracket.is_some_and(|b| b.holds)
            && self.reverse.as_ref().is_some_and(|r| r.holds)
            && self.condition_bound.is_some_and(|c| c.holds)
            && self.products.as_ref().is_some_and(|p| p.identities_hold)
            && self.class_preservation.is_none_or(|c| c.holds)
    }
}

pub fn perturbation_report(pair: &PerturbationPair, cfg: &ToleranceConfig) -> Result<PerturbationReport> {
    let condition = satisfies_condition_p(pair, cfg);
    let condition_number = pair.norm_of(&pair.a) * pair.norm_of(&pair.a_dag);
    let mut report = PerturbationReport {
        norm: pair.norm,
        condition: condition.clone(),
        condition_number,
        b_dag: None,
        certificate: None,
        svd_gap: None,
        lemma: None,
        error_bound: None,
        bracket: None,
        reverse: None,
        condition_bound: None,
        products: None,
        class_preservation: None,
    };
    if !condition.holds {
        return Ok(report);
    }
    let (b_dag, cert) = perturbed_mp(pair, cfg)?;
    let c = condition.contraction;
    if pair.norm.is_euclidean() {
        let (svd, _) = mp_inverse_euclidean(&pair.b, cfg)?;
        report.svd_gap = Some(relative_gap(&b_dag, &svd));
    }
    report.lemma = Some(lemma_factorizations(pair, cfg)?);
    report.error_bound = Some(error_bound_from(pair, &b_dag, c));
    report.bracket = Some(norm_bracket_from(pair, &b_dag, c));
    report.reverse = Some(reverse_from(pair, &b_dag, c, cfg));
    report.condition_bound = Some(condition_bound_from(pair, &b_dag));
    report.products = Some(products_from(pair, &b_dag, cfg)?);
    report.class_preservation = class_preservation(pair, &b_dag, cfg)?;
    report.certificate = Some(cert);
    report.b_dag = Some(b_dag);
    Ok(report)
}

/// `b = a + s aa† e a†a` for a seeded complex Gaussian `e`, with `s` chosen so
/// that `||a†(b - a)|| = eps` under `norm`. The contraction is homogeneous in
/// `s`, so one evaluation fixes the scale.
pub fn gen_perturbation(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    eps: f64,
    norm: &NormSpec,
    seed: u64,
) -> Result<ComplexMatrix> {
    let n = a.require_square("gen_perturbation base")?;
    if !(0.0..1.0).contains(&eps) {
        return Err(CoepError::InvalidInput(format!("eps must lie in [0, 1), got {eps}")));
    }
    norm.validate()?;
    if eps == 0.0 {
        return Ok(a.clone());
    }
    let mut rng = rng_from_seed(seed);
    let aad = a * a_dag;
    let ada = a_dag * a;
    for _ in 0..8 {
        let e = ginibre(&mut rng, n, n);
        let direction = &aad * e * &ada;
        let unit = operator_norm_unchecked(&(a_dag * &direction), norm);
        if unit > 1e-12 * direction.max_abs().max(1.0) {
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            return Ok(a + direction.scale(phase * (eps / unit)));
        }
    }
    Err(CoepError::Precondition("aa† A a†a is trivial, so no nonzero perturbation obeys (P)".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::gen_coep_non_hermitian;
    use crate::random::ginibre;
    use proptest::prelude::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(d)
    }

    fn diagonal_pair() -> PerturbationPair {
        PerturbationPair::euclidean(diag(&[1.0, 0.0]), diag(&[1.2, 0.0]), &cfg()).unwrap()
    }

    fn e() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.])
    }

    #[test]
    fn condition_p_examples() {
        let p = satisfies_condition_p(&diagonal_pair(), &cfg());
        assert!(p.holds && p.projection_residual == 0.0 && (p.contraction - 0.2).abs() < 1e-15);

        let same = PerturbationPair::euclidean(diag(&[1.0, 0.0]), diag(&[1.0, 0.0]), &cfg()).unwrap();
        let p = satisfies_condition_p(&same, &cfg());
        assert!(p.holds && p.contraction == 0.0);

        let off = PerturbationPair::euclidean(diag(&[1.0, 0.0]), diag(&[1.0, 0.1]), &cfg()).unwrap();
        let p = satisfies_condition_p(&off, &cfg());
        assert!(!p.holds && (p.projection_residual - 0.1).abs() < 1e-15);
        assert!(perturbed_mp(&off, &cfg()).is_err());
    }

    #[test]
    fn contraction_at_one_is_rejected() {
        let pair = PerturbationPair::euclidean(diag(&[1.0, 0.0]), diag(&[2.0, 0.0]), &cfg()).unwrap();
        let p = satisfies_condition_p(&pair, &cfg());
        assert!(!p.holds && (p.contraction - 1.0).abs() < 1e-15 && p.projection_residual == 0.0);
    }

    #[test]
    fn lemma_examples() {
        let l = lemma_factorizations(&diagonal_pair(), &cfg()).unwrap();
        assert!(l.holds && l.swap_residual == 0.0 && l.left_factorization == 0.0);
        let a = gen_coep_non_hermitian(4, 2).unwrap();
        let pair = PerturbationPair::euclidean(a.clone(), a, &cfg()).unwrap();
        let b = gen_perturbation(&pair.a, &pair.a_dag, 0.4, &NormSpec::l2(), 8).unwrap();
        let pair = PerturbationPair::euclidean(pair.a, b, &cfg()).unwrap();
        let l = lemma_factorizations(&pair, &cfg()).unwrap();
        assert!(l.left_factorization <= 1e-10 && l.right_factorization <= 1e-10 && l.swap_residual <= 1e-10);
    }

    #[test]
    fn diagonal_closed_forms() {
        let pair = diagonal_pair();
        let (b_dag, cert) = perturbed_mp(&pair, &cfg()).unwrap();
        assert!(cert.valid);
        assert!(b_dag.max_abs_diff(&diag(&[5.0 / 6.0, 0.0])) < 1e-15);
        let (svd, _) = mp_inverse_euclidean(&pair.b, &cfg()).unwrap();
        assert!(b_dag.max_abs_diff(&svd) < 1e-15);

        let eb = error_bound(&pair, &cfg()).unwrap();
        assert!((eb.realized - 1.0 / 6.0).abs() < 1e-15 && (eb.bound - 0.25).abs() < 1e-15 && eb.holds);

        let br = norm_bracket(&pair, &cfg()).unwrap();
        assert!((br.lower - 1.0 / 1.2).abs() < 1e-15 && (br.value - 5.0 / 6.0).abs() < 1e-15);
        assert!((br.upper - 1.25).abs() < 1e-15 && br.holds);

        let rc = reverse_condition(&pair, &cfg()).unwrap();
        assert!(rc.applicable && rc.holds);
        assert!((rc.reverse.unwrap().contraction - 1.0 / 6.0).abs() < 1e-15);

        let cb = condition_number_bound(&pair, &cfg()).unwrap();
        assert!(cb.applicable && cb.holds && (cb.condition_number - 1.0).abs() < 1e-15);
        assert!((cb.bound - 0.25).abs() < 1e-15 && (cb.realized - 1.0 / 6.0).abs() < 1e-15);

        let pr = product_mps(&pair, &cfg()).unwrap();
        assert!(pr.identities_hold && pr.co_ep_holds.is_none());
        let ab = &pair.a * &b_dag;
        assert!(ab.max_abs_diff(&diag(&[5.0 / 6.0, 0.0])) < 1e-15);
        assert!((&pair.b * &pair.a_dag).max_abs_diff(&diag(&[1.2, 0.0])) < 1e-15);
    }

    #[test]
    fn zero_perturbation_is_trivial() {
        let a = ComplexMatrix::from_real(2, 2, &[1., 2., 2., 4.]);
        let pair = PerturbationPair::euclidean(a.clone(), a, &cfg()).unwrap();
        let (b_dag, _) = perturbed_mp(&pair, &cfg()).unwrap();
        assert_eq!(b_dag, pair.a_dag);
        let eb = error_bound(&pair, &cfg()).unwrap();
        assert_eq!((eb.realized, eb.bound), (0.0, 0.0));
        let br = norm_bracket(&pair, &cfg()).unwrap();
        assert!(br.lower == br.upper && br.holds);
        assert!(reverse_condition(&pair, &cfg()).unwrap().holds);
        let cb = condition_number_bound(&pair, &cfg()).unwrap();
        assert!(cb.realized == 0.0 && cb.bound == 0.0 && cb.holds);
        // Every product reduces to aa† or a†a, its own Moore-Penrose inverse.
        let pr = product_mps(&pair, &cfg()).unwrap();
        assert!(pr.identities_hold);
    }

    #[test]
    fn ill_conditioned_condition_number_bound() {
        let pair = PerturbationPair::euclidean(diag(&[1.0, 1e-3]), diag(&[1.0, 1.5e-3]), &cfg()).unwrap();
        let cb = condition_number_bound(&pair, &cfg()).unwrap();
        assert!(cb.applicable && cb.holds);
        assert!((cb.condition_number - 1000.0).abs() < 1e-9);
        assert!((cb.realized - 1.0 / 3.0).abs() < 1e-12 && (cb.bound - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reverse_condition_not_applicable_above_half() {
        let pair = PerturbationPair::euclidean(diag(&[1.0, 0.0]), diag(&[1.6, 0.0]), &cfg()).unwrap();
        let rc = reverse_condition(&pair, &cfg()).unwrap();
        assert!(!rc.applicable && rc.reverse.is_none());
    }

    #[test]
    fn nilpotent_products_are_ep() {
        // (ab†)(ba†) = (ba†)(ab†) = aa†, so each product commutes with its inverse.
        let pair = PerturbationPair::euclidean(e(), e().scale_real(1.3), &cfg()).unwrap();
        let pr = product_mps(&pair, &cfg()).unwrap();
        assert!(pr.identities_hold && pr.base_co_ep);
        assert_eq!(pr.co_ep_holds, Some(false));
        for check in &pr.checks {
            assert_eq!(check.co_ep, Some(false));
        }
    }

    #[test]
    fn co_ep_class_is_preserved() {
        for seed in 0..6 {
            let a = gen_coep_non_hermitian(4, seed).unwrap();
            let (a_dag, _) = mp_inverse_euclidean(&a, &cfg()).unwrap();
            let b = gen_perturbation(&a, &a_dag, 0.3, &NormSpec::l2(), seed).unwrap();
            let pair = PerturbationPair::new(a, a_dag, b, NormSpec::l2(), &cfg()).unwrap();
            let report = perturbation_report(&pair, &cfg()).unwrap();
            let cp = report.class_preservation.unwrap();
            assert!(cp.b_co_ep && cp.holds, "{cp:?}");
            assert!(report.consequences_hold());
        }
    }

    #[test]
    fn generated_contraction_is_exact_for_exact_norms() {
        let mut rng = rng_from_seed(4);
        for norm in [NormSpec::l1(), NormSpec::l2(), NormSpec::linf()] {
            for seed in 0..5 {
                let a = crate::classification::gen_random(4, seed).unwrap();
                let (a_dag, _) = mp_inverse_euclidean(&a, &cfg()).unwrap();
                let eps = rand::Rng::random_range(&mut rng, 0.05..0.95);
                let b = gen_perturbation(&a, &a_dag, eps, &norm, seed).unwrap();
                let c = operator_norm_unchecked(&(&a_dag * (&b - &a)), &norm);
                assert!((c - eps).abs() <= 1e-12, "{norm} {c} {eps}");
            }
        }
        let z = ComplexMatrix::zeros(2, 2);
        assert!(gen_perturbation(&z, &z, 0.3, &NormSpec::l2(), 1).is_err());
        assert_eq!(gen_perturbation(&z, &z, 0.0, &NormSpec::l2(), 1).unwrap(), z);
        assert!(gen_perturbation(&z, &z, 1.0, &NormSpec::l2(), 1).is_err());
    }

    #[test]
    fn generated_at_049_passes_reverse() {
        for seed in 0..5 {
            let a = ginibre(&mut rng_from_seed(seed), 3, 3);
            let pair = PerturbationPair::euclidean(a.clone(), a, &cfg()).unwrap();
            let b = gen_perturbation(&pair.a, &pair.a_dag, 0.49, &NormSpec::l2(), seed).unwrap();
            let pair = PerturbationPair::new(pair.a, pair.a_dag, b, NormSpec::l2(), &cfg()).unwrap();
            assert!(reverse_condition(&pair, &cfg()).unwrap().holds);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closed_form_matches_svd_and_bounds_hold(seed in 0u64..10_000, n in 2usize..6, eps in 0.01f64..0.95) {
            let a = crate::classification::gen_random(n, seed).unwrap();
            let (a_dag, _) = mp_inverse_euclidean(&a, &cfg()).unwrap();
            let b = gen_perturbation(&a, &a_dag, eps, &NormSpec::l2(), seed ^ 0x5eed).unwrap();
            let pair = PerturbationPair::new(a, a_dag, b, NormSpec::l2(), &cfg()).unwrap();
            let report = perturbation_report(&pair, &cfg()).unwrap();
            prop_assert!(report.condition.holds);
            prop_assert!(report.svd_gap.unwrap() <= 1e-9);
            let eb = report.error_bound.unwrap();
            prop_assert!(eb.holds, "{:?}", eb);
            prop_assert!(report.bracket.unwrap().holds);
            prop_assert!(report.products.as_ref().unwrap().identities_hold);
            prop_assert!(report.consequences_hold());
        }
    }
}
