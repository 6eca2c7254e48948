//! EP, co-EP, bi-EP and hermitian co-EP elements, their canonical
//! idempotents, and auditors for the equivalence theorems that characterize
//! them.
//!
//! With `d = aa† - a†a`: `a` is EP when `d = 0`, co-EP when `d` is
//! invertible, bi-EP when `aa†` and `a†a` commute. For co-EP `a` the
//! idempotents `h = aa† d⁻¹` and `k = d⁻¹ aa†` satisfy `hA = aA`,
//! `(1-h)A = a†A`, `Ak = Aa†`, `A(1-k) = Aa`; `a` is hermitian co-EP when `h`
//! is hermitian.

mod audits;
mod generators;

pub use audits::{
    audit_cor8, audit_cor9, audit_thm5, audit_thm7, check_rem10, check_rem34, EquivalenceAudit, Rem10Check, Rem34Check,
};
pub use generators::{
    coep_from_angles, gen_coep_non_hermitian, gen_ep, gen_hermitian_coep, gen_random, nilpotent_block,
};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::hermitian::is_hermitian;
use crate::linalg::{
    inverse, is_invertible, operator_norm_unchecked, relative, ComplexMatrix, NormSpec, ToleranceConfig,
};
use crate::pseudoinverse::{mp_inverse_euclidean, mp_search_diagonalizable, require_mp_pair, MpSearch};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub norm: NormSpec,
    pub mp_invertible: bool,
    /// Why no Moore-Penrose inverse was found, when it was not.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mp_inverse: Option<ComplexMatrix>,
    /// The class predicates; all `None` when `a` is not MP-invertible.
    pub is_ep: Option<bool>,
    pub is_co_ep: Option<bool>,
    pub is_bi_ep: Option<bool>,
    pub is_hermitian_co_ep: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<ComplexMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<ComplexMatrix>,
    /// Evidence per predicate: `ep` and `bi_ep` are relative residuals,
    /// `co_ep` a reciprocal condition number, `hermitian_h` a hermitian defect.
    pub margins: BTreeMap<String, f64>,
}

impl ClassificationReport {
    pub fn co_ep(&self) -> bool {
        self.is_co_ep == Some(true)
    }

    pub fn ep(&self) -> bool {
        self.is_ep == Some(true)
    }

    pub fn bi_ep(&self) -> bool {
        self.is_bi_ep == Some(true)
    }

    pub fn hermitian_co_ep(&self) -> bool {
        self.is_hermitian_co_ep == Some(true)
    }
}

/// Classifies `a` under `norm`. The Moore-Penrose inverse is computed under
/// the Euclidean norm and searched for otherwise; when none is found the
/// report says so and leaves the predicates undefined.
pub fn classify(a: &ComplexMatrix, norm: &NormSpec, cfg: &ToleranceConfig) -> Result<ClassificationReport> {
    a.require_square("classify argument")?;
    norm.validate()?;
    if norm.is_euclidean() {
        let (x, _) = mp_inverse_euclidean(a, cfg)?;
        return classify_with(a, &x, norm, cfg);
    }
    match mp_search_diagonalizable(a, norm, cfg)? {
        MpSearch::Found { inverse, .. } => classify_with(a, &inverse, norm, cfg),
        MpSearch::NotFound { pairs_tried, .. } => Ok(ClassificationReport {
            norm: *norm,
            mp_invertible: false,
            note: Some(format!("no Moore-Penrose inverse among {pairs_tried} candidate pairs of the searched family")),
            mp_inverse: None,
            is_ep: None,
            is_co_ep: None,
            is_bi_ep: None,
            is_hermitian_co_ep: None,
            h: None,
            k: None,
            margins: BTreeMap::new(),
        }),
    }
}

/// The canonical idempotents `(h, k)` of a co-EP element, `None` otherwise.
pub fn canonical_idempotents(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<Option<(ComplexMatrix, ComplexMatrix)>> {
    let aad = a * a_dag;
    let d = &aad - a_dag * a;
    if !is_invertible(&d, cfg).invertible {
        return Ok(None);
    }
    let d_inv = inverse(&d, cfg)?;
    Ok(Some((&aad * &d_inv, &d_inv * &aad)))
}

/// Relative distance `||x - y||_2 / max(||x||_2, ||y||_2)`.
pub(crate) fn relative_gap(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    let l2 = NormSpec::l2();
    let scale = operator_norm_unchecked(x, &l2).max(operator_norm_unchecked(y, &l2));
    relative(operator_norm_unchecked(&(x - y), &l2), scale)
}

/// Classifies `a` with a supplied Moore-Penrose inverse, which must be
/// certified under `norm`.
pub fn classify_with(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<ClassificationReport> {
    require_mp_pair(a, a_dag, norm, cfg)?;
    let aad = a * a_dag;
    let ada = a_dag * a;
    let mut margins = BTreeMap::new();

    let ep_gap = relative_gap(&aad, &ada);
    margins.insert("ep".to_string(), ep_gap);
    let is_ep = ep_gap <= cfg.residual;

    let d = &aad - &ada;
    let inv = is_invertible(&d, cfg);
    margins.insert("co_ep".to_string(), inv.rcond);

    let comm = relative_gap(&(&aad * &ada), &(&ada * &aad));
    margins.insert("bi_ep".to_string(), comm);
    let is_bi_ep = comm <= cfg.residual;

    let idempotents = canonical_idempotents(a, a_dag, cfg)?;
    let mut is_hermitian_co_ep = false;
    if let Some((h, _)) = &idempotents {
        let v = is_hermitian(h, norm, cfg)?;
        margins.insert("hermitian_h".to_string(), v.adjoint_residual.unwrap_or(v.defect));
        is_hermitian_co_ep = v.is_hermitian;
    }
    let (h, k) = match idempotents {
        Some((h, k)) => (Some(h), Some(k)),
        None => (None, None),
    };
    Ok(ClassificationReport {
        norm: *norm,
        mp_invertible: true,
        note: None,
        mp_inverse: Some(a_dag.clone()),
        is_ep: Some(is_ep),
        is_co_ep: Some(inv.invertible),
        is_bi_ep: Some(is_bi_ep),
        is_hermitian_co_ep: Some(is_hermitian_co_ep),
        h,
        k,
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre, rng_from_seed};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn e() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.])
    }

    fn uv() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(2, 2, &[s, s, 0., 0.])
    }

    #[test]
    fn nilpotent_example() {
        let r = classify(&e(), &NormSpec::l2(), &cfg()).unwrap();
        assert!(r.co_ep() && r.hermitian_co_ep() && !r.ep());
        let h = r.h.unwrap();
        assert!(h.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-12);
        assert!(r.k.unwrap().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn invertible_is_ep() {
        let a = ComplexMatrix::from_real(2, 2, &[2., 1., 1., 3.]);
        let r = classify(&a, &NormSpec::l2(), &cfg()).unwrap();
        assert!(r.ep() && !r.co_ep() && r.bi_ep());
        assert!(r.h.is_none() && r.k.is_none());
    }

    #[test]
    fn rank_one_non_orthogonal_example() {
        // Closed form: a† = a^* / ||u||^2 ||v||^2 = a^*, aa† = diag(1, 0),
        // a†a = v v^* = [[1/2, 1/2], [1/2, 1/2]], det(aa† - a†a) = -1/2,
        // h = aa† (aa† - a†a)^-1 = [[1, -1], [0, 0]].
        let a = uv();
        let r = classify(&a, &NormSpec::l2(), &cfg()).unwrap();
        assert!(r.co_ep() && !r.hermitian_co_ep() && !r.bi_ep() && !r.ep());
        let h = r.h.clone().unwrap();
        assert!(h.max_abs_diff(&ComplexMatrix::from_real(2, 2, &[1., -1., 0., 0.])) < 1e-12);
        let x = r.mp_inverse.unwrap();
        let d = &a * &x - &x * &a;
        let det = d.get(0, 0) * d.get(1, 1) - d.get(0, 1) * d.get(1, 0);
        assert!((det.re + 0.5).abs() < 1e-12 && det.im.abs() < 1e-12);
        assert!((&h * &h).max_abs_diff(&h) < 1e-12);
        assert!((&h * &a).max_abs_diff(&a) < 1e-12);
        assert!((&h * &x).max_abs() < 1e-12);
    }

    #[test]
    fn h_and_k_one_sided_identities() {
        for seed in 0..10 {
            let a = gen_coep_non_hermitian(4, seed).unwrap();
            let (x, _) = mp_inverse_euclidean(&a, &cfg()).unwrap();
            let (h, k) = canonical_idempotents(&a, &x, &cfg()).unwrap().unwrap();
            assert!((&h * &h).max_abs_diff(&h) < 1e-10);
            assert!((&k * &k).max_abs_diff(&k) < 1e-10);
            assert!((&h * &a).max_abs_diff(&a) < 1e-10);
            assert!((&h * &x).max_abs() < 1e-10);
            assert!((&x * &k).max_abs_diff(&x) < 1e-10);
            assert!((&a * &k).max_abs() < 1e-10);
        }
    }

    #[test]
    fn ep_and_coep_exclusive_for_nonzero() {
        let mut rng = rng_from_seed(3);
        for seed in 0..20 {
            let a = match seed % 3 {
                0 => gen_ep(4, seed).unwrap(),
                1 => gen_random(4, seed).unwrap(),
                _ => ginibre(&mut rng, 4, 4),
            };
            let r = classify(&a, &NormSpec::l2(), &cfg()).unwrap();
            assert!(!(r.ep() && r.co_ep()));
            if r.hermitian_co_ep() {
                assert!(r.co_ep());
            }
        }
    }

    #[test]
    fn non_euclidean_classification() {
        // Under L1 the search finds E† = E^T and the products are coordinate projections.
        let r = classify(&e(), &NormSpec::l1(), &cfg()).unwrap();
        assert!(r.mp_invertible && r.co_ep() && r.hermitian_co_ep());
        let r = classify(&uv(), &NormSpec::l1(), &cfg()).unwrap();
        assert!(!r.mp_invertible && r.is_co_ep.is_none() && r.note.is_some());
    }
}
