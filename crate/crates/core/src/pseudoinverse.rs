//! Generalized, normalized generalized and Moore-Penrose inverses.
//!
//! `b` is a generalized inverse of `a` when `aba = a`, normalized when also
//! `bab = b`, and the Moore-Penrose inverse when in addition `ab` and `ba` are
//! hermitian for the chosen norm. Under the Euclidean norm this is the
//! classical pseudo-inverse and is always computed. For other norms existence
//! depends on the norm, so inverses are verified by certificate and searched
//! for in a finite family of candidates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoepError, Result};
use crate::hermitian::{is_hermitian, HermitianVerdict};
use crate::linalg::{
    is_invertible, numerical_rank, operator_norm_unchecked, relative, sorted_svd, ComplexMatrix, NormSpec,
    ToleranceConfig,
};

/// Evidence for (or against) `x` being the Moore-Penrose inverse of `a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MPCertificate {
    /// `||axa - a|| / ||a||` (absolute when `a = 0`).
    pub residual_aba: f64,
    /// `||xax - x|| / ||x||` (absolute when `x = 0`).
    pub residual_bab: f64,
    /// Verdict on `ax`.
    pub ab_hermitian: HermitianVerdict,
    /// Verdict on `xa`.
    pub ba_hermitian: HermitianVerdict,
    pub norm: NormSpec,
    pub valid: bool,
}

/// Thin rank factorization `a = f g` from a column-pivoted QR: `f = Q_k` has
/// orthonormal columns and `g = R_k P^T`.
pub(crate) struct RankFactorization {
    pub rank: usize,
    pub f: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    q: DMatrix<Complex64>,
    r: DMatrix<Complex64>,
    perm: DMatrix<Complex64>,
}

pub(crate) fn rank_factorization(a: &ComplexMatrix, cfg: &ToleranceConfig) -> RankFactorization {
    let n = a.cols();
    let (q, r, p) = a.as_dmatrix().clone().col_piv_qr().unpack();
    let mut perm = DMatrix::identity(n, n);
    p.permute_columns(&mut perm);
    let d = r.nrows().min(r.ncols());
    let lead = if d > 0 { r[(0, 0)].norm() } else { 0.0 };
    let rank = if lead > cfg.rank { (0..d).take_while(|&i| r[(i, i)].norm() > cfg.rank * lead).count() } else { 0 };
    let f = q.columns(0, rank).into_owned();
    let g = r.rows(0, rank).into_owned() * perm.transpose();
    RankFactorization { rank, f, g, q, r, perm }
}

fn certificate_residual(lhs: &ComplexMatrix, target: &ComplexMatrix, norm: &NormSpec) -> f64 {
    relative(operator_norm_unchecked(&(lhs - target), norm), operator_norm_unchecked(target, norm))
}

/// Some `b` with `aba = a`, built as `P [R11^-1, 0; 0, 0] Q^*` from a
/// column-pivoted QR `a P = Q R`.
pub fn generalized_inverse(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = a.require_square("generalized_inverse argument")?;
    let rf = rank_factorization(a, cfg);
    let k = rf.rank;
    if k == 0 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let r11 = rf.r.view((0, 0), (k, k)).into_owned();
    let r11_inv = r11.solve_upper_triangular(&DMatrix::identity(k, k)).ok_or(CoepError::Singular { margin: 0.0 })?;
    let mut middle = DMatrix::zeros(n, n);
    middle.view_mut((0, 0), (k, k)).copy_from(&r11_inv);
    Ok(ComplexMatrix::wrap(&rf.perm * middle * rf.q.adjoint()))
}

/// `bab`, the normalized generalized inverse derived from a generalized
/// inverse `b` of `a`.
pub fn normalize(a: &ComplexMatrix, b: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = a.require_square("normalize argument")?;
    if b.rows() != n || b.cols() != n {
        return Err(CoepError::Shape(format!("normalize: a is {n}x{n} but b is {}x{}", b.rows(), b.cols())));
    }
    let l2 = NormSpec::l2();
    let residual = certificate_residual(&(a * b * a), a, &l2);
    if !(residual <= cfg.residual) {
        return Err(CoepError::Contract { what: "generalized inverse residual ||aba - a||".into(), residual });
    }
    Ok(b * a * b)
}

/// Classical pseudo-inverse `V S^+ U^*` from an SVD, with its certificate
/// under the Euclidean norm.
pub fn mp_inverse_euclidean(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<(ComplexMatrix, MPCertificate)> {
    let n = a.require_square("mp_inverse_euclidean argument")?;
    let svd = sorted_svd(a.as_dmatrix());
    let r = numerical_rank(&svd.s, cfg.rank);
    let mut x = DMatrix::zeros(n, n);
    for (i, &s) in svd.s.iter().take(r).enumerate() {
        let ui = svd.u.column(i);
        let vi = svd.v.column(i);
        x += vi * ui.adjoint() * Complex64::new(1.0 / s, 0.0);
    }
    let x = ComplexMatrix::wrap(x);
    let cert = mp_verify(a, &x, &NormSpec::l2(), cfg)?;
    Ok((x, cert))
}

/// Pseudo-inverse through the rank factorization `a = f g`:
/// `a^+ = g^* (g g^*)^-1 (f^* f)^-1 f^*`. Independent of the SVD route.
pub fn mp_inverse_rank_factorization(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = a.require_square("mp_inverse_rank_factorization argument")?;
    let rf = rank_factorization(a, cfg);
    if rf.rank == 0 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let ggs = &rf.g * rf.g.adjoint();
    let ffs = rf.f.adjoint() * &rf.f;
    let ggs_inv = ggs.lu().try_inverse().ok_or(CoepError::Singular { margin: 0.0 })?;
    let ffs_inv = ffs.lu().try_inverse().ok_or(CoepError::Singular { margin: 0.0 })?;
    Ok(ComplexMatrix::wrap(rf.g.adjoint() * ggs_inv * ffs_inv * rf.f.adjoint()))
}

/// Checks the Penrose-type conditions for `x` under `norm`.
pub fn mp_verify(
    a: &ComplexMatrix,
    x: &ComplexMatrix,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<MPCertificate> {
    let n = a.require_square("mp_verify argument")?;
    if x.rows() != n || x.cols() != n {
        return Err(CoepError::Shape(format!("mp_verify: a is {n}x{n} but x is {}x{}", x.rows(), x.cols())));
    }
    norm.validate()?;
    let residual_aba = certificate_residual(&(a * x * a), a, norm);
    let residual_bab = certificate_residual(&(x * a * x), x, norm);
    let ab_hermitian = is_hermitian(&(a * x), norm, cfg)?;
    let ba_hermitian = is_hermitian(&(x * a), norm, cfg)?;
    let valid = residual_aba <= cfg.residual
        && residual_bab <= cfg.residual
        && ab_hermitian.is_hermitian
        && ba_hermitian.is_hermitian;
    Ok(MPCertificate { residual_aba, residual_bab, ab_hermitian, ba_hermitian, norm: *norm, valid })
}

/// Fails with a contract error unless `mp_verify(a, a_dag, norm)` is valid.
pub(crate) fn require_mp_pair(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<MPCertificate> {
    let cert = mp_verify(a, a_dag, norm, cfg)?;
    if !cert.valid {
        let defect = |v: &HermitianVerdict| v.adjoint_residual.unwrap_or(v.defect);
        let residual =
            cert.residual_aba.max(cert.residual_bab).max(defect(&cert.ab_hermitian)).max(defect(&cert.ba_hermitian));
        return Err(CoepError::Contract {
            what: format!("({norm}) Moore-Penrose certificate of the supplied pair"),
            residual,
        });
    }
    Ok(cert)
}

/// Idempotent offered to the search, with where it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateIdempotent {
    /// `"core"` for `f (g f)^-1 g`, otherwise `"diag:i,j,..."`.
    pub label: String,
    pub matrix: ComplexMatrix,
}

/// Result of [`mp_search_diagonalizable`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum MpSearch {
    Found {
        inverse: ComplexMatrix,
        certificate: MPCertificate,
        /// Labels of the idempotents playing `ax` and `xa`.
        range_idempotent: String,
        kernel_idempotent: String,
    },
    /// No candidate pair passed; non-existence is only relative to this family.
    NotFound {
        range_candidates: usize,
        kernel_candidates: usize,
        pairs_tried: usize,
        /// Certificate of the tried pair with the smallest hermitian defect.
        closest: Option<MPCertificate>,
    },
}

impl MpSearch {
    pub fn inverse(&self) -> Option<&ComplexMatrix> {
        match self {
            MpSearch::Found { inverse, .. } => Some(inverse),
            MpSearch::NotFound { .. } => None,
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn coordinate_projection(n: usize, support: &[usize]) -> ComplexMatrix {
    let mut d = vec![0.0; n];
    for &i in support {
        d[i] = 1.0;
    }
    ComplexMatrix::from_real_diagonal(&d)
}

/// Searches for the Moore-Penrose inverse under a non-Euclidean norm.
///
/// Any such inverse is `x = Q b P` where `b` is a generalized inverse, `P = ax`
/// is a hermitian idempotent with `P a = a` and `Q = xa` one with `a Q = a`.
/// Candidates for `P` and `Q` are the core idempotent `f (g f)^-1 g` of a rank
/// factorization and the coordinate projections of size `rank(a)`. Pairs are
/// tried in lexicographic order and the first certified one is returned.
pub fn mp_search_diagonalizable(a: &ComplexMatrix, norm: &NormSpec, cfg: &ToleranceConfig) -> Result<MpSearch> {
    let n = a.require_square("mp_search_diagonalizable argument")?;
    norm.validate()?;
    if norm.is_euclidean() {
        return Err(CoepError::Unsupported("the Euclidean case is solved by mp_inverse_euclidean".into()));
    }
    let rf = rank_factorization(a, cfg);
    let b = generalized_inverse(a, cfg)?;
    let l2 = NormSpec::l2();
    let scale = operator_norm_unchecked(a, &l2);
    let fixes = |m: &ComplexMatrix| relative(operator_norm_unchecked(&(m - a), &l2), scale) <= cfg.residual;

    let mut all = Vec::new();
    if rf.rank > 0 {
        let gf = ComplexMatrix::wrap(&rf.g * &rf.f);
        if is_invertible(&gf, cfg).invertible {
            if let Some(inv) = gf.as_dmatrix().clone().lu().try_inverse() {
                let core = ComplexMatrix::wrap(&rf.f * inv * &rf.g);
                all.push(CandidateIdempotent { label: "core".into(), matrix: core });
            }
        }
    }
    for s in subsets(n, rf.rank) {
        let label = format!("diag:{}", s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","));
        all.push(CandidateIdempotent { label, matrix: coordinate_projection(n, &s) });
    }
    let keep_hermitian =
        |c: &&CandidateIdempotent| is_hermitian(&c.matrix, norm, cfg).map(|v| v.is_hermitian).unwrap_or(false);
    let range: Vec<&CandidateIdempotent> =
        all.iter().filter(|c| fixes(&(&c.matrix * a))).filter(keep_hermitian).collect();
    let kernel: Vec<&CandidateIdempotent> =
        all.iter().filter(|c| fixes(&(a * &c.matrix))).filter(keep_hermitian).collect();

    let pairs: Vec<(usize, usize)> = (0..range.len()).flat_map(|i| (0..kernel.len()).map(move |j| (i, j))).collect();
    let tried: Vec<Result<(ComplexMatrix, MPCertificate)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let x = &kernel[j].matrix * &b * &range[i].matrix;
            mp_verify(a, &x, norm, cfg).map(|c| (x, c))
        })
        .collect();
    let mut closest: Option<MPCertificate> = None;
    for (&(i, j), outcome) in pairs.iter().zip(tried) {
        let (x, cert) = outcome?;
        if cert.valid {
            return Ok(MpSearch::Found {
                inverse: x,
                certificate: cert,
                range_idempotent: range[i].label.clone(),
                kernel_idempotent: kernel[j].label.clone(),
            });
        }
        let defect = |c: &MPCertificate| c.ab_hermitian.defect.max(c.ba_hermitian.defect);
        if closest.as_ref().map_or(true, |c| defect(&cert) < defect(c)) {
            closest = Some(cert);
        }
    }
    Ok(MpSearch::NotFound {
        range_candidates: range.len(),
        kernel_candidates: kernel.len(),
        pairs_tried: pairs.len(),
        closest,
    })
}
