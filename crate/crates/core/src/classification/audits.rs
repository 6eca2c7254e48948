//! Statement-by-statement auditors for the co-EP characterizations.
//!
//! Every statement of an equivalence is evaluated on its own route: ideal
//! statements on the lifted space of `vec(x)`, operator statements on column
//! spaces, existence of idempotents by least squares. The audit then only
//! compares the resulting booleans.

use num_complex::Complex64;
use serde::Serialize;

use super::canonical_idempotents;
use crate::error::Result;
use crate::hermitian::is_hermitian;
use crate::lifted::{
    left_annihilator_space, left_ideal, lift, right_annihilator_space, right_ideal, validate_scalars, Side,
};
use crate::linalg::{
    is_invertible, null_basis, numerical_rank, operator_norm_unchecked, range_basis, rank, relative, sorted_svd,
    subspace_intersect, subspace_sum, ComplexMatrix, NormSpec, Subspace, ToleranceConfig,
};
use crate::pseudoinverse::{mp_inverse_euclidean, require_mp_pair};
use crate::statement::{
    equal_matrices, equal_spaces, full_space, invertible, trivial_intersection, zero_space, Statement,
};

/// The evaluated statements of one equivalence theorem, in order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceAudit {
    pub statements: Vec<Statement>,
    /// Every statement has the same truth value.
    pub all_agree: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EquivalenceAudit {
    fn new(statements: Vec<Statement>, notes: Vec<String>) -> Self {
        let all_agree = statements.windows(2).all(|w| w[0].holds == w[1].holds);
        Self { statements, all_agree, notes }
    }

    /// The common truth value, when the statements agree.
    pub fn verdict(&self) -> Option<bool> {
        match self.statements.first() {
            Some(s) if self.all_agree => Some(s.holds),
            _ => None,
        }
    }
}

/// Minimum-norm least-squares solution of `m x = rhs`.
fn min_norm_solve(m: &ComplexMatrix, rhs: &ComplexMatrix, cfg: &ToleranceConfig) -> ComplexMatrix {
    let svd = sorted_svd(m.as_dmatrix());
    let r = numerical_rank(&svd.s, cfg.rank);
    let u = svd.u.columns(0, r);
    let v = svd.v.columns(0, r);
    let mut coeffs = u.adjoint() * rhs.as_dmatrix();
    for (i, mut row) in coeffs.row_iter_mut().enumerate() {
        row /= Complex64::new(svd.s[i], 0.0);
    }
    ComplexMatrix::wrap(v * coeffs)
}

/// Decides whether an idempotent `x` with `m x = rhs` exists, given the
/// least-squares solution. Margin = the larger of the relative equation
/// residual and the relative idempotence defect.
fn idempotent_fit(label: &str, x: &ComplexMatrix, residual: f64, cfg: &ToleranceConfig) -> Statement {
    let fro = x.frobenius_norm();
    let idem = relative((x * x - x).frobenius_norm(), fro.max(1.0));
    let margin = residual.max(idem);
    Statement::new(label, margin <= cfg.residual, margin)
}

/// `h a = a`, `h a† = 0` on the lifted space: `(Mᵀ ⊗ I) vec(h) = vec([a, 0])`
/// with `M = [a, a†]`.
fn lifted_h(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> (ComplexMatrix, f64) {
    let n = a.rows();
    let m = a.hstack(a_dag);
    let rhs = a.hstack(&ComplexMatrix::zeros(n, n));
    let system = m.transpose().kronecker(&ComplexMatrix::identity(n));
    lifted_solve(n, &system, &rhs, cfg)
}

/// `a k = a`, `a† k = 0` on the lifted space: `(I ⊗ M) vec(k) = vec([a; 0])`
/// with `M = [a; a†]`.
fn lifted_k(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> (ComplexMatrix, f64) {
    let n = a.rows();
    let m = a.vstack(a_dag);
    let rhs = a.vstack(&ComplexMatrix::zeros(n, n));
    let system = ComplexMatrix::identity(n).kronecker(&m);
    lifted_solve(n, &system, &rhs, cfg)
}

fn lifted_solve(n: usize, system: &ComplexMatrix, rhs: &ComplexMatrix, cfg: &ToleranceConfig) -> (ComplexMatrix, f64) {
    let v = rhs.vectorize();
    let b = ComplexMatrix::wrap(nalgebra::DMatrix::from_column_slice(v.len(), 1, v.as_slice()));
    let x = min_norm_solve(system, &b, cfg);
    let residual = relative((system * &x - &b).frobenius_norm(), b.frobenius_norm());
    (ComplexMatrix::unvectorize(n, &x.into_dmatrix().column(0).into_owned()), residual)
}

/// All nine statements characterizing co-EP elements through `λa + μa†`,
/// the ideals `aA`, `a†A`, `Aa`, `Aa†` and the idempotents `h`, `k`.
/// The pair must be a Euclidean Moore-Penrose pair.
pub fn audit_thm7(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    lambda: Complex64,
    mu: Complex64,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceAudit> {
    validate_scalars(lambda, mu)?;
    require_mp_pair(a, a_dag, &NormSpec::l2(), cfg)?;
    let aad = a * a_dag;
    let ada = a_dag * a;
    let c = a.scale(lambda) + a_dag.scale(mu);
    let s = &aad + &ada;

    let ra = right_ideal(a, cfg)?;
    let rd = right_ideal(a_dag, cfg)?;
    let la = left_ideal(a, cfg)?;
    let ld = left_ideal(a_dag, cfg)?;
    let right_meet = || trivial_intersection("aA ∩ a†A = 0", &ra, &rd, cfg);
    let left_meet = || trivial_intersection("Aa ∩ Aa† = 0", &la, &ld, cfg);
    let c_inv = || invertible("λa+μa† invertible", &c, cfg);
    let s_inv = || invertible("aa†+a†a invertible", &s, cfg);

    let i = invertible("(i) aa†-a†a invertible", &(&aad - &ada), cfg);

    let direct_sum = |u: &Subspace, v: &Subspace, label: &str| -> Result<Statement> {
        let sum = full_space("sum is A", &subspace_sum(u, v, cfg)?);
        Ok(trivial_intersection("meet is 0", u, v, cfg).and(sum, label))
    };
    let ii = direct_sum(&ra, &rd, "A = aA ⊕ a†A")?
        .and(direct_sum(&la, &ld, "A = Aa ⊕ Aa†")?, "(ii) A = aA ⊕ a†A = Aa ⊕ Aa†");

    let iii = c_inv().and(right_meet(), "(iii) λa+μa† invertible, aA ∩ a†A = 0");

    let (h, h_res) = lifted_h(a, a_dag, cfg);
    let iv = c_inv().and(
        idempotent_fit("idempotent h: ha = a, ha† = 0", &h, h_res, cfg),
        "(iv) λa+μa† invertible, idempotent h with ha = a, ha† = 0",
    );

    let left_onto = full_space("L_c onto", &lift(&c, Side::Left)?.range(cfg));
    let right_onto = full_space("R_c onto", &lift(&c, Side::Right)?.range(cfg));
    let v = left_onto
        .and(right_onto, "L_c, R_c right invertible")
        .and(right_meet(), "(v) L_c, R_c right invertible, aA ∩ a†A = 0");

    let vi = s_inv().and(right_meet(), "(vi) aa†+a†a invertible, aA ∩ a†A = 0");

    let (k, k_res) = lifted_k(a, a_dag, cfg);
    let vii = c_inv().and(
        idempotent_fit("idempotent k: ak = a, a†k = 0", &k, k_res, cfg),
        "(vii) λa+μa† invertible, idempotent k with ak = a, a†k = 0",
    );

    let viii = s_inv().and(left_meet(), "(viii) aa†+a†a invertible, Aa ∩ Aa† = 0");
    let ix = c_inv().and(left_meet(), "(ix) λa+μa† invertible, Aa ∩ Aa† = 0");

    Ok(EquivalenceAudit::new(
        vec![i, ii, iii, iv, v, vi, vii, viii, ix],
        vec!["in finite dimensions a right invertible lift is invertible, so (v) and (iii) share their first half"
            .into()],
    ))
}

/// All twelve statements characterizing hermitian co-EP elements. `norm`
/// decides whether `h` and `k` are hermitian and certifies the pair.
pub fn audit_thm5(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    norm: &NormSpec,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceAudit> {
    require_mp_pair(a, a_dag, norm, cfg)?;
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let aad = a * a_dag;
    let ada = a_dag * a;
    let d = &aad - &ada;
    let co_ep = || invertible("co-EP", &d, cfg);
    let idempotents = canonical_idempotents(a, a_dag, cfg)?;

    let on_idempotents =
        |label: &str, f: &dyn Fn(&ComplexMatrix, &ComplexMatrix) -> Result<Statement>| -> Result<Statement> {
            let inner = match &idempotents {
                Some((h, k)) => f(h, k)?,
                None => Statement::new("idempotents undefined", false, f64::NAN),
            };
            Ok(co_ep().and(inner, label))
        };
    let hermitian = |x: &ComplexMatrix, label: &str| -> Result<Statement> {
        let v = is_hermitian(x, norm, cfg)?;
        Ok(Statement::new(label, v.is_hermitian, v.adjoint_residual.unwrap_or(v.defect)))
    };

    let i = on_idempotents("(i) co-EP, h hermitian", &|h, _| hermitian(h, "h hermitian"))?;
    let ii = on_idempotents("(ii) co-EP, h = aa†", &|h, _| Ok(equal_matrices("h = aa†", h, &aad, cfg)))?;
    let iii = {
        let gap = operator_norm_unchecked(&(&ada + &aad - &id), &NormSpec::l2());
        Statement::new("(iii) a†a + aa† = 1", gap <= cfg.residual, gap)
    };
    let iv = equal_spaces("(iv) aA = a⁻¹(0)", &right_ideal(a, cfg)?, &left_annihilator_space(a, cfg)?, cfg)?;
    let v = equal_spaces("(v) Aa = a₋₁(0)", &left_ideal(a, cfg)?, &right_annihilator_space(a, cfg)?, cfg)?;
    let vi = on_idempotents("(vi) co-EP, k = aa†", &|_, k| Ok(equal_matrices("k = aa†", k, &aad, cfg)))?;
    let vii = on_idempotents("(vii) co-EP, k hermitian", &|_, k| hermitian(k, "k hermitian"))?;
    let viii = on_idempotents("(viii) co-EP, k = h", &|h, k| Ok(equal_matrices("k = h", k, h, cfg)))?;
    let ix = {
        let l2 = NormSpec::l2();
        let na = operator_norm_unchecked(a, &l2);
        let sq = relative(operator_norm_unchecked(&(a * a), &l2), na * na);
        co_ep().and(Statement::new("a² = 0", sq <= cfg.residual, sq), "(ix) co-EP, a² = 0")
    };
    let x = equal_spaces("(x) a†A = (a†)⁻¹(0)", &right_ideal(a_dag, cfg)?, &left_annihilator_space(a_dag, cfg)?, cfg)?;
    let xi =
        equal_spaces("(xi) Aa† = (a†)₋₁(0)", &left_ideal(a_dag, cfg)?, &right_annihilator_space(a_dag, cfg)?, cfg)?;
    let xii = {
        let bi_ep = equal_matrices("aa† a†a = a†a aa†", &(&aad * &ada), &(&ada * &aad), cfg);
        co_ep().and(bi_ep, "(xii) co-EP, bi-EP")
    };
    Ok(EquivalenceAudit::new(vec![i, ii, iii, iv, v, vi, vii, viii, ix, x, xi, xii], Vec::new()))
}

/// Base-space idempotent `p` with `p t = t`, `p t† = 0`:
/// least squares `p [t, t†] = [t, 0]`.
fn base_p(t: &ComplexMatrix, t_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> (ComplexMatrix, f64) {
    let n = t.rows();
    let m = t.hstack(t_dag);
    let rhs = t.hstack(&ComplexMatrix::zeros(n, n));
    // p m = rhs  <=>  m^* p^* = rhs^*
    let p = min_norm_solve(&m.adjoint(), &rhs.adjoint(), cfg).adjoint();
    let residual = relative((&p * &m - &rhs).frobenius_norm(), rhs.frobenius_norm());
    (p, residual)
}

/// Base-space idempotent `q` with `t q = t`, `t† q = 0`:
/// least squares `[t; t†] q = [t; 0]`.
fn base_q(t: &ComplexMatrix, t_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> (ComplexMatrix, f64) {
    let n = t.rows();
    let m = t.vstack(t_dag);
    let rhs = t.vstack(&ComplexMatrix::zeros(n, n));
    let q = min_norm_solve(&m, &rhs, cfg);
    let residual = relative((&m * &q - &rhs).frobenius_norm(), rhs.frobenius_norm());
    (q, residual)
}

/// The seven operator statements characterizing co-EP `t`, evaluated on
/// column spaces of the base space.
pub fn audit_cor8(
    t: &ComplexMatrix,
    t_dag: &ComplexMatrix,
    lambda: Complex64,
    mu: Complex64,
    cfg: &ToleranceConfig,
) -> Result<EquivalenceAudit> {
    validate_scalars(lambda, mu)?;
    require_mp_pair(t, t_dag, &NormSpec::l2(), cfg)?;
    let id = ComplexMatrix::identity(t.rows());
    let ttd = t * t_dag;
    let tdt = t_dag * t;
    let c = t.scale(lambda) + t_dag.scale(mu);
    let c_inv = || invertible("λT+μT† invertible", &c, cfg);
    let s_inv = || invertible("TT†+T†T invertible", &(&ttd + &tdt), cfg);
    let ranges = || trivial_intersection("R(T) ∩ R(T†) = 0", &range_basis(t, cfg), &range_basis(t_dag, cfg), cfg);
    let complements = || {
        trivial_intersection(
            "R(I-TT†) ∩ R(I-T†T) = 0",
            &range_basis(&(&id - &ttd), cfg),
            &range_basis(&(&id - &tdt), cfg),
            cfg,
        )
    };

    let i = invertible("(i) T co-EP", &(&ttd - &tdt), cfg);
    let ii = c_inv().and(ranges(), "(ii) λT+μT† invertible, R(T) ∩ R(T†) = 0");
    let (p, p_res) = base_p(t, t_dag, cfg);
    let iii = c_inv().and(
        idempotent_fit("idempotent P: R(T) ⊆ R(P), R(T†) ⊆ N(P)", &p, p_res, cfg),
        "(iii) λT+μT† invertible, idempotent P with R(T) ⊆ R(P), R(T†) ⊆ N(P)",
    );
    let iv = s_inv().and(ranges(), "(iv) TT†+T†T invertible, R(T) ∩ R(T†) = 0");
    let (q, q_res) = base_q(t, t_dag, cfg);
    let v = c_inv().and(
        idempotent_fit("idempotent Q: R(I-Q) ⊆ N(T), R(Q) ⊆ N(T†)", &q, q_res, cfg),
        "(v) λT+μT† invertible, idempotent Q with R(I-Q) ⊆ N(T), R(Q) ⊆ N(T†)",
    );
    let vi = s_inv().and(complements(), "(vi) TT†+T†T invertible, R(I-TT†) ∩ R(I-T†T) = 0");
    let vii = c_inv().and(complements(), "(vii) λT+μT† invertible, R(I-TT†) ∩ R(I-T†T) = 0");
    Ok(EquivalenceAudit::new(vec![i, ii, iii, iv, v, vi, vii], Vec::new()))
}

/// Co-EP against trivial range and kernel intersections, and against the
/// range and kernel sums filling the space.
pub fn audit_cor9(t: &ComplexMatrix, t_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceAudit> {
    require_mp_pair(t, t_dag, &NormSpec::l2(), cfg)?;
    let (rt, rd) = (range_basis(t, cfg), range_basis(t_dag, cfg));
    let (nt, nd) = (null_basis(t, cfg), null_basis(t_dag, cfg));
    let i = invertible("(i) T co-EP", &(t * t_dag - t_dag * t), cfg);
    let ii = trivial_intersection("R(T) ∩ R(T†) = 0", &rt, &rd, cfg).and(
        zero_space("N(T) ∩ N(T†) = 0", &subspace_intersect(&nt, &nd, cfg)?),
        "(ii) R(T) ∩ R(T†) = 0, N(T) ∩ N(T†) = 0",
    );
    let iii = full_space("X = R(T) + R(T†)", &subspace_sum(&rt, &rd, cfg)?)
        .and(full_space("X = N(T) + N(T†)", &subspace_sum(&nt, &nd, cfg)?), "(iii) X = R(T) + R(T†) = N(T) + N(T†)");
    Ok(EquivalenceAudit::new(vec![i, ii, iii], Vec::new()))
}

/// Dimension count of a co-EP operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rem10Check {
    /// `t` is co-EP, so the count is asserted.
    pub applicable: bool,
    pub holds: bool,
    pub n: usize,
    pub rank: usize,
    pub nullity: usize,
}

/// For co-EP `t`: `n = 2 rank(t) = 2 nullity(t)`. Vacuously true otherwise.
pub fn check_rem10(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Rem10Check> {
    let n = t.require_square("check_rem10 argument")?;
    let (t_dag, _) = mp_inverse_euclidean(t, cfg)?;
    let applicable = is_invertible(&(t * &t_dag - &t_dag * t), cfg).invertible;
    let r = rank(t, cfg);
    let nullity = null_basis(t, cfg).dim();
    let holds = !applicable || (n == 2 * r && n == 2 * nullity);
    Ok(Rem10Check { applicable, holds, n, rank: r, nullity })
}

/// `aa† - a†a` against the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rem34Check {
    /// `||aa† - a†a - 1||_2 > residual`.
    pub holds: bool,
    pub distance: f64,
}

pub fn check_rem34(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Rem34Check> {
    require_mp_pair(a, a_dag, &NormSpec::l2(), cfg)?;
    let diff = a * a_dag - a_dag * a - ComplexMatrix::identity(a.rows());
    let distance = operator_norm_unchecked(&diff, &NormSpec::l2());
    Ok(Rem34Check { holds: distance > cfg.residual, distance })
}
