//! Left and right multiplication operators on the algebra of `n x n` matrices.
//!
//! The algebra is identified with complex `n^2`-space by column-major
//! vectorization, so `vec(ax) = (1 ⊗ a) vec(x)` and `vec(xa) = (aᵀ ⊗ 1) vec(x)`.
//! Ideals `aA`, `Aa` and annihilators `a⁻¹(0) = {x : ax = 0}`,
//! `a₋₁(0) = {x : xa = 0}` then become ranges and kernels of `n^2 x n^2`
//! matrices, and the ideal statements about Moore-Penrose pairs become
//! subspace computations.

use serde::Serialize;

use crate::error::{CoepError, Result};
use crate::linalg::{null_basis, range_basis, subspace_sum, ComplexMatrix, NormSpec, Subspace, ToleranceConfig};
use crate::pseudoinverse::{generalized_inverse, require_mp_pair};
use crate::statement::{equal_spaces, full_space, included, invertible, trivial_intersection, zero_space, Statement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `x -> ax`
    Left,
    /// `x -> xa`
    Right,
}

/// Multiplication by a fixed element, as a matrix on vectorized elements.
#[derive(Clone, Debug)]
pub struct LiftedOperator {
    side: Side,
    source: ComplexMatrix,
    action: ComplexMatrix,
}

pub fn lift(a: &ComplexMatrix, side: Side) -> Result<LiftedOperator> {
    let n = a.require_square("lift argument")?;
    let id = ComplexMatrix::identity(n);
    let action = match side {
        Side::Left => id.kronecker(a),
        Side::Right => a.transpose().kronecker(&id),
    };
    Ok(LiftedOperator { side, source: a.clone(), action })
}

impl LiftedOperator {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn source(&self) -> &ComplexMatrix {
        &self.source
    }

    /// The `n^2 x n^2` action matrix.
    pub fn action(&self) -> &ComplexMatrix {
        &self.action
    }

    pub fn dim(&self) -> usize {
        self.source.rows()
    }

    /// `ax` or `xa`, computed through the action matrix.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if x.rows() != n || x.cols() != n {
            return Err(CoepError::Shape(format!(
                "lifted operator acts on {n}x{n} matrices, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let v = self.action.as_dmatrix() * x.vectorize();
        Ok(ComplexMatrix::unvectorize(n, &v))
    }

    pub fn range(&self, cfg: &ToleranceConfig) -> Subspace {
        range_basis(&self.action, cfg)
    }

    pub fn kernel(&self, cfg: &ToleranceConfig) -> Subspace {
        null_basis(&self.action, cfg)
    }
}

/// `aA`, the range of `L_a`.
pub fn right_ideal(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Subspace> {
    Ok(lift(a, Side::Left)?.range(cfg))
}

/// `Aa`, the range of `R_a`.
pub fn left_ideal(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Subspace> {
    Ok(lift(a, Side::Right)?.range(cfg))
}

/// `a⁻¹(0)`, the kernel of `L_a`.
pub fn left_annihilator_space(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Subspace> {
    Ok(lift(a, Side::Left)?.kernel(cfg))
}

/// `a₋₁(0)`, the kernel of `R_a`.
pub fn right_annihilator_space(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Subspace> {
    Ok(lift(a, Side::Right)?.kernel(cfg))
}

/// Truth values of both sides of an equivalence, with the evidence for each
/// ingredient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub lhs: bool,
    pub rhs: bool,
    pub agrees: bool,
    pub statements: Vec<Statement>,
}

impl EquivalenceCheck {
    fn new(lhs: bool, rhs: bool, statements: Vec<Statement>) -> Self {
        Self { lhs, rhs, agrees: lhs == rhs, statements }
    }
}

/// Statements about `L_{λa+μa†}` on the complementary ideals `(1-aa†)A`
/// and `(1-a†a)A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop8Report {
    /// Unconditional statements (i), (ii) and the three members of (iii).
    pub statements: Vec<Statement>,
    /// Membership hypotheses of (iv) and (v); margin = relative distance.
    pub hypotheses: Vec<Statement>,
    /// Conclusions of (iv) and (v), evaluated only when the hypothesis holds.
    pub conditional: Vec<Statement>,
    /// (iii.a), (iii.b), (iii.c) are all true or all false.
    pub triple_agrees: bool,
    pub passed: bool,
}

pub(crate) fn validate_scalars(lambda: num_complex::Complex64, mu: num_complex::Complex64) -> Result<()> {
    if lambda.norm() == 0.0 || mu.norm() == 0.0 || !lambda.is_finite() || !mu.is_finite() {
        return Err(CoepError::InvalidInput("λ and μ must be finite and nonzero".into()));
    }
    Ok(())
}

/// Audits the statements on `L_{λa+μa†}` restricted to `(1-aa†)A` and
/// `(1-a†a)A`. The pair must be a Euclidean Moore-Penrose pair.
pub fn audit_prop8(
    a: &ComplexMatrix,
    a_dag: &ComplexMatrix,
    lambda: num_complex::Complex64,
    mu: num_complex::Complex64,
    cfg: &ToleranceConfig,
) -> Result<Prop8Report> {
    validate_scalars(lambda, mu)?;
    require_mp_pair(a, a_dag, &NormSpec::l2(), cfg)?;
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let aad = a * a_dag;
    let ada = a_dag * a;
    let p = &id - &aad;
    let q = &id - &ada;
    let c = a.scale(lambda) + a_dag.scale(mu);

    let p_space = right_ideal(&p, cfg)?;
    let q_space = right_ideal(&q, cfg)?;
    let c_on_p = right_ideal(&(&c * &p), cfg)?;
    let a_on_p = right_ideal(&(a * &p), cfg)?;
    let c_on_q = right_ideal(&(&c * &q), cfg)?;
    let ad_on_q = right_ideal(&(a_dag * &q), cfg)?;
    let aad_space = right_ideal(&aad, cfg)?;
    let ada_space = right_ideal(&ada, cfg)?;
    let kernel_c = left_annihilator_space(&c, cfg)?;

    let s_i = equal_spaces("(i) L_c((1-aa†)A) = L_a((1-aa†)A)", &c_on_p, &a_on_p, cfg)?
        .and(included("", &a_on_p, &aad_space, cfg)?, "(i) L_c((1-aa†)A) = L_a((1-aa†)A) ⊆ aa†A");
    let s_ii = equal_spaces("", &c_on_q, &ad_on_q, cfg)?
        .and(included("", &ad_on_q, &ada_space, cfg)?, "(ii) L_c((1-a†a)A) = L_a†((1-a†a)A) ⊆ a†aA");
    let iii_a = trivial_intersection("(iii.a) (1-aa†)A ∩ (1-a†a)A = 0", &p_space, &q_space, cfg);
    let iii_b = trivial_intersection("(iii.b) N(L_c) ∩ (1-aa†)A = 0", &kernel_c, &p_space, cfg);
    let iii_c = trivial_intersection("(iii.c) N(L_c) ∩ (1-a†a)A = 0", &kernel_c, &q_space, cfg);
    let triple_agrees = iii_a.holds == iii_b.holds && iii_b.holds == iii_c.holds;

    let pq_sum = subspace_sum(&p_space, &q_space, cfg)?;
    let d_ad = pq_sum.distance_ratio(&a_dag.vectorize());
    let d_a = pq_sum.distance_ratio(&a.vectorize());
    let hyp_iv = Statement::new("(iv) hypothesis a† ∈ (1-aa†)A + (1-a†a)A", d_ad <= cfg.angle, d_ad);
    let hyp_v = Statement::new("(v) hypothesis a ∈ (1-aa†)A + (1-a†a)A", d_a <= cfg.angle, d_a);
    let mut conditional = Vec::new();
    if hyp_iv.holds {
        conditional.push(
            equal_spaces("", &c_on_p, &a_on_p, cfg)?
                .and(equal_spaces("", &a_on_p, &aad_space, cfg)?, "(iv) L_c((1-aa†)A) = L_a((1-aa†)A) = aa†A"),
        );
    }
    if hyp_v.holds {
        conditional.push(
            equal_spaces("", &c_on_q, &ad_on_q, cfg)?
                .and(equal_spaces("", &ad_on_q, &ada_space, cfg)?, "(v) L_c((1-a†a)A) = L_a†((1-a†a)A) = a†aA"),
        );
    }
    let statements = vec![s_i, s_ii, iii_a, iii_b, iii_c];
    let passed = statements[0].holds && statements[1].holds && triple_agrees && conditional.iter().all(|s| s.holds);
    Ok(Prop8Report { statements, hypotheses: vec![hyp_iv, hyp_v], conditional, triple_agrees, passed })
}

/// Injectivity of `L_s`, `s = aa† + a†a`, against
/// `a†aA ∩ aa†(1-a†a)A = 0` and `a⁻¹(0) ∩ (a†)⁻¹(0) = 0`.
pub fn check_pro37(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceCheck> {
    require_mp_pair(a, a_dag, &NormSpec::l2(), cfg)?;
    let id = ComplexMatrix::identity(a.rows());
    let aad = a * a_dag;
    let ada = a_dag * a;
    let s = &aad + &ada;
    let injective = zero_space("N(L_s) = 0", &left_annihilator_space(&s, cfg)?);
    let ideals = trivial_intersection(
        "a†aA ∩ aa†(1-a†a)A = 0",
        &right_ideal(&ada, cfg)?,
        &right_ideal(&(&aad * (&id - &ada)), cfg)?,
        cfg,
    );
    let annihilators = trivial_intersection(
        "a⁻¹(0) ∩ (a†)⁻¹(0) = 0",
        &left_annihilator_space(a, cfg)?,
        &left_annihilator_space(a_dag, cfg)?,
        cfg,
    );
    let rhs = ideals.holds && annihilators.holds;
    Ok(EquivalenceCheck::new(injective.holds, rhs, vec![injective, ideals, annihilators]))
}

/// `s` is regular: the constructed generalized inverse passes `sbs = s`.
/// Margin = relative residual.
fn regular(label: &str, s: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Statement> {
    let b = generalized_inverse(s, cfg)?;
    let scale = s.max_abs().max(1.0);
    let r = (s * &b * s - s).max_abs() / scale;
    Ok(Statement::new(label, r <= cfg.residual, r))
}

/// Surjectivity of `L_s`, `s = aa† + a†a`, against `s` regular and
/// `s₋₁(0) = 0`.
pub fn check_pro38(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceCheck> {
    require_mp_pair(a, a_dag, &NormSpec::l2(), cfg)?;
    let s = a * a_dag + a_dag * a;
    let surjective = full_space("R(L_s) = A", &right_ideal(&s, cfg)?);
    let reg = regular("s regular", &s, cfg)?;
    let annihilator = zero_space("s₋₁(0) = 0", &right_annihilator_space(&s, cfg)?);
    let rhs = reg.holds && annihilator.holds;
    Ok(EquivalenceCheck::new(surjective.holds, rhs, vec![surjective, reg, annihilator]))
}

/// Invertibility of `s = aa† + a†a` against the conjunction of: `s` regular,
/// `s₋₁(0) = 0`, `a†aA ∩ aa†(1-a†a)A = 0`, `a⁻¹(0) ∩ (a†)⁻¹(0) = 0`.
pub fn check_thm39(a: &ComplexMatrix, a_dag: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<EquivalenceCheck> {
    let p37 = check_pro37(a, a_dag, cfg)?;
    let p38 = check_pro38(a, a_dag, cfg)?;
    let s = a * a_dag + a_dag * a;
    let inv = invertible("aa† + a†a invertible", &s, cfg);
    let four = vec![
        p38.statements[1].clone(),
        p38.statements[2].clone(),
        p37.statements[1].clone(),
        p37.statements[2].clone(),
    ];
    let rhs = four.iter().all(|s| s.holds);
    let mut statements = vec![inv.clone()];
    statements.extend(four);
    Ok(EquivalenceCheck::new(inv.holds, rhs, statements))
}
