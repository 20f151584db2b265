//! Model shape operators of type A and the identity chain they satisfy.
//!
//! A type-A point is modeled by the normal whose Reeb vector aligns with
//! the first member of the triple. The shape operator is assembled by
//! spectral projection from the closed-form principal curvatures at tube
//! radius `r`, and the verifiers below check the pointwise identities that
//! the certification procedure consumes: the principal coupling identity,
//! the conjugate commutation identity, and the connection-form identity
//! with its fitted 1-forms q_1, q_2, q_3.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ambient::build_ambient;
use crate::error::Error;
use crate::hyper::{induce, theta_eigenspaces, HypersurfacePoint, ShapeOperator};
use crate::numeric::{subspace_image_contained, LinOp, Subspace, Tolerance, Vector};

/// Exclusion margin applied at both ends of the admissible radius interval,
/// keeping clear of the cotangent and tangent poles.
pub const RADIUS_MARGIN: f64 = 1e-6;

/// Supremum of the admissible tube radius interval.
pub fn radius_sup() -> f64 {
    std::f64::consts::PI / 8.0_f64.sqrt()
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// The four principal curvatures of a type-A point at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumA {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl SpectrumA {
    /// Number of distinct principal curvatures; three exactly when alpha
    /// merges with mu at the midpoint radius, four otherwise.
    pub fn distinct_count(&self) -> usize {
        let mut values = [self.alpha, self.beta, self.lambda, self.mu];
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite curvatures"));
        let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let gap = 1e-9 * scale;
        let mut count = 1;
        for w in values.windows(2) {
            if w[1] - w[0] > gap {
                count += 1;
            }
        }
        count
    }
}

/// Closed-form principal curvatures at tube radius `r`.
pub fn spectrum_type_a(r: f64) -> Result<SpectrumA, Error> {
    if !r.is_finite() || r <= RADIUS_MARGIN || r >= radius_sup() - RADIUS_MARGIN {
        return Err(Error::RadiusOutOfRange { r });
    }
    let s8 = 8.0_f64.sqrt();
    let s2 = 2.0_f64.sqrt();
    Ok(SpectrumA {
        r,
        alpha: s8 * cot(s8 * r),
        beta: s2 * cot(s2 * r),
        lambda: -s2 * (s2 * r).tan(),
        mu: 0.0,
    })
}

/// Principal values of the shape operator on the three triple Reeb vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaTriple(pub [f64; 3]);

/// The three local connection 1-forms, as covectors against the tangent
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QForms {
    pub q: [Vector; 3],
}

impl QForms {
    pub fn zero(dim: usize) -> Self {
        Self { q: [DVector::zeros(dim), DVector::zeros(dim), DVector::zeros(dim)] }
    }

    pub fn norm(&self) -> f64 {
        self.q.iter().map(|q| q.norm_squared()).sum::<f64>().sqrt()
    }
}

/// A hypersurface point together with a model type-A shape operator.
#[derive(Debug, Clone)]
pub struct TypeAModel {
    pub hp: HypersurfacePoint,
    pub shape: ShapeOperator,
    pub spectrum: SpectrumA,
    pub t_alpha: Subspace,
    pub t_beta: Subspace,
    pub t_lambda: Subspace,
    pub t_mu: Subspace,
}

impl TypeAModel {
    pub fn dims(&self) -> [usize; 4] {
        [self.t_alpha.dim(), self.t_beta.dim(), self.t_lambda.dim(), self.t_mu.dim()]
    }

    /// Principal values on (xi_1, xi_2, xi_3): the Reeb direction carries
    /// alpha and the other two carry beta.
    pub fn betas(&self) -> BetaTriple {
        BetaTriple([self.spectrum.alpha, self.spectrum.beta, self.spectrum.beta])
    }
}

/// Builds the model type-A operator at radius `r`.
///
/// The normal is the first realified coordinate vector, which satisfies
/// J_1 N = J N; the Reeb vector then coincides with xi_1 and lies in the
/// span of the triple. The lambda and mu eigenspaces are the -1 and +1
/// eigenspaces of theta_1 restricted to H.
pub fn build_type_a(m: usize, r: f64) -> Result<TypeAModel, Error> {
    let spectrum = spectrum_type_a(r)?;
    let amb = build_ambient(m)?;
    let mut normal = DVector::zeros(amb.dim());
    normal[0] = 1.0;
    let hp = induce(&amb, &normal)?;
    let tol = Tolerance::default();
    let n = hp.tangent_dim();

    if (hp.xi() - hp.xi_a(0)).norm() > 1e-10 {
        return Err(Error::DegenerateEigenspace {
            detail: "model normal does not align the Reeb vector with xi_1".into(),
        });
    }

    let t_alpha = Subspace::span(n, std::slice::from_ref(hp.xi()), 1e-8);
    let t_beta = Subspace::span(n, &[hp.xi_a(1).clone(), hp.xi_a(2).clone()], 1e-8);
    let (h_plus, h_minus) = theta_eigenspaces(&hp, 0, &tol)?;
    let t_lambda = h_minus;
    let t_mu = h_plus;

    let want = [1, 2, 2 * m - 2, 2 * m - 2];
    let got = [t_alpha.dim(), t_beta.dim(), t_lambda.dim(), t_mu.dim()];
    if got != want {
        return Err(Error::DegenerateEigenspace {
            detail: format!("eigenspace dimensions {got:?}, expected {want:?}"),
        });
    }

    let a_mat = t_alpha.projector() * spectrum.alpha
        + t_beta.projector() * spectrum.beta
        + t_lambda.projector() * spectrum.lambda;
    let shape = ShapeOperator::new(a_mat)?;

    let model = TypeAModel { hp, shape, spectrum, t_alpha, t_beta, t_lambda, t_mu };
    model.verify_build()?;
    Ok(model)
}

impl TypeAModel {
    fn verify_build(&self) -> Result<(), Error> {
        let a = self.shape.matrix();
        let s = &self.spectrum;
        let checks = [
            ("alpha on xi", (a * self.hp.xi() - self.hp.xi() * s.alpha).norm()),
            ("beta on xi_2", (a * self.hp.xi_a(1) - self.hp.xi_a(1) * s.beta).norm()),
            ("beta on xi_3", (a * self.hp.xi_a(2) - self.hp.xi_a(2) * s.beta).norm()),
        ];
        for (name, residual) in checks {
            if residual > 1e-10 * s.alpha.abs().max(s.beta.abs()).max(1.0) {
                return Err(Error::DegenerateEigenspace {
                    detail: format!("{name} residual {residual:.3e}"),
                });
            }
        }
        let mut cols: Vec<Vector> = Vec::new();
        for space in [&self.t_alpha, &self.t_beta, &self.t_lambda, &self.t_mu] {
            cols.extend((0..space.dim()).map(|i| space.col(i)));
        }
        let joined = Subspace::from_orthonormal_columns(self.hp.tangent_dim(), &cols);
        let gram = joined.gram_residual();
        if gram > 1e-10 {
            return Err(Error::DegenerateEigenspace {
                detail: format!("eigenspaces not mutually orthogonal: {gram:.3e}"),
            });
        }
        Ok(())
    }
}

fn check_d_invariance(hp: &HypersurfacePoint, a_mat: &LinOp, tol: &Tolerance) -> Result<(), Error> {
    let (ok, leak) = subspace_image_contained(a_mat, hp.d(), hp.d(), tol);
    if !ok {
        return Err(Error::HypothesisViolated {
            detail: format!("shape operator leaks out of D by {leak:.3e}"),
        });
    }
    let gap = hp.dperp().rejection_norm(hp.xi());
    if gap > tol.identity_tol {
        return Err(Error::HypothesisViolated {
            detail: format!("Reeb vector misses the triple span by {gap:.3e}"),
        });
    }
    Ok(())
}

fn check_principal_triple(
    hp: &HypersurfacePoint,
    a_mat: &LinOp,
    betas: &BetaTriple,
    tol: &Tolerance,
) -> Result<(), Error> {
    for a in 0..3 {
        let residual = (a_mat * hp.xi_a(a) - hp.xi_a(a) * betas.0[a]).norm();
        if residual > tol.identity_tol {
            return Err(Error::HypothesisViolated {
                detail: format!("xi_{} is not principal: residual {residual:.3e}", a + 1),
            });
        }
    }
    Ok(())
}

/// The operator whose vanishing on D is the principal coupling identity:
/// 2 eta(xi_a) phi + 2 phi_a + beta_a (phi_a A + A phi_a) - 2 A phi_a A.
fn coupling_operator(hp: &HypersurfacePoint, a_mat: &LinOp, beta_a: f64, a: usize) -> LinOp {
    let pa = hp.phi_a(a);
    hp.phi() * (2.0 * hp.eta_xi_a(a))
        + pa * 2.0
        + (pa * a_mat + a_mat * pa) * beta_a
        - a_mat * pa * a_mat * 2.0
}

/// Residual of the principal coupling identity on D, for each triple index.
pub fn verify_principal_coupling(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    betas: &BetaTriple,
    tol: &Tolerance,
) -> Result<[f64; 3], Error> {
    let a_mat = shape.matrix();
    check_d_invariance(hp, a_mat, tol)?;
    check_principal_triple(hp, a_mat, betas, tol)?;
    let mut out = [0.0f64; 3];
    for a in 0..3 {
        let op = coupling_operator(hp, a_mat, betas.0[a], a);
        let mut worst = 0.0f64;
        for i in 0..hp.d().dim() {
            worst = worst.max((&op * hp.d().col(i)).norm());
        }
        out[a] = worst;
    }
    Ok(out)
}

/// Residual of the conjugate commutation identity on D:
/// phi_a A phi_a A = A phi_a A phi_a, for each triple index.
pub fn verify_shape_commutation(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    tol: &Tolerance,
) -> Result<[f64; 3], Error> {
    let a_mat = shape.matrix();
    check_d_invariance(hp, a_mat, tol)?;
    let proj_d = hp.d().projector();
    let mut out = [0.0f64; 3];
    for a in 0..3 {
        let pa = hp.phi_a(a);
        let fwd = pa * a_mat * pa * a_mat;
        let bwd = a_mat * pa * a_mat * pa;
        out[a] = ((fwd - bwd) * &proj_d).norm();
    }
    Ok(out)
}

/// Bilinear form F with F[i][j] = g(S e_i, e_j).
fn operator_form(op: &LinOp) -> DMatrix<f64> {
    op.transpose()
}

/// Bilinear form F with F[i][j] = u(e_i) v(e_j).
fn tensor_form(u: &Vector, v: &Vector) -> DMatrix<f64> {
    u * v.transpose()
}

/// The q-free side of the connection identity, as a bilinear form.
fn eta_free_form(hp: &HypersurfacePoint, a: usize) -> DMatrix<f64> {
    let b = (a + 1) % 3;
    let c = (a + 2) % 3;
    let phit = hp.phi().transpose();
    let w_a = &phit * hp.xi_a(a);
    let w_b = &phit * hp.xi_a(b);
    let w_c = &phit * hp.xi_a(c);
    let xi = hp.xi();
    let (xa, xb, xc) = (hp.xi_a(a), hp.xi_a(b), hp.xi_a(c));

    let mut f = tensor_form(xi, &w_a) * 2.0 - tensor_form(&w_a, xi) * 2.0;
    f += tensor_form(xb, xc) * 2.0 - tensor_form(xc, xb) * 2.0;
    f += tensor_form(&w_b, &w_c) * 2.0 - tensor_form(&w_c, &w_b) * 2.0;
    let u = &w_a * (2.0 * hp.eta_xi_a(a)) - &w_b * hp.eta_xi_a(b) - &w_c * hp.eta_xi_a(c);
    f += tensor_form(&u, xa) * 2.0 - tensor_form(xa, &u) * 2.0;
    f
}

/// The q-dependent rows of the connection identity, as a bilinear form.
/// Linear in the supplied covectors.
fn q_form(hp: &HypersurfacePoint, betas: &BetaTriple, q: &QForms, a: usize) -> DMatrix<f64> {
    let b = (a + 1) % 3;
    let c = (a + 2) % 3;
    let c1 = betas.0[a] - betas.0[b];
    let c2 = betas.0[a] - betas.0[c];
    let (xa, xb, xc) = (hp.xi_a(a), hp.xi_a(b), hp.xi_a(c));
    let q_next = &q.q[b];
    let q_after = &q.q[c];

    let mut f = (tensor_form(xa, xb) - tensor_form(xb, xa)) * (c1 * q_after.dot(xa));
    f += (tensor_form(xc, xa) - tensor_form(xa, xc)) * (c2 * q_next.dot(xa));
    f -= (tensor_form(q_after, xb) - tensor_form(xb, q_after)) * c1;
    f += (tensor_form(q_next, xc) - tensor_form(xc, q_next)) * c2;
    f
}

/// Residual of the connection identity for one triple index, as the largest
/// absolute mismatch over all tangent basis pairs.
pub fn connection_identity_residual(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    betas: &BetaTriple,
    q: &QForms,
    a: usize,
) -> Result<f64, Error> {
    let tol = Tolerance::default();
    check_principal_triple(hp, shape.matrix(), betas, &tol)?;
    let lhs = operator_form(&coupling_operator(hp, shape.matrix(), betas.0[a], a));
    let residual = lhs - eta_free_form(hp, a) - q_form(hp, betas, q, a);
    Ok(residual.amax())
}

/// Least-squares fit of the connection forms over all three identities at
/// once. Directions left unconstrained by vanishing beta differences come
/// back as zero through the minimum-norm solution.
pub fn fit_connection_forms(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    betas: &BetaTriple,
) -> Result<(QForms, f64), Error> {
    let tol = Tolerance::default();
    check_principal_triple(hp, shape.matrix(), betas, &tol)?;
    let n = hp.tangent_dim();
    let block = n * n;
    let mut design = DMatrix::<f64>::zeros(3 * block, 3 * n);
    let mut rhs = DVector::<f64>::zeros(3 * block);

    for a in 0..3 {
        let target =
            operator_form(&coupling_operator(hp, shape.matrix(), betas.0[a], a)) - eta_free_form(hp, a);
        rhs.rows_mut(a * block, block).copy_from_slice(target.as_slice());
    }
    for c in 0..3 {
        for k in 0..n {
            let mut probe = QForms::zero(n);
            probe.q[c][k] = 1.0;
            let col = c * n + k;
            for a in 0..3 {
                let f = q_form(hp, betas, &probe, a);
                design
                    .view_mut((a * block, col), (block, 1))
                    .copy_from_slice(f.as_slice());
            }
        }
    }

    let svd = design.svd(true, true);
    let s_max = svd.singular_values.iter().fold(0.0f64, |acc, s| acc.max(*s));
    let solution = if s_max == 0.0 {
        DVector::zeros(3 * n)
    } else {
        svd.solve(&rhs, 1e-12 * s_max).map_err(|_| Error::EigenFailed)?
    };

    let mut q = QForms::zero(n);
    for c in 0..3 {
        q.q[c] = solution.rows(c * n, n).into_owned();
    }
    let mut achieved = 0.0f64;
    for a in 0..3 {
        achieved = achieved.max(connection_identity_residual(hp, shape, betas, &q, a)?);
    }
    Ok((q, achieved))
}
