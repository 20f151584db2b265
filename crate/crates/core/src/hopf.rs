//! Numerical decision procedure for the Hopf property.
//!
//! Given a hypersurface point whose shape operator preserves D with the
//! Reeb vector inside the triple span, the certifier executes the proof
//! chain step by step: principalize the triple, check the coupling and
//! commutation identities, jointly diagonalize the shape operator with its
//! phi_1-conjugate on H, place every joint eigenvector in a reflection
//! eigenspace of theta_1, and push the argument through indices 2 and 3 to
//! force the transverse Reeb components to vanish. Success means the Reeb
//! vector is principal with value beta_1; every step logs its residual and
//! the first failure aborts the procedure, so a certificate never carries
//! residuals from steps that were not reached.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3};
use serde::Serialize;

use crate::ambient::TripleRotation;
use crate::error::Error;
use crate::hyper::{induce, HypersurfacePoint, ShapeOperator};
use crate::numeric::{
    compress_symmetric, simultaneous_diag, subspace_image_contained, sym_eig, LinOp, Subspace,
    Tolerance, Vector,
};
use crate::type_a::{verify_principal_coupling, verify_shape_commutation, BetaTriple};

/// Leak measurements for the two invariance hypotheses and the Reeb gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HypothesisReport {
    pub ad_in_d_leak: f64,
    pub adperp_in_dperp_leak: f64,
    pub xi_in_dperp_gap: f64,
    pub pass: bool,
}

/// Measures how badly the inputs violate the certification hypotheses.
///
/// Since the shape operator is symmetric, invariance of D forces invariance
/// of its complement; the two leaks can only disagree by a dimension
/// factor, which is asserted as an internal consistency check.
pub fn check_hypotheses(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    tol: &Tolerance,
) -> HypothesisReport {
    let a_mat = shape.matrix();
    let (_, ad_in_d_leak) = subspace_image_contained(a_mat, hp.d(), hp.d(), tol);
    let (_, adperp_in_dperp_leak) = subspace_image_contained(a_mat, hp.dperp(), hp.dperp(), tol);
    let xi_in_dperp_gap = hp.dperp().rejection_norm(hp.xi());
    let pass = ad_in_d_leak <= tol.identity_tol
        && adperp_in_dperp_leak <= tol.identity_tol
        && xi_in_dperp_gap <= tol.identity_tol;
    debug_assert!(
        ad_in_d_leak > tol.identity_tol
            || adperp_in_dperp_leak <= (hp.d().dim() as f64).sqrt() * ad_in_d_leak + 1e-12,
        "complement leak inconsistent with a symmetric operator"
    );
    HypothesisReport { ad_in_d_leak, adperp_in_dperp_leak, xi_in_dperp_gap, pass }
}

/// Rotates the triple so each of its Reeb vectors is principal.
///
/// The shape operator restricted to the triple span is diagonalized in the
/// frame (xi_1, xi_2, xi_3); the eigenvector matrix, with determinant
/// corrected to +1, acts on the triple itself. The tangent basis depends
/// only on the normal, so the shape operator matrix stays valid for the
/// re-induced point.
pub fn principalize_triple(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    tol: &Tolerance,
) -> Result<(HypersurfacePoint, BetaTriple, TripleRotation), Error> {
    let hyp = check_hypotheses(hp, shape, tol);
    if !hyp.pass {
        return Err(Error::HypothesisViolated {
            detail: format!(
                "D leak {:.3e}, complement leak {:.3e}, Reeb gap {:.3e}",
                hyp.ad_in_d_leak, hyp.adperp_in_dperp_leak, hyp.xi_in_dperp_gap
            ),
        });
    }
    let a_mat = shape.matrix();
    let raw = DMatrix::from_fn(3, 3, |i, j| (a_mat * hp.xi_a(j)).dot(hp.xi_a(i)));
    let restricted = (&raw + raw.transpose()) * 0.5;
    let (betas, basis3) = sym_eig(&restricted, tol)?;

    let mut r = Matrix3::from_fn(|i, j| basis3.col(i)[j]);
    if r.determinant() < 0.0 {
        for j in 0..3 {
            r[(2, j)] = -r[(2, j)];
        }
    }
    let rot = TripleRotation::new(r)?;
    let rotated = hp.ambient().rotate_triple(&rot);
    let hp_principal = induce(&rotated, hp.normal())?;
    Ok((hp_principal, BetaTriple([betas[0], betas[1], betas[2]]), rot))
}

/// Cyclic relabeling of the triple; every cyclic permutation is a rotation.
fn cyclic_permutation(shift: usize) -> TripleRotation {
    let mut m = Matrix3::zeros();
    for a in 0..3 {
        m[(a, (a + shift) % 3)] = 1.0;
    }
    TripleRotation::new(m).expect("cyclic permutations lie in SO(3)")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertStatus {
    Certified,
    HypothesisFailed,
    StepFailed,
}

/// One reflection eigenvalue candidate with its distance to {+1, -1}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsilonCheck {
    pub value: f64,
    pub distance: f64,
}

/// Step-by-step record of the certification procedure.
#[derive(Debug, Clone, Serialize)]
pub struct HopfCertificate {
    pub status: CertStatus,
    pub failing_step: Option<String>,
    pub rotation: Option<[[f64; 3]; 3]>,
    pub betas: Option<[f64; 3]>,
    pub chosen_a: Option<usize>,
    pub eigenpairs: Vec<[f64; 2]>,
    pub epsilons: Vec<EpsilonCheck>,
    pub eta_xi: Option<[f64; 3]>,
    pub alpha: Option<f64>,
    pub residual_hopf: Option<f64>,
    pub step_residuals: BTreeMap<String, f64>,
}

impl HopfCertificate {
    fn pending() -> Self {
        Self {
            status: CertStatus::StepFailed,
            failing_step: None,
            rotation: None,
            betas: None,
            chosen_a: None,
            eigenpairs: Vec::new(),
            epsilons: Vec::new(),
            eta_xi: None,
            alpha: None,
            residual_hopf: None,
            step_residuals: BTreeMap::new(),
        }
    }

    fn fail(mut self, status: CertStatus, step: &str, residuals: BTreeMap<String, f64>) -> Self {
        self.status = status;
        self.failing_step = Some(step.to_string());
        self.step_residuals = residuals;
        self
    }

    pub fn certified(&self) -> bool {
        self.status == CertStatus::Certified
    }
}

struct TransverseOutcome {
    phi_leak: f64,
    swap_leak: f64,
    eta_bound: f64,
    eta_abs: f64,
}

/// Re-runs the coupling argument with triple index `b` on the +1 space:
/// phi keeps the space, phi_b swaps it into the -1 space, and the coupling
/// identity then bounds the transverse Reeb component.
fn transverse_reeb(
    hp: &HypersurfacePoint,
    a_mat: &LinOp,
    betas: &BetaTriple,
    h_plus: &Subspace,
    h_minus: &Subspace,
    b: usize,
    tol: &Tolerance,
) -> Result<TransverseOutcome, Error> {
    let pb = hp.phi_a(b);
    let conj = pb * a_mat * pb;
    let (_, inv_leak) = subspace_image_contained(&conj, h_plus, h_plus, tol);
    let a_p = compress_symmetric(a_mat, h_plus.basis());
    let c_p = compress_symmetric(&conj, h_plus.basis());
    let (basis_p, lam_bars, c_bars) = simultaneous_diag(&a_p, &c_p, tol)?;

    let mut phi_leak = 0.0f64;
    let mut swap_leak = inv_leak;
    let mut eta_bound = 0.0f64;
    for j in 0..basis_p.dim() {
        let xbar = h_plus.basis() * basis_p.col(j);
        let lam = lam_bars[j];
        let mu = -c_bars[j];
        let px = hp.phi() * &xbar;
        phi_leak = phi_leak.max(h_plus.rejection_norm(&px));
        let pbx = pb * &xbar;
        swap_leak = swap_leak.max(h_minus.rejection_norm(&pbx));
        let kappa = 2.0 + betas.0[b] * (lam + mu) - 2.0 * lam * mu;
        let coupling_vec = &px * (2.0 * hp.eta_xi_a(b)) + &pbx * kappa;
        eta_bound = eta_bound.max(h_plus.project(&coupling_vec).norm() / 2.0);
    }
    Ok(TransverseOutcome { phi_leak, swap_leak, eta_bound, eta_abs: hp.eta_xi_a(b).abs() })
}

/// Executes the full certification procedure.
///
/// Hypothesis failures are reported in the certificate, never thrown. The
/// steps are strictly ordered: a failing step leaves no residuals from any
/// later step in the record.
pub fn certify_hopf(
    hp: &HypersurfacePoint,
    shape: &ShapeOperator,
    tol: &Tolerance,
) -> HopfCertificate {
    let mut cert = HopfCertificate::pending();
    let mut res: BTreeMap<String, f64> = BTreeMap::new();
    // Scale-free window for quantities that pass through eigendecompositions.
    let window = tol.eig_gap.max(100.0 * tol.identity_tol);

    // Step 1: hypotheses.
    let hyp = check_hypotheses(hp, shape, tol);
    res.insert("hyp_ad_in_d_leak".into(), hyp.ad_in_d_leak);
    res.insert("hyp_adperp_in_dperp_leak".into(), hyp.adperp_in_dperp_leak);
    res.insert("hyp_xi_in_dperp_gap".into(), hyp.xi_in_dperp_gap);
    if !hyp.pass {
        return cert.fail(CertStatus::HypothesisFailed, "hypotheses", res);
    }

    // Step 2: principalize the triple.
    let (hp1, betas1, rot1) = match principalize_triple(hp, shape, tol) {
        Ok(v) => v,
        Err(_) => return cert.fail(CertStatus::StepFailed, "principalize", res),
    };
    let a_mat = shape.matrix().clone();
    let mut principal_residual = 0.0f64;
    for a in 0..3 {
        principal_residual = principal_residual
            .max((&a_mat * hp1.xi_a(a) - hp1.xi_a(a) * betas1.0[a]).norm());
    }
    res.insert("principal_residual".into(), principal_residual);
    if principal_residual > tol.identity_tol {
        return cert.fail(CertStatus::StepFailed, "principalize", res);
    }

    // Step 3: pick the index with the largest Reeb component and relabel
    // so it sits first.
    let components = [hp1.eta_xi_a(0).abs(), hp1.eta_xi_a(1).abs(), hp1.eta_xi_a(2).abs()];
    let chosen = components
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).expect("finite components"))
        .map(|(i, _)| i)
        .unwrap_or(0);
    res.insert("reeb_component_max".into(), components[chosen]);
    if components[chosen] <= 10.0 * tol.identity_tol {
        // All three components vanish, contradicting the Reeb hypothesis.
        return cert.fail(CertStatus::HypothesisFailed, "reeb_selection", res);
    }
    let (hp2, betas2, rot_total) = if chosen == 0 {
        (hp1, betas1, rot1)
    } else {
        let perm = cyclic_permutation(chosen);
        let rotated = match TripleRotation::new(perm.matrix() * rot1.matrix()) {
            Ok(r) => r,
            Err(_) => return cert.fail(CertStatus::StepFailed, "reeb_selection", res),
        };
        let amb = hp.ambient().rotate_triple(&rotated);
        let hp2 = match induce(&amb, hp.normal()) {
            Ok(p) => p,
            Err(_) => return cert.fail(CertStatus::StepFailed, "reeb_selection", res),
        };
        let b = betas1.0;
        (hp2, BetaTriple([b[chosen], b[(chosen + 1) % 3], b[(chosen + 2) % 3]]), rotated)
    };
    cert.rotation = Some(rot_total.rows());
    cert.betas = Some(betas2.0);
    cert.chosen_a = Some(chosen + 1);
    cert.eta_xi = Some([hp2.eta_xi_a(0), hp2.eta_xi_a(1), hp2.eta_xi_a(2)]);

    // Step 4: the principal coupling identity on D, for every index.
    let coupling = match verify_principal_coupling(&hp2, shape, &betas2, tol) {
        Ok(v) => v,
        Err(_) => return cert.fail(CertStatus::StepFailed, "principal_coupling", res),
    };
    for (a, value) in coupling.iter().enumerate() {
        res.insert(format!("principal_coupling_a{}", a + 1), *value);
    }
    if coupling.iter().any(|v| *v > tol.identity_tol) {
        return cert.fail(CertStatus::StepFailed, "principal_coupling", res);
    }

    // Step 5: commutation of A with its phi_a conjugates on D.
    let commutation = match verify_shape_commutation(&hp2, shape, tol) {
        Ok(v) => v,
        Err(_) => return cert.fail(CertStatus::StepFailed, "shape_commutation", res),
    };
    for (a, value) in commutation.iter().enumerate() {
        res.insert(format!("shape_commutation_a{}", a + 1), *value);
    }
    if commutation.iter().any(|v| *v > tol.identity_tol) {
        return cert.fail(CertStatus::StepFailed, "shape_commutation", res);
    }

    // Step 6: joint eigenbasis of A and phi_1 A phi_1 on H.
    let h = hp2.h().clone();
    if h.is_empty() {
        return cert.fail(CertStatus::StepFailed, "joint_diagonalization", res);
    }
    let p1 = hp2.phi_a(0);
    let conj1 = p1 * &a_mat * p1;
    let a_h = compress_symmetric(&a_mat, h.basis());
    let c_h = compress_symmetric(&conj1, h.basis());
    let (basis_h, lambdas, cvals) = match simultaneous_diag(&a_h, &c_h, tol) {
        Ok(v) => v,
        Err(_) => return cert.fail(CertStatus::StepFailed, "joint_diagonalization", res),
    };
    let xs: Vec<Vector> = (0..basis_h.dim()).map(|j| h.basis() * basis_h.col(j)).collect();
    let mus: Vec<f64> = cvals.iter().map(|c| -c).collect();
    let mut mu_residual = 0.0f64;
    for (x, mu) in xs.iter().zip(&mus) {
        let px = p1 * x;
        mu_residual = mu_residual.max((&a_mat * &px - &px * *mu).norm());
    }
    res.insert("joint_mu_residual".into(), mu_residual);
    cert.eigenpairs = lambdas.iter().zip(&mus).map(|(l, m)| [*l, *m]).collect();
    let spectrum_radius = lambdas
        .iter()
        .chain(mus.iter())
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    if mu_residual > 100.0 * tol.identity_tol * spectrum_radius {
        return cert.fail(CertStatus::StepFailed, "joint_diagonalization", res);
    }

    // Step 7: reflection eigenvalues from the coupling coefficients.
    let eta1 = hp2.eta_xi_a(0);
    let beta1 = betas2.0[0];
    let theta1 = hp2.theta_a(0);
    let mut eps_distance = 0.0f64;
    let mut reflection_residual = 0.0f64;
    let mut epsilons = Vec::with_capacity(xs.len());
    for (j, x) in xs.iter().enumerate() {
        let value =
            (2.0 + beta1 * (lambdas[j] + mus[j]) - 2.0 * lambdas[j] * mus[j]) / (2.0 * eta1);
        let distance = (value - 1.0).abs().min((value + 1.0).abs());
        eps_distance = eps_distance.max(distance);
        reflection_residual = reflection_residual.max((theta1 * x - x * value).norm());
        epsilons.push(EpsilonCheck { value, distance });
    }
    res.insert("epsilon_distance_max".into(), eps_distance);
    res.insert("reflection_residual".into(), reflection_residual);
    cert.epsilons = epsilons;
    if eps_distance > window || reflection_residual > tol.identity_tol {
        return cert.fail(CertStatus::StepFailed, "reflection_spectrum", res);
    }

    // Step 8: split H by the reflection sign; the +1 part must be
    // A-invariant since it is spanned by joint eigenvectors.
    let mut plus_cols = Vec::new();
    let mut minus_cols = Vec::new();
    for (j, x) in xs.iter().enumerate() {
        if cert.epsilons[j].value > 0.0 {
            plus_cols.push(x.clone());
        } else {
            minus_cols.push(x.clone());
        }
    }
    if plus_cols.is_empty() {
        return cert.fail(CertStatus::StepFailed, "plus_space_empty", res);
    }
    let n = hp2.tangent_dim();
    let h_plus = Subspace::from_orthonormal_columns(n, &plus_cols);
    let h_minus = Subspace::from_orthonormal_columns(n, &minus_cols);
    let (_, plus_leak) = subspace_image_contained(&a_mat, &h_plus, &h_plus, tol);
    res.insert("plus_space_invariance_leak".into(), plus_leak);
    if plus_leak > window {
        return cert.fail(CertStatus::StepFailed, "plus_space_invariance", res);
    }

    // Step 9: indices 2 and 3 on the +1 space force the transverse Reeb
    // components to vanish.
    for b in [1usize, 2] {
        let step = format!("transverse_reeb_{}", b + 1);
        let outcome = match transverse_reeb(&hp2, &a_mat, &betas2, &h_plus, &h_minus, b, tol) {
            Ok(v) => v,
            Err(_) => return cert.fail(CertStatus::StepFailed, &step, res),
        };
        res.insert(format!("transverse_phi_leak_{}", b + 1), outcome.phi_leak);
        res.insert(format!("transverse_swap_leak_{}", b + 1), outcome.swap_leak);
        res.insert(format!("transverse_eta_bound_{}", b + 1), outcome.eta_bound);
        res.insert(format!("eta_xi_{}_abs", b + 1), outcome.eta_abs);
        if outcome.phi_leak > window
            || outcome.swap_leak > window
            || outcome.eta_abs > tol.identity_tol
        {
            return cert.fail(CertStatus::StepFailed, &step, res);
        }
    }

    // Step 10: the Reeb vector aligns with the first triple member and is
    // principal with value beta_1.
    let xi = hp2.xi();
    let alignment = (xi - hp2.xi_a(0)).norm().min((xi + hp2.xi_a(0)).norm());
    let alpha = betas2.0[0];
    let residual_hopf = (&a_mat * xi - xi * alpha).norm();
    res.insert("reeb_alignment_gap".into(), alignment);
    res.insert("hopf_residual".into(), residual_hopf);
    cert.alpha = Some(alpha);
    cert.residual_hopf = Some(residual_hopf);
    if residual_hopf > tol.identity_tol || alignment > window {
        return cert.fail(CertStatus::StepFailed, "hopf", res);
    }

    cert.status = CertStatus::Certified;
    cert.failing_step = None;
    cert.step_residuals = res;
    cert
}
