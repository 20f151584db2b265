//! Deterministic dense linear algebra over small inner-product spaces.
//!
//! Everything downstream reduces to four primitives: symmetric
//! eigendecomposition, simultaneous diagonalization of commuting symmetric
//! operators, orthogonal complements, and subspace-containment leaks.
//! All of them are pure functions of their inputs and return bitwise
//! identical results for identical inputs; eigenvector sign and ordering
//! ambiguities are resolved by a fixed convention so golden outputs stay
//! stable.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Coordinate vector over the standard inner product.
pub type Vector = DVector<f64>;
/// Dense square endomorphism in coordinates.
pub type LinOp = DMatrix<f64>;

/// Residual thresholds shared by every verifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute bound on identity residuals.
    pub identity_tol: f64,
    /// Eigenvalue clustering gap, as a fraction of the spectral radius.
    pub eig_gap: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { identity_tol: 1e-10, eig_gap: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(identity_tol: f64, eig_gap: f64) -> Result<Self, Error> {
        if !(identity_tol > 0.0 && identity_tol.is_finite()) || !(eig_gap > 0.0 && eig_gap.is_finite())
        {
            return Err(Error::InvalidTolerance);
        }
        Ok(Self { identity_tol, eig_gap })
    }

    /// Default clustering gap with a custom identity threshold.
    pub fn with_identity_tol(identity_tol: f64) -> Result<Self, Error> {
        Self::new(identity_tol, Self::default().eig_gap)
    }

    /// Absolute clustering gap for a spectrum of the given radius.
    pub fn gap_for(&self, spectral_radius: f64) -> f64 {
        self.eig_gap * spectral_radius
    }
}

/// A subspace carried by an orthonormal basis, stored column-wise.
///
/// Zero-dimensional subspaces are legal values; eigenspace queries on
/// perturbed inputs may legitimately come back empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Orthonormality threshold accepted by [`Subspace::new`].
    pub const ORTHO_TOL: f64 = 1e-8;

    /// Wraps a matrix whose columns are expected to be orthonormal.
    pub fn new(basis: DMatrix<f64>) -> Result<Self, Error> {
        let s = Self { ambient_dim: basis.nrows(), basis };
        let residual = s.gram_residual();
        if residual > Self::ORTHO_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(s)
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: DMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: DMatrix::identity(ambient_dim, ambient_dim) }
    }

    /// Orthonormalizes a spanning list with rank detection: vectors whose
    /// residual after projection falls below `rank_tol` are dropped.
    pub fn span(ambient_dim: usize, vectors: &[Vector], rank_tol: f64) -> Self {
        let mut cols: Vec<Vector> = Vec::new();
        for v in vectors {
            assert_eq!(v.len(), ambient_dim, "spanning vector has wrong dimension");
            let mut w = v.clone();
            // Modified Gram-Schmidt, applied twice for orthogonality to
            // survive near-dependent inputs.
            for _ in 0..2 {
                for c in &cols {
                    let p = c.dot(&w);
                    w -= c * p;
                }
            }
            let norm = w.norm();
            if norm > rank_tol {
                cols.push(w / norm);
            }
        }
        Self::from_orthonormal_columns(ambient_dim, &cols)
    }

    pub(crate) fn from_orthonormal_columns(ambient_dim: usize, cols: &[Vector]) -> Self {
        let mut basis = DMatrix::zeros(ambient_dim, cols.len());
        for (i, c) in cols.iter().enumerate() {
            basis.set_column(i, c);
        }
        Self { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn col(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn rejection_norm(&self, v: &Vector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// The projection operator as a dense matrix.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Coefficients of `v` against the basis columns.
    pub fn coords(&self, v: &Vector) -> Vector {
        self.basis.transpose() * v
    }

    /// Frobenius distance of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        let k = self.dim();
        let gram = self.basis.transpose() * &self.basis;
        (gram - DMatrix::identity(k, k)).norm()
    }
}

/// Flips a column so its first significant coordinate is positive.
pub(crate) fn canonicalize_sign(col: &mut Vector) {
    let scale = col.amax();
    if scale == 0.0 {
        return;
    }
    let thresh = 1e-12 * scale;
    let lead = col.iter().find(|c| c.abs() > thresh).copied().unwrap_or(0.0);
    if lead < 0.0 {
        col.neg_mut();
    }
}

fn lex_cmp(a: &Vector, b: &Vector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    Ordering::Equal
}

/// Compression `B^T A B` of a symmetric operator to an orthonormal basis,
/// re-symmetrized to strip rounding asymmetry.
pub(crate) fn compress_symmetric(op: &LinOp, basis: &DMatrix<f64>) -> LinOp {
    let c = basis.transpose() * op * basis;
    (&c + c.transpose()) * 0.5
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Rotations sweep the strict upper triangle in a fixed order until the
/// off-diagonal mass reaches rounding level, so the result is accurate to
/// machine precision and a deterministic function of the input bits.
fn jacobi_eigen(a: &LinOp) -> Result<(Vec<f64>, DMatrix<f64>), Error> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.norm().max(f64::MIN_POSITIVE);

    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= f64::EPSILON * norm {
            let values: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
            return Ok((values, v));
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::EigenFailed)
}

/// Eigendecomposition of a symmetric operator.
///
/// Eigenvalues come back ascending; ties are broken by lexicographic
/// comparison of the sign-canonicalized eigenvectors so the output is a
/// deterministic function of the input bits.
pub fn sym_eig(a: &LinOp, tol: &Tolerance) -> Result<(Vec<f64>, Subspace), Error> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n == 0 {
        return Ok((Vec::new(), Subspace::empty(0)));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailed);
    }
    let residual = (a - a.transpose()).norm();
    let bound = tol.identity_tol * a.norm();
    if residual > bound {
        return Err(Error::NotSymmetric { residual, bound });
    }
    let (values, vectors) = jacobi_eigen(a)?;

    let mut items: Vec<(f64, Vector)> = Vec::with_capacity(n);
    for (i, value) in values.into_iter().enumerate() {
        let mut col = vectors.column(i).into_owned();
        if !value.is_finite() || col.iter().any(|x| !x.is_finite()) {
            return Err(Error::EigenFailed);
        }
        canonicalize_sign(&mut col);
        items.push((value, col));
    }
    items.sort_by(|x, y| {
        x.0.partial_cmp(&y.0).expect("finite eigenvalues").then_with(|| lex_cmp(&x.1, &y.1))
    });

    let values: Vec<f64> = items.iter().map(|(v, _)| *v).collect();
    let cols: Vec<Vector> = items.into_iter().map(|(_, c)| c).collect();
    Ok((values, Subspace::from_orthonormal_columns(n, &cols)))
}

/// Common orthonormal eigenbasis of two commuting symmetric operators.
///
/// Diagonalizes `a`, clusters its eigenvalues with the tolerance gap, then
/// diagonalizes `b` compressed to each cluster. Returns the basis along with
/// the per-vector eigenvalues of `a` and `b`. Clusters are closed under the
/// gap transitively, so exactly coincident eigenvalues always share one.
pub fn simultaneous_diag(
    a: &LinOp,
    b: &LinOp,
    tol: &Tolerance,
) -> Result<(Subspace, Vec<f64>, Vec<f64>), Error> {
    let n = a.nrows();
    if b.nrows() != n || b.ncols() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
    }
    let b_residual = (b - b.transpose()).norm();
    let b_bound = tol.identity_tol * b.norm();
    if b_residual > b_bound {
        return Err(Error::NotSymmetric { residual: b_residual, bound: b_bound });
    }
    let commutator = (a * b - b * a).norm();
    let comm_bound = tol.identity_tol * a.norm() * b.norm();
    if commutator > comm_bound {
        return Err(Error::NotCommuting { residual: commutator, bound: comm_bound });
    }

    let (avals, abasis) = sym_eig(a, tol)?;
    if n == 0 {
        return Ok((abasis, avals, Vec::new()));
    }
    let radius = avals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let gap = tol.gap_for(radius);

    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    let mut out_a: Vec<f64> = Vec::with_capacity(n);
    let mut out_b: Vec<f64> = Vec::with_capacity(n);

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && avals[end] - avals[end - 1] <= gap {
            end += 1;
        }
        let cluster = abasis.basis().columns(start, end - start).into_owned();
        let b_cluster = compress_symmetric(b, &cluster);
        let (bvals, wbasis) = sym_eig(&b_cluster, tol)?;
        let lifted = &cluster * wbasis.basis();
        for j in 0..lifted.ncols() {
            let mut col = lifted.column(j).into_owned();
            canonicalize_sign(&mut col);
            out_a.push(col.dot(&(a * &col)));
            out_b.push(bvals[j]);
            cols.push(col);
        }
        start = end;
    }
    Ok((Subspace::from_orthonormal_columns(n, &cols), out_a, out_b))
}

/// Orthogonal complement of `s` inside its ambient space.
///
/// Completes the basis from standard coordinate vectors, at each round
/// taking the candidate with the largest rejection so the construction is
/// both deterministic and well conditioned.
pub fn orthocomplement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim();
    let k = s.dim();
    let mut accepted: Vec<Vector> = (0..k).map(|i| s.col(i)).collect();
    let mut result: Vec<Vector> = Vec::with_capacity(n - k);

    let reject = |v: &Vector, accepted: &[Vector]| -> Vector {
        let mut w = v.clone();
        for _ in 0..2 {
            for c in accepted {
                let p = c.dot(&w);
                w -= c * p;
            }
        }
        w
    };

    for _ in 0..n.saturating_sub(k) {
        let mut best_idx = 0;
        let mut best_norm = -1.0;
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            let norm = reject(&e, &accepted).norm();
            if norm > best_norm {
                best_norm = norm;
                best_idx = i;
            }
        }
        let mut e = DVector::zeros(n);
        e[best_idx] = 1.0;
        let w = reject(&e, &accepted);
        let w = &w / w.norm();
        accepted.push(w.clone());
        result.push(w);
    }
    Subspace::from_orthonormal_columns(n, &result)
}

/// Whether `a` maps `s` into `t`, together with the worst component of any
/// image vector outside `t`.
pub fn subspace_image_contained(
    a: &LinOp,
    s: &Subspace,
    t: &Subspace,
    tol: &Tolerance,
) -> (bool, f64) {
    assert_eq!(s.ambient_dim(), a.nrows(), "subspace dimension does not match operator");
    assert_eq!(t.ambient_dim(), a.nrows(), "target dimension does not match operator");
    let mut max_leak = 0.0f64;
    for i in 0..s.dim() {
        let image = a * s.col(i);
        max_leak = max_leak.max(t.rejection_norm(&image));
    }
    (max_leak <= tol.identity_tol, max_leak)
}
