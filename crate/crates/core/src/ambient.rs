//! Tangent-space model of the complex two-plane Grassmannian at a point.
//!
//! The model space is the realification of C^2 tensor C^m, a real
//! 4m-dimensional inner-product space carrying the Kahler structure `J`
//! and a canonical quaternionic triple `{J_1, J_2, J_3}`. Complex
//! coordinates are ordered (e1 f1, e2 f1, e1 f2, e2 f2, ...) and each one
//! is realified as an adjacent (re, im) pair. In these coordinates all
//! structure operators have entries in {0, +1, -1}, so the axioms hold
//! exactly. Downstream code must rely on the axioms only, never on the
//! specific entries.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3};

use crate::error::Error;
use crate::numeric::{LinOp, Vector};

/// Identifier of the coordinate convention used by every file format.
pub const CONVENTION: &str = "c2-tensor-cm/interleaved-re-im";

/// An element of SO(3) acting on the canonical triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleRotation(Matrix3<f64>);

impl TripleRotation {
    /// Orthogonality and determinant tolerance for admission.
    pub const TOL: f64 = 1e-12;

    pub fn new(r: Matrix3<f64>) -> Result<Self, Error> {
        let ortho = (r.transpose() * r - Matrix3::identity()).norm();
        let det = (r.determinant() - 1.0).abs();
        let residual = ortho.max(det);
        if residual > Self::TOL {
            return Err(Error::NotRotation { residual });
        }
        Ok(Self(r))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self, Error> {
        Self::new(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }
}

/// The ambient tangent space with its Kahler and quaternionic structures.
///
/// Immutable after construction; the metric is the standard dot product in
/// model coordinates.
#[derive(Debug, Clone)]
pub struct AmbientSpace {
    m: usize,
    j: LinOp,
    j_triple: [LinOp; 3],
    rotation: Matrix3<f64>,
}

/// Installs multiplication by `sign * i` on complex coordinate `c`.
fn set_i_block(mat: &mut DMatrix<f64>, c: usize, sign: f64) {
    mat[(2 * c, 2 * c + 1)] = -sign;
    mat[(2 * c + 1, 2 * c)] = sign;
}

/// Builds the canonical model for the given quaternionic dimension.
///
/// `J` is multiplication by i. `J_1` multiplies the first C^2 slot by i and
/// the second by -i; `J_2` is the real rotation swapping the two slots;
/// `J_3 = J_1 J_2`.
pub fn build_ambient(m: usize) -> Result<AmbientSpace, Error> {
    if m < 3 {
        return Err(Error::InvalidM { m });
    }
    let dim = 4 * m;
    let mut j = DMatrix::zeros(dim, dim);
    let mut j1 = DMatrix::zeros(dim, dim);
    let mut j2 = DMatrix::zeros(dim, dim);
    for c in 0..2 * m {
        set_i_block(&mut j, c, 1.0);
        let slot = c % 2;
        set_i_block(&mut j1, c, if slot == 0 { 1.0 } else { -1.0 });
    }
    for f in 0..m {
        // (z_first, z_second) -> (z_second, -z_first) within each C^m slot.
        let a = 2 * f;
        let b = 2 * f + 1;
        j2[(2 * a, 2 * b)] = 1.0;
        j2[(2 * a + 1, 2 * b + 1)] = 1.0;
        j2[(2 * b, 2 * a)] = -1.0;
        j2[(2 * b + 1, 2 * a + 1)] = -1.0;
    }
    let j3 = &j1 * &j2;
    Ok(AmbientSpace { m, j, j_triple: [j1, j2, j3], rotation: Matrix3::identity() })
}

impl AmbientSpace {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        4 * self.m
    }

    pub fn j(&self) -> &LinOp {
        &self.j
    }

    /// Member `a` of the current triple, `a` in 0..3.
    pub fn j_a(&self, a: usize) -> &LinOp {
        &self.j_triple[a]
    }

    /// Net rotation of the current triple relative to the canonical one.
    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(y)
    }

    /// Replaces the triple by `J'_a = sum_b R_ab J_b`, leaving `J` fixed.
    /// The quaternion relations are SO(3)-equivariant, so the result is a
    /// valid triple again.
    pub fn rotate_triple(&self, rot: &TripleRotation) -> AmbientSpace {
        let r = rot.matrix();
        let dim = self.dim();
        let mut triple = [
            DMatrix::zeros(dim, dim),
            DMatrix::zeros(dim, dim),
            DMatrix::zeros(dim, dim),
        ];
        for (a, out) in triple.iter_mut().enumerate() {
            for b in 0..3 {
                *out += &self.j_triple[b] * r[(a, b)];
            }
        }
        AmbientSpace {
            m: self.m,
            j: self.j.clone(),
            j_triple: triple,
            rotation: r * self.rotation,
        }
    }

    /// Curvature tensor of the model, evaluated term by term.
    pub fn curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector, Error> {
        let dim = self.dim();
        for v in [x, y, z] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        let jx = &self.j * x;
        let jy = &self.j * y;
        let jz = &self.j * z;

        let mut out = x * y.dot(z) - y * x.dot(z);
        out += &jx * jy.dot(z) - &jy * jx.dot(z) - &jz * (2.0 * jx.dot(y));
        for ja in &self.j_triple {
            let jax = ja * x;
            let jay = ja * y;
            let jaz = ja * z;
            out += &jax * jay.dot(z) - &jay * jax.dot(z) - &jaz * (2.0 * jax.dot(y));
            let jjax = &self.j * &jax;
            let jjay = &self.j * &jay;
            out += &jjax * jjay.dot(z) - &jjay * jjax.dot(z);
        }
        Ok(out)
    }

    /// Residuals of every structural axiom, keyed by name.
    pub fn invariant_residuals(&self) -> BTreeMap<String, f64> {
        let dim = self.dim();
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut out = BTreeMap::new();
        out.insert("j_square".into(), (&self.j * &self.j + &id).norm());
        out.insert("j_isometry".into(), (self.j.transpose() * &self.j - &id).norm());
        out.insert("j_skew".into(), (&self.j + self.j.transpose()).norm());
        for a in 0..3 {
            let ja = &self.j_triple[a];
            let jb = &self.j_triple[(a + 1) % 3];
            let jc = &self.j_triple[(a + 2) % 3];
            out.insert(format!("j{}_square", a + 1), (ja * ja + &id).norm());
            out.insert(format!("j{}_isometry", a + 1), (ja.transpose() * ja - &id).norm());
            out.insert(format!("j{}_skew", a + 1), (ja + ja.transpose()).norm());
            out.insert(format!("quaternion_fwd_{}", a + 1), (ja * jb - jc).norm());
            out.insert(format!("quaternion_bwd_{}", a + 1), (jb * ja + jc).norm());
            out.insert(format!("j_commutes_j{}", a + 1), (&self.j * ja - ja * &self.j).norm());
            out.insert(format!("trace_jj{}", a + 1), (&self.j * ja).trace().abs());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn basis_vector(dim: usize, i: usize) -> Vector {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    #[test]
    fn rejects_small_m() {
        assert!(matches!(build_ambient(2), Err(Error::InvalidM { m: 2 })));
    }

    #[test]
    fn axioms_hold_exactly_for_m3() {
        let amb = build_ambient(3).unwrap();
        assert_eq!(amb.dim(), 12);
        for (name, residual) in amb.invariant_residuals() {
            assert_eq!(residual, 0.0, "axiom {name} violated");
        }
    }

    #[test]
    fn trace_jj1_vanishes() {
        for m in 3..=6 {
            let amb = build_ambient(m).unwrap();
            assert_eq!((amb.j() * amb.j_a(0)).trace(), 0.0);
        }
    }

    #[test]
    fn quaternion_product_exact() {
        for m in 3..=6 {
            let amb = build_ambient(m).unwrap();
            let prod = amb.j_a(1) * amb.j_a(2);
            assert_eq!((prod - amb.j_a(0)).norm(), 0.0);
        }
    }

    #[test]
    fn rotate_by_identity_is_identity() {
        let amb = build_ambient(3).unwrap();
        let rotated = amb.rotate_triple(&TripleRotation::identity());
        for a in 0..3 {
            assert_eq!((rotated.j_a(a) - amb.j_a(a)).norm(), 0.0);
        }
    }

    #[test]
    fn rotate_quarter_turn_about_first_axis() {
        let amb = build_ambient(3).unwrap();
        let r = TripleRotation::from_rows([
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, -1.0, 0.0],
        ])
        .unwrap();
        let rotated = amb.rotate_triple(&r);
        assert_eq!((rotated.j_a(0) - amb.j_a(0)).norm(), 0.0);
        assert_eq!((rotated.j_a(1) - amb.j_a(2)).norm(), 0.0);
        assert_eq!((rotated.j_a(2) + amb.j_a(1)).norm(), 0.0);
        for (name, residual) in rotated.invariant_residuals() {
            assert!(residual <= 1e-12, "axiom {name}: {residual}");
        }
    }

    #[test]
    fn rejects_non_rotation() {
        let r = Matrix3::from_fn(|i, j| if i == j { 2.0 } else { 0.0 });
        assert!(matches!(TripleRotation::new(r), Err(Error::NotRotation { .. })));
        // Orthogonal with determinant -1 is rejected as well.
        let refl = Matrix3::from_fn(|i, j| {
            if i == j {
                if i == 0 { -1.0 } else { 1.0 }
            } else {
                0.0
            }
        });
        assert!(matches!(TripleRotation::new(refl), Err(Error::NotRotation { .. })));
    }

    #[test]
    fn curvature_vanishes_on_equal_arguments() {
        let amb = build_ambient(3).unwrap();
        let x = basis_vector(12, 3);
        let z = basis_vector(12, 7);
        let r = amb.curvature(&x, &x, &z).unwrap();
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn curvature_dimension_check() {
        let amb = build_ambient(3).unwrap();
        let x = basis_vector(12, 0);
        let bad = basis_vector(11, 0);
        assert!(matches!(
            amb.curvature(&x, &bad, &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn holomorphic_diagnostic_is_eight() {
        // For the first realified coordinate vector, J X = J_1 X, and the
        // sectional diagnostic g(R(X, JX)JX, X) evaluates to 8. Confirmed
        // independently in the brute-force oracle integration test.
        let amb = build_ambient(3).unwrap();
        let x = basis_vector(12, 0);
        let jx = amb.j() * &x;
        let r = amb.curvature(&x, &jx, &jx).unwrap();
        assert!((r.dot(&x) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_slot_diagnostic_is_two() {
        let amb = build_ambient(3).unwrap();
        let x = basis_vector(12, 0);
        let y = basis_vector(12, 4);
        let r = amb.curvature(&x, &y, &y).unwrap();
        assert!((r.dot(&x) - 2.0).abs() < 1e-14);
    }

    fn euler_rotation(a: f64, b: f64, c: f64) -> TripleRotation {
        let r = nalgebra::Rotation3::from_euler_angles(a, b, c);
        TripleRotation::new(*r.matrix()).unwrap()
    }

    proptest! {
        #[test]
        fn rotated_triples_keep_quaternion_relations(
            a in -3.0..3.0f64, b in -1.5..1.5f64, c in -3.0..3.0f64
        ) {
            let amb = build_ambient(3).unwrap();
            let rotated = amb.rotate_triple(&euler_rotation(a, b, c));
            for i in 0..3 {
                let prod = rotated.j_a(i) * rotated.j_a((i + 1) % 3);
                prop_assert!((prod - rotated.j_a((i + 2) % 3)).norm() <= 1e-12);
            }
        }
    }
}
