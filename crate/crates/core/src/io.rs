//! JSON payloads for the file formats shared with the command-line tools.
//!
//! Operators are never serialized redundantly: an ambient space is stored
//! as (m, triple rotation) and reconstructed from the canonical model, and
//! a shape operator is stored as a row-major entry array against the
//! deterministic tangent basis of its hypersurface point.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ambient::{build_ambient, AmbientSpace, TripleRotation, CONVENTION};
use crate::error::Error;
use crate::hyper::{induce, HypersurfacePoint, ShapeOperator};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmbientJson {
    pub m: usize,
    pub convention: String,
    pub triple_rotation: [[f64; 3]; 3],
}

impl AmbientJson {
    pub fn from_space(space: &AmbientSpace) -> Self {
        let r = space.rotation();
        let triple_rotation = [
            [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
            [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
            [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
        ];
        Self { m: space.m(), convention: CONVENTION.to_string(), triple_rotation }
    }

    pub fn to_space(&self) -> Result<AmbientSpace, Error> {
        if self.convention != CONVENTION {
            return Err(Error::BadConvention { found: self.convention.clone() });
        }
        let base = build_ambient(self.m)?;
        let rot = TripleRotation::from_rows(self.triple_rotation)?;
        Ok(base.rotate_triple(&rot))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperpointJson {
    pub ambient: AmbientJson,
    pub n: Vec<f64>,
}

impl HyperpointJson {
    pub fn from_point(hp: &HypersurfacePoint) -> Self {
        Self {
            ambient: AmbientJson::from_space(hp.ambient()),
            n: hp.normal().iter().copied().collect(),
        }
    }

    pub fn to_point(&self) -> Result<HypersurfacePoint, Error> {
        let space = self.ambient.to_space()?;
        let normal = DVector::from_vec(self.n.clone());
        induce(&space, &normal)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeOperatorJson {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl ShapeOperatorJson {
    pub fn from_shape(shape: &ShapeOperator) -> Self {
        let m = shape.matrix();
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push(m[(i, j)]);
            }
        }
        Self { dim: shape.dim(), entries }
    }

    pub fn to_shape(&self) -> Result<ShapeOperator, Error> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim * self.dim,
                got: self.entries.len(),
            });
        }
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.entries);
        ShapeOperator::new(m)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_a::build_type_a;

    #[test]
    fn ambient_roundtrip_reconstructs_operators() {
        let amb = build_ambient(3).unwrap();
        let r = nalgebra::Rotation3::from_euler_angles(0.2, 0.5, -0.9);
        let rotated = amb.rotate_triple(&TripleRotation::new(*r.matrix()).unwrap());
        let json = AmbientJson::from_space(&rotated);
        let back = json.to_space().unwrap();
        for a in 0..3 {
            assert!((back.j_a(a) - rotated.j_a(a)).norm() <= 1e-12);
        }
    }

    #[test]
    fn rejects_unknown_convention() {
        let amb = build_ambient(3).unwrap();
        let mut json = AmbientJson::from_space(&amb);
        json.convention = "row-major-complex".into();
        assert!(matches!(json.to_space(), Err(Error::BadConvention { .. })));
    }

    #[test]
    fn hyperpoint_and_shape_roundtrip() {
        let model = build_type_a(3, 0.3).unwrap();
        let hp_json = HyperpointJson::from_point(&model.hp);
        let shape_json = ShapeOperatorJson::from_shape(&model.shape);
        let hp = hp_json.to_point().unwrap();
        let shape = shape_json.to_shape().unwrap();
        assert!((hp.normal() - model.hp.normal()).norm() == 0.0);
        assert!((shape.matrix() - model.shape.matrix()).norm() == 0.0);
        assert!((hp.phi() - model.hp.phi()).norm() <= 1e-14);
    }

    #[test]
    fn shape_entry_count_checked() {
        let json = ShapeOperatorJson { dim: 3, entries: vec![0.0; 8] };
        assert!(matches!(json.to_shape(), Err(Error::DimensionMismatch { .. })));
    }
}
