//! Verification laboratory for the pointwise geometry of real hypersurfaces
//! in the complex two-plane Grassmannian.
//!
//! The crate realizes a single tangent space of the ambient symmetric space
//! as concrete linear algebra, induces the almost contact structures a unit
//! normal carries, checks every algebraic identity those structures satisfy,
//! constructs model type-A shape operators from the closed-form principal
//! curvature spectrum, and runs the Hopf certification procedure as a
//! numerical decision procedure with per-step residuals.
//!
//! Modules:
//! - [`numeric`]: deterministic dense symmetric linear algebra,
//! - [`ambient`]: the model space with its Kahler and quaternionic triple,
//! - [`hyper`]: induced hypersurface structures and their verifiers,
//! - [`type_a`]: model shape operators and the identity chain,
//! - [`hopf`]: the certification procedure,
//! - [`io`]: JSON payloads for the shared file formats.

pub mod ambient;
pub mod error;
pub mod hopf;
pub mod hyper;
pub mod io;
pub mod numeric;
pub mod type_a;

pub use ambient::{build_ambient, AmbientSpace, TripleRotation, CONVENTION};
pub use error::Error;
pub use hopf::{
    certify_hopf, check_hypotheses, principalize_triple, CertStatus, HopfCertificate,
    HypothesisReport,
};
pub use hyper::{
    codazzi_rhs, gauss_curvature, induce, theta_eigenspaces, verify_structure_relations,
    verify_theta_identities, HypersurfacePoint, ShapeOperator, StructureReport,
};
pub use numeric::{
    orthocomplement, simultaneous_diag, subspace_image_contained, sym_eig, LinOp, Subspace,
    Tolerance, Vector,
};
pub use type_a::{
    build_type_a, connection_identity_residual, fit_connection_forms, radius_sup,
    spectrum_type_a, verify_principal_coupling, verify_shape_commutation, BetaTriple, QForms,
    SpectrumA, TypeAModel,
};
