//! Green's-function machinery for operators `X = p + iq` with freely
//! independent atomic Hermitian parts: exact quaternion arithmetic, the
//! two-atom closed forms, the boundary-set tracer, the exact boundary-curve
//! algebra over the Gaussian rationals, and a random-matrix laboratory that
//! cross-checks all of it against finite-n spectra.

pub mod curve;
pub mod esd;
pub mod measure;
pub mod omega;
pub mod poly;
pub mod quaternion;
pub mod rational;
pub mod resultant;
pub mod two_atom;

pub use curve::{
    build_system, curve_eval, normalized_score, run_pipeline, run_pipeline_with_system,
    CurveConfig, CurveError, CurveResult, CurveScorer,
};
pub use esd::green::{
    classify, classify_point, Classification, ClassifyReport, ClassifyThresholds, GreenEntry,
    GreenEstimate, GreenLab, DEFAULT_LADDER,
};
pub use esd::{
    build_matrix, sample_spectrum, sample_spectrum_replica, EnsembleSpec, EsdError,
    SpectrumSample,
};
pub use measure::{
    cauchy, cauchy_preimages, sample_matrix_spectrum, AtomicMeasure, MeasureError,
};
pub use omega::{
    m_from_g, omega_residual, trace_omega, verify_against_curve, CurveCheckReport, GridSpec,
    OmegaError, OmegaWitness,
};
pub use poly::{GaussPoly, PolyError, Var};
pub use quaternion::{
    diagonalize, eigen, inverse, mul, z_epsilon, EigenPair, Quaternion, QuaternionError,
};
pub use rational::{parse_rational, GaussRational};
pub use resultant::{
    bareiss_determinant, cofactor_determinant, resultant, sylvester_matrix, ResultantError,
};
pub use two_atom::{TwoAtomError, TwoAtomPair};
