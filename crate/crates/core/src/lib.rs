//! Exact reconstruction of sums of affine powers `f = Σ αᵢ (x − aᵢ)^eᵢ`
//! over the rationals, with Waring and sparsest-shift special cases and a
//! randomized multivariate lift. Every decomposition returned has been
//! re-expanded and compared with the input.

mod error;
pub mod classic;
pub mod decompose;
pub mod generate;
pub mod linalg;
pub mod multi;
pub mod multipoly;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod sde;

pub use error::{Error, Result};
pub use linalg::QMatrix;
pub use multipoly::{multi_eval, LinearForm, MultiPoly};
pub use poly::UniPoly;
pub use rational::Rational;
pub use roots::rational_roots;
pub use sde::{apply_sde, find_min_sde, power_solutions, shifted_poly_solutions, wronskian, Sde};
pub use decompose::{
    check_conditions, decompose_auto, decompose_big_exponents, decompose_big_gaps,
    decompose_distinct_nodes, decompose_distinct_nodes_with_stats, decompose_small_intervals, expand, AffineTerm, AlgorithmTag,
    Criterion, Decomposition, Delta,
};
pub use classic::{expand_sparsest, expand_waring, sparsest_shift, waring_decompose, SparsestResult, WaringResult};
pub use multi::{expand_multi, multi_build, multi_build_poly, project_to_axis, AffineChange, BlackBox, MultiDecomposition, MultiTerm};
pub use generate::{generate, ExponentProfile, Instance, InstanceSpec, Regime};
