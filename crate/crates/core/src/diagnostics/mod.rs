//! Independent oracles for checking runs: an LP solver, gap and distance
//! queries over the achievable-mean polytope, certificates and the bound
//! constants.

mod bounds;
mod drift;
mod fw;
pub mod lp;
mod oracles;
mod perturbation;
mod polytope;
mod stats;

pub use bounds::{compute_bounds, slater_constant, theorems, BoundConstants};
pub use drift::{drift_test, DriftReport, DriftTestConfig};
pub use lp::{LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, VarBound};
pub use oracles::{
    certify_slater, dist_to_polytope, fw_gap, lagrange_certificate, project, solve_gamma_star,
    GammaStar, LagrangeCertificate, Projection, SlaterCertificate, DIST_GAP_TOL, OPT_GAP_TOL,
    SLATER_MIN_MARGIN,
};
pub use perturbation::{gap_perturbation_check, PerturbationReport, PROPERTY_SLACK};
pub use polytope::{MixtureLp, MixturePolytope};
pub use stats::{fit_rate, MeanSe, RateFit};

/// `lp_solve` under its conventional name.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp::solve(lp)
}
