//! Central tolerance and margin constants.
//!
//! Every "equals zero" assertion in the crate uses
//! `residual <= atol + rtol * scale`, where `scale` is built from the
//! magnitudes of the participating observables at the evaluation point.
//! Brackets and identities are exact to rounding, so the thresholds below
//! only have to absorb cancellation noise, never method error.

/// Absolute floor for bracket residuals.
pub const BRACKET_ATOL: f64 = 1e-10;

/// Relative factor for bracket residuals (`scale` = 1 + |F||G| at the point).
pub const BRACKET_RTOL: f64 = 1e-10;

/// Antisymmetry of the bracket: same floating-point products, reordered sum.
pub const ANTISYMMETRY_TOL: f64 = 1e-13;

/// Jacobi identity, with inner brackets differentiated by central
/// differences of bracket values (step [`SECOND_ORDER_FD_STEP`]).
pub const JACOBI_TOL: f64 = 1e-9;

/// Pointwise algebraic identities (half-sum and sum-zero relations).
pub const IDENTITY_RTOL: f64 = 1e-12;

/// Pointwise tier-limit comparisons (PDM parameter to zero, potential off).
pub const LIMIT_RTOL: f64 = 1e-13;

/// Parameter-continuity probe: |H(1e-6) - H(0)| <= 1e-5 * scale.
pub const CONTINUITY_LAMBDA: f64 = 1e-6;
pub const CONTINUITY_TOL: f64 = 1e-5;

/// Step for the central-difference cross-check of jet gradients.
pub const GRAD_CHECK_FD_STEP: f64 = 1e-6;

/// Componentwise agreement between jets and central differences:
/// truncation O(h^2) + cancellation O(eps/h) at h = 1e-6 stays below 1e-7
/// per unit gradient; 1e-5 leaves two orders of headroom.
pub const GRAD_CHECK_TOL: f64 = 1e-5;

/// Step for second-derivative probes (Jacobi inner brackets, Newton
/// Jacobians). First-order values are exact, so only this diagnostic layer
/// uses finite differences.
pub const SECOND_ORDER_FD_STEP: f64 = 1e-5;

/// Step for curvature probes; combined with one Richardson extrapolation
/// the truncation error is O(h^4) and roundoff ~ eps/h ~ 1e-12.
pub const CURVATURE_FD_STEP: f64 = 1e-4;

/// Default distance kept from every singular set while sampling.
pub const DEFAULT_MARGIN: f64 = 0.1;

/// Guard margin during time integration: trajectories may legitimately
/// approach a singular set, so the flow is only stopped when a denominator
/// or PDM factor actually collapses.
pub const FLOW_MARGIN: f64 = 1e-9;

/// Chart round trips (configuration block).
pub const ROUNDTRIP_Q_TOL: f64 = 1e-12;
/// Chart round trips (momentum block; one extra Jacobian application).
pub const ROUNDTRIP_P_TOL: f64 = 1e-11;
/// Canonicity of chart lifts, checked through Cartesian-side brackets.
pub const SYMPLECTOMORPHISM_TOL: f64 = 1e-11;

/// Chart-native vs Cartesian-pullback evaluation of catalog observables.
pub const CHART_INVARIANCE_RTOL: f64 = 1e-10;

/// Relative singular-value cutoff for functional-independence ranks:
/// six orders above rounding noise, six below generic singular values
/// on the sampling box.
pub const RANK_SV_CUTOFF: f64 = 1e-8;

/// Fixed-point tolerance for implicit stage equations.
pub const SOLVER_TOL: f64 = 1e-13;
/// Iteration cap before the Newton fallback gives up.
pub const SOLVER_MAX_ITER: usize = 50;

/// Relative drift allowed for any declared integral along its own flow
/// (h = 1e-3, t_end = 10, implicit midpoint).
pub const DRIFT_REL_TOL: f64 = 1e-7;
/// Drift allowed for the axial momentum, which the scheme conserves to
/// solver tolerance.
pub const DRIFT_PZ_TOL: f64 = 1e-11;

/// Sup-distance between a projected lifted flow and the planar flow it
/// reduces to.
pub const REDUCTION_TOL: f64 = 1e-8;

/// Lift-built vs catalog Hamiltonian (same arithmetic up to association).
pub const LIFT_AGREEMENT_RTOL: f64 = 1e-14;

/// Geodesic-equation residual along integrated geodesics.
pub const GEODESIC_RESIDUAL_TOL: f64 = 1e-6;

/// Bracket-form Killing certification of quadratic geodesic integrals.
pub const KILLING_RTOL: f64 = 1e-10;

/// Two curvature samples must differ by more than this to certify
/// nonconstant curvature.
pub const CURVATURE_NONCONST_MIN: f64 = 1e-3;

/// Scale floor below which a negative control counts as suspiciously zero.
pub const NEGATIVE_CONTROL_FLOOR: f64 = 1e-8;

/// Metric-compatibility residual (finite-difference check).
pub const METRIC_COMPAT_TOL: f64 = 1e-8;

/// Default sampling box in Cartesian coordinates. Keeps every denominator
/// (x, y, r, sin phi, cos phi, tau, sigma, alpha, beta) and every default
/// PDM factor clear of the [`DEFAULT_MARGIN`].
pub const BOX_XY: (f64, f64) = (0.3, 2.0);
pub const BOX_Z: (f64, f64) = (-1.0, 1.0);
pub const BOX_P: (f64, f64) = (-2.0, 2.0);

/// Default seed and sample count for every seeded suite.
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 200;
