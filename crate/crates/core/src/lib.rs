//! Exactly solved renormalization-group flow of the four-dimensional
//! hierarchical spherical model in the local-potential limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalarflow`]: closed-form solutions `v(t, η)` of the transformed flow
//!   for the critical (`γ = 6`) and normal (`γ = 4`) block-spin scalings.
//! * [`initcond`]: the spherical initial data (Bessel-ratio continued
//!   fraction, its `N → ∞` limit `u₀′` and the Lee–Yang density of `u₀′`).
//! * [`inversion`]: the principal-branch inverse `p̄(t, x)` of `v(t, ·)`,
//!   the characteristic ODE oracle, the cumulant generator `u(t, x)` and the
//!   thermodynamic relations between `β`, `μ` and `p̂`.
//! * [`geometry`]: image domains `Ω_t`, their boundary arcs, the Lee–Yang
//!   zero density at scale `t`, fixed points and the scales `t*`, `t_co`.
//! * [`verify`]: self-check suites reproducing the acceptance checks.

pub mod error;
pub mod geometry;
pub mod initcond;
pub mod inversion;
pub mod params;
pub mod quad;
pub mod roots;
pub mod scalarflow;
pub mod verify;

pub use error::{FlowError, Result};
pub use geometry::{
    alpha_of_t, boundary_curve, boundary_height, crossover_residual, domain_contains, edge_of_t,
    fixed_points, t_crossover, t_star, zero_density, BoundaryPoint, DomainBoundary, FixedPointSet,
    Regime, ZeroMeasure,
};
pub use initcond::{
    bessel_ratio_cf, bessel_ratio_cf_detailed, f0_stieltjes, rho_initial, theta_prime_n, u0_eval,
    u0_prime, u0_prime_boundary, CfValue, DensitySample,
};
pub use inversion::{
    characteristic_position, characteristics_oracle, invert_contour, mu_of_beta,
    pbar_asymptotic_critical, pbar_asymptotic_normal, pbar_asymptotic_normal_measured,
    phat_of_beta, solve_pbar, u_of_x, CharState, InversionMethod, InversionResult,
};
pub use params::{ComplexValue, Flavor, FlowParams, BETA_CRITICAL};
pub use scalarflow::{
    eval_dv, eval_dv_real, eval_f, eval_g_critical, eval_g_normal, eval_v, eval_v_real,
    flow_derivs, flow_derivs_real, FlowDerivs,
};
pub use verify::{Check, Report, Suite};

/// Library version, echoed in CLI metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
