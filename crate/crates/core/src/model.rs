//! Equation-model abstraction, admissible sets, and the scalar Burgers model.
//!
//! An admissible set is described by a list of constraint functions
//! `phi_i`. Strict constraints must be positive, weak ones non-negative.
//! The relaxed set used by the scaling limiters replaces the strict bound by
//! `phi_i(u) >= min(epsilon_floor, phi_i(ubar))` for a reference average
//! `ubar`, so round-off cannot push limited values onto the boundary.

use std::fmt;
use std::sync::Arc;

use crate::error::ModelError;
use crate::reconstruction::scaling_theta_concave;
use crate::state::State;

/// Relative round-off allowance for checks on reconstructed and intermediate states.
pub const ROUNDOFF_SLACK: f64 = 64.0 * f64::EPSILON;

/// Floor used in the relaxed admissible set.
pub const EPSILON_FLOOR: f64 = 1e-13;

/// Spatial direction of a flux or sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }
}

type ConstraintFn<const M: usize> = Arc<dyn Fn(&State<M>) -> f64 + Send + Sync>;

/// One admissibility function `phi(u)`.
#[derive(Clone)]
pub struct Constraint<const M: usize> {
    name: &'static str,
    concave: bool,
    eval: ConstraintFn<M>,
}

impl<const M: usize> Constraint<M> {
    pub fn new(name: &'static str, concave: bool, eval: impl Fn(&State<M>) -> f64 + Send + Sync + 'static) -> Self {
        Constraint {
            name,
            concave,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    #[inline]
    pub fn eval(&self, u: &State<M>) -> f64 {
        (self.eval)(u)
    }
}

impl<const M: usize> fmt::Debug for Constraint<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("name", &self.name)
            .field("concave", &self.concave)
            .finish()
    }
}

/// Description of an admissible set `G` and its relaxation `G_eps`.
#[derive(Debug, Clone)]
pub struct AdmissibilitySpec<const M: usize> {
    pub strict: Vec<Constraint<M>>,
    pub weak: Vec<Constraint<M>>,
    pub epsilon_floor: f64,
}

impl<const M: usize> AdmissibilitySpec<M> {
    pub fn new(strict: Vec<Constraint<M>>, weak: Vec<Constraint<M>>) -> Self {
        AdmissibilitySpec {
            strict,
            weak,
            epsilon_floor: EPSILON_FLOOR,
        }
    }

    pub fn all_concave(&self) -> bool {
        self.strict.iter().chain(&self.weak).all(|c| c.concave)
    }

    /// First failing constraint as `(name, value)`, strict constraints first.
    pub fn first_violation(&self, u: &State<M>) -> Option<(&'static str, f64)> {
        self.first_violation_within(u, 0.0)
    }

    /// As [`first_violation`](Self::first_violation), accepting values down to `-tol`.
    pub fn first_violation_within(&self, u: &State<M>, tol: f64) -> Option<(&'static str, f64)> {
        for c in &self.strict {
            let v = c.eval(u);
            if !(v > -tol) {
                return Some((c.name, v));
            }
        }
        for c in &self.weak {
            let v = c.eval(u);
            if !(v >= -tol) {
                return Some((c.name, v));
            }
        }
        None
    }
}

fn check_finite<const M: usize>(u: &State<M>) -> Result<(), ModelError> {
    if u.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite(u.0.to_vec()))
    }
}

/// Membership in `G`.
pub fn is_admissible<const M: usize>(u: &State<M>, spec: &AdmissibilitySpec<M>) -> Result<bool, ModelError> {
    check_finite(u)?;
    Ok(spec.first_violation(u).is_none())
}

/// Membership in `G_eps` relative to the reference average `ubar`.
pub fn is_admissible_eps<const M: usize>(
    u: &State<M>,
    ubar: &State<M>,
    spec: &AdmissibilitySpec<M>,
) -> Result<bool, ModelError> {
    check_finite(u)?;
    if !is_admissible(ubar, spec)? {
        return Err(ModelError::InadmissibleReference(ubar.0.to_vec()));
    }
    for c in &spec.strict {
        let eps = spec.epsilon_floor.min(c.eval(ubar));
        if !(c.eval(u) >= eps) {
            return Ok(false);
        }
    }
    Ok(spec.weak.iter().all(|c| c.eval(u) >= 0.0))
}

/// A hyperbolic system `u_t + f(u)_x + g(u)_y = 0` together with its
/// admissible set and bound-preserving limiter hooks.
pub trait EquationModel<const M: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    fn admissibility(&self) -> &AdmissibilitySpec<M>;

    /// Physical flux in direction `dir`.
    fn flux(&self, u: &State<M>, dir: Direction) -> State<M>;

    /// Smallest and largest eigenvalue of the flux Jacobian in `dir`.
    /// Only meaningful for admissible `u`.
    fn eigen_bounds(&self, u: &State<M>, dir: Direction) -> (f64, f64);

    /// Mirror image of `u` across a wall normal to `dir`.
    fn reflect(&self, u: &State<M>, dir: Direction) -> State<M>;

    /// Scaling factor pulling the two one-sided values of a cell toward its
    /// average until both lie in `G_eps`.
    fn point_value_scaling(&self, ubar: &State<M>, u_plus: &State<M>, u_minus: &State<M>) -> f64 {
        scaling_theta_concave(ubar, u_plus, u_minus, self.admissibility())
    }

    /// Whether bound preservation relies on the cell intermediate states
    /// lying in `G`. Scalar models are covered by flux monotonicity instead.
    fn checks_cell_states(&self) -> bool {
        true
    }

    /// Scaling factor `beta` applied to the anti-diffusion term so that the
    /// rebuilt intermediate states stay admissible.
    fn anti_diffusion_scaling(&self, u_star: &State<M>, u_star_plus: &State<M>, u_star_minus: &State<M>) -> f64 {
        scaling_theta_concave(u_star, u_star_plus, u_star_minus, self.admissibility())
    }

    /// Two quantities whose minima are logged every step.
    fn monitored(&self, u: &State<M>) -> [f64; 2];

    fn monitored_names(&self) -> [&'static str; 2];

    /// Column names written for each cell, after the coordinates.
    fn output_columns(&self) -> &'static [&'static str];

    fn output_values(&self, u: &State<M>) -> Vec<f64>;
}

/// Burgers flux `u^2 / 2`.
#[inline]
pub fn burgers_flux(u: f64) -> f64 {
    0.5 * u * u
}

/// Scalar Burgers equation with invariant region `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct ScalarBurgers {
    lower: f64,
    upper: f64,
    spec: AdmissibilitySpec<1>,
}

impl ScalarBurgers {
    pub fn new(lower: f64, upper: f64) -> Self {
        let spec = AdmissibilitySpec::new(
            Vec::new(),
            vec![
                Constraint::new("lower bound", true, move |u: &State<1>| u[0] - lower),
                Constraint::new("upper bound", true, move |u: &State<1>| upper - u[0]),
            ],
        );
        ScalarBurgers { lower, upper, spec }
    }

    /// Model whose invariant region spans the range of the given data.
    pub fn for_data(values: &[State<1>]) -> Self {
        let lo = values.iter().map(|u| u[0]).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(|u| u[0]).fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }
}

impl EquationModel<1> for ScalarBurgers {
    fn name(&self) -> &'static str {
        "burgers"
    }

    fn admissibility(&self) -> &AdmissibilitySpec<1> {
        &self.spec
    }

    fn flux(&self, u: &State<1>, _dir: Direction) -> State<1> {
        State([burgers_flux(u[0])])
    }

    fn eigen_bounds(&self, u: &State<1>, _dir: Direction) -> (f64, f64) {
        (u[0], u[0])
    }

    fn reflect(&self, u: &State<1>, _dir: Direction) -> State<1> {
        -*u
    }

    fn anti_diffusion_scaling(&self, _: &State<1>, _: &State<1>, _: &State<1>) -> f64 {
        1.0
    }

    fn checks_cell_states(&self) -> bool {
        false
    }

    fn monitored(&self, u: &State<1>) -> [f64; 2] {
        [u[0], -u[0]]
    }

    fn monitored_names(&self) -> [&'static str; 2] {
        ["min_u", "neg_max_u"]
    }

    fn output_columns(&self) -> &'static [&'static str] {
        &["u"]
    }

    fn output_values(&self, u: &State<1>) -> Vec<f64> {
        vec![u[0]]
    }
}
