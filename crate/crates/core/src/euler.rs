//! Ideal-gas Euler equations in one and two space dimensions.
//!
//! Conserved variables are `(rho, rho v, E)` in 1-D and
//! `(rho, rho v1, rho v2, E)` in 2-D with `E = rho |v|^2 / 2 + p / (gamma - 1)`.
//! The admissible set is `rho > 0, p > 0`; pressure is concave in the
//! conserved variables wherever `rho > 0`, so the set is convex.
//!
//! The module also carries the geometric quasi-linear (GQL) description of
//! the admissible set, `u . e1 > 0` and `u . n*(v*) > 0` for every `v*`
//! with `n* = (v*^2/2, -v*, 1)`. It is used as an independent check of
//! admissibility and of the one-sided flux positivity that underlies the
//! wave-speed choice.

use crate::error::ModelError;
use crate::model::{AdmissibilitySpec, Constraint, Direction, EquationModel};
use crate::state::State;

pub type EulerState1D = State<3>;
pub type EulerState2D = State<4>;

/// Ratio of specific heats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    gamma: f64,
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self, ModelError> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(GasParams { gamma })
        } else {
            Err(ModelError::InvalidGamma(gamma))
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Kinetic energy density `|m|^2 / (2 rho)`.
#[inline]
fn kinetic<const M: usize>(u: &State<M>) -> f64 {
    let mut m2 = 0.0;
    for i in 1..M - 1 {
        m2 += u[i] * u[i];
    }
    0.5 * m2 / u[0]
}

/// Pressure without the density check. Garbage for `rho <= 0`.
#[inline]
pub fn pressure_unchecked<const M: usize>(u: &State<M>, gamma: f64) -> f64 {
    (gamma - 1.0) * (u[M - 1] - kinetic(u))
}

pub fn pressure<const M: usize>(u: &State<M>, params: GasParams) -> Result<f64, ModelError> {
    if !(u[0] > 0.0) {
        return Err(ModelError::NonPositiveDensity(u[0]));
    }
    Ok(pressure_unchecked(u, params.gamma))
}

pub fn sound_speed<const M: usize>(u: &State<M>, params: GasParams) -> Result<f64, ModelError> {
    let p = pressure(u, params)?;
    if !(p > 0.0) {
        return Err(ModelError::NonPositivePressure(p));
    }
    Ok((params.gamma * p / u[0]).sqrt())
}

/// Build a conserved state from density, velocity components and pressure.
pub fn from_primitive<const M: usize>(rho: f64, velocity: &[f64], p: f64, gamma: f64) -> State<M> {
    assert_eq!(velocity.len(), M - 2, "velocity has the wrong dimension");
    let mut u = [0.0; M];
    u[0] = rho;
    let mut v2 = 0.0;
    for (i, v) in velocity.iter().enumerate() {
        u[i + 1] = rho * v;
        v2 += v * v;
    }
    u[M - 1] = 0.5 * rho * v2 + p / (gamma - 1.0);
    State(u)
}

/// Exact flux in direction `dir` (`dir` must be `X` in 1-D).
#[inline]
fn flux_dir<const M: usize>(u: &State<M>, gamma: f64, dir: Direction) -> State<M> {
    let k = 1 + dir.index();
    debug_assert!(k < M - 1);
    let p = pressure_unchecked(u, gamma);
    let vn = u[k] / u[0];
    let mut f = [0.0; M];
    f[0] = u[k];
    for i in 1..M - 1 {
        f[i] = u[i] * vn;
    }
    f[k] += p;
    f[M - 1] = (u[M - 1] + p) * vn;
    State(f)
}

#[inline]
fn bounds_dir<const M: usize>(u: &State<M>, gamma: f64, dir: Direction) -> (f64, f64) {
    let vn = u[1 + dir.index()] / u[0];
    let c = (gamma * pressure_unchecked(u, gamma).max(0.0) / u[0]).sqrt();
    (vn - c, vn + c)
}

pub fn euler_flux_x<const M: usize>(u: &State<M>, params: GasParams) -> State<M> {
    flux_dir(u, params.gamma, Direction::X)
}

pub fn euler_flux_y(u: &EulerState2D, params: GasParams) -> EulerState2D {
    flux_dir(u, params.gamma, Direction::Y)
}

/// `(v1 - c, v1 + c)`.
pub fn eigen_bounds_x<const M: usize>(u: &State<M>, params: GasParams) -> Result<(f64, f64), ModelError> {
    let c = sound_speed(u, params)?;
    let v = u[1] / u[0];
    Ok((v - c, v + c))
}

/// `(v2 - c, v2 + c)`.
pub fn eigen_bounds_y(u: &EulerState2D, params: GasParams) -> Result<(f64, f64), ModelError> {
    let c = sound_speed(u, params)?;
    let v = u[2] / u[0];
    Ok((v - c, v + c))
}

/// Pressure-based scaling factor `min{(p_ref - eps)/(p_ref - p_min), 1}` with
/// `eps = min{EPSILON_FLOOR, p_ref}`. Returns 1 when `p_min >= eps`.
#[inline]
pub fn pressure_scaling(p_ref: f64, p_min: f64, floor: f64) -> f64 {
    let eps = floor.min(p_ref);
    if p_min >= eps {
        1.0
    } else {
        ((p_ref - eps) / (p_ref - p_min)).min(1.0)
    }
}

/// Auxiliary vector used in the GQL representation of the 1-D set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GqlVector {
    /// `e1 = (1, 0, 0)`.
    E1,
    /// `n*(v*) = (v*^2/2, -v*, 1)`.
    NStar(f64),
}

impl GqlVector {
    pub fn components(self) -> [f64; 3] {
        match self {
            GqlVector::E1 => [1.0, 0.0, 0.0],
            GqlVector::NStar(vs) => [0.5 * vs * vs, -vs, 1.0],
        }
    }

    fn dot(self, u: &[f64; 3]) -> f64 {
        let n = self.components();
        n[0] * u[0] + n[1] * u[1] + n[2] * u[2]
    }
}

/// `u . n*(v*)`, which equals `rho (v - v*)^2 / 2 + p / (gamma - 1)`.
pub fn gql_inner(u: &EulerState1D, v_star: f64) -> f64 {
    GqlVector::NStar(v_star).dot(&u.0)
}

/// Minimum of `u . n*(v*)` over all `v*`, attained at `v* = v`.
pub fn gql_inner_min(u: &EulerState1D) -> Result<f64, ModelError> {
    if !(u[0] > 0.0) {
        return Err(ModelError::NonPositiveDensity(u[0]));
    }
    Ok(gql_inner(u, u[1] / u[0]))
}

/// 2-D analogue with `n* = (|v*|^2/2, -v1*, -v2*, 1)`.
pub fn gql_inner_2d(u: &EulerState2D, v_star: [f64; 2]) -> f64 {
    let [a, b] = v_star;
    0.5 * (a * a + b * b) * u[0] - a * u[1] - b * u[2] + u[3]
}

pub fn gql_inner_min_2d(u: &EulerState2D) -> Result<f64, ModelError> {
    if !(u[0] > 0.0) {
        return Err(ModelError::NonPositiveDensity(u[0]));
    }
    Ok(gql_inner_2d(u, [u[1] / u[0], u[2] / u[0]]))
}

/// `[c u + sign (v u - f(u))] . n`, positive for every admissible `u`.
pub fn gql_flux_pairing(u: &EulerState1D, n: GqlVector, sign: f64, params: GasParams) -> Result<f64, ModelError> {
    let c = sound_speed(u, params)?;
    let v = u[1] / u[0];
    let f = euler_flux_x(u, params);
    let w = [
        c * u[0] + sign * (v * u[0] - f[0]),
        c * u[1] + sign * (v * u[1] - f[1]),
        c * u[2] + sign * (v * u[2] - f[2]),
    ];
    Ok(n.dot(&w))
}

fn euler_spec<const M: usize>(gamma: f64) -> AdmissibilitySpec<M> {
    AdmissibilitySpec::new(
        vec![
            Constraint::new("density", true, |u: &State<M>| u[0]),
            Constraint::new("pressure", true, move |u: &State<M>| pressure_unchecked(u, gamma)),
        ],
        Vec::new(),
    )
}

macro_rules! euler_model {
    ($name:ident, $m:literal, $label:literal, $cols:expr, $reflect:expr) => {
        #[derive(Debug, Clone)]
        pub struct $name {
            params: GasParams,
            spec: AdmissibilitySpec<$m>,
        }

        impl $name {
            pub fn new(params: GasParams) -> Self {
                $name {
                    params,
                    spec: euler_spec(params.gamma),
                }
            }

            pub fn params(&self) -> GasParams {
                self.params
            }

            #[inline]
            pub fn pressure(&self, u: &State<$m>) -> f64 {
                pressure_unchecked(u, self.params.gamma)
            }

            pub fn from_primitive(&self, rho: f64, velocity: &[f64], p: f64) -> State<$m> {
                from_primitive(rho, velocity, p, self.params.gamma)
            }
        }

        impl EquationModel<$m> for $name {
            fn name(&self) -> &'static str {
                $label
            }

            fn admissibility(&self) -> &AdmissibilitySpec<$m> {
                &self.spec
            }

            #[inline]
            fn flux(&self, u: &State<$m>, dir: Direction) -> State<$m> {
                flux_dir(u, self.params.gamma, dir)
            }

            #[inline]
            fn eigen_bounds(&self, u: &State<$m>, dir: Direction) -> (f64, f64) {
                bounds_dir(u, self.params.gamma, dir)
            }

            fn reflect(&self, u: &State<$m>, dir: Direction) -> State<$m> {
                let f: fn(&State<$m>, Direction) -> State<$m> = $reflect;
                f(u, dir)
            }

            fn point_value_scaling(&self, ubar: &State<$m>, u_plus: &State<$m>, u_minus: &State<$m>) -> f64 {
                let p_min = self.pressure(u_plus).min(self.pressure(u_minus));
                pressure_scaling(self.pressure(ubar), p_min, self.spec.epsilon_floor)
            }

            fn anti_diffusion_scaling(
                &self,
                u_star: &State<$m>,
                u_star_plus: &State<$m>,
                u_star_minus: &State<$m>,
            ) -> f64 {
                let p_min = self.pressure(u_star_plus).min(self.pressure(u_star_minus));
                pressure_scaling(self.pressure(u_star), p_min, self.spec.epsilon_floor)
            }

            fn monitored(&self, u: &State<$m>) -> [f64; 2] {
                [u[0], self.pressure(u)]
            }

            fn monitored_names(&self) -> [&'static str; 2] {
                ["min_rho", "min_p"]
            }

            fn output_columns(&self) -> &'static [&'static str] {
                $cols
            }

            fn output_values(&self, u: &State<$m>) -> Vec<f64> {
                let mut out = Vec::with_capacity($m + 1);
                out.push(u[0]);
                for i in 1..$m - 1 {
                    out.push(u[i] / u[0]);
                }
                out.push(self.pressure(u));
                out.push(u[$m - 1]);
                out
            }
        }
    };
}

euler_model!(Euler1D, 3, "euler1d", &["rho", "v1", "p", "E"], |u, _| {
    State([u[0], -u[1], u[2]])
});

euler_model!(Euler2D, 4, "euler2d", &["rho", "v1", "v2", "p", "E"], |u, dir| {
    let mut r = *u;
    r[1 + dir.index()] = -r[1 + dir.index()];
    r
});
