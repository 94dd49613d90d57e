//! Central-upwind numerical fluxes with bound-preserving corrections, and
//! the convex-decomposition oracle used to audit forward-Euler updates.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::model::{Direction, EquationModel};
use crate::reconstruction::minmod_state;
use crate::state::State;

/// Default desingularization threshold for `sigma+ - sigma-`.
pub const EPS_DESING: f64 = 1e-10;

/// Scheme variants sharing the reconstruction and flux machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeVariant {
    /// Point-value and anti-diffusion limiting.
    #[default]
    Bpcu,
    /// Plain central-upwind scheme, no limiting.
    Scheme1,
    /// Point-value limiting, anti-diffusion switched off.
    Scheme2,
    /// As `Scheme2` with the global speeds `+-sigma_max`.
    Scheme3,
}

impl SchemeVariant {
    pub const ALL: [SchemeVariant; 4] = [
        SchemeVariant::Bpcu,
        SchemeVariant::Scheme1,
        SchemeVariant::Scheme2,
        SchemeVariant::Scheme3,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            SchemeVariant::Bpcu => "bpcu",
            SchemeVariant::Scheme1 => "cu",
            SchemeVariant::Scheme2 => "nodiff",
            SchemeVariant::Scheme3 => "glf",
        }
    }

    /// Whether point values are limited and bounds are enforced.
    pub fn is_limited(self) -> bool {
        self != SchemeVariant::Scheme1
    }

    pub fn uses_global_speeds(self) -> bool {
        self == SchemeVariant::Scheme3
    }
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for SchemeVariant {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpcu" => Ok(SchemeVariant::Bpcu),
            "cu" | "scheme1" => Ok(SchemeVariant::Scheme1),
            "nodiff" | "scheme2" => Ok(SchemeVariant::Scheme2),
            "glf" | "scheme3" => Ok(SchemeVariant::Scheme3),
            other => Err(ConfigError::invalid(format!(
                "unknown scheme `{other}`; valid: bpcu, cu, nodiff, glf"
            ))),
        }
    }
}

/// One-sided local speeds at an interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedPair {
    pub minus: f64,
    pub plus: f64,
}

impl SpeedPair {
    pub fn new(minus: f64, plus: f64) -> Self {
        SpeedPair { minus, plus }
    }

    /// `sigma+ - sigma-`.
    #[inline]
    pub fn width(&self) -> f64 {
        self.plus - self.minus
    }

    /// `max(|sigma-|, sigma+)`.
    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.plus.max(-self.minus)
    }

    /// Replace nearly coincident speeds by `-eps, +eps`.
    #[inline]
    pub fn desingularized(self, eps: f64) -> Self {
        if self.width() < eps {
            SpeedPair::new(-eps, eps)
        } else {
            self
        }
    }
}

/// `sigma- = min(l1(u-), l1(u+), 0)`, `sigma+ = max(lm(u-), lm(u+), 0)`,
/// desingularized with `eps_desing`.
pub fn local_speeds<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    u_minus: &State<M>,
    u_plus: &State<M>,
    dir: Direction,
    eps_desing: f64,
) -> SpeedPair {
    let (lo_m, hi_m) = model.eigen_bounds(u_minus, dir);
    let (lo_p, hi_p) = model.eigen_bounds(u_plus, dir);
    SpeedPair::new(lo_m.min(lo_p).min(0.0), hi_m.max(hi_p).max(0.0)).desingularized(eps_desing)
}

/// `R_f = (sigma+ u+ - sigma- u- - f(u+) + f(u-)) / (sigma+ - sigma-)` with
/// the fluxes already evaluated.
#[inline]
pub fn intermediate_state_from_fluxes<const M: usize>(
    speeds: SpeedPair,
    u_plus: &State<M>,
    u_minus: &State<M>,
    f_plus: &State<M>,
    f_minus: &State<M>,
) -> State<M> {
    let inv = 1.0 / speeds.width();
    let mut out = [0.0; M];
    for m in 0..M {
        out[m] = (speeds.plus * u_plus[m] - speeds.minus * u_minus[m] - f_plus[m] + f_minus[m]) * inv;
    }
    State(out)
}

/// Intermediate state `R_f(sigma+, sigma-, u+, u-)`.
pub fn intermediate_state<const M: usize>(
    speeds: SpeedPair,
    u_plus: &State<M>,
    u_minus: &State<M>,
    flux: impl Fn(&State<M>) -> State<M>,
) -> State<M> {
    intermediate_state_from_fluxes(speeds, u_plus, u_minus, &flux(u_plus), &flux(u_minus))
}

/// Anti-diffusion `minmod(u+ - u*, u* - u-)`.
#[inline]
pub fn anti_diffusion<const M: usize>(u_plus: &State<M>, u_minus: &State<M>, u_star: &State<M>) -> State<M> {
    minmod_state(&(*u_plus - *u_star), &(*u_star - *u_minus))
}

/// Rebuilt states `(u*,+, u*,-) = u* - sigma+- / (sigma+ - sigma-) * d`.
#[inline]
pub fn rebuilt_states<const M: usize>(speeds: SpeedPair, u_star: &State<M>, d: &State<M>) -> (State<M>, State<M>) {
    let inv = 1.0 / speeds.width();
    (*u_star - *d * (speeds.plus * inv), *u_star - *d * (speeds.minus * inv))
}

/// Pressure-based anti-diffusion factor for the Euler equations.
pub fn bp_beta_euler<const M: usize>(
    u_star: &State<M>,
    u_star_plus: &State<M>,
    u_star_minus: &State<M>,
    gamma: f64,
) -> f64 {
    use crate::euler::{pressure_scaling, pressure_unchecked};
    let p_min = pressure_unchecked(u_star_plus, gamma).min(pressure_unchecked(u_star_minus, gamma));
    pressure_scaling(pressure_unchecked(u_star, gamma), p_min, crate::model::EPSILON_FLOOR)
}

/// Central-upwind flux
/// `(s+ f(u-) - s- f(u+)) / (s+ - s-) + s+ s- / (s+ - s-) (u+ - u- - d)`.
#[inline]
pub fn assemble_flux<const M: usize>(
    speeds: SpeedPair,
    u_plus: &State<M>,
    u_minus: &State<M>,
    f_plus: &State<M>,
    f_minus: &State<M>,
    d: &State<M>,
) -> State<M> {
    let (sp, sm) = (speeds.plus, speeds.minus);
    let inv = 1.0 / speeds.width();
    let prod = sp * sm * inv;
    let mut out = [0.0; M];
    for m in 0..M {
        out[m] = (sp * f_minus[m] - sm * f_plus[m]) * inv + prod * (u_plus[m] - u_minus[m] - d[m]);
    }
    State(out)
}

/// Equivalent flux form `f(u-) - s- u- + s- u*,+`.
pub fn flux_reformulated<const M: usize>(
    speeds: SpeedPair,
    u_minus: &State<M>,
    f_minus: &State<M>,
    u_star_plus: &State<M>,
) -> State<M> {
    *f_minus - *u_minus * speeds.minus + *u_star_plus * speeds.minus
}

/// Everything computed at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceData<const M: usize> {
    pub u_minus: State<M>,
    pub u_plus: State<M>,
    pub speeds: SpeedPair,
    pub u_star: State<M>,
    /// Raw anti-diffusion `d`.
    pub d: State<M>,
    pub beta: f64,
    pub flux: State<M>,
}

impl<const M: usize> InterfaceData<M> {
    /// Evaluate the interface given its point values and final speeds.
    pub fn build<Mdl: EquationModel<M> + ?Sized>(
        model: &Mdl,
        u_minus: State<M>,
        u_plus: State<M>,
        speeds: SpeedPair,
        dir: Direction,
        variant: SchemeVariant,
    ) -> Self {
        let f_minus = model.flux(&u_minus, dir);
        let f_plus = model.flux(&u_plus, dir);
        let u_star = intermediate_state_from_fluxes(speeds, &u_plus, &u_minus, &f_plus, &f_minus);
        let d = anti_diffusion(&u_plus, &u_minus, &u_star);
        let beta = match variant {
            SchemeVariant::Scheme1 => 1.0,
            SchemeVariant::Scheme2 | SchemeVariant::Scheme3 => 0.0,
            SchemeVariant::Bpcu => {
                if d == State::ZERO {
                    1.0
                } else {
                    let (sp, sm) = rebuilt_states(speeds, &u_star, &d);
                    model.anti_diffusion_scaling(&u_star, &sp, &sm)
                }
            }
        };
        let flux = assemble_flux(speeds, &u_plus, &u_minus, &f_plus, &f_minus, &(d * beta));
        InterfaceData {
            u_minus,
            u_plus,
            speeds,
            u_star,
            d,
            beta,
            flux,
        }
    }

    /// Anti-diffusion actually used in the flux.
    #[inline]
    pub fn d_tilde(&self) -> State<M> {
        self.d * self.beta
    }

    /// `(u*,+, u*,-)` rebuilt with the scaled anti-diffusion.
    #[inline]
    pub fn rebuilt(&self) -> (State<M>, State<M>) {
        rebuilt_states(self.speeds, &self.u_star, &self.d_tilde())
    }
}

fn cell_speeds<const M: usize>(west: &InterfaceData<M>, east: &InterfaceData<M>) -> SpeedPair {
    SpeedPair::new(west.speeds.minus, east.speeds.plus)
}

/// `sigma+ u+ - sigma- u- - f(u+) + f(u-)` for the cell: `u+` is the east
/// point value, `u-` the west one.
fn cell_star_numerator<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    west: &InterfaceData<M>,
    east: &InterfaceData<M>,
    dir: Direction,
) -> State<M> {
    let speeds = cell_speeds(west, east);
    let (up, um) = (east.u_minus, west.u_plus);
    up * speeds.plus - um * speeds.minus - model.flux(&up, dir) + model.flux(&um, dir)
}

/// Cell intermediate state
/// `R_f(sigma+ of the east face, sigma- of the west face, u- east, u+ west)`.
///
/// `None` when the two speeds span less than `EPS_DESING`; the state then
/// enters the decomposition with a vanishing weight.
pub fn cell_intermediate_state<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    west: &InterfaceData<M>,
    east: &InterfaceData<M>,
    dir: Direction,
) -> Option<State<M>> {
    let width = cell_speeds(west, east).width();
    (width >= EPS_DESING).then(|| cell_star_numerator(model, west, east, dir) * (1.0 / width))
}

/// Directional part of the convex decomposition of one cell.
///
/// With `w` the weight of this direction (1 in 1-D), returns the sum
/// `(w/2 - l*ds_w) u+_w + l s+_w u*,-_w + (w/2 - l*ds_e) u-_e - l s-_e u*,+_e
///  + l (s+_e - s-_w) u*_j` and the smallest coefficient.
pub fn directional_decomposition<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    west: &InterfaceData<M>,
    east: &InterfaceData<M>,
    dir: Direction,
    weight: f64,
    lambda: f64,
) -> (State<M>, f64) {
    let (_, w_star_minus) = west.rebuilt();
    let (e_star_plus, _) = east.rebuilt();
    let cell_term = cell_star_numerator(model, west, east, dir) * lambda;
    let coefs = [
        0.5 * weight - lambda * west.speeds.width(),
        lambda * west.speeds.plus,
        0.5 * weight - lambda * east.speeds.width(),
        -lambda * east.speeds.minus,
        lambda * (east.speeds.plus - west.speeds.minus),
    ];
    let sum =
        west.u_plus * coefs[0] + w_star_minus * coefs[1] + east.u_minus * coefs[2] + e_star_plus * coefs[3] + cell_term;
    let min = coefs.iter().fold(f64::INFINITY, |m, &c| m.min(c));
    (sum, min)
}

/// Outcome of a decomposition audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionAudit {
    /// Largest `|flux update - decomposition|_inf / |ubar|_inf` over cells.
    pub residual: f64,
    /// Smallest coefficient of the convex combination.
    pub min_coefficient: f64,
}

impl DecompositionAudit {
    pub const EMPTY: Self = DecompositionAudit {
        residual: 0.0,
        min_coefficient: f64::INFINITY,
    };

    pub fn merge(self, other: Self) -> Self {
        DecompositionAudit {
            residual: self.residual.max(other.residual),
            min_coefficient: self.min_coefficient.min(other.min_coefficient),
        }
    }

    /// Coefficients are non-negative, so the update is a convex combination.
    pub fn is_convex(&self) -> bool {
        self.min_coefficient >= 0.0
    }
}

fn residual_of<const M: usize>(update: &State<M>, decomposition: &State<M>, ubar: &State<M>) -> f64 {
    (*update - *decomposition).max_abs() / ubar.max_abs().max(f64::MIN_POSITIVE)
}

/// Audit a 1-D forward-Euler update of `ubar` (n cells) with the `n + 1`
/// interfaces `ifaces` (interface `j` is the west face of cell `j`).
pub fn decomposition_residual_1d<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    ubar: &[State<M>],
    ifaces: &[InterfaceData<M>],
    lambda: f64,
) -> DecompositionAudit {
    assert_eq!(ifaces.len(), ubar.len() + 1, "need n + 1 interfaces");
    let mut audit = DecompositionAudit::EMPTY;
    for (j, u) in ubar.iter().enumerate() {
        let (w, e) = (&ifaces[j], &ifaces[j + 1]);
        let update = *u - (e.flux - w.flux) * lambda;
        let (dec, min) = directional_decomposition(model, w, e, Direction::X, 1.0, lambda);
        audit = audit.merge(DecompositionAudit {
            residual: residual_of(&update, &dec, u),
            min_coefficient: min,
        });
    }
    audit
}

/// Direction weights `(l a1, m a2) / (l a1 + m a2)` of the 2-D decomposition.
pub fn direction_weights(lambda_alpha1: f64, mu_alpha2: f64) -> (f64, f64) {
    let total = lambda_alpha1 + mu_alpha2;
    if total > 0.0 {
        (lambda_alpha1 / total, mu_alpha2 / total)
    } else {
        (0.5, 0.5)
    }
}

/// Audit a 2-D forward-Euler update of the row-major `nx * ny` field
/// `ubar`. `x_ifaces[k * (nx + 1) + j]` is the west face of cell `(j, k)`,
/// `y_ifaces[j * (ny + 1) + k]` its south face. `alpha1`, `alpha2` are the
/// maximal speed widths in each direction.
#[allow(clippy::too_many_arguments)]
pub fn decomposition_residual_2d<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    ubar: &[State<M>],
    nx: usize,
    ny: usize,
    x_ifaces: &[InterfaceData<M>],
    y_ifaces: &[InterfaceData<M>],
    lambda: f64,
    mu: f64,
) -> DecompositionAudit {
    assert_eq!(ubar.len(), nx * ny);
    assert_eq!(x_ifaces.len(), (nx + 1) * ny);
    assert_eq!(y_ifaces.len(), (ny + 1) * nx);
    let alpha1 = x_ifaces.iter().fold(0.0_f64, |m, i| m.max(i.speeds.width()));
    let alpha2 = y_ifaces.iter().fold(0.0_f64, |m, i| m.max(i.speeds.width()));
    let (wx, wy) = direction_weights(lambda * alpha1, mu * alpha2);
    let mut audit = DecompositionAudit::EMPTY;
    for k in 0..ny {
        for j in 0..nx {
            let u = &ubar[k * nx + j];
            let (w, e) = (&x_ifaces[k * (nx + 1) + j], &x_ifaces[k * (nx + 1) + j + 1]);
            let (s, n) = (&y_ifaces[j * (ny + 1) + k], &y_ifaces[j * (ny + 1) + k + 1]);
            let update = *u - (e.flux - w.flux) * lambda - (n.flux - s.flux) * mu;
            let (dx, min_x) = directional_decomposition(model, w, e, Direction::X, wx, lambda);
            let (dy, min_y) = directional_decomposition(model, s, n, Direction::Y, wy, mu);
            audit = audit.merge(DecompositionAudit {
                residual: residual_of(&update, &(dx + dy), u),
                min_coefficient: min_x.min(min_y),
            });
        }
    }
    audit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{euler_flux_x, from_primitive, pressure_unchecked, Euler1D, GasParams};
    use crate::model::ScalarBurgers;

    fn gas() -> GasParams {
        GasParams::new(1.4).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn speeds_for_123_interface() {
        let m = Euler1D::new(gas());
        let um = State([1.0, -2.0, 2.375]);
        let up = State([1.0, 2.0, 2.375]);
        let s = local_speeds(&m, &um, &up, Direction::X, EPS_DESING);
        assert!(close(s.minus, -2.458257569495584, 1e-14));
        assert!(close(s.plus, 2.458257569495584, 1e-14));
        let rest = State([1.0, 0.0, 2.5]);
        let s = local_speeds(&m, &rest, &rest, Direction::X, EPS_DESING);
        assert!(close(s.plus, 1.4_f64.sqrt(), 1e-14));
        assert!(close(s.minus, -(1.4_f64.sqrt()), 1e-14));
    }

    #[test]
    fn speeds_desingularize() {
        let m = ScalarBurgers::new(-1.0, 1.0);
        let z = State([0.0]);
        let s = local_speeds(&m, &z, &z, Direction::X, 1e-10);
        assert_eq!(s, SpeedPair::new(-1e-10, 1e-10));
    }

    #[test]
    fn intermediate_state_examples() {
        let g = gas();
        let u = State([1.0, 0.3, 2.0]);
        let s = SpeedPair::new(-2.0, 3.0);
        let r = intermediate_state(s, &u, &u, |v| euler_flux_x(v, g));
        assert!((r - u).max_abs() < 1e-15);
        let a = State([1.0, 2.0, 3.0]);
        let b = State([3.0, 0.0, 1.0]);
        let r = intermediate_state(SpeedPair::new(-1.5, 1.5), &a, &b, |_| State::ZERO);
        assert_eq!(r, (a + b) * 0.5);
    }

    #[test]
    fn intermediate_state_123_interface() {
        let g = gas();
        let um = State([1.0, -2.0, 2.375]);
        let up = State([1.0, 2.0, 2.375]);
        let s = SpeedPair::new(-0.21_f64.sqrt() - 2.0, 0.21_f64.sqrt() + 2.0);
        let r = intermediate_state(s, &up, &um, |v| euler_flux_x(v, g));
        assert!(close(r[0], 0.18641560395545334, 1e-13));
        assert!(r[1].abs() < 1e-15);
        assert!(close(r[2], 0.3206993999875198, 1e-13));
        assert!(close(pressure_unchecked(&r, 1.4), 0.12827975999500787, 1e-12));
    }

    #[test]
    fn anti_diffusion_examples() {
        let d = anti_diffusion(&State([2.0]), &State([0.0]), &State([0.5]));
        assert_eq!(d, State([0.5]));
        let d = anti_diffusion(&State([2.0]), &State([0.0]), &State([3.0]));
        assert_eq!(d, State([0.0]));
        let u = State([1.0, 1.0]);
        assert_eq!(anti_diffusion(&u, &u, &u), State::ZERO);
    }

    #[test]
    fn beta_examples() {
        use crate::euler::pressure_scaling;
        // p(u*) = 0.4 and p_min = -0.4
        let b = pressure_scaling(0.4, -0.4, 1e-13);
        assert!((b - (0.4 - 1e-13) / 0.8).abs() < 1e-16);
        assert_eq!(pressure_scaling(0.4, 0.2, 1e-13), 1.0);
        let u = State([1.0, 0.5, 3.0]);
        assert_eq!(bp_beta_euler(&u, &u, &u, 1.4), 1.0);
    }

    #[test]
    fn burgers_flux_hand_value() {
        let m = ScalarBurgers::new(-1.0, 1.0);
        let s = local_speeds(&m, &State([1.0]), &State([-1.0]), Direction::X, EPS_DESING);
        assert_eq!(s, SpeedPair::new(-1.0, 1.0));
        let i = InterfaceData::build(&m, State([1.0]), State([-1.0]), s, Direction::X, SchemeVariant::Bpcu);
        assert_eq!(i.u_star, State([0.0]));
        assert_eq!(i.d, State([-1.0]));
        assert_eq!(i.beta, 1.0);
        assert!((i.flux[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn consistency_and_reformulation() {
        let m = Euler1D::new(gas());
        let u = from_primitive::<3>(1.2, &[0.4], 0.9, 1.4);
        let s = local_speeds(&m, &u, &u, Direction::X, EPS_DESING);
        let i = InterfaceData::build(&m, u, u, s, Direction::X, SchemeVariant::Bpcu);
        assert!((i.flux - m.flux(&u, Direction::X)).max_abs() < 1e-14);

        let um = from_primitive::<3>(1.0, &[0.75], 1.0, 1.4);
        let up = from_primitive::<3>(0.125, &[0.0], 0.1, 1.4);
        let s = local_speeds(&m, &um, &up, Direction::X, EPS_DESING);
        let i = InterfaceData::build(&m, um, up, s, Direction::X, SchemeVariant::Bpcu);
        let (star_plus, star_minus) = i.rebuilt();
        let refo = flux_reformulated(s, &um, &m.flux(&um, Direction::X), &star_plus);
        assert!((refo - i.flux).max_abs() <= 1e-12 * i.flux.max_abs());
        let comb = (star_minus * s.plus - star_plus * s.minus) * (1.0 / s.width());
        assert!((comb - i.u_star).max_abs() <= 1e-13 * i.u_star.max_abs());
    }

    #[test]
    fn zero_beta_is_plain_cu_flux() {
        let m = Euler1D::new(gas());
        let um = from_primitive::<3>(1.0, &[0.0], 1.0, 1.4);
        let up = from_primitive::<3>(0.125, &[0.0], 0.1, 1.4);
        let s = local_speeds(&m, &um, &up, Direction::X, EPS_DESING);
        let i = InterfaceData::build(&m, um, up, s, Direction::X, SchemeVariant::Scheme2);
        assert_eq!(i.beta, 0.0);
        let (fm, fp) = (m.flux(&um, Direction::X), m.flux(&up, Direction::X));
        let inv = 1.0 / s.width();
        let expect = (fm * s.plus - fp * s.minus) * inv + (up - um) * (s.plus * s.minus * inv);
        assert!((expect - i.flux).max_abs() < 1e-14);
    }

    #[test]
    fn decomposition_cfl_boundary() {
        let m = ScalarBurgers::new(-2.0, 2.0);
        let u = vec![State([1.0]); 3];
        let mk = || {
            let s = local_speeds(&m, &u[0], &u[0], Direction::X, EPS_DESING);
            InterfaceData::build(&m, u[0], u[0], s, Direction::X, SchemeVariant::Bpcu)
        };
        let ifaces = vec![mk(); 4];
        // width 1: lambda = 0.5 sits on the bound, 0.6 violates it
        let a = decomposition_residual_1d(&m, &u, &ifaces, 0.5);
        assert!(a.residual < 1e-15);
        assert!(a.min_coefficient.abs() < 1e-15 && a.is_convex());
        let a = decomposition_residual_1d(&m, &u, &ifaces, 0.6);
        assert!(!a.is_convex());
    }

    #[test]
    fn variant_names() {
        for v in SchemeVariant::ALL {
            assert_eq!(v.cli_name().parse::<SchemeVariant>().unwrap(), v);
        }
        assert!("weno".parse::<SchemeVariant>().is_err());
    }
}
