//! Generalized-minmod piecewise-linear reconstruction and the scaling
//! limiter that pulls point values back into the admissible set.

use crate::model::{AdmissibilitySpec, EquationModel};
use crate::state::State;

/// Default minmod parameter.
pub const DEFAULT_THETA: f64 = 1.3;

/// Minimum of the arguments if all are positive, maximum if all are
/// negative, zero otherwise. Returns 0 for an empty slice.
pub fn minmod(c: &[f64]) -> f64 {
    let Some((&first, rest)) = c.split_first() else {
        return 0.0;
    };
    if first > 0.0 && rest.iter().all(|&v| v > 0.0) {
        rest.iter().fold(first, |m, &v| m.min(v))
    } else if first < 0.0 && rest.iter().all(|&v| v < 0.0) {
        rest.iter().fold(first, |m, &v| m.max(v))
    } else {
        0.0
    }
}

#[inline]
pub fn minmod2(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

#[inline]
pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Component-wise two-argument minmod.
#[inline]
pub fn minmod_state<const M: usize>(a: &State<M>, b: &State<M>) -> State<M> {
    a.zip_map(b, minmod2)
}

/// Slopes `minmod(theta*backward, central, theta*forward)` of a line of cell
/// averages with spacing `h`. The first and last entries have no neighbour
/// on one side and get a zero slope.
pub fn compute_slopes<const M: usize>(values: &[State<M>], theta: f64, h: f64) -> Vec<State<M>> {
    let n = values.len();
    let mut out = vec![State::ZERO; n];
    for j in 1..n.saturating_sub(1) {
        let (l, c, r) = (&values[j - 1], &values[j], &values[j + 1]);
        let mut s = [0.0; M];
        for m in 0..M {
            let back = (c[m] - l[m]) / h;
            let fwd = (r[m] - c[m]) / h;
            let central = (r[m] - l[m]) / (2.0 * h);
            s[m] = minmod3(theta * back, central, theta * fwd);
        }
        out[j] = State(s);
    }
    out
}

/// One-sided point values of every cell of a line: `west[j]` is the value at
/// the left face of cell `j` (`u+` of that interface), `east[j]` the value at
/// its right face (`u-` of that interface).
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceValues<const M: usize> {
    pub west: Vec<State<M>>,
    pub east: Vec<State<M>>,
}

impl<const M: usize> InterfaceValues<M> {
    /// `(u-, u+)` at the interface between cells `j` and `j + 1`.
    #[inline]
    pub fn at_interface(&self, j: usize) -> (State<M>, State<M>) {
        (self.east[j], self.west[j + 1])
    }

    pub fn len(&self) -> usize {
        self.west.len()
    }

    pub fn is_empty(&self) -> bool {
        self.west.is_empty()
    }
}

/// Linear reconstruction `ubar +- h/2 * slope`.
pub fn reconstruct<const M: usize>(values: &[State<M>], slopes: &[State<M>], h: f64) -> InterfaceValues<M> {
    let half = 0.5 * h;
    let (west, east) = values
        .iter()
        .zip(slopes)
        .map(|(u, s)| (*u - *s * half, *u + *s * half))
        .unzip();
    InterfaceValues { west, east }
}

/// Scaling factor `Theta = min_i delta_i` for an admissible set made of
/// concave constraints. Strict constraints are relaxed to
/// `phi >= min(floor, phi(ubar))`, weak ones to `phi >= 0`.
pub fn scaling_theta_concave<const M: usize>(
    ubar: &State<M>,
    u_plus: &State<M>,
    u_minus: &State<M>,
    spec: &AdmissibilitySpec<M>,
) -> f64 {
    debug_assert!(spec.all_concave(), "scaling limiter needs concave constraints");
    let strict = spec.strict.iter().map(|c| (c, true));
    let weak = spec.weak.iter().map(|c| (c, false));
    strict.chain(weak).fold(1.0_f64, |theta, (c, is_strict)| {
        let phi_bar = c.eval(ubar);
        let eps = if is_strict {
            spec.epsilon_floor.min(phi_bar)
        } else {
            0.0
        };
        let phi_min = c.eval(u_plus).min(c.eval(u_minus));
        theta.min(concave_delta(phi_bar, phi_min, eps))
    })
}

/// `min((phi_bar - eps) / (phi_bar - phi_min), 1)` when `phi_min < eps`,
/// otherwise 1. Clamped to `[0, 1]`.
#[inline]
pub fn concave_delta(phi_bar: f64, phi_min: f64, eps: f64) -> f64 {
    if phi_min >= eps {
        1.0
    } else {
        ((phi_bar - eps) / (phi_bar - phi_min)).clamp(0.0, 1.0)
    }
}

/// Rescale the point values of each cell about its average with the
/// model's scaling factor. Returns the factor applied to each cell.
pub fn bp_limit<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    averages: &[State<M>],
    values: &mut InterfaceValues<M>,
) -> Vec<f64> {
    averages
        .iter()
        .zip(values.west.iter_mut().zip(values.east.iter_mut()))
        .map(|(ubar, (w, e))| {
            let delta = model.point_value_scaling(ubar, e, w);
            if delta < 1.0 {
                *w = *ubar + (*w - *ubar) * delta;
                *e = *ubar + (*e - *ubar) * delta;
            }
            delta
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{from_primitive, pressure_unchecked, Euler1D, GasParams};
    use crate::model::Constraint;

    #[test]
    fn minmod_definition() {
        assert_eq!(minmod(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(minmod(&[-2.0, -0.5, -1.0]), -0.5);
        assert_eq!(minmod(&[1.0, -1.0, 2.0]), 0.0);
        assert_eq!(minmod3(1.0, 2.0, 3.0), 1.0);
        assert_eq!(minmod3(-2.0, -0.5, -1.0), -0.5);
        assert_eq!(minmod2(1.5, 0.5), 0.5);
        assert_eq!(minmod2(0.0, 0.5), 0.0);
    }

    #[test]
    fn slope_examples() {
        let s = |v: [f64; 3]| compute_slopes(&v.map(|x| State([x])), 1.3, 1.0)[1][0];
        assert_eq!(s([0.0, 1.0, 2.0]), 1.0);
        assert_eq!(s([0.0, 1.0, 0.0]), 0.0);
        assert!((s([0.0, 1.0, 3.0]) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_examples() {
        let iv = reconstruct(&[State([1.0])], &[State([2.0])], 0.1);
        assert!((iv.east[0][0] - 1.1).abs() < 1e-15);
        assert!((iv.west[0][0] - 0.9).abs() < 1e-15);
        let iv = reconstruct(&[State([3.0])], &[State([0.0])], 0.1);
        assert_eq!(iv.east[0], State([3.0]));
        assert_eq!(iv.west[0], State([3.0]));
    }

    #[test]
    fn linear_data_is_reproduced() {
        let h = 0.25;
        let a = 2.0;
        let xs: Vec<f64> = (0..6).map(|j| (j as f64 + 0.5) * h).collect();
        let u: Vec<State<1>> = xs.iter().map(|x| State([a * x])).collect();
        let iv = reconstruct(&u, &compute_slopes(&u, 1.3, h), h);
        for (j, x) in xs.iter().enumerate().take(5).skip(1) {
            assert!((iv.east[j][0] - a * (x + 0.5 * h)).abs() < 1e-14);
            assert!((iv.west[j][0] - a * (x - 0.5 * h)).abs() < 1e-14);
        }
    }

    #[test]
    fn concave_theta_examples() {
        let spec = AdmissibilitySpec::new(Vec::new(), vec![Constraint::new("phi", true, |u: &State<1>| u[0])]);
        assert_eq!(
            scaling_theta_concave(&State([2.0]), &State([-2.0]), &State([1.0]), &spec),
            0.5
        );
        assert_eq!(
            scaling_theta_concave(&State([2.0]), &State([3.0]), &State([1.0]), &spec),
            1.0
        );
    }

    #[test]
    fn euler_delta_example() {
        // p(ubar) = 1 and p_min = -1 give delta = (1 - 1e-13) / 2
        let d = concave_delta(1.0, -1.0, 1e-13_f64.min(1.0));
        assert!((d - (1.0 - 1e-13) / 2.0).abs() < 1e-16);
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn limiter_repairs_pressure_and_keeps_mean() {
        let gas = GasParams::new(1.4).unwrap();
        let model = Euler1D::new(gas);
        let ubar = from_primitive::<3>(1.0, &[0.0], 1.0, 1.4);
        // large momentum slope makes the point-value pressures negative
        let slope = State([0.0, 6.0, 0.0]);
        let mut iv = InterfaceValues {
            west: vec![ubar - slope * 0.5],
            east: vec![ubar + slope * 0.5],
        };
        assert!(pressure_unchecked(&iv.east[0], 1.4) < 0.0);
        let delta = bp_limit(&model, &[ubar], &mut iv);
        assert!(delta[0] < 1.0 && delta[0] > 0.0);
        for v in [iv.west[0], iv.east[0]] {
            assert!(pressure_unchecked(&v, 1.4) >= 1e-13 * (1.0 - 1e-9));
        }
        let mean = (iv.west[0] + iv.east[0]) * 0.5;
        assert!((mean - ubar).max_abs() < 1e-15);
    }

    #[test]
    fn admissible_values_are_untouched() {
        let model = Euler1D::new(GasParams::new(1.4).unwrap());
        let u: Vec<State<3>> = (0..5)
            .map(|j| from_primitive(1.0 + 0.1 * j as f64, &[0.2], 1.0, 1.4))
            .collect();
        let mut iv = reconstruct(&u, &compute_slopes(&u, 1.3, 0.1), 0.1);
        let before = iv.clone();
        let delta = bp_limit(&model, &u, &mut iv);
        assert!(delta.iter().all(|&d| d == 1.0));
        assert_eq!(iv, before);
    }
}
