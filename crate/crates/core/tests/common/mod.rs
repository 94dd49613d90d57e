//! Random admissible states shared by the property and acceptance tests.
#![allow(dead_code)]

use bpcu_core::euler::from_primitive;
use bpcu_core::State;
use rand::Rng;

pub const GAMMA: f64 = 1.4;

/// Log-uniform sample in `(lo, hi)`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Internal energy is resolvable in double precision relative to `E`.
pub fn resolvable(rho: f64, v2: f64, p: f64, gamma: f64) -> bool {
    let internal = p / (gamma - 1.0);
    internal >= 1e-10 * (internal + 0.5 * rho * v2)
}

/// Admissible 1-D state with `rho, p` in `(1e-12, 1e3)` and `|v| <= 1e3`,
/// drawn until its pressure is resolvable.
pub fn admissible_1d<R: Rng>(rng: &mut R) -> State<3> {
    loop {
        let rho = log_uniform(rng, 1e-12, 1e3);
        let p = log_uniform(rng, 1e-12, 1e3);
        // half the samples use small velocities so near-vacuum states are common
        let vmax = if rng.gen_bool(0.5) { 1e3 } else { 1.0 };
        let v = rng.gen_range(-vmax..vmax);
        if resolvable(rho, v * v, p, GAMMA) {
            return from_primitive::<3>(rho, &[v], p, GAMMA);
        }
    }
}

/// Admissible state of moderate size for whole-field tests.
pub fn moderate_1d<R: Rng>(rng: &mut R) -> State<3> {
    let rho = log_uniform(rng, 1e-2, 10.0);
    let p = log_uniform(rng, 1e-2, 10.0);
    let v = rng.gen_range(-2.0..2.0);
    from_primitive::<3>(rho, &[v], p, GAMMA)
}

pub fn moderate_2d<R: Rng>(rng: &mut R) -> State<4> {
    let rho = log_uniform(rng, 1e-2, 10.0);
    let p = log_uniform(rng, 1e-2, 10.0);
    let v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    from_primitive::<4>(rho, &v, p, GAMMA)
}

/// Arbitrary finite conserved vector, admissible or not.
pub fn arbitrary_1d<R: Rng>(rng: &mut R) -> State<3> {
    State([
        rng.gen_range(-1.0..10.0),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-1.0..20.0),
    ])
}
