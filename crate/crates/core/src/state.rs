//! Fixed-size conserved-state vectors.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A vector of `M` conserved quantities (density, momenta, energy, ...).
#[derive(Clone, Copy, PartialEq)]
pub struct State<const M: usize>(pub [f64; M]);

/// Alias used where the state is a conserved-variable vector of a model.
pub type ConservedState<const M: usize> = State<M>;

impl<const M: usize> State<M> {
    pub const ZERO: Self = State([0.0; M]);

    #[inline]
    pub const fn new(components: [f64; M]) -> Self {
        State(components)
    }

    #[inline]
    pub fn components(&self) -> &[f64; M] {
        &self.0
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Component-wise map with a second state.
    #[inline]
    pub fn zip_map(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut out = [0.0; M];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(self.0[i], other.0[i]);
        }
        State(out)
    }

    #[inline]
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut out = self.0;
        for c in out.iter_mut() {
            *c = f(*c);
        }
        State(out)
    }

    /// Largest absolute component.
    #[inline]
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl<const M: usize> Default for State<M> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const M: usize> fmt::Debug for State<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<const M: usize> From<[f64; M]> for State<M> {
    fn from(c: [f64; M]) -> Self {
        State(c)
    }
}

impl<const M: usize> Index<usize> for State<M> {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const M: usize> IndexMut<usize> for State<M> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const M: usize> Add for State<M> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a + b)
    }
}

impl<const M: usize> Sub for State<M> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a - b)
    }
}

impl<const M: usize> Neg for State<M> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

impl<const M: usize> Mul<f64> for State<M> {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.map(|a| a * s)
    }
}

impl<const M: usize> Mul<State<M>> for f64 {
    type Output = State<M>;
    #[inline]
    fn mul(self, u: State<M>) -> State<M> {
        u * self
    }
}

impl<const M: usize> AddAssign for State<M> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..M {
            self.0[i] += rhs.0[i];
        }
    }
}

impl<const M: usize> SubAssign for State<M> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..M {
            self.0[i] -= rhs.0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = State([1.0, 2.0, 3.0]);
        let b = State([0.5, -1.0, 2.0]);
        assert_eq!(a + b, State([1.5, 1.0, 5.0]));
        assert_eq!(a - b, State([0.5, 3.0, 1.0]));
        assert_eq!(2.0 * a, State([2.0, 4.0, 6.0]));
        assert_eq!(-b, State([-0.5, 1.0, -2.0]));
        assert_eq!(b.max_abs(), 2.0);
    }

    #[test]
    fn finiteness() {
        assert!(State([1.0, 0.0]).is_finite());
        assert!(!State([1.0, f64::NAN]).is_finite());
        assert!(!State([f64::INFINITY]).is_finite());
    }
}
