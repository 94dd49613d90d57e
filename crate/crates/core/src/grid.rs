//! Uniform Cartesian grids, activity masks, and boundary handling.
//!
//! The schemes are dimension-by-dimension: x-fluxes only read cells of the
//! same row and y-fluxes only cells of the same column. A mesh is therefore
//! stored as a set of [`Line`]s (maximal runs of active cells along a row or
//! column). Each line end carries the ghost rule for that end: a domain
//! boundary condition, or a solid wall where the run meets an inactive cell.
//! Ghost values are produced per line, so a cell at a re-entrant corner gets
//! an x-mirror for the x-sweep and a y-mirror for the y-sweep, and diagonal
//! ghost cells are never needed.

use crate::error::ConfigError;
use crate::model::{Direction, EquationModel};
use crate::state::State;

/// Number of ghost cells on each side of a line.
pub const GHOST: usize = 2;

/// Uniform grid of `nx * ny` cells (`ny == 1` in 1-D).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub ghost: usize,
}

impl Grid {
    pub fn new_1d(x_min: f64, x_max: f64, nx: usize) -> Result<Self, ConfigError> {
        if nx == 0 || !(x_max > x_min) {
            return Err(ConfigError::invalid(format!(
                "bad 1-D grid: [{x_min}, {x_max}] with {nx} cells"
            )));
        }
        Ok(Grid {
            dim: 1,
            nx,
            ny: 1,
            dx: (x_max - x_min) / nx as f64,
            dy: 1.0,
            x0: x_min,
            y0: 0.0,
            ghost: GHOST,
        })
    }

    pub fn new_2d(
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self, ConfigError> {
        if nx == 0 || ny == 0 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(ConfigError::invalid(format!(
                "bad 2-D grid: [{x_min}, {x_max}]x[{y_min}, {y_max}] with {nx}x{ny} cells"
            )));
        }
        Ok(Grid {
            dim: 2,
            nx,
            ny,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
            x0: x_min,
            y0: y_min,
            ghost: GHOST,
        })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        k * self.nx + j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn x_center(&self, j: usize) -> f64 {
        self.x0 + (j as f64 + 0.5) * self.dx
    }

    pub fn y_center(&self, k: usize) -> f64 {
        self.y0 + (k as f64 + 0.5) * self.dy
    }

    pub fn center(&self, idx: usize) -> (f64, f64) {
        let (j, k) = self.coords(idx);
        (self.x_center(j), if self.dim == 1 { 0.0 } else { self.y_center(k) })
    }

    /// Cell length in 1-D, area in 2-D.
    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx
        } else {
            self.dx * self.dy
        }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.nx as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + self.ny as f64 * self.dy
    }
}

/// Boundary condition on one stretch of the domain boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition<const M: usize> {
    Periodic,
    /// Zero-order extrapolation of the nearest interior cell.
    Free,
    /// Fixed conserved state in the ghost cells.
    Inflow(State<M>),
    /// Mirror image with the wall-normal momentum negated.
    SolidWall,
}

/// Condition override on the open coordinate interval `(lo, hi)` of a side.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySegment<const M: usize> {
    pub lo: f64,
    pub hi: f64,
    pub condition: BoundaryCondition<M>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideBoundary<const M: usize> {
    pub default: BoundaryCondition<M>,
    pub segments: Vec<BoundarySegment<M>>,
}

impl<const M: usize> SideBoundary<M> {
    pub fn uniform(condition: BoundaryCondition<M>) -> Self {
        SideBoundary {
            default: condition,
            segments: Vec::new(),
        }
    }

    pub fn with_segment(mut self, lo: f64, hi: f64, condition: BoundaryCondition<M>) -> Self {
        self.segments.push(BoundarySegment { lo, hi, condition });
        self
    }

    /// Condition for the boundary face centred at coordinate `s`. A segment
    /// applies when `s` lies strictly inside it.
    pub fn condition_at(&self, s: f64) -> &BoundaryCondition<M> {
        self.segments
            .iter()
            .find(|seg| seg.lo < s && s < seg.hi)
            .map(|seg| &seg.condition)
            .unwrap_or(&self.default)
    }

    fn conditions(&self) -> impl Iterator<Item = &BoundaryCondition<M>> {
        std::iter::once(&self.default).chain(self.segments.iter().map(|s| &s.condition))
    }

    fn is_periodic(&self) -> bool {
        matches!(self.default, BoundaryCondition::Periodic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec<const M: usize> {
    pub left: SideBoundary<M>,
    pub right: SideBoundary<M>,
    pub bottom: SideBoundary<M>,
    pub top: SideBoundary<M>,
}

impl<const M: usize> BoundarySpec<M> {
    pub fn uniform(condition: BoundaryCondition<M>) -> Self {
        let side = SideBoundary::uniform(condition);
        BoundarySpec {
            left: side.clone(),
            right: side.clone(),
            bottom: side.clone(),
            top: side,
        }
    }

    pub fn side(&self, side: Side) -> &SideBoundary<M> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    /// Periodic sides must come in opposite pairs and cannot be mixed with
    /// segments.
    pub fn validate(&self, dim: usize) -> Result<(), ConfigError> {
        let pairs: &[(Side, Side)] = if dim == 1 {
            &[(Side::Left, Side::Right)]
        } else {
            &[(Side::Left, Side::Right), (Side::Bottom, Side::Top)]
        };
        for &(a, b) in pairs {
            let (sa, sb) = (self.side(a), self.side(b));
            for s in [sa, sb] {
                let periodic_segments = s
                    .conditions()
                    .filter(|c| matches!(c, BoundaryCondition::Periodic))
                    .count();
                if periodic_segments > 0 && !(s.is_periodic() && s.segments.is_empty()) {
                    return Err(ConfigError::invalid(
                        "periodic boundaries cannot be combined with segments",
                    ));
                }
            }
            if sa.is_periodic() != sb.is_periodic() {
                return Err(ConfigError::invalid(format!(
                    "periodic boundary on {a:?} must be paired with {b:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Condition applied to a face between an active and an inactive cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceTag {
    SolidWall,
    Free,
}

/// Time-independent cell activity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMask {
    nx: usize,
    ny: usize,
    active: Vec<bool>,
    tag: FaceTag,
}

impl CellMask {
    pub fn all_active(grid: &Grid) -> Self {
        CellMask {
            nx: grid.nx,
            ny: grid.ny,
            active: vec![true; grid.n_cells()],
            tag: FaceTag::SolidWall,
        }
    }

    /// Mask from a predicate on cell centres; inactive faces are walls.
    pub fn from_fn(grid: &Grid, active: impl Fn(f64, f64) -> bool) -> Self {
        CellMask {
            nx: grid.nx,
            ny: grid.ny,
            active: (0..grid.n_cells())
                .map(|i| {
                    let (x, y) = grid.center(i);
                    active(x, y)
                })
                .collect(),
            tag: FaceTag::SolidWall,
        }
    }

    pub fn with_tag(mut self, tag: FaceTag) -> Self {
        self.tag = tag;
        self
    }

    #[inline]
    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// Tag of the face of cell `(j, k)` on `side`, if that face separates an
    /// active cell from an inactive one.
    pub fn face_tag(&self, j: usize, k: usize, side: Side) -> Option<FaceTag> {
        let neighbour = match side {
            Side::Left => (j > 0).then(|| (j - 1, k)),
            Side::Right => (j + 1 < self.nx).then_some((j + 1, k)),
            Side::Bottom => (k > 0).then(|| (j, k - 1)),
            Side::Top => (k + 1 < self.ny).then_some((j, k + 1)),
        }?;
        let a = self.active[k * self.nx + j];
        let b = self.active[neighbour.1 * self.nx + neighbour.0];
        (a != b).then_some(self.tag)
    }
}

/// A maximal run of active cells along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<const M: usize> {
    pub dir: Direction,
    /// Flat cell indices in increasing coordinate order.
    pub cells: Vec<usize>,
    pub lo: BoundaryCondition<M>,
    pub hi: BoundaryCondition<M>,
}

impl<const M: usize> Line<M> {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

fn tag_condition<const M: usize>(tag: FaceTag) -> BoundaryCondition<M> {
    match tag {
        FaceTag::SolidWall => BoundaryCondition::SolidWall,
        FaceTag::Free => BoundaryCondition::Free,
    }
}

/// Pad `interior` with two ghost cells on each side.
///
/// Periodic wraps around, `Free` copies the nearest interior cell, `Inflow`
/// writes the fixed state and `SolidWall` mirrors the interior cells with the
/// `dir`-momentum negated.
pub fn fill_ghosts<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    model: &Mdl,
    interior: &[State<M>],
    lo: &BoundaryCondition<M>,
    hi: &BoundaryCondition<M>,
    dir: Direction,
) -> Vec<State<M>> {
    let n = interior.len();
    assert!(n > 0, "empty line");
    let mut out = Vec::with_capacity(n + 2 * GHOST);
    // ghost g (1-based distance from the boundary)
    let ghost = |bc: &BoundaryCondition<M>, g: usize, at_lo: bool| -> State<M> {
        let near = |d: usize| {
            let d = d.min(n - 1);
            if at_lo {
                interior[d]
            } else {
                interior[n - 1 - d]
            }
        };
        match bc {
            BoundaryCondition::Periodic => {
                let d = (g - 1) % n;
                if at_lo {
                    interior[n - 1 - d]
                } else {
                    interior[d]
                }
            }
            BoundaryCondition::Free => near(0),
            BoundaryCondition::Inflow(s) => *s,
            BoundaryCondition::SolidWall => model.reflect(&near(g - 1), dir),
        }
    };
    out.push(ghost(lo, 2, true));
    out.push(ghost(lo, 1, true));
    out.extend_from_slice(interior);
    out.push(ghost(hi, 1, false));
    out.push(ghost(hi, 2, false));
    out
}

/// Grid, mask and resolved boundary lines.
#[derive(Debug, Clone)]
pub struct Mesh<const M: usize> {
    pub grid: Grid,
    pub mask: CellMask,
    pub x_lines: Vec<Line<M>>,
    pub y_lines: Vec<Line<M>>,
    /// For each cell: `(line, offset)` of the x- and y-line containing it.
    x_slot: Vec<Option<(usize, usize)>>,
    y_slot: Vec<Option<(usize, usize)>>,
}

impl<const M: usize> Mesh<M> {
    pub fn new(grid: Grid, mask: CellMask, boundary: &BoundarySpec<M>) -> Result<Self, ConfigError> {
        boundary.validate(grid.dim)?;
        if mask.active.len() != grid.n_cells() {
            return Err(ConfigError::invalid("mask does not match grid"));
        }
        if mask.n_active() == 0 {
            return Err(ConfigError::invalid("mask has no active cells"));
        }
        let tag = mask.tag;
        let mut x_lines = Vec::new();
        for k in 0..grid.ny {
            let y = grid.y_center(k);
            let runs = runs(grid.nx, |j| mask.is_active(grid.index(j, k)));
            for (start, end) in runs {
                let lo = if start == 0 {
                    boundary.left.condition_at(y).clone()
                } else {
                    tag_condition(tag)
                };
                let hi = if end == grid.nx {
                    boundary.right.condition_at(y).clone()
                } else {
                    tag_condition(tag)
                };
                check_periodic(&lo, &hi, start, end, grid.nx)?;
                x_lines.push(Line {
                    dir: Direction::X,
                    cells: (start..end).map(|j| grid.index(j, k)).collect(),
                    lo,
                    hi,
                });
            }
        }
        let mut y_lines = Vec::new();
        if grid.dim == 2 {
            for j in 0..grid.nx {
                let x = grid.x_center(j);
                for (start, end) in runs(grid.ny, |k| mask.is_active(grid.index(j, k))) {
                    let lo = if start == 0 {
                        boundary.bottom.condition_at(x).clone()
                    } else {
                        tag_condition(tag)
                    };
                    let hi = if end == grid.ny {
                        boundary.top.condition_at(x).clone()
                    } else {
                        tag_condition(tag)
                    };
                    check_periodic(&lo, &hi, start, end, grid.ny)?;
                    y_lines.push(Line {
                        dir: Direction::Y,
                        cells: (start..end).map(|k| grid.index(j, k)).collect(),
                        lo,
                        hi,
                    });
                }
            }
        }
        let slots = |lines: &[Line<M>]| {
            let mut slot = vec![None; grid.n_cells()];
            for (li, line) in lines.iter().enumerate() {
                for (o, &c) in line.cells.iter().enumerate() {
                    slot[c] = Some((li, o));
                }
            }
            slot
        };
        let x_slot = slots(&x_lines);
        let y_slot = slots(&y_lines);
        Ok(Mesh {
            grid,
            mask,
            x_lines,
            y_lines,
            x_slot,
            y_slot,
        })
    }

    /// Rectangular mesh with every cell active.
    pub fn rectangular(grid: Grid, boundary: &BoundarySpec<M>) -> Result<Self, ConfigError> {
        let mask = CellMask::all_active(&grid);
        Self::new(grid, mask, boundary)
    }

    pub fn lines(&self, dir: Direction) -> &[Line<M>] {
        match dir {
            Direction::X => &self.x_lines,
            Direction::Y => &self.y_lines,
        }
    }

    /// `(line, offset)` of `cell` in the lines along `dir`.
    pub fn slot(&self, cell: usize, dir: Direction) -> Option<(usize, usize)> {
        match dir {
            Direction::X => self.x_slot[cell],
            Direction::Y => self.y_slot[cell],
        }
    }

    pub fn spacing(&self, dir: Direction) -> f64 {
        match dir {
            Direction::X => self.grid.dx,
            Direction::Y => self.grid.dy,
        }
    }

    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.grid.n_cells()).filter(|&i| self.mask.is_active(i))
    }

    /// Padded values of `line` drawn from `field`.
    pub fn padded_line<Mdl: EquationModel<M> + ?Sized>(
        &self,
        model: &Mdl,
        field: &[State<M>],
        line: &Line<M>,
    ) -> Vec<State<M>> {
        let interior: Vec<State<M>> = line.cells.iter().map(|&c| field[c]).collect();
        fill_ghosts(model, &interior, &line.lo, &line.hi, line.dir)
    }
}

fn runs(n: usize, active: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..n {
        match (active(i), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, n));
    }
    out
}

fn check_periodic<const M: usize>(
    lo: &BoundaryCondition<M>,
    hi: &BoundaryCondition<M>,
    start: usize,
    end: usize,
    n: usize,
) -> Result<(), ConfigError> {
    let lp = matches!(lo, BoundaryCondition::Periodic);
    let hp = matches!(hi, BoundaryCondition::Periodic);
    if lp != hp || ((lp || hp) && (start != 0 || end != n)) {
        return Err(ConfigError::invalid(
            "periodic boundary requires an unmasked line spanning the domain",
        ));
    }
    if lp && end - start < GHOST {
        return Err(ConfigError::invalid("periodic line shorter than the ghost width"));
    }
    Ok(())
}

/// Mask of the shock-diffraction domain `[0,1]x[6,11] U [1,13]x[0,11]`:
/// the cells of `[0,1]x[0,6]` are inactive.
pub fn diffraction_mask(grid: &Grid, corner: (f64, f64)) -> CellMask {
    CellMask::from_fn(grid, |x, y| !(x < corner.0 && y < corner.1))
}

/// Mask of a wind tunnel with a forward-facing step occupying
/// `[step_x, x_max] x [y_min, step_y]`.
pub fn step_mask(grid: &Grid, step_x: f64, step_y: f64) -> CellMask {
    CellMask::from_fn(grid, |x, y| !(x > step_x && y < step_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{Euler1D, Euler2D, GasParams};

    fn e1() -> Euler1D {
        Euler1D::new(GasParams::new(1.4).unwrap())
    }

    fn states(n: usize) -> Vec<State<3>> {
        (0..n)
            .map(|i| State([1.0 + i as f64, 0.1 * i as f64, 5.0 + i as f64]))
            .collect()
    }

    #[test]
    fn free_copies_nearest_cell() {
        let u = states(4);
        let p = fill_ghosts(
            &e1(),
            &u,
            &BoundaryCondition::Free,
            &BoundaryCondition::Free,
            Direction::X,
        );
        assert_eq!(p.len(), 8);
        assert_eq!(p[0], u[0]);
        assert_eq!(p[1], u[0]);
        assert_eq!(p[6], u[3]);
        assert_eq!(p[7], u[3]);
        assert_eq!(&p[2..6], &u[..]);
    }

    #[test]
    fn periodic_wraps() {
        let u = states(4);
        let p = fill_ghosts(
            &e1(),
            &u,
            &BoundaryCondition::Periodic,
            &BoundaryCondition::Periodic,
            Direction::X,
        );
        assert_eq!(p[0], u[2]);
        assert_eq!(p[1], u[3]);
        assert_eq!(p[6], u[0]);
        assert_eq!(p[7], u[1]);
    }

    #[test]
    fn wall_mirrors_normal_momentum() {
        let m = Euler2D::new(GasParams::new(1.4).unwrap());
        let u = vec![State([1.0, 2.0, 3.0, 20.0]), State([2.0, 1.0, -1.0, 20.0])];
        let p = fill_ghosts(
            &m,
            &u,
            &BoundaryCondition::SolidWall,
            &BoundaryCondition::Free,
            Direction::X,
        );
        assert_eq!(p[1], State([1.0, -2.0, 3.0, 20.0]));
        assert_eq!(p[0], State([2.0, -1.0, -1.0, 20.0]));
        let p = fill_ghosts(
            &m,
            &u,
            &BoundaryCondition::Free,
            &BoundaryCondition::SolidWall,
            Direction::Y,
        );
        assert_eq!(p[2 + 2], State([2.0, 1.0, 1.0, 20.0]));
    }

    #[test]
    fn inflow_writes_state() {
        let s = State([5.0, 1.0, 3.0]);
        let u = states(3);
        let p = fill_ghosts(
            &e1(),
            &u,
            &BoundaryCondition::Inflow(s),
            &BoundaryCondition::Free,
            Direction::X,
        );
        assert_eq!(p[0], s);
        assert_eq!(p[1], s);
    }

    #[test]
    fn periodic_must_pair() {
        let mut b = BoundarySpec::<3>::uniform(BoundaryCondition::Free);
        b.left = SideBoundary::uniform(BoundaryCondition::Periodic);
        assert!(b.validate(1).is_err());
        b.right = SideBoundary::uniform(BoundaryCondition::Periodic);
        assert!(b.validate(1).is_ok());
        let grid = Grid::new_1d(0.0, 1.0, 8).unwrap();
        assert!(Mesh::rectangular(grid, &b).is_ok());
    }

    #[test]
    fn segment_selection_is_strict() {
        let s = SideBoundary::<1>::uniform(BoundaryCondition::Free).with_segment(
            -0.05,
            0.05,
            BoundaryCondition::Inflow(State([1.0])),
        );
        assert!(matches!(s.condition_at(0.0), BoundaryCondition::Inflow(_)));
        assert!(matches!(s.condition_at(0.05), BoundaryCondition::Free));
        assert!(matches!(s.condition_at(-0.2), BoundaryCondition::Free));
    }

    #[test]
    fn step_mesh_lines() {
        let grid = Grid::new_2d((0.0, 3.0), (0.0, 1.0), 30, 10).unwrap();
        let mask = step_mask(&grid, 0.6, 0.2);
        let b = BoundarySpec::<4>::uniform(BoundaryCondition::Free);
        let mesh = Mesh::new(grid, mask, &b).unwrap();
        // rows below the step top end in a wall at x = 0.6
        let row0 = &mesh.x_lines[0];
        assert_eq!(row0.len(), 6);
        assert_eq!(row0.hi, BoundaryCondition::SolidWall);
        assert_eq!(row0.lo, BoundaryCondition::Free);
        // columns over the step start at its top
        let (li, off) = mesh.slot(mesh.grid.index(10, 2), Direction::Y).unwrap();
        assert_eq!(off, 0);
        assert_eq!(mesh.y_lines[li].lo, BoundaryCondition::SolidWall);
        assert_eq!(mesh.mask.face_tag(5, 0, Side::Right), Some(FaceTag::SolidWall));
        assert_eq!(mesh.mask.face_tag(5, 2, Side::Right), None);
        assert_eq!(mesh.mask.face_tag(10, 2, Side::Bottom), Some(FaceTag::SolidWall));
    }

    #[test]
    fn diffraction_mesh_counts() {
        let grid = Grid::new_2d((0.0, 13.0), (0.0, 11.0), 52, 44).unwrap();
        let mask = diffraction_mask(&grid, (1.0, 6.0));
        assert_eq!(mask.n_active(), 52 * 44 - 4 * 24);
        let mesh = Mesh::new(grid, mask, &BoundarySpec::<4>::uniform(BoundaryCondition::Free)).unwrap();
        assert!(mesh.x_lines.iter().all(|l| !l.is_empty()));
        assert_eq!(mesh.x_lines[0].lo, BoundaryCondition::SolidWall);
        assert_eq!(mesh.x_lines[30].lo, BoundaryCondition::Free);
    }

    #[test]
    fn periodic_line_through_mask_is_rejected() {
        let grid = Grid::new_2d((0.0, 3.0), (0.0, 1.0), 30, 10).unwrap();
        let mask = step_mask(&grid, 0.6, 0.2);
        let b = BoundarySpec::<4>::uniform(BoundaryCondition::Periodic);
        assert!(Mesh::new(grid, mask, &b).is_err());
    }
}
