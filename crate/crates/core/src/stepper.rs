//! Time-step selection, forward-Euler stages and SSP-RK2 integration.
//!
//! A stage runs in two data-parallel phases over the mesh lines. The first
//! reconstructs and limits point values and computes the local speeds; after
//! the speed reductions (time step, global speeds) the second builds the
//! interface fluxes and the update. Every intermediate state the scheme
//! relies on is checked against the admissible set in the limited variants.

use std::time::Instant;

use rayon::prelude::*;

use crate::diagnostics::{BpViolation, RunDiagnostics, StepRecord, ViolationSite};
use crate::error::{ConfigError, SolverError};
use crate::flux::{
    cell_intermediate_state, direction_weights, directional_decomposition, local_speeds, DecompositionAudit,
    InterfaceData, SchemeVariant, SpeedPair, EPS_DESING,
};
use crate::grid::{Line, Mesh};
use crate::model::{Direction, EquationModel, ROUNDOFF_SLACK};
use crate::reconstruction::{bp_limit, compute_slopes, reconstruct, InterfaceValues, DEFAULT_THETA};
use crate::state::State;

/// Largest admissible CFL fraction.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig {
    /// CFL fraction `nu` in `(0, 1/2]`.
    pub cfl: f64,
    pub theta: f64,
    pub eps_desing: f64,
    pub variant: SchemeVariant,
    pub max_steps: usize,
    /// Run the decomposition audit on every n-th step.
    pub audit_every: Option<usize>,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            cfl: 0.45,
            theta: DEFAULT_THETA,
            eps_desing: EPS_DESING,
            variant: SchemeVariant::Bpcu,
            max_steps: 10_000_000,
            audit_every: cfg!(debug_assertions).then_some(100),
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.cfl > 0.0 && self.cfl <= CFL_LIMIT) {
            return Err(ConfigError::invalid(format!(
                "cfl must lie in (0, 0.5], got {}",
                self.cfl
            )));
        }
        if !(1.0..=2.0).contains(&self.theta) {
            return Err(ConfigError::invalid(format!(
                "theta must lie in [1, 2], got {}",
                self.theta
            )));
        }
        if !(self.eps_desing > 0.0) {
            return Err(ConfigError::invalid("eps_desing must be positive"));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::invalid("max_steps must be positive"));
        }
        Ok(())
    }
}

/// `nu / (alpha1/dx + alpha2/dy)` clipped to `remaining`; `remaining` when
/// both widths vanish.
pub fn dt_from_widths(alpha1: f64, alpha2: f64, dx: f64, dy: f64, nu: f64, remaining: f64) -> f64 {
    let rate = alpha1 / dx + alpha2 / dy;
    if rate > 0.0 {
        (nu / rate).min(remaining)
    } else {
        remaining
    }
}

fn max_width(speeds: &[SpeedPair]) -> f64 {
    speeds.iter().fold(0.0_f64, |m, s| m.max(s.width()))
}

/// Time step of a 1-D stage from its interface speeds.
pub fn compute_dt_1d(speeds: &[SpeedPair], dx: f64, nu: f64, remaining: f64) -> f64 {
    dt_from_widths(max_width(speeds), 0.0, dx, 1.0, nu, remaining)
}

/// Time step of a 2-D stage from its x- and y-interface speeds.
pub fn compute_dt_2d(x_speeds: &[SpeedPair], y_speeds: &[SpeedPair], dx: f64, dy: f64, nu: f64, remaining: f64) -> f64 {
    dt_from_widths(max_width(x_speeds), max_width(y_speeds), dx, dy, nu, remaining)
}

#[derive(Debug, Clone, Copy)]
struct StageCtx {
    t: f64,
    step: usize,
    stage: usize,
}

#[derive(Debug)]
enum StageFailure {
    Violation(BpViolation),
    /// The prescribed time step exceeds the CFL bound of this stage.
    Cfl,
}

/// Result of one forward-Euler stage.
#[derive(Debug, Clone)]
pub struct StageOutput<const M: usize> {
    pub field: Vec<State<M>>,
    pub dt: f64,
    /// `dt * (alpha1/dx + alpha2/dy)` of this stage.
    pub cfl: f64,
    pub audit: Option<DecompositionAudit>,
}

/// Result of one SSP-RK2 step.
#[derive(Debug, Clone)]
pub struct StepOutput<const M: usize> {
    pub field: Vec<State<M>>,
    pub dt: f64,
    pub rejected: usize,
    pub audit: Option<DecompositionAudit>,
}

#[derive(Debug, Clone)]
pub struct RunResult<const M: usize> {
    pub field: Vec<State<M>>,
    pub t: f64,
    pub diagnostics: RunDiagnostics,
}

struct LineRecon<const M: usize> {
    /// Point values of the line cells plus one ghost on each side.
    values: InterfaceValues<M>,
    speeds: Vec<SpeedPair>,
}

struct LineFluxes<const M: usize> {
    ifaces: Vec<InterfaceData<M>>,
}

/// Explicit solver for one model on one mesh.
pub struct Solver<'a, const M: usize, Mdl: EquationModel<M> + ?Sized> {
    pub model: &'a Mdl,
    pub mesh: &'a Mesh<M>,
    pub config: StepConfig,
}

impl<'a, const M: usize, Mdl: EquationModel<M> + ?Sized> Solver<'a, M, Mdl> {
    pub fn new(model: &'a Mdl, mesh: &'a Mesh<M>, config: StepConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Solver { model, mesh, config })
    }

    fn directions(&self) -> &'static [Direction] {
        if self.mesh.grid.dim == 1 {
            &[Direction::X]
        } else {
            &[Direction::X, Direction::Y]
        }
    }

    fn violation(&self, ctx: StageCtx, cell: usize, site: ViolationSite, u: &State<M>) -> Option<BpViolation> {
        let tol = match site {
            ViolationSite::CellAverage => 0.0,
            _ => ROUNDOFF_SLACK * u.max_abs(),
        };
        let (quantity, value) = match self.model.admissibility().first_violation_within(u, tol) {
            Some(v) => v,
            None if !u.is_finite() => ("finite", f64::NAN),
            None => return None,
        };
        Some(BpViolation {
            time: ctx.t,
            step: ctx.step,
            stage: ctx.stage,
            cell: self.mesh.grid.coords(cell),
            site,
            quantity: quantity.to_string(),
            value,
        })
    }

    /// Phase one on a single line: ghosts, slopes, limiting, speeds.
    fn reconstruct_line(&self, u: &[State<M>], line: &Line<M>, ctx: StageCtx) -> Result<LineRecon<M>, BpViolation> {
        let n = line.len();
        let h = self.mesh.spacing(line.dir);
        let padded = self.mesh.padded_line(self.model, u, line);
        let slopes = compute_slopes(&padded, self.config.theta, h);
        let avg = &padded[1..n + 3];
        let mut values = reconstruct(avg, &slopes[1..n + 3], h);
        if self.config.variant.is_limited() {
            bp_limit(self.model, avg, &mut values);
        }
        let mut speeds = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (um, up) = values.at_interface(i);
            let left_cell = line.cells[i.saturating_sub(1)];
            let right_cell = line.cells[i.min(n - 1)];
            for (cell, v) in [(left_cell, &um), (right_cell, &up)] {
                if let Some(viol) = self.violation(ctx, cell, ViolationSite::PointValue, v) {
                    return Err(viol);
                }
            }
            speeds.push(local_speeds(self.model, &um, &up, line.dir, self.config.eps_desing));
        }
        Ok(LineRecon { values, speeds })
    }

    /// Phase two on a single line: interface data and admissibility checks.
    fn line_fluxes(&self, line: &Line<M>, recon: &LineRecon<M>, ctx: StageCtx) -> Result<LineFluxes<M>, BpViolation> {
        let n = line.len();
        let variant = self.config.variant;
        let mut ifaces = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (um, up) = recon.values.at_interface(i);
            let data = InterfaceData::build(self.model, um, up, recon.speeds[i], line.dir, variant);
            if variant.is_limited() {
                let cell = line.cells[i.min(n - 1)];
                let (sp, sm) = data.rebuilt();
                let checks = [
                    (ViolationSite::IntermediateState, data.u_star),
                    (ViolationSite::RebuiltState, sp),
                    (ViolationSite::RebuiltState, sm),
                ];
                for (site, s) in checks {
                    if let Some(v) = self.violation(ctx, cell, site, &s) {
                        return Err(v);
                    }
                }
            }
            ifaces.push(data);
        }
        if variant.is_limited() && self.model.checks_cell_states() {
            for j in 0..n {
                let Some(star) = cell_intermediate_state(self.model, &ifaces[j], &ifaces[j + 1], line.dir) else {
                    continue;
                };
                if let Some(v) = self.violation(ctx, line.cells[j], ViolationSite::CellIntermediateState, &star) {
                    return Err(v);
                }
            }
        }
        Ok(LineFluxes { ifaces })
    }

    fn stage(
        &self,
        u: &[State<M>],
        forced_dt: Option<f64>,
        remaining: f64,
        ctx: StageCtx,
        audit: bool,
    ) -> Result<StageOutput<M>, StageFailure> {
        let dirs = self.directions();
        let mut recon: Vec<Vec<LineRecon<M>>> = Vec::with_capacity(dirs.len());
        for &dir in dirs {
            let lines = self.mesh.lines(dir);
            let r: Result<Vec<_>, _> = lines
                .par_iter()
                .map(|line| self.reconstruct_line(u, line, ctx))
                .collect();
            recon.push(r.map_err(StageFailure::Violation)?);
        }

        if self.config.variant.uses_global_speeds() {
            for dir_recon in recon.iter_mut() {
                let smax = dir_recon
                    .iter()
                    .flat_map(|l| l.speeds.iter())
                    .fold(0.0_f64, |m, s| m.max(s.max_abs()));
                let global = SpeedPair::new(-smax, smax).desingularized(self.config.eps_desing);
                for l in dir_recon.iter_mut() {
                    l.speeds.iter_mut().for_each(|s| *s = global);
                }
            }
        }

        let widths: Vec<f64> = recon
            .iter()
            .map(|d| d.iter().fold(0.0_f64, |m, l| m.max(max_width(&l.speeds))))
            .collect();
        let alpha1 = widths[0];
        let alpha2 = widths.get(1).copied().unwrap_or(0.0);
        let (dx, dy) = (self.mesh.grid.dx, self.mesh.grid.dy);
        let dt = match forced_dt {
            Some(dt) => dt,
            None => dt_from_widths(alpha1, alpha2, dx, dy, self.config.cfl, remaining),
        };
        let cfl = dt * (alpha1 / dx + alpha2 / dy);
        if cfl > CFL_LIMIT {
            return Err(StageFailure::Cfl);
        }

        let mut fluxes: Vec<Vec<LineFluxes<M>>> = Vec::with_capacity(dirs.len());
        for (di, &dir) in dirs.iter().enumerate() {
            let lines = self.mesh.lines(dir);
            let r: Result<Vec<_>, _> = lines
                .par_iter()
                .zip(recon[di].par_iter())
                .map(|(line, rec)| self.line_fluxes(line, rec, ctx))
                .collect();
            fluxes.push(r.map_err(StageFailure::Violation)?);
        }

        let mut field = u.to_vec();
        for (di, &dir) in dirs.iter().enumerate() {
            let ratio = dt / self.mesh.spacing(dir);
            for (line, lf) in self.mesh.lines(dir).iter().zip(&fluxes[di]) {
                for (j, &c) in line.cells.iter().enumerate() {
                    field[c] -= (lf.ifaces[j + 1].flux - lf.ifaces[j].flux) * ratio;
                }
            }
        }

        for c in self.mesh.active_cells() {
            if let Some(v) = self.violation(ctx, c, ViolationSite::CellAverage, &field[c]) {
                return Err(StageFailure::Violation(v));
            }
        }

        let audit = audit.then(|| self.audit(u, &field, &fluxes, dt, alpha1, alpha2));
        Ok(StageOutput { field, dt, cfl, audit })
    }

    /// Compare the flux-form update with its convex decomposition cell by cell.
    fn audit(
        &self,
        u: &[State<M>],
        updated: &[State<M>],
        fluxes: &[Vec<LineFluxes<M>>],
        dt: f64,
        alpha1: f64,
        alpha2: f64,
    ) -> DecompositionAudit {
        let dirs = self.directions();
        let lambdas: Vec<f64> = dirs.iter().map(|&d| dt / self.mesh.spacing(d)).collect();
        let (wx, wy) = if dirs.len() == 1 {
            (1.0, 0.0)
        } else {
            direction_weights(lambdas[0] * alpha1, lambdas[1] * alpha2)
        };
        let weights = [wx, wy];
        let mut audit = DecompositionAudit::EMPTY;
        for c in self.mesh.active_cells() {
            let mut dec = State::ZERO;
            let mut min = f64::INFINITY;
            for (di, &dir) in dirs.iter().enumerate() {
                let (li, off) = self.mesh.slot(c, dir).expect("active cell without line");
                let ifaces = &fluxes[di][li].ifaces;
                let (d, m) = directional_decomposition(
                    self.model,
                    &ifaces[off],
                    &ifaces[off + 1],
                    dir,
                    weights[di],
                    lambdas[di],
                );
                dec += d;
                min = min.min(m);
            }
            let residual = (updated[c] - dec).max_abs() / u[c].max_abs().max(f64::MIN_POSITIVE);
            audit = audit.merge(DecompositionAudit {
                residual,
                min_coefficient: min,
            });
        }
        audit
    }

    /// One forward-Euler stage with the CFL time step (clipped to
    /// `remaining`) or the prescribed `dt`.
    pub fn forward_euler_step(
        &self,
        u: &[State<M>],
        dt: Option<f64>,
        remaining: f64,
    ) -> Result<StageOutput<M>, SolverError> {
        let ctx = StageCtx {
            t: 0.0,
            step: 0,
            stage: 1,
        };
        self.stage(u, dt, remaining, ctx, true).map_err(|e| match e {
            StageFailure::Violation(v) => SolverError::Violation(Box::new(v)),
            StageFailure::Cfl => {
                SolverError::Config(ConfigError::invalid("prescribed time step violates the CFL bound"))
            }
        })
    }

    fn rk2(&self, u: &[State<M>], remaining: f64, t: f64, step: usize) -> Result<StepOutput<M>, BpViolation> {
        let do_audit = self.config.audit_every.is_some_and(|n| step.is_multiple_of(n));
        let mut forced = None;
        let mut rejected = 0;
        loop {
            let ctx1 = StageCtx { t, step, stage: 1 };
            let s1 = match self.stage(u, forced, remaining, ctx1, do_audit) {
                Ok(s) => s,
                Err(StageFailure::Violation(v)) => return Err(v),
                Err(StageFailure::Cfl) => unreachable!("stage one uses its own CFL step"),
            };
            let ctx2 = StageCtx { t, step, stage: 2 };
            let s2 = match self.stage(&s1.field, Some(s1.dt), remaining, ctx2, do_audit) {
                Ok(s) => s,
                Err(StageFailure::Violation(v)) => return Err(v),
                Err(StageFailure::Cfl) => {
                    rejected += 1;
                    forced = Some(0.5 * s1.dt);
                    continue;
                }
            };
            let mut field: Vec<State<M>> = u.iter().zip(&s2.field).map(|(a, b)| (*a + *b) * 0.5).collect();
            for c in 0..field.len() {
                if !self.mesh.mask.is_active(c) {
                    field[c] = u[c];
                    continue;
                }
                if let Some(v) = self.violation(ctx2, c, ViolationSite::CellAverage, &field[c]) {
                    return Err(v);
                }
            }
            let audit = match (s1.audit, s2.audit) {
                (Some(a), Some(b)) => Some(a.merge(b)),
                (a, b) => a.or(b),
            };
            return Ok(StepOutput {
                field,
                dt: s1.dt,
                rejected,
                audit,
            });
        }
    }

    /// One SSP-RK2 (Heun) step of at most `remaining`.
    pub fn ssp_rk2_step(&self, u: &[State<M>], remaining: f64) -> Result<StepOutput<M>, SolverError> {
        self.rk2(u, remaining, 0.0, 0)
            .map_err(|v| SolverError::Violation(Box::new(v)))
    }

    fn monitored_minima(&self, u: &[State<M>]) -> [f64; 2] {
        self.mesh.active_cells().fold([f64::INFINITY; 2], |m, c| {
            let q = self.model.monitored(&u[c]);
            [m[0].min(q[0]), m[1].min(q[1])]
        })
    }

    /// Integrate from `t0` to `t_final`, landing exactly on each snapshot
    /// time in `(t0, t_final]` and calling `on_snapshot` there.
    ///
    /// The unlimited variant records its first violation in the diagnostics
    /// and stops; the limited variants return it as an error.
    pub fn integrate(
        &self,
        u0: Vec<State<M>>,
        t0: f64,
        t_final: f64,
        snapshots: &[f64],
        mut on_snapshot: impl FnMut(f64, &[State<M>]) -> Result<(), SolverError>,
    ) -> Result<RunResult<M>, SolverError> {
        let start = Instant::now();
        if u0.len() != self.mesh.grid.n_cells() {
            return Err(SolverError::GridMismatch);
        }
        let mut diag = RunDiagnostics::new(self.model.monitored_names());
        let ctx0 = StageCtx {
            t: t0,
            step: 0,
            stage: 0,
        };
        for c in self.mesh.active_cells() {
            if let Some(v) = self.violation(ctx0, c, ViolationSite::CellAverage, &u0[c]) {
                return Err(SolverError::Violation(Box::new(v)));
            }
        }
        let mut targets: Vec<f64> = snapshots.iter().copied().filter(|&s| s > t0 && s < t_final).collect();
        targets.push(t_final);
        targets.sort_by(f64::total_cmp);
        targets.dedup();
        if snapshots.contains(&t0) {
            on_snapshot(t0, &u0)?;
        }

        let mut u = u0;
        let mut t = t0;
        let mut step = 0;
        for &target in &targets {
            while t < target {
                if step >= self.config.max_steps {
                    return Err(SolverError::MaxSteps(self.config.max_steps));
                }
                let remaining = target - t;
                match self.rk2(&u, remaining, t, step) {
                    Ok(out) => {
                        t = if out.dt >= remaining { target } else { t + out.dt };
                        u = out.field;
                        diag.rejected_steps += out.rejected;
                        if let Some(a) = out.audit {
                            diag.add_audit(a);
                        }
                        diag.records.push(StepRecord {
                            step,
                            t,
                            dt: out.dt,
                            minima: self.monitored_minima(&u),
                        });
                        step += 1;
                    }
                    Err(v) => {
                        if self.config.variant.is_limited() {
                            return Err(SolverError::Violation(Box::new(v)));
                        }
                        diag.violation = Some(v);
                        diag.wall_time = start.elapsed();
                        return Ok(RunResult {
                            field: u,
                            t,
                            diagnostics: diag,
                        });
                    }
                }
            }
            if target < t_final || snapshots.contains(&target) {
                on_snapshot(target, &u)?;
            }
        }
        diag.wall_time = start.elapsed();
        Ok(RunResult {
            field: u,
            t,
            diagnostics: diag,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{from_primitive, Euler1D, Euler2D, GasParams};
    use crate::grid::{BoundaryCondition, BoundarySpec, Grid};

    #[test]
    fn dt_examples() {
        let s = [SpeedPair::new(-2.458257569495584, 2.458257569495584)];
        let dt = compute_dt_1d(&s, 1.0 / 200.0, 0.45, 1.0);
        assert!((dt - 4.576412227750575e-4).abs() < 1e-18);
        assert_eq!(compute_dt_1d(&[SpeedPair::new(-0.5, 0.5)], 1.0, 0.5, 10.0), 0.5);
        assert_eq!(compute_dt_1d(&[SpeedPair::new(-0.5, 0.5)], 1.0, 0.5, 1e-6), 1e-6);
        assert_eq!(compute_dt_1d(&[SpeedPair::new(0.0, 0.0)], 1.0, 0.5, 0.3), 0.3);
        let x = [SpeedPair::new(-1.0, 1.0)];
        let y = [SpeedPair::new(-2.0, 2.0)];
        assert!((compute_dt_2d(&x, &y, 0.1, 0.2, 0.45, 1.0) - 0.01125).abs() < 1e-15);
        let a = [SpeedPair::new(-1.5, 1.5)];
        assert!((compute_dt_2d(&a, &a, 0.1, 0.1, 0.4, 1.0) - 0.4 * 0.1 / 6.0).abs() < 1e-15);
        let z = [SpeedPair::new(0.0, 0.0)];
        assert!((compute_dt_2d(&a, &z, 0.1, 0.1, 0.4, 1.0) - compute_dt_1d(&a, 0.1, 0.4, 1.0)).abs() < 1e-16);
    }

    #[test]
    fn config_validation() {
        let mut c = StepConfig::default();
        assert!(c.validate().is_ok());
        c.cfl = 0.6;
        assert!(c.validate().is_err());
        c.cfl = 0.45;
        c.theta = 2.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn constant_state_is_steady() {
        let model = Euler2D::new(GasParams::new(1.4).unwrap());
        let grid = Grid::new_2d((0.0, 1.0), (0.0, 1.0), 8, 6).unwrap();
        let mesh = Mesh::rectangular(grid, &BoundarySpec::uniform(BoundaryCondition::Periodic)).unwrap();
        let u0 = vec![from_primitive::<4>(1.0, &[0.3, -0.2], 1.0, 1.4); 48];
        let solver = Solver::new(&model, &mesh, StepConfig::default()).unwrap();
        let out = solver.ssp_rk2_step(&u0, 1.0).unwrap();
        for (a, b) in out.field.iter().zip(&u0) {
            assert!((*a - *b).max_abs() < 1e-14);
        }
    }

    #[test]
    fn sod_tube_stays_admissible() {
        let model = Euler1D::new(GasParams::new(1.4).unwrap());
        let grid = Grid::new_1d(0.0, 1.0, 100).unwrap();
        let mesh = Mesh::rectangular(grid.clone(), &BoundarySpec::uniform(BoundaryCondition::Free)).unwrap();
        let u0: Vec<State<3>> = (0..100)
            .map(|j| {
                if grid.x_center(j) < 0.5 {
                    from_primitive(1.0, &[0.0], 1.0, 1.4)
                } else {
                    from_primitive(0.125, &[0.0], 0.1, 1.4)
                }
            })
            .collect();
        let cfg = StepConfig {
            audit_every: Some(1),
            ..StepConfig::default()
        };
        let solver = Solver::new(&model, &mesh, cfg).unwrap();
        let snaps = std::cell::RefCell::new(Vec::new());
        let res = solver
            .integrate(u0, 0.0, 0.2, &[0.1], |t, _| {
                snaps.borrow_mut().push(t);
                Ok(())
            })
            .unwrap();
        assert_eq!(res.t, 0.2);
        assert_eq!(*snaps.borrow(), vec![0.1]);
        let audit = res.diagnostics.audit.unwrap();
        assert!(audit.residual < 1e-12, "{audit:?}");
        assert!(audit.is_convex());
        assert!(res.diagnostics.overall_minima()[1] > 0.0);
    }
}
