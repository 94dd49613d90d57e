//! Built-in experiments, flat key-value configuration files, and drivers
//! that run an experiment or a convergence study and write its outputs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::diagnostics::{convergence_table, l1_error_exact, totals, ErrorReport, RunDiagnostics};
use crate::error::{ConfigError, SolverError};
use crate::euler::{from_primitive, Euler1D, Euler2D, GasParams};
use crate::flux::SchemeVariant;
use crate::grid::{diffraction_mask, step_mask, BoundaryCondition, BoundarySpec, CellMask, Grid, Mesh, SideBoundary};
use crate::io::{equally_spaced_levels, write_contour_data, write_convergence_csv, write_diag_csv, write_field_csv};
use crate::model::{is_admissible, EquationModel};
use crate::state::State;
use crate::stepper::{Solver, StepConfig};

/// Lower-left corner block removed from the diffraction domain.
pub const DIFFRACTION_CORNER: (f64, f64) = (1.0, 6.0);
/// Position and height of the forward-facing step.
pub const STEP_X: f64 = 0.6;
pub const STEP_HEIGHT: f64 = 0.2;
/// Half-width of the jet inflow strip.
pub const JET_HALF_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Vortex,
    ShockDensity,
    Riemann123,
    JetMach80,
    JetMach2000,
    Diffraction,
    Step,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Vortex,
        ExperimentKind::ShockDensity,
        ExperimentKind::Riemann123,
        ExperimentKind::JetMach80,
        ExperimentKind::JetMach2000,
        ExperimentKind::Diffraction,
        ExperimentKind::Step,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Vortex => "vortex",
            ExperimentKind::ShockDensity => "shock-density",
            ExperimentKind::Riemann123 => "riemann-123",
            ExperimentKind::JetMach80 => "jet-mach80",
            ExperimentKind::JetMach2000 => "jet-mach2000",
            ExperimentKind::Diffraction => "diffraction",
            ExperimentKind::Step => "step",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| ConfigError::UnknownExperiment {
                name: name.to_string(),
                valid: Self::ALL.iter().map(|k| k.name().to_string()).collect(),
            })
    }

    pub fn dim(self) -> usize {
        match self {
            ExperimentKind::ShockDensity | ExperimentKind::Riemann123 => 1,
            _ => 2,
        }
    }

    /// Whether every boundary is periodic or closed, so totals are conserved.
    pub fn is_closed(self) -> bool {
        self == ExperimentKind::Vortex
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub gamma: f64,
    pub x_range: (f64, f64),
    /// Ignored in 1-D.
    pub y_range: (f64, f64),
    pub nx: usize,
    /// 1 in 1-D.
    pub ny: usize,
    pub t_final: f64,
    pub snapshots: Vec<f64>,
    pub step: StepConfig,
    /// Vortex strength.
    pub vortex_epsilon: f64,
    /// Jet inflow velocity.
    pub jet_speed: f64,
    /// Mach number and initial position of the diffracting shock.
    pub shock_mach: f64,
    pub shock_x: f64,
    /// Density contour levels `(lo, hi, count)`; field range when absent.
    pub contour_levels: Option<(f64, f64, usize)>,
}

/// Built-in configuration of the experiment `name`.
pub fn builtin_experiment(name: &str) -> Result<ExperimentConfig, ConfigError> {
    Ok(builtin(ExperimentKind::from_name(name)?))
}

pub fn builtin(kind: ExperimentKind) -> ExperimentConfig {
    let base = ExperimentConfig {
        kind,
        gamma: 1.4,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        nx: 100,
        ny: 1,
        t_final: 1.0,
        snapshots: Vec::new(),
        step: StepConfig::default(),
        vortex_epsilon: 10.0828,
        jet_speed: 30.0,
        shock_mach: 5.09,
        shock_x: 0.5,
        contour_levels: None,
    };
    match kind {
        ExperimentKind::Vortex => ExperimentConfig {
            x_range: (-5.0, 5.0),
            y_range: (-5.0, 5.0),
            nx: 400,
            ny: 400,
            t_final: 0.05,
            snapshots: vec![0.05],
            ..base
        },
        ExperimentKind::ShockDensity => ExperimentConfig {
            x_range: (-10.0, 10.0),
            nx: 1200,
            t_final: 0.2,
            snapshots: vec![0.2],
            ..base
        },
        ExperimentKind::Riemann123 => ExperimentConfig {
            x_range: (0.0, 1.0),
            nx: 200,
            t_final: 0.15,
            snapshots: vec![0.15],
            ..base
        },
        ExperimentKind::JetMach80 => ExperimentConfig {
            gamma: 5.0 / 3.0,
            x_range: (0.0, 2.0),
            y_range: (-0.5, 0.5),
            nx: 448,
            ny: 224,
            t_final: 0.07,
            snapshots: vec![0.05, 0.07],
            jet_speed: 30.0,
            ..base
        },
        ExperimentKind::JetMach2000 => ExperimentConfig {
            gamma: 5.0 / 3.0,
            x_range: (0.0, 1.0),
            y_range: (-0.25, 0.25),
            nx: 640,
            ny: 320,
            t_final: 0.0015,
            snapshots: vec![0.001, 0.0015],
            jet_speed: 800.0,
            ..base
        },
        ExperimentKind::Diffraction => ExperimentConfig {
            x_range: (0.0, 13.0),
            y_range: (0.0, 11.0),
            nx: 13 * 64,
            ny: 11 * 64,
            t_final: 2.3,
            snapshots: vec![2.3],
            contour_levels: Some((0.066227, 7.1568, 40)),
            ..base
        },
        ExperimentKind::Step => ExperimentConfig {
            x_range: (0.0, 3.0),
            y_range: (0.0, 1.0),
            nx: 3 * 160,
            ny: 160,
            t_final: 4.0,
            snapshots: vec![4.0],
            contour_levels: Some((0.090338, 6.2365, 80)),
            ..base
        },
    }
}

/// State behind a normal shock of Mach number `mach` running to the right
/// into gas at rest with density `rho` and pressure `p`.
pub fn post_shock_state(mach: f64, rho: f64, p: f64, gamma: f64) -> (f64, f64, f64) {
    let m2 = mach * mach;
    let rho2 = rho * (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let p2 = p * (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0);
    let speed = mach * (gamma * p / rho).sqrt();
    (rho2, speed * (1.0 - rho / rho2), p2)
}

/// Primitive state `(rho, v1, v2, p)` of the isentropic vortex centred at
/// the origin, advected with velocity `(1, 1)`.
pub fn vortex_primitive(x: f64, y: f64, epsilon: f64, gamma: f64) -> (f64, f64, f64, f64) {
    let r2 = x * x + y * y;
    let amp = epsilon / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
    let dt = -(gamma - 1.0) * epsilon * epsilon / (8.0 * gamma * PI * PI) * (1.0 - r2).exp();
    let rho = (1.0 + dt).powf(1.0 / (gamma - 1.0));
    (rho, 1.0 - amp * y, 1.0 + amp * x, rho.powf(gamma))
}

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / self.nx as f64
    }

    /// Set `nx` and scale `ny` to keep square cells.
    pub fn set_nx(&mut self, nx: usize) {
        if self.dim() == 2 {
            let aspect = (self.y_range.1 - self.y_range.0) / (self.x_range.1 - self.x_range.0);
            self.ny = ((nx as f64 * aspect).round() as usize).max(1);
        }
        self.nx = nx;
    }

    /// Set the mesh so that `dx = dy = 1 / n`.
    pub fn set_resolution(&mut self, n: usize) {
        let cells = |(a, b): (f64, f64)| ((b - a) * n as f64).round() as usize;
        self.nx = cells(self.x_range);
        if self.dim() == 2 {
            self.ny = cells(self.y_range);
        }
    }

    /// Change the final time, dropping later snapshots and keeping the
    /// final time as a snapshot.
    pub fn set_t_final(&mut self, t: f64) {
        self.t_final = t;
        self.snapshots.retain(|&s| s < t);
        self.snapshots.push(t);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.step.validate()?;
        GasParams::new(self.gamma).map_err(|e| ConfigError::invalid(e.to_string()))?;
        if !(self.t_final > 0.0) {
            return Err(ConfigError::invalid("t_final must be positive"));
        }
        if self.snapshots.iter().any(|&s| !(s >= 0.0 && s <= self.t_final)) {
            return Err(ConfigError::invalid("snapshot times must lie in [0, t_final]"));
        }
        if self.nx < 2 || (self.dim() == 2 && self.ny < 2) || (self.dim() == 1 && self.ny != 1) {
            return Err(ConfigError::invalid(format!("bad mesh size {}x{}", self.nx, self.ny)));
        }
        if let Some((lo, hi, n)) = self.contour_levels {
            if !(hi > lo) || n == 0 {
                return Err(ConfigError::invalid("contour levels need lo < hi and a positive count"));
            }
        }
        let check_cells = |range: (f64, f64), n: usize, at: f64, what: &str| {
            let pos = (at - range.0) / (range.1 - range.0) * n as f64;
            if (pos - pos.round()).abs() > 1e-9 {
                Err(ConfigError::invalid(format!("{what} at {at} is not on a cell face")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            ExperimentKind::Diffraction => {
                check_cells(self.x_range, self.nx, DIFFRACTION_CORNER.0, "diffraction corner")?;
                check_cells(self.y_range, self.ny, DIFFRACTION_CORNER.1, "diffraction corner")?;
                if !(self.shock_mach >= 1.0) {
                    return Err(ConfigError::invalid("shock Mach number must be at least 1"));
                }
            }
            ExperimentKind::Step => {
                check_cells(self.x_range, self.nx, STEP_X, "step")?;
                check_cells(self.y_range, self.ny, STEP_HEIGHT, "step")?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Diffraction inflow state `(rho, v, p)`.
    pub fn shock_state(&self) -> (f64, f64, f64) {
        post_shock_state(self.shock_mach, 1.4, 1.0, self.gamma)
    }

    /// Flat key-value text that parses back into this configuration.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "experiment = {}", self.name());
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "x_min = {}\nx_max = {}", self.x_range.0, self.x_range.1);
        if self.dim() == 2 {
            let _ = writeln!(s, "y_min = {}\ny_max = {}", self.y_range.0, self.y_range.1);
        }
        let _ = writeln!(s, "nx = {}\nny = {}", self.nx, self.ny);
        let _ = writeln!(s, "t_final = {}", self.t_final);
        let _ = writeln!(s, "snapshots = {}", list(&self.snapshots));
        let _ = writeln!(s, "scheme = {}", self.step.variant);
        let _ = writeln!(s, "cfl = {}\ntheta = {}", self.step.cfl, self.step.theta);
        let _ = writeln!(s, "eps_desing = {}", self.step.eps_desing);
        let _ = writeln!(s, "max_steps = {}", self.step.max_steps);
        let _ = writeln!(s, "audit_every = {}", self.step.audit_every.unwrap_or(0));
        match self.kind {
            ExperimentKind::Vortex => {
                let _ = writeln!(s, "vortex_epsilon = {}", self.vortex_epsilon);
            }
            ExperimentKind::JetMach80 | ExperimentKind::JetMach2000 => {
                let _ = writeln!(s, "jet_speed = {}", self.jet_speed);
            }
            ExperimentKind::Diffraction => {
                let _ = writeln!(s, "shock_mach = {}\nshock_x = {}", self.shock_mach, self.shock_x);
            }
            _ => {}
        }
        if let Some((lo, hi, n)) = self.contour_levels {
            let _ = writeln!(s, "contour_levels = {lo},{hi},{n}");
        }
        s
    }

    /// Apply `key = value` lines on top of this configuration. An
    /// `experiment` key must match the current experiment.
    pub fn apply_ini(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(format!("{key}: {e}")));
            let int = |v: &str| v.parse::<usize>().map_err(|e| err(format!("{key}: {e}")));
            match key {
                "experiment" => {
                    let kind = ExperimentKind::from_name(value)?;
                    if kind != self.kind {
                        return Err(err(format!(
                            "config is for `{value}` but the experiment is `{}`",
                            self.name()
                        )));
                    }
                }
                "gamma" => self.gamma = num(value)?,
                "x_min" => self.x_range.0 = num(value)?,
                "x_max" => self.x_range.1 = num(value)?,
                "y_min" => self.y_range.0 = num(value)?,
                "y_max" => self.y_range.1 = num(value)?,
                "nx" => self.nx = int(value)?,
                "ny" => self.ny = int(value)?,
                "t_final" => self.set_t_final(num(value)?),
                "snapshots" => {
                    self.snapshots = value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(num)
                        .collect::<Result<_, _>>()?
                }
                "scheme" => self.step.variant = value.parse::<SchemeVariant>().map_err(|e| err(e.to_string()))?,
                "cfl" => self.step.cfl = num(value)?,
                "theta" => self.step.theta = num(value)?,
                "eps_desing" => self.step.eps_desing = num(value)?,
                "max_steps" => self.step.max_steps = int(value)?,
                "audit_every" => {
                    self.step.audit_every = match int(value)? {
                        0 => None,
                        n => Some(n),
                    }
                }
                "vortex_epsilon" => self.vortex_epsilon = num(value)?,
                "jet_speed" => self.jet_speed = num(value)?,
                "shock_mach" => self.shock_mach = num(value)?,
                "shock_x" => self.shock_x = num(value)?,
                "contour_levels" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(err("contour_levels needs lo,hi,count".into()));
                    }
                    self.contour_levels = Some((num(parts[0])?, num(parts[1])?, int(parts[2])?));
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(())
    }

    /// Configuration from a file: the built-in named by its `experiment`
    /// key (or `default`) with the file's overrides applied.
    pub fn from_ini(text: &str, default: Option<ExperimentKind>) -> Result<Self, ConfigError> {
        let named = text.lines().find_map(|l| {
            let l = l.split('#').next()?.trim();
            let (k, v) = l.split_once('=')?;
            (k.trim() == "experiment").then(|| v.trim().to_string())
        });
        let kind = match (named, default) {
            (Some(n), _) => ExperimentKind::from_name(&n)?,
            (None, Some(k)) => k,
            (None, None) => return Err(ConfigError::invalid("config does not name an experiment")),
        };
        let mut cfg = builtin(kind);
        cfg.apply_ini(text)?;
        Ok(cfg)
    }

    fn grid(&self) -> Result<Grid, ConfigError> {
        if self.dim() == 1 {
            Grid::new_1d(self.x_range.0, self.x_range.1, self.nx)
        } else {
            Grid::new_2d(self.x_range, self.y_range, self.nx, self.ny)
        }
    }

    /// Model, mesh and initial cell values of this configuration.
    pub fn build(&self) -> Result<Problem, ConfigError> {
        self.validate()?;
        let gas = GasParams::new(self.gamma).map_err(|e| ConfigError::invalid(e.to_string()))?;
        let g = self.gamma;
        let grid = self.grid()?;
        let problem = match self.kind {
            ExperimentKind::ShockDensity | ExperimentKind::Riemann123 => {
                let mesh = Mesh::rectangular(grid, &BoundarySpec::uniform(BoundaryCondition::Free))?;
                let kind = self.kind;
                let initial = cell_values(&mesh, |x, _| match kind {
                    ExperimentKind::ShockDensity if x < 0.0 => from_primitive(3.857143, &[-0.920279], 10.33333, g),
                    ExperimentKind::ShockDensity => from_primitive(1.0 + 0.2 * (5.0 * x).sin(), &[-3.549648], 1.0, g),
                    _ if x < 0.5 => from_primitive(1.0, &[-2.0], 0.15, g),
                    _ => from_primitive(1.0, &[2.0], 0.15, g),
                });
                Problem::OneD {
                    model: Euler1D::new(gas),
                    mesh,
                    initial,
                }
            }
            ExperimentKind::Vortex => {
                let mesh = Mesh::rectangular(grid, &BoundarySpec::uniform(BoundaryCondition::Periodic))?;
                let initial = cell_values(&mesh, |x, y| self.vortex_exact(x, y, 0.0));
                Problem::TwoD {
                    model: Euler2D::new(gas),
                    mesh,
                    initial,
                }
            }
            ExperimentKind::JetMach80 | ExperimentKind::JetMach2000 => {
                let ambient = from_primitive::<4>(5.0, &[0.0, 0.0], 0.4127, g);
                let jet = from_primitive::<4>(5.0, &[self.jet_speed, 0.0], 0.4127, g);
                let mut b = BoundarySpec::uniform(BoundaryCondition::Free);
                b.left = SideBoundary::uniform(BoundaryCondition::Free).with_segment(
                    -JET_HALF_WIDTH,
                    JET_HALF_WIDTH,
                    BoundaryCondition::Inflow(jet),
                );
                let mesh = Mesh::rectangular(grid, &b)?;
                let initial = cell_values(&mesh, |_, _| ambient);
                Problem::TwoD {
                    model: Euler2D::new(gas),
                    mesh,
                    initial,
                }
            }
            ExperimentKind::Diffraction => {
                let (rho, v, p) = self.shock_state();
                let post = from_primitive::<4>(rho, &[v, 0.0], p, g);
                let pre = from_primitive::<4>(1.4, &[0.0, 0.0], 1.0, g);
                let mut b = BoundarySpec::uniform(BoundaryCondition::Free);
                b.left = SideBoundary::uniform(BoundaryCondition::Inflow(post));
                let mask = diffraction_mask(&grid, DIFFRACTION_CORNER);
                let mesh = Mesh::new(grid, mask, &b)?;
                let shock_x = self.shock_x;
                let initial = cell_values(&mesh, |x, _| if x < shock_x { post } else { pre });
                Problem::TwoD {
                    model: Euler2D::new(gas),
                    mesh,
                    initial,
                }
            }
            ExperimentKind::Step => {
                let inflow = from_primitive::<4>(1.4, &[3.0, 0.0], 1.0, g);
                let b = BoundarySpec {
                    left: SideBoundary::uniform(BoundaryCondition::Inflow(inflow)),
                    right: SideBoundary::uniform(BoundaryCondition::Free),
                    bottom: SideBoundary::uniform(BoundaryCondition::SolidWall),
                    top: SideBoundary::uniform(BoundaryCondition::SolidWall),
                };
                let mask = step_mask(&grid, STEP_X, STEP_HEIGHT);
                let mesh = Mesh::new(grid, mask, &b)?;
                let initial = cell_values(&mesh, |_, _| inflow);
                Problem::TwoD {
                    model: Euler2D::new(gas),
                    mesh,
                    initial,
                }
            }
        };
        problem.check_initial()?;
        Ok(problem)
    }

    /// Exact vortex solution at time `t` on the periodic domain.
    pub fn vortex_exact(&self, x: f64, y: f64, t: f64) -> State<4> {
        let wrap = |s: f64, (lo, hi): (f64, f64)| lo + (s - lo).rem_euclid(hi - lo);
        let (rho, v1, v2, p) = vortex_primitive(
            wrap(x - t, self.x_range),
            wrap(y - t, self.y_range),
            self.vortex_epsilon,
            self.gamma,
        );
        from_primitive(rho, &[v1, v2], p, self.gamma)
    }
}

fn cell_values<const M: usize>(mesh: &Mesh<M>, f: impl Fn(f64, f64) -> State<M>) -> Vec<State<M>> {
    (0..mesh.grid.n_cells())
        .map(|c| {
            let (x, y) = mesh.grid.center(c);
            f(x, y)
        })
        .collect()
}

/// A built problem, ready to integrate.
#[derive(Debug, Clone)]
pub enum Problem {
    OneD {
        model: Euler1D,
        mesh: Mesh<3>,
        initial: Vec<State<3>>,
    },
    TwoD {
        model: Euler2D,
        mesh: Mesh<4>,
        initial: Vec<State<4>>,
    },
}

fn check_admissible<const M: usize, Mdl: EquationModel<M>>(
    model: &Mdl,
    mesh: &Mesh<M>,
    u: &[State<M>],
) -> Result<(), ConfigError> {
    for c in mesh.active_cells() {
        let ok = is_admissible(&u[c], model.admissibility()).unwrap_or(false);
        if !ok {
            return Err(ConfigError::invalid(format!(
                "initial state {:?} of cell {:?} is not admissible",
                u[c],
                mesh.grid.coords(c)
            )));
        }
    }
    Ok(())
}

fn check_inflow<const M: usize, Mdl: EquationModel<M>>(model: &Mdl, mesh: &Mesh<M>) -> Result<(), ConfigError> {
    for line in mesh.x_lines.iter().chain(&mesh.y_lines) {
        for bc in [&line.lo, &line.hi] {
            if let BoundaryCondition::Inflow(s) = bc {
                if !is_admissible(s, model.admissibility()).unwrap_or(false) {
                    return Err(ConfigError::invalid(format!("inflow state {s:?} is not admissible")));
                }
            }
        }
    }
    Ok(())
}

impl Problem {
    fn check_initial(&self) -> Result<(), ConfigError> {
        match self {
            Problem::OneD { model, mesh, initial } => {
                check_inflow(model, mesh)?;
                check_admissible(model, mesh, initial)
            }
            Problem::TwoD { model, mesh, initial } => {
                check_inflow(model, mesh)?;
                check_admissible(model, mesh, initial)
            }
        }
    }

    pub fn mask(&self) -> &CellMask {
        match self {
            Problem::OneD { mesh, .. } => &mesh.mask,
            Problem::TwoD { mesh, .. } => &mesh.mask,
        }
    }
}

/// Final cell values of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    OneD(Vec<State<3>>),
    TwoD(Vec<State<4>>),
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub diagnostics: RunDiagnostics,
    /// Time reached (earlier than `t_final` if the scheme failed).
    pub t: f64,
    pub initial_totals: Vec<f64>,
    pub final_totals: Vec<f64>,
    pub field: FieldData,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    /// Largest relative change of a component total.
    pub fn conservation_error(&self) -> f64 {
        self.initial_totals
            .iter()
            .zip(&self.final_totals)
            .map(|(a, b)| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn time_tag(t: f64) -> String {
    format!("{t}")
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

fn run_problem<const M: usize, Mdl: EquationModel<M>>(
    config: &ExperimentConfig,
    model: &Mdl,
    mesh: &Mesh<M>,
    initial: Vec<State<M>>,
    out: &mut Option<Outputs<'_>>,
) -> Result<(crate::stepper::RunResult<M>, [f64; M]), SolverError> {
    let solver = Solver::new(model, mesh, config.step.clone())?;
    let start_totals = totals(&initial, mesh);
    let mut write_snapshot = |t: f64, u: &[State<M>]| -> Result<(), SolverError> {
        let Some(o) = out.as_mut() else {
            return Ok(());
        };
        let path = o.dir.join(format!("field_t{}.csv", time_tag(t)));
        write_field_csv(&path, mesh, model, u)?;
        o.files.push(path);
        if mesh.grid.dim == 2 {
            let rho: Vec<f64> = u.iter().map(|s| s[0]).collect();
            let levels = match config.contour_levels {
                Some((lo, hi, n)) => equally_spaced_levels(lo, hi, n),
                None => {
                    let (lo, hi) = mesh
                        .active_cells()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
                            (a.min(rho[c]), b.max(rho[c]))
                        });
                    equally_spaced_levels(lo, hi, 40)
                }
            };
            let path = o.dir.join(format!("contours_t{}.csv", time_tag(t)));
            write_contour_data(&path, mesh, &rho, &levels)?;
            o.files.push(path);
        }
        Ok(())
    };
    let result = solver.integrate(initial, 0.0, config.t_final, &config.snapshots, &mut write_snapshot)?;
    Ok((result, start_totals))
}

/// Run an experiment, writing snapshots, `diag.csv` and `run.log` under
/// `out` when given.
pub fn run(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunSummary, SolverError> {
    let problem = config.build()?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    }
    let mut outputs = out.map(|dir| Outputs { dir, files: Vec::new() });
    let (diagnostics, t, initial_totals, final_totals, field) = match problem {
        Problem::OneD { model, mesh, initial } => {
            let (r, t0) = run_problem(config, &model, &mesh, initial, &mut outputs)?;
            let t1 = totals(&r.field, &mesh);
            (r.diagnostics, r.t, t0.to_vec(), t1.to_vec(), FieldData::OneD(r.field))
        }
        Problem::TwoD { model, mesh, initial } => {
            let (r, t0) = run_problem(config, &model, &mesh, initial, &mut outputs)?;
            let t1 = totals(&r.field, &mesh);
            (r.diagnostics, r.t, t0.to_vec(), t1.to_vec(), FieldData::TwoD(r.field))
        }
    };
    let mut summary = RunSummary {
        config: config.clone(),
        diagnostics,
        t,
        initial_totals,
        final_totals,
        field,
        files: Vec::new(),
    };
    if let Some(mut o) = outputs {
        let diag_path = o.dir.join("diag.csv");
        write_diag_csv(&diag_path, &summary.diagnostics)?;
        o.files.push(diag_path);
        let log_path = o.dir.join("run.log");
        std::fs::write(&log_path, run_log(&summary)).map_err(|e| SolverError::io(&log_path, e))?;
        o.files.push(log_path);
        summary.files = o.files;
    }
    Ok(summary)
}

fn run_log(s: &RunSummary) -> String {
    let mut log = String::new();
    log.push_str("# configuration\n");
    log.push_str(&s.config.to_ini());
    if s.config.kind == ExperimentKind::Diffraction {
        let (rho, v, p) = s.config.shock_state();
        let _ = writeln!(
            log,
            "# inflow state from the Rankine-Hugoniot conditions: rho = {rho}, v1 = {v}, p = {p}"
        );
    }
    log.push_str("# outcome\n");
    let d = &s.diagnostics;
    let [a, b] = d.monitored_names;
    let [ma, mb] = d.overall_minima();
    let _ = writeln!(log, "steps = {}", d.steps());
    let _ = writeln!(log, "rejected_steps = {}", d.rejected_steps);
    let _ = writeln!(log, "t_reached = {}", s.t);
    let _ = writeln!(log, "{a} = {ma}\n{b} = {mb}");
    if let Some(audit) = d.audit {
        let _ = writeln!(log, "decomposition_residual = {}", audit.residual);
        let _ = writeln!(log, "decomposition_min_coefficient = {}", audit.min_coefficient);
    }
    match &d.violation {
        Some(v) => {
            let _ = writeln!(log, "violation = {v}");
        }
        None => log.push_str("violation = none\n"),
    }
    let _ = writeln!(log, "wall_time_s = {}", d.wall_time.as_secs_f64());
    log
}

/// Component names of the vortex errors.
pub const VORTEX_COMPONENTS: [&str; 4] = ["rho", "m1", "m2", "E"];

/// L1 errors of the vortex on meshes with `dx = dy = 1/n` for each `n`,
/// with orders between consecutive meshes. Writes `convergence.csv` under
/// `out` when given.
pub fn convergence(
    config: &ExperimentConfig,
    meshes: &[usize],
    out: Option<&Path>,
) -> Result<Vec<ErrorReport>, SolverError> {
    if config.kind != ExperimentKind::Vortex {
        return Err(ConfigError::invalid(format!(
            "no exact solution for `{}`; convergence needs `vortex`",
            config.name()
        ))
        .into());
    }
    if meshes.is_empty() {
        return Err(ConfigError::invalid("no meshes given").into());
    }
    let mut rows = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let mut cfg = config.clone();
        cfg.set_resolution(n);
        cfg.snapshots.clear();
        let Problem::TwoD { model, mesh, initial } = cfg.build()? else {
            unreachable!("vortex is two-dimensional")
        };
        let solver = Solver::new(&model, &mesh, cfg.step.clone())?;
        let result = solver.integrate(initial, 0.0, cfg.t_final, &[], |_, _| Ok(()))?;
        if let Some(v) = result.diagnostics.violation {
            return Err(SolverError::Violation(Box::new(v)));
        }
        let err = l1_error_exact(&result.field, &mesh, |x, y| cfg.vortex_exact(x, y, result.t))?;
        rows.push((cfg.dx(), err.to_vec()));
    }
    let table = convergence_table(rows);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
        write_convergence_csv(&dir.join("convergence.csv"), &VORTEX_COMPONENTS, &table)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::pressure_unchecked;

    #[test]
    fn builtin_states() {
        let cfg = builtin_experiment("riemann-123").unwrap();
        let Problem::OneD { initial, .. } = cfg.build().unwrap() else {
            panic!()
        };
        let u = initial[0];
        assert_eq!(u[0], 1.0);
        assert_eq!(u[1], -2.0);
        assert!((pressure_unchecked(&u, 1.4) - 0.15).abs() < 1e-15);

        let cfg = builtin_experiment("jet-mach2000").unwrap();
        assert_eq!(cfg.jet_speed, 800.0);
        assert_eq!(cfg.gamma, 5.0 / 3.0);
        let Problem::TwoD { mesh, .. } = cfg.build().unwrap() else {
            panic!()
        };
        let k = mesh.grid.ny / 2;
        let BoundaryCondition::Inflow(jet) = mesh.x_lines[k].lo else {
            panic!()
        };
        assert_eq!(jet, from_primitive(5.0, &[800.0, 0.0], 0.4127, 5.0 / 3.0));
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let err = builtin_experiment("sod").unwrap_err();
        let msg = err.to_string();
        for k in ExperimentKind::ALL {
            assert!(msg.contains(k.name()));
        }
    }

    #[test]
    fn every_builtin_validates() {
        for k in ExperimentKind::ALL {
            let mut cfg = builtin(k);
            // coarse meshes keep the test fast; masks stay cell-aligned
            if cfg.dim() == 2 {
                cfg.set_resolution(match k {
                    ExperimentKind::Vortex => 4,
                    ExperimentKind::Step => 10,
                    _ => 8,
                });
            }
            assert!(cfg.build().is_ok(), "{}", k.name());
        }
    }

    #[test]
    fn vortex_minima() {
        let cfg = builtin(ExperimentKind::Vortex);
        let (rho, _, _, p) = vortex_primitive(0.0, 0.0, cfg.vortex_epsilon, 1.4);
        assert!((rho / 7.8337e-15 - 1.0).abs() < 1e-4, "{rho}");
        assert!((p / 1.7847e-20 - 1.0).abs() < 1e-4, "{p}");
        assert!((rho - 7.83371916120571e-15).abs() < 1e-22);
    }

    #[test]
    fn post_shock_oracle() {
        let (rho, v, p) = post_shock_state(5.09, 1.4, 1.0, 1.4);
        assert!((rho - 7.041132906907899).abs() < 1e-12);
        assert!((v - 4.07794695481336).abs() < 1e-12);
        assert!((p - 30.05945).abs() < 1e-10);
    }

    #[test]
    fn ini_round_trip() {
        for k in ExperimentKind::ALL {
            let cfg = builtin(k);
            let back = ExperimentConfig::from_ini(&cfg.to_ini(), None).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn ini_overrides_and_errors() {
        let text = "# coarse run\nexperiment = riemann-123\nnx = 50 # cells\nscheme = cu\ncfl = 0.4\n";
        let cfg = ExperimentConfig::from_ini(text, None).unwrap();
        assert_eq!(cfg.nx, 50);
        assert_eq!(cfg.step.variant, SchemeVariant::Scheme1);
        assert_eq!(cfg.step.cfl, 0.4);
        assert!(matches!(
            ExperimentConfig::from_ini("nx = 10\nbogus = 1\n", Some(ExperimentKind::Riemann123)),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        let mut bad = builtin(ExperimentKind::Riemann123);
        bad.step.cfl = 0.55;
        assert!(bad.validate().is_err());
        bad.step.cfl = 0.45;
        bad.step.theta = 0.5;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn misaligned_step_is_rejected() {
        let mut cfg = builtin(ExperimentKind::Step);
        cfg.nx = 31;
        cfg.ny = 7;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn resolution_helpers() {
        let mut cfg = builtin(ExperimentKind::JetMach80);
        cfg.set_nx(112);
        assert_eq!((cfg.nx, cfg.ny), (112, 56));
        let mut cfg = builtin(ExperimentKind::Diffraction);
        cfg.set_resolution(16);
        assert_eq!((cfg.nx, cfg.ny), (208, 176));
        cfg.set_t_final(1.0);
        assert_eq!(cfg.snapshots, vec![1.0]);
    }
}
