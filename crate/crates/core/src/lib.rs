//! Bound-preserving central-upwind finite-volume schemes for the 1-D and
//! 2-D compressible Euler equations and the scalar Burgers equation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod flux;
pub mod grid;
pub mod io;
pub mod model;
pub mod reconstruction;
pub mod state;
pub mod stepper;

pub use diagnostics::{BpViolation, ErrorReport, RunDiagnostics, StepRecord, ViolationSite};
pub use error::{ConfigError, ModelError, SolverError};
pub use euler::{Euler1D, Euler2D, EulerState1D, EulerState2D, GasParams};
pub use experiments::{builtin_experiment, convergence, run, ExperimentConfig, ExperimentKind, FieldData, RunSummary};
pub use flux::{InterfaceData, SchemeVariant, SpeedPair};
pub use grid::{BoundaryCondition, BoundarySpec, CellMask, Grid, Mesh, SideBoundary};
pub use model::{AdmissibilitySpec, Constraint, Direction, EquationModel, ScalarBurgers};
pub use state::{ConservedState, State};
pub use stepper::{RunResult, Solver, StepConfig};
