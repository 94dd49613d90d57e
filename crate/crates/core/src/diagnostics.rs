//! Run diagnostics, bound-violation records, and error norms.

use std::fmt;
use std::time::Duration;

use crate::error::SolverError;
use crate::flux::DecompositionAudit;
use crate::grid::Mesh;
use crate::state::State;

/// Where in the pipeline an inadmissible state was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationSite {
    CellAverage,
    PointValue,
    IntermediateState,
    RebuiltState,
    CellIntermediateState,
}

impl fmt::Display for ViolationSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationSite::CellAverage => "cell average",
            ViolationSite::PointValue => "point value",
            ViolationSite::IntermediateState => "interface intermediate state",
            ViolationSite::RebuiltState => "rebuilt intermediate state",
            ViolationSite::CellIntermediateState => "cell intermediate state",
        })
    }
}

/// First inadmissible state encountered during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct BpViolation {
    /// Time at the start of the offending step.
    pub time: f64,
    /// Zero-based index of the offending step.
    pub step: usize,
    /// Runge-Kutta stage (1 or 2).
    pub stage: usize,
    /// Grid indices `(j, k)` of the cell.
    pub cell: (usize, usize),
    pub site: ViolationSite,
    /// Name of the violated constraint.
    pub quantity: String,
    pub value: f64,
}

impl fmt::Display for BpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {:e} at {} of cell ({}, {}), step {} stage {}, t = {}",
            self.quantity, self.value, self.site, self.cell.0, self.cell.1, self.step, self.stage, self.time
        )
    }
}

/// Diagnostics recorded after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Time after the step.
    pub t: f64,
    pub dt: f64,
    /// Minima over active cells of the model's monitored quantities.
    pub minima: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunDiagnostics {
    pub monitored_names: [&'static str; 2],
    pub records: Vec<StepRecord>,
    pub violation: Option<BpViolation>,
    /// Steps retried with a halved time step.
    pub rejected_steps: usize,
    /// Accumulated decomposition audits, if any were run.
    pub audit: Option<DecompositionAudit>,
    pub wall_time: Duration,
}

impl RunDiagnostics {
    pub fn new(monitored_names: [&'static str; 2]) -> Self {
        RunDiagnostics {
            monitored_names,
            records: Vec::new(),
            violation: None,
            rejected_steps: 0,
            audit: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn steps(&self) -> usize {
        self.records.len()
    }

    /// Minima of the monitored quantities over all recorded steps.
    pub fn overall_minima(&self) -> [f64; 2] {
        self.records.iter().fold([f64::INFINITY; 2], |m, r| {
            [m[0].min(r.minima[0]), m[1].min(r.minima[1])]
        })
    }

    pub(crate) fn add_audit(&mut self, audit: DecompositionAudit) {
        self.audit = Some(match self.audit {
            Some(a) => a.merge(audit),
            None => audit,
        });
    }
}

/// Per-component L1 errors on one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Mesh spacing used for rates.
    pub h: f64,
    pub errors: Vec<f64>,
    /// Experimental orders relative to the previous (coarser) mesh.
    pub orders: Option<Vec<f64>>,
}

/// `sum |a - b| * volume` per component over the active cells.
pub fn l1_error<const M: usize>(a: &[State<M>], b: &[State<M>], mesh: &Mesh<M>) -> Result<[f64; M], SolverError> {
    let n = mesh.grid.n_cells();
    if a.len() != n || b.len() != n {
        return Err(SolverError::GridMismatch);
    }
    let vol = mesh.grid.cell_volume();
    let mut err = [0.0; M];
    for c in mesh.active_cells() {
        for m in 0..M {
            err[m] += (a[c][m] - b[c][m]).abs();
        }
    }
    Ok(err.map(|e| e * vol))
}

/// L1 error against an exact solution sampled at cell centres.
pub fn l1_error_exact<const M: usize>(
    a: &[State<M>],
    mesh: &Mesh<M>,
    exact: impl Fn(f64, f64) -> State<M>,
) -> Result<[f64; M], SolverError> {
    let b: Vec<State<M>> = (0..mesh.grid.n_cells())
        .map(|c| {
            let (x, y) = mesh.grid.center(c);
            exact(x, y)
        })
        .collect();
    l1_error(a, &b, mesh)
}

/// `ln(e_coarse / e_fine) / ln(h_coarse / h_fine)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Attach orders to a list of `(h, errors)` sorted from coarse to fine.
pub fn convergence_table(rows: Vec<(f64, Vec<f64>)>) -> Vec<ErrorReport> {
    let mut out: Vec<ErrorReport> = Vec::with_capacity(rows.len());
    for (h, errors) in rows {
        let orders = out.last().map(|prev| {
            prev.errors
                .iter()
                .zip(&errors)
                .map(|(&ec, &ef)| convergence_order(ec, ef, prev.h, h))
                .collect()
        });
        out.push(ErrorReport { h, errors, orders });
    }
    out
}

/// Total of each component over the active cells, times the cell volume.
pub fn totals<const M: usize>(u: &[State<M>], mesh: &Mesh<M>) -> [f64; M] {
    let vol = mesh.grid.cell_volume();
    let mut sum = [0.0; M];
    for c in mesh.active_cells() {
        for m in 0..M {
            sum[m] += u[c][m];
        }
    }
    sum.map(|s| s * vol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BoundaryCondition, BoundarySpec, Grid};

    fn mesh(n: usize) -> Mesh<1> {
        let grid = Grid::new_1d(0.0, 1.0, n).unwrap();
        Mesh::rectangular(grid, &BoundarySpec::uniform(BoundaryCondition::Free)).unwrap()
    }

    #[test]
    fn l1_examples() {
        let m = mesh(10);
        let a = vec![State([0.3]); 10];
        assert_eq!(l1_error(&a, &a, &m).unwrap(), [0.0]);
        let b: Vec<State<1>> = a.iter().map(|u| *u + State([0.25])).collect();
        assert!((l1_error(&a, &b, &m).unwrap()[0] - 0.25).abs() < 1e-15);
        assert!(matches!(l1_error(&a, &b[..5], &m), Err(SolverError::GridMismatch)));
    }

    #[test]
    fn orders() {
        assert!((convergence_order(4.0, 1.0, 0.2, 0.1) - 2.0).abs() < 1e-15);
        let t = convergence_table(vec![(0.2, vec![4.0]), (0.1, vec![1.0]), (0.03, vec![0.09])]);
        assert!(t[0].orders.is_none());
        assert!((t[1].orders.as_ref().unwrap()[0] - 2.0).abs() < 1e-15);
        assert!((t[2].orders.as_ref().unwrap()[0] - 2.0).abs() < 1e-12);
        assert!(convergence_table(vec![(0.1, vec![1.0])])[0].orders.is_none());
    }
}
