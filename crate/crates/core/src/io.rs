//! CSV output of fields, diagnostics, contour lines and convergence tables.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! re-read value is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{ErrorReport, RunDiagnostics};
use crate::error::SolverError;
use crate::grid::Mesh;
use crate::model::EquationModel;
use crate::state::State;

fn create(path: &Path) -> Result<BufWriter<File>, SolverError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| SolverError::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<(), SolverError> {
    w.flush().map_err(|e| SolverError::io(path, e))
}

fn write_row(w: &mut impl Write, values: impl IntoIterator<Item = f64>) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    w.write_all(b"\n")
}

/// Field snapshot: one row per active cell with the cell centre and the
/// model's output columns.
pub fn write_field_csv<const M: usize, Mdl: EquationModel<M> + ?Sized>(
    path: &Path,
    mesh: &Mesh<M>,
    model: &Mdl,
    field: &[State<M>],
) -> Result<(), SolverError> {
    if field.len() != mesh.grid.n_cells() {
        return Err(SolverError::GridMismatch);
    }
    let mut w = create(path)?;
    let two_d = mesh.grid.dim == 2;
    let io = |e| SolverError::io(path, e);
    let mut header = vec!["x"];
    if two_d {
        header.push("y");
    }
    header.extend_from_slice(model.output_columns());
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for c in mesh.active_cells() {
        let (x, y) = mesh.grid.center(c);
        let coords = if two_d { vec![x, y] } else { vec![x] };
        write_row(&mut w, coords.into_iter().chain(model.output_values(&field[c]))).map_err(io)?;
    }
    finish(path, w)
}

/// Per-step diagnostics: `t,dt,<monitored minima>`.
pub fn write_diag_csv(path: &Path, diag: &RunDiagnostics) -> Result<(), SolverError> {
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    let [a, b] = diag.monitored_names;
    writeln!(w, "t,dt,{a},{b}").map_err(io)?;
    for r in &diag.records {
        write_row(&mut w, [r.t, r.dt, r.minima[0], r.minima[1]]).map_err(io)?;
    }
    finish(path, w)
}

/// Parsed numeric CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Read a CSV file written by this module.
pub fn read_csv(path: &Path) -> Result<CsvTable, SolverError> {
    let file = File::open(path).map_err(|e| SolverError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let bad = |msg: String| SolverError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    let header: Vec<String> = match lines.next() {
        Some(l) => l
            .map_err(|e| SolverError::io(path, e))?
            .split(',')
            .map(str::to_string)
            .collect(),
        None => return Err(bad("empty file".into())),
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| SolverError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let row = row.map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
        if row.len() != header.len() {
            return Err(bad(format!("line {}: expected {} columns", i + 2, header.len())));
        }
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn equally_spaced_levels(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Identifier of a crossing point on a dual-mesh edge between two cell
/// centres: `(vertical, j, k)` where a horizontal edge joins `(j,k)` and
/// `(j+1,k)` and a vertical one joins `(j,k)` and `(j,k+1)`.
type EdgeKey = (bool, usize, usize);

/// A polyline of one contour level.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourLine {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
}

/// Marching squares over the cell-centre values of `values`. Only squares
/// whose four cells are active produce segments; segments are chained into
/// polylines.
pub fn contour_lines<const M: usize>(mesh: &Mesh<M>, values: &[f64], levels: &[f64]) -> Vec<ContourLine> {
    let g = &mesh.grid;
    let mut out = Vec::new();
    if g.dim != 2 || g.nx < 2 || g.ny < 2 {
        return out;
    }
    let val = |j: usize, k: usize| values[g.index(j, k)];
    let point = |e: EdgeKey, level: f64| -> (f64, f64) {
        let (vert, j, k) = e;
        let (a, b, (x0, y0), (x1, y1)) = if vert {
            (
                val(j, k),
                val(j, k + 1),
                (g.x_center(j), g.y_center(k)),
                (g.x_center(j), g.y_center(k + 1)),
            )
        } else {
            (
                val(j, k),
                val(j + 1, k),
                (g.x_center(j), g.y_center(k)),
                (g.x_center(j + 1), g.y_center(k)),
            )
        };
        let s = if b != a { (level - a) / (b - a) } else { 0.5 };
        (x0 + s * (x1 - x0), y0 + s * (y1 - y0))
    };
    for &level in levels {
        let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
        for k in 0..g.ny - 1 {
            for j in 0..g.nx - 1 {
                let cells = [
                    g.index(j, k),
                    g.index(j + 1, k),
                    g.index(j + 1, k + 1),
                    g.index(j, k + 1),
                ];
                if !cells.iter().all(|&c| mesh.mask.is_active(c)) {
                    continue;
                }
                let v = cells.map(|c| values[c]);
                let above = v.map(|x| x >= level);
                // edges: bottom, right, top, left
                let edges: [EdgeKey; 4] = [(false, j, k), (true, j + 1, k), (false, j, k + 1), (true, j, k)];
                let crossed: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
                match crossed.len() {
                    2 => segments.push((edges[crossed[0]], edges[crossed[1]])),
                    4 => {
                        let centre_above = v.iter().sum::<f64>() / 4.0 >= level;
                        if centre_above == above[0] {
                            segments.push((edges[0], edges[1]));
                            segments.push((edges[2], edges[3]));
                        } else {
                            segments.push((edges[3], edges[0]));
                            segments.push((edges[1], edges[2]));
                        }
                    }
                    _ => {}
                }
            }
        }
        for chain in chain_segments(&segments) {
            out.push(ContourLine {
                level,
                points: chain.into_iter().map(|e| point(e, level)).collect(),
            });
        }
    }
    out
}

fn chain_segments(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut adj: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(i);
        adj.entry(*b).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    let walk = |start_seg: usize, start_key: EdgeKey, used: &mut Vec<bool>| {
        let mut chain = vec![start_key];
        let mut seg = start_seg;
        let mut key = start_key;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == key { b } else { a };
            chain.push(next);
            key = next;
            match adj[&key].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };
    // open polylines start at keys with a single segment
    let ends: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    for key in ends {
        let seg = adj[&key][0];
        if !used[seg] {
            chains.push(walk(seg, key, &mut used));
        }
    }
    for seg in 0..segments.len() {
        if !used[seg] {
            chains.push(walk(seg, segments[seg].0, &mut used));
        }
    }
    chains
}

/// Contour polylines as rows `level,line,x,y`.
pub fn write_contour_data<const M: usize>(
    path: &Path,
    mesh: &Mesh<M>,
    values: &[f64],
    levels: &[f64],
) -> Result<(), SolverError> {
    if values.len() != mesh.grid.n_cells() {
        return Err(SolverError::GridMismatch);
    }
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    writeln!(w, "level,line,x,y").map_err(io)?;
    for (i, line) in contour_lines(mesh, values, levels).iter().enumerate() {
        for &(x, y) in &line.points {
            write_row(&mut w, [line.level, i as f64, x, y]).map_err(io)?;
        }
    }
    finish(path, w)
}

/// Convergence table with one error and one rate column per component.
pub fn write_convergence_csv(path: &Path, components: &[&str], reports: &[ErrorReport]) -> Result<(), SolverError> {
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    let mut header = vec!["h".to_string()];
    for c in components {
        header.push(format!("err_{c}"));
        header.push(format!("rate_{c}"));
    }
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for r in reports {
        let mut row = vec![r.h];
        for (i, e) in r.errors.iter().enumerate() {
            row.push(*e);
            row.push(r.orders.as_ref().map_or(f64::NAN, |o| o[i]));
        }
        write_row(&mut w, row).map_err(io)?;
    }
    finish(path, w)
}
