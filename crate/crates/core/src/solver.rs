//! Cell-by-cell solution of the collocation scheme.
//!
//! A cell with base node `(i, j)` owns the `m₁ × m₂` unknown nodes
//! `(i + l₁, j + l₂)`, `l₁ ∈ 1..=m₁`, `l₂ ∈ 1..=m₂`. Its only known inputs are
//! the bottom layer `(i + l₁, j)` and the left layer `(i, j + l₂)`. The
//! system is written at every owned node:
//!
//! ```text
//! A/τ Σ_{l₃≥1} γ_{l₂,l₃} v_{i+l₁, j+l₃} + B/h Σ_{l₃≥1} γ̄_{l₁,l₃} v_{i+l₃, j+l₂} + C v_{i+l₁, j+l₂}
//!     = f − A/τ γ_{l₂,0} v_{i+l₁, j} − B/h γ̄_{l₁,0} v_{i, j+l₂}
//! ```
//!
//! Unknowns are ordered `l₁`-major, `l₂`-minor, each node contributing a
//! block of `n` components.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vec_max_abs, DenseMatrix, LuDecomposition};
use crate::problem::{GridSpec, PdaeProblem};
use crate::stencil::{build_stencil, StencilTable, MAX_DEGREE};

/// How far the cell window moves between solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStride {
    /// One grid step per solve; each cell overwrites the nodes it shares with
    /// earlier cells.
    #[default]
    Unit,
    /// `(m₁, m₂)` steps per solve, with the last cell in each direction
    /// shifted back to end on the boundary when the cell size does not
    /// divide the step count.
    Block,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MarchOptions {
    pub stride: CellStride,
}

/// Base indices visited along one axis with `count` steps and cells of width `m`.
pub fn cell_bases(count: usize, m: usize, stride: CellStride) -> Vec<usize> {
    if m == 0 || m > count {
        return Vec::new();
    }
    let last = count - m;
    match stride {
        CellStride::Unit => (0..=last).collect(),
        CellStride::Block => {
            let mut bases: Vec<usize> = (0..=last).step_by(m).collect();
            if bases.last() != Some(&last) {
                bases.push(last);
            }
            bases
        }
    }
}

/// Grid function with one `n`-vector per node and a fill mask.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionGrid {
    n1: usize,
    n2: usize,
    n: usize,
    values: Vec<f64>,
    filled: Vec<bool>,
}

impl SolutionGrid {
    pub fn new(n1: usize, n2: usize, n: usize) -> Self {
        let nodes = (n1 + 1) * (n2 + 1);
        SolutionGrid { n1, n2, n, values: vec![0.0; nodes * n], filled: vec![false; nodes] }
    }

    /// Grid populated from the exact solution of `problem`.
    pub fn from_exact(problem: &PdaeProblem, grid: &GridSpec) -> Result<Self> {
        let mut sol = Self::new(grid.n1, grid.n2, problem.order());
        for i in 0..=grid.n1 {
            for j in 0..=grid.n2 {
                let u = problem
                    .exact_value(grid.x(i), grid.t(j))
                    .ok_or_else(|| Error::Unsupported(format!("{} has no exact solution", problem.name())))?;
                sol.set(i, j, &u);
            }
        }
        Ok(sol)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n)
    }

    fn node(&self, i: usize, j: usize) -> usize {
        assert!(i <= self.n1 && j <= self.n2, "node ({i}, {j}) outside the grid");
        i * (self.n2 + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let k = self.node(i, j) * self.n;
        &self.values[k..k + self.n]
    }

    pub fn set(&mut self, i: usize, j: usize, v: &[f64]) {
        assert_eq!(v.len(), self.n);
        let node = self.node(i, j);
        self.values[node * self.n..(node + 1) * self.n].copy_from_slice(v);
        self.filled[node] = true;
    }

    /// Marks a node as unknown and poisons its value with NaN.
    pub fn clear(&mut self, i: usize, j: usize) {
        let node = self.node(i, j);
        self.values[node * self.n..(node + 1) * self.n].fill(f64::NAN);
        self.filled[node] = false;
    }

    pub fn is_filled(&self, i: usize, j: usize) -> bool {
        self.filled[self.node(i, j)]
    }

    pub fn all_filled(&self) -> bool {
        self.filled.iter().all(|&f| f)
    }

    /// Max over nodes of the max-abs component.
    pub fn max_norm(&self) -> f64 {
        vec_max_abs(&self.values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Linear system for one cell.
#[derive(Clone, Debug)]
pub struct CellSystem {
    pub base: (usize, usize),
    pub order: usize,
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Grid node of each unknown block, in unknown order.
    pub node_map: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveReport {
    /// Max-norm error against the exact solution, when one is known.
    pub delta_u: Option<f64>,
    pub max_solution_norm: f64,
    pub cells_solved: usize,
    /// Cells whose base was shifted back to end on the boundary.
    pub clamped_cells: usize,
    pub wall_time: f64,
    pub warnings: Vec<String>,
}

pub fn assemble_cell(
    problem: &PdaeProblem,
    grid: &GridSpec,
    st1: &StencilTable,
    st2: &StencilTable,
    i: usize,
    j: usize,
    sol: &SolutionGrid,
) -> Result<CellSystem> {
    let (m1, m2, n) = (st1.degree(), st2.degree(), problem.order());
    if sol.dims() != (grid.n1, grid.n2, n) {
        return Err(Error::Precondition("solution grid does not match grid and problem".into()));
    }
    if i + m1 > grid.n1 || j + m2 > grid.n2 {
        return Err(Error::Precondition(format!(
            "cell at ({i}, {j}) of size {m1}x{m2} leaves the {}x{} grid",
            grid.n1, grid.n2
        )));
    }
    for l1 in 1..=m1 {
        if !sol.is_filled(i + l1, j) {
            return Err(Error::Precondition(format!("bottom-layer node ({}, {j}) is not filled", i + l1)));
        }
    }
    for l2 in 1..=m2 {
        if !sol.is_filled(i, j + l2) {
            return Err(Error::Precondition(format!("left-layer node ({i}, {}) is not filled", j + l2)));
        }
    }

    let order = m1 * m2 * n;
    let block = |a: usize, b: usize| ((a - 1) * m2 + (b - 1)) * n;
    let (inv_h, inv_tau) = (1.0 / grid.h, 1.0 / grid.tau);
    let (g1, g2) = (st1.full_weights(), st2.full_weights());
    let mut matrix = DenseMatrix::zeros(order, order);
    let mut rhs = vec![0.0; order];
    let mut node_map = Vec::with_capacity(m1 * m2);

    for a in 1..=m1 {
        for b in 1..=m2 {
            let (x, t) = (grid.x(i + a), grid.t(j + b));
            let am = problem.a(x, t);
            let bm = problem.b(x, t);
            let cm = problem.c(x, t);
            let row = block(a, b);
            for l in 1..=m2 {
                matrix.add_block(row, block(a, l), &am, g2[(b - 1, l)] * inv_tau);
            }
            for l in 1..=m1 {
                matrix.add_block(row, block(l, b), &bm, g1[(a - 1, l)] * inv_h);
            }
            matrix.add_block(row, row, &cm, 1.0);

            let f = problem.f(x, t);
            let below = am.matvec(sol.get(i + a, j));
            let left = bm.matvec(sol.get(i, j + b));
            let (wb, wl) = (g2[(b - 1, 0)] * inv_tau, g1[(a - 1, 0)] * inv_h);
            for k in 0..n {
                rhs[row + k] = f[k] - wb * below[k] - wl * left[k];
            }
            node_map.push((i + a, j + b));
        }
    }
    Ok(CellSystem { base: (i, j), order, matrix, rhs, node_map })
}

/// Solves a cell system, returning one vector per entry of `node_map`.
pub fn solve_cell(cell: &CellSystem) -> Result<Vec<Vec<f64>>> {
    let (i, j) = cell.base;
    let lu = LuDecomposition::new(&cell.matrix).map_err(|e| match e {
        Error::Singular { pivot } => Error::SingularCell { i, j, pivot },
        other => other,
    })?;
    let x = lu.solve(&cell.rhs);
    let n = cell.order / cell.node_map.len().max(1);
    Ok(x.chunks(n).map(<[f64]>::to_vec).collect())
}

fn validate_degrees(grid: &GridSpec, m1: usize, m2: usize) -> Result<()> {
    for (name, m, count) in [("m1", m1, grid.n1), ("m2", m2, grid.n2)] {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("{name} = {m} outside 1..={MAX_DEGREE}")));
        }
        if m > count {
            return Err(Error::InvalidArgument(format!("{name} = {m} exceeds the {count} steps along its axis")));
        }
    }
    Ok(())
}

/// Solves the scheme on the whole grid with the default options.
pub fn march(problem: &PdaeProblem, grid: &GridSpec, m1: usize, m2: usize) -> Result<(SolutionGrid, SolveReport)> {
    march_with(problem, grid, m1, m2, &MarchOptions::default())
}

pub fn march_with(
    problem: &PdaeProblem,
    grid: &GridSpec,
    m1: usize,
    m2: usize,
    options: &MarchOptions,
) -> Result<(SolutionGrid, SolveReport)> {
    let start = Instant::now();
    validate_degrees(grid, m1, m2)?;
    let st1 = build_stencil(m1)?;
    let st2 = build_stencil(m2)?;
    let n = problem.order();
    let mut report = SolveReport::default();
    if let Some(w) = problem.corner_mismatch(grid.x0, grid.t0) {
        report.warnings.push(w);
    }

    let mut sol = SolutionGrid::new(grid.n1, grid.n2, n);
    for i in 0..=grid.n1 {
        sol.set(i, 0, &problem.phi(grid.x(i)));
    }
    for j in 1..=grid.n2 {
        sol.set(0, j, &problem.psi(grid.t(j)));
    }
    if !sol.values().iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("boundary data are not finite".into()));
    }

    let xs = cell_bases(grid.n1, m1, options.stride);
    let ts = cell_bases(grid.n2, m2, options.stride);
    let misaligned = |bases: &[usize], m: usize| bases.last().is_some_and(|b| b % m != 0);
    let clamp_x = options.stride == CellStride::Block && misaligned(&xs, m1);
    let clamp_t = options.stride == CellStride::Block && misaligned(&ts, m2);
    for &j in &ts {
        for &i in &xs {
            let cell = assemble_cell(problem, grid, &st1, &st2, i, j, &sol)?;
            let values = solve_cell(&cell)?;
            for (&(ni, nj), v) in cell.node_map.iter().zip(&values) {
                if !v.iter().all(|c| c.is_finite()) {
                    return Err(Error::Instability { i, j });
                }
                sol.set(ni, nj, v);
            }
            report.cells_solved += 1;
            let last_i = clamp_x && Some(&i) == xs.last();
            let last_j = clamp_t && Some(&j) == ts.last();
            if last_i || last_j {
                report.clamped_cells += 1;
            }
        }
    }
    if report.clamped_cells > 0 {
        report.warnings.push(format!(
            "{} cells were shifted back to end on the boundary and overwrote shared nodes",
            report.clamped_cells
        ));
    }
    report.max_solution_norm = sol.max_norm();
    if problem.exact().is_some() {
        report.delta_u = Some(error_norm(&sol, problem, grid)?);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((sol, report))
}

/// `max_{i,j} ‖u(x_i, t_j) − v_{i,j}‖∞` over every node, boundary included.
pub fn error_norm(sol: &SolutionGrid, problem: &PdaeProblem, grid: &GridSpec) -> Result<f64> {
    if problem.exact().is_none() {
        return Err(Error::Unsupported(format!("{} has no exact solution", problem.name())));
    }
    if sol.dims() != (grid.n1, grid.n2, problem.order()) {
        return Err(Error::Precondition("solution grid does not match grid and problem".into()));
    }
    if !sol.all_filled() {
        return Err(Error::Precondition("solution grid has unfilled nodes".into()));
    }
    let mut err = 0.0f64;
    for i in 0..=grid.n1 {
        for j in 0..=grid.n2 {
            let u = problem.exact_value(grid.x(i), grid.t(j)).expect("checked above");
            for (a, b) in u.iter().zip(sol.get(i, j)) {
                err = err.max((a - b).abs());
            }
        }
    }
    Ok(err)
}

/// Which steps are halved between refinement levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineAxis {
    X,
    T,
    Both,
}

/// Errors at or below this are treated as exact when fitting orders.
pub const EXACT_ERROR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    /// Refined step per level (`h` for x or both, `τ` for t).
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln Δu` against `ln step`; `None` when the
    /// scheme is exact at every level.
    pub order: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn convergence_slope(
    problem: &PdaeProblem,
    m1: usize,
    m2: usize,
    base: &GridSpec,
    levels: usize,
    axis: RefineAxis,
    options: &MarchOptions,
) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(Error::InvalidArgument("a convergence study needs at least two levels".into()));
    }
    if problem.exact().is_none() {
        return Err(Error::Unsupported(format!("{} has no exact solution", problem.name())));
    }
    let mut steps = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    for level in 0..levels {
        let f = 2f64.powi(level as i32);
        let grid = match axis {
            RefineAxis::X => base.refined(f, 1.0)?,
            RefineAxis::T => base.refined(1.0, f)?,
            RefineAxis::Both => base.refined(f, f)?,
        };
        let (_, report) = march_with(problem, &grid, m1, m2, options)?;
        steps.push(if axis == RefineAxis::T { grid.tau } else { grid.h });
        errors.push(report.delta_u.expect("exact solution present"));
    }
    let usable: Vec<(f64, f64)> =
        steps.iter().zip(&errors).filter(|(_, &e)| e > EXACT_ERROR_FLOOR).map(|(&s, &e)| (s.ln(), e.ln())).collect();
    let order = (usable.len() >= 2).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        least_squares_slope(&xs, &ys)
    });
    Ok(ConvergenceStudy { steps, errors, order })
}
