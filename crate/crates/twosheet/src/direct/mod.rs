//! Finite-difference model of the eps-manifold at N = 2: two Dirichlet grid
//! sheets over a box joined by weighted 1-D tube chains at the lattice
//! points i*eps.

mod eigen;
mod inertia;
mod study;

pub use eigen::{dense_eigenvalues, smallest_eigenpairs};
pub use inertia::{count_below, count_in_band};
pub use study::{convergence_study, ConvergenceReport, ConvergenceRow, StudyOptions};

use crate::base::sphere_volume;
use crate::error::{Error, Result};
use crate::regime::ScalingLaw;
use std::collections::BTreeMap;

/// Row threshold below which the dense eigensolver is used.
pub(crate) const DENSE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub law: ScalingLaw,
    pub eps: f64,
    /// Grid refinement K; sheet spacing h = eps / K.
    pub refine: u32,
    pub sides: [f64; 2],
}

impl ModelConfig {
    pub fn new(law: ScalingLaw, eps: f64, refine: u32, sides: [f64; 2]) -> Result<Self> {
        if law.dim != 2 {
            return Err(Error::GeometryError(format!(
                "direct model is two-dimensional, law has dimension {}",
                law.dim
            )));
        }
        if !(eps > 0.0) || (eps.log2().round() - eps.log2()).abs() > 1e-12 || eps > 0.5 {
            return Err(Error::GeometryError(format!(
                "eps must be of the form 1/2^k, got {eps}"
            )));
        }
        if refine == 0 {
            return Err(Error::GeometryError("refinement K must be positive".into()));
        }
        if sides.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::GeometryError("side lengths must be positive".into()));
        }
        for &a in &sides {
            let cells = a / eps;
            if (cells - cells.round()).abs() > 1e-9 || cells.round() < 2.0 {
                return Err(Error::GeometryError(format!(
                    "eps = {eps} does not divide side length {a} into >= 2 cells"
                )));
            }
        }
        Ok(ModelConfig {
            law,
            eps,
            refine,
            sides,
        })
    }

    pub fn h(&self) -> f64 {
        self.eps / self.refine as f64
    }

    /// Tube chain segment count: even, at least 4, resolving q^eps at sheet
    /// spacing.
    pub fn tube_segments(&self) -> usize {
        let n = (self.law.q_at(self.eps) / self.h()).ceil() as usize;
        let n = n.max(4);
        n + n % 2
    }
}

/// Symmetric sparse matrix in CSR form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    fn from_entries(n: usize, entries: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in entries.keys() {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for (&(_, j), &v) in entries {
            cols.push(j);
            vals.push(v);
        }
        SparseSym {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.cols[k] == j {
                return self.vals[k];
            }
        }
        0.0
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

/// One tube chain: junction rows on both sheets plus its interior row range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tube {
    /// Interior grid coordinates (1-based) of the lattice point.
    pub grid: (usize, usize),
    pub junction0: usize,
    pub junction1: usize,
    /// First interior row; the chain occupies first_row..first_row + n_t - 1,
    /// ordered from sheet 0 toward sheet 1.
    pub first_row: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub stiffness: SparseSym,
    pub mass: Vec<f64>,
    /// Interior nodes per axis.
    pub nx: usize,
    pub ny: usize,
    /// Rows occupied by the two sheets (tube rows follow).
    pub sheet_rows: usize,
    pub tubes: Vec<Tube>,
    /// Segments per tube chain (n_t - 1 interior nodes); 0 when w = 0.
    pub n_t: usize,
    pub h: f64,
    pub h_t: f64,
    /// Tube weight w = omega(N) * (d^eps)^{N-1}.
    pub w: f64,
}

impl DiscreteModel {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Sheet row of interior grid node (ix, iy), 1-based, on sheet s.
    /// Sheets are interleaved to keep the matrix bandwidth small.
    pub fn sheet_row(&self, s: usize, ix: usize, iy: usize) -> usize {
        2 * ((iy - 1) * self.nx + (ix - 1)) + s
    }

    /// Rayleigh quotient of a trial vector.
    pub fn rayleigh(&self, u: &[f64]) -> f64 {
        let mut ku = vec![0.0; self.dim()];
        self.stiffness.matvec(u, &mut ku);
        let num: f64 = u.iter().zip(&ku).map(|(a, b)| a * b).sum();
        let den: f64 = u
            .iter()
            .zip(&self.mass)
            .map(|(a, m)| a * a * m)
            .sum();
        num / den
    }
}

/// Assembles the stiffness/mass pair of the two-sheet tube model.
///
/// The quadratic form is the FD energy sum_edges (u_a - u_b)^2 per sheet
/// (which discretizes the Dirichlet integral in 2-D) plus
/// (w/h_t) sum_j (v_{j+1} - v_j)^2 per tube; the mass is lumped: h^2 per
/// sheet node, w*h_t per tube interior node, h^2 + w*h_t/2 at junctions.
pub fn assemble(config: &ModelConfig) -> Result<DiscreteModel> {
    let h = config.h();
    let d = config.law.d_at(config.eps);
    if d > h * (1.0 + 1e-12) {
        return Err(Error::GeometryError(format!(
            "tube radius d = {d} exceeds grid spacing h = {h}; holes must be sub-grid"
        )));
    }
    let w = sphere_volume(2) * d;
    let q_eps = config.law.q_at(config.eps);

    let nx = (config.sides[0] / h).round() as usize - 1;
    let ny = (config.sides[1] / h).round() as usize - 1;
    let sheet_rows = 2 * nx * ny;
    let n_t = if w == 0.0 { 0 } else { config.tube_segments() };
    let h_t = if n_t == 0 { 0.0 } else { q_eps / n_t as f64 };

    // Lattice points i*eps with dist(x_i, boundary) >= eps/2.
    let cells_x = (config.sides[0] / config.eps).round() as usize;
    let cells_y = (config.sides[1] / config.eps).round() as usize;
    let k = config.refine as usize;

    let mut tubes = Vec::new();
    let mut next_row = sheet_rows;
    for j in 1..cells_y {
        for i in 1..cells_x {
            let (ix, iy) = (i * k, j * k);
            let grid = (ix, iy);
            let junction0 = 2 * ((iy - 1) * nx + (ix - 1));
            let tube = Tube {
                grid,
                junction0,
                junction1: junction0 + 1,
                first_row: next_row,
            };
            if n_t > 0 {
                next_row += n_t - 1;
            }
            tubes.push(tube);
        }
    }
    let dim = next_row;

    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let add = |e: &mut BTreeMap<(usize, usize), f64>, i: usize, j: usize, v: f64| {
        *e.entry((i, j)).or_insert(0.0) += v;
        if i != j {
            *e.entry((j, i)).or_insert(0.0) += v;
        }
    };
    let mut mass = vec![0.0f64; dim];

    // Sheet stencils: diag 4 (edges to all four neighbors, boundary ones
    // grounded), off-diagonal -1 per interior neighbor.
    for s in 0..2usize {
        for iy in 1..=ny {
            for ix in 1..=nx {
                let row = 2 * ((iy - 1) * nx + (ix - 1)) + s;
                add(&mut entries, row, row, 4.0);
                if ix < nx {
                    add(&mut entries, row, row + 2, -1.0);
                }
                if iy < ny {
                    add(&mut entries, row, row + 2 * nx, -1.0);
                }
                mass[row] = h * h;
            }
        }
    }

    // Tube chains.
    if n_t > 0 {
        let c = w / h_t;
        for tube in &tubes {
            let rows: Vec<usize> = std::iter::once(tube.junction0)
                .chain(tube.first_row..tube.first_row + n_t - 1)
                .chain(std::iter::once(tube.junction1))
                .collect();
            for pair in rows.windows(2) {
                add(&mut entries, pair[0], pair[0], c);
                add(&mut entries, pair[1], pair[1], c);
                add(&mut entries, pair[0], pair[1], -c);
            }
            for &r in &rows[1..rows.len() - 1] {
                mass[r] = w * h_t;
            }
            mass[tube.junction0] += w * h_t / 2.0;
            mass[tube.junction1] += w * h_t / 2.0;
        }
    }

    Ok(DiscreteModel {
        stiffness: SparseSym::from_entries(dim, &entries),
        mass,
        nx,
        ny,
        sheet_rows,
        tubes,
        n_t,
        h,
        h_t,
        w,
    })
}

/// Which symmetry class a half-model represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfKind {
    /// Neumann condition at the tube midpoint: even modes.
    Symmetric,
    /// Dirichlet condition at the tube midpoint: odd modes.
    Antisymmetric,
}

/// One sheet plus half of each tube chain, closed at the midpoint by the
/// requested condition. The union of the two half spectra is the full
/// model's spectrum.
pub fn assemble_half(config: &ModelConfig, kind: HalfKind) -> Result<DiscreteModel> {
    let full = assemble(config)?;
    let nx = full.nx;
    let ny = full.ny;
    let sheet_rows = nx * ny;
    let n_t = full.n_t;
    let (w, h_t, h) = (full.w, full.h_t, full.h);
    // interior chain nodes kept per tube
    let chain = if n_t == 0 {
        0
    } else {
        match kind {
            HalfKind::Symmetric => n_t / 2,     // midpoint node included
            HalfKind::Antisymmetric => n_t / 2 - 1, // midpoint grounded
        }
    };

    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let add = |e: &mut BTreeMap<(usize, usize), f64>, i: usize, j: usize, v: f64| {
        *e.entry((i, j)).or_insert(0.0) += v;
        if i != j {
            *e.entry((j, i)).or_insert(0.0) += v;
        }
    };
    let dim = sheet_rows + full.tubes.len() * chain;
    let mut mass = vec![0.0f64; dim];

    for iy in 1..=ny {
        for ix in 1..=nx {
            let row = (iy - 1) * nx + (ix - 1);
            add(&mut entries, row, row, 4.0);
            if ix < nx {
                add(&mut entries, row, row + 1, -1.0);
            }
            if iy < ny {
                add(&mut entries, row, row + nx, -1.0);
            }
            mass[row] = h * h;
        }
    }

    let mut tubes = Vec::new();
    if n_t > 0 {
        let c = w / h_t;
        for (t, tube) in full.tubes.iter().enumerate() {
            let (ix, iy) = tube.grid;
            let junction = (iy - 1) * nx + (ix - 1);
            let first_row = sheet_rows + t * chain;
            let rows: Vec<usize> = std::iter::once(junction)
                .chain(first_row..first_row + chain)
                .collect();
            for pair in rows.windows(2) {
                add(&mut entries, pair[0], pair[0], c);
                add(&mut entries, pair[1], pair[1], c);
                add(&mut entries, pair[0], pair[1], -c);
            }
            for &r in &rows[1..] {
                mass[r] = w * h_t;
            }
            mass[junction] += w * h_t / 2.0;
            let last = *rows.last().unwrap();
            match kind {
                // The midpoint carries half a cell of mass and no edge beyond.
                HalfKind::Symmetric => mass[last] = w * h_t / 2.0,
                // Edge into the grounded midpoint contributes only a diagonal.
                HalfKind::Antisymmetric => add(&mut entries, last, last, c),
            }
            tubes.push(Tube {
                grid: tube.grid,
                junction0: junction,
                junction1: junction,
                first_row,
            });
        }
    }

    Ok(DiscreteModel {
        stiffness: SparseSym::from_entries(dim, &entries),
        mass,
        nx,
        ny,
        sheet_rows,
        tubes,
        n_t: chain + 1,
        h,
        h_t,
        w,
    })
}

/// Normalized M-inner product of the two sheet restrictions of `vector`:
/// 1 for a sheet-symmetric mode, -1 for an antisymmetric one.
pub fn sheet_symmetry_indicator(model: &DiscreteModel, vector: &[f64]) -> f64 {
    assert_eq!(vector.len(), model.dim());
    let mut dot = 0.0;
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    for g in 0..model.sheet_rows / 2 {
        let (u1, u2) = (vector[2 * g], vector[2 * g + 1]);
        let m = model.mass[2 * g];
        dot += m * u1 * u2;
        n1 += m * u1 * u1;
        n2 += m * u2 * u2;
    }
    dot / (n1.sqrt() * n2.sqrt())
}
