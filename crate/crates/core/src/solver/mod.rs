//! Superposition of plate and beam operators, constrained solves and
//! diagnostics.

pub mod cg;
mod norms;
pub mod skyline;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::SolveError;
use crate::sparse::CsrMatrix;

pub use norms::{energy_norms, error_norms, positivity_diagnostic, EnergyNorms, ErrorNorms};
pub use skyline::SkylineLdl;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 0;
const REFINEMENT_STEPS: usize = 5;

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Constrained DOFs and their prescribed values.
    pub constraints: BTreeMap<usize, f64>,
}

impl LinearSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Result<Self, SolveError> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != rhs.len() {
            return Err(SolveError::Dimension(format!(
                "matrix is {}x{} but the load has length {}",
                matrix.nrows(),
                matrix.ncols(),
                rhs.len()
            )));
        }
        Ok(Self { matrix, rhs, constraints: BTreeMap::new() })
    }

    /// Fixes every listed DOF to zero.
    pub fn with_homogeneous(mut self, dofs: impl IntoIterator<Item = usize>) -> Result<Self, SolveError> {
        for d in dofs {
            if d >= self.len() {
                return Err(SolveError::Dimension(format!("constrained dof {d} out of range {}", self.len())));
            }
            self.constraints.insert(d, 0.0);
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Unconstrained DOFs in increasing order.
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.len()).filter(|d| !self.constraints.contains_key(d)).collect()
    }
}

/// `A = A_plate + sum A_beam`, `l = l_plate + sum l_beam`, constraints kept.
pub fn superpose(plate: &LinearSystem, beam_matrices: &[CsrMatrix], beam_loads: &[Vec<f64>]) -> Result<LinearSystem, SolveError> {
    let n = plate.len();
    let mut matrix = plate.matrix.clone();
    for (i, m) in beam_matrices.iter().enumerate() {
        if m.nrows() != n || m.ncols() != n {
            return Err(SolveError::Dimension(format!("beam matrix {i} is {}x{}, plate system has {n} dofs", m.nrows(), m.ncols())));
        }
        matrix = matrix.add(m);
    }
    let mut rhs = plate.rhs.clone();
    for (i, l) in beam_loads.iter().enumerate() {
        if l.len() != n {
            return Err(SolveError::Dimension(format!("beam load {i} has length {}, plate system has {n} dofs", l.len())));
        }
        for (r, v) in rhs.iter_mut().zip(l) {
            *r += v;
        }
    }
    Ok(LinearSystem { matrix, rhs, constraints: plate.constraints.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMethod {
    #[default]
    Direct,
    Cg,
}

impl FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(SolveMethod::Direct),
            "cg" => Ok(SolveMethod::Cg),
            other => Err(format!("unknown solver `{other}` (expected direct or cg)")),
        }
    }
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Direct => "direct",
            SolveMethod::Cg => "cg",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub method: SolveMethod,
    pub tol: f64,
    /// CG iteration cap; `None` means ten times the number of free DOFs.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { method: SolveMethod::Direct, tol: DEFAULT_TOLERANCE, max_iterations: None }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub num_dofs: usize,
    pub num_free: usize,
    /// CG iterations, or refinement steps of the direct solve.
    pub iterations: usize,
    pub relative_residual: f64,
    /// `max |A - A^T| / max |A|`.
    pub max_asymmetry: f64,
    /// Negative pivots of the direct factorization.
    pub negative_pivots: Option<usize>,
    /// Filled in by callers that run [`positivity_diagnostic`].
    pub positivity: Option<f64>,
    pub wall_time: Duration,
}

/// `b_i - (A x)_i` accumulated with error-free transformations, so the
/// residual stays accurate when it is much smaller than `|A||x|`.
fn accurate_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| {
            let (cols, vals) = a.row(i);
            let (mut s, mut c) = (b[i], 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                let p = -v * x[j];
                let pe = (-v).mul_add(x[j], -p);
                let t = s + p;
                let z = t - s;
                c += (s - (t - z)) + (p - z) + pe;
                s = t;
            }
            s + c
        })
        .collect()
}

/// `eps || |A| |x| || / ||b||`: what rounding `x` to doubles alone can leave.
fn roundoff_floor(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = (0..a.nrows()).map(|i| {
        let (cols, vals) = a.row(i);
        cols.iter().zip(vals).map(|(&j, &v)| (v * x[j]).abs()).sum::<f64>()
    });
    let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    f64::EPSILON * ax.map(|v| v * v).sum::<f64>().sqrt() / bn
}

fn residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let r = accurate_residual(a, x, b);
    let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rel = if bn > 0.0 { rn / bn } else if rn == 0.0 { 0.0 } else { f64::INFINITY };
    (r, rel)
}

/// Solves the constrained system by symmetric elimination of the constrained DOFs.
pub fn solve(system: &LinearSystem, options: &SolveOptions) -> Result<(Vec<f64>, SolveReport), SolveError> {
    let started = Instant::now();
    let n = system.len();
    if system.matrix.nrows() != n || system.matrix.ncols() != n {
        return Err(SolveError::Dimension(format!("matrix is {}x{}, load has length {n}", system.matrix.nrows(), system.matrix.ncols())));
    }
    let scale = system.matrix.max_abs();
    let max_asymmetry = if scale > 0.0 { system.matrix.max_asymmetry() / scale } else { 0.0 };

    let free = system.free_dofs();
    let mut known = vec![0.0; n];
    for (&d, &v) in &system.constraints {
        known[d] = v;
    }
    let lifted = system.matrix.mul_vec(&known);
    let rhs: Vec<f64> = free.iter().map(|&d| system.rhs[d] - lifted[d]).collect();
    let reduced = system.matrix.principal_submatrix(&free);

    let (x, iterations, relative_residual, negative_pivots) = match options.method {
        SolveMethod::Direct => {
            let factor = SkylineLdl::factor(&reduced, &free)?;
            let mut x = factor.solve(&rhs);
            let (mut r, mut rel) = residual(&reduced, &x, &rhs);
            let mut steps = 0;
            while rel > options.tol && steps < REFINEMENT_STEPS {
                let dx = factor.solve(&r);
                for (xi, d) in x.iter_mut().zip(&dx) {
                    *xi += d;
                }
                (r, rel) = residual(&reduced, &x, &rhs);
                steps += 1;
            }
            if !(rel <= options.tol) {
                return Err(SolveError::RefinementStalled { steps, residual: rel, floor: roundoff_floor(&reduced, &x, &rhs) });
            }
            (x, steps, rel, Some(factor.negative_pivots()))
        }
        SolveMethod::Cg => {
            let max_it = options.max_iterations.unwrap_or(10 * free.len().max(1));
            let (x, it, _) = cg::conjugate_gradient(&reduced, &rhs, options.tol, max_it)?;
            let (_, rel) = residual(&reduced, &x, &rhs);
            (x, it, rel, None)
        }
    };

    let mut u = known;
    for (&d, v) in free.iter().zip(x) {
        u[d] = v;
    }
    let report = SolveReport {
        method: options.method,
        num_dofs: n,
        num_free: free.len(),
        iterations,
        relative_residual,
        max_asymmetry,
        negative_pivots,
        positivity: None,
        wall_time: started.elapsed(),
    };
    Ok((u, report))
}
