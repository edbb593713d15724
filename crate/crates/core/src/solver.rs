//! Matrix-free preconditioned conjugate gradients for the two sparse SPD
//! systems in the crate (random-walker Laplacian, biharmonic inpainting).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("conjugate gradients did not reach residual {tol:e} within {max_iters} iterations (residual {residual:e})")]
    NotConverged {
        tol: f64,
        max_iters: usize,
        residual: f64,
    },
}

/// Symmetric positive-definite operator y = A x.
pub trait SymOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Solver residual tolerance used across the crate.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Iteration cap: 10·sqrt(n) + 1000. Overflowing the cap is an error, never a
/// silently inaccurate result.
pub fn iteration_cap(n: usize) -> usize {
    (10.0 * (n as f64).sqrt()) as usize + 1000
}

/// Jacobi-preconditioned CG. `diag` is the operator diagonal (entries must be
/// positive). Terminates when ||r||₂ ≤ tol·||b||₂, which makes convergence
/// invariant under uniform scaling of the system; b = 0 returns x = 0.
pub fn conjugate_gradient(
    op: &dyn SymOp,
    b: &[f64],
    diag: &[f64],
    tol: f64,
) -> Result<Vec<f64>, SolveError> {
    let n = op.dim();
    assert_eq!(b.len(), n);
    assert_eq!(diag.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }

    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * norm_b;
    let max_iters = iteration_cap(n);

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];

    let mut residual = norm_b;
    if residual <= target {
        return Ok(x);
    }

    for _ in 0..max_iters {
        op.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            // numerically singular direction; give up via the cap error path
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if residual <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    Err(SolveError::NotConverged {
        tol,
        max_iters,
        residual,
    })
}

/// Compressed sparse row matrix, assembled once and applied many times.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row (col, val) lists.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    *di += self.vals[k];
                }
            }
        }
        d
    }
}

impl SymOp for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }
}
