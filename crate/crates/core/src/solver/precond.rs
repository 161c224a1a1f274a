//! Tridiagonal `L + αM` solves used to precondition the descent direction.
//!
//! `L` is the stiffness matrix of the Dirichlet term and `M` the diagonal
//! volume-weight mass matrix. The boundary node is eliminated, so the
//! solution always vanishes there.

use crate::functionals::Operators;

pub(crate) struct Preconditioner {
    /// Modified diagonal from the forward sweep.
    diag: Vec<f64>,
    /// `-κ_i` couplings between node `i` and `i + 1`.
    off: Vec<f64>,
}

impl Preconditioner {
    pub(crate) fn new(ops: &Operators, alpha: f64) -> Self {
        let m = ops.vw.len() - 1;
        let kappa = &ops.kappa;
        let mut diag = vec![0.0; m];
        for (i, d) in diag.iter_mut().enumerate() {
            let left = if i > 0 { kappa[i - 1] } else { 0.0 };
            *d = left + kappa[i] + alpha * ops.vw[i];
        }
        let off: Vec<f64> = kappa[..m - 1].iter().map(|k| -k).collect();
        // Thomas forward elimination, stored as modified pivots
        for i in 1..m {
            diag[i] -= off[i - 1] * off[i - 1] / diag[i - 1];
        }
        Self { diag, off }
    }

    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        let mut y = rhs[..m].to_vec();
        for i in 1..m {
            y[i] -= self.off[i - 1] / self.diag[i - 1] * y[i - 1];
        }
        let mut x = vec![0.0; m + 1];
        x[m - 1] = y[m - 1] / self.diag[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / self.diag[i];
        }
        x
    }
}
