//! Direct sparse LU with partial pivoting for the indefinite systems.

use std::cell::Cell;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Once;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::assembly::SparseMatrix;
use crate::error::{Error, Result};

/// Relative tolerance of the residual contract
/// `|M x - b| <= RESIDUAL_TOL (|M|_max |x| + |b|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Largest deviation from the known all-ones solution before a matrix is
/// declared numerically singular.
const PROBE_TOL: f64 = 1e-2;

pub struct Factorization {
    lu: Lu<usize, f64>,
    matrix: SparseMatrix,
    max_abs: f64,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("size", &self.size())
            .field("nnz", &self.nnz())
            .finish()
    }
}

pub fn factor(matrix: &SparseMatrix) -> Result<Factorization> {
    let (n, m) = matrix.shape();
    if n != m {
        return Err(Error::NotSquare(n, m));
    }
    let triplets: Vec<_> = matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidMesh(format!("sparse matrix creation failed: {e:?}")))?;
    let lu = match quiet_unwind(|| csc.sp_lu()) {
        Some(Ok(lu)) => lu,
        Some(Err(LuError::SymbolicSingular { index })) => return Err(Error::StructurallySingular(index)),
        Some(Err(LuError::Generic(e))) => return Err(Error::InvalidMesh(format!("factorization failed: {e:?}"))),
        // exact zero pivot
        None => return Err(Error::NumericallySingular(locate_singular_dof(matrix))),
    };
    let f = Factorization {
        lu,
        matrix: matrix.clone(),
        max_abs: matrix.max_abs(),
    };
    if n > 0 {
        f.probe()?;
    }
    Ok(f)
}

thread_local! {
    static QUIET: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f`, turning a panic into `None` without printing it. The LU
/// backend panics on exactly zero pivots instead of returning an error.
fn quiet_unwind<T>(f: impl FnOnce() -> T) -> Option<T> {
    static HOOK: Once = Once::new();
    HOOK.call_once(|| {
        let previous = panic::take_hook();
        panic::set_hook(Box::new(move |info| {
            if !QUIET.with(Cell::get) {
                previous(info);
            }
        }));
    });
    QUIET.with(|q| q.set(true));
    let r = panic::catch_unwind(AssertUnwindSafe(f));
    QUIET.with(|q| q.set(false));
    r.ok()
}

/// Dof with the largest deviation when `M + s I` (small `s`) is solved
/// against `M 1`: the near-null direction of `M` dominates the error.
fn locate_singular_dof(matrix: &SparseMatrix) -> usize {
    let n = matrix.nrows();
    let shift = 1e-8 * matrix.max_abs().max(f64::MIN_POSITIVE);
    let mut t: Vec<_> = matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    t.extend((0..n).map(|i| Triplet::new(i, i, shift)));
    let Ok(csc) = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t) else {
        return 0;
    };
    let Some(Ok(lu)) = quiet_unwind(|| csc.sp_lu()) else {
        return 0;
    };
    let b = matrix.mul_vec(&vec![1.0; n]).expect("square");
    let mut x = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    lu.solve_in_place(x.as_mut());
    (0..n)
        .map(|i| (i, (x[(i, 0)] - 1.0).abs()))
        .filter(|(_, d)| !d.is_nan())
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

impl Factorization {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    fn raw_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }

    /// Solves with a known solution (all ones), with one refinement step,
    /// and reports the worst dof if no correct digit survives: the pivots
    /// were numerically zero.
    fn probe(&self) -> Result<()> {
        let n = self.size();
        let ones = vec![1.0; n];
        let b = self.matrix.mul_vec(&ones)?;
        let mut x = self.raw_solve(&b);
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericallySingular(i));
        }
        let mx = self.matrix.mul_vec(&x)?;
        let res: Vec<f64> = b.iter().zip(&mx).map(|(b, a)| b - a).collect();
        for (xi, di) in x.iter_mut().zip(self.raw_solve(&res)) {
            *xi += di;
        }
        let mut worst = (0, 0.0);
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NumericallySingular(i));
            }
            let d = (v - 1.0).abs();
            if d > worst.1 {
                worst = (i, d);
            }
        }
        log::debug!("probe n={n} max deviation {:.3e} at {}", worst.1, worst.0);
        if worst.1 > PROBE_TOL {
            return Err(Error::NumericallySingular(worst.0));
        }
        Ok(())
    }

    pub fn residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let mx = self.matrix.mul_vec(x).expect("size checked");
        mx.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn bound(&self, x: &[f64], rhs: &[f64]) -> f64 {
        RESIDUAL_TOL * (self.max_abs * norm(x) + norm(rhs))
    }

    /// Solves `M x = rhs`, with one step of iterative refinement if the
    /// residual contract is not met by the first solve.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.size() {
            return Err(Error::SizeMismatch {
                expected: self.size(),
                got: rhs.len(),
            });
        }
        let mut x = self.raw_solve(rhs);
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericallySingular(i));
        }
        let mut r = self.residual(&x, rhs);
        if r > self.bound(&x, rhs) {
            let mx = self.matrix.mul_vec(&x)?;
            let res: Vec<f64> = rhs.iter().zip(&mx).map(|(b, a)| b - a).collect();
            let dx = self.raw_solve(&res);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            r = self.residual(&x, rhs);
        }
        let bound = self.bound(&x, rhs);
        if r > bound {
            return Err(Error::ResidualTooLarge { residual: r, bound });
        }
        log::debug!("solve n={} residual={r:.3e} bound={bound:.3e}", self.size());
        Ok(x)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
