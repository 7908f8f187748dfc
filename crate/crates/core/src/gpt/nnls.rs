//! Nonnegative least squares (Lawson–Hanson active set).

use nalgebra::{DMatrix, DVector};

/// Solution of `min ‖A x − b‖₂` subject to `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
}

/// Solves the NNLS problem for a dense `a` (rows = ambient dimension,
/// columns = generators).
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> NnlsSolution {
    let n = a.ncols();
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    // Columns whose first passive solve came out nonpositive; cleared when x moves.
    let mut rejected = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let r = b - a * &x;
        let r_norm = r.norm();
        if r_norm == 0.0 {
            break;
        }
        let gradient = a.transpose() * &r;
        // Angle test: scale-free, so columns almost parallel to the current
        // face still enter while the residual is far from zero.
        let cosine = |j: usize| gradient[j] / (norms[j] * r_norm);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !rejected[j] && norms[j] > 0.0)
            .max_by(|&i, &j| cosine(i).total_cmp(&cosine(j)));
        let Some(j) = candidate else { break };
        if cosine(j) <= 1e-14 {
            break;
        }
        let z = solve_passive(a, b, &{
            let mut p = passive.clone();
            p[j] = true;
            p
        });
        if z[j] <= 0.0 {
            rejected[j] = true;
            continue;
        }
        rejected.iter_mut().for_each(|f| *f = false);
        passive[j] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            let z = solve_passive(a, b, &passive);
            let blocked: Vec<usize> = (0..n).filter(|&i| passive[i] && z[i] <= 0.0).collect();
            if blocked.is_empty() || inner > 3 * n + 10 {
                x = z;
                break;
            }
            let alpha = blocked
                .iter()
                .map(|&i| x[i] / (x[i] - z[i]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }

    let residual = (a * &x - b).norm();
    NnlsSolution { x, residual }
}

/// Unconstrained least squares on the passive columns; zero elsewhere.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let columns: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let mut z = DVector::zeros(passive.len());
    if columns.is_empty() {
        return z;
    }
    let sub = DMatrix::from_fn(a.nrows(), columns.len(), |r, c| a[(r, columns[c])]);
    let svd = sub.svd(true, true);
    if let Ok(sol) = svd.solve(b, 1e-13) {
        for (k, &j) in columns.iter().enumerate() {
            z[j] = sol[k];
        }
    }
    z
}
