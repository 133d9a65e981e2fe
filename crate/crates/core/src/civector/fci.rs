use nalgebra::{DMatrix, SymmetricEigen};

use super::hamiltonian::CIHamiltonian;
use crate::linalg::{axpy, dot, norm, scale};
use crate::{Error, Result};

const DENSE_FALLBACK_DIM: usize = 4000;
const MAX_ITER: usize = 200;
const MAX_SUBSPACE: usize = 30;
const RESIDUAL_TOL: f64 = 1e-8;

fn lowest_eigenpair(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let k = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty matrix");
    (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
}

/// Fixes the overall sign so the largest-magnitude amplitude is positive.
fn canonical_sign(v: &mut [f64]) {
    let (imax, _) = v.iter().enumerate().fold(
        (0, 0.0f64),
        |best, (i, x)| if x.abs() > best.1 + 1e-12 { (i, x.abs()) } else { best },
    );
    if v.get(imax).is_some_and(|&x| x < 0.0) {
        scale(-1.0, v);
    }
}

/// Lowest eigenpair of the CI Hamiltonian.
pub fn fci_ground_state(h: &CIHamiltonian) -> Result<(f64, Vec<f64>)> {
    let dim = h.space.dim();
    let (e, mut v) = if dim <= DENSE_FALLBACK_DIM {
        lowest_eigenpair(&h.dense()?)
    } else {
        davidson(|x| h.apply(x), &h.diagonal(), MAX_ITER, MAX_SUBSPACE, RESIDUAL_TOL)?
    };
    canonical_sign(&mut v);
    Ok((e, v))
}

/// Davidson iteration with a diagonal preconditioner and restarts.
pub fn davidson(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    diag: &[f64],
    max_iter: usize,
    max_subspace: usize,
    tol: f64,
) -> Result<(f64, Vec<f64>)> {
    let dim = diag.len();
    let i0 = diag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::SolverFailed("empty space".into()))?;
    // a small deterministic admixture keeps the guess from sitting in a
    // symmetry sector that excludes the ground state
    let mut guess: Vec<f64> = (0..dim)
        .map(|i| 1e-3 * (((i * 7919) % 1009) as f64 / 1009.0 - 0.5))
        .collect();
    guess[i0] = 1.0;

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let add = |mut t: Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>| -> bool {
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(b, &t);
                axpy(-c, b, &mut t);
            }
        }
        let nt = norm(&t);
        if nt < 1e-10 {
            return false;
        }
        scale(1.0 / nt, &mut t);
        images.push(apply(&t));
        basis.push(t);
        true
    };
    add(guess, &mut basis, &mut images);

    let mut best = (f64::INFINITY, Vec::new(), f64::INFINITY);
    for _ in 0..max_iter {
        let k = basis.len();
        let sub = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        let sub = (&sub + sub.transpose()) * 0.5;
        let (theta, y) = lowest_eigenpair(&sub);
        let mut x = vec![0.0; dim];
        let mut ax = vec![0.0; dim];
        for (i, &yi) in y.iter().enumerate() {
            axpy(yi, &basis[i], &mut x);
            axpy(yi, &images[i], &mut ax);
        }
        let mut r = ax.clone();
        axpy(-theta, &x, &mut r);
        let rn = norm(&r);
        if rn < best.2 {
            best = (theta, x.clone(), rn);
        }
        if rn < tol {
            return Ok((theta, x));
        }
        let t: Vec<f64> = r
            .iter()
            .zip(diag)
            .map(|(ri, di)| {
                let d = di - theta;
                ri / if d.abs() < 1e-8 { 1e-8f64.copysign(d) } else { d }
            })
            .collect();
        if basis.len() >= max_subspace {
            basis.clear();
            images.clear();
            add(x, &mut basis, &mut images);
        }
        if !add(t, &mut basis, &mut images) && !add(r, &mut basis, &mut images) {
            break;
        }
    }
    if best.2 < tol {
        return Ok((best.0, best.1));
    }
    Err(Error::SolverFailed(format!(
        "Davidson did not converge, residual {:.3e}",
        best.2
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn davidson_on_diagonal_plus_coupling() {
        let n = 300;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                i as f64 * 0.1
            } else {
                0.01 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        let apply = |x: &[f64]| (&m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec();
        let (e, _) = davidson(apply, &diag, 200, 30, 1e-10).unwrap();
        let (exact, _) = lowest_eigenpair(&m);
        assert!((e - exact).abs() < 1e-10);
    }
}
