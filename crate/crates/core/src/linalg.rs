//! Small dense Hermitian eigensolves and a matrix-free block power iteration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, UcpError};

/// Eigenpairs of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Dense Hermitian eigensolve, eigenvalues ascending.
///
/// Each eigenvector's phase is fixed so that its largest-magnitude component
/// is real and positive.
pub fn hermitian_eigen(matrix: &DMatrix<Complex64>) -> Result<EigenPairs> {
    let (r, c) = matrix.shape();
    if r != c {
        return Err(UcpError::invalid(format!("matrix is {r}x{c}, not square")));
    }
    if r == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: vec![],
        });
    }
    // symmetrize against rounding in the assembly
    let sym = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let col: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            fix_phase(col)
        })
        .collect();
    Ok(EigenPairs { values, vectors })
}

pub fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(matrix)?.values)
}

fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    if pivot.norm() > 0.0 {
        let rot = pivot.conj() / pivot.norm();
        for x in &mut v {
            *x *= rot;
        }
    }
    v
}

/// Modified Gram–Schmidt (two passes) on coefficient vectors.
///
/// Fails when a vector is numerically dependent on the previous ones.
pub fn orthonormalize(vectors: &mut [Vec<Complex64>]) -> Result<()> {
    for i in 0..vectors.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let (head, tail) = vectors.split_at_mut(i);
                let proj = dot(&tail[0], &head[j]);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = dot(&vectors[i], &vectors[i]).re.sqrt();
        if norm < 1e-12 {
            return Err(UcpError::degenerate(format!(
                "vector {i} is linearly dependent on its predecessors"
            )));
        }
        for x in &mut vectors[i] {
            *x /= norm;
        }
    }
    Ok(())
}

/// `Σ a_i conj(b_i)`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Result of [`block_power_iteration`].
#[derive(Debug, Clone)]
pub struct PowerResult {
    /// Ritz values of the final block, descending.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Subspace (block power) iteration for the largest eigenvalues of a Hermitian
/// positive semi-definite operator given as a matrix-free map.
///
/// Each sweep applies the operator to the block, re-orthonormalizes and takes
/// Rayleigh–Ritz values on the block; it stops once the leading Ritz value
/// changes by less than `tol` between sweeps. The top value converges like
/// `(λ_p / λ_0)^k` for block size `p`.
pub fn block_power_iteration<F>(
    apply: F,
    start: Vec<Vec<Complex64>>,
    inner: impl Fn(&[Complex64], &[Complex64]) -> Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<PowerResult>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let p = start.len();
    if p == 0 {
        return Err(UcpError::invalid("empty starting block"));
    }
    let mut block = start;
    let normalize = |block: &mut Vec<Vec<Complex64>>| -> Result<()> {
        for i in 0..block.len() {
            for _pass in 0..2 {
                for j in 0..i {
                    let (head, tail) = block.split_at_mut(i);
                    let proj = inner(&tail[0], &head[j]);
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = inner(&block[i], &block[i]).re.sqrt();
            if norm.is_nan() || norm <= 1e-300 {
                return Err(UcpError::degenerate("block collapsed during power iteration"));
            }
            for x in &mut block[i] {
                *x /= norm;
            }
        }
        Ok(())
    };
    normalize(&mut block)?;
    let mut previous = f64::NAN;
    let mut values = Vec::new();
    for it in 1..=max_iter {
        let images: Vec<Vec<Complex64>> = block.iter().map(|v| apply(v)).collect();
        let mut projected = DMatrix::<Complex64>::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                projected[(i, j)] = inner(&images[j], &block[i]);
            }
        }
        let eig = hermitian_eigen(&projected)?;
        values = eig.values.iter().rev().copied().collect();
        // rotate the images onto the Ritz vectors before re-orthonormalizing
        let mut next: Vec<Vec<Complex64>> = eig
            .vectors
            .iter()
            .rev()
            .map(|y| {
                let mut v = vec![Complex64::new(0.0, 0.0); images[0].len()];
                for (coef, img) in y.iter().zip(&images) {
                    for (a, b) in v.iter_mut().zip(img) {
                        *a += coef * b;
                    }
                }
                v
            })
            .collect();
        if (values[0] - previous).abs() <= tol {
            return Ok(PowerResult {
                values,
                iterations: it,
                converged: true,
            });
        }
        previous = values[0];
        normalize(&mut next)?;
        block = next;
    }
    Ok(PowerResult {
        values,
        iterations: max_iter,
        converged: false,
    })
}
