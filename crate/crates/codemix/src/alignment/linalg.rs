//! Dense f64 routines for the alignment pipeline: cyclic Jacobi
//! eigendecomposition of symmetric matrices, an SVD built on it, and
//! symmetric matrix powers. Sizes here are d x d with d of a few
//! hundred, where Jacobi's simplicity and accuracy win over anything
//! fancier.

use ndarray::{Array1, Array2};

/// Eigendecomposition of a symmetric matrix: returns (eigenvalues,
/// eigenvectors as columns), sorted by descending eigenvalue.
pub fn jacobi_eigen(matrix: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "symmetric eigen needs a square matrix");
    let mut a = matrix.clone();
    let mut q = Array2::<f64>::eye(n);

    let max_sweeps = 64;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for r in (p + 1)..n {
                off += a[[p, r]] * a[[p, r]];
            }
        }
        if off.sqrt() < 1e-14 * (frobenius(&a) + 1e-300) {
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                let apq = a[[p, r]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[[p, p]];
                let aqq = a[[r, r]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, r]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, r]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[r, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[r, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let qkp = q[[k, p]];
                    let qkq = q[[k, r]];
                    q[[k, p]] = c * qkp - s * qkq;
                    q[[k, r]] = s * qkp + c * qkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].partial_cmp(&a[[i, i]]).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, new_col]] = q[[k, old_col]];
        }
    }
    (values, vectors)
}

fn frobenius(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Thin SVD of a square matrix via the eigendecomposition of MᵀM.
/// Singular values below `1e-12 * sigma_max` are treated as zero and
/// the corresponding left singular vectors are completed to an
/// orthonormal basis.
pub struct Svd {
    pub u: Array2<f64>,
    pub sigma: Array1<f64>,
    pub v: Array2<f64>,
}

pub fn svd_square(m: &Array2<f64>) -> Svd {
    let d = m.nrows();
    assert_eq!(d, m.ncols());
    let gram = m.t().dot(m);
    let (lambda, v) = jacobi_eigen(&gram);
    let sigma = Array1::from_iter(lambda.iter().map(|&l| l.max(0.0).sqrt()));
    let sigma_max = sigma.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-12 * sigma_max;

    let mut u = Array2::<f64>::zeros((d, d));
    let mut computed = Vec::new();
    for j in 0..d {
        if sigma[j] > tol && sigma[j] > 0.0 {
            let col = m.dot(&v.column(j));
            for k in 0..d {
                u[[k, j]] = col[k] / sigma[j];
            }
            computed.push(j);
        }
    }
    // One modified Gram-Schmidt pass keeps U orthogonal even when MᵀM
    // was ill-conditioned, then fills the null-space columns.
    orthonormalize_columns(&mut u, &computed);
    complete_basis(&mut u, &computed);
    Svd { u, sigma, v }
}

fn orthonormalize_columns(u: &mut Array2<f64>, cols: &[usize]) {
    let d = u.nrows();
    for (pos, &j) in cols.iter().enumerate() {
        for &prev in &cols[..pos] {
            let mut proj = 0.0;
            for k in 0..d {
                proj += u[[k, j]] * u[[k, prev]];
            }
            for k in 0..d {
                u[[k, j]] -= proj * u[[k, prev]];
            }
        }
        let mut norm = 0.0;
        for k in 0..d {
            norm += u[[k, j]] * u[[k, j]];
        }
        let norm = norm.sqrt();
        if norm > 0.0 {
            for k in 0..d {
                u[[k, j]] /= norm;
            }
        }
    }
}

/// Fill the columns not in `used` with unit vectors orthogonal to all
/// existing columns.
fn complete_basis(u: &mut Array2<f64>, used: &[usize]) {
    let d = u.nrows();
    let missing: Vec<usize> = (0..d).filter(|j| !used.contains(j)).collect();
    if missing.is_empty() {
        return;
    }
    let mut have: Vec<usize> = used.to_vec();
    for &j in &missing {
        // Try canonical basis vectors until one survives projection.
        for seed in 0..d + missing.len() {
            let mut cand = vec![0.0; d];
            cand[seed % d] = 1.0;
            for &col in &have {
                let mut proj = 0.0;
                for k in 0..d {
                    proj += cand[k] * u[[k, col]];
                }
                for k in 0..d {
                    cand[k] -= proj * u[[k, col]];
                }
            }
            let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for k in 0..d {
                    u[[k, j]] = cand[k] / norm;
                }
                have.push(j);
                break;
            }
        }
    }
}

/// Symmetric matrix power via eigendecomposition, with eigenvalues
/// below tolerance treated as zero (pseudo-power).
pub fn symmetric_power(matrix: &Array2<f64>, exponent: f64) -> Array2<f64> {
    let (lambda, q) = jacobi_eigen(matrix);
    let lambda_max = lambda.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-12 * lambda_max.max(1e-300);
    let d = matrix.nrows();
    let mut scaled = Array2::<f64>::zeros((d, d));
    for j in 0..d {
        let l = lambda[j];
        let p = if l > tol { l.powf(exponent) } else { 0.0 };
        for k in 0..d {
            scaled[[k, j]] = q[[k, j]] * p;
        }
    }
    scaled.dot(&q.t())
}

/// max absolute entry of WᵀW - I.
pub fn orthogonality_defect(w: &Array2<f64>) -> f64 {
    let gram = w.t().dot(w);
    let d = w.ncols();
    let mut defect = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((gram[[i, j]] - target).abs());
        }
    }
    defect
}

/// Random orthogonal matrix from the QR of a Gaussian sample; used by
/// tests and synthetic benchmark construction.
pub fn random_rotation(d: usize, rng: &mut crate::rng::Rng) -> Array2<f64> {
    let mut m = Array2::<f64>::zeros((d, d));
    for v in m.iter_mut() {
        *v = rng.next_gaussian();
    }
    // Gram-Schmidt columns.
    for j in 0..d {
        for prev in 0..j {
            let mut proj = 0.0;
            for k in 0..d {
                proj += m[[k, j]] * m[[k, prev]];
            }
            for k in 0..d {
                let sub = proj * m[[k, prev]];
                m[[k, j]] -= sub;
            }
        }
        let mut norm = 0.0;
        for k in 0..d {
            norm += m[[k, j]] * m[[k, j]];
        }
        let norm = norm.sqrt();
        for k in 0..d {
            m[[k, j]] /= norm;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_symmetric(d: usize, rng: &mut Rng) -> Array2<f64> {
        let mut m = Array2::<f64>::zeros((d, d));
        for i in 0..d {
            for j in i..d {
                let v = rng.next_gaussian();
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        m
    }

    #[test]
    fn eigen_reconstructs_symmetric_matrix() {
        let mut rng = Rng::new(5);
        for _ in 0..5 {
            let m = random_symmetric(12, &mut rng);
            let (lambda, q) = jacobi_eigen(&m);
            let mut recon = Array2::<f64>::zeros((12, 12));
            for j in 0..12 {
                for r in 0..12 {
                    for c in 0..12 {
                        recon[[r, c]] += lambda[j] * q[[r, j]] * q[[c, j]];
                    }
                }
            }
            let err = (&recon - &m).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
            assert!(err < 1e-9, "reconstruction error {err}");
            assert!(orthogonality_defect(&q) < 1e-10);
            for j in 1..12 {
                assert!(lambda[j - 1] >= lambda[j]);
            }
        }
    }

    #[test]
    fn svd_reconstructs_full_rank() {
        let mut rng = Rng::new(9);
        for _ in 0..5 {
            let d = 10;
            let mut m = Array2::<f64>::zeros((d, d));
            for v in m.iter_mut() {
                *v = rng.next_gaussian();
            }
            let svd = svd_square(&m);
            let mut recon = Array2::<f64>::zeros((d, d));
            for j in 0..d {
                for r in 0..d {
                    for c in 0..d {
                        recon[[r, c]] += svd.sigma[j] * svd.u[[r, j]] * svd.v[[c, j]];
                    }
                }
            }
            let err = (&recon - &m).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
            assert!(err < 1e-9, "reconstruction error {err}");
            assert!(orthogonality_defect(&svd.u) < 1e-10);
            assert!(orthogonality_defect(&svd.v) < 1e-10);
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        // Rank-2 5x5 matrix.
        let mut rng = Rng::new(21);
        let d = 5;
        let mut m = Array2::<f64>::zeros((d, d));
        for _ in 0..2 {
            let a: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            let b: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
            for r in 0..d {
                for c in 0..d {
                    m[[r, c]] += a[r] * b[c];
                }
            }
        }
        let svd = svd_square(&m);
        assert!(orthogonality_defect(&svd.u) < 1e-8, "{}", orthogonality_defect(&svd.u));
        assert!(orthogonality_defect(&svd.v) < 1e-8);
        assert!(svd.sigma[2] < 1e-8 * svd.sigma[0]);
        let mut recon = Array2::<f64>::zeros((d, d));
        for j in 0..d {
            for r in 0..d {
                for c in 0..d {
                    recon[[r, c]] += svd.sigma[j] * svd.u[[r, j]] * svd.v[[c, j]];
                }
            }
        }
        let err = (&recon - &m).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn symmetric_power_inverse_sqrt() {
        let mut rng = Rng::new(2);
        let d = 8;
        // SPD matrix: A = B Bᵀ + I
        let b = random_symmetric(d, &mut rng);
        let a = b.dot(&b.t()) + Array2::<f64>::eye(d);
        let inv_sqrt = symmetric_power(&a, -0.5);
        let should_be_eye = inv_sqrt.dot(&a).dot(&inv_sqrt);
        let err = (&should_be_eye - &Array2::<f64>::eye(d))
            .iter()
            .map(|v| v.abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-9, "error {err}");
    }

    #[test]
    fn random_rotation_is_orthogonal() {
        let mut rng = Rng::new(77);
        let r = random_rotation(20, &mut rng);
        assert!(orthogonality_defect(&r) < 1e-10);
    }
}
