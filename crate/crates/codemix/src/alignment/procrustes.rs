//! Orthogonal Procrustes mapping and the optional whitening /
//! re-weighting variant of the mapping step.

use ndarray::Array2;

use crate::error::{Error, Result};

use super::linalg::{svd_square, symmetric_power};
use super::{BilingualDictionary, MappingMatrix};

/// Select the dictionary rows of both spaces as dense f64 matrices.
fn paired_rows(
    x: &Array2<f64>,
    z: &Array2<f64>,
    dict: &BilingualDictionary,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let pairs = dict.pairs();
    if pairs.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    let d = x.ncols();
    if z.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: z.ncols(),
        });
    }
    let mut xd = Array2::<f64>::zeros((pairs.len(), d));
    let mut zd = Array2::<f64>::zeros((pairs.len(), d));
    for (row, &(i, j)) in pairs.iter().enumerate() {
        xd.row_mut(row).assign(&x.row(i as usize));
        zd.row_mut(row).assign(&z.row(j as usize));
    }
    Ok((xd, zd))
}

/// Solve orthogonal Procrustes on the dictionary-selected rows: with
/// U S Vᵀ = SVD(X_dᵀ Z_d), the mapping is W = U Vᵀ, the orthogonal
/// matrix minimizing ||X_d W - Z_d||_F.
pub fn orthogonal_map(
    x: &Array2<f64>,
    z: &Array2<f64>,
    dict: &BilingualDictionary,
) -> Result<MappingMatrix> {
    let (xd, zd) = paired_rows(x, z, dict)?;
    let cross = xd.t().dot(&zd);
    let svd = svd_square(&cross);
    Ok(MappingMatrix(svd.u.dot(&svd.v.t())))
}

/// One mapping step of the self-learning loop, producing a transform
/// per side.
///
/// Default mode returns (U Vᵀ, I): the source space is rotated into the
/// target space. With `advanced` set, both sides are whitened on the
/// dictionary rows, rotated, re-weighted by sqrt of the singular
/// values, and de-whitened, mirroring the reference pipeline of the
/// alignment method; those transforms are not orthogonal in general.
pub fn map_pair(
    x: &Array2<f64>,
    z: &Array2<f64>,
    dict: &BilingualDictionary,
    advanced: bool,
) -> Result<(MappingMatrix, MappingMatrix)> {
    if !advanced {
        let w = orthogonal_map(x, z, dict)?;
        let identity = MappingMatrix(Array2::<f64>::eye(x.ncols()));
        return Ok((w, identity));
    }

    let (xd, zd) = paired_rows(x, z, dict)?;

    // Whitening on the dictionary rows.
    let wx1 = symmetric_power(&xd.t().dot(&xd), -0.5);
    let wz1 = symmetric_power(&zd.t().dot(&zd), -0.5);
    let xdw = xd.dot(&wx1);
    let zdw = zd.dot(&wz1);

    // Orthogonal rotation into shared axes.
    let svd = svd_square(&xdw.t().dot(&zdw));
    let (u, v) = (svd.u, svd.v);

    // Symmetric re-weighting by sqrt of the singular values.
    let d = x.ncols();
    let mut s_half = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        s_half[[i, i]] = svd.sigma[i].max(0.0).sqrt();
    }

    // De-whitening restores the original scales on each side.
    let wx1_inv = symmetric_power(&xd.t().dot(&xd), 0.5);
    let wz1_inv = symmetric_power(&zd.t().dot(&zd), 0.5);

    let wx = wx1
        .dot(&u)
        .dot(&s_half)
        .dot(&u.t())
        .dot(&wx1_inv)
        .dot(&u);
    let wz = wz1
        .dot(&v)
        .dot(&s_half)
        .dot(&v.t())
        .dot(&wz1_inv)
        .dot(&v);
    Ok((MappingMatrix(wx), MappingMatrix(wz)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::linalg::{orthogonality_defect, random_rotation};
    use crate::rng::Rng;

    fn unit_rows(n: usize, d: usize, rng: &mut Rng) -> Array2<f64> {
        let mut m = Array2::<f64>::zeros((n, d));
        for mut row in m.rows_mut() {
            let mut norm = 0.0;
            for v in row.iter_mut() {
                *v = rng.next_gaussian();
                norm += *v * *v;
            }
            let norm = norm.sqrt();
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
        m
    }

    fn identity_dict(n: usize) -> BilingualDictionary {
        BilingualDictionary::from_matches(
            &(0..n).collect::<Vec<_>>(),
            &(0..n).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn identical_spaces_give_identity() {
        let mut rng = Rng::new(31);
        let x = unit_rows(40, 8, &mut rng);
        let w = orthogonal_map(&x, &x, &identity_dict(40)).unwrap();
        let eye = Array2::<f64>::eye(8);
        let err = (&w.0 - &eye).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        assert!(err < 1e-10, "distance from identity {err}");
    }

    #[test]
    fn recovers_known_rotation() {
        let mut rng = Rng::new(13);
        for d in [5, 20] {
            let x = unit_rows(100, d, &mut rng);
            let r = random_rotation(d, &mut rng);
            let z = x.dot(&r);
            let w = orthogonal_map(&x, &z, &identity_dict(100)).unwrap();
            let err = (&w.0 - &r).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
            assert!(err < 1e-6, "rotation recovery error {err} at d={d}");
            assert!(orthogonality_defect(&w.0) < 1e-5);
        }
    }

    #[test]
    fn empty_dictionary_is_error() {
        let x = Array2::<f64>::eye(3);
        let dict = BilingualDictionary::default();
        assert!(matches!(
            orthogonal_map(&x, &x, &dict),
            Err(Error::EmptyDictionary)
        ));
    }

    #[test]
    fn procrustes_beats_random_rotations() {
        // On random instances the returned W must achieve Frobenius
        // error no worse than any of a batch of random orthogonal
        // matrices.
        let mut rng = Rng::new(55);
        for _ in 0..10 {
            let d = 6;
            let x = unit_rows(30, d, &mut rng);
            let z = unit_rows(30, d, &mut rng);
            let dict = identity_dict(30);
            let w = orthogonal_map(&x, &z, &dict).unwrap();
            let err = |m: &Array2<f64>| -> f64 {
                let diff = x.dot(m) - &z;
                diff.iter().map(|v| v * v).sum::<f64>()
            };
            let base = err(&w.0);
            for _ in 0..1000 {
                let r = random_rotation(d, &mut rng);
                assert!(base <= err(&r) + 1e-9);
            }
        }
    }

    #[test]
    fn advanced_mode_aligns_identical_spaces() {
        let mut rng = Rng::new(8);
        let x = unit_rows(50, 6, &mut rng);
        let (wx, wz) = map_pair(&x, &x, &identity_dict(50), true).unwrap();
        // Both sides receive the same transform, so mapped spaces agree.
        let xa = x.dot(&wx.0);
        let za = x.dot(&wz.0);
        let err = (&xa - &za).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        assert!(err < 1e-8, "advanced mapping mismatch {err}");
    }
}
