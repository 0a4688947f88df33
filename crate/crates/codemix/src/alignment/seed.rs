//! Fully unsupervised seed dictionary from intra-space similarity
//! distributions.
//!
//! The sorted row of a word's similarity matrix is a language-neutral
//! signature: if two spaces are approximately isometric, equivalent
//! words have near-identical sorted similarity distributions. Matching
//! those signatures across spaces with CSLS yields the initial
//! dictionary without any bilingual supervision.

use ndarray::Array2;

use crate::error::Result;

use super::csls::csls_match_with;
use super::{AlignmentConfig, BilingualDictionary};

/// Build the seed dictionary from unit-normalized, cutoff-truncated
/// embedding matrices. Pairs are induced in both directions.
///
/// The sorted similarity distributions are only comparable at equal
/// length, so when the two spaces have different row counts both are
/// truncated to the common minimum for this initial step.
pub fn build_seed_dictionary(
    x: &Array2<f32>,
    z: &Array2<f32>,
    cfg: &AlignmentConfig,
) -> Result<BilingualDictionary> {
    let n = x.nrows().min(z.nrows());
    let xs = x.slice(ndarray::s![..n, ..]).to_owned();
    let zs = z.slice(ndarray::s![..n, ..]).to_owned();
    let fx = sorted_similarity_features(&xs);
    let fz = sorted_similarity_features(&zs);

    let forward = csls_match_with(&fx, &fz, cfg.csls_k, |_, _| false)?;
    let backward = csls_match_with(&fz, &fx, cfg.csls_k, |_, _| false)?;
    Ok(BilingualDictionary::from_matches(
        &forward.indices,
        &backward.indices,
    ))
}

/// Each row of the result is the ascending-sorted, unit-normalized row
/// of M Mᵀ. The feature dimension equals the row count, so callers
/// truncate to the vocabulary cutoff first.
pub fn sorted_similarity_features(m: &Array2<f32>) -> Array2<f32> {
    let n = m.nrows();
    let mut features = m.dot(&m.t());
    for mut row in features.rows_mut() {
        let slice = row.as_slice_mut().expect("row-major layout");
        slice.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let norm = crate::num::dot_f64(slice, slice).sqrt();
        if norm > 0.0 {
            let inv = (1.0 / norm) as f32;
            for v in slice.iter_mut() {
                *v *= inv;
            }
        }
    }
    debug_assert_eq!(features.ncols(), n);
    features
}
