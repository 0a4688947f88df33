//! Cross-domain similarity local scaling retrieval.
//!
//! CSLS(a, b) = 2 cos(a, b) - r_B(a) - r_A(b), where r_B(a) is the mean
//! cosine of `a` to its k nearest neighbours in B (and symmetrically
//! for r_A). Penalizing both sides' neighbourhood density counters
//! hubness in nearest-neighbour retrieval.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::num::Real;

/// Result of matching every row of A against rows of B.
#[derive(Debug, Clone)]
pub struct CslsMatch {
    /// For each row of A, the argmax row of B.
    pub indices: Vec<usize>,
    /// CSLS score of each match.
    pub scores: Vec<f64>,
    /// Plain cosine of each match (used for objectives).
    pub cosines: Vec<f64>,
}

/// Rows of A matched to rows of B under CSLS with neighbourhood `k`.
/// Rows must be unit length for the scores to be cosines; `k` is
/// clamped to each side's row count minus one.
pub fn csls_match(a: &Array2<f64>, b: &Array2<f64>, k: usize) -> Result<CslsMatch> {
    csls_match_with(a, b, k, |_, _| false)
}

/// As [`csls_match`], with a candidate-dropping hook used by
/// stochastic dictionary induction: `drop(i, j)` returning true
/// removes B row `j` from consideration for A row `i`. The hook is
/// called row by row in order, so a seeded RNG stays deterministic.
pub fn csls_match_with<R: Real>(
    a: &Array2<R>,
    b: &Array2<R>,
    k: usize,
    mut drop: impl FnMut(usize, usize) -> bool,
) -> Result<CslsMatch> {
    let (na, nb) = (a.nrows(), b.nrows());
    if nb == 0 {
        return Err(Error::EmptyCandidates);
    }
    if na == 0 {
        return Ok(CslsMatch {
            indices: Vec::new(),
            scores: Vec::new(),
            cosines: Vec::new(),
        });
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            got: b.ncols(),
        });
    }

    let k_b = k.min(nb.saturating_sub(1));
    let k_a = k.min(na.saturating_sub(1));

    // r_B(a_i): mean cosine of each A row to its k nearest rows of B.
    let r_b = neighbourhood_means(a, b, k_b);
    // r_A(b_j): mean cosine of each B row to its k nearest rows of A.
    let r_a = neighbourhood_means(b, a, k_a);

    let mut indices = Vec::with_capacity(na);
    let mut scores = Vec::with_capacity(na);
    let mut cosines = Vec::with_capacity(na);

    let block = block_rows(nb);
    let bt = b.t();
    for start in (0..na).step_by(block) {
        let end = (start + block).min(na);
        let sims = a.slice(ndarray::s![start..end, ..]).dot(&bt);
        for (local, i) in (start..end).enumerate() {
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..nb {
                if drop(i, j) {
                    continue;
                }
                let cos = sims[[local, j]].to_f64();
                let score = 2.0 * cos - r_b[i] - r_a[j];
                if best.is_none_or(|(_, s, _)| score > s) {
                    best = Some((j, score, cos));
                }
            }
            // With everything dropped, fall back to plain argmax so the
            // row still matches something.
            let (j, score, cos) = best.unwrap_or_else(|| {
                let mut bj = 0;
                let mut bc = f64::NEG_INFINITY;
                for j in 0..nb {
                    let cos = sims[[local, j]].to_f64();
                    if cos > bc {
                        bc = cos;
                        bj = j;
                    }
                }
                (bj, 2.0 * bc - r_b[i] - r_a[bj], bc)
            });
            indices.push(j);
            scores.push(score);
            cosines.push(cos);
        }
    }

    Ok(CslsMatch {
        indices,
        scores,
        cosines,
    })
}

/// Mean similarity of each row of `queries` to its `k` nearest rows of
/// `candidates`; `k == 0` yields zeros.
fn neighbourhood_means<R: Real>(
    queries: &Array2<R>,
    candidates: &Array2<R>,
    k: usize,
) -> Vec<f64> {
    let nq = queries.nrows();
    let nc = candidates.nrows();
    let mut means = vec![0.0f64; nq];
    if k == 0 {
        return means;
    }
    let block = block_rows(nc);
    let ct = candidates.t();
    let mut row_buf: Vec<f64> = Vec::with_capacity(nc);
    for start in (0..nq).step_by(block) {
        let end = (start + block).min(nq);
        let sims = queries.slice(ndarray::s![start..end, ..]).dot(&ct);
        for (local, slot) in means[start..end].iter_mut().enumerate() {
            row_buf.clear();
            row_buf.extend(sims.row(local).iter().map(|v| v.to_f64()));
            // Partition so the k largest values occupy the tail.
            let kth = nc - k.min(nc);
            if kth > 0 {
                row_buf.select_nth_unstable_by(kth, |x, y| x.partial_cmp(y).unwrap());
            }
            *slot = row_buf[kth..].iter().sum::<f64>() / k as f64;
        }
    }
    means
}

fn block_rows(cols: usize) -> usize {
    // Cap the similarity block at roughly 64 MB of f64.
    (8_000_000 / cols.max(1)).clamp(1, 16_384)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use ndarray::Array2;

    pub(crate) fn unit_rows(n: usize, d: usize, rng: &mut Rng) -> Array2<f64> {
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

    /// Textbook O(n^2) CSLS written independently: full sort for the
    /// neighbourhoods, direct loops for the dots.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn brute_force_csls(
        a: &Array2<f64>,
        b: &Array2<f64>,
        k: usize,
    ) -> (Vec<usize>, Vec<f64>) {
        let (na, nb, d) = (a.nrows(), b.nrows(), a.ncols());
        let dot = |x: ndarray::ArrayView1<f64>, y: ndarray::ArrayView1<f64>| -> f64 {
            let mut s = 0.0;
            for t in 0..d {
                s += x[t] * y[t];
            }
            s
        };
        let mean_top = |sims: &mut Vec<f64>, k: usize| -> f64 {
            if k == 0 {
                return 0.0;
            }
            sims.sort_by(|x, y| y.partial_cmp(x).unwrap());
            sims[..k].iter().sum::<f64>() / k as f64
        };

        let k_b = k.min(nb.saturating_sub(1));
        let k_a = k.min(na.saturating_sub(1));
        let r_b: Vec<f64> = (0..na)
            .map(|i| {
                let mut sims: Vec<f64> = (0..nb).map(|j| dot(a.row(i), b.row(j))).collect();
                mean_top(&mut sims, k_b)
            })
            .collect();
        let r_a: Vec<f64> = (0..nb)
            .map(|j| {
                let mut sims: Vec<f64> = (0..na).map(|i| dot(b.row(j), a.row(i))).collect();
                mean_top(&mut sims, k_a)
            })
            .collect();

        let mut indices = Vec::new();
        let mut scores = Vec::new();
        for i in 0..na {
            let mut best_j = 0;
            let mut best = f64::NEG_INFINITY;
            for j in 0..nb {
                let score = 2.0 * dot(a.row(i), b.row(j)) - r_b[i] - r_a[j];
                if score > best {
                    best = score;
                    best_j = j;
                }
            }
            indices.push(best_j);
            scores.push(best);
        }
        (indices, scores)
    }

    #[test]
    fn self_match_is_identity() {
        let mut rng = Rng::new(4);
        let a = unit_rows(20, 6, &mut rng);
        let m = csls_match(&a, &a, 1).unwrap();
        assert_eq!(m.indices, (0..20).collect::<Vec<_>>());
        let m8 = csls_match(&a, &a, 8).unwrap();
        assert_eq!(m8.indices, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn two_candidate_hand_case() {
        // A = [(1,0)], B = [(1,0), (0,1)], k=1. Exhaustive evaluation:
        // r_B(a) = 1 (nearest of a in B); |A| = 1 clamps the other
        // neighbourhood to zero elements, so r_A vanishes.
        // CSLS(a,b0) = 2*1 - 1 - 0 = 1; CSLS(a,b1) = 2*0 - 1 - 0 = -1.
        let a = ndarray::arr2(&[[1.0, 0.0]]);
        let b = ndarray::arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let m = csls_match(&a, &b, 1).unwrap();
        assert_eq!(m.indices, vec![0]);
        assert!((m.scores[0] - 1.0).abs() < 1e-12);
        assert!((m.cosines[0] - 1.0).abs() < 1e-12);
        let (bi, bs) = brute_force_csls(&a, &b, 1);
        assert_eq!(m.indices, bi);
        assert!((m.scores[0] - bs[0]).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_small() {
        let mut rng = Rng::new(10);
        for trial in 0..20 {
            let na = 2 + rng.next_below(12);
            let nb = 2 + rng.next_below(12);
            let d = 2 + rng.next_below(6);
            let a = unit_rows(na, d, &mut rng);
            let b = unit_rows(nb, d, &mut rng);
            let k = 1 + rng.next_below(4);
            let fast = csls_match(&a, &b, k).unwrap();
            let (slow_idx, slow_scores) = brute_force_csls(&a, &b, k);
            assert_eq!(fast.indices, slow_idx, "trial {trial}");
            for (f, s) in fast.scores.iter().zip(&slow_scores) {
                assert!((f - s).abs() < 1e-10, "trial {trial}: {f} vs {s}");
            }
        }
    }

    #[test]
    fn empty_candidates_error() {
        let a = ndarray::arr2(&[[1.0, 0.0]]);
        let b = Array2::<f64>::zeros((0, 2));
        assert!(matches!(csls_match(&a, &b, 1), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn k_clamps_to_candidate_count() {
        let a = ndarray::arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let b = ndarray::arr2(&[[0.6, 0.8]]);
        // |B| = 1 clamps k to 0, so r_B vanishes.
        let m = csls_match(&a, &b, 8).unwrap();
        assert_eq!(m.indices, vec![0, 0]);
        let (bi, bs) = brute_force_csls(&a, &b, 8);
        assert_eq!(m.indices, bi);
        for (f, s) in m.scores.iter().zip(&bs) {
            assert!((f - s).abs() < 1e-10);
        }
    }
}
