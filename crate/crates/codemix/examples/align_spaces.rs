//! Unsupervised alignment demo: hide a known permutation + rotation
//! between two copies of a space and let self-learning recover it
//! without a single seed pair.
//!
//! ```bash
//! cargo run --release -p codemix --example align_spaces
//! ```

use codemix::alignment::{linalg, self_learning_align, AlignmentConfig};
use codemix::rng::Rng;
use ndarray::Array2;

fn main() {
    let (n, d) = (300, 32);
    let mut rng = Rng::new(41);

    // Source space: random unit rows.
    let mut x = Array2::<f32>::zeros((n, d));
    for mut row in x.rows_mut() {
        let mut norm = 0.0f64;
        for v in row.iter_mut() {
            *v = rng.next_gaussian() as f32;
            norm += (*v as f64).powi(2);
        }
        let norm = norm.sqrt() as f32;
        for v in row.iter_mut() {
            *v /= norm;
        }
    }

    // Target space: same points, rows shuffled, axes rotated.
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);
    let rotation = linalg::random_rotation(d, &mut rng).mapv(|v| v as f32);
    let xr = x.dot(&rotation);
    let mut z = Array2::<f32>::zeros((n, d));
    for (i, &p) in perm.iter().enumerate() {
        z.row_mut(p).assign(&xr.row(i));
    }

    let cfg = AlignmentConfig::default();
    let outcome = self_learning_align(&x, &z, &cfg).unwrap();

    let correct = outcome
        .dictionary
        .forward()
        .iter()
        .filter(|&&(i, j)| perm[i as usize] == j as usize)
        .count();
    println!(
        "converged = {} after {} iterations, objective {:.4}",
        outcome.converged, outcome.iterations, outcome.objective
    );
    println!(
        "dictionary precision@1 vs hidden permutation: {:.4}",
        correct as f64 / n as f64
    );
    println!(
        "mapping orthogonality defect: {:.2e}",
        outcome.w_source.orthogonality_defect()
    );
}
