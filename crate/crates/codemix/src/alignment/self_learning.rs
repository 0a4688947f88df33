//! Iterative self-learning: map with the current dictionary, re-induce
//! the dictionary on the mapped spaces, repeat. Stochastic candidate
//! dropping with a rising keep probability lets the loop escape the
//! poor local optima an unsupervised seed starts from.

use ndarray::Array2;

use crate::error::Result;
use crate::rng::Rng;

use super::csls::csls_match_with;
use super::procrustes::map_pair;
use super::seed::build_seed_dictionary;
use super::{AlignmentConfig, BilingualDictionary, MappingMatrix};

/// Final state of a self-learning run.
#[derive(Debug, Clone)]
pub struct AlignmentOutcome {
    pub w_source: MappingMatrix,
    pub w_target: MappingMatrix,
    pub dictionary: BilingualDictionary,
    /// Mean cosine of the induced pairs at the best accepted iteration.
    pub objective: f64,
    /// Objectives of the accepted (improving) iterations, in order.
    pub accepted_objectives: Vec<f64>,
    pub iterations: usize,
    /// False when the loop hit `max_iterations` before converging; the
    /// best state seen so far is still returned.
    pub converged: bool,
}

/// Align unit-normalized, cutoff-truncated spaces without supervision.
pub fn self_learning_align(
    x: &Array2<f32>,
    z: &Array2<f32>,
    cfg: &AlignmentConfig,
) -> Result<AlignmentOutcome> {
    cfg.validate()?;
    let x64 = x.mapv(|v| v as f64);
    let z64 = z.mapv(|v| v as f64);

    let mut dictionary = build_seed_dictionary(x, z, cfg)?;
    let mut keep_prob = cfg.keep_prob_initial.clamp(0.0, 1.0);
    let mut rng = Rng::new(cfg.seed);

    let mut best: Option<(MappingMatrix, MappingMatrix, BilingualDictionary, f64)> = None;
    let mut best_objective = f64::NEG_INFINITY;
    let mut accepted = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..cfg.max_iterations {
        iterations = iter + 1;
        let (wx, wz) = map_pair(&x64, &z64, &dictionary, cfg.advanced_transforms)?;
        let xw = apply_mapping(x, &wx);
        let zw = apply_mapping(z, &wz);

        let forward = induce(&xw, &zw, cfg, keep_prob, &mut rng)?;
        let backward = induce(&zw, &xw, cfg, keep_prob, &mut rng)?;
        let objective = (mean(&forward.1) + mean(&backward.1)) / 2.0;
        dictionary = BilingualDictionary::from_matches(&forward.0, &backward.0);

        if objective - best_objective >= cfg.convergence_threshold {
            best_objective = objective;
            accepted.push(objective);
            best = Some((wx, wz, dictionary.clone(), objective));
        } else if keep_prob >= 1.0 {
            converged = true;
            break;
        } else {
            keep_prob = (keep_prob * cfg.keep_prob_multiplier).min(1.0);
        }
    }

    let (w_source, w_target, dictionary, objective) =
        best.expect("at least one iteration always improves on -inf");
    Ok(AlignmentOutcome {
        w_source,
        w_target,
        dictionary,
        objective,
        accepted_objectives: accepted,
        iterations,
        converged,
    })
}

fn induce(
    a: &Array2<f32>,
    b: &Array2<f32>,
    cfg: &AlignmentConfig,
    keep_prob: f64,
    rng: &mut Rng,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let matched = if keep_prob >= 1.0 {
        csls_match_with(a, b, cfg.csls_k, |_, _| false)?
    } else {
        csls_match_with(a, b, cfg.csls_k, |_, _| rng.next_f64() >= keep_prob)?
    };
    Ok((matched.indices, matched.cosines))
}

fn apply_mapping(m: &Array2<f32>, w: &MappingMatrix) -> Array2<f32> {
    let w32 = w.0.mapv(|v| v as f32);
    m.dot(&w32)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}
