//! Spectral initialization of the variational posterior.
//!
//! Unobserved entries are imputed with the global observed density, the `k`
//! leading eigenvectors (by absolute eigenvalue) of the imputed adjacency
//! are clustered with k-means, and the hard clusters are softened into a
//! valid posterior.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, SamplingMask};
use crate::likelihood::observed_density_or_half;
use crate::rng::{stream_rng, STREAM_INIT};

use super::{normalize_row, VariationalPosterior};

/// Mass placed on every non-assigned community when softening the k-means
/// clusters.
const EPS_SOFT: f64 = 0.05;

const KMEANS_RESTARTS: usize = 10;
const KMEANS_ITERS: usize = 100;

/// Spectral initialization; deterministic for a fixed `seed`.
pub fn init_tau(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    k: usize,
    seed: u64,
) -> Result<VariationalPosterior> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(SbmError::InvalidParameter(format!(
            "community count {k} must lie in 1..={n}"
        )));
    }
    if k == 1 {
        return Ok(VariationalPosterior::uniform(n, 1));
    }

    let fill = observed_density_or_half(a, x);
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if x.observed(i, j) {
            a.edge(i, j) as u8 as f64
        } else {
            fill
        }
    });
    let eigen = m
        .try_symmetric_eigen(1e-10, 10_000)
        .ok_or_else(|| SbmError::Numerical("eigendecomposition did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .abs()
            .partial_cmp(&eigen.eigenvalues[i].abs())
            .expect("eigenvalues are finite")
    });
    let mut features = vec![0.0; n * k];
    for (col, &idx) in order.iter().take(k).enumerate() {
        let v = eigen.eigenvectors.column(idx);
        for i in 0..n {
            features[i * k + col] = v[i];
        }
    }

    let mut rng = stream_rng(seed, STREAM_INIT, 0);
    let labels = kmeans(&features, n, k, &mut rng);

    let assigned = 1.0 - (k - 1) as f64 * EPS_SOFT;
    let mut tau = vec![EPS_SOFT; n * k];
    for (i, &l) in labels.iter().enumerate() {
        tau[i * k + l] = assigned;
        normalize_row(&mut tau[i * k..(i + 1) * k]);
    }
    Ok(VariationalPosterior { k, tau })
}

fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Lloyd's algorithm with k-means++ seeding; best of `KMEANS_RESTARTS`
/// restarts by inertia. Points are the rows of the `n x dim` buffer.
fn kmeans(points: &[f64], n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let dim = points.len() / n;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];

    let mut best_labels = vec![0usize; n];
    let mut best_inertia = f64::INFINITY;

    for _ in 0..KMEANS_RESTARTS {
        // k-means++ seeding
        let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        centers.push(row(rng.random_range(0..n)).to_vec());
        let mut d2: Vec<f64> = (0..n).map(|i| dist2(row(i), &centers[0])).collect();
        while centers.len() < k {
            let total: f64 = d2.iter().sum();
            let pick = if total > 0.0 {
                let mut target = rng.random::<f64>() * total;
                let mut chosen = n - 1;
                for (i, &w) in d2.iter().enumerate() {
                    target -= w;
                    if target <= 0.0 {
                        chosen = i;
                        break;
                    }
                }
                chosen
            } else {
                rng.random_range(0..n)
            };
            centers.push(row(pick).to_vec());
            for i in 0..n {
                d2[i] = d2[i].min(dist2(row(i), centers.last().unwrap()));
            }
        }

        let mut labels = vec![0usize; n];
        for _ in 0..KMEANS_ITERS {
            let mut moved = false;
            for i in 0..n {
                let mut arg = 0;
                let mut best = f64::INFINITY;
                for (c, center) in centers.iter().enumerate() {
                    let d = dist2(row(i), center);
                    if d < best {
                        best = d;
                        arg = c;
                    }
                }
                if labels[i] != arg {
                    labels[i] = arg;
                    moved = true;
                }
            }
            // recompute centers; an emptied cluster is reseeded at the point
            // farthest from its center
            let mut counts = vec![0usize; k];
            let mut sums = vec![0.0; k * dim];
            for i in 0..n {
                counts[labels[i]] += 1;
                for d in 0..dim {
                    sums[labels[i] * dim + d] += row(i)[d];
                }
            }
            for c in 0..k {
                if counts[c] == 0 {
                    let far = (0..n)
                        .max_by(|&i, &j| {
                            dist2(row(i), &centers[labels[i]])
                                .partial_cmp(&dist2(row(j), &centers[labels[j]]))
                                .unwrap()
                        })
                        .unwrap();
                    centers[c] = row(far).to_vec();
                } else {
                    for d in 0..dim {
                        centers[c][d] = sums[c * dim + d] / counts[c] as f64;
                    }
                }
            }
            if !moved {
                break;
            }
        }

        let inertia: f64 = (0..n).map(|i| dist2(row(i), &centers[labels[i]])).sum();
        if inertia < best_inertia {
            best_inertia = inertia;
            best_labels = labels;
        }
    }
    best_labels
}
