//! Shared independent references for the integration suites: these
//! re-derive quantities from first principles (double loops, exhaustive
//! enumeration, Hungarian assignment) and must stay decoupled from the
//! library code paths they are used to check.

#![allow(dead_code)]

use sbmfit::graph::{AdjacencyMatrix, BlockMatrix, LabelAssignment, SamplingMask};
use sbmfit::varem::VariationalPosterior;

/// Literal pairwise conditional log-likelihood over the observed pairs.
pub fn ll_pairwise(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    z: &[usize],
    q: &BlockMatrix,
) -> f64 {
    let n = a.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if x.observed(i, j) {
                let p = q.get(z[i], z[j]);
                total += if a.edge(i, j) { p.ln() } else { (1.0 - p).ln() };
            }
        }
    }
    total
}

/// All label vectors of length `n` over `k` symbols.
pub fn all_labelings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k.pow(n as u32));
    let mut z = vec![0usize; n];
    loop {
        out.push(z.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if z[pos] + 1 < k {
                z[pos] += 1;
                for slot in &mut z[pos + 1..] {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// Exhaustive posterior over label vectors:
/// returns `(labelings, log-joint terms, log marginal)`.
pub fn enumerate_posterior(
    a: &AdjacencyMatrix,
    x: &SamplingMask,
    alpha: &[f64],
    q: &BlockMatrix,
) -> (Vec<Vec<usize>>, Vec<f64>, f64) {
    let labelings = all_labelings(a.n(), alpha.len());
    let log_joint: Vec<f64> = labelings
        .iter()
        .map(|z| {
            let prior: f64 = z.iter().map(|&l| alpha[l].ln()).sum();
            prior + ll_pairwise(a, x, z, q)
        })
        .collect();
    let max = log_joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_marginal = max + log_joint.iter().map(|&t| (t - max).exp()).sum::<f64>().ln();
    (labelings, log_joint, log_marginal)
}

/// `KL(P_tau || posterior)` by full enumeration.
pub fn kl_to_posterior(
    tau: &VariationalPosterior,
    labelings: &[Vec<usize>],
    log_joint: &[f64],
    log_marginal: f64,
) -> f64 {
    let mut kl = 0.0;
    for (z, &joint) in labelings.iter().zip(log_joint) {
        let log_ptau: f64 = z.iter().enumerate().map(|(i, &l)| tau.get(i, l).ln()).sum();
        let log_post = joint - log_marginal;
        kl += log_ptau.exp() * (log_ptau - log_post);
    }
    kl
}

/// Hungarian algorithm (potentials form) minimizing total cost of a square
/// assignment; returns the optimal cost.
pub fn hungarian_min_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut assigned = vec![0usize; n + 1]; // column -> row (1-based rows)
    for row in 1..=n {
        let mut links = vec![0usize; n + 1];
        let mut mins = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        let mut col = 0usize;
        assigned[0] = row;
        loop {
            used[col] = true;
            let row_here = assigned[col];
            let mut delta = inf;
            let mut next_col = 0;
            for c in 1..=n {
                if !used[c] {
                    let reduced = cost[row_here - 1][c - 1] - u[row_here] - v[c];
                    if reduced < mins[c] {
                        mins[c] = reduced;
                        links[c] = col;
                    }
                    if mins[c] < delta {
                        delta = mins[c];
                        next_col = c;
                    }
                }
            }
            for c in 0..=n {
                if used[c] {
                    u[assigned[c]] += delta;
                    v[c] -= delta;
                } else {
                    mins[c] -= delta;
                }
            }
            col = next_col;
            if assigned[col] == 0 {
                break;
            }
        }
        loop {
            let prev = links[col];
            assigned[col] = assigned[prev];
            col = prev;
            if col == 0 {
                break;
            }
        }
    }
    (1..=n).map(|c| cost[assigned[c] - 1][c - 1]).sum()
}

/// Misclassification count via Hungarian assignment on the confusion matrix.
pub fn misclassified_by_assignment(z_hat: &LabelAssignment, z_star: &LabelAssignment) -> usize {
    let k = z_hat.k().max(z_star.k());
    let n = z_hat.n();
    let mut confusion = vec![vec![0.0; k]; k];
    for i in 0..n {
        confusion[z_hat.label(i)][z_star.label(i)] += 1.0;
    }
    // maximize agreement == minimize (n - agreement)
    let cost: Vec<Vec<f64>> = confusion.iter().map(|r| r.iter().map(|&c| -c).collect()).collect();
    let best_agree = -hungarian_min_cost(&cost);
    n - best_agree.round() as usize
}

/// Median by linear interpolation (quantile type 7).
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// The three connectivity presets used across the simulation protocols.
pub fn preset_q(name: &str) -> BlockMatrix {
    let rows: &[[f64; 3]; 3] = match name {
        "assortative" => &[[0.5, 0.2, 0.2], [0.2, 0.5, 0.2], [0.2, 0.2, 0.5]],
        "disassortative" => &[[0.2, 0.5, 0.5], [0.5, 0.2, 0.5], [0.5, 0.5, 0.2]],
        "mixed" => &[[0.1, 0.5, 0.3], [0.5, 0.2, 0.4], [0.3, 0.4, 0.6]],
        other => panic!("unknown preset {other}"),
    };
    BlockMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn preset_alpha(name: &str) -> Vec<f64> {
    match name {
        "assortative" | "disassortative" => vec![1.0 / 3.0; 3],
        "mixed" => vec![0.1, 0.3, 0.6],
        other => panic!("unknown preset {other}"),
    }
}
