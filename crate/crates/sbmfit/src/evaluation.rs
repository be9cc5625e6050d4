//! Error metrics and evaluation protocols.

use crate::error::{Result, SbmError};
use crate::graph::{AdjacencyMatrix, LabelAssignment, SamplingMask, ThetaMatrix};

/// Squared Frobenius distance over the off-diagonal entries,
/// `sum_{i != j} (hat - star)^2`.
pub fn frobenius_error(theta_hat: &ThetaMatrix, theta_star: &ThetaMatrix) -> Result<f64> {
    let n = theta_hat.n();
    if n != theta_star.n() {
        return Err(SbmError::Dimension(format!(
            "estimates have sizes {n} and {}",
            theta_star.n()
        )));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = theta_hat.get(i, j) - theta_star.get(i, j);
                total += d * d;
            }
        }
    }
    Ok(total)
}

/// [`frobenius_error`] divided by `rho^2`, the normalization used when
/// comparing estimators across sparsity levels.
pub fn normalized_sparse_error(
    theta_hat: &ThetaMatrix,
    theta_star: &ThetaMatrix,
    rho: f64,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(SbmError::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    Ok(frobenius_error(theta_hat, theta_star)? / (rho * rho))
}

/// Number of misclassified nodes: the Hamming distance between the label
/// vectors minimized over all permutations of the community names
/// (exact enumeration, `k <= 10`).
pub fn misclassified(z_hat: &LabelAssignment, z_star: &LabelAssignment) -> Result<usize> {
    if z_hat.n() != z_star.n() {
        return Err(SbmError::Dimension(format!(
            "label vectors cover {} and {} nodes",
            z_hat.n(),
            z_star.n()
        )));
    }
    let k = z_hat.k().max(z_star.k());
    if k > 10 {
        return Err(SbmError::Capacity(format!(
            "exact permutation search is capped at k = 10, got {k}"
        )));
    }
    let n = z_hat.n();
    let mut confusion = vec![0usize; k * k];
    for i in 0..n {
        confusion[z_hat.label(i) * k + z_star.label(i)] += 1;
    }
    let mut best = 0usize;
    let mut perm: Vec<usize> = (0..k).collect();
    heap_permutations(&mut perm, 0, &mut |sigma| {
        let agree: usize = (0..k).map(|a| confusion[a * k + sigma[a]]).sum();
        best = best.max(agree);
    });
    Ok(n - best)
}

fn heap_permutations(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        heap_permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// One point of a precision-recall curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision-recall curve swept over the distinct predicted values, highest
/// threshold first.
#[derive(Debug, Clone)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    /// Number of positive (edge) pairs in the evaluation set.
    pub positives: usize,
}

impl PrCurve {
    /// Area under the curve by the step rule (average precision).
    pub fn auc(&self) -> f64 {
        let mut area = 0.0;
        let mut prev_recall = 0.0;
        for p in &self.points {
            area += (p.recall - prev_recall) * p.precision;
            prev_recall = p.recall;
        }
        area
    }
}

/// Link-prediction precision and recall of thresholding `theta_hat` against
/// the test edges, restricted to the pairs selected by `eval_mask`.
///
/// Thresholds are the distinct predicted values in decreasing order; a pair
/// is predicted present when its value is `>=` the threshold. Precision at
/// zero predictions is 1 by convention (such a point never materializes
/// since the largest threshold already predicts at least one pair).
pub fn precision_recall(
    theta_hat: &ThetaMatrix,
    a_test: &AdjacencyMatrix,
    eval_mask: &SamplingMask,
) -> Result<PrCurve> {
    let n = theta_hat.n();
    if n != a_test.n() || n != eval_mask.n() {
        return Err(SbmError::Dimension(format!(
            "sizes differ: estimate {n}, test graph {}, mask {}",
            a_test.n(),
            eval_mask.n()
        )));
    }
    let mut scored: Vec<(f64, bool)> =
        eval_mask.pairs().map(|(i, j)| (theta_hat.get(i, j), a_test.edge(i, j))).collect();
    let positives = scored.iter().filter(|&&(_, e)| e).count();
    if positives == 0 {
        return Err(SbmError::DegenerateEvaluation(
            "no positive pairs in the evaluation set".into(),
        ));
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));

    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut predicted = 0usize;
    let mut idx = 0;
    while idx < scored.len() {
        let threshold = scored[idx].0;
        while idx < scored.len() && scored[idx].0 == threshold {
            predicted += 1;
            tp += scored[idx].1 as usize;
            idx += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / predicted as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(PrCurve { points, positives })
}

/// Held-out imputation error: squared Frobenius distance between `theta_hat`
/// and the adjacency on the unobserved pairs, normalized by the error of the
/// null (all-zero) estimator.
pub fn heldout_error(
    theta_hat: &ThetaMatrix,
    a: &AdjacencyMatrix,
    x_train: &SamplingMask,
) -> Result<f64> {
    let n = theta_hat.n();
    if n != a.n() || n != x_train.n() {
        return Err(SbmError::Dimension(format!(
            "sizes differ: estimate {n}, graph {}, mask {}",
            a.n(),
            x_train.n()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if !x_train.observed(i, j) {
                let edge = a.edge(i, j) as u8 as f64;
                num += 2.0 * (edge - theta_hat.get(i, j)).powi(2);
                den += 2.0 * edge * edge;
            }
        }
    }
    if den == 0.0 {
        return Err(SbmError::DegenerateEvaluation(
            "no held-out edges to normalize against".into(),
        ));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::{generate_inhomogeneous, generate_mask};

    #[test]
    fn frobenius_basics() {
        let n = 7;
        let t = ThetaMatrix::from_fn(n, |i, j| ((i + j) % 5) as f64 / 6.0);
        assert_eq!(frobenius_error(&t, &t).unwrap(), 0.0);
        let zero = ThetaMatrix::zeros(n);
        let c = ThetaMatrix::from_fn(n, |_, _| 0.3);
        let got = frobenius_error(&zero, &c).unwrap();
        let expected = 0.09 * (n * (n - 1)) as f64;
        assert!((got - expected).abs() < 1e-12);
        assert!(frobenius_error(&t, &ThetaMatrix::zeros(3)).is_err());
    }

    #[test]
    fn frobenius_matches_double_loop_reference() {
        for seed in 0..10 {
            let a = ThetaMatrix::from_fn(9, |i, j| ((i * 31 + j * 17 + seed) % 11) as f64 / 12.0);
            let b = ThetaMatrix::from_fn(9, |i, j| ((i * 13 + j * 7 + 3 * seed) % 9) as f64 / 10.0);
            let mut reference = 0.0;
            for i in 0..9 {
                for j in 0..9 {
                    if i != j {
                        let d = a.get(i, j) - b.get(i, j);
                        reference += d * d;
                    }
                }
            }
            assert_eq!(frobenius_error(&a, &b).unwrap(), reference);
        }
    }

    #[test]
    fn normalized_error_homogeneity() {
        let a = ThetaMatrix::from_fn(6, |i, j| ((i + 2 * j) % 4) as f64 / 5.0);
        let b = ThetaMatrix::from_fn(6, |i, j| ((2 * i + j) % 3) as f64 / 4.0);
        let base = frobenius_error(&a, &b).unwrap();
        assert_eq!(normalized_sparse_error(&a, &b, 1.0).unwrap(), base);
        let rho = 0.2;
        let sa = ThetaMatrix::from_fn(6, |i, j| rho * a.get(i, j));
        let sb = ThetaMatrix::from_fn(6, |i, j| rho * b.get(i, j));
        let scaled = frobenius_error(&sa, &sb).unwrap();
        assert!((scaled - rho * rho * base).abs() < 1e-12);
        assert!((normalized_sparse_error(&sa, &sb, rho).unwrap() - base).abs() < 1e-9);
        assert!(normalized_sparse_error(&a, &b, 0.0).is_err());
    }

    #[test]
    fn misclassified_absorbs_permutations() {
        let z1 = LabelAssignment::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        assert_eq!(misclassified(&z1, &z1).unwrap(), 0);
        let swapped = LabelAssignment::new(vec![1, 1, 0, 0, 2, 2], 3).unwrap();
        assert_eq!(misclassified(&swapped, &z1).unwrap(), 0);
        let one_off = LabelAssignment::new(vec![0, 1, 1, 1, 2, 2], 3).unwrap();
        assert_eq!(misclassified(&one_off, &z1).unwrap(), 1);
    }

    #[test]
    fn misclassified_is_symmetric_and_relabel_invariant() {
        let z1 = LabelAssignment::new(vec![0, 1, 2, 0, 1, 2, 0, 0], 3).unwrap();
        let z2 = LabelAssignment::new(vec![1, 1, 2, 0, 0, 2, 1, 0], 3).unwrap();
        let d = misclassified(&z1, &z2).unwrap();
        assert_eq!(d, misclassified(&z2, &z1).unwrap());
        for sigma in [[1, 2, 0], [2, 0, 1], [0, 2, 1]] {
            let relabeled: Vec<usize> = z1.as_slice().iter().map(|&l| sigma[l]).collect();
            let zr = LabelAssignment::new(relabeled, 3).unwrap();
            assert_eq!(misclassified(&zr, &z2).unwrap(), d);
            assert_eq!(misclassified(&zr, &z1).unwrap(), 0);
        }
    }

    #[test]
    fn misclassified_caps_community_count() {
        let z = LabelAssignment::new((0..11).collect(), 11).unwrap();
        assert!(matches!(misclassified(&z, &z), Err(SbmError::Capacity(_))));
    }

    #[test]
    fn perfect_predictor_reaches_the_top_corner() {
        let theta = ThetaMatrix::from_fn(8, |i, j| 0.2 + 0.5 * ((i + j) % 3 == 0) as u8 as f64);
        let a = generate_inhomogeneous(&theta, 4).unwrap();
        let pred = ThetaMatrix::from_fn(8, |i, j| a.edge(i, j) as u8 as f64);
        let mask = SamplingMask::full(8);
        let curve = precision_recall(&pred, &a, &mask).unwrap();
        assert!(curve
            .points
            .iter()
            .any(|p| (p.precision - 1.0).abs() < 1e-12 && (p.recall - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constant_predictor_is_a_single_point() {
        let theta = ThetaMatrix::from_fn(8, |i, j| 0.1 + 0.6 * ((i * j) % 2) as f64);
        let a = generate_inhomogeneous(&theta, 5).unwrap();
        let mask = SamplingMask::full(8);
        let pred = ThetaMatrix::from_fn(8, |_, _| 0.4);
        let curve = precision_recall(&pred, &a, &mask).unwrap();
        assert_eq!(curve.points.len(), 1);
        let density = a.edge_count() as f64 / 28.0;
        assert!((curve.points[0].precision - density).abs() < 1e-12);
        assert_eq!(curve.points[0].recall, 1.0);
    }

    #[test]
    fn curve_shape_invariants() {
        let theta = ThetaMatrix::from_fn(12, |i, j| ((i * 7 + j * 5) % 13) as f64 / 14.0 + 0.01);
        let a = generate_inhomogeneous(&theta, 6).unwrap();
        let mask = generate_mask(12, 0.8, 7).unwrap();
        let curve = precision_recall(&theta, &a, &mask).unwrap();
        for w in curve.points.windows(2) {
            assert!(w[1].threshold < w[0].threshold);
            assert!(w[1].recall >= w[0].recall);
        }
        for p in &curve.points {
            assert!((0.0..=1.0).contains(&p.precision) && (0.0..=1.0).contains(&p.recall));
        }
        assert_eq!(curve.points.last().unwrap().recall, 1.0);
        let auc = curve.auc();
        assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn degenerate_evaluation_sets_are_rejected() {
        let empty = AdjacencyMatrix::new(5);
        let mask = SamplingMask::full(5);
        let pred = ThetaMatrix::from_fn(5, |_, _| 0.5);
        assert!(matches!(
            precision_recall(&pred, &empty, &mask),
            Err(SbmError::DegenerateEvaluation(_))
        ));
    }

    #[test]
    fn heldout_error_normalization() {
        let theta = ThetaMatrix::from_fn(10, |i, j| 0.3 + 0.3 * ((i + j) % 2) as f64);
        let a = generate_inhomogeneous(&theta, 8).unwrap();
        let x = generate_mask(10, 0.5, 9).unwrap();
        let perfect = ThetaMatrix::from_fn(10, |i, j| a.edge(i, j) as u8 as f64);
        assert_eq!(heldout_error(&perfect, &a, &x).unwrap(), 0.0);
        let null = ThetaMatrix::zeros(10);
        assert_eq!(heldout_error(&null, &a, &x).unwrap(), 1.0);
        // fully observed training mask leaves nothing to hold out
        let full = SamplingMask::full(10);
        assert!(matches!(
            heldout_error(&null, &a, &full),
            Err(SbmError::DegenerateEvaluation(_))
        ));
    }
}
