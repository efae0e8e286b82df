//! Polynomial regression learners: L1 (least absolute deviations via LP)
//! with thresholding for Boolean labels, and L2 (ridge-stabilized normal
//! equations) for real labels.
//!
//! Features are either the ambient coordinates or a projection through an
//! orthonormal frame; full multivariate bases are capped, and larger
//! problems must supply a projection.

use crate::error::{Error, Result};
use crate::frames::OrthonormalFrame;
use crate::hermite::{multi_indices, HermiteExpansion, MultiIndex};
use crate::linalg::{solve_spd, Mat};
use crate::lp::{solve_lp, LinearProgram, LpStatus, LpTolerances, Sense, MAX_VARIABLES};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Feature space the polynomial lives in.
#[derive(Clone)]
pub enum FeatureMap {
    Ambient,
    Projected(Arc<OrthonormalFrame>),
}

impl std::fmt::Debug for FeatureMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeatureMap::Ambient => write!(f, "Ambient"),
            FeatureMap::Projected(fr) => write!(f, "Projected({}x{})", fr.m(), fr.n()),
        }
    }
}

impl FeatureMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            FeatureMap::Ambient => x.to_vec(),
            FeatureMap::Projected(frame) => frame.apply(x),
        }
    }

    pub fn dim(&self, ambient: usize) -> usize {
        match self {
            FeatureMap::Ambient => ambient,
            FeatureMap::Projected(frame) => frame.m(),
        }
    }
}

/// A polynomial hypothesis, optionally thresholded to a Boolean classifier.
#[derive(Debug, Clone)]
pub struct PolynomialHypothesis {
    pub expansion: HermiteExpansion,
    pub features: FeatureMap,
    /// When set, the hypothesis is sign(p(x) - threshold).
    pub threshold: Option<f64>,
}

impl PolynomialHypothesis {
    /// Raw polynomial value on the feature coordinates.
    pub fn score(&self, x: &[f64]) -> f64 {
        let z = self.features.apply(x);
        self.expansion.eval(&z).unwrap_or(f64::NAN)
    }

    /// Hypothesis output: the score, or its thresholded sign in Boolean mode.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s = self.score(x);
        match self.threshold {
            Some(theta) => {
                if s - theta >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            None => s,
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.threshold.is_some()
    }

    /// Sum of absolute coefficient values.
    pub fn coefficient_l1_norm(&self) -> f64 {
        self.expansion.iter().map(|(_, c)| c.abs()).sum()
    }
}

/// Maximum number of basis functions in a full multivariate fit.
pub const MAX_BASIS: usize = 3500;
/// Ambient fits beyond this dimension need an explicit projection.
pub const MAX_AMBIENT_DIM: usize = 25;

fn basis_for(
    samples: &[(Vec<f64>, f64)],
    degree: usize,
    features: &FeatureMap,
) -> Result<(Vec<Vec<f64>>, Vec<MultiIndex>, usize)> {
    if samples.is_empty() {
        return Err(Error::parameter("no training samples supplied".to_string()));
    }
    let ambient = samples[0].0.len();
    let dim = features.dim(ambient);
    if matches!(features, FeatureMap::Ambient) && ambient > MAX_AMBIENT_DIM && degree >= 4 {
        return Err(Error::parameter(format!(
            "ambient dimension {ambient} with degree {degree} needs an \
             explicit feature projection"
        )));
    }
    let indices = multi_indices(dim, degree as u32);
    if indices.len() > MAX_BASIS {
        return Err(Error::resource(format!(
            "basis of {} functions exceeds the cap of {MAX_BASIS}; supply a \
             projection",
            indices.len()
        )));
    }
    if samples.len() < 10 * indices.len() {
        return Err(Error::parameter(format!(
            "{} samples underdetermine a basis of {} functions (need 10x)",
            samples.len(),
            indices.len()
        )));
    }
    let feats: Vec<Vec<f64>> = samples.iter().map(|(x, _)| features.apply(x)).collect();
    Ok((feats, indices, dim))
}

fn design_value(idx: &MultiIndex, tables: &[Vec<f64>]) -> f64 {
    idx.0
        .iter()
        .enumerate()
        .map(|(axis, &j)| tables[axis][j as usize])
        .product()
}

/// Least-absolute-deviations fit by LP.
///
/// Solved in the bounded dual form max y'lambda s.t. H'lambda = 0,
/// |lambda| <= 1, whose row duals are exactly the fitted coefficients; this
/// keeps the LP at (basis count) rows regardless of the sample size.
/// Returns the hypothesis and the mean absolute training residual.
pub fn l1_regression(
    samples: &[(Vec<f64>, f64)],
    degree: usize,
    features: &FeatureMap,
) -> Result<(PolynomialHypothesis, f64)> {
    let (feats, indices, dim) = basis_for(samples, degree, features)?;
    let n = samples.len();
    if n > MAX_VARIABLES {
        return Err(Error::resource(format!(
            "{n} samples exceed the LP variable cap {MAX_VARIABLES}"
        )));
    }
    let max_deg = degree;
    let tables: Vec<Vec<Vec<f64>>> = feats
        .iter()
        .map(|z| {
            z.iter()
                .map(|&zi| crate::gauss::hermite_values(max_deg, zi))
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(indices.len());
    let mut scales = Vec::with_capacity(indices.len());
    for idx in &indices {
        let raw: Vec<f64> = (0..n).map(|i| design_value(idx, &tables[i])).collect();
        let scale = raw.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        scales.push(scale);
        rows.push(raw.into_iter().map(|v| v / scale).collect::<Vec<f64>>());
    }
    let objective: Vec<f64> = samples.iter().map(|(_, y)| *y).collect();
    let lp = LinearProgram {
        maximize: true,
        objective,
        rows,
        senses: vec![Sense::Eq; indices.len()],
        rhs: vec![0.0; indices.len()],
        bounds: vec![(-1.0, 1.0); n],
        tol: LpTolerances::default(),
    };
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::solver(format!(
            "LAD dual LP returned {:?} on {n} samples at degree {degree}",
            sol.status
        )));
    }
    // dual of the J-th (scaled) moment row, unscaled, is the coefficient
    let entries: Vec<(MultiIndex, f64)> = indices
        .iter()
        .cloned()
        .zip(sol.duals.iter().zip(&scales).map(|(&d, &s)| d / s))
        .collect();
    let expansion = HermiteExpansion::from_coefficients(dim, entries)?;
    let hypothesis = PolynomialHypothesis {
        expansion,
        features: features.clone(),
        threshold: None,
    };
    Ok((hypothesis, sol.objective / n as f64))
}

/// Least-squares fit in the Hermite basis via normal equations with a tiny
/// ridge for conditioning. Returns the hypothesis and the mean squared
/// training residual.
pub fn l2_regression(
    samples: &[(Vec<f64>, f64)],
    degree: usize,
    features: &FeatureMap,
) -> Result<(PolynomialHypothesis, f64)> {
    let (feats, indices, dim) = basis_for(samples, degree, features)?;
    let n = samples.len();
    let b = indices.len();
    let tables: Vec<Vec<Vec<f64>>> = feats
        .iter()
        .map(|z| {
            z.iter()
                .map(|&zi| crate::gauss::hermite_values(degree, zi))
                .collect()
        })
        .collect();
    let mut design = vec![0.0f64; n * b];
    for i in 0..n {
        for (j, idx) in indices.iter().enumerate() {
            design[i * b + j] = design_value(idx, &tables[i]);
        }
    }
    let mut gram = Mat::zeros(b, b);
    let mut rhs = vec![0.0; b];
    for i in 0..n {
        let row = &design[i * b..(i + 1) * b];
        let y = samples[i].1;
        for j in 0..b {
            rhs[j] += row[j] * y;
            for k in j..b {
                gram[(j, k)] += row[j] * row[k];
            }
        }
    }
    for j in 0..b {
        for k in 0..j {
            gram[(j, k)] = gram[(k, j)];
        }
    }
    let coef = solve_spd(&gram, &rhs, 1e-10)?;
    let mut mse = 0.0;
    for i in 0..n {
        let row = &design[i * b..(i + 1) * b];
        let pred: f64 = row.iter().zip(&coef).map(|(a, c)| a * c).sum();
        let r = pred - samples[i].1;
        mse += r * r;
    }
    let entries: Vec<(MultiIndex, f64)> = indices.into_iter().zip(coef).collect();
    let expansion = HermiteExpansion::from_coefficients(dim, entries)?;
    Ok((
        PolynomialHypothesis {
            expansion,
            features: features.clone(),
            threshold: None,
        },
        mse / n as f64,
    ))
}

/// Chooses the threshold among midpoints of sorted scores minimizing
/// empirical misclassification; ties resolve to the smallest threshold.
pub fn threshold_hypothesis(
    hypothesis: &PolynomialHypothesis,
    samples: &[(Vec<f64>, f64)],
) -> Result<PolynomialHypothesis> {
    if samples.is_empty() {
        return Err(Error::parameter("no samples to threshold on".to_string()));
    }
    if samples
        .iter()
        .any(|(_, y)| *y != 1.0 && *y != -1.0)
    {
        return Err(Error::parameter(
            "thresholding needs +-1 labels".to_string(),
        ));
    }
    let mut scored: Vec<(f64, f64)> = samples
        .iter()
        .map(|(x, y)| (hypothesis.score(x), *y))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = scored.len();
    // prefix_pos[k] = positives among the first k scores (predicted -1 side)
    let mut prefix_pos = vec![0usize; n + 1];
    let mut prefix_neg = vec![0usize; n + 1];
    for (i, &(_, y)) in scored.iter().enumerate() {
        prefix_pos[i + 1] = prefix_pos[i] + usize::from(y > 0.0);
        prefix_neg[i + 1] = prefix_neg[i] + usize::from(y < 0.0);
    }
    let total_neg = prefix_neg[n];
    // candidate thresholds: the smallest score (everything predicted +1)
    // and midpoints between consecutive distinct scores
    let mut best_theta = scored[0].0;
    let mut best_err = total_neg; // theta = min score: all predicted +1
    for k in 1..n {
        if scored[k].0 <= scored[k - 1].0 {
            continue;
        }
        let theta = 0.5 * (scored[k - 1].0 + scored[k].0);
        // scores >= theta predicted +1: errors are negatives above + positives below
        let err = (total_neg - prefix_neg[k]) + prefix_pos[k];
        if err < best_err || (err == best_err && theta < best_theta) {
            best_err = err;
            best_theta = theta;
        }
    }
    Ok(PolynomialHypothesis {
        expansion: hypothesis.expansion.clone(),
        features: hypothesis.features.clone(),
        threshold: Some(best_theta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorMetric {
    Misclassification,
    L2,
}

/// Error and label correlation of a hypothesis on a labeled sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub error: f64,
    pub label_correlation: f64,
    pub correlation_se: f64,
    pub n_samples: usize,
}

pub fn evaluate(
    hypothesis: &PolynomialHypothesis,
    samples: &[(Vec<f64>, f64)],
    metric: ErrorMetric,
) -> Result<EvalReport> {
    if samples.is_empty() {
        return Err(Error::parameter("no evaluation samples".to_string()));
    }
    if metric == ErrorMetric::Misclassification {
        if !hypothesis.is_boolean() {
            return Err(Error::parameter(
                "misclassification needs a thresholded hypothesis".to_string(),
            ));
        }
        if samples.iter().any(|(_, y)| *y != 1.0 && *y != -1.0) {
            return Err(Error::parameter(
                "misclassification needs +-1 labels".to_string(),
            ));
        }
    }
    let mut err_acc = 0.0;
    let mut corr = crate::rng::RunningStats::new();
    for (x, y) in samples {
        let h = hypothesis.eval(x);
        match metric {
            ErrorMetric::Misclassification => {
                err_acc += f64::from(h != *y);
            }
            ErrorMetric::L2 => {
                err_acc += (h - y) * (h - y);
            }
        }
        corr.push(h * y);
    }
    let n = samples.len() as f64;
    let error = match metric {
        ErrorMetric::Misclassification => err_acc / n,
        ErrorMetric::L2 => (err_acc / n).sqrt(),
    };
    Ok(EvalReport {
        error,
        label_correlation: corr.mean(),
        correlation_se: corr.std_error(),
        n_samples: samples.len(),
    })
}

/// One experiment row for benchmark output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub descriptor: String,
    pub learner_degree: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub achieved_error: f64,
    /// Analytic OPT when the generating distribution carries a witness.
    pub opt: Option<f64>,
    pub label_correlation: f64,
    pub runtime_ms: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_samples(
        n: usize,
        dim: usize,
        seed: u64,
        label: impl Fn(&[f64], &mut rand_chacha::ChaCha8Rng) -> f64,
    ) -> Vec<(Vec<f64>, f64)> {
        let mut rng = stream_rng(seed, 0);
        (0..n)
            .map(|_| {
                let x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let y = label(&x, &mut rng);
                (x, y)
            })
            .collect()
    }

    #[test]
    fn l1_regression_interpolates_a_line() {
        let samples = gaussian_samples(200, 1, 3, |x, _| x[0]);
        let (h, loss) = l1_regression(&samples, 1, &FeatureMap::Ambient).unwrap();
        assert!(loss < 1e-9, "loss {loss}");
        assert!((h.expansion.coefficient_uni(1) - 1.0).abs() < 1e-8);
        assert!(h.expansion.coefficient_uni(0).abs() < 1e-8);
    }

    #[test]
    fn l1_regression_agrees_with_direct_primal() {
        // oracle: the same LAD problem solved as an explicit split-variable LP
        let samples = gaussian_samples(120, 1, 5, |x, rng| {
            x[0].max(0.0) + 0.3 * rng.gen_range(-1.0..1.0)
        });
        let degree = 2;
        let (h, loss) = l1_regression(&samples, degree, &FeatureMap::Ambient).unwrap();

        let n = samples.len();
        let n_coef = degree + 1;
        let inf = f64::INFINITY;
        let mut objective = vec![0.0; n_coef + 2 * n];
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (i, (x, y)) in samples.iter().enumerate() {
            let hv = crate::gauss::hermite_values(degree, x[0]);
            let mut row = vec![0.0; n_coef + 2 * n];
            row[..n_coef].copy_from_slice(&hv);
            row[n_coef + 2 * i] = 1.0;
            row[n_coef + 2 * i + 1] = -1.0;
            rows.push(row);
            rhs.push(*y);
            objective[n_coef + 2 * i] = 1.0;
            objective[n_coef + 2 * i + 1] = 1.0;
        }
        let mut bounds = vec![(-inf, inf); n_coef];
        bounds.extend(std::iter::repeat((0.0, inf)).take(2 * n));
        let direct = solve_lp(&LinearProgram {
            maximize: false,
            objective,
            rows,
            senses: vec![Sense::Eq; n],
            rhs,
            bounds,
            tol: LpTolerances::default(),
        })
        .unwrap();
        assert!(
            (direct.objective / n as f64 - loss).abs() < 1e-8,
            "direct {} vs dual-form {}",
            direct.objective / n as f64,
            loss
        );
        for j in 0..n_coef {
            assert!(
                (direct.x[j] - h.expansion.coefficient_uni(j as u32)).abs() < 1e-6,
                "coefficient {j}: {} vs {}",
                direct.x[j],
                h.expansion.coefficient_uni(j as u32)
            );
        }
    }

    #[test]
    fn l1_regression_on_pure_noise_has_no_holdout_signal() {
        // on +-1 coin-flip labels the population L1 objective is flat over
        // every |p| <= 1, so the fitted coefficients are O(1) vertices; what
        // vanishes is the fresh-sample correlation of the fit
        let samples = gaussian_samples(4000, 2, 7, |_, rng| {
            if rng.gen::<f64>() < 0.5 {
                1.0
            } else {
                -1.0
            }
        });
        let (h, train_loss) = l1_regression(&samples, 1, &FeatureMap::Ambient).unwrap();
        assert!(train_loss <= 1.0 + 1e-9);
        let holdout = gaussian_samples(50_000, 2, 8, |_, rng| {
            if rng.gen::<f64>() < 0.5 {
                1.0
            } else {
                -1.0
            }
        });
        let report = evaluate(&h, &holdout, ErrorMetric::L2).unwrap();
        assert!(
            report.label_correlation.abs() <= 5.0 * report.correlation_se,
            "correlation {} (se {})",
            report.label_correlation,
            report.correlation_se
        );
        let hb = threshold_hypothesis(&h, &samples).unwrap();
        let miss = evaluate(&hb, &holdout, ErrorMetric::Misclassification).unwrap();
        assert!((miss.error - 0.5).abs() < 0.02, "holdout error {}", miss.error);
    }

    #[test]
    fn l2_regression_recovers_exact_polynomial() {
        let samples = gaussian_samples(500, 1, 9, |x, _| {
            1.0 + 2f64.sqrt() * crate::gauss::hermite(2, x[0])
        });
        let (h, mse) = l2_regression(&samples, 2, &FeatureMap::Ambient).unwrap();
        assert!(mse < 1e-12);
        assert!((h.expansion.coefficient_uni(0) - 1.0).abs() < 1e-7);
        assert!((h.expansion.coefficient_uni(2) - 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn l2_regression_relu_coefficients() {
        let samples = gaussian_samples(100_000, 1, 11, |x, _| x[0].max(0.0));
        let (h, _) = l2_regression(&samples, 1, &FeatureMap::Ambient).unwrap();
        assert!((h.expansion.coefficient_uni(0) - 1.0 / crate::gauss::SQRT_2PI).abs() < 0.01);
        assert!((h.expansion.coefficient_uni(1) - 0.5).abs() < 0.01);
    }

    #[test]
    fn threshold_separates_separable_data() {
        let samples = gaussian_samples(2000, 1, 13, |x, _| if x[0] >= 0.3 { 1.0 } else { -1.0 });
        let (h, _) = l1_regression(&samples, 1, &FeatureMap::Ambient).unwrap();
        let hb = threshold_hypothesis(&h, &samples).unwrap();
        let report = evaluate(&hb, &samples, ErrorMetric::Misclassification).unwrap();
        assert!(report.error < 0.01, "error {}", report.error);
    }

    #[test]
    fn threshold_on_constant_scores() {
        let samples = gaussian_samples(1000, 1, 15, |_, rng| {
            if rng.gen::<f64>() < 0.5 {
                1.0
            } else {
                -1.0
            }
        });
        let constant = PolynomialHypothesis {
            expansion: HermiteExpansion::from_univariate(&[0.7]),
            features: FeatureMap::Ambient,
            threshold: None,
        };
        let hb = threshold_hypothesis(&constant, &samples).unwrap();
        assert!((hb.threshold.unwrap() - 0.7).abs() < 1e-12);
        let report = evaluate(&hb, &samples, ErrorMetric::Misclassification).unwrap();
        assert!((report.error - 0.5).abs() < 0.06);
    }

    #[test]
    fn training_l1_loss_monotone_in_degree() {
        let samples = gaussian_samples(3000, 1, 17, |x, rng| {
            (x[0]).tanh() + 0.1 * rng.gen_range(-1.0..1.0)
        });
        let mut last = f64::INFINITY;
        for d in 0..=4usize {
            let (_, loss) = l1_regression(&samples, d, &FeatureMap::Ambient).unwrap();
            assert!(loss <= last + 1e-9, "degree {d}");
            last = loss;
        }
    }

    #[test]
    fn guards_fire() {
        let samples = gaussian_samples(30, 1, 19, |x, _| x[0]);
        assert!(matches!(
            l1_regression(&samples, 3, &FeatureMap::Ambient),
            Err(Error::Parameter(_))
        ));
        let wide = gaussian_samples(100, 30, 21, |x, _| x[0]);
        assert!(l1_regression(&wide, 4, &FeatureMap::Ambient).is_err());
        let h = PolynomialHypothesis {
            expansion: HermiteExpansion::from_univariate(&[0.0, 1.0]),
            features: FeatureMap::Ambient,
            threshold: None,
        };
        assert!(matches!(
            evaluate(&h, &samples, ErrorMetric::Misclassification),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn projected_features_reduce_dimension() {
        let frame = crate::frames::make_frame(&[vec![1.0, 0.0, 0.0, 0.0]]).unwrap();
        let features = FeatureMap::Projected(Arc::new(frame));
        let samples = gaussian_samples(500, 4, 23, |x, _| x[0] * x[0]);
        let (h, mse) = l2_regression(&samples, 2, &features).unwrap();
        assert!(mse < 1e-10);
        assert_eq!(h.expansion.dimension(), 1);
        assert!((h.expansion.coefficient_uni(2) - 2f64.sqrt()).abs() < 1e-6);
    }
}
