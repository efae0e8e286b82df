//! Planted labeled distributions, SQ/CSQ oracle simulation, pairwise
//! correlation machinery, SQ-dimension estimates, and the end-to-end
//! distinguishers.
//!
//! A planted Boolean distribution hides a bounded witness g with vanishing
//! low-degree moments inside a random frame: x is ambient Gaussian and
//! E[y | x] = g(Ux). Low-degree queries then carry no signal, while a
//! high-enough-degree learner recovers enough correlation for a final
//! threshold query to separate planted from null.

use crate::approx::DualWitness;
use crate::error::{Error, Result};
use crate::frames::{cross_gram, OrthonormalFrame};
use crate::hermite::HermiteExpansion;
use crate::learners::{
    evaluate, l1_regression, l2_regression, threshold_hypothesis, ErrorMetric, FeatureMap,
    PolynomialHypothesis,
};
use crate::quadrature::{gauss_hermite_rule, tensor_expect};
use crate::rng::{stream_rng, RunningStats};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A samplable law on labeled examples (x, y) with Gaussian marginal.
#[derive(Clone)]
pub enum LabeledDistribution {
    /// Gaussian examples with independent uniform +-1 labels.
    Null { n: usize },
    /// E[y | x] = g(Ux) through the witness interpolant; y in {-1, +1}.
    PlantedBoolean {
        witness: Arc<DualWitness>,
        frame: Arc<OrthonormalFrame>,
    },
    /// Deterministic real labels y = G(Vx) from a scaled hard expansion.
    PlantedReal {
        expansion: Arc<HermiteExpansion>,
        frame: Arc<OrthonormalFrame>,
    },
    /// Labels of the base distribution scaled by a constant.
    RealScaledLabels {
        base: Arc<LabeledDistribution>,
        scale: f64,
    },
}

impl std::fmt::Debug for LabeledDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabeledDistribution::Null { n } => write!(f, "Null(n={n})"),
            LabeledDistribution::PlantedBoolean { witness, frame } => write!(
                f,
                "PlantedBoolean(target={}, d={}, n={})",
                witness.target_id,
                witness.degree,
                frame.n()
            ),
            LabeledDistribution::PlantedReal { frame, .. } => {
                write!(f, "PlantedReal(n={})", frame.n())
            }
            LabeledDistribution::RealScaledLabels { base, scale } => {
                write!(f, "Scaled({scale}, {base:?})")
            }
        }
    }
}

/// Builds the planted Boolean law from a witness and a frame.
pub fn planted_distribution(
    witness: Arc<DualWitness>,
    frame: Arc<OrthonormalFrame>,
) -> Result<LabeledDistribution> {
    if frame.m() != 1 {
        return Err(Error::parameter(format!(
            "witnesses are univariate; frame has m = {}",
            frame.m()
        )));
    }
    Ok(LabeledDistribution::PlantedBoolean { witness, frame })
}

impl LabeledDistribution {
    pub fn ambient_dim(&self) -> usize {
        match self {
            LabeledDistribution::Null { n } => *n,
            LabeledDistribution::PlantedBoolean { frame, .. } => frame.n(),
            LabeledDistribution::PlantedReal { frame, .. } => frame.n(),
            LabeledDistribution::RealScaledLabels { base, .. } => base.ambient_dim(),
        }
    }

    /// E[y | x].
    pub fn conditional_mean(&self, x: &[f64]) -> f64 {
        match self {
            LabeledDistribution::Null { .. } => 0.0,
            LabeledDistribution::PlantedBoolean { witness, frame } => {
                witness.interpolate(frame.apply(x)[0])
            }
            LabeledDistribution::PlantedReal { expansion, frame } => {
                expansion.eval(&frame.apply(x)).unwrap_or(f64::NAN)
            }
            LabeledDistribution::RealScaledLabels { base, scale } => {
                scale * base.conditional_mean(x)
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
        let n = self.ambient_dim();
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let y = self.label_for(&x, rng);
        (x, y)
    }

    fn label_for(&self, x: &[f64], rng: &mut ChaCha8Rng) -> f64 {
        match self {
            LabeledDistribution::Null { .. } => {
                if rng.gen::<f64>() < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            LabeledDistribution::PlantedBoolean { witness, frame } => {
                let g = witness.interpolate(frame.apply(x)[0]);
                if rng.gen::<f64>() < (1.0 + g) / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            LabeledDistribution::PlantedReal { expansion, frame } => {
                expansion.eval(&frame.apply(x)).unwrap_or(f64::NAN)
            }
            LabeledDistribution::RealScaledLabels { base, scale } => {
                scale * base.label_for(x, rng)
            }
        }
    }

    pub fn sample_n(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<f64>, f64)> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    /// Analytic OPT for planted Boolean instances: (1 - E[f g]) / 2 from the
    /// witness correlation.
    pub fn opt(&self) -> Option<f64> {
        match self {
            LabeledDistribution::PlantedBoolean { witness, .. } => {
                Some(0.5 * (1.0 - witness.correlation))
            }
            _ => None,
        }
    }

    fn planted_frame(&self) -> Option<&OrthonormalFrame> {
        match self {
            LabeledDistribution::PlantedBoolean { frame, .. } => Some(frame),
            LabeledDistribution::PlantedReal { frame, .. } => Some(frame),
            LabeledDistribution::RealScaledLabels { base, .. } => base.planted_frame(),
            LabeledDistribution::Null { .. } => None,
        }
    }

    /// The univariate conditional-mean profile along the planted direction,
    /// together with the label scale; None for the null law.
    fn planted_profile(&self) -> Option<(Box<dyn Fn(f64) -> f64 + '_>, f64)> {
        match self {
            LabeledDistribution::Null { .. } => None,
            LabeledDistribution::PlantedBoolean { witness, .. } => {
                Some((Box::new(move |s| witness.interpolate(s)), 1.0))
            }
            LabeledDistribution::PlantedReal { expansion, frame } => {
                if frame.m() != 1 {
                    return None;
                }
                Some((
                    Box::new(move |s| expansion.eval(&[s]).unwrap_or(f64::NAN)),
                    1.0,
                ))
            }
            LabeledDistribution::RealScaledLabels { base, scale } => {
                let (f, s) = base.planted_profile()?;
                Some((f, s * scale))
            }
        }
    }
}

/// A bounded hypothesis for correlational queries.
#[derive(Clone)]
pub enum CorrelationQuery {
    /// h(x) = profile(v . x) for the single row v of a 1-dimensional frame.
    Projected {
        frame: Arc<OrthonormalFrame>,
        profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
    /// An arbitrary ambient hypothesis.
    Ambient(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl CorrelationQuery {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            CorrelationQuery::Projected { frame, profile } => profile(frame.apply(x)[0]),
            CorrelationQuery::Ambient(h) => h(x),
        }
    }

    pub fn from_hypothesis(h: &PolynomialHypothesis) -> CorrelationQuery {
        match (&h.features, h.expansion.dimension()) {
            (FeatureMap::Projected(frame), 1) if frame.m() == 1 => {
                let expansion = h.expansion.clone();
                let theta = h.threshold;
                CorrelationQuery::Projected {
                    frame: frame.clone(),
                    profile: Arc::new(move |s| {
                        let v = expansion.eval(&[s]).unwrap_or(f64::NAN);
                        match theta {
                            Some(t) => {
                                if v - t >= 0.0 {
                                    1.0
                                } else {
                                    -1.0
                                }
                            }
                            None => v,
                        }
                    }),
                }
            }
            _ => {
                let h = h.clone();
                CorrelationQuery::Ambient(Arc::new(move |x| h.eval(x)))
            }
        }
    }
}

/// A statistical query q(x, y) -> [-1, 1].
#[derive(Clone)]
pub enum QueryFunction {
    General(Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>),
    /// q(x, y) = h(x) * y.
    Correlational(CorrelationQuery),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMode {
    /// Closed form / quadrature where available.
    Analytic,
    Empirical { n_samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adversary {
    None,
    /// Shifts the answer by up to tau toward the null-distribution value.
    TowardNull,
}

#[derive(Clone)]
pub struct SQQuery {
    pub q: QueryFunction,
    pub tau: f64,
    pub mode: OracleMode,
    pub adversary: Adversary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleAnswer {
    /// The oracle's (possibly adversarially shifted) answer.
    pub value: f64,
    /// The underlying truth (analytic) or unshifted estimate (empirical).
    pub truth: f64,
    pub std_error: Option<f64>,
    /// Count of query evaluations clamped into [-1, 1].
    pub clamped: usize,
    /// The null value the adversary pulls toward.
    pub null_value: f64,
}

/// Gaussian expectation of a univariate function by composite 4-point
/// Gauss-Legendre on 3000 panels of [-9, 9]; resolves the kinks and jumps
/// of witness interpolants and thresholded profiles that node-based rules
/// step over (residual ~1e-3 per jump, ~1e-7 for kinks).
fn fine_expectation(f: impl Fn(f64) -> f64) -> f64 {
    const GL_NODES: [f64; 4] = [
        -0.8611363115940526,
        -0.3399810435848563,
        0.3399810435848563,
        0.8611363115940526,
    ];
    const GL_WEIGHTS: [f64; 4] = [
        0.3478548451374538,
        0.6521451548625461,
        0.6521451548625461,
        0.3478548451374538,
    ];
    let panels = 3000;
    let (lo, hi) = (-9.0f64, 9.0f64);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mid = a + h / 2.0;
        let mut acc = 0.0;
        for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let x = mid + t * h / 2.0;
            acc += w * crate::gauss::pdf(x) * f(x);
        }
        total += acc * h / 2.0;
    }
    total
}

/// The expectation of h1(v.x) * mean(u.x) for unit rows v, u with
/// inner product rho; collinear directions use the fine composite rule,
/// others a bivariate Gauss-Hermite tensor grid.
fn bivariate_correlation(
    h1: &dyn Fn(f64) -> f64,
    mean: &dyn Fn(f64) -> f64,
    rho: f64,
) -> Result<f64> {
    if rho.abs() > 1.0 - 1e-12 {
        let sgn = rho.signum();
        return Ok(fine_expectation(|s| h1(s) * mean(sgn * s)));
    }
    let rule = gauss_hermite_rule(120)?;
    let ortho = (1.0 - rho * rho).sqrt();
    tensor_expect(&rule, 2, |ab| {
        let s = ab[0];
        let t = rho * ab[0] + ortho * ab[1];
        h1(s) * mean(t)
    })
}

fn analytic_truth(dist: &LabeledDistribution, q: &QueryFunction) -> Result<f64> {
    match q {
        QueryFunction::Correlational(h) => {
            match dist {
                // labels are mean zero independent of x
                LabeledDistribution::Null { .. } => Ok(0.0),
                _ => {
                    let (profile, scale) = dist.planted_profile().ok_or_else(|| {
                        Error::parameter(
                            "analytic mode needs a univariate planted profile".to_string(),
                        )
                    })?;
                    let frame = dist.planted_frame().expect("planted");
                    match h {
                        CorrelationQuery::Projected {
                            frame: hframe,
                            profile: hprof,
                        } => {
                            let rho: f64 = hframe.rows[0]
                                .iter()
                                .zip(&frame.rows[0])
                                .map(|(a, b)| a * b)
                                .sum();
                            let v = bivariate_correlation(
                                &|s| hprof(s),
                                &|t| profile(t),
                                rho.clamp(-1.0, 1.0),
                            )?;
                            Ok(scale * v)
                        }
                        CorrelationQuery::Ambient(_) => Err(Error::parameter(
                            "analytic mode supports ambient hypotheses only under \
                             the null distribution; use Empirical"
                                .to_string(),
                        )),
                    }
                }
            }
        }
        QueryFunction::General(_) => Err(Error::parameter(
            "analytic mode supports correlational queries; use Empirical".to_string(),
        )),
    }
}

fn null_value(q: &QueryFunction, dim: usize, mode: &OracleMode) -> Result<f64> {
    match q {
        QueryFunction::Correlational(_) => Ok(0.0),
        QueryFunction::General(f) => match mode {
            OracleMode::Analytic => Err(Error::parameter(
                "analytic null value unavailable for general queries".to_string(),
            )),
            OracleMode::Empirical { n_samples, seed } => {
                let null = LabeledDistribution::Null { n: dim };
                let mut rng = stream_rng(*seed, 0x6e75_6c6c);
                let mut acc = RunningStats::new();
                for _ in 0..*n_samples {
                    let (x, y) = null.sample(&mut rng);
                    acc.push(f(&x, y).clamp(-1.0, 1.0));
                }
                Ok(acc.mean())
            }
        },
    }
}

/// Answers a statistical query within tolerance tau: exact expectation in
/// analytic mode, sample mean in empirical mode, then an optional
/// adversarial shift of up to tau toward the null value.
pub fn sq_oracle(dist: &LabeledDistribution, query: &SQQuery) -> Result<OracleAnswer> {
    if !(query.tau > 0.0 && query.tau <= 1.0) {
        return Err(Error::parameter(format!(
            "tolerance must lie in (0, 1], got {}",
            query.tau
        )));
    }
    let mut clamped = 0usize;
    let (truth, std_error) = match query.mode {
        OracleMode::Analytic => (analytic_truth(dist, &query.q)?, None),
        OracleMode::Empirical { n_samples, seed } => {
            if n_samples < 100 {
                return Err(Error::parameter(
                    "empirical oracle needs at least 100 samples".to_string(),
                ));
            }
            let mut rng = stream_rng(seed, 0x6f72_6163);
            let mut acc = RunningStats::new();
            for _ in 0..n_samples {
                let (x, y) = dist.sample(&mut rng);
                let raw = match &query.q {
                    QueryFunction::General(f) => f(&x, y),
                    QueryFunction::Correlational(h) => h.eval(&x) * y,
                };
                let v = raw.clamp(-1.0, 1.0);
                if v != raw {
                    clamped += 1;
                }
                acc.push(v);
            }
            (acc.mean(), Some(acc.std_error()))
        }
    };
    let nv = match query.adversary {
        Adversary::None => 0.0,
        Adversary::TowardNull => null_value(&query.q, dist.ambient_dim(), &query.mode)?,
    };
    let value = match query.adversary {
        Adversary::None => truth,
        Adversary::TowardNull => {
            let shift = (truth - nv).clamp(-query.tau, query.tau);
            truth - shift
        }
    };
    Ok(OracleAnswer {
        value,
        truth,
        std_error,
        clamped,
        null_value: nv,
    })
}

/// Correlational query shorthand: q(x, y) = h(x) y.
pub fn csq_oracle(
    dist: &LabeledDistribution,
    h: CorrelationQuery,
    tau: f64,
    mode: OracleMode,
    adversary: Adversary,
) -> Result<OracleAnswer> {
    sq_oracle(
        dist,
        &SQQuery {
            q: QueryFunction::Correlational(h),
            tau,
            mode,
            adversary,
        },
    )
}

/// Monte Carlo estimate of E[g(Ux) g(Vx)], the pairwise correlation of two
/// planted distributions sharing a witness.
pub fn chi_pairwise(
    a: &LabeledDistribution,
    b: &LabeledDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let (LabeledDistribution::PlantedBoolean { witness: wa, frame: fa },
         LabeledDistribution::PlantedBoolean { witness: wb, frame: fb }) = (a, b)
    else {
        return Err(Error::parameter(
            "chi_pairwise expects two planted Boolean distributions".to_string(),
        ));
    };
    if wa.target_id != wb.target_id || wa.degree != wb.degree {
        return Err(Error::parameter(
            "pairwise correlation needs a shared witness".to_string(),
        ));
    }
    if fa.n() != fb.n() {
        return Err(Error::parameter("ambient dimensions differ".to_string()));
    }
    let n = fa.n();
    let mut rng = stream_rng(seed, 0x6368_6931);
    let mut acc = RunningStats::new();
    for _ in 0..n_samples {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let gu = wa.interpolate(fa.apply(&x)[0]);
        let gv = wb.interpolate(fb.apply(&x)[0]);
        acc.push(gu * gv);
    }
    Ok((acc.mean(), acc.std_error()))
}

/// Closed 2-dimensional quadrature for the same quantity (m = 1 frames).
pub fn chi_pairwise_analytic(
    witness: &DualWitness,
    u: &OrthonormalFrame,
    v: &OrthonormalFrame,
) -> Result<f64> {
    if u.m() != 1 || v.m() != 1 {
        return Err(Error::parameter("analytic path needs m = 1".to_string()));
    }
    let rho: f64 = u.rows[0].iter().zip(&v.rows[0]).map(|(a, b)| a * b).sum();
    bivariate_correlation(
        &|s| witness.interpolate(s),
        &|t| witness.interpolate(t),
        rho.clamp(-1.0, 1.0),
    )
}

/// Both sides of the correlation bound: E[g(Ux) g(Vx)] against
/// |UV^T|_2^d times the tail mass of g.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationBoundCheck {
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub spectral: f64,
    pub holds: bool,
}

pub fn correlation_bound_check(
    g: &HermiteExpansion,
    u: &OrthonormalFrame,
    v: &OrthonormalFrame,
    degree: usize,
    n_samples: usize,
    seed: u64,
) -> Result<CorrelationBoundCheck> {
    let low_mass = g.truncate_below(degree as u32).l2_norm();
    if low_mass > 1e-10 {
        return Err(Error::parameter(format!(
            "g has low-degree mass {low_mass:.3e} below degree {degree}"
        )));
    }
    if u.m() != g.dimension() || v.m() != g.dimension() {
        return Err(Error::parameter(
            "frame output dimension must match the expansion".to_string(),
        ));
    }
    if u.n() != v.n() {
        return Err(Error::parameter("ambient dimensions differ".to_string()));
    }
    let n = u.n();
    let mut rng = stream_rng(seed, 0x636f_7242);
    let mut acc = RunningStats::new();
    for _ in 0..n_samples {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let gu = g.eval(&u.apply(&x))?;
        let gv = g.eval(&v.apply(&x))?;
        acc.push(gu * gv);
    }
    let (_, spectral) = cross_gram(u, v)?;
    let tail_mass: f64 = g.iter().map(|(_, c)| c * c).sum();
    let rhs = spectral.powi(degree as i32) * tail_mass;
    let lhs = acc.mean();
    Ok(CorrelationBoundCheck {
        lhs,
        lhs_se: acc.std_error(),
        rhs,
        spectral,
        holds: lhs <= rhs + 5.0 * acc.std_error(),
    })
}

/// The (gamma, beta) verification plus the implied query lower bound
/// s * gamma' / (beta - gamma) at gamma' = gamma.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SQDimensionEstimate {
    pub family_size: usize,
    pub gamma: f64,
    pub beta: f64,
    pub implied_queries: f64,
}

pub fn sq_dimension_estimate(
    pairwise: &[Vec<f64>],
    gamma: f64,
    beta: f64,
) -> Result<SQDimensionEstimate> {
    let s = pairwise.len();
    if s == 0 || pairwise.iter().any(|row| row.len() != s) {
        return Err(Error::parameter(
            "pairwise correlation matrix must be square".to_string(),
        ));
    }
    if !(gamma < beta) {
        return Err(Error::parameter("need gamma < beta".to_string()));
    }
    for i in 0..s {
        for j in 0..s {
            if (pairwise[i][j] - pairwise[j][i]).abs() > 1e-9 {
                return Err(Error::analysis(format!(
                    "matrix asymmetric at pair ({i}, {j})"
                )));
            }
            let v = pairwise[i][j].abs();
            if i == j && v > beta {
                return Err(Error::analysis(format!(
                    "diagonal entry ({i}, {i}) = {v:.6} exceeds beta = {beta}"
                )));
            }
            if i != j && v > gamma {
                return Err(Error::analysis(format!(
                    "off-diagonal entry ({i}, {j}) = {v:.6} exceeds gamma = {gamma}"
                )));
            }
        }
    }
    Ok(SQDimensionEstimate {
        family_size: s,
        gamma,
        beta,
        implied_queries: s as f64 * gamma / (beta - gamma),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Planted,
    Null,
}

#[derive(Debug, Clone)]
pub struct DistinguisherConfig {
    /// Frame defining the learner's feature projection.
    pub frame: Arc<OrthonormalFrame>,
    pub learner_degree: usize,
    pub n_train: usize,
    pub final_query_mode: OracleMode,
    pub adversary: Adversary,
}

#[derive(Debug, Clone)]
pub struct DistinguishOutcome {
    pub verdict: Verdict,
    pub final_query_value: f64,
    pub truth: f64,
    pub tolerance: f64,
    pub hypothesis: PolynomialHypothesis,
}

/// Trains the L1-regression-plus-threshold learner and issues the final
/// correlation query of tolerance epsilon/2; Planted iff the answer is
/// strictly above epsilon/2 (ties resolve to Null).
pub fn distinguish_boolean(
    config: &DistinguisherConfig,
    dist: &LabeledDistribution,
    epsilon: f64,
    seed: u64,
) -> Result<DistinguishOutcome> {
    if !(epsilon > 0.0) {
        return Err(Error::parameter("epsilon must be positive".to_string()));
    }
    let mut rng = stream_rng(seed, 0x7472_6169);
    let train = dist.sample_n(config.n_train, &mut rng);
    let features = FeatureMap::Projected(config.frame.clone());
    let (fit, _) = l1_regression(&train, config.learner_degree, &features)?;
    let hypothesis = threshold_hypothesis(&fit, &train)?;
    let query = CorrelationQuery::from_hypothesis(&hypothesis);
    let tau = epsilon / 2.0;
    let answer = csq_oracle(dist, query, tau, config.final_query_mode, config.adversary)?;
    let verdict = if answer.value > tau {
        Verdict::Planted
    } else {
        Verdict::Null
    };
    Ok(DistinguishOutcome {
        verdict,
        final_query_value: answer.value,
        truth: answer.truth,
        tolerance: tau,
        hypothesis,
    })
}

#[derive(Debug, Clone)]
pub struct RealDistinguishOutcome {
    pub verdict: Verdict,
    pub correlation: f64,
    pub correlation_se: f64,
    pub threshold: f64,
    pub hypothesis: PolynomialHypothesis,
}

/// Real-valued route: labels are presented scaled by c_scale, the learner is
/// L2 regression, and the verdict compares the measured correlation with the
/// unscaled labels against 1/(6 c_scale) - tolerance/2.
pub fn distinguish_real(
    config: &DistinguisherConfig,
    dist: &LabeledDistribution,
    c_scale: f64,
    tolerance: f64,
    n_eval: usize,
    seed: u64,
) -> Result<RealDistinguishOutcome> {
    if c_scale <= 1.0 {
        return Err(Error::parameter(format!(
            "label scale C = {c_scale} <= 1 signals a miswired witness \
             (the witness correlation would exceed 1)"
        )));
    }
    let scaled = LabeledDistribution::RealScaledLabels {
        base: Arc::new(dist.clone()),
        scale: c_scale,
    };
    let mut rng = stream_rng(seed, 0x7265_616c);
    let train = scaled.sample_n(config.n_train, &mut rng);
    let features = FeatureMap::Projected(config.frame.clone());
    let (hypothesis, _) = l2_regression(&train, config.learner_degree, &features)?;
    // measure E[h(x) y] against the unscaled labels on fresh samples
    let mut eval_rng = stream_rng(seed, 0x7265_7632);
    let fresh = dist.sample_n(n_eval, &mut eval_rng);
    let report = evaluate(&hypothesis, &fresh, ErrorMetric::L2)?;
    let threshold = 1.0 / (6.0 * c_scale) - tolerance / 2.0;
    let verdict = if report.label_correlation >= threshold {
        Verdict::Planted
    } else {
        Verdict::Null
    };
    Ok(RealDistinguishOutcome {
        verdict,
        correlation: report.label_correlation,
        correlation_se: report.correlation_se,
        threshold,
        hypothesis,
    })
}
