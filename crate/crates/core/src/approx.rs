//! Best L1/L2 polynomial approximation under the Gaussian measure,
//! minimum-degree search, and LP dual witnesses with vanishing low-degree
//! moments.
//!
//! The L1 side discretizes the measure on a Gauss-Hermite grid: the fit LP
//! and the witness LP are exact duals on that grid, so their optima agree to
//! solver tolerance. Witnesses carry explicit certificates (grid moment
//! residuals, boundedness) plus the continuous moment residuals of their
//! piecewise-linear interpolant.

use crate::error::{Error, Result};
use crate::gauss::{self, hermite_values, interval_moment, interval_moment_x};
use crate::hermite::{expand, HermiteExpansion};
use crate::lp::{solve_lp, solve_lp_with_basis, LinearProgram, LpStatus, LpTolerances, Sense};
use crate::quadrature::{expect, gauss_hermite_rule, QuadratureRule};
use crate::rng::pairwise_sum;
use crate::targets::{RangeTag, TargetFunction, TargetKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
}

/// A best-approximation result in the requested norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxResult {
    pub polynomial: HermiteExpansion,
    pub error: f64,
    pub degree: usize,
    pub norm: Norm,
    pub rule_order: usize,
}

/// A bounded function on the quadrature grid with vanishing low-degree
/// moments and maximal correlation with its target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualWitness {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// g(x_i), each in [-1, 1].
    pub values: Vec<f64>,
    /// Grid correlation E[f g].
    pub correlation: f64,
    /// |grid E[g H_j]| for j < degree.
    pub moment_residuals: Vec<f64>,
    /// Continuous moment residuals of the clipped interpolant, order-400 rule.
    pub interp_moment_residuals: Vec<f64>,
    pub degree: usize,
    pub target_id: String,
}

impl DualWitness {
    /// Piecewise-linear interpolant of the grid values, clipped to [-1, 1],
    /// constant beyond the end nodes.
    pub fn interpolate(&self, s: f64) -> f64 {
        let n = self.nodes.len();
        let v = if s <= self.nodes[0] {
            self.values[0]
        } else if s >= self.nodes[n - 1] {
            self.values[n - 1]
        } else {
            let mut lo = 0;
            let mut hi = n - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.nodes[mid] <= s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = (s - self.nodes[lo]) / (self.nodes[hi] - self.nodes[lo]);
            self.values[lo] + t * (self.values[hi] - self.values[lo])
        };
        v.clamp(-1.0, 1.0)
    }

    pub fn max_moment_residual(&self) -> f64 {
        self.moment_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_interp_residual(&self) -> f64 {
        self.interp_moment_residuals
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Grid L1 distance to the target values.
    pub fn grid_l1_distance(&self, f: &TargetFunction) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((&x, &w), &g)| w * (f.eval1(x) - g).abs())
            .collect();
        pairwise_sum(&terms)
    }
}

/// Hermite coefficients of a built-in target up to max_degree.
///
/// Piecewise-polynomial targets (sign, relu, piecewise PTF) use exact
/// interval moments; smooth targets use tensor quadrature, which converges
/// geometrically for them.
pub fn expand_target(
    f: &TargetFunction,
    max_degree: u32,
    rule: &QuadratureRule,
) -> Result<HermiteExpansion> {
    use crate::hermite::MultiIndex;
    let inf = f64::INFINITY;
    match &f.kind {
        TargetKind::Sign => {
            let entries = (0..=max_degree).map(|j| {
                let c = interval_moment(j as usize, 0.0, inf)
                    - interval_moment(j as usize, -inf, 0.0);
                (MultiIndex::uni(j), c)
            });
            HermiteExpansion::from_coefficients(1, entries)
        }
        TargetKind::Relu => {
            let entries = (0..=max_degree)
                .map(|j| (MultiIndex::uni(j), interval_moment_x(j as usize, 0.0, inf)));
            HermiteExpansion::from_coefficients(1, entries)
        }
        TargetKind::PiecewisePtf { .. } => {
            let intervals = f.ptf_intervals().expect("piecewise kind");
            let entries = (0..=max_degree).map(|j| {
                let c = intervals
                    .iter()
                    .map(|&(lo, hi)| interval_moment(j as usize, lo, hi))
                    .sum();
                (MultiIndex::uni(j), c)
            });
            HermiteExpansion::from_coefficients(1, entries)
        }
        _ => {
            if f.dimension() == 1 {
                expand(|x| f.eval_unchecked(x), 1, max_degree, rule)
            } else {
                expand(|x| f.eval_unchecked(x), f.dimension(), max_degree, rule)
            }
        }
    }
}

/// E[f^2], exact for the built-in Boolean and piecewise targets.
pub fn second_moment(f: &TargetFunction, rule: &QuadratureRule) -> Result<f64> {
    match (&f.kind, f.range()) {
        (_, RangeTag::BooleanPm) => Ok(1.0),
        (TargetKind::Relu, _) => Ok(0.5),
        (TargetKind::PiecewisePtf { .. }, _) => {
            // f^2 = f for a {0,1} target
            Ok(f.ptf_intervals()
                .expect("piecewise kind")
                .iter()
                .map(|&(lo, hi)| gauss::cdf(hi) - gauss::cdf(lo))
                .sum())
        }
        (_, RangeTag::Boolean01) => {
            let v = expect(rule, |x| f.eval1(x))?;
            Ok(v)
        }
        _ => {
            if f.dimension() != 1 {
                return Err(Error::parameter(
                    "second_moment supports univariate targets on the quadrature path"
                        .to_string(),
                ));
            }
            expect(rule, |x| {
                let v = f.eval1(x);
                v * v
            })
        }
    }
}

/// L2 errors of the best degree-d truncation for every d up to d_max.
pub fn l2_error_profile(
    f: &TargetFunction,
    d_max: usize,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    let e = expand_target(f, d_max as u32, rule)?;
    let total = second_moment(f, rule)?;
    let mut errors = Vec::with_capacity(d_max + 1);
    let mut captured = 0.0;
    for d in 0..=d_max {
        captured += e
            .degree_part(d as u32)
            .iter()
            .map(|(_, c)| c * c)
            .sum::<f64>();
        errors.push((total - captured).max(0.0).sqrt());
    }
    Ok(errors)
}

/// Best L2 approximation: the truncated Hermite expansion.
pub fn best_l2(f: &TargetFunction, degree: usize, rule: &QuadratureRule) -> Result<ApproxResult> {
    if f.dimension() > 4 {
        return Err(Error::parameter(
            "best_l2 quadrature path supports dimension <= 4".to_string(),
        ));
    }
    let e = expand_target(f, degree as u32, rule)?;
    let poly = e.truncate_at(degree as u32);
    let total = second_moment(f, rule)?;
    let captured: f64 = poly.iter().map(|(_, c)| c * c).sum();
    Ok(ApproxResult {
        polynomial: poly,
        error: (total - captured).max(0.0).sqrt(),
        degree,
        norm: Norm::L2,
        rule_order: rule.order,
    })
}

/// Weight floor for the LP grid: nodes whose Gaussian weight is below this
/// carry no measurable mass at the solver tolerances, and keeping them only
/// degrades basis conditioning. Both the fit LP and the witness LP use the
/// same trimmed grid, so grid-measure duality is unaffected.
const GRID_WEIGHT_FLOOR: f64 = 1e-18;

fn lp_grid(rule: &QuadratureRule) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        if w >= GRID_WEIGHT_FLOOR {
            nodes.push(x);
            weights.push(w);
        }
    }
    (nodes, weights)
}

fn check_l1_preconditions(f: &TargetFunction, degree: usize, rule: &QuadratureRule) -> Result<()> {
    if f.dimension() != 1 {
        return Err(Error::parameter(
            "the grid LP path for L1 approximation is univariate".to_string(),
        ));
    }
    let required = 200.max(4 * degree);
    if rule.order < required {
        return Err(Error::parameter(format!(
            "rule order {} below max(200, 4d) = {required} for degree {degree}",
            rule.order
        )));
    }
    Ok(())
}

/// Best L1 approximation on the grid measure via the split-residual LP:
/// minimize sum_i w_i |f(x_i) - p(x_i)| over degree-d coefficients.
pub fn best_l1(f: &TargetFunction, degree: usize, rule: &QuadratureRule) -> Result<ApproxResult> {
    check_l1_preconditions(f, degree, rule)?;
    let (nodes, weights) = lp_grid(rule);
    let q = nodes.len();
    let n_coef = degree + 1;
    let n_vars = n_coef + 2 * q;
    let inf = f64::INFINITY;

    let mut objective = vec![0.0; n_vars];
    let mut rows = Vec::with_capacity(q);
    let mut rhs = Vec::with_capacity(q);
    for i in 0..q {
        let x = nodes[i];
        let h = hermite_values(degree, x);
        // equilibrate each row so high-degree Hermite growth does not wreck
        // the basis conditioning
        let scale = h.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let mut row = vec![0.0; n_vars];
        for (j, &hj) in h.iter().enumerate() {
            row[j] = hj / scale;
        }
        row[n_coef + 2 * i] = 1.0; // scaled positive residual
        row[n_coef + 2 * i + 1] = -1.0; // scaled negative residual
        rows.push(row);
        rhs.push(f.eval1(x) / scale);
        objective[n_coef + 2 * i] = weights[i] * scale;
        objective[n_coef + 2 * i + 1] = weights[i] * scale;
    }
    let mut bounds = vec![(-inf, inf); n_coef];
    bounds.extend(std::iter::repeat((0.0, inf)).take(2 * q));

    // natural starting basis: the residual split matching the sign of f
    let basis: Vec<usize> = (0..q)
        .map(|i| {
            if rhs[i] >= 0.0 {
                n_coef + 2 * i
            } else {
                n_coef + 2 * i + 1
            }
        })
        .collect();
    let lp = LinearProgram {
        maximize: false,
        objective,
        rows,
        senses: vec![Sense::Eq; q],
        rhs,
        bounds,
        tol: LpTolerances::default(),
    };
    let sol = solve_lp_with_basis(&lp, &basis)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::solver(format!(
            "L1 fit LP returned {:?} for target '{}' at degree {degree}",
            sol.status,
            f.id()
        )));
    }
    let polynomial = HermiteExpansion::from_univariate(&sol.x[..n_coef]);
    Ok(ApproxResult {
        polynomial,
        error: sol.objective,
        degree,
        norm: Norm::L1,
        rule_order: q,
    })
}

/// The witness LP: maximize grid E[f g] over g bounded by 1 with vanishing
/// grid moments below `degree`.
pub fn dual_witness(
    f: &TargetFunction,
    degree: usize,
    rule: &QuadratureRule,
) -> Result<DualWitness> {
    if f.range() != RangeTag::BooleanPm {
        return Err(Error::parameter(format!(
            "dual_witness expects a +-1 target, '{}' is {:?}",
            f.id(),
            f.range()
        )));
    }
    witness_lp(f, degree, rule)
}

/// Witness LP outcome for a real-valued target together with the
/// feasibility verdict at level epsilon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealWitnessOutcome {
    pub witness: DualWitness,
    pub epsilon: f64,
    /// True iff the optimal correlation reaches epsilon.
    pub feasible: bool,
}

/// Real-target version: feasible iff the optimum E[f g] reaches epsilon,
/// which on the grid equals the minimal L1 distance to degree < d
/// polynomials.
pub fn dual_witness_real(
    f: &TargetFunction,
    degree: usize,
    epsilon: f64,
    rule: &QuadratureRule,
) -> Result<RealWitnessOutcome> {
    if epsilon < 0.0 {
        return Err(Error::parameter("epsilon must be nonnegative".to_string()));
    }
    let witness = witness_lp(f, degree, rule)?;
    let feasible = witness.correlation >= epsilon;
    Ok(RealWitnessOutcome {
        witness,
        epsilon,
        feasible,
    })
}

fn witness_lp(f: &TargetFunction, degree: usize, rule: &QuadratureRule) -> Result<DualWitness> {
    if f.dimension() != 1 {
        return Err(Error::parameter(
            "witness LPs are univariate (m = 1)".to_string(),
        ));
    }
    let (nodes, weights) = lp_grid(rule);
    let q = nodes.len();

    // per-node data: objective w_i f(x_i); constraint rows w_i H_j(x_i)
    let tables: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&x| hermite_values(degree.saturating_sub(1), x))
        .collect();
    let mut rows = Vec::with_capacity(degree);
    for j in 0..degree {
        let raw: Vec<f64> = (0..q).map(|i| weights[i] * tables[i][j]).collect();
        let scale = raw.iter().fold(1e-300f64, |acc, v| acc.max(v.abs()));
        rows.push(raw.into_iter().map(|v| v / scale).collect::<Vec<f64>>());
    }
    let objective: Vec<f64> = (0..q).map(|i| weights[i] * f.eval1(nodes[i])).collect();

    let lp = LinearProgram {
        maximize: true,
        objective,
        rows,
        senses: vec![Sense::Eq; degree],
        rhs: vec![0.0; degree],
        bounds: vec![(-1.0, 1.0); q],
        tol: LpTolerances::default(),
    };
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        // g = 0 is always feasible, so anything else is an internal failure
        return Err(Error::solver(format!(
            "witness LP returned {:?} for target '{}' at degree {degree}; \
             the zero witness is feasible, this is a bug",
            sol.status,
            f.id()
        )));
    }
    let values: Vec<f64> = sol.x.iter().map(|&g| g.clamp(-1.0, 1.0)).collect();

    let mut moment_residuals = Vec::with_capacity(degree);
    for j in 0..degree {
        let terms: Vec<f64> = (0..q)
            .map(|i| weights[i] * tables[i][j] * values[i])
            .collect();
        moment_residuals.push(pairwise_sum(&terms).abs());
    }

    let witness = DualWitness {
        nodes,
        weights,
        values,
        correlation: sol.objective,
        moment_residuals,
        interp_moment_residuals: Vec::new(),
        degree,
        target_id: f.id().to_string(),
    };
    let fine = gauss_hermite_rule(400)?;
    let mut interp_res = Vec::with_capacity(degree);
    for j in 0..degree {
        let terms: Vec<f64> = fine
            .nodes
            .iter()
            .zip(&fine.weights)
            .map(|(&y, &w)| w * gauss::hermite(j, y) * witness.interpolate(y))
            .collect();
        interp_res.push(pairwise_sum(&terms).abs());
    }
    let mut witness = witness;
    witness.interp_moment_residuals = interp_res;
    Ok(witness)
}

/// |dual optimum at degree d - best L1 error at degree d-1| on the same
/// grid measure: the numerical strong-duality check.
pub fn duality_gap(f: &TargetFunction, degree: usize, rule: &QuadratureRule) -> Result<f64> {
    if degree == 0 {
        return Err(Error::parameter(
            "duality_gap needs degree >= 1 (the fit side uses degree - 1)".to_string(),
        ));
    }
    let w = dual_witness(f, degree, rule)?;
    let fit = best_l1(f, degree - 1, rule)?;
    Ok((w.correlation - fit.error).abs())
}

/// Smallest degree whose best error is strictly below epsilon, scanning
/// upward; returns d_max + 1 when unachieved.
pub fn min_degree(
    f: &TargetFunction,
    epsilon: f64,
    norm: Norm,
    d_max: usize,
) -> Result<usize> {
    if epsilon <= 0.0 {
        return Err(Error::parameter("epsilon must be positive".to_string()));
    }
    if d_max > 200 {
        return Err(Error::parameter("d_max is capped at 200".to_string()));
    }
    match norm {
        Norm::L2 => {
            let rule = gauss_hermite_rule((d_max + 16).min(1000).max(200))?;
            let profile = l2_error_profile(f, d_max, &rule)?;
            for (d, err) in profile.iter().enumerate() {
                if *err < epsilon {
                    return Ok(d);
                }
            }
            Ok(d_max + 1)
        }
        Norm::L1 => {
            let mut cache: Option<(usize, QuadratureRule)> = None;
            for d in 0..=d_max {
                let order = 200.max(4 * d);
                let rule = match &cache {
                    Some((o, r)) if *o == order => r.clone(),
                    _ => {
                        let r = gauss_hermite_rule(order)?;
                        cache = Some((order, r.clone()));
                        r
                    }
                };
                let err = best_l1(f, d, &rule)?.error;
                if err < epsilon {
                    return Ok(d);
                }
            }
            Ok(d_max + 1)
        }
    }
}

/// The CSQ hard function: the high-degree tail of f, rescaled so its L2
/// norm is exactly 2/epsilon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsqHardFunction {
    /// G = C * (f minus its degree < d part).
    pub expansion: HermiteExpansion,
    pub scale: f64,
    pub tail_norm: f64,
    /// Whether the tail norm reaches epsilon (the regime where d is the
    /// minimal degree for L2 error epsilon); reported, not enforced.
    pub meets_eps_lower_bound: bool,
}

pub fn csq_hard_function(
    f: &TargetFunction,
    degree: usize,
    epsilon: f64,
    expansion_degree: u32,
    rule: &QuadratureRule,
) -> Result<CsqHardFunction> {
    if epsilon <= 0.0 {
        return Err(Error::parameter("epsilon must be positive".to_string()));
    }
    let e = expand_target(f, expansion_degree, rule)?;
    let tail = e.tail_from(degree as u32);
    let tail_norm = tail.l2_norm();
    if tail_norm < 1e-12 {
        return Err(Error::degenerate(format!(
            "target '{}' has no Hermite mass at degree >= {degree} \
             (tail norm {tail_norm:.3e})",
            f.id()
        )));
    }
    let scale = 2.0 / (epsilon * tail_norm);
    Ok(CsqHardFunction {
        expansion: tail.scale(scale),
        scale,
        tail_norm,
        meets_eps_lower_bound: tail_norm >= epsilon,
    })
}

/// Ordinary least squares of y on x: (slope, intercept, R^2).
pub fn fit_linear(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::parameter(
            "linear fit needs matched samples, at least two".to_string(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx < 1e-14 {
        return Err(Error::analysis("degenerate fit: no spread in x".to_string()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy < 1e-14 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok((slope, intercept, r2))
}

/// Log-log scaling of the minimum degree against 1/epsilon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub epsilons: Vec<f64>,
    pub degrees: Vec<usize>,
    /// Slope of log(degree) on log(1/epsilon); positive for growing degree.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Fit of degree on log^2(1/epsilon), for the sigmoid L2 regime.
    pub log_sq_slope: f64,
    pub log_sq_intercept: f64,
    pub log_sq_r_squared: f64,
}

pub fn scaling_fit(
    f: &TargetFunction,
    norm: Norm,
    epsilons: &[f64],
    d_max: usize,
) -> Result<ScalingFit> {
    if epsilons.len() < 4 {
        return Err(Error::parameter(
            "scaling fit needs at least 4 epsilon values".to_string(),
        ));
    }
    let lo = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().cloned().fold(0.0f64, f64::max);
    if !(lo > 0.0) || hi / lo < 4.0 {
        return Err(Error::parameter(
            "epsilon values must be positive and span a factor of at least 4".to_string(),
        ));
    }
    let mut degrees = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let d = min_degree(f, eps, norm, d_max)?;
        if d > d_max {
            return Err(Error::analysis(format!(
                "degree scan hit the cap d_max = {d_max} at epsilon = {eps}"
            )));
        }
        degrees.push(d);
    }
    if degrees.iter().all(|&d| d == degrees[0]) {
        return Err(Error::analysis(
            "degenerate fit: every epsilon produced the same degree".to_string(),
        ));
    }
    if degrees.iter().any(|&d| d == 0) {
        return Err(Error::analysis(
            "log fit undefined: a degree of zero appeared in the scan".to_string(),
        ));
    }
    let log_inv_eps: Vec<f64> = epsilons.iter().map(|&e| (1.0 / e).ln()).collect();
    let log_deg: Vec<f64> = degrees.iter().map(|&d| (d as f64).ln()).collect();
    let (slope, intercept, r_squared) = fit_linear(&log_inv_eps, &log_deg)?;
    let log_sq: Vec<f64> = log_inv_eps.iter().map(|v| v * v).collect();
    let deg_f: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let (s2, i2, r2) = fit_linear(&log_sq, &deg_f)?;
    Ok(ScalingFit {
        epsilons: epsilons.to_vec(),
        degrees,
        slope,
        intercept,
        r_squared,
        log_sq_slope: s2,
        log_sq_intercept: i2,
        log_sq_r_squared: r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_hermite_rule;

    fn rule200() -> QuadratureRule {
        gauss_hermite_rule(200).unwrap()
    }

    #[test]
    fn expand_target_sign_is_exact() {
        let rule = rule200();
        let e = expand_target(&TargetFunction::sign(), 7, &rule).unwrap();
        assert!((e.coefficient_uni(1) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        for j in [0u32, 2, 4, 6] {
            assert!(e.coefficient_uni(j).abs() < 1e-15);
        }
        // independent oracle: composite Simpson for c_3 = int sign H_3 phi
        let mut s = 0.0;
        let n = 40_000;
        let hi = 12.0;
        let h = hi / n as f64;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * gauss::hermite(3, x) * gauss::pdf(x);
        }
        let oracle = 2.0 * s * h / 3.0;
        assert!((e.coefficient_uni(3) - oracle).abs() < 1e-10);
    }

    #[test]
    fn expand_target_relu_matches_closed_forms() {
        let rule = rule200();
        let e = expand_target(&TargetFunction::relu(), 5, &rule).unwrap();
        assert!((e.coefficient_uni(0) - 1.0 / gauss::SQRT_2PI).abs() < 1e-14);
        assert!((e.coefficient_uni(1) - 0.5).abs() < 1e-14);
        assert!((e.coefficient_uni(2) - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-14);
        assert!(e.coefficient_uni(3).abs() < 1e-15);
        assert!(e.coefficient_uni(5).abs() < 1e-15);
    }

    #[test]
    fn expand_target_piecewise_matches_simpson_oracle() {
        let f = TargetFunction::piecewise_ptf(4, 0.5).unwrap();
        let rule = rule200();
        let e = expand_target(&f, 6, &rule).unwrap();
        for j in 0..=6usize {
            let mut oracle = 0.0;
            for (lo, hi) in f.ptf_intervals().unwrap() {
                let n = 20_000;
                let h = (hi - lo) / n as f64;
                let mut s = 0.0;
                for i in 0..=n {
                    let x = lo + i as f64 * h;
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    s += w * gauss::hermite(j, x) * gauss::pdf(x);
                }
                oracle += s * h / 3.0;
            }
            assert!(
                (e.coefficient_uni(j as u32) - oracle).abs() < 1e-10,
                "j={j}"
            );
        }
    }

    #[test]
    fn best_l2_sign_at_degree_zero() {
        let r = best_l2(&TargetFunction::sign(), 0, &rule200()).unwrap();
        assert!((r.error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_l2_relu_at_degree_one() {
        // closed form: sqrt(1/4 - 1/(2 pi))
        let r = best_l2(&TargetFunction::relu(), 1, &rule200()).unwrap();
        let truth = (0.25 - 1.0 / (2.0 * std::f64::consts::PI)).sqrt();
        assert!((r.error - truth).abs() < 1e-12, "{} vs {truth}", r.error);
    }

    #[test]
    fn best_l2_sigmoid_tail_identity() {
        // error^2 at degree 2 equals the sum of squared odd coefficients >= 3
        let rule = gauss_hermite_rule(200).unwrap();
        let e = expand_target(&TargetFunction::sigmoid(), 40, &rule).unwrap();
        let tail_sq: f64 = e
            .tail_from(3)
            .iter()
            .map(|(_, c)| c * c)
            .sum();
        let r = best_l2(&TargetFunction::sigmoid(), 2, &rule).unwrap();
        assert!((r.error.powi(2) - tail_sq).abs() < 1e-10);
    }

    #[test]
    fn best_l1_sign_degree_zero_returns_zero_constant() {
        let r = best_l1(&TargetFunction::sign(), 0, &rule200()).unwrap();
        assert!((r.error - 1.0).abs() < 1e-9);
        assert!(r.polynomial.coefficient_uni(0).abs() < 1e-9);
    }

    #[test]
    fn best_l1_beats_l2_for_relu_degree_one() {
        let rule = rule200();
        let l1 = best_l1(&TargetFunction::relu(), 1, &rule).unwrap();
        let l2 = best_l2(&TargetFunction::relu(), 1, &rule).unwrap();
        assert!(l1.error < l2.error);
    }

    #[test]
    fn best_l1_sign_degree_three_against_coarse_search() {
        // independent oracle: coarse grid search over the odd coefficients
        // (even ones vanish by symmetry), refined by the LP
        let rule = rule200();
        let fit = best_l1(&TargetFunction::sign(), 3, &rule).unwrap();
        let grid_l1 = |c1: f64, c3: f64| -> f64 {
            let terms: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| {
                    let p = c1 * gauss::hermite(1, x) + c3 * gauss::hermite(3, x);
                    w * (if x >= 0.0 { 1.0 } else { -1.0 } - p).abs()
                })
                .collect();
            pairwise_sum(&terms)
        };
        let mut coarse = f64::INFINITY;
        for i in 0..=60 {
            for j in 0..=40 {
                let c1 = i as f64 * 0.025;
                let c3 = -0.5 + j as f64 * 0.025;
                coarse = coarse.min(grid_l1(c1, c3));
            }
        }
        assert!(fit.error <= coarse + 1e-9, "{} vs coarse {coarse}", fit.error);
        assert!(fit.error >= coarse - 0.02);
        // sanity band for the recorded regression baseline
        assert!(fit.error > 0.2 && fit.error < 0.5, "{}", fit.error);
    }

    #[test]
    fn dual_witness_sign_degree_one_is_sign_itself() {
        let rule = rule200();
        let w = dual_witness(&TargetFunction::sign(), 1, &rule).unwrap();
        assert!((w.correlation - 1.0).abs() < 1e-9);
        assert!(w.max_moment_residual() < 1e-8);
        for (&x, &g) in w.nodes.iter().zip(&w.values) {
            assert!((g - if x >= 0.0 { 1.0 } else { -1.0 }).abs() < 1e-7);
        }
    }

    #[test]
    fn dual_witness_degree_zero_has_no_constraints() {
        let rule = rule200();
        let w = dual_witness(&TargetFunction::sign(), 0, &rule).unwrap();
        assert!((w.correlation - 1.0).abs() < 1e-9);
        assert!(w.moment_residuals.is_empty());
    }

    #[test]
    fn dual_witness_degree_two_matches_degree_one_fit() {
        let rule = rule200();
        let w = dual_witness(&TargetFunction::sign(), 2, &rule).unwrap();
        let fit = best_l1(&TargetFunction::sign(), 1, &rule).unwrap();
        assert!((w.correlation - fit.error).abs() < 1e-7);
        assert!(w.correlation < 1.0 - 1e-3);
        // Boolean identity: correlation = 1 - grid |f - g|_1
        let dist = w.grid_l1_distance(&TargetFunction::sign());
        assert!((w.correlation - (1.0 - dist)).abs() < 1e-10);
    }

    #[test]
    fn witness_certificates_hold() {
        let rule = rule200();
        for d in [1usize, 3, 5] {
            let w = dual_witness(&TargetFunction::sign(), d, &rule).unwrap();
            assert!(w.values.iter().all(|g| g.abs() <= 1.0 + 1e-12));
            assert!(w.max_moment_residual() <= 1e-8, "d={d}");
        }
    }

    #[test]
    fn duality_gap_small_for_sign() {
        let rule = gauss_hermite_rule(400).unwrap();
        for d in 1..=6usize {
            let gap = duality_gap(&TargetFunction::sign(), d, &rule).unwrap();
            assert!(gap <= 1e-6, "d={d}: gap {gap:.2e}");
        }
    }

    #[test]
    fn dual_witness_real_relu() {
        let rule = rule200();
        // no moment constraints: optimum is E|f| = E[relu] on the grid
        let out = dual_witness_real(&TargetFunction::relu(), 0, 0.1, &rule).unwrap();
        assert!(out.feasible);
        let grid_abs = expect(&rule, |x| x.max(0.0)).unwrap();
        assert!((out.witness.correlation - grid_abs).abs() < 1e-8);
        // zero target: infeasible for positive epsilon
        let zero = TargetFunction::custom(|_| 0.0, 1, RangeTag::Real, "zero");
        let out = dual_witness_real(&zero, 0, 0.1, &rule).unwrap();
        assert!(!out.feasible);
        assert!(out.witness.correlation.abs() < 1e-9);
    }

    #[test]
    fn csq_hard_function_sigmoid() {
        let rule = rule200();
        let h = csq_hard_function(&TargetFunction::sigmoid(), 2, 0.1, 40, &rule).unwrap();
        assert!((h.expansion.l2_norm() - 20.0).abs() < 1e-8);
        // constructed in coefficient space: low-degree parts are exactly zero
        assert!(h.expansion.truncate_below(2).is_empty());
        // single-coefficient example: f with expansion {(1): 1}, d = 1, eps = 0.5
        let lin = TargetFunction::custom(|x| x[0], 1, RangeTag::Real, "coordinate");
        let h = csq_hard_function(&lin, 1, 0.5, 10, &rule).unwrap();
        assert!((h.scale - 4.0).abs() < 1e-9);
        assert!((h.expansion.coefficient_uni(1) - 4.0).abs() < 1e-9);
        // relu at degree 3: coefficients below 3 are zero by construction
        let h = csq_hard_function(&TargetFunction::relu(), 3, 0.2, 30, &rule).unwrap();
        for j in 0..3u32 {
            assert!(h.expansion.coefficient_uni(j).abs() < 1e-12);
        }
    }

    #[test]
    fn csq_hard_function_degenerate_tail() {
        let rule = rule200();
        let lin = TargetFunction::custom(|x| x[0], 1, RangeTag::Real, "coordinate");
        assert!(matches!(
            csq_hard_function(&lin, 2, 0.1, 10, &rule),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn min_degree_basics() {
        // sigmoid L2 at eps 0.5: the constant 0.5 is already closer than 0.5
        let d = min_degree(&TargetFunction::sigmoid(), 0.5, Norm::L2, 10).unwrap();
        assert_eq!(d, 0);
        let d = min_degree(&TargetFunction::sign(), 1.01, Norm::L1, 10).unwrap();
        assert_eq!(d, 0);
        // unachieved scans return the sentinel
        let d = min_degree(&TargetFunction::sign(), 1e-6, Norm::L2, 3).unwrap();
        assert_eq!(d, 4);
    }

    #[test]
    fn l1_error_monotone_in_degree() {
        let rule = rule200();
        let mut last = f64::INFINITY;
        for d in 0..=8usize {
            let e = best_l1(&TargetFunction::sign(), d, &rule).unwrap().error;
            assert!(e <= last + 1e-9, "d={d}: {e} > {last}");
            last = e;
        }
    }

    #[test]
    fn norm_ordering_l1_below_l2() {
        let rule = rule200();
        for d in [0usize, 2, 5] {
            for f in [TargetFunction::sign(), TargetFunction::relu()] {
                let l1 = best_l1(&f, d, &rule).unwrap().error;
                let l2 = best_l2(&f, d, &rule).unwrap().error;
                assert!(l1 <= l2 + 1e-10, "{} d={d}: {l1} vs {l2}", f.id());
            }
        }
    }

    #[test]
    fn scaling_fit_on_synthetic_inverse_square() {
        // d = ceil(1/eps^2) gives slope 2 against log(1/eps)
        let eps: Vec<f64> = vec![0.5, 0.35, 0.25, 0.18, 0.125];
        let degrees: Vec<f64> = eps.iter().map(|e| (1.0 / (e * e)).ceil()).collect();
        let x: Vec<f64> = eps.iter().map(|e| (1.0 / e).ln()).collect();
        let y: Vec<f64> = degrees.iter().map(|d| d.ln()).collect();
        let (slope, _, r2) = fit_linear(&x, &y).unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
        assert!(r2 > 0.99);
    }

    #[test]
    fn rule_order_preconditions() {
        let small = gauss_hermite_rule(100).unwrap();
        assert!(matches!(
            best_l1(&TargetFunction::sign(), 1, &small),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            min_degree(&TargetFunction::sign(), 0.5, Norm::L1, 300),
            Err(Error::Parameter(_))
        ));
    }
}
