//! The end-to-end verification suite.
//!
//! Each criterion runs a self-contained experiment at pinned tolerances and
//! reports one pass/fail outcome with details; `run_all` drives all of them.
//! The same functions back the `acceptance` integration-test target and the
//! `all-acceptance` CLI subcommand.

use crate::approx::{
    best_l1, csq_hard_function, dual_witness, duality_gap, expand_target, min_degree,
    scaling_fit, Norm,
};
use crate::error::Result;
use crate::frames::{frame_family, median};
use crate::gauss;
use crate::hermite::{multi_indices, HermiteExpansion, MultiIndex};
use crate::instances::{
    correlation_bound_check, distinguish_boolean, planted_distribution, sq_dimension_estimate,
    Adversary, DistinguisherConfig, LabeledDistribution, OracleMode, Verdict,
};
use crate::learners::{evaluate, l2_regression, ErrorMetric, FeatureMap};
use crate::moment_match::{check_moments, ptf_separation, sample_scaled, MomentMatchSpec};
use crate::noise::{
    bk_identity_check, chebyshev_circle_interpolate, circle_symmetrization_check,
    filtering_identity_check, gns_estimate, gns_intersection_scan, structural_inequality_check,
    TrigPoly,
};
use crate::quadrature::{expect, gauss_hermite_rule, tensor_expect};
use crate::rng::{stream_rng, RunningStats};
use crate::targets::TargetFunction;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
    pub runtime_ms: u64,
}

impl CriterionOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:2} {:<22} {}  [{} ms]  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.runtime_ms,
            self.details.join("; ")
        )
    }
}

struct Clauses {
    items: Vec<(bool, String)>,
}

impl Clauses {
    fn new() -> Self {
        Clauses { items: Vec::new() }
    }

    fn check(&mut self, pass: bool, detail: String) {
        self.items.push((pass, detail));
    }

    fn finish(self, id: usize, name: &str, start: Instant) -> CriterionOutcome {
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed: self.items.iter().all(|(p, _)| *p),
            details: self
                .items
                .into_iter()
                .map(|(p, d)| format!("{} {}", if p { "ok:" } else { "FAIL:" }, d))
                .collect(),
            runtime_ms: start.elapsed().as_millis() as u64,
        }
    }
}

/// 1. Strong duality: dual LP optimum vs best-L1 LP optimum on a 400-node
/// grid for sign, d = 1..10, within 1e-6.
pub fn criterion_01_strong_duality() -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let rule = gauss_hermite_rule(400)?;
    let sign = TargetFunction::sign();
    let mut worst: f64 = 0.0;
    for d in 1..=10usize {
        worst = worst.max(duality_gap(&sign, d, &rule)?);
    }
    c.check(worst <= 1e-6, format!("max duality gap {worst:.2e} <= 1e-6"));
    Ok(c.finish(1, "strong duality", start))
}

/// 2. Sign degree scaling: log-log slope in [-2.4, -1.6] over the pinned
/// epsilon grid.
pub fn criterion_02_sign_degree_scaling() -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let fit = scaling_fit(
        &TargetFunction::sign(),
        Norm::L1,
        &[0.4, 0.3, 0.2, 0.15, 0.1],
        100,
    )?;
    let slope_vs_log_eps = -fit.slope;
    c.check(
        (-2.4..=-1.6).contains(&slope_vs_log_eps),
        format!(
            "slope {slope_vs_log_eps:.3} in [-2.4, -1.6] (degrees {:?})",
            fit.degrees
        ),
    );
    Ok(c.finish(2, "sign degree scaling", start))
}

/// 3. ReLU degrees: L2 slope in [-1.6, -1.1], L1 slope in [-1.3, -0.75].
pub fn criterion_03_relu_degrees() -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let relu = TargetFunction::relu();
    let l2 = scaling_fit(&relu, Norm::L2, &eps, 150)?;
    let l2_slope = -l2.slope;
    c.check(
        (-1.6..=-1.1).contains(&l2_slope),
        format!("L2 slope {l2_slope:.4} in [-1.6, -1.1] (degrees {:?})", l2.degrees),
    );
    let l1 = scaling_fit(&relu, Norm::L1, &eps, 100)?;
    let l1_slope = -l1.slope;
    c.check(
        (-1.3..=-0.75).contains(&l1_slope),
        format!("L1 slope {l1_slope:.4} in [-1.3, -0.75] (degrees {:?})", l1.degrees),
    );
    Ok(c.finish(3, "relu degrees", start))
}

/// 4. Sigmoid: L2 degree linear in log^2(1/eps) with R^2 >= 0.9; Hermite
/// coefficients c0 = 0.5, c2 = c4 = 0 within 1e-8; L1 min degree
/// non-decreasing and >= 2 at eps = 0.01.
pub fn criterion_04_sigmoid() -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let sigmoid = TargetFunction::sigmoid();
    let fit = scaling_fit(&sigmoid, Norm::L2, &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3], 100)?;
    c.check(
        fit.log_sq_r_squared >= 0.9,
        format!(
            "degree vs log^2(1/eps): R^2 {:.4} >= 0.9 (degrees {:?})",
            fit.log_sq_r_squared, fit.degrees
        ),
    );
    let rule = gauss_hermite_rule(200)?;
    let e = expand_target(&sigmoid, 6, &rule)?;
    let c0 = e.coefficient_uni(0);
    let c2 = e.coefficient_uni(2);
    let c4 = e.coefficient_uni(4);
    c.check(
        (c0 - 0.5).abs() <= 1e-8 && c2.abs() <= 1e-8 && c4.abs() <= 1e-8,
        format!("c0 = {c0:.10}, |c2| = {:.1e}, |c4| = {:.1e}", c2.abs(), c4.abs()),
    );
    let grid = [0.1, 0.05, 0.02, 0.01];
    let mut degrees = Vec::new();
    for &eps in &grid {
        degrees.push(min_degree(&sigmoid, eps, Norm::L1, 40)?);
    }
    let monotone = degrees.windows(2).all(|w| w[0] <= w[1]);
    c.check(
        monotone && degrees[3] >= 2,
        format!("L1 degrees {degrees:?} non-decreasing, d(0.01) >= 2"),
    );
    Ok(c.finish(4, "sigmoid degrees", start))
}

/// 5. Moment matching at d = 8 with 1e6 samples: acceptance rate 0.5 within
/// 0.002, every moment within 5 SE, gap mass <= 0.05 and smaller at d = 16.
pub fn criterion_05_moment_matching(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let spec8 = MomentMatchSpec::new(8, seed)?;
    let (samples8, stats8) = sample_scaled(&spec8, 1_000_000, seed)?;
    let report = check_moments(&spec8, &samples8, &stats8)?;
    c.check(
        (report.acceptance_rate - 0.5).abs() <= 0.002,
        format!("acceptance rate {:.5}", report.acceptance_rate),
    );
    let mut all_ok = true;
    for (j, ((m, se), r)) in report.moments.iter().zip(&report.reference).enumerate() {
        if (m - r).abs() > 5.0 * se.max(1e-9) {
            all_ok = false;
            c.check(false, format!("moment {}: {m:.4} vs {r} (se {se:.1e})", j + 1));
        }
    }
    if all_ok {
        c.check(true, "all 8 moments within 5 SE".to_string());
    }
    c.check(
        report.gap_mass <= 0.05,
        format!("gap mass(d=8) {:.5} <= 0.05", report.gap_mass),
    );
    let spec16 = MomentMatchSpec::new(16, seed.wrapping_add(1))?;
    let (samples16, stats16) = sample_scaled(&spec16, 1_000_000, seed.wrapping_add(1))?;
    let report16 = check_moments(&spec16, &samples16, &stats16)?;
    c.check(
        report16.gap_mass < report.gap_mass,
        format!("gap mass(d=16) {:.2e} < gap mass(d=8) {:.2e}", report16.gap_mass, report.gap_mass),
    );
    Ok(c.finish(5, "moment matching", start))
}

/// 6. PTF separation at k = 4, d = 64: the measured expectation gap against
/// the 0.05 threshold, and the certified lower bound against the continuous
/// L1 error of the degree-64 LP fit.
pub fn criterion_06_ptf_separation(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let (sep, target) = ptf_separation(4, 64, 1_000_000, seed)?;
    let sigma = sep.e_matched_se;
    c.check(
        sep.gap - 3.0 * sigma >= 0.05,
        format!(
            "gap {:.5} (3 sigma {:.5}) >= 0.05 [E_N = {:.5}, a = {:.5}, t = {}]",
            sep.gap,
            3.0 * sigma,
            sep.e_null,
            sep.a,
            sep.t
        ),
    );
    // the certified inequality E_N[f] - E_D[f] <= E_N[|f - p|] for the
    // degree-64 fit, with the L1 error on the continuous measure (the grid
    // measure has no nodes inside the on-intervals)
    let rule = gauss_hermite_rule(256)?;
    let fitted = best_l1(&target, 64, &rule)?;
    let mut rng = stream_rng(seed, 0x7063_6f6e);
    let mut err = RunningStats::new();
    for _ in 0..1_000_000 {
        let x: f64 = StandardNormal.sample(&mut rng);
        let p = fitted.polynomial.eval(&[x])?;
        err.push((target.eval1(x) - p).abs());
    }
    let margin = 3.0 * (sigma + err.std_error());
    c.check(
        err.mean() >= sep.gap - margin,
        format!(
            "continuous |f - p|_1 {:.5} >= gap {:.5} - margin {:.5} (grid error {:.2e})",
            err.mean(),
            sep.gap,
            margin,
            fitted.error
        ),
    );
    Ok(c.finish(6, "ptf separation", start))
}

/// 7. Frames: orthonormality residuals, maximum pairwise cross norm, and
/// the n-doubling shrink factor of median cross norms.
pub fn criterion_07_frames(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let fam = frame_family(4, 400, 64, seed)?;
    c.check(
        fam.max_orthonormality_residual <= 1e-10,
        format!("max orthonormality residual {:.2e}", fam.max_orthonormality_residual),
    );
    c.check(
        fam.max_cross_frobenius <= 0.5,
        format!("max pairwise |UV'|_F {:.4} <= 0.5", fam.max_cross_frobenius),
    );
    let mut small = Vec::new();
    let mut large = Vec::new();
    for s in 0..30u64 {
        small.extend(frame_family(2, 128, 8, seed.wrapping_add(100 + s))?.cross_frobenius);
        large.extend(frame_family(2, 256, 8, seed.wrapping_add(100 + s))?.cross_frobenius);
    }
    let ratio = median(&small) / median(&large);
    c.check(
        (1.2..=1.7).contains(&ratio),
        format!("median shrink factor {ratio:.3} in [1.2, 1.7]"),
    );
    Ok(c.finish(7, "frames", start))
}

/// 8. Correlation lemma: H4 closed-form equality at m = 1, and the bound on
/// random band-pass expansions at m = 2 over 20 frame pairs.
pub fn criterion_08_correlation_lemma(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let g4 = HermiteExpansion::from_coefficients(1, vec![(MultiIndex::uni(4), 1.0)])?;
    let fam = frame_family(1, 100, 2, seed)?;
    let (u, v) = (&fam.frames[0], &fam.frames[1]);
    let rho: f64 = u.rows[0].iter().zip(&v.rows[0]).map(|(a, b)| a * b).sum();
    let check = correlation_bound_check(&g4, u, v, 4, 1_000_000, seed)?;
    c.check(
        (check.lhs - rho.powi(4)).abs() <= 5.0 * check.lhs_se,
        format!(
            "H4 equality: lhs {:.3e} vs <u,v>^4 {:.3e} (5 SE {:.1e})",
            check.lhs,
            rho.powi(4),
            5.0 * check.lhs_se
        ),
    );
    let mut rng = stream_rng(seed, 0x6338_6270);
    let fam2 = frame_family(2, 100, 40, seed.wrapping_add(7))?;
    let mut all = true;
    let mut worst_slack = f64::INFINITY;
    for pair in 0..20 {
        let indices: Vec<MultiIndex> = multi_indices(2, 5)
            .into_iter()
            .filter(|j| j.total_degree() >= 4)
            .collect();
        let entries: Vec<(MultiIndex, f64)> = indices
            .into_iter()
            .map(|j| (j, rng.gen_range(-1.0..1.0)))
            .collect();
        let g = HermiteExpansion::from_coefficients(2, entries)?;
        let u = &fam2.frames[2 * pair];
        let v = &fam2.frames[2 * pair + 1];
        let check = correlation_bound_check(&g, u, v, 4, 200_000, seed.wrapping_add(pair as u64))?;
        worst_slack = worst_slack.min(check.rhs + 5.0 * check.lhs_se - check.lhs);
        if !check.holds {
            all = false;
            c.check(false, format!("pair {pair}: lhs {:.3e} > rhs {:.3e}", check.lhs, check.rhs));
        }
    }
    if all {
        c.check(
            true,
            format!("band-pass bound holds on 20 pairs (min slack {worst_slack:.2e})"),
        );
    }
    Ok(c.finish(8, "correlation lemma", start))
}

/// 9. Distinguisher: 10/10 planted verdicts with a degree-4 learner, probe
/// polynomials of degree 3 see only the interpolation residual, null runs
/// are never flagged under the TowardNull adversary.
pub fn criterion_09_distinguisher(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let rule = gauss_hermite_rule(200)?;
    let witness = Arc::new(dual_witness(&TargetFunction::sign(), 4, &rule)?);
    let epsilon = witness.correlation / 2.0;
    let n = 50;
    let mut planted_ok = 0;
    let mut probe_ok = 0;
    for trial in 0..10u64 {
        let fam = frame_family(1, n, 1, seed.wrapping_add(trial))?;
        let frame = Arc::new(fam.frames[0].clone());
        let dist = planted_distribution(witness.clone(), frame.clone())?;
        let config = DistinguisherConfig {
            frame: frame.clone(),
            learner_degree: 4,
            n_train: 20_000,
            final_query_mode: OracleMode::Analytic,
            adversary: Adversary::TowardNull,
        };
        let out = distinguish_boolean(&config, &dist, epsilon, seed.wrapping_add(1000 + trial))?;
        if out.verdict == Verdict::Planted {
            planted_ok += 1;
        }
        // degree-3 probe: fitted polynomial's label correlation is bounded
        // by sampling noise plus the witness interpolation budget
        let mut rng = stream_rng(seed.wrapping_add(2000 + trial), 1);
        let train = dist.sample_n(20_000, &mut rng);
        let (probe, _) = l2_regression(&train, 3, &FeatureMap::Projected(frame.clone()))?;
        let mut eval_rng = stream_rng(seed.wrapping_add(3000 + trial), 2);
        let fresh = dist.sample_n(100_000, &mut eval_rng);
        let report = evaluate(&probe, &fresh, ErrorMetric::L2)?;
        let budget = 5.0 * report.correlation_se
            + probe.coefficient_l1_norm() * witness.max_interp_residual();
        if report.label_correlation.abs() <= budget {
            probe_ok += 1;
        } else {
            c.check(
                false,
                format!(
                    "trial {trial}: probe correlation {:.4} exceeds budget {:.4}",
                    report.label_correlation, budget
                ),
            );
        }
    }
    c.check(planted_ok == 10, format!("planted verdicts {planted_ok}/10"));
    if probe_ok == 10 {
        c.check(true, "degree-3 probes within residual budget 10/10".to_string());
    }
    let mut null_ok = 0;
    for trial in 0..10u64 {
        let fam = frame_family(1, n, 1, seed.wrapping_add(500 + trial))?;
        let frame = Arc::new(fam.frames[0].clone());
        let config = DistinguisherConfig {
            frame,
            learner_degree: 4,
            n_train: 20_000,
            final_query_mode: OracleMode::Analytic,
            adversary: Adversary::TowardNull,
        };
        let null = LabeledDistribution::Null { n };
        let out = distinguish_boolean(&config, &null, epsilon, seed.wrapping_add(4000 + trial))?;
        if out.verdict == Verdict::Null {
            null_ok += 1;
        }
    }
    c.check(null_ok == 10, format!("null never flagged: {null_ok}/10"));
    Ok(c.finish(9, "distinguisher", start))
}

/// 10. GNS of halfspace intersections: strictly increasing in k with
/// GNS(256)/GNS(4) >= 1.3 under common random numbers, plus the arccos
/// closed form for a single halfspace at five noise levels.
pub fn criterion_10_gns(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let rows = gns_intersection_scan(&[4, 16, 64, 256], 0.02, 1_000_000, seed)?;
    let increasing = rows.windows(2).all(|w| w[0].gns < w[1].gns);
    let ratio = rows[3].gns / rows[0].gns;
    c.check(
        increasing,
        format!(
            "strictly increasing: {:?}",
            rows.iter().map(|r| (r.k, r.gns)).collect::<Vec<_>>()
        ),
    );
    c.check(ratio >= 1.3, format!("GNS(256)/GNS(4) = {ratio:.3} >= 1.3"));
    let sign = TargetFunction::sign();
    let mut closed_ok = true;
    for (i, rho) in [0.02f64, 0.05, 0.1, 0.2, 0.5].iter().enumerate() {
        let est = gns_estimate(&sign, *rho, 1_000_000, seed.wrapping_add(i as u64))?;
        let truth = (1.0 - rho).acos() / std::f64::consts::PI;
        if (est.mean - truth).abs() > 5.0 * est.std_error {
            closed_ok = false;
            c.check(false, format!("rho {rho}: {:.5} vs {truth:.5}", est.mean));
        }
    }
    if closed_ok {
        c.check(true, "arccos closed form matched at 5 noise levels".to_string());
    }
    Ok(c.finish(10, "gns scan", start))
}

/// 11. Structural inequality at 5 SE for sign against its best L1
/// polynomials of degree 2, 5, 10 and eps in {0.01, 0.05}.
pub fn criterion_11_structural(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let rule = gauss_hermite_rule(200)?;
    let sign = TargetFunction::sign();
    let mut all = true;
    for (i, &d) in [2usize, 5, 10].iter().enumerate() {
        let fit = best_l1(&sign, d, &rule)?;
        for (j, &eps) in [0.01f64, 0.05].iter().enumerate() {
            let check = structural_inequality_check(
                &sign,
                &fit.polynomial,
                eps,
                1_000_000,
                seed.wrapping_add((i * 2 + j) as u64),
            )?;
            if !check.holds {
                all = false;
                c.check(
                    false,
                    format!("d={d} eps={eps}: lhs {:.4} < rhs {:.4}", check.lhs, check.rhs),
                );
            }
        }
    }
    if all {
        c.check(true, "holds for d in {2,5,10} x eps in {0.01,0.05}".to_string());
    }
    Ok(c.finish(11, "structural inequality", start))
}

/// 12. Circle identities on 50 randomized instances plus the symmetrization
/// inequality over 50 random circles for sign at degree 10.
pub fn criterion_12_circle(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let mut rng = stream_rng(seed, 0x6369_3132);
    let mut worst_bk: f64 = 0.0;
    let mut worst_filter: f64 = 0.0;
    for trial in 0..50usize {
        let d = 20usize;
        let a: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = TrigPoly::from_real(&a, &b)?;
        let k = [3usize, 5, 7, 9][trial % 4];
        let t = rng.gen_range(0.02..0.15);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let q = chebyshev_circle_interpolate(|z| p.eval(z), t, phi, k)?;
        let bk = bk_identity_check(&q)?;
        worst_bk = worst_bk.max(bk.relative_error);
        worst_filter = worst_filter.max(filtering_identity_check(&q)?);
    }
    c.check(
        worst_bk <= 1e-8,
        format!("b_k identity: worst residual {worst_bk:.2e} <= 1e-8 (50 instances)"),
    );
    c.check(
        worst_filter <= 1e-8,
        format!("filtering identity: worst residual {worst_filter:.2e} <= 1e-8"),
    );
    let rule = gauss_hermite_rule(200)?;
    let fit = best_l1(&TargetFunction::sign(), 10, &rule)?;
    let sym = circle_symmetrization_check(
        &TargetFunction::sign(),
        &fit.polynomial,
        10,
        50,
        seed.wrapping_add(9),
    )?;
    c.check(
        sym.holds,
        format!(
            "symmetrization: lhs {:.4} >= (pi/k) crossing {:.4} at 5 SE (k={}, t={:.4})",
            sym.lhs, sym.rhs, sym.k, sym.t
        ),
    );
    Ok(c.finish(12, "circle identities", start))
}

/// 13. CSQ hard class from the sigmoid tail at d = 2, eps = 0.1: norms
/// pinned at 2/eps, measured pairwise correlations below the spectral bound,
/// and the implied query-count estimate.
pub fn criterion_13_csq(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();
    let rule = gauss_hermite_rule(200)?;
    let hard = csq_hard_function(&TargetFunction::sigmoid(), 2, 0.1, 40, &rule)?;
    let count = 32usize;
    let n = 100usize;
    let fam = frame_family(1, n, count, seed)?;
    let norm = hard.expansion.l2_norm();
    c.check(
        (norm - 20.0).abs() <= 1e-6 && fam.max_orthonormality_residual <= 1e-10,
        format!(
            "|G|_2 = {norm:.9} (= 2/eps for every frame; rotations exact to {:.1e})",
            fam.max_orthonormality_residual
        ),
    );
    // one-pass pairwise estimates with shared samples
    let n_mc = 100_000usize;
    let mut rng = stream_rng(seed, 0x6373_7131);
    let mut stats = vec![RunningStats::new(); count * count];
    let mut g_vals = vec![0.0f64; count];
    for _ in 0..n_mc {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        for (i, frame) in fam.frames.iter().enumerate() {
            g_vals[i] = hard.expansion.eval(&frame.apply(&x))?;
        }
        for i in 0..count {
            for j in (i + 1)..count {
                stats[i * count + j].push(g_vals[i] * g_vals[j]);
            }
        }
    }
    let mut all = true;
    let mut max_measured: f64 = 0.0;
    let mut pair_idx = 0usize;
    for i in 0..count {
        for j in (i + 1)..count {
            let s = &stats[i * count + j];
            let spectral = fam.cross_spectral[pair_idx];
            pair_idx += 1;
            let bound = 400.0 * spectral * spectral;
            max_measured = max_measured.max(s.mean().abs());
            if s.mean().abs() > bound + 5.0 * s.std_error() {
                all = false;
                c.check(
                    false,
                    format!("pair ({i},{j}): |{:.3}| > bound {:.3}", s.mean(), bound),
                );
            }
        }
    }
    if all {
        c.check(
            true,
            format!("pairwise |E[G_U G_V]| <= 400 |UV'|_2^2 + 5 SE on 496 pairs (max {max_measured:.3})"),
        );
    }
    // implied query bound from the measured correlations
    let mut matrix = vec![vec![0.0; count]; count];
    let mut gamma: f64 = 0.0;
    let mut k = 0usize;
    for i in 0..count {
        matrix[i][i] = norm * norm;
        for j in (i + 1)..count {
            let v = stats[i * count + j].mean();
            let pad = 5.0 * stats[i * count + j].std_error();
            matrix[i][j] = v;
            matrix[j][i] = v;
            gamma = gamma.max(v.abs() + pad);
            k += 1;
        }
    }
    let _ = k;
    let est = sq_dimension_estimate(&matrix, gamma, norm * norm + 1e-9)?;
    c.check(
        est.implied_queries.is_finite() && est.implied_queries > 0.0,
        format!(
            "implied query bound {:.3e} at gamma {:.3}, beta {:.0}, s = {count}",
            est.implied_queries, est.gamma, est.beta
        ),
    );
    Ok(c.finish(13, "csq hard class", start))
}

/// Exact Gaussian L1 norm of a univariate polynomial via sign changes and
/// interval moments.
fn exact_l1_norm(p: &HermiteExpansion) -> f64 {
    let grid = 4800;
    let (lo, hi) = (-12.0f64, 12.0);
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_v = p.eval(&[lo]).unwrap();
    for i in 1..=grid {
        let x = lo + (hi - lo) * i as f64 / grid as f64;
        let v = p.eval(&[x]).unwrap();
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v.signum() != v.signum() && v != 0.0 {
            let (mut a, mut b) = (prev_x, x);
            let (mut fa, _) = (prev_v, v);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = p.eval(&[m]).unwrap();
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa.signum() == fm.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    let mut cuts = vec![f64::NEG_INFINITY];
    cuts.extend(roots);
    cuts.push(f64::INFINITY);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut seg = 0.0;
        for (idx, coef) in p.iter() {
            seg += coef * gauss::interval_moment(idx.0[0] as usize, a, b);
        }
        total += seg.abs();
    }
    total
}

/// 14. Property suites: quadrature exactness, Hermite orthonormality and
/// Parseval, the harmonic gradient identity, hypercontractivity, and norm
/// interpolation, all at their stated tolerances.
pub fn criterion_14_property_suites(seed: u64) -> Result<CriterionOutcome> {
    let start = Instant::now();
    let mut c = Clauses::new();

    // quadrature exactness
    let mut worst: f64 = 0.0;
    for order in 1..=40usize {
        let rule = gauss_hermite_rule(order)?;
        for j in 0..=(2 * order - 1) {
            let target = if j == 0 { 1.0 } else { 0.0 };
            worst = worst.max((expect(&rule, |x| gauss::hermite(j, x))? - target).abs());
        }
    }
    c.check(worst <= 1e-9, format!("quadrature exactness: worst {worst:.2e}"));

    // orthonormality
    let rule64 = gauss_hermite_rule(64)?;
    let mut worst: f64 = 0.0;
    for i in 0..=30usize {
        for j in i..=30usize {
            let target = if i == j { 1.0 } else { 0.0 };
            let v = expect(&rule64, |x| gauss::hermite(i, x) * gauss::hermite(j, x))?;
            worst = worst.max((v - target).abs());
        }
    }
    c.check(worst <= 1e-9, format!("orthonormality: worst {worst:.2e}"));

    // Parseval on random band-limited expansions
    let rule16 = gauss_hermite_rule(16)?;
    let mut rng = stream_rng(seed, 0x7073_7631);
    let mut worst: f64 = 0.0;
    for m in 1..=3usize {
        for _ in 0..4 {
            let entries: Vec<(MultiIndex, f64)> = multi_indices(m, 8.min(10 - 2 * m as u32))
                .into_iter()
                .map(|j| (j, rng.gen_range(-1.0..1.0)))
                .collect();
            let e = HermiteExpansion::from_coefficients(m, entries)?;
            let sq = tensor_expect(&rule16, m, |x| {
                let v = e.eval(x).unwrap();
                v * v
            })?;
            worst = worst.max((sq - e.l2_norm().powi(2)).abs());
        }
    }
    c.check(worst <= 1e-8, format!("Parseval: worst {worst:.2e}"));

    // harmonic gradient identity by central finite differences
    let mut worst: f64 = 0.0;
    for m in 1..=3usize {
        for k in 1..=4usize {
            let level: Vec<MultiIndex> = multi_indices(m, k as u32)
                .into_iter()
                .filter(|j| j.total_degree() == k as u32)
                .collect();
            let p_entries: Vec<(MultiIndex, f64)> = level
                .iter()
                .cloned()
                .map(|j| (j, rng.gen_range(-1.0..1.0)))
                .collect();
            let q_entries: Vec<(MultiIndex, f64)> = level
                .iter()
                .cloned()
                .map(|j| (j, rng.gen_range(-1.0..1.0)))
                .collect();
            let p = HermiteExpansion::from_coefficients(m, p_entries)?;
            let q = HermiteExpansion::from_coefficients(m, q_entries)?;
            // inner product of k-th derivative tensors; the tensors are
            // constant so the expansion point is arbitrary
            let h = 0.25;
            let mut inner = 0.0;
            let mut dirs = vec![0usize; k];
            let combos = m.pow(k as u32);
            for flat in 0..combos {
                let mut rem = flat;
                for slot in dirs.iter_mut() {
                    *slot = rem % m;
                    rem /= m;
                }
                let deriv = |f: &HermiteExpansion| -> f64 {
                    let mut acc = 0.0;
                    for signs in 0..(1usize << k) {
                        let mut x = vec![0.0f64; m];
                        let mut parity = 1.0;
                        for (slot, &dir) in dirs.iter().enumerate() {
                            let s = if (signs >> slot) & 1 == 1 { 1.0 } else { -1.0 };
                            if s < 0.0 {
                                parity = -parity;
                            }
                            x[dir] += s * h;
                        }
                        acc += parity * f.eval(&x).unwrap();
                    }
                    acc / (2.0 * h).powi(k as i32)
                };
                inner += deriv(&p) * deriv(&q);
            }
            let expectation = tensor_expect(&rule16, m, |x| {
                p.eval(x).unwrap() * q.eval(x).unwrap()
            })?;
            let factorial: f64 = (1..=k).map(|v| v as f64).product();
            let rel = (inner - factorial * expectation).abs()
                / (factorial * expectation).abs().max(1e-6);
            worst = worst.max(rel);
        }
    }
    c.check(
        worst <= 1e-3,
        format!("harmonic gradient identity: worst relative {worst:.2e}"),
    );

    // hypercontractivity and norm interpolation on random univariate polys
    let rule64 = gauss_hermite_rule(64)?;
    let mut worst_hc = f64::NEG_INFINITY;
    let mut worst_ni = f64::NEG_INFINITY;
    for _ in 0..20 {
        let d = rng.gen_range(1..=6usize);
        let coeffs: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = HermiteExpansion::from_univariate(&coeffs);
        let l2 = p.l2_norm();
        let l4 = expect(&rule64, |x| p.eval(&[x]).unwrap().powi(4))?.powf(0.25);
        worst_hc = worst_hc.max(l4 - 3f64.powf(d as f64 / 2.0) * l2);
        let l1 = exact_l1_norm(&p);
        worst_ni = worst_ni.max(l2 - l1.powf(1.0 / 3.0) * l4.powf(2.0 / 3.0));
    }
    c.check(
        worst_hc <= 1e-8,
        format!("hypercontractivity |p|_4 <= 3^(d/2)|p|_2: worst excess {worst_hc:.2e}"),
    );
    c.check(
        worst_ni <= 1e-8,
        format!("norm interpolation |r|_2 <= |r|_1^(1/3)|r|_4^(2/3): worst excess {worst_ni:.2e}"),
    );
    Ok(c.finish(14, "property suites", start))
}

/// Runs every criterion in order.
pub fn run_all(seed: u64) -> Result<Vec<CriterionOutcome>> {
    Ok(vec![
        criterion_01_strong_duality()?,
        criterion_02_sign_degree_scaling()?,
        criterion_03_relu_degrees()?,
        criterion_04_sigmoid()?,
        criterion_05_moment_matching(seed)?,
        criterion_06_ptf_separation(seed)?,
        criterion_07_frames(seed)?,
        criterion_08_correlation_lemma(seed)?,
        criterion_09_distinguisher(seed)?,
        criterion_10_gns(seed)?,
        criterion_11_structural(seed)?,
        criterion_12_circle(seed)?,
        criterion_13_csq(seed)?,
        criterion_14_property_suites(seed)?,
    ])
}
