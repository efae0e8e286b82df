//! Multivariate normalized Hermite expansions.
//!
//! A function in L2 of the m-dimensional Gaussian is represented by a sparse
//! map from multi-indices J to coefficients c(J) on the orthonormal basis
//! H_J(x) = prod_i H_{J_i}(x_i). Multi-indices are ordered graded
//! lexicographically (total degree first, then entry-wise), which fixes
//! serialization and iteration order everywhere.

use crate::error::{Error, Result};
use crate::gauss::{hermite, hermite_values};
use crate::quadrature::{normal_sampler, QuadratureRule};
use crate::rng::{pairwise_sum, stream_rng};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Coefficients with absolute value at or below this are dropped after
/// arithmetic, keeping tails honest without ballooning storage.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// A multi-index J in N^m with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// Univariate index of the given degree.
    pub fn uni(j: u32) -> Self {
        MultiIndex(vec![j])
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices in dimension m with total degree at most max_degree,
/// in graded-lexicographic order.
pub fn multi_indices(m: usize, max_degree: u32) -> Vec<MultiIndex> {
    fn fill(out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>, remaining: u32, slots: usize) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=remaining {
            prefix.push(v);
            fill(out, prefix, remaining - v, slots - 1);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    for t in 0..=max_degree {
        let mut level = Vec::new();
        fill(&mut level, &mut Vec::new(), t, m);
        level.sort();
        all.extend(level.into_iter().map(MultiIndex));
    }
    all
}

/// Sparse Hermite expansion over N_m.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    dimension: usize,
    max_degree: u32,
    coefficients: BTreeMap<MultiIndex, f64>,
}

impl HermiteExpansion {
    pub fn zero(dimension: usize, max_degree: u32) -> Self {
        HermiteExpansion {
            dimension,
            max_degree,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn from_coefficients(
        dimension: usize,
        entries: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        let mut max_degree = 0;
        for (idx, c) in entries {
            if idx.dimension() != dimension {
                return Err(Error::parameter(format!(
                    "multi-index {:?} has dimension {}, expansion is {dimension}-dimensional",
                    idx.0,
                    idx.dimension()
                )));
            }
            max_degree = max_degree.max(idx.total_degree());
            if c.abs() > DROP_TOLERANCE {
                coefficients.insert(idx, c);
            }
        }
        Ok(HermiteExpansion {
            dimension,
            max_degree,
            coefficients,
        })
    }

    /// Univariate expansion from a dense coefficient slice c[j] on H_j.
    pub fn from_univariate(coeffs: &[f64]) -> Self {
        let entries = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| (MultiIndex::uni(j as u32), c));
        Self::from_coefficients(1, entries).expect("univariate indices are 1-dimensional")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> f64 {
        self.coefficients.get(idx).copied().unwrap_or(0.0)
    }

    /// Univariate coefficient shorthand.
    pub fn coefficient_uni(&self, j: u32) -> f64 {
        self.coefficient(&MultiIndex::uni(j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.coefficients.iter().map(|(k, &v)| (k, v))
    }

    pub fn n_terms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Pointwise evaluation via one recurrence pass per axis.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::parameter(format!(
                "point has dimension {}, expansion expects {}",
                x.len(),
                self.dimension
            )));
        }
        let tables: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| hermite_values(self.max_degree as usize, xi))
            .collect();
        let mut total = 0.0;
        for (idx, c) in self.coefficients.iter() {
            let mut prod = *c;
            for (axis, &j) in idx.0.iter().enumerate() {
                prod *= tables[axis][j as usize];
            }
            total += prod;
        }
        Ok(total)
    }

    /// Parseval norm sqrt(sum of squared coefficients).
    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .values()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// Terms of total degree exactly t.
    pub fn degree_part(&self, t: u32) -> HermiteExpansion {
        let coefficients = self
            .coefficients
            .iter()
            .filter(|(idx, _)| idx.total_degree() == t)
            .map(|(idx, &c)| (idx.clone(), c))
            .collect();
        HermiteExpansion {
            dimension: self.dimension,
            max_degree: self.max_degree,
            coefficients,
        }
    }

    /// Terms with total degree strictly below d.
    pub fn truncate_below(&self, d: u32) -> HermiteExpansion {
        let coefficients = self
            .coefficients
            .iter()
            .filter(|(idx, _)| idx.total_degree() < d)
            .map(|(idx, &c)| (idx.clone(), c))
            .collect();
        HermiteExpansion {
            dimension: self.dimension,
            max_degree: self.max_degree,
            coefficients,
        }
    }

    /// Terms with total degree at least d; together with `truncate_below`
    /// this partitions the expansion.
    pub fn tail_from(&self, d: u32) -> HermiteExpansion {
        let coefficients = self
            .coefficients
            .iter()
            .filter(|(idx, _)| idx.total_degree() >= d)
            .map(|(idx, &c)| (idx.clone(), c))
            .collect();
        HermiteExpansion {
            dimension: self.dimension,
            max_degree: self.max_degree,
            coefficients,
        }
    }

    /// Terms with total degree at most d.
    pub fn truncate_at(&self, d: u32) -> HermiteExpansion {
        self.truncate_below(d + 1)
    }

    pub fn scale(&self, factor: f64) -> HermiteExpansion {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(idx, &c)| (idx.clone(), c * factor))
            .filter(|(_, c)| c.abs() > DROP_TOLERANCE)
            .collect();
        HermiteExpansion {
            dimension: self.dimension,
            max_degree: self.max_degree,
            coefficients,
        }
    }

    pub fn add(&self, other: &HermiteExpansion) -> Result<HermiteExpansion> {
        if self.dimension != other.dimension {
            return Err(Error::parameter(
                "cannot add expansions of different dimensions".to_string(),
            ));
        }
        let mut coefficients = self.coefficients.clone();
        for (idx, &c) in other.coefficients.iter() {
            *coefficients.entry(idx.clone()).or_insert(0.0) += c;
        }
        coefficients.retain(|_, c| c.abs() > DROP_TOLERANCE);
        Ok(HermiteExpansion {
            dimension: self.dimension,
            max_degree: self.max_degree.max(other.max_degree),
            coefficients,
        })
    }
}

/// Product of univariate normalized Hermite values H_J(x).
pub fn multi_hermite_eval(idx: &MultiIndex, x: &[f64]) -> Result<f64> {
    if idx.dimension() != x.len() {
        return Err(Error::parameter(format!(
            "multi-index dimension {} does not match point dimension {}",
            idx.dimension(),
            x.len()
        )));
    }
    Ok(idx
        .0
        .iter()
        .zip(x)
        .map(|(&j, &xi)| hermite(j as usize, xi))
        .product())
}

/// Hermite coefficients of f up to total degree max_degree by full tensor
/// quadrature; quadrature-exact when f is a polynomial of degree at most
/// 2*order - 1 - max_degree.
pub fn expand(
    f: impl Fn(&[f64]) -> f64,
    m: usize,
    max_degree: u32,
    rule: &QuadratureRule,
) -> Result<HermiteExpansion> {
    if m == 0 || m > 4 {
        return Err(Error::parameter(format!(
            "expand supports dimensions 1..=4 on the quadrature path, got {m}; \
             use expand_mc for higher dimensions"
        )));
    }
    if rule.order < max_degree as usize + 5 {
        return Err(Error::parameter(format!(
            "rule order {} too small for max_degree {max_degree}; need at least {}",
            rule.order,
            max_degree as usize + 5
        )));
    }
    let q = rule.order;
    let grid_points = (q as f64).powi(m as i32);
    if grid_points > 1e7 {
        return Err(Error::resource(format!(
            "tensor grid of {grid_points:.0} points exceeds 1e7"
        )));
    }

    // evaluate f once per grid point, then accumulate every coefficient
    let count = q.pow(m as u32);
    let mut fw = Vec::with_capacity(count);
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0f64; m];
    for flat in 0..count {
        let mut rem = flat;
        let mut w = 1.0;
        for k in 0..m {
            idx[k] = rem % q;
            rem /= q;
            x[k] = rule.nodes[idx[k]];
            w *= rule.weights[idx[k]];
        }
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::evaluation(format!(
                "integrand returned {v} at grid point {x:?}"
            )));
        }
        fw.push(w * v);
    }
    // per-axis Hermite tables: tables[axis][node][degree]
    let tables: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| {
            rule.nodes
                .iter()
                .map(|&xi| hermite_values(max_degree as usize, xi))
                .collect()
        })
        .collect();

    let indices = multi_indices(m, max_degree);
    let mut entries = Vec::with_capacity(indices.len());
    let mut terms = vec![0.0f64; count];
    for j in indices {
        for flat in 0..count {
            let mut rem = flat;
            let mut h = 1.0;
            for k in 0..m {
                let node = rem % q;
                rem /= q;
                h *= tables[k][node][j.0[k] as usize];
            }
            terms[flat] = fw[flat] * h;
        }
        entries.push((j, pairwise_sum(&terms)));
    }
    HermiteExpansion::from_coefficients(m, entries)
}

/// Monte Carlo expansion path for dimensions above the tensor-grid limit;
/// one shared sample set serves every coefficient, so estimates are
/// correlated but each has standard error ~ ||f||_2 / sqrt(n).
pub fn expand_mc(
    f: impl Fn(&[f64]) -> f64,
    m: usize,
    max_degree: u32,
    n_samples: usize,
    seed: u64,
) -> Result<HermiteExpansion> {
    if n_samples < 100 {
        return Err(Error::parameter(
            "expand_mc needs at least 100 samples".to_string(),
        ));
    }
    let sampler = normal_sampler(m);
    let mut rng = stream_rng(seed, 0);
    let indices = multi_indices(m, max_degree);
    let mut sums = vec![0.0f64; indices.len()];
    for s in 0..n_samples {
        let x = sampler(&mut rng);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::evaluation(format!(
                "integrand returned {v} at sample {s}"
            )));
        }
        let tables: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| hermite_values(max_degree as usize, xi))
            .collect();
        for (slot, j) in indices.iter().enumerate() {
            let mut h = v;
            for (axis, &deg) in j.0.iter().enumerate() {
                h *= tables[axis][deg as usize];
            }
            sums[slot] += h;
        }
    }
    let entries = indices
        .into_iter()
        .zip(sums)
        .map(|(j, s)| (j, s / n_samples as f64));
    HermiteExpansion::from_coefficients(m, entries)
}

// JSON schema: {"m": .., "max_degree": .., "coeffs": [{"J": [..], "c": ..}, ..]}
// with coeffs in graded-lexicographic order.

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    #[serde(rename = "J")]
    j: Vec<u32>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct ExpansionWire {
    m: usize,
    max_degree: u32,
    coeffs: Vec<CoeffEntry>,
}

impl Serialize for HermiteExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = ExpansionWire {
            m: self.dimension,
            max_degree: self.max_degree,
            coeffs: self
                .coefficients
                .iter()
                .map(|(idx, &c)| CoeffEntry { j: idx.0.clone(), c })
                .collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermiteExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ExpansionWire::deserialize(deserializer)?;
        let entries = wire
            .coeffs
            .into_iter()
            .map(|e| (MultiIndex(e.j), e.c))
            .collect::<Vec<_>>();
        let mut exp = HermiteExpansion::from_coefficients(wire.m, entries)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        exp.max_degree = exp.max_degree.max(wire.max_degree);
        Ok(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_hermite_rule, tensor_expect};

    #[test]
    fn graded_lex_order() {
        let idx = multi_indices(2, 2);
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ];
        assert_eq!(idx.iter().map(|i| i.0.clone()).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn multi_hermite_eval_examples() {
        assert!((multi_hermite_eval(&MultiIndex(vec![0, 0]), &[5.0, -2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((multi_hermite_eval(&MultiIndex(vec![1, 1]), &[2.0, 3.0]).unwrap() - 6.0).abs() < 1e-15);
        let v = multi_hermite_eval(&MultiIndex(vec![2, 0]), &[0.0, 9.0]).unwrap();
        assert!((v + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(multi_hermite_eval(&MultiIndex(vec![1]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn expand_recovers_x_squared() {
        // x^2 = 1 + sqrt(2) H_2
        let rule = gauss_hermite_rule(16).unwrap();
        let e = expand(|x| x[0] * x[0], 1, 2, &rule).unwrap();
        assert!((e.coefficient_uni(0) - 1.0).abs() < 1e-12);
        assert!(e.coefficient_uni(1).abs() < 1e-12);
        assert!((e.coefficient_uni(2) - 2f64.sqrt()).abs() < 1e-12);
        // reconstruction at x = 2
        assert!((e.eval(&[2.0]).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn expand_sign_parity_and_first_coefficient() {
        // even coefficients of sign vanish by grid symmetry; the first odd
        // coefficient converges to sqrt(2/pi) at kink-limited quadrature rate
        let rule = gauss_hermite_rule(400).unwrap();
        let sgn = |x: &[f64]| if x[0] >= 0.0 { 1.0 } else { -1.0 };
        let e = expand(sgn, 1, 3, &rule).unwrap();
        assert!(e.coefficient_uni(0).abs() < 1e-9);
        assert!(e.coefficient_uni(2).abs() < 1e-9);
        let c1 = e.coefficient_uni(1);
        assert!((c1 - (2.0 / std::f64::consts::PI).sqrt()).abs() < 5e-3, "{c1}");
        assert!(e.degree_part(2).is_empty());
    }

    #[test]
    fn sigmoid_even_coefficients_vanish() {
        let rule = gauss_hermite_rule(64).unwrap();
        let e = expand(|x| 1.0 / (1.0 + (-x[0]).exp()), 1, 2, &rule).unwrap();
        assert!((e.coefficient_uni(0) - 0.5).abs() < 1e-8);
        assert!(e.coefficient_uni(2).abs() < 1e-8);
    }

    #[test]
    fn degree_split_partitions() {
        let e = HermiteExpansion::from_univariate(&[1.0, 0.0, 2f64.sqrt()]);
        let below = e.truncate_below(1);
        let tail = e.tail_from(1);
        assert_eq!(below.n_terms(), 1);
        assert!((below.coefficient_uni(0) - 1.0).abs() < 1e-15);
        assert_eq!(tail.n_terms(), 1);
        assert!((tail.coefficient_uni(2) - 2f64.sqrt()).abs() < 1e-15);
        let sum = below.add(&tail).unwrap();
        assert_eq!(sum, e);
        // d = 0: below empty, tail is everything
        assert!(e.truncate_below(0).is_empty());
        assert_eq!(e.tail_from(0), e);
        // degree part beyond stored degree is empty
        assert!(e.degree_part(7).is_empty());
    }

    #[test]
    fn eval_and_norm_basics() {
        let e = HermiteExpansion::from_univariate(&[0.0, 1.0]);
        assert!((e.eval(&[0.7]).unwrap() - 0.7).abs() < 1e-15);
        let p = HermiteExpansion::from_univariate(&[3.0, 0.0, 4.0]);
        assert!((p.l2_norm() - 5.0).abs() < 1e-15);
        assert!(e.eval(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn parseval_against_tensor_quadrature() {
        let rule = gauss_hermite_rule(16).unwrap();
        let mut rng = stream_rng(42, 0);
        use rand::Rng;
        for m in 1..=3usize {
            let indices = multi_indices(m, 4);
            let entries: Vec<(MultiIndex, f64)> = indices
                .into_iter()
                .map(|j| (j, rng.gen_range(-1.0..1.0)))
                .collect();
            let e = HermiteExpansion::from_coefficients(m, entries).unwrap();
            let sq = tensor_expect(&rule, m, |x| {
                let v = e.eval(x).unwrap();
                v * v
            })
            .unwrap();
            assert!(
                (sq - e.l2_norm().powi(2)).abs() < 1e-8,
                "m={m}: {sq} vs {}",
                e.l2_norm().powi(2)
            );
        }
    }

    #[test]
    fn expand_mc_agrees_with_quadrature_roughly() {
        let rule = gauss_hermite_rule(16).unwrap();
        let f = |x: &[f64]| x[0] * x[0] + 0.5 * x[1];
        let exact = expand(f, 2, 2, &rule).unwrap();
        let mc = expand_mc(f, 2, 2, 200_000, 9).unwrap();
        for (idx, c) in exact.iter() {
            assert!((mc.coefficient(idx) - c).abs() < 0.05, "{idx:?}");
        }
    }

    #[test]
    fn json_round_trip_in_graded_lex_order() {
        let e = HermiteExpansion::from_coefficients(
            2,
            vec![
                (MultiIndex(vec![2, 0]), 0.25),
                (MultiIndex(vec![0, 0]), 1.0),
                (MultiIndex(vec![0, 1]), -0.5),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let pos_00 = json.find("[0,0]").unwrap();
        let pos_01 = json.find("[0,1]").unwrap();
        let pos_20 = json.find("[2,0]").unwrap();
        assert!(pos_00 < pos_01 && pos_01 < pos_20, "{json}");
        let back: HermiteExpansion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn drop_tolerance_applies_after_arithmetic() {
        let e = HermiteExpansion::from_univariate(&[1.0, 1e-16]);
        assert_eq!(e.n_terms(), 1);
        let diff = e.add(&e.scale(-1.0)).unwrap();
        assert!(diff.is_empty());
    }
}
