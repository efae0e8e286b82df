//! The target function zoo: sign, ReLU, sigmoid, piecewise threshold
//! functions, intersections of orthogonal halfspaces, polynomial thresholds,
//! and custom evaluators.

use crate::error::{Error, Result};
use crate::gauss;
use crate::hermite::HermiteExpansion;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Declared range of a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeTag {
    /// Exactly +-1.
    BooleanPm,
    /// Exactly 0 or 1.
    Boolean01,
    /// Finite reals.
    Real,
}

#[derive(Clone)]
pub enum TargetKind {
    Sign,
    Relu,
    Sigmoid,
    /// 1 on the k/2 intervals (i*a + a/2, (i+1)*a) for i = 0..k/2-1, else 0.
    PiecewisePtf { k: usize, a: f64 },
    /// +1 iff every coordinate is at most theta, with P[x_i > theta] = 1/k.
    HalfspaceIntersection { k: usize, theta: f64 },
    /// sign of a polynomial given by its Hermite expansion.
    PolynomialThreshold(Arc<HermiteExpansion>),
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for TargetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetKind::Sign => write!(f, "Sign"),
            TargetKind::Relu => write!(f, "Relu"),
            TargetKind::Sigmoid => write!(f, "Sigmoid"),
            TargetKind::PiecewisePtf { k, a } => write!(f, "PiecewisePtf(k={k}, a={a})"),
            TargetKind::HalfspaceIntersection { k, theta } => {
                write!(f, "HalfspaceIntersection(k={k}, theta={theta})")
            }
            TargetKind::PolynomialThreshold(_) => write!(f, "PolynomialThreshold"),
            TargetKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// An evaluator with a declared dimension and range.
#[derive(Debug, Clone)]
pub struct TargetFunction {
    pub kind: TargetKind,
    dimension: usize,
    range: RangeTag,
    id: String,
}

/// sign with the fixed convention sign(0) = +1.
pub fn sign_pm(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl TargetFunction {
    pub fn sign() -> Self {
        TargetFunction {
            kind: TargetKind::Sign,
            dimension: 1,
            range: RangeTag::BooleanPm,
            id: "sign".to_string(),
        }
    }

    pub fn relu() -> Self {
        TargetFunction {
            kind: TargetKind::Relu,
            dimension: 1,
            range: RangeTag::Real,
            id: "relu".to_string(),
        }
    }

    pub fn sigmoid() -> Self {
        TargetFunction {
            kind: TargetKind::Sigmoid,
            dimension: 1,
            range: RangeTag::Real,
            id: "sigmoid".to_string(),
        }
    }

    pub fn piecewise_ptf(k: usize, a: f64) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return Err(Error::parameter(format!(
                "piecewise PTF needs even k >= 2, got {k}"
            )));
        }
        if !(a > 0.0) {
            return Err(Error::parameter(format!(
                "piecewise PTF needs interval length a > 0, got {a}"
            )));
        }
        Ok(TargetFunction {
            kind: TargetKind::PiecewisePtf { k, a },
            dimension: 1,
            range: RangeTag::Boolean01,
            id: format!("ptf_k{k}_a{a}"),
        })
    }

    /// Intersection of k orthogonal halfspaces with per-coordinate tail 1/k.
    pub fn halfspace_intersection(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::parameter(
                "halfspace intersection needs k >= 1".to_string(),
            ));
        }
        let theta = gauss::sf_inv(1.0 / k as f64)?;
        Ok(TargetFunction {
            kind: TargetKind::HalfspaceIntersection { k, theta },
            dimension: k,
            range: RangeTag::BooleanPm,
            id: format!("halfspaces_k{k}"),
        })
    }

    pub fn polynomial_threshold(p: HermiteExpansion) -> Self {
        let dimension = p.dimension();
        TargetFunction {
            kind: TargetKind::PolynomialThreshold(Arc::new(p)),
            dimension,
            range: RangeTag::BooleanPm,
            id: "sign_of_polynomial".to_string(),
        }
    }

    pub fn custom(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        dimension: usize,
        range: RangeTag,
        id: impl Into<String>,
    ) -> Self {
        TargetFunction {
            kind: TargetKind::Custom(Arc::new(f)),
            dimension,
            range,
            id: id.into(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn range(&self) -> RangeTag {
        self.range
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.range, RangeTag::BooleanPm | RangeTag::Boolean01)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::parameter(format!(
                "point has dimension {}, target '{}' expects {}",
                x.len(),
                self.id,
                self.dimension
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check, for hot loops that have
    /// already validated shapes.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            TargetKind::Sign => sign_pm(x[0]),
            TargetKind::Relu => x[0].max(0.0),
            TargetKind::Sigmoid => sigmoid(x[0]),
            TargetKind::PiecewisePtf { k, a } => {
                let v = x[0];
                if v <= 0.0 {
                    return 0.0;
                }
                let i = (v / a).floor();
                if i as usize >= k / 2 {
                    return 0.0;
                }
                if v > i * a + a / 2.0 && v < (i + 1.0) * a {
                    1.0
                } else {
                    0.0
                }
            }
            TargetKind::HalfspaceIntersection { theta, .. } => {
                // f_i(x) = sign(theta - x_i); intersection is +1 iff all hold
                if x.iter().all(|&xi| xi <= *theta) {
                    1.0
                } else {
                    -1.0
                }
            }
            TargetKind::PolynomialThreshold(p) => sign_pm(p.eval(x).unwrap_or(f64::NAN)),
            TargetKind::Custom(f) => f(x),
        }
    }

    /// Univariate evaluation shorthand.
    pub fn eval1(&self, x: f64) -> f64 {
        debug_assert_eq!(self.dimension, 1);
        self.eval_unchecked(std::slice::from_ref(&x))
    }

    /// Maps a {0,1}-valued target to the +-1 convention (2f - 1).
    pub fn to_pm_one(&self) -> Result<TargetFunction> {
        if self.range != RangeTag::Boolean01 {
            return Err(Error::parameter(format!(
                "to_pm_one expects a {{0,1}}-valued target, '{}' is {:?}",
                self.id, self.range
            )));
        }
        let inner = self.clone();
        Ok(TargetFunction {
            dimension: self.dimension,
            range: RangeTag::BooleanPm,
            id: format!("{}_pm", self.id),
            kind: TargetKind::Custom(Arc::new(move |x| 2.0 * inner.eval_unchecked(x) - 1.0)),
        })
    }

    /// The "on" intervals of a piecewise PTF.
    pub fn ptf_intervals(&self) -> Option<Vec<(f64, f64)>> {
        match self.kind {
            TargetKind::PiecewisePtf { k, a } => Some(
                (0..k / 2)
                    .map(|i| (i as f64 * a + a / 2.0, (i as f64 + 1.0) * a))
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// Serializable target description for experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    Sign,
    Relu,
    Sigmoid,
    PiecewisePtf { k: usize, a: f64 },
    HalfspaceIntersection { k: usize },
}

/// Builds the evaluator described by a spec.
pub fn make_target(spec: &TargetSpec) -> Result<TargetFunction> {
    match spec {
        TargetSpec::Sign => Ok(TargetFunction::sign()),
        TargetSpec::Relu => Ok(TargetFunction::relu()),
        TargetSpec::Sigmoid => Ok(TargetFunction::sigmoid()),
        TargetSpec::PiecewisePtf { k, a } => TargetFunction::piecewise_ptf(*k, *a),
        TargetSpec::HalfspaceIntersection { k } => TargetFunction::halfspace_intersection(*k),
    }
}

/// Parses a target from its config string form, e.g. "sign",
/// "piecewise_ptf:k=4,a=0.5", "halfspace_intersection:k=16".
pub fn parse_target(s: &str) -> Result<TargetFunction> {
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let mut params = std::collections::BTreeMap::new();
    if let Some(args) = args {
        for kv in args.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::parameter(format!("malformed target parameter '{kv}' in '{s}'"))
            })?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get_usize = |key: &str| -> Result<usize> {
        params
            .get(key)
            .ok_or_else(|| Error::parameter(format!("target '{name}' needs parameter '{key}'")))?
            .parse()
            .map_err(|_| Error::parameter(format!("parameter '{key}' must be an integer")))
    };
    let get_f64 = |key: &str| -> Result<f64> {
        params
            .get(key)
            .ok_or_else(|| Error::parameter(format!("target '{name}' needs parameter '{key}'")))?
            .parse()
            .map_err(|_| Error::parameter(format!("parameter '{key}' must be a real number")))
    };
    match name {
        "sign" => Ok(TargetFunction::sign()),
        "relu" => Ok(TargetFunction::relu()),
        "sigmoid" => Ok(TargetFunction::sigmoid()),
        "piecewise_ptf" => TargetFunction::piecewise_ptf(get_usize("k")?, get_f64("a")?),
        "halfspace_intersection" => TargetFunction::halfspace_intersection(get_usize("k")?),
        other => Err(Error::parameter(format!("unknown target kind '{other}'"))),
    }
}
