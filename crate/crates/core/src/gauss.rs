//! Standard normal density, distribution function, quantiles, and exact
//! Gaussian integrals of Hermite polynomials over intervals.

use crate::error::{Error, Result};

pub const SQRT_2PI: f64 = 2.5066282746310002;

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

// Rational Chebyshev coefficients for erf/erfc (Cody's CALERF), relative
// error below 1.2e-16 in double precision on each branch.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const INV_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// erfc(x) on [0.46875, inf): exp(-x^2) times a rational factor, with the
/// exponential split to preserve relative accuracy.
fn erfc_tail(y: f64) -> f64 {
    let result = if y <= 4.0 {
        let mut xnum = ERF_C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + ERF_C[i]) * y;
            xden = (xden + ERF_D[i]) * y;
        }
        (xnum + ERF_C[7]) / (xden + ERF_D[7])
    } else if y >= 26.6 {
        return 0.0;
    } else {
        let ysq = 1.0 / (y * y);
        let mut xnum = ERF_P[5] * ysq;
        let mut xden = ysq;
        for i in 0..4 {
            xnum = (xnum + ERF_P[i]) * ysq;
            xden = (xden + ERF_Q[i]) * ysq;
        }
        let r = ysq * (xnum + ERF_P[4]) / (xden + ERF_Q[4]);
        (INV_SQRT_PI - r) / y
    };
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * result
}

/// Error function, accurate to double precision.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        let ysq = if y > 1e-300 { y * y } else { 0.0 };
        let mut xnum = ERF_A[4] * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + ERF_A[i]) * ysq;
            xden = (xden + ERF_B[i]) * ysq;
        }
        x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
    } else {
        let tail = erfc_tail(y);
        if x >= 0.0 {
            1.0 - tail
        } else {
            tail - 1.0
        }
    }
}

/// Complementary error function, accurate to double precision including the
/// far tail.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        1.0 - erf(x)
    } else if x >= 0.0 {
        erfc_tail(y)
    } else {
        2.0 - erfc_tail(y)
    }
}

/// Standard normal CDF via erfc, relative error near machine precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail probability P[X > x].
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Solves sf(theta) = p by safeguarded Newton iteration.
///
/// Bisection brackets guarantee convergence; Newton steps give the final
/// digits. Accurate to ~1e-15 relative in the central range.
pub fn sf_inv(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::parameter(format!(
            "tail probability must lie in (0,1), got {p}"
        )));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    // crude initial guess from the symmetric logistic approximation
    let mut x = -(2.0 * std::f64::consts::PI / 8.0).sqrt() * (p / (1.0 - p)).ln() * 0.607;
    if !x.is_finite() {
        x = 0.0;
    }
    for _ in 0..200 {
        let f = sf(x) - p;
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut step = f / d; // sf' = -pdf, so Newton is x + f/pdf
        if !step.is_finite() {
            step = 0.0;
        }
        let mut next = x + step;
        if !(lo < next && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Normalized probabilists' Hermite polynomial H_j with E[H_j^2] = 1
/// under N(0,1), by the stable three-term recurrence.
pub fn hermite(j: usize, x: f64) -> f64 {
    match j {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0; // H_0
            let mut cur = x; // H_1
            for k in 1..j {
                let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Values H_0(x) .. H_max(x) in one recurrence pass.
pub fn hermite_values(max: usize, x: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(max + 1);
    vals.push(1.0);
    if max == 0 {
        return vals;
    }
    vals.push(x);
    for k in 1..max {
        let next = (x * vals[k] - (k as f64).sqrt() * vals[k - 1]) / ((k + 1) as f64).sqrt();
        vals.push(next);
    }
    vals
}

/// Exact integral of H_j against the Gaussian density over [a, b].
///
/// Uses d/dx (H_{j-1}(x) pdf(x)) = -sqrt(j) H_j(x) pdf(x); infinite
/// endpoints are allowed.
pub fn interval_moment(j: usize, a: f64, b: f64) -> f64 {
    let term = |x: f64, jm1: usize| -> f64 {
        if x.is_infinite() {
            0.0
        } else {
            hermite(jm1, x) * pdf(x)
        }
    };
    if j == 0 {
        let fa = if a == f64::NEG_INFINITY { 0.0 } else { cdf(a) };
        let fb = if b == f64::INFINITY { 1.0 } else { cdf(b) };
        return fb - fa;
    }
    (term(a, j - 1) - term(b, j - 1)) / (j as f64).sqrt()
}

/// Exact integral of x * H_j(x) against the Gaussian density over [a, b],
/// from x H_j = sqrt(j+1) H_{j+1} + sqrt(j) H_{j-1}.
pub fn interval_moment_x(j: usize, a: f64, b: f64) -> f64 {
    let hi = ((j + 1) as f64).sqrt() * interval_moment(j + 1, a, b);
    let lo = if j == 0 {
        0.0
    } else {
        (j as f64).sqrt() * interval_moment(j - 1, a, b)
    };
    hi + lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_basics() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((sf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.6448536269514722) - 0.95).abs() < 2e-16);
        // reference values: erf(0.5) and erfc(1) to full precision
        assert!((erf(0.5) - 0.5204998778130465).abs() < 1e-16);
        assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-16);
        assert!((erfc(-1.0) - (2.0 - 0.15729920705028513)).abs() < 1e-15);
        // far tail keeps relative accuracy: sf(10) = 7.619853024160527e-24
        let t = sf(10.0);
        assert!((t / 7.619853024160527e-24 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn quantile_round_trip() {
        for &p in &[1e-8, 1e-4, 0.01, 0.25, 0.5, 0.9, 0.999999] {
            let theta = sf_inv(p).unwrap();
            assert!(
                (sf(theta) - p).abs() <= 1e-14 * p.max(1e-12),
                "p={p} theta={theta}"
            );
        }
        // the k=4 halfspace threshold quoted to five digits
        assert!((sf_inv(0.25).unwrap() - 0.6744897501960817).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_bad_input() {
        assert!(sf_inv(0.0).is_err());
        assert!(sf_inv(1.0).is_err());
    }

    #[test]
    fn hermite_small_degrees() {
        // H_2(x) = (x^2 - 1)/sqrt(2)
        assert!((hermite(2, 0.0) + 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((hermite(1, 3.5) - 3.5).abs() < 1e-15);
        assert!((hermite(0, 123.0) - 1.0).abs() < 1e-15);
        let x = 1.7;
        assert!((hermite(3, x) - (x.powi(3) - 3.0 * x) / 6f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn hermite_values_agree_with_single_evaluation() {
        let vals = hermite_values(12, -0.83);
        for (j, v) in vals.iter().enumerate() {
            assert!((v - hermite(j, -0.83)).abs() < 1e-14);
        }
    }

    #[test]
    fn interval_moments_against_known_integrals() {
        // full-line moments: H_0 integrates to 1, higher to 0
        assert!((interval_moment(0, f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-15);
        for j in 1..8 {
            assert!(interval_moment(j, f64::NEG_INFINITY, f64::INFINITY).abs() < 1e-15);
        }
        // sign function coefficient: 2 * int_0^inf H_1 phi = 2 phi(0) = sqrt(2/pi)
        let c1 = 2.0 * interval_moment(1, 0.0, f64::INFINITY);
        assert!((c1 - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        // relu coefficients: int_0^inf x H_j phi
        let relu0 = interval_moment_x(0, 0.0, f64::INFINITY);
        assert!((relu0 - 1.0 / SQRT_2PI).abs() < 1e-15);
        let relu1 = interval_moment_x(1, 0.0, f64::INFINITY);
        assert!((relu1 - 0.5).abs() < 1e-15);
        let relu2 = interval_moment_x(2, 0.0, f64::INFINITY);
        assert!((relu2 - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
    }
}
