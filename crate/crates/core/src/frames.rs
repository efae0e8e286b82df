//! Families of nearly orthogonal orthonormal frames: the hidden subspaces
//! of planted instances. Random Gaussian rows concentrate like n^{-1/2}
//! per cross inner product, which is all the downstream bounds consume.

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Mat};
use crate::rng::stream_rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// An m x n matrix with orthonormal rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthonormalFrame {
    /// Row-major m x n entries.
    pub rows: Vec<Vec<f64>>,
}

impl OrthonormalFrame {
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Projects an ambient point to frame coordinates (Ux).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Frobenius norm of U U^T - I.
    pub fn orthonormality_residual(&self) -> f64 {
        let m = self.m();
        let mut sq = 0.0;
        for i in 0..m {
            for j in 0..m {
                let dot: f64 = self.rows[i]
                    .iter()
                    .zip(&self.rows[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                sq += (dot - target) * (dot - target);
            }
        }
        sq.sqrt()
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
pub fn make_frame(rows: &[Vec<f64>]) -> Result<OrthonormalFrame> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::parameter("no rows supplied".to_string()));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::parameter("rows have differing lengths".to_string()));
    }
    if m > n {
        return Err(Error::parameter(format!(
            "cannot orthonormalize {m} rows in dimension {n}"
        )));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for _pass in 0..2 {
            for prev in &out {
                let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= dot * pi;
                }
            }
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale: f64 = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= 1e-8 * scale.max(1.0) {
            return Err(Error::degenerate(format!(
                "row {idx} is numerically dependent on the preceding rows \
                 (residual norm {norm:.3e})"
            )));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        out.push(v);
    }
    Ok(OrthonormalFrame { rows: out })
}

/// Frobenius and spectral norms of U V^T.
pub fn cross_gram(u: &OrthonormalFrame, v: &OrthonormalFrame) -> Result<(f64, f64)> {
    if u.n() != v.n() {
        return Err(Error::parameter(format!(
            "ambient dimensions differ: {} vs {}",
            u.n(),
            v.n()
        )));
    }
    let mu = Mat::from_rows(&u.rows);
    let mv = Mat::from_rows(&v.rows);
    let cross = mu.mul_transpose(&mv);
    Ok((cross.frobenius_norm(), spectral_norm(&cross)))
}

/// A family of frames with pairwise cross-Gram summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFamily {
    pub frames: Vec<OrthonormalFrame>,
    /// Frobenius norms of U_i V_j^T over i < j.
    pub cross_frobenius: Vec<f64>,
    pub cross_spectral: Vec<f64>,
    pub max_cross_frobenius: f64,
    pub mean_cross_frobenius: f64,
    pub max_orthonormality_residual: f64,
    pub seed: u64,
}

/// Draws a family of frames from i.i.d. Gaussian rows, retrying a frame up
/// to three times on numerical rank deficiency.
pub fn frame_family(m: usize, n: usize, count: usize, seed: u64) -> Result<FrameFamily> {
    if m == 0 || n == 0 || count == 0 {
        return Err(Error::parameter(
            "frame family needs positive m, n, and count".to_string(),
        ));
    }
    if n < 2 * m {
        return Err(Error::parameter(format!(
            "ambient dimension n = {n} below 2m = {}; frames would not be \
             meaningfully separated",
            2 * m
        )));
    }
    if m * count > 20 * n {
        return Err(Error::parameter(format!(
            "family of {count} frames with m = {m} oversubscribes dimension {n}"
        )));
    }
    let mut frames = Vec::with_capacity(count);
    for idx in 0..count {
        let mut frame = None;
        for attempt in 0..3u64 {
            let mut rng = stream_rng(seed, 0x4652_0000 + idx as u64 * 4 + attempt);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            match make_frame(&rows) {
                Ok(f) => {
                    frame = Some(f);
                    break;
                }
                Err(Error::Degenerate(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        let frame = frame.ok_or_else(|| {
            Error::degenerate(format!(
                "frame {idx} failed Gram-Schmidt three times (m={m}, n={n})"
            ))
        })?;
        frames.push(frame);
    }
    let mut cross_frobenius = Vec::new();
    let mut cross_spectral = Vec::new();
    for i in 0..count {
        for j in (i + 1)..count {
            let (fro, spec) = cross_gram(&frames[i], &frames[j])?;
            cross_frobenius.push(fro);
            cross_spectral.push(spec);
        }
    }
    let max_cross = cross_frobenius.iter().cloned().fold(0.0, f64::max);
    let mean_cross = if cross_frobenius.is_empty() {
        0.0
    } else {
        cross_frobenius.iter().sum::<f64>() / cross_frobenius.len() as f64
    };
    let max_resid = frames
        .iter()
        .map(|f| f.orthonormality_residual())
        .fold(0.0, f64::max);
    Ok(FrameFamily {
        frames,
        cross_frobenius,
        cross_spectral,
        max_cross_frobenius: max_cross,
        mean_cross_frobenius: mean_cross,
        max_orthonormality_residual: max_resid,
        seed,
    })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rows_pass_through() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let f = make_frame(&rows).unwrap();
        assert_eq!(f.rows, rows);
        assert!(f.orthonormality_residual() < 1e-15);
    }

    #[test]
    fn scaling_is_removed() {
        let f = make_frame(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(f.rows, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn gram_schmidt_by_hand() {
        let f = make_frame(&[vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]]).unwrap();
        assert!((f.rows[0][0] - 1.0).abs() < 1e-15);
        assert!((f.rows[1][1] - 1.0).abs() < 1e-14);
        assert!(f.rows[1][0].abs() < 1e-14);
    }

    #[test]
    fn dependent_rows_are_degenerate() {
        let err = make_frame(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        match err {
            Error::Degenerate(msg) => assert!(msg.contains("row 1"), "{msg}"),
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn cross_gram_identities() {
        let u = make_frame(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]).unwrap();
        let v = make_frame(&[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]]).unwrap();
        let (fro, spec) = cross_gram(&u, &u).unwrap();
        assert!((fro - 2f64.sqrt()).abs() < 1e-12);
        assert!((spec - 1.0).abs() < 1e-12);
        let (fro, spec) = cross_gram(&u, &v).unwrap();
        assert!(fro.abs() < 1e-15 && spec.abs() < 1e-15);
    }

    #[test]
    fn spectral_below_frobenius_on_random_pairs() {
        let fam = frame_family(2, 200, 6, 42).unwrap();
        for (fro, spec) in fam.cross_frobenius.iter().zip(&fam.cross_spectral) {
            assert!(spec <= &(fro + 1e-12));
        }
        assert!(fam.max_orthonormality_residual < 1e-10);
    }

    #[test]
    fn cross_gram_symmetry() {
        let fam = frame_family(3, 120, 4, 7).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (fij, _) = cross_gram(&fam.frames[i], &fam.frames[j]).unwrap();
                let (fji, _) = cross_gram(&fam.frames[j], &fam.frames[i]).unwrap();
                assert!((fij - fji).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_is_deterministic_for_a_seed() {
        let a = frame_family(2, 64, 3, 5).unwrap();
        let b = frame_family(2, 64, 3, 5).unwrap();
        assert_eq!(a.frames[2].rows, b.frames[2].rows);
    }

    #[test]
    fn family_guards() {
        assert!(frame_family(4, 6, 2, 1).is_err()); // n < 2m
        assert!(frame_family(2, 40, 500, 1).is_err()); // oversubscribed
    }

    #[test]
    fn cross_norms_shrink_with_dimension() {
        // median pairwise Frobenius norm scales like n^{-1/2}
        let mut meds = Vec::new();
        for n in [128usize, 256] {
            let mut all = Vec::new();
            for seed in 0..10u64 {
                let fam = frame_family(2, n, 8, 1000 + seed).unwrap();
                all.extend(fam.cross_frobenius);
            }
            meds.push(median(&all));
        }
        let ratio = meds[0] / meds[1];
        assert!(ratio > 1.2 && ratio < 1.7, "ratio {ratio}");
    }
}
