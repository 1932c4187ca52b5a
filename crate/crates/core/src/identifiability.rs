//! Numerical parameter-identifiability diagnostics.
//!
//! The walking dynamics depend on mass and stiffness only through their
//! ratio, so the trajectory map has a flat direction in (log m, log k, log
//! l0) space. These diagnostics make that statement executable:
//!
//! * [`scale_invariance_check`] measures the trajectory deviation under a
//!   joint (m, k) scaling — near zero by construction of the dynamics.
//! * [`sensitivity_jacobian`] differentiates the sampled trajectory with
//!   respect to log parameters by central differences; in log space the
//!   scaling direction is the constant vector (1, 1, 0).
//! * [`singular_spectrum`] ranks the Jacobian through its tiny Gram matrix
//!   with a cyclic Jacobi eigensolve; a vanishing trailing singular value
//!   exposes the unidentifiable combination and its direction.
//! * [`conditional_r2_bound`] is a Monte-Carlo oracle for how much of a
//!   parameter's variance is explainable from the ratio alone, which upper
//!   bounds any regressor's achievable R² for that parameter.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::SamplingRanges;
use crate::dynamics::GaitParams;
use crate::math;
use crate::sim::{simulate, GaitFailure, InitialConditions, SimSettings, Trajectory};

/// Singular-value ratio below which a direction is declared unidentifiable.
pub const DEFAULT_RANK_RATIO_THRESHOLD: f64 = 1e-6;

/// Default relative step for the central-difference sensitivities.
pub const DEFAULT_REL_STEP: f64 = 1e-4;

/// Log-parameter spaces the sensitivities can be taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSpace {
    /// (log mass, log stiffness, log rest length).
    MassStiffnessLength,
    /// (log stiffness ratio, log rest length).
    RatioLength,
}

impl ParamSpace {
    pub fn dim(&self) -> usize {
        match self {
            ParamSpace::MassStiffnessLength => 3,
            ParamSpace::RatioLength => 2,
        }
    }

    pub fn axis_names(&self) -> &'static [&'static str] {
        match self {
            ParamSpace::MassStiffnessLength => &["log_m", "log_k", "log_l0"],
            ParamSpace::RatioLength => &["log_rho", "log_l0"],
        }
    }

    /// Parameters with axis `index` scaled by `factor`.
    ///
    /// In ratio space the stiffness ratio is realized by scaling the
    /// stiffness at fixed mass; any realization of the same ratio yields the
    /// same trajectory.
    fn scaled(&self, base: &GaitParams, index: usize, factor: f64) -> GaitParams {
        let mut p = *base;
        match (self, index) {
            (ParamSpace::MassStiffnessLength, 0) => p.mass *= factor,
            (ParamSpace::MassStiffnessLength, 1) => p.stiffness *= factor,
            (ParamSpace::MassStiffnessLength, 2) => p.rest_length *= factor,
            (ParamSpace::RatioLength, 0) => p.stiffness *= factor,
            (ParamSpace::RatioLength, 1) => p.rest_length *= factor,
            _ => panic!("axis index {index} out of range"),
        }
        p
    }
}

/// Max absolute (x, y) sample deviation between the baseline gait and the
/// same gait with mass and stiffness both scaled by `factor`, m.
pub fn scale_invariance_check(
    params: &GaitParams,
    ic: &InitialConditions,
    settings: &SimSettings,
    factor: f64,
) -> Result<f64, GaitFailure> {
    assert!(factor.is_finite() && factor > 0.0, "scale factor must be positive");
    let base = simulate(params, ic, settings)?;
    let scaled = simulate(&params.mass_scaled(factor), ic, settings)?;
    Ok(trajectory_deviation(&base, &scaled))
}

/// Max absolute per-sample deviation over both coordinates, m.
pub fn trajectory_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.len().min(b.len()) {
        worst = worst.max((a.xs[i] - b.xs[i]).abs());
        worst = worst.max((a.ys[i] - b.ys[i]).abs());
    }
    worst
}

/// Dense row-major matrix of trajectory sensitivities: one row per stacked
/// sample (all x, then all y), one column per log parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Jacobian {
    pub fn column_norm(&self, col: usize) -> f64 {
        let mut sum = 0.0;
        for row in 0..self.rows {
            let v = self.data[row * self.cols + col];
            sum += v * v;
        }
        math::sqrt(sum)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// `J v` for a direction in parameter space.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = Vec::with_capacity(self.rows);
        for row in 0..self.rows {
            let r = &self.data[row * self.cols..(row + 1) * self.cols];
            out.push(r.iter().zip(v).map(|(a, b)| a * b).sum());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensitivityError {
    /// A perturbed simulation failed; the finite difference is undefined.
    PerturbationFailed {
        axis: usize,
        /// +1 for the forward perturbation, -1 for the backward one.
        sign: i8,
        failure: GaitFailure,
    },
    NonFiniteJacobian,
}

impl core::fmt::Display for SensitivityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SensitivityError::PerturbationFailed { axis, sign, failure } => write!(
                f,
                "perturbed simulation failed (axis {axis}, sign {sign}): {failure}"
            ),
            SensitivityError::NonFiniteJacobian => write!(f, "non-finite jacobian"),
        }
    }
}

impl core::error::Error for SensitivityError {}

/// Central-difference sensitivity of the sampled trajectory with respect to
/// log parameters: column `j` is
/// `(trajectory(theta_j e^{+d}) - trajectory(theta_j e^{-d})) / (2 d)`.
pub fn sensitivity_jacobian(
    params: &GaitParams,
    ic: &InitialConditions,
    settings: &SimSettings,
    space: ParamSpace,
    rel_step: f64,
) -> Result<Jacobian, SensitivityError> {
    assert!(rel_step.is_finite() && rel_step > 0.0, "relative step must be positive");
    let cols = space.dim();
    let up = math::exp(rel_step);
    let down = math::exp(-rel_step);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut rows = 0usize;
    for axis in 0..cols {
        let run = |factor: f64, sign: i8| {
            simulate(&space.scaled(params, axis, factor), ic, settings)
                .map_err(|failure| SensitivityError::PerturbationFailed { axis, sign, failure })
        };
        let plus = run(up, 1)?;
        let minus = run(down, -1)?;
        let n = plus.len();
        rows = 2 * n;
        let mut col = Vec::with_capacity(rows);
        for i in 0..n {
            col.push((plus.xs[i] - minus.xs[i]) / (2.0 * rel_step));
        }
        for i in 0..n {
            col.push((plus.ys[i] - minus.ys[i]) / (2.0 * rel_step));
        }
        columns.push(col);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in columns.iter() {
            data.push(col[row]);
        }
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(SensitivityError::NonFiniteJacobian);
    }
    Ok(Jacobian { rows, cols, data })
}

/// Identifiability verdict for one singular direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionVerdict {
    pub singular_value: f64,
    /// Unit direction in log-parameter space.
    pub direction: Vec<f64>,
    /// `singular_value / sigma_max >= threshold`.
    pub identifiable: bool,
}

/// Singular spectrum of a sensitivity Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub rows: usize,
    pub cols: usize,
    /// Descending singular values.
    pub singular_values: Vec<f64>,
    /// Unit vector spanning the least-observable parameter combination.
    pub null_direction: Vec<f64>,
    /// `sigma_min / sigma_max`.
    pub rank_ratio: f64,
    pub threshold: f64,
    pub verdicts: Vec<DirectionVerdict>,
}

impl SensitivityReport {
    /// True when the spectrum exposes an unidentifiable combination.
    pub fn has_unidentifiable_combination(&self) -> bool {
        self.rank_ratio < self.threshold
    }
}

/// Singular spectrum via the parameter-space Gram matrix `J^T J` and a
/// cyclic Jacobi eigensolve; singular values are the root eigenvalues and
/// the null direction is the eigenvector of the smallest one.
pub fn singular_spectrum(
    jacobian: &Jacobian,
    threshold: f64,
) -> Result<SensitivityReport, SensitivityError> {
    if jacobian.data.iter().any(|v| !v.is_finite()) {
        return Err(SensitivityError::NonFiniteJacobian);
    }
    let p = jacobian.cols;
    let mut gram = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            let mut sum = 0.0;
            for row in 0..jacobian.rows {
                let r = &jacobian.data[row * p..(row + 1) * p];
                sum += r[i] * r[j];
            }
            gram[i * p + j] = sum;
            gram[j * p + i] = sum;
        }
    }
    let (eigenvalues, eigenvectors) = jacobi_eigh(&gram, p);

    // Sort descending, carrying the eigenvectors along.
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let singular_values: Vec<f64> = order
        .iter()
        .map(|&i| math::sqrt(eigenvalues[i].max(0.0)))
        .collect();
    let directions: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (0..p).map(|r| eigenvectors[r * p + i]).collect())
        .collect();

    let sigma_max = singular_values[0];
    let sigma_min = singular_values[p - 1];
    let rank_ratio = if sigma_max > 0.0 { sigma_min / sigma_max } else { 0.0 };
    let verdicts = singular_values
        .iter()
        .zip(&directions)
        .map(|(&sv, dir)| DirectionVerdict {
            singular_value: sv,
            direction: dir.clone(),
            identifiable: sigma_max > 0.0 && sv / sigma_max >= threshold,
        })
        .collect();
    Ok(SensitivityReport {
        rows: jacobian.rows,
        cols: p,
        singular_values,
        null_direction: directions[p - 1].clone(),
        rank_ratio,
        threshold,
        verdicts,
    })
}

/// Cyclic Jacobi eigensolve of a symmetric `n x n` matrix (row-major).
/// Returns eigenvalues and the column eigenvector matrix.
fn jacobi_eigh(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = matrix
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x.abs()))
        .max(1e-300);
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i * n + j].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                // Stable rotation: t = sign(theta) / (|theta| + sqrt(theta^2 + 1)).
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}

/// Which parameter the conditional bound is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundTarget {
    Mass,
    Stiffness,
}

impl BoundTarget {
    pub fn name(&self) -> &'static str {
        match self {
            BoundTarget::Mass => "m",
            BoundTarget::Stiffness => "k",
        }
    }
}

/// Monte-Carlo estimate of the achievable R² ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R2Bound {
    pub bound: f64,
    /// Batch-method standard error of the estimate.
    pub std_err: f64,
    /// Set when the estimator is undefined (constant conditioner or constant
    /// target); `bound` is then reported as 1 by convention.
    pub degenerate: bool,
    pub n_samples: usize,
}

/// Upper bound on any regressor's test R² for `target`, given that the
/// trajectory only exposes the stiffness ratio.
///
/// Draws `(m, k)` pairs from the sampling ranges, conditions on the ratio by
/// quantile binning, and returns `1 - E[Var(target | ratio)] / Var(target)`.
///
/// # Panics
///
/// Panics when `n_mc < 100_000`; fewer samples make the bin variances too
/// noisy to act as an acceptance oracle.
pub fn conditional_r2_bound(
    ranges: &SamplingRanges,
    target: BoundTarget,
    n_mc: usize,
    seed: u64,
) -> R2Bound {
    assert!(n_mc >= 100_000, "the conditional bound needs at least 1e5 samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut targets = Vec::with_capacity(n_mc);
    let mut ratios = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        let mass = rng.random_range(ranges.mass.0..ranges.mass.1);
        let stiffness = rng.random_range(ranges.stiffness.0..ranges.stiffness.1);
        targets.push(match target {
            BoundTarget::Mass => mass,
            BoundTarget::Stiffness => stiffness,
        });
        ratios.push(stiffness / mass);
    }
    conditional_r2_bound_from_samples(&targets, &ratios)
}

/// Core estimator behind [`conditional_r2_bound`], usable with arbitrary
/// (target, conditioner) samples.
pub fn conditional_r2_bound_from_samples(targets: &[f64], conditioners: &[f64]) -> R2Bound {
    assert_eq!(targets.len(), conditioners.len());
    let n = targets.len();
    assert!(n >= 4, "need at least a handful of samples");

    let (min_c, max_c) = conditioners
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    let var_total = population_variance(targets);
    if min_c == max_c || var_total <= 0.0 {
        // Quantile bins of a constant conditioner (or a constant target)
        // leave the estimator 0/0; report the degenerate case explicitly.
        return R2Bound { bound: 1.0, std_err: 0.0, degenerate: true, n_samples: n };
    }

    let bound = binned_bound(targets, conditioners, var_total);

    // Standard error by the batch method: independent consecutive batches,
    // each re-estimated with its own binning.
    let n_batches = 10usize.min(n / 16).max(2);
    let batch_len = n / n_batches;
    let mut batch_bounds = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let lo = b * batch_len;
        let hi = if b + 1 == n_batches { n } else { lo + batch_len };
        let t = &targets[lo..hi];
        let c = &conditioners[lo..hi];
        let v = population_variance(t);
        if v > 0.0 {
            batch_bounds.push(binned_bound(t, c, v));
        }
    }
    let std_err = if batch_bounds.len() >= 2 {
        let m = batch_bounds.iter().sum::<f64>() / batch_bounds.len() as f64;
        let var = batch_bounds.iter().map(|b| (b - m) * (b - m)).sum::<f64>()
            / (batch_bounds.len() - 1) as f64;
        math::sqrt(var / batch_bounds.len() as f64)
    } else {
        f64::NAN
    };
    R2Bound { bound, std_err, degenerate: false, n_samples: n }
}

fn binned_bound(targets: &[f64], conditioners: &[f64], var_total: f64) -> f64 {
    let n = targets.len();
    let n_bins = (math::floor(math::sqrt(n as f64)) as usize).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| conditioners[a].total_cmp(&conditioners[b]));

    // Equal-count quantile bins; the first `n % n_bins` bins take one extra.
    let base = n / n_bins;
    let extra = n % n_bins;
    let mut expected_var = 0.0;
    let mut start = 0usize;
    for b in 0..n_bins {
        let len = base + usize::from(b < extra);
        if len == 0 {
            continue;
        }
        let bin = &order[start..start + len];
        start += len;
        let mean = bin.iter().map(|&i| targets[i]).sum::<f64>() / len as f64;
        let var = bin
            .iter()
            .map(|&i| {
                let d = targets[i] - mean;
                d * d
            })
            .sum::<f64>()
            / len as f64;
        expected_var += var * len as f64 / n as f64;
    }
    1.0 - expected_var / var_total
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> GaitParams {
        GaitParams {
            mass: 70.0,
            stiffness: 9000.0,
            rest_length: 0.7,
            attack_angle: 69.0_f64.to_radians(),
            gravity: 10.0,
        }
    }

    fn ic() -> InitialConditions {
        InitialConditions { x0: 0.02, y_offset: 0.0, v0: 0.85 }
    }

    fn settings() -> SimSettings {
        SimSettings::default()
    }

    #[test]
    fn scale_invariance_identity_factor_is_exact() {
        let dev = scale_invariance_check(&params(), &ic(), &settings(), 1.0).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn scale_invariance_range_corner_factor() {
        let p = GaitParams { mass: 60.0, stiffness: 8000.0, ..params() };
        let dev = scale_invariance_check(&p, &ic(), &settings(), 1.25).unwrap();
        assert!(dev < 1e-9, "deviation {dev}");
    }

    #[test]
    fn stiffness_only_perturbation_moves_the_trajectory() {
        // Contrast case: scaling k alone changes the ratio and must move the
        // gait by far more than the invariance tolerance.
        let base = simulate(&params(), &ic(), &settings()).unwrap();
        let mut p = params();
        p.stiffness *= 1.25;
        let moved = simulate(&p, &ic(), &settings()).unwrap();
        assert!(trajectory_deviation(&base, &moved) > 1e-3);
    }

    #[test]
    fn jacobian_annihilates_the_scaling_direction() {
        let j = sensitivity_jacobian(
            &params(),
            &ic(),
            &settings(),
            ParamSpace::MassStiffnessLength,
            DEFAULT_REL_STEP,
        )
        .unwrap();
        assert_eq!(j.cols, 3);
        assert_eq!(j.rows, 2 * 151);
        let along = j.apply(&[1.0, 1.0, 0.0]);
        let norm = math::sqrt(along.iter().map(|v| v * v).sum());
        assert!(norm < 1e-5 * j.frobenius_norm(), "norm {norm}");
        // The rest-length column is far from null.
        assert!(j.column_norm(2) > 1e-3 * j.frobenius_norm());
    }

    #[test]
    fn two_param_jacobian_has_two_live_columns() {
        let j = sensitivity_jacobian(
            &params(),
            &ic(),
            &settings(),
            ParamSpace::RatioLength,
            DEFAULT_REL_STEP,
        )
        .unwrap();
        let total = j.frobenius_norm();
        assert!(j.column_norm(0) > 1e-4 * total);
        assert!(j.column_norm(1) > 1e-4 * total);
    }

    #[test]
    fn spectrum_of_orthonormal_columns_is_flat() {
        // Two orthonormal columns padded with zeros: both singular values 1.
        let mut data = vec![0.0; 10 * 2];
        data[0] = 1.0; // row 0, col 0
        data[3] = 1.0; // row 1, col 1
        let j = Jacobian { rows: 10, cols: 2, data };
        let report = singular_spectrum(&j, DEFAULT_RANK_RATIO_THRESHOLD).unwrap();
        assert_relative_eq!(report.singular_values[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(report.singular_values[1], 1.0, max_relative = 1e-12);
        assert_relative_eq!(report.rank_ratio, 1.0, max_relative = 1e-12);
        assert!(!report.has_unidentifiable_combination());
    }

    #[test]
    fn spectrum_detects_duplicated_column() {
        let rows = 8;
        let mut data = Vec::with_capacity(rows * 2);
        for i in 0..rows {
            let v = (i as f64 + 1.0) * 0.3;
            data.push(v);
            data.push(v);
        }
        let j = Jacobian { rows, cols: 2, data };
        let report = singular_spectrum(&j, DEFAULT_RANK_RATIO_THRESHOLD).unwrap();
        assert!(report.singular_values[1] < 1e-12 * report.singular_values[0]);
        assert!(report.has_unidentifiable_combination());
        let d = &report.null_direction;
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(d[0].abs(), inv_sqrt2, max_relative = 1e-10);
        assert_relative_eq!(d[1].abs(), inv_sqrt2, max_relative = 1e-10);
        assert!(d[0] * d[1] < 0.0, "null direction must be (1,-1)/sqrt(2) up to sign");
    }

    #[test]
    fn gait_spectrum_flags_mass_stiffness_combination() {
        let j = sensitivity_jacobian(
            &params(),
            &ic(),
            &settings(),
            ParamSpace::MassStiffnessLength,
            DEFAULT_REL_STEP,
        )
        .unwrap();
        let report = singular_spectrum(&j, DEFAULT_RANK_RATIO_THRESHOLD).unwrap();
        assert!(report.rank_ratio < 1e-6, "rank ratio {}", report.rank_ratio);
        // Null direction within 1 degree of (1, 1, 0)/sqrt(2).
        let d = &report.null_direction;
        let cosine = ((d[0] + d[1]) / 2.0_f64.sqrt()).abs();
        assert!(cosine >= 1.0_f64.to_radians().cos(), "cosine {cosine}");
        assert!(report.has_unidentifiable_combination());

        let j2 = sensitivity_jacobian(
            &params(),
            &ic(),
            &settings(),
            ParamSpace::RatioLength,
            DEFAULT_REL_STEP,
        )
        .unwrap();
        let report2 = singular_spectrum(&j2, DEFAULT_RANK_RATIO_THRESHOLD).unwrap();
        assert!(report2.rank_ratio > 1e-3, "rank ratio {}", report2.rank_ratio);
        assert!(!report2.has_unidentifiable_combination());
    }

    #[test]
    fn jacobi_matches_a_known_spectrum() {
        // diag(3, 1) rotated by 30 degrees.
        let c = 30.0_f64.to_radians().cos();
        let s = 30.0_f64.to_radians().sin();
        let a = [
            3.0 * c * c + s * s,
            (3.0 - 1.0) * c * s,
            (3.0 - 1.0) * c * s,
            3.0 * s * s + c * c,
        ];
        let (vals, vecs) = jacobi_eigh(&a, 2);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        assert_relative_eq!(sorted[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(sorted[1], 3.0, max_relative = 1e-12);
        // Eigenvectors stay orthonormal.
        let dot = vecs[0] * vecs[1] + vecs[2] * vecs[3];
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn bound_is_degenerate_for_proportional_sampling() {
        // k = c m exactly: the ratio collapses to a point and quantile
        // binning is undefined.
        let targets: Vec<f64> = (0..1000).map(|i| 60.0 + (i as f64) * 0.015).collect();
        let ratios: Vec<f64> = targets.iter().map(|_| 133.0).collect();
        let r = conditional_r2_bound_from_samples(&targets, &ratios);
        assert!(r.degenerate);
        assert_eq!(r.bound, 1.0);
    }

    #[test]
    fn bound_is_near_zero_for_independent_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let targets: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let cond: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let r = conditional_r2_bound_from_samples(&targets, &cond);
        assert!(!r.degenerate);
        assert!(
            r.bound.abs() <= (3.0 * r.std_err).max(0.02),
            "bound {} +- {}",
            r.bound,
            r.std_err
        );
    }

    #[test]
    fn bound_is_one_for_deterministic_target() {
        // Target is a smooth function of the conditioner: conditioning
        // explains essentially all variance.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 100_000;
        let cond: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
        let targets: Vec<f64> = cond.iter().map(|c| 3.0 * c + 1.0).collect();
        let r = conditional_r2_bound_from_samples(&targets, &cond);
        assert!(r.bound > 0.999, "bound {}", r.bound);
    }

    #[test]
    fn paper_range_bound_sits_strictly_inside_unit_interval() {
        let r = conditional_r2_bound(&SamplingRanges::default(), BoundTarget::Mass, 100_000, 4);
        assert!(!r.degenerate);
        assert!(r.bound > 0.0 && r.bound < 1.0, "bound {}", r.bound);
        let rk =
            conditional_r2_bound(&SamplingRanges::default(), BoundTarget::Stiffness, 100_000, 4);
        assert!(rk.bound > 0.0 && rk.bound < 1.0, "bound {}", rk.bound);
    }
}
