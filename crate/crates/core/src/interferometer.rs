//! Two-arm fringe simulation: detector statistics, finite-shot counting,
//! least-squares fringe fitting, and estimation of visibility, phase,
//! Bargmann angle, and quantum speed from counted data.
//!
//! The interference kernel is `V e^{i Phi} = Tr(rho U_lower† U_upper)`. With
//! the lower arm idle this is the plain visibility/phase pair; with
//! `U_upper = U(t)` and `U_lower = U(t + tau)` its modulus obeys
//! `V² = 1 - v² tau² / 4` to second order in `tau`, which turns fringe
//! contrast into a speed measurement.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::eig::propagator;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::orbit::{self, PhaseVisibility};
use crate::seeding;
use crate::states::DensityMatrix;
use crate::tolerance::TOL_UNIT;

/// Shot budget: a finite count per setting, or exact probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Finite(u64),
    Exact,
}

/// Raw detector record of one fringe scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FringeScan {
    pub settings: Vec<f64>,
    pub shots_per_setting: u64,
    pub counts_d: Vec<u64>,
    pub seed: u64,
}

impl FringeScan {
    /// CSV rows `chi,counts_D,counts_Dprime,shots`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chi,counts_D,counts_Dprime,shots\n");
        for (chi, d) in self.settings.iter().zip(&self.counts_d) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                chi,
                d,
                self.shots_per_setting - d,
                self.shots_per_setting
            ));
        }
        out
    }
}

/// Fitted fringe parameters with residual-based uncertainties.
#[derive(Debug, Clone, Serialize)]
pub struct FringeFit {
    pub visibility: f64,
    pub phase: f64,
    pub visibility_stderr: f64,
    pub phase_stderr: f64,
    /// False when the contrast is consistent with zero, in which case the
    /// phase is reported but carries no information.
    pub phase_identifiable: bool,
}

impl FringeFit {
    pub fn phase_visibility(&self) -> PhaseVisibility {
        PhaseVisibility {
            visibility: self.visibility,
            phase: self.phase,
        }
    }
}

/// Speed recovered from fringe contrast at arm delay `tau`.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedEstimate {
    pub v_hat: f64,
    pub tau: f64,
    pub v_true: Option<f64>,
    pub stderr: f64,
}

/// Probability that the D detector fires at phase-shifter setting `chi`:
/// `p_D = (1 + V cos(Phi + chi)) / 2`, with the kernel
/// `V e^{i Phi} = Tr(rho U_lower† U_upper)`. The D' detector gets `1 - p_D`.
pub fn detector_probability(
    rho: &DensityMatrix,
    u_upper: &ComplexMatrix,
    u_lower: &ComplexMatrix,
    chi: f64,
) -> Result<f64> {
    let z = interference_kernel(rho, u_upper, u_lower)?;
    let shifted = z * crate::matrix::C64::from_polar(1.0, chi);
    Ok(((1.0 + shifted.re) / 2.0).clamp(0.0, 1.0))
}

/// The complex kernel `Tr(rho U_lower† U_upper)` after checking both arms.
pub fn interference_kernel(
    rho: &DensityMatrix,
    u_upper: &ComplexMatrix,
    u_lower: &ComplexMatrix,
) -> Result<crate::matrix::C64> {
    if u_upper.dim() != rho.dim() || u_lower.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u_upper.dim().max(u_lower.dim()),
        });
    }
    u_upper.check_unitary(TOL_UNIT)?;
    u_lower.check_unitary(TOL_UNIT)?;
    Ok(rho.matrix().trace_mul(&u_lower.dagger().mul(u_upper)))
}

/// Count detector-D clicks at each setting; counts are binomial draws with
/// the exact per-setting probability and a per-setting derived seed, so the
/// record is deterministic in `seed` and independent of setting order.
pub fn sample_scan(
    rho: &DensityMatrix,
    u_upper: &ComplexMatrix,
    u_lower: &ComplexMatrix,
    settings: &[f64],
    shots: u64,
    seed: u64,
) -> Result<FringeScan> {
    if shots == 0 {
        return Err(Error::InvalidInput("need at least one shot".into()));
    }
    let mut counts = Vec::with_capacity(settings.len());
    for (j, &chi) in settings.iter().enumerate() {
        let p = detector_probability(rho, u_upper, u_lower, chi)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seeding::derive(seed, "fringe-setting", j as u64));
        let draw = Binomial::new(shots, p)
            .map_err(|e| Error::InvalidInput(format!("binomial setup: {e}")))?
            .sample(&mut rng);
        counts.push(draw);
    }
    Ok(FringeScan {
        settings: settings.to_vec(),
        shots_per_setting: shots,
        counts_d: counts,
        seed,
    })
}

/// Default scan grid: `count` equally spaced settings over `[0, 2 pi)`.
pub fn default_settings(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| j as f64 * std::f64::consts::TAU / count as f64)
        .collect()
}

/// Least-squares fit of `a + b cos chi + c sin chi` to detector frequencies;
/// recovers `V = 2 sqrt(b² + c²)` (clamped into [0, 1]) and
/// `Phi = atan2(-c, b)`.
pub fn fit_fringe(scan: &FringeScan) -> Result<FringeFit> {
    let y: Vec<f64> = scan
        .counts_d
        .iter()
        .map(|&c| c as f64 / scan.shots_per_setting as f64)
        .collect();
    fit_fringe_points(&scan.settings, &y)
}

/// Fit directly on exact probabilities (the infinite-shot mode).
pub fn fit_fringe_exact(
    rho: &DensityMatrix,
    u_upper: &ComplexMatrix,
    u_lower: &ComplexMatrix,
    settings: &[f64],
) -> Result<FringeFit> {
    let y: Vec<f64> = settings
        .iter()
        .map(|&chi| detector_probability(rho, u_upper, u_lower, chi))
        .collect::<Result<_>>()?;
    fit_fringe_points(settings, &y)
}

pub fn fit_fringe_points(settings: &[f64], y: &[f64]) -> Result<FringeFit> {
    let n = settings.len();
    if n != y.len() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let span = settings.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - settings.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if n < 4 || span < std::f64::consts::PI - 1e-9 {
        return Err(Error::InsufficientSettings { settings: n, span });
    }

    // Normal equations for the 3-parameter design [1, cos chi, sin chi].
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (&chi, &yj) in settings.iter().zip(y) {
        let row = [1.0, chi.cos(), chi.sin()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            aty[i] += row[i] * yj;
        }
    }
    let inv = invert3(&ata).ok_or(Error::DegenerateFit)?;
    let beta = [
        inv[0][0] * aty[0] + inv[0][1] * aty[1] + inv[0][2] * aty[2],
        inv[1][0] * aty[0] + inv[1][1] * aty[1] + inv[1][2] * aty[2],
        inv[2][0] * aty[0] + inv[2][1] * aty[1] + inv[2][2] * aty[2],
    ];
    let (b, c) = (beta[1], beta[2]);

    let mut rss = 0.0;
    for (&chi, &yj) in settings.iter().zip(y) {
        let fit = beta[0] + b * chi.cos() + c * chi.sin();
        rss += (yj - fit) * (yj - fit);
    }
    let dof = (n as f64 - 3.0).max(1.0);
    let sigma_sq = rss / dof;

    let m = (b * b + c * c).sqrt();
    let visibility = (2.0 * m).clamp(0.0, 1.0);
    let phase = (-c).atan2(b);

    let (var_v, var_phi) = if m > 1e-12 {
        let (gb, gc) = (b / m, c / m);
        let var_m =
            gb * gb * sigma_sq * inv[1][1] + 2.0 * gb * gc * sigma_sq * inv[1][2]
                + gc * gc * sigma_sq * inv[2][2];
        let var_phi = (c * c * sigma_sq * inv[1][1] - 2.0 * b * c * sigma_sq * inv[1][2]
            + b * b * sigma_sq * inv[2][2])
            / (m * m * m * m);
        (4.0 * var_m, var_phi)
    } else {
        let var_m = sigma_sq * inv[1][1].max(inv[2][2]);
        (4.0 * var_m, std::f64::consts::PI * std::f64::consts::PI)
    };
    let visibility_stderr = var_v.max(0.0).sqrt();
    let phase_stderr = var_phi.max(0.0).sqrt().min(std::f64::consts::PI);

    Ok(FringeFit {
        visibility,
        phase,
        visibility_stderr,
        phase_stderr,
        phase_identifiable: visibility > 3.0 * visibility_stderr && visibility > 1e-12,
    })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // The design scale is O(n); anything this small means collinear settings.
    if det.abs() < 1e-9 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    for (i, j) in (0..3).flat_map(|i| (0..3).map(move |j| (i, j))) {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        // Adjugate with transposed indices.
        out[j][i] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) * inv_det;
    }
    Some(out)
}

/// Run the scan (or the exact-probability path) with the lower arm idle and
/// fit the fringe.
pub fn scan_and_fit(
    rho: &DensityMatrix,
    u_upper: &ComplexMatrix,
    u_lower: &ComplexMatrix,
    settings: &[f64],
    shots: Shots,
    seed: u64,
) -> Result<FringeFit> {
    match shots {
        Shots::Finite(n) => {
            let scan = sample_scan(rho, u_upper, u_lower, settings, n, seed)?;
            fit_fringe(&scan)
        }
        Shots::Exact => fit_fringe_exact(rho, u_upper, u_lower, settings),
    }
}

/// Estimate the Bargmann angle `s0 = 2 arccos V` by interfering the state
/// with its evolved image: upper arm `U(T)`, lower arm idle.
pub fn measure_bargmann(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    settings: &[f64],
    shots: Shots,
    seed: u64,
    hbar: f64,
) -> Result<f64> {
    let u = propagator(h, t_total, hbar)?;
    let fit = scan_and_fit(rho, &u, &ComplexMatrix::identity(rho.dim()), settings, shots, seed)?;
    Ok(2.0 * fit.visibility.clamp(0.0, 1.0).acos())
}

/// Estimate the quantum speed from the fringe contrast between `U(t)` and
/// `U(t + tau)`: `v = (2/tau) sqrt(1 - V²)`.
///
/// Keep `tau * v` at or below about 0.05 so the second-order contrast model
/// stays well under the shot noise; the estimate carries the propagated
/// standard error either way.
#[allow(clippy::too_many_arguments)]
pub fn measure_speed(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_start: f64,
    tau: f64,
    settings: &[f64],
    shots: Shots,
    seed: u64,
    hbar: f64,
) -> Result<SpeedEstimate> {
    if tau <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "arm delay must be positive, got {tau}"
        )));
    }
    let u_upper = propagator(h, t_start, hbar)?;
    let u_lower = propagator(h, t_start + tau, hbar)?;
    let fit = scan_and_fit(rho, &u_upper, &u_lower, settings, shots, seed)?;
    let v_sq = fit.visibility * fit.visibility;
    let v_hat = (2.0 / tau) * (1.0 - v_sq).max(0.0).sqrt();
    let root = (1.0 - v_sq).max(0.0).sqrt().max(1e-9);
    let stderr = (2.0 / tau) * fit.visibility / root * fit.visibility_stderr;
    Ok(SpeedEstimate {
        v_hat,
        tau,
        v_true: Some(orbit::quantum_speed(rho, h, hbar)?),
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{dot_pauli, pauli};

    fn example_qubit() -> (DensityMatrix, ComplexMatrix) {
        let n = [
            1.0 / 2.0_f64.sqrt(),
            1.0 / 3.0_f64.sqrt(),
            -1.0 / 6.0_f64.sqrt(),
        ];
        (
            DensityMatrix::from_bloch([0.0, 0.0, 0.5]).unwrap(),
            dot_pauli(n).add(&ComplexMatrix::identity(2)),
        )
    }

    #[test]
    fn idle_arms_give_full_contrast() {
        let rho = DensityMatrix::from_bloch([0.1, 0.2, 0.3]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        assert!((detector_probability(&rho, &i2, &i2, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(detector_probability(&rho, &i2, &i2, std::f64::consts::PI).unwrap() < 1e-14);
    }

    #[test]
    fn example_qubit_bright_port() {
        let (rho, h) = example_qubit();
        let u = propagator(&h, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let p = detector_probability(&rho, &u, &ComplexMatrix::identity(2), 0.0).unwrap();
        assert!((p - 0.602062072615966).abs() < 1e-12);
    }

    #[test]
    fn probabilities_conserve() {
        let (rho, h) = example_qubit();
        let u = propagator(&h, 0.7, 1.0).unwrap();
        for &chi in &[0.0, 0.9, 2.2, 4.4] {
            let p = detector_probability(&rho, &u, &ComplexMatrix::identity(2), chi).unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn certain_outcomes_saturate_counts() {
        let rho = DensityMatrix::from_bloch([0.0, 0.0, 0.5]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let scan = sample_scan(&rho, &i2, &i2, &[0.0, 0.1], 1000, 1).unwrap();
        assert_eq!(scan.counts_d[0], 1000); // p = 1 exactly at chi = 0
    }

    #[test]
    fn binomial_counts_within_five_sigma() {
        // p = 1/2 at chi = pi/2 for a flat kernel.
        let rho = DensityMatrix::from_bloch([0.0, 0.0, 0.5]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let shots = 1_000_000;
        let scan = sample_scan(&rho, &i2, &i2, &[std::f64::consts::FRAC_PI_2], shots, 42).unwrap();
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((scan.counts_d[0] as f64 - 500_000.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let (rho, h) = example_qubit();
        let u = propagator(&h, 1.0, 1.0).unwrap();
        let settings = default_settings(12);
        let a = sample_scan(&rho, &u, &ComplexMatrix::identity(2), &settings, 5000, 7).unwrap();
        let b = sample_scan(&rho, &u, &ComplexMatrix::identity(2), &settings, 5000, 7).unwrap();
        assert_eq!(a.counts_d, b.counts_d);
        let c = sample_scan(&rho, &u, &ComplexMatrix::identity(2), &settings, 5000, 8).unwrap();
        assert_ne!(a.counts_d, c.counts_d);
    }

    #[test]
    fn noiseless_fit_recovers_parameters() {
        let settings = default_settings(8);
        let (v, phi) = (0.5, 0.3);
        let y: Vec<f64> = settings
            .iter()
            .map(|&chi| 0.5 * (1.0 + v * (phi + chi).cos()))
            .collect();
        let fit = fit_fringe_points(&settings, &y).unwrap();
        assert!((fit.visibility - v).abs() < 1e-10);
        assert!((fit.phase - phi).abs() < 1e-10);
        assert!(fit.phase_identifiable);
    }

    #[test]
    fn flat_fringe_is_unidentifiable() {
        // V = 0: rho = I/2 against exp(-i sigma_z pi/2).
        let rho = DensityMatrix::maximally_mixed(2);
        let [_, _, sz] = pauli();
        let u = propagator(&sz, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let settings = default_settings(12);
        let scan = sample_scan(&rho, &u, &ComplexMatrix::identity(2), &settings, 100_000, 5).unwrap();
        let fit = fit_fringe(&scan).unwrap();
        assert!(fit.visibility < 3.0 * fit.visibility_stderr);
        assert!(!fit.phase_identifiable);
    }

    #[test]
    fn insufficient_settings_rejected() {
        let y = vec![0.5; 3];
        assert!(matches!(
            fit_fringe_points(&[0.0, 1.0, 2.0], &y),
            Err(Error::InsufficientSettings { .. })
        ));
        // Enough points but no span.
        let y = vec![0.5; 5];
        assert!(matches!(
            fit_fringe_points(&[0.0, 0.1, 0.2, 0.3, 0.4], &y),
            Err(Error::InsufficientSettings { .. })
        ));
    }

    #[test]
    fn degenerate_design_rejected() {
        // Repeated identical settings spanning pi only via duplicates.
        let settings = vec![0.0, 0.0, std::f64::consts::PI, std::f64::consts::PI];
        let y = vec![0.9, 0.9, 0.1, 0.1];
        assert!(matches!(
            fit_fringe_points(&settings, &y),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn exact_fit_matches_visibility_phase() {
        let (rho, h) = example_qubit();
        let u = propagator(&h, 1.1, 1.0).unwrap();
        let fit =
            fit_fringe_exact(&rho, &u, &ComplexMatrix::identity(2), &default_settings(12)).unwrap();
        let pv = orbit::visibility_phase(&rho, &u).unwrap();
        assert!((fit.visibility - pv.visibility).abs() < 1e-9);
        assert!((fit.phase - pv.phase).abs() < 1e-9);
    }

    #[test]
    fn bargmann_estimate_zero_generator() {
        let (rho, _) = example_qubit();
        let h0 = ComplexMatrix::zeros(2);
        let s0 = measure_bargmann(
            &rho,
            &h0,
            1.0,
            &default_settings(12),
            Shots::Exact,
            3,
            1.0,
        )
        .unwrap();
        assert!(s0 < 1e-6);
    }

    #[test]
    fn bargmann_estimate_orthogonal_endpoint() {
        // |0> driven to an orthogonal state: V = 0, so s0 approaches pi.
        let rho = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let [sx, _, _] = pauli();
        let s0 = measure_bargmann(
            &rho,
            &sx,
            std::f64::consts::FRAC_PI_2,
            &default_settings(12),
            Shots::Finite(100_000),
            13,
            1.0,
        )
        .unwrap();
        assert!((s0 - std::f64::consts::PI).abs() < 0.05);
    }

    #[test]
    fn speed_estimate_eigenstate_consistent_with_zero() {
        let rho = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let [_, _, sz] = pauli();
        let est = measure_speed(
            &rho,
            &sz,
            0.0,
            0.05,
            &default_settings(12),
            Shots::Finite(100_000),
            11,
            1.0,
        )
        .unwrap();
        assert!(est.v_hat <= 3.0 * est.stderr.max(1e-6) + 1e-6);
        assert!(est.v_true.unwrap() < 1e-12);
    }

    #[test]
    fn speed_estimate_exact_mode_small_tau() {
        let (rho, h) = example_qubit();
        let est = measure_speed(
            &rho,
            &h,
            0.0,
            1e-3,
            &default_settings(12),
            Shots::Exact,
            0,
            1.0,
        )
        .unwrap();
        let v_true = 1.957890020745122;
        assert!((est.v_hat - v_true).abs() / v_true < 1e-4);
    }

    #[test]
    fn speed_estimate_sampled_budget() {
        // At tau = 0.1 and 1e7 shots the shot-noise floor sits near 0.2% and
        // the contrast-model truncation near 0.17%, so 2% has wide margin.
        let rho = DensityMatrix::maximally_mixed(2);
        let [_, _, sz] = pauli();
        let est = measure_speed(
            &rho,
            &sz,
            0.0,
            0.1,
            &default_settings(12),
            Shots::Finite(10_000_000),
            21,
            1.0,
        )
        .unwrap();
        assert!((est.v_hat - 2.0).abs() / 2.0 < 0.02);
    }

    #[test]
    fn csv_export_shape() {
        let scan = FringeScan {
            settings: vec![0.0, 1.0],
            shots_per_setting: 10,
            counts_d: vec![10, 4],
            seed: 1,
        };
        let csv = scan.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "chi,counts_D,counts_Dprime,shots");
        assert_eq!(lines.next().unwrap(), "0,10,0,10");
        assert_eq!(lines.next().unwrap(), "1,4,6,10");
    }
}
