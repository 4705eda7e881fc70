//! Evolution-time lower bounds for unitary dynamics and their comparison
//! against a Bures-angle baseline.
//!
//! All bounds are expressed in the same units as the elapsed time `T` and are
//! valid lower bounds on the time needed to produce `U(T)` with the given
//! generator: the uncertainty bound `hbar s0 / (2 ΔH)`, the mean-energy bound
//! `(pi hbar / 2<H>)(1 - Re + (2/pi) Im)` for PSD generators, and the
//! visibility bounds `(1-V) hbar / (A <|E|>)` and `(1-V) hbar / (A E_DE)`
//! built from the absolute-deviation statistics of the energy distribution.

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::eig::{hermitian_eig, propagator, sqrt_psd};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::orbit::{self, evolve_schedule, visibility_phase};
use crate::states::{DensityMatrix, HamiltonianSchedule};
use crate::tolerance::{TOL_DEGENERACY, TOL_PSD};

/// Trigonometric constant in `cos x >= 1 - A|x|`; the sharp value is
/// 0.7246113..., this rounded figure keeps the inequality (and the bounds
/// built on it) valid.
pub const CHAU_A: f64 = 0.725;

/// Threshold below which denominators count as zero.
const EPS_DENOM: f64 = 1e-14;

/// Discrete energy distribution induced by a state on a Hamiltonian's
/// spectrum: distinct eigenvalues ascending with weights `p_n = Tr(Pi_n rho)`.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyDistribution {
    pub energies: Vec<f64>,
    pub probs: Vec<f64>,
}

impl EnergyDistribution {
    /// `Σ p_n |E_n|`.
    pub fn mean_abs_energy(&self) -> f64 {
        self.energies
            .iter()
            .zip(&self.probs)
            .map(|(e, p)| p * e.abs())
            .sum()
    }

    /// Smallest energy whose cumulative probability reaches one half.
    pub fn weighted_median(&self) -> f64 {
        let mut cum = 0.0;
        for (e, p) in self.energies.iter().zip(&self.probs) {
            cum += p;
            if cum >= 0.5 {
                return *e;
            }
        }
        *self.energies.last().expect("distribution is non-empty")
    }
}

/// Spectral weights of `rho` on the eigenspaces of `h`, with eigenvalues
/// merged when closer than the degeneracy tolerance.
pub fn energy_distribution(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<EnergyDistribution> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: h.dim(),
        });
    }
    let eig = hermitian_eig(h)?;
    let mut energies = Vec::new();
    let mut probs = Vec::new();
    let n = eig.values.len();
    let mut k = 0;
    while k < n {
        let mut group_end = k + 1;
        while group_end < n && eig.values[group_end] - eig.values[group_end - 1] <= TOL_DEGENERACY {
            group_end += 1;
        }
        let mut p = 0.0;
        let mut e_sum = 0.0;
        for idx in k..group_end {
            let col = eig.vector(idx);
            let moved = rho.matrix().mul_vec(&col);
            let amp: f64 = col
                .iter()
                .zip(&moved)
                .map(|(c, m)| (c.conj() * m).re)
                .sum();
            p += amp;
            e_sum += eig.values[idx];
        }
        energies.push(e_sum / (group_end - k) as f64);
        probs.push(p.max(0.0));
        k = group_end;
    }
    Ok(EnergyDistribution { energies, probs })
}

/// Average absolute deviation of the energy from its weighted median:
/// `E_DE = Σ p_n |E_n - M|`.
pub fn aadm(dist: &EnergyDistribution) -> f64 {
    let m = dist.weighted_median();
    dist.energies
        .iter()
        .zip(&dist.probs)
        .map(|(e, p)| p * (e - m).abs())
        .sum()
}

/// Uncertainty-type bound `hbar s0 / (2 avg(ΔH))` for a schedule driving
/// `rho` over `[0, T]`. Returns 0 when the Bargmann angle vanishes and
/// `+inf` when the angle is nonzero but the average uncertainty is zero.
pub fn mt_bound(rho: &DensityMatrix, sched: &HamiltonianSchedule, t_total: f64) -> Result<f64> {
    if t_total <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "evolution time must be positive, got {t_total}"
        )));
    }
    let ev = evolve_schedule(rho, sched, 0.0, t_total)?;
    let s0 = orbit::bargmann_angle(rho, &ev.u_total)?;
    Ok(angle_over_speed(s0, ev.avg_delta_h, sched.hbar()))
}

/// Constant-generator convenience form of [`mt_bound`].
pub fn mt_bound_constant(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    hbar: f64,
) -> Result<f64> {
    let sched = HamiltonianSchedule::constant(h.clone(), hbar)?;
    mt_bound(rho, &sched, t_total)
}

fn angle_over_speed(s0: f64, delta_h: f64, hbar: f64) -> f64 {
    if s0 <= 0.0 {
        0.0
    } else if delta_h < EPS_DENOM {
        f64::INFINITY
    } else {
        hbar * s0 / (2.0 * delta_h)
    }
}

/// Mean-energy bound `(pi hbar / 2<H>) (1 - Re + (2/pi) Im)`, clamped at 0.
///
/// Requires a PSD generator; errors with `ZeroMeanEnergy` when `<H>` vanishes
/// while the state still moves (which cannot happen for consistent inputs).
pub fn ml_bound(rho: &DensityMatrix, h: &ComplexMatrix, t_total: f64, hbar: f64) -> Result<f64> {
    let eig = hermitian_eig(h)?;
    let min_eig = *eig.values.first().expect("non-empty spectrum");
    if min_eig < -TOL_PSD {
        return Err(Error::NotPsd { min_eig });
    }
    let mean_h = rho.matrix().trace_mul(h).re;
    let z = rho.matrix().trace_mul(&propagator(h, t_total, hbar)?);
    if z.norm() >= 1.0 - EPS_DENOM {
        // No motion; the bound is trivially zero regardless of <H>.
        return Ok(0.0);
    }
    if mean_h <= EPS_DENOM {
        return Err(Error::ZeroMeanEnergy);
    }
    let raw = (std::f64::consts::PI * hbar / (2.0 * mean_h))
        * (1.0 - z.re + (2.0 / std::f64::consts::PI) * z.im);
    Ok(raw.max(0.0))
}

/// The two visibility bounds. Each side is `None` when its preconditions
/// fail: the mean-energy form needs a PSD generator with `Σ p|E| > 0`, the
/// improved form needs a non-degenerate distribution (`E_DE > 0`).
#[derive(Debug, Clone, Copy)]
pub struct ChauBounds {
    pub chau: Option<f64>,
    pub improved: Option<f64>,
}

pub fn chau_bounds(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    hbar: f64,
) -> Result<ChauBounds> {
    let dist = energy_distribution(rho, h)?;
    let u = propagator(h, t_total, hbar)?;
    let v = visibility_phase(rho, &u)?.visibility;
    let eig_min = {
        let eig = hermitian_eig(h)?;
        *eig.values.first().expect("non-empty spectrum")
    };
    let mean_abs = dist.mean_abs_energy();
    let e_de = aadm(&dist);
    let chau = if eig_min >= -TOL_PSD && mean_abs > EPS_DENOM {
        Some((1.0 - v) * hbar / (CHAU_A * mean_abs))
    } else {
        None
    };
    let improved = if e_de > EPS_DENOM {
        Some(hbar * (1.0 - v) / (CHAU_A * e_de))
    } else {
        None
    };
    Ok(ChauBounds { chau, improved })
}

/// Strict form of the improved visibility bound; errors with
/// `DegenerateSpectrum` when `E_DE` vanishes.
pub fn improved_chau_bound(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    hbar: f64,
) -> Result<f64> {
    let dist = energy_distribution(rho, h)?;
    let e_de = aadm(&dist);
    if e_de < EPS_DENOM {
        return Err(Error::DegenerateSpectrum { e_de });
    }
    let u = propagator(h, t_total, hbar)?;
    let v = visibility_phase(rho, &u)?.visibility;
    Ok(hbar * (1.0 - v) / (CHAU_A * e_de))
}

/// Bures angle `2 arccos Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`, in [0, pi].
pub fn bures_angle(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    Ok(2.0 * uhlmann_fidelity(rho1, rho2)?.acos())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`, clamped to [0, 1].
///
/// Eigenvalues of the inner matrix below 1e-13 are excluded from the root
/// sum: they are eigensolver noise on rank-deficient inputs (each would
/// otherwise leak sqrt(eps) ~ 1e-8 into the trace), and true eigenvalues
/// that small are unresolvable in f64 anyway.
pub fn uhlmann_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let s = sqrt_psd(rho1.matrix())?;
    let inner = s.mul(rho2.matrix()).mul(&s).symmetrize();
    let eig = hermitian_eig(&inner)?;
    let f: f64 = eig
        .values
        .iter()
        .filter(|&&w| w > 1e-13)
        .map(|w| w.sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Operation-independent comparator `hbar ThetaB / (2 ΔH)` between the
/// endpoint states. This is the Bures-angle analogue of the uncertainty
/// bound, reported for comparison only.
pub fn bures_baseline_bound(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    hbar: f64,
) -> Result<f64> {
    let u = propagator(h, t_total, hbar)?;
    let rho_t = rho.evolved(&u);
    let theta = bures_angle(rho, &rho_t)?;
    let delta_h = orbit::energy_uncertainty(rho, h)?;
    Ok(angle_over_speed(theta, delta_h, hbar))
}

/// A bound entry: a finite value, an infinite sentinel, or absent, the latter
/// two carrying a reason. Serialized as `null` plus a `*_reason` field.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Finite(f64),
    Infinite { reason: String },
    Absent { reason: String },
}

impl BoundValue {
    pub fn from_value(x: f64, infinite_reason: &str) -> Self {
        if x.is_finite() {
            BoundValue::Finite(x)
        } else {
            BoundValue::Infinite {
                reason: infinite_reason.to_string(),
            }
        }
    }

    pub fn absent(reason: &str) -> Self {
        BoundValue::Absent {
            reason: reason.to_string(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            BoundValue::Finite(x) => Some(*x),
            _ => None,
        }
    }

    fn reason(&self) -> Option<&str> {
        match self {
            BoundValue::Finite(_) => None,
            BoundValue::Infinite { reason } | BoundValue::Absent { reason } => Some(reason),
        }
    }
}

/// Estimates recovered from simulated fringe data, embedded in a report.
#[derive(Debug, Clone, Serialize)]
pub struct MeasuredRecord {
    pub visibility: f64,
    pub visibility_stderr: f64,
    pub phase: f64,
    pub bargmann_angle: f64,
    pub speed: Option<f64>,
    pub speed_stderr: Option<f64>,
    pub tau: Option<f64>,
    /// None means exact-probability mode.
    pub shots: Option<u64>,
    pub seed: u64,
}

/// Everything computed for one `(rho, H, T)` instance: the interference
/// quantities and every applicable bound.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub t_total: f64,
    pub hbar: f64,
    pub dim: usize,
    pub visibility: f64,
    pub phase: f64,
    pub bargmann_angle: f64,
    pub bures_angle: f64,
    pub delta_h: f64,
    pub mean_h: f64,
    pub re_part: f64,
    pub im_part: f64,
    pub e_de: f64,
    pub h_psd: bool,
    pub mt_bound: BoundValue,
    pub ml_bound: BoundValue,
    pub combined_bound: BoundValue,
    pub chau_bound: BoundValue,
    pub improved_chau_bound: BoundValue,
    /// Comparison-only: the operation-independent Bures-angle analogue of
    /// the uncertainty bound, not one of the orbit-metric bounds.
    pub bures_baseline_bound: BoundValue,
    pub measured: Option<MeasuredRecord>,
}

impl Serialize for BoundReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BoundReport", 24)?;
        st.serialize_field("t", &self.t_total)?;
        st.serialize_field("hbar", &self.hbar)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("visibility", &self.visibility)?;
        st.serialize_field("phase", &self.phase)?;
        st.serialize_field("bargmann_angle", &self.bargmann_angle)?;
        st.serialize_field("bures_angle", &self.bures_angle)?;
        st.serialize_field("delta_h", &self.delta_h)?;
        st.serialize_field("mean_h", &self.mean_h)?;
        st.serialize_field("re_part", &self.re_part)?;
        st.serialize_field("im_part", &self.im_part)?;
        st.serialize_field("e_de", &self.e_de)?;
        st.serialize_field("h_psd", &self.h_psd)?;
        serialize_bound(&mut st, "mt_bound", "mt_reason", &self.mt_bound)?;
        serialize_bound(&mut st, "ml_bound", "ml_reason", &self.ml_bound)?;
        serialize_bound(
            &mut st,
            "combined_bound",
            "combined_reason",
            &self.combined_bound,
        )?;
        serialize_bound(&mut st, "chau_bound", "chau_reason", &self.chau_bound)?;
        serialize_bound(
            &mut st,
            "improved_chau_bound",
            "improved_chau_reason",
            &self.improved_chau_bound,
        )?;
        serialize_bound(
            &mut st,
            "bures_baseline_bound",
            "bures_baseline_reason",
            &self.bures_baseline_bound,
        )?;
        st.serialize_field("measured", &self.measured)?;
        st.end()
    }
}

fn serialize_bound<S: SerializeStruct>(
    st: &mut S,
    name: &'static str,
    reason_name: &'static str,
    bound: &BoundValue,
) -> std::result::Result<(), S::Error> {
    st.serialize_field(name, &bound.value())?;
    match bound.reason() {
        Some(r) => st.serialize_field(reason_name, r)?,
        None => st.skip_field(reason_name)?,
    }
    Ok(())
}

/// Compute every bound for a constant generator and assemble the report.
/// The combined entry is `max(mt, ml)` for PSD generators, `mt` otherwise.
pub fn combined_bound(
    rho: &DensityMatrix,
    h: &ComplexMatrix,
    t_total: f64,
    hbar: f64,
) -> Result<BoundReport> {
    if t_total <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "evolution time must be positive, got {t_total}"
        )));
    }
    let u = propagator(h, t_total, hbar)?;
    let z = rho.matrix().trace_mul(&u);
    let pv = visibility_phase(rho, &u)?;
    let s0 = 2.0 * pv.visibility.acos();
    let delta_h = orbit::energy_uncertainty(rho, h)?;
    let mean_h = rho.matrix().trace_mul(h).re;
    let dist = energy_distribution(rho, h)?;
    let e_de = aadm(&dist);
    let eig = hermitian_eig(h)?;
    let h_psd = *eig.values.first().expect("non-empty spectrum") >= -TOL_PSD;

    let mt = angle_over_speed(s0, delta_h, hbar);
    let mt_bound = BoundValue::from_value(mt, "zero energy uncertainty with nonzero angle");

    let ml_bound = if h_psd {
        match ml_bound(rho, h, t_total, hbar) {
            Ok(v) => BoundValue::Finite(v),
            Err(Error::ZeroMeanEnergy) => BoundValue::Finite(0.0),
            Err(e) => return Err(e),
        }
    } else {
        BoundValue::absent("generator is not positive semi-definite")
    };

    let combined_bound = match (&mt_bound, &ml_bound) {
        (BoundValue::Infinite { reason }, _) => BoundValue::Infinite {
            reason: reason.clone(),
        },
        (BoundValue::Finite(mt), BoundValue::Finite(ml)) => BoundValue::Finite(mt.max(*ml)),
        (BoundValue::Finite(mt), _) => BoundValue::Finite(*mt),
        (BoundValue::Absent { reason }, _) => BoundValue::Absent {
            reason: reason.clone(),
        },
    };

    let chau = chau_bounds(rho, h, t_total, hbar)?;
    let chau_bound = match chau.chau {
        Some(v) => BoundValue::Finite(v),
        None => BoundValue::absent("needs a PSD generator with nonzero mean |E|"),
    };
    let improved_chau_bound = match chau.improved {
        Some(v) => BoundValue::Finite(v),
        None => BoundValue::absent("degenerate energy distribution (E_DE = 0)"),
    };

    let baseline = bures_baseline_bound(rho, h, t_total, hbar)?;
    let rho_t = rho.evolved(&u);
    let theta_b = bures_angle(rho, &rho_t)?;

    Ok(BoundReport {
        t_total,
        hbar,
        dim: rho.dim(),
        visibility: pv.visibility,
        phase: pv.phase,
        bargmann_angle: s0,
        bures_angle: theta_b,
        delta_h,
        mean_h,
        re_part: z.re,
        im_part: z.im,
        e_de,
        h_psd,
        mt_bound,
        ml_bound,
        combined_bound,
        chau_bound,
        improved_chau_bound,
        bures_baseline_bound: BoundValue::from_value(
            baseline,
            "zero energy uncertainty with nonzero Bures angle",
        ),
        measured: None,
    })
}
