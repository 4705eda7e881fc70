//! The operation-dependent metric along unitary orbits: visibility, relative
//! phase, orbit distance, Bargmann angle, quantum speed, and path length.
//!
//! The central quantity is the complex amplitude `Tr(rho U)`. Its modulus is
//! the fringe visibility between a state and its unitary image, its argument
//! is the relative phase, and `D² = 4(1 - V²)` is the squared orbit distance.
//! `D` is a genuine metric on purifications and a pseudo-distance on the
//! original space: cyclic evolutions can have `D > 0` with identical
//! endpoints.

use crate::eig::propagator;
use crate::error::{Error, Result};
use crate::matrix::{C64, ComplexMatrix};
use crate::states::{DensityMatrix, HamiltonianSchedule};
use crate::tolerance::TOL_UNIT;

/// Visibility in [0, 1] and relative phase in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVisibility {
    pub visibility: f64,
    pub phase: f64,
}

/// A point on a unitary orbit: the evolved state together with the unitary
/// relating it to the orbit origin.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    rho: DensityMatrix,
    u: ComplexMatrix,
}

impl OrbitPoint {
    /// Evolve `origin` by `u`, checking unitarity.
    pub fn new(origin: &DensityMatrix, u: ComplexMatrix) -> Result<Self> {
        if u.dim() != origin.dim() {
            return Err(Error::DimensionMismatch {
                expected: origin.dim(),
                got: u.dim(),
            });
        }
        u.check_unitary(TOL_UNIT)?;
        Ok(Self {
            rho: origin.evolved(&u),
            u,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }
}

/// Raw interference amplitude `Tr(rho U)` after dimension/unitarity checks.
pub fn amplitude(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<C64> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u.dim(),
        });
    }
    u.check_unitary(TOL_UNIT)?;
    Ok(rho.matrix().trace_mul(u))
}

/// Visibility `V = |Tr(rho U)|` (clamped into [0,1]) and phase
/// `Arg Tr(rho U)`, with the phase defined as 0 when the visibility vanishes.
pub fn visibility_phase(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<PhaseVisibility> {
    let z = amplitude(rho, u)?;
    let v = z.norm().clamp(0.0, 1.0);
    let phase = if v < 1e-14 { 0.0 } else { z.arg() };
    Ok(PhaseVisibility {
        visibility: v,
        phase,
    })
}

/// Orbit distance `D = 2 sqrt(1 - V²)`, in [0, 2].
pub fn orbit_distance(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<f64> {
    let v = visibility_phase(rho, u)?.visibility;
    Ok(2.0 * (1.0 - v * v).max(0.0).sqrt())
}

/// Bargmann angle `s0 = 2 arccos V`, in [0, pi].
pub fn bargmann_angle(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<f64> {
    let v = visibility_phase(rho, u)?.visibility;
    Ok(2.0 * v.acos())
}

/// Energy uncertainty `sqrt(Tr(rho H²) - Tr(rho H)²)` in the given state.
pub fn energy_uncertainty(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: h.dim(),
        });
    }
    h.check_hermitian(crate::tolerance::TOL_HERM)?;
    let mean = rho.matrix().trace_mul(h).re;
    let mean_sq = rho.matrix().trace_mul(&h.mul(h)).re;
    Ok((mean_sq - mean * mean).max(0.0).sqrt())
}

/// Metric speed of the state along its orbit: `v = 2 ΔH / hbar`.
pub fn quantum_speed(rho: &DensityMatrix, h: &ComplexMatrix, hbar: f64) -> Result<f64> {
    if hbar <= 0.0 {
        return Err(Error::NonPositiveHbar(hbar));
    }
    Ok(2.0 * energy_uncertainty(rho, h)? / hbar)
}

/// Result of integrating a schedule: the total propagator over the window,
/// the path length, and the time-averaged energy uncertainty.
#[derive(Debug, Clone)]
pub struct ScheduleEvolution {
    pub u_total: ComplexMatrix,
    pub path_length: f64,
    pub avg_delta_h: f64,
}

/// Path length `(2/hbar) ∫ ΔH dt` along the orbit traced from `rho0`.
///
/// Constant schedules integrate exactly (`ΔH` is conserved under its own
/// propagator). Sampled schedules use composite Simpson per sample interval,
/// with the state advanced by the interval's midpoint Hamiltonian.
pub fn path_length(
    rho0: &DensityMatrix,
    sched: &HamiltonianSchedule,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    Ok(evolve_schedule(rho0, sched, t1, t2)?.path_length)
}

pub fn evolve_schedule(
    rho0: &DensityMatrix,
    sched: &HamiltonianSchedule,
    t1: f64,
    t2: f64,
) -> Result<ScheduleEvolution> {
    if t2 <= t1 {
        return Err(Error::InvalidInput(format!(
            "need t2 > t1, got [{t1}, {t2}]"
        )));
    }
    if sched.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            got: sched.dim(),
        });
    }
    let hbar = sched.hbar();
    match sched {
        HamiltonianSchedule::Constant { h, .. } => {
            let v = quantum_speed(rho0, h, hbar)?;
            let dt = t2 - t1;
            Ok(ScheduleEvolution {
                u_total: propagator(h, dt, hbar)?,
                path_length: v * dt,
                avg_delta_h: v * hbar / 2.0,
            })
        }
        HamiltonianSchedule::Sampled { samples, .. } => {
            let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
            if t1 < lo - 1e-12 || t2 > hi + 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "integration window [{t1}, {t2}] outside sampled range [{lo}, {hi}]"
                )));
            }
            // Breakpoints: t1, interior sample times, t2.
            let mut ts = vec![t1];
            ts.extend(
                samples
                    .iter()
                    .map(|(t, _)| *t)
                    .filter(|&t| t > t1 + 1e-15 && t < t2 - 1e-15),
            );
            ts.push(t2);

            let h_at = |t: f64| interp_h(samples, t);
            let mut rho = rho0.clone();
            let mut path = 0.0;
            let mut u_total = ComplexMatrix::identity(rho0.dim());
            for w in ts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let dt = b - a;
                let h_a = h_at(a);
                let h_m = h_at(0.5 * (a + b));
                let h_b = h_at(b);
                let u_half = propagator(&h_m, 0.5 * dt, hbar)?;
                let rho_m = rho.evolved(&u_half);
                let rho_b = rho_m.evolved(&u_half);
                let va = quantum_speed(&rho, &h_a, hbar)?;
                let vm = quantum_speed(&rho_m, &h_m, hbar)?;
                let vb = quantum_speed(&rho_b, &h_b, hbar)?;
                path += dt / 6.0 * (va + 4.0 * vm + vb);
                u_total = u_half.mul(&u_half).mul(&u_total);
                rho = rho_b;
            }
            Ok(ScheduleEvolution {
                u_total,
                path_length: path,
                avg_delta_h: path * hbar / (2.0 * (t2 - t1)),
            })
        }
    }
}

fn interp_h(samples: &[(f64, ComplexMatrix)], t: f64) -> ComplexMatrix {
    if t <= samples[0].0 {
        return samples[0].1.clone();
    }
    if t >= samples[samples.len() - 1].0 {
        return samples[samples.len() - 1].1.clone();
    }
    let i = samples.partition_point(|(ti, _)| *ti <= t) - 1;
    let (t0, h0) = &samples[i];
    let (t1, h1) = &samples[i + 1];
    let w = (t - t0) / (t1 - t0);
    h0.scale(C64::new(1.0 - w, 0.0))
        .add(&h1.scale(C64::new(w, 0.0)))
}
