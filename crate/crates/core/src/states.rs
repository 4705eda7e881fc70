//! Validated state and Hamiltonian types: density matrices, Bloch
//! parametrization, purification, and piecewise Hamiltonian schedules.

use serde::{Deserialize, Serialize};

use crate::eig::{hermitian_eig, sqrt_psd_with, EigenSystem};
use crate::error::{Error, Result};
use crate::matrix::{dot_pauli, pauli, C64, ComplexMatrix, Subsystem};
use crate::tolerance::Tolerances;

/// A density matrix: Hermitian, unit trace, positive semi-definite
/// (within the tolerances used at construction).
///
/// Degenerate and pure states are accepted; every formula in this crate is
/// well defined for them.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate a raw matrix as a state, naming the violated axiom on failure.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::new_with(mat, &Tolerances::DEFAULT)
    }

    pub fn new_with(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        mat.check_hermitian(tol.herm)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        let eig = hermitian_eig_of_symmetrized(&mat)?;
        if let Some(&min) = eig.values.first() {
            if min < -tol.psd {
                return Err(Error::NotPsd { min_eig: min });
            }
        }
        Ok(Self {
            mat: mat.symmetrize(),
        })
    }

    /// Qubit state `(I + r·σ)/2` from a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::BlochOutOfBall { norm });
        }
        let mat = ComplexMatrix::identity(2)
            .add(&dot_pauli(r))
            .scale(C64::new(0.5, 0.0));
        Ok(Self { mat })
    }

    /// Pure state |psi><psi| from a (not necessarily normalized) vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let mat = ComplexMatrix::outer(psi, psi).scale(C64::new(1.0 / norm_sq, 0.0));
        Ok(Self { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Bloch vector `r_i = Tr(rho sigma_i)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim(),
            });
        }
        let [sx, sy, sz] = pauli();
        Ok([
            self.mat.trace_mul(&sx).re,
            self.mat.trace_mul(&sy).re,
            self.mat.trace_mul(&sz).re,
        ])
    }

    /// Conjugate by a unitary: `U rho U†`. The unitarity of `u` is the
    /// caller's responsibility here; orbit-level entry points check it.
    pub fn evolved(&self, u: &ComplexMatrix) -> Self {
        Self {
            mat: self.mat.conjugate_by(u).symmetrize(),
        }
    }

    /// Eigenvalues clamped to [0, 1] plus eigenvectors. The clamped values
    /// still sum to one within validation tolerance.
    pub fn spectral_decompose(&self) -> Result<EigenSystem> {
        let mut eig = hermitian_eig(&self.mat)?;
        for w in eig.values.iter_mut() {
            *w = w.clamp(0.0, 1.0);
        }
        Ok(eig)
    }

    /// Largest eigenvalue above `1 - 1e-9` means the state is pure.
    pub fn is_pure(&self) -> Result<bool> {
        let eig = self.spectral_decompose()?;
        Ok(*eig.values.last().unwrap() > 1.0 - 1e-9)
    }

    /// Standard purification `(sqrt(rho) ⊗ I) Σ_i |i i>` on a doubled space.
    pub fn purify(&self) -> Result<PurifiedState> {
        self.purify_with_unitaries(None, None)
    }

    /// Purification `(sqrt(rho) V_A ⊗ V_B) Σ_i |i i>` with optional local
    /// unitaries. All orbit quantities derived from a purification are
    /// invariant under this choice, which the property suite checks.
    pub fn purify_with_unitaries(
        &self,
        v_a: Option<&ComplexMatrix>,
        v_b: Option<&ComplexMatrix>,
    ) -> Result<PurifiedState> {
        let d = self.dim();
        let sqrt = sqrt_psd_with(&self.mat, Tolerances::DEFAULT.psd)?;
        let left = match v_a {
            Some(va) => {
                if va.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: va.dim(),
                    });
                }
                sqrt.mul(va)
            }
            None => sqrt,
        };
        let mut vec = vec![C64::ZERO; d * d];
        // (L ⊗ R) Σ_i |i i> has amplitudes (L ⊗ R)[(a,b),(i,i)] = L[a,i] R[b,i].
        for a in 0..d {
            for b in 0..d {
                let mut acc = C64::ZERO;
                for i in 0..d {
                    let r = match v_b {
                        Some(vb) => vb[(b, i)],
                        None => {
                            if b == i {
                                C64::ONE
                            } else {
                                C64::ZERO
                            }
                        }
                    };
                    acc += left[(a, i)] * r;
                }
                vec[a * d + b] = acc;
            }
        }
        Ok(PurifiedState { vec, dim: d })
    }
}

/// A pure state on `H_A ⊗ H_B` with `d_A = d_B` whose B-trace is a source
/// density matrix.
#[derive(Debug, Clone)]
pub struct PurifiedState {
    vec: Vec<C64>,
    dim: usize,
}

impl PurifiedState {
    pub fn vector(&self) -> &[C64] {
        &self.vec
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    pub fn norm(&self) -> f64 {
        self.vec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reduced state on A.
    pub fn reduce(&self) -> Result<DensityMatrix> {
        let proj = ComplexMatrix::outer(&self.vec, &self.vec);
        let red = proj.partial_trace((self.dim, self.dim), Subsystem::A)?;
        DensityMatrix::new(red)
    }

    /// Inner product `<self | (U ⊗ I) self>`.
    pub fn overlap_after(&self, u: &ComplexMatrix) -> Result<C64> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.dim(),
            });
        }
        let d = self.dim;
        let mut acc = C64::ZERO;
        for a in 0..d {
            for b in 0..d {
                let mut moved = C64::ZERO;
                for ap in 0..d {
                    moved += u[(a, ap)] * self.vec[ap * d + b];
                }
                acc += self.vec[a * d + b].conj() * moved;
            }
        }
        Ok(acc)
    }
}

/// Validate a raw matrix as a density matrix with default tolerances.
pub fn validate_density(mat: ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(mat)
}

fn hermitian_eig_of_symmetrized(mat: &ComplexMatrix) -> Result<EigenSystem> {
    hermitian_eig(&mat.symmetrize())
}

/// Time-independent or piecewise-sampled Hermitian generator with its hbar.
#[derive(Debug, Clone)]
pub enum HamiltonianSchedule {
    Constant {
        h: ComplexMatrix,
        hbar: f64,
    },
    Sampled {
        samples: Vec<(f64, ComplexMatrix)>,
        hbar: f64,
    },
}

impl HamiltonianSchedule {
    pub fn constant(h: ComplexMatrix, hbar: f64) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::NonPositiveHbar(hbar));
        }
        h.check_hermitian(Tolerances::DEFAULT.herm)?;
        Ok(Self::Constant { h, hbar })
    }

    pub fn sampled(samples: Vec<(f64, ComplexMatrix)>, hbar: f64) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::NonPositiveHbar(hbar));
        }
        if samples.is_empty() {
            return Err(Error::EmptySchedule);
        }
        let dim = samples[0].1.dim();
        for (_, h) in &samples {
            h.check_hermitian(Tolerances::DEFAULT.herm)?;
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::NonMonotonicSchedule);
        }
        Ok(Self::Sampled { samples, hbar })
    }

    pub fn hbar(&self) -> f64 {
        match self {
            Self::Constant { hbar, .. } | Self::Sampled { hbar, .. } => *hbar,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Constant { h, .. } => h.dim(),
            Self::Sampled { samples, .. } => samples[0].1.dim(),
        }
    }
}

/// Wire format for states: either a full matrix or a qubit Bloch vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Bloch { bloch: [f64; 3] },
    Matrix(ComplexMatrix),
}

impl StateSpec {
    pub fn build(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        match self {
            StateSpec::Bloch { bloch } => DensityMatrix::from_bloch(*bloch),
            StateSpec::Matrix(m) => DensityMatrix::new_with(m.clone(), tol),
        }
    }
}

/// Wire format for schedules: `{"constant": M, "hbar": x}` or
/// `{"samples": [[t, M], ...], "hbar": x}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<(f64, ComplexMatrix)>>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_hbar() -> f64 {
    1.0
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<HamiltonianSchedule> {
        match (&self.constant, &self.samples) {
            (Some(h), None) => HamiltonianSchedule::constant(h.clone(), self.hbar),
            (None, Some(s)) => HamiltonianSchedule::sampled(s.clone(), self.hbar),
            _ => Err(Error::InvalidInput(
                "schedule must have exactly one of `constant` or `samples`".into(),
            )),
        }
    }
}
