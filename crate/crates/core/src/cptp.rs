//! Completely positive trace-preserving evolutions: Kraus application,
//! dilation to a system-ancilla unitary, the effective-generator speed, and
//! the evolution-time bound it implies.
//!
//! A channel dilated from `H_AB` with ancilla prepared in `|nu>` has Kraus
//! operators `E_k = <k| U_AB(T) |nu>`. The diagonal block `E_nu` carries the
//! transition amplitude `Tr(rho E_nu)` whose modulus plays the role of the
//! visibility; the speed comes from the ancilla blocks of `H_AB` and
//! `H_AB²` (note these blocks do not commute with squaring, so the speed is
//! not an uncertainty of the effective generator). Unlike the unitary case,
//! the bound is not symmetric between initial and final states.

use serde::{Deserialize, Serialize};

use crate::eig::propagator;
use crate::error::{Error, Result};
use crate::matrix::{C64, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::Tolerances;

const KRAUS_TOL: f64 = 1e-9;
const EPS_DENOM: f64 = 1e-14;

/// A finite Kraus set `{E_k}` with completeness `Σ E†E = I` certified at
/// construction. Near-zero operators are retained so indices keep tracking
/// the ancilla basis they came from.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<ComplexMatrix>,
    dim: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidInput("empty Kraus set".into()));
        }
        let dim = kraus[0].dim();
        if kraus.iter().any(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: kraus.iter().map(|e| e.dim()).find(|&d| d != dim).unwrap(),
            });
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for e in &kraus {
            sum = sum.add(&e.dagger().mul(e));
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > KRAUS_TOL {
            return Err(Error::IncompleteKraus { max_dev: dev });
        }
        Ok(Self { kraus, dim })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Apply the channel: `rho -> Σ E_k rho E_k†`.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            got: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(ch.dim);
    for e in &ch.kraus {
        out = out.add(&rho.matrix().conjugate_by(e));
    }
    DensityMatrix::new_with(out, &Tolerances::DEFAULT)
}

/// Initial ancilla preparation for a dilation: a basis state `|nu>` (the
/// primary construction) or an arbitrary normalized vector.
#[derive(Debug, Clone)]
pub enum AncillaState {
    Basis(usize),
    Vector(Vec<C64>),
}

/// A system-ancilla generator defining a one-parameter channel family
/// through `rho -> Tr_B[U_AB (rho ⊗ |e><e|) U_AB†]`.
#[derive(Debug, Clone)]
pub struct DilatedSystem {
    h_ab: ComplexMatrix,
    dims: (usize, usize),
    ancilla: AncillaState,
    hbar: f64,
}

impl DilatedSystem {
    pub fn new(
        h_ab: ComplexMatrix,
        dims: (usize, usize),
        ancilla_index: usize,
        hbar: f64,
    ) -> Result<Self> {
        Self::with_ancilla(h_ab, dims, AncillaState::Basis(ancilla_index), hbar)
    }

    pub fn with_ancilla(
        h_ab: ComplexMatrix,
        dims: (usize, usize),
        ancilla: AncillaState,
        hbar: f64,
    ) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::NonPositiveHbar(hbar));
        }
        let (da, db) = dims;
        if da * db != h_ab.dim() {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                got: h_ab.dim(),
            });
        }
        h_ab.check_hermitian(Tolerances::DEFAULT.herm)?;
        let ancilla = match ancilla {
            AncillaState::Basis(nu) => {
                if nu >= db {
                    return Err(Error::AncillaOutOfRange { index: nu, dim: db });
                }
                AncillaState::Basis(nu)
            }
            AncillaState::Vector(v) => {
                if v.len() != db {
                    return Err(Error::DimensionMismatch {
                        expected: db,
                        got: v.len(),
                    });
                }
                let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if norm < EPS_DENOM {
                    return Err(Error::InvalidInput("zero ancilla vector".into()));
                }
                AncillaState::Vector(v.iter().map(|c| c / norm).collect())
            }
        };
        Ok(Self {
            h_ab,
            dims,
            ancilla,
            hbar,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.h_ab
    }

    /// The ancilla preparation as an explicit vector.
    pub fn ancilla_vector(&self) -> Vec<C64> {
        match &self.ancilla {
            AncillaState::Basis(nu) => basis_vector(self.dims.1, *nu),
            AncillaState::Vector(v) => v.clone(),
        }
    }

    /// Joint initial state `rho ⊗ |e><e|`.
    pub fn joint_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dims.0 {
            return Err(Error::DimensionMismatch {
                expected: self.dims.0,
                got: rho.dim(),
            });
        }
        let e = self.ancilla_vector();
        let proj = ComplexMatrix::outer(&e, &e);
        DensityMatrix::new_with(rho.matrix().kron(&proj), &Tolerances::DEFAULT)
    }

    /// Joint propagator `U_AB(T)`.
    pub fn unitary(&self, t: f64) -> Result<ComplexMatrix> {
        propagator(&self.h_ab, t, self.hbar)
    }

    /// The effective operator `<e| U_AB(T) |e>_B` whose trace against `rho`
    /// is the transition amplitude of the dilated evolution.
    pub fn effective_operator(&self, t: f64) -> Result<ComplexMatrix> {
        let u = self.unitary(t)?;
        let e = self.ancilla_vector();
        u.ancilla_block(self.dims, &e, &e)
    }
}

fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::ZERO; dim];
    v[index] = C64::ONE;
    v
}

/// Kraus operators `E_k = <k| U_AB(T) |e>` of the dilated channel at time
/// `T`. One operator per ancilla basis state, zero blocks retained.
pub fn dilate(sys: &DilatedSystem, t: f64) -> Result<KrausChannel> {
    let u = sys.unitary(t)?;
    let e = sys.ancilla_vector();
    let (_, db) = sys.dims;
    let mut kraus = Vec::with_capacity(db);
    for k in 0..db {
        kraus.push(u.ancilla_block(sys.dims, &basis_vector(db, k), &e)?);
    }
    KrausChannel::new(kraus)
}

/// Metric speed of the system state under the dilated evolution:
/// `v = (2/hbar) sqrt(Tr(rho Ht2) - Tr(rho Ht)^2)` with `Ht = <e|H_AB|e>_B`
/// and `Ht2 = <e|H_AB²|e>_B`.
pub fn effective_speed(rho: &DensityMatrix, sys: &DilatedSystem) -> Result<f64> {
    if rho.dim() != sys.dims.0 {
        return Err(Error::DimensionMismatch {
            expected: sys.dims.0,
            got: rho.dim(),
        });
    }
    let e = sys.ancilla_vector();
    let h_eff = sys.h_ab.ancilla_block(sys.dims, &e, &e)?;
    let h2_eff = sys.h_ab.mul(&sys.h_ab).ancilla_block(sys.dims, &e, &e)?;
    let mean = rho.matrix().trace_mul(&h_eff).re;
    let mean_sq = rho.matrix().trace_mul(&h2_eff).re;
    Ok(2.0 / sys.hbar * (mean_sq - mean * mean).max(0.0).sqrt())
}

/// Evolution-time bound `(2/v) arccos |Tr(rho E_e(T))|` for the dilated
/// channel. Zero-angle instances return 0; zero speed with a nonzero angle
/// returns the infinite sentinel (the dilation produces no first-order
/// motion).
pub fn cptp_bound(rho: &DensityMatrix, sys: &DilatedSystem, t: f64) -> Result<f64> {
    let e_eff = sys.effective_operator(t)?;
    let v_nu = rho.matrix().trace_mul(&e_eff).norm().clamp(0.0, 1.0);
    let s0 = 2.0 * v_nu.acos();
    let speed = effective_speed(rho, sys)?;
    if s0 <= 0.0 {
        Ok(0.0)
    } else if speed < EPS_DENOM {
        Ok(f64::INFINITY)
    } else {
        Ok(s0 / speed)
    }
}

/// Closed form of [`cptp_bound`] for the canonical two-qubit generator
/// `H = Σ_i mu_i sigma_i ⊗ sigma_i`, ancilla `|0>`, and a system state with
/// Bloch vector `(0, 0, r3)`:
///
/// `T >= hbar arccos(K) / sqrt(mu1² + mu2² + mu3²(1 - r3²) - 2 mu1 mu2 r3)`
///
/// with `K` the amplitude modulus assembled from `theta_i = mu_i T / hbar`.
pub fn canonical_bound(mu: [f64; 3], r3: f64, t: f64, hbar: f64) -> Result<f64> {
    if hbar <= 0.0 {
        return Err(Error::NonPositiveHbar(hbar));
    }
    if r3.abs() > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfBall { norm: r3.abs() });
    }
    let th: Vec<f64> = mu.iter().map(|m| m * t / hbar).collect();
    let (c1, c2, c3) = (th[0].cos(), th[1].cos(), th[2].cos());
    let (s1, s2, s3) = (th[0].sin(), th[1].sin(), th[2].sin());
    let re = c1 * c2 * c3 + r3 * s1 * s2 * c3;
    let im = s1 * s2 * s3 + r3 * c1 * c2 * s3;
    let k = (re * re + im * im).sqrt().clamp(0.0, 1.0);
    let angle = k.acos();
    if angle <= 0.0 {
        return Ok(0.0);
    }
    let den_sq = mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3)
        - 2.0 * mu[0] * mu[1] * r3;
    let den = den_sq.max(0.0).sqrt();
    if den < EPS_DENOM {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(hbar * angle / den)
}

/// Builds the canonical two-qubit dilated system for `mu` and ancilla `|0>`.
pub fn canonical_system(mu: [f64; 3], hbar: f64) -> Result<DilatedSystem> {
    let paulis = crate::matrix::pauli();
    let mut h = ComplexMatrix::zeros(4);
    for (m, s) in mu.iter().zip(&paulis) {
        h = h.add(&s.kron(s).scale(C64::new(*m, 0.0)));
    }
    DilatedSystem::new(h, (2, 2), 0, hbar)
}

/// Wire format for dilated systems:
/// `{"H_AB": matrix, "dB": n, "nu": k, "hbar": x}`, with an optional
/// `"ancilla"` vector of `[re, im]` pairs replacing `nu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationSpec {
    #[serde(rename = "H_AB")]
    pub h_ab: ComplexMatrix,
    #[serde(rename = "dB")]
    pub d_b: usize,
    #[serde(default)]
    pub nu: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_hbar() -> f64 {
    1.0
}

impl DilationSpec {
    pub fn build(&self) -> Result<DilatedSystem> {
        if self.d_b == 0 || !self.h_ab.dim().is_multiple_of(self.d_b) {
            return Err(Error::InvalidInput(format!(
                "ancilla dimension {} does not divide the joint dimension {}",
                self.d_b,
                self.h_ab.dim()
            )));
        }
        let da = self.h_ab.dim() / self.d_b;
        let ancilla = match &self.ancilla {
            Some(v) => AncillaState::Vector(v.iter().map(|[re, im]| C64::new(*re, *im)).collect()),
            None => AncillaState::Basis(self.nu),
        };
        DilatedSystem::with_ancilla(self.h_ab.clone(), (da, self.d_b), ancilla, self.hbar)
    }
}

/// Wire format for channels: `{"kraus": [matrix, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kraus: Vec<ComplexMatrix>,
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{dot_pauli, Subsystem};
    use crate::states::DensityMatrix;

    #[test]
    fn identity_channel() {
        let ch = KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let rho = DensityMatrix::from_bloch([0.3, 0.2, -0.1]).unwrap();
        let out = apply_channel(&rho, &ch).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn dephasing_channel_kills_coherences() {
        let e0 = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let e1 = ComplexMatrix::from_diag(&[0.0, 1.0]);
        let ch = KrausChannel::new(vec![e0, e1]).unwrap();
        let rho = DensityMatrix::from_bloch([0.6, 0.0, 0.5]).unwrap();
        let out = apply_channel(&rho, &ch).unwrap();
        assert!(out.matrix()[(0, 1)].norm() < 1e-12);
        assert!((out.matrix()[(0, 0)].re - rho.matrix()[(0, 0)].re).abs() < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = ComplexMatrix::identity(2).scale(C64::new(0.9, 0.0));
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn dilate_zero_generator() {
        let sys = DilatedSystem::new(ComplexMatrix::zeros(4), (2, 2), 0, 1.0).unwrap();
        let ch = dilate(&sys, 1.3).unwrap();
        assert!(ch.operators()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(ch.operators()[1].max_abs_entry() < 1e-12);
    }

    #[test]
    fn dilate_local_generator_is_unitary_evolution() {
        // H_A ⊗ I_B: the ancilla is a spectator and E_nu = exp(-i H_A T).
        let h_a = dot_pauli([0.3, -0.5, 0.7]);
        let h_ab = h_a.kron(&ComplexMatrix::identity(2));
        let sys = DilatedSystem::new(h_ab, (2, 2), 0, 1.0).unwrap();
        let t = 0.9;
        let ch = dilate(&sys, t).unwrap();
        let u_a = propagator(&h_a, t, 1.0).unwrap();
        assert!(ch.operators()[0].max_abs_diff(&u_a) < 1e-10);
        assert!(ch.operators()[1].max_abs_entry() < 1e-10);

        // Speed collapses to the unitary one and the bound to the
        // uncertainty bound.
        let rho = DensityMatrix::from_bloch([0.0, 0.4, 0.2]).unwrap();
        let v = effective_speed(&rho, &sys).unwrap();
        let v_unitary = crate::orbit::quantum_speed(&rho, &h_a, 1.0).unwrap();
        assert!((v - v_unitary).abs() < 1e-10);
        let bound = cptp_bound(&rho, &sys, t).unwrap();
        let mt = crate::bounds::mt_bound_constant(&rho, &h_a, t, 1.0).unwrap();
        assert!((bound - mt).abs() < 1e-10);
    }

    #[test]
    fn dilation_consistency_with_partial_trace() {
        // Channel output matches Tr_B[U (rho ⊗ |nu><nu|) U†].
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for &(da, db) in &[(2usize, 2usize), (3, 2)] {
            let n = da * db;
            let g = ComplexMatrix::from_fn(n, |_, _| C64::new(next(), next()));
            let h_ab = g.add(&g.dagger()).scale(C64::new(0.5, 0.0));
            let sys = DilatedSystem::new(h_ab, (da, db), db - 1, 1.0).unwrap();
            let g2 = ComplexMatrix::from_fn(da, |_, _| C64::new(next(), next()));
            let psd = g2.mul(&g2.dagger());
            let rho =
                DensityMatrix::new(psd.scale(C64::new(1.0 / psd.trace().re, 0.0))).unwrap();

            let t = 0.8;
            let ch = dilate(&sys, t).unwrap();
            let via_kraus = apply_channel(&rho, &ch).unwrap();

            let joint = sys.joint_state(&rho).unwrap();
            let u = sys.unitary(t).unwrap();
            let evolved = joint.evolved(&u);
            let reduced = evolved
                .matrix()
                .partial_trace((da, db), Subsystem::A)
                .unwrap();
            assert!(via_kraus.matrix().max_abs_diff(&reduced) < 1e-9);
        }
    }

    #[test]
    fn effective_speed_zero_generator() {
        let sys = DilatedSystem::new(ComplexMatrix::zeros(4), (2, 2), 0, 1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(effective_speed(&rho, &sys).unwrap() < 1e-14);
        assert_eq!(cptp_bound(&rho, &sys, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bound_vanishes_at_zero_time() {
        let sys = canonical_system([0.7, -0.2, 0.4], 1.0).unwrap();
        let rho = DensityMatrix::from_bloch([0.0, 0.0, 0.3]).unwrap();
        // arccos near 1 resolves to ~1e-8 in f64; the bound is zero up to that.
        assert!(cptp_bound(&rho, &sys, 0.0).unwrap() < 1e-7);
    }

    #[test]
    fn canonical_speed_closed_form() {
        let mu = [0.7, -0.4, 1.1];
        let r3 = 0.35;
        let sys = canonical_system(mu, 1.0).unwrap();
        let rho = DensityMatrix::from_bloch([0.0, 0.0, r3]).unwrap();
        let v = effective_speed(&rho, &sys).unwrap();
        let expect = 2.0
            * (mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3)
                - 2.0 * mu[0] * mu[1] * r3)
                .sqrt();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn canonical_bound_matches_dilation() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let mu = [next() * 3.0 - 1.5, next() * 3.0 - 1.5, next() * 3.0 - 1.5];
            let r3 = next() * 2.0 - 1.0;
            let t = 0.05 + next() * 6.0;
            let closed = canonical_bound(mu, r3, t, 1.0).unwrap();
            let sys = canonical_system(mu, 1.0).unwrap();
            let rho = DensityMatrix::from_bloch([0.0, 0.0, r3]).unwrap();
            let numeric = cptp_bound(&rho, &sys, t).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-9,
                "mu={mu:?} r3={r3} t={t}: {closed} vs {numeric}"
            );
            assert!(closed <= t + 1e-9);
        }
    }

    #[test]
    fn canonical_bound_trivial_cases() {
        assert_eq!(canonical_bound([0.0, 0.0, 0.0], 0.3, 1.0, 1.0).unwrap(), 0.0);
        // theta1 = theta3 = pi reduction.
        let t = 2.0;
        let mu1 = std::f64::consts::PI / t;
        for th2 in [0.1, 0.7, std::f64::consts::FRAC_PI_2] {
            let mu = [mu1, th2 / t, mu1];
            let r3 = 0.37;
            let closed = canonical_bound(mu, r3, t, 1.0).unwrap();
            let den = (mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2] * (1.0 - r3 * r3)
                - 2.0 * mu[0] * mu[1] * r3)
                .sqrt();
            assert!((closed - th2 / den).abs() < 1e-12);
        }
    }

    #[test]
    fn purified_amplitude_equality() {
        // |Tr(rho E_nu)| equals |Tr(rho_AB U_AB)| for the joint state.
        let mu = [0.9, 0.2, -0.6];
        let sys = canonical_system(mu, 1.0).unwrap();
        let rho = DensityMatrix::from_bloch([0.0, 0.0, -0.25]).unwrap();
        let t = 1.7;
        let e_eff = sys.effective_operator(t).unwrap();
        let lhs = rho.matrix().trace_mul(&e_eff).norm();
        let joint = sys.joint_state(&rho).unwrap();
        let u = sys.unitary(t).unwrap();
        let rhs = joint.matrix().trace_mul(&u).norm();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn arbitrary_ancilla_vector_reduces_to_basis() {
        let mu = [0.5, 0.3, 0.8];
        let h = canonical_system(mu, 1.0).unwrap().generator().clone();
        let basis = DilatedSystem::new(h.clone(), (2, 2), 1, 1.0).unwrap();
        let vector = DilatedSystem::with_ancilla(
            h,
            (2, 2),
            AncillaState::Vector(vec![C64::ZERO, C64::new(2.0, 0.0)]), // normalized inside
            1.0,
        )
        .unwrap();
        let rho = DensityMatrix::from_bloch([0.1, 0.0, 0.4]).unwrap();
        let t = 0.6;
        let a = cptp_bound(&rho, &basis, t).unwrap();
        let b = cptp_bound(&rho, &vector, t).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn dilation_spec_wire_format() {
        let mu = [0.5, 0.3, 0.8];
        let sys = canonical_system(mu, 1.0).unwrap();
        let spec = DilationSpec {
            h_ab: sys.generator().clone(),
            d_b: 2,
            nu: 0,
            ancilla: None,
            hbar: 1.0,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"H_AB\""));
        assert!(text.contains("\"dB\":2"));
        let back: DilationSpec = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.dims(), (2, 2));
    }
}
