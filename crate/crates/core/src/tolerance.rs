//! Validation tolerances, each overridable through [`Tolerances`].

/// Hermiticity check: absolute, on the max entry of |M - M†|.
pub const TOL_HERM: f64 = 1e-10;
/// Unitarity check: absolute, on the max entry of |U†U - I|.
pub const TOL_UNIT: f64 = 1e-9;
/// Positive semi-definiteness: eigenvalues above -TOL_PSD are clamped to zero.
pub const TOL_PSD: f64 = 1e-10;
/// Spectral reconstruction error V diag(w) V† vs the input.
pub const TOL_RECON: f64 = 1e-9;
/// Eigenvalues closer than this are merged into one spectral projector.
pub const TOL_DEGENERACY: f64 = 1e-9;
/// Trace-one check for density matrices.
pub const TOL_TRACE: f64 = 1e-10;

/// Tolerance bundle threaded through validating constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub unit: f64,
    pub psd: f64,
    pub recon: f64,
    pub degeneracy: f64,
    pub trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            unit: TOL_UNIT,
            psd: TOL_PSD,
            recon: TOL_RECON,
            degeneracy: TOL_DEGENERACY,
            trace: TOL_TRACE,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: TOL_HERM,
        unit: TOL_UNIT,
        psd: TOL_PSD,
        recon: TOL_RECON,
        degeneracy: TOL_DEGENERACY,
        trace: TOL_TRACE,
    };
}
