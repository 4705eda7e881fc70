//! Seeded random instances for sweeps and property suites: Hilbert-Schmidt
//! density matrices and Gaussian Hermitian generators rescaled to unit
//! operator norm.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eig::hermitian_eig;
use crate::matrix::{C64, ComplexMatrix};
use crate::states::DensityMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn gaussian_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Hilbert-Schmidt random state: `G G† / Tr(G G†)` with complex Gaussian G.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = gaussian_matrix(dim, rng);
    let psd = g.mul(&g.dagger());
    let tr = psd.trace().re;
    DensityMatrix::new(psd.scale(C64::new(1.0 / tr, 0.0)))
        .expect("Hilbert-Schmidt construction always yields a valid state")
}

/// Random pure state |psi><psi| from a Gaussian vector.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let psi: Vec<C64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    DensityMatrix::from_pure(&psi).expect("Gaussian vector is nonzero almost surely")
}

/// Gaussian Hermitian `(G + G†)/2` rescaled to unit operator norm.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, rng);
    let h = g.add(&g.dagger()).scale(C64::new(0.5, 0.0));
    let eig = hermitian_eig(&h).expect("symmetrized matrix is Hermitian");
    let norm = eig
        .values
        .iter()
        .fold(0.0f64, |acc, w| acc.max(w.abs()))
        .max(1e-12);
    h.scale(C64::new(1.0 / norm, 0.0))
}

/// Random PSD generator: a Hermitian draw shifted by its lowest eigenvalue.
pub fn random_psd_hamiltonian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    let eig = hermitian_eig(&h).expect("hermitian by construction");
    let min = *eig.values.first().unwrap();
    h.add(&ComplexMatrix::identity(dim).scale(C64::new(-min, 0.0)))
}

/// Haar-ish random unitary via the propagator of a random Hermitian at a
/// random angle; good enough for orbit sampling.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    let t = rng.random_range(0.1..std::f64::consts::TAU);
    crate::eig::propagator(&h, t, 1.0).expect("hermitian by construction")
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Random Bloch vector drawn uniformly inside the unit ball.
pub fn random_bloch(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let r = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if r[0] * r[0] + r[1] * r[1] + r[2] * r[2] <= 1.0 {
            return r;
        }
    }
}

/// Random unit 3-vector.
pub fn random_axis(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let r = random_bloch(rng);
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if n > 0.2 {
            return [r[0] / n, r[1] / n, r[2] / n];
        }
    }
}
