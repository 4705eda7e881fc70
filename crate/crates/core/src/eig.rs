//! Hermitian eigendecomposition and the spectral functions built on it.
//!
//! The solver is a cyclic complex Jacobi iteration: each rotation zeroes one
//! off-diagonal pair with a phased Givens rotation, so the accumulated
//! eigenvector matrix stays unitary to round-off. Quadratic convergence makes
//! it plenty for the dimensions this crate targets (a few hundred at most).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{C64, ComplexMatrix};
use crate::tolerance::{TOL_HERM, TOL_PSD};

/// Eigenvalues ascending with the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// Rebuild `V diag(f(w)) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == C64::ZERO {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Rank-`|group|` spectral projector for a set of eigenvalue indices.
    pub fn projector(&self, indices: &[usize]) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for &k in indices {
            for i in 0..n {
                let vik = v[(i, k)];
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Column `k` as a vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigendecomposition of a Hermitian matrix; values ascending.
///
/// Fails with `NotHermitian` if `max |M - M†|` exceeds the default tolerance.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    hermitian_eig_with(m, TOL_HERM)
}

pub fn hermitian_eig_with(m: &ComplexMatrix, tol_herm: f64) -> Result<EigenSystem> {
    m.check_hermitian(tol_herm)?;
    let mut a = m.symmetrize();
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok(EigenSystem {
            values: vec![a[(0, 0)].re],
            vectors: v,
        });
    }

    let scale = a.max_abs_entry().max(1.0);
    let stop = 1e-15 * scale;
    let max_sweeps = 100;

    for _sweep in 0..max_sweeps {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

/// One phased Givens rotation zeroing A[p][q] (and its mirror), p < q.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm();
    if m == 0.0 {
        return;
    }
    let phase = apq / m; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * m);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pq = phase * s; // G[p][q]
    let g_qp = -phase.conj() * s; // G[q][p]

    let n = a.dim();
    // A <- A G (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * c;
    }
    // A <- G† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * g_qp.conj();
        a[(q, k)] = apk * g_pq.conj() + aqk * c;
    }
    // Exact zeros on the eliminated pair; diagonal stays real.
    a[(p, q)] = C64::ZERO;
    a[(q, p)] = C64::ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * c;
    }
}

/// Unitary propagator `U = exp(-i H t / hbar)` via spectral decomposition.
///
/// Spectral exponentiation keeps U unitary to eigensolver accuracy, which is
/// why no Padé or scaling-and-squaring path exists here.
pub fn propagator(h: &ComplexMatrix, t: f64, hbar: f64) -> Result<ComplexMatrix> {
    if hbar <= 0.0 {
        return Err(Error::NonPositiveHbar(hbar));
    }
    let eig = hermitian_eig(h)?;
    Ok(eig.apply(|w| Complex64::from_polar(1.0, -w * t / hbar)))
}

/// PSD square root. Eigenvalues in `[-TOL_PSD, 0)` are clamped to zero;
/// anything below that fails with `NotPSD`.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    sqrt_psd_with(m, TOL_PSD)
}

pub fn sqrt_psd_with(m: &ComplexMatrix, tol_psd: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.first() {
        if min < -tol_psd {
            return Err(Error::NotPsd { min_eig: min });
        }
    }
    Ok(eig.apply(|w| C64::new(w.max(0.0).sqrt(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;

    fn reconstruct(eig: &EigenSystem) -> ComplexMatrix {
        eig.apply(|w| C64::new(w, 0.0))
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = ComplexMatrix::from_diag(&[3.0, 1.0]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 3.0]);
        // Columns are a permuted identity.
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_x_closed_form() {
        let [sx, _, _] = pauli();
        let eig = hermitian_eig(&sx).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        // Eigenvectors are (1, -1)/sqrt(2) and (1, 1)/sqrt(2) up to phase.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..2 {
            let col = eig.vector(k);
            let ratio = (col[1] / col[0]).re;
            let expect = if k == 0 { -1.0 } else { 1.0 };
            assert!((ratio - expect).abs() < 1e-12);
            assert!((col[0].norm() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hermitian_reconstruction() {
        // Deterministic pseudo-random Hermitian, 6x6.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = ComplexMatrix::from_fn(6, |_, _| C64::new(next(), next()));
        let h = g.add(&g.dagger()).scale(C64::new(0.5, 0.0));
        let eig = hermitian_eig(&h).unwrap();
        assert!(reconstruct(&eig).max_abs_diff(&h) < 1e-12);
        assert!(eig.vectors.unitarity_deviation() < 1e-13);
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, |i, j| C64::new((i + 2 * j) as f64, 0.0));
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn propagator_of_zero_is_identity() {
        let h = ComplexMatrix::zeros(3);
        let u = propagator(&h, 2.7, 1.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn propagator_sigma_z_quarter_turn() {
        let [_, _, sz] = pauli();
        let u = propagator(&sz, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let want = ComplexMatrix::from_entries(
            2,
            vec![C64::new(0.0, -1.0), C64::ZERO, C64::ZERO, C64::new(0.0, 1.0)],
        )
        .unwrap();
        assert!(u.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn propagator_pauli_axis_identity() {
        // exp(-i a (n.sigma + I)) = e^{-ia} (cos a I - i sin a n.sigma)
        let n = [1.0 / 3.0_f64.sqrt(), -1.0 / 3.0_f64.sqrt(), 1.0 / 3.0_f64.sqrt()];
        let h = crate::matrix::dot_pauli(n).add(&ComplexMatrix::identity(2));
        let a = 0.8;
        let u = propagator(&h, a, 1.0).unwrap();
        let phase = C64::from_polar(1.0, -a);
        let want = ComplexMatrix::identity(2)
            .scale(phase * C64::new(a.cos(), 0.0))
            .add(&crate::matrix::dot_pauli(n).scale(phase * C64::new(0.0, -a.sin())));
        assert!(u.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn propagator_rejects_bad_hbar() {
        let h = ComplexMatrix::zeros(2);
        assert!(matches!(
            propagator(&h, 1.0, 0.0),
            Err(Error::NonPositiveHbar(_))
        ));
    }

    #[test]
    fn sqrt_psd_diagonal() {
        let m = ComplexMatrix::from_diag(&[4.0, 9.0]);
        let r = sqrt_psd(&m).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 3.0])) < 1e-13);
        let i3 = ComplexMatrix::identity(3);
        assert!(sqrt_psd(&i3).unwrap().max_abs_diff(&i3) < 1e-14);
    }

    #[test]
    fn sqrt_psd_random_reconstruction() {
        let g = ComplexMatrix::from_fn(4, |i, j| {
            C64::new((i as f64 - 1.3) * (j as f64 + 0.7), (i * j) as f64 * 0.21 - 0.4)
        });
        let psd = g.mul(&g.dagger());
        let r = sqrt_psd(&psd).unwrap();
        assert!(r.mul(&r).max_abs_diff(&psd) < 1e-10);
    }

    #[test]
    fn sqrt_psd_rejects_negative() {
        let m = ComplexMatrix::from_diag(&[1.2, -0.2]);
        assert!(matches!(sqrt_psd(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn sqrt_psd_clamps_boundary_noise() {
        let m = ComplexMatrix::from_diag(&[1.0, -1e-12]);
        let r = sqrt_psd(&m).unwrap();
        assert!(r[(1, 1)].re.abs() < 1e-6);
    }
}
