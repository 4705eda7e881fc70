//! Dense square complex matrices in row-major order.
//!
//! This is the numeric carrier for states, Hamiltonians, unitaries and Kraus
//! operators. Everything is plain `Vec<Complex64>` with hand-rolled kernels;
//! the target regime is dimensions up to a few hundred.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Which subsystem to keep in a partial trace over a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense `dim x dim` complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            dim,
            entries: vec![C64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from a row-major entry list. Errors if the count is not `dim²`.
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product |u><v| of two vectors of equal length.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(i, j)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| e * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![C64::ZERO; n];
        for i in 0..n {
            let mut acc = C64::ZERO;
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Tr(self · other), cheaper than materializing the product.
    pub fn trace_mul(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = C64::ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// U · self · U†.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.mul(self).mul(&u.dagger())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Max entry of |self - other|.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry of |M - M†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            Err(Error::NotHermitian { max_dev: dev, tol })
        } else {
            Ok(())
        }
    }

    /// Max entry of |U†U - I|.
    pub fn unitarity_deviation(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > tol {
            Err(Error::NotUnitary { max_dev: dev, tol })
        } else {
            Ok(())
        }
    }

    /// (M + M†)/2, used to strip round-off before spectral work.
    pub fn symmetrize(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Kronecker product; output dimension is the product of the inputs'.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let n = da * db;
        let mut out = Self::zeros(n);
        for ia in 0..da {
            for ja in 0..da {
                let a = self[(ia, ja)];
                if a == C64::ZERO {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib, ja * db + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    /// Partial trace over one factor of a `dA x dB` bipartite space.
    ///
    /// Index convention: row `i = a * dB + b` (subsystem A major).
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                got: self.dim,
            });
        }
        match keep {
            Subsystem::A => {
                let mut out = Self::zeros(da);
                for a in 0..da {
                    for ap in 0..da {
                        let mut acc = C64::ZERO;
                        for b in 0..db {
                            acc += self[(a * db + b, ap * db + b)];
                        }
                        out[(a, ap)] = acc;
                    }
                }
                Ok(out)
            }
            Subsystem::B => {
                let mut out = Self::zeros(db);
                for b in 0..db {
                    for bp in 0..db {
                        let mut acc = C64::ZERO;
                        for a in 0..da {
                            acc += self[(a * db + b, a * db + bp)];
                        }
                        out[(b, bp)] = acc;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Ancilla-side block `<u| M |v>_B` of a `dA*dB` matrix: the `dA x dA`
    /// operator with entries `Σ_{b,b'} u*_b v_{b'} M[(a,b),(a',b')]`.
    pub fn ancilla_block(&self, dims: (usize, usize), u: &[C64], v: &[C64]) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                got: self.dim,
            });
        }
        if u.len() != db || v.len() != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                got: u.len().max(v.len()),
            });
        }
        let mut out = Self::zeros(da);
        for a in 0..da {
            for ap in 0..da {
                let mut acc = C64::ZERO;
                for b in 0..db {
                    if u[b] == C64::ZERO {
                        continue;
                    }
                    for bp in 0..db {
                        acc += u[b].conj() * v[bp] * self[(a * db + b, ap * db + bp)];
                    }
                }
                out[(a, ap)] = acc;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let e = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", e.re, e.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

// JSON wire format: {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim;
        let mut re = vec![vec![0.0; n]; n];
        let mut im = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                re[i][j] = self[(i, j)].re;
                im[i][j] = self[(i, j)].im;
            }
        }
        let mut st = serializer.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("dim", &n)?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct MatrixVisitor;

        impl<'de> Visitor<'de> for MatrixVisitor {
            type Value = ComplexMatrix;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object {dim, re, im} with row-major real/imaginary parts")
            }

            fn visit_map<M: MapAccess<'de>>(
                self,
                mut map: M,
            ) -> std::result::Result<ComplexMatrix, M::Error> {
                let mut dim: Option<usize> = None;
                let mut re: Option<Vec<Vec<f64>>> = None;
                let mut im: Option<Vec<Vec<f64>>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "dim" => dim = Some(map.next_value()?),
                        "re" => re = Some(map.next_value()?),
                        "im" => im = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(other, &["dim", "re", "im"]))
                        }
                    }
                }
                let dim = dim.ok_or_else(|| de::Error::missing_field("dim"))?;
                let re = re.ok_or_else(|| de::Error::missing_field("re"))?;
                let im = im.ok_or_else(|| de::Error::missing_field("im"))?;
                if dim == 0 {
                    return Err(de::Error::custom("dim must be at least 1"));
                }
                let check = |rows: &Vec<Vec<f64>>, name: &str| {
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        Err(de::Error::custom(format!(
                            "{name} must be a {dim}x{dim} array"
                        )))
                    } else {
                        Ok(())
                    }
                };
                check(&re, "re")?;
                check(&im, "im")?;
                Ok(ComplexMatrix::from_fn(dim, |i, j| {
                    C64::new(re[i][j], im[i][j])
                }))
            }
        }

        deserializer.deserialize_map(MatrixVisitor)
    }
}

/// The three Pauli matrices.
pub fn pauli() -> [ComplexMatrix; 3] {
    let x = ComplexMatrix::from_entries(
        2,
        vec![C64::ZERO, C64::ONE, C64::ONE, C64::ZERO],
    )
    .unwrap();
    let y = ComplexMatrix::from_entries(
        2,
        vec![
            C64::ZERO,
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::ZERO,
        ],
    )
    .unwrap();
    let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
    [x, y, z]
}

/// `v · σ` for a real 3-vector.
pub fn dot_pauli(v: [f64; 3]) -> ComplexMatrix {
    let [sx, sy, sz] = pauli();
    sx.scale(C64::new(v[0], 0.0))
        .add(&sy.scale(C64::new(v[1], 0.0)))
        .add(&sz.scale(C64::new(v[2], 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));

        let d1 = ComplexMatrix::from_diag(&[2.0, 3.0]);
        let d2 = ComplexMatrix::from_diag(&[5.0, 7.0]);
        assert_eq!(d1.kron(&d2), ComplexMatrix::from_diag(&[10.0, 14.0, 15.0, 21.0]));
    }

    #[test]
    fn kron_moves_basis_states() {
        // (sigma_x tensor sigma_x) |00> = |11>
        let [sx, _, _] = pauli();
        let xx = sx.kron(&sx);
        let e00 = [C64::ONE, C64::ZERO, C64::ZERO, C64::ZERO];
        let out = xx.mul_vec(&e00);
        assert_eq!(out[3], C64::ONE);
        assert!(out[..3].iter().all(|&c| c == C64::ZERO));
    }

    #[test]
    fn kron_mixed_product_rule() {
        let a = ComplexMatrix::from_fn(2, |i, j| C64::new((i + 2 * j) as f64, 0.3));
        let b = ComplexMatrix::from_fn(2, |i, j| C64::new(0.5, (i * j) as f64 - 0.2));
        let c = ComplexMatrix::from_fn(2, |i, j| C64::new(1.0 - i as f64, j as f64));
        let d = ComplexMatrix::from_fn(2, |i, j| C64::new((i * i) as f64, -(j as f64)));
        let lhs = a.kron(&b).mul(&c.kron(&d));
        let rhs = a.mul(&c).kron(&b.mul(&d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = ComplexMatrix::from_fn(2, |i, j| C64::new(0.5 - 0.1 * (i as f64), 0.02 * (i as f64 - j as f64)))
            .symmetrize();
        let sigma = ComplexMatrix::from_diag(&[0.25, 0.75]);
        let joint = rho.kron(&sigma);
        let back_a = joint.partial_trace((2, 2), Subsystem::A).unwrap();
        assert!(back_a.max_abs_diff(&rho) < 1e-14); // Tr sigma = 1
        let back_b = joint.partial_trace((2, 2), Subsystem::B).unwrap();
        let tr_rho = rho.trace();
        assert!(back_b.max_abs_diff(&sigma.scale(tr_rho)) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [C64::new(s, 0.0), C64::ZERO, C64::ZERO, C64::new(s, 0.0)];
        let proj = ComplexMatrix::outer(&bell, &bell);
        let red = proj.partial_trace((2, 2), Subsystem::B).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0))) < 1e-14);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(6);
        assert!(m.partial_trace((2, 2), Subsystem::A).is_err());
        assert!(m.partial_trace((2, 3), Subsystem::A).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_fn(3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"dim\":3"));
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_rejects_bad_shape() {
        let bad = r#"{"dim": 2, "re": [[1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
