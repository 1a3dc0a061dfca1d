use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GRat;

/// Dense row-major matrix over `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GRat>,
}

impl GMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GMatrix { rows, cols, data: vec![GRat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GRat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GRat>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(GMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix from small integer entries (real parts only).
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| GRat::from(x)).collect()).collect()).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[GRat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<GRat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<GRat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        m[(i, j)] += &(a * b);
                    }
                }
            }
        }
        m
    }

    /// Row vector times matrix.
    pub fn row_mul(v: &[GRat], m: &Self) -> Vec<GRat> {
        assert_eq!(v.len(), m.rows);
        (0..m.cols)
            .map(|j| {
                let mut acc = GRat::zero();
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &(x * &m[(i, j)]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `M M^*`.
    pub fn gram(&self) -> Self {
        self.mul(&self.adjoint())
    }

    /// `M M^* = I` (rows orthonormal).
    pub fn has_orthonormal_rows(&self) -> bool {
        self.gram() == Self::identity(self.rows)
    }

    pub fn is_unitary(&self) -> bool {
        self.rows == self.cols && self.has_orthonormal_rows()
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        let rows = (0..self.rows).map(|i| self.row(i)[range.clone()].to_vec()).collect();
        Self::from_rows(rows).unwrap_or_else(|| Self::zeros(self.rows, range.len()))
    }

    /// Unitary `R` with `v R = target` for row vectors of equal norm.
    ///
    /// `R = I - x^* x / (v x^*)` with `x = v - target`; for `v != target` the
    /// scalar `v x^*` is nonzero and `R` is exactly unitary, so everything stays
    /// in `Q(i)`. Returns `None` when the norms differ.
    pub fn reflection_between(v: &[GRat], target: &[GRat]) -> Option<Self> {
        let n = v.len();
        assert_eq!(n, target.len());
        if norm_sqr(v) != norm_sqr(target) {
            return None;
        }
        if v == target {
            return Some(Self::identity(n));
        }
        let x: Vec<GRat> = v.iter().zip(target).map(|(a, b)| a - b).collect();
        let denom = dot_conj(v, &x);
        let inv = denom.inv()?;
        let mut r = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                let t = &(&x[i].conj() * &x[j]) * &inv;
                r[(i, j)] -= &t;
            }
        }
        Some(r)
    }

    /// Householder reflection `I - 2 x^* x / |x|^2` for a nonzero row vector.
    pub fn householder(x: &[GRat]) -> Self {
        let n = x.len();
        let nn = norm_sqr(x);
        assert!(!nn.is_zero(), "householder of zero vector");
        let f = GRat::real(BigRational::from_integer(2.into()) / nn);
        let mut r = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                let t = &(&x[i].conj() * &x[j]) * &f;
                r[(i, j)] -= &t;
            }
        }
        r
    }

    pub fn permutation_columns(&self, perm: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, perm.len());
        for (k, &src) in perm.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, k)] = self[(i, src)].clone();
            }
        }
        m
    }
}

/// `sum_j a_j conj(b_j)`.
pub fn dot_conj(a: &[GRat], b: &[GRat]) -> GRat {
    let mut acc = GRat::zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(x * &y.conj());
    }
    acc
}

pub fn norm_sqr(v: &[GRat]) -> BigRational {
    v.iter().map(GRat::norm_sqr).fold(BigRational::zero(), |a, b| a + b)
}

impl std::ops::Index<(usize, usize)> for GMatrix {
    type Output = GRat;
    fn index(&self, (i, j): (usize, usize)) -> &GRat {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GRat {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for GMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|g| g.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for GMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<GRat>>::deserialize(d)?;
        GMatrix::from_rows(rows).ok_or_else(|| serde::de::Error::custom("ragged matrix rows"))
    }
}
