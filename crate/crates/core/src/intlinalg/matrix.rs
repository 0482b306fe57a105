use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Rows must all have the same length. An empty list gives the 0x0 matrix.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidPresentation("ragged matrix rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().cloned().map(Into::into))
            .collect();
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Column vectors stacked side by side; `rows` fixes the height when `cols` is empty.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        IntMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        IntMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|t| &self[(i, t)] * &rhs[(t, j)]).sum()
        })
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination. Panics if not square.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for t in 0..n {
            if a[(t, t)].is_zero() {
                match (t + 1..n).find(|&i| !a[(i, t)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(t, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in t + 1..n {
                for j in t + 1..n {
                    let v = (&a[(i, j)] * &a[(t, t)] - &a[(i, t)] * &a[(t, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, t)] = BigInt::zero();
            }
            prev = a[(t, t)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn max_abs(&self) -> BigInt {
        self.data
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Entries reduced into `[0, modulus)` as machine integers.
    pub(crate) fn residues(&self, modulus: i64) -> Vec<i64> {
        let m = BigInt::from(modulus);
        self.data
            .iter()
            .map(|x| {
                let r = ((x % &m) + &m) % &m;
                r.to_i64().expect("residue fits in i64")
            })
            .collect()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    pub(crate) fn add_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += factor * col[src]
    pub(crate) fn add_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * factor;
            self[(i, dst)] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    pub(crate) fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// JSON integer: a plain number when it fits in `i64`, otherwise a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.collect_str(&self.0),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(JsonInt(BigInt::from(v))),
            Raw::Str(s) => s.parse().map(JsonInt).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<JsonInt>> = (0..self.rows)
            .map(|i| self.row(i).iter().cloned().map(JsonInt).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<JsonInt>>::deserialize(d)?;
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Symmetric integer matrix, e.g. the linking matrix of a framed link.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IntSymMatrix(IntMatrix);

impl IntSymMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidPresentation(format!(
                "matrix is {}x{}, not square",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::InvalidPresentation(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(IntSymMatrix(m))
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        IntSymMatrix::new(IntMatrix::from_rows(rows)?)
    }

    /// Convenience for literals in tests and catalogs. Panics on invalid input.
    pub fn of(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntSymMatrix::from_rows(&rows).expect("valid symmetric matrix")
    }

    pub fn empty() -> Self {
        IntSymMatrix(IntMatrix::zeros(0, 0))
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        IntSymMatrix(IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(entries[i])
            } else {
                BigInt::zero()
            }
        }))
    }

    /// Cartan matrix of E8 (positive definite, even, unimodular).
    pub fn e8() -> Self {
        // Bourbaki labelling: chain 1-3-4-5-6-7-8 with 2 attached to 4.
        let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut m = IntMatrix::zeros(8, 8);
        for i in 0..8 {
            m[(i, i)] = BigInt::from(2);
        }
        for &(a, b) in &edges {
            m[(a, b)] = BigInt::from(-1);
            m[(b, a)] = BigInt::from(-1);
        }
        IntSymMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn det(&self) -> BigInt {
        self.0.det()
    }

    pub fn is_even(&self) -> bool {
        (0..self.dim()).all(|i| (&self.0[(i, i)] % 2u32).is_zero())
    }

    pub fn neg(&self) -> Self {
        IntSymMatrix(IntMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            -&self.0[(i, j)]
        }))
    }

    pub fn direct_sum(&self, other: &IntSymMatrix) -> Self {
        let (a, b) = (self.dim(), other.dim());
        IntSymMatrix(IntMatrix::from_fn(a + b, a + b, |i, j| {
            if i < a && j < a {
                self.0[(i, j)].clone()
            } else if i >= a && j >= a {
                other.0[(i - a, j - a)].clone()
            } else {
                BigInt::zero()
            }
        }))
    }

    /// `Pᵀ · self · P` for any (not necessarily square) `P` with matching rows.
    pub fn congruence(&self, p: &IntMatrix) -> Self {
        IntSymMatrix(p.transpose().mul(&self.0).mul(p))
    }

    /// `xᵀ · self · y`.
    pub fn form(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        x.iter().zip(self.0.mul_vec(y)).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Index<(usize, usize)> for IntSymMatrix {
    type Output = BigInt;
    fn index(&self, idx: (usize, usize)) -> &BigInt {
        &self.0[idx]
    }
}

impl fmt::Debug for IntSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym{:?}", self.0)
    }
}

impl<'de> Deserialize<'de> for IntSymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = IntMatrix::deserialize(d)?;
        IntSymMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
