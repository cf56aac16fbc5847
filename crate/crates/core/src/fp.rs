//! Arithmetic in the prime field F_p, dense matrices over it, and the
//! group-order formulas used by the counting code.
//!
//! Residues are always stored canonically in `[0, p)`, so two matrices are
//! equal exactly when their entry vectors are bitwise equal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// An odd prime below 2^16.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u32);

impl Prime {
    pub const LIMIT: u32 = 1 << 16;

    /// Validates `p` by trial division.
    pub fn new(p: u32) -> Result<Self> {
        if !(3..Self::LIMIT).contains(&p) || p.is_multiple_of(2) {
            return Err(Error::InvalidPrime(p));
        }
        let mut d = 3;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::InvalidPrime(p));
            }
            d += 2;
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.0;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.0) {
            None
        } else {
            Some(self.pow(a, (self.0 - 2) as u64))
        }
    }

    /// Euler's criterion on a nonzero residue.
    pub fn is_square(self, a: u32) -> Result<bool> {
        if a.is_multiple_of(self.0) {
            return Err(Error::ZeroSquareClass);
        }
        Ok(self.pow(a, ((self.0 - 1) / 2) as u64) == 1)
    }

    /// The least positive quadratic non-residue.
    pub fn canonical_nonsquare(self) -> u32 {
        (2..self.0)
            .find(|&a| !self.is_square(a).expect("nonzero"))
            .expect("every odd prime has a non-residue")
    }

    /// Smallest `t` with `t^2 = a`, if any.
    pub fn sqrt(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        (0..self.0).find(|&t| self.mul(t, t) == a)
    }

    /// Smallest `f`, then smallest `g`, with `f^2 + g^2 = q`.
    pub fn sum_of_two_squares(self, q: u32) -> (u32, u32) {
        let q = q % self.0;
        for f in 0..self.0 {
            let rest = self.sub(q, self.mul(f, f));
            if let Some(g) = self.sqrt(rest) {
                return (f, g);
            }
        }
        unreachable!("every element of F_p is a sum of two squares")
    }

    pub fn scalar(self, v: i64) -> FpScalar {
        FpScalar {
            value: self.reduce(v),
            p: self,
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_p carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: Prime,
}

impl FpScalar {
    pub fn new(p: Prime, v: i64) -> Self {
        p.scalar(v)
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        self.p
            .inv(self.value)
            .map(|value| FpScalar { value, p: self.p })
            .ok_or(Error::NotInvertible)
    }

    pub fn pow(self, e: u64) -> Self {
        FpScalar {
            value: self.p.pow(self.value, e),
            p: self.p,
        }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FpScalar {
            type Output = FpScalar;
            fn $method(self, rhs: FpScalar) -> FpScalar {
                debug_assert_eq!(self.p, rhs.p, "mixed moduli");
                FpScalar {
                    value: self.p.$method(self.value, rhs.value),
                    p: self.p,
                }
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> FpScalar {
        FpScalar {
            value: self.p.neg(self.value),
            p: self.p,
        }
    }
}

/// True iff the nonzero scalar `a` is a square in F_p.
pub fn legendre_is_square(a: FpScalar) -> Result<bool> {
    a.p.is_square(a.value)
}

/// The fixed non-square used by every normal form.
pub fn canonical_nonsquare(p: Prime) -> FpScalar {
    FpScalar {
        value: p.canonical_nonsquare(),
        p,
    }
}

pub fn sum_of_two_squares(q: FpScalar) -> (FpScalar, FpScalar) {
    let (f, g) = q.p.sum_of_two_squares(q.value);
    (FpScalar { value: f, p: q.p }, FpScalar { value: g, p: q.p })
}

/// The vector space F_p^n, with points numbered so that index order is
/// lexicographic order on coordinates (coordinate 0 most significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpSpace {
    p: Prime,
    n: usize,
}

impl FpSpace {
    pub fn new(p: Prime, n: usize) -> Self {
        FpSpace { p, n }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of points, `p^n`. Panics if it does not fit in `usize`.
    pub fn size(&self) -> usize {
        (self.p.get() as usize)
            .checked_pow(self.n as u32)
            .expect("p^n overflows usize")
    }

    /// `p^n` as u128, for budget comparisons without overflow.
    pub fn size_u128(&self) -> Option<u128> {
        (self.p.get() as u128).checked_pow(self.n as u32)
    }

    #[inline]
    pub fn index(&self, coords: &[u32]) -> usize {
        let p = self.p.get() as usize;
        coords.iter().fold(0, |acc, &c| acc * p + c as usize)
    }

    pub fn point(&self, idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.n];
        self.write_point(idx, &mut out);
        out
    }

    #[inline]
    pub fn write_point(&self, mut idx: usize, out: &mut [u32]) {
        let p = self.p.get() as usize;
        for slot in out.iter_mut().rev() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size()).map(move |i| self.point(i))
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.p.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.p.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.p.neg(x)).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.p.mul(c, x)).collect()
    }

    pub fn unit(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.n];
        v[i] = 1;
        v
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    /// Builds a matrix from row-major entries, reducing each modulo `p`.
    pub fn new(p: Prime, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        let data = data.into_iter().map(|v| v % p.get()).collect();
        Ok(FpMatrix {
            p,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from signed rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(p: Prime, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().map(|&v| p.reduce(v)));
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn diagonal(p: Prime, diag: &[u32]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(p, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d % p.get();
        }
        m
    }

    pub fn prime(&self) -> Prime {
        self.p
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

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.p.get();
    }

    pub fn entry(&self, i: usize, j: usize) -> FpScalar {
        FpScalar {
            value: self.get(i, j),
            p: self.p,
        }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    /// First `(i, j)` with `i < j` and `m[i][j] != m[j][i]`.
    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        (0..self.rows)
            .flat_map(|i| (i + 1..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    pub fn mul(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != rhs.rows || self.p != rhs.p {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let p = self.p.get() as u64;
        let mut out = vec![0u32; self.rows * rhs.cols];
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for l in 0..self.cols {
                    acc += self.data[i * self.cols + l] as u64 * rhs.data[l * rhs.cols + j] as u64;
                }
                out[i * rhs.cols + j] = (acc % p) as u32;
            }
        }
        Ok(FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.p.get() as u64;
        Ok((0..self.rows)
            .map(|i| {
                let acc: u64 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum();
                (acc % p) as u32
            })
            .collect())
    }

    pub fn add(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| self.p.add(a, b))
            .collect();
        Ok(FpMatrix { data, ..*self })
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let data = self.data.iter().map(|&a| self.p.mul(a, c)).collect();
        FpMatrix { data, ..*self }
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j);
            }
        }
        out
    }

    /// `diag(self, other)`.
    pub fn block_diag(&self, other: &FpMatrix) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse with first-nonzero pivot selection.
    pub fn inverse(&self) -> Result<FpMatrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let p = self.p;
        let w = 2 * n;
        let mut aug = vec![0u32; n * w];
        for i in 0..n {
            aug[i * w..i * w + n].copy_from_slice(self.row(i));
            aug[i * w + n + i] = 1;
        }
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| aug[r * w + col] != 0)
                .ok_or(Error::NotInvertible)?;
            if pivot != col {
                for j in 0..w {
                    aug.swap(pivot * w + j, col * w + j);
                }
            }
            let inv = p.inv(aug[col * w + col]).expect("nonzero pivot");
            for j in 0..w {
                aug[col * w + j] = p.mul(aug[col * w + j], inv);
            }
            for r in 0..n {
                let f = aug[r * w + col];
                if r == col || f == 0 {
                    continue;
                }
                for j in 0..w {
                    let t = p.mul(f, aug[col * w + j]);
                    aug[r * w + j] = p.sub(aug[r * w + j], t);
                }
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend_from_slice(&aug[i * w + n..(i + 1) * w]);
        }
        Ok(FpMatrix {
            p,
            rows: n,
            cols: n,
            data,
        })
    }

    /// Reduces in place to row echelon form and returns the rank.
    fn row_reduce(&mut self) -> usize {
        let p = self.p;
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pivot != rank {
                for j in 0..self.cols {
                    self.data.swap(pivot * self.cols + j, rank * self.cols + j);
                }
            }
            let inv = p.inv(self.get(rank, col)).expect("nonzero pivot");
            for r in rank + 1..self.rows {
                let f = p.mul(self.get(r, col), inv);
                if f == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let t = p.mul(f, self.get(rank, j));
                    let v = p.sub(self.get(r, j), t);
                    self.data[r * self.cols + j] = v;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Rank of the span of the given vectors.
pub fn span_rank(p: Prime, n: usize, vectors: &[Vec<u32>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let data = vectors.iter().flat_map(|v| v.iter().copied()).collect();
    FpMatrix::new(p, vectors.len(), n, data)
        .expect("consistent lengths")
        .rank()
}

/// Row-reduced basis of the span of the given vectors.
pub fn span_basis(p: Prime, n: usize, vectors: &[Vec<u32>]) -> Vec<Vec<u32>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let data = vectors.iter().flat_map(|v| v.iter().copied()).collect();
    let mut m = FpMatrix::new(p, vectors.len(), n, data).expect("consistent lengths");
    let r = m.row_reduce();
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

/// |GL_n(F_p)| = prod_{i<n} (p^n - p^i).
///
/// Panics if the order does not fit in a `u128`; see [`checked_gl_order`].
pub fn gl_order(n: usize, p: Prime) -> u128 {
    checked_gl_order(n, p).expect("|GL_n(F_p)| overflows u128")
}

pub fn checked_gl_order(n: usize, p: Prime) -> Option<u128> {
    let q = p.get() as u128;
    let pn = q.checked_pow(u32::try_from(n).ok()?)?;
    (0..n).try_fold(1u128, |acc, i| acc.checked_mul(pn - q.pow(i as u32)))
}

/// Isometry type of a nondegenerate diagonal form diag(1, ..., 1, s).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrthogonalType {
    /// Odd rank.
    Odd,
    /// Even rank, split (maximal Witt index).
    Plus,
    /// Even rank, non-split.
    Minus,
}

impl OrthogonalType {
    pub fn label(self) -> &'static str {
        match self {
            OrthogonalType::Odd => "odd",
            OrthogonalType::Plus => "even-plus",
            OrthogonalType::Minus => "even-minus",
        }
    }
}

/// Order of the full orthogonal group of rank `k` and the given type.
pub fn go_order(k: usize, p: Prime, ty: OrthogonalType) -> Result<u128> {
    let q = p.get() as u128;
    let m = (k / 2) as u32;
    let prod = |upto: u32| -> u128 { (1..=upto).map(|i| q.pow(2 * i) - 1).product() };
    match (k % 2, ty) {
        (_, _) if k == 0 => Err(Error::CaseMismatch {
            k,
            case: ty.label(),
        }),
        (1, OrthogonalType::Odd) => Ok(2 * q.pow(m * m) * prod(m)),
        (0, OrthogonalType::Plus) => Ok(2 * q.pow(m * (m - 1)) * (q.pow(m) - 1) * prod(m - 1)),
        (0, OrthogonalType::Minus) => Ok(2 * q.pow(m * (m - 1)) * (q.pow(m) + 1) * prod(m - 1)),
        _ => Err(Error::CaseMismatch {
            k,
            case: ty.label(),
        }),
    }
}

/// Degree of |GO_k| as a polynomial in p, which is k(k-1)/2 for both parities.
pub fn go_order_degree(k: usize) -> usize {
    k * (k - 1) / 2
}
