//! Commutative nilpotent algebra structures on (F_p^n, +) and their circle
//! groups.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::fp::{span_basis, FpMatrix, FpSpace, Prime};

/// Exhaustive checks switch to sampling above this many points.
pub const EXHAUSTIVE_LIMIT: usize = 1_000_000;
/// Number of random points used once sampling kicks in.
pub const SAMPLE_COUNT: usize = 10_000;

/// A vector of F_p^n holding canonical residues.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlgebraElement(Vec<u32>);

impl AlgebraElement {
    /// Wraps already-reduced coordinates.
    pub fn from_residues(coords: Vec<u32>) -> Self {
        AlgebraElement(coords)
    }

    pub fn new(p: Prime, coords: &[i64]) -> Self {
        AlgebraElement(coords.iter().map(|&c| p.reduce(c)).collect())
    }

    pub fn zero(n: usize) -> Self {
        AlgebraElement(vec![0; n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        AlgebraElement(v)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Outcome of checking the algebra axioms on a structure tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// First `(i, j)` with `x_i x_j != x_j x_i`.
    pub commutativity_violation: Option<(usize, usize)>,
    /// First `(i, j, k)` with `(x_i x_j) x_k != x_i (x_j x_k)`.
    pub associativity_violation: Option<(usize, usize, usize)>,
    /// Least `m` with `A^m = 0`, or `None` if the power chain stalls above 0.
    pub nilpotency_index: Option<usize>,
    /// `dim A^k` for `k = 1, 2, ...` until the chain reaches 0 or stalls.
    pub power_dims: Vec<usize>,
}

impl ValidationReport {
    pub fn commutative(&self) -> bool {
        self.commutativity_violation.is_none()
    }

    pub fn associative(&self) -> bool {
        self.associativity_violation.is_none()
    }

    pub fn nilpotent(&self) -> bool {
        self.nilpotency_index.is_some()
    }

    pub fn passed(&self) -> bool {
        self.commutative() && self.associative() && self.nilpotent()
    }
}

/// Structure constants `c[i][j][k]` with `x_i x_j = sum_k c[i][j][k] x_k`.
///
/// Construction only checks the tensor shape; [`NilpotentAlgebra::validate`]
/// checks the axioms and [`NilpotentAlgebra::checked`] enforces them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NilpotentAlgebra {
    p: Prime,
    n: usize,
    structure: Vec<u32>,
}

impl NilpotentAlgebra {
    /// `tensor` is flattened as `(i * n + j) * n + k`.
    pub fn from_structure(p: Prime, n: usize, tensor: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be at least 1".into(),
            ));
        }
        if tensor.len() != n * n * n {
            return Err(Error::DimensionMismatch(format!(
                "structure tensor has {} entries, expected {}",
                tensor.len(),
                n * n * n
            )));
        }
        let structure = tensor.into_iter().map(|c| c % p.get()).collect();
        Ok(NilpotentAlgebra { p, n, structure })
    }

    /// Builds from nested `[i][j][k]` arrays of signed integers.
    pub fn from_nested(p: Prime, nested: &[Vec<Vec<i64>>]) -> Result<Self> {
        let n = nested.len();
        let mut tensor = Vec::with_capacity(n * n * n);
        for (i, row) in nested.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "structure[{i}] has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, prod) in row.iter().enumerate() {
                if prod.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "structure[{i}][{j}] has {} entries, expected {n}",
                        prod.len()
                    )));
                }
                tensor.extend(prod.iter().map(|&c| p.reduce(c)));
            }
        }
        Self::from_structure(p, n, tensor)
    }

    /// The algebra with zero multiplication.
    pub fn zero(p: Prime, n: usize) -> Result<Self> {
        Self::from_structure(p, n, vec![0; n * n * n])
    }

    /// `z_i z_j = phi[i][j] z_{n-1}` for a symmetric `phi` whose last row
    /// and column vanish.
    pub fn rank1(phi: &FpMatrix) -> Result<Self> {
        check_rank1_matrix(phi)?;
        let n = phi.rows();
        let mut tensor = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                tensor[(i * n + j) * n + (n - 1)] = phi.get(i, j);
            }
        }
        Self::from_structure(phi.prime(), n, tensor)
    }

    /// The algebra `z F_p[z] / z^(n+1)` with basis `e_i = z^(i+1)`.
    pub fn chain(n: usize, p: Prime) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be at least 1".into(),
            ));
        }
        let mut tensor = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                // z^(i+1) z^(j+1) = z^(i+j+2) = e_(i+j+1)
                if i + j + 1 < n {
                    tensor[(i * n + j) * n + i + j + 1] = 1;
                }
            }
        }
        Self::from_structure(p, n, tensor)
    }

    /// Returns the algebra if every axiom holds.
    pub fn checked(self) -> Result<Self> {
        let report = self.validate();
        if let Some((i, j)) = report.commutativity_violation {
            return Err(Error::InvalidAlgebra(format!(
                "not commutative at ({i}, {j})"
            )));
        }
        if let Some((i, j, k)) = report.associativity_violation {
            return Err(Error::InvalidAlgebra(format!(
                "not associative at ({i}, {j}, {k})"
            )));
        }
        if !report.nilpotent() {
            return Err(Error::InvalidAlgebra("not nilpotent".into()));
        }
        Ok(self)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> FpSpace {
        FpSpace::new(self.p, self.n)
    }

    pub fn structure(&self) -> &[u32] {
        &self.structure
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> u32 {
        self.structure[(i * self.n + j) * self.n + k]
    }

    /// Coordinates of `x_i x_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[u32] {
        let start = (i * self.n + j) * self.n;
        &self.structure[start..start + self.n]
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let commutativity_violation = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.basis_product(i, j) != self.basis_product(j, i));

        let mut associativity_violation = None;
        'outer: for i in 0..n {
            for j in 0..n {
                let ij = self.basis_product(i, j);
                for k in 0..n {
                    let jk = self.basis_product(j, k);
                    let left = self.mul_raw(ij, &unit(n, k));
                    let right = self.mul_raw(&unit(n, i), jk);
                    if left != right {
                        associativity_violation = Some((i, j, k));
                        break 'outer;
                    }
                }
            }
        }

        let (power_dims, nilpotency_index) = self.power_chain();
        ValidationReport {
            commutativity_violation,
            associativity_violation,
            nilpotency_index,
            power_dims,
        }
    }

    fn check_element(&self, x: &AlgebraElement) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "element of length {} in an algebra of dimension {}",
                x.len(),
                self.n
            )));
        }
        if x.0.iter().any(|&c| c >= self.p.get()) {
            return Err(Error::DimensionMismatch(
                "coordinate not reduced mod p".into(),
            ));
        }
        Ok(())
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(AlgebraElement(self.mul_raw(&x.0, &y.0)))
    }

    pub(crate) fn mul_raw(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let n = self.n;
        let p = self.p.get() as u64;
        let mut acc = vec![0u64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let w = (xi as u64 * yj as u64) % p;
                for (k, slot) in acc.iter_mut().enumerate() {
                    *slot += w * self.constant(i, j, k) as u64;
                }
            }
        }
        acc.into_iter().map(|v| (v % p) as u32).collect()
    }

    /// `dim A^k` for `k = 1 ..= nilpotency index`; the last entry is 0.
    pub fn power_dims(&self) -> Vec<usize> {
        self.power_chain().0
    }

    fn power_chain(&self) -> (Vec<usize>, Option<usize>) {
        let n = self.n;
        let mut basis: Vec<Vec<u32>> = (0..n).map(|i| unit(n, i)).collect();
        let mut dims = vec![n];
        for _ in 0..=n {
            let products: Vec<Vec<u32>> = basis
                .iter()
                .flat_map(|b| (0..n).map(move |j| (b, j)))
                .map(|(b, j)| self.mul_raw(b, &unit(n, j)))
                .collect();
            let next = span_basis(self.p, n, &products);
            let d = next.len();
            dims.push(d);
            if d == 0 {
                let index = dims.len();
                return (dims, Some(index));
            }
            if d == basis.len() {
                return (dims, None);
            }
            basis = next;
        }
        (dims, None)
    }

    /// True iff every product of three basis vectors vanishes.
    pub fn cube_is_zero(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let ij = self.basis_product(i, j);
                (0..n).all(|k| self.mul_raw(ij, &unit(n, k)).iter().all(|&c| c == 0))
            })
        })
    }

    /// `x + y + x y`.
    pub fn circle_mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(AlgebraElement(self.circle_raw(&x.0, &y.0)))
    }

    pub(crate) fn circle_raw(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let xy = self.mul_raw(x, y);
        x.iter()
            .zip(y)
            .zip(xy)
            .map(|((&a, &b), c)| self.p.add(self.p.add(a, b), c))
            .collect()
    }

    /// `-x + x^2 - x^3 + ...`, which terminates because `x` is nilpotent.
    pub fn circle_inv(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(x)?;
        Ok(AlgebraElement(self.circle_inv_raw(&x.0)))
    }

    pub(crate) fn circle_inv_raw(&self, x: &[u32]) -> Vec<u32> {
        let space = self.space();
        let mut total = space.neg(x);
        let mut power = x.to_vec();
        let mut sign_positive = false;
        for _ in 1..=self.n {
            power = self.mul_raw(&power, x);
            if power.iter().all(|&c| c == 0) {
                break;
            }
            total = if sign_positive {
                space.sub(&total, &power)
            } else {
                space.add(&total, &power)
            };
            sign_positive = !sign_positive;
        }
        total
    }

    /// The `s`-fold circle product of `x` with itself; `s = 0` gives 0.
    pub fn circle_power(&self, x: &AlgebraElement, s: u64) -> Result<AlgebraElement> {
        self.check_element(x)?;
        Ok(AlgebraElement(self.circle_power_raw(&x.0, s)))
    }

    pub(crate) fn circle_power_raw(&self, x: &[u32], mut s: u64) -> Vec<u32> {
        let mut acc = vec![0; self.n];
        let mut base = x.to_vec();
        while s > 0 {
            if s & 1 == 1 {
                acc = self.circle_raw(&acc, &base);
            }
            s >>= 1;
            if s > 0 {
                base = self.circle_raw(&base, &base);
            }
        }
        acc
    }

    /// True iff every element has circle order dividing p. Exhaustive up to
    /// [`EXHAUSTIVE_LIMIT`] points, otherwise [`SAMPLE_COUNT`] seeded samples.
    pub fn circle_group_is_elementary_abelian(&self, seed: u64) -> bool {
        let space = self.space();
        let p = self.p.get() as u64;
        let exhaustive = space
            .size_u128()
            .is_some_and(|s| s <= EXHAUSTIVE_LIMIT as u128);
        if exhaustive {
            space
                .points()
                .all(|x| self.circle_power_raw(&x, p).iter().all(|&c| c == 0))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..SAMPLE_COUNT).all(|_| {
                let x: Vec<u32> = (0..self.n).map(|_| (rng.next_u64() % p) as u32).collect();
                self.circle_power_raw(&x, p).iter().all(|&c| c == 0)
            })
        }
    }
}

pub(crate) fn check_rank1_matrix(phi: &FpMatrix) -> Result<()> {
    if !phi.is_square() || phi.rows() == 0 {
        return Err(Error::DimensionMismatch(
            "structure matrix must be square".into(),
        ));
    }
    if let Some((i, j)) = phi.first_asymmetry() {
        return Err(Error::NotSymmetric(i, j));
    }
    let n = phi.rows();
    if (0..n).any(|i| phi.get(i, n - 1) != 0 || phi.get(n - 1, i) != 0) {
        return Err(Error::NonzeroLastRowCol);
    }
    Ok(())
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}
