//! The affine group Aff_n(F_p), realised as the holomorph of (F_p^n, +), and
//! the regular subgroups T = tau(N) coming from nilpotent algebras.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fp::{FpMatrix, FpSpace, Prime};
use crate::nilalg::{AlgebraElement, NilpotentAlgebra};

/// `y -> B y + v`, the block matrix `[[B, v], [0, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    linear: FpMatrix,
    translation: Vec<u32>,
}

impl AffineMap {
    pub fn new(linear: FpMatrix, translation: Vec<u32>) -> Result<Self> {
        if !linear.is_square() || linear.rows() != translation.len() {
            return Err(Error::DimensionMismatch(format!(
                "linear part {}x{} with translation of length {}",
                linear.rows(),
                linear.cols(),
                translation.len()
            )));
        }
        if !linear.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let p = linear.prime().get();
        let translation = translation.into_iter().map(|v| v % p).collect();
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        AffineMap {
            linear: FpMatrix::identity(p, n),
            translation: vec![0; n],
        }
    }

    /// `(P, 0)`, the automorphism part of the holomorph.
    pub fn automorphism(linear: FpMatrix) -> Result<Self> {
        let n = linear.rows();
        Self::new(linear, vec![0; n])
    }

    pub fn linear(&self) -> &FpMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &[u32] {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, y: &[u32]) -> Vec<u32> {
        let p = self.linear.prime();
        self.linear
            .mul_vec(y)
            .expect("dimension checked at construction")
            .into_iter()
            .zip(&self.translation)
            .map(|(a, &b)| p.add(a, b))
            .collect()
    }

    /// `self ∘ other`: `(B1, v1)(B2, v2) = (B1 B2, v1 + B1 v2)`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: self.linear.mul(&other.linear).expect("same dimension"),
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.linear.inverse().expect("linear part is invertible");
        let p = self.linear.prime();
        let t = inv
            .mul_vec(&self.translation)
            .expect("same dimension")
            .into_iter()
            .map(|v| p.neg(v))
            .collect();
        AffineMap {
            linear: inv,
            translation: t,
        }
    }

    /// The `(n+1) x (n+1)` block matrix.
    pub fn to_block_matrix(&self) -> FpMatrix {
        let n = self.dim();
        let mut m = FpMatrix::zeros(self.linear.prime(), n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.linear.get(i, j));
            }
            m.set(i, n, self.translation[i]);
        }
        m.set(n, n, 1);
        m
    }

    fn encode_into(&self, out: &mut Vec<u32>) {
        out.extend_from_slice(self.linear.data());
        out.extend_from_slice(&self.translation);
    }
}

/// `lambda(y) = (I, y)`, translation by `y`.
pub fn lambda_map(p: Prime, y: &[u32]) -> AffineMap {
    AffineMap {
        linear: FpMatrix::identity(p, y.len()),
        translation: y.iter().map(|&v| v % p.get()).collect(),
    }
}

/// Matrix of `y -> x y`; column `j` is `x e_j`.
pub fn left_mul_matrix(a: &NilpotentAlgebra, x: &AlgebraElement) -> Result<FpMatrix> {
    let n = a.dim();
    let mut m = FpMatrix::zeros(a.prime(), n, n);
    for j in 0..n {
        let col = a.multiply(x, &AlgebraElement::basis(n, j))?;
        for (i, &v) in col.coords().iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// `tau(x) = (I + L_x, x)`, so that `tau(x)(y) = x ∘ y`.
pub fn tau(a: &NilpotentAlgebra, x: &AlgebraElement) -> Result<AffineMap> {
    let n = a.dim();
    let linear = left_mul_matrix(a, x)?
        .add(&FpMatrix::identity(a.prime(), n))
        .expect("square");
    if !linear.is_invertible() {
        return Err(Error::Internal("tau not invertible".into()));
    }
    Ok(AffineMap {
        linear,
        translation: x.coords().to_vec(),
    })
}

/// Sorted concatenation of the encoded elements of a subgroup.
///
/// Each map is encoded as its linear part (row-major) followed by its
/// translation; records are sorted lexicographically. Equal keys mean equal
/// sets of maps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u32>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// A regular subgroup of Aff_n(F_p), indexed by base point: `table[i]` is
/// the unique element sending 0 to point `i`.
#[derive(Clone, Debug)]
pub struct RegularSubgroupRep {
    space: FpSpace,
    table: Vec<AffineMap>,
    key: CanonicalKey,
}

impl PartialEq for RegularSubgroupRep {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for RegularSubgroupRep {}

impl RegularSubgroupRep {
    /// Checks the base-point indexing and computes the canonical key.
    pub fn from_table(p: Prime, n: usize, table: Vec<AffineMap>) -> Result<Self> {
        let space = FpSpace::new(p, n);
        if table.len() != space.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for {} points",
                table.len(),
                space.size()
            )));
        }
        for (i, m) in table.iter().enumerate() {
            if m.dim() != n || space.index(m.translation()) != i {
                return Err(Error::Internal(format!(
                    "map {i} does not send 0 to point {i}"
                )));
            }
        }
        if table[0] != AffineMap::identity(p, n) {
            return Err(Error::Internal(
                "element at base point 0 is not the identity".into(),
            ));
        }
        let key = canonical_key(&table);
        Ok(RegularSubgroupRep { space, table, key })
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn prime(&self) -> Prime {
        self.space.prime()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.table
    }

    /// The element sending 0 to `x`.
    pub fn element_at(&self, x: &[u32]) -> &AffineMap {
        &self.table[self.space.index(x)]
    }

    pub fn canonical_key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn contains(&self, m: &AffineMap) -> bool {
        m.dim() == self.dim()
            && m.translation().iter().all(|&v| v < self.prime().get())
            && self.element_at(m.translation()) == m
    }

    /// True iff `lambda(y) t lambda(y)^-1` lies in the subgroup for every
    /// element `t` and every translation `y`.
    pub fn is_normalized_by_translations(&self) -> bool {
        let p = self.prime();
        self.space.points().all(|y| {
            let l = lambda_map(p, &y);
            let l_inv = lambda_map(p, &self.space.neg(&y));
            self.table
                .iter()
                .all(|t| self.contains(&l.compose(t).compose(&l_inv)))
        })
    }

    /// `x -> Q tau(P^-1 x) Q^-1` with `Q = (P, 0)`, re-indexed by base point.
    pub fn conjugate(&self, p_mat: &FpMatrix) -> Result<Self> {
        if !p_mat.is_square() || p_mat.rows() != self.dim() {
            return Err(Error::DimensionMismatch(
                "conjugating matrix has the wrong size".into(),
            ));
        }
        let q = AffineMap::automorphism(p_mat.clone())?;
        let q_inv = q.inverse();
        let mut table: Vec<Option<AffineMap>> = vec![None; self.len()];
        for t in &self.table {
            let c = q.compose(t).compose(&q_inv);
            let idx = self.space.index(c.translation());
            table[idx] = Some(c);
        }
        let table = table
            .into_iter()
            .map(|m| m.ok_or_else(|| Error::Internal("conjugate is not regular".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(self.prime(), self.dim(), table)
    }
}

fn canonical_key(table: &[AffineMap]) -> CanonicalKey {
    let mut records: Vec<Vec<u32>> = table
        .iter()
        .map(|m| {
            let mut r = Vec::with_capacity(m.dim() * (m.dim() + 1));
            m.encode_into(&mut r);
            r
        })
        .collect();
    records.sort_unstable();
    CanonicalKey(records.concat())
}

/// `T = tau(A)`, with closure `tau(x) tau(y) = tau(x ∘ y)` verified.
pub fn build_subgroup(a: &NilpotentAlgebra) -> Result<RegularSubgroupRep> {
    let space = a.space();
    let table = space
        .points()
        .map(|x| tau(a, &AlgebraElement::from_residues(x)))
        .collect::<Result<Vec<_>>>()?;
    let t = RegularSubgroupRep::from_table(a.prime(), a.dim(), table)?;
    for (i, x) in space.points().enumerate() {
        for (j, y) in space.points().enumerate() {
            let composed = t.table[i].compose(&t.table[j]);
            if composed != *t.element_at(&a.circle_raw(&x, &y)) {
                return Err(Error::InvalidAlgebra(format!(
                    "closure fails at points {i} and {j}"
                )));
            }
        }
    }
    Ok(t)
}

pub fn conjugate_subgroup(t: &RegularSubgroupRep, p_mat: &FpMatrix) -> Result<RegularSubgroupRep> {
    t.conjugate(p_mat)
}
