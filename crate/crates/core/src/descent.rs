//! Galois descent data for the Hopf algebra attached to a regular subgroup,
//! emitted as tables over point indices of `F_p^n` (see [`FpSpace::index`]).
//!
//! For `A^3 = 0` the subgroup `T = tau(A)` is normalized by translations,
//! with `lambda(z) tau(x) lambda(z)^-1 = tau(x - x z)`, and `G` acts on the
//! coefficients through `x -> -x + x^2`, the circle inverse. For the chain
//! algebra the same role is played by `alpha(A)`, and the table records
//! `lambda(t) alpha(g) lambda(t)^-1 = alpha(g')`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::chain::ChainStructure;
use crate::error::{Error, Result};
use crate::fp::{FpSpace, Prime};
use crate::nilalg::NilpotentAlgebra;

/// Largest `p^n` for which tables are built (they have `p^(2n)` entries).
pub const DESCENT_LIMIT: usize = 2048;

pub const COEFFICIENT_CONSTRAINT: &str = "b_{x - x*z} = b_x^z";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DescentSource {
    /// `A^3 = 0`, including every rank-one algebra.
    CubeZero,
    Chain,
}

impl DescentSource {
    pub fn label(self) -> &'static str {
        match self {
            DescentSource::CubeZero => "cube-zero",
            DescentSource::Chain => "chain",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentDatum {
    p: Prime,
    n: usize,
    source: DescentSource,
    /// Row `z` (or `t`) holds the image of every `x` (or `g`).
    conjugation: Vec<u32>,
    action_exponent: Option<Vec<u32>>,
    evaluation: Option<Vec<u32>>,
}

fn check_size(space: &FpSpace) -> Result<usize> {
    match space.size_u128() {
        Some(s) if s <= DESCENT_LIMIT as u128 => Ok(s as usize),
        s => Err(Error::BudgetExceeded {
            needed: s.unwrap_or(u128::MAX),
            budget: DESCENT_LIMIT as u128,
        }),
    }
}

/// Descent datum of `tau(A)` for an algebra with `A^3 = 0`.
pub fn descent_datum(a: &NilpotentAlgebra) -> Result<DescentDatum> {
    if !a.cube_is_zero() {
        return Err(Error::CubeNonzero);
    }
    let space = a.space();
    let size = check_size(&space)?;
    let points: Vec<Vec<u32>> = space.points().collect();
    let mut conjugation = Vec::with_capacity(size * size);
    for z in &points {
        for x in &points {
            let image = space.sub(x, &a.mul_raw(x, z));
            conjugation.push(space.index(&image) as u32);
        }
    }
    let action_exponent = points
        .iter()
        .map(|x| space.index(&space.add(&space.neg(x), &a.mul_raw(x, x))) as u32)
        .collect();
    Ok(DescentDatum {
        p: a.prime(),
        n: a.dim(),
        source: DescentSource::CubeZero,
        conjugation,
        action_exponent: Some(action_exponent),
        evaluation: None,
    })
}

/// Descent datum of `alpha(A)` for the chain algebra, by lookups in the
/// `b` and `b^-1` tables: `g' = b(t + alpha(g)(-t))`.
pub fn chain_descent_datum(chain: &ChainStructure) -> Result<DescentDatum> {
    let space = chain.space();
    let size = check_size(&space)?;
    let points: Vec<Vec<u32>> = space.points().collect();
    let b_tab: Vec<usize> = points
        .iter()
        .map(|r| chain.b_map(r).map(|s| space.index(&s)))
        .collect::<Result<_>>()?;
    let binv_tab: Vec<usize> = points
        .iter()
        .map(|s| chain.b_inverse(s).map(|r| space.index(&r)))
        .collect::<Result<_>>()?;
    let add = |a: usize, b: usize| space.index(&space.add(&points[a], &points[b]));
    let neg = |a: usize| space.index(&space.neg(&points[a]));

    let mut conjugation = Vec::with_capacity(size * size);
    for t in 0..size {
        let b_neg_t = b_tab[neg(t)];
        for g in 0..size {
            let moved = add(t, binv_tab[add(g, b_neg_t)]);
            conjugation.push(b_tab[moved] as u32);
        }
    }
    let algebra = chain.algebra();
    let evaluation = points
        .iter()
        .map(|g| binv_tab[space.index(&algebra.circle_inv_raw(g))] as u32)
        .collect();
    Ok(DescentDatum {
        p: chain.prime(),
        n: chain.dim(),
        source: DescentSource::Chain,
        conjugation,
        action_exponent: None,
        evaluation: Some(evaluation),
    })
}

impl DescentDatum {
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> DescentSource {
        self.source
    }

    pub fn space(&self) -> FpSpace {
        FpSpace::new(self.p, self.n)
    }

    pub fn size(&self) -> usize {
        self.space().size()
    }

    pub fn coefficient_constraint(&self) -> &'static str {
        COEFFICIENT_CONSTRAINT
    }

    /// Flat table, row-major in `z`.
    pub fn conjugation_table(&self) -> &[u32] {
        &self.conjugation
    }

    pub fn conjugation_row(&self, z: usize) -> &[u32] {
        let size = self.size();
        &self.conjugation[z * size..(z + 1) * size]
    }

    /// Image of `x` under conjugation by `lambda(z)`, as point indices.
    pub fn conjugate(&self, x: usize, z: usize) -> usize {
        self.conjugation[z * self.size() + x] as usize
    }

    /// `x -> -x + x^2`, for `A^3 = 0` sources.
    pub fn action_exponent(&self) -> Option<&[u32]> {
        self.action_exponent.as_deref()
    }

    /// `g -> b^-1(circle inverse of g)`, for chain sources.
    pub fn evaluation(&self) -> Option<&[u32]> {
        self.evaluation.as_deref()
    }

    pub fn rows_are_permutations(&self) -> bool {
        let size = self.size();
        (0..size).all(|z| {
            let mut seen = alloc::vec![false; size];
            self.conjugation_row(z)
                .iter()
                .all(|&x| !core::mem::replace(&mut seen[x as usize], true))
        })
    }

    /// `conj(conj(x, z), z') = conj(x, z + z')` for all `x, z, z'`.
    pub fn is_right_action(&self) -> bool {
        let space = self.space();
        let size = space.size();
        let points: Vec<Vec<u32>> = space.points().collect();
        (0..size).all(|z| {
            (0..size).all(|z2| {
                let sum = space.index(&space.add(&points[z], &points[z2]));
                (0..size)
                    .all(|x| self.conjugate(self.conjugate(x, z), z2) == self.conjugate(x, sum))
            })
        })
    }

    /// Points fixed by every row.
    pub fn fixed_points(&self) -> Vec<usize> {
        let size = self.size();
        (0..size)
            .filter(|&x| (0..size).all(|z| self.conjugate(x, z) == x))
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} descent datum over F_{} in dimension {}: {} conjugation rows",
            self.source.label(),
            self.p,
            self.n,
            self.size()
        )
    }
}
