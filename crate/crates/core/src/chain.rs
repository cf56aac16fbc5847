//! The chain algebra `A = z F_p[z] / z^(n+1)` for `p > n`.
//!
//! Its circle group is the group of principal units `1 + A`. The map
//! `b(r) = prod (1 + z^i)^(r_i) - 1` identifies `(F_p^n, +)` with
//! `(A, ∘)`, and `alpha(g) = b^-1 lambda(g) b` embeds `(A, +)` as a regular
//! subgroup of `Perm(F_p^n)` normalized by translations, although the
//! subgroup `tau(A)` of the affine group is not.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::affine::build_subgroup;
use crate::error::{Error, Result};
use crate::fp::{checked_gl_order, FpSpace, Prime};
use crate::nilalg::NilpotentAlgebra;
use crate::oracle::{stabilizer_size, EnumerationBudget, PartitionRunner};

/// Largest `p^n` accepted by [`ChainStructure::alpha_checks`].
pub const ALPHA_CHECK_LIMIT: usize = 4096;
/// Up to this many points the normalization check runs over all `(g, t)`;
/// above it, over generators of both groups.
pub const ALPHA_EXHAUSTIVE_LIMIT: usize = 512;
/// Largest `|GL_n(F_p)|` swept by [`ChainStructure::stabilizer_check`].
pub const STABILIZER_CAP: u128 = 10_000_000;

/// A polynomial mod `z^(n+1)`, coefficients `c_0..c_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedPoly {
    p: Prime,
    coeffs: Vec<u32>,
}

impl TruncatedPoly {
    pub fn new(p: Prime, coeffs: Vec<u32>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c % p.get()).collect();
        TruncatedPoly { p, coeffs }
    }

    pub fn zero(p: Prime, n: usize) -> Self {
        TruncatedPoly {
            p,
            coeffs: vec![0; n + 1],
        }
    }

    pub fn one(p: Prime, n: usize) -> Self {
        let mut u = Self::zero(p, n);
        u.coeffs[0] = 1;
        u
    }

    /// `1 + sum_j s_j z^(j+1)`.
    pub fn principal_unit(p: Prime, s: &[u32]) -> Self {
        let mut coeffs = Vec::with_capacity(s.len() + 1);
        coeffs.push(1);
        coeffs.extend(s.iter().map(|&c| c % p.get()));
        TruncatedPoly { p, coeffs }
    }

    /// `1 + z^i`.
    pub fn one_plus_power(p: Prime, n: usize, i: usize) -> Self {
        let mut u = Self::one(p, n);
        if i <= n {
            u.coeffs[i] = p.add(u.coeffs[i], 1);
        }
        u
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Truncation degree `n`.
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `c_1..c_n`.
    pub fn tail(&self) -> &[u32] {
        &self.coeffs[1..]
    }

    pub fn is_principal_unit(&self) -> bool {
        self.coeffs[0] == 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| self.p.add(a, b))
            .collect();
        TruncatedPoly { p: self.p, coeffs }
    }

    pub fn scale(&self, c: u32) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.p.mul(a, c)).collect();
        TruncatedPoly { p: self.p, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.degree_bound();
        let p = self.p.get() as u64;
        let mut out = vec![0u64; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % p;
            }
        }
        TruncatedPoly {
            p: self.p,
            coeffs: out.into_iter().map(|c| c as u32).collect(),
        }
    }

    pub fn unit_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }

    /// `(1 + w)^-1 = sum_i (-w)^i`, finite since `w` is nilpotent.
    pub fn unit_inv(&self) -> Result<Self> {
        if !self.is_principal_unit() {
            return Err(Error::NotPrincipalUnit);
        }
        let n = self.degree_bound();
        let mut neg_w = self.scale(self.p.neg(1));
        neg_w.coeffs[0] = 0;
        let mut acc = Self::one(self.p, n);
        let mut power = Self::one(self.p, n);
        for _ in 0..n {
            power = power.mul(&neg_w);
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    /// Square-and-multiply; negative exponents go through the inverse.
    pub fn unit_pow(&self, e: i64) -> Result<Self> {
        if !self.is_principal_unit() {
            return Err(Error::NotPrincipalUnit);
        }
        let mut base = if e < 0 {
            self.unit_inv()?
        } else {
            self.clone()
        };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.p, self.degree_bound());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// `log(1 + w) = sum_{i=1}^n (-1)^(i+1) w^i / i`.
    pub fn log_trunc(&self) -> Result<Self> {
        let n = self.degree_bound();
        if self.p.get() as usize <= n {
            return Err(Error::RequiresPGreaterThanN { p: self.p.get(), n });
        }
        if !self.is_principal_unit() {
            return Err(Error::NotPrincipalUnit);
        }
        let mut w = self.clone();
        w.coeffs[0] = 0;
        let mut acc = Self::zero(self.p, n);
        let mut power = Self::one(self.p, n);
        for i in 1..=n {
            power = power.mul(&w);
            let inv_i = self.p.inv(i as u32).expect("i < p");
            let c = if i % 2 == 1 { inv_i } else { self.p.neg(inv_i) };
            acc = acc.add(&power.scale(c));
        }
        Ok(acc)
    }
}

/// A permutation of `F_p^n`, as images of point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermTable {
    images: Vec<u32>,
}

impl PermTable {
    pub fn identity(size: usize) -> Self {
        PermTable {
            images: (0..size as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Self {
        PermTable { images }
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, idx: usize) -> usize {
        self.images[idx] as usize
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PermTable) -> PermTable {
        PermTable {
            images: other
                .images
                .iter()
                .map(|&i| self.images[i as usize])
                .collect(),
        }
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|&i| {
            let i = i as usize;
            i < seen.len() && !core::mem::replace(&mut seen[i], true)
        })
    }
}

/// Outcome of [`ChainStructure::alpha_checks`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphaReport {
    /// The `p^n` permutations `alpha(g)` are pairwise distinct.
    pub distinct: bool,
    /// `g -> alpha(g)(0)` is a bijection.
    pub simply_transitive: bool,
    /// `lambda(t) alpha(g) lambda(t)^-1` is some `alpha(g')`.
    pub normalized: bool,
    /// `b(r + r') = b(r) ∘ b(r')`.
    pub homomorphism: bool,
    /// Whether `normalized` was checked for every pair or on generators.
    pub exhaustive: bool,
    pub failures: Vec<String>,
}

impl AlphaReport {
    pub fn passed(&self) -> bool {
        self.distinct && self.simply_transitive && self.normalized && self.homomorphism
    }
}

/// Maps `b`, `b^-1` and `alpha` for the chain algebra of dimension `n`.
#[derive(Clone, Debug)]
pub struct ChainStructure {
    p: Prime,
    n: usize,
    algebra: NilpotentAlgebra,
    /// `log(1 + z^(i+1))`, coefficients of `z^1..z^n`.
    logs: Vec<Vec<u32>>,
}

impl ChainStructure {
    pub fn new(n: usize, p: Prime) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch(
                "dimension must be at least 1".into(),
            ));
        }
        if p.get() as usize <= n {
            return Err(Error::RequiresPGreaterThanN { p: p.get(), n });
        }
        let algebra = NilpotentAlgebra::chain(n, p)?;
        let logs = (1..=n)
            .map(|i| {
                TruncatedPoly::one_plus_power(p, n, i)
                    .log_trunc()
                    .map(|l| l.tail().to_vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainStructure {
            p,
            n,
            algebra,
            logs,
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &NilpotentAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> FpSpace {
        FpSpace::new(self.p, self.n)
    }

    fn check_len(&self, v: &[u32]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in dimension {}",
                v.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Coefficients of `prod_i (1 + z^i)^(r_i) - 1`.
    pub fn b_map(&self, r: &[u32]) -> Result<Vec<u32>> {
        self.check_len(r)?;
        let mut acc = TruncatedPoly::one(self.p, self.n);
        for (i, &ri) in r.iter().enumerate() {
            if ri % self.p.get() != 0 {
                let factor = TruncatedPoly::one_plus_power(self.p, self.n, i + 1);
                acc = acc.mul(&factor.unit_pow(i64::from(ri % self.p.get()))?);
            }
        }
        Ok(acc.tail().to_vec())
    }

    /// The `r` with `b(r) = s`: take `u = log(1 + s)` and solve
    /// `sum_i r_i log(1 + z^i) = u`, which is unitriangular.
    pub fn b_inverse(&self, s: &[u32]) -> Result<Vec<u32>> {
        self.check_len(s)?;
        let u = TruncatedPoly::principal_unit(self.p, s).log_trunc()?;
        let u = u.tail();
        let mut r = vec![0u32; self.n];
        for d in 0..self.n {
            let known = (0..d).fold(0, |acc, i| {
                self.p.add(acc, self.p.mul(r[i], self.logs[i][d]))
            });
            r[d] = self.p.sub(u[d], known);
        }
        Ok(r)
    }

    /// `alpha(g)(gamma) = b^-1(g + b(gamma))`.
    pub fn alpha_apply(&self, g: &[u32], gamma: &[u32]) -> Result<Vec<u32>> {
        self.check_len(g)?;
        let bg = self.b_map(gamma)?;
        self.b_inverse(&self.space().add(g, &bg))
    }

    pub fn alpha_perm(&self, g: &[u32]) -> Result<PermTable> {
        self.check_len(g)?;
        let space = self.space();
        let images = space
            .points()
            .map(|gamma| self.alpha_apply(g, &gamma).map(|v| space.index(&v) as u32))
            .collect::<Result<Vec<_>>>()?;
        Ok(PermTable { images })
    }

    /// `s`-fold circle power, computed as `(1 + x)^s - 1`.
    pub fn circle_power(&self, x: &[u32], s: i64) -> Result<Vec<u32>> {
        self.check_len(x)?;
        let u = TruncatedPoly::principal_unit(self.p, x).unit_pow(s)?;
        Ok(u.tail().to_vec())
    }

    fn binom2(&self, a: u32) -> u32 {
        let p = self.p;
        p.mul(p.mul(a, p.sub(a, 1)), p.inv(2).expect("p odd"))
    }

    fn binom3(&self, a: u32) -> u32 {
        let p = self.p;
        let prod = p.mul(p.mul(a, p.sub(a, 1)), p.sub(a, 2));
        p.mul(prod, p.inv(6).expect("p > 3"))
    }

    fn require_n3(&self) -> Result<()> {
        if self.n != 3 {
            return Err(Error::UnsupportedDimension(self.n));
        }
        Ok(())
    }

    /// `(r1, r2 + C(r1,2), r3 + r1 r2 + C(r1,3))`.
    pub fn b_closed_form(&self, r: &[u32]) -> Result<Vec<u32>> {
        self.require_n3()?;
        let p = self.p;
        let (r1, r2, r3) = (r[0], r[1], r[2]);
        Ok(vec![
            r1,
            p.add(r2, self.binom2(r1)),
            p.add(p.add(r3, p.mul(r1, r2)), self.binom3(r1)),
        ])
    }

    /// `(s1, s2 - C(s1,2), s3 - s1 s2 + 2 C(s1+1,3))`.
    pub fn b_inverse_closed_form(&self, s: &[u32]) -> Result<Vec<u32>> {
        self.require_n3()?;
        let p = self.p;
        let (s1, s2, s3) = (s[0], s[1], s[2]);
        Ok(vec![
            s1,
            p.sub(s2, self.binom2(s1)),
            p.add(
                p.sub(s3, p.mul(s1, s2)),
                p.mul(2, self.binom3(p.add(s1, 1))),
            ),
        ])
    }

    /// `alpha(r)(x)` for `n = 3` via the explicit polynomials.
    pub fn alpha_closed_form(&self, r: &[u32], x: &[u32]) -> Result<Vec<u32>> {
        self.require_n3()?;
        let p = self.p;
        let half = p.inv(2).expect("p odd");
        let third = p.inv(3).expect("p > 3");
        let (r1, r2, r3) = (r[0], r[1], r[2]);
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let sum = |terms: &[(bool, u32)]| {
            terms.iter().fold(
                0,
                |acc, &(plus, t)| {
                    if plus {
                        p.add(acc, t)
                    } else {
                        p.sub(acc, t)
                    }
                },
            )
        };
        let first = p.add(r1, x1);
        let second = sum(&[
            (true, r2),
            (true, x2),
            (false, p.mul(p.mul(r1, r1), half)),
            (false, p.mul(r1, x1)),
            (true, p.mul(r1, half)),
        ]);
        let third_coord = sum(&[
            (true, r3),
            (true, x3),
            (false, p.mul(r1, r2)),
            (false, p.mul(r1, x2)),
            (false, p.mul(r2, x1)),
            (false, p.mul(r1, third)),
            (true, p.mul(p.mul(r1, x1), half)),
            (true, p.mul(p.pow(r1, 3), third)),
            (true, p.mul(p.mul(r1, r1), x1)),
            (true, p.mul(p.mul(r1, p.mul(x1, x1)), half)),
        ]);
        Ok(vec![first, second, third_coord])
    }

    /// Verifies that `alpha(A)` is a regular subgroup normalized by
    /// translations and that `b` is a homomorphism onto `(A, ∘)`.
    pub fn alpha_checks(&self) -> Result<AlphaReport> {
        let space = self.space();
        let size = space.size();
        if size > ALPHA_CHECK_LIMIT {
            return Err(Error::BudgetExceeded {
                needed: size as u128,
                budget: ALPHA_CHECK_LIMIT as u128,
            });
        }
        let points: Vec<Vec<u32>> = space.points().collect();
        let b_tab: Vec<usize> = points
            .iter()
            .map(|r| self.b_map(r).map(|s| space.index(&s)))
            .collect::<Result<_>>()?;
        let binv_tab: Vec<usize> = points
            .iter()
            .map(|s| self.b_inverse(s).map(|r| space.index(&r)))
            .collect::<Result<_>>()?;
        let add = |a: usize, b: usize| space.index(&space.add(&points[a], &points[b]));
        let sub = |a: usize, b: usize| space.index(&space.sub(&points[a], &points[b]));
        let alpha = |g: usize, gamma: usize| binv_tab[add(g, b_tab[gamma])];

        let mut report = AlphaReport {
            exhaustive: size <= ALPHA_EXHAUSTIVE_LIMIT,
            ..AlphaReport::default()
        };

        // alpha(g)(0) = b^-1(g); injectivity gives both distinctness and
        // simple transitivity from the base point.
        let mut hit = vec![false; size];
        let mut distinct = true;
        for g in 0..size {
            let image = alpha(g, 0);
            if core::mem::replace(&mut hit[image], true) {
                distinct = false;
                report
                    .failures
                    .push(format!("alpha({g})(0) repeats point {image}"));
            }
        }
        report.distinct = distinct;
        report.simply_transitive = distinct && hit.iter().all(|&h| h);
        let round_trip = (0..size).all(|i| b_tab[binv_tab[i]] == i);
        if !round_trip {
            report.simply_transitive = false;
            report.failures.push("b^-1 is not inverse to b".into());
        }

        let (gs, ts): (Vec<usize>, Vec<usize>) = if report.exhaustive {
            ((0..size).collect(), (0..size).collect())
        } else {
            let gens: Vec<usize> = (0..self.n).map(|i| space.index(&space.unit(i))).collect();
            (gens.clone(), gens)
        };
        report.normalized = true;
        'outer: for &t in &ts {
            for &g in &gs {
                // gamma -> t + alpha(g)(gamma - t); its value at 0 names g'
                let conj = |gamma: usize| add(t, alpha(g, sub(gamma, t)));
                let g_prime = b_tab[conj(0)];
                if let Some(gamma) = (0..size).find(|&gamma| conj(gamma) != alpha(g_prime, gamma)) {
                    report.normalized = false;
                    report.failures.push(format!(
                        "lambda({t}) alpha({g}) lambda({t})^-1 differs from alpha({g_prime}) at {gamma}"
                    ));
                    break 'outer;
                }
            }
        }

        report.homomorphism = true;
        'hom: for r in 0..size {
            for r2 in 0..size {
                let lhs = b_tab[add(r, r2)];
                let rhs = space.index(
                    &self
                        .algebra
                        .circle_raw(&points[b_tab[r]], &points[b_tab[r2]]),
                );
                if lhs != rhs {
                    report.homomorphism = false;
                    report
                        .failures
                        .push(format!("b({r} + {r2}) != b({r}) ∘ b({r2})"));
                    break 'hom;
                }
            }
        }
        Ok(report)
    }

    /// `(p^(n-1) (p - 1), observed)`, where observed is the brute-force
    /// stabilizer of `tau(A)` in GL_n(F_p).
    pub fn stabilizer_check<R: PartitionRunner>(
        &self,
        budget: &EnumerationBudget,
        runner: &R,
    ) -> Result<(u128, u128)> {
        let q = self.p.get() as u128;
        let expected = q.pow(self.n as u32 - 1) * (q - 1);
        let cap = budget.max_elements.min(STABILIZER_CAP);
        let needed = checked_gl_order(self.n, self.p).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(Error::BudgetExceeded {
                needed,
                budget: cap,
            });
        }
        let t = build_subgroup(&self.algebra)?;
        let observed = stabilizer_size(&t, budget, runner)?;
        Ok((expected, observed))
    }

    /// `|GL_n(F_p)| / (p^n - p^(n-1))`.
    pub fn hgs_count(&self) -> Result<u128> {
        let q = self.p.get() as u128;
        let gl = checked_gl_order(self.n, self.p)
            .ok_or_else(|| Error::Overflow(format!("|GL_{}(F_{})|", self.n, self.p)))?;
        Ok(gl / (q.pow(self.n as u32) - q.pow(self.n as u32 - 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Sequential;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    fn poly(pr: u32, c: &[u32]) -> TruncatedPoly {
        TruncatedPoly::new(p(pr), c.to_vec())
    }

    #[test]
    fn truncated_products() {
        assert_eq!(
            poly(5, &[1, 1, 0]).mul(&poly(5, &[1, 1, 0])),
            poly(5, &[1, 2, 1])
        );
        assert_eq!(
            poly(5, &[1, 1, 0, 0]).mul(&poly(5, &[1, 0, 1, 0])),
            poly(5, &[1, 1, 1, 1])
        );
        assert_eq!(
            poly(5, &[1, 1, 0, 0]).unit_pow(5).unwrap(),
            TruncatedPoly::one(p(5), 3)
        );
        assert_eq!(poly(5, &[2, 1]).unit_pow(2), Err(Error::NotPrincipalUnit));
        let u = poly(7, &[1, 3, 2, 6]);
        assert_eq!(u.mul(&u.unit_pow(-1).unwrap()), TruncatedPoly::one(p(7), 3));
    }

    #[test]
    fn logarithm() {
        assert_eq!(
            TruncatedPoly::one(p(5), 3).log_trunc().unwrap(),
            TruncatedPoly::zero(p(5), 3)
        );
        assert_eq!(
            poly(5, &[1, 1, 0, 0]).log_trunc().unwrap(),
            poly(5, &[0, 1, 2, 2])
        );
        assert_eq!(
            poly(3, &[1, 1, 0, 0]).log_trunc(),
            Err(Error::RequiresPGreaterThanN { p: 3, n: 3 })
        );
    }

    #[test]
    fn logarithm_is_additive_exhaustively() {
        for n in 1..=3 {
            let space = FpSpace::new(p(5), n);
            let units: Vec<_> = space
                .points()
                .map(|s| TruncatedPoly::principal_unit(p(5), &s))
                .collect();
            for u in &units {
                let lu = u.log_trunc().unwrap();
                for v in &units {
                    let lhs = u.mul(v).log_trunc().unwrap();
                    assert_eq!(lhs, lu.add(&v.log_trunc().unwrap()));
                }
            }
        }
    }

    #[test]
    fn b_examples() {
        let c = ChainStructure::new(3, p(5)).unwrap();
        assert_eq!(c.b_map(&[0, 0, 0]).unwrap(), vec![0, 0, 0]);
        assert_eq!(c.b_inverse(&[0, 0, 0]).unwrap(), vec![0, 0, 0]);
        assert_eq!(c.b_map(&[2, 0, 0]).unwrap(), vec![2, 1, 0]);
        assert!(matches!(
            ChainStructure::new(3, p(3)),
            Err(Error::RequiresPGreaterThanN { p: 3, n: 3 })
        ));
    }

    #[test]
    fn b_inverse_round_trip() {
        for (n, pr) in [(1, 3), (2, 3), (3, 5), (3, 7), (4, 5)] {
            let c = ChainStructure::new(n, p(pr)).unwrap();
            for r in c.space().points() {
                let s = c.b_map(&r).unwrap();
                assert_eq!(c.b_inverse(&s).unwrap(), r);
                assert_eq!(c.b_map(&c.b_inverse(&r).unwrap()).unwrap(), r);
            }
        }
    }

    #[test]
    fn closed_forms_match() {
        for pr in [5, 7, 11] {
            let c = ChainStructure::new(3, p(pr)).unwrap();
            let pts: Vec<_> = c.space().points().collect();
            for r in &pts {
                assert_eq!(c.b_map(r).unwrap(), c.b_closed_form(r).unwrap());
                assert_eq!(c.b_inverse(r).unwrap(), c.b_inverse_closed_form(r).unwrap());
            }
            for r in pts.iter().step_by(if pr > 7 { 7 } else { 1 }) {
                for x in &pts {
                    assert_eq!(
                        c.alpha_apply(r, x).unwrap(),
                        c.alpha_closed_form(r, x).unwrap(),
                        "p={pr} r={r:?} x={x:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_permutations() {
        let c = ChainStructure::new(3, p(5)).unwrap();
        assert_eq!(c.alpha_perm(&[0, 0, 0]).unwrap(), PermTable::identity(125));
        let a = c.alpha_perm(&[1, 2, 3]).unwrap();
        let b = c.alpha_perm(&[4, 0, 1]).unwrap();
        assert!(a.is_bijection());
        assert_eq!(a.compose(&b), c.alpha_perm(&[0, 2, 4]).unwrap());
    }

    #[test]
    fn circle_power_matches_repeated_product() {
        let c = ChainStructure::new(3, p(5)).unwrap();
        let a = c.algebra();
        for x in c.space().points() {
            let mut acc = vec![0; 3];
            for s in 0..7i64 {
                assert_eq!(c.circle_power(&x, s).unwrap(), acc);
                acc = a.circle_raw(&acc, &x);
            }
            assert_eq!(c.circle_power(&x, -1).unwrap(), a.circle_inv_raw(&x));
        }
    }

    #[test]
    fn alpha_checks_pass() {
        for (n, pr) in [(3, 5), (3, 7), (2, 5), (4, 5)] {
            let r = ChainStructure::new(n, p(pr))
                .unwrap()
                .alpha_checks()
                .unwrap();
            assert!(r.passed(), "n={n} p={pr}: {:?}", r.failures);
            assert_eq!(r.exhaustive, pr.pow(n as u32) <= 512);
        }
    }

    #[test]
    fn perm_table_bijection() {
        assert!(PermTable::identity(4).is_bijection());
        assert!(!PermTable::from_images(vec![0, 0, 1]).is_bijection());
        assert!(!PermTable::from_images(vec![0, 3]).is_bijection());
    }

    #[test]
    fn small_stabilizers() {
        let b = EnumerationBudget::default();
        for (n, pr, expect) in [(2, 5, 20), (2, 7, 42)] {
            let c = ChainStructure::new(n, p(pr)).unwrap();
            assert_eq!(
                c.stabilizer_check(&b, &Sequential).unwrap(),
                (expect, expect)
            );
        }
        let c = ChainStructure::new(3, p(5)).unwrap();
        assert_eq!(c.hgs_count().unwrap(), 14880);
    }
}
