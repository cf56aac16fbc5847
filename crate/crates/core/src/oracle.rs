//! Brute-force ground truth: conjugation orbits and stabilizers of regular
//! subgroups under GL_n(F_p), orthogonal group orders, and congruence
//! searches.
//!
//! Enumeration is split into `W` deterministic parts. Part `w` takes the
//! matrices whose first row has enumeration index `i` with
//! `(i + seed) mod W = w`; results are merged by commutative reductions, so
//! they do not depend on `W`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::affine::{CanonicalKey, RegularSubgroupRep};
use crate::error::{Error, Result};
use crate::fp::{checked_gl_order, FpMatrix, FpSpace, Prime};
use crate::nilalg::check_rank1_matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Largest group (or search space) the oracle will enumerate.
    pub max_elements: u128,
    pub workers: usize,
    pub seed: u64,
}

impl EnumerationBudget {
    pub const DEFAULT_MAX: u128 = 30_000_000;

    pub fn new(max_elements: u128) -> Self {
        EnumerationBudget {
            max_elements,
            workers: 1,
            seed: 0,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        EnumerationBudget {
            workers: workers.max(1),
            ..self
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        EnumerationBudget { seed, ..self }
    }

    fn check(&self, needed: u128) -> Result<()> {
        if needed > self.max_elements {
            Err(Error::BudgetExceeded {
                needed,
                budget: self.max_elements,
            })
        } else {
            Ok(())
        }
    }

    fn check_gl(&self, n: usize, p: Prime) -> Result<u128> {
        let needed = checked_gl_order(n, p).unwrap_or(u128::MAX);
        self.check(needed)?;
        Ok(needed)
    }

    fn workers(&self) -> usize {
        self.workers.max(1)
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MAX)
    }
}

/// Runs `job(0..workers)` and returns the results in worker order.
pub trait PartitionRunner {
    fn run<T, F>(&self, workers: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs the parts one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl PartitionRunner for Sequential {
    fn run<T, F>(&self, workers: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..workers).map(job).collect()
    }
}

/// One part of a `W`-way split of an enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Part {
    pub worker: usize,
    pub workers: usize,
    pub seed: u64,
}

impl Part {
    pub const WHOLE: Part = Part {
        worker: 0,
        workers: 1,
        seed: 0,
    };

    fn owns(&self, index: usize) -> bool {
        let w = self.workers as u64;
        ((index as u64 % w) + self.seed % w) % w == self.worker as u64
    }
}

/// Calls `f` on every matrix of GL_n(F_p) in this part, as `n*n` row-major
/// residues. Row `i` ranges over the vectors outside the span of rows
/// `0..i`, so every invertible matrix is produced exactly once.
pub fn for_each_gl<F>(p: Prime, n: usize, part: Part, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[u32]) -> ControlFlow<()>,
{
    if n == 0 {
        return if part.owns(0) {
            f(&[])
        } else {
            ControlFlow::Continue(())
        };
    }
    let space = FpSpace::new(p, n);
    let size = space.size();
    let pv = p.get() as usize;
    let points: Vec<u32> = (0..size).flat_map(|i| space.point(i)).collect();
    // spans[l] marks the span of rows 0..l
    let mut spans = vec![vec![false; size]; n];
    spans[0][0] = true;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    members[0].push(0);
    let mut mat = vec![0u32; n * n];
    let mut cand = vec![0usize; n];
    let mut level = 0usize;
    loop {
        let start = cand[level];
        let next = (start..size).find(|&c| !spans[level][c] && (level > 0 || part.owns(c)));
        let Some(c) = next else {
            if level == 0 {
                return ControlFlow::Continue(());
            }
            level -= 1;
            cand[level] += 1;
            continue;
        };
        cand[level] = c;
        mat[level * n..(level + 1) * n].copy_from_slice(&points[c * n..(c + 1) * n]);
        if level + 1 == n {
            f(&mat)?;
            cand[level] += 1;
            continue;
        }
        // span of rows 0..=level
        let next_span = &mut spans[level + 1];
        next_span.iter_mut().for_each(|b| *b = false);
        let mut next_members = core::mem::take(&mut members[level + 1]);
        next_members.clear();
        let row = &points[c * n..(c + 1) * n];
        for &m in &members[level] {
            let base = &points[m * n..(m + 1) * n];
            for a in 0..pv {
                let mut idx = 0usize;
                for j in 0..n {
                    let v = (base[j] as usize + a * row[j] as usize) % pv;
                    idx = idx * pv + v;
                }
                if !next_span[idx] {
                    next_span[idx] = true;
                    next_members.push(idx);
                }
            }
        }
        members[level + 1] = next_members;
        level += 1;
        cand[level] = 0;
    }
}

/// `P B_i = B_{P e_i} P` for the linear parts `I + B_i` of the generators
/// `tau(e_i)`; equivalent to `P T P^-1 = T` when `x -> B_x` is linear.
struct GeneratorCheck {
    p: u32,
    n: usize,
    gens: Vec<u32>,
    combo: Vec<u32>,
}

impl GeneratorCheck {
    fn new(t: &RegularSubgroupRep) -> Self {
        let n = t.dim();
        let p = t.prime().get();
        let space = t.space();
        let mut gens = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let lin = t.element_at(&space.unit(i)).linear();
            for r in 0..n {
                for c in 0..n {
                    let id = u32::from(r == c);
                    gens.push((lin.get(r, c) + p - id) % p);
                }
            }
        }
        GeneratorCheck {
            p,
            n,
            gens,
            combo: vec![0; n * n],
        }
    }

    fn gen(&self, i: usize) -> &[u32] {
        let nn = self.n * self.n;
        &self.gens[i * nn..(i + 1) * nn]
    }

    fn fixes(&mut self, pm: &[u32]) -> bool {
        let n = self.n;
        let p = self.p as u64;
        for i in 0..n {
            // combo = sum_l P[l][i] B_l
            self.combo.iter_mut().for_each(|v| *v = 0);
            for l in 0..n {
                let coeff = pm[l * n + i];
                if coeff == 0 {
                    continue;
                }
                for (idx, &b) in self.gens[l * n * n..(l + 1) * n * n].iter().enumerate() {
                    self.combo[idx] =
                        ((self.combo[idx] as u64 + coeff as u64 * b as u64) % p) as u32;
                }
            }
            let b = self.gen(i);
            for r in 0..n {
                for c in 0..n {
                    let mut lhs = 0u64;
                    let mut rhs = 0u64;
                    for j in 0..n {
                        lhs += pm[r * n + j] as u64 * b[j * n + c] as u64;
                        rhs += self.combo[r * n + j] as u64 * pm[j * n + c] as u64;
                    }
                    if lhs % p != rhs % p {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn matrix(p: Prime, n: usize, data: &[u32]) -> FpMatrix {
    FpMatrix::new(p, n, n, data.to_vec()).expect("n*n entries")
}

fn part(budget: &EnumerationBudget, worker: usize) -> Part {
    Part {
        worker,
        workers: budget.workers(),
        seed: budget.seed,
    }
}

/// `|{P in GL_n : P T P^-1 = T}|`.
pub fn stabilizer_size<R: PartitionRunner>(
    t: &RegularSubgroupRep,
    budget: &EnumerationBudget,
    runner: &R,
) -> Result<u128> {
    let (p, n) = (t.prime(), t.dim());
    budget.check_gl(n, p)?;
    let counts = runner.run(budget.workers(), |w| -> Result<u128> {
        let mut check = GeneratorCheck::new(t);
        let mut count = 0u128;
        let mut failure = None;
        let _ = for_each_gl(p, n, part(budget, w), |pm| {
            if !check.fixes(pm) {
                return ControlFlow::Continue(());
            }
            match t.conjugate(&matrix(p, n, pm)) {
                Ok(c) if c.canonical_key() == t.canonical_key() => count += 1,
                Ok(_) => {}
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        failure.map_or(Ok(count), Err)
    });
    counts.into_iter().sum()
}

/// Number of distinct conjugates `P T P^-1`, collected as canonical keys.
/// Checked against orbit-stabilizer on every run.
pub fn orbit_size<R: PartitionRunner>(
    t: &RegularSubgroupRep,
    budget: &EnumerationBudget,
    runner: &R,
) -> Result<u128> {
    let (p, n) = (t.prime(), t.dim());
    let gl = budget.check_gl(n, p)?;
    let parts = runner.run(
        budget.workers(),
        |w| -> Result<(BTreeSet<CanonicalKey>, u128)> {
            let mut keys = BTreeSet::new();
            let mut stab = 0u128;
            let mut failure = None;
            let _ = for_each_gl(p, n, part(budget, w), |pm| {
                match t.conjugate(&matrix(p, n, pm)) {
                    Ok(c) => {
                        if c.canonical_key() == t.canonical_key() {
                            stab += 1;
                        }
                        keys.insert(c.canonical_key().clone());
                        ControlFlow::Continue(())
                    }
                    Err(e) => {
                        failure = Some(e);
                        ControlFlow::Break(())
                    }
                }
            });
            failure.map_or(Ok((keys, stab)), Err)
        },
    );
    let mut keys = BTreeSet::new();
    let mut stab = 0u128;
    for part in parts {
        let (k, s) = part?;
        keys.extend(k);
        stab += s;
    }
    let orbit = keys.len() as u128;
    if orbit * stab != gl {
        return Err(Error::Internal(alloc::format!(
            "orbit {orbit} times stabilizer {stab} is not |GL_{n}| = {gl}"
        )));
    }
    Ok(orbit)
}

/// `|{U : U^T D_s U = D_s}|` for `D_s = diag(1, ..., 1, s)` of size `k`,
/// by a column-by-column search: column `j` must pair correctly with
/// itself and every earlier column. The budget bounds the number of
/// candidate columns tested.
pub fn orthogonal_count(k: usize, p: Prime, s: u32, budget: &EnumerationBudget) -> Result<u128> {
    if k == 0 {
        return Ok(1);
    }
    let s = s % p.get();
    if s == 0 {
        return Err(Error::NotInvertible);
    }
    let mut d = vec![1u32; k];
    d[k - 1] = s;
    let space = FpSpace::new(p, k);
    let size = space.size();
    let points: Vec<Vec<u32>> = space.points().collect();
    let form = |x: &[u32], y: &[u32]| -> u32 {
        x.iter()
            .zip(y)
            .zip(&d)
            .fold(0, |acc, ((&a, &b), &w)| p.add(acc, p.mul(w, p.mul(a, b))))
    };
    // Columns with the right norm, one list per target norm.
    let norm_ok: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            (0..size)
                .filter(|&c| form(&points[c], &points[c]) == d[j])
                .collect()
        })
        .collect();

    let mut tested = 0u128;
    let mut count = 0u128;
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut cursor = vec![0usize; k];
    loop {
        let j = chosen.len();
        let list = &norm_ok[j];
        let mut found = None;
        while cursor[j] < list.len() {
            let c = list[cursor[j]];
            cursor[j] += 1;
            tested += 1;
            if tested > budget.max_elements {
                return Err(Error::BudgetExceeded {
                    needed: tested,
                    budget: budget.max_elements,
                });
            }
            if chosen
                .iter()
                .all(|&prev| form(&points[prev], &points[c]) == 0)
            {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(_) if j + 1 == k => count += 1,
            Some(c) => {
                chosen.push(c);
                cursor[j + 1] = 0;
            }
            None => {
                if chosen.pop().is_none() {
                    return Ok(count);
                }
            }
        }
    }
}

/// A `P = diag(P_{n-1}, 1)` with `P Phi1 P^T = Phi2`, if one exists.
pub fn form_equivalence_search(
    phi1: &FpMatrix,
    phi2: &FpMatrix,
    budget: &EnumerationBudget,
) -> Result<Option<FpMatrix>> {
    check_rank1_matrix(phi1)?;
    check_rank1_matrix(phi2)?;
    if phi1.rows() != phi2.rows() || phi1.prime() != phi2.prime() {
        return Err(Error::DimensionMismatch(
            "structure matrices differ in shape".into(),
        ));
    }
    let p = phi1.prime();
    let m = phi1.rows() - 1;
    budget.check_gl(m, p)?;
    let a = phi1.block(0, m, 0, m);
    let b = phi2.block(0, m, 0, m);
    if a.rank() != b.rank() {
        return Ok(None);
    }
    let mut found = None;
    let _ = for_each_gl(p, m, Part::WHOLE, |pm| {
        let q = matrix(p, m, pm);
        let image = q
            .mul(&a)
            .and_then(|x| x.mul(&q.transpose()))
            .expect("square");
        if image == b {
            found = Some(q);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found.map(|q| q.block_diag(&FpMatrix::identity(p, 1))))
}
