//! Regular subgroups of the affine group Aff_n(F_p) built from commutative
//! nilpotent F_p-algebra structures, together with closed-form counts of the
//! Hopf Galois structures they give and a brute-force oracle to check them.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel enumeration is
//! abstracted behind [`oracle::PartitionRunner`]; the `hgs` crate supplies a
//! thread-backed runner along with file formats and the CLI.
//!
//! Indices are 0-based throughout: the generator spanning `A^2` in the
//! rank-one family is basis vector `n - 1`, and the chain algebra uses
//! `e_i = z^(i+1)`.

#![no_std]

extern crate alloc;

pub mod affine;
pub mod chain;
pub mod descent;
mod error;
pub mod formclass;
pub mod fp;
pub mod nilalg;
pub mod oracle;

pub use affine::{AffineMap, CanonicalKey, RegularSubgroupRep};
pub use chain::{ChainStructure, PermTable, TruncatedPoly};
pub use descent::{DescentDatum, DescentSource};
pub use error::{Error, Result};
pub use formclass::{CountReport, CountRow, FormCase, FormClass};
pub use fp::{FpMatrix, FpScalar, FpSpace, OrthogonalType, Prime};
pub use nilalg::{AlgebraElement, NilpotentAlgebra, ValidationReport};
pub use oracle::{EnumerationBudget, PartitionRunner, Sequential};
