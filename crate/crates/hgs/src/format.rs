//! JSON file formats. Every number is an integer; residues are written in
//! canonical form `0..p`.

use std::fs;
use std::path::{Path, PathBuf};

use hgs_core::chain::{AlphaReport, ChainStructure};
use hgs_core::{
    CountReport, DescentDatum, DescentSource, FpMatrix, FpSpace, NilpotentAlgebra, Prime,
};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

/// Algebra family tag, serialized as `{"kind": "rank1", "matrix": ...}` or
/// `{"kind": "chain"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Family {
    Rank1 { matrix: Vec<Vec<i64>> },
    Chain,
}

/// `p`, `n`, and either the structure tensor `structure[i][j][k]` or a
/// family tag (or both, in which case they must agree).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub p: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

fn nested(a: &NilpotentAlgebra) -> Vec<Vec<Vec<i64>>> {
    let n = a.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a.basis_product(i, j).iter().map(|&c| c as i64).collect())
                .collect()
        })
        .collect()
}

fn matrix_rows(m: &FpMatrix) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&c| c as i64).collect())
        .collect()
}

impl AlgebraFile {
    pub fn from_algebra(a: &NilpotentAlgebra, family: Option<Family>) -> Self {
        AlgebraFile {
            p: a.prime().get(),
            n: a.dim(),
            structure: Some(nested(a)),
            family,
        }
    }

    pub fn rank1(phi: &FpMatrix) -> hgs_core::Result<Self> {
        let a = NilpotentAlgebra::rank1(phi)?;
        Ok(Self::from_algebra(
            &a,
            Some(Family::Rank1 {
                matrix: matrix_rows(phi),
            }),
        ))
    }

    pub fn chain(n: usize, p: Prime) -> hgs_core::Result<Self> {
        let a = NilpotentAlgebra::chain(n, p)?;
        Ok(Self::from_algebra(&a, Some(Family::Chain)))
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        write_json(path, self)
    }

    /// Builds the algebra; shape problems are reported against `path`.
    /// The axioms are not checked here.
    pub fn to_algebra(&self, path: &Path) -> Result<NilpotentAlgebra, FileError> {
        let invalid = |message: String| FileError::Invalid {
            path: path.to_path_buf(),
            message,
        };
        let p = Prime::new(self.p).map_err(|e| invalid(e.to_string()))?;
        let from_family = match &self.family {
            None => None,
            Some(Family::Chain) => Some(NilpotentAlgebra::chain(self.n, p)),
            Some(Family::Rank1 { matrix }) => Some(FpMatrix::from_rows(p, matrix).and_then(|m| {
                if m.rows() != self.n {
                    return Err(hgs_core::Error::DimensionMismatch(format!(
                        "rank1 matrix is {}x{} but n = {}",
                        m.rows(),
                        m.cols(),
                        self.n
                    )));
                }
                NilpotentAlgebra::rank1(&m)
            })),
        }
        .transpose()
        .map_err(|e| invalid(e.to_string()))?;
        let from_structure = self
            .structure
            .as_ref()
            .map(|s| {
                let a = NilpotentAlgebra::from_nested(p, s)?;
                if a.dim() != self.n {
                    return Err(hgs_core::Error::DimensionMismatch(format!(
                        "structure has dimension {} but n = {}",
                        a.dim(),
                        self.n
                    )));
                }
                Ok(a)
            })
            .transpose()
            .map_err(|e| invalid(e.to_string()))?;
        match (from_family, from_structure) {
            (Some(f), Some(s)) if f != s => {
                Err(invalid("structure does not match the family tag".into()))
            }
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(invalid("need either structure or family".into())),
        }
    }

    /// True for a chain tag, or a structure equal to the chain algebra.
    pub fn is_chain(&self, a: &NilpotentAlgebra) -> bool {
        matches!(self.family, Some(Family::Chain))
            || NilpotentAlgebra::chain(a.dim(), a.prime()).is_ok_and(|c| &c == a)
    }
}

/// Oracle annotation of one count row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// `verified`, `mismatch` or `formula only`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_orbit: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_stabilizer: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRowFile {
    pub k: usize,
    pub case: String,
    pub s: u32,
    pub stabilizer_order: u128,
    pub count: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountFile {
    pub p: u32,
    pub n: usize,
    pub rows: Vec<CountRowFile>,
    /// Sum over the nonzero forms.
    pub total: u128,
    pub exceeds_p9: bool,
}

impl CountFile {
    pub fn from_report(report: &CountReport) -> Self {
        CountFile {
            p: report.p.get(),
            n: report.n,
            rows: report
                .rows
                .iter()
                .map(|r| CountRowFile {
                    k: r.k,
                    case: r.case.label().into(),
                    s: r.s,
                    stabilizer_order: r.stabilizer_order,
                    count: r.count,
                    verification: None,
                })
                .collect(),
            total: report.total,
            exceeds_p9: report.exceeds_p9(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaChecksFile {
    pub distinct: bool,
    pub simply_transitive: bool,
    pub normalized: bool,
    pub homomorphism: bool,
    pub exhaustive: bool,
    pub failures: Vec<String>,
}

impl From<&AlphaReport> for AlphaChecksFile {
    fn from(r: &AlphaReport) -> Self {
        AlphaChecksFile {
            distinct: r.distinct,
            simply_transitive: r.simply_transitive,
            normalized: r.normalized,
            homomorphism: r.homomorphism,
            exhaustive: r.exhaustive,
            failures: r.failures.clone(),
        }
    }
}

/// `b`, `b^-1` and `alpha` over all points; `b[i]` is `b(point i)` and
/// `alpha[g][x]` the index of `alpha(g)(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTables {
    pub b: Vec<Vec<u32>>,
    pub b_inverse: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<u32>>>,
}

/// Largest `p^n` for which the `p^(2n)`-entry alpha tables are written.
pub const ALPHA_TABLE_LIMIT: usize = 1024;

impl ChainTables {
    pub fn build(chain: &ChainStructure) -> hgs_core::Result<Self> {
        let space = chain.space();
        let points: Vec<Vec<u32>> = space.points().collect();
        let b = points
            .iter()
            .map(|r| chain.b_map(r))
            .collect::<hgs_core::Result<_>>()?;
        let b_inverse = points
            .iter()
            .map(|s| chain.b_inverse(s))
            .collect::<hgs_core::Result<_>>()?;
        let alpha = if points.len() <= ALPHA_TABLE_LIMIT {
            Some(
                points
                    .iter()
                    .map(|g| chain.alpha_perm(g).map(|t| t.images().to_vec()))
                    .collect::<hgs_core::Result<_>>()?,
            )
        } else {
            None
        };
        Ok(ChainTables {
            b,
            b_inverse,
            alpha,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub p: u32,
    pub n: usize,
    pub tables: ChainTables,
    pub alpha_checks: AlphaChecksFile,
    /// `(expected, observed)`, absent when the sweep was skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer: Option<(u128, u128)>,
    pub hgs_count: u128,
}

/// Serialized [`DescentDatum`]. Tables are over point indices; `points[i]`
/// gives the coordinates of index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentFile {
    pub p: u32,
    pub n: usize,
    pub source: String,
    pub coefficient_constraint: String,
    pub points: Vec<Vec<u32>>,
    /// Row `z` maps `x` to the index of `x - x z` (or `g` to `g'`).
    pub conjugation_table: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_exponent: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_tables: Option<ChainTables>,
}

impl DescentFile {
    pub fn from_datum(d: &DescentDatum, chain: Option<&ChainStructure>) -> hgs_core::Result<Self> {
        let space = FpSpace::new(d.prime(), d.dim());
        let size = space.size();
        let chain_tables = match (d.source(), chain) {
            (DescentSource::Chain, Some(c)) => Some(ChainTables::build(c)?),
            _ => None,
        };
        Ok(DescentFile {
            p: d.prime().get(),
            n: d.dim(),
            source: d.source().label().into(),
            coefficient_constraint: d.coefficient_constraint().into(),
            points: space.points().collect(),
            conjugation_table: (0..size).map(|z| d.conjugation_row(z).to_vec()).collect(),
            action_exponent: d.action_exponent().map(<[u32]>::to_vec),
            evaluation: d.evaluation().map(<[u32]>::to_vec),
            chain_tables,
        })
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(path, &text)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Large tables go out on one line; pretty printing them puts every
/// residue on its own line.
pub const PRETTY_LIMIT: usize = 1 << 14;

pub fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string(value).expect("plain data serializes");
    if text.len() <= PRETTY_LIMIT {
        text = serde_json::to_string_pretty(value).expect("plain data serializes");
    }
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let text = to_json(value);
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}
