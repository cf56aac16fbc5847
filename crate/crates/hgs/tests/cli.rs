use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use hgs::cli::{run, Outcome};
use hgs::format::{AlgebraFile, ChainFile, CountFile, DescentFile};
use hgs_core::{FpMatrix, NilpotentAlgebra, Prime};
use tempfile::TempDir;

fn hgs(args: &[&str]) -> Outcome {
    run(std::iter::once("hgs").chain(args.iter().copied()))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

const RANK1_P5: &str = r#"{"p": 5, "n": 4, "family": {"kind": "rank1", "matrix": [[1,0,0,0],[0,1,0,0],[0,0,0,0],[0,0,0,0]]}}"#;
const CHAIN_3_5: &str = r#"{"p": 5, "n": 3, "family": {"kind": "chain"}}"#;

#[test]
fn validate_accepts_rank1() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "a.json", RANK1_P5);
    let out = hgs(&["validate", s(&path)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("valid: yes"));
}

#[test]
fn validate_names_commutativity_violation() {
    let dir = TempDir::new().unwrap();
    // x0 x1 = x2 but x1 x0 = 0
    let path = write(
        &dir,
        "a.json",
        r#"{"p": 3, "n": 3, "structure": [
            [[0,0,0],[0,0,1],[0,0,0]],
            [[0,0,0],[0,0,0],[0,0,0]],
            [[0,0,0],[0,0,0],[0,0,0]]]}"#,
    );
    let out = hgs(&["validate", s(&path)]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("commutative: no"));
    assert!(out.stdout.contains("(0, 1)"), "{}", out.stdout);
}

#[test]
fn malformed_file_exits_2_with_location() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "a.json", "{\"p\": 5,\n \"n\": }");
    let out = hgs(&["validate", s(&path)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("a.json:2:"), "{}", out.stderr);
    let out = hgs(&["validate", s(&dir.path().join("missing.json"))]);
    assert_eq!(out.code, 2);
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(hgs(&["count", "--n", "2"]).code, 2);
    assert_eq!(
        hgs(&["count", "--n", "2", "--p", "5", "--verify-budget", "1.5"]).code,
        2
    );
    let help = hgs(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("descent"));
}

#[test]
fn classify_rank1_even_plus() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "a.json", RANK1_P5);
    let out = hgs(&["classify", s(&path)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("k = 2"));
    assert!(out.stdout.contains("case = even-plus"));
}

#[test]
fn classify_chain_and_zero() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "c.json", CHAIN_3_5);
    let out = hgs(&["classify", s(&chain)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("A^3 != 0; use chain subcommand"));

    let zero = write(
        &dir,
        "z.json",
        r#"{"p": 3, "n": 2, "structure": [[[0,0],[0,0]],[[0,0],[0,0]]]}"#,
    );
    let out = hgs(&["classify", s(&zero)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("case = zero"));
}

#[test]
fn classify_rejects_large_square() {
    let dir = TempDir::new().unwrap();
    // x0^2 = x2, x1^2 = x3: dim A^2 = 2
    let mut nested = vec![vec![vec![0i64; 4]; 4]; 4];
    nested[0][0][2] = 1;
    nested[1][1][3] = 1;
    let text = serde_json::json!({"p": 3, "n": 4, "structure": nested}).to_string();
    let path = write(&dir, "a.json", &text);
    let out = hgs(&["classify", s(&path)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("dim A^2"), "{}", out.stderr);
}

#[test]
fn count_n2_p5() {
    let out = hgs(&["count", "--n", "2", "--p", "5"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("total over nonzero forms = 24"));
}

#[test]
fn count_n4_p3_table() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("count.json");
    let out = hgs(&["count", "--n", "4", "--p", "3", "--out", s(&out_path)]);
    assert_eq!(out.code, 0);
    let rows: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.trim_start().starts_with(char::is_numeric))
        .collect();
    assert_eq!(rows.len(), 4, "{}", out.stdout);
    for c in ["1040", "6240", "3120", "18720"] {
        assert!(out.stdout.contains(c));
    }
    assert!(out.stdout.contains("= 29120"));
    assert!(out.stdout.contains("exceeds p^9 = 19683: yes"));

    let file: CountFile = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file.total, 29120);
    assert!(file.exceeds_p9);
}

#[test]
fn count_n3_p3_verified() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("count.json");
    let out = hgs(&[
        "count",
        "--n",
        "3",
        "--p",
        "3",
        "--verify-budget",
        "2e4",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(
        out.stdout.matches("verified (orbit").count(),
        3,
        "{}",
        out.stdout
    );
    let file: CountFile = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    for row in file.rows.iter().filter(|r| r.k > 0) {
        let v = row.verification.as_ref().unwrap();
        assert_eq!(v.status, "verified");
        assert_eq!(v.oracle_orbit, Some(row.count));
    }
}

#[test]
fn count_over_budget_is_formula_only() {
    let out = hgs(&["count", "--n", "3", "--p", "5", "--verify-budget", "1000"]);
    assert_eq!(out.code, 0);
    let rows = out
        .stdout
        .lines()
        .filter(|l| l.trim_start().starts_with(char::is_numeric) && l.ends_with("formula only"));
    assert_eq!(rows.count(), 3, "{}", out.stdout);
}

#[test]
fn count_rejects_n5() {
    assert_eq!(hgs(&["count", "--n", "5", "--p", "3"]).code, 1);
}

#[test]
fn chain_n3_p5_passes() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("chain.json");
    let out = hgs(&["chain", "--n", "3", "--p", "5", "--out", s(&out_path)]);
    assert_eq!(out.code, 0, "{}\n{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("(expected, observed) = (100, 100)"));
    let file: ChainFile = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file.stabilizer, Some((100, 100)));
    assert_eq!(file.tables.b.len(), 125);
    assert!(file.tables.alpha.is_some());
}

#[test]
fn chain_requires_p_above_n() {
    let out = hgs(&["chain", "--n", "3", "--p", "3"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("requires p > n"));
}

#[test]
fn chain_n2_notes_cube_zero_path() {
    let out = hgs(&["chain", "--n", "2", "--p", "5"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("affine descent path also applies"));
}

#[test]
fn descent_rank1_file() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "a.json",
        r#"{"p": 3, "n": 3, "family": {"kind": "rank1", "matrix": [[1,0,0],[0,2,0],[0,0,0]]}}"#,
    );
    let out_path = dir.path().join("d.json");
    let out = hgs(&["descent", s(&input), "--out", s(&out_path)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let file: DescentFile = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file.source, "cube-zero");
    assert_eq!(file.conjugation_table.len(), 27);
    assert_eq!(file.action_exponent.as_ref().unwrap().len(), 27);
    assert!(file.chain_tables.is_none());
}

#[test]
fn descent_chain_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.json", CHAIN_3_5);
    let out = hgs(&["descent", s(&input)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let json = &out.stdout[out.stdout.find("\n{").unwrap()..];
    let file: DescentFile = serde_json::from_str(json).unwrap();
    assert_eq!(file.source, "chain");
    assert!(file.chain_tables.unwrap().alpha.is_some());

    let small = write(
        &dir,
        "c3.json",
        r#"{"p": 3, "n": 3, "family": {"kind": "chain"}}"#,
    );
    let out = hgs(&["descent", s(&small)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("requires p > n"));
}

#[test]
fn oracle_subcommands_match_formulas() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "a.json",
        r#"{"p": 3, "n": 3, "family": {"kind": "rank1", "matrix": [[1,0,0],[0,2,0],[0,0,0]]}}"#,
    );
    let out = hgs(&["oracle", "orbit", s(&path)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("orbit size = 156"));
    let out = hgs(&["--workers", "3", "oracle", "stabilizer", s(&path)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("stabilizer size = 72"));
    let out = hgs(&["oracle", "go", "--k", "2", "--p", "5", "--s", "2"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("brute force = 12"));
    let out = hgs(&["oracle", "orbit", s(&path), "--verify-budget", "100"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("budget"));
}

#[test]
fn emitted_algebra_files_round_trip() {
    let p = Prime::new(7).unwrap();
    let phi = FpMatrix::from_rows(p, &[[3, 1, 0], [1, -2, 0], [0, 0, 0]]).unwrap();
    let a = NilpotentAlgebra::rank1(&phi).unwrap();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("a.json");
    let file = AlgebraFile::from_algebra(&a, None);
    file.save(&path).unwrap();
    let back = AlgebraFile::load(&path).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_algebra(&path).unwrap(), a);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hgs");
    let ok = Command::new(bin)
        .args(["count", "--n", "2", "--p", "5"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("= 24"));
    let bad = Command::new(bin)
        .args(["chain", "--n", "3", "--p", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let missing = Command::new(bin)
        .args(["validate", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
