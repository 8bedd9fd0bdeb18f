//! Runs each script under tests/golden through the binary and compares the
//! output with the `.expected` file next to it. `UPDATE_GOLDEN=1` rewrites
//! the expected files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn args_of(text: &str) -> Vec<String> {
    let first = text.lines().next().unwrap_or_default();
    let rest = first.strip_prefix("; args:").expect("first line must be `; args: ...`");
    rest.split_whitespace().map(str::to_string).collect()
}

fn render(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eqcad"));
    cmd.args(args_of(&text));
    if path.extension().is_some_and(|e| e == "smt2") {
        cmd.arg(path);
    }
    let out = cmd.output().unwrap();
    format!(
        "{}--- stderr\n{}--- exit {}\n",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
        out.status.code().unwrap_or(-1)
    )
}

#[test]
fn golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut inputs: Vec<PathBuf> = fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "smt2" || e == "args"))
        .collect();
    inputs.sort();
    assert!(!inputs.is_empty());
    let mut failed = Vec::new();
    for input in &inputs {
        let got = render(input);
        let expected_path = input.with_extension("expected");
        if update {
            fs::write(&expected_path, &got).unwrap();
            continue;
        }
        let expected = fs::read_to_string(&expected_path)
            .unwrap_or_else(|_| panic!("missing {}", expected_path.display()));
        if got != expected {
            eprintln!("mismatch for {}:\n--- expected\n{expected}\n--- got\n{got}", input.display());
            failed.push(input.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    assert!(failed.is_empty(), "golden mismatches: {failed:?}");
}
