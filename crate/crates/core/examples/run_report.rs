//! Build a report from a TOML manifest the same way the `quatsub` binary does.

use clap::Parser;
use quatsub::cli::{execute, Cli};
use quatsub::report::sha256_hex;

const MANIFEST: &str = r#"
name = "warped-plane"
description = "dr^2 + r^2 ds^2 over r"

[total]
dim = 2
metric = [["1", "0"], ["0", "x1^2"]]
box = [[0.5, 2.0], [-1.0, 1.0]]

[base]
dim = 1
metric = "euclidean"

[map]
components = ["x1"]

[samples]
mode = "lowdiscrepancy"
count = 16
seed = 7
"#;

fn main() -> quatsub::Result<()> {
    let path = std::env::temp_dir().join("quatsub-warped-plane.toml");
    std::fs::write(&path, MANIFEST)?;
    let cli = Cli::parse_from(["quatsub", "report", "--all", "--manifest", path.to_str().unwrap()]);
    let report = execute(&cli)?;
    println!("product: {}", report.product_label.as_deref().unwrap_or("-"));
    for t in &report.theorems {
        println!("{}: {}", t.id, t.verdict);
    }
    let json = report.to_json()?;
    println!("exit code {}, report sha256 {}", report.exit_code, sha256_hex(json.as_bytes()));
    Ok(())
}
