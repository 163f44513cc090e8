//! TOML fixture manifests.
//!
//! ```toml
//! name = "flat-r4"
//!
//! [total]
//! dim = 4
//! metric = "euclidean"
//! box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]
//!
//! [base]
//! dim = 2
//! metric = "euclidean"
//!
//! [map]
//! components = ["x1", "x2"]
//!
//! structure = "canonical"   # top level, before the first table
//!
//! [samples]
//! mode = "lowdiscrepancy"
//! count = 64
//! seed = 42
//! ```
//!
//! Metrics may also be square grids of expressions or numbers, and the
//! structure may be given as explicit `i`, `j`, `k` matrix grids.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, DomainBox, SmoothMapSpec};
use crate::fixtures::Fixture;
use crate::quaternionic::{MatrixField, StructureTriple};
use crate::riemann::MetricField;
use crate::sampling::{SampleMode, SamplePlan, DEFAULT_COUNT, DEFAULT_SEED};
use crate::submersion::SubmersionFixture;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: Option<String>,
    pub description: Option<String>,
    pub structure: Option<StructureSpec>,
    pub total: TotalSpec,
    pub base: BaseSpec,
    pub map: MapSpec,
    pub samples: Option<SamplesSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TotalSpec {
    pub dim: usize,
    pub metric: MetricSpec,
    #[serde(rename = "box")]
    pub domain: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub dim: usize,
    pub metric: MetricSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub components: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Expr(String),
}

impl Entry {
    fn source(&self) -> String {
        match self {
            Entry::Number(x) => format!("({x:?})"),
            Entry::Expr(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    /// Only `"euclidean"` is accepted.
    Named(String),
    Grid(Vec<Vec<Entry>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum StructureSpec {
    /// Only `"canonical"` is accepted.
    Named(String),
    Explicit {
        i: Vec<Vec<Entry>>,
        j: Vec<Vec<Entry>>,
        k: Vec<Vec<Entry>>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesSpec {
    pub mode: Option<SampleMode>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
}

impl Manifest {
    /// Parses TOML; errors carry the line and column of the offending token.
    pub fn parse(text: &str) -> Result<Manifest> {
        toml::from_str(text).map_err(|e| Error::Manifest(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<(Manifest, Vec<u8>)> {
        let bytes = std::fs::read(path)?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Error::Manifest(format!("{}: not UTF-8: {e}", path.display())))?;
        Ok((Manifest::parse(text)?, bytes))
    }

    /// Validates dimensions and builds the fixture.
    pub fn build(&self, default_name: &str) -> Result<Fixture> {
        let name = self.name.clone().unwrap_or_else(|| default_name.to_string());
        let n = self.total.dim;
        if n == 0 {
            return Err(Error::Manifest("total.dim must be positive".into()));
        }
        if self.structure.is_some() && !n.is_multiple_of(4) {
            return Err(Error::StructureDimension(n));
        }
        if self.base.dim > n {
            return Err(Error::DimensionMismatch(format!(
                "base.dim = {} exceeds total.dim = {n}",
                self.base.dim
            )));
        }
        if self.map.components.len() != self.base.dim {
            return Err(Error::DimensionMismatch(format!(
                "map has {} components but base.dim = {}",
                self.map.components.len(),
                self.base.dim
            )));
        }
        let total = metric(&self.total.metric, n, "total.metric")?;
        let base = metric(&self.base.metric, self.base.dim, "base.metric")?;

        let domain = match &self.total.domain {
            None => DomainBox::unbounded(n),
            Some(b) => {
                if b.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "total.box has {} intervals but total.dim = {n}",
                        b.len()
                    )));
                }
                if let Some((i, _)) = b.iter().enumerate().find(|(_, [lo, hi])| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less)) {
                    return Err(Error::Manifest(format!("total.box[{i}] is empty")));
                }
                DomainBox::new(b.iter().map(|[lo, hi]| (*lo, *hi)).collect())
            }
        };
        let components = self
            .map
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| at_path(parse_expr(c, n), &format!("map.components[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let map = SmoothMapSpec::new(n, components, domain)?;

        let structure = match &self.structure {
            None => None,
            Some(StructureSpec::Named(s)) if s == "canonical" => Some(StructureTriple::canonical(n / 4)),
            Some(StructureSpec::Named(s)) => {
                return Err(Error::Manifest(format!(
                    "structure: expected \"canonical\" or explicit i, j, k matrices, found \"{s}\""
                )))
            }
            Some(StructureSpec::Explicit { i, j, k }) => Some(StructureTriple::new(
                matrix(i, n, "structure.i")?,
                matrix(j, n, "structure.j")?,
                matrix(k, n, "structure.k")?,
            )?),
        };

        let samples = match &self.samples {
            None => SamplePlan::default(),
            Some(s) => {
                let mode = s.mode.unwrap_or(if s.points.is_empty() {
                    SampleMode::LowDiscrepancy
                } else {
                    SampleMode::Explicit
                });
                match mode {
                    SampleMode::Explicit => {
                        if s.points.is_empty() {
                            return Err(Error::Manifest("samples.points is empty in explicit mode".into()));
                        }
                        SamplePlan::explicit(s.points.clone())
                    }
                    SampleMode::Grid => SamplePlan::grid(s.count.unwrap_or(DEFAULT_COUNT)),
                    SampleMode::LowDiscrepancy => {
                        SamplePlan::low_discrepancy(s.count.unwrap_or(DEFAULT_COUNT), s.seed.unwrap_or(DEFAULT_SEED))
                    }
                }
            }
        };
        let submersion = SubmersionFixture::new(name.clone(), total, base, map)?.with_samples(samples);
        Ok(Fixture {
            name,
            description: self.description.clone().unwrap_or_default(),
            submersion,
            structure,
        })
    }
}

fn at_path<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| Error::Manifest(format!("{path}: {e}")))
}

fn grid_sources(grid: &[Vec<Entry>], dim: usize, path: &str) -> Result<Vec<Vec<String>>> {
    if grid.len() != dim || grid.iter().any(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch(format!("{path} must be a {dim}x{dim} grid")));
    }
    Ok(grid.iter().map(|row| row.iter().map(Entry::source).collect()).collect())
}

fn metric(spec: &MetricSpec, dim: usize, path: &str) -> Result<MetricField> {
    match spec {
        MetricSpec::Named(s) if s == "euclidean" => Ok(MetricField::euclidean(dim)),
        MetricSpec::Named(s) => Err(Error::Manifest(format!(
            "{path}: expected \"euclidean\" or a grid, found \"{s}\""
        ))),
        MetricSpec::Grid(g) => {
            let src = grid_sources(g, dim, path)?;
            at_path(MetricField::parse_grid(&src), path)
        }
    }
}

fn matrix(grid: &[Vec<Entry>], dim: usize, path: &str) -> Result<MatrixField> {
    let src = grid_sources(grid, dim, path)?;
    at_path(MatrixField::parse_grid(&src), path)
}

/// Reads, validates and builds a manifest file. Also returns its bytes for
/// digesting.
pub fn load_fixture(path: &Path) -> Result<(Fixture, Vec<u8>)> {
    let (manifest, bytes) = Manifest::load(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("manifest");
    Ok((manifest.build(stem)?, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
structure = "canonical"

[total]
dim = 4
metric = "euclidean"
box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]

[base]
dim = 2
metric = [[1, 0], [0, 1]]

[map]
components = ["x1", "x2"]

[samples]
count = 8
seed = 7
"#;

    #[test]
    fn builds_flat_projection() {
        let f = Manifest::parse(FLAT).unwrap().build("flat").unwrap();
        assert_eq!(f.submersion.dim(), 4);
        assert_eq!(f.submersion.sample_points().unwrap().len(), 8);
        assert!(f.structure.is_some());
    }

    #[test]
    fn six_dimensions_with_structure_rejected() {
        let text = r#"
structure = "canonical"
[total]
dim = 6
metric = "euclidean"
[base]
dim = 1
metric = "euclidean"
[map]
components = ["x1"]
"#;
        let err = Manifest::parse(text).unwrap().build("six").unwrap_err();
        assert!(err.to_string().contains("dimension not divisible by 4"), "{err}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = Manifest::parse("[total]\ndim = = 4\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let bad = FLAT.replace("\"x2\"", "\"x2 +\"");
        let err = Manifest::parse(&bad).unwrap().build("bad").unwrap_err();
        assert!(err.to_string().contains("map.components[1]"), "{err}");
        assert!(err.to_string().contains("column"), "{err}");
    }
}
