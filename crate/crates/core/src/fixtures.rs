//! Builtin fixture corpus.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_map, DomainBox};
use crate::quaternionic::{canonical_matrices, MatrixField, StructureTriple};
use crate::riemann::MetricField;
use crate::submersion::SubmersionFixture;

/// A submersion with an optional structure triple on its total space.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub description: String,
    pub submersion: SubmersionFixture,
    pub structure: Option<StructureTriple>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const CATALOGUE: [FixtureInfo; 11] = [
    FixtureInfo {
        name: "example-3-1",
        description: "linear h-anti-invariant map R^12 -> R^9 with the canonical triple",
    },
    FixtureInfo {
        name: "example-3-2",
        description: "linear h-Lagrangian map R^4 -> R^2, ((x2+x3)/sqrt2, (x1+x4)/sqrt2)",
    },
    FixtureInfo {
        name: "polar",
        description: "radius function on the flat plane; circle fibres",
    },
    FixtureInfo {
        name: "polar-warped",
        description: "dr^2 + r^2 ds^2 projected to r; warped product",
    },
    FixtureInfo {
        name: "twisted-exp",
        description: "dr^2 + exp(2rs) ds^2 projected to r; twisted, not warped",
    },
    FixtureInfo {
        name: "heisenberg",
        description: "left-invariant Heisenberg metric over the plane; non-integrable horizontal space",
    },
    FixtureInfo {
        name: "flat-product",
        description: "coordinate projection R^4 -> R^2 with the canonical triple",
    },
    FixtureInfo {
        name: "sphere-fiber",
        description: "norm function on R^4; round 3-sphere fibres",
    },
    FixtureInfo {
        name: "gibbons-hawking-v0",
        description: "Gibbons-Hawking space with constant potential (flat) over R^3",
    },
    FixtureInfo {
        name: "gibbons-hawking-v1",
        description: "Gibbons-Hawking space with potential 1 + 1/(2r) over R^3",
    },
    FixtureInfo {
        name: "gibbons-hawking",
        description: "alias for gibbons-hawking-v1",
    },
];

pub fn list_fixtures() -> Vec<FixtureInfo> {
    CATALOGUE.to_vec()
}

/// Looks up a builtin fixture by name.
pub fn builtin(name: &str) -> Result<Fixture> {
    let info = CATALOGUE
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    let (submersion, structure) = match name {
        "example-3-1" => (
            flat(name, 12, "x10, x11, x12, x4, x3, x2, x8, x6, x7", DomainBox::cube(12, -1.0, 1.0))?,
            Some(StructureTriple::canonical(3)),
        ),
        "example-3-2" => (
            flat(name, 4, "(x2 + x3)/sqrt(2), (x1 + x4)/sqrt(2)", DomainBox::cube(4, -1.0, 1.0))?,
            Some(StructureTriple::canonical(1)),
        ),
        "polar" => (
            flat(name, 2, "sqrt(x1^2 + x2^2)", DomainBox::new(vec![(0.5, 2.0), (-1.0, 1.0)]))?,
            None,
        ),
        "polar-warped" => (
            curved(
                name,
                &[vec!["1", "0"], vec!["0", "x1^2"]],
                "x1",
                DomainBox::new(vec![(0.5, 2.0), (-1.0, 1.0)]),
            )?,
            None,
        ),
        "twisted-exp" => (
            curved(
                name,
                &[vec!["1", "0"], vec!["0", "exp(2*x1*x2)"]],
                "x1",
                DomainBox::new(vec![(0.5, 1.5), (0.5, 1.5)]),
            )?,
            None,
        ),
        "heisenberg" => (
            curved(
                name,
                &[
                    vec!["1 + x2^2/4", "-x1*x2/4", "x2/2"],
                    vec!["-x1*x2/4", "1 + x1^2/4", "-x1/2"],
                    vec!["x2/2", "-x1/2", "1"],
                ],
                "x1, x2",
                DomainBox::cube(3, -1.0, 1.0),
            )?,
            None,
        ),
        "flat-product" => (
            flat(name, 4, "x1, x2", DomainBox::cube(4, -1.0, 1.0))?,
            Some(StructureTriple::canonical(1)),
        ),
        "sphere-fiber" => (
            flat(
                name,
                4,
                "sqrt(x1^2 + x2^2 + x3^2 + x4^2)",
                DomainBox::new(vec![(0.5, 1.5), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)]),
            )?,
            None,
        ),
        "gibbons-hawking-v0" => {
            let (s, t) = gibbons_hawking(name, false)?;
            (s, Some(t))
        }
        _ => {
            let (s, t) = gibbons_hawking(name, true)?;
            (s, Some(t))
        }
    };
    Ok(Fixture {
        name: name.to_string(),
        description: info.description.to_string(),
        submersion,
        structure,
    })
}

fn flat(name: &str, dim: usize, map: &str, domain: DomainBox) -> Result<SubmersionFixture> {
    let map = parse_map(map, dim)?.with_box(domain)?;
    let base = MetricField::euclidean(map.codomain_dim);
    SubmersionFixture::new(name, MetricField::euclidean(dim), base, map)
}

fn curved(name: &str, metric: &[Vec<&str>], map: &str, domain: DomainBox) -> Result<SubmersionFixture> {
    let total = MetricField::parse_grid(metric)?;
    let map = parse_map(map, total.dim())?.with_box(domain)?;
    let base = MetricField::euclidean(map.codomain_dim);
    SubmersionFixture::new(name, total, base, map)
}

/// `g = V⁻¹(dτ + ω)² + V dx·dx` on `(τ, x) = (x1, x2, x3, x4)`, fibred over
/// `x` with base metric `V δ`. The triple acts on the orthonormal frame
/// `E_0 = V^{1/2}∂τ`, `E_i = V^{-1/2}(∂_i − ω_i∂τ)` by the canonical matrices.
fn gibbons_hawking(name: &str, curved: bool) -> Result<(SubmersionFixture, StructureTriple)> {
    let r = "sqrt(x2^2 + x3^2 + x4^2)";
    let (v, omega): (String, [String; 3]) = if curved {
        let w = format!("(2*{r}*({r} + x4))");
        (
            format!("(1 + 1/(2*{r}))"),
            [format!("(-x3/{w})"), format!("(x2/{w})"), "0".to_string()],
        )
    } else {
        ("1".to_string(), ["0".to_string(), "0".to_string(), "0".to_string()])
    };
    let is_zero = |s: &str| s == "0";
    let mut metric = vec![vec![String::new(); 4]; 4];
    metric[0][0] = format!("1/{v}");
    for i in 0..3 {
        metric[0][i + 1] = if is_zero(&omega[i]) { "0".into() } else { format!("{}/{v}", omega[i]) };
        metric[i + 1][0] = metric[0][i + 1].clone();
        for j in 0..3 {
            let mut terms = Vec::new();
            if i == j {
                terms.push(v.clone());
            }
            if !is_zero(&omega[i]) && !is_zero(&omega[j]) {
                terms.push(format!("{}*{}/{v}", omega[i.min(j)], omega[i.max(j)]));
            }
            metric[i + 1][j + 1] = join(terms);
        }
    }
    let total = MetricField::parse_grid(&metric)?;

    let mut fields = Vec::with_capacity(3);
    for c in canonical_matrices(1) {
        let mut entries: Vec<Vec<Vec<String>>> = vec![vec![Vec::new(); 4]; 4];
        let mut add = |row: usize, col: usize, coeff: f64, term: String| {
            if coeff != 0.0 {
                entries[row][col].push(format!("({coeff})*{term}"));
            }
        };
        for j in 1..4 {
            add(0, j, c[(0, j)], v.clone());
        }
        for i in 1..4 {
            let ci0 = c[(i, 0)];
            add(i, 0, ci0, format!("1/{v}"));
            if !is_zero(&omega[i - 1]) {
                add(0, 0, ci0, format!("(-{})/{v}", omega[i - 1]));
            }
            for k in 1..4 {
                if !is_zero(&omega[k - 1]) {
                    add(i, k, ci0, format!("{}/{v}", omega[k - 1]));
                    if !is_zero(&omega[i - 1]) {
                        add(0, k, ci0, format!("(-{}*{})/{v}", omega[i - 1], omega[k - 1]));
                    }
                }
            }
            for j in 1..4 {
                add(i, j, c[(i, j)], "1".to_string());
                if !is_zero(&omega[i - 1]) {
                    add(0, j, c[(i, j)], format!("(-{})", omega[i - 1]));
                }
            }
        }
        let grid: Vec<Vec<String>> = entries
            .into_iter()
            .map(|row| row.into_iter().map(join).collect())
            .collect();
        fields.push(MatrixField::parse_grid(&grid)?);
    }
    let k = fields.pop().expect("three fields");
    let j = fields.pop().expect("three fields");
    let i = fields.pop().expect("three fields");
    let triple = StructureTriple::new(i, j, k)?;

    let domain = DomainBox::new(vec![(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (0.5, 1.5)]);
    let map = parse_map("x2, x3, x4", 4)?.with_box(domain)?;
    let base_v = v
        .replace("x2", "y1")
        .replace("x3", "y2")
        .replace("x4", "y3")
        .replace('y', "x");
    let base = if curved {
        MetricField::parse_grid(&[
            vec![base_v.clone(), "0".into(), "0".into()],
            vec!["0".into(), base_v.clone(), "0".into()],
            vec!["0".into(), "0".into(), base_v],
        ])?
    } else {
        MetricField::euclidean(3)
    };
    Ok((SubmersionFixture::new(name, total, base, map)?, triple))
}

fn join(terms: Vec<String>) -> String {
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}
