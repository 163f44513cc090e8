//! Sample plans over a coordinate box.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::DomainBox;

pub const DEFAULT_COUNT: usize = 64;
pub const DEFAULT_SEED: u64 = 42;

/// Fraction of each side trimmed off the box before sampling, so points stay
/// strictly inside.
const SHRINK: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Grid,
    LowDiscrepancy,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub mode: SampleMode,
    pub count: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<f64>>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::low_discrepancy(DEFAULT_COUNT, DEFAULT_SEED)
    }
}

impl SamplePlan {
    pub fn low_discrepancy(count: usize, seed: u64) -> Self {
        SamplePlan {
            mode: SampleMode::LowDiscrepancy,
            count,
            seed,
            points: Vec::new(),
        }
    }

    pub fn grid(count: usize) -> Self {
        SamplePlan {
            mode: SampleMode::Grid,
            count,
            seed: DEFAULT_SEED,
            points: Vec::new(),
        }
    }

    pub fn explicit(points: Vec<Vec<f64>>) -> Self {
        SamplePlan {
            mode: SampleMode::Explicit,
            count: points.len(),
            seed: DEFAULT_SEED,
            points,
        }
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Materializes the plan inside `domain`. Explicit points must lie in the box.
    pub fn points(&self, domain: &DomainBox) -> Result<Vec<DVector<f64>>> {
        let dim = domain.dim();
        if self.mode == SampleMode::Explicit {
            return self
                .points
                .iter()
                .map(|p| {
                    if p.len() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "sample point has {} coordinates, expected {dim}",
                            p.len()
                        )));
                    }
                    domain.check(p)?;
                    Ok(DVector::from_column_slice(p))
                })
                .collect();
        }
        let bounds = shrunk(domain)?;
        let unit = match self.mode {
            SampleMode::Grid => grid_unit(dim, self.count),
            _ => halton_unit(dim, self.count, self.seed),
        };
        Ok(unit
            .into_iter()
            .map(|u| {
                DVector::from_iterator(
                    dim,
                    u.iter()
                        .zip(&bounds)
                        .map(|(t, (lo, hi))| lo + t * (hi - lo)),
                )
            })
            .collect())
    }
}

fn shrunk(domain: &DomainBox) -> Result<Vec<(f64, f64)>> {
    domain
        .bounds
        .iter()
        .map(|&(lo, hi)| {
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(Error::Manifest(format!(
                    "cannot sample the interval [{lo}, {hi}]; give a finite box"
                )));
            }
            let w = hi - lo;
            Ok((lo + 0.5 * SHRINK * w, hi - 0.5 * SHRINK * w))
        })
        .collect()
}

fn grid_unit(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let mut k = 1usize;
    while (k + 1).checked_pow(dim as u32).is_some_and(|c| c <= count.max(1)) {
        k += 1;
    }
    let total = k.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let i = idx % k;
                    idx /= k;
                    if k == 1 {
                        0.5
                    } else {
                        i as f64 / (k - 1) as f64
                    }
                })
                .collect()
        })
        .collect()
}

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points with a Cranley–Patterson rotation drawn from `seed`.
fn halton_unit(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let bases = primes(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            bases
                .iter()
                .zip(&shift)
                .map(|(b, s)| (radical_inverse(i, *b) + s).fract())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_discrepancy_is_seeded_and_inside() {
        let b = DomainBox::cube(3, -1.0, 1.0);
        let a = SamplePlan::low_discrepancy(16, 7).points(&b).unwrap();
        let again = SamplePlan::low_discrepancy(16, 7).points(&b).unwrap();
        let other = SamplePlan::low_discrepancy(16, 8).points(&b).unwrap();
        assert_eq!(a, again);
        assert_ne!(a, other);
        assert!(a.iter().all(|p| p.iter().all(|x| x.abs() < 0.995 + 1e-12)));
    }

    #[test]
    fn grid_fills_each_axis() {
        let b = DomainBox::new(vec![(0.0, 1.0), (2.0, 3.0)]);
        let pts = SamplePlan::grid(9).points(&b).unwrap();
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn explicit_points_are_checked() {
        let b = DomainBox::cube(1, 0.0, 1.0);
        assert!(SamplePlan::explicit(vec![vec![2.0]]).points(&b).is_err());
        assert!(SamplePlan::default().points(&DomainBox::unbounded(1)).is_err());
    }
}
