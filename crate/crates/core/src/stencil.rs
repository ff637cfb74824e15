//! Integer offset stencils shared by the reachability graph and the metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus_grid::TorusGrid;

pub const DEFAULT_RADIUS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stencil {
    dim: usize,
    radius: usize,
    offsets: Vec<Vec<i64>>,
}

impl Stencil {
    /// All nonzero offsets of Chebyshev norm at most `radius`.
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 || radius == 0 {
            return Err(Error::InvalidArgument(format!(
                "stencil needs dim >= 1 and radius >= 1 (got {dim}, {radius})"
            )));
        }
        let side = 2 * radius + 1;
        let total = side.pow(dim as u32);
        let offsets = (0..total)
            .map(|mut code| {
                (0..dim)
                    .map(|_| {
                        let d = (code % side) as i64 - radius as i64;
                        code /= side;
                        d
                    })
                    .collect::<Vec<i64>>()
            })
            .filter(|o| o.iter().any(|&c| c != 0))
            .collect();
        Ok(Self {
            dim,
            radius,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Index of the offset `−o`.
    pub fn opposite(&self, j: usize) -> usize {
        let neg: Vec<i64> = self.offsets[j].iter().map(|c| -c).collect();
        self.offsets.iter().position(|o| *o == neg).expect("stencil is symmetric")
    }

    /// Physical displacement `o·h` of offset `j`.
    pub fn displacement(&self, grid: &TorusGrid, j: usize) -> Vec<f64> {
        self.offsets[j]
            .iter()
            .enumerate()
            .map(|(a, &c)| c as f64 * grid.spacing(a))
            .collect()
    }

    /// Flattened `cells × offsets` table of wrapped targets.
    pub fn neighbor_table(&self, grid: &TorusGrid) -> Result<Vec<usize>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: grid.dim(),
            });
        }
        let m = self.len();
        let mut out = vec![0usize; grid.len() * m];
        for c in 0..grid.len() {
            for (j, o) in self.offsets.iter().enumerate() {
                out[c * m + j] = grid.shift(c, o);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(Stencil::new(2, 1).unwrap().len(), 8);
        assert_eq!(Stencil::new(2, 2).unwrap().len(), 24);
        assert_eq!(Stencil::new(3, 2).unwrap().len(), 124);
        assert!(Stencil::new(2, 0).is_err());
    }

    #[test]
    fn opposite_pairs() {
        let s = Stencil::new(2, 2).unwrap();
        for j in 0..s.len() {
            let k = s.opposite(j);
            assert_eq!(s.opposite(k), j);
            assert_ne!(j, k);
        }
    }
}
