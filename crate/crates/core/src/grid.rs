//! Dyadic time grids on [0,1].
//!
//! A grid of level m has the 2^m + 1 nodes t_j = j * 2^{-m}. Dyadic nodes
//! are exact in f64, so grid arithmetic (dt * 2^m = 1, node lookup, Haar
//! cell alignment) is exact rather than approximate.

use crate::error::{Error, Result};

/// Uniform dyadic discretization of [0,1]: nodes t_j = j * 2^{-m}.
///
/// Only the level count is stored; nodes are derived on demand, so the
/// struct is `Copy` and cheap to embed in every path sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeGrid {
    levels: u32,
}

impl TimeGrid {
    /// Largest supported level; 2^24 + 1 nodes is the memory guard.
    pub const MAX_LEVELS: u32 = 24;

    /// Grid of level `levels` with 2^levels cells.
    pub fn new(levels: u32) -> Result<Self> {
        if levels > Self::MAX_LEVELS {
            return Err(Error::invalid(
                "levels",
                format!("level {levels} exceeds maximum {}", Self::MAX_LEVELS),
            ));
        }
        Ok(TimeGrid { levels })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Number of cells, 2^m.
    pub fn cells(&self) -> usize {
        1usize << self.levels
    }

    /// Number of nodes, 2^m + 1.
    pub fn len(&self) -> usize {
        self.cells() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell width dt = 2^{-m}, exact in f64.
    pub fn dt(&self) -> f64 {
        (-(self.levels as i32) as f64).exp2()
    }

    /// Node t_j = j * 2^{-m}; exact for every j in range.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j < self.len());
        j as f64 * self.dt()
    }

    /// Midpoint of cell j, (j + 1/2) * 2^{-m}.
    pub fn cell_midpoint(&self, j: usize) -> f64 {
        debug_assert!(j < self.cells());
        (j as f64 + 0.5) * self.dt()
    }

    /// All nodes in order.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.node(j))
    }

    /// Index of a node that equals `t` exactly, if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&t) {
            return None;
        }
        let j = (t / self.dt()).round() as usize;
        (j < self.len() && self.node(j) == t).then_some(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_count_and_endpoints() {
        for m in [0u32, 1, 3, 7] {
            let g = TimeGrid::new(m).unwrap();
            assert_eq!(g.len(), (1usize << m) + 1);
            assert_eq!(g.node(0), 0.0);
            assert_eq!(g.node(g.len() - 1), 1.0);
        }
    }

    #[test]
    fn nodes_strictly_increasing() {
        let g = TimeGrid::new(6).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        for w in nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn dt_times_cell_count_is_exactly_one() {
        for m in [0u32, 4, 10, 20] {
            let g = TimeGrid::new(m).unwrap();
            assert_eq!(g.dt() * g.cells() as f64, 1.0);
        }
    }

    #[test]
    fn node_index_exact_lookup() {
        let g = TimeGrid::new(4).unwrap();
        assert_eq!(g.node_index(0.5), Some(8));
        assert_eq!(g.node_index(1.0), Some(16));
        assert_eq!(g.node_index(0.3), None);
        assert_eq!(g.node_index(-0.1), None);
    }

    #[test]
    fn oversized_level_rejected() {
        assert!(TimeGrid::new(TimeGrid::MAX_LEVELS + 1).is_err());
    }
}
