//! Delay and time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate_nodes(nodes: &[f64], what: &str) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::domain(format!("{what} has no nodes")));
    }
    if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("{what} node {bad} is not finite")));
    }
    for pair in nodes.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::domain(format!(
                "{what} is not strictly increasing at {} -> {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

fn lattice_nodes(step: f64, lo: f64, hi: f64, what: &str) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::domain(format!(
            "{what} lattice needs step > 0 and lo <= hi (got step {step}, [{lo}, {hi}])"
        )));
    }
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    if last < first {
        return Err(Error::domain(format!("{what} lattice [{lo}, {hi}] holds no node")));
    }
    Ok((first..=last).map(|k| k as f64 * step).collect())
}

fn find_node(nodes: &[f64], x: f64) -> Option<usize> {
    let tol = 1e-9 * x.abs().max(1.0);
    let idx = nodes.partition_point(|&n| n < x - tol);
    (idx < nodes.len() && (nodes[idx] - x).abs() <= tol).then_some(idx)
}

/// Strictly increasing delay nodes; the origin is always a node so paths can be anchored at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayGrid {
    nodes: Vec<f64>,
    zero: usize,
}

impl DelayGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        validate_nodes(&nodes, "delay grid")?;
        let zero = nodes
            .iter()
            .position(|&u| u == 0.0)
            .ok_or_else(|| Error::domain("delay grid must contain the origin"))?;
        Ok(DelayGrid { nodes, zero })
    }

    /// Nodes `k * step` for every integer `k` with `k * step` in `[lo, hi]`.
    pub fn lattice(step: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(lattice_nodes(step, lo, hi, "delay grid")?)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn zero_index(&self) -> usize {
        self.zero
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of the node equal to `u` (up to rounding), if any.
    pub fn find(&self, u: f64) -> Option<usize> {
        find_node(&self.nodes, u)
    }

    pub fn index_of(&self, u: f64) -> Result<usize> {
        self.find(u).ok_or_else(|| {
            Error::window(format!(
                "delay {u} is not a node of the delay grid [{}, {}]",
                self.first(),
                self.last()
            ))
        })
    }
}

/// Equally spaced time nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    step: f64,
}

impl TimeGrid {
    pub fn lattice(step: f64, lo: f64, hi: f64) -> Result<Self> {
        let nodes = lattice_nodes(step, lo, hi, "time grid")?;
        Ok(TimeGrid { nodes, step })
    }

    /// A single time node (purely spatial experiments).
    pub fn single(t: f64) -> Result<Self> {
        validate_nodes(&[t], "time grid")?;
        Ok(TimeGrid {
            nodes: vec![t],
            step: 1.0,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn find(&self, t: f64) -> Option<usize> {
        find_node(&self.nodes, t)
    }

    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.find(t)
            .ok_or_else(|| Error::window(format!("time {t} is not a node of the time grid")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_hits_origin_exactly() {
        let g = DelayGrid::lattice(0.1, -1.0, 1.0).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g.nodes()[g.zero_index()], 0.0);
        assert_eq!(g.find(0.3), Some(13));
        assert_eq!(g.find(0.35), None);
    }

    #[test]
    fn non_monotone_or_originless_grids_are_rejected() {
        assert!(DelayGrid::new(vec![0.0, 1.0, 0.5]).is_err());
        assert!(DelayGrid::new(vec![0.5, 1.0]).is_err());
        assert!(DelayGrid::new(vec![-1.0, 0.0, f64::NAN]).is_err());
    }
}
