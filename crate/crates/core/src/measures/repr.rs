use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A half-open interval `[lo, hi)` carrying `mass`, spread uniformly over the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: f64,
    pub mass: f64,
}

/// A finite Borel measure on a bounded window, stored as cell masses plus atoms.
///
/// Positive measures reject negative masses; signed measures (correlation measures) allow them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRepr {
    cells: Vec<Cell>,
    atoms: Vec<Atom>,
    window: (f64, f64),
    signed: bool,
}

impl MeasureRepr {
    pub fn positive(cells: Vec<Cell>, atoms: Vec<Atom>, window: (f64, f64)) -> Result<Self> {
        Self::build(cells, atoms, window, false)
    }

    pub fn signed(cells: Vec<Cell>, atoms: Vec<Atom>, window: (f64, f64)) -> Result<Self> {
        Self::build(cells, atoms, window, true)
    }

    pub fn zero(window: (f64, f64)) -> Result<Self> {
        Self::positive(Vec::new(), Vec::new(), window)
    }

    /// `density` times Lebesgue measure on `[lo, hi)`, with that interval as window.
    pub fn uniform(lo: f64, hi: f64, density: f64) -> Result<Self> {
        let cells = if density == 0.0 {
            Vec::new()
        } else {
            vec![Cell {
                lo,
                hi,
                mass: density * (hi - lo),
            }]
        };
        Self::positive(cells, Vec::new(), (lo, hi))
    }

    fn build(
        mut cells: Vec<Cell>,
        mut atoms: Vec<Atom>,
        window: (f64, f64),
        signed: bool,
    ) -> Result<Self> {
        let (wlo, whi) = window;
        if !(wlo.is_finite() && whi.is_finite() && wlo < whi) {
            return Err(Error::domain(format!("measure window ({wlo}, {whi}) is not a bounded interval")));
        }
        for c in &cells {
            if !(c.lo.is_finite() && c.hi.is_finite() && c.mass.is_finite()) || c.lo >= c.hi {
                return Err(Error::domain(format!("invalid cell [{}, {})", c.lo, c.hi)));
            }
            if c.lo < wlo || c.hi > whi {
                return Err(Error::domain(format!(
                    "cell [{}, {}) leaves the window [{wlo}, {whi})",
                    c.lo, c.hi
                )));
            }
            if !signed && c.mass < 0.0 {
                return Err(Error::domain(format!(
                    "negative mass {} on cell [{}, {}) of a positive measure",
                    c.mass, c.lo, c.hi
                )));
            }
        }
        cells.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for pair in cells.windows(2) {
            if pair[0].hi > pair[1].lo {
                return Err(Error::domain(format!(
                    "cells [{}, {}) and [{}, {}) overlap",
                    pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
                )));
            }
        }
        for a in &atoms {
            if !(a.point.is_finite() && a.mass.is_finite()) || a.point < wlo || a.point > whi {
                return Err(Error::domain(format!("invalid atom at {}", a.point)));
            }
            if !signed && a.mass < 0.0 {
                return Err(Error::domain(format!("negative atom mass at {}", a.point)));
            }
        }
        atoms.sort_by(|a, b| a.point.total_cmp(&b.point));
        Ok(MeasureRepr {
            cells,
            atoms,
            window,
            signed,
        })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn is_atomic(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.mass == 0.0) && self.atoms.iter().all(|a| a.mass == 0.0)
    }

    /// Mass of `[a, b)`. Atoms follow the left-closed convention.
    pub fn measure(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        for c in &self.cells {
            if c.hi <= a {
                continue;
            }
            if c.lo >= b {
                break;
            }
            if c.lo >= a && c.hi <= b {
                total += c.mass;
            } else {
                let overlap = c.hi.min(b) - c.lo.max(a);
                total += c.mass * (overlap / (c.hi - c.lo));
            }
        }
        for atom in &self.atoms {
            if atom.point >= a && atom.point < b {
                total += atom.mass;
            }
        }
        total
    }

    pub fn measure_of(&self, set: &CellUnion) -> f64 {
        set.intervals().iter().map(|&(a, b)| self.measure(a, b)).sum()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().map(|c| c.mass).sum::<f64>() + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Total variation, |cell masses| plus |atom masses|.
    pub fn total_variation(&self) -> f64 {
        self.cells.iter().map(|c| c.mass.abs()).sum::<f64>()
            + self.atoms.iter().map(|a| a.mass.abs()).sum::<f64>()
    }

    /// Multiply every mass by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell {
                mass: c.mass * factor,
                ..*c
            })
            .collect();
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                mass: a.mass * factor,
                ..*a
            })
            .collect();
        Self::build(cells, atoms, self.window, self.signed)
    }

    /// Image under `x -> x + d`, window included.
    pub fn shifted(&self, d: f64) -> Result<Self> {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell {
                lo: c.lo + d,
                hi: c.hi + d,
                mass: c.mass,
            })
            .collect();
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                point: a.point + d,
                mass: a.mass,
            })
            .collect();
        Self::build(cells, atoms, (self.window.0 + d, self.window.1 + d), self.signed)
    }

    /// The same masses on a different window.
    pub fn with_window(&self, window: (f64, f64)) -> Result<Self> {
        Self::build(self.cells.clone(), self.atoms.clone(), window, self.signed)
    }

    /// Mass of `[a, b)` carried by cells only.
    pub(crate) fn cell_mass(&self, a: f64, b: f64) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.hi > a && c.lo < b)
            .map(|c| {
                if c.lo >= a && c.hi <= b {
                    c.mass
                } else {
                    c.mass * ((c.hi.min(b) - c.lo.max(a)) / (c.hi - c.lo))
                }
            })
            .sum()
    }

    /// Image under `x -> -x`. Cells stay half-open on the left.
    pub fn reflected(&self) -> Self {
        let mut cells: Vec<Cell> = self
            .cells
            .iter()
            .map(|c| Cell {
                lo: -c.hi,
                hi: -c.lo,
                mass: c.mass,
            })
            .collect();
        cells.reverse();
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                point: -a.point,
                mass: a.mass,
            })
            .collect();
        atoms.reverse();
        MeasureRepr {
            cells,
            atoms,
            window: (-self.window.1, -self.window.0),
            signed: self.signed,
        }
    }
}

/// A finite union of disjoint half-open intervals `[a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellUnion {
    intervals: Vec<(f64, f64)>,
}

impl CellUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::domain(format!("[{a}, {b}) is not an interval")));
            }
        }
        intervals.retain(|&(a, b)| a < b);
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for pair in intervals.windows(2) {
            if pair[0].1 > pair[1].0 {
                return Err(Error::domain(format!(
                    "intervals [{}, {}) and [{}, {}) overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(CellUnion { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn empty() -> Self {
        CellUnion {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `t - B`. Endpoint openness is not tracked; the sets differ only on a null set.
    pub fn reflect(&self, t: f64) -> Self {
        let mut intervals: Vec<(f64, f64)> =
            self.intervals.iter().map(|&(a, b)| (t - b, t - a)).collect();
        intervals.reverse();
        CellUnion { intervals }
    }

    /// `B + d`.
    pub fn shift(&self, d: f64) -> Self {
        CellUnion {
            intervals: self.intervals.iter().map(|&(a, b)| (a + d, b + d)).collect(),
        }
    }

    pub fn lebesgue(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.intervals.iter().all(|&(a, b)| a >= lo && b <= hi)
    }
}
