//! Sums and convolutions of measures, and weighted `L²` norms of step signals.

use super::repr::{Atom, Cell, MeasureRepr};
use crate::error::{Error, Result};
use crate::operator::StepSignal;

/// Sum of measures on the common refinement of their cells; atoms at equal points are merged.
/// The result is signed if any input is, and its window is the hull of the input windows.
pub fn add_measures(parts: &[MeasureRepr]) -> Result<MeasureRepr> {
    let Some(first) = parts.first() else {
        return Err(Error::domain("cannot add an empty list of measures"));
    };
    let mut window = first.window();
    let mut cuts = Vec::new();
    let mut atoms: Vec<Atom> = Vec::new();
    for m in parts {
        window = (window.0.min(m.window().0), window.1.max(m.window().1));
        for c in m.cells() {
            cuts.push(c.lo);
            cuts.push(c.hi);
        }
        atoms.extend_from_slice(m.atoms());
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let cells: Vec<Cell> = cuts
        .windows(2)
        .map(|w| Cell {
            lo: w[0],
            hi: w[1],
            mass: parts.iter().map(|m| m.cell_mass(w[0], w[1])).sum(),
        })
        .filter(|c| c.mass != 0.0)
        .collect();
    atoms.sort_by(|a, b| a.point.total_cmp(&b.point));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.point == a.point => last.mass += a.mass,
            _ => merged.push(a),
        }
    }
    if parts.iter().any(MeasureRepr::is_signed) {
        MeasureRepr::signed(cells, merged, window)
    } else {
        MeasureRepr::positive(cells, merged, window)
    }
}

/// `μ * ν` for `ν` (or `μ`) atomic: `Σ_k w_k μ(· - t_k)`.
pub fn convolve_measures(mu: &MeasureRepr, nu: &MeasureRepr) -> Result<MeasureRepr> {
    let (spread, atomic) = if nu.is_atomic() {
        (mu, nu)
    } else if mu.is_atomic() {
        (nu, mu)
    } else {
        return Err(Error::Unsupported(
            "convolution needs one atomic measure; both have cells".into(),
        ));
    };
    let (a, b) = (spread.window(), atomic.window());
    let window = (a.0 + b.0, a.1 + b.1);
    if atomic.atoms().is_empty() {
        return MeasureRepr::zero(window);
    }
    let shifted = atomic
        .atoms()
        .iter()
        .map(|a| spread.shifted(a.point)?.scaled(a.mass))
        .collect::<Result<Vec<_>>>()?;
    add_measures(&shifted)?.with_window(window)
}

/// `∫ |f|² dm = Σ_k c_k² m([b_{k-1}, b_k))`.
pub fn weighted_l2(f: &StepSignal, m: &MeasureRepr) -> f64 {
    f.cells().map(|(a, b, c)| c * c * m.measure(a, b)).sum()
}
