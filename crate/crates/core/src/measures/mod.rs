//! Measures on delay windows: representations, the closed-form variance and correlation
//! measures of a channel, their Monte Carlo estimates, scattering functions and convolutions.

pub mod closed_form;
pub mod convolution;
pub mod empirical;
pub mod repr;
pub mod scattering;

pub use closed_form::{mu_closed_form, mu_measure, rho_closed_form, ClosedFormRho, MuParts, RhoPart, RhoParts};
pub use convolution::{add_measures, convolve_measures, weighted_l2};
pub use empirical::{kernel_set_increment, mu_empirical, rho_empirical, rho_from_pairs, y_set_increment, RhoEstimate};
pub use repr::{Atom, Cell, CellUnion, MeasureRepr};
pub use scattering::{scattering_eval, scattering_eval_stationary, RhoProvider, ScatteringEval};
