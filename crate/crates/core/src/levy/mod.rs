//! Finite-activity additive processes: triplets, characteristic functions, path sampling and the
//! Lévy–Itô split of a sampled path.

pub mod class_law;
pub mod path;
pub mod size_dist;
pub mod triplet;

pub use class_law::ClassLaw;
pub use path::{count_measure, sample_path, split_levy_ito, JumpClass, JumpRecord, LevyItoParts, PathSample, SizeSet};
pub use size_dist::{SizeDist, SizeRegion};
pub use triplet::{levy_cf, LevyTriplet, Profile};
