//! Generative channel model: the impulse-response field `Y(t, u)` with prescribed cross-time
//! correlation, and its Lévy–Itô components at each fixed time.
//!
//! Only the per-time laws and the second-order cross-time structure are pinned down by the model
//! assumptions. The joint law across time used here is one admissible choice: the Gaussian part is
//! a separable field (independent stationary processes per delay cell), scatterers sit at fixed
//! delays, and their sizes move in time through a Gaussian copula.

pub mod cf;
pub mod realization;
pub mod spec;

pub use cf::theoretical_component_cf;
pub use realization::{
    component_fields, kernel_increment, sample_channel, ChannelJump, ChannelSampler, Component, KernelRealization,
};
pub use spec::{ChannelSpec, ChannelWindow, CorrFn, TimeModulation};
