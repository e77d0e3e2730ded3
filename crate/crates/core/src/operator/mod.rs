//! The channel applied to step signals in kernel, impulse-response, Kohn–Nirenberg and spreading form.

pub mod apply;
pub mod signal;
pub mod symbol;

pub use apply::{absolute_scale, apply_component, apply_impulse, apply_kernel};
pub use signal::StepSignal;
pub use symbol::{
    kohn_nirenberg_apply, kohn_nirenberg_symbol, relative_error, spreading_apply, spreading_symbol, Symbol, SymbolGrid,
};
