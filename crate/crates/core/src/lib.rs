//! Stochastic macrospin simulation of voltage-controlled, low-barrier
//! ME-MTJ devices and of the counter-based analog-to-digital converter built
//! on their telegraph switching.
//!
//! - [`magnet`]: device parameters and deterministic effective fields
//! - [`llg`]: stochastic LLG integration (Heun, Brown thermal field)
//! - [`device`]: MTJ resistance and the divider/threshold readout
//! - [`adc`]: clocked counting, transfer-curve sweeps, NRMSD and LUT codes
//! - [`telegraph`]: dwell statistics, Arrhenius fits, pulsed switching
//! - [`config`]: the flat `key = value` parameter file

pub mod adc;
pub mod config;
pub mod consts;
pub mod device;
pub mod error;
pub mod llg;
pub mod magnet;
pub mod stats;
pub mod telegraph;
pub mod vector;

pub use error::{Error, Result};
