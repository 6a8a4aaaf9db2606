//! Physical constants shared across the crate. All energies are in eV.

/// hbar * c in eV cm.
pub const HBARC_EV_CM: f64 = 1.9732e-5;

/// hbar * c in eV um.
pub const HBARC_EV_UM: f64 = HBARC_EV_CM * 1.0e4;

/// Electron rest energy m0 c^2 in eV; converts masses to m0 units.
pub const ELECTRON_MASS_EV: f64 = 0.5110e6;
