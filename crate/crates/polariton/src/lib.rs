//! Exciton-polariton dispersion, transfer-matrix optics, and parameter
//! extraction for planar microcavities with strongly absorbing organic films.
//!
//! The crate is organized around four layers:
//!
//! * [`hopfield`]: two-oscillator coupling models, from the quadratic
//!   approximation to the full bosonic Hamiltonian with antiresonant terms,
//!   including Bogoliubov amplitudes and ground-state populations.
//! * [`cavity`] and [`observables`]: the angle-dependent photon mode and
//!   the derived quantities of the lower branch (effective mass, effective
//!   charge, charge-to-mass ratio, required chromophore density).
//! * [`tmm`]: characteristic-matrix optics for layered stacks with
//!   constant, tabulated, or Lorentz-oscillator dielectrics, plus peak
//!   extraction from simulated spectra.
//! * [`fitting`]: weighted least-squares recovery of coupling and cavity
//!   parameters from angle-resolved peak positions.
//!
//! All energies are in eV, angles in degrees, lengths in the unit named by
//! each signature. Computations are deterministic: anything stochastic
//! takes an explicit seed.

pub mod cavity;
pub mod constants;
pub mod error;
pub mod fitting;
pub mod hopfield;
pub mod observables;
pub mod tmm;

pub use cavity::{branch_dispersion, AngleGrid, CavityModel, DispersionPoint};
pub use error::{Error, Result};
pub use fitting::{
    default_init, fit_dispersion, residuals, sum_squared_residuals, synthesize_dataset, FitConfig,
    FitParams, FitResult, FreeMask, ParamBounds, PeakDataset, PeakRow,
};
pub use hopfield::{
    branch_energies, build_hopfield_matrix, diagonalize_hopfield, full_hopfield_energies,
    hopfield_at, solve_cavity_energy_for_lp, solve_quadratic_dispersion, BogoliubovAmplitudes,
    Branch, BranchEnergies, BranchFractions, CouplingParams, FractionNorm, GroundStateContent,
    HopfieldCoefficients, ModelKind,
};
pub use observables::{
    charge_to_mass_ratio, chromophore_density, effective_charge, effective_mass_lp,
    ground_state_charge, photon_mass_for_ratio, ChargedPolaritonReport, MaterialParams,
};
pub use tmm::{
    dielectric::{
        absorption_coefficient, builtin_gold, calibrate_oscillator_strength, peak_absorption,
        DielectricModel, LorentzModel, LorentzOscillator, TabulatedNk,
    },
    energy_grid,
    peaks::{extract_peaks, Peak},
    simulate_angle_spectra, transfer_matrix, Layer, OpticalResponse, Polarization, Spectrum, Stack,
};
