//! Transfer-matrix optics for stratified media: transmission, reflection,
//! and absorption of a layer stack versus energy, angle, and polarization.
//!
//! Characteristic-matrix formulation in the physics sign convention
//! (n + ik, time dependence exp(-i w t)): each layer contributes
//! [[cos d, -i sin d / y], [-i y sin d, cos d]] with phase thickness
//! d = kz t and tilted admittance y (kz/k0 for TE, eps k0/kz for TM).
//! kz takes the principal branch with Im kz >= 0, which keeps absorbing
//! and evanescent layers decaying.

pub mod dielectric;
pub mod peaks;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cavity::AngleGrid;
use crate::constants::HBARC_EV_UM;
use crate::error::{Error, Result};
pub use dielectric::{
    absorption_coefficient, builtin_gold, calibrate_oscillator_strength, peak_absorption,
    DielectricModel, LorentzModel, LorentzOscillator, TabulatedNk,
};
pub use peaks::{extract_peaks, Peak};

/// Probe polarization; TE is s (field normal to the incidence plane).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

/// Finite layer: thickness in nm and a dielectric model.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub thickness_nm: f64,
    pub dielectric: DielectricModel,
}

/// Semi-infinite ambient, finite layers in propagation order, semi-infinite
/// substrate. The ambient must be transparent at every probed energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    ambient: DielectricModel,
    layers: Vec<Layer>,
    substrate: DielectricModel,
}

impl Stack {
    pub fn new(
        ambient: DielectricModel,
        layers: Vec<Layer>,
        substrate: DielectricModel,
    ) -> Result<Self> {
        for (i, layer) in layers.iter().enumerate() {
            if !layer.thickness_nm.is_finite() || layer.thickness_nm <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "layer {i} thickness must be positive and finite, got {} nm",
                    layer.thickness_nm
                )));
            }
        }
        Ok(Self {
            ambient,
            layers,
            substrate,
        })
    }

    pub fn ambient(&self) -> &DielectricModel {
        &self.ambient
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn substrate(&self) -> &DielectricModel {
        &self.substrate
    }

    /// Same stack traversed from the substrate side.
    pub fn reversed(&self) -> Self {
        Self {
            ambient: self.substrate.clone(),
            layers: self.layers.iter().rev().cloned().collect(),
            substrate: self.ambient.clone(),
        }
    }
}

/// Power transmission, reflection, and absorption at one sample point.
/// A = 1 - T - R by construction; lossless stacks give |A| at rounding level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalResponse {
    pub transmission: f64,
    pub reflection: f64,
    pub absorption: f64,
}

/// Transmission/reflection/absorption arrays over one energy grid at a
/// fixed angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub theta_deg: f64,
    pub energy_ev: Vec<f64>,
    pub transmission: Vec<f64>,
    pub reflection: Vec<f64>,
    pub absorption: Vec<f64>,
}

/// Uniform energy grid helper; index-based so the spacing is exactly
/// reproducible.
pub fn energy_grid(min_ev: f64, max_ev: f64, step_ev: f64) -> Result<Vec<f64>> {
    if !(min_ev.is_finite() && max_ev.is_finite() && step_ev.is_finite())
        || min_ev <= 0.0
        || step_ev <= 0.0
        || max_ev < min_ev
    {
        return Err(Error::InvalidInput(format!(
            "invalid energy grid [{min_ev}, {max_ev}] step {step_ev}"
        )));
    }
    let n = ((max_ev - min_ev) / step_ev + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min_ev + i as f64 * step_ev).collect())
}

struct Tilt {
    s2: Complex64, // eps_ambient sin^2(theta)
    k0: f64,       // vacuum wavenumber per um
}

fn admittance(eps: Complex64, tilt: &Tilt, pol: Polarization) -> (Complex64, Complex64) {
    let mut kz = (eps - tilt.s2).sqrt() * tilt.k0;
    // principal branch keeps decay in absorbing/evanescent media
    if kz.im < 0.0 {
        kz = -kz;
    }
    let y = match pol {
        Polarization::Te => kz / tilt.k0,
        Polarization::Tm => eps * tilt.k0 / kz,
    };
    (y, kz)
}

/// Transmission, reflection, and absorption of a stack at one energy,
/// external angle, and polarization.
pub fn transfer_matrix(
    stack: &Stack,
    energy_ev: f64,
    theta_deg: f64,
    pol: Polarization,
) -> Result<OpticalResponse> {
    if !theta_deg.is_finite() || !(0.0..90.0).contains(&theta_deg) {
        return Err(Error::InvalidInput(format!(
            "angle must lie in [0, 90) degrees, got {theta_deg}"
        )));
    }
    let eps_ambient = stack.ambient.epsilon(energy_ev)?;
    if eps_ambient.im.abs() > 1e-12 * (1.0 + eps_ambient.re.abs()) || eps_ambient.re <= 0.0 {
        return Err(Error::InvalidInput(
            "ambient medium must be transparent (real positive epsilon)".into(),
        ));
    }
    let sin_theta = theta_deg.to_radians().sin();
    let tilt = Tilt {
        s2: eps_ambient * sin_theta * sin_theta,
        k0: energy_ev / HBARC_EV_UM,
    };

    let (y0, _) = admittance(eps_ambient, &tilt, pol);
    let eps_sub = stack.substrate.epsilon(energy_ev)?;
    let (ys, _) = admittance(eps_sub, &tilt, pol);

    // characteristic matrix product, ambient side first
    let mut m = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for layer in &stack.layers {
        let eps = layer.dielectric.epsilon(energy_ev)?;
        let (y, kz) = admittance(eps, &tilt, pol);
        if y.norm() < 1e-300 {
            return Err(Error::SingularTransfer {
                energy_ev,
                theta_deg,
            });
        }
        let delta = kz * (layer.thickness_nm * 1e-3);
        let (c, s) = (delta.cos(), delta.sin());
        let i = Complex64::new(0.0, 1.0);
        let layer_m = [[c, -i * s / y], [-i * y * s, c]];
        m = [
            [
                m[0][0] * layer_m[0][0] + m[0][1] * layer_m[1][0],
                m[0][0] * layer_m[0][1] + m[0][1] * layer_m[1][1],
            ],
            [
                m[1][0] * layer_m[0][0] + m[1][1] * layer_m[1][0],
                m[1][0] * layer_m[0][1] + m[1][1] * layer_m[1][1],
            ],
        ];
    }

    let b = m[0][0] + m[0][1] * ys;
    let c = m[1][0] + m[1][1] * ys;
    let den = y0 * b + c;
    if den.norm() < 1e-12 {
        return Err(Error::SingularTransfer {
            energy_ev,
            theta_deg,
        });
    }
    let r = (y0 * b - c) / den;
    let reflection = r.norm_sqr();
    // transmitted power ratio via the real part of the exit admittance
    let transmission = 4.0 * y0.re * ys.re / den.norm_sqr();
    Ok(OpticalResponse {
        transmission,
        reflection,
        absorption: 1.0 - transmission - reflection,
    })
}

/// Per-angle spectra over the energy grid; angles outer, energies inner.
/// Parallel over angles; output order and values are independent of the
/// thread schedule.
pub fn simulate_angle_spectra(
    stack: &Stack,
    grid: &AngleGrid,
    energies_ev: &[f64],
    pol: Polarization,
) -> Result<Vec<Spectrum>> {
    if energies_ev.is_empty() {
        return Err(Error::InvalidInput("energy grid is empty".into()));
    }
    grid.angles_deg()
        .par_iter()
        .map(|&theta_deg| {
            let mut spectrum = Spectrum {
                theta_deg,
                energy_ev: energies_ev.to_vec(),
                transmission: Vec::with_capacity(energies_ev.len()),
                reflection: Vec::with_capacity(energies_ev.len()),
                absorption: Vec::with_capacity(energies_ev.len()),
            };
            for &e in energies_ev {
                let r = transfer_matrix(stack, e, theta_deg, pol)?;
                spectrum.transmission.push(r.transmission);
                spectrum.reflection.push(r.reflection);
                spectrum.absorption.push(r.absorption);
            }
            Ok(spectrum)
        })
        .collect()
}
