//! Charged-polariton figures of merit: effective charge, effective mass,
//! charge-to-mass ratio, ground-state charge, and film chromophore density.
//!
//! Charges are in units of the elementary charge e0 and masses in units of
//! the bare electron mass m0; these are the only unit conversions in the
//! crate outside the optics.

use crate::error::{Error, Result};
use crate::hopfield::{BranchFractions, GroundStateContent};

/// Exciton mass, optional photon-mass override, film absorption peak, and
/// molecular absorption cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    m_ex_m0: f64,
    m_ph_override_m0: Option<f64>,
    alpha_peak_per_cm: f64,
    sigma_cm2: f64,
}

impl MaterialParams {
    pub fn new(
        m_ex_m0: f64,
        m_ph_override_m0: Option<f64>,
        alpha_peak_per_cm: f64,
        sigma_cm2: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("m_ex_m0", m_ex_m0),
            ("m_ph_override_m0", m_ph_override_m0.unwrap_or(1.0)),
            ("alpha_peak_per_cm", alpha_peak_per_cm),
            ("sigma_cm2", sigma_cm2),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(Self {
            m_ex_m0,
            m_ph_override_m0,
            alpha_peak_per_cm,
            sigma_cm2,
        })
    }

    pub fn m_ex_m0(&self) -> f64 {
        self.m_ex_m0
    }

    pub fn m_ph_override_m0(&self) -> Option<f64> {
        self.m_ph_override_m0
    }

    pub fn alpha_peak_per_cm(&self) -> f64 {
        self.alpha_peak_per_cm
    }

    pub fn sigma_cm2(&self) -> f64 {
        self.sigma_cm2
    }
}

/// Effective polariton charge in e0: the exciton fraction, since the
/// constituent charged exciton carries one elementary charge.
/// Expects a fraction in [0, 1].
pub fn effective_charge(exciton_fraction: f64) -> f64 {
    exciton_fraction
}

/// Weighted harmonic mean of the constituent masses, in m0:
/// 1 / (photon_fraction/m_ph + exciton_fraction/m_ex).
pub fn effective_mass_lp(f: &BranchFractions, m_ex_m0: f64, m_ph_m0: f64) -> f64 {
    1.0 / (f.photon / m_ph_m0 + f.exciton / m_ex_m0)
}

/// Charge-to-mass ratio in e0/m0. Expects m_eff > 0.
pub fn charge_to_mass_ratio(e_eff_e0: f64, m_eff_m0: f64) -> f64 {
    e_eff_e0 / m_eff_m0
}

/// Fractional ground-state charge in e0: the virtual exciton population of
/// the squeezed vacuum.
pub fn ground_state_charge(n_exciton: f64) -> f64 {
    n_exciton
}

/// Chromophore number density alpha/sigma in cm^-3.
pub fn chromophore_density(alpha_peak_per_cm: f64, sigma_cm2: f64) -> Result<f64> {
    if !alpha_peak_per_cm.is_finite() || alpha_peak_per_cm <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "peak absorption coefficient must be positive, got {alpha_peak_per_cm}"
        )));
    }
    if !sigma_cm2.is_finite() || sigma_cm2 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "absorption cross-section must be positive, got {sigma_cm2}"
        )));
    }
    Ok(alpha_peak_per_cm / sigma_cm2)
}

/// Photon mass (in m0) that makes the charge-to-mass ratio hit
/// `target_ratio` for the given branch composition. Inverts the harmonic
/// mean; fails when the target is unreachable (the exciton term alone
/// already exceeds the required inverse mass).
pub fn photon_mass_for_ratio(
    f: &BranchFractions,
    m_ex_m0: f64,
    target_ratio_e0_per_m0: f64,
) -> Result<f64> {
    if target_ratio_e0_per_m0 <= 0.0 || f.exciton <= 0.0 || f.photon <= 0.0 {
        return Err(Error::InvalidInput(
            "ratio inversion needs positive target and mixed composition".into(),
        ));
    }
    // ratio = exciton/m_eff and 1/m_eff = photon/m_ph + exciton/m_ex
    let inv_m_eff = target_ratio_e0_per_m0 / f.exciton;
    let photon_term = inv_m_eff - f.exciton / m_ex_m0;
    if photon_term <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "target ratio {target_ratio_e0_per_m0} unreachable: exciton term dominates"
        )));
    }
    Ok(f.photon / photon_term)
}

/// Headline charged-polariton numbers for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargedPolaritonReport {
    pub e_eff_lp_e0: f64,
    pub m_eff_lp_m0: f64,
    pub charge_to_mass_e0_per_m0: f64,
    pub gs_charge_e0: f64,
    pub density_per_cm3: f64,
}

impl ChargedPolaritonReport {
    /// Assembles the report from lower-branch fractions, ground-state
    /// content, material parameters, and the photon mass in m0.
    pub fn compute(
        lp: &BranchFractions,
        gs: &GroundStateContent,
        material: &MaterialParams,
        m_ph_m0: f64,
    ) -> Result<Self> {
        if !m_ph_m0.is_finite() || m_ph_m0 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "photon mass must be positive, got {m_ph_m0}"
            )));
        }
        let e_eff = effective_charge(lp.exciton);
        let m_eff = effective_mass_lp(lp, material.m_ex_m0(), m_ph_m0);
        let report = Self {
            e_eff_lp_e0: e_eff,
            m_eff_lp_m0: m_eff,
            charge_to_mass_e0_per_m0: charge_to_mass_ratio(e_eff, m_eff),
            gs_charge_e0: ground_state_charge(gs.n_exciton),
            density_per_cm3: chromophore_density(
                material.alpha_peak_per_cm(),
                material.sigma_cm2(),
            )?,
        };
        if !(0.0..=1.0).contains(&report.e_eff_lp_e0)
            || !(0.0..=1.0).contains(&report.gs_charge_e0)
            || report.m_eff_lp_m0 <= 0.0
        {
            return Err(Error::InvalidInput(
                "charged-polariton report violates its bounds".into(),
            ));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fractions(exciton: f64) -> BranchFractions {
        BranchFractions {
            photon: 1.0 - exciton,
            exciton,
        }
    }

    #[test]
    fn material_params_validation() {
        assert!(MaterialParams::new(25.0, None, 1.05e5, 6.14e-17).is_ok());
        assert!(MaterialParams::new(25.0, Some(1e-4), 1.05e5, 6.14e-17).is_ok());
        assert!(MaterialParams::new(0.0, None, 1.05e5, 6.14e-17).is_err());
        assert!(MaterialParams::new(25.0, Some(0.0), 1.05e5, 6.14e-17).is_err());
        assert!(MaterialParams::new(25.0, None, -1.0, 6.14e-17).is_err());
        assert!(MaterialParams::new(25.0, None, 1.05e5, f64::NAN).is_err());
    }

    #[test]
    fn effective_charge_passthrough() {
        assert_eq!(effective_charge(0.55), 0.55);
        assert_eq!(effective_charge(0.0), 0.0);
        assert_eq!(effective_charge(1.0), 1.0);
    }

    #[test]
    fn effective_mass_frozen_example() {
        // oracle: 1 / (0.45/1e-4 + 0.55/25) = 1/4500.022 by hand
        let m = effective_mass_lp(&fractions(0.55), 25.0, 1.0e-4);
        assert_relative_eq!(m, 2.222211358077805e-4, max_relative = 1e-12);
    }

    #[test]
    fn effective_mass_pure_limits() {
        assert_relative_eq!(
            effective_mass_lp(&fractions(0.0), 25.0, 1.0e-4),
            1.0e-4,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            effective_mass_lp(&fractions(1.0), 25.0, 1.0e-4),
            25.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn effective_mass_between_constituent_masses() {
        for i in 1..20 {
            let f = fractions(i as f64 * 0.05);
            let m = effective_mass_lp(&f, 25.0, 1.0e-4);
            assert!((1.0e-4..=25.0).contains(&m));
        }
    }

    #[test]
    fn charge_to_mass_examples() {
        // oracle: 0.55 * 4500.022 by hand
        let m = effective_mass_lp(&fractions(0.55), 25.0, 1.0e-4);
        assert_relative_eq!(
            charge_to_mass_ratio(0.55, m),
            2475.0121,
            max_relative = 1e-10
        );
        assert_eq!(charge_to_mass_ratio(0.0, 1.0), 0.0);
        // with the photon term dominating, doubling m_ph roughly halves the ratio
        let m2 = effective_mass_lp(&fractions(0.55), 25.0, 2.0e-4);
        let r1 = charge_to_mass_ratio(0.55, m);
        let r2 = charge_to_mass_ratio(0.55, m2);
        assert_relative_eq!(r1 / r2, 2.0, max_relative = 1e-4);
    }

    #[test]
    fn ground_state_charge_passthrough() {
        assert_eq!(ground_state_charge(0.010), 0.010);
        assert_eq!(ground_state_charge(0.0), 0.0);
    }

    #[test]
    fn density_examples() {
        // oracle: hand quotient
        assert_relative_eq!(
            chromophore_density(1.05e5, 6.14e-17).unwrap(),
            1.710097719869707e21,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            chromophore_density(1e5, 1e-16).unwrap(),
            1e21,
            max_relative = 1e-14
        );
        let d1 = chromophore_density(1.05e5, 6.14e-17).unwrap();
        let d2 = chromophore_density(2.10e5, 6.14e-17).unwrap();
        assert_relative_eq!(d2, 2.0 * d1, max_relative = 1e-14);
        assert!(chromophore_density(0.0, 1e-16).is_err());
        assert!(chromophore_density(1e5, 0.0).is_err());
    }

    #[test]
    fn photon_mass_inversion_round_trip() {
        let f = fractions(0.55);
        let target = 2400.0;
        let m_ph = photon_mass_for_ratio(&f, 25.0, target).unwrap();
        let m_eff = effective_mass_lp(&f, 25.0, m_ph);
        assert_relative_eq!(
            charge_to_mass_ratio(effective_charge(f.exciton), m_eff),
            target,
            max_relative = 1e-10
        );
        // unreachable target: exciton term alone exceeds the required inverse mass
        assert!(photon_mass_for_ratio(&f, 25.0, 1e-9).is_err());
    }

    #[test]
    fn report_assembly() {
        let material = MaterialParams::new(25.0, Some(1.0e-4), 1.05e5, 6.14e-17).unwrap();
        let gs = GroundStateContent {
            n_photon: 0.0099,
            n_exciton: 0.0099,
        };
        let r = ChargedPolaritonReport::compute(&fractions(0.55), &gs, &material, 1.0e-4).unwrap();
        assert_eq!(r.e_eff_lp_e0, 0.55);
        assert_relative_eq!(r.charge_to_mass_e0_per_m0, 2475.0121, max_relative = 1e-10);
        assert_eq!(r.gs_charge_e0, 0.0099);
        assert_relative_eq!(
            r.density_per_cm3,
            1.710097719869707e21,
            max_relative = 1e-12
        );
        assert!(ChargedPolaritonReport::compute(&fractions(0.55), &gs, &material, 0.0).is_err());
    }
}
