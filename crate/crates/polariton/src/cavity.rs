//! Fabry-Perot cavity mode versus probe angle, in-plane wavevector
//! bookkeeping, and the cavity-photon effective mass.
//!
//! Angles are external incidence angles in degrees; refraction into the
//! cavity is absorbed into the effective index `n_eff`, the standard
//! parametrization for fitting angle-resolved data.

use crate::constants::{ELECTRON_MASS_EV, HBARC_EV_UM};
use crate::error::{Error, Result};
use crate::hopfield::{branch_energies, CouplingParams, ModelKind};

/// Cavity mode E(theta) = e0 / sqrt(1 - sin^2(theta)/n_eff^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityModel {
    e0_ev: f64,
    n_eff: f64,
}

impl CavityModel {
    /// `n_eff >= 1` keeps the mode propagating at every real angle.
    pub fn new(e0_ev: f64, n_eff: f64) -> Result<Self> {
        if !e0_ev.is_finite() || e0_ev <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "normal-incidence cavity energy must be positive and finite, got {e0_ev}"
            )));
        }
        if !n_eff.is_finite() || n_eff < 1.0 {
            return Err(Error::InvalidInput(format!(
                "effective index must be >= 1 and finite, got {n_eff}"
            )));
        }
        Ok(Self { e0_ev, n_eff })
    }

    pub fn e0_ev(&self) -> f64 {
        self.e0_ev
    }

    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }

    /// Mode energy at an external angle in [0, 90) degrees.
    pub fn cavity_energy(&self, theta_deg: f64) -> Result<f64> {
        if !theta_deg.is_finite() || !(0.0..90.0).contains(&theta_deg) {
            return Err(Error::InvalidInput(format!(
                "angle must lie in [0, 90) degrees, got {theta_deg}"
            )));
        }
        let s = theta_deg.to_radians().sin() / self.n_eff;
        let arg = 1.0 - s * s;
        if arg <= 1e-12 {
            return Err(Error::Evanescent {
                theta_deg,
                n_eff: self.n_eff,
            });
        }
        Ok(self.e0_ev / arg.sqrt())
    }

    /// Parabolic-band photon mass in m0 units: e0 n_eff^2 / (m0 c^2), from
    /// the small-angle expansion E ~ e0 + (hbar k_par)^2 n_eff^2 ... / (2 m).
    pub fn photon_effective_mass(&self) -> f64 {
        self.e0_ev * self.n_eff * self.n_eff / ELECTRON_MASS_EV
    }
}

/// Strictly increasing probe angles in degrees, all within [0, 89].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles_deg: Vec<f64>,
}

impl AngleGrid {
    pub fn new(angles_deg: Vec<f64>) -> Result<Self> {
        if angles_deg.is_empty() {
            return Err(Error::InvalidInput("angle grid is empty".into()));
        }
        for pair in angles_deg.windows(2) {
            // partial_cmp keeps the NaN rejection the plain comparison had
            if pair[1].partial_cmp(&pair[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidInput(format!(
                    "angles must increase strictly, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        let first = angles_deg[0];
        let last = *angles_deg.last().unwrap();
        if !first.is_finite() || first < 0.0 || last > 89.0 {
            return Err(Error::InvalidInput(format!(
                "angles must lie within [0, 89] degrees, got range [{first}, {last}]"
            )));
        }
        Ok(Self { angles_deg })
    }

    /// Inclusive range; the stop angle is included when (stop - start) is an
    /// exact multiple of step.
    pub fn from_range(start_deg: f64, stop_deg: f64, step_deg: f64) -> Result<Self> {
        if !step_deg.is_finite() || step_deg <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "angle step must be positive, got {step_deg}"
            )));
        }
        if start_deg.is_nan() || stop_deg.is_nan() || start_deg > stop_deg {
            return Err(Error::InvalidInput(format!(
                "angle range must have start <= stop, got [{start_deg}, {stop_deg}]"
            )));
        }
        let n = ((stop_deg - start_deg) / step_deg + 1e-9).floor() as usize;
        Self::new((0..=n).map(|i| start_deg + i as f64 * step_deg).collect())
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }

    /// In-plane wavevector k_par = (E / hbar c) sin(theta) per um, at one
    /// photon energy for every angle. Reporting helper; the physics runs on
    /// angles.
    pub fn k_parallel_per_um(&self, energy_ev: f64) -> Vec<f64> {
        self.angles_deg
            .iter()
            .map(|t| energy_ev / HBARC_EV_UM * t.to_radians().sin())
            .collect()
    }
}

/// One angle sample of the coupled dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub theta_deg: f64,
    pub e_cav_ev: f64,
    pub lp_ev: f64,
    pub up_ev: f64,
}

/// Branch energies across an angle grid, ordered by angle.
pub fn branch_dispersion(
    p: &CouplingParams,
    m: &CavityModel,
    grid: &AngleGrid,
    kind: ModelKind,
) -> Result<Vec<DispersionPoint>> {
    grid.angles_deg()
        .iter()
        .map(|&theta_deg| {
            let e_cav_ev = m.cavity_energy(theta_deg)?;
            let b = branch_energies(e_cav_ev, p, kind)?;
            Ok(DispersionPoint {
                theta_deg,
                e_cav_ev,
                lp_ev: b.lp_ev(),
                up_ev: b.up_ev(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cavity_model_validation() {
        assert!(CavityModel::new(0.0, 1.5).is_err());
        assert!(CavityModel::new(1.0, 0.9).is_err());
        assert!(CavityModel::new(1.0, f64::INFINITY).is_err());
        assert!(CavityModel::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn cavity_energy_examples() {
        let m = CavityModel::new(1.0, 1.5).unwrap();
        assert_eq!(m.cavity_energy(0.0).unwrap(), 1.0);
        // oracle: 1/sqrt(1 - 0.25/2.25) by hand
        assert_relative_eq!(
            m.cavity_energy(30.0).unwrap(),
            1.060660171779821,
            max_relative = 1e-14
        );
        assert!(m.cavity_energy(-1.0).is_err());
        assert!(m.cavity_energy(90.0).is_err());
    }

    #[test]
    fn cavity_energy_monotone_in_angle() {
        let m = CavityModel::new(1.1, 1.7).unwrap();
        let mut prev = 0.0;
        for i in 0..=89 {
            let e = m.cavity_energy(i as f64).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn photon_mass_examples() {
        let m = CavityModel::new(1.0, 1.5).unwrap();
        // oracle: 2.25 / 511000 by hand
        assert_relative_eq!(
            m.photon_effective_mass(),
            4.403131115459883e-6,
            max_relative = 1e-14
        );
        // mass scales linearly with e0
        let m2 = CavityModel::new(2.0, 1.5).unwrap();
        assert_relative_eq!(
            m2.photon_effective_mass(),
            2.0 * m.photon_effective_mass(),
            max_relative = 1e-14
        );
        // index implied by a 1e-4 m0 photon mass at e0 = 1 eV
        let m3 = CavityModel::new(1.0, 7.15).unwrap();
        assert_relative_eq!(m3.photon_effective_mass(), 1.0e-4, max_relative = 5e-3);
    }

    #[test]
    fn photon_mass_matches_parabolic_curvature() {
        // E(k) ~ e0 + k^2 c^2 hbar^2 / (2 m e0-ish): fit curvature near zero angle
        let m = CavityModel::new(1.3, 1.8).unwrap();
        let e0 = m.e0_ev();
        let theta = 0.5_f64;
        let e = m.cavity_energy(theta).unwrap();
        let k_par = e / crate::constants::HBARC_EV_UM * theta.to_radians().sin(); // per um
                                                                                  // parabolic mass in m0 via E - e0 = (hbarc k)^2 / (2 m c^2)
        let hbarc_k = crate::constants::HBARC_EV_UM * k_par; // eV
        let mass = hbarc_k * hbarc_k / (2.0 * (e - e0)) / ELECTRON_MASS_EV;
        assert_relative_eq!(mass, m.photon_effective_mass(), max_relative = 1e-3);
    }

    #[test]
    fn angle_grid_validation_and_range() {
        assert!(AngleGrid::new(vec![]).is_err());
        assert!(AngleGrid::new(vec![0.0, 0.0]).is_err());
        assert!(AngleGrid::new(vec![5.0, 1.0]).is_err());
        assert!(AngleGrid::new(vec![-1.0, 5.0]).is_err());
        assert!(AngleGrid::new(vec![0.0, 89.5]).is_err());

        let g = AngleGrid::from_range(0.0, 60.0, 5.0).unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!(g.angles_deg()[0], 0.0);
        assert_eq!(*g.angles_deg().last().unwrap(), 60.0);

        let g2 = AngleGrid::from_range(0.0, 7.0, 3.0).unwrap();
        assert_eq!(g2.angles_deg(), &[0.0, 3.0, 6.0]);
    }

    #[test]
    fn k_parallel_values() {
        let g = AngleGrid::new(vec![0.0, 30.0, 90.0_f64.to_radians().to_degrees() - 1.0]).unwrap();
        let k = g.k_parallel_per_um(1.22);
        assert_eq!(k[0], 0.0);
        assert_relative_eq!(k[1], 1.22 / HBARC_EV_UM * 0.5, max_relative = 1e-12);
        assert!(k[2] > k[1]);
    }

    #[test]
    fn dispersion_table_shape_and_limits() {
        let p = CouplingParams::new(1.22, 0.5).unwrap();
        let m = CavityModel::new(1.0, 1.5).unwrap();
        let g = AngleGrid::from_range(0.0, 60.0, 5.0).unwrap();
        let table = branch_dispersion(&p, &m, &g, ModelKind::FullHopfield).unwrap();
        assert_eq!(table.len(), 13);
        for w in table.windows(2) {
            assert!(w[1].e_cav_ev > w[0].e_cav_ev);
            assert!(w[1].theta_deg > w[0].theta_deg);
        }
        for row in &table {
            assert!(row.up_ev > row.lp_ev);
        }
    }

    #[test]
    fn dispersion_uncoupled_tracks_bare_energies() {
        let p = CouplingParams::new(1.22, 0.0).unwrap();
        let m = CavityModel::new(1.0, 1.5).unwrap();
        let g = AngleGrid::from_range(0.0, 60.0, 10.0).unwrap();
        for row in branch_dispersion(&p, &m, &g, ModelKind::Quadratic).unwrap() {
            assert_relative_eq!(row.lp_ev, row.e_cav_ev.min(1.22), max_relative = 1e-12);
            assert_relative_eq!(row.up_ev, row.e_cav_ev.max(1.22), max_relative = 1e-12);
        }
    }

    #[test]
    fn quadratic_dispersion_avoids_the_gap_band() {
        let p = CouplingParams::new(1.22, 0.5).unwrap();
        let gap_lo = 1.112834219459484;
        let gap_hi = 1.22;
        let m = CavityModel::new(0.9, 1.3).unwrap();
        let g = AngleGrid::from_range(0.0, 89.0, 1.0).unwrap();
        for row in branch_dispersion(&p, &m, &g, ModelKind::Quadratic).unwrap() {
            for e in [row.lp_ev, row.up_ev] {
                assert!(
                    e <= gap_lo + 1e-12 || e >= gap_hi - 1e-12,
                    "branch energy {e} inside the forbidden band"
                );
            }
        }
    }
}
