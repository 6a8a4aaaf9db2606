//! Dielectric models for stack layers: constant n+ik, tabulated n/k data
//! with linear interpolation, and a Lorentz-oscillator set for the film.
//!
//! Convention: complex refractive index n + ik with k >= 0 for absorbing
//! media (time dependence exp(-i w t)); epsilon = (n + ik)^2.

use num_complex::Complex64;

use crate::constants::HBARC_EV_CM;
use crate::error::{Error, Result};

/// Gold mirror n/k table shipped with the crate. Generated from a Drude
/// model eps = 9.84 - 9.01^2/(E^2 + 0.072 i E) sampled 0.50-2.60 eV, a fit
/// adequate for near-infrared mirrors; swap in measured data via
/// [`TabulatedNk::from_csv_str`] for quantitative mirror work.
const GOLD_NK_CSV: &str = include_str!("../../data/au_drude_nk.csv");

/// One Lorentz oscillator: strength f in eV^2, resonance and damping in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzOscillator {
    pub strength_ev2: f64,
    pub e_res_ev: f64,
    pub gamma_ev: f64,
}

/// eps(E) = eps_inf + sum_j f_j / (e_res_j^2 - E^2 - i gamma_j E).
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzModel {
    eps_inf: f64,
    oscillators: Vec<LorentzOscillator>,
}

impl LorentzModel {
    pub fn new(eps_inf: f64, oscillators: Vec<LorentzOscillator>) -> Result<Self> {
        if !eps_inf.is_finite() || eps_inf < 1.0 {
            return Err(Error::InvalidInput(format!(
                "eps_inf must be >= 1 and finite, got {eps_inf}"
            )));
        }
        for osc in &oscillators {
            if !osc.strength_ev2.is_finite() || osc.strength_ev2 < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "oscillator strength must be non-negative, got {}",
                    osc.strength_ev2
                )));
            }
            if !osc.e_res_ev.is_finite() || osc.e_res_ev <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "oscillator resonance must be positive, got {}",
                    osc.e_res_ev
                )));
            }
            if !osc.gamma_ev.is_finite() || osc.gamma_ev <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "oscillator damping must be positive, got {}",
                    osc.gamma_ev
                )));
            }
        }
        Ok(Self {
            eps_inf,
            oscillators,
        })
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    pub fn oscillators(&self) -> &[LorentzOscillator] {
        &self.oscillators
    }

    /// Same resonances with every strength multiplied by `scale`; models a
    /// chromophore-density change by the same factor.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::InvalidInput(format!(
                "strength scale must be non-negative, got {scale}"
            )));
        }
        Self::new(
            self.eps_inf,
            self.oscillators
                .iter()
                .map(|o| LorentzOscillator {
                    strength_ev2: o.strength_ev2 * scale,
                    ..*o
                })
                .collect(),
        )
    }

    pub fn epsilon(&self, energy_ev: f64) -> Complex64 {
        let e2 = energy_ev * energy_ev;
        self.oscillators
            .iter()
            .fold(Complex64::new(self.eps_inf, 0.0), |acc, osc| {
                let den =
                    Complex64::new(osc.e_res_ev * osc.e_res_ev - e2, -osc.gamma_ev * energy_ev);
                acc + osc.strength_ev2 / den
            })
    }
}

/// Tabulated (energy, n, k) rows, strictly increasing in energy; linear
/// interpolation, no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedNk {
    rows: Vec<(f64, f64, f64)>,
}

impl TabulatedNk {
    pub fn new(rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput(
                "tabulated dielectric needs at least two rows".into(),
            ));
        }
        for (i, &(e, n, k)) in rows.iter().enumerate() {
            if !(e.is_finite() && n.is_finite() && k.is_finite()) || e <= 0.0 || n < 0.0 || k < 0.0
            {
                return Err(Error::InvalidInput(format!(
                    "tabulated row {i} has invalid values ({e}, {n}, {k})"
                )));
            }
            if i > 0 && rows[i - 1].0 >= e {
                return Err(Error::InvalidInput(format!(
                    "tabulated energies must increase strictly at row {i}"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Parses CSV with the exact header `energy_ev,n,k`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Csv {
            line: 1,
            message: "empty file".into(),
        })?;
        if header.trim_end_matches('\r') != "energy_ev,n,k" {
            return Err(Error::Csv {
                line: 1,
                message: format!("expected header 'energy_ev,n,k', got '{header}'"),
            });
        }
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Csv {
                    line: line_no,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str, name: &str| {
                s.trim().parse::<f64>().map_err(|_| Error::Csv {
                    line: line_no,
                    message: format!("cannot parse {name} from '{s}'"),
                })
            };
            rows.push((
                parse(fields[0], "energy_ev")?,
                parse(fields[1], "n")?,
                parse(fields[2], "k")?,
            ));
        }
        Self::new(rows)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn energy_range_ev(&self) -> (f64, f64) {
        (self.rows[0].0, self.rows[self.rows.len() - 1].0)
    }

    pub fn epsilon(&self, energy_ev: f64) -> Result<Complex64> {
        let (lo, hi) = self.energy_range_ev();
        if !(energy_ev >= lo && energy_ev <= hi) {
            return Err(Error::InvalidInput(format!(
                "energy {energy_ev} eV outside tabulated range [{lo}, {hi}] eV"
            )));
        }
        let i = match self
            .rows
            .binary_search_by(|row| row.0.total_cmp(&energy_ev))
        {
            Ok(i) => i.min(self.rows.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.rows.len() - 2),
        };
        let (e0, n0, k0) = self.rows[i];
        let (e1, n1, k1) = self.rows[i + 1];
        let t = (energy_ev - e0) / (e1 - e0);
        let n = n0 + t * (n1 - n0);
        let k = k0 + t * (k1 - k0);
        let nk = Complex64::new(n, k);
        Ok(nk * nk)
    }
}

/// Layer dielectric: constant index, tabulated data, or a Lorentz set.
#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    Constant { n: f64, k: f64 },
    Tabulated(TabulatedNk),
    Lorentz(LorentzModel),
}

impl DielectricModel {
    pub fn constant(n: f64, k: f64) -> Result<Self> {
        if !(n.is_finite() && k.is_finite()) || n < 0.0 || k < 0.0 {
            return Err(Error::InvalidInput(format!(
                "constant index needs n >= 0 and k >= 0, got n = {n}, k = {k}"
            )));
        }
        Ok(Self::Constant { n, k })
    }

    pub fn epsilon(&self, energy_ev: f64) -> Result<Complex64> {
        if !energy_ev.is_finite() || energy_ev <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "photon energy must be positive, got {energy_ev}"
            )));
        }
        match self {
            Self::Constant { n, k } => {
                let nk = Complex64::new(*n, *k);
                Ok(nk * nk)
            }
            Self::Tabulated(t) => t.epsilon(energy_ev),
            Self::Lorentz(l) => Ok(l.epsilon(energy_ev)),
        }
    }
}

/// Shipped gold mirror table (see [`GOLD_NK_CSV`] for the model constants).
pub fn builtin_gold() -> TabulatedNk {
    TabulatedNk::from_csv_str(GOLD_NK_CSV).expect("shipped gold table is well-formed")
}

/// Absorption coefficient alpha = 2 E Im(sqrt(eps)) / (hbar c), in cm^-1.
pub fn absorption_coefficient(epsilon: Complex64, energy_ev: f64) -> f64 {
    let kappa = epsilon.sqrt().im;
    2.0 * energy_ev * kappa / HBARC_EV_CM
}

/// Peak absorption coefficient of a single-oscillator film over energy, via
/// a fine scan plus parabolic refinement near the maximum. The scan covers
/// the oscillator line with wide margins; deterministic.
pub fn peak_absorption(model: &LorentzModel) -> Result<(f64, f64)> {
    let osc = model
        .oscillators()
        .first()
        .ok_or_else(|| Error::InvalidInput("film model has no oscillator".into()))?;
    let lo = (osc.e_res_ev - 6.0 * osc.gamma_ev).max(0.25 * osc.e_res_ev);
    let hi = osc.e_res_ev + 6.0 * osc.gamma_ev;
    let steps = 4000usize;
    let de = (hi - lo) / steps as f64;
    let alpha_at = |e: f64| absorption_coefficient(model.epsilon(e), e);
    let mut best = (lo, alpha_at(lo));
    for i in 1..=steps {
        let e = lo + de * i as f64;
        let a = alpha_at(e);
        if a > best.1 {
            best = (e, a);
        }
    }
    // 3-point parabolic refinement around the grid maximum
    let (e, _) = best;
    let (am, a0, ap) = (alpha_at(e - de), alpha_at(e), alpha_at(e + de));
    let curv = am - 2.0 * a0 + ap;
    if curv < 0.0 {
        let delta = 0.5 * (am - ap) / curv;
        let e_ref = e + delta.clamp(-1.0, 1.0) * de;
        return Ok((e_ref, alpha_at(e_ref)));
    }
    Ok(best)
}

/// Oscillator strength f (eV^2) whose film peaks at `target_alpha_per_cm`,
/// to 0.1% relative, by bisection on the monotone peak-vs-strength map.
/// A zero target returns zero strength.
pub fn calibrate_oscillator_strength(
    target_alpha_per_cm: f64,
    e_res_ev: f64,
    gamma_ev: f64,
    eps_inf: f64,
) -> Result<f64> {
    if !target_alpha_per_cm.is_finite() || target_alpha_per_cm < 0.0 {
        return Err(Error::InvalidInput(format!(
            "target absorption must be non-negative, got {target_alpha_per_cm}"
        )));
    }
    if target_alpha_per_cm == 0.0 {
        return Ok(0.0);
    }
    let peak_for = |f: f64| -> Result<f64> {
        let model = LorentzModel::new(
            eps_inf,
            vec![LorentzOscillator {
                strength_ev2: f,
                e_res_ev,
                gamma_ev,
            }],
        )?;
        Ok(peak_absorption(&model)?.1)
    };

    let mut lo = 0.0;
    let mut hi = 1e-3;
    let mut guard = 0;
    while peak_for(hi)? < target_alpha_per_cm {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Bracket(format!(
                "no oscillator strength below {hi} eV^2 reaches alpha = {target_alpha_per_cm}"
            )));
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if peak_for(mid)? < target_alpha_per_cm {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let f = 0.5 * (lo + hi);
    let achieved = peak_for(f)?;
    if (achieved - target_alpha_per_cm).abs() > 1e-3 * target_alpha_per_cm {
        return Err(Error::Bracket(format!(
            "calibration stalled at alpha = {achieved} for target {target_alpha_per_cm}"
        )));
    }
    Ok(f)
}
