//! Machine-readable run report: inputs echo, coupling constants and gaps,
//! the normal-incidence operating point, charged-polariton figures, and the
//! branch table over the angle grid.
//!
//! Every float is rounded to 10 significant digits before it enters the
//! document, so serialize -> parse -> serialize is byte-identical. The
//! config hash covers the canonical parsed configuration, making it
//! insensitive to file formatting but sensitive to every semantic key.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use polariton::{
    branch_dispersion, hopfield_at, photon_mass_for_ratio, Branch, CavityModel,
    ChargedPolaritonReport, CouplingParams, Error, FractionNorm, ModelKind, Polarization, Result,
};

use crate::config::{Resolved, RunConfig};

pub const TOOL_NAME: &str = "polariton";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reference splitting-gap figure quoted alongside this system, in meV.
/// Neither gap computation reproduces it; it is carried for comparison
/// only and never asserted against.
pub const REFERENCE_GAP_MEV: f64 = 130.0;

const REFERENCE_GAP_NOTE: &str =
    "externally reported value; not reproduced by either gap computation here";

/// Rounds to 10 significant digits (the report serialization contract).
pub fn sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// SHA-256 over the canonical JSON form of the parsed config.
pub fn config_sha256(cfg: &RunConfig) -> Result<String> {
    let canonical = cfg.canonical()?;
    let json = serde_json::to_string(&canonical)
        .map_err(|e| Error::InvalidInput(format!("config serialization failed: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingBlock {
    pub e_x_ev: f64,
    pub rabi_ev: f64,
    pub eta: f64,
    pub resonance_lp_ev: f64,
    pub resonance_up_ev: f64,
    pub gap_formula_ev: f64,
    pub gap_formula_mev: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_asymptotic_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_asymptotic_mev: Option<f64>,
    pub reference_gap_mev: f64,
    pub reference_gap_note: String,
}

impl CouplingBlock {
    pub fn from_params(p: &CouplingParams) -> Self {
        let res = p.resonance_energies();
        let gap = p.polariton_gap_formula();
        let asym = p.polariton_gap_asymptotic().ok();
        Self {
            e_x_ev: sig10(p.e_x_ev()),
            rabi_ev: sig10(p.rabi_ev()),
            eta: sig10(p.normalized_coupling()),
            resonance_lp_ev: sig10(res.lp_ev()),
            resonance_up_ev: sig10(res.up_ev()),
            gap_formula_ev: sig10(gap),
            gap_formula_mev: sig10(gap * 1e3),
            gap_asymptotic_ev: asym.map(sig10),
            gap_asymptotic_mev: asym.map(|g| sig10(g * 1e3)),
            reference_gap_mev: REFERENCE_GAP_MEV,
            reference_gap_note: REFERENCE_GAP_NOTE.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityBlock {
    pub e0_ev: f64,
    pub n_eff: f64,
    /// Photon mass implied by the mode curvature, e0 * n_eff^2 / m0c^2.
    pub photon_mass_cavity_m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonMassBlock {
    pub cavity_derived_m0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub override_m0: Option<f64>,
    /// The mass the charged-polariton figures were computed with.
    pub used_m0: f64,
    pub target_ratio_e0_per_m0: f64,
    /// Photon mass that would push the charge-to-mass ratio onto the
    /// target, when reachable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_m_ph_m0: Option<f64>,
}

/// Branch content at one angle, probability normalization unless the
/// field name says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPointBlock {
    pub theta_deg: f64,
    pub e_cav_ev: f64,
    pub lp_ev: f64,
    pub up_ev: f64,
    pub lp_photon_fraction: f64,
    pub lp_exciton_fraction: f64,
    pub up_photon_fraction: f64,
    pub up_exciton_fraction: f64,
    pub lp_exciton_fraction_bogoliubov: f64,
    pub gs_n_photon: f64,
    pub gs_n_exciton: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargedBlock {
    pub e_eff_lp_e0: f64,
    pub m_eff_lp_m0: f64,
    pub charge_to_mass_e0_per_m0: f64,
    pub gs_charge_e0: f64,
    pub density_per_cm3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitBlock {
    pub source: String,
    pub n_rows: usize,
    pub n_lp_observations: usize,
    pub n_up_observations: usize,
    pub rms_ev: f64,
    pub max_abs_residual_ev: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restart_index: usize,
    pub free: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub theta_deg: f64,
    pub e_cav_ev: f64,
    pub lp_ev: f64,
    pub up_ev: f64,
    pub lp_exciton_fraction: f64,
    pub up_exciton_fraction: f64,
    pub gs_n_exciton: f64,
}

/// Complete report document. `model` selects the branch-energy solver;
/// amplitude-derived quantities (fractions, ground state, charges) always
/// come from the full Hamiltonian, as recorded in `fractions_model`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_name: String,
    pub tool_version: String,
    pub config_sha256: String,
    pub model: String,
    pub polarization: String,
    pub fractions_model: String,
    pub inputs: RunConfig,
    pub coupling: CouplingBlock,
    pub cavity: CavityBlock,
    pub photon_mass: PhotonMassBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitBlock>,
    pub normal_incidence: OperatingPointBlock,
    pub charged_polariton: ChargedBlock,
    pub dispersion: Vec<DispersionRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("report parse failed: {e}")))
    }
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::FullHopfield => "hopfield",
        ModelKind::Quadratic => "quadratic",
    }
}

fn polarization_name(pol: Polarization) -> &'static str {
    match pol {
        Polarization::Te => "te",
        Polarization::Tm => "tm",
    }
}

fn operating_point(
    theta_deg: f64,
    coupling: &CouplingParams,
    cavity: &CavityModel,
    model: ModelKind,
) -> Result<OperatingPointBlock> {
    let e_cav = cavity.cavity_energy(theta_deg)?;
    let energies = polariton::branch_energies(e_cav, coupling, model)?;
    let (_, coeffs) = hopfield_at(e_cav, coupling)?;
    let lp = coeffs.branch_fractions(Branch::Lower);
    let up = coeffs.branch_fractions(Branch::Upper);
    let lp_bog = coeffs.branch_fractions_with_norm(Branch::Lower, FractionNorm::Bogoliubov);
    let gs = coeffs.ground_state_content();
    Ok(OperatingPointBlock {
        theta_deg: sig10(theta_deg),
        e_cav_ev: sig10(e_cav),
        lp_ev: sig10(energies.lp_ev()),
        up_ev: sig10(energies.up_ev()),
        lp_photon_fraction: sig10(lp.photon),
        lp_exciton_fraction: sig10(lp.exciton),
        up_photon_fraction: sig10(up.photon),
        up_exciton_fraction: sig10(up.exciton),
        lp_exciton_fraction_bogoliubov: sig10(lp_bog.exciton),
        gs_n_photon: sig10(gs.n_photon),
        gs_n_exciton: sig10(gs.n_exciton),
    })
}

/// Assembles the full document. `coupling` and `cavity` are passed apart
/// from `resolved` because the fitted path replaces them; `fit` carries the
/// fit diagnostics when the parameters came from a fit rather than the
/// config.
pub fn build_report(
    cfg: &RunConfig,
    resolved: &Resolved,
    coupling: &CouplingParams,
    cavity: &CavityModel,
    fit: Option<FitBlock>,
) -> Result<Report> {
    let material = &resolved.material;
    let model = resolved.fit.model;
    let polarization = resolved.polarization;
    let canonical = cfg.canonical()?;
    let normal = operating_point(0.0, coupling, cavity, model)?;

    let cavity_mass = cavity.photon_effective_mass();
    let m_ph_used = material.m_ph_override_m0().unwrap_or(cavity_mass);

    let (_, coeffs) = hopfield_at(cavity.cavity_energy(0.0)?, coupling)?;
    let lp_fractions = coeffs.branch_fractions(Branch::Lower);
    let gs = coeffs.ground_state_content();
    let charged = ChargedPolaritonReport::compute(&lp_fractions, &gs, material, m_ph_used)?;

    let target_ratio = 2400.0;
    let required = photon_mass_for_ratio(&lp_fractions, material.m_ex_m0(), target_ratio).ok();

    let table = branch_dispersion(coupling, cavity, &resolved.angle_grid, model)?;
    let dispersion = table
        .iter()
        .map(|point| {
            let (_, c) = hopfield_at(point.e_cav_ev, coupling)?;
            let lp = c.branch_fractions(Branch::Lower);
            let up = c.branch_fractions(Branch::Upper);
            Ok(DispersionRow {
                theta_deg: sig10(point.theta_deg),
                e_cav_ev: sig10(point.e_cav_ev),
                lp_ev: sig10(point.lp_ev),
                up_ev: sig10(point.up_ev),
                lp_exciton_fraction: sig10(lp.exciton),
                up_exciton_fraction: sig10(up.exciton),
                gs_n_exciton: sig10(c.ground_state_content().n_exciton),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Report {
        tool_name: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        config_sha256: config_sha256(cfg)?,
        model: model_name(model).into(),
        polarization: polarization_name(polarization).into(),
        fractions_model: "hopfield".into(),
        inputs: canonical,
        coupling: CouplingBlock::from_params(coupling),
        cavity: CavityBlock {
            e0_ev: sig10(cavity.e0_ev()),
            n_eff: sig10(cavity.n_eff()),
            photon_mass_cavity_m0: sig10(cavity_mass),
        },
        photon_mass: PhotonMassBlock {
            cavity_derived_m0: sig10(cavity_mass),
            override_m0: material.m_ph_override_m0().map(sig10),
            used_m0: sig10(m_ph_used),
            target_ratio_e0_per_m0: sig10(target_ratio),
            required_m_ph_m0: required.map(sig10),
        },
        fit,
        normal_incidence: normal,
        charged_polariton: ChargedBlock {
            e_eff_lp_e0: sig10(charged.e_eff_lp_e0),
            m_eff_lp_m0: sig10(charged.m_eff_lp_m0),
            charge_to_mass_e0_per_m0: sig10(charged.charge_to_mass_e0_per_m0),
            gs_charge_e0: sig10(charged.gs_charge_e0),
            density_per_cm3: sig10(charged.density_per_cm3),
        },
        dispersion,
    })
}

/// Gap-only document for the `gap` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub tool_name: String,
    pub tool_version: String,
    pub config_sha256: String,
    pub coupling: CouplingBlock,
}

impl GapReport {
    pub fn new(cfg: &RunConfig, coupling: &CouplingParams) -> Result<Self> {
        Ok(Self {
            tool_name: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            config_sha256: config_sha256(cfg)?,
            coupling: CouplingBlock::from_params(coupling),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("gap report serializes");
        s.push('\n');
        s
    }
}
