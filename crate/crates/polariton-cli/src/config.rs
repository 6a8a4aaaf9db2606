//! TOML run configuration: typed schema, strict key checking, defaults
//! matching the shipped `configs/default.toml`, and resolution into
//! validated domain objects.
//!
//! Unknown keys are a load error with the offending key named and located;
//! physical values are pushed through the owning constructors at load time
//! so a bad config never reaches a pipeline half-validated.

use std::path::Path;

use serde::{Deserialize, Serialize};

use polariton::{
    builtin_gold, calibrate_oscillator_strength, AngleGrid, CavityModel, CouplingParams,
    DielectricModel, Error, FitConfig, FreeMask, Layer, LorentzModel, LorentzOscillator,
    MaterialParams, ModelKind, ParamBounds, Polarization, Result, Stack, TabulatedNk,
};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingSection {
    pub e_x_ev: f64,
    pub rabi_ev: f64,
}

impl Default for CouplingSection {
    fn default() -> Self {
        Self {
            e_x_ev: 1.22,
            rabi_ev: 0.50,
        }
    }
}

/// Normal-incidence mode energy is given either directly (`e0_ev`) or as
/// the lower-branch target it must produce (`lp0_target_ev`), never both.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e0_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp0_target_ev: Option<f64>,
    pub n_eff: f64,
}

impl Default for CavitySection {
    fn default() -> Self {
        Self {
            e0_ev: None,
            lp0_target_ev: None,
            n_eff: 1.7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSection {
    pub m_ex_m0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_ph_override_m0: Option<f64>,
    pub alpha_peak_per_cm: f64,
    pub sigma_cm2: f64,
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            m_ex_m0: 25.0,
            m_ph_override_m0: Some(1.0e-4),
            alpha_peak_per_cm: 1.05e5,
            sigma_cm2: 6.14e-17,
        }
    }
}

/// Lorentz film: strength comes either from a target peak absorption
/// (calibrated at load) or as an explicit value, never both.
/// `strength_scale` multiplies the resulting strength; it models changing
/// the chromophore number density at fixed film geometry.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FilmSection {
    pub e_res_ev: f64,
    pub gamma_ev: f64,
    pub eps_inf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_alpha_per_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength_ev2: Option<f64>,
    pub strength_scale: f64,
}

impl Default for FilmSection {
    fn default() -> Self {
        Self {
            e_res_ev: 1.22,
            gamma_ev: 0.15,
            eps_inf: 2.5,
            target_alpha_per_cm: None,
            strength_ev2: None,
            strength_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LayerEntry {
    pub material: String,
    pub thickness_nm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct StackSection {
    pub ambient_n: f64,
    pub substrate_n: f64,
    /// Optional replacement for the built-in mirror optical constants;
    /// CSV with header `energy_ev,n,k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gold_nk_csv: Option<String>,
    pub layers: Vec<LayerEntry>,
}

impl Default for StackSection {
    fn default() -> Self {
        Self {
            ambient_n: 1.0,
            substrate_n: 1.5,
            gold_nk_csv: None,
            layers: vec![
                LayerEntry {
                    material: "gold".into(),
                    thickness_nm: 22.0,
                },
                LayerEntry {
                    material: "film".into(),
                    thickness_nm: 270.0,
                },
                LayerEntry {
                    material: "gold".into(),
                    thickness_nm: 22.0,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub e_min_ev: f64,
    pub e_max_ev: f64,
    pub e_step_ev: f64,
    pub theta_start_deg: f64,
    pub theta_stop_deg: f64,
    pub theta_step_deg: f64,
    pub polarization: String,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            e_min_ev: 0.6,
            e_max_ev: 2.2,
            e_step_ev: 0.001,
            theta_start_deg: 0.0,
            theta_stop_deg: 60.0,
            theta_step_deg: 5.0,
            polarization: "te".into(),
        }
    }
}

/// Peak extraction and branch assignment. Peaks outside
/// [pair_min_ev, pair_max_ev] are ignored when building the fit dataset, so
/// mirror plasma-edge structure never masquerades as a branch.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PeaksSection {
    pub min_prominence: f64,
    pub window: usize,
    pub pair_min_ev: f64,
    pub pair_max_ev: f64,
}

impl Default for PeaksSection {
    fn default() -> Self {
        Self {
            min_prominence: 0.003,
            window: 1,
            pair_min_ev: 0.7,
            pair_max_ev: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub model: String,
    pub free: Vec<String>,
    pub e_x_bounds: [f64; 2],
    pub rabi_bounds: [f64; 2],
    pub e0_bounds: [f64; 2],
    pub n_eff_bounds: [f64; 2],
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitSection {
    fn default() -> Self {
        let b = ParamBounds::default();
        Self {
            model: "hopfield".into(),
            free: vec!["e_x".into(), "rabi".into(), "e0".into(), "n_eff".into()],
            e_x_bounds: [b.e_x_ev.0, b.e_x_ev.1],
            rabi_bounds: [b.rabi_ev.0, b.rabi_ev.1],
            e0_bounds: [b.e0_ev.0, b.e0_ev.1],
            n_eff_bounds: [b.n_eff.0, b.n_eff.1],
            tol: 1e-9,
            max_iters: 2000,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IoSection {
    pub output_dir: String,
}

impl Default for IoSection {
    fn default() -> Self {
        Self {
            output_dir: "out".into(),
        }
    }
}

/// Complete run configuration. Every section has defaults equal to the
/// shipped `configs/default.toml`, so an empty file is a valid config.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub coupling: CouplingSection,
    pub cavity: CavitySection,
    pub material: MaterialSection,
    pub film: FilmSection,
    pub stack: StackSection,
    pub grid: GridSection,
    pub peaks: PeaksSection,
    pub fit: FitSection,
    pub io: IoSection,
}

impl RunConfig {
    /// Parses strictly: unknown keys and type mismatches are reported with
    /// the TOML location the parser attaches.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config error: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::InvalidInput(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fills the documented fallbacks for absent exclusive keys, producing
    /// the form that is hashed, echoed in reports, and resolved:
    /// no cavity key means a lower-branch target of 1.02 eV, no film
    /// strength key means calibration against the material's peak
    /// absorption. Contradictory exclusive keys are an error here.
    pub fn canonical(&self) -> Result<RunConfig> {
        let mut cfg = self.clone();
        match (cfg.cavity.e0_ev, cfg.cavity.lp0_target_ev) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput(
                    "cavity: set at most one of e0_ev and lp0_target_ev, got both".into(),
                ))
            }
            (None, None) => cfg.cavity.lp0_target_ev = Some(1.02),
            _ => {}
        }
        match (cfg.film.target_alpha_per_cm, cfg.film.strength_ev2) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInput(
                    "film: set at most one of target_alpha_per_cm and strength_ev2, got both"
                        .into(),
                ))
            }
            (None, None) => cfg.film.target_alpha_per_cm = Some(cfg.material.alpha_peak_per_cm),
            _ => {}
        }
        Ok(cfg)
    }

    /// Validates everything and builds the domain objects the commands
    /// consume. Nothing is cached; resolution is pure.
    pub fn resolve(&self) -> Result<Resolved> {
        let cfg = self.canonical()?;
        let coupling = CouplingParams::new(cfg.coupling.e_x_ev, cfg.coupling.rabi_ev)?;
        let model = parse_model(&cfg.fit.model)?;
        let polarization = parse_polarization(&cfg.grid.polarization)?;

        let e0_ev = match (cfg.cavity.e0_ev, cfg.cavity.lp0_target_ev) {
            (Some(e0), _) => e0,
            (None, Some(lp0)) => polariton::solve_cavity_energy_for_lp(&coupling, lp0, model)?,
            (None, None) => unreachable!("canonical() fills the cavity fallback"),
        };
        let cavity = CavityModel::new(e0_ev, cfg.cavity.n_eff)?;

        let material = MaterialParams::new(
            cfg.material.m_ex_m0,
            cfg.material.m_ph_override_m0,
            cfg.material.alpha_peak_per_cm,
            cfg.material.sigma_cm2,
        )?;

        let film = cfg.film_model()?;

        let angle_grid = AngleGrid::from_range(
            self.grid.theta_start_deg,
            self.grid.theta_stop_deg,
            self.grid.theta_step_deg,
        )?;
        let energies_ev =
            polariton::energy_grid(self.grid.e_min_ev, self.grid.e_max_ev, self.grid.e_step_ev)?;

        if self.peaks.min_prominence.is_nan() || self.peaks.min_prominence <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "peaks.min_prominence must be positive, got {}",
                self.peaks.min_prominence
            )));
        }
        if self.peaks.pair_min_ev.is_nan()
            || self.peaks.pair_max_ev.is_nan()
            || self.peaks.pair_min_ev >= self.peaks.pair_max_ev
        {
            return Err(Error::InvalidInput(format!(
                "peaks window must satisfy pair_min_ev < pair_max_ev, got [{}, {}]",
                self.peaks.pair_min_ev, self.peaks.pair_max_ev
            )));
        }

        let fit = self.fit_config(model)?;
        let stack = self.build_stack(&film)?;

        Ok(Resolved {
            coupling,
            cavity,
            material,
            film,
            stack,
            angle_grid,
            energies_ev,
            polarization,
            fit,
        })
    }

    /// The film dielectric with its strength either calibrated against the
    /// target peak absorption or taken verbatim, then density-scaled.
    /// Expects canonical form (exactly one strength key set).
    fn film_model(&self) -> Result<LorentzModel> {
        let f = &self.film;
        let strength_ev2 = match (f.target_alpha_per_cm, f.strength_ev2) {
            (Some(alpha), None) => {
                calibrate_oscillator_strength(alpha, f.e_res_ev, f.gamma_ev, f.eps_inf)?
            }
            (None, Some(s)) => s,
            _ => {
                return Err(Error::InvalidInput(
                    "film: need exactly one of target_alpha_per_cm and strength_ev2".into(),
                ))
            }
        };
        let base = LorentzModel::new(
            f.eps_inf,
            vec![LorentzOscillator {
                strength_ev2,
                e_res_ev: f.e_res_ev,
                gamma_ev: f.gamma_ev,
            }],
        )?;
        base.scaled(f.strength_scale)
    }

    fn build_stack(&self, film: &LorentzModel) -> Result<Stack> {
        let gold: TabulatedNk = match &self.stack.gold_nk_csv {
            Some(path) => TabulatedNk::from_path(Path::new(path))?,
            None => builtin_gold(),
        };
        let layers = self
            .stack
            .layers
            .iter()
            .map(|entry| {
                let dielectric = match entry.material.as_str() {
                    "gold" => DielectricModel::Tabulated(gold.clone()),
                    "film" => DielectricModel::Lorentz(film.clone()),
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "stack layer material must be 'gold' or 'film', got '{other}'"
                        )))
                    }
                };
                Ok(Layer {
                    thickness_nm: entry.thickness_nm,
                    dielectric,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Stack::new(
            DielectricModel::constant(self.stack.ambient_n, 0.0)?,
            layers,
            DielectricModel::constant(self.stack.substrate_n, 0.0)?,
        )
    }

    fn fit_config(&self, model: ModelKind) -> Result<FitConfig> {
        let mut mask = FreeMask {
            e_x: false,
            rabi: false,
            e0: false,
            n_eff: false,
        };
        for name in &self.fit.free {
            match name.as_str() {
                "e_x" => mask.e_x = true,
                "rabi" => mask.rabi = true,
                "e0" => mask.e0 = true,
                "n_eff" => mask.n_eff = true,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "fit.free entries must be e_x, rabi, e0, or n_eff, got '{other}'"
                    )))
                }
            }
        }
        Ok(FitConfig {
            free: mask,
            bounds: ParamBounds {
                e_x_ev: (self.fit.e_x_bounds[0], self.fit.e_x_bounds[1]),
                rabi_ev: (self.fit.rabi_bounds[0], self.fit.rabi_bounds[1]),
                e0_ev: (self.fit.e0_bounds[0], self.fit.e0_bounds[1]),
                n_eff: (self.fit.n_eff_bounds[0], self.fit.n_eff_bounds[1]),
            },
            model,
            tol: self.fit.tol,
            max_iters: self.fit.max_iters,
            restarts: self.fit.restarts,
            seed: self.fit.seed,
        })
    }
}

pub fn parse_model(name: &str) -> Result<ModelKind> {
    match name {
        "hopfield" => Ok(ModelKind::FullHopfield),
        "quadratic" => Ok(ModelKind::Quadratic),
        other => Err(Error::InvalidInput(format!(
            "fit.model must be 'hopfield' or 'quadratic', got '{other}'"
        ))),
    }
}

pub fn parse_polarization(name: &str) -> Result<Polarization> {
    match name {
        "te" => Ok(Polarization::Te),
        "tm" => Ok(Polarization::Tm),
        other => Err(Error::InvalidInput(format!(
            "grid.polarization must be 'te' or 'tm', got '{other}'"
        ))),
    }
}

/// Domain objects built from a validated config.
#[derive(Debug)]
pub struct Resolved {
    pub coupling: CouplingParams,
    pub cavity: CavityModel,
    pub material: MaterialParams,
    pub film: LorentzModel,
    pub stack: Stack,
    pub angle_grid: AngleGrid,
    pub energies_ev: Vec<f64>,
    pub polarization: Polarization,
    pub fit: FitConfig,
}
