//! Least-squares extraction of (e_x, rabi, e0, n_eff) from angle-resolved
//! peak positions, plus synthetic-dataset generation for round-trip tests.
//!
//! The objective is the weighted sum of squared branch-energy residuals,
//! minimized by deterministic Nelder-Mead descent from a caller-supplied
//! initialization plus seeded jittered restarts. Restarts run in parallel;
//! winner selection is deterministic regardless of completion order, and
//! the residual sum is accumulated in theta-sorted order so row permutation
//! cannot change any bit of the result.

pub mod nelder_mead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::cavity::{branch_dispersion, AngleGrid, CavityModel};
use crate::error::{Error, Result};
use crate::hopfield::{branch_energies, CouplingParams, ModelKind};
use nelder_mead::{minimize, MinimizeResult, NelderMeadOptions};

/// Restart ties closer than this on the objective resolve to the lower
/// restart index.
const RESTART_TIE_EPS: f64 = 1e-15;

/// One angle row; a missing branch observation is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRow {
    pub theta_deg: f64,
    pub e_lp_ev: Option<f64>,
    pub e_up_ev: Option<f64>,
    pub weight: f64,
}

impl PeakRow {
    fn observations(&self) -> usize {
        self.e_lp_ev.is_some() as usize + self.e_up_ev.is_some() as usize
    }
}

/// Validated angle-resolved peak table: at least four rows carrying an
/// observation, unique angles, positive energies, non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakDataset {
    rows: Vec<PeakRow>,
}

impl PeakDataset {
    pub fn new(rows: Vec<PeakRow>) -> Result<Self> {
        let observed_rows = rows.iter().filter(|r| r.observations() > 0).count();
        if observed_rows < 4 {
            return Err(Error::Dataset(format!(
                "need at least 4 rows with an observed branch energy, got {observed_rows}"
            )));
        }
        let mut thetas: Vec<f64> = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if !row.theta_deg.is_finite() || !(0.0..90.0).contains(&row.theta_deg) {
                return Err(Error::Dataset(format!(
                    "row {i}: angle must lie in [0, 90) degrees, got {}",
                    row.theta_deg
                )));
            }
            for e in [row.e_lp_ev, row.e_up_ev].into_iter().flatten() {
                if !e.is_finite() || e <= 0.0 {
                    return Err(Error::Dataset(format!(
                        "row {i}: branch energies must be positive, got {e}"
                    )));
                }
            }
            if !row.weight.is_finite() || row.weight < 0.0 {
                return Err(Error::Dataset(format!(
                    "row {i}: weight must be non-negative, got {}",
                    row.weight
                )));
            }
            thetas.push(row.theta_deg);
        }
        thetas.sort_by(f64::total_cmp);
        if thetas.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Dataset("angles must be unique".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[PeakRow] {
        &self.rows
    }

    /// Count of present (lp, up) observations.
    pub fn observation_counts(&self) -> (usize, usize) {
        let lp = self.rows.iter().filter(|r| r.e_lp_ev.is_some()).count();
        let up = self.rows.iter().filter(|r| r.e_up_ev.is_some()).count();
        (lp, up)
    }

    /// Parses CSV with the exact header `theta_deg,e_lp_ev,e_up_ev,weight`.
    /// Empty cells mark missing observations; an empty weight means 1.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Csv {
            line: 1,
            message: "empty file".into(),
        })?;
        if header.trim_end_matches('\r') != "theta_deg,e_lp_ev,e_up_ev,weight" {
            return Err(Error::Csv {
                line: 1,
                message: format!(
                    "expected header 'theta_deg,e_lp_ev,e_up_ev,weight', got '{header}'"
                ),
            });
        }
        let mut rows = Vec::new();
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Csv {
                    line: line_no,
                    message: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str, name: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::Csv {
                    line: line_no,
                    message: format!("cannot parse {name} from '{s}'"),
                })
            };
            let optional = |s: &str, name: &str| -> Result<Option<f64>> {
                if s.trim().is_empty() {
                    Ok(None)
                } else {
                    parse(s, name).map(Some)
                }
            };
            rows.push(PeakRow {
                theta_deg: parse(fields[0], "theta_deg")?,
                e_lp_ev: optional(fields[1], "e_lp_ev")?,
                e_up_ev: optional(fields[2], "e_up_ev")?,
                weight: optional(fields[3], "weight")?.unwrap_or(1.0),
            });
        }
        Self::new(rows)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("theta_deg,e_lp_ev,e_up_ev,weight\n");
        for row in &self.rows {
            let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.theta_deg,
                cell(row.e_lp_ev),
                cell(row.e_up_ev),
                row.weight
            ));
        }
        out
    }

    pub fn write_path(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv_string())?)
    }
}

/// Full parameter record of the dispersion model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub e_x_ev: f64,
    pub rabi_ev: f64,
    pub e0_ev: f64,
    pub n_eff: f64,
}

impl FitParams {
    pub fn coupling(&self) -> Result<CouplingParams> {
        CouplingParams::new(self.e_x_ev, self.rabi_ev)
    }

    pub fn cavity(&self) -> Result<CavityModel> {
        CavityModel::new(self.e0_ev, self.n_eff)
    }

    fn get(&self, i: usize) -> f64 {
        [self.e_x_ev, self.rabi_ev, self.e0_ev, self.n_eff][i]
    }

    fn set(&mut self, i: usize, v: f64) {
        match i {
            0 => self.e_x_ev = v,
            1 => self.rabi_ev = v,
            2 => self.e0_ev = v,
            _ => self.n_eff = v,
        }
    }
}

/// Which parameters the fit may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeMask {
    pub e_x: bool,
    pub rabi: bool,
    pub e0: bool,
    pub n_eff: bool,
}

impl FreeMask {
    pub fn all() -> Self {
        Self {
            e_x: true,
            rabi: true,
            e0: true,
            n_eff: true,
        }
    }

    fn flags(&self) -> [bool; 4] {
        [self.e_x, self.rabi, self.e0, self.n_eff]
    }

    pub fn count(&self) -> usize {
        self.flags().iter().filter(|f| **f).count()
    }
}

/// Inclusive search box per parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub e_x_ev: (f64, f64),
    pub rabi_ev: (f64, f64),
    pub e0_ev: (f64, f64),
    pub n_eff: (f64, f64),
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            e_x_ev: (1.0, 1.5),
            rabi_ev: (0.02, 1.6),
            e0_ev: (0.6, 1.6),
            n_eff: (1.05, 3.0),
        }
    }
}

impl ParamBounds {
    fn get(&self, i: usize) -> (f64, f64) {
        [self.e_x_ev, self.rabi_ev, self.e0_ev, self.n_eff][i]
    }

    fn names() -> [&'static str; 4] {
        ["e_x", "rabi", "e0", "n_eff"]
    }
}

/// Optimizer configuration. `tol` is the relative simplex-size stopping
/// tolerance; `restarts` counts optimizer launches including the exact
/// initialization (so it must be at least 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub free: FreeMask,
    pub bounds: ParamBounds,
    pub model: ModelKind,
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            free: FreeMask::all(),
            bounds: ParamBounds::default(),
            model: ModelKind::FullHopfield,
            tol: 1e-9,
            max_iters: 2000,
            restarts: 8,
            seed: 0,
        }
    }
}

/// Fit outcome: best restart's parameters plus diagnostics. `residuals`
/// follows dataset row order, lower branch before upper within a row.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: FitParams,
    pub rms_ev: f64,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub restart_index: usize,
}

/// Signed residuals (model minus observation, times sqrt(weight)) in
/// dataset order, lower branch before upper within a row.
pub fn residuals(
    p: &CouplingParams,
    m: &CavityModel,
    d: &PeakDataset,
    kind: ModelKind,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for row in d.rows() {
        let context = |e: Error| {
            Error::Fit(format!(
                "dispersion at theta = {} deg failed: {e}",
                row.theta_deg
            ))
        };
        let e_cav = m.cavity_energy(row.theta_deg).map_err(context)?;
        let b = branch_energies(e_cav, p, kind).map_err(context)?;
        let w = row.weight.sqrt();
        if let Some(obs) = row.e_lp_ev {
            out.push((b.lp_ev() - obs) * w);
        }
        if let Some(obs) = row.e_up_ev {
            out.push((b.up_ev() - obs) * w);
        }
    }
    Ok(out)
}

/// Weighted sum of squared residuals, accumulated in theta-sorted row order
/// so the value is bitwise independent of row permutation.
pub fn sum_squared_residuals(
    p: &CouplingParams,
    m: &CavityModel,
    d: &PeakDataset,
    kind: ModelKind,
) -> Result<f64> {
    let mut order: Vec<usize> = (0..d.rows().len()).collect();
    order.sort_by(|&a, &b| d.rows()[a].theta_deg.total_cmp(&d.rows()[b].theta_deg));
    let mut ss = 0.0;
    for &i in &order {
        let row = &d.rows()[i];
        let e_cav = m.cavity_energy(row.theta_deg)?;
        let b = branch_energies(e_cav, p, kind)?;
        if let Some(obs) = row.e_lp_ev {
            let r = b.lp_ev() - obs;
            ss += r * r * row.weight;
        }
        if let Some(obs) = row.e_up_ev {
            let r = b.up_ev() - obs;
            ss += r * r * row.weight;
        }
    }
    Ok(ss)
}

/// Initialization heuristic: e_x from the midpoint of the branches at the
/// minimum observed splitting, rabi from that splitting, e0 from the
/// lowest-angle lower-branch energy, n_eff = 1.7.
pub fn default_init(d: &PeakDataset) -> Result<FitParams> {
    let mut min_split: Option<(f64, f64)> = None; // (splitting, midpoint)
    for row in d.rows() {
        if let (Some(lp), Some(up)) = (row.e_lp_ev, row.e_up_ev) {
            let split = up - lp;
            if min_split.is_none_or(|(s, _)| split < s) {
                min_split = Some((split, 0.5 * (lp + up)));
            }
        }
    }
    let (splitting, midpoint) = min_split.ok_or_else(|| {
        Error::Dataset("initialization needs at least one row with both branches".into())
    })?;
    let e0 = d
        .rows()
        .iter()
        .filter(|r| r.e_lp_ev.is_some())
        .min_by(|a, b| a.theta_deg.total_cmp(&b.theta_deg))
        .and_then(|r| r.e_lp_ev)
        .ok_or_else(|| {
            Error::Dataset("initialization needs at least one lower-branch observation".into())
        })?;
    Ok(FitParams {
        e_x_ev: midpoint,
        rabi_ev: splitting.max(1e-3),
        e0_ev: e0,
        n_eff: 1.7,
    })
}

fn pack(params: &FitParams, mask: &FreeMask) -> Vec<f64> {
    (0..4)
        .filter(|&i| mask.flags()[i])
        .map(|i| params.get(i))
        .collect()
}

fn unpack(x: &[f64], init: &FitParams, mask: &FreeMask) -> FitParams {
    let mut params = *init;
    let mut cursor = 0;
    for i in 0..4 {
        if mask.flags()[i] {
            params.set(i, x[cursor]);
            cursor += 1;
        }
    }
    params
}

/// Least-squares fit of the dispersion model to a peak dataset.
///
/// Runs `cfg.restarts` deterministic simplex descents (the first from
/// `init` exactly, the rest from seeded jittered starts clamped inside the
/// bounds) and returns the best by objective value, ties resolved to the
/// lowest restart index. Fails when every restart lands on an unevaluable
/// objective or when the dataset cannot determine the free parameters.
pub fn fit_dispersion(d: &PeakDataset, init: &FitParams, cfg: &FitConfig) -> Result<FitResult> {
    let n_free = cfg.free.count();
    if n_free == 0 {
        return Err(Error::InvalidInput("no free parameters to fit".into()));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 || cfg.max_iters == 0 {
        return Err(Error::InvalidInput(
            "tolerance must be positive and max_iters non-zero".into(),
        ));
    }
    for i in 0..4 {
        let (lo, hi) = cfg.bounds.get(i);
        let name = ParamBounds::names()[i];
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "bounds for {name} must be finite with lower < upper, got [{lo}, {hi}]"
            )));
        }
        if cfg.free.flags()[i] && !(lo..=hi).contains(&init.get(i)) {
            return Err(Error::InvalidInput(format!(
                "initial {name} = {} outside bounds [{lo}, {hi}]",
                init.get(i)
            )));
        }
    }
    let (n_lp, n_up) = d.observation_counts();
    if n_lp + n_up < n_free {
        return Err(Error::Dataset(format!(
            "under-determined fit: {n_lp} lower + {n_up} upper observations for {n_free} free parameters"
        )));
    }

    let free_indices: Vec<usize> = (0..4).filter(|&i| cfg.free.flags()[i]).collect();
    let objective = |x: &[f64]| -> f64 {
        for (slot, &i) in free_indices.iter().enumerate() {
            let (lo, hi) = cfg.bounds.get(i);
            if !(lo..=hi).contains(&x[slot]) {
                return f64::INFINITY;
            }
        }
        let params = unpack(x, init, &cfg.free);
        let (Ok(p), Ok(m)) = (params.coupling(), params.cavity()) else {
            return f64::INFINITY;
        };
        sum_squared_residuals(&p, &m, d, cfg.model).unwrap_or(f64::INFINITY)
    };

    let start_for = |restart: usize| -> Vec<f64> {
        let exact = pack(init, &cfg.free);
        if restart == 0 {
            return exact;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed
                .wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        exact
            .iter()
            .zip(&free_indices)
            .map(|(&x, &i)| {
                let (lo, hi) = cfg.bounds.get(i);
                let span = hi - lo;
                let jittered = x + 0.15 * span * rng.gen_range(-1.0..1.0);
                jittered.clamp(lo + 1e-3 * span, hi - 1e-3 * span)
            })
            .collect()
    };

    let opts = NelderMeadOptions {
        tol: cfg.tol,
        max_iters: cfg.max_iters,
    };
    let runs: Vec<(usize, MinimizeResult)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let x0 = start_for(restart);
            let steps: Vec<f64> = free_indices
                .iter()
                .zip(&x0)
                .map(|(&i, &x)| {
                    let (lo, hi) = cfg.bounds.get(i);
                    let step = 0.05 * (hi - lo);
                    // step into the box, not out of it
                    if x + step > hi {
                        -step
                    } else {
                        step
                    }
                })
                .collect();
            let mut f = objective;
            (restart, minimize(&mut f, &x0, &steps, &opts))
        })
        .collect();

    let mut best: Option<&(usize, MinimizeResult)> = None;
    for run in &runs {
        match best {
            None => best = Some(run),
            Some(current) => {
                let scale = 1.0 + current.1.fval.abs().min(run.1.fval.abs());
                if run.1.fval < current.1.fval - RESTART_TIE_EPS * scale {
                    best = Some(run);
                }
            }
        }
    }
    let (restart_index, winner) = best.expect("at least one restart ran");
    if !winner.fval.is_finite() {
        return Err(Error::Fit(
            "all restarts failed to evaluate the objective".into(),
        ));
    }

    let params = unpack(&winner.x, init, &cfg.free);
    let p = params.coupling()?;
    let m = params.cavity()?;
    let res = residuals(&p, &m, d, cfg.model)?;
    let sum_weights: f64 = d
        .rows()
        .iter()
        .map(|r| r.weight * r.observations() as f64)
        .sum();
    let rms_ev = if sum_weights > 0.0 {
        (winner.fval / sum_weights).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        params,
        rms_ev,
        residuals: res,
        converged: winner.converged,
        iterations: winner.iterations,
        restart_index: *restart_index,
    })
}

/// Branch energies over an angle grid with optional seeded gaussian noise;
/// deterministic for a fixed seed. Noise is drawn row by row, lower branch
/// first.
pub fn synthesize_dataset(
    p: &CouplingParams,
    m: &CavityModel,
    grid: &AngleGrid,
    kind: ModelKind,
    noise_sigma_ev: f64,
    seed: u64,
) -> Result<PeakDataset> {
    if !noise_sigma_ev.is_finite() || noise_sigma_ev < 0.0 {
        return Err(Error::InvalidInput(format!(
            "noise sigma must be non-negative, got {noise_sigma_ev}"
        )));
    }
    let table = branch_dispersion(p, m, grid, kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Option<Normal<f64>> = if noise_sigma_ev > 0.0 {
        Some(Normal::new(0.0, noise_sigma_ev).expect("validated sigma"))
    } else {
        None
    };
    let rows = table
        .into_iter()
        .map(|point| {
            let mut lp = point.lp_ev;
            let mut up = point.up_ev;
            if let Some(n) = &noise {
                lp += n.sample(&mut rng);
                up += n.sample(&mut rng);
            }
            PeakRow {
                theta_deg: point.theta_deg,
                e_lp_ev: Some(lp),
                e_up_ev: Some(up),
                weight: 1.0,
            }
        })
        .collect();
    PeakDataset::new(rows)
}
