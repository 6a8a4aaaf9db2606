//! Command pipelines: spectra simulation, peak extraction and branch
//! assignment, dataset fitting, and report assembly. Everything here is a
//! pure function of (config, input files); all file writing happens in the
//! dispatch layer.

use std::path::Path;

use polariton::{
    default_init, fit_dispersion, simulate_angle_spectra, Error, FitParams, FitResult, ModelKind,
    Peak, PeakDataset, PeakRow, Result, Spectrum,
};

use crate::config::{Resolved, RunConfig};
use crate::report::{build_report, sig10, FitBlock, Report};

pub const SPECTRA_HEADER: &str = "angle_deg,energy_ev,transmission,reflection,absorption";
pub const PEAKS_HEADER: &str = "angle_deg,energy_ev,height,prominence,width_ev";

/// Peaks found at each grid angle, in grid order.
pub type AnglePeaks = Vec<(f64, Vec<Peak>)>;

/// Everything the simulate pipeline produces before file writing. The
/// dataset is `None` when branch assignment cannot form a valid fit input
/// (too few usable rows), which is expected for an empty cavity.
pub struct SimulationOutput {
    pub spectra: Vec<Spectrum>,
    pub per_angle_peaks: AnglePeaks,
    pub dataset: Option<PeakDataset>,
    pub dataset_note: Option<String>,
}

pub fn run_simulation(cfg: &RunConfig) -> Result<SimulationOutput> {
    let resolved = cfg.resolve()?;
    let spectra = simulate_angle_spectra(
        &resolved.stack,
        &resolved.angle_grid,
        &resolved.energies_ev,
        resolved.polarization,
    )?;
    let (per_angle_peaks, dataset, dataset_note) = peaks_and_dataset(cfg, &spectra);
    Ok(SimulationOutput {
        spectra,
        per_angle_peaks,
        dataset,
        dataset_note,
    })
}

/// Extracts per-angle transmission peaks and pairs them into a fit dataset.
pub fn peaks_and_dataset(
    cfg: &RunConfig,
    spectra: &[Spectrum],
) -> (AnglePeaks, Option<PeakDataset>, Option<String>) {
    let per_angle: AnglePeaks = spectra
        .iter()
        .map(|s| {
            (
                s.theta_deg,
                s.transmission_peaks(cfg.peaks.min_prominence, cfg.peaks.window),
            )
        })
        .collect();
    match pair_peaks_to_dataset(
        &per_angle,
        cfg.film.e_res_ev,
        (cfg.peaks.pair_min_ev, cfg.peaks.pair_max_ev),
    ) {
        Ok(dataset) => (per_angle, Some(dataset), None),
        Err(e) => (per_angle, None, Some(e.to_string())),
    }
}

/// Assigns extracted peaks to branches: inside the energy window, the most
/// prominent peak below the splitting energy is the lower branch, the most
/// prominent at or above it the upper branch. Angles with no usable peak
/// are dropped.
pub fn pair_peaks_to_dataset(
    per_angle: &[(f64, Vec<Peak>)],
    split_ev: f64,
    window_ev: (f64, f64),
) -> Result<PeakDataset> {
    let (w_lo, w_hi) = window_ev;
    if w_lo.is_nan() || w_hi.is_nan() || w_lo >= w_hi {
        return Err(Error::InvalidInput(format!(
            "peak window must be increasing, got [{w_lo}, {w_hi}]"
        )));
    }
    let best = |peaks: &[Peak], lower: bool| -> Option<f64> {
        peaks
            .iter()
            .filter(|p| p.energy_ev >= w_lo && p.energy_ev <= w_hi)
            .filter(|p| {
                if lower {
                    p.energy_ev < split_ev
                } else {
                    p.energy_ev >= split_ev
                }
            })
            .max_by(|a, b| {
                (a.prominence, a.energy_ev)
                    .partial_cmp(&(b.prominence, b.energy_ev))
                    .expect("peak fields are finite")
            })
            .map(|p| p.energy_ev)
    };
    let rows: Vec<PeakRow> = per_angle
        .iter()
        .filter_map(|(theta, peaks)| {
            let lp = best(peaks, true);
            let up = best(peaks, false);
            if lp.is_none() && up.is_none() {
                return None;
            }
            Some(PeakRow {
                theta_deg: *theta,
                e_lp_ev: lp,
                e_up_ev: up,
                weight: 1.0,
            })
        })
        .collect();
    PeakDataset::new(rows)
}

/// Shortest round-trip float formatting: `peaks` re-reads this file, so the
/// written values must parse back to the exact bits that produced them.
pub fn spectra_to_csv(spectra: &[Spectrum]) -> String {
    let mut out =
        String::with_capacity(64 * spectra.iter().map(|s| s.energy_ev.len()).sum::<usize>());
    out.push_str(SPECTRA_HEADER);
    out.push('\n');
    for s in spectra {
        for i in 0..s.energy_ev.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.theta_deg, s.energy_ev[i], s.transmission[i], s.reflection[i], s.absorption[i]
            ));
        }
    }
    out
}

pub fn spectra_from_csv_str(text: &str) -> Result<Vec<Spectrum>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        message: "empty file".into(),
    })?;
    if header.trim_end_matches('\r') != SPECTRA_HEADER {
        return Err(Error::Csv {
            line: 1,
            message: format!("expected header '{SPECTRA_HEADER}', got '{header}'"),
        });
    }
    let mut spectra: Vec<Spectrum> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Csv {
                line: line_no,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let mut values = [0.0f64; 5];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.trim().parse().map_err(|_| Error::Csv {
                line: line_no,
                message: format!("cannot parse number from '{field}'"),
            })?;
        }
        let [theta, energy, t, r, a] = values;
        let start_new = spectra.last().is_none_or(|s| s.theta_deg != theta);
        if start_new {
            spectra.push(Spectrum {
                theta_deg: theta,
                energy_ev: Vec::new(),
                transmission: Vec::new(),
                reflection: Vec::new(),
                absorption: Vec::new(),
            });
        }
        let s = spectra.last_mut().expect("just pushed");
        s.energy_ev.push(energy);
        s.transmission.push(t);
        s.reflection.push(r);
        s.absorption.push(a);
    }
    if spectra.is_empty() {
        return Err(Error::Csv {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(spectra)
}

pub fn peaks_to_csv(per_angle: &[(f64, Vec<Peak>)]) -> String {
    let mut out = String::from(PEAKS_HEADER);
    out.push('\n');
    for (theta, peaks) in per_angle {
        for p in peaks {
            out.push_str(&format!(
                "{},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                theta, p.energy_ev, p.height, p.prominence, p.width_ev
            ));
        }
    }
    out
}

/// Fit initialization: frozen parameters take their configured values,
/// free parameters start from the dataset heuristic clamped into bounds so
/// the optimizer always launches from a feasible point.
pub fn clamped_init(dataset: &PeakDataset, resolved: &Resolved) -> Result<FitParams> {
    let heuristic = default_init(dataset)?;
    let b = &resolved.fit.bounds;
    let clamp = |x: f64, (lo, hi): (f64, f64)| -> f64 {
        let margin = 1e-6 * (hi - lo);
        x.clamp(lo + margin, hi - margin)
    };
    let mut init = FitParams {
        e_x_ev: resolved.coupling.e_x_ev(),
        rabi_ev: resolved.coupling.rabi_ev(),
        e0_ev: resolved.cavity.e0_ev(),
        n_eff: resolved.cavity.n_eff(),
    };
    if resolved.fit.free.e_x {
        init.e_x_ev = clamp(heuristic.e_x_ev, b.e_x_ev);
    }
    if resolved.fit.free.rabi {
        init.rabi_ev = clamp(heuristic.rabi_ev, b.rabi_ev);
    }
    if resolved.fit.free.e0 {
        init.e0_ev = clamp(heuristic.e0_ev, b.e0_ev);
    }
    if resolved.fit.free.n_eff {
        init.n_eff = clamp(heuristic.n_eff, b.n_eff);
    }
    Ok(init)
}

pub struct FitOutput {
    pub result: FitResult,
    pub report: Report,
}

/// Fits the dataset with the configured model and assembles the report
/// around the fitted parameters.
pub fn run_fit(cfg: &RunConfig, dataset: &PeakDataset, source: &Path) -> Result<FitOutput> {
    let resolved = cfg.resolve()?;
    let init = clamped_init(dataset, &resolved)?;
    let result = fit_dispersion(dataset, &init, &resolved.fit)?;

    let coupling = result.params.coupling()?;
    let cavity = result.params.cavity()?;
    let (n_lp, n_up) = dataset.observation_counts();
    let fit_block = FitBlock {
        source: source.display().to_string(),
        n_rows: dataset.rows().len(),
        n_lp_observations: n_lp,
        n_up_observations: n_up,
        rms_ev: sig10(result.rms_ev),
        max_abs_residual_ev: sig10(
            result
                .residuals
                .iter()
                .fold(0.0f64, |acc, r| acc.max(r.abs())),
        ),
        converged: result.converged,
        iterations: result.iterations,
        restart_index: result.restart_index,
        free: cfg.fit.free.clone(),
    };
    let report = build_report(cfg, &resolved, &coupling, &cavity, Some(fit_block))?;
    Ok(FitOutput { result, report })
}

/// Report straight from the configured parameters, no fitting.
pub fn run_report(cfg: &RunConfig) -> Result<Report> {
    let resolved = cfg.resolve()?;
    build_report(cfg, &resolved, &resolved.coupling, &resolved.cavity, None)
}

/// Per-angle branch content table (probability normalization), full
/// Hamiltonian only.
pub fn fractions_csv(cfg: &RunConfig) -> Result<String> {
    let resolved = cfg.resolve()?;
    if resolved.fit.model == ModelKind::Quadratic {
        return Err(Error::InvalidInput(
            "fractions require the hopfield model; the quadratic model carries no amplitudes"
                .into(),
        ));
    }
    let mut out = String::from(
        "theta_deg,e_cav_ev,lp_ev,up_ev,lp_photon,lp_exciton,up_photon,up_exciton,gs_n_photon,gs_n_exciton\n",
    );
    for &theta in resolved.angle_grid.angles_deg() {
        let e_cav = resolved.cavity.cavity_energy(theta)?;
        let (energies, coeffs) = polariton::hopfield_at(e_cav, &resolved.coupling)?;
        let lp = coeffs.branch_fractions(polariton::Branch::Lower);
        let up = coeffs.branch_fractions(polariton::Branch::Upper);
        let gs = coeffs.ground_state_content();
        out.push_str(&format!(
            "{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
            theta,
            e_cav,
            energies.lp_ev(),
            energies.up_ev(),
            lp.photon,
            lp.exciton,
            up.photon,
            up.exciton,
            gs.n_photon,
            gs.n_exciton,
        ));
    }
    Ok(out)
}
