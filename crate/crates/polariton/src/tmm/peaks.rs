//! Peak extraction from spectra: local maxima with a prominence filter,
//! sub-grid refinement by 3-point parabolic interpolation, and a
//! half-prominence width estimate.

use super::Spectrum;

/// One extracted peak. `energy_ev` is parabola-refined; `height` is the
/// refined vertex value; `width_ev` is the full width at half prominence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub energy_ev: f64,
    pub height: f64,
    pub prominence: f64,
    pub width_ev: f64,
}

/// Peaks of `values` over the uniformly spaced `energy_ev` grid, sorted by
/// energy.
///
/// A sample qualifies when it strictly exceeds its left neighbor, is at
/// least its right neighbor (plateaus yield their first sample), dominates
/// every sample within `window` grid steps, and has prominence of at least
/// `min_prominence`. Prominence is measured against the higher of the two
/// valley minima separating the peak from the nearest higher terrain (or
/// the grid edge).
pub fn extract_peaks(
    energy_ev: &[f64],
    values: &[f64],
    min_prominence: f64,
    window: usize,
) -> Vec<Peak> {
    assert_eq!(
        energy_ev.len(),
        values.len(),
        "energy and value arrays must have equal length"
    );
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let step = energy_ev[1] - energy_ev[0];
    let mut peaks = Vec::new();

    'candidates: for i in 1..n - 1 {
        if !(values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(n - 1);
        for j in lo..=hi {
            if values[j] > values[i] {
                continue 'candidates;
            }
        }

        let prominence = prominence_at(values, i);
        if prominence < min_prominence {
            continue;
        }

        // parabolic refinement through the three samples around the maximum
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        let curv = a - 2.0 * b + c;
        let (energy, height) = if curv < 0.0 {
            let delta = (0.5 * (a - c) / curv).clamp(-1.0, 1.0);
            (energy_ev[i] + delta * step, b - 0.25 * (a - c) * delta)
        } else {
            (energy_ev[i], b)
        };

        let width_ev = half_prominence_width(energy_ev, values, i, prominence);
        peaks.push(Peak {
            energy_ev: energy,
            height,
            prominence,
            width_ev,
        });
    }
    peaks
}

/// Valley-walk prominence: descend on each side until terrain higher than
/// the peak appears (or the edge), track the minima, and measure against
/// the higher of the two.
fn prominence_at(values: &[f64], i: usize) -> f64 {
    let mut left_min = values[i];
    let mut j = i;
    while j > 0 && values[j - 1] <= values[i] {
        j -= 1;
        left_min = left_min.min(values[j]);
    }
    let mut right_min = values[i];
    let mut j = i;
    while j + 1 < values.len() && values[j + 1] <= values[i] {
        j += 1;
        right_min = right_min.min(values[j]);
    }
    values[i] - left_min.max(right_min)
}

fn half_prominence_width(energy_ev: &[f64], values: &[f64], i: usize, prominence: f64) -> f64 {
    let level = values[i] - 0.5 * prominence;
    let cross = |from: usize, dir: isize| -> Option<f64> {
        let mut j = from as isize;
        loop {
            let next = j + dir;
            if next < 0 || next as usize >= values.len() {
                return None;
            }
            if values[next as usize] < level {
                // linear interpolation between j and next
                let (e0, v0) = (energy_ev[j as usize], values[j as usize]);
                let (e1, v1) = (energy_ev[next as usize], values[next as usize]);
                return Some(e0 + (level - v0) / (v1 - v0) * (e1 - e0));
            }
            j = next;
        }
    };
    let left = cross(i, -1);
    let right = cross(i, 1);
    let step = energy_ev[1] - energy_ev[0];
    match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (energy_ev[i] - l),
        (None, Some(r)) => 2.0 * (r - energy_ev[i]),
        (None, None) => step,
    }
}

impl Spectrum {
    /// Peaks of the transmission channel.
    pub fn transmission_peaks(&self, min_prominence: f64, window: usize) -> Vec<Peak> {
        extract_peaks(&self.energy_ev, &self.transmission, min_prominence, window)
    }
}
