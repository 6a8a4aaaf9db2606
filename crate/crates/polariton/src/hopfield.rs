//! Polariton branch energies, Bogoliubov (Hopfield) coefficients, and
//! ground-state virtual content for one cavity mode coupled to one exciton
//! resonance.
//!
//! Two dispersion models are exposed. [`ModelKind::Quadratic`] solves the
//! two-oscillator secular equation
//!
//! ```text
//! E^4 - E^2 (E_cav^2 + E_x^2) + E_cav^2 E_x^2 - rabi^2 E_cav^2 = 0
//! ```
//!
//! [`ModelKind::FullHopfield`] keeps the anti-resonant and diamagnetic terms
//! with coupling g = rabi/2 and diamagnetic coefficient D = g^2/E_x, giving
//!
//! ```text
//! E^4 - E^2 (E_cav^2 + E_x^2 + rabi^2 E_cav/E_x) + E_cav^2 E_x^2 = 0
//! ```
//!
//! The two conventions agree in the weak-coupling limit but differ at the
//! coupling strengths handled here; both stay available and every consumer
//! states which one it uses. At zero detuning the full model reduces exactly
//! to `up/lp = sqrt(E_x^2 + (rabi/2)^2) +/- rabi/2`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative splitting below which branch labeling is refused.
const DEGENERACY_TOL_EV: f64 = 1e-12;

/// Dispersion model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Two-oscillator model without anti-resonant or diamagnetic terms.
    Quadratic,
    /// Bogoliubov problem with anti-resonant and diamagnetic terms.
    FullHopfield,
}

/// Exciton energy and Rabi splitting, in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    e_x_ev: f64,
    rabi_ev: f64,
}

impl CouplingParams {
    /// `rabi_ev` may be zero (uncoupled limit) but must stay below `2 e_x`
    /// so the lower branch keeps positive energy.
    pub fn new(e_x_ev: f64, rabi_ev: f64) -> Result<Self> {
        if !e_x_ev.is_finite() || e_x_ev <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "exciton energy must be positive and finite, got {e_x_ev}"
            )));
        }
        if !rabi_ev.is_finite() || rabi_ev < 0.0 {
            return Err(Error::InvalidInput(format!(
                "rabi splitting must be non-negative and finite, got {rabi_ev}"
            )));
        }
        if rabi_ev >= 2.0 * e_x_ev {
            return Err(Error::InvalidInput(format!(
                "rabi splitting {rabi_ev} eV must be below 2 e_x = {} eV",
                2.0 * e_x_ev
            )));
        }
        Ok(Self { e_x_ev, rabi_ev })
    }

    pub fn e_x_ev(&self) -> f64 {
        self.e_x_ev
    }

    pub fn rabi_ev(&self) -> f64 {
        self.rabi_ev
    }

    /// Normalized coupling eta = rabi / (2 e_x).
    pub fn normalized_coupling(&self) -> f64 {
        self.rabi_ev / (2.0 * self.e_x_ev)
    }

    /// Branch energies at zero detuning (cavity tuned to the exciton):
    /// `sqrt(e_x^2 + (rabi/2)^2) +/- rabi/2`. Satisfies `up - lp = rabi`
    /// and `up * lp = e_x^2` identically.
    pub fn resonance_energies(&self) -> BranchEnergies {
        let half = 0.5 * self.rabi_ev;
        let center = (self.e_x_ev * self.e_x_ev + half * half).sqrt();
        BranchEnergies {
            lp_ev: center - half,
            up_ev: center + half,
        }
    }

    /// Small-coupling polariton gap estimate rabi^2 / (2 e_x).
    pub fn polariton_gap_formula(&self) -> f64 {
        self.rabi_ev * self.rabi_ev / (2.0 * self.e_x_ev)
    }

    /// Gap between the branch asymptotes of the quadratic model:
    /// `e_x - sqrt(e_x^2 - rabi^2)` (upper-branch floor at e_x, lower-branch
    /// ceiling at the large-detuning limit). Undefined for rabi >= e_x.
    pub fn polariton_gap_asymptotic(&self) -> Result<f64> {
        if self.rabi_ev >= self.e_x_ev {
            return Err(Error::GapUndefined {
                rabi_ev: self.rabi_ev,
                e_x_ev: self.e_x_ev,
            });
        }
        let ex2 = self.e_x_ev * self.e_x_ev;
        Ok(self.e_x_ev - (ex2 - self.rabi_ev * self.rabi_ev).sqrt())
    }
}

/// Lower and upper polariton energies in eV. Invariant: 0 < lp <= up
/// (equality only in the uncoupled degenerate limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEnergies {
    lp_ev: f64,
    up_ev: f64,
}

impl BranchEnergies {
    pub fn new(lp_ev: f64, up_ev: f64) -> Result<Self> {
        if !(lp_ev.is_finite() && up_ev.is_finite()) || lp_ev <= 0.0 || up_ev < lp_ev {
            return Err(Error::InvalidInput(format!(
                "branch energies must satisfy 0 < lp <= up, got lp = {lp_ev}, up = {up_ev}"
            )));
        }
        Ok(Self { lp_ev, up_ev })
    }

    pub fn lp_ev(&self) -> f64 {
        self.lp_ev
    }

    pub fn up_ev(&self) -> f64 {
        self.up_ev
    }

    pub fn splitting_ev(&self) -> f64 {
        self.up_ev - self.lp_ev
    }
}

/// Roots of the two-oscillator secular equation at the given cavity energy.
///
/// The root product is `e_cav^2 (e_x^2 - rabi^2)`, which turns negative for
/// rabi >= e_x: the lower branch then has no positive energy and the call
/// fails.
pub fn solve_quadratic_dispersion(e_cav_ev: f64, p: &CouplingParams) -> Result<BranchEnergies> {
    check_cavity_energy(e_cav_ev)?;
    let ec2 = e_cav_ev * e_cav_ev;
    let ex2 = p.e_x_ev * p.e_x_ev;
    let r2 = p.rabi_ev * p.rabi_ev;
    let sum = ec2 + ex2;
    // discriminant (ec2 - ex2)^2 + 4 r2 ec2 is non-negative for all inputs
    let disc = (ec2 - ex2) * (ec2 - ex2) + 4.0 * r2 * ec2;
    let d = disc.max(0.0).sqrt();
    let prod = ec2 * (ex2 - r2);
    if prod <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "quadratic model has no positive lower branch for rabi = {} >= e_x = {}",
            p.rabi_ev, p.e_x_ev
        )));
    }
    let up2 = 0.5 * (sum + d);
    // lp^2 = prod / up^2, written to avoid cancellation in sum - d
    let lp2 = 2.0 * prod / (sum + d);
    BranchEnergies::new(lp2.sqrt(), up2.sqrt())
}

/// Closed-form positive eigenvalues of the full Bogoliubov problem at the
/// given cavity energy. Equals [`diagonalize_hopfield`] output to solver
/// precision; kept as an independent route for cross-checking.
pub fn full_hopfield_energies(e_cav_ev: f64, p: &CouplingParams) -> Result<BranchEnergies> {
    check_cavity_energy(e_cav_ev)?;
    let ec2 = e_cav_ev * e_cav_ev;
    let ex2 = p.e_x_ev * p.e_x_ev;
    let r2 = p.rabi_ev * p.rabi_ev;
    let sum = ec2 + ex2 + r2 * e_cav_ev / p.e_x_ev;
    let prod = ec2 * ex2;
    // sum^2 - 4 prod >= 0 by AM-GM (sum >= ec^2 + ex^2 >= 2 ec ex); clamp rounding
    let d = (sum * sum - 4.0 * prod).max(0.0).sqrt();
    let up2 = 0.5 * (sum + d);
    let lp2 = 2.0 * prod / (sum + d);
    BranchEnergies::new(lp2.sqrt(), up2.sqrt())
}

/// Branch energies under the selected model.
pub fn branch_energies(
    e_cav_ev: f64,
    p: &CouplingParams,
    kind: ModelKind,
) -> Result<BranchEnergies> {
    match kind {
        ModelKind::Quadratic => solve_quadratic_dispersion(e_cav_ev, p),
        ModelKind::FullHopfield => full_hopfield_energies(e_cav_ev, p),
    }
}

pub type HopfieldMatrix = Matrix4<Complex64>;

/// Dynamical matrix of the Bogoliubov problem in the operator basis
/// (photon, exciton, photon-conjugate, exciton-conjugate), with g = rabi/2
/// and diamagnetic coefficient D = g^2/e_x. Eigenvalues come in +/- pairs;
/// the two positive ones are the branch energies.
pub fn build_hopfield_matrix(e_cav_ev: f64, p: &CouplingParams) -> Result<HopfieldMatrix> {
    check_cavity_energy(e_cav_ev)?;
    let g = 0.5 * p.rabi_ev;
    let dd = g * g / p.e_x_ev;
    let ec = e_cav_ev;
    let ex = p.e_x_ev;
    let r = |x: f64| Complex64::new(x, 0.0);
    Ok(HopfieldMatrix::from_rows(&[
        [r(ec + 2.0 * dd), r(g), r(-2.0 * dd), r(-g)].into(),
        [r(g), r(ex), r(-g), r(0.0)].into(),
        [r(2.0 * dd), r(g), r(-ec - 2.0 * dd), r(-g)].into(),
        [r(g), r(0.0), r(-g), r(-ex)].into(),
    ]))
}

/// Positive-frequency eigenvalues and Bogoliubov-normalized eigenvectors of
/// a dynamical matrix built by [`build_hopfield_matrix`].
///
/// Eigenvalues come from a real Schur decomposition (independent of the
/// closed form in [`full_hopfield_energies`]); eigenvectors from the
/// singular-vector null space of `M - lambda I`, normalized to Bogoliubov
/// norm +1 with the phase fixed so the photon amplitude is real and
/// non-negative (exciton amplitude decides when the photon one vanishes).
pub fn diagonalize_hopfield(m: &HopfieldMatrix) -> Result<(BranchEnergies, HopfieldCoefficients)> {
    let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let im_max = m.iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()));
    if im_max > 1e-9 * (1.0 + scale) {
        return Err(Error::Eigensolver(
            "dynamical matrix has non-real entries".into(),
        ));
    }
    let mr = m.map(|z| z.re);

    let schur = nalgebra::linalg::Schur::try_new(mr, 1e-13, 10_000)
        .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))?;
    let eigs = schur.complex_eigenvalues();
    let mut positive: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + scale) && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    if positive.len() != 2 {
        return Err(Error::Eigensolver(format!(
            "expected two positive real eigenvalues, found {}",
            positive.len()
        )));
    }
    positive.sort_by(f64::total_cmp);
    let (lp, up) = (positive[0], positive[1]);
    if up - lp < DEGENERACY_TOL_EV * (1.0 + up) {
        return Err(Error::DegenerateBranches {
            splitting_ev: up - lp,
        });
    }

    let lp_amp = eigenvector(&mr, lp)?;
    let up_amp = eigenvector(&mr, up)?;
    Ok((
        BranchEnergies::new(lp, up)?,
        HopfieldCoefficients::from_amplitudes(lp_amp, up_amp)?,
    ))
}

/// Convenience: build and diagonalize in one step.
pub fn hopfield_at(
    e_cav_ev: f64,
    p: &CouplingParams,
) -> Result<(BranchEnergies, HopfieldCoefficients)> {
    diagonalize_hopfield(&build_hopfield_matrix(e_cav_ev, p)?)
}

fn eigenvector(m: &Matrix4<f64>, lambda: f64) -> Result<BogoliubovAmplitudes> {
    let shifted = m - Matrix4::identity() * lambda;
    let svd = shifted
        .try_svd(false, true, 1e-14, 10_000)
        .ok_or_else(|| Error::Eigensolver("SVD did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Eigensolver("SVD produced no right singular vectors".into()))?;
    let mut min_idx = 0;
    for i in 1..4 {
        if svd.singular_values[i] < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let v: Vector4<f64> = v_t.row(min_idx).transpose();

    let nu = v[0] * v[0] + v[1] * v[1] - v[2] * v[2] - v[3] * v[3];
    if nu.abs() < 1e-9 {
        return Err(Error::Eigensolver(
            "eigenvector has vanishing Bogoliubov norm".into(),
        ));
    }
    if nu < 0.0 {
        // negative-norm partners belong to the negated eigenvalues
        return Err(Error::Eigensolver(
            "eigenvector carries negative Bogoliubov norm".into(),
        ));
    }
    let mut v = v / nu.sqrt();
    let sign = if v[0].abs() > 1e-12 {
        v[0].signum()
    } else {
        v[1].signum()
    };
    v *= sign;
    BogoliubovAmplitudes::new(
        Complex64::new(v[0], 0.0),
        Complex64::new(v[1], 0.0),
        Complex64::new(v[2], 0.0),
        Complex64::new(v[3], 0.0),
    )
}

/// Bogoliubov amplitudes (x, z, y, w) of one branch: photon, exciton,
/// anti-resonant photon, anti-resonant exciton.
/// Invariant: |x|^2 + |z|^2 - |y|^2 - |w|^2 = 1.
#[derive(Debug, Clone, Copy)]
pub struct BogoliubovAmplitudes {
    photon: Complex64,
    exciton: Complex64,
    anti_photon: Complex64,
    anti_exciton: Complex64,
}

impl BogoliubovAmplitudes {
    pub fn new(
        photon: Complex64,
        exciton: Complex64,
        anti_photon: Complex64,
        anti_exciton: Complex64,
    ) -> Result<Self> {
        let amps = Self {
            photon,
            exciton,
            anti_photon,
            anti_exciton,
        };
        let nu = amps.bogoliubov_norm();
        if !nu.is_finite() || (nu - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "Bogoliubov norm must be 1, got {nu}"
            )));
        }
        Ok(amps)
    }

    pub fn photon(&self) -> Complex64 {
        self.photon
    }

    pub fn exciton(&self) -> Complex64 {
        self.exciton
    }

    pub fn anti_photon(&self) -> Complex64 {
        self.anti_photon
    }

    pub fn anti_exciton(&self) -> Complex64 {
        self.anti_exciton
    }

    /// |x|^2 + |z|^2 - |y|^2 - |w|^2.
    pub fn bogoliubov_norm(&self) -> f64 {
        self.photon.norm_sqr() + self.exciton.norm_sqr()
            - self.anti_photon.norm_sqr()
            - self.anti_exciton.norm_sqr()
    }
}

/// Polariton branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Lower,
    Upper,
}

/// Normalization scheme for photon/exciton fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionNorm {
    /// Weights |x|^2, |z|^2, |y|^2, |w|^2 divided by their sum, so the
    /// fractions land in [0, 1] and add to 1. Default.
    Probability,
    /// Signed weights |x|^2 - |y|^2 and |z|^2 - |w|^2; also adds to 1 but
    /// individual terms may exceed 1 in extreme coupling.
    Bogoliubov,
}

/// Photon/exciton composition of one branch; adds to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFractions {
    pub photon: f64,
    pub exciton: f64,
}

/// Virtual photon/exciton population of the Bogoliubov ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateContent {
    pub n_photon: f64,
    pub n_exciton: f64,
}

/// Amplitudes of both branches of one diagonalization.
#[derive(Debug, Clone, Copy)]
pub struct HopfieldCoefficients {
    lp: BogoliubovAmplitudes,
    up: BogoliubovAmplitudes,
}

impl HopfieldCoefficients {
    pub fn from_amplitudes(lp: BogoliubovAmplitudes, up: BogoliubovAmplitudes) -> Result<Self> {
        Ok(Self { lp, up })
    }

    pub fn branch(&self, branch: Branch) -> &BogoliubovAmplitudes {
        match branch {
            Branch::Lower => &self.lp,
            Branch::Upper => &self.up,
        }
    }

    /// Probability-normalized fractions (see [`FractionNorm`]).
    pub fn branch_fractions(&self, branch: Branch) -> BranchFractions {
        self.branch_fractions_with_norm(branch, FractionNorm::Probability)
    }

    pub fn branch_fractions_with_norm(
        &self,
        branch: Branch,
        norm: FractionNorm,
    ) -> BranchFractions {
        let a = self.branch(branch);
        let (xp, ze, yp, we) = (
            a.photon.norm_sqr(),
            a.exciton.norm_sqr(),
            a.anti_photon.norm_sqr(),
            a.anti_exciton.norm_sqr(),
        );
        match norm {
            FractionNorm::Probability => {
                let total = xp + ze + yp + we;
                BranchFractions {
                    photon: (xp + yp) / total,
                    exciton: (ze + we) / total,
                }
            }
            FractionNorm::Bogoliubov => BranchFractions {
                photon: xp - yp,
                exciton: ze - we,
            },
        }
    }

    /// Ground-state virtual populations: n_photon = |y_lp|^2 + |y_up|^2,
    /// n_exciton = |w_lp|^2 + |w_up|^2.
    pub fn ground_state_content(&self) -> GroundStateContent {
        GroundStateContent {
            n_photon: self.lp.anti_photon.norm_sqr() + self.up.anti_photon.norm_sqr(),
            n_exciton: self.lp.anti_exciton.norm_sqr() + self.up.anti_exciton.norm_sqr(),
        }
    }
}

/// Cavity energy whose lower branch matches `lp_target_ev` under the given
/// model. The lower branch is strictly increasing in cavity energy, so
/// bisection applies; targets at or above the model's lower-branch supremum
/// (e_x for the full model, sqrt(e_x^2 - rabi^2) for the quadratic one) are
/// rejected.
pub fn solve_cavity_energy_for_lp(
    p: &CouplingParams,
    lp_target_ev: f64,
    kind: ModelKind,
) -> Result<f64> {
    if !lp_target_ev.is_finite() || lp_target_ev <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "lower-branch target must be positive and finite, got {lp_target_ev}"
        )));
    }
    let ex2 = p.e_x_ev * p.e_x_ev;
    let sup = match kind {
        ModelKind::FullHopfield => p.e_x_ev,
        ModelKind::Quadratic => (ex2 - p.rabi_ev * p.rabi_ev).max(0.0).sqrt(),
    };
    if lp_target_ev >= sup {
        return Err(Error::InvalidInput(format!(
            "lower-branch target {lp_target_ev} eV is not below the branch supremum {sup} eV"
        )));
    }

    let lp_at = |e_cav: f64| branch_energies(e_cav, p, kind).map(|b| b.lp_ev());
    let mut lo = 1e-6;
    let mut hi = p.e_x_ev.max(lp_target_ev);
    let mut guard = 0;
    while lp_at(hi)? < lp_target_ev {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Bracket(format!(
                "no cavity energy below {hi} eV reaches lower branch {lp_target_ev} eV"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lp_at(mid)? < lp_target_ev {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_cavity_energy(e_cav_ev: f64) -> Result<()> {
    if !e_cav_ev.is_finite() || e_cav_ev <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "cavity energy must be positive and finite, got {e_cav_ev}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> CouplingParams {
        CouplingParams::new(1.22, 0.50).unwrap()
    }

    #[test]
    fn coupling_params_validation() {
        assert!(CouplingParams::new(0.0, 0.1).is_err());
        assert!(CouplingParams::new(-1.0, 0.1).is_err());
        assert!(CouplingParams::new(1.0, -0.1).is_err());
        assert!(CouplingParams::new(1.0, 2.0).is_err());
        assert!(CouplingParams::new(1.0, f64::NAN).is_err());
        assert!(CouplingParams::new(1.0, 0.0).is_ok());
        assert!(CouplingParams::new(1.0, 1.5).is_ok());
    }

    #[test]
    fn normalized_coupling_examples() {
        assert_relative_eq!(
            params().normalized_coupling(),
            0.2049180327868853,
            max_relative = 1e-12
        );
        assert_eq!(
            CouplingParams::new(1.22, 0.0)
                .unwrap()
                .normalized_coupling(),
            0.0
        );
        assert_relative_eq!(
            CouplingParams::new(2.0, 0.8).unwrap().normalized_coupling(),
            0.2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn resonance_energies_frozen() {
        // oracle: sqrt(1.22^2 + 0.25^2) -/+ 0.25 evaluated in extended precision
        let b = params().resonance_energies();
        assert_relative_eq!(b.lp_ev(), 0.995351356043747, max_relative = 1e-14);
        assert_relative_eq!(b.up_ev(), 1.495351356043747, max_relative = 1e-14);
        // the quoted four-digit values
        assert_eq!((b.lp_ev() * 1e4).round() / 1e4, 0.9954);
        assert_eq!((b.up_ev() * 1e4).round() / 1e4, 1.4954);
    }

    #[test]
    fn resonance_identities() {
        for (ex, rabi) in [(1.22, 0.5), (2.0, 0.8), (0.7, 0.01), (1.0, 1.3)] {
            let p = CouplingParams::new(ex, rabi).unwrap();
            let b = p.resonance_energies();
            assert_relative_eq!(b.splitting_ev(), rabi, max_relative = 1e-12);
            assert_relative_eq!(b.lp_ev() * b.up_ev(), ex * ex, max_relative = 1e-12);
        }
        let b = CouplingParams::new(1.22, 0.0).unwrap().resonance_energies();
        assert_eq!(b.lp_ev(), 1.22);
        assert_eq!(b.up_ev(), 1.22);
    }

    #[test]
    fn gap_values_frozen() {
        // oracles: 0.25/2.44 and 1.22 - sqrt(1.2384), extended precision
        let p = params();
        assert_relative_eq!(
            p.polariton_gap_formula(),
            0.1024590163934426,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            p.polariton_gap_asymptotic().unwrap(),
            0.1071657805405155,
            max_relative = 1e-13
        );
        let uncoupled = CouplingParams::new(1.22, 0.0).unwrap();
        assert_eq!(uncoupled.polariton_gap_formula(), 0.0);
        assert_eq!(uncoupled.polariton_gap_asymptotic().unwrap(), 0.0);
        assert!(matches!(
            CouplingParams::new(1.0, 1.2)
                .unwrap()
                .polariton_gap_asymptotic(),
            Err(Error::GapUndefined { .. })
        ));
    }

    #[test]
    fn relative_gap_is_two_eta_squared() {
        for (ex, rabi) in [(1.22, 0.5), (2.0, 0.3), (0.9, 0.7)] {
            let p = CouplingParams::new(ex, rabi).unwrap();
            let eta = p.normalized_coupling();
            assert_relative_eq!(
                p.polariton_gap_formula() / ex,
                2.0 * eta * eta,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn gap_asymptotic_dominates_formula() {
        // sqrt(1-x) <= 1 - x/2 makes the asymptotic gap the larger of the two
        for i in 1..40 {
            let eta = i as f64 * 0.01;
            let p = CouplingParams::new(1.3, 2.0 * 1.3 * eta).unwrap();
            assert!(p.polariton_gap_asymptotic().unwrap() >= p.polariton_gap_formula());
        }
    }

    #[test]
    fn gap_asymptotic_matches_extreme_detuning_limits() {
        // evaluating the quadratic model at e_cav = 1e3 and 1e-3 eV brackets the gap
        let p = params();
        let lo = solve_quadratic_dispersion(1e3, &p).unwrap();
        let hi = solve_quadratic_dispersion(1e-3, &p).unwrap();
        let gap = hi.up_ev() - lo.lp_ev();
        assert_relative_eq!(
            gap,
            p.polariton_gap_asymptotic().unwrap(),
            max_relative = 1e-4
        );
    }

    #[test]
    fn quadratic_resonance_frozen() {
        // oracle: E^2 = e_x^2 +/- rabi e_x at zero detuning, extended precision
        let b = solve_quadratic_dispersion(1.22, &params()).unwrap();
        assert_relative_eq!(b.lp_ev(), 0.9372299611087985, max_relative = 1e-13);
        assert_relative_eq!(b.up_ev(), 1.448585516978546, max_relative = 1e-13);
        let ex2 = 1.22 * 1.22;
        assert_relative_eq!(
            b.lp_ev() * b.lp_ev(),
            ex2 - 0.5 * 1.22,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            b.up_ev() * b.up_ev(),
            ex2 + 0.5 * 1.22,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quadratic_uncoupled_returns_bare_energies() {
        let p = CouplingParams::new(1.22, 0.0).unwrap();
        let b = solve_quadratic_dispersion(1.0, &p).unwrap();
        assert_relative_eq!(b.lp_ev(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(b.up_ev(), 1.22, max_relative = 1e-14);
    }

    #[test]
    fn quadratic_large_detuning_asymptote() {
        let p = params();
        let asymptote = 1.112834219459484; // sqrt(1.22^2 - 0.5^2)
        let b = solve_quadratic_dispersion(3.0, &p).unwrap();
        assert!(b.lp_ev() < asymptote);
        assert!(asymptote - b.lp_ev() < 0.02);
        let far = solve_quadratic_dispersion(122.0, &p).unwrap();
        assert_relative_eq!(far.lp_ev(), 1.11282487290617, max_relative = 1e-12);
        assert!(far.lp_ev() < asymptote);
        assert!(far.lp_ev() > b.lp_ev()); // climbs toward the limit from below
        assert!((far.lp_ev() - asymptote).abs() < 1e-3);
    }

    #[test]
    fn quadratic_rejects_rabi_at_or_above_e_x() {
        // the root product e_cav^2 (e_x^2 - rabi^2) turns non-positive there
        let p = CouplingParams::new(1.0, 1.2).unwrap();
        assert!(solve_quadratic_dispersion(1.0, &p).is_err());
        let p = CouplingParams::new(1.0, 1.0).unwrap();
        assert!(solve_quadratic_dispersion(0.7, &p).is_err());
    }

    #[test]
    fn full_hopfield_resonance_matches_closed_form() {
        let b = full_hopfield_energies(1.22, &params()).unwrap();
        let r = params().resonance_energies();
        assert_relative_eq!(b.lp_ev(), r.lp_ev(), max_relative = 1e-13);
        assert_relative_eq!(b.up_ev(), r.up_ev(), max_relative = 1e-13);
    }

    #[test]
    fn matrix_entries_frozen() {
        let p = params();
        let m = build_hopfield_matrix(1.0, &p).unwrap();
        let g = 0.25;
        let dd = g * g / 1.22;
        let expect = [
            [1.0 + 2.0 * dd, g, -2.0 * dd, -g],
            [g, 1.22, -g, 0.0],
            [2.0 * dd, g, -1.0 - 2.0 * dd, -g],
            [g, 0.0, -g, -1.22],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)].re, expect[i][j]);
                assert_eq!(m[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn matrix_eigenvalues_come_in_pairs() {
        let m = build_hopfield_matrix(0.9, &params()).unwrap();
        let (b, _) = diagonalize_hopfield(&m).unwrap();
        let mr = m.map(|z| z.re);
        let eigs = nalgebra::linalg::Schur::new(mr).complex_eigenvalues();
        let mut all: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        all.sort_by(f64::total_cmp);
        assert_relative_eq!(all[0], -b.up_ev(), max_relative = 1e-9);
        assert_relative_eq!(all[1], -b.lp_ev(), max_relative = 1e-9);
        assert_relative_eq!(all[2], b.lp_ev(), max_relative = 1e-9);
        assert_relative_eq!(all[3], b.up_ev(), max_relative = 1e-9);
    }

    #[test]
    fn matrix_uncoupled_eigenvalues() {
        let p = CouplingParams::new(1.22, 0.0).unwrap();
        let m = build_hopfield_matrix(0.8, &p).unwrap();
        let mr = m.map(|z| z.re);
        let mut eigs: Vec<f64> = nalgebra::linalg::Schur::new(mr)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .collect();
        eigs.sort_by(f64::total_cmp);
        for (got, want) in eigs.iter().zip([-1.22, -0.8, 0.8, 1.22]) {
            assert_relative_eq!(*got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn diagonalize_matches_closed_form_across_detuning() {
        let p = params();
        for e_cav in [0.3, 0.8, 1.0, 1.22, 1.5, 2.5, 10.0] {
            let closed = full_hopfield_energies(e_cav, &p).unwrap();
            let (b, _) = hopfield_at(e_cav, &p).unwrap();
            assert_relative_eq!(b.lp_ev(), closed.lp_ev(), max_relative = 1e-9);
            assert_relative_eq!(b.up_ev(), closed.up_ev(), max_relative = 1e-9);
        }
    }

    #[test]
    fn diagonalize_norms_and_phases() {
        let (_, c) = hopfield_at(1.0, &params()).unwrap();
        for branch in [Branch::Lower, Branch::Upper] {
            let a = c.branch(branch);
            assert_relative_eq!(a.bogoliubov_norm(), 1.0, max_relative = 1e-9);
            assert!(a.photon.re >= 0.0);
            assert_eq!(a.photon.im, 0.0);
        }
    }

    #[test]
    fn diagonalize_uncoupled_limit_is_pure_photon() {
        let p = CouplingParams::new(1.22, 1e-6).unwrap();
        let (_, c) = hopfield_at(0.9, &p).unwrap();
        let f = c.branch_fractions(Branch::Lower);
        assert!(f.photon > 1.0 - 1e-6);
        assert!(f.exciton < 1e-6);
    }

    #[test]
    fn diagonalize_rejects_degenerate_branches() {
        let p = CouplingParams::new(1.22, 0.0).unwrap();
        let m = build_hopfield_matrix(1.22, &p).unwrap();
        assert!(matches!(
            diagonalize_hopfield(&m),
            Err(Error::DegenerateBranches { .. })
        ));
    }

    #[test]
    fn lower_branch_is_matter_like_at_resonance() {
        let (_, c) = hopfield_at(1.22, &params()).unwrap();
        let a = c.branch(Branch::Lower);
        assert!(a.exciton.norm_sqr() > a.photon.norm_sqr());
        // frozen probability-normalized exciton fraction at zero detuning
        let f = c.branch_fractions(Branch::Lower);
        assert_relative_eq!(f.exciton, 0.6003732797120819, max_relative = 1e-9);
    }

    #[test]
    fn fractions_sum_to_one_and_equal_at_weak_resonance() {
        let p = CouplingParams::new(1.22, 1e-4).unwrap();
        let (_, c) = hopfield_at(1.22, &p).unwrap();
        for branch in [Branch::Lower, Branch::Upper] {
            let f = c.branch_fractions(branch);
            assert_relative_eq!(f.photon + f.exciton, 1.0, max_relative = 1e-12);
            assert_relative_eq!(f.exciton, 0.5, epsilon = 1e-3);
        }
    }

    #[test]
    fn fractions_invariant_under_global_phase() {
        let (_, c) = hopfield_at(1.0, &params()).unwrap();
        let a = c.branch(Branch::Lower);
        let phase = Complex64::from_polar(1.0, 0.77);
        let rotated = BogoliubovAmplitudes::new(
            a.photon * phase,
            a.exciton * phase,
            a.anti_photon * phase,
            a.anti_exciton * phase,
        )
        .unwrap();
        let c2 = HopfieldCoefficients::from_amplitudes(rotated, *c.branch(Branch::Upper)).unwrap();
        let f1 = c.branch_fractions(Branch::Lower);
        let f2 = c2.branch_fractions(Branch::Lower);
        assert_relative_eq!(f1.exciton, f2.exciton, max_relative = 1e-12);
        for norm in [FractionNorm::Probability, FractionNorm::Bogoliubov] {
            let g1 = c.branch_fractions_with_norm(Branch::Lower, norm);
            let g2 = c2.branch_fractions_with_norm(Branch::Lower, norm);
            assert_relative_eq!(g1.photon, g2.photon, max_relative = 1e-12);
        }
    }

    #[test]
    fn operating_point_frozen_values() {
        // cavity energy solved so the lower branch sits at 1.02 eV
        let p = params();
        let e_cav = solve_cavity_energy_for_lp(&p, 1.02, ModelKind::FullHopfield).unwrap();
        assert_relative_eq!(e_cav, 1.285328448749425, max_relative = 1e-10);
        let (b, c) = hopfield_at(e_cav, &p).unwrap();
        assert_relative_eq!(b.lp_ev(), 1.02, max_relative = 1e-9);
        assert_relative_eq!(b.up_ev(), 1.537353634778723, max_relative = 1e-9);

        let f = c.branch_fractions(Branch::Lower);
        assert_relative_eq!(f.exciton, 0.6590232431367622, max_relative = 1e-8);
        let fb = c.branch_fractions_with_norm(Branch::Lower, FractionNorm::Bogoliubov);
        assert_relative_eq!(fb.exciton, 0.6613900448425167, max_relative = 1e-8);

        let gs = c.ground_state_content();
        assert_relative_eq!(gs.n_photon, 0.009860550703326455, max_relative = 1e-7);
        assert_relative_eq!(gs.n_exciton, 0.009860550703326455, max_relative = 1e-7);
    }

    #[test]
    fn ground_state_empty_without_coupling() {
        let p = CouplingParams::new(1.22, 1e-7).unwrap();
        let (_, c) = hopfield_at(0.9, &p).unwrap();
        let gs = c.ground_state_content();
        assert!(gs.n_photon < 1e-12);
        assert!(gs.n_exciton < 1e-12);
    }

    #[test]
    fn ground_state_content_decreases_toward_resonance() {
        // red-detuned cavity rising toward the exciton: both populations shrink
        let p = params();
        let mut prev: Option<GroundStateContent> = None;
        for i in 0..=40 {
            let e_cav = 0.70 + 0.013 * i as f64;
            let (_, c) = hopfield_at(e_cav, &p).unwrap();
            let gs = c.ground_state_content();
            if let Some(last) = prev {
                assert!(gs.n_photon < last.n_photon);
                assert!(gs.n_exciton < last.n_exciton);
            }
            prev = Some(gs);
        }
    }

    #[test]
    fn ground_state_scales_as_eta_squared() {
        for i in 1..=30 {
            let eta = 0.01 * i as f64;
            let ex = 1.22;
            let p = CouplingParams::new(ex, 2.0 * ex * eta).unwrap();
            let (_, c) = hopfield_at(ex, &p).unwrap();
            let ratio = c.ground_state_content().n_exciton / (eta * eta);
            assert!(ratio > 0.1 && ratio < 10.0, "eta={eta} ratio={ratio}");
        }
    }

    #[test]
    fn solve_cavity_energy_round_trip() {
        let p = params();
        for kind in [ModelKind::FullHopfield, ModelKind::Quadratic] {
            for target in [0.7, 0.9, 1.02, 1.1] {
                let e_cav = solve_cavity_energy_for_lp(&p, target, kind).unwrap();
                let b = branch_energies(e_cav, &p, kind).unwrap();
                assert_relative_eq!(b.lp_ev(), target, max_relative = 1e-10);
            }
        }
        // targets at or above the supremum are rejected
        assert!(solve_cavity_energy_for_lp(&p, 1.22, ModelKind::FullHopfield).is_err());
        assert!(solve_cavity_energy_for_lp(&p, 1.113, ModelKind::Quadratic).is_err());
    }

    #[test]
    fn anticrossing_minimum_near_e_x_for_weak_coupling() {
        let p = CouplingParams::new(1.22, 2.0 * 1.22 * 0.05).unwrap();
        let step = 0.01;
        let mut best = (f64::INFINITY, 0.0);
        let mut e_cav = 1.0;
        while e_cav <= 1.4 + 1e-9 {
            let b = solve_quadratic_dispersion(e_cav, &p).unwrap();
            if b.splitting_ev() < best.0 {
                best = (b.splitting_ev(), e_cav);
            }
            e_cav += step;
        }
        assert!((best.1 - 1.22).abs() <= step + 1e-9);
    }

    #[test]
    fn splitting_grows_away_from_its_minimum() {
        // scan log-spaced detunings, find the argmin, check monotone growth outward
        let p = params();
        for kind in [ModelKind::Quadratic, ModelKind::FullHopfield] {
            let points: Vec<(f64, f64)> = (0..=400)
                .map(|i| {
                    let e_cav = 0.2 * (10.0_f64).powf(i as f64 / 200.0); // 0.2..20
                    let b = branch_energies(e_cav, &p, kind).unwrap();
                    (e_cav, b.splitting_ev())
                })
                .collect();
            let argmin = points
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .unwrap()
                .0;
            for i in (argmin + 1)..points.len() {
                assert!(points[i].1 >= points[i - 1].1 - 1e-12);
            }
            for i in (1..=argmin).rev() {
                assert!(points[i - 1].1 >= points[i].1 - 1e-12);
            }
        }
    }
}
