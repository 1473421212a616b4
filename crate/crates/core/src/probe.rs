//! Weak measurement with a Gaussian pointer.
//!
//! The probe lives on a uniform momentum grid. Each momentum component `p`
//! rotates the system by `exp(-i G p A / hbar)`; post-selecting `psi_f`
//! multiplies the probe by `<psi_f|exp(-i G p A / hbar)|psi_i>`. The pointer
//! position is read from the momentum-space phase gradient,
//! `<x> = Re sum phi* (i hbar d/dp) phi dp`, which is how the closed-form
//! displacements `G <A>` and `G Re<A>_w` arise.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    evolve, expectation, theta2, weak_value, CouplingSpec, Observable, SELECTION_TOL,
};
use crate::state::{arg, inner_product, PureState};

pub const DEFAULT_GRID_POINTS: usize = 4096;
/// Grid half-width in units of `delta_p`.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
const MIN_HALF_WIDTH: f64 = 6.0;
const MAX_PHASE_STEP: f64 = FRAC_PI_4;

/// Gaussian pointer amplitude `phi(p) ~ exp(-(p - p_center)^2 / (4 delta_p^2))`
/// sampled on a uniform grid, so that `delta_p` is the standard deviation of
/// `|phi|^2`. Discretely normalized: `sum |phi|^2 dp = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProbe {
    p_grid: Vec<f64>,
    amplitudes: Vec<Complex64>,
    step: f64,
    delta_p: f64,
    p_center: f64,
}

impl GaussianProbe {
    /// Default grid: 4096 points over `p_center +/- 8 delta_p`.
    pub fn new(delta_p: f64) -> Result<Self> {
        Self::with_grid(delta_p, 0.0, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH)
    }

    pub fn with_grid(
        delta_p: f64,
        p_center: f64,
        n_points: usize,
        half_width: f64,
    ) -> Result<Self> {
        if !(delta_p.is_finite() && delta_p > 0.0) {
            return Err(Error::InvalidProbe(format!("delta_p must be positive, got {delta_p}")));
        }
        if !p_center.is_finite() {
            return Err(Error::NonFinite("probe centre"));
        }
        if !(half_width >= MIN_HALF_WIDTH && half_width.is_finite()) {
            return Err(Error::InvalidProbe(format!(
                "grid must span at least +/-{MIN_HALF_WIDTH} delta_p, got +/-{half_width}"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidProbe(format!("need at least 3 grid points, got {n_points}")));
        }
        let span = half_width * delta_p;
        let step = 2.0 * span / (n_points - 1) as f64;
        let p_grid: Vec<f64> = (0..n_points)
            .map(|k| p_center - span + step * k as f64)
            .collect();
        let raw: Vec<f64> = p_grid
            .iter()
            .map(|p| {
                let u = (p - p_center) / delta_p;
                (-0.25 * u * u).exp()
            })
            .collect();
        let norm = (raw.iter().map(|a| a * a).sum::<f64>() * step).sqrt();
        let amplitudes = raw.iter().map(|a| Complex64::new(a / norm, 0.0)).collect();
        Ok(Self {
            p_grid,
            amplitudes,
            step,
            delta_p,
            p_center,
        })
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn p_center(&self) -> f64 {
        self.p_center
    }

    pub fn len(&self) -> usize {
        self.p_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_grid.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        discrete_norm_sqr(&self.amplitudes, self.step)
    }
}

fn discrete_norm_sqr(amplitudes: &[Complex64], step: f64) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * step
}

/// `d/dp` by central differences, one-sided at the two ends.
fn derivative(values: &[Complex64], step: f64) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|k| match k {
            0 => (values[1] - values[0]) / step,
            k if k == n - 1 => (values[n - 1] - values[n - 2]) / step,
            k => (values[k + 1] - values[k - 1]) / (2.0 * step),
        })
        .collect()
}

/// `<x> = Re sum phi* (i hbar phi') dp / sum |phi|^2 dp`.
pub fn position_expectation(amplitudes: &[Complex64], step: f64, hbar: f64) -> f64 {
    let slope = derivative(amplitudes, step);
    let i_hbar = Complex64::new(0.0, hbar);
    let num: f64 = amplitudes
        .iter()
        .zip(&slope)
        .map(|(a, d)| (a.conj() * i_hbar * d).re)
        .sum();
    num / amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
}

/// One complete pre-selection / coupling / post-selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakScenario {
    pub psi_i: PureState,
    pub psi_f: PureState,
    pub observable: Observable,
    pub coupling: CouplingSpec,
    pub probe: GaussianProbe,
}

impl WeakScenario {
    pub fn new(
        psi_i: PureState,
        psi_f: PureState,
        observable: Observable,
        coupling: CouplingSpec,
        probe: GaussianProbe,
    ) -> Result<Self> {
        let overlap = inner_product(&psi_f, &psi_i).norm();
        if overlap < SELECTION_TOL {
            return Err(Error::OrthogonalSelection(overlap));
        }
        Ok(Self {
            psi_i,
            psi_f,
            observable,
            coupling,
            probe,
        })
    }

    /// Two-level example: `psi_i = |+>`, `psi_f = sin(theta)|+> + cos(theta)|->`,
    /// `A = |+><-| + |-><+|`. Weak value `1 / tan(theta)`.
    pub fn worked_example(theta: f64, coupling: CouplingSpec, probe: GaussianProbe) -> Result<Self> {
        Self::new(
            PureState::plus(),
            worked_example_post_selection(theta)?,
            Observable::sigma_x(),
            coupling,
            probe,
        )
    }

    pub fn weak_value(&self) -> Complex64 {
        weak_value(&self.observable, &self.psi_i, &self.psi_f)
            .expect("overlap checked at construction")
    }

    pub fn expectation(&self) -> f64 {
        expectation(&self.observable, &self.psi_i)
    }

    /// Post-selection amplitude `<psi_f|exp(-i G p A / hbar)|psi_i>`.
    pub fn filter(&self, p: f64) -> Complex64 {
        inner_product(&self.psi_f, &evolve(&self.observable, &self.coupling, p, &self.psi_i))
    }

    /// Unnormalized post-selected probe `phi_f(p) = filter(p) phi_i(p)`.
    pub fn post_selected_amplitudes(&self) -> Vec<Complex64> {
        self.probe
            .p_grid()
            .iter()
            .zip(self.probe.amplitudes())
            .map(|(&p, &a)| self.filter(p) * a)
            .collect()
    }

    /// Post-selected probe renormalized to unit discrete norm.
    pub fn conditioned_probe(&self) -> Result<Vec<Complex64>> {
        let raw = self.post_selected_amplitudes();
        let success = discrete_norm_sqr(&raw, self.probe.step()) / self.probe.norm_sqr();
        if success < 1e-12 {
            return Err(Error::PostSelectionVanished(success));
        }
        let norm = discrete_norm_sqr(&raw, self.probe.step()).sqrt();
        Ok(raw.into_iter().map(|a| a / norm).collect())
    }
}

/// `sin(theta)|+> + cos(theta)|->`.
pub fn worked_example_post_selection(theta: f64) -> Result<PureState> {
    PureState::real(theta.sin(), theta.cos())
}

/// Closed-form and simulated pointer readings for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerResult {
    pub dx_simulated: f64,
    pub dx_analytic: f64,
    /// Shift from the labelling alone, `G <A>`.
    pub dx1: f64,
    /// Shift added by the post-selection, `G (Re<A>_w - <A>)`.
    pub dx2: f64,
    pub success_probability: f64,
    pub weakness_ratio: f64,
}

pub fn displacement_labelled(s: &WeakScenario) -> f64 {
    s.coupling.g() * s.expectation()
}

pub fn displacement_postselected(s: &WeakScenario) -> f64 {
    s.coupling.g() * (s.weak_value().re - s.expectation())
}

/// `(delta_p / hbar) |G| |Re<A>_w|`; the linear regime needs this `<< 1`.
pub fn weakness_ratio(s: &WeakScenario) -> f64 {
    s.probe.delta_p() / s.coupling.hbar() * s.coupling.g().abs() * s.weak_value().re.abs()
}

/// Brute-force pointer simulation on the probe grid, with the closed forms
/// filled in alongside.
pub fn simulate_pointer(s: &WeakScenario) -> Result<PointerResult> {
    let step = s.probe.step();
    let raw = s.post_selected_amplitudes();
    let success_probability = discrete_norm_sqr(&raw, step) / s.probe.norm_sqr();
    if success_probability < 1e-12 {
        return Err(Error::PostSelectionVanished(success_probability));
    }
    for (k, pair) in raw.windows(2).enumerate() {
        let advance = arg(pair[1] * pair[0].conj()).abs();
        if advance > MAX_PHASE_STEP {
            return Err(Error::GridTooCoarse {
                advance,
                at: s.probe.p_grid()[k],
            });
        }
    }
    let dx_simulated = position_expectation(&raw, step, s.coupling.hbar());
    let dx1 = displacement_labelled(s);
    let dx2 = displacement_postselected(s);
    Ok(PointerResult {
        dx_simulated,
        dx_analytic: dx1 + dx2,
        dx1,
        dx2,
        success_probability,
        weakness_ratio: weakness_ratio(s),
    })
}

/// Exact post-selection phase at each requested momentum. Samples where a
/// bracket vanishes carry the error instead of a value.
pub fn theta2_profile(s: &WeakScenario, p_samples: &[f64]) -> Vec<(f64, Result<f64>)> {
    p_samples
        .iter()
        .map(|&p| (p, theta2(&s.observable, &s.coupling, &s.psi_i, &s.psi_f, p)))
        .collect()
}

/// `-arctan(tan(phi) / tan(theta))`, the post-selection phase of the
/// two-level example in closed form, valid for `|phi| < pi/2`.
pub fn worked_example_theta2(theta: f64, phi: f64) -> f64 {
    -(phi.tan() / theta.tan()).atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

    fn example(theta: f64, g: f64, delta_p: f64) -> WeakScenario {
        WeakScenario::worked_example(
            theta,
            CouplingSpec::natural(g).unwrap(),
            GaussianProbe::new(delta_p).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn probe_grid_invariants() {
        let probe = GaussianProbe::with_grid(0.3, 0.5, 1024, 8.0).unwrap();
        assert!((probe.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(probe.p_grid()[0] <= 0.5 - 6.0 * 0.3);
        assert!(*probe.p_grid().last().unwrap() >= 0.5 + 6.0 * 0.3);
        // Variance of |phi|^2 is delta_p^2.
        let var: f64 = probe
            .p_grid()
            .iter()
            .zip(probe.amplitudes())
            .map(|(p, a)| (p - 0.5).powi(2) * a.norm_sqr())
            .sum::<f64>()
            * probe.step();
        assert!((var.sqrt() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn probe_rejects_bad_input() {
        assert!(GaussianProbe::new(0.0).is_err());
        assert!(GaussianProbe::new(-1.0).is_err());
        assert!(GaussianProbe::with_grid(0.1, 0.0, 512, 5.0).is_err());
        assert!(GaussianProbe::with_grid(0.1, 0.0, 2, 8.0).is_err());
    }

    #[test]
    fn orthogonal_selection_rejected() {
        let r = WeakScenario::new(
            PureState::plus(),
            PureState::minus(),
            Observable::sigma_x(),
            CouplingSpec::natural(0.1).unwrap(),
            GaussianProbe::new(0.1).unwrap(),
        );
        assert!(matches!(r, Err(Error::OrthogonalSelection(_))));
    }

    #[test]
    fn labelled_displacements() {
        let s = example(FRAC_PI_8, 0.7, 0.1);
        assert_eq!(displacement_labelled(&s), 0.0);
        let mut s = example(FRAC_PI_8, 0.3, 0.1);
        s.observable = Observable::identity();
        assert!((displacement_labelled(&s) - 0.3).abs() < 1e-15);
        let mut s = example(FRAC_PI_8, 0.2, 0.1);
        s.observable = Observable::sigma_z();
        assert!((displacement_labelled(&s) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn postselected_displacements() {
        let s = example(FRAC_PI_8, 0.1, 0.1);
        // tan(pi/8) = sqrt(2) - 1
        assert!((displacement_postselected(&s) - 0.1 / (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!((displacement_postselected(&s) - 0.24142).abs() < 1e-5);
        let s = example(FRAC_PI_4, 0.1, 0.1);
        assert!((displacement_postselected(&s) - 0.1).abs() < 1e-15);
        let mut s = example(FRAC_PI_4, 0.1, 0.1);
        s.observable = Observable::from_pauli(0.2, 0.4, -0.3, 0.8);
        s.psi_f = s.psi_i;
        assert!(displacement_postselected(&s).abs() < 1e-15);
    }

    #[test]
    fn weakness_ratio_examples() {
        assert_eq!(weakness_ratio(&example(FRAC_PI_4, 0.0, 0.1)), 0.0);
        assert!((weakness_ratio(&example(FRAC_PI_4, 0.05, 0.1)) - 0.005).abs() < 1e-15);
        let theta = PI / 16.0;
        let r = weakness_ratio(&example(theta, 0.5, 0.4));
        // tan(pi/16) from the half-angle formula, independent of f64::tan.
        let t8 = 2f64.sqrt() - 1.0;
        let t16 = t8 / (1.0 + (1.0 + t8 * t8).sqrt());
        assert!((r - 0.2 / t16).abs() < 1e-12);
        assert!((r - 1.005).abs() < 1e-3);
    }

    #[test]
    fn no_interaction_leaves_pointer() {
        let s = example(0.4, 0.0, 0.2);
        let r = simulate_pointer(&s).unwrap();
        assert_eq!(r.dx_simulated, 0.0);
        assert!((r.success_probability - 0.4f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn weak_regime_tracks_real_weak_value() {
        let s = example(FRAC_PI_4, 0.05, 0.1);
        let r = simulate_pointer(&s).unwrap();
        assert!((r.weakness_ratio - 0.005).abs() < 1e-15);
        assert!((r.dx_simulated - 0.05).abs() < 0.01 * 0.05);
        assert_eq!(r.dx_analytic, r.dx1 + r.dx2);
    }

    #[test]
    fn strong_regime_undershoots() {
        // delta_p chosen so the weakness ratio is one.
        let theta = PI / 16.0;
        let g = 0.1;
        let s = example(theta, g, theta.tan() / g);
        let r = simulate_pointer(&s).unwrap();
        assert!((r.weakness_ratio - 1.0).abs() < 1e-12);
        assert!(r.dx_simulated.abs() < 0.9 * r.dx_analytic.abs());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let s = WeakScenario::worked_example(
            0.3,
            CouplingSpec::natural(20.0).unwrap(),
            GaussianProbe::with_grid(1.0, 0.0, 256, 8.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(simulate_pointer(&s), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn conditioned_probe_has_unit_norm() {
        let s = example(0.2, 0.3, 0.2);
        let phi = s.conditioned_probe().unwrap();
        assert!((discrete_norm_sqr(&phi, s.probe.step()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_matches_closed_form() {
        let s = example(FRAC_PI_4, 1.0, 0.1);
        let samples = [0.0, FRAC_PI_4, PI / 2.0];
        let profile = theta2_profile(&s, &samples);
        assert_eq!(*profile[0].1.as_ref().unwrap(), 0.0);
        assert!((profile[1].1.as_ref().unwrap() + FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(profile[2].1, Err(Error::DegenerateBracket { .. })));
        assert!((worked_example_theta2(FRAC_PI_4, FRAC_PI_4) + FRAC_PI_4).abs() < 1e-15);
    }
}
