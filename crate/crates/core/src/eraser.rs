//! Two-path quantum eraser with an internal (which-path labelling) degree of
//! freedom.
//!
//! Every detection pattern here has the form
//! `P(delta) = (N + 2 Re[X e^{-i delta}]) / 2`, where `N` is the total path
//! weight and `X` the fringe cross term of the stage. The constructive phase
//! is `arg X` and the visibility `2|X| / N`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{arg, inner_product, pancharatnam_phase, wrap_phase, PureState, DEGENERACY_TOL};

/// Path amplitudes `c1 |p1> + c2 |p2>`, normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    c1: Complex64,
    c2: Complex64,
}

impl PathState {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(Error::NonFinite("path amplitude"));
        }
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            c1: c1 / norm,
            c2: c2 / norm,
        })
    }

    /// Equal-weight, in-phase paths.
    pub fn balanced() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            c1: Complex64::new(h, 0.0),
            c2: Complex64::new(h, 0.0),
        }
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn c2(&self) -> Complex64 {
        self.c2
    }
}

/// Stage of the eraser experiment at which the fringe pattern is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Bare path state, internal state untouched.
    Initial,
    /// After the internal state has been split into `psi_m1` / `psi_m2`.
    Labelled,
    /// After additionally projecting the internal state onto `psi_f`.
    PostSelected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EraserScenario {
    pub path: PathState,
    pub psi_i: PureState,
    pub psi_m1: PureState,
    pub psi_m2: PureState,
    pub psi_f: Option<PureState>,
}

impl EraserScenario {
    /// Orthogonal labels are accepted: that is the full which-path limit,
    /// and the phase routines report `ZeroVisibility` for it.
    pub fn new(
        path: PathState,
        psi_i: PureState,
        psi_m1: PureState,
        psi_m2: PureState,
        psi_f: Option<PureState>,
    ) -> Self {
        Self {
            path,
            psi_i,
            psi_m1,
            psi_m2,
            psi_f,
        }
    }

    pub fn with_path(&self, path: PathState) -> Self {
        Self { path, ..*self }
    }

    fn post_state(&self) -> Result<&PureState> {
        self.psi_f.as_ref().ok_or(Error::MissingPostSelection)
    }

    /// Effective path amplitudes seen by the detector after post-selection,
    /// `c_k <psi_f|psi_mk>`.
    pub fn post_selected_amplitudes(&self) -> Result<(Complex64, Complex64)> {
        let f = self.post_state()?;
        Ok((
            self.path.c1 * inner_product(f, &self.psi_m1),
            self.path.c2 * inner_product(f, &self.psi_m2),
        ))
    }

    /// `(N, X)` for the given stage.
    fn pattern(&self, stage: Stage) -> Result<(f64, Complex64)> {
        let (c1, c2) = (self.path.c1, self.path.c2);
        let weight = c1.norm_sqr() + c2.norm_sqr();
        Ok(match stage {
            Stage::Initial => (weight, c1.conj() * c2),
            Stage::Labelled => (
                weight,
                c1.conj() * c2 * inner_product(&self.psi_m1, &self.psi_m2),
            ),
            Stage::PostSelected => {
                let (d1, d2) = self.post_selected_amplitudes()?;
                (d1.norm_sqr() + d2.norm_sqr(), d1.conj() * d2)
            }
        })
    }

    /// Fringe cross term `X` of the stage.
    pub fn cross_term(&self, stage: Stage) -> Result<Complex64> {
        Ok(self.pattern(stage)?.1)
    }

    /// Detection probability with the analyzer set to `delta`. For the
    /// post-selected stage this is the joint probability of passing the
    /// post-selection and being detected.
    pub fn fringe_probability(&self, delta: f64, stage: Stage) -> Result<f64> {
        let (weight, cross) = self.pattern(stage)?;
        let value = 0.5 * (weight + 2.0 * (cross * Complex64::from_polar(1.0, -delta)).re);
        Ok(value.clamp(0.0, 1.0))
    }

    /// Probability that the internal state passes the post-selection.
    pub fn post_selection_probability(&self) -> Result<f64> {
        Ok(self.pattern(Stage::PostSelected)?.0)
    }

    /// Post-selected pattern renormalized by the success probability.
    pub fn conditional_fringe_probability(&self, delta: f64) -> Result<f64> {
        let success = self.post_selection_probability()?;
        if success < 1e-12 {
            return Err(Error::PostSelectionVanished(success));
        }
        let joint = self.fringe_probability(delta, Stage::PostSelected)?;
        Ok((joint / success).clamp(0.0, 1.0))
    }

    /// `(P_max - P_min) / (P_max + P_min)`.
    pub fn visibility(&self, stage: Stage) -> Result<f64> {
        let (weight, cross) = self.pattern(stage)?;
        if weight == 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * cross.norm() / weight)
    }

    /// Constructive-interference phase in closed form:
    /// `delta_i = arg(c1* c2)`, `delta_m = delta_i + arg<m1|m2>`,
    /// `delta_f = delta_i + arg(<m1|f><f|m2>)`.
    pub fn constructive_phase_analytic(&self, stage: Stage) -> Result<f64> {
        let cross = self.cross_term(stage)?;
        if cross.norm() < DEGENERACY_TOL {
            return Err(Error::ZeroVisibility(cross.norm()));
        }
        let delta_i = arg(self.path.c1.conj() * self.path.c2);
        let label = match stage {
            Stage::Initial => return Ok(delta_i),
            Stage::Labelled => inner_product(&self.psi_m1, &self.psi_m2),
            Stage::PostSelected => {
                let f = self.post_state()?;
                inner_product(&self.psi_m1, f) * inner_product(f, &self.psi_m2)
            }
        };
        Ok(wrap_phase(delta_i + arg(label)))
    }

    /// Constructive phase located numerically: argmax of the fringe pattern
    /// on `n_grid` uniform points of `(-pi, pi]`, refined by a parabola
    /// through the best point and its two (cyclic) neighbours.
    pub fn constructive_phase_scan(&self, stage: Stage, n_grid: usize) -> Result<f64> {
        if n_grid < 16 {
            return Err(Error::ScanGridTooSmall(n_grid));
        }
        let step = 2.0 * PI / n_grid as f64;
        let grid = |k: usize| -PI + step * (k + 1) as f64;
        let values = (0..n_grid)
            .map(|k| self.fringe_probability(grid(k), stage))
            .collect::<Result<Vec<_>>>()?;

        let (best, &peak) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is non-empty");
        let trough = values.iter().copied().fold(f64::INFINITY, f64::min);
        let amplitude = 0.5 * (peak - trough);
        if amplitude < DEGENERACY_TOL {
            return Err(Error::ZeroVisibility(amplitude));
        }

        let before = values[(best + n_grid - 1) % n_grid];
        let after = values[(best + 1) % n_grid];
        let curvature = before - 2.0 * peak + after;
        let offset = if curvature < 0.0 {
            0.5 * step * (before - after) / curvature
        } else {
            0.0
        };
        Ok(wrap_phase(grid(best) + offset))
    }

    /// Fringe shift caused by the labelling, `arg <psi_m1|psi_m2>`.
    pub fn labelling_shift(&self) -> Result<f64> {
        let bracket = inner_product(&self.psi_m1, &self.psi_m2);
        if bracket.norm() < DEGENERACY_TOL {
            return Err(Error::ZeroVisibility(bracket.norm()));
        }
        Ok(arg(bracket))
    }

    /// Fringe shift caused by the post-selection: the Pancharatnam phase of
    /// `(psi_m1, psi_f, psi_m2)`.
    pub fn eraser_shift(&self) -> Result<f64> {
        let f = self.post_state()?;
        pancharatnam_phase(&self.psi_m1, f, &self.psi_m2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x_state() -> PureState {
        PureState::real(1.0, 1.0).unwrap()
    }

    fn y_state() -> PureState {
        PureState::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap()
    }

    fn scenario(m1: PureState, m2: PureState, f: Option<PureState>) -> EraserScenario {
        EraserScenario::new(PathState::balanced(), PureState::plus(), m1, m2, f)
    }

    #[test]
    fn path_state_normalizes() {
        let p = PathState::new(c(2.0, 0.0), c(0.0, 2.0)).unwrap();
        assert!((p.c1().norm_sqr() + p.c2().norm_sqr() - 1.0).abs() < 1e-15);
        assert!(PathState::new(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn initial_fringes() {
        let s = scenario(PureState::plus(), PureState::plus(), None);
        assert!((s.fringe_probability(0.0, Stage::Initial).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.fringe_probability(PI, Stage::Initial).unwrap().abs() < 1e-15);
        assert_eq!(s.constructive_phase_analytic(Stage::Initial).unwrap(), 0.0);

        let shifted = s.with_path(PathState::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).unwrap());
        let d = shifted.constructive_phase_analytic(Stage::Initial).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_labels_wash_out_fringes() {
        let s = scenario(PureState::plus(), PureState::minus(), Some(x_state()));
        for k in 0..8 {
            let d = k as f64 * 0.7 - 2.0;
            assert!((s.fringe_probability(d, Stage::Labelled).unwrap() - 0.5).abs() < 1e-15);
        }
        assert_eq!(s.visibility(Stage::Labelled).unwrap(), 0.0);
        assert!(matches!(
            s.constructive_phase_scan(Stage::Labelled, 64),
            Err(Error::ZeroVisibility(_))
        ));
        assert!(matches!(
            s.constructive_phase_analytic(Stage::Labelled),
            Err(Error::ZeroVisibility(_))
        ));
        assert!(matches!(s.labelling_shift(), Err(Error::ZeroVisibility(_))));
        // The eraser restores full visibility with a diagonal post-selection.
        assert!((s.visibility(Stage::PostSelected).unwrap() - 1.0).abs() < 1e-15);
        assert!((s.post_selection_probability().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identical_labels_keep_origin() {
        let m = PureState::from_bloch_angles(1.0, 0.4).unwrap();
        let s = EraserScenario::new(
            PathState::new(c(0.6, 0.1), c(-0.3, 0.7)).unwrap(),
            m,
            m,
            m,
            None,
        );
        let di = s.constructive_phase_analytic(Stage::Initial).unwrap();
        assert_eq!(s.constructive_phase_analytic(Stage::Labelled).unwrap(), di);
        assert_eq!(s.labelling_shift().unwrap(), 0.0);
    }

    #[test]
    fn scan_on_balanced_unlabelled_paths() {
        let s = scenario(PureState::plus(), PureState::plus(), None);
        let d = s.constructive_phase_scan(Stage::Labelled, 64).unwrap();
        assert!(d.abs() <= 2.0 * PI / (64.0 * 64.0));
        assert!(matches!(
            s.constructive_phase_scan(Stage::Initial, 8),
            Err(Error::ScanGridTooSmall(8))
        ));
    }

    #[test]
    fn labelling_shift_examples() {
        // <+|y> = 1/sqrt2 is real and positive.
        let s = scenario(PureState::plus(), y_state(), None);
        assert!(s.labelling_shift().unwrap().abs() < 1e-15);
        // <x|y> = (1+i)/2
        let s = scenario(x_state(), y_state(), None);
        assert!((s.labelling_shift().unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn eraser_shift_examples() {
        let m1 = PureState::from_bloch_angles(0.9, 0.2).unwrap();
        let m2 = PureState::from_bloch_angles(1.7, 2.2).unwrap();
        let s = scenario(m1, m2, Some(m1));
        assert!(s.eraser_shift().unwrap().abs() < 1e-15);

        // <x|+><+|y><y|x> = (1/sqrt2)(1/sqrt2)(1-i)/2
        let s = scenario(x_state(), y_state(), Some(PureState::plus()));
        assert!((s.eraser_shift().unwrap() + FRAC_PI_4).abs() < 1e-15);

        let s = scenario(x_state(), y_state(), None);
        assert_eq!(s.eraser_shift(), Err(Error::MissingPostSelection));
        assert_eq!(
            s.fringe_probability(0.0, Stage::PostSelected),
            Err(Error::MissingPostSelection)
        );
    }

    #[test]
    fn conditional_pattern_is_renormalized() {
        let s = scenario(x_state(), y_state(), Some(PureState::plus()));
        let success = s.post_selection_probability().unwrap();
        let d = s.constructive_phase_analytic(Stage::PostSelected).unwrap();
        let joint = s.fringe_probability(d, Stage::PostSelected).unwrap();
        let cond = s.conditional_fringe_probability(d).unwrap();
        assert!((cond * success - joint).abs() < 1e-15);
        // Equal-magnitude effective amplitudes give full visibility.
        assert!((cond - 1.0).abs() < 1e-14);

        let dead = scenario(PureState::plus(), PureState::plus(), Some(PureState::minus()));
        assert!(matches!(
            dead.conditional_fringe_probability(0.0),
            Err(Error::PostSelectionVanished(_))
        ));
    }
}
