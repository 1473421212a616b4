//! Seeded generators for randomized checks.
//!
//! All sequences come from `ChaCha8Rng::seed_from_u64(seed)`, so a seed fully
//! determines every state, phase and scenario drawn from it.
//!
//! * States are Haar-random: four i.i.d. standard normals form the real and
//!   imaginary parts of the two amplitudes, then the vector is normalized.
//! * Observables: `a0 ~ U[-1, 1]`, Pauli vector with Haar direction and
//!   length `~ U[0.2, 1]`.
//! * Weak scenarios: see [`random_weak_scenario`].

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eraser::{EraserScenario, PathState};
use crate::error::Result;
use crate::operator::{weak_value, CouplingSpec, Observable};
use crate::probe::{GaussianProbe, WeakScenario, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH};
use crate::state::{inner_product, PureState};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        if let Ok(s) = PureState::new(complex_normal(rng), complex_normal(rng)) {
            return s;
        }
    }
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
}

pub fn random_path<R: Rng + ?Sized>(rng: &mut R) -> PathState {
    loop {
        if let Ok(p) = PathState::new(complex_normal(rng), complex_normal(rng)) {
            return p;
        }
    }
}

pub fn random_observable<R: Rng + ?Sized>(rng: &mut R) -> Observable {
    let a0 = rng.random_range(-1.0..1.0);
    let dir = loop {
        let v = [normal(rng), normal(rng), normal(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            break v.map(|x| x / n);
        }
    };
    let len = rng.random_range(0.2..1.0);
    Observable::from_pauli(a0, len * dir[0], len * dir[1], len * dir[2])
}

/// Triple of states whose pairwise overlaps are all at least `min_overlap`.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, min_overlap: f64) -> [PureState; 3] {
    loop {
        let t = [random_state(rng), random_state(rng), random_state(rng)];
        let ok = [(0, 1), (1, 2), (2, 0)]
            .iter()
            .all(|&(i, j)| inner_product(&t[i], &t[j]).norm() >= min_overlap);
        if ok {
            return t;
        }
    }
}

/// Random eraser scenario with a post-selection state. Labels and
/// post-selection have pairwise overlaps of at least 1e-3.
pub fn random_eraser_scenario<R: Rng + ?Sized>(rng: &mut R) -> EraserScenario {
    let path = random_path(rng);
    let psi_i = random_state(rng);
    let [m1, f, m2] = random_triple(rng, 1e-3);
    EraserScenario::new(path, psi_i, m1, m2, Some(f))
}

/// Random weak-measurement scenario with a prescribed weakness ratio.
///
/// Pre- and post-selection are Haar-random with `|<f|i>| >= 0.2`; the
/// observable comes from [`random_observable`]. Draws whose weak value is
/// dominated by its imaginary part (`|Re w| < 0.25 |w|`) or whose real part
/// is below 0.5 are redrawn, since the pointer position then carries almost
/// no signal. `hbar ~ U[0.5, 2]`, `delta_p ~ U[0.05, 0.5]`, and `G` (random
/// sign) is solved from `ratio = delta_p |G| |Re w| / hbar`. The probe uses
/// the default grid.
pub fn random_weak_scenario<R: Rng + ?Sized>(rng: &mut R, ratio: f64) -> Result<WeakScenario> {
    loop {
        let psi_i = random_state(rng);
        let psi_f = random_state(rng);
        if inner_product(&psi_f, &psi_i).norm() < 0.2 {
            continue;
        }
        let observable = random_observable(rng);
        let w = weak_value(&observable, &psi_i, &psi_f)?;
        if w.re.abs() < 0.5 || w.re.abs() < 0.25 * w.norm() {
            continue;
        }
        let hbar = rng.random_range(0.5..2.0);
        let delta_p = rng.random_range(0.05..0.5);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let g = sign * ratio * hbar / (delta_p * w.re.abs());
        let probe = GaussianProbe::with_grid(delta_p, 0.0, DEFAULT_GRID_POINTS, DEFAULT_HALF_WIDTH)?;
        return WeakScenario::new(psi_i, psi_f, observable, CouplingSpec::new(g, hbar)?, probe);
    }
}
