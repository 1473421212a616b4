//! Observables on the two-level system and the momentum-conditioned
//! evolution `exp(-i G p A / hbar)` generated by the coupling `g A (x) p`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{arg, inner_product, PureState, DEGENERACY_TOL};

/// Smallest `|<psi_f|psi_i>|` for which a weak value is reported.
pub const SELECTION_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;

type Matrix2 = [[Complex64; 2]; 2];

/// Hermitian 2x2 operator, stored alongside its Pauli decomposition
/// `a0 I + ax X + ay Y + az Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    m: Matrix2,
    pauli: [f64; 4],
}

impl Observable {
    /// Accepts a matrix that is Hermitian within 1e-12 and stores its
    /// exactly Hermitian part.
    pub fn new(m: Matrix2) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("observable entry"));
        }
        let dev = [
            (m[0][0].im).abs(),
            (m[1][1].im).abs(),
            (m[0][1] - m[1][0].conj()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let off = 0.5 * (m[0][1] + m[1][0].conj());
        let a0 = 0.5 * (m[0][0].re + m[1][1].re);
        let az = 0.5 * (m[0][0].re - m[1][1].re);
        Ok(Self::from_pauli(a0, off.re, -off.im, az))
    }

    pub fn from_pauli(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        let m = [
            [Complex64::new(a0 + az, 0.0), Complex64::new(ax, -ay)],
            [Complex64::new(ax, ay), Complex64::new(a0 - az, 0.0)],
        ];
        Self {
            m,
            pauli: [a0, ax, ay, az],
        }
    }

    pub fn identity() -> Self {
        Self::from_pauli(1.0, 0.0, 0.0, 0.0)
    }

    /// `|+><-| + |-><+|`.
    pub fn sigma_x() -> Self {
        Self::from_pauli(0.0, 1.0, 0.0, 0.0)
    }

    pub fn sigma_y() -> Self {
        Self::from_pauli(0.0, 0.0, 1.0, 0.0)
    }

    pub fn sigma_z() -> Self {
        Self::from_pauli(0.0, 0.0, 0.0, 1.0)
    }

    pub fn matrix(&self) -> Matrix2 {
        self.m
    }

    /// `[a0, ax, ay, az]`.
    pub fn pauli(&self) -> [f64; 4] {
        self.pauli
    }

    /// `(lambda_min, lambda_max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let [a0, ax, ay, az] = self.pauli;
        let r = (ax * ax + ay * ay + az * az).sqrt();
        (a0 - r, a0 + r)
    }

    pub fn apply(&self, psi: &PureState) -> [Complex64; 2] {
        mat_vec(&self.m, psi.amplitudes())
    }

    /// `<a|A|b>`.
    pub fn matrix_element(&self, a: &PureState, b: &PureState) -> Complex64 {
        let ab = self.apply(b);
        a.amp_plus().conj() * ab[0] + a.amp_minus().conj() * ab[1]
    }

    /// `exp(-i phi A)` in closed form from the Pauli decomposition.
    pub fn propagator(&self, phi: f64) -> Matrix2 {
        let [a0, ax, ay, az] = self.pauli;
        let r = (ax * ax + ay * ay + az * az).sqrt();
        let global = Complex64::from_polar(1.0, -phi * a0);
        if r == 0.0 {
            let zero = Complex64::new(0.0, 0.0);
            return [[global, zero], [zero, global]];
        }
        let (s, c) = (phi * r).sin_cos();
        let (nx, ny, nz) = (ax / r, ay / r, az / r);
        // cos I - i sin (n . sigma)
        let m = [
            [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
            [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
        ];
        m.map(|row| row.map(|z| z * global))
    }
}

fn mat_vec(m: &Matrix2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Interaction strength `G = g tau` and the value of hbar in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    g: f64,
    hbar: f64,
}

impl CouplingSpec {
    pub fn new(g: f64, hbar: f64) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::NonFinite("coupling G"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidHbar(hbar));
        }
        Ok(Self { g, hbar })
    }

    /// Natural units, hbar = 1.
    pub fn natural(g: f64) -> Result<Self> {
        Self::new(g, 1.0)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Rotation angle `G p / hbar` accumulated by the momentum component `p`.
    pub fn phase_angle(&self, p: f64) -> f64 {
        self.g * p / self.hbar
    }
}

/// `<psi|A|psi>`.
pub fn expectation(a: &Observable, psi: &PureState) -> f64 {
    a.matrix_element(psi, psi).re
}

/// `<psi_f|A|psi_i> / <psi_f|psi_i>`.
pub fn weak_value(a: &Observable, psi_i: &PureState, psi_f: &PureState) -> Result<Complex64> {
    let overlap = inner_product(psi_f, psi_i);
    if overlap.norm() < SELECTION_TOL {
        return Err(Error::OrthogonalSelection(overlap.norm()));
    }
    Ok(a.matrix_element(psi_f, psi_i) / overlap)
}

/// `exp(-i G p A / hbar) |psi>`.
pub fn evolve(a: &Observable, coupling: &CouplingSpec, p: f64, psi: &PureState) -> PureState {
    let u = a.propagator(coupling.phase_angle(p));
    let [up, um] = mat_vec(&u, psi.amplitudes());
    PureState::from_unitary_image(up, um)
}

fn checked(z: Complex64) -> Result<Complex64> {
    let magnitude = z.norm();
    if magnitude < DEGENERACY_TOL {
        Err(Error::DegenerateBracket {
            magnitude,
            tolerance: DEGENERACY_TOL,
        })
    } else {
        Ok(z)
    }
}

/// Labelling phase `arg <psi_m(0)|psi_m(p)>`, exact (no small-p expansion).
pub fn theta1(a: &Observable, coupling: &CouplingSpec, psi_i: &PureState, p: f64) -> Result<f64> {
    let moved = evolve(a, coupling, p, psi_i);
    Ok(arg(checked(inner_product(psi_i, &moved))?))
}

/// Post-selection phase `arg <psi_i|psi_f><psi_f|psi_m(p)><psi_m(p)|psi_i>`,
/// exact. Equals `pancharatnam_phase(psi_i, psi_f, psi_m(p))`.
pub fn theta2(
    a: &Observable,
    coupling: &CouplingSpec,
    psi_i: &PureState,
    psi_f: &PureState,
    p: f64,
) -> Result<f64> {
    let moved = evolve(a, coupling, p, psi_i);
    let product = checked(inner_product(psi_i, psi_f))?
        * checked(inner_product(psi_f, &moved))?
        * checked(inner_product(&moved, psi_i))?;
    Ok(arg(product))
}
