//! Pure states of a two-level system and their Bloch-sphere geometry.
//!
//! Basis convention: `|+>` is the north pole `(0, 0, 1)`, `|->` the south
//! pole, and `(|+> + |->)/sqrt(2)` sits on the positive x axis. The map is
//! the usual right-handed one, so `(|+> + i|->)/sqrt(2)` lands on `+y`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pairwise overlap below which a three-state phase is treated as undefined.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Maps an angle onto the branch `(-pi, pi]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Distance between two angles measured on the circle, in `[0, pi]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

/// `arg z` on the branch `(-pi, pi]`.
pub(crate) fn arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Normalized state `amp_plus |+> + amp_minus |->`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amp_plus: Complex64,
    amp_minus: Complex64,
}

impl PureState {
    /// Builds a state from arbitrary (nonzero) amplitudes, normalizing them.
    pub fn new(amp_plus: Complex64, amp_minus: Complex64) -> Result<Self> {
        if !(amp_plus.is_finite() && amp_minus.is_finite()) {
            return Err(Error::NonFinite("state amplitude"));
        }
        let norm = (amp_plus.norm_sqr() + amp_minus.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amp_plus: amp_plus / norm,
            amp_minus: amp_minus / norm,
        })
    }

    /// Real-amplitude convenience constructor.
    pub fn real(amp_plus: f64, amp_minus: f64) -> Result<Self> {
        Self::new(Complex64::new(amp_plus, 0.0), Complex64::new(amp_minus, 0.0))
    }

    pub fn plus() -> Self {
        Self {
            amp_plus: Complex64::new(1.0, 0.0),
            amp_minus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn minus() -> Self {
        Self {
            amp_plus: Complex64::new(0.0, 0.0),
            amp_minus: Complex64::new(1.0, 0.0),
        }
    }

    /// `cos(polar/2)|+> + e^{i azimuth} sin(polar/2)|->`, the state whose Bloch
    /// vector has the given polar and azimuthal angles.
    pub fn from_bloch_angles(polar: f64, azimuth: f64) -> Result<Self> {
        if !(polar.is_finite() && azimuth.is_finite()) {
            return Err(Error::NonFinite("Bloch angle"));
        }
        let (s, c) = (0.5 * polar).sin_cos();
        Self::new(
            Complex64::new(c, 0.0),
            Complex64::from_polar(1.0, azimuth) * s,
        )
    }

    pub fn amp_plus(&self) -> Complex64 {
        self.amp_plus
    }

    pub fn amp_minus(&self) -> Complex64 {
        self.amp_minus
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp_plus, self.amp_minus]
    }

    /// The same ray with a global phase `e^{i alpha}` attached.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let u = Complex64::from_polar(1.0, alpha);
        Self {
            amp_plus: self.amp_plus * u,
            amp_minus: self.amp_minus * u,
        }
    }

    /// Renormalizes amplitudes produced by a unitary map. Only used
    /// internally where the norm is already one up to rounding.
    pub(crate) fn from_unitary_image(amp_plus: Complex64, amp_minus: Complex64) -> Self {
        let norm = (amp_plus.norm_sqr() + amp_minus.norm_sqr()).sqrt();
        Self {
            amp_plus: amp_plus / norm,
            amp_minus: amp_minus / norm,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.amp_plus.norm_sqr() + self.amp_minus.norm_sqr()).sqrt()
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6})|+> + ({:.6})|->", self.amp_plus, self.amp_minus)
    }
}

/// Point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &BlochVector) -> BlochVector {
        BlochVector {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Great-circle angle to `other`, in `[0, pi]`.
    pub fn angle_to(&self, other: &BlochVector) -> f64 {
        // atan2 form keeps precision near 0 and pi where acos does not.
        self.cross(other).norm().atan2(self.dot(other))
    }
}

/// `<a|b>`, antilinear in the first argument.
pub fn inner_product(a: &PureState, b: &PureState) -> Complex64 {
    a.amp_plus.conj() * b.amp_plus + a.amp_minus.conj() * b.amp_minus
}

pub fn bloch_vector(a: &PureState) -> BlochVector {
    let coherence = a.amp_plus.conj() * a.amp_minus;
    BlochVector {
        x: 2.0 * coherence.re,
        y: 2.0 * coherence.im,
        z: a.amp_plus.norm_sqr() - a.amp_minus.norm_sqr(),
    }
}

fn check_triangle(a: &PureState, b: &PureState, c: &PureState) -> Result<[Complex64; 3]> {
    let brackets = [inner_product(a, b), inner_product(b, c), inner_product(c, a)];
    let overlap = brackets
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    if overlap < DEGENERACY_TOL {
        return Err(Error::DegenerateTriangle {
            overlap,
            tolerance: DEGENERACY_TOL,
        });
    }
    Ok(brackets)
}

/// Bargmann invariant `<a|b><b|c><c|a>`.
pub fn bargmann_invariant(a: &PureState, b: &PureState, c: &PureState) -> Complex64 {
    inner_product(a, b) * inner_product(b, c) * inner_product(c, a)
}

/// Pancharatnam phase `arg(<a|b><b|c><c|a>)` in `(-pi, pi]`.
///
/// Invariant under independent global phases on the three states and under
/// cyclic permutation; a transposition of two arguments flips its sign.
pub fn pancharatnam_phase(a: &PureState, b: &PureState, c: &PureState) -> Result<f64> {
    let [ab, bc, ca] = check_triangle(a, b, c)?;
    Ok(arg(ab * bc * ca))
}

/// Signed solid angle of the geodesic triangle on the Bloch sphere with
/// vertices `a`, `b`, `c`, computed from the Bloch vectors alone.
///
/// Sign convention: positive when `a -> b -> c` runs clockwise seen from
/// outside the sphere, i.e. when `a . (b x c) < 0`. With this orientation
/// `pancharatnam_phase(a, b, c) == -solid_angle(a, b, c) / 2 (mod 2 pi)`.
/// Result lies in `[-2 pi, 2 pi)`.
pub fn solid_angle(a: &PureState, b: &PureState, c: &PureState) -> Result<f64> {
    check_triangle(a, b, c)?;
    let (va, vb, vc) = (bloch_vector(a), bloch_vector(b), bloch_vector(c));
    let triple = va.dot(&vb.cross(&vc));
    let denom = 1.0 + va.dot(&vb) + vb.dot(&vc) + vc.dot(&va);
    Ok(-2.0 * triple.atan2(denom))
}
