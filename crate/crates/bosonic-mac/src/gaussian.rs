//! Entropy functions, single-mode Gaussian-state covariance matrices, and
//! squeeze/whitening parameterizations shared by every other module.
//!
//! Conventions: quadratures are normalized so the vacuum state has variance
//! 1/4 per quadrature, i.e. a physical single-mode Gaussian state has
//! `det V >= 1/16`, with equality exactly for pure states. A thermal state
//! with mean photon number `x` has von Neumann entropy [`g`]`(x)` nats.

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Determinant slack admitted when classifying a covariance as physical,
/// so that pure states assembled in floating point (det = 1/16 up to
/// roundoff) are accepted.
pub const PHYSICAL_DET_TOL: f64 = 1e-12;

const MIN_PHYSICAL_DET: f64 = 1.0 / 16.0;

/// Unit in which rates and entropies are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    Nats,
    Bits,
}

impl RateUnit {
    /// Multiplier taking a value in nats to this unit.
    pub fn factor_from_nats(self) -> f64 {
        match self {
            RateUnit::Nats => 1.0,
            RateUnit::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }
}

impl std::fmt::Display for RateUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateUnit::Nats => write!(f, "nats"),
            RateUnit::Bits => write!(f, "bits"),
        }
    }
}

/// A nonnegative entropy (or information rate), stored in nats.
///
/// Conversion to bits happens exactly once, on read, so chained arithmetic
/// cannot double-convert.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Entropy(f64);

impl Entropy {
    pub const ZERO: Entropy = Entropy(0.0);

    /// Wraps a value in nats. Tiny negative values from floating-point
    /// cancellation (above -1e-9) are clamped to zero; anything more
    /// negative indicates a logic error upstream.
    pub fn from_nats(value: f64) -> Entropy {
        debug_assert!(value > -1e-9, "entropy must be nonnegative, got {value}");
        Entropy(value.max(0.0))
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn in_unit(self, unit: RateUnit) -> f64 {
        self.0 * unit.factor_from_nats()
    }
}

/// Von Neumann entropy of a thermal (Bose-Einstein) state with mean photon
/// number `x`:  g(x) = (x+1) ln(x+1) - x ln x,  with g(0) = 0.
///
/// `g` is strictly increasing and concave on x > 0.
pub fn g(x: f64) -> Result<Entropy> {
    if !(x >= 0.0) {
        return Err(Error::NegativePhotonNumber(x));
    }
    Ok(Entropy::from_nats(g_nats(x)))
}

/// Unchecked `g` in plain nats for internal hot loops. Callers guarantee
/// `x >= 0` (tiny negative roundoff is clamped).
pub(crate) fn g_nats(x: f64) -> f64 {
    let x = x.max(0.0);
    if x == 0.0 {
        return 0.0;
    }
    // Below 1e-12 the direct expression evaluates 0 * ln 0; use the
    // expansion g(x) = x - x ln x + O(x^2).
    if x < 1e-12 {
        return x - x * x.ln();
    }
    (x + 1.0) * (x + 1.0).ln() - x * x.ln()
}

/// 2x2 real symmetric quadrature-component covariance matrix.
///
/// Only the three independent entries are stored, so symmetry holds by
/// construction. Constructors reject matrices that are not positive
/// semidefinite; the quantum-state check (`det >= 1/16`) is separate, via
/// [`CovMatrix::validate_physical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovMatrix {
    v1: f64,
    v2: f64,
    v12: f64,
}

impl CovMatrix {
    /// Vacuum covariance, `diag(1/4, 1/4)`.
    pub fn vacuum() -> CovMatrix {
        CovMatrix {
            v1: 0.25,
            v2: 0.25,
            v12: 0.0,
        }
    }

    /// Isotropic thermal covariance `((2 nbar + 1)/4) I`.
    pub fn thermal(nbar: f64) -> Result<CovMatrix> {
        if !(nbar >= 0.0) {
            return Err(Error::NegativePhotonNumber(nbar));
        }
        let v = (2.0 * nbar + 1.0) / 4.0;
        CovMatrix::new(v, v, 0.0)
    }

    pub fn new(v1: f64, v2: f64, v12: f64) -> Result<CovMatrix> {
        let det = v1 * v2 - v12 * v12;
        if !(v1 >= 0.0) || !(v2 >= 0.0) || det < -PHYSICAL_DET_TOL {
            return Err(Error::NotPositiveSemidefinite { v1, v2, v12 });
        }
        Ok(CovMatrix { v1, v2, v12 })
    }

    pub fn diagonal(v1: f64, v2: f64) -> Result<CovMatrix> {
        CovMatrix::new(v1, v2, 0.0)
    }

    pub fn v1(&self) -> f64 {
        self.v1
    }

    pub fn v2(&self) -> f64 {
        self.v2
    }

    pub fn v12(&self) -> f64 {
        self.v12
    }

    pub fn det(&self) -> f64 {
        self.v1 * self.v2 - self.v12 * self.v12
    }

    pub fn trace(&self) -> f64 {
        self.v1 + self.v2
    }

    /// Mean photon number of the zero-mean Gaussian state with this
    /// covariance: `V1 + V2 - 1/2`.
    pub fn mean_photons(&self) -> f64 {
        self.v1 + self.v2 - 0.5
    }

    /// Errors unless this covariance describes a physical quantum state
    /// (`det >= 1/16`, up to [`PHYSICAL_DET_TOL`]).
    pub fn validate_physical(&self) -> Result<()> {
        let det = self.det();
        if det < MIN_PHYSICAL_DET - PHYSICAL_DET_TOL {
            return Err(Error::UnphysicalState { det });
        }
        Ok(())
    }

    pub fn is_physical(&self) -> bool {
        self.validate_physical().is_ok()
    }

    /// Eigenvalues ordered `lambda1 >= lambda2` and the rotation angle `phi`
    /// of the eigenvector belonging to `lambda1`.
    pub fn eigen(&self) -> (f64, f64, f64) {
        let mean = 0.5 * (self.v1 + self.v2);
        let half_diff = 0.5 * (self.v1 - self.v2);
        let disc = (half_diff * half_diff + self.v12 * self.v12).sqrt();
        let phi = if disc == 0.0 {
            0.0
        } else {
            0.5 * (2.0 * self.v12).atan2(self.v1 - self.v2)
        };
        (mean + disc, mean - disc, phi)
    }

    /// Entrywise sum `self + other`, which stays PSD.
    pub fn add(&self, other: &CovMatrix) -> CovMatrix {
        CovMatrix {
            v1: self.v1 + other.v1,
            v2: self.v2 + other.v2,
            v12: self.v12 + other.v12,
        }
    }

    /// Scales every entry by `s >= 0`.
    pub fn scale(&self, s: f64) -> CovMatrix {
        debug_assert!(s >= 0.0);
        CovMatrix {
            v1: s * self.v1,
            v2: s * self.v2,
            v12: s * self.v12,
        }
    }
}

/// Squeeze parameters `mu = cosh r`, `nu = e^{i theta} sinh r` for the
/// squeeze operator with complex argument `z = r e^{i theta}`.
///
/// The hyperbolic identity `mu^2 - |nu|^2 = 1` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    mu: f64,
    nu: Complex64,
}

impl SqueezeParams {
    /// Identity squeeze (`r = 0`).
    pub fn identity() -> SqueezeParams {
        SqueezeParams {
            mu: 1.0,
            nu: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_z(r: f64, theta: f64) -> SqueezeParams {
        debug_assert!(r >= 0.0, "squeeze magnitude must be nonnegative");
        SqueezeParams {
            mu: r.cosh(),
            nu: Complex64::from_polar(r.sinh(), theta),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    pub fn r(&self) -> f64 {
        self.nu.norm().asinh()
    }

    /// Squeeze angle in `[0, 2 pi)`; zero for the identity squeeze.
    pub fn theta(&self) -> f64 {
        if self.nu.norm() == 0.0 {
            return 0.0;
        }
        let t = self.nu.arg();
        if t < 0.0 {
            t + 2.0 * std::f64::consts::PI
        } else {
            t
        }
    }

    /// Negated squeeze argument, `z -> -z`.
    pub fn negate(&self) -> SqueezeParams {
        SqueezeParams {
            mu: self.mu,
            nu: -self.nu,
        }
    }

    /// Residual of the hyperbolic identity `mu^2 - |nu|^2 - 1`.
    pub fn identity_residual(&self) -> f64 {
        self.mu * self.mu - self.nu.norm_sqr() - 1.0
    }

    /// Symplectic matrix `S(z)` acting on the quadrature vector in the
    /// Heisenberg picture, as `((s11, s12), (s12, s22))`. `det S = 1`.
    pub fn symplectic(&self) -> (f64, f64, f64) {
        (self.mu - self.nu.re, -self.nu.im, self.mu + self.nu.re)
    }
}

/// Von Neumann entropy of the zero-mean Gaussian state with covariance `V`:
/// `g(2 det(V)^{1/2} - 1/2)`. Zero exactly for pure states (det = 1/16).
pub fn gaussian_entropy(v: &CovMatrix) -> Result<Entropy> {
    v.validate_physical()?;
    Ok(Entropy::from_nats(g_nats(2.0 * v.det().sqrt() - 0.5)))
}

/// Covariance matrix of the squeezed vacuum `|0; -z>`:
///
/// `(1/4) [[|mu+nu|^2, 2 Im(mu nu)], [2 Im(mu nu), |mu-nu|^2]]`.
pub fn squeeze_covariance(p: &SqueezeParams) -> CovMatrix {
    let mu = p.mu;
    let nu = p.nu;
    let plus = Complex64::new(mu + nu.re, nu.im).norm_sqr();
    let minus = Complex64::new(mu - nu.re, -nu.im).norm_sqr();
    let cross = 2.0 * mu * nu.im;
    CovMatrix {
        v1: 0.25 * plus,
        v2: 0.25 * minus,
        v12: 0.25 * cross,
    }
}

/// Congruence `S(z) V S(z)^T` with the symplectic matrix of `p`; this is the
/// covariance-level action of the squeeze operator. Determinants are
/// preserved, so Gaussian entropy is invariant.
pub fn apply_squeeze(v: &CovMatrix, p: &SqueezeParams) -> CovMatrix {
    let (a, b, d) = p.symplectic();
    // S = [[a, b], [b, d]] (symmetric), result = S V S^T.
    let w11 = a * (a * v.v1 + b * v.v12) + b * (a * v.v12 + b * v.v2);
    let w22 = b * (b * v.v1 + d * v.v12) + d * (b * v.v12 + d * v.v2);
    let w12 = b * (a * v.v1 + b * v.v12) + d * (a * v.v12 + b * v.v2);
    CovMatrix {
        v1: w11,
        v2: w22,
        v12: w12,
    }
}

/// Squeeze parameters whose operator whitens the Gaussian state with
/// covariance `vb`, i.e. `apply_squeeze(vb, p)` is the isotropic thermal
/// covariance `((2 nbar_T + 1)/4) I` with `nbar_T = 2 det(vb)^{1/2} - 1/2`.
///
/// The magnitude is `r = (1/4) ln(lambda1 / lambda2)` from the ordered
/// eigenvalues of `vb`, and the angle is twice the eigenvector rotation
/// angle. Isotropic input maps to the identity squeeze (`r = 0, theta = 0`),
/// making degenerate inputs deterministic.
pub fn whitening_params(vb: &CovMatrix) -> Result<SqueezeParams> {
    vb.validate_physical()?;
    let (l1, l2, phi) = vb.eigen();
    if l1 == l2 {
        return Ok(SqueezeParams::identity());
    }
    let r = 0.25 * (l1 / l2).ln();
    Ok(SqueezeParams::from_z(r, 2.0 * phi))
}
