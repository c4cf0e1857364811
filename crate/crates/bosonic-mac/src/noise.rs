//! Single-user channel capacity under anisotropic (colored) Gaussian noise.
//!
//! The noise mode is in a zero-mean Gaussian state with covariance `V_b`.
//! Whitening that state with a squeeze reduces the channel to a thermal one
//! with `nbar_T = 2 det(V_b)^{1/2} - 1/2`; above a threshold input photon
//! number the capacity closed form
//! `g(eta nbar + (1-eta) nbar_b) - g((1-eta) nbar_T)` is achieved by a
//! displaced-squeezed-state code. The closed form is conditional on the
//! minimum-output-entropy conjecture for the thermal channel, and every
//! result is labeled accordingly. Below threshold the achievable rate and
//! the conjectured upper bound are reported separately.

use serde::Serialize;

use crate::gaussian::{
    g_nats, squeeze_covariance, whitening_params, CovMatrix, Entropy,
};
use crate::hsh::rmax_individual;
use crate::{Error, Result};

/// Lossy channel `c = sqrt(eta) a + sqrt(1-eta) b` whose noise mode `b` is
/// in a zero-mean Gaussian state with covariance `vb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNoiseChannel {
    eta: f64,
    vb: CovMatrix,
}

/// Validity of a capacity figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    /// Above threshold: the upper and lower bounds coincide, so the value
    /// is exact conditional on the minimum-output-entropy conjecture.
    ExactConjectureConditional,
    /// Below threshold: only the (lower, upper) pair is known.
    BoundsOnly,
}

/// Capacity evaluation at one input photon number.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapacityResult {
    /// Conjecture-conditional upper bound (the closed form).
    pub upper: Entropy,
    /// Rate achievable with a Gaussian displaced-state code.
    pub lower: Entropy,
    pub validity: Validity,
    pub threshold: f64,
    pub equivalent_thermal: f64,
}

impl CapacityResult {
    /// The capacity when exact; `None` below threshold.
    pub fn exact(&self) -> Option<Entropy> {
        match self.validity {
            Validity::ExactConjectureConditional => Some(self.upper),
            Validity::BoundsOnly => None,
        }
    }
}

impl GaussianNoiseChannel {
    pub fn new(eta: f64, vb: CovMatrix) -> Result<GaussianNoiseChannel> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidModel(format!(
                "transmissivity must lie in (0, 1], got {eta}"
            )));
        }
        vb.validate_physical()?;
        Ok(GaussianNoiseChannel { eta, vb })
    }

    /// Thermal channel with isotropic noise of mean photon number `nbar_b`.
    pub fn thermal(eta: f64, nbar_b: f64) -> Result<GaussianNoiseChannel> {
        GaussianNoiseChannel::new(eta, CovMatrix::thermal(nbar_b)?)
    }

    /// Pure squeezed noise `|0; z>` with `z = r e^{i theta}`; its mean
    /// photon number is `sinh^2 r`.
    pub fn pure_squeezed(eta: f64, r: f64, theta: f64) -> Result<GaussianNoiseChannel> {
        // |0; z> is the negated-argument squeezed vacuum in the
        // squeeze_covariance convention.
        let p = crate::gaussian::SqueezeParams::from_z(r, theta);
        GaussianNoiseChannel::new(eta, squeeze_covariance(&p.negate()))
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn vb(&self) -> &CovMatrix {
        &self.vb
    }

    /// Mean photon number of the noise state, `V1^b + V2^b - 1/2`.
    pub fn nbar_b(&self) -> f64 {
        self.vb.mean_photons()
    }

    /// Mean photon number `nbar_T = 2 det(V_b)^{1/2} - 1/2` of the
    /// equivalent thermal channel obtained by whitening. Zero exactly when
    /// the noise state is pure; invariant under rotations of `V_b`.
    pub fn equivalent_thermal(&self) -> f64 {
        (2.0 * self.vb.det().sqrt() - 0.5).max(0.0)
    }

    /// Covariance of the squeezed input state used by the achievability
    /// code: `squeeze_covariance` of the parameters that whiten `V_b`.
    pub fn input_state_covariance(&self) -> CovMatrix {
        let p = whitening_params(&self.vb).expect("vb validated at construction");
        squeeze_covariance(&p)
    }

    /// Input photon number above which the closed form is exact:
    /// `(1/eta) sqrt((V'_1 - V'_2)^2 + 4 V'_12^2) + V_1 + V_2 - 1/2`
    /// with `V' = eta V + (1-eta) V_b` and `V` the whitening-squeeze
    /// covariance. Clamped at zero; zero exactly for thermal noise.
    pub fn threshold(&self) -> f64 {
        let v = self.input_state_covariance();
        let vp = v.scale(self.eta).add(&self.vb.scale(1.0 - self.eta));
        let aniso =
            ((vp.v1() - vp.v2()).powi(2) + 4.0 * vp.v12() * vp.v12()).sqrt();
        (aniso / self.eta + v.mean_photons()).max(0.0)
    }

    /// Capacity at input photon budget `nbar`.
    ///
    /// Above threshold the closed form is returned as an exact
    /// (conjecture-conditional) value. Below threshold the same expression
    /// is only an upper bound; the lower bound is the best rate of the
    /// displaced-Gaussian code over the affordable input states (the
    /// whitening squeeze when the budget covers its photons, else vacuum).
    pub fn capacity(&self, nbar: f64) -> Result<CapacityResult> {
        if !(nbar >= 0.0) {
            return Err(Error::NegativePhotonNumber(nbar));
        }
        let threshold = self.threshold();
        let upper = g_nats(self.eta * nbar + (1.0 - self.eta) * self.nbar_b())
            - g_nats((1.0 - self.eta) * self.equivalent_thermal());
        let upper = Entropy::from_nats(upper);

        let achievable = |input: &CovMatrix| -> Option<f64> {
            let spare = nbar - input.mean_photons();
            if spare < -1e-12 {
                return None;
            }
            let out = input.scale(self.eta).add(&self.vb.scale(1.0 - self.eta));
            Some(rmax_individual(&out, self.eta * spare.max(0.0)).nats())
        };
        let mut lower = achievable(&CovMatrix::vacuum()).unwrap_or(0.0);
        if let Some(rate) = achievable(&self.input_state_covariance()) {
            lower = lower.max(rate);
        }
        let lower = Entropy::from_nats(lower.min(upper.nats()));

        let validity = if nbar >= threshold {
            Validity::ExactConjectureConditional
        } else {
            Validity::BoundsOnly
        };
        Ok(CapacityResult {
            upper,
            lower,
            validity,
            threshold,
            equivalent_thermal: self.equivalent_thermal(),
        })
    }
}

/// Ordering report for equal-noise-photon channels: phase-sensitive pure
/// noise versus thermal noise at the same `nbar_b` and input budget.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonReport {
    pub c_squeezed: Entropy,
    pub c_thermal: Entropy,
    /// `c_squeezed - c_thermal`; positive whenever `nbar_b > 0`.
    pub difference: f64,
}

/// Compares the capacity of a pure-squeezed-noise channel against the
/// thermal-noise channel with the same noise photon number, both above
/// their thresholds. Refused (error) when either input budget is below its
/// threshold or the noise photon numbers differ.
pub fn squeezed_noise_comparison(
    squeezed: &GaussianNoiseChannel,
    thermal: &GaussianNoiseChannel,
    nbar: f64,
) -> Result<ComparisonReport> {
    if (squeezed.nbar_b() - thermal.nbar_b()).abs() > 1e-9 {
        return Err(Error::InvalidModel(format!(
            "noise photon numbers differ: {} vs {}",
            squeezed.nbar_b(),
            thermal.nbar_b()
        )));
    }
    let cs = squeezed.capacity(nbar)?;
    let ct = thermal.capacity(nbar)?;
    let (Some(c_squeezed), Some(c_thermal)) = (cs.exact(), ct.exact()) else {
        return Err(Error::InvalidModel(format!(
            "comparison refused: input budget {nbar} is below a threshold \
             ({} squeezed, {} thermal)",
            cs.threshold, ct.threshold
        )));
    };
    Ok(ComparisonReport {
        c_squeezed,
        c_thermal,
        difference: c_squeezed.nats() - c_thermal.nats(),
    })
}
