//! Outer bounds on the ultimate two-user MAC capacity region, and the
//! squeezed-state/homodyne rates that approach the individual bounds
//! asymptotically.
//!
//! The sum bound `g(eta nbar_A + (1-eta) nbar_B)` is achieved exactly by
//! coherent-state encoding with optimal reception; the individual bounds
//! `g(nbar_A)`, `g(nbar_B)` come from a super receiver that undoes the beam
//! splitter, and are approached in the large-photon-number limit by
//! squeezed-state encoding with homodyne detection.

use serde::Serialize;

use crate::gaussian::{g_nats, Entropy};
use crate::region::RateRegion;
use crate::{Error, Result};

/// The three outer bounds. They are mutually independent: the sum bound can
/// lie below an individual bound, so they do not form a monotone subset map
/// by themselves (see [`OuterBoundReport::clipped_region`]).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OuterBoundReport {
    pub r1_outer: Entropy,
    pub r2_outer: Entropy,
    pub sum_outer: Entropy,
    pub sum_achieved_by: &'static str,
}

impl OuterBoundReport {
    /// True iff `(r1, r2)` satisfies all three bounds within `tol`.
    pub fn contains(&self, rates: [f64; 2], tol: f64) -> bool {
        rates[0] >= -tol
            && rates[1] >= -tol
            && rates[0] <= self.r1_outer.nats() + tol
            && rates[1] <= self.r2_outer.nats() + tol
            && rates[0] + rates[1] <= self.sum_outer.nats() + tol
    }

    /// The same feasible set as a monotone rate region: individual bounds
    /// clipped by the sum bound. Usable for tracing and containment tests.
    pub fn clipped_region(&self) -> RateRegion {
        let sum = self.sum_outer.nats();
        RateRegion::two_user(
            self.r1_outer.nats().min(sum),
            self.r2_outer.nats().min(sum),
            sum,
        )
        .expect("clipped bounds are monotone")
    }
}

/// Outer bounds at transmissivity `eta` and photon budgets
/// `(nbar_A, nbar_B)`: `(g(nbar_A), g(nbar_B), g(eta nbar_A + (1-eta) nbar_B))`.
///
/// The sum bound is the same expression as the coherent-state optimal sum
/// bound, evaluated through the same code path, so the two agree exactly.
pub fn outer_bounds(eta: f64, nbar_a: f64, nbar_b: f64) -> Result<OuterBoundReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidModel(format!(
            "transmissivity must lie in [0, 1], got {eta}"
        )));
    }
    if !(nbar_a >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_a));
    }
    if !(nbar_b >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_b));
    }
    Ok(OuterBoundReport {
        r1_outer: Entropy::from_nats(g_nats(nbar_a)),
        r2_outer: Entropy::from_nats(g_nats(nbar_b)),
        sum_outer: Entropy::from_nats(g_nats(eta * nbar_a + (1.0 - eta) * nbar_b)),
        sum_achieved_by: "coherent-state encoding, optimum reception",
    })
}

/// Rate of the squeezed-state/homodyne code: Alice sends real messages on
/// squeezed states `|alpha_1; z>`, Bob sends the hardest-squeezed vacuum his
/// budget allows (`Z = asinh(sqrt(nbar_B))`), Charlie homodynes:
///
/// `R_1 = (1/2) ln(1 + 4 (nbar_A - sinh^2 z) / (e^{-2z} + (1-eta) e^{-2Z} / eta))`.
///
/// At `eta = 1` Bob's term drops entirely.
pub fn squeezed_homodyne_rate(
    eta: f64,
    nbar_a: f64,
    nbar_b: f64,
    z: f64,
) -> Result<Entropy> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidModel(format!(
            "transmissivity must lie in (0, 1], got {eta}"
        )));
    }
    if !(nbar_a >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_a));
    }
    if !(nbar_b >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_b));
    }
    let spent = z.sinh().powi(2);
    if spent > nbar_a + 1e-12 {
        return Err(Error::SqueezeBudgetExceeded {
            used: spent,
            budget: nbar_a,
        });
    }
    let signal = (nbar_a - spent).max(0.0);
    let bob_term = if eta == 1.0 {
        0.0
    } else {
        let big_z = nbar_b.sqrt().asinh();
        (1.0 - eta) * (-2.0 * big_z).exp() / eta
    };
    let denom = (-2.0 * z).exp() + bob_term;
    Ok(Entropy::from_nats(0.5 * (1.0 + 4.0 * signal / denom).ln()))
}

/// The same rate in the limit of an infinitely strong Bob squeeze
/// (`nbar_B -> infinity`, so his interference term vanishes):
/// `(1/2) ln(1 + 4 e^{2z} (nbar_A - sinh^2 z))`.
pub fn squeezed_homodyne_rate_limit(nbar_a: f64, z: f64) -> Result<Entropy> {
    if !(nbar_a >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_a));
    }
    let spent = z.sinh().powi(2);
    if spent > nbar_a + 1e-12 {
        return Err(Error::SqueezeBudgetExceeded {
            used: spent,
            budget: nbar_a,
        });
    }
    let signal = (nbar_a - spent).max(0.0);
    Ok(Entropy::from_nats(
        0.5 * (1.0 + 4.0 * (2.0 * z).exp() * signal).ln(),
    ))
}

/// Alice's optimal squeeze parameter, `z = ln(2 nbar_A + 1) / 2`. Always
/// affordable: `sinh^2 z = nbar_A^2 / (2 nbar_A + 1) <= nbar_A`.
pub fn optimal_squeeze(nbar_a: f64) -> Result<f64> {
    if !(nbar_a >= 0.0) {
        return Err(Error::NegativePhotonNumber(nbar_a));
    }
    Ok(0.5 * (2.0 * nbar_a + 1.0).ln())
}

/// One row of the asymptotic-achievability table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioRow {
    pub nbar: f64,
    /// `rate / g(nbar)` with `nbar_B = nbar` held finite: Bob's residual
    /// anti-squeezed leakage keeps this strictly below the iterated limit.
    pub ratio_equal_budget: f64,
    /// `rate / g(nbar)` in the iterated limit (`nbar_B -> infinity` first);
    /// at the optimal squeeze this is `ln(2 nbar + 1) / g(nbar)`.
    pub ratio_limit: f64,
}

/// Sweeps the squeezed-state/homodyne rate at the optimal squeeze over an
/// increasing photon-number grid, reporting the ratio to the individual
/// outer bound `g(nbar)` both with `nbar_B = nbar` held finite and in the
/// iterated large-`nbar_B` limit. Both columns increase towards one.
pub fn asymptotic_ratio(eta: f64, nbar_grid: &[f64]) -> Result<Vec<RatioRow>> {
    if nbar_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidModel(
            "photon-number grid must be strictly increasing".into(),
        ));
    }
    nbar_grid
        .iter()
        .map(|&nbar| {
            let z = optimal_squeeze(nbar)?;
            let g = g_nats(nbar);
            let finite = squeezed_homodyne_rate(eta, nbar, nbar, z)?.nats();
            let limit = squeezed_homodyne_rate_limit(nbar, z)?.nats();
            Ok(RatioRow {
                nbar,
                ratio_equal_budget: if g > 0.0 { finite / g } else { 0.0 },
                ratio_limit: if g > 0.0 { limit / g } else { 0.0 },
            })
        })
        .collect()
}
