//! Wideband (frequency-multiplexed) capacity regions and water-filling
//! photon allocations for homodyne/heterodyne and optimal reception, with a
//! discretized Lagrange-multiplier oracle.
//!
//! With homodyne or heterodyne detection the subset bounds are
//! `sqrt(sum_{k in S} eta_k P_k / (pi hbar))` nats per second; optimal
//! reception improves every bound by the factor `pi / sqrt(3)`. The optimal
//! per-frequency photon allocations are water-filling (homodyne) and
//! Bose-Einstein shaped (optimal reception).

use crate::region::RateRegion;
use crate::{Error, Result};

/// Planck's reduced constant in SI units, for callers working in J and Hz.
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Frequency ceiling multiplier: integrals and the discretized oracle are
/// truncated at `50 sqrt(P/hbar)`, far beyond both the hard water-filling
/// cutoff `4 sqrt(pi P / hbar)` and the exponential tail of the
/// Bose-Einstein allocation (tail mass < 1e-10 of the budget).
const CEILING_FACTOR: f64 = 50.0;

/// An `m`-user wideband MAC: transmissivities summing to one, average-power
/// budgets, and the action unit `hbar` (1 in natural units).
#[derive(Debug, Clone, PartialEq)]
pub struct WidebandModel {
    transmissivities: Vec<f64>,
    powers: Vec<f64>,
    hbar: f64,
}

impl WidebandModel {
    pub fn new(transmissivities: Vec<f64>, powers: Vec<f64>, hbar: f64) -> Result<WidebandModel> {
        if transmissivities.is_empty() || transmissivities.len() != powers.len() {
            return Err(Error::InvalidModel(format!(
                "need matching nonempty parameter lists, got {} transmissivities and {} powers",
                transmissivities.len(),
                powers.len()
            )));
        }
        if transmissivities.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(Error::InvalidModel(
                "transmissivities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = transmissivities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!(
                "transmissivities must sum to one, got {total}"
            )));
        }
        if powers.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidModel("powers must be nonnegative".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidModel(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        Ok(WidebandModel {
            transmissivities,
            powers,
            hbar,
        })
    }

    /// Two-user model with transmissivities `(eta, 1 - eta)` in natural units.
    pub fn two_user(eta: f64, power_a: f64, power_b: f64) -> Result<WidebandModel> {
        WidebandModel::new(vec![eta, 1.0 - eta], vec![power_a, power_b], 1.0)
    }

    pub fn num_users(&self) -> usize {
        self.transmissivities.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn transmissivities(&self) -> &[f64] {
        &self.transmissivities
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Effective received power of a subset mask: `sum_{k in S} eta_k P_k`.
    pub fn effective_power(&self, mask: u32) -> f64 {
        (0..self.num_users())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.transmissivities[i] * self.powers[i])
            .sum()
    }

    fn effective_power_for(&self, target: AllocationTarget) -> Result<(f64, f64)> {
        match target {
            AllocationTarget::User(k) => {
                if k >= self.num_users() {
                    return Err(Error::InvalidModel(format!(
                        "user index {k} out of range for {} users",
                        self.num_users()
                    )));
                }
                Ok((
                    self.transmissivities[k] * self.powers[k],
                    self.transmissivities[k],
                ))
            }
            AllocationTarget::Combined => Ok((self.effective_power(self.full_mask()), 1.0)),
        }
    }

    fn full_mask(&self) -> u32 {
        (1u32 << self.num_users()) - 1
    }

    /// Capacity region with homodyne (equivalently heterodyne) detection:
    /// `bound(S) = sqrt(sum_{k in S} eta_k P_k / (pi hbar))` nats/s.
    pub fn homodyne_region(&self) -> RateRegion {
        RateRegion::from_bound_fn(self.num_users(), |mask| {
            (self.effective_power(mask) / (std::f64::consts::PI * self.hbar)).sqrt()
        })
        .expect("sqrt of a monotone sum is monotone")
    }

    /// Capacity region with optimal reception:
    /// `bound(S) = sqrt(pi sum_{k in S} eta_k P_k / (3 hbar))` nats/s,
    /// a factor `pi/sqrt(3)` above the homodyne bounds.
    pub fn optimal_region(&self) -> RateRegion {
        RateRegion::from_bound_fn(self.num_users(), |mask| {
            (std::f64::consts::PI * self.effective_power(mask) / (3.0 * self.hbar)).sqrt()
        })
        .expect("sqrt of a monotone sum is monotone")
    }

    /// Water-filling allocation that achieves the homodyne bound for the
    /// selected target. In effective units the allocation is
    /// `(1/omega) sqrt(pi P_eff / hbar) - 1/4` up to the cutoff
    /// `4 sqrt(pi P_eff / hbar)`; per-user values divide out `eta_k`.
    pub fn waterfill_homodyne(&self, target: AllocationTarget) -> Result<SpectralAllocation> {
        let (p_eff, weight) = self.effective_power_for(target)?;
        if p_eff == 0.0 {
            return Ok(SpectralAllocation::empty(weight));
        }
        let coeff = (std::f64::consts::PI * p_eff / self.hbar).sqrt();
        let alloc = SpectralAllocation::new(
            AllocationForm::WaterFill { coeff },
            4.0 * coeff,
            weight,
            self.hbar,
        );
        Ok(alloc)
    }

    /// Bose-Einstein-shaped allocation that achieves the optimal-reception
    /// bound: in effective units `1 / (exp(sqrt(pi hbar / (12 P_eff)) omega) - 1)`,
    /// supported on all `omega > 0`.
    pub fn optimal_allocation(&self, target: AllocationTarget) -> Result<SpectralAllocation> {
        let (p_eff, weight) = self.effective_power_for(target)?;
        if p_eff == 0.0 {
            return Ok(SpectralAllocation::empty(weight));
        }
        let c = (std::f64::consts::PI * self.hbar / (12.0 * p_eff)).sqrt();
        Ok(SpectralAllocation::new(
            AllocationForm::BoseEinstein { c },
            f64::INFINITY,
            weight,
            self.hbar,
        ))
    }

    /// Allocations achieving the lower-right corner of the two-user homodyne
    /// region: Alice water-fills her own budget and Bob transmits the
    /// residual `(n'_AB - eta n_A) / (1 - eta)`. The achieved corner is
    /// `(b1, b12 - b1)` where both the `R1` and sum constraints are tight.
    ///
    /// Degenerate transmissivities fall back to the single-user allocation:
    /// at `eta = 1` Bob's port is disconnected, at `eta = 0` Alice's is.
    pub fn corner_allocations(&self) -> Result<(SpectralAllocation, SpectralAllocation)> {
        if self.num_users() != 2 {
            return Err(Error::InvalidModel(
                "corner allocations are defined for two users".into(),
            ));
        }
        let eta = self.transmissivities[0];
        let alice = self.waterfill_homodyne(AllocationTarget::User(0))?;
        if eta == 1.0 || eta == 0.0 {
            let bob = if eta == 1.0 {
                SpectralAllocation::empty(0.0)
            } else {
                self.waterfill_homodyne(AllocationTarget::User(1))?
            };
            return Ok((alice, bob));
        }
        let p_a_eff = eta * self.powers[0];
        let p_tot = self.effective_power(0b11);
        if p_tot == 0.0 {
            return Ok((alice, SpectralAllocation::empty(1.0 - eta)));
        }
        let coeff_total = (std::f64::consts::PI * p_tot / self.hbar).sqrt();
        let coeff_single = if p_a_eff > 0.0 {
            (std::f64::consts::PI * p_a_eff / self.hbar).sqrt()
        } else {
            0.0
        };
        let bob = SpectralAllocation::new(
            AllocationForm::Residual {
                coeff_total,
                coeff_single,
            },
            4.0 * coeff_total,
            1.0 - eta,
            self.hbar,
        );
        Ok((alice, bob))
    }

    /// Rate pair at the lower-right corner of the homodyne region,
    /// `(b1, b12 - b1)`.
    pub fn homodyne_corner_rates(&self) -> Result<[f64; 2]> {
        if self.num_users() != 2 {
            return Err(Error::InvalidModel(
                "corner rates are defined for two users".into(),
            ));
        }
        let region = self.homodyne_region();
        let b1 = region.bound(&[0]);
        Ok([b1, region.bound(&[0, 1]) - b1])
    }
}

/// Which budget an allocation serves: one user's own, or the combined
/// (transmissivity-weighted) budget behind the sum-rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationTarget {
    User(usize),
    Combined,
}

/// Detection family for the discretized oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidebandDetection {
    Homodyne,
    Heterodyne,
    Optimal,
}

impl WidebandDetection {
    /// Rate in nats per channel use at effective photon number `x`.
    fn rate(self, x: f64) -> f64 {
        match self {
            WidebandDetection::Homodyne => 0.5 * (1.0 + 4.0 * x).ln(),
            WidebandDetection::Heterodyne => (1.0 + x).ln(),
            WidebandDetection::Optimal => crate::gaussian::g_nats(x),
        }
    }

    /// Allocation maximizing `rate(x) - lam * x` (the KKT stationary point,
    /// clamped to zero).
    fn allocation(self, lam: f64) -> f64 {
        match self {
            WidebandDetection::Homodyne => (0.5 / lam - 0.25).max(0.0),
            WidebandDetection::Heterodyne => (1.0 / lam - 1.0).max(0.0),
            WidebandDetection::Optimal => {
                if lam > 700.0 {
                    0.0
                } else {
                    let e = lam.exp_m1();
                    if e.is_infinite() {
                        0.0
                    } else {
                        1.0 / e
                    }
                }
            }
        }
    }
}

/// Closed-form shape of a photon-number allocation, in effective units
/// (`eta`-weighted photon number at the receiver).
#[derive(Debug, Clone, PartialEq)]
enum AllocationForm {
    Empty,
    /// `coeff / omega - 1/4` for `omega <= 4 coeff`.
    WaterFill { coeff: f64 },
    /// `1 / (exp(c omega) - 1)` on all `omega > 0`.
    BoseEinstein { c: f64 },
    /// Total water-fill minus a single-user water-fill (Bob's residual).
    Residual { coeff_total: f64, coeff_single: f64 },
    /// Discrete oracle output, midpoint-sampled (`omega`, effective value).
    Table { step: f64, values: Vec<f64> },
}

/// A mean-photon-number-per-frequency allocation `n(omega)` together with
/// its power integral `int hbar omega n(omega) domega / 2 pi`.
///
/// Values are reported in the owning user's units; `eta_weight` is the
/// multiplier taking them to effective (received) units. The power integral
/// is computed by adaptive quadrature at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAllocation {
    form: AllocationForm,
    cutoff: f64,
    eta_weight: f64,
    power: f64,
}

impl SpectralAllocation {
    fn empty(eta_weight: f64) -> SpectralAllocation {
        SpectralAllocation {
            form: AllocationForm::Empty,
            cutoff: 0.0,
            eta_weight,
            power: 0.0,
        }
    }

    fn new(form: AllocationForm, cutoff: f64, eta_weight: f64, hbar: f64) -> SpectralAllocation {
        let mut alloc = SpectralAllocation {
            form,
            cutoff,
            eta_weight,
            power: 0.0,
        };
        alloc.power = alloc.integrate_power(hbar);
        alloc
    }

    fn from_table(
        step: f64,
        values: Vec<f64>,
        eta_weight: f64,
        hbar: f64,
    ) -> SpectralAllocation {
        let cutoff = step * values.len() as f64;
        // Discrete power sum matching the oracle's budget definition,
        // converted from effective to the owning user's units.
        let scale = if eta_weight > 0.0 { 1.0 / eta_weight } else { 0.0 };
        let power: f64 = scale
            * values
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    hbar * (i as f64 + 0.5) * step * x * step / (2.0 * std::f64::consts::PI)
                })
                .sum::<f64>();
        SpectralAllocation {
            form: AllocationForm::Table { step, values },
            cutoff,
            eta_weight,
            power,
        }
    }

    /// True when the allocation is identically zero.
    pub fn is_empty(&self) -> bool {
        matches!(self.form, AllocationForm::Empty)
    }

    /// Frequency beyond which the allocation vanishes (infinite for the
    /// Bose-Einstein shape).
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Multiplier taking per-user values to effective (received) units.
    pub fn eta_weight(&self) -> f64 {
        self.eta_weight
    }

    /// Power integral in the owning user's units.
    pub fn power(&self) -> f64 {
        self.power
    }

    /// Per-user photon number at `omega`.
    pub fn value(&self, omega: f64) -> f64 {
        if self.eta_weight == 0.0 {
            return 0.0;
        }
        self.effective_value(omega) / self.eta_weight
    }

    /// Effective (received) photon number at `omega`.
    pub fn effective_value(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match &self.form {
            AllocationForm::Empty => 0.0,
            AllocationForm::WaterFill { coeff } => {
                if omega <= self.cutoff {
                    (coeff / omega - 0.25).max(0.0)
                } else {
                    0.0
                }
            }
            AllocationForm::BoseEinstein { c } => {
                let t = c * omega;
                if t > 700.0 {
                    0.0
                } else {
                    1.0 / t.exp_m1()
                }
            }
            AllocationForm::Residual {
                coeff_total,
                coeff_single,
            } => {
                let total = if omega <= 4.0 * coeff_total {
                    (coeff_total / omega - 0.25).max(0.0)
                } else {
                    0.0
                };
                let single = if *coeff_single > 0.0 && omega <= 4.0 * coeff_single {
                    (coeff_single / omega - 0.25).max(0.0)
                } else {
                    0.0
                };
                (total - single).max(0.0)
            }
            AllocationForm::Table { step, values } => {
                let idx = (omega / step - 0.5).round();
                if idx < 0.0 || idx as usize >= values.len() {
                    0.0
                } else {
                    values[idx as usize]
                }
            }
        }
    }

    /// Samples `(omega, per-user value)` on `count` uniform points up to the
    /// cutoff (or the documented ceiling when there is none).
    pub fn sample(&self, count: usize) -> Vec<(f64, f64)> {
        let limit = match &self.form {
            AllocationForm::BoseEinstein { c } => bose_ceiling(*c),
            _ if self.cutoff.is_finite() && self.cutoff > 0.0 => self.cutoff,
            _ => 1.0,
        };
        (1..=count)
            .map(|i| {
                let omega = limit * i as f64 / count as f64;
                (omega, self.value(omega))
            })
            .collect()
    }

    /// `int hbar omega n(omega) domega / (2 pi)` by adaptive Simpson
    /// quadrature (per-user units).
    fn integrate_power(&self, hbar: f64) -> f64 {
        if self.eta_weight == 0.0 {
            return 0.0;
        }
        let integrand = |omega: f64| -> f64 {
            hbar * omega * self.effective_value(omega) / (2.0 * std::f64::consts::PI)
        };
        let scale = 1.0 / self.eta_weight;
        match &self.form {
            AllocationForm::Empty => 0.0,
            AllocationForm::WaterFill { .. } => {
                scale * adaptive_simpson(&integrand, 0.0, self.cutoff, 1e-12)
            }
            AllocationForm::BoseEinstein { c } => {
                // integrand ~ e^{-c omega}; the ceiling keeps the tail
                // below 1e-10 relative.
                scale * adaptive_simpson(&integrand, 0.0, bose_ceiling(*c), 1e-12)
            }
            AllocationForm::Residual {
                coeff_single,
                coeff_total,
            } => {
                // split at the single-user cutoff where the integrand kinks
                let omega_a = 4.0 * coeff_single;
                let omega_t = 4.0 * coeff_total;
                let first = if omega_a > 0.0 {
                    adaptive_simpson(&integrand, 0.0, omega_a.min(omega_t), 1e-12)
                } else {
                    0.0
                };
                let second = if omega_t > omega_a {
                    adaptive_simpson(&integrand, omega_a.min(omega_t), omega_t, 1e-12)
                } else {
                    0.0
                };
                scale * (first + second)
            }
            AllocationForm::Table { step, values } => {
                let mut acc = 0.0;
                for (i, x) in values.iter().enumerate() {
                    let omega = (i as f64 + 0.5) * step;
                    acc += hbar * omega * x * step / (2.0 * std::f64::consts::PI);
                }
                scale * acc
            }
        }
    }
}

/// Outcome of the discretized constrained-optimization oracle.
#[derive(Debug, Clone)]
pub struct WaterfillOracleResult {
    /// Achieved rate in nats per second.
    pub rate: f64,
    /// Recovered allocation (per-user units for a user target).
    pub allocation: SpectralAllocation,
    /// Lagrange multiplier at the budget-matching point.
    pub multiplier: f64,
    /// Budget mismatch at convergence, relative to the budget.
    pub budget_residual: f64,
}

/// Numerically maximizes `sum_i (delta / 2 pi) rate(x_i)` over per-bin
/// effective allocations `x_i >= 0` subject to
/// `sum_i hbar omega_i x_i delta / 2 pi <= P_eff`, using midpoint frequency
/// bins `omega_i = (i - 1/2) delta` and bisection on the Lagrange
/// multiplier. The per-bin objective is concave, so the KKT point is exact;
/// the only error is the discretization itself.
///
/// This is the independent oracle for the closed-form wideband bounds and
/// allocations.
pub fn discretized_waterfill(
    model: &WidebandModel,
    bin_width: f64,
    detection: WidebandDetection,
    target: AllocationTarget,
) -> Result<WaterfillOracleResult> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidModel(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let (p_eff, weight) = model.effective_power_for(target)?;
    let hbar = model.hbar();
    if p_eff == 0.0 {
        return Ok(WaterfillOracleResult {
            rate: 0.0,
            allocation: SpectralAllocation::empty(weight),
            multiplier: f64::INFINITY,
            budget_residual: 0.0,
        });
    }

    let ceiling = CEILING_FACTOR * (p_eff / hbar).sqrt();
    let bins = (ceiling / bin_width).ceil() as usize;
    let omegas: Vec<f64> = (0..bins).map(|i| (i as f64 + 0.5) * bin_width).collect();
    let budget_of = |lam: f64| -> f64 {
        omegas
            .iter()
            .map(|&w| hbar * w * detection.allocation(lam * hbar * w) * bin_width)
            .sum::<f64>()
            / (2.0 * std::f64::consts::PI)
    };

    // Bracket the multiplier: budget decreases monotonically in lambda.
    let mut lo = 1.0 / (hbar * ceiling);
    let mut iterations = 0usize;
    while budget_of(lo) < p_eff {
        lo *= 0.5;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Nonconvergence {
                iterations,
                residual: (budget_of(lo) - p_eff) / p_eff,
            });
        }
    }
    let mut hi = lo;
    while budget_of(hi) > p_eff {
        hi *= 2.0;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Nonconvergence {
                iterations,
                residual: (budget_of(hi) - p_eff) / p_eff,
            });
        }
    }
    let mut lam = 0.5 * (lo + hi);
    for _ in 0..200 {
        lam = 0.5 * (lo + hi);
        let b = budget_of(lam);
        if (b - p_eff).abs() <= 1e-13 * p_eff {
            break;
        }
        if b > p_eff {
            lo = lam;
        } else {
            hi = lam;
        }
        iterations += 1;
    }
    let residual = (budget_of(lam) - p_eff) / p_eff;
    if residual.abs() > 1e-9 {
        return Err(Error::Nonconvergence {
            iterations,
            residual,
        });
    }

    let values: Vec<f64> = omegas
        .iter()
        .map(|&w| detection.allocation(lam * hbar * w))
        .collect();
    let rate: f64 = omegas
        .iter()
        .zip(&values)
        .map(|(_, &x)| detection.rate(x) * bin_width)
        .sum::<f64>()
        / (2.0 * std::f64::consts::PI);

    Ok(WaterfillOracleResult {
        rate,
        allocation: SpectralAllocation::from_table(bin_width, values, weight, hbar),
        multiplier: lam,
        budget_residual: residual,
    })
}

/// Frequency ceiling for the Bose-Einstein allocation with decay constant
/// `c`: the documented `50 sqrt(P_eff / hbar)`, expressed through
/// `c = sqrt(pi hbar / (12 P_eff))`.
fn bose_ceiling(c: f64) -> f64 {
    CEILING_FACTOR * (std::f64::consts::PI / 12.0).sqrt() / c
}

/// Adaptive Simpson quadrature with relative tolerance `tol`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    let scale = whole.abs().max(1.0);
    recurse(f, a, fa, b, fb, fm, whole, tol * scale, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn unit_power_gives_unit_homodyne_bound() {
        let model = WidebandModel::new(vec![1.0], vec![PI], 1.0).unwrap();
        assert_relative_eq!(model.homodyne_region().bound(&[0]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_user_sum_bound() {
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 2.0 * PI).unwrap();
        assert_relative_eq!(
            model.homodyne_region().bound(&[0, 1]),
            (2.0f64).sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn zero_power_bounds_vanish() {
        let model = WidebandModel::two_user(0.5, 0.0, 0.0).unwrap();
        let region = model.homodyne_region();
        for mask in region.subset_masks() {
            assert_eq!(region.bound_mask(mask), 0.0);
        }
        assert!(model
            .waterfill_homodyne(AllocationTarget::Combined)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn optimal_bounds_improve_by_pi_over_sqrt_three() {
        let model = WidebandModel::two_user(0.3, 2.5, 4.0).unwrap();
        let hom = model.homodyne_region();
        let opt = model.optimal_region();
        let factor = PI / (3.0f64).sqrt();
        for mask in hom.subset_masks() {
            assert_relative_eq!(
                opt.bound_mask(mask),
                factor * hom.bound_mask(mask),
                max_relative = 1e-13
            );
        }
        let unit = WidebandModel::new(vec![1.0], vec![3.0 / PI], 1.0).unwrap();
        assert_relative_eq!(unit.optimal_region().bound(&[0]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn wideband_bounds_scale_as_sqrt_power() {
        let model = WidebandModel::two_user(0.4, 1.0, 2.0).unwrap();
        let doubled = WidebandModel::two_user(0.4, 2.0, 4.0).unwrap();
        for (r, d) in [
            (model.homodyne_region(), doubled.homodyne_region()),
            (model.optimal_region(), doubled.optimal_region()),
        ] {
            for mask in r.subset_masks() {
                assert_relative_eq!(
                    d.bound_mask(mask),
                    (2.0f64).sqrt() * r.bound_mask(mask),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn waterfill_allocation_matches_the_closed_form() {
        // eta P_A = pi: cutoff 4 pi, effective allocation pi/omega - 1/4.
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 0.0).unwrap();
        let alloc = model.waterfill_homodyne(AllocationTarget::User(0)).unwrap();
        assert_relative_eq!(alloc.cutoff(), 4.0 * PI, epsilon = 1e-12);
        for omega in [0.5, 1.0, 3.0, 11.0] {
            assert_relative_eq!(
                alloc.effective_value(omega),
                PI / omega - 0.25,
                max_relative = 1e-13
            );
        }
        assert_eq!(alloc.effective_value(13.0), 0.0);
        // power integral recovers Alice's own budget
        assert_relative_eq!(alloc.power(), 2.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn combined_waterfill_uses_the_total_effective_power() {
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 2.0 * PI).unwrap();
        let alloc = model.waterfill_homodyne(AllocationTarget::Combined).unwrap();
        let coeff = (PI * 2.0 * PI).sqrt();
        assert_relative_eq!(alloc.cutoff(), 4.0 * coeff, epsilon = 1e-12);
        assert_relative_eq!(alloc.power(), 2.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn allocations_are_nonincreasing_on_their_support() {
        let model = WidebandModel::two_user(0.5, 3.0, 1.0).unwrap();
        for alloc in [
            model.waterfill_homodyne(AllocationTarget::User(0)).unwrap(),
            model.optimal_allocation(AllocationTarget::User(0)).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for i in 1..200 {
                let omega = i as f64 * 0.05;
                let v = alloc.effective_value(omega);
                assert!(v <= prev + 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn optimal_allocation_power_integral_recovers_the_budget() {
        // the identity int_0^inf omega/(e^{c omega}-1) domega = pi^2/(6 c^2)
        // fixes the normalization; quadrature must land on the budget.
        let model = WidebandModel::two_user(0.5, 5.0, 3.0).unwrap();
        let a = model.optimal_allocation(AllocationTarget::User(0)).unwrap();
        assert_relative_eq!(a.power(), 5.0, max_relative = 1e-6);
        let c = model.optimal_allocation(AllocationTarget::Combined).unwrap();
        assert_relative_eq!(c.power(), 0.5 * 5.0 + 0.5 * 3.0, max_relative = 1e-6);
    }

    #[test]
    fn optimal_allocation_grows_with_power() {
        let lo = WidebandModel::two_user(0.5, 2.0, 0.0).unwrap();
        let hi = WidebandModel::two_user(0.5, 4.0, 0.0).unwrap();
        let a_lo = lo.optimal_allocation(AllocationTarget::User(0)).unwrap();
        let a_hi = hi.optimal_allocation(AllocationTarget::User(0)).unwrap();
        for omega in [0.3, 1.0, 2.5] {
            assert!(a_hi.effective_value(omega) > a_lo.effective_value(omega));
        }
    }

    #[test]
    fn corner_allocations_achieve_the_corner_and_respect_budgets() {
        let model = WidebandModel::two_user(0.5, PI, PI).unwrap();
        let (alice, bob) = model.corner_allocations().unwrap();
        assert_relative_eq!(alice.power(), PI, max_relative = 1e-9);
        assert_relative_eq!(bob.power(), PI, max_relative = 1e-9);
        // residual nonnegative across the grid
        for i in 1..2000 {
            let omega = i as f64 * 0.01;
            assert!(bob.effective_value(omega) >= 0.0);
        }
        let corner = model.homodyne_corner_rates().unwrap();
        assert_relative_eq!(corner[0], 0.70710678118654752, epsilon = 1e-12);
        assert_relative_eq!(corner[1], 0.29289321881345248, epsilon = 1e-12);
        // both tight constraints
        let region = model.homodyne_region();
        assert!((corner[0] - region.bound(&[0])).abs() < 1e-12);
        assert!((corner[0] + corner[1] - region.bound(&[0, 1])).abs() < 1e-12);
    }

    #[test]
    fn corner_with_idle_bob_is_single_user() {
        let model = WidebandModel::two_user(0.5, PI, 0.0).unwrap();
        let corner = model.homodyne_corner_rates().unwrap();
        assert_relative_eq!(corner[0], (0.5f64).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(corner[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_transmissivity_falls_back_to_single_user() {
        let model = WidebandModel::new(vec![1.0, 0.0], vec![PI, 5.0], 1.0).unwrap();
        let (alice, bob) = model.corner_allocations().unwrap();
        assert!(!alice.is_empty());
        assert!(bob.is_empty());
    }

    #[test]
    fn residual_allocation_is_pointwise_nonnegative_wherever_both_forms_apply() {
        // analytic: n'_AB - eta n_A = (c_tot - c_A)/omega >= 0 below Alice's
        // cutoff, and equals the total water-fill above it.
        let model = WidebandModel::two_user(0.7, 4.0, 9.0).unwrap();
        let (_, bob) = model.corner_allocations().unwrap();
        for i in 1..5000 {
            let omega = i as f64 * 0.005;
            assert!(
                bob.effective_value(omega) >= 0.0,
                "negative residual at {omega}"
            );
        }
    }

    #[test]
    fn oracle_converges_to_the_homodyne_closed_form() {
        // eta P_A = pi, natural units: closed-form rate 1.
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 0.0).unwrap();
        let omega_max = 4.0 * PI;
        let mut last_err = f64::INFINITY;
        for frac in [1e-1, 1e-2, 1e-3] {
            let res = discretized_waterfill(
                &model,
                frac * omega_max,
                WidebandDetection::Homodyne,
                AllocationTarget::User(0),
            )
            .unwrap();
            let err = (res.rate - 1.0).abs();
            assert!(err < last_err + 1e-9, "error should shrink with delta");
            last_err = err;
        }
        assert!(last_err < 0.01, "rate error {last_err} at delta = 1e-3 wmax");
    }

    #[test]
    fn oracle_allocation_matches_the_water_fill_table() {
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 0.0).unwrap();
        let omega_max = 4.0 * PI;
        let step = 1e-3 * omega_max;
        let res = discretized_waterfill(
            &model,
            step,
            WidebandDetection::Homodyne,
            AllocationTarget::User(0),
        )
        .unwrap();
        // interior bins (well inside the support): compare the oracle table
        // at bin centers against pi/omega - 1/4
        let interior = (0.1 * omega_max / step) as usize..(0.9 * omega_max / step) as usize;
        for i in interior {
            let omega = (i as f64 + 0.5) * step;
            let expect = PI / omega - 0.25;
            let got = res.allocation.effective_value(omega);
            assert!(
                (got - expect).abs() < 1e-3,
                "allocation mismatch at bin {i} (omega {omega}): {got} vs {expect}"
            );
        }
        assert_relative_eq!(res.allocation.power(), 2.0 * PI, max_relative = 1e-6);
    }

    #[test]
    fn oracle_optimal_detection_converges_to_the_scaled_rate() {
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 0.0).unwrap();
        let res = discretized_waterfill(
            &model,
            1e-3 * 4.0 * PI,
            WidebandDetection::Optimal,
            AllocationTarget::User(0),
        )
        .unwrap();
        let target = PI / (3.0f64).sqrt();
        assert!(
            (res.rate - target).abs() / target < 0.01,
            "optimal oracle rate {} vs {target}",
            res.rate
        );
    }

    #[test]
    fn oracle_heterodyne_matches_the_homodyne_closed_form() {
        let model = WidebandModel::two_user(0.5, 2.0 * PI, 0.0).unwrap();
        let res = discretized_waterfill(
            &model,
            1e-3 * 4.0 * PI,
            WidebandDetection::Heterodyne,
            AllocationTarget::User(0),
        )
        .unwrap();
        assert!(
            (res.rate - 1.0).abs() < 0.01,
            "heterodyne oracle rate {} vs 1",
            res.rate
        );
    }

    #[test]
    fn oracle_rejects_nonpositive_bin_width() {
        let model = WidebandModel::two_user(0.5, 1.0, 1.0).unwrap();
        assert!(discretized_waterfill(
            &model,
            0.0,
            WidebandDetection::Homodyne,
            AllocationTarget::Combined
        )
        .is_err());
    }

    #[test]
    fn si_mode_scales_rates() {
        let p = PI * HBAR_SI;
        let model = WidebandModel::new(vec![1.0], vec![p], HBAR_SI).unwrap();
        assert_relative_eq!(model.homodyne_region().bound(&[0]), 1.0, epsilon = 1e-10);
    }
}
