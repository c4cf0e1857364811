//! Capacity regions of the single-mode coherent-state MAC under homodyne,
//! heterodyne, and optimal (joint-measurement) reception, the
//! additive-classical-noise variant, and a Monte Carlo simulator of the
//! classical-equivalent Gaussian channels.
//!
//! Homodyne detection reduces the channel to a scalar Gaussian MAC with
//! noise variance 1/4; heterodyne to a two-dimensional Gaussian MAC with
//! noise variance 1/2 per dimension. With optimal reception the subset
//! bounds are thermal entropies `g(sum eta_i nbar_i)`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::gaussian::g_nats;
use crate::region::RateRegion;
use crate::{Error, Result};

/// Smallest sample count for which the simulator does not raise its
/// low-sample warning flag.
pub const MIN_SAMPLES: usize = 10_000;

/// An `m`-user beam-splitter MAC: transmissivities summing to one and a
/// mean-photon-number budget per user.
#[derive(Debug, Clone, PartialEq)]
pub struct MacModel {
    transmissivities: Vec<f64>,
    photon_budgets: Vec<f64>,
}

impl MacModel {
    pub fn new(transmissivities: Vec<f64>, photon_budgets: Vec<f64>) -> Result<MacModel> {
        if transmissivities.is_empty() || transmissivities.len() != photon_budgets.len() {
            return Err(Error::InvalidModel(format!(
                "need matching nonempty parameter lists, got {} transmissivities and {} budgets",
                transmissivities.len(),
                photon_budgets.len()
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
        if let Some(bad) = photon_budgets.iter().find(|n| !(**n >= 0.0)) {
            return Err(Error::NegativePhotonNumber(*bad));
        }
        Ok(MacModel {
            transmissivities,
            photon_budgets,
        })
    }

    /// Two-user model with transmissivities `(eta, 1 - eta)`.
    pub fn two_user(eta: f64, nbar_a: f64, nbar_b: f64) -> Result<MacModel> {
        MacModel::new(vec![eta, 1.0 - eta], vec![nbar_a, nbar_b])
    }

    pub fn num_users(&self) -> usize {
        self.transmissivities.len()
    }

    pub fn transmissivities(&self) -> &[f64] {
        &self.transmissivities
    }

    pub fn photon_budgets(&self) -> &[f64] {
        &self.photon_budgets
    }

    /// Received mean photon number contributed by a subset mask:
    /// `sum_{i in S} eta_i nbar_i`.
    pub fn received_photons(&self, mask: u32) -> f64 {
        (0..self.num_users())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.transmissivities[i] * self.photon_budgets[i])
            .sum()
    }

    /// Capacity region with homodyne detection:
    /// `bound(S) = (1/2) ln(1 + 4 sum_{i in S} eta_i nbar_i)`.
    pub fn homodyne_region(&self) -> RateRegion {
        RateRegion::from_bound_fn(self.num_users(), |mask| {
            0.5 * (1.0 + 4.0 * self.received_photons(mask)).ln()
        })
        .expect("homodyne bounds are monotone")
    }

    /// Capacity region with heterodyne detection:
    /// `bound(S) = ln(1 + sum_{i in S} eta_i nbar_i)`.
    pub fn heterodyne_region(&self) -> RateRegion {
        RateRegion::from_bound_fn(self.num_users(), |mask| {
            (1.0 + self.received_photons(mask)).ln()
        })
        .expect("heterodyne bounds are monotone")
    }

    /// Capacity region with optimal (joint-measurement) reception for one or
    /// two users: `bound(S) = g(sum_{i in S} eta_i nbar_i)`.
    pub fn optimal_region(&self) -> Result<RateRegion> {
        if self.num_users() > 2 {
            return Err(Error::InvalidModel(format!(
                "the optimal-reception closed form is stated for two users; \
                 use optimal_region_extension for {} users",
                self.num_users()
            )));
        }
        Ok(self.optimal_region_extension())
    }

    /// `g(sum eta_i nbar_i)` subset bounds for any number of users. Beyond
    /// two users this is the natural generalization of the two-user closed
    /// form, not an independently established result; callers presenting
    /// more than two users should label the output accordingly.
    pub fn optimal_region_extension(&self) -> RateRegion {
        RateRegion::from_bound_fn(self.num_users(), |mask| {
            g_nats(self.received_photons(mask))
        })
        .expect("g of a monotone sum is monotone")
    }
}

/// Two-user coherent-state MAC with additive classical white-Gaussian noise
/// of mean photon number `N` at the output.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyMacModel {
    base: MacModel,
    noise_var: f64,
}

impl NoisyMacModel {
    pub fn new(base: MacModel, noise_var: f64) -> Result<NoisyMacModel> {
        if base.num_users() != 2 {
            return Err(Error::InvalidModel(
                "the additive-noise region is stated for two users".into(),
            ));
        }
        if !(noise_var >= 0.0) {
            return Err(Error::NegativePhotonNumber(noise_var));
        }
        Ok(NoisyMacModel { base, noise_var })
    }

    pub fn base(&self) -> &MacModel {
        &self.base
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Optimal-reception region with additive noise:
    /// `bound(S) = g(sum_{i in S} eta_i nbar_i + N) - g(N)`.
    /// Reduces exactly to the noiseless region at `N = 0`.
    pub fn optimal_region(&self) -> RateRegion {
        let n = self.noise_var;
        RateRegion::from_bound_fn(self.base.num_users(), |mask| {
            g_nats(self.base.received_photons(mask) + n) - g_nats(n)
        })
        .expect("noisy bounds are monotone")
    }
}

/// Detection model for the classical-equivalent channel simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

/// Plug-in mutual-information estimates per constraint subset.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    num_users: usize,
    samples: usize,
    seed: u64,
    /// Indexed by subset bitmask (entry 0 unused).
    estimates: Vec<f64>,
    low_sample_warning: bool,
}

impl SimulationResult {
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn low_sample_warning(&self) -> bool {
        self.low_sample_warning
    }

    pub fn estimate_mask(&self, mask: u32) -> f64 {
        self.estimates[mask as usize]
    }

    pub fn estimate(&self, users: &[usize]) -> f64 {
        self.estimate_mask(users.iter().fold(0, |m, i| m | (1 << i)))
    }
}

/// Simulates the classical channel equivalent to the coherent-state MAC
/// under `detection` and returns the Gaussian plug-in estimate of the
/// conditional mutual information `I(X_S; Y | X_{S^c})` for every nonempty
/// subset `S`. These converge to the closed-form subset bounds as the
/// sample count grows.
///
/// Deterministic per seed: samples are drawn and reduced in a fixed order.
pub fn simulate_quadrature(
    model: &MacModel,
    detection: Detection,
    samples: usize,
    seed: u64,
) -> SimulationResult {
    let m = model.num_users();
    let low_sample_warning = samples < MIN_SAMPLES;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Per-quadrature signal variances and noise variance of the equivalent
    // scalar channel(s). Homodyne: the full budget modulates the measured
    // quadrature against noise 1/4. Heterodyne: the budget splits evenly
    // across two quadratures, each read against noise 1/2.
    let (quad_count, noise_var, signal_scale) = match detection {
        Detection::Homodyne => (1usize, 0.25, 1.0),
        Detection::Heterodyne => (2usize, 0.5, 0.5),
    };

    let mut estimates = vec![0.0; 1 << m];
    for _ in 0..quad_count {
        let cov = sample_covariance(model, noise_var, signal_scale, samples, &mut rng);
        for mask in 1u32..(1 << m) as u32 {
            estimates[mask as usize] += plugin_conditional_mi(&cov, m, mask);
        }
    }

    SimulationResult {
        num_users: m,
        samples,
        seed,
        estimates,
        low_sample_warning,
    }
}

/// Sample covariance of `(x_1, .., x_m, y)` for one quadrature channel
/// `y = sum_i sqrt(eta_i) x_i + w`, with `Var x_i = signal_scale * nbar_i`
/// and `Var w = noise_var`.
fn sample_covariance(
    model: &MacModel,
    noise_var: f64,
    signal_scale: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> DMatrix<f64> {
    let m = model.num_users();
    let dim = m + 1;
    let sigmas: Vec<f64> = model
        .photon_budgets()
        .iter()
        .map(|n| (signal_scale * n).sqrt())
        .collect();
    let gains: Vec<f64> = model.transmissivities().iter().map(|e| e.sqrt()).collect();
    let noise_sigma = noise_var.sqrt();

    let mut sums = vec![0.0; dim];
    let mut prods = DMatrix::<f64>::zeros(dim, dim);
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        let mut y = 0.0;
        for i in 0..m {
            let xi: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
            x[i] = sigmas[i] * xi;
            y += gains[i] * x[i];
        }
        let w: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
        x[m] = y + noise_sigma * w;
        for i in 0..dim {
            sums[i] += x[i];
            for j in i..dim {
                prods[(i, j)] += x[i] * x[j];
            }
        }
    }
    let n = samples as f64;
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let c = prods[(i, j)] / n - (sums[i] / n) * (sums[j] / n);
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    cov
}

/// Gaussian plug-in estimate of `I(X_S; Y | X_{S^c})` from a joint sample
/// covariance of `(x_1..x_m, y)`:
/// `(1/2) ln( Var(Y | X_{S^c}) / Var(Y | X_all) )`.
fn plugin_conditional_mi(cov: &DMatrix<f64>, m: usize, mask: u32) -> f64 {
    let complement: Vec<usize> = (0..m).filter(|i| mask & (1 << i) == 0).collect();
    let all: Vec<usize> = (0..m).collect();
    let var_given_comp = conditional_variance(cov, m, &complement);
    let var_given_all = conditional_variance(cov, m, &all);
    (0.5 * (var_given_comp / var_given_all).ln()).max(0.0)
}

/// Residual variance of `y` (index `m`) given the regressors in `on`.
fn conditional_variance(cov: &DMatrix<f64>, m: usize, on: &[usize]) -> f64 {
    let vy = cov[(m, m)];
    if on.is_empty() {
        return vy;
    }
    let k = on.len();
    let mut sxx = DMatrix::<f64>::zeros(k, k);
    let mut sxy = DMatrix::<f64>::zeros(k, 1);
    for (a, &i) in on.iter().enumerate() {
        sxy[(a, 0)] = cov[(i, m)];
        for (b, &j) in on.iter().enumerate() {
            sxx[(a, b)] = cov[(i, j)];
        }
    }
    match sxx.lu().solve(&sxy) {
        Some(beta) => vy - (sxy.transpose() * beta)[(0, 0)],
        None => vy,
    }
}
