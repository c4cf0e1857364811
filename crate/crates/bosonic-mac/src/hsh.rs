//! The two-user displaced-Gaussian-state MAC: messages are classical
//! displacements of a fixed zero-mean Gaussian state with covariance `V`,
//! subject to second-moment budgets `<|alpha|^2> = N_A`, `<|beta|^2> = N_B`.
//!
//! The maximum rates reduce to maximizing `det(V + V_alpha)` over input
//! covariances with fixed trace, which is a circle geometry problem in the
//! `(V_1 - V_2)/2, V_12` plane: the optimum depends on whether the point
//! `((V_2 - V_1)/2, -V_12)` (polar coordinates `(r_V, theta_V)`) lies inside
//! the trace-budget disk. This gives two-branch closed forms and four
//! corner-achievability cases, verified here against a brute-force grid
//! oracle.
//!
//! The beam-splitter optical MAC with arbitrary Gaussian input states maps
//! onto this model with `V = eta V_A + (1-eta) V_B` and displacement budgets
//! reduced by the photons bound in the input states.

use serde::Serialize;

use crate::gaussian::{g_nats, squeeze_covariance, CovMatrix, Entropy, SqueezeParams};
use crate::region::RateRegion;
use crate::{Error, Result};

/// Displaced-Gaussian-state MAC description: received-state covariance `V`
/// and per-user displacement second-moment budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HshChannel {
    v: CovMatrix,
    n_a: f64,
    n_b: f64,
}

impl HshChannel {
    pub fn new(v: CovMatrix, n_a: f64, n_b: f64) -> Result<HshChannel> {
        v.validate_physical()?;
        if !(n_a >= 0.0) {
            return Err(Error::NegativePhotonNumber(n_a));
        }
        if !(n_b >= 0.0) {
            return Err(Error::NegativePhotonNumber(n_b));
        }
        Ok(HshChannel { v, n_a, n_b })
    }

    pub fn v(&self) -> &CovMatrix {
        &self.v
    }

    pub fn n_a(&self) -> f64 {
        self.n_a
    }

    pub fn n_b(&self) -> f64 {
        self.n_b
    }

    /// Polar coordinates `(r_V, theta_V)` of the point
    /// `((V_2 - V_1)/2, -V_12)`, with `theta_V` in `[0, 2 pi)` and the
    /// isotropic case pinned to `(0, 0)`.
    pub fn anisotropy(&self) -> (f64, f64) {
        let x = 0.5 * (self.v.v2() - self.v.v1());
        let y = -self.v.v12();
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let mut theta = y.atan2(x);
        if theta < 0.0 {
            theta += 2.0 * std::f64::consts::PI;
        }
        (r, theta)
    }

    /// Capacity region `R_1 <= rmax_individual(V, N_A)`,
    /// `R_2 <= rmax_individual(V, N_B)`, `R_1 + R_2 <= rmax_sum`.
    pub fn region(&self) -> RateRegion {
        RateRegion::two_user(
            rmax_individual(&self.v, self.n_a).nats(),
            rmax_individual(&self.v, self.n_b).nats(),
            rmax_sum(&self.v, self.n_a, self.n_b).nats(),
        )
        .expect("rmax is monotone in the budget")
    }

    /// Which branch each of the three maxima uses, as `[R1, R2, sum]`.
    pub fn branches(&self) -> [Branch; 3] {
        let (r_v, _) = self.anisotropy();
        let branch = |n: f64| {
            if n >= 2.0 * r_v {
                Branch::One
            } else {
                Branch::Two
            }
        };
        [
            branch(self.n_a),
            branch(self.n_b),
            branch(self.n_a + self.n_b),
        ]
    }
}

/// Which of the two closed-form branches applies: `One` when the budget
/// covers the anisotropy (`N >= 2 r_V`, the "inside the circle" case),
/// `Two` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    One,
    Two,
}

/// Maximum individual rate of one user over the displaced-Gaussian MAC with
/// received-state covariance `V` and displacement budget `N`:
///
/// - branch 1 (`N >= sqrt((V1-V2)^2 + 4 V12^2)`):
///   `g(V1 + V2 + N - 1/2) - g(2 det(V)^{1/2} - 1/2)`;
/// - branch 2: the anisotropy the budget cannot cover stays in the
///   determinant as a residual offset (see `max_output_det`).
pub fn rmax_individual(v: &CovMatrix, n: f64) -> Entropy {
    let d = max_output_det(v, n);
    Entropy::from_nats(rate_from_det(v, d))
}

/// Maximum sum rate: structurally identical to the individual formula at
/// total budget `N_A + N_B`, because two trace-budget disks Minkowski-sum to
/// one disk of radius `(N_A + N_B)/2`.
pub fn rmax_sum(v: &CovMatrix, n_a: f64, n_b: f64) -> Entropy {
    rmax_individual(v, n_a + n_b)
}

/// `max |V + V_alpha|` over input covariances with trace `N`.
fn max_output_det(v: &CovMatrix, n: f64) -> f64 {
    let half_sum = 0.5 * (v.v1() + v.v2() + n);
    let (r_v, _) = HshChannel {
        v: *v,
        n_a: 0.0,
        n_b: 0.0,
    }
    .anisotropy();
    let residual = (r_v - 0.5 * n).max(0.0);
    half_sum * half_sum - residual * residual
}

/// Rate obtained when the output determinant is `d`:
/// `g(2 sqrt(d) - 1/2) - g(2 sqrt(det V) - 1/2)`.
fn rate_from_det(v: &CovMatrix, d: f64) -> f64 {
    g_nats(2.0 * d.sqrt() - 0.5) - g_nats(2.0 * v.det().sqrt() - 0.5)
}

/// Polar-parameterized input covariance with trace budget `N`:
/// `V_alpha = [[r cos t + N/2, r sin t], [r sin t, -r cos t + N/2]]`,
/// positive semidefinite exactly when `r <= N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputCovChoice {
    r: f64,
    theta: f64,
    budget: f64,
}

impl InputCovChoice {
    pub fn new(r: f64, theta: f64, budget: f64) -> Result<InputCovChoice> {
        if !(budget >= 0.0) {
            return Err(Error::NegativePhotonNumber(budget));
        }
        if !(0.0..=budget / 2.0 + 1e-12).contains(&r) {
            return Err(Error::InvalidModel(format!(
                "polar radius {r} outside [0, N/2] for budget {budget}"
            )));
        }
        let mut theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        if r == 0.0 {
            theta = 0.0;
        }
        Ok(InputCovChoice {
            r: r.min(budget / 2.0),
            theta,
            budget,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Trace of the reconstructed covariance; exactly the budget.
    pub fn trace(&self) -> f64 {
        self.budget
    }

    /// Eigenvalues of the reconstructed covariance, `N/2 +- r`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (0.5 * self.budget + self.r, 0.5 * self.budget - self.r)
    }

    pub fn covariance(&self) -> CovMatrix {
        let half = 0.5 * self.budget;
        CovMatrix::new(
            self.r * self.theta.cos() + half,
            -self.r * self.theta.cos() + half,
            self.r * self.theta.sin(),
        )
        .expect("r <= N/2 keeps the matrix PSD")
    }
}

/// Determinant of `V` plus any number of polar-parameterized inputs (their
/// centers add, as do their offset vectors).
pub fn det_with_inputs(v: &CovMatrix, inputs: &[InputCovChoice]) -> f64 {
    let total_budget: f64 = inputs.iter().map(|i| i.budget).sum();
    let cx: f64 = inputs.iter().map(|i| i.r * i.theta.cos()).sum();
    let cy: f64 = inputs.iter().map(|i| i.r * i.theta.sin()).sum();
    let half_sum = 0.5 * (v.v1() + v.v2() + total_budget);
    let dx = 0.5 * (v.v1() - v.v2()) + cx;
    let dy = v.v12() + cy;
    half_sum * half_sum - dx * dx - dy * dy
}

/// Rate pair role of a pentagon corner: `Lower` maximizes `R_1` (Alice
/// decoded at her individual maximum), `Upper` maximizes `R_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    Lower,
    Upper,
}

/// The four corner-achievability cases, by where `r_V` falls relative to
/// the half-budgets (with `N_small <= N_large`): I: `r_V <= N_small/2`;
/// II: `<= N_large/2`; III: `<= (N_A+N_B)/2`; IV: beyond, where the two
/// corners degenerate to a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HshCase {
    I,
    II,
    III,
    IV,
}

impl std::fmt::Display for HshCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HshCase::I => write!(f, "I"),
            HshCase::II => write!(f, "II"),
            HshCase::III => write!(f, "III"),
            HshCase::IV => write!(f, "IV"),
        }
    }
}

/// Corner-achieving input covariances for both users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerInputs {
    pub alice: InputCovChoice,
    pub bob: InputCovChoice,
    pub case: HshCase,
    /// Case IV lists identical inputs for both corners, so the pentagon
    /// corners coincide; flagged rather than reinterpreted.
    pub degenerate: bool,
    /// True when the budgets were role-swapped (`N_B <= N_A`) before
    /// applying the case list.
    pub swapped: bool,
}

/// Input covariances that simultaneously achieve the relevant individual
/// maximum and the sum maximum at the requested corner.
///
/// The case list is stated for `N_B > N_A`; for `N_B <= N_A` the roles are
/// swapped symmetrically.
pub fn corner_inputs(ch: &HshChannel, corner: Corner) -> CornerInputs {
    let (r_v, theta_v) = ch.anisotropy();
    let swapped = ch.n_b <= ch.n_a;
    // Paper-frame budgets: `small` plays the role with the smaller budget.
    let (n_small, n_large) = if swapped {
        (ch.n_b, ch.n_a)
    } else {
        (ch.n_a, ch.n_b)
    };
    // In the swapped frame our requested corner flips.
    let frame_corner = match (corner, swapped) {
        (c, false) => c,
        (Corner::Lower, true) => Corner::Upper,
        (Corner::Upper, true) => Corner::Lower,
    };

    let case = if r_v <= 0.5 * n_small {
        HshCase::I
    } else if r_v <= 0.5 * n_large {
        HshCase::II
    } else if r_v <= 0.5 * (n_small + n_large) {
        HshCase::III
    } else {
        HshCase::IV
    };

    let input = |r: f64, theta: f64, budget: f64| {
        InputCovChoice::new(r.clamp(0.0, 0.5 * budget), theta, budget)
            .expect("case arithmetic keeps r within the budget")
    };
    // (small-budget user's input, large-budget user's input) in the frame
    // where the lower corner maximizes the small-budget user's rate.
    let (small, large) = match (case, frame_corner) {
        (HshCase::I, Corner::Lower) => {
            (input(r_v, theta_v, n_small), input(0.0, 0.0, n_large))
        }
        (HshCase::I, Corner::Upper) => {
            (input(0.0, 0.0, n_small), input(r_v, theta_v, n_large))
        }
        (HshCase::II, Corner::Lower) | (HshCase::III, Corner::Lower) => (
            input(0.5 * n_small, theta_v, n_small),
            input(r_v - 0.5 * n_small, theta_v, n_large),
        ),
        (HshCase::II, Corner::Upper) => {
            (input(0.0, 0.0, n_small), input(r_v, theta_v, n_large))
        }
        (HshCase::III, Corner::Upper) => (
            input(r_v - 0.5 * n_large, theta_v, n_small),
            input(0.5 * n_large, theta_v, n_large),
        ),
        (HshCase::IV, _) => (
            input(0.5 * n_small, theta_v, n_small),
            input(0.5 * n_large, theta_v, n_large),
        ),
    };

    let (alice, bob) = if swapped { (large, small) } else { (small, large) };
    CornerInputs {
        alice,
        bob,
        case,
        degenerate: case == HshCase::IV,
        swapped,
    }
}

/// The beam-splitter optical MAC with displaced zero-mean Gaussian input
/// states: covariances `V_A`, `V_B` and mean-photon budgets. Coherent-state
/// encoding is the special case `V_A = V_B = I/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMacInput {
    eta: f64,
    v_a: CovMatrix,
    v_b: CovMatrix,
    nbar_a: f64,
    nbar_b: f64,
}

/// Slack allowed when a pure input state's own photons exhaust the budget
/// up to floating-point roundoff.
const BUDGET_TOL: f64 = 1e-9;

impl GaussianMacInput {
    pub fn new(
        eta: f64,
        v_a: CovMatrix,
        v_b: CovMatrix,
        nbar_a: f64,
        nbar_b: f64,
    ) -> Result<GaussianMacInput> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidModel(format!(
                "transmissivity must lie in [0, 1], got {eta}"
            )));
        }
        v_a.validate_physical()?;
        v_b.validate_physical()?;
        if !(nbar_a >= 0.0) {
            return Err(Error::NegativePhotonNumber(nbar_a));
        }
        if !(nbar_b >= 0.0) {
            return Err(Error::NegativePhotonNumber(nbar_b));
        }
        if nbar_a - v_a.mean_photons() < -BUDGET_TOL {
            return Err(Error::InfeasibleBudget {
                user: "alice",
                state_photons: v_a.mean_photons(),
                budget: nbar_a,
            });
        }
        if nbar_b - v_b.mean_photons() < -BUDGET_TOL {
            return Err(Error::InfeasibleBudget {
                user: "bob",
                state_photons: v_b.mean_photons(),
                budget: nbar_b,
            });
        }
        Ok(GaussianMacInput {
            eta,
            v_a,
            v_b,
            nbar_a,
            nbar_b,
        })
    }

    /// Coherent-state encoding (vacuum input states).
    pub fn coherent(eta: f64, nbar_a: f64, nbar_b: f64) -> Result<GaussianMacInput> {
        GaussianMacInput::new(eta, CovMatrix::vacuum(), CovMatrix::vacuum(), nbar_a, nbar_b)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn v_a(&self) -> &CovMatrix {
        &self.v_a
    }

    pub fn v_b(&self) -> &CovMatrix {
        &self.v_b
    }

    /// Maps onto the displaced-Gaussian MAC:
    /// `V = eta V_A + (1-eta) V_B`,
    /// `N_A = eta (nbar_A - V1^A - V2^A + 1/2)`,
    /// `N_B = (1-eta) (nbar_B - V1^B - V2^B + 1/2)`.
    pub fn to_hsh(&self) -> HshChannel {
        let v = self.v_a.scale(self.eta).add(&self.v_b.scale(1.0 - self.eta));
        let n_a = (self.eta * (self.nbar_a - self.v_a.mean_photons())).max(0.0);
        let n_b = ((1.0 - self.eta) * (self.nbar_b - self.v_b.mean_photons())).max(0.0);
        HshChannel::new(v, n_a, n_b).expect("a convex mix of physical states is physical")
    }

    /// Capacity region of the Gaussian MAC together with the branch each
    /// maximum used. Branch 1 bounds coincide with the large-budget closed
    /// forms; branch 2 indicates a sub-threshold budget.
    pub fn region(&self) -> GaussianMacAnalysis {
        let channel = self.to_hsh();
        GaussianMacAnalysis {
            region: channel.region(),
            branches: channel.branches(),
            channel,
        }
    }
}

/// Region plus branch indicators for the three maxima (`[R1, R2, sum]`).
#[derive(Debug, Clone)]
pub struct GaussianMacAnalysis {
    pub channel: HshChannel,
    pub region: RateRegion,
    pub branches: [Branch; 3],
}

/// Objective for the input-covariance search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchObjective {
    /// Pentagon area (the default).
    Area,
    /// Alice's individual bound.
    R1,
    /// Bob's individual bound.
    R2,
    /// Support function `max { w1 R1 + w2 R2 }` over the region.
    Weighted { w1: f64, w2: f64 },
}

impl SearchObjective {
    fn evaluate(&self, region: &RateRegion) -> f64 {
        match self {
            SearchObjective::Area => region.area().unwrap_or(0.0),
            SearchObjective::R1 => region.bound(&[0]),
            SearchObjective::R2 => region.bound(&[1]),
            SearchObjective::Weighted { w1, w2 } => region
                .two_user_vertices()
                .map(|verts| {
                    verts
                        .iter()
                        .map(|v| w1 * v[0] + w2 * v[1])
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .unwrap_or(0.0),
        }
    }
}

/// One recorded improvement during the covariance search: squeeze
/// magnitudes/angles per user and the objective value reached.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchStep {
    pub r_a: f64,
    pub theta_a: f64,
    pub r_b: f64,
    pub theta_b: f64,
    pub objective: f64,
}

/// Best input covariances found by the search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub v_a: CovMatrix,
    pub v_b: CovMatrix,
    pub analysis: GaussianMacAnalysis,
    pub objective: f64,
    pub trace: Vec<SearchStep>,
}

/// Coarse grid plus local refinement over pure Gaussian input states
/// (squeezed vacua, parameterized by squeeze magnitude and angle per user),
/// maximizing `objective` over the resulting capacity region.
///
/// The grid includes the vacuum point, so the outcome is never worse than
/// coherent-state encoding. Deterministic for a fixed grid; ties keep the
/// first (lowest-index) candidate.
pub fn covariance_search(
    eta: f64,
    nbar_a: f64,
    nbar_b: f64,
    objective: SearchObjective,
    grid: usize,
) -> Result<SearchOutcome> {
    if !(nbar_a > 0.0) || !(nbar_b > 0.0) {
        return Err(Error::InvalidModel(
            "covariance search needs positive photon budgets".into(),
        ));
    }
    let grid = grid.max(2);
    // Pure squeezed input states: mean photons sinh^2 r must fit the budget.
    let r_max_a = nbar_a.sqrt().asinh();
    let r_max_b = nbar_b.sqrt().asinh();

    let evaluate = |params: [f64; 4]| -> Option<(f64, GaussianMacAnalysis)> {
        let [r_a, th_a, r_b, th_b] = params;
        let v_a = squeeze_covariance(&SqueezeParams::from_z(r_a, th_a));
        let v_b = squeeze_covariance(&SqueezeParams::from_z(r_b, th_b));
        let input = GaussianMacInput::new(eta, v_a, v_b, nbar_a, nbar_b).ok()?;
        let analysis = input.region();
        Some((objective.evaluate(&analysis.region), analysis))
    };

    let mut trace: Vec<SearchStep> = Vec::new();
    let mut best_params = [0.0; 4];
    let mut best: Option<(f64, GaussianMacAnalysis)> = None;

    let two_pi = 2.0 * std::f64::consts::PI;
    let radial = |r_max: f64, i: usize| r_max * i as f64 / (grid - 1) as f64;
    for ia in 0..grid {
        for ja in 0..grid {
            for ib in 0..grid {
                for jb in 0..grid {
                    let params = [
                        radial(r_max_a, ia),
                        two_pi * ja as f64 / grid as f64,
                        radial(r_max_b, ib),
                        two_pi * jb as f64 / grid as f64,
                    ];
                    if let Some((value, analysis)) = evaluate(params) {
                        if best.as_ref().is_none_or(|(b, _)| value > *b) {
                            best = Some((value, analysis));
                            best_params = params;
                            trace.push(SearchStep {
                                r_a: params[0],
                                theta_a: params[1],
                                r_b: params[2],
                                theta_b: params[3],
                                objective: value,
                            });
                        }
                    }
                }
            }
        }
    }
    let (mut best_value, mut best_analysis) =
        best.ok_or_else(|| Error::InvalidModel("covariance search found no feasible point".into()))?;

    // Local refinement: shrink a box around the incumbent.
    let mut radius = [
        r_max_a / (grid - 1) as f64,
        two_pi / grid as f64,
        r_max_b / (grid - 1) as f64,
        two_pi / grid as f64,
    ];
    for _ in 0..8 {
        let mut improved = false;
        for ia in 0..7 {
            for ja in 0..7 {
                for ib in 0..7 {
                    for jb in 0..7 {
                        let offset = |k: usize, idx: usize| -> f64 {
                            (idx as f64 - 3.0) / 3.0 * radius[k]
                        };
                        let params = [
                            (best_params[0] + offset(0, ia)).clamp(0.0, r_max_a),
                            best_params[1] + offset(1, ja),
                            (best_params[2] + offset(2, ib)).clamp(0.0, r_max_b),
                            best_params[3] + offset(3, jb),
                        ];
                        if let Some((value, analysis)) = evaluate(params) {
                            if value > best_value {
                                best_value = value;
                                best_analysis = analysis;
                                best_params = params;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if improved {
            trace.push(SearchStep {
                r_a: best_params[0],
                theta_a: best_params[1],
                r_b: best_params[2],
                theta_b: best_params[3],
                objective: best_value,
            });
        }
        for r in &mut radius {
            *r *= 0.4;
        }
    }

    Ok(SearchOutcome {
        v_a: squeeze_covariance(&SqueezeParams::from_z(best_params[0], best_params[1])),
        v_b: squeeze_covariance(&SqueezeParams::from_z(best_params[2], best_params[3])),
        analysis: best_analysis,
        objective: best_value,
        trace,
    })
}

/// Which maximum the brute-force oracle targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmaxKind {
    R1,
    R2,
    Sum,
}

/// Grid-oracle outcome: the best rate found and its maximizer.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceResult {
    pub rate: Entropy,
    pub r: f64,
    pub theta: f64,
}

/// Brute-force oracle for the closed-form maxima: grid search over the
/// polar parameterization `(r, theta)` of the determinant objective,
/// followed by one local refinement pass around the incumbent. The sum
/// objective collapses to a single disk of radius `(N_A + N_B)/2` (the
/// Minkowski sum of the two budget disks), so it reuses the same grid.
///
/// By construction the oracle never exceeds the closed form; agreement
/// within the grid resolution validates it.
pub fn brute_force_rmax(ch: &HshChannel, which: RmaxKind, grid: usize) -> BruteForceResult {
    let n = match which {
        RmaxKind::R1 => ch.n_a,
        RmaxKind::R2 => ch.n_b,
        RmaxKind::Sum => ch.n_a + ch.n_b,
    };
    let v = &ch.v;
    let grid = grid.max(2);
    let det_at = |r: f64, theta: f64| -> f64 {
        let half_sum = 0.5 * (v.v1() + v.v2() + n);
        let dx = 0.5 * (v.v1() - v.v2()) + r * theta.cos();
        let dy = v.v12() + r * theta.sin();
        half_sum * half_sum - dx * dx - dy * dy
    };

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..grid {
        let r = 0.5 * n * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let theta = two_pi * j as f64 / grid as f64;
            let d = det_at(r, theta);
            if d > best.0 {
                best = (d, r, theta);
            }
        }
    }
    // One refinement pass over +-1 coarse cell at 20x resolution.
    let dr = 0.5 * n / (grid - 1) as f64;
    let dt = two_pi / grid as f64;
    for i in 0..41 {
        let r = (best.1 + dr * (i as f64 - 20.0) / 20.0).clamp(0.0, 0.5 * n);
        for j in 0..41 {
            let theta = best.2 + dt * (j as f64 - 20.0) / 20.0;
            let d = det_at(r, theta);
            if d > best.0 {
                best = (d, r, theta);
            }
        }
    }

    BruteForceResult {
        rate: Entropy::from_nats(rate_from_det(v, best.0)),
        r: best.1,
        theta: best.2.rem_euclid(two_pi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn paper_example_v() -> CovMatrix {
        CovMatrix::diagonal(1.0 / 32.0, 2.0).unwrap()
    }

    fn random_physical_cov(rng: &mut impl Rng) -> CovMatrix {
        let t: f64 = rng.gen_range(1.0..4.0);
        let s: f64 = rng.gen_range(0.0..1.2);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (l1, l2) = (t * s.exp() / 4.0, t * (-s).exp() / 4.0);
        let (c, sn) = (phi.cos(), phi.sin());
        CovMatrix::new(
            c * c * l1 + sn * sn * l2,
            sn * sn * l1 + c * c * l2,
            c * sn * (l1 - l2),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_state_reduces_to_thermal_entropy_of_the_budget() {
        let v = CovMatrix::vacuum();
        for n in [0.0, 0.3, 2.0, 11.5] {
            assert_relative_eq!(
                rmax_individual(&v, n).nats(),
                g_nats(n),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn zero_budget_rate_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let v = random_physical_cov(&mut rng);
            assert!(rmax_individual(&v, 0.0).nats() < 1e-12);
        }
    }

    #[test]
    fn paper_example_budget_one_uses_branch_two() {
        let v = paper_example_v();
        let ch = HshChannel::new(v, 1.0, 0.0).unwrap();
        assert_eq!(ch.branches()[0], Branch::Two);
        // frozen: g(2 sqrt(2.0625) - 1/2) with det residual (63/64 - 1/2)
        assert_relative_eq!(
            rmax_individual(&v, 1.0).nats(),
            2.0500095069565639,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sum_rate_depends_only_on_the_total_budget() {
        let v = paper_example_v();
        let a = rmax_sum(&v, 1.0, 1.0);
        let b = rmax_sum(&v, 2.0, 0.0);
        assert_eq!(a.nats(), b.nats());
        // N_A + N_B = 2 >= 63/32: branch 1 applies
        let ch = HshChannel::new(v, 1.0, 1.0).unwrap();
        assert_eq!(ch.branches()[2], Branch::One);
    }

    #[test]
    fn branch_expressions_agree_at_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v = random_physical_cov(&mut rng);
            let (r_v, _) = HshChannel::new(v, 0.0, 0.0).unwrap().anisotropy();
            let n = 2.0 * r_v;
            // branch 1 expression
            let b1 = g_nats(v.v1() + v.v2() + n - 0.5) - g_nats(2.0 * v.det().sqrt() - 0.5);
            // branch 2 expression with residual exactly zero
            let half_sum = 0.5 * (v.v1() + v.v2() + n);
            let residual = r_v - 0.5 * n;
            let d = half_sum * half_sum - residual * residual;
            let b2 = g_nats(2.0 * d.sqrt() - 0.5) - g_nats(2.0 * v.det().sqrt() - 0.5);
            assert!((b1 - b2).abs() < 1e-9, "branch mismatch: {b1} vs {b2}");
            assert!((rmax_individual(&v, n).nats() - b1).abs() < 1e-9);
        }
    }

    #[test]
    fn region_bounds_are_monotone_in_the_budgets() {
        let v = paper_example_v();
        let small = HshChannel::new(v, 0.5, 0.7).unwrap().region();
        let large = HshChannel::new(v, 0.9, 0.7).unwrap().region();
        for mask in small.subset_masks() {
            assert!(large.bound_mask(mask) >= small.bound_mask(mask) - 1e-15);
        }
    }

    #[test]
    fn vacuum_channel_region_matches_the_coherent_structure() {
        let ch = HshChannel::new(CovMatrix::vacuum(), 2.0, 3.0).unwrap();
        let region = ch.region();
        assert_relative_eq!(region.bound(&[0]), g_nats(2.0), max_relative = 1e-13);
        assert_relative_eq!(region.bound(&[1]), g_nats(3.0), max_relative = 1e-13);
        assert_relative_eq!(region.bound(&[0, 1]), g_nats(5.0), max_relative = 1e-13);
    }

    #[test]
    fn oracle_agrees_with_the_closed_form_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let v = random_physical_cov(&mut rng);
            let n_a = rng.gen_range(0.05..3.0);
            let n_b = rng.gen_range(0.05..3.0);
            let ch = HshChannel::new(v, n_a, n_b).unwrap();
            for (kind, exact) in [
                (RmaxKind::R1, rmax_individual(&v, n_a)),
                (RmaxKind::R2, rmax_individual(&v, n_b)),
                (RmaxKind::Sum, rmax_sum(&v, n_a, n_b)),
            ] {
                let oracle = brute_force_rmax(&ch, kind, 400);
                assert!(
                    oracle.rate.nats() <= exact.nats() + 1e-12,
                    "oracle exceeded the closed form"
                );
                assert!(
                    exact.nats() - oracle.rate.nats() < 1e-4,
                    "oracle too far below closed form: {} vs {}",
                    oracle.rate.nats(),
                    exact.nats()
                );
            }
        }
    }

    #[test]
    fn oracle_maximizer_points_at_the_anisotropy_when_branch_two_is_active() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut seen = 0;
        while seen < 20 {
            let v = random_physical_cov(&mut rng);
            let ch = HshChannel::new(v, 0.2, 0.0).unwrap();
            let (r_v, theta_v) = ch.anisotropy();
            if 0.2 >= 2.0 * r_v || r_v < 1e-3 {
                continue;
            }
            seen += 1;
            let oracle = brute_force_rmax(&ch, RmaxKind::R1, 400);
            let diff = (oracle.theta - theta_v).abs();
            let diff = diff.min(2.0 * std::f64::consts::PI - diff);
            assert!(diff < 0.05, "maximizer angle {} vs theta_V {theta_v}", oracle.theta);
            assert!((oracle.r - 0.1).abs() < 1e-3, "maximizer radius should hit N/2");
        }
    }

    #[test]
    fn input_cov_choice_is_psd_with_exact_trace() {
        let c = InputCovChoice::new(0.4, 1.2, 1.0).unwrap();
        assert_eq!(c.trace(), 1.0);
        let (l1, l2) = c.eigenvalues();
        assert!(l1 >= 0.0 && l2 >= 0.0);
        let m = c.covariance();
        assert_relative_eq!(m.trace(), 1.0, epsilon = 1e-15);
        assert!(InputCovChoice::new(0.6, 0.0, 1.0).is_err());
    }

    #[test]
    fn isotropic_channel_prefers_isotropic_modulation() {
        let ch = HshChannel::new(CovMatrix::thermal(1.0).unwrap(), 1.0, 1.5).unwrap();
        for corner in [Corner::Lower, Corner::Upper] {
            let inputs = corner_inputs(&ch, corner);
            assert_eq!(inputs.case, HshCase::I);
            assert_eq!(inputs.alice.r(), 0.0);
            assert_eq!(inputs.bob.r(), 0.0);
            assert!(!inputs.degenerate);
        }
    }

    #[test]
    fn case_two_lower_corner_splits_along_theta_v() {
        // r_V = 0.6, N_A = 1, N_B = 1.5: case II, lower corner
        // (N_A/2, theta_V), (r_V - N_A/2, theta_V).
        let r_v = 0.6;
        let s = 2.0 * (r_v * r_v + 1.0 / 16.0_f64).sqrt() + 0.1;
        let v = CovMatrix::new(0.5 * s - r_v, 0.5 * s + r_v, 0.0).unwrap();
        let ch = HshChannel::new(v, 1.0, 1.5).unwrap();
        let (got_rv, got_tv) = ch.anisotropy();
        assert_relative_eq!(got_rv, r_v, epsilon = 1e-12);
        let inputs = corner_inputs(&ch, Corner::Lower);
        assert_eq!(inputs.case, HshCase::II);
        assert!(!inputs.swapped);
        assert_relative_eq!(inputs.alice.r(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(inputs.alice.theta(), got_tv, epsilon = 1e-12);
        assert_relative_eq!(inputs.bob.r(), 0.1, epsilon = 1e-12);
        assert_relative_eq!(inputs.bob.theta(), got_tv, epsilon = 1e-12);
    }

    #[test]
    fn case_four_returns_identical_inputs_for_both_corners() {
        let r_v = 2.0;
        let s = 2.0 * (r_v * r_v + 1.0 / 16.0_f64).sqrt() + 0.05;
        let v = CovMatrix::new(0.5 * s - r_v, 0.5 * s + r_v, 0.0).unwrap();
        let ch = HshChannel::new(v, 1.0, 1.5).unwrap();
        let lower = corner_inputs(&ch, Corner::Lower);
        let upper = corner_inputs(&ch, Corner::Upper);
        assert_eq!(lower.case, HshCase::IV);
        assert!(lower.degenerate && upper.degenerate);
        assert_eq!(lower.alice, upper.alice);
        assert_eq!(lower.bob, upper.bob);
        assert_relative_eq!(lower.alice.r(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(lower.bob.r(), 0.75, epsilon = 1e-12);
    }

    fn assert_corner_achieves(ch: &HshChannel, corner: Corner) {
        let inputs = corner_inputs(ch, corner);
        let individual_exact = match corner {
            Corner::Lower => rmax_individual(ch.v(), ch.n_a()).nats(),
            Corner::Upper => rmax_individual(ch.v(), ch.n_b()).nats(),
        };
        let solo = match corner {
            Corner::Lower => inputs.alice,
            Corner::Upper => inputs.bob,
        };
        let d_solo = det_with_inputs(ch.v(), &[solo]);
        let achieved_individual = rate_from_det(ch.v(), d_solo);
        assert!(
            (achieved_individual - individual_exact).abs() < 1e-9,
            "individual max missed: {achieved_individual} vs {individual_exact}"
        );
        let d_both = det_with_inputs(ch.v(), &[inputs.alice, inputs.bob]);
        let achieved_sum = rate_from_det(ch.v(), d_both);
        let sum_exact = rmax_sum(ch.v(), ch.n_a(), ch.n_b()).nats();
        assert!(
            (achieved_sum - sum_exact).abs() < 1e-9,
            "sum max missed: {achieved_sum} vs {sum_exact}"
        );
    }

    #[test]
    fn corner_inputs_achieve_both_maxima_in_every_case() {
        // one deterministic instance per case, both corner roles
        let mk = |r_v: f64, pad: f64| {
            let s = 2.0 * (r_v * r_v + 1.0 / 16.0).sqrt() + pad;
            CovMatrix::new(0.5 * s - r_v, 0.5 * s + r_v, 0.0).unwrap()
        };
        let cases = [
            (mk(0.3, 0.2), 1.0, 1.5),  // I
            (mk(0.6, 0.1), 1.0, 1.5),  // II
            (mk(1.0, 0.3), 1.0, 1.5),  // III
            (mk(2.0, 0.1), 1.0, 1.5),  // IV
        ];
        for (v, n_a, n_b) in cases {
            let ch = HshChannel::new(v, n_a, n_b).unwrap();
            assert_corner_achieves(&ch, Corner::Lower);
            assert_corner_achieves(&ch, Corner::Upper);
            // swapped budgets exercise the role-swap path
            let swapped = HshChannel::new(v, n_b, n_a).unwrap();
            assert!(corner_inputs(&swapped, Corner::Lower).swapped);
            assert_corner_achieves(&swapped, Corner::Lower);
            assert_corner_achieves(&swapped, Corner::Upper);
        }
    }

    #[test]
    fn coherent_special_case_maps_to_vacuum_hsh() {
        let input = GaussianMacInput::coherent(0.4, 10.0, 8.0).unwrap();
        let ch = input.to_hsh();
        assert_eq!(*ch.v(), CovMatrix::vacuum());
        assert_relative_eq!(ch.n_a(), 4.0, epsilon = 1e-15);
        assert_relative_eq!(ch.n_b(), 4.8, epsilon = 1e-15);
    }

    #[test]
    fn paper_matrices_map_to_the_stated_budgets() {
        let v = paper_example_v();
        let input = GaussianMacInput::new(0.5, v, v, 10.0, 8.0).unwrap();
        let ch = input.to_hsh();
        assert_eq!(*ch.v(), v);
        assert_relative_eq!(ch.n_a(), 4.234375, epsilon = 1e-15);
        assert_relative_eq!(ch.n_b(), 3.234375, epsilon = 1e-15);
    }

    #[test]
    fn overdrawn_photon_budget_is_rejected_naming_the_user() {
        let v = paper_example_v(); // mean photons 65/32 - 1/2 ~ 1.53
        let err = GaussianMacInput::new(0.5, v, CovMatrix::vacuum(), 1.0, 8.0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBudget { user: "alice", .. }));
        let err = GaussianMacInput::new(0.5, CovMatrix::vacuum(), v, 10.0, 0.3).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBudget { user: "bob", .. }));
    }

    #[test]
    fn gaussian_region_with_vacuum_inputs_equals_the_coherent_region() {
        let analysis = GaussianMacInput::coherent(0.5, 10.0, 8.0).unwrap().region();
        let coherent = crate::coherent::MacModel::two_user(0.5, 10.0, 8.0)
            .unwrap()
            .optimal_region()
            .unwrap();
        for mask in coherent.subset_masks() {
            assert!(
                (analysis.region.bound_mask(mask) - coherent.bound_mask(mask)).abs() < 1e-12,
                "mask {mask}"
            );
        }
    }

    #[test]
    fn paper_example_beats_coherent_on_individual_rates_and_ties_the_sum() {
        let v = paper_example_v();
        let analysis = GaussianMacInput::new(0.5, v, v, 10.0, 8.0).unwrap().region();
        // frozen: g(5.765625), g(4.765625), g(9)
        assert_relative_eq!(
            analysis.region.bound(&[0]),
            2.834014956861009,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            analysis.region.bound(&[1]),
            2.6596930070417967,
            epsilon = 1e-12
        );
        assert!(analysis.region.bound(&[0]) > g_nats(5.0));
        assert!(analysis.region.bound(&[1]) > g_nats(4.0));
        // the mapped state is pure, so the sum bound ties the coherent sum
        assert_eq!(analysis.region.bound(&[0, 1]), g_nats(9.0));
        assert_eq!(analysis.branches, [Branch::One; 3]);
    }

    #[test]
    fn sub_threshold_budgets_are_labeled_branch_two() {
        let v = paper_example_v();
        // small budgets: 2 r_V = 63/32 exceeds them
        let input = GaussianMacInput::new(0.5, v, v, 2.5, 2.5).unwrap();
        let analysis = input.region();
        assert_eq!(analysis.branches[0], Branch::Two);
        assert_eq!(analysis.branches[1], Branch::Two);
    }

    #[test]
    fn covariance_search_beats_the_paper_example_on_r1() {
        let out = covariance_search(0.5, 10.0, 8.0, SearchObjective::R1, 8).unwrap();
        assert!(
            out.objective >= 2.834014956861009 - 1e-9,
            "search found {} below the known feasible point",
            out.objective
        );
        assert!(!out.trace.is_empty());
    }

    #[test]
    fn covariance_search_never_loses_to_coherent_encoding() {
        for objective in [
            SearchObjective::Area,
            SearchObjective::R2,
            SearchObjective::Weighted { w1: 1.0, w2: 2.0 },
        ] {
            let out = covariance_search(0.5, 4.0, 3.0, objective, 6).unwrap();
            let coherent = GaussianMacInput::coherent(0.5, 4.0, 3.0).unwrap().region();
            let floor = match objective {
                SearchObjective::Area => coherent.region.area().unwrap(),
                SearchObjective::R2 => coherent.region.bound(&[1]),
                _ => SearchObjective::Weighted { w1: 1.0, w2: 2.0 }.evaluate(&coherent.region),
            };
            assert!(
                out.objective >= floor - 1e-12,
                "{objective:?}: {} < coherent floor {floor}",
                out.objective
            );
        }
    }

    #[test]
    fn covariance_search_is_deterministic() {
        let a = covariance_search(0.5, 10.0, 8.0, SearchObjective::Area, 5).unwrap();
        let b = covariance_search(0.5, 10.0, 8.0, SearchObjective::Area, 5).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.v_a, b.v_a);
        assert_eq!(a.v_b, b.v_b);
    }

    #[test]
    fn with_eta_one_bobs_covariance_is_irrelevant_to_r1() {
        let v1 = CovMatrix::vacuum();
        let v2 = paper_example_v();
        let a = GaussianMacInput::new(1.0, v1, v1, 5.0, 3.0).unwrap().region();
        let b = GaussianMacInput::new(1.0, v1, v2, 5.0, 3.0).unwrap().region();
        assert_eq!(a.region.bound(&[0]), b.region.bound(&[0]));
    }
}
