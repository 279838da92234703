//! Random hill-climb for symmetric `N`-qubit states that are PPT across the
//! balanced `N/2 : N/2` cut but NPT across some other cut.
//!
//! A symmetric state is either separable across every bipartition or
//! entangled across every bipartition, so such a state is bound entangled on
//! the balanced cut.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{random_hs_matrix, random_induced_matrix};
use crate::symspace::{compressed_pt_spectrum, compressed_structural_zero_count, representative_splits, SymmetricState};
use crate::tol;

/// Hilbert-Schmidt sample on the `(N+1)`-dimensional symmetric subspace.
pub fn random_symmetric_state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> SymmetricState {
    SymmetricState::from_parts(random_hs_matrix(qubits + 1, rng), qubits)
}

/// Eigenvalues of a compressed partial transpose with structural zeros
/// removed. At most the calibrated structural count is dropped, and only
/// eigenvalues within `tol_zero` of zero; a clearly negative eigenvalue is
/// never dropped.
fn nonstructural(sigma: &SymmetricState, split: (usize, usize), tol_zero: f64) -> Result<Vec<f64>> {
    let mut ev = compressed_pt_spectrum(sigma, split)?.eigenvalues;
    let mut drop = compressed_structural_zero_count(sigma.qubits(), split)?;
    while drop > 0 {
        let Some((idx, _)) = ev
            .iter()
            .enumerate()
            .filter(|(_, l)| l.abs() <= tol_zero)
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        else {
            break;
        };
        ev.remove(idx);
        drop -= 1;
    }
    Ok(ev)
}

/// Smallest nonstructural partial-transpose eigenvalue over one split per
/// size class, skipping the balanced split when `exclude_balanced`.
/// Returns `+inf` when no split is left.
pub fn lambda_min_with(sigma: &SymmetricState, exclude_balanced: bool, tol_zero: f64) -> Result<f64> {
    let n = sigma.qubits();
    let mut best = f64::INFINITY;
    for split in representative_splits(n) {
        if exclude_balanced && split.0 == split.1 {
            continue;
        }
        for l in nonstructural(sigma, split, tol_zero)? {
            best = best.min(l);
        }
    }
    Ok(best)
}

pub fn lambda_min(sigma: &SymmetricState, exclude_balanced: bool) -> Result<f64> {
    lambda_min_with(sigma, exclude_balanced, tol::ZERO_EIGENVALUE)
}

/// Minimum partial-transpose eigenvalue across the balanced cut.
pub fn balanced_margin(sigma: &SymmetricState) -> Result<f64> {
    let n = sigma.qubits();
    Ok(compressed_pt_spectrum(sigma, (n / 2, n - n / 2))?.min())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub qubits: usize,
    /// Mixing weight of each random perturbation.
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub tol_zero: f64,
    /// Success once `lambda_min` drops below this.
    pub target_margin: f64,
    /// Halve epsilon after this many consecutive rejections (`None` disables).
    pub decay_after: Option<usize>,
    pub epsilon_floor: f64,
    /// Give up drawing a balanced-PPT starting state after this many tries.
    pub max_initial_draws: usize,
    /// Ancilla dimension of the induced measure the starting state is drawn
    /// from. `qubits + 1` is the Hilbert-Schmidt measure, under which
    /// balanced-PPT draws are too rare to find by rejection.
    pub initial_ancilla: usize,
}

impl SearchConfig {
    pub fn new(qubits: usize, seed: u64) -> Self {
        Self {
            qubits,
            epsilon: 0.02,
            max_iter: 10_000,
            seed,
            tol_zero: tol::ZERO_EIGENVALUE,
            target_margin: -tol::PSD,
            decay_after: Some(500),
            epsilon_floor: 1e-4,
            max_initial_draws: 1_000_000,
            initial_ancilla: 16 * (qubits + 1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits < 4 || !self.qubits.is_multiple_of(2) {
            return Err(Error::ConfigInvalid(format!("qubit count {} must be even and >= 4", self.qubits)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::ConfigInvalid(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if !(self.epsilon_floor > 0.0 && self.epsilon_floor <= self.epsilon) {
            return Err(Error::ConfigInvalid(format!("epsilon floor {}", self.epsilon_floor)));
        }
        if self.initial_ancilla == 0 {
            return Err(Error::ConfigInvalid("initial_ancilla must be positive".into()));
        }
        if self.max_initial_draws == 0 {
            return Err(Error::ConfigInvalid("max_initial_draws must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    #[serde(skip)]
    pub final_state: SymmetricState,
    /// `lambda_min` of the starting state followed by every accepted step.
    pub lambda_trace: Vec<f64>,
    /// Starting state followed by every accepted state.
    #[serde(skip)]
    pub accepted: Vec<SymmetricState>,
    pub iterations: usize,
    pub success: bool,
    pub initial_draws: usize,
    pub final_epsilon: f64,
}

impl SearchReport {
    pub fn final_lambda_min(&self) -> f64 {
        *self.lambda_trace.last().expect("trace holds the starting state")
    }

    /// Re-derives the report invariants from the stored states: strictly
    /// decreasing `lambda_min`, balanced-PPT accepted states, and a success
    /// flag backed by a negative `lambda_min`.
    pub fn audit(&self, config: &SearchConfig) -> std::result::Result<(), String> {
        if self.accepted.len() != self.lambda_trace.len() {
            return Err("trace and state list differ in length".into());
        }
        for w in self.lambda_trace.windows(2) {
            if !(w[1] <= w[0] - 1e-14) {
                return Err(format!("lambda_min not strictly decreasing: {} -> {}", w[0], w[1]));
            }
        }
        for (i, s) in self.accepted.iter().enumerate() {
            let m = balanced_margin(s).map_err(|e| e.to_string())?;
            if m < -tol::PSD {
                return Err(format!("accepted state {i} is NPT on the balanced cut ({m:e})"));
            }
            let l = lambda_min_with(s, true, config.tol_zero).map_err(|e| e.to_string())?;
            if (l - self.lambda_trace[i]).abs() > 1e-12 {
                return Err(format!("recorded lambda_min {} != recomputed {l}", self.lambda_trace[i]));
            }
        }
        if self.success && !(self.final_lambda_min() < config.target_margin) {
            return Err("success flag without a negative lambda_min".into());
        }
        Ok(())
    }
}

/// Draws a balanced-PPT starting state by rejection sampling from the induced
/// measure, then climbs.
pub fn hill_climb(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut draws = 0;
    let initial = loop {
        if draws == config.max_initial_draws {
            return Err(Error::ConfigInvalid(format!(
                "no balanced-PPT state among {draws} random draws"
            )));
        }
        draws += 1;
        let s = SymmetricState::from_parts(
            random_induced_matrix(config.qubits + 1, config.initial_ancilla, &mut rng),
            config.qubits,
        );
        if balanced_margin(&s)? >= -tol::PSD {
            break s;
        }
    };
    climb(config, initial, draws, &mut rng)
}

/// Climbs from a given balanced-PPT starting state.
pub fn hill_climb_from(config: &SearchConfig, initial: SymmetricState) -> Result<SearchReport> {
    config.validate()?;
    if initial.qubits() != config.qubits {
        return Err(Error::ConfigInvalid(format!(
            "initial state has {} qubits, config {}",
            initial.qubits(),
            config.qubits
        )));
    }
    if balanced_margin(&initial)? < -tol::PSD {
        return Err(Error::ConfigInvalid("initial state is NPT on the balanced cut".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    climb(config, initial, 0, &mut rng)
}

fn climb(config: &SearchConfig, initial: SymmetricState, draws: usize, rng: &mut ChaCha8Rng) -> Result<SearchReport> {
    let mut current = initial;
    let mut current_lambda = lambda_min_with(&current, true, config.tol_zero)?;
    let mut lambda_trace = vec![current_lambda];
    let mut accepted = vec![current.clone()];
    let mut epsilon = config.epsilon;
    let mut rejections = 0;
    let mut iterations = 0;

    while current_lambda >= config.target_margin && iterations < config.max_iter {
        iterations += 1;
        let delta = random_symmetric_state(config.qubits, rng);
        let candidate = current.mix(&delta, epsilon)?;
        let ok = balanced_margin(&candidate)? >= -tol::PSD && {
            let l = lambda_min_with(&candidate, true, config.tol_zero)?;
            if l <= current_lambda - 1e-14 {
                current_lambda = l;
                true
            } else {
                false
            }
        };
        if ok {
            current = candidate;
            lambda_trace.push(current_lambda);
            accepted.push(current.clone());
            rejections = 0;
        } else {
            rejections += 1;
            if let Some(after) = config.decay_after {
                if rejections >= after && epsilon > config.epsilon_floor {
                    epsilon = (epsilon * 0.5).max(config.epsilon_floor);
                    rejections = 0;
                }
            }
        }
    }

    Ok(SearchReport {
        final_state: current,
        success: current_lambda < config.target_margin,
        lambda_trace,
        accepted,
        iterations,
        initial_draws: draws,
        final_epsilon: epsilon,
    })
}
