//! Objective functions, the round loop and regret accounting.
//!
//! A run binds one policy, one adversary strategy with a budget ledger and
//! one objective for `T` rounds. Each round follows the fixed protocol:
//! publish the selection distribution, let the adversary commit and charge
//! its ledger, draw the point, emit the noisy value, hand the corrupted
//! observation to the policy. Everything is driven by counter-based seeded
//! streams, so a `(seed, setup)` pair reproduces a run exactly; independent
//! runs can execute in parallel.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::{self, AdversaryContext, AdversaryStrategy, CorruptionLedger};
use crate::confidence::{GammaMode, GammaSource};
use crate::kernels::GridKernel;
use crate::policies::{
    argmax_lowest, simple_regret_report, Instance, PolicyParams, PolicyState, ReportedPoint,
    ScoredRound,
};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Sub-stream identifiers of a run's master seed.
mod stream {
    pub const OBJECTIVE: u64 = 0;
    pub const POLICY: u64 = 1;
    pub const NOISE: u64 = 2;
}

/// A seeded sub-stream of a run.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A kernel expansion `f = sum_j w_j k(., z_j)` with grid-point centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<S> {
    pub center_indices: Vec<usize>,
    pub weights: Vec<S>,
}

/// The true function on the grid together with the bounds it satisfies.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective<S> {
    pub values: Vec<S>,
    /// Norm bound the function satisfies (equals the exact norm when a
    /// generating representation is known).
    pub b: S,
    /// Range bound: `max |f|` over the grid.
    pub b0: S,
    pub x_star_index: usize,
    pub f_star: S,
    pub representation: Option<Representation<S>>,
}

impl<S: Scalar> Objective<S> {
    pub fn from_values(values: Vec<S>, b: S, representation: Option<Representation<S>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("objective: empty grid values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let x_star_index = argmax_lowest(values.iter().copied());
        let f_star = values[x_star_index];
        let b0 = values.iter().fold(S::zero(), |a, &v| a.max(v.abs()));
        Ok(Self { values, b, b0, x_star_index, f_star, representation })
    }
}

/// The RKHS quadratic form `w^T K w` of a kernel expansion over the grid.
pub fn rkhs_norm_squared<S: Scalar>(gk: &GridKernel<S>, rep: &Representation<S>) -> S {
    let mut total = S::zero();
    for (i, &zi) in rep.center_indices.iter().enumerate() {
        let row = gk.gram_row(zi);
        for (j, &zj) in rep.center_indices.iter().enumerate() {
            total += rep.weights[i] * rep.weights[j] * row[zj];
        }
    }
    total
}

/// Draw `f = sum_j w_j k(., z_j)` with random grid centers and Gaussian
/// weights, rescaled so the RKHS norm equals `norm` exactly.
pub fn sample_rkhs_objective<S: Scalar>(
    gk: &GridKernel<S>,
    norm: S,
    num_centers: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Objective<S>> {
    if !(norm.is_finite() && norm > S::zero()) {
        return Err(Error::InvalidParameter("objective: norm must be > 0".into()));
    }
    if num_centers == 0 {
        return Err(Error::InvalidParameter("objective: need at least one center".into()));
    }
    let n = gk.len();
    for _ in 0..100 {
        let centers: Vec<usize> = (0..num_centers)
            .map(|_| (S::unit_uniform(rng) * S::from_usize(n).unwrap()).to_usize().unwrap().min(n - 1))
            .collect();
        let weights: Vec<S> = (0..num_centers).map(|_| S::standard_normal(rng)).collect();
        let rep = Representation { center_indices: centers, weights };
        let norm_sq = rkhs_norm_squared(gk, &rep);
        if norm_sq <= S::real(1e-24) {
            continue; // degenerate draw, try again
        }
        let scale = norm / norm_sq.sqrt();
        let rep = Representation {
            center_indices: rep.center_indices,
            weights: rep.weights.into_iter().map(|w| w * scale).collect(),
        };
        let values = expansion_values(gk, &rep);
        return Objective::from_values(values, norm, Some(rep));
    }
    Err(Error::InternalInvariant("objective sampling kept degenerating".into()))
}

/// Evaluate a kernel expansion on the whole grid.
pub fn expansion_values<S: Scalar>(gk: &GridKernel<S>, rep: &Representation<S>) -> Vec<S> {
    let n = gk.len();
    let mut values = vec![S::zero(); n];
    for (&z, &w) in rep.center_indices.iter().zip(rep.weights.iter()) {
        let row = gk.gram_row(z);
        for (v, &k) in values.iter_mut().zip(row.iter()) {
            *v += w * k;
        }
    }
    values
}

/// How the run obtains its objective.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectivePlan<S> {
    /// A fresh random draw per seed.
    SampleRkhs { num_centers: usize, norm: S },
    /// A fixed kernel expansion, optionally rescaled to an exact norm.
    KernelMix { center_indices: Vec<usize>, weights: Vec<S>, normalize_to: Option<S> },
    /// Fixed grid values with a claimed norm bound.
    Explicit { values: Vec<S>, b: S },
}

impl<S: Scalar> ObjectivePlan<S> {
    pub fn build(&self, gk: &GridKernel<S>, rng: &mut ChaCha8Rng) -> Result<Objective<S>> {
        match self {
            ObjectivePlan::SampleRkhs { num_centers, norm } => {
                sample_rkhs_objective(gk, *norm, *num_centers, rng)
            }
            ObjectivePlan::KernelMix { center_indices, weights, normalize_to } => {
                if center_indices.len() != weights.len() {
                    return Err(Error::LengthMismatch {
                        expected: center_indices.len(),
                        got: weights.len(),
                    });
                }
                let mut rep = Representation {
                    center_indices: center_indices.clone(),
                    weights: weights.clone(),
                };
                let norm_sq = rkhs_norm_squared(gk, &rep);
                if norm_sq <= S::zero() {
                    return Err(Error::InvalidParameter("objective: degenerate kernel mix".into()));
                }
                let mut norm = norm_sq.sqrt();
                if let Some(target) = normalize_to {
                    let scale = *target / norm;
                    for w in &mut rep.weights {
                        *w *= scale;
                    }
                    norm = *target;
                }
                let values = expansion_values(gk, &rep);
                Objective::from_values(values, norm, Some(rep))
            }
            ObjectivePlan::Explicit { values, b } => {
                Objective::from_values(values.clone(), *b, None)
            }
        }
    }
}

/// Which policy a run uses, with its known budget where applicable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyPlan<S> {
    Vanilla,
    KnownC { budget: S },
    FastSlow { budget: S },
    Layered,
}

impl<S: Scalar> PolicyPlan<S> {
    pub fn label(&self) -> &'static str {
        match self {
            PolicyPlan::Vanilla => "vanilla-ucb",
            PolicyPlan::KnownC { .. } => "known-c",
            PolicyPlan::FastSlow { .. } => "fast-slow",
            PolicyPlan::Layered => "layered",
        }
    }

    /// Budget the end-of-run reporting rule charges against.
    fn report_budget(&self) -> S {
        match self {
            PolicyPlan::KnownC { budget } | PolicyPlan::FastSlow { budget } => *budget,
            _ => S::zero(),
        }
    }
}

/// Everything needed to execute runs; one value serves every seed.
#[derive(Debug, Clone)]
pub struct ExperimentSetup<S: Scalar> {
    pub gk: Arc<GridKernel<S>>,
    pub objective: ObjectivePlan<S>,
    pub policy: PolicyPlan<S>,
    pub adversary: AdversaryStrategy<S>,
    pub adversary_budget: S,
    pub horizon: u64,
    pub b: S,
    /// Range bound handed to the policy; defaults to the objective's.
    pub b0: Option<S>,
    /// True noise standard deviation; defaults to `0.05 * b0`.
    pub noise_std: Option<S>,
    pub lambda: S,
    pub delta: S,
    pub alpha: S,
    pub gamma_mode: GammaMode,
}

/// One row of a run's regret trace. The CSV columns are the public fields
/// up to `is_valid`; the per-round selection statistics feed the reporting
/// rule and stay in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord<S> {
    pub t: u64,
    pub instance: Instance,
    pub x_index: usize,
    pub x_value: Vec<S>,
    pub y_clean: S,
    pub corruption: S,
    pub y_tilde: S,
    pub instant_regret: S,
    pub cum_regret: S,
    pub ledger_spent: S,
    pub is_valid: bool,
    pub mean: S,
    pub std: S,
    pub beta: S,
}

/// Run-long structural observations, evaluated every round and folded.
#[derive(Debug, Clone, PartialEq)]
pub struct RunAudits<S> {
    /// The policy's own width-one bounds contained `f` at every grid point,
    /// every round.
    pub primary_coverage_held: bool,
    pub fast_coverage_held: bool,
    pub slow_coverage_held: bool,
    /// Fast rounds whose pick was inside the slow strictly-suboptimal set.
    pub fast_pick_violations: u64,
    pub switch_round: Option<u64>,
    pub switch_edges: u64,
    pub nesting_held: bool,
    pub fallback_rounds: u64,
    pub fallback_mutations: u64,
    pub selection_sum_matches: bool,
    pub ledger_spent: S,
    pub ledger_consistent: bool,
    pub realized_within_charges: bool,
    /// Total corruption observed on slow-instance rounds.
    pub slow_observed_corruption: S,
    /// First round after which the budget was exhausted, when it was.
    pub exhaustion_round: Option<u64>,
}

/// A finished run: the trace, the reported point, the objective it ran
/// against, the audits and any hard assertion failures.
#[derive(Debug, Clone)]
pub struct RunOutput<S: Scalar> {
    pub seed: u64,
    pub records: Vec<RoundRecord<S>>,
    pub reported: ReportedPoint,
    pub objective: Objective<S>,
    pub audits: RunAudits<S>,
    pub failures: Vec<String>,
}

impl<S: Scalar> RunOutput<S> {
    pub fn final_cum_regret(&self) -> S {
        self.records.last().map(|r| r.cum_regret).unwrap_or_else(S::zero)
    }

    pub fn simple_regret(&self) -> S {
        let x = self.reported.x_index;
        self.objective.f_star - self.objective.values[x]
    }
}

/// Execute one seeded run of the configured experiment.
pub fn run_experiment<S: Scalar>(setup: &ExperimentSetup<S>, seed: u64) -> Result<RunOutput<S>> {
    let mut objective_rng = seeded_stream(seed, stream::OBJECTIVE);
    let objective = setup.objective.build(&setup.gk, &mut objective_rng)?;
    let b0 = setup.b0.unwrap_or(objective.b0);
    let sigma = setup.noise_std.unwrap_or(S::real(0.05) * b0);
    let params = PolicyParams {
        b: setup.b,
        b0,
        sigma,
        lambda: setup.lambda,
        delta: setup.delta,
        alpha: setup.alpha,
    };
    let gamma = GammaSource { mode: setup.gamma_mode, dim: setup.gk.grid().dim() };
    let policy_rng = seeded_stream(seed, stream::POLICY);
    let mut policy = match setup.policy {
        PolicyPlan::Vanilla => PolicyState::vanilla(setup.gk.clone(), params, gamma)?,
        PolicyPlan::KnownC { budget } => {
            PolicyState::known_c(setup.gk.clone(), params, budget, gamma)?
        }
        PolicyPlan::FastSlow { budget } => {
            PolicyState::fast_slow(setup.gk.clone(), params, budget, gamma, policy_rng)?
        }
        PolicyPlan::Layered => {
            PolicyState::layered(setup.gk.clone(), params, setup.horizon, gamma, policy_rng)?
        }
    };
    let mut noise_rng = seeded_stream(seed, stream::NOISE);
    let mut ledger = CorruptionLedger::new(setup.adversary_budget)?;

    let mut records: Vec<RoundRecord<S>> = Vec::with_capacity(setup.horizon as usize);
    let mut scored: Vec<ScoredRound<S>> = Vec::with_capacity(setup.horizon as usize);
    let mut clean_history: Vec<(usize, S)> = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    let mut audits = RunAudits {
        primary_coverage_held: true,
        fast_coverage_held: true,
        slow_coverage_held: true,
        fast_pick_violations: 0,
        switch_round: None,
        switch_edges: 0,
        nesting_held: true,
        fallback_rounds: 0,
        fallback_mutations: 0,
        selection_sum_matches: true,
        ledger_spent: S::zero(),
        ledger_consistent: true,
        realized_within_charges: true,
        slow_observed_corruption: S::zero(),
        exhaustion_round: None,
    };
    let mut cum_regret = S::zero();
    let mut was_valid = true;
    let exhaustion_tol = setup.adversary_budget.max(S::one()) * S::real(1e-12);

    for t in 1..=setup.horizon {
        let phi = match policy.publish() {
            Ok(phi) => phi,
            Err(e) => {
                failures.push(format!("round {t}: {e}"));
                break;
            }
        };
        let (primary, fast_cov, slow_cov) = policy.coverage(&objective.values);
        audits.primary_coverage_held &= primary;
        if let Some(c) = fast_cov {
            audits.fast_coverage_held &= c;
        }
        if let Some(c) = slow_cov {
            audits.slow_coverage_held &= c;
        }

        let ctx = AdversaryContext {
            grid: setup.gk.grid(),
            f_values: &objective.values,
            b0: objective.b0,
            history: &clean_history,
            phi: &phi,
        };
        let corruption = adversary::commit(&setup.adversary, &ctx, &mut ledger);
        let charge = *ledger.charges().last().expect("charge logged");

        let k = policy.draw(&phi);
        let entry = phi.entries[k].clone();
        let fallback = entry.fallback_from.is_some();
        let digest_before = if fallback { policy.layered_digest() } else { None };

        let eps = sigma * S::standard_normal(&mut noise_rng);
        let y_clean = objective.values[entry.x_index] + eps;
        let c_at_x = corruption.values[entry.x_index];
        let y_tilde = y_clean + c_at_x;
        if c_at_x.abs() > charge + S::real(1e-15) {
            audits.realized_within_charges = false;
        }
        if entry.instance == Instance::Slow {
            audits.slow_observed_corruption += c_at_x.abs();
        }

        let audit = match policy.observe(&entry, y_tilde) {
            Ok(a) => a,
            Err(e) => {
                failures.push(format!("round {t}: {e}"));
                break;
            }
        };
        clean_history.push((entry.x_index, y_clean));

        if let Some(ok) = audit.fast_pick_ok {
            if !ok {
                audits.fast_pick_violations += 1;
            }
        }
        if audit.switched {
            audits.switch_edges += 1;
            audits.switch_round.get_or_insert(t);
        }
        if policy.is_valid() && !was_valid {
            failures.push(format!("round {t}: validity flag flipped back on"));
        }
        was_valid = policy.is_valid();
        if let Some(ok) = audit.nesting_ok {
            audits.nesting_held &= ok;
        }
        if audit.fallback {
            audits.fallback_rounds += 1;
            if digest_before != policy.layered_digest() {
                audits.fallback_mutations += 1;
            }
        }
        if audits.exhaustion_round.is_none()
            && setup.adversary_budget > S::zero()
            && ledger.remaining() <= exhaustion_tol
        {
            audits.exhaustion_round = Some(t);
        }

        let instant = objective.f_star - objective.values[entry.x_index];
        cum_regret += instant;
        records.push(RoundRecord {
            t,
            instance: entry.instance,
            x_index: entry.x_index,
            x_value: setup.gk.grid().point(entry.x_index).to_vec(),
            y_clean,
            corruption: c_at_x,
            y_tilde,
            instant_regret: instant,
            cum_regret,
            ledger_spent: ledger.spent(),
            is_valid: policy.is_valid(),
            mean: entry.mean,
            std: entry.std,
            beta: entry.beta,
        });
        scored.push(ScoredRound {
            x_index: entry.x_index,
            mean: entry.mean,
            std: entry.std,
            beta: entry.beta,
        });
    }

    let played: u64 = policy.selection_counts().iter().map(|&(_, c)| c).sum();
    audits.selection_sum_matches = played == records.len() as u64;
    if !audits.selection_sum_matches {
        failures.push(format!(
            "selection counters sum to {played}, trace has {} rounds",
            records.len()
        ));
    }
    audits.switch_round = audits.switch_round.or(match &policy {
        PolicyState::FastSlow(p) => p.switch_round(),
        _ => None,
    });
    if audits.switch_edges > 1 {
        failures.push(format!("switch fired {} times", audits.switch_edges));
    }
    if !audits.nesting_held {
        failures.push("maximizer-set nesting broke".into());
    }
    if audits.fallback_mutations > 0 {
        failures.push(format!("{} fallback rounds mutated state", audits.fallback_mutations));
    }
    if audits.fast_pick_violations > 0 && audits.slow_coverage_held {
        failures.push(format!(
            "{} fast rounds picked slow-eliminated points under valid slow bounds",
            audits.fast_pick_violations
        ));
    }

    audits.ledger_spent = ledger.spent();
    let charge_sum: S = ledger.charges().iter().copied().sum();
    audits.ledger_consistent =
        charge_sum == ledger.spent() && ledger.spent() <= setup.adversary_budget;
    if !audits.ledger_consistent {
        failures.push(format!(
            "ledger drifted: spent {} of budget {}, charges sum {charge_sum}",
            ledger.spent(),
            setup.adversary_budget
        ));
    }
    if !audits.realized_within_charges {
        failures.push("realized corruption exceeded a round's charge".into());
    }

    if records.len() as u64 != setup.horizon {
        failures.push(format!("run stopped after {} of {} rounds", records.len(), setup.horizon));
    }

    let reported = simple_regret_report(&scored, setup.policy.report_budget())?;
    Ok(RunOutput { seed, records, reported, objective, audits, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::RegionCenter;
    use crate::kernels::{DomainGrid, Kernel};

    fn gk(n: usize) -> Arc<GridKernel<f64>> {
        let grid = DomainGrid::uniform(0.0, 1.0, n).unwrap();
        Arc::new(GridKernel::new(Kernel::squared_exponential(0.15).unwrap(), grid).unwrap())
    }

    fn base_setup(policy: PolicyPlan<f64>) -> ExperimentSetup<f64> {
        ExperimentSetup {
            gk: gk(40),
            objective: ObjectivePlan::SampleRkhs { num_centers: 8, norm: 1.5 },
            policy,
            adversary: AdversaryStrategy::Zero,
            adversary_budget: 0.0,
            horizon: 30,
            b: 1.5,
            b0: None,
            noise_std: None,
            lambda: 1.0,
            delta: 0.1,
            alpha: 2.0,
            gamma_mode: GammaMode::Realized,
        }
    }

    #[test]
    fn identical_seed_reproduces_the_trace() {
        let setup = base_setup(PolicyPlan::FastSlow { budget: 3.0 });
        let a = run_experiment(&setup, 12).unwrap();
        let b = run_experiment(&setup, 12).unwrap();
        assert_eq!(a.records, b.records);
        let c = run_experiment(&setup, 13).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn observation_identity_and_regret_sum_are_exact() {
        let mut setup = base_setup(PolicyPlan::KnownC { budget: 1.0 });
        setup.adversary = AdversaryStrategy::Flatten;
        setup.adversary_budget = 1.0;
        let out = run_experiment(&setup, 3).unwrap();
        assert!(out.failures.is_empty(), "{:?}", out.failures);
        let mut cum = 0.0;
        for r in &out.records {
            assert_eq!(r.y_tilde, r.y_clean + r.corruption);
            assert!(r.instant_regret >= 0.0);
            cum += r.instant_regret;
            assert_eq!(cum, r.cum_regret);
        }
        assert_eq!(out.final_cum_regret(), cum);
    }

    #[test]
    fn noise_free_uncorrupted_rounds_observe_f_exactly() {
        let mut setup = base_setup(PolicyPlan::Vanilla);
        setup.noise_std = Some(0.0);
        let out = run_experiment(&setup, 7).unwrap();
        for r in &out.records {
            assert_eq!(r.y_tilde, out.objective.values[r.x_index]);
            assert_eq!(r.corruption, 0.0);
        }
    }

    #[test]
    fn constant_objective_has_zero_regret() {
        let mut setup = base_setup(PolicyPlan::Vanilla);
        setup.objective = ObjectivePlan::Explicit { values: vec![0.4; 40], b: 1.0 };
        let out = run_experiment(&setup, 2).unwrap();
        assert_eq!(out.final_cum_regret(), 0.0);
    }

    #[test]
    fn single_round_run_has_one_record() {
        let mut setup = base_setup(PolicyPlan::Vanilla);
        setup.horizon = 1;
        let out = run_experiment(&setup, 5).unwrap();
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert_eq!(r.cum_regret, out.objective.f_star - out.objective.values[r.x_index]);
    }

    #[test]
    fn sampled_objective_norm_matches_oracle() {
        let gk = gk(60);
        let mut rng = seeded_stream(99, stream::OBJECTIVE);
        let obj = sample_rkhs_objective(&gk, 2.0, 10, &mut rng).unwrap();
        let rep = obj.representation.as_ref().unwrap();
        let norm = rkhs_norm_squared(&gk, rep).sqrt();
        assert!((norm - 2.0).abs() < 1e-9);
        assert_eq!(obj.values[obj.x_star_index], obj.f_star);
        assert!(obj.values.iter().all(|&v| v.abs() <= obj.b0));
    }

    #[test]
    fn single_center_draw_is_a_scaled_kernel_slice() {
        let gk = gk(30);
        let mut rng = seeded_stream(4, stream::OBJECTIVE);
        let obj = sample_rkhs_objective(&gk, 1.25, 1, &mut rng).unwrap();
        let rep = obj.representation.as_ref().unwrap();
        let z = rep.center_indices[0];
        for g in 0..30 {
            let expect = rep.weights[0] * gk.gram_row(z)[g];
            assert!((obj.values[g] - expect).abs() < 1e-12);
        }
        assert!((obj.values[z].abs() - 1.25).abs() < 1e-9);
    }

    #[test]
    fn doubling_the_requested_norm_doubles_the_function() {
        let gk = gk(30);
        let mut r1 = seeded_stream(8, stream::OBJECTIVE);
        let mut r2 = seeded_stream(8, stream::OBJECTIVE);
        let a = sample_rkhs_objective(&gk, 1.0, 5, &mut r1).unwrap();
        let b = sample_rkhs_objective(&gk, 2.0, 5, &mut r2).unwrap();
        for g in 0..30 {
            assert!((b.values[g] - 2.0 * a.values[g]).abs() < 1e-12);
        }
    }

    #[test]
    fn every_policy_attributes_every_round() {
        for plan in [
            PolicyPlan::Vanilla,
            PolicyPlan::KnownC { budget: 2.0 },
            PolicyPlan::FastSlow { budget: 2.0 },
            PolicyPlan::Layered,
        ] {
            let out = run_experiment(&base_setup(plan), 21).unwrap();
            assert!(out.audits.selection_sum_matches, "{plan:?}");
            assert!(out.failures.is_empty(), "{plan:?}: {:?}", out.failures);
        }
    }

    #[test]
    fn small_budget_fast_slow_plays_only_slow() {
        let setup = base_setup(PolicyPlan::FastSlow { budget: 0.5 });
        let out = run_experiment(&setup, 17).unwrap();
        assert!(out.records.iter().all(|r| r.instance == Instance::Slow));
    }

    #[test]
    fn zero_budget_enlargement_reproduces_vanilla_exactly() {
        let vanilla = run_experiment(&base_setup(PolicyPlan::Vanilla), 31).unwrap();
        let known = run_experiment(&base_setup(PolicyPlan::KnownC { budget: 0.0 }), 31).unwrap();
        let xs_v: Vec<usize> = vanilla.records.iter().map(|r| r.x_index).collect();
        let xs_k: Vec<usize> = known.records.iter().map(|r| r.x_index).collect();
        assert_eq!(xs_v, xs_k);
    }

    #[test]
    fn two_round_horizon_uses_a_single_layer() {
        let mut setup = base_setup(PolicyPlan::Layered);
        setup.horizon = 2;
        let out = run_experiment(&setup, 1).unwrap();
        assert!(out.records.iter().all(|r| r.instance == Instance::Layer(1)));
    }

    #[test]
    fn region_adversary_exhausts_and_is_conserved() {
        let mut setup = base_setup(PolicyPlan::KnownC { budget: 1.2 });
        setup.objective = ObjectivePlan::KernelMix {
            center_indices: vec![10, 30],
            weights: vec![1.0, 0.8],
            normalize_to: Some(1.5),
        };
        setup.adversary = AdversaryStrategy::Region {
            center: RegionCenter::AtMaximizer,
            radius: 0.1,
            fraction: 1.0 / 3.0,
        };
        setup.adversary_budget = 1.2;
        setup.horizon = 40;
        let out = run_experiment(&setup, 2).unwrap();
        assert!(out.audits.ledger_consistent);
        assert!(out.audits.realized_within_charges);
        let exhausted = out.audits.exhaustion_round.expect("budget must run out");
        assert!(exhausted < 40);
        for r in &out.records {
            if r.t > exhausted {
                assert_eq!(r.corruption, 0.0);
            }
        }
    }

    #[test]
    fn reported_point_comes_from_the_trace() {
        let out = run_experiment(&base_setup(PolicyPlan::KnownC { budget: 1.0 }), 6).unwrap();
        let t = out.reported.t_star;
        assert!(t >= 1 && t <= 30);
        assert_eq!(out.records[t as usize - 1].x_index, out.reported.x_index);
    }
}
