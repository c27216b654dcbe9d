//! Selection policies.
//!
//! Four policies share one protocol: each round the policy publishes its
//! selection distribution (instance probabilities plus the deterministic
//! per-instance argmax), the adversary commits, the policy draws and finally
//! observes. Ties in every argmax break toward the lowest grid index.
//!
//! - [`GpUcbPolicy`]: plain UCB over the grid; with a `KnownC` schedule this
//!   is the enlarged-bound policy for a known corruption budget.
//! - [`FastSlowPolicy`]: randomizes between a fast non-robust instance and a
//!   rarely-played robust one, watches for their bounds to contradict, and
//!   permanently falls back to enlarged-bound UCB over the pooled data when
//!   they do.
//! - [`LayeredPolicy`]: geometric layer sampling with per-layer
//!   potential-maximizer sets for an unknown corruption budget.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::confidence::{
    bounds_snapshot, is_suboptimal, switch_condition, BetaSchedule, BetaVariant, GammaSource,
    IntersectedBounds, MaximizerSets, Snapshot,
};
use crate::kernels::GridKernel;
use crate::posterior::Posterior;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Which sub-policy produced a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instance {
    /// Single-posterior policies (vanilla and known-budget UCB).
    Single,
    Fast,
    Slow,
    /// Post-switch pooled instance of the fast/slow policy.
    Pooled,
    /// 1-based layer of the unknown-budget policy.
    Layer(u8),
}

impl std::fmt::Display for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Instance::Single => write!(f, "-"),
            Instance::Fast => write!(f, "f"),
            Instance::Slow => write!(f, "s"),
            Instance::Pooled => write!(f, "a1"),
            Instance::Layer(l) => write!(f, "l{l}"),
        }
    }
}

/// One row of a published selection distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiEntry<S> {
    pub probability: S,
    pub instance: Instance,
    pub x_index: usize,
    /// Selecting instance's posterior mean at `x_index`.
    pub mean: S,
    /// Selecting instance's posterior standard deviation at `x_index`.
    pub std: S,
    /// Selecting instance's exploration coefficient this round.
    pub beta: S,
    /// For the layered policy: the sampled layer whose maximizer set was
    /// empty, forcing this re-routed selection.
    pub fallback_from: Option<u8>,
}

/// The selection distribution published to the adversary before the draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi<S> {
    pub entries: Vec<PhiEntry<S>>,
}

/// Per-round structural observations handed back to the run loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct RoundAudit {
    /// On fast-instance rounds: the selected point was outside the slow
    /// instance's strictly-suboptimal set.
    pub fast_pick_ok: Option<bool>,
    /// The fast/slow switch fired this round.
    pub switched: bool,
    /// The round was a layered fallback (no state mutation expected).
    pub fallback: bool,
    /// Maximizer-set nesting held after the update.
    pub nesting_ok: Option<bool>,
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax_lowest<S: Scalar>(values: impl IntoIterator<Item = S>) -> usize {
    let mut best = 0;
    let mut best_v = S::neg_infinity();
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    best
}

/// UCB over the grid with a single posterior: `argmax mean + beta * std`.
#[derive(Debug, Clone)]
pub struct GpUcbPolicy<S> {
    posterior: Posterior<S>,
    schedule: BetaSchedule<S>,
    gamma: GammaSource,
    rounds: u64,
    label: Instance,
}

impl<S: Scalar> GpUcbPolicy<S> {
    pub fn new(
        gk: Arc<GridKernel<S>>,
        lambda: S,
        schedule: BetaSchedule<S>,
        gamma: GammaSource,
        label: Instance,
    ) -> Result<Self> {
        Ok(Self { posterior: Posterior::new(gk, lambda)?, schedule, gamma, rounds: 0, label })
    }

    pub fn posterior(&self) -> &Posterior<S> {
        &self.posterior
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Coefficient for the upcoming round.
    pub fn current_beta(&self) -> S {
        self.schedule.eval(self.rounds + 1, self.gamma.value(&self.posterior))
    }

    fn entry(&self) -> PhiEntry<S> {
        let beta = self.current_beta();
        let n = self.posterior.grid_kernel().len();
        let x = argmax_lowest((0..n).map(|g| {
            self.posterior.grid_mean(g) + beta * self.posterior.grid_std(g)
        }));
        PhiEntry {
            probability: S::one(),
            instance: self.label,
            x_index: x,
            mean: self.posterior.grid_mean(x),
            std: self.posterior.grid_std(x),
            beta,
            fallback_from: None,
        }
    }

    fn observe(&mut self, x_index: usize, y: S) -> Result<()> {
        self.posterior.append_grid(x_index, y)?;
        self.rounds += 1;
        Ok(())
    }

    /// Whether the current bounds contain `f` at every grid point.
    pub fn covers(&self, f: &[S]) -> bool {
        covers(&self.posterior, self.current_beta(), f)
    }
}

fn covers<S: Scalar>(posterior: &Posterior<S>, beta: S, f: &[S]) -> bool {
    let slack = S::real(1e-9);
    (0..f.len()).all(|g| {
        (posterior.grid_mean(g) - f[g]).abs() <= beta * posterior.grid_std(g) + slack
    })
}

/// One instance of the fast/slow pair (also reused per layer by the layered
/// policy): a posterior, its schedule and its intersected width-one bounds.
#[derive(Debug, Clone)]
struct SubInstance<S> {
    posterior: Posterior<S>,
    schedule: BetaSchedule<S>,
    gamma: GammaSource,
    observations: u64,
    intersected: IntersectedBounds<S>,
}

impl<S: Scalar> SubInstance<S> {
    fn new(gk: Arc<GridKernel<S>>, lambda: S, schedule: BetaSchedule<S>, gamma: GammaSource) -> Result<Self> {
        let posterior = Posterior::new(gk.clone(), lambda)?;
        let mut intersected = IntersectedBounds::new(gk.len(), S::one());
        let beta = schedule.eval(1, S::zero());
        intersected.update(&bounds_snapshot(&posterior, beta, S::one()))?;
        Ok(Self { posterior, schedule, gamma, observations: 0, intersected })
    }

    fn current_beta(&self) -> S {
        self.schedule.eval(self.observations + 1, self.gamma.value(&self.posterior))
    }

    fn snapshot(&self, alpha: S) -> Snapshot<S> {
        bounds_snapshot(&self.posterior, self.current_beta(), alpha)
    }

    fn absorb(&mut self, x_index: usize, y: S) -> Result<()> {
        self.posterior.append_grid(x_index, y)?;
        self.observations += 1;
        let snap = self.snapshot(S::one());
        self.intersected.update(&snap)
    }

    fn covers(&self, f: &[S]) -> bool {
        covers(&self.posterior, self.current_beta(), f)
    }
}

/// Randomized fast/slow UCB with a known corruption budget.
#[derive(Debug, Clone)]
pub struct FastSlowPolicy<S> {
    fast: SubInstance<S>,
    slow: SubInstance<S>,
    alpha: S,
    p_slow: S,
    is_valid: bool,
    switch_round: Option<u64>,
    pooled: Option<GpUcbPolicy<S>>,
    pooled_schedule: BetaSchedule<S>,
    arrival: Vec<(usize, S)>,
    round: u64,
    gk: Arc<GridKernel<S>>,
    lambda: S,
    gamma: GammaSource,
    rng: ChaCha8Rng,
}

/// Scalar parameters shared by the policy constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams<S> {
    pub b: S,
    pub b0: S,
    pub sigma: S,
    pub lambda: S,
    pub delta: S,
    pub alpha: S,
}

impl<S: Scalar> FastSlowPolicy<S> {
    pub fn new(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        corruption_budget: S,
        gamma: GammaSource,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if !(corruption_budget.is_finite() && corruption_budget >= S::zero()) {
            return Err(Error::InvalidParameter("fast-slow: corruption budget must be >= 0".into()));
        }
        if params.alpha < S::one() {
            return Err(Error::InvalidParameter("fast-slow: alpha must be >= 1".into()));
        }
        let PolicyParams { b, b0, sigma, lambda, delta, alpha } = params;
        // The confidence parameter is split in fifths across the fast,
        // slow and post-switch events; the slow schedule applies its own
        // split internally.
        let fifth = delta / S::real(5.0);
        let fast_schedule = BetaSchedule::new(b, b0, sigma, lambda, fifth, BetaVariant::Standard)?;
        let slow_schedule = BetaSchedule::new(b, b0, sigma, lambda, delta, BetaVariant::SlowInstance)?;
        let pooled_schedule = BetaSchedule::new(
            b,
            b0,
            sigma,
            lambda,
            fifth,
            BetaVariant::KnownC { corruption: corruption_budget },
        )?;
        let p_slow = if corruption_budget <= S::one() {
            S::one()
        } else {
            S::one() / corruption_budget
        };
        Ok(Self {
            fast: SubInstance::new(gk.clone(), lambda, fast_schedule, gamma)?,
            slow: SubInstance::new(gk.clone(), lambda, slow_schedule, gamma)?,
            alpha,
            p_slow,
            is_valid: true,
            switch_round: None,
            pooled: None,
            pooled_schedule,
            arrival: Vec::new(),
            round: 0,
            gk,
            lambda,
            gamma,
            rng,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.is_valid
    }

    pub fn switch_round(&self) -> Option<u64> {
        self.switch_round
    }

    pub fn slow_probability(&self) -> S {
        self.p_slow
    }

    pub fn fast_observations(&self) -> u64 {
        self.fast.observations
    }

    pub fn slow_observations(&self) -> u64 {
        self.slow.observations
    }

    pub fn pooled_observations(&self) -> u64 {
        self.pooled.as_ref().map_or(0, |p| p.rounds)
    }

    /// Intersected width-one bounds of the slow instance.
    pub fn slow_bounds(&self) -> &IntersectedBounds<S> {
        &self.slow.intersected
    }

    pub fn publish(&self) -> Phi<S> {
        if let Some(pooled) = &self.pooled {
            return Phi { entries: vec![pooled.entry()] };
        }
        let n = self.gk.len();
        // Fast rule: argmax over the grid of the pointwise min of both
        // instances' intersected width-one upper bounds.
        let x_f = argmax_lowest(
            (0..n).map(|g| self.fast.intersected.ucb()[g].min(self.slow.intersected.ucb()[g])),
        );
        let beta_f = self.fast.current_beta();
        // Slow rule: argmax of its own current width-alpha upper bound.
        let slow_snap = self.slow.snapshot(self.alpha);
        let x_s = argmax_lowest(slow_snap.ucb.iter().copied());
        let beta_s = self.slow.current_beta();
        Phi {
            entries: vec![
                PhiEntry {
                    probability: self.p_slow,
                    instance: Instance::Slow,
                    x_index: x_s,
                    mean: self.slow.posterior.grid_mean(x_s),
                    std: self.slow.posterior.grid_std(x_s),
                    beta: beta_s,
                    fallback_from: None,
                },
                PhiEntry {
                    probability: S::one() - self.p_slow,
                    instance: Instance::Fast,
                    x_index: x_f,
                    mean: self.fast.posterior.grid_mean(x_f),
                    std: self.fast.posterior.grid_std(x_f),
                    beta: beta_f,
                    fallback_from: None,
                },
            ],
        }
    }

    pub fn draw(&mut self, phi: &Phi<S>) -> usize {
        if !self.is_valid {
            return 0;
        }
        debug_assert_eq!(phi.entries.len(), 2);
        let u = S::unit_uniform(&mut self.rng);
        if u < self.p_slow {
            0 // slow entry
        } else {
            1 // fast entry
        }
    }

    pub fn observe(&mut self, entry: &PhiEntry<S>, y: S) -> Result<RoundAudit> {
        self.round += 1;
        let mut audit = RoundAudit::default();
        if let Some(pooled) = &mut self.pooled {
            pooled.observe(entry.x_index, y)?;
            self.arrival.push((entry.x_index, y));
            return Ok(audit);
        }
        match entry.instance {
            Instance::Fast => {
                audit.fast_pick_ok = Some(!is_suboptimal(&self.slow.intersected, entry.x_index));
                self.fast.absorb(entry.x_index, y)?;
            }
            Instance::Slow => self.slow.absorb(entry.x_index, y)?,
            other => {
                return Err(Error::InternalInvariant(format!(
                    "fast-slow observed foreign instance {other}"
                )))
            }
        }
        self.arrival.push((entry.x_index, y));
        if switch_condition(&self.fast.intersected, &self.slow.intersected) {
            // Permanent: rebuild as enlarged-bound UCB over everything
            // collected so far, in arrival order.
            self.is_valid = false;
            self.switch_round = Some(self.round);
            audit.switched = true;
            let mut pooled = GpUcbPolicy::new(
                self.gk.clone(),
                self.lambda,
                self.pooled_schedule.clone(),
                self.gamma,
                Instance::Pooled,
            )?;
            for &(x, yy) in &self.arrival {
                pooled.observe(x, yy)?;
            }
            self.pooled = Some(pooled);
        }
        Ok(audit)
    }

    /// Coverage of the true function by each live instance's width-one
    /// bounds: `(fast, slow)` while valid, pooled as `fast` after the switch.
    pub fn coverage(&self, f: &[S]) -> (Option<bool>, Option<bool>) {
        if let Some(pooled) = &self.pooled {
            (Some(pooled.covers(f)), None)
        } else {
            (Some(self.fast.covers(f)), Some(self.slow.covers(f)))
        }
    }
}

/// Number of layers used for a horizon: `ceil(log2 T)`, at least one.
pub fn num_layers(horizon: u64) -> usize {
    if horizon <= 2 {
        1
    } else {
        (64 - (horizon - 1).leading_zeros()) as usize
    }
}

/// Layer sampling weights: `2^{-l}` for layers above the first, remainder on
/// layer one.
pub fn layer_weights<S: Scalar>(layers: usize) -> Vec<S> {
    let mut w: Vec<S> = (1..=layers)
        .map(|l| S::real(0.5).powi(l as i32))
        .collect();
    let tail: S = w[1..].iter().copied().sum();
    w[0] = S::one() - tail;
    w
}

/// Draw a 1-based layer index with the geometric weights above.
pub fn layer_sample<S: Scalar>(layers: usize, rng: &mut ChaCha8Rng) -> usize {
    debug_assert!(layers >= 1);
    let u = S::unit_uniform(rng);
    let weights = layer_weights::<S>(layers);
    let mut cum = S::zero();
    for (i, w) in weights.iter().enumerate() {
        cum += *w;
        if u < cum {
            return i + 1;
        }
    }
    layers
}

/// Smallest layer whose sampling rate survives a budget `C`:
/// `ceil(log2 C)` clamped into `[1, ceil(log2 T)]`. Diagnostic only; the
/// layered policy never sees the budget.
pub fn robust_layer_index<S: Scalar>(c: S, horizon: u64) -> usize {
    let top = num_layers(horizon);
    if c <= S::one() {
        return 1;
    }
    let raw = c.log2().ceil().to_usize().unwrap_or(top);
    raw.clamp(1, top)
}

/// Layered UCB for an unknown corruption budget.
#[derive(Debug, Clone)]
pub struct LayeredPolicy<S> {
    layers: Vec<SubInstance<S>>,
    selections: Vec<u64>,
    maximizer: MaximizerSets,
    alpha: S,
    round: u64,
    rng: ChaCha8Rng,
}

impl<S: Scalar> LayeredPolicy<S> {
    pub fn new(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        horizon: u64,
        gamma: GammaSource,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if params.alpha < S::one() {
            return Err(Error::InvalidParameter("layered: alpha must be >= 1".into()));
        }
        let count = num_layers(horizon);
        let schedule = BetaSchedule::new(
            params.b,
            params.b0,
            params.sigma,
            params.lambda,
            params.delta,
            BetaVariant::Layered { horizon },
        )?;
        let layers = (0..count)
            .map(|_| SubInstance::new(gk.clone(), params.lambda, schedule.clone(), gamma))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            layers,
            selections: vec![0; count],
            maximizer: MaximizerSets::new(count, gk.len()),
            alpha: params.alpha,
            round: 0,
            rng,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn maximizer_sets(&self) -> &MaximizerSets {
        &self.maximizer
    }

    pub fn selections(&self) -> &[u64] {
        &self.selections
    }

    pub fn layer_observations(&self, layer: usize) -> u64 {
        self.layers[layer - 1].observations
    }

    fn entry_for(&self, sampled: usize) -> Result<PhiEntry<S>> {
        let acting = if !self.maximizer.layer_is_empty(sampled) {
            sampled
        } else {
            ((sampled + 1)..=self.layers.len())
                .find(|&l| !self.maximizer.layer_is_empty(l))
                .ok_or_else(|| {
                    Error::InternalInvariant(
                        "all maximizer sets empty; top layer bounds no longer valid".into(),
                    )
                })?
        };
        let inst = &self.layers[acting - 1];
        let snap = inst.snapshot(self.alpha);
        let mask = self.maximizer.layer(acting);
        let x = argmax_lowest(
            snap.ucb
                .iter()
                .zip(mask.iter())
                .map(|(&u, &m)| if m { u } else { S::neg_infinity() }),
        );
        Ok(PhiEntry {
            probability: S::zero(), // filled by publish
            instance: Instance::Layer(acting as u8),
            x_index: x,
            mean: inst.posterior.grid_mean(x),
            std: inst.posterior.grid_std(x),
            beta: inst.current_beta(),
            fallback_from: (acting != sampled).then_some(sampled as u8),
        })
    }

    pub fn publish(&self) -> Result<Phi<S>> {
        let weights = layer_weights::<S>(self.layers.len());
        let mut entries = Vec::with_capacity(self.layers.len());
        for (i, w) in weights.into_iter().enumerate() {
            let mut e = self.entry_for(i + 1)?;
            e.probability = w;
            entries.push(e);
        }
        Ok(Phi { entries })
    }

    pub fn draw(&mut self, _phi: &Phi<S>) -> usize {
        layer_sample::<S>(self.layers.len(), &mut self.rng) - 1
    }

    pub fn observe(&mut self, entry: &PhiEntry<S>, y: S) -> Result<RoundAudit> {
        self.round += 1;
        let acting = match entry.instance {
            Instance::Layer(l) => l as usize,
            other => {
                return Err(Error::InternalInvariant(format!(
                    "layered observed foreign instance {other}"
                )))
            }
        };
        self.selections[acting - 1] += 1;
        let mut audit = RoundAudit { fallback: entry.fallback_from.is_some(), ..Default::default() };
        if !audit.fallback {
            let inst = &mut self.layers[acting - 1];
            inst.absorb(entry.x_index, y)?;
            self.maximizer.update(acting, &inst.intersected);
        }
        audit.nesting_ok = Some(self.maximizer.is_nested());
        Ok(audit)
    }

    /// Coverage of `f` by the top layer's width-one bounds.
    pub fn top_layer_covers(&self, f: &[S]) -> bool {
        self.layers.last().map(|l| l.covers(f)).unwrap_or(true)
    }

    /// Digest of the learning state: posteriors, intersected bounds and
    /// maximizer sets. Selection counters are an action log and excluded.
    pub fn state_digest(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut mix = |bits: u64| {
            h ^= bits;
            h = h.wrapping_mul(0x1000_0000_01b3);
        };
        for inst in &self.layers {
            mix(inst.observations);
            for g in 0..inst.posterior.grid_kernel().len() {
                mix(inst.posterior.grid_mean(g).to_f64().unwrap().to_bits());
                mix(inst.posterior.grid_std(g).to_f64().unwrap().to_bits());
            }
            for &u in inst.intersected.ucb() {
                mix(u.to_f64().unwrap().to_bits());
            }
            for &l in inst.intersected.lcb() {
                mix(l.to_f64().unwrap().to_bits());
            }
        }
        for layer in 1..=self.layers.len() {
            for &m in self.maximizer.layer(layer) {
                mix(m as u64);
            }
        }
        h
    }

    #[cfg(test)]
    fn force_absorb(&mut self, layer: usize, x_index: usize, y: S) {
        let inst = &mut self.layers[layer - 1];
        inst.absorb(x_index, y).unwrap();
        self.maximizer.update(layer, &inst.intersected);
    }
}

/// The round index a reported point was taken from, plus the point itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportedPoint {
    /// 1-based round index.
    pub t_star: u64,
    pub x_index: usize,
}

/// Per-round statistics needed by the end-of-run reporting rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredRound<S> {
    pub x_index: usize,
    pub mean: S,
    pub std: S,
    pub beta: S,
}

/// Report the sampled point maximizing `mean - (C + beta) std`; earliest
/// round on ties.
pub fn simple_regret_report<S: Scalar>(trace: &[ScoredRound<S>], c: S) -> Result<ReportedPoint> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut best = 0usize;
    let mut best_score = S::neg_infinity();
    for (i, r) in trace.iter().enumerate() {
        let score = r.mean - (c + r.beta) * r.std;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    Ok(ReportedPoint { t_star: best as u64 + 1, x_index: trace[best].x_index })
}

/// State of one of the four selection policies.
#[derive(Debug, Clone)]
pub enum PolicyState<S: Scalar> {
    VanillaUcb(GpUcbPolicy<S>),
    KnownC(GpUcbPolicy<S>),
    FastSlow(FastSlowPolicy<S>),
    Layered(LayeredPolicy<S>),
}

impl<S: Scalar> PolicyState<S> {
    pub fn vanilla(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        gamma: GammaSource,
    ) -> Result<Self> {
        let schedule = BetaSchedule::new(
            params.b,
            params.b0,
            params.sigma,
            params.lambda,
            params.delta,
            BetaVariant::Standard,
        )?;
        Ok(Self::VanillaUcb(GpUcbPolicy::new(gk, params.lambda, schedule, gamma, Instance::Single)?))
    }

    pub fn known_c(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        corruption_budget: S,
        gamma: GammaSource,
    ) -> Result<Self> {
        let schedule = BetaSchedule::new(
            params.b,
            params.b0,
            params.sigma,
            params.lambda,
            params.delta,
            BetaVariant::KnownC { corruption: corruption_budget },
        )?;
        Ok(Self::KnownC(GpUcbPolicy::new(gk, params.lambda, schedule, gamma, Instance::Single)?))
    }

    pub fn fast_slow(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        corruption_budget: S,
        gamma: GammaSource,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        Ok(Self::FastSlow(FastSlowPolicy::new(gk, params, corruption_budget, gamma, rng)?))
    }

    pub fn layered(
        gk: Arc<GridKernel<S>>,
        params: PolicyParams<S>,
        horizon: u64,
        gamma: GammaSource,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        Ok(Self::Layered(LayeredPolicy::new(gk, params, horizon, gamma, rng)?))
    }

    pub fn publish(&self) -> Result<Phi<S>> {
        match self {
            PolicyState::VanillaUcb(p) | PolicyState::KnownC(p) => {
                Ok(Phi { entries: vec![p.entry()] })
            }
            PolicyState::FastSlow(p) => Ok(p.publish()),
            PolicyState::Layered(p) => p.publish(),
        }
    }

    /// Pick the entry realized this round.
    pub fn draw(&mut self, phi: &Phi<S>) -> usize {
        match self {
            PolicyState::VanillaUcb(_) | PolicyState::KnownC(_) => 0,
            PolicyState::FastSlow(p) => p.draw(phi),
            PolicyState::Layered(p) => p.draw(phi),
        }
    }

    pub fn observe(&mut self, entry: &PhiEntry<S>, y: S) -> Result<RoundAudit> {
        match self {
            PolicyState::VanillaUcb(p) | PolicyState::KnownC(p) => {
                p.observe(entry.x_index, y)?;
                Ok(RoundAudit::default())
            }
            PolicyState::FastSlow(p) => p.observe(entry, y),
            PolicyState::Layered(p) => p.observe(entry, y),
        }
    }

    /// Fast/slow validity flag; true where the concept does not apply.
    pub fn is_valid(&self) -> bool {
        match self {
            PolicyState::FastSlow(p) => p.is_valid(),
            _ => true,
        }
    }

    /// Coverage of the true grid function by the policy's own width-one
    /// bounds: `(primary, fast, slow)`.
    pub fn coverage(&self, f: &[S]) -> (bool, Option<bool>, Option<bool>) {
        match self {
            PolicyState::VanillaUcb(p) | PolicyState::KnownC(p) => (p.covers(f), None, None),
            PolicyState::FastSlow(p) => {
                let (fast, slow) = p.coverage(f);
                (fast.unwrap_or(true) && slow.unwrap_or(true), fast, slow)
            }
            PolicyState::Layered(p) => (p.top_layer_covers(f), None, None),
        }
    }

    /// Rounds attributed to each instance; sums to the number of rounds.
    pub fn selection_counts(&self) -> Vec<(Instance, u64)> {
        match self {
            PolicyState::VanillaUcb(p) | PolicyState::KnownC(p) => {
                vec![(Instance::Single, p.rounds)]
            }
            PolicyState::FastSlow(p) => vec![
                (Instance::Fast, p.fast_observations()),
                (Instance::Slow, p.slow_observations()),
                (Instance::Pooled, p.pooled_observations()),
            ],
            PolicyState::Layered(p) => p
                .selections()
                .iter()
                .enumerate()
                .map(|(i, &c)| (Instance::Layer(i as u8 + 1), c))
                .collect(),
        }
    }

    pub fn layered_digest(&self) -> Option<u64> {
        match self {
            PolicyState::Layered(p) => Some(p.state_digest()),
            _ => None,
        }
    }
}
