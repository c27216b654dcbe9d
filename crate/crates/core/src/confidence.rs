//! Exploration coefficients and confidence-bound machinery.
//!
//! A [`BetaSchedule`] turns a round index and a realized information gain
//! into the exploration coefficient for one policy instance. Instances keep
//! [`IntersectedBounds`]: running pointwise minima of upper bounds and maxima
//! of lower bounds, which shrink monotonically even when individual
//! snapshots do not. On top of those sit the strictly-suboptimal set, the
//! fast/slow switch condition and the per-layer potential-maximizer sets.

use crate::posterior::Posterior;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Which additive enlargement a schedule applies on top of the base
/// coefficient, and how it splits the confidence parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaVariant<S> {
    /// Base schedule: `B + sigma lambda^{-1/2} sqrt(2(gamma + ln(1/delta)))`.
    Standard,
    /// Adds `lambda^{-1/2} C` for a known corruption budget `C`.
    KnownC { corruption: S },
    /// Slow instance of the fast/slow pair: a 1/5 split of `delta` plus the
    /// additive `lambda^{-1/2} (3 + B0 ln(5/delta))` term covering the
    /// corruption it can observe.
    SlowInstance,
    /// Per-layer schedule for the unknown-budget policy: splits `delta` by
    /// `4 (1 + log2 T)` and adds `lambda^{-1/2} (3 + B0 ln(4(1+log2 T)/delta))`.
    Layered { horizon: u64 },
}

/// Exploration-coefficient schedule for one policy instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSchedule<S> {
    b: S,
    b0: S,
    sigma: S,
    lambda: S,
    delta: S,
    variant: BetaVariant<S>,
}

impl<S: Scalar> BetaSchedule<S> {
    pub fn new(b: S, b0: S, sigma: S, lambda: S, delta: S, variant: BetaVariant<S>) -> Result<Self> {
        if !(delta > S::zero() && delta < S::one()) {
            return Err(Error::InvalidParameter(format!("beta: delta must be in (0,1), got {delta}")));
        }
        if !(lambda.is_finite() && lambda > S::zero()) {
            return Err(Error::InvalidParameter("beta: lambda must be > 0".into()));
        }
        if !(b.is_finite() && b > S::zero()) {
            return Err(Error::InvalidParameter("beta: norm bound B must be > 0".into()));
        }
        if !(b0.is_finite() && b0 >= S::zero()) {
            return Err(Error::InvalidParameter("beta: range bound B0 must be >= 0".into()));
        }
        if !(sigma.is_finite() && sigma >= S::zero()) {
            return Err(Error::InvalidParameter("beta: noise std must be >= 0".into()));
        }
        match variant {
            BetaVariant::KnownC { corruption } => {
                if !(corruption.is_finite() && corruption >= S::zero()) {
                    return Err(Error::InvalidParameter("beta: corruption budget must be >= 0".into()));
                }
            }
            BetaVariant::Layered { horizon } => {
                if horizon == 0 {
                    return Err(Error::InvalidParameter("beta: horizon must be >= 1".into()));
                }
            }
            _ => {}
        }
        Ok(Self { b, b0, sigma, lambda, delta, variant })
    }

    pub fn variant(&self) -> &BetaVariant<S> {
        &self.variant
    }

    /// `ln(1/delta_eff)` after the variant's split of `delta`.
    fn log_term(&self) -> S {
        match self.variant {
            BetaVariant::Standard | BetaVariant::KnownC { .. } => (S::one() / self.delta).ln(),
            BetaVariant::SlowInstance => (S::real(5.0) / self.delta).ln(),
            BetaVariant::Layered { horizon } => {
                let q = S::real(4.0) * (S::one() + S::real(horizon as f64).log2());
                (q / self.delta).ln()
            }
        }
    }

    fn additive_term(&self) -> S {
        let root_lambda = self.lambda.sqrt();
        match self.variant {
            BetaVariant::Standard => S::zero(),
            BetaVariant::KnownC { corruption } => corruption / root_lambda,
            BetaVariant::SlowInstance | BetaVariant::Layered { .. } => {
                (S::real(3.0) + self.b0 * self.log_term()) / root_lambda
            }
        }
    }

    /// Coefficient for round `t >= 1` given the realized information gain of
    /// the first `t - 1` observations. Positive, and non-decreasing in `t`
    /// whenever `gamma_hat` is.
    pub fn eval(&self, t: u64, gamma_hat: S) -> S {
        debug_assert!(t >= 1, "round index starts at 1");
        debug_assert!(gamma_hat >= -S::real(1e-12));
        let explore = (S::real(2.0) * (gamma_hat + self.log_term())).sqrt();
        self.b + self.sigma / self.lambda.sqrt() * explore + self.additive_term()
    }
}

/// How the information-gain argument of a schedule is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMode {
    /// Realized gain of the instance's own history (the default surrogate).
    Realized,
    /// Analytic squared-exponential rate `(ln(1 + n))^{d+1}` with unit
    /// constant; for sensitivity studies only.
    AnalyticSe,
}

/// Produces the `gamma_hat` fed into [`BetaSchedule::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaSource {
    pub mode: GammaMode,
    pub dim: usize,
}

impl GammaSource {
    pub fn realized(dim: usize) -> Self {
        Self { mode: GammaMode::Realized, dim }
    }

    pub fn value<S: Scalar>(&self, posterior: &Posterior<S>) -> S {
        match self.mode {
            GammaMode::Realized => posterior.info_gain(),
            GammaMode::AnalyticSe => {
                let n = S::from_usize(posterior.len()).unwrap();
                (S::one() + n).ln().powi(self.dim as i32 + 1)
            }
        }
    }
}

/// One instant's confidence bounds over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<S> {
    pub ucb: Vec<S>,
    pub lcb: Vec<S>,
}

/// `ucb[i] = mean_i + alpha beta std_i`, `lcb[i] = mean_i - alpha beta std_i`.
pub fn bounds_snapshot<S: Scalar>(posterior: &Posterior<S>, beta: S, alpha: S) -> Snapshot<S> {
    let n = posterior.grid_kernel().len();
    let mut ucb = Vec::with_capacity(n);
    let mut lcb = Vec::with_capacity(n);
    for g in 0..n {
        let m = posterior.grid_mean(g);
        let w = alpha * beta * posterior.grid_std(g);
        ucb.push(m + w);
        lcb.push(m - w);
    }
    Snapshot { ucb, lcb }
}

/// Running pointwise min of upper bounds / max of lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectedBounds<S> {
    alpha: S,
    ucb: Vec<S>,
    lcb: Vec<S>,
}

impl<S: Scalar> IntersectedBounds<S> {
    /// Fresh bounds over `grid_size` points; vacuous until the first update.
    pub fn new(grid_size: usize, alpha: S) -> Self {
        Self {
            alpha,
            ucb: vec![S::infinity(); grid_size],
            lcb: vec![S::neg_infinity(); grid_size],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.ucb.len()
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    /// Intersect one more snapshot into the running bounds.
    pub fn update(&mut self, snapshot: &Snapshot<S>) -> Result<()> {
        if snapshot.ucb.len() != self.ucb.len() || snapshot.lcb.len() != self.lcb.len() {
            return Err(Error::LengthMismatch { expected: self.ucb.len(), got: snapshot.ucb.len() });
        }
        for (r, &s) in self.ucb.iter_mut().zip(snapshot.ucb.iter()) {
            *r = r.min(s);
        }
        for (r, &s) in self.lcb.iter_mut().zip(snapshot.lcb.iter()) {
            *r = r.max(s);
        }
        Ok(())
    }

    pub fn ucb(&self) -> &[S] {
        &self.ucb
    }

    pub fn lcb(&self) -> &[S] {
        &self.lcb
    }
}

/// Whether some grid point has the fast instance's intersected upper bound
/// strictly below the slow instance's intersected lower bound. Both sides
/// use width multiplier one. Firing means the corruption has been detected.
pub fn switch_condition<S: Scalar>(fast: &IntersectedBounds<S>, slow: &IntersectedBounds<S>) -> bool {
    fast.ucb
        .iter()
        .zip(slow.lcb.iter())
        .any(|(&u, &l)| u - l < S::zero())
}

/// Largest intersected lower bound over the grid.
fn max_lcb<S: Scalar>(bounds: &IntersectedBounds<S>) -> S {
    bounds
        .lcb
        .iter()
        .copied()
        .fold(S::neg_infinity(), |a, b| a.max(b))
}

/// Indices whose intersected upper bound lies strictly below some point's
/// intersected lower bound; non-shrinking over monotone updates.
pub fn suboptimal_set<S: Scalar>(bounds: &IntersectedBounds<S>) -> Vec<usize> {
    let threshold = max_lcb(bounds);
    bounds
        .ucb
        .iter()
        .enumerate()
        .filter(|&(_, &u)| u < threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Point membership test for the strictly-suboptimal set.
pub fn is_suboptimal<S: Scalar>(bounds: &IntersectedBounds<S>, index: usize) -> bool {
    bounds.ucb[index] < max_lcb(bounds)
}

/// Per-layer potential-maximizer sets, nested upward across layers and
/// non-expanding over time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximizerSets {
    /// `sets[l][g]`: grid point g still a potential maximizer at layer l+1.
    sets: Vec<Vec<bool>>,
}

impl MaximizerSets {
    /// Every layer starts as the full grid.
    pub fn new(num_layers: usize, grid_size: usize) -> Self {
        Self { sets: vec![vec![true; grid_size]; num_layers] }
    }

    pub fn num_layers(&self) -> usize {
        self.sets.len()
    }

    /// Membership mask of `layer` (1-based).
    pub fn layer(&self, layer: usize) -> &[bool] {
        &self.sets[layer - 1]
    }

    pub fn layer_is_empty(&self, layer: usize) -> bool {
        !self.sets[layer - 1].iter().any(|&m| m)
    }

    /// Recompute `layer` from its intersected bounds and intersect the
    /// result downward into all lower layers. Layers above are untouched.
    pub fn update<S: Scalar>(&mut self, layer: usize, bounds: &IntersectedBounds<S>) {
        let threshold = max_lcb(bounds);
        let li = layer - 1;
        for (g, keep) in self.sets[li].iter_mut().enumerate() {
            *keep = *keep && bounds.ucb[g] >= threshold;
        }
        let (lower, rest) = self.sets.split_at_mut(li);
        let fresh = &rest[0];
        for set in lower {
            for (m, &f) in set.iter_mut().zip(fresh.iter()) {
                *m = *m && f;
            }
        }
    }

    /// `M^(1) subset of M^(2) subset of ... subset of M^(L)`.
    pub fn is_nested(&self) -> bool {
        self.sets.windows(2).all(|pair| {
            pair[0]
                .iter()
                .zip(pair[1].iter())
                .all(|(&low, &high)| !low || high)
        })
    }

    /// `other` is a pointwise subset of `self` at every layer.
    pub fn contains(&self, other: &MaximizerSets) -> bool {
        self.sets.len() == other.sets.len()
            && self
                .sets
                .iter()
                .zip(other.sets.iter())
                .all(|(old, new)| old.iter().zip(new.iter()).all(|(&o, &n)| !n || o))
    }
}

/// Smallest round `tau <= horizon` at which
/// `sqrt(16 alpha^2 beta(tau)^2 gamma(tau) / tau) <= delta0 / 10`,
/// or `None` if the horizon is reached first. Diagnostic only.
pub fn elimination_time<S: Scalar>(
    delta0: S,
    beta_seq: impl Fn(u64) -> S,
    gamma_seq: impl Fn(u64) -> S,
    alpha: S,
    horizon: u64,
) -> Option<u64> {
    let target = delta0 / S::real(10.0);
    (1..=horizon).find(|&tau| {
        let beta = beta_seq(tau);
        let gamma = gamma_seq(tau);
        let lhs = (S::real(16.0) * alpha * alpha * beta * beta * gamma / S::real(tau as f64)).sqrt();
        lhs <= target
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{DomainGrid, Kernel, GridKernel};
    use std::sync::Arc;

    fn schedule(variant: BetaVariant<f64>) -> BetaSchedule<f64> {
        BetaSchedule::new(1.0, 1.0, 1.0, 1.0, 0.1, variant).unwrap()
    }

    #[test]
    fn noise_free_beta_collapses_to_norm_bound() {
        let s = BetaSchedule::new(1.0, 1.0, 0.0, 1.0, 0.1, BetaVariant::Standard).unwrap();
        for t in [1u64, 5, 100] {
            assert_eq!(s.eval(t, 3.0), 1.0);
        }
    }

    #[test]
    fn standard_beta_frozen_value() {
        let s = schedule(BetaVariant::Standard);
        let expect = 1.0 + (2.0 * 10.0f64.ln()).sqrt();
        assert!((s.eval(1, 0.0) - expect).abs() < 1e-12);
        assert!((s.eval(1, 0.0) - 3.1460).abs() < 1e-4);
    }

    #[test]
    fn known_zero_budget_equals_standard() {
        let std = schedule(BetaVariant::Standard);
        let kc = schedule(BetaVariant::KnownC { corruption: 0.0 });
        for t in 1..20u64 {
            let g = 0.3 * t as f64;
            assert_eq!(std.eval(t, g), kc.eval(t, g));
        }
    }

    #[test]
    fn known_budget_is_standard_plus_scaled_budget() {
        let lambda = 2.3;
        let std = BetaSchedule::new(1.5, 0.7, 0.9, lambda, 0.05, BetaVariant::Standard).unwrap();
        let kc = BetaSchedule::new(1.5, 0.7, 0.9, lambda, 0.05, BetaVariant::KnownC { corruption: 4.0 })
            .unwrap();
        for t in 1..10u64 {
            let g = 0.5 * t as f64;
            assert!((kc.eval(t, g) - std.eval(t, g) - 4.0 / lambda.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn slow_instance_formula() {
        let (b, b0, sig, lam, delta): (f64, f64, f64, f64, f64) = (2.0, 0.8, 0.3, 1.0, 0.1);
        let s = BetaSchedule::new(b, b0, sig, lam, delta, BetaVariant::SlowInstance).unwrap();
        let g = 1.7;
        let expect = b + sig * (2.0 * (g + (5.0 / delta).ln())).sqrt() + (3.0 + b0 * (5.0 / delta).ln());
        assert!((s.eval(3, g) - expect).abs() < 1e-12);
    }

    #[test]
    fn layered_formula_uses_horizon_log() {
        let (b, b0, sig, lam, delta): (f64, f64, f64, f64, f64) = (2.0, 0.8, 0.3, 1.0, 0.1);
        let s = BetaSchedule::new(b, b0, sig, lam, delta, BetaVariant::Layered { horizon: 8 }).unwrap();
        let g = 0.9;
        let q: f64 = 4.0 * (1.0 + 3.0); // log2(8) = 3
        let expect = b + sig * (2.0 * (g + (q / delta).ln())).sqrt() + (3.0 + b0 * (q / delta).ln());
        assert!((s.eval(2, g) - expect).abs() < 1e-12);
    }

    #[test]
    fn delta_outside_unit_interval_is_a_config_error() {
        assert!(BetaSchedule::new(1.0, 1.0, 1.0, 1.0, 1.5, BetaVariant::<f64>::Standard).is_err());
        assert!(BetaSchedule::new(1.0, 1.0, 1.0, 1.0, 0.0, BetaVariant::<f64>::Standard).is_err());
    }

    fn prior_posterior(n: usize) -> Posterior<f64> {
        let grid = DomainGrid::uniform(0.0, 1.0, n).unwrap();
        let kernel = Kernel::squared_exponential(0.25).unwrap();
        Posterior::new(Arc::new(GridKernel::new(kernel, grid).unwrap()), 1.0).unwrap()
    }

    #[test]
    fn prior_snapshot_is_symmetric_around_zero() {
        let p = prior_posterior(20);
        let snap = bounds_snapshot(&p, 2.0, 1.0);
        assert!(snap.ucb.iter().all(|&u| u == 2.0));
        assert!(snap.lcb.iter().all(|&l| l == -2.0));
    }

    #[test]
    fn doubling_alpha_doubles_width_exactly() {
        let mut p = prior_posterior(30);
        p.append_grid(11, 0.7).unwrap();
        p.append_grid(25, -0.2).unwrap();
        let one = bounds_snapshot(&p, 1.7, 1.0);
        let two = bounds_snapshot(&p, 1.7, 2.0);
        for g in 0..30 {
            let w1 = one.ucb[g] - one.lcb[g];
            let w2 = two.ucb[g] - two.lcb[g];
            assert!((w2 - 2.0 * w1).abs() < 1e-12);
        }
    }

    #[test]
    fn snapshot_composes_with_posterior_hand_values() {
        let mut p = prior_posterior(30);
        p.append_grid(4, 0.9).unwrap();
        let snap = bounds_snapshot(&p, 2.0, 1.5);
        let expect = 0.45 + 1.5 * 2.0 * 0.5f64.sqrt();
        assert!((snap.ucb[4] - expect).abs() < 1e-12);
    }

    #[test]
    fn first_update_equals_snapshot_then_running_min() {
        let mut ib = IntersectedBounds::new(1, 1.0);
        ib.update(&Snapshot { ucb: vec![3.0], lcb: vec![-1.0] }).unwrap();
        assert_eq!(ib.ucb(), &[3.0]);
        assert_eq!(ib.lcb(), &[-1.0]);
        ib.update(&Snapshot { ucb: vec![5.0], lcb: vec![-2.0] }).unwrap();
        assert_eq!(ib.ucb(), &[3.0]);
        assert_eq!(ib.lcb(), &[-1.0]);
    }

    #[test]
    fn crossed_running_bounds_are_representable() {
        // Legal only under corruption; this is what the switch detects.
        let mut ib = IntersectedBounds::new(1, 1.0);
        ib.update(&Snapshot { ucb: vec![1.0], lcb: vec![0.0] }).unwrap();
        ib.update(&Snapshot { ucb: vec![4.0], lcb: vec![2.0] }).unwrap();
        assert!(ib.ucb()[0] < ib.lcb()[0]);
    }

    #[test]
    fn update_rejects_length_mismatch() {
        let mut ib = IntersectedBounds::new(2, 1.0);
        let bad = Snapshot { ucb: vec![0.0], lcb: vec![0.0] };
        assert!(ib.update(&bad).is_err());
    }

    #[test]
    fn switch_is_false_for_fresh_instances() {
        // Prior bounds: fast ucb = beta_f everywhere, slow lcb = -beta_s.
        let p = prior_posterior(10);
        let mut fast = IntersectedBounds::new(10, 1.0);
        fast.update(&bounds_snapshot(&p, 2.0, 1.0)).unwrap();
        let mut slow = IntersectedBounds::new(10, 1.0);
        slow.update(&bounds_snapshot(&p, 6.0, 1.0)).unwrap();
        assert!(!switch_condition(&fast, &slow));
    }

    #[test]
    fn switch_fires_on_constructed_crossing() {
        let mut fast = IntersectedBounds::new(2, 1.0);
        fast.update(&Snapshot { ucb: vec![0.5, 3.0], lcb: vec![-1.0, -1.0] }).unwrap();
        let mut slow = IntersectedBounds::new(2, 1.0);
        slow.update(&Snapshot { ucb: vec![2.0, 2.0], lcb: vec![1.0, -2.0] }).unwrap();
        assert!(switch_condition(&fast, &slow));
    }

    #[test]
    fn fresh_instance_has_empty_suboptimal_set() {
        let p = prior_posterior(10);
        let mut ib = IntersectedBounds::new(10, 1.0);
        ib.update(&bounds_snapshot(&p, 2.0, 1.0)).unwrap();
        assert!(suboptimal_set(&ib).is_empty());
    }

    #[test]
    fn suboptimal_set_by_definition() {
        let mut ib = IntersectedBounds::new(3, 1.0);
        ib.update(&Snapshot { ucb: vec![0.5, 1.2, 0.9], lcb: vec![-1.0, 1.0, -1.0] }).unwrap();
        assert_eq!(suboptimal_set(&ib), vec![0, 2]);
        assert!(is_suboptimal(&ib, 0));
        assert!(!is_suboptimal(&ib, 1));
        assert!(is_suboptimal(&ib, 2));
    }

    #[test]
    fn maximizer_sets_initialize_to_full_grid() {
        let ms = MaximizerSets::new(3, 5);
        for l in 1..=3 {
            assert!(ms.layer(l).iter().all(|&m| m));
        }
        assert!(ms.is_nested());
    }

    #[test]
    fn top_layer_elimination_reaches_all_layers() {
        let mut ms = MaximizerSets::new(3, 5);
        let mut ib = IntersectedBounds::new(5, 1.0);
        // Point 3 strictly below the best lower bound.
        ib.update(&Snapshot {
            ucb: vec![2.0, 2.0, 2.0, 0.4, 2.0],
            lcb: vec![-1.0, 0.5, -1.0, -1.0, -1.0],
        })
        .unwrap();
        ms.update(3, &ib);
        for l in 1..=3 {
            assert!(!ms.layer(l)[3]);
            assert_eq!(ms.layer(l).iter().filter(|&&m| m).count(), 4);
        }
        assert!(ms.is_nested());
    }

    #[test]
    fn lower_layer_update_leaves_upper_layers_alone() {
        let mut ms = MaximizerSets::new(3, 5);
        let mut ib = IntersectedBounds::new(5, 1.0);
        ib.update(&Snapshot {
            ucb: vec![0.4, 2.0, 2.0, 2.0, 2.0],
            lcb: vec![-1.0, 0.5, -1.0, -1.0, -1.0],
        })
        .unwrap();
        ms.update(2, &ib);
        assert!(!ms.layer(1)[0]);
        assert!(!ms.layer(2)[0]);
        assert!(ms.layer(3)[0]);
        assert!(ms.is_nested());
    }

    #[test]
    fn elimination_time_frozen_example() {
        // sqrt(16 * 4 / tau) <= 1 first holds at tau = 64.
        let t = elimination_time(10.0, |_| 1.0, |_| 1.0, 2.0, 1000);
        assert_eq!(t, Some(64));
    }

    #[test]
    fn elimination_time_limits() {
        assert_eq!(elimination_time(f64::INFINITY, |_| 1.0, |_| 1.0, 2.0, 100), Some(1));
        let loose = elimination_time(5.0, |_| 1.0, |_| 1.0, 2.0, 100_000).unwrap();
        let tight = elimination_time(1.0, |_| 1.0, |_| 1.0, 2.0, 100_000).unwrap();
        assert!(tight >= loose);
        assert_eq!(elimination_time(1e-9, |_| 1.0, |_| 1.0, 2.0, 10), None);
    }

    proptest::proptest! {
        #[test]
        fn running_bounds_stay_monotone(seqs in proptest::collection::vec(
            proptest::collection::vec(-10.0f64..10.0, 4), 1..20)) {
            let mut ib = IntersectedBounds::new(4, 1.0);
            let mut prev_ucb = vec![f64::INFINITY; 4];
            let mut prev_lcb = vec![f64::NEG_INFINITY; 4];
            for mid in seqs {
                let snap = Snapshot {
                    ucb: mid.iter().map(|&m| m + 1.0).collect(),
                    lcb: mid.iter().map(|&m| m - 1.0).collect(),
                };
                ib.update(&snap).unwrap();
                for g in 0..4 {
                    proptest::prop_assert!(ib.ucb()[g] <= prev_ucb[g]);
                    proptest::prop_assert!(ib.lcb()[g] >= prev_lcb[g]);
                    proptest::prop_assert!(ib.ucb()[g] <= snap.ucb[g]);
                    proptest::prop_assert!(ib.lcb()[g] >= snap.lcb[g]);
                }
                prev_ucb = ib.ucb().to_vec();
                prev_lcb = ib.lcb().to_vec();
            }
        }

        #[test]
        fn suboptimal_set_never_shrinks(seqs in proptest::collection::vec(
            proptest::collection::vec(-5.0f64..5.0, 6), 1..100)) {
            let mut ib = IntersectedBounds::new(6, 1.0);
            let mut prev: Vec<usize> = Vec::new();
            for mid in seqs {
                let snap = Snapshot {
                    ucb: mid.iter().map(|&m| m + 0.5).collect(),
                    lcb: mid.iter().map(|&m| m - 0.5).collect(),
                };
                ib.update(&snap).unwrap();
                let cur = suboptimal_set(&ib);
                for idx in &prev {
                    proptest::prop_assert!(cur.contains(idx));
                }
                prev = cur;
            }
        }
    }
}
