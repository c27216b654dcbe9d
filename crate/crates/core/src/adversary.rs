//! Adaptive corruption strategies with exact budget accounting.
//!
//! Every round the strategy proposes a corruption function over the grid;
//! the committed function is clamped to the range bound, scaled down to the
//! remaining budget when the proposal is too expensive, and the ledger is
//! charged the sup-norm of what was committed. The commitment happens after
//! the policy publishes its selection distribution but before the draw, so
//! it can never depend on the realized point.

use crate::kernels::DomainGrid;
use crate::policies::Phi;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Budget accounting under the sup-norm charging rule.
#[derive(Debug, Clone)]
pub struct CorruptionLedger<S> {
    budget: S,
    spent: S,
    charges: Vec<S>,
}

impl<S: Scalar> CorruptionLedger<S> {
    pub fn new(budget: S) -> Result<Self> {
        if !(budget.is_finite() && budget >= S::zero()) {
            return Err(Error::InvalidParameter("ledger: budget must be >= 0".into()));
        }
        Ok(Self { budget, spent: S::zero(), charges: Vec::new() })
    }

    pub fn budget(&self) -> S {
        self.budget
    }

    /// Total charged so far; always the exact sum of [`Self::charges`].
    pub fn spent(&self) -> S {
        self.spent
    }

    pub fn remaining(&self) -> S {
        (self.budget - self.spent).max(S::zero())
    }

    pub fn charges(&self) -> &[S] {
        &self.charges
    }

    fn charge(&mut self, amount: S) {
        debug_assert!(amount >= S::zero());
        self.charges.push(amount);
        self.spent += amount;
    }
}

/// Per-grid-point corruption committed for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionFunction<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> CorruptionFunction<S> {
    pub fn max_abs(&self) -> S {
        self.values.iter().fold(S::zero(), |a, &v| a.max(v.abs()))
    }
}

/// Everything the adversary is allowed to see when committing: the true
/// function, the clean observation history and the published selection
/// distribution, but never the realized draw.
#[derive(Debug)]
pub struct AdversaryContext<'a, S> {
    pub grid: &'a DomainGrid<S>,
    pub f_values: &'a [S],
    pub b0: S,
    /// Clean observations `(x_index, y)` from previous rounds.
    pub history: &'a [(usize, S)],
    pub phi: &'a Phi<S>,
}

impl<S: Scalar> AdversaryContext<'_, S> {
    fn f_star_index(&self) -> usize {
        argmax_lowest(self.f_values)
    }
}

/// Where the region strategy centers its corrupted neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionCenter<S> {
    /// Around the true maximizer.
    AtMaximizer,
    /// Around an explicit coordinate.
    Coord(Vec<S>),
}

/// Corruption strategies; each is one configuration of [`commit`].
#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryStrategy<S> {
    /// No corruption; recovers the standard setting.
    Zero,
    /// Pushes observations in a neighborhood of the maximizer down by a
    /// fraction of the optimal value while the budget lasts.
    Region { center: RegionCenter<S>, radius: S, fraction: S },
    /// Perturbs every function value toward zero.
    Flatten,
    /// Makes a designated suboptimal point appear optimal: adds `delta`
    /// there and subtracts it wherever the function is at least as large.
    Swap { target: usize, delta: S },
}

impl<S: Scalar> AdversaryStrategy<S> {
    fn propose(&self, ctx: &AdversaryContext<'_, S>) -> Vec<S> {
        let n = ctx.f_values.len();
        match self {
            AdversaryStrategy::Zero => vec![S::zero(); n],
            AdversaryStrategy::Region { center, radius, fraction } => {
                let star = ctx.f_star_index();
                let magnitude = *fraction * ctx.f_values[star];
                let center_coords: Vec<S> = match center {
                    RegionCenter::AtMaximizer => ctx.grid.point(star).to_vec(),
                    RegionCenter::Coord(c) => c.clone(),
                };
                (0..n)
                    .map(|g| {
                        let d2: S = ctx
                            .grid
                            .point(g)
                            .iter()
                            .zip(center_coords.iter())
                            .map(|(&a, &b)| (a - b) * (a - b))
                            .sum();
                        if d2.sqrt() <= *radius {
                            -magnitude
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            }
            AdversaryStrategy::Flatten => ctx.f_values.iter().map(|&f| -f).collect(),
            AdversaryStrategy::Swap { target, delta } => {
                let f_target = ctx.f_values[*target];
                ctx.f_values
                    .iter()
                    .enumerate()
                    .map(|(g, &f)| {
                        if g == *target {
                            *delta
                        } else if f >= f_target {
                            -*delta
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Commit one round's corruption: clamp the proposal to `[-B0, B0]`, scale
/// it uniformly into the remaining budget, charge the ledger the sup-norm of
/// the result. An exhausted ledger forces the zero function.
pub fn commit<S: Scalar>(
    strategy: &AdversaryStrategy<S>,
    ctx: &AdversaryContext<'_, S>,
    ledger: &mut CorruptionLedger<S>,
) -> CorruptionFunction<S> {
    let mut values = strategy.propose(ctx);
    for v in &mut values {
        *v = v.min(ctx.b0).max(-ctx.b0);
    }
    let remaining = ledger.remaining();
    let mut max_abs = values.iter().fold(S::zero(), |a, &v| a.max(v.abs()));
    if max_abs > remaining {
        let factor = if max_abs > S::zero() { remaining / max_abs } else { S::zero() };
        for v in &mut values {
            *v = (*v * factor).min(remaining).max(-remaining);
        }
        max_abs = values.iter().fold(S::zero(), |a, &v| a.max(v.abs()));
    }
    ledger.charge(max_abs);
    CorruptionFunction { values }
}

fn argmax_lowest<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
