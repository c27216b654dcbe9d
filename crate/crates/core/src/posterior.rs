//! GP regression state over (possibly corrupted) observations.
//!
//! The state keeps a lower-triangular factor of `K_t + lambda I_t` that is
//! extended by one row per observation, so an append costs O(t * grid)
//! instead of a full O(t^3) refactorization. Posterior mean and variance on
//! the grid are maintained incrementally; off-grid queries run a triangular
//! solve against the factor. Queries are read-only and may run concurrently
//! between appends.

use std::sync::Arc;

use crate::kernels::GridKernel;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// One environment interaction: the clean value, the corruption applied at
/// the drawn point, and their exact sum as observed by the learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<S> {
    pub x_index: usize,
    pub y_clean: S,
    pub corruption: S,
    pub y_corrupted: S,
}

impl<S: Scalar> Observation<S> {
    pub fn new(x_index: usize, y_clean: S, corruption: S) -> Self {
        Self { x_index, y_clean, corruption, y_corrupted: y_clean + corruption }
    }
}

/// Factored GP regression state over observed `(x, y)` pairs.
#[derive(Debug, Clone)]
pub struct Posterior<S> {
    gk: Arc<GridKernel<S>>,
    lambda: S,
    xs: Vec<Vec<S>>,
    x_indices: Vec<Option<usize>>,
    ys: Vec<S>,
    /// Lower-triangular factor of `K_t + lambda I_t`; row i holds i+1 entries.
    chol: Vec<Vec<S>>,
    /// `L^{-1} y`.
    z: Vec<S>,
    /// Per grid point g: the column `L^{-1} k(X_t, x_g)`.
    w_cols: Vec<Vec<S>>,
    mean: Vec<S>,
    var: Vec<S>,
    info_gain: S,
}

impl<S: Scalar> Posterior<S> {
    pub fn new(gk: Arc<GridKernel<S>>, lambda: S) -> Result<Self> {
        if !(lambda.is_finite() && lambda > S::zero()) {
            return Err(Error::InvalidParameter("posterior: lambda must be > 0".into()));
        }
        let n = gk.len();
        let var = (0..n).map(|g| gk.diag(g)).collect();
        Ok(Self {
            gk,
            lambda,
            xs: Vec::new(),
            x_indices: Vec::new(),
            ys: Vec::new(),
            chol: Vec::new(),
            z: Vec::new(),
            w_cols: vec![Vec::new(); n],
            mean: vec![S::zero(); n],
            var,
            info_gain: S::zero(),
        })
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn grid_kernel(&self) -> &Arc<GridKernel<S>> {
        &self.gk
    }

    pub fn history(&self) -> impl Iterator<Item = (&[S], S)> {
        self.xs.iter().map(|x| x.as_slice()).zip(self.ys.iter().copied())
    }

    /// Observed grid indices, `None` where an off-grid point was appended.
    pub fn history_indices(&self) -> &[Option<usize>] {
        &self.x_indices
    }

    /// Append an observation taken at grid point `idx`.
    pub fn append_grid(&mut self, idx: usize, y: S) -> Result<()> {
        if idx >= self.gk.len() {
            return Err(Error::InvalidParameter(format!("posterior: grid index {idx} out of range")));
        }
        if !y.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let x = self.gk.grid().point(idx).to_vec();
        let w = self.w_cols[idx].clone();
        self.append_inner(x, Some(idx), y, w, self.gk.diag(idx));
        Ok(())
    }

    /// Append an observation at an arbitrary finite point.
    pub fn append(&mut self, x: &[S], y: S) -> Result<()> {
        if x.len() != self.gk.grid().dim() {
            return Err(Error::DimensionMismatch { expected: self.gk.grid().dim(), got: x.len() });
        }
        if !y.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let kvec: Vec<S> = self
            .xs
            .iter()
            .map(|xi| self.gk.kernel().eval_unchecked(xi, x))
            .collect();
        let w = forward_solve(&self.chol, &kvec);
        let k_self = self.gk.kernel().eval_unchecked(x, x);
        self.append_inner(x.to_vec(), None, y, w, k_self);
        Ok(())
    }

    fn append_inner(&mut self, x: Vec<S>, idx: Option<usize>, y: S, w: Vec<S>, k_self: S) {
        let w_sq: S = w.iter().map(|&v| v * v).sum();
        let d_sq = k_self + self.lambda - w_sq;
        // lambda > 0 keeps this positive; the floor only guards roundoff.
        let d = d_sq.max(self.lambda * S::real(1e-12)).sqrt();
        let wz: S = w.iter().zip(self.z.iter()).map(|(&a, &b)| a * b).sum();
        let z_new = (y - wz) / d;

        let n = self.gk.len();
        for g in 0..n {
            let k_xg = match idx {
                Some(i) => self.gk.gram_row(i)[g],
                None => self.gk.kernel().eval_unchecked(&x, self.gk.grid().point(g)),
            };
            let col = &mut self.w_cols[g];
            let dot: S = w.iter().zip(col.iter()).map(|(&a, &b)| a * b).sum();
            let w_new = (k_xg - dot) / d;
            col.push(w_new);
            self.mean[g] += w_new * z_new;
            self.var[g] -= w_new * w_new;
        }

        self.info_gain += d.ln() - self.lambda.ln() / S::real(2.0);
        let mut row = w;
        row.push(d);
        self.chol.push(row);
        self.z.push(z_new);
        self.xs.push(x);
        self.x_indices.push(idx);
        self.ys.push(y);
    }

    /// Posterior mean at grid point `g`.
    pub fn grid_mean(&self, g: usize) -> S {
        self.mean[g]
    }

    /// Posterior standard deviation at grid point `g`.
    pub fn grid_std(&self, g: usize) -> S {
        self.var[g].max(S::zero()).sqrt()
    }

    pub fn grid_means(&self) -> &[S] {
        &self.mean
    }

    /// Posterior standard deviations over the whole grid.
    pub fn grid_stds(&self) -> Vec<S> {
        self.var.iter().map(|&v| v.max(S::zero()).sqrt()).collect()
    }

    /// Posterior `(mean, std)` at an arbitrary finite point.
    pub fn predict(&self, x: &[S]) -> Result<(S, S)> {
        if x.len() != self.gk.grid().dim() {
            return Err(Error::DimensionMismatch { expected: self.gk.grid().dim(), got: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let kvec: Vec<S> = self
            .xs
            .iter()
            .map(|xi| self.gk.kernel().eval_unchecked(xi, x))
            .collect();
        let v = forward_solve(&self.chol, &kvec);
        let mean: S = v.iter().zip(self.z.iter()).map(|(&a, &b)| a * b).sum();
        let k_self = self.gk.kernel().eval_unchecked(x, x);
        let v_sq: S = v.iter().map(|&a| a * a).sum();
        Ok((mean, (k_self - v_sq).max(S::zero()).sqrt()))
    }

    /// Realized information gain `1/2 ln det(I_t + lambda^{-1} K_t)` of the
    /// current history. Zero when empty, non-decreasing in t.
    pub fn info_gain(&self) -> S {
        self.info_gain
    }
}

/// Whether the shift between a clean and a corrupted posterior mean stays
/// within `C lambda^{-1/2} sigma(x)` at every grid point (1e-9 slack).
///
/// Both states must share the regularizer and the exact input history; the
/// corrupted state differs only in its observation values, whose corruption
/// magnitudes are assumed to sum to at most `c_budget`.
pub fn corrupted_mean_shift_within_bound<S: Scalar>(
    clean: &Posterior<S>,
    corrupted: &Posterior<S>,
    c_budget: S,
) -> Result<bool> {
    if clean.lambda != corrupted.lambda {
        return Err(Error::HistoryMismatch("regularizers differ".into()));
    }
    if clean.xs.len() != corrupted.xs.len() || clean.xs != corrupted.xs {
        return Err(Error::HistoryMismatch("input sequences differ".into()));
    }
    let factor = c_budget / clean.lambda.sqrt();
    let slack = S::real(1e-9);
    for g in 0..clean.gk.len() {
        let shift = (clean.grid_mean(g) - corrupted.grid_mean(g)).abs();
        if shift > factor * clean.grid_std(g) + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

fn forward_solve<S: Scalar>(chol: &[Vec<S>], rhs: &[S]) -> Vec<S> {
    let mut v = Vec::with_capacity(rhs.len());
    for (i, row) in chol.iter().enumerate() {
        let dot: S = row[..i].iter().zip(v.iter()).map(|(&a, &b): (&S, &S)| a * b).sum();
        v.push((rhs[i] - dot) / row[i]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{DomainGrid, Kernel};

    fn se_grid(n: usize) -> Arc<GridKernel<f64>> {
        let grid = DomainGrid::uniform(0.0, 1.0, n).unwrap();
        let kernel = Kernel::squared_exponential(0.25).unwrap();
        Arc::new(GridKernel::new(kernel, grid).unwrap())
    }

    #[test]
    fn empty_state_is_the_prior() {
        let p = Posterior::new(se_grid(50), 1.0).unwrap();
        for g in 0..50 {
            assert_eq!(p.grid_mean(g), 0.0);
            assert_eq!(p.grid_std(g), 1.0);
        }
        assert_eq!(p.info_gain(), 0.0);
        let (m, s) = p.predict(&[0.37]).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn single_observation_matches_closed_form() {
        // With one observation at x1 (k(x1,x1)=1) the mean at any x is
        // k(x,x1) y / (1+lambda).
        let gk = se_grid(50);
        let lambda = 0.7;
        let mut p = Posterior::new(gk.clone(), lambda).unwrap();
        let y = 1.3;
        p.append_grid(10, y).unwrap();
        for g in [0usize, 10, 25, 49] {
            let expect = gk.gram_row(10)[g] * y / (1.0 + lambda);
            assert!((p.grid_mean(g) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_observation_keeps_zero_mean() {
        let mut p = Posterior::new(se_grid(30), 1.0).unwrap();
        p.append_grid(7, 0.0).unwrap();
        assert!(p.grid_means().iter().all(|&m| m.abs() < 1e-15));
    }

    #[test]
    fn query_at_observed_point_with_unit_lambda() {
        let mut p = Posterior::new(se_grid(30), 1.0).unwrap();
        let y1 = 0.9;
        p.append_grid(4, y1).unwrap();
        assert!((p.grid_mean(4) - y1 / 2.0).abs() < 1e-12);
        assert!((p.grid_std(4) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn info_gain_frozen_values() {
        let mut p = Posterior::new(se_grid(30), 1.0).unwrap();
        assert_eq!(p.info_gain(), 0.0);
        p.append_grid(3, 0.5).unwrap();
        assert!((p.info_gain() - 0.5 * 2.0f64.ln()).abs() < 1e-12);
        // A duplicate point: det([[2,1],[1,2]]) = 3.
        p.append_grid(3, -0.5).unwrap();
        assert!((p.info_gain() - 0.5 * 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn info_gain_increment_matches_variance_identity() {
        // Appending x adds 1/2 ln(1 + sigma_{t-1}^2(x) / lambda).
        let lambda = 1.4;
        let mut p = Posterior::new(se_grid(40), lambda).unwrap();
        for (i, idx) in [0usize, 13, 13, 39, 20].into_iter().enumerate() {
            let var_before = p.grid_std(idx).powi(2);
            let before = p.info_gain();
            p.append_grid(idx, 0.3 * i as f64 - 0.5).unwrap();
            let expect = 0.5 * (1.0 + var_before / lambda).ln();
            assert!((p.info_gain() - before - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn variance_never_increases_under_appends() {
        let mut p = Posterior::new(se_grid(60), 0.5).unwrap();
        let mut prev = p.grid_stds();
        for idx in [5usize, 40, 5, 22, 59, 0, 22] {
            p.append_grid(idx, 0.1).unwrap();
            let cur = p.grid_stds();
            for g in 0..60 {
                assert!(cur[g] <= prev[g] + 1e-9);
            }
            prev = cur;
        }
    }

    #[test]
    fn predict_agrees_with_grid_cache() {
        let gk = se_grid(40);
        let mut p = Posterior::new(gk.clone(), 1.0).unwrap();
        for (idx, y) in [(3usize, 0.4), (17, -1.1), (30, 2.0), (17, 0.0)] {
            p.append_grid(idx, y).unwrap();
        }
        for g in [0usize, 11, 17, 39] {
            let (m, s) = p.predict(gk.grid().point(g)).unwrap();
            assert!((m - p.grid_mean(g)).abs() < 1e-10);
            assert!((s - p.grid_std(g)).abs() < 1e-10);
        }
    }

    #[test]
    fn off_grid_append_matches_grid_append_at_same_point() {
        let gk = se_grid(25);
        let mut a = Posterior::new(gk.clone(), 1.0).unwrap();
        let mut b = Posterior::new(gk.clone(), 1.0).unwrap();
        a.append_grid(12, 0.8).unwrap();
        let x = gk.grid().point(12).to_vec();
        b.append(&x, 0.8).unwrap();
        for g in 0..25 {
            assert!((a.grid_mean(g) - b.grid_mean(g)).abs() < 1e-12);
            assert!((a.grid_std(g) - b.grid_std(g)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        let mut p = Posterior::new(se_grid(10), 1.0).unwrap();
        assert!(matches!(p.append_grid(0, f64::NAN), Err(Error::NonFiniteInput)));
        assert!(matches!(p.append(&[f64::INFINITY], 0.0), Err(Error::NonFiniteInput)));
    }

    #[test]
    fn mean_shift_zero_corruption_passes() {
        let gk = se_grid(30);
        let mut clean = Posterior::new(gk.clone(), 1.0).unwrap();
        let mut corr = Posterior::new(gk, 1.0).unwrap();
        for (idx, y) in [(2usize, 0.3), (20, -0.4)] {
            clean.append_grid(idx, y).unwrap();
            corr.append_grid(idx, y).unwrap();
        }
        assert!(corrupted_mean_shift_within_bound(&clean, &corr, 0.0).unwrap());
    }

    #[test]
    fn mean_shift_single_observation_hand_values() {
        // Shift at x1 is |c|/(1+lambda) = 0.5|c|; the bound is
        // C lambda^{-1/2} sigma(x1) = |c| sqrt(1/2) with C=|c|, lambda=1.
        let gk = se_grid(30);
        let c = 0.8;
        let mut clean = Posterior::new(gk.clone(), 1.0).unwrap();
        let mut corr = Posterior::new(gk, 1.0).unwrap();
        clean.append_grid(9, 0.2).unwrap();
        corr.append_grid(9, 0.2 + c).unwrap();
        let shift = (clean.grid_mean(9) - corr.grid_mean(9)).abs();
        assert!((shift - 0.5 * c).abs() < 1e-12);
        let bound = c * clean.grid_std(9);
        assert!((bound - c * 0.5f64.sqrt()).abs() < 1e-12);
        assert!(corrupted_mean_shift_within_bound(&clean, &corr, c).unwrap());
    }

    #[test]
    fn mean_shift_rejects_mismatched_histories() {
        let gk = se_grid(30);
        let mut clean = Posterior::new(gk.clone(), 1.0).unwrap();
        let mut corr = Posterior::new(gk, 1.0).unwrap();
        clean.append_grid(1, 0.0).unwrap();
        corr.append_grid(2, 0.0).unwrap();
        assert!(corrupted_mean_shift_within_bound(&clean, &corr, 0.0).is_err());
    }
}
