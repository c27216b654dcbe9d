//! Kernels and the discretized domain.
//!
//! The optimization domain is a finite grid of d-dimensional points; every
//! acquisition argmax, maximizer set and adversary strategy operates on grid
//! indices. Kernels are normalized so that `k(x, x') <= 1` over the grid,
//! which is checked when a kernel is bound to a grid.

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Jitter added to Gram diagonals when a regularizer-free factorization is
/// needed. Duplicate sampled points make the raw Gram singular.
pub const GRAM_JITTER: f64 = 1e-10;

/// A finite discretization of the compact domain.
///
/// Point order is fixed for the lifetime of an experiment; argmax ties are
/// always broken toward the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGrid<S> {
    coords: Vec<S>,
    dim: usize,
}

impl<S: Scalar> DomainGrid<S> {
    /// Build a grid from explicit points. Points must be non-empty, finite,
    /// of equal dimension and pairwise distinct.
    pub fn from_points(points: Vec<Vec<S>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("grid: no points".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter("grid: zero-dimensional points".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteInput);
            }
            coords.extend_from_slice(p);
        }
        let grid = Self { coords, dim };
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                if grid.point(i) == grid.point(j) {
                    return Err(Error::InvalidParameter(format!(
                        "grid: points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(grid)
    }

    /// `n` uniformly spaced points on `[lo, hi]` (1-dimensional).
    pub fn uniform(lo: S, hi: S, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid: n must be positive".into()));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if n > 1 && lo >= hi {
            return Err(Error::InvalidParameter("grid: lo must be < hi".into()));
        }
        let mut coords = Vec::with_capacity(n);
        if n == 1 {
            coords.push(lo);
        } else {
            let step = (hi - lo) / S::from_usize(n - 1).unwrap();
            for i in 0..n {
                coords.push(lo + step * S::from_usize(i).unwrap());
            }
        }
        Ok(Self { coords, dim: 1 })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[S] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[S]> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Matern smoothness restricted to the half-integer orders with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaternNu {
    Half,
    ThreeHalves,
    FiveHalves,
}

/// A positive-definite kernel family plus hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel<S> {
    SquaredExponential { lengthscale: S },
    Matern { nu: MaternNu, lengthscale: S },
    Linear { scale: S },
}

impl<S: Scalar> Kernel<S> {
    pub fn squared_exponential(lengthscale: S) -> Result<Self> {
        if !(lengthscale.is_finite() && lengthscale > S::zero()) {
            return Err(Error::InvalidParameter("kernel: lengthscale must be > 0".into()));
        }
        Ok(Self::SquaredExponential { lengthscale })
    }

    pub fn matern(nu: MaternNu, lengthscale: S) -> Result<Self> {
        if !(lengthscale.is_finite() && lengthscale > S::zero()) {
            return Err(Error::InvalidParameter("kernel: lengthscale must be > 0".into()));
        }
        Ok(Self::Matern { nu, lengthscale })
    }

    pub fn linear(scale: S) -> Result<Self> {
        if !(scale.is_finite() && scale > S::zero()) {
            return Err(Error::InvalidParameter("kernel: scale must be > 0".into()));
        }
        Ok(Self::Linear { scale })
    }

    /// Evaluate `k(x, x2)`. Symmetric, bounded by 1 in absolute value on any
    /// grid the kernel has been validated against.
    pub fn eval(&self, x: &[S], x2: &[S]) -> Result<S> {
        if x.len() != x2.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: x2.len() });
        }
        if x.iter().chain(x2.iter()).any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(self.eval_unchecked(x, x2))
    }

    /// Evaluation without input validation; used on points that already
    /// passed grid construction.
    pub(crate) fn eval_unchecked(&self, x: &[S], x2: &[S]) -> S {
        match *self {
            Kernel::SquaredExponential { lengthscale } => {
                let sq: S = x
                    .iter()
                    .zip(x2.iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                (-sq / (S::real(2.0) * lengthscale * lengthscale)).exp()
            }
            Kernel::Matern { nu, lengthscale } => {
                let sq: S = x
                    .iter()
                    .zip(x2.iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum();
                let r = sq.sqrt() / lengthscale;
                match nu {
                    MaternNu::Half => (-r).exp(),
                    MaternNu::ThreeHalves => {
                        let s = S::real(3.0).sqrt() * r;
                        (S::one() + s) * (-s).exp()
                    }
                    MaternNu::FiveHalves => {
                        let s = S::real(5.0).sqrt() * r;
                        (S::one() + s + s * s / S::real(3.0)) * (-s).exp()
                    }
                }
            }
            Kernel::Linear { scale } => {
                let dot: S = x.iter().zip(x2.iter()).map(|(&a, &b)| a * b).sum();
                scale * dot
            }
        }
    }

    /// The Gram matrix `[k(p_i, p_j)]` over the given points, row-major.
    pub fn gram_matrix(&self, points: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("gram: no points".into()));
        }
        let n = points.len();
        let mut g = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.eval(&points[i], &points[j])?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }
}

/// A kernel bound to a grid, with the full grid Gram matrix precomputed.
///
/// Construction checks the normalization `k(x, x') <= 1` over all grid
/// pairs (for the linear kernel this is the `max_x s * (x . x) <= 1`
/// condition). Immutable afterwards and safe to share across runs.
#[derive(Debug)]
pub struct GridKernel<S> {
    grid: DomainGrid<S>,
    kernel: Kernel<S>,
    gram: Vec<S>, // row-major, len * len
}

impl<S: Scalar> GridKernel<S> {
    pub fn new(kernel: Kernel<S>, grid: DomainGrid<S>) -> Result<Self> {
        let n = grid.len();
        let mut gram = vec![S::zero(); n * n];
        let tol = S::one() + S::real(1e-12);
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval_unchecked(grid.point(i), grid.point(j));
                if v.abs() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "kernel: |k| = {v} > 1 at grid pair ({i}, {j}); rescale the kernel"
                    )));
                }
                gram[i * n + j] = v;
                gram[j * n + i] = v;
            }
        }
        Ok(Self { grid, kernel, gram })
    }

    pub fn grid(&self) -> &DomainGrid<S> {
        &self.grid
    }

    pub fn kernel(&self) -> &Kernel<S> {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row `i` of the grid Gram matrix: `k(x_i, .)` over the whole grid.
    pub fn gram_row(&self, i: usize) -> &[S] {
        let n = self.grid.len();
        &self.gram[i * n..(i + 1) * n]
    }

    /// `k(x_i, x_i)` (prior variance at grid point `i`).
    pub fn diag(&self, i: usize) -> S {
        self.gram[i * self.grid.len() + i]
    }
}
