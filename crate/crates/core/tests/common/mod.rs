//! Independent oracles used by the integration tests: explicit dense
//! inverses via unpivoted Gaussian elimination, deliberately sharing no code
//! with the factored implementation they check.

use corruptgp::Kernel;

/// Solve `A x = b` by unpivoted Gaussian elimination. `A` is consumed.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let pivot = a[k][k];
        for i in (k + 1)..n {
            let factor = a[i][k] / pivot;
            for j in k..n {
                a[i][j] -= factor * a[k][j];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x
}

/// `ln det A` via the pivots of unpivoted Gaussian elimination.
pub fn gauss_log_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut log_det = 0.0;
    for k in 0..n {
        let pivot = a[k][k];
        log_det += pivot.ln();
        for i in (k + 1)..n {
            let factor = a[i][k] / pivot;
            for j in k..n {
                a[i][j] -= factor * a[k][j];
            }
        }
    }
    log_det
}

/// Dense GP regression oracle: explicit `(K + lambda I)^{-1}` applications.
pub struct DenseOracle<'a> {
    kernel: &'a Kernel,
    lambda: f64,
    xs: Vec<Vec<f64>>,
    /// `(K + lambda I)^{-1} y`.
    weights: Vec<f64>,
}

impl<'a> DenseOracle<'a> {
    pub fn new(kernel: &'a Kernel, lambda: f64, xs: &[Vec<f64>], ys: &[f64]) -> Self {
        let a = regularized_gram(kernel, lambda, xs);
        let weights = if xs.is_empty() { Vec::new() } else { gauss_solve(a, ys.to_vec()) };
        Self { kernel, lambda, xs: xs.to_vec(), weights }
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.xs
            .iter()
            .zip(self.weights.iter())
            .map(|(xi, &w)| self.kernel.eval(xi, x).unwrap() * w)
            .sum()
    }

    pub fn std(&self, x: &[f64]) -> f64 {
        let k_self = self.kernel.eval(x, x).unwrap();
        if self.xs.is_empty() {
            return k_self.max(0.0).sqrt();
        }
        let kvec: Vec<f64> = self.xs.iter().map(|xi| self.kernel.eval(xi, x).unwrap()).collect();
        let a = regularized_gram(self.kernel, self.lambda, &self.xs);
        let solved = gauss_solve(a, kvec.clone());
        let quad: f64 = kvec.iter().zip(solved.iter()).map(|(&k, &s)| k * s).sum();
        (k_self - quad).max(0.0).sqrt()
    }

    /// `1/2 ln det(I + lambda^{-1} K)` from an explicit determinant.
    pub fn info_gain(&self) -> f64 {
        if self.xs.is_empty() {
            return 0.0;
        }
        let n = self.xs.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = self.kernel.eval(&self.xs[i], &self.xs[j]).unwrap() / self.lambda;
                if i == j {
                    a[i][j] += 1.0;
                }
            }
        }
        0.5 * gauss_log_det(a)
    }
}

fn regularized_gram(kernel: &Kernel, lambda: f64, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = kernel.eval(&xs[i], &xs[j]).unwrap();
            if i == j {
                a[i][j] += lambda;
            }
        }
    }
    a
}
