//! Dense reference implementation used as an oracle.
//!
//! Everything here is assembled from explicit matrices and Kronecker
//! products, with its own coefficient tables written as derivative rows
//! (not the skew tables the library stores).

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut m = zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            if a[i][j] == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut m = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..b[0].len() {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    let mut m = zeros(a[0].len(), a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[j][i] = v;
        }
    }
    m
}

pub fn matvec(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derivative rows near the left boundary, in units of `1/h`.
fn closure(order: usize) -> Vec<Vec<f64>> {
    match order {
        2 => vec![vec![-1.0, 1.0]],
        4 => vec![
            vec![-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0],
            vec![-0.5, 0.0, 0.5, 0.0],
            vec![4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0],
            vec![3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
        ],
        _ => unreachable!(),
    }
}

fn interior(order: usize) -> Vec<f64> {
    match order {
        2 => vec![-0.5, 0.0, 0.5],
        4 => vec![1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
        _ => unreachable!(),
    }
}

/// Diagonal of the norm matrix.
pub fn norm(order: usize, n: usize, h: f64) -> Vec<f64> {
    let edge: Vec<f64> = match order {
        2 => vec![0.5],
        4 => vec![17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0],
        _ => unreachable!(),
    };
    let mut p = vec![h; n];
    for (k, &w) in edge.iter().enumerate() {
        p[k] = w * h;
        p[n - 1 - k] = w * h;
    }
    p
}

/// First-derivative matrix.
pub fn derivative(order: usize, n: usize, h: f64) -> Mat {
    let mut d = zeros(n, n);
    let close = closure(order);
    let inner = interior(order);
    let half = inner.len() / 2;
    for i in close.len()..n - close.len() {
        for (k, &c) in inner.iter().enumerate() {
            d[i][i + k - half] = c / h;
        }
    }
    for (r, row) in close.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            d[r][k] = c / h;
            d[n - 1 - r][n - 1 - k] = -c / h;
        }
    }
    d
}

/// `Q = P D`.
pub fn skew_part(order: usize, n: usize, h: f64) -> Mat {
    let p = norm(order, n, h);
    let d = derivative(order, n, h);
    d.iter()
        .zip(&p)
        .map(|(row, &w)| row.iter().map(|&c| c * w).collect())
        .collect()
}

/// Undivided `p`-th difference, `(n - p) x n`.
fn difference(p: usize, n: usize) -> Mat {
    let mut m = identity(n);
    for k in 0..p {
        let rows = n - k - 1;
        let mut d1 = zeros(rows, n - k);
        for i in 0..rows {
            d1[i][i] = -1.0;
            d1[i][i + 1] = 1.0;
        }
        m = matmul(&d1, &m);
    }
    m
}

/// Dissipation matrix. `upwind` uses `α P⁻¹ Δᵀ Δ`; the accurate variant
/// carries one more factor of `h`.
pub fn dissipation(order: usize, upwind: bool, alpha: f64, n: usize, h: f64) -> Mat {
    let (p, c) = if order == 2 { (1, 0.5) } else { (2, 1.0 / 12.0) };
    let delta = difference(p, n);
    let gram = matmul(&transpose(&delta), &delta);
    let w = norm(order, n, h);
    let s = if upwind { alpha } else { alpha * h };
    gram.iter()
        .zip(&w)
        .map(|(row, &pi)| row.iter().map(|&g| -s * c * g / pi).collect())
        .collect()
}

pub struct DenseScheme {
    pub npx: usize,
    pub npy: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Full `2N x 2N` operator including penalty diagonal.
    pub matrix: Mat,
    /// Penalty coefficient per node (same for both components).
    pub penalty: Vec<f64>,
}

pub struct DenseSetup<'a> {
    pub order: usize,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub npx: usize,
    pub npy: usize,
    pub velocity: &'a dyn Fn(f64, f64) -> [f64; 2],
    pub theta: f64,
    /// `(upwind, alpha)`.
    pub dissipation: Option<(bool, f64)>,
    pub sat: bool,
}

impl DenseScheme {
    pub fn assemble(s: &DenseSetup) -> Self {
        let (npx, npy) = (s.npx, s.npy);
        let hx = (s.x.1 - s.x.0) / (npx - 1) as f64;
        let hy = (s.y.1 - s.y.0) / (npy - 1) as f64;
        let xs: Vec<f64> = (0..npx).map(|i| s.x.0 + i as f64 * hx).collect();
        let ys: Vec<f64> = (0..npy).map(|j| s.y.0 + j as f64 * hy).collect();
        let n = npx * npy;
        let dx = kron(&derivative(s.order, npx, hx), &identity(npy));
        let dy = kron(&identity(npx), &derivative(s.order, npy, hy));

        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        for i in 0..npx {
            for j in 0..npy {
                let [a, b] = (s.velocity)(xs[i], ys[j]);
                u1[i * npy + j] = a;
                u2[i * npy + j] = b;
            }
        }
        let du1dx = matvec(&dx, &u1);
        let du1dy = matvec(&dy, &u1);
        let du2dx = matvec(&dx, &u2);
        let du2dy = matvec(&dy, &u2);

        // Advection block, identical for both components.
        let mut adv = zeros(n, n);
        for k in 0..n {
            for m in 0..n {
                adv[k][m] = -u1[k] * dx[k][m] - u2[k] * dy[k][m];
            }
        }
        if let Some((upwind, alpha)) = s.dissipation {
            let ax = kron(&dissipation(s.order, upwind, alpha, npx, hx), &identity(npy));
            let ay = kron(&identity(npx), &dissipation(s.order, upwind, alpha, npy, hy));
            for k in 0..n {
                for m in 0..n {
                    adv[k][m] += ax[k][m] + ay[k][m];
                }
            }
        }

        let mut penalty = vec![0.0; n];
        if s.sat {
            let px0 = norm(s.order, npx, hx)[0];
            let py0 = norm(s.order, npy, hy)[0];
            for i in 0..npx {
                for j in 0..npy {
                    let k = i * npy + j;
                    let mut sum = 0.0;
                    if i == 0 {
                        sum += -s.theta * u1[k].max(0.0) / px0;
                    }
                    if i == npx - 1 {
                        sum += -s.theta * (-u1[k]).max(0.0) / px0;
                    }
                    if j == 0 {
                        sum += -s.theta * u2[k].max(0.0) / py0;
                    }
                    if j == npy - 1 {
                        sum += -s.theta * (-u2[k]).max(0.0) / py0;
                    }
                    penalty[k] = sum;
                }
            }
        }

        let mut matrix = zeros(2 * n, 2 * n);
        for k in 0..n {
            for m in 0..n {
                matrix[k][m] = adv[k][m];
                matrix[n + k][n + m] = adv[k][m];
            }
            matrix[k][k] += -du2dy[k] + penalty[k];
            matrix[k][n + k] += du1dy[k];
            matrix[n + k][k] += du2dx[k];
            matrix[n + k][n + k] += -du1dx[k] + penalty[k];
        }
        Self {
            npx,
            npy,
            xs,
            ys,
            matrix,
            penalty,
        }
    }

    /// `M v - S g` with boundary data sampled from `g`.
    pub fn rhs(&self, v: &[f64], g: &dyn Fn(f64, f64) -> [f64; 2]) -> Vec<f64> {
        let n = self.npx * self.npy;
        let mut out = matvec(&self.matrix, v);
        for i in 0..self.npx {
            for j in 0..self.npy {
                let k = i * self.npy + j;
                if self.penalty[k] != 0.0 {
                    let [g1, g2] = g(self.xs[i], self.ys[j]);
                    out[k] -= self.penalty[k] * g1;
                    out[n + k] -= self.penalty[k] * g2;
                }
            }
        }
        out
    }
}
