//! Small dense complex matrices. Representations here are at most a few
//! dimensions wide, so everything is naive O(n^3).

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub type C64 = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, C64::new(1.0, 0.0))
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    /// Row-major entries; panics unless `data.len() == dim * dim`.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data has wrong length");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        libm::sqrt(gram.eigenvalues().iter().map(|z| z.re).fold(0.0, f64::max))
    }

    /// The scalar `c` if the matrix equals `c * I` within `tol`.
    pub fn as_scalar(&self, tol: f64) -> Option<C64> {
        let c = self.get(0, 0);
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { c } else { C64::new(0.0, 0.0) };
                if (self.data[i * n + j] - want).norm() > tol {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// Eigenvalues with multiplicity. Closed form up to 2x2, shifted
    /// Householder QR iteration beyond that.
    pub fn eigenvalues(&self) -> Vec<C64> {
        match self.dim {
            0 => Vec::new(),
            1 => vec![self.data[0]],
            2 => {
                let (a, b, c, d) = (self.data[0], self.data[1], self.data[2], self.data[3]);
                let (l1, l2) = eig2(a, b, c, d);
                vec![l1, l2]
            }
            _ => qr_eigenvalues(self.clone()),
        }
    }
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let s = disc.sqrt();
    (half_tr + s, half_tr - s)
}

fn qr_eigenvalues(mut a: CMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.dim);
    let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut n = a.dim;
    let mut iters = 0usize;
    while n > 2 {
        let last = n - 1;
        let off: f64 = (0..last).map(|j| a.get(last, j).norm()).fold(0.0, f64::max);
        if off <= 1e-15 * scale || iters > 10_000 {
            out.push(a.get(last, last));
            n -= 1;
            iters = 0;
            continue;
        }
        iters += 1;
        let (l1, l2) = eig2(a.get(n - 2, n - 2), a.get(n - 2, last), a.get(last, n - 2), a.get(last, last));
        let corner = a.get(last, last);
        let mu = if (l1 - corner).norm() < (l2 - corner).norm() { l1 } else { l2 };
        qr_step(&mut a, n, mu);
    }
    let (l1, l2) = eig2(a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    out.push(l1);
    out.push(l2);
    out.reverse();
    out
}

/// One shifted step on the leading n x n block: B - mu = QR, B <- RQ + mu.
fn qr_step(a: &mut CMatrix, n: usize, mu: C64) {
    let mut r: Vec<C64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j) - if i == j { mu } else { C64::new(0.0, 0.0) };
            r.push(v);
        }
    }
    let mut reflectors: Vec<Vec<C64>> = Vec::with_capacity(n);
    for k in 0..n - 1 {
        let x: Vec<C64> = (k..n).map(|i| r[i * n + k]).collect();
        let norm = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let mut v = x.clone();
        if norm > 0.0 {
            let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
            v[0] += phase * norm;
            let vn = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            for z in &mut v {
                *z /= vn;
            }
            // R <- (I - 2 v v^*) R on rows k..n
            for j in 0..n {
                let dot: C64 = (k..n).map(|i| v[i - k].conj() * r[i * n + j]).sum();
                for i in k..n {
                    r[i * n + j] -= v[i - k] * dot * 2.0;
                }
            }
        } else {
            v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        reflectors.push(v);
    }
    // RQ where Q = H_0 H_1 ... ; apply each reflector from the right.
    for (k, v) in reflectors.iter().enumerate() {
        for i in 0..n {
            let dot: C64 = (k..n).map(|j| r[i * n + j] * v[j - k]).sum();
            for j in k..n {
                r[i * n + j] -= dot * v[j - k].conj() * 2.0;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = r[i * n + j] + if i == j { mu } else { C64::new(0.0, 0.0) };
            a.set(i, j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_triangular_3x3_are_diagonal() {
        let m = CMatrix::from_rows(
            3,
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.5, 0.0), c(0.0, 0.0), c(-2.0, 0.5), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)],
        );
        let mut ev = m.eigenvalues();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - c(-2.0, 0.5)).norm() < 1e-10);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-10);
        assert!((ev[2] - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_cyclic_permutation_are_cube_roots() {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let m = CMatrix::from_rows(3, vec![z, z, o, o, z, z, z, o, z]);
        let ev = m.eigenvalues();
        let sum: C64 = ev.iter().sum();
        let prod: C64 = ev.iter().product();
        assert!(sum.norm() < 1e-10);
        assert!((prod - o).norm() < 1e-10);
        for l in ev {
            assert!((l.powu(3) - o).norm() < 1e-9);
        }
    }
}
