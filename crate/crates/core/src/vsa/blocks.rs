//! Small dense complex block kernels. Blocks are `m x m`, row-major, stored
//! back to back in one slice.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use std::f64::consts::TAU;

use super::BlockFamily;

/// `out = x * y` for every block.
pub(crate) fn mul(x: &[Complex64], y: &[Complex64], m: usize, out: &mut [Complex64]) {
    let bs = m * m;
    for ((xb, yb), ob) in x.chunks_exact(bs).zip(y.chunks_exact(bs)).zip(out.chunks_exact_mut(bs)) {
        for i in 0..m {
            let xr = &xb[i * m..(i + 1) * m];
            let or = &mut ob[i * m..(i + 1) * m];
            or.fill(Complex64::new(0.0, 0.0));
            for (k, &xik) in xr.iter().enumerate() {
                let yr = &yb[k * m..(k + 1) * m];
                for (o, &ykj) in or.iter_mut().zip(yr) {
                    *o += xik * ykj;
                }
            }
        }
    }
}

/// `out = z * y^H` for every block.
pub(crate) fn mul_adjoint_right(z: &[Complex64], y: &[Complex64], m: usize, out: &mut [Complex64]) {
    let bs = m * m;
    for ((zb, yb), ob) in z.chunks_exact(bs).zip(y.chunks_exact(bs)).zip(out.chunks_exact_mut(bs)) {
        for i in 0..m {
            let zr = &zb[i * m..(i + 1) * m];
            for j in 0..m {
                let yr = &yb[j * m..(j + 1) * m];
                ob[i * m + j] = zr.iter().zip(yr).map(|(a, b)| a * b.conj()).sum();
            }
        }
    }
}

/// `out = x^H * z` for every block.
pub(crate) fn mul_adjoint_left(x: &[Complex64], z: &[Complex64], m: usize, out: &mut [Complex64]) {
    let bs = m * m;
    for ((xb, zb), ob) in x.chunks_exact(bs).zip(z.chunks_exact(bs)).zip(out.chunks_exact_mut(bs)) {
        for i in 0..m {
            for j in 0..m {
                ob[i * m + j] = (0..m).map(|k| xb[k * m + i].conj() * zb[k * m + j]).sum();
            }
        }
    }
}

/// Largest entry of `|A^H A - I|` over all blocks.
pub(crate) fn unitarity_error(data: &[Complex64], m: usize) -> f64 {
    let mut worst = 0.0f64;
    for b in data.chunks_exact(m * m) {
        for i in 0..m {
            for j in 0..m {
                let g: Complex64 = (0..m).map(|k| b[k * m + i].conj() * b[k * m + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
    }
    worst
}

pub(crate) fn identity(num_blocks: usize, m: usize) -> Vec<Complex64> {
    let mut data = vec![Complex64::new(0.0, 0.0); num_blocks * m * m];
    for b in data.chunks_exact_mut(m * m) {
        for i in 0..m {
            b[i * m + i] = Complex64::new(1.0, 0.0);
        }
    }
    data
}

fn phase_diagonal<R: Rng + ?Sized>(rng: &mut R, m: usize, out: &mut [Complex64]) {
    let phase = Uniform::new(0.0, TAU).expect("valid range");
    out.fill(Complex64::new(0.0, 0.0));
    for i in 0..m {
        out[i * m + i] = Complex64::from_polar(1.0, phase.sample(rng));
    }
}

/// `out <- out * (I - 2 v v^H / |v|^2)` for a random complex Gaussian `v`.
fn apply_householder<R: Rng + ?Sized>(rng: &mut R, m: usize, out: &mut [Complex64]) {
    let v: Vec<Complex64> = (0..m).map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    let norm_sqr: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return;
    }
    // A (I - 2 v v^H / n) = A - (2/n) (A v) v^H
    for i in 0..m {
        let row = &mut out[i * m..(i + 1) * m];
        let av: Complex64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        let scale = av * (2.0 / norm_sqr);
        for (a, vj) in row.iter_mut().zip(&v) {
            *a -= scale * vj.conj();
        }
    }
}

/// Draw one unitary `m x m` block into `out`.
pub(crate) fn sample_unitary<R: Rng + ?Sized>(rng: &mut R, m: usize, family: BlockFamily, out: &mut [Complex64]) {
    phase_diagonal(rng, m, out);
    if family == BlockFamily::HouseholderProduct {
        apply_householder(rng, m, out);
        apply_householder(rng, m, out);
    }
}
