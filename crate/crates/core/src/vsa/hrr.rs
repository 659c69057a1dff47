//! Circular convolution and correlation through the FFT.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn spectrum(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(x.len()).process(&mut buf));
    buf
}

fn inverse_real(mut buf: Vec<Complex64>) -> Vec<f64> {
    let n = buf.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|c| c.re * scale).collect()
}

/// `s_k = sum_i x_i y_{(k - i) mod d}`
pub(crate) fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    let (fx, fy) = (spectrum(x), spectrum(y));
    inverse_real(fx.iter().zip(&fy).map(|(a, b)| a * b).collect())
}

/// `x_i = sum_k s_k y_{(k - i) mod d}`
pub(crate) fn correlate(s: &[f64], y: &[f64]) -> Vec<f64> {
    let (fs, fy) = (spectrum(s), spectrum(y));
    inverse_real(fs.iter().zip(&fy).map(|(a, b)| a * b.conj()).collect())
}
