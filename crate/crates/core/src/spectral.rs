//! Spectral helpers for 2π-periodic data sampled on a uniform grid:
//! trapezoidal quadrature, FFT differentiation, and Fourier projection.
//!
//! For smooth periodic integrands the uniform trapezoid rule converges
//! super-algebraically, which is what the boundary-geometry checks rely on.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Uniform angles θ_m = 2πm/M on [0, 2π).
pub fn uniform_angles(m: usize) -> Vec<f64> {
    let step = std::f64::consts::TAU / m as f64;
    (0..m).map(|i| i as f64 * step).collect()
}

/// Trapezoid rule for a 2π-periodic function given by uniform samples.
pub fn periodic_trapezoid(samples: &[f64]) -> f64 {
    let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
    mean * std::f64::consts::TAU
}

/// d^order/dθ^order of a periodic sample vector via FFT.
///
/// The Nyquist mode is zeroed for odd derivative orders (its sign is
/// ambiguous on a real grid).
pub fn periodic_derivative(samples: &[f64], order: u32) -> Vec<f64> {
    let m = samples.len();
    assert!(m >= 4, "need at least 4 samples");
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);

    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);

    for (k, value) in buf.iter_mut().enumerate() {
        let k_signed = if 2 * k <= m { k as i64 } else { k as i64 - m as i64 };
        if 2 * k == m && order % 2 == 1 {
            *value = Complex::new(0.0, 0.0);
            continue;
        }
        let ik = Complex::new(0.0, k_signed as f64);
        let mut factor = Complex::new(1.0, 0.0);
        for _ in 0..order {
            factor *= ik;
        }
        *value *= factor;
    }

    ifft.process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Mean value and the first `k_max` Fourier mode pairs (a_k, b_k) of
/// uniformly sampled periodic data, so that
/// f(θ) ≈ mean + Σ_k a_k cos kθ + b_k sin kθ.
pub fn fourier_project(samples: &[f64], k_max: usize) -> (f64, Vec<(f64, f64)>) {
    let m = samples.len();
    assert!(k_max < m / 2, "k_max must be below the Nyquist mode");
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);

    let mean = buf[0].re / m as f64;
    let coeffs = (1..=k_max)
        .map(|k| {
            let a = 2.0 * buf[k].re / m as f64;
            let b = -2.0 * buf[k].im / m as f64;
            (a, b)
        })
        .collect();
    (mean, coeffs)
}

/// Least-squares slope of log(e) against log(h); the fitted convergence
/// order of an error sequence.
pub fn fit_log_slope(h: &[f64], e: &[f64]) -> f64 {
    assert_eq!(h.len(), e.len());
    assert!(h.len() >= 2);
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Richardson extrapolation from three values computed at h, h/2, h/4.
///
/// Fits Q(h) = Q∞ + C·h^p and returns (Q∞, p). Falls back to the finest
/// value with p = 0 when the sequence is not geometric (already at the
/// noise floor).
pub fn richardson_extrapolate(q: [f64; 3]) -> (f64, f64) {
    let d1 = q[1] - q[0];
    let d2 = q[2] - q[1];
    if d2 == 0.0 || d1 / d2 <= 1.0 {
        return (q[2], 0.0);
    }
    let ratio = d1 / d2; // = 2^p
    let p = ratio.log2();
    let q_inf = q[2] + d2 / (ratio - 1.0);
    (q_inf, p)
}
