//! Post-processing helpers: spectral peak detection and closed-form beam
//! frequencies used as oracles.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::beam::BeamParams;
use crate::error::{Error, Result};

/// First root of `1 + cos β cosh β = 0` (cantilever).
pub const CANTILEVER_BETA1: f64 = 1.875_104_068_711_961;

/// First Euler–Bernoulli bending frequency (Hz) of a cantilever.
pub fn cantilever_frequency(young: f64, second_moment: f64, density: f64, area: f64, length: f64) -> f64 {
    CANTILEVER_BETA1 * CANTILEVER_BETA1 / (2.0 * std::f64::consts::PI)
        * (young * second_moment / (density * area * length.powi(4))).sqrt()
}

/// First bending frequency (Hz) in the (E₁, E₂) plane of a cantilever with
/// the given parameters, from the bending stiffness `C₃₃` and the mass per
/// length `J₅₅` (angular-first indices 2 and 4).
pub fn beam_cantilever_frequency(p: &BeamParams) -> f64 {
    let ei = p.stiffness.matrix()[(2, 2)];
    let rho_a = p.inertia.matrix()[(4, 4)];
    CANTILEVER_BETA1 * CANTILEVER_BETA1 / (2.0 * std::f64::consts::PI * p.length * p.length) * (ei / rho_a).sqrt()
}

/// First cantilever mode shape and its slope at `x = s/L ∈ [0, 1]`,
/// normalized to unit tip deflection.
pub fn cantilever_mode(x: f64) -> (f64, f64) {
    let b = CANTILEVER_BETA1;
    let k = (b.cosh() + b.cos()) / (b.sinh() + b.sin());
    let raw = |x: f64| (b * x).cosh() - (b * x).cos() - k * ((b * x).sinh() - (b * x).sin());
    let slope = b * ((b * x).sinh() + (b * x).sin() - k * ((b * x).cosh() - (b * x).cos()));
    let tip = raw(1.0);
    (raw(x) / tip, slope / tip)
}

/// Frequency (Hz) of the largest spectral peak of a uniformly sampled signal.
///
/// The mean is removed, a Hann window applied and the signal zero-padded
/// sixteen-fold; the peak is refined by a parabola through the log-magnitudes
/// of the three bins around the maximum.
pub fn dominant_frequency(samples: &[f64], dt: f64) -> Result<f64> {
    if samples.len() < 8 {
        return Err(Error::InsufficientHistory { have: samples.len(), need: 8 });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("sample spacing must be positive, got {dt}")));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let len = (16 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); len];
    for (k, x) in samples.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
        buf[k] = Complex::new((x - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let mags: Vec<f64> = buf[..len / 2].iter().map(|c| c.norm()).collect();
    let (peak, _) = mags
        .iter()
        .enumerate()
        .skip(1)
        .fold((1, f64::MIN), |best, (k, &m)| if m > best.1 { (k, m) } else { best });
    let offset = if peak + 1 < mags.len() {
        let (a, b, c) = (mags[peak - 1].max(1e-300).ln(), mags[peak].ln(), mags[peak + 1].max(1e-300).ln());
        let denom = a - 2.0 * b + c;
        if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 }
    } else {
        0.0
    };
    Ok((peak as f64 + offset) / (len as f64 * dt))
}
