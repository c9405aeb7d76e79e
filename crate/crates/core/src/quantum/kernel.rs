//! Gaussian kernels K(x, y) = A exp{(i/ħ)(a x² + b x y + c y²)} with real
//! a, b, c, and complex Gaussian wave packets exp(−A x² + B x + C).
//!
//! The amplitude A is kept as ln|A| plus an unwrapped phase, so composing
//! hundreds of kernels never loses the branch of the square roots.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::QuantumError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub log_modulus: f64,
    /// arg A, not reduced mod 2π.
    pub phase: f64,
    pub hbar: f64,
}

/// Value of a kernel at one point, with the phase kept unwrapped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub modulus: f64,
    pub phase: f64,
    /// |sin T| for the oscillator, T for the free particle.
    pub caustic_distance: f64,
}

impl GaussianKernel {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let s = (self.a * x * x + self.b * x * y + self.c * y * y) / self.hbar;
        (self.log_modulus.exp(), self.phase + s)
    }

    pub fn value(&self, x: f64, y: f64, caustic_distance: f64) -> KernelValue {
        let (modulus, phase) = self.eval(x, y);
        KernelValue {
            value: Complex64::from_polar(modulus, phase),
            modulus,
            phase,
            caustic_distance,
        }
    }

    /// ∫ dz self(x, z) · earlier(z, y): apply `earlier` first.
    pub fn compose(&self, earlier: &GaussianKernel) -> Result<GaussianKernel, QuantumError> {
        if (self.hbar - earlier.hbar).abs() > 1e-15 * self.hbar {
            return Err(QuantumError::InvalidParameter("kernels with different ħ".into()));
        }
        let alpha = self.c + earlier.a;
        if !alpha.is_finite() || alpha.abs() < 1e-300 {
            return Err(QuantumError::Caustic { distance: alpha.abs() });
        }
        let hbar = self.hbar;
        // ∫ exp{(i/ħ)(αz² + βz)} dz = √(iπħ/α) exp{−(i/ħ) β²/(4α)}
        let out = GaussianKernel {
            a: self.a - self.b * self.b / (4.0 * alpha),
            b: -self.b * earlier.b / (2.0 * alpha),
            c: earlier.c - earlier.b * earlier.b / (4.0 * alpha),
            log_modulus: self.log_modulus + earlier.log_modulus + 0.5 * (PI * hbar / alpha.abs()).ln(),
            phase: self.phase + earlier.phase + FRAC_PI_4 * alpha.signum(),
            hbar,
        };
        if ![out.a, out.b, out.c, out.log_modulus].iter().all(|v| v.is_finite()) {
            return Err(QuantumError::Overflow);
        }
        Ok(out)
    }

    /// |A|² = |b| / (2πħ) is the condition for the kernel to be unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let lhs = 2.0 * self.log_modulus;
        let rhs = (self.b.abs() / (2.0 * PI * self.hbar)).ln();
        (lhs - rhs).abs()
    }

    pub fn apply(&self, psi: &WavePacket) -> Result<WavePacket, QuantumError> {
        let hbar = self.hbar;
        let i = Complex64::i();
        let shifted = psi.a - i * self.c / hbar;
        if shifted.re <= 0.0 {
            return Err(QuantumError::InvalidParameter("packet is not normalisable".into()));
        }
        let kb = i * self.b / hbar;
        let a = -i * self.a / hbar - kb * kb / (4.0 * shifted);
        let b = psi.b * kb / (2.0 * shifted);
        let log_amp = Complex64::new(self.log_modulus, self.phase);
        let c = psi.c + psi.b * psi.b / (4.0 * shifted) + 0.5 * (Complex64::from(PI) / shifted).ln() + log_amp;
        Ok(WavePacket { a, b, c })
    }
}

/// ψ(x) = exp(−A x² + B x + C) with Re A > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavePacket {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl WavePacket {
    /// Normalised packet with |ψ|² of mean q0 and standard deviation
    /// `width`, carrying mean momentum p0.
    pub fn gaussian(q0: f64, p0: f64, width: f64, hbar: f64) -> Result<Self, QuantumError> {
        if !(width > 0.0 && hbar > 0.0) {
            return Err(QuantumError::InvalidParameter("width and ħ must be positive".into()));
        }
        let s2 = width * width;
        Ok(Self {
            a: Complex64::new(1.0 / (4.0 * s2), 0.0),
            b: Complex64::new(q0 / (2.0 * s2), p0 / hbar),
            c: Complex64::new(-q0 * q0 / (4.0 * s2) - 0.25 * (2.0 * PI * s2).ln(), 0.0),
        })
    }

    pub fn value(&self, x: f64) -> Complex64 {
        (-self.a * x * x + self.b * x + self.c).exp()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.value(x).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        let ar = self.a.re;
        let br = self.b.re;
        ((PI / (2.0 * ar)).ln() * 0.5 + br * br / (2.0 * ar) + 2.0 * self.c.re).exp()
    }

    /// Mean (and peak) of |ψ|².
    pub fn mean(&self) -> f64 {
        self.b.re / (2.0 * self.a.re)
    }

    /// Standard deviation of |ψ|².
    pub fn width(&self) -> f64 {
        (1.0 / (4.0 * self.a.re)).sqrt()
    }

    /// √⟨(x − x₀)²⟩ under the normalised |ψ|².
    pub fn spread_about(&self, x0: f64) -> f64 {
        let w = self.width();
        (w * w + (self.mean() - x0).powi(2)).sqrt()
    }
}
