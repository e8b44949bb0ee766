//! Complex numbers stored as (log-magnitude, phase).
//!
//! Spectral values of the form `exp(C2(t)|xi|^2 + ...)` routinely reach
//! log-magnitudes of several thousand, far beyond `f64::MAX`. All spectral
//! arithmetic therefore runs on [`LogComplex`] values and only converts back
//! to ordinary complex numbers behind an explicit overflow guard.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Conversion to linear-domain complex is refused above this log-magnitude:
/// `ln(f64::MAX) - 2`.
pub const OVERFLOW_GUARD: f64 = 709.782712893384 - 2.0;

/// Contributions this many natural-log units below the running maximum are
/// dropped during accumulation; they are below double-precision relevance.
pub const ACCUMULATION_CUTOFF: f64 = 60.0;

/// A complex number `z = exp(logmag) * exp(i * phase)`.
///
/// `logmag = -inf` encodes exact zero (phase canonically 0). The phase is
/// kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    logmag: f64,
    phase: f64,
}

/// Reduce an angle to `(-pi, pi]`.
pub fn normalize_phase(phase: f64) -> f64 {
    if phase.abs() <= PI {
        if phase == -PI {
            return PI;
        }
        return phase;
    }
    let mut p = phase.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

impl LogComplex {
    /// Exact zero.
    pub const ZERO: LogComplex = LogComplex {
        logmag: f64::NEG_INFINITY,
        phase: 0.0,
    };

    /// Unit value 1.
    pub const ONE: LogComplex = LogComplex {
        logmag: 0.0,
        phase: 0.0,
    };

    pub fn new(logmag: f64, phase: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            logmag,
            phase: normalize_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let norm = z.norm();
        if norm == 0.0 {
            Self::ZERO
        } else {
            Self::new(norm.ln(), z.arg())
        }
    }

    /// `exp(i * z)` for complex `z`: log-magnitude `-Im z`, phase `Re z`.
    pub fn exp_i(z: Complex64) -> Self {
        Self::new(-z.im, z.re)
    }

    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.logmag == f64::NEG_INFINITY
    }

    /// Convert to an ordinary complex number.
    ///
    /// Fails with [`Error::OverflowGuard`] when the magnitude is not
    /// representable as a finite `f64`.
    pub fn to_complex(&self) -> Result<Complex64> {
        if self.logmag > OVERFLOW_GUARD {
            return Err(Error::OverflowGuard {
                logmag: self.logmag,
            });
        }
        Ok(Complex64::from_polar(self.logmag.exp(), self.phase))
    }

    pub fn mul(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.logmag + other.logmag, self.phase + other.phase)
    }

    pub fn div(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.logmag - other.logmag, self.phase - other.phase)
    }

    /// Multiply by an ordinary complex scalar.
    pub fn scale(&self, c: Complex64) -> LogComplex {
        self.mul(&LogComplex::from_complex(c))
    }

    /// Log-domain addition with phases: rescale both terms by the larger
    /// log-magnitude, add in the scaled linear domain, restore the scale.
    pub fn add(&self, other: &LogComplex) -> LogComplex {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.logmag >= other.logmag {
            (self, other)
        } else {
            (other, self)
        };
        if small.logmag < big.logmag - ACCUMULATION_CUTOFF {
            return *big;
        }
        let z = Complex64::from_polar(1.0, big.phase)
            + Complex64::from_polar((small.logmag - big.logmag).exp(), small.phase);
        let norm = z.norm();
        if norm == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex::new(big.logmag + norm.ln(), z.arg())
    }
}

/// Streaming log-sum-exp accumulator for complex terms.
///
/// Keeps a running maximum log-magnitude and a linear-domain partial sum at
/// that scale, so no intermediate value overflows regardless of the exponent
/// sizes. Terms more than [`ACCUMULATION_CUTOFF`] below the running maximum
/// are dropped.
#[derive(Debug, Clone)]
pub struct LogSum {
    scale: f64,
    sum: Complex64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            scale: f64::NEG_INFINITY,
            sum: Complex64::new(0.0, 0.0),
        }
    }

    /// Add `weight * exp(logmag + i*phase)` with `weight > 0` in linear scale.
    pub fn push(&mut self, logmag: f64, phase: f64, weight: f64) {
        if logmag == f64::NEG_INFINITY || weight == 0.0 {
            return;
        }
        let lm = logmag + weight.ln();
        let phase = normalize_phase(phase);
        if self.scale == f64::NEG_INFINITY {
            self.scale = lm;
            self.sum = Complex64::from_polar(1.0, phase);
            return;
        }
        if lm > self.scale {
            self.sum *= (self.scale - lm).exp();
            self.scale = lm;
            self.sum += Complex64::from_polar(1.0, phase);
        } else if lm >= self.scale - ACCUMULATION_CUTOFF {
            self.sum += Complex64::from_polar((lm - self.scale).exp(), phase);
        }
        // else: negligible at double precision, dropped
    }

    pub fn push_value(&mut self, value: LogComplex, weight: f64) {
        self.push(value.logmag(), value.phase(), weight);
    }

    pub fn total(&self) -> LogComplex {
        if self.scale == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        let norm = self.sum.norm();
        if norm == 0.0 {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.scale + norm.ln(), self.sum.arg())
    }
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_round_trip() {
        let z = LogComplex::from_complex(Complex64::new(0.0, 0.0));
        assert!(z.is_zero());
        assert_eq!(z.phase(), 0.0);
        assert_eq!(z.to_complex().unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn add_matches_linear_domain() {
        let a = LogComplex::from_complex(Complex64::new(1.5, -0.3));
        let b = LogComplex::from_complex(Complex64::new(-0.2, 2.1));
        let sum = a.add(&b).to_complex().unwrap();
        let expected = Complex64::new(1.3, 1.8);
        assert_abs_diff_eq!(sum.re, expected.re, epsilon = 1e-14);
        assert_abs_diff_eq!(sum.im, expected.im, epsilon = 1e-14);
    }

    #[test]
    fn add_survives_huge_magnitudes() {
        // exp(5000) + exp(4999) = exp(5000) * (1 + 1/e)
        let a = LogComplex::new(5000.0, 0.0);
        let b = LogComplex::new(4999.0, 0.0);
        let sum = a.add(&b);
        assert_abs_diff_eq!(
            sum.logmag(),
            5000.0 + (1.0 + (-1.0f64).exp()).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn overflow_guard_refuses_conversion() {
        let huge = LogComplex::new(3000.0, 0.4);
        assert!(matches!(
            huge.to_complex(),
            Err(crate::error::Error::OverflowGuard { .. })
        ));
    }

    #[test]
    fn exp_i_splits_real_and_imaginary() {
        // exp(i(B + iC)) has magnitude exp(-C) and phase B
        let z = LogComplex::exp_i(Complex64::new(0.7, -2.5));
        assert_abs_diff_eq!(z.logmag(), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(z.phase(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn logsum_matches_direct_sum() {
        let mut acc = LogSum::new();
        let terms = [
            Complex64::new(0.3, 0.4),
            Complex64::new(-1.2, 0.9),
            Complex64::new(2.0, -0.5),
        ];
        let mut direct = Complex64::new(0.0, 0.0);
        for (i, t) in terms.iter().enumerate() {
            let w = 0.5 + i as f64;
            acc.push_value(LogComplex::from_complex(*t), w);
            direct += w * t;
        }
        let got = acc.total().to_complex().unwrap();
        assert_abs_diff_eq!(got.re, direct.re, epsilon = 1e-13);
        assert_abs_diff_eq!(got.im, direct.im, epsilon = 1e-13);
    }

    proptest! {
        #[test]
        fn phase_always_normalized(phase in -1e6f64..1e6) {
            let p = normalize_phase(phase);
            prop_assert!(p > -PI && p <= PI);
        }

        #[test]
        fn mul_matches_linear(re1 in -3.0f64..3.0, im1 in -3.0f64..3.0,
                              re2 in -3.0f64..3.0, im2 in -3.0f64..3.0) {
            let z1 = Complex64::new(re1, im1);
            let z2 = Complex64::new(re2, im2);
            let got = LogComplex::from_complex(z1)
                .mul(&LogComplex::from_complex(z2))
                .to_complex()
                .unwrap();
            let expected = z1 * z2;
            prop_assert!((got - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        }

        #[test]
        fn round_trip(re in -10.0f64..10.0, im in -10.0f64..10.0) {
            let z = Complex64::new(re, im);
            let back = LogComplex::from_complex(z).to_complex().unwrap();
            prop_assert!((back - z).norm() <= 1e-13 * (1.0 + z.norm()));
        }
    }
}
