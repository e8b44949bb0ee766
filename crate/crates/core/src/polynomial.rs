//! Dense complex polynomials in the time variable.

use num_complex::Complex64;

/// Polynomial with complex coefficients, `coeffs[k]` multiplying `t^k`.
/// Zero polynomial is the empty coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Polynomial {
        if self.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Complex64::new(0.0, 0.0));
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / (k as f64 + 1.0));
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `(t - a)^k` expanded in powers of `t`.
    pub fn shifted_monomial(a: f64, k: u32) -> Polynomial {
        let mut p = Polynomial::constant(Complex64::new(1.0, 0.0));
        let factor = Polynomial::new(vec![Complex64::new(-a, 0.0), Complex64::new(1.0, 0.0)]);
        for _ in 0..k {
            p = p.mul(&factor);
        }
        p
    }

    /// Keep only the imaginary part: `p(t) -> i * Im(p(t))` coefficientwise
    /// (valid because `t` is real).
    pub fn imaginary_part(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(0.0, c.im))
                .collect(),
        )
    }
}
