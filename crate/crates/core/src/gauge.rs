//! Normal-form gauge transform.
//!
//! Multiplying each Fourier coefficient by `exp(i J(t, xi))` with
//!
//! ```text
//! J(t, xi) = -B2(t) |xi|^2 - sum_j B1j(t) xi_j - A0(t)
//! ```
//!
//! (`B` = real parts of the coefficient primitives, `A0` the full zero-order
//! primitive) removes the real parts of the symbol and the zero-order term.
//! The magnitude shift is `exp(C0(t))`, independent of `xi`, so the
//! transform never changes which Gevrey/Sobolev class a field lives in; the
//! reduced operator keeps only `i * Im` of each symbol coefficient.

use num_complex::Complex64;

use crate::error::Result;
use crate::log_complex::LogComplex;
use crate::spectral_field::SpectralField;
use crate::symbol_ode::SymbolSpec;
use crate::time_coeffs::TimeCoefficient;

/// The gauge exponent of a spec: evaluates `J(t, xi)`.
#[derive(Debug, Clone)]
pub struct GaugePhase<'a> {
    spec: &'a SymbolSpec,
}

impl<'a> GaugePhase<'a> {
    pub fn new(spec: &'a SymbolSpec) -> Self {
        GaugePhase { spec }
    }

    /// `J(t, xi)`; complex because the zero-order primitive is complex.
    /// `J(0, xi) = 0` for every frequency since all primitives vanish at 0.
    ///
    /// Extra monomial slots contribute their real-part primitives, matching
    /// the second-order terms: the transform removes real parts at every
    /// order.
    pub fn value(&self, t: f64, xi: &[i64]) -> Result<Complex64> {
        let norm_sq = xi.iter().map(|&k| (k * k) as f64).sum::<f64>();
        let mut j = Complex64::new(-self.spec.a2().primitive(t)?.re * norm_sq, 0.0);
        for (a1j, &k) in self.spec.a1().iter().zip(xi.iter()) {
            j -= Complex64::new(a1j.primitive(t)?.re * k as f64, 0.0);
        }
        for (m, coef) in self.spec.extra_monomials() {
            j -= Complex64::new(coef.primitive(t)?.re * (xi[0] as f64).powi(*m as i32), 0.0);
        }
        j -= self.spec.a0().primitive(t)?;
        Ok(j)
    }

    /// The uniform log-magnitude shift `C0(t)` of the forward transform.
    pub fn logmag_shift(&self, t: f64) -> Result<f64> {
        Ok(self.spec.a0().primitive(t)?.im)
    }
}

/// Multiply each coefficient by `exp(i J(t, xi))` at the field's timestamp.
pub fn gauge_forward(field: &SpectralField, spec: &SymbolSpec) -> Result<SpectralField> {
    apply_gauge(field, spec, 1.0)
}

/// Inverse transform: multiply by `exp(-i J(t, xi))`.
pub fn gauge_inverse(field: &SpectralField, spec: &SymbolSpec) -> Result<SpectralField> {
    apply_gauge(field, spec, -1.0)
}

fn apply_gauge(field: &SpectralField, spec: &SymbolSpec, sign: f64) -> Result<SpectralField> {
    let phase = GaugePhase::new(spec);
    let t = field.timestamp();
    let mut out = SpectralField::new(field.dimension(), field.truncation(), t)?;
    for (xi, value) in field.iter() {
        let j = phase.value(t, xi)?;
        let factor = LogComplex::exp_i(sign * j);
        out.insert(xi.clone(), value.mul(&factor))?;
    }
    Ok(out)
}

/// The reduced operator: `a2 -> i Im a2`, `a1j -> i Im a1j`, extra monomials
/// likewise, and the zero-order term dropped. Classification-relevant
/// content is unchanged.
pub fn reduce_to_normal_form(spec: &SymbolSpec) -> SymbolSpec {
    let reduced = spec.map_coefficients(TimeCoefficient::imaginary_part_coefficient);
    reduced.with_a0(TimeCoefficient::zero(spec.horizon()).unwrap())
}
