//! Time-dependent complex coefficients `a(t) = b(t) + i c(t)` on `[0, T]`,
//! their declared zeros and vanishing orders, and their primitives
//! `A(t) = int_0^t a(s) ds`.
//!
//! Primitives are closed-form for polynomial, named and integer-order
//! factored profiles; the remaining forms fall back to adaptive Simpson
//! quadrature at [`PRIMITIVE_TOLERANCE`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::quadrature::{adaptive_simpson, NODE_BUDGET, PRIMITIVE_TOLERANCE};
use crate::regression::fit_line;

/// Sign of the bounded factor multiplying `|t - t_k|^order` near a zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSign {
    Positive,
    Negative,
}

/// A declared zero of a coefficient: location, vanishing order and bounds on
/// the bounded factor near the zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingProfile {
    pub location: f64,
    pub order: f64,
    /// Lower bound on the magnitude of the bounded factor near the zero.
    pub factor_lower: f64,
    /// Upper bound on the magnitude of the bounded factor near the zero.
    pub factor_upper: f64,
    pub factor_sign: FactorSign,
}

impl VanishingProfile {
    pub fn new(location: f64, order: f64, factor_sign: FactorSign) -> Self {
        VanishingProfile {
            location,
            order,
            factor_lower: 1.0,
            factor_upper: 1.0,
            factor_sign,
        }
    }

    pub fn with_factor_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.factor_lower = lower;
        self.factor_upper = upper;
        self
    }

    fn validate(&self, horizon: f64) -> Result<()> {
        if !(0.0..=horizon).contains(&self.location) {
            return Err(Error::InvalidSpec(format!(
                "declared zero at {} lies outside [0, {horizon}]",
                self.location
            )));
        }
        if self.order.is_nan() || self.order <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "vanishing order must be strictly positive, got {}",
                self.order
            )));
        }
        if !(self.factor_lower > 0.0 && self.factor_lower <= self.factor_upper) {
            return Err(Error::InvalidSpec(
                "factor bounds must satisfy 0 < lower <= upper".into(),
            ));
        }
        Ok(())
    }
}

/// Named closed-form profiles with exact primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedProfile {
    /// `amplitude * d/dt exp(-1/(scale * t^2))`, i.e.
    /// `amplitude * 2 exp(-1/(scale t^2)) / (scale t^3)`, extended by 0 at
    /// `t = 0`. Vanishes to infinite order at the origin; its primitive is
    /// exactly `amplitude * exp(-1/(scale t^2))`.
    FlatExpDerivative { scale: f64, amplitude: Complex64 },
}

impl NamedProfile {
    fn eval(&self, t: f64) -> Complex64 {
        match self {
            NamedProfile::FlatExpDerivative { scale, amplitude } => {
                if t <= 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    amplitude * (2.0 / (scale * t * t * t)) * (-1.0 / (scale * t * t)).exp()
                }
            }
        }
    }

    fn primitive(&self, t: f64) -> Complex64 {
        match self {
            NamedProfile::FlatExpDerivative { scale, amplitude } => {
                if t <= 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    amplitude * (-1.0 / (scale * t * t)).exp()
                }
            }
        }
    }

    fn imaginary_part(&self) -> NamedProfile {
        match self {
            NamedProfile::FlatExpDerivative { scale, amplitude } => {
                NamedProfile::FlatExpDerivative {
                    scale: *scale,
                    amplitude: Complex64::new(0.0, amplitude.im),
                }
            }
        }
    }
}

/// Piecewise-cubic interpolant of uniformly sampled values.
#[derive(Debug, Clone, PartialEq)]
struct SampledGrid {
    values: Vec<Complex64>,
    step: f64,
    /// Monomial coefficients of the Hermite cubic on each piece.
    pieces: Vec<[Complex64; 4]>,
    /// Exact integral of the interpolant from 0 to each grid node.
    prefix: Vec<Complex64>,
}

impl SampledGrid {
    fn new(values: Vec<Complex64>, horizon: f64) -> Self {
        let n = values.len();
        let h = horizon / (n - 1) as f64;
        // Catmull-Rom slopes, second-order one-sided at the ends
        let mut slopes = vec![Complex64::new(0.0, 0.0); n];
        for i in 1..n - 1 {
            slopes[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
        }
        slopes[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
        slopes[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);

        let mut pieces = Vec::with_capacity(n - 1);
        let mut prefix = Vec::with_capacity(n);
        prefix.push(Complex64::new(0.0, 0.0));
        for i in 0..n - 1 {
            let (v0, v1, m0, m1) = (values[i], values[i + 1], slopes[i], slopes[i + 1]);
            let c0 = v0;
            let c1 = m0;
            let c2 = 3.0 * (v1 - v0) / (h * h) - (2.0 * m0 + m1) / h;
            let c3 = 2.0 * (v0 - v1) / (h * h * h) + (m0 + m1) / (h * h);
            pieces.push([c0, c1, c2, c3]);
            let piece_integral =
                c0 * h + c1 * h * h / 2.0 + c2 * h * h * h / 3.0 + c3 * h * h * h * h / 4.0;
            let last = *prefix.last().unwrap();
            prefix.push(last + piece_integral);
        }
        SampledGrid {
            values,
            step: h,
            pieces,
            prefix,
        }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let i = ((t / self.step) as usize).min(self.pieces.len() - 1);
        (i, t - i as f64 * self.step)
    }

    fn eval(&self, t: f64) -> Complex64 {
        let (i, x) = self.locate(t);
        let [c0, c1, c2, c3] = self.pieces[i];
        ((c3 * x + c2) * x + c1) * x + c0
    }

    fn primitive(&self, t: f64) -> Complex64 {
        let (i, x) = self.locate(t);
        let [c0, c1, c2, c3] = self.pieces[i];
        self.prefix[i] + c0 * x + c1 * x * x / 2.0 + c2 * x * x * x / 3.0 + c3 * x.powi(4) / 4.0
    }
}

/// Exact piecewise-polynomial expansion of an integer-order factored profile.
#[derive(Debug, Clone, PartialEq)]
struct PiecewisePoly {
    /// Interval ends: `0 = b_0 <= b_1 <= ... <= b_m = T`.
    breaks: Vec<f64>,
    polys: Vec<Polynomial>,
    antiderivatives: Vec<Polynomial>,
    /// Accumulated primitive at the start of each piece.
    cumulative: Vec<Complex64>,
}

impl PiecewisePoly {
    fn locate(&self, t: f64) -> usize {
        match self.breaks.iter().position(|&b| t < b) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.polys.len() - 1,
        }
    }

    fn eval(&self, t: f64) -> Complex64 {
        self.polys[self.locate(t)].eval(t)
    }

    fn primitive(&self, t: f64) -> Complex64 {
        let i = self.locate(t);
        let f = &self.antiderivatives[i];
        self.cumulative[i] + f.eval(t) - f.eval(self.breaks[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum CoefficientForm {
    Polynomial(Polynomial),
    Factored {
        zeros: Vec<VanishingProfile>,
        remainder: Polynomial,
        /// Present when every declared order is a nonnegative integer.
        expansion: Option<PiecewisePoly>,
    },
    Named(NamedProfile),
    Sampled(SampledGrid),
}

/// One complex coefficient `a(t) = b(t) + i c(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeCoefficient {
    horizon: f64,
    form: CoefficientForm,
}

/// Relative zero-detection tolerance for [`TimeCoefficient::estimate_order`].
pub const ZERO_DETECTION_RELATIVE_TOLERANCE: f64 = 1e-9;

fn integer_order(order: f64) -> Option<u32> {
    let rounded = order.round();
    if (order - rounded).abs() < 1e-12 && (0.0..=64.0).contains(&rounded) {
        Some(rounded as u32)
    } else {
        None
    }
}

fn expand_factored(
    zeros: &[VanishingProfile],
    remainder: &Polynomial,
    horizon: f64,
) -> Option<PiecewisePoly> {
    let orders: Option<Vec<u32>> = zeros.iter().map(|z| integer_order(z.order)).collect();
    let orders = orders?;
    let mut breaks = vec![0.0];
    for z in zeros {
        if z.location > 0.0 && z.location < horizon {
            breaks.push(z.location);
        }
    }
    breaks.push(horizon);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut polys = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let mut p = remainder.clone();
        for (z, &k) in zeros.iter().zip(orders.iter()) {
            // |t - t_k|^k = (t - t_k)^k right of the zero, (-1)^k (t - t_k)^k left
            let mut factor = Polynomial::shifted_monomial(z.location, k);
            if mid < z.location && k % 2 == 1 {
                factor = factor.scale(Complex64::new(-1.0, 0.0));
            }
            p = p.mul(&factor);
        }
        polys.push(p);
    }
    let antiderivatives: Vec<Polynomial> = polys.iter().map(|p| p.antiderivative()).collect();
    let mut cumulative = Vec::with_capacity(polys.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, f) in antiderivatives.iter().enumerate() {
        cumulative.push(acc);
        acc += f.eval(breaks[i + 1]) - f.eval(breaks[i]);
    }
    Some(PiecewisePoly {
        breaks,
        polys,
        antiderivatives,
        cumulative,
    })
}

impl TimeCoefficient {
    /// Polynomial coefficient, `coeffs[k]` multiplying `t^k`.
    pub fn polynomial(horizon: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::check_horizon(horizon)?;
        Ok(TimeCoefficient {
            horizon,
            form: CoefficientForm::Polynomial(Polynomial::new(coeffs)),
        })
    }

    pub fn constant(horizon: f64, value: Complex64) -> Result<Self> {
        Self::polynomial(horizon, vec![value])
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::polynomial(horizon, Vec::new())
    }

    /// `remainder(t) * prod_k |t - t_k|^{p_k}` with declared zeros.
    pub fn factored(
        horizon: f64,
        zeros: Vec<VanishingProfile>,
        remainder: Vec<Complex64>,
    ) -> Result<Self> {
        Self::check_horizon(horizon)?;
        if zeros.is_empty() {
            return Err(Error::InvalidSpec(
                "factored profile requires at least one declared zero".into(),
            ));
        }
        for z in &zeros {
            z.validate(horizon)?;
        }
        for i in 0..zeros.len() {
            for j in i + 1..zeros.len() {
                if zeros[i].location == zeros[j].location {
                    return Err(Error::InvalidSpec(
                        "declared zeros must be pairwise distinct".into(),
                    ));
                }
            }
        }
        let remainder = Polynomial::new(remainder);
        let expansion = expand_factored(&zeros, &remainder, horizon);
        Ok(TimeCoefficient {
            horizon,
            form: CoefficientForm::Factored {
                zeros,
                remainder,
                expansion,
            },
        })
    }

    /// `amplitude * 2 exp(-1/(scale t^2)) / (scale t^3)`; see
    /// [`NamedProfile::FlatExpDerivative`].
    pub fn flat_exp_derivative(horizon: f64, scale: f64, amplitude: Complex64) -> Result<Self> {
        Self::check_horizon(horizon)?;
        if scale.is_nan() || scale <= 0.0 {
            return Err(Error::InvalidSpec("profile scale must be positive".into()));
        }
        Ok(TimeCoefficient {
            horizon,
            form: CoefficientForm::Named(NamedProfile::FlatExpDerivative { scale, amplitude }),
        })
    }

    /// Values sampled on the uniform grid `t_i = i * T / (len - 1)`,
    /// interpolated by a piecewise cubic. Extrapolation is forbidden by the
    /// horizon check.
    pub fn sampled(horizon: f64, values: Vec<Complex64>) -> Result<Self> {
        Self::check_horizon(horizon)?;
        if values.len() < 4 {
            return Err(Error::InvalidSpec(
                "sampled grid needs at least 4 values for cubic interpolation".into(),
            ));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidSpec("sampled values must be finite".into()));
        }
        Ok(TimeCoefficient {
            horizon,
            form: CoefficientForm::Sampled(SampledGrid::new(values, horizon)),
        })
    }

    fn check_horizon(horizon: f64) -> Result<()> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "horizon must be a positive finite number, got {horizon}"
            )));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Declared zeros, when the coefficient is in factored form.
    pub fn vanishing_profiles(&self) -> &[VanishingProfile] {
        match &self.form {
            CoefficientForm::Factored { zeros, .. } => zeros,
            _ => &[],
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.form {
            CoefficientForm::Polynomial(p) => p.is_zero(),
            CoefficientForm::Factored { remainder, .. } => remainder.is_zero(),
            CoefficientForm::Named(NamedProfile::FlatExpDerivative { amplitude, .. }) => {
                amplitude.norm() == 0.0
            }
            CoefficientForm::Sampled(g) => g.values.iter().all(|v| v.norm() == 0.0),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + self.horizon);
        if t < -slack || t > self.horizon + slack {
            return Err(Error::OutOfHorizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn clamp(&self, t: f64) -> f64 {
        t.clamp(0.0, self.horizon)
    }

    /// `a(t)`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        let t = self.clamp(t);
        Ok(match &self.form {
            CoefficientForm::Polynomial(p) => p.eval(t),
            CoefficientForm::Factored {
                zeros,
                remainder,
                expansion,
            } => {
                if let Some(pw) = expansion {
                    pw.eval(t)
                } else {
                    let mut v = remainder.eval(t);
                    for z in zeros {
                        v *= (t - z.location).abs().powf(z.order);
                    }
                    v
                }
            }
            CoefficientForm::Named(p) => p.eval(t),
            CoefficientForm::Sampled(g) => g.eval(t),
        })
    }

    /// `A(t) = int_0^t a(s) ds`; exactly 0 at `t = 0` for every form.
    pub fn primitive(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        let t = self.clamp(t);
        if t == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match &self.form {
            CoefficientForm::Polynomial(p) => Ok(p.antiderivative().eval(t)),
            CoefficientForm::Factored { expansion, .. } => {
                if let Some(pw) = expansion {
                    Ok(pw.primitive(t))
                } else {
                    self.quadrature_primitive(0.0, t)
                }
            }
            CoefficientForm::Named(p) => Ok(p.primitive(t)),
            CoefficientForm::Sampled(g) => Ok(g.primitive(t)),
        }
    }

    /// `A(t) - A(s) = int_s^t a(r) dr`, evaluated as a single oriented
    /// integral rather than a difference of two primitives, so nearby `s, t`
    /// do not cancel.
    pub fn primitive_diff(&self, s: f64, t: f64) -> Result<Complex64> {
        self.check_time(s)?;
        self.check_time(t)?;
        let (s, t) = (self.clamp(s), self.clamp(t));
        let (lo, hi, sign) = if s <= t { (s, t, 1.0) } else { (t, s, -1.0) };
        let v = match &self.form {
            CoefficientForm::Polynomial(p) => {
                let f = p.antiderivative();
                f.eval(hi) - f.eval(lo)
            }
            CoefficientForm::Factored { expansion, .. } => {
                if let Some(pw) = expansion {
                    pw.primitive(hi) - pw.primitive(lo)
                } else {
                    self.quadrature_primitive(lo, hi)?
                }
            }
            CoefficientForm::Named(p) => p.primitive(hi) - p.primitive(lo),
            CoefficientForm::Sampled(g) => g.primitive(hi) - g.primitive(lo),
        };
        Ok(sign * v)
    }

    fn quadrature_primitive(&self, lo: f64, hi: f64) -> Result<Complex64> {
        // Split at declared zeros: the integrand is smooth between them.
        let mut cuts = vec![lo];
        for z in self.vanishing_profiles() {
            if z.location > lo && z.location < hi {
                cuts.push(z.location);
            }
        }
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let total = hi - lo;
        let mut acc = Complex64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            // tolerance split proportionally so the pieces sum to the
            // declared absolute tolerance
            let tol = PRIMITIVE_TOLERANCE * (w[1] - w[0]) / total;
            let f = |r: f64| self.eval_unchecked(r);
            acc += adaptive_simpson(&f, w[0], w[1], tol, NODE_BUDGET)?;
        }
        Ok(acc)
    }

    fn eval_unchecked(&self, t: f64) -> Complex64 {
        match &self.form {
            CoefficientForm::Polynomial(p) => p.eval(t),
            CoefficientForm::Factored {
                zeros, remainder, ..
            } => {
                let mut v = remainder.eval(t);
                for z in zeros {
                    v *= (t - z.location).abs().powf(z.order);
                }
                v
            }
            CoefficientForm::Named(p) => p.eval(t),
            CoefficientForm::Sampled(g) => g.eval(t),
        }
    }

    /// `Some(c)` when the imaginary part is exactly the constant `c`,
    /// decided from the representation (not from samples).
    pub fn constant_imaginary(&self) -> Option<f64> {
        match &self.form {
            CoefficientForm::Polynomial(p) => {
                let coeffs = p.coeffs();
                if coeffs.iter().skip(1).all(|c| c.im == 0.0) {
                    Some(coeffs.first().map_or(0.0, |c| c.im))
                } else {
                    None
                }
            }
            CoefficientForm::Factored { remainder, .. } => {
                if remainder.imaginary_part().is_zero() {
                    Some(0.0)
                } else {
                    None
                }
            }
            CoefficientForm::Named(NamedProfile::FlatExpDerivative { amplitude, .. }) => {
                (amplitude.im == 0.0).then_some(0.0)
            }
            CoefficientForm::Sampled(g) => {
                let first = g.values[0].im;
                g.values.iter().all(|v| v.im == first).then_some(first)
            }
        }
    }

    /// The coefficient `t -> i * Im a(t)` in the same representation.
    pub fn imaginary_part_coefficient(&self) -> TimeCoefficient {
        let form = match &self.form {
            CoefficientForm::Polynomial(p) => CoefficientForm::Polynomial(p.imaginary_part()),
            CoefficientForm::Factored {
                zeros, remainder, ..
            } => {
                let remainder = remainder.imaginary_part();
                let expansion = expand_factored(zeros, &remainder, self.horizon);
                CoefficientForm::Factored {
                    zeros: zeros.clone(),
                    remainder,
                    expansion,
                }
            }
            CoefficientForm::Named(p) => CoefficientForm::Named(p.imaginary_part()),
            CoefficientForm::Sampled(g) => CoefficientForm::Sampled(SampledGrid::new(
                g.values.iter().map(|v| Complex64::new(0.0, v.im)).collect(),
                self.horizon,
            )),
        };
        TimeCoefficient {
            horizon: self.horizon,
            form,
        }
    }

    /// Scale the coefficient by a complex constant.
    pub fn scaled(&self, c: Complex64) -> TimeCoefficient {
        let form = match &self.form {
            CoefficientForm::Polynomial(p) => CoefficientForm::Polynomial(p.scale(c)),
            CoefficientForm::Factored {
                zeros, remainder, ..
            } => {
                let remainder = remainder.scale(c);
                let expansion = expand_factored(zeros, &remainder, self.horizon);
                CoefficientForm::Factored {
                    zeros: zeros.clone(),
                    remainder,
                    expansion,
                }
            }
            CoefficientForm::Named(NamedProfile::FlatExpDerivative { scale, amplitude }) => {
                CoefficientForm::Named(NamedProfile::FlatExpDerivative {
                    scale: *scale,
                    amplitude: amplitude * c,
                })
            }
            CoefficientForm::Sampled(g) => CoefficientForm::Sampled(SampledGrid::new(
                g.values.iter().map(|v| v * c).collect(),
                self.horizon,
            )),
        };
        TimeCoefficient {
            horizon: self.horizon,
            form,
        }
    }

    /// Supremum of `|Im a|` over a fine grid of `[0, T]`.
    pub fn sup_imaginary(&self) -> f64 {
        let n = 2048;
        (0..=n)
            .map(|i| {
                let t = self.horizon * i as f64 / n as f64;
                self.eval_unchecked(t).im.abs()
            })
            .fold(0.0, f64::max)
    }

    /// Estimate the vanishing order of the imaginary part `c(t) = Im a(t)`
    /// at `zero` from a geometric sample ladder.
    ///
    /// Advisory only: declared orders in [`VanishingProfile`] always take
    /// precedence for classification.
    pub fn estimate_order(&self, zero: f64) -> Result<OrderEstimate> {
        self.check_time(zero)?;
        let sup = self.sup_imaginary();
        if sup == 0.0 {
            return Err(Error::IllConditioned(
                "imaginary part vanishes identically".into(),
            ));
        }
        let tolerance = ZERO_DETECTION_RELATIVE_TOLERANCE * sup;
        let at_zero = self.eval_unchecked(zero).im.abs();
        if at_zero > tolerance {
            return Err(Error::NonVanishing {
                t: zero,
                value: at_zero,
                tolerance,
            });
        }

        let room_left = zero;
        let room_right = self.horizon - zero;
        let h0 = (room_left.max(room_right)).min(self.horizon / 4.0);
        let mut log_h = Vec::new();
        let mut log_c = Vec::new();
        for i in 0..110 {
            let h = h0 * 0.75f64.powi(i);
            if h < 1e-14 {
                break;
            }
            for t in [zero - h, zero + h] {
                if t < 0.0 || t > self.horizon {
                    continue;
                }
                let c = self.eval_unchecked(t).im.abs();
                if c > 1e-280 {
                    log_h.push(h.ln());
                    log_c.push(c.ln());
                }
            }
        }
        if log_h.len() < 6 {
            return Err(Error::IllConditioned(format!(
                "only {} usable ladder samples near t = {zero}",
                log_h.len()
            )));
        }
        let fit = fit_line(&log_h, &log_c)
            .ok_or_else(|| Error::IllConditioned("degenerate ladder".into()))?;

        // An order that keeps growing as the ladder refines marks a zero of
        // infinite order (e.g. exp(-1/t^2)-type profiles).
        let half = log_h.len() / 2;
        let mut idx: Vec<usize> = (0..log_h.len()).collect();
        idx.sort_by(|&a, &b| log_h[a].partial_cmp(&log_h[b]).unwrap());
        let near: Vec<usize> = idx[..half].to_vec();
        let far: Vec<usize> = idx[half..].to_vec();
        let slope_of = |ids: &[usize]| {
            let xs: Vec<f64> = ids.iter().map(|&i| log_h[i]).collect();
            let ys: Vec<f64> = ids.iter().map(|&i| log_c[i]).collect();
            fit_line(&xs, &ys).map(|f| f.slope)
        };
        let suspect = match (slope_of(&near), slope_of(&far)) {
            (Some(sn), Some(sf)) => sn > 1.5 * sf.max(0.5) && sn > 10.0,
            _ => false,
        };

        Ok(OrderEstimate {
            order: fit.slope,
            confidence: fit.r_squared,
            infinite_order_suspect: suspect,
        })
    }
}

/// Result of [`TimeCoefficient::estimate_order`].
#[derive(Debug, Clone, Copy)]
pub struct OrderEstimate {
    /// Least-squares slope of `log|c|` against `log|t - zero|`.
    pub order: f64,
    /// Regression R^2.
    pub confidence: f64,
    /// Set when the local slope keeps growing as the ladder refines,
    /// indicating vanishing faster than any finite order.
    pub infinite_order_suspect: bool,
}

/// Cumulative primitive values on a fixed grid, for repeated lookups.
///
/// Interpolation is cubic Hermite with exact slopes (the coefficient itself
/// is the derivative of its primitive).
#[derive(Debug, Clone)]
pub struct PrimitiveTable {
    nodes: Vec<f64>,
    cumulative: Vec<Complex64>,
    slopes: Vec<Complex64>,
    rule: &'static str,
    tolerance: f64,
}

impl PrimitiveTable {
    pub fn build(coef: &TimeCoefficient, intervals: usize, tolerance: f64) -> Result<Self> {
        if intervals < 1 {
            return Err(Error::InvalidSpec(
                "primitive table needs at least one interval".into(),
            ));
        }
        let horizon = coef.horizon();
        let n = intervals + 1;
        let mut nodes = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let t = horizon * i as f64 / intervals as f64;
            if i > 0 {
                acc += coef.primitive_diff(nodes[i - 1], t)?;
            }
            nodes.push(t);
            cumulative.push(acc);
            slopes.push(coef.eval(t)?);
        }
        Ok(PrimitiveTable {
            nodes,
            cumulative,
            slopes,
            rule: "cubic-hermite-exact-slope",
            tolerance,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cumulative(&self) -> &[Complex64] {
        &self.cumulative
    }

    pub fn rule(&self) -> &str {
        self.rule
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Interpolated primitive value at `t`.
    pub fn value(&self, t: f64) -> Result<Complex64> {
        let horizon = *self.nodes.last().unwrap();
        if t < 0.0 || t > horizon * (1.0 + 1e-12) {
            return Err(Error::OutOfHorizon { t, horizon });
        }
        let h = self.nodes[1] - self.nodes[0];
        let i = ((t / h) as usize).min(self.nodes.len() - 2);
        let x = t - self.nodes[i];
        let (v0, v1) = (self.cumulative[i], self.cumulative[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let c2 = 3.0 * (v1 - v0) / (h * h) - (2.0 * m0 + m1) / h;
        let c3 = 2.0 * (v0 - v1) / (h * h * h) + (m0 + m1) / (h * h);
        Ok(((c3 * x + c2) * x + m0) * x + v0)
    }
}
