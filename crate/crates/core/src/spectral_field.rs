//! Truncated spectral data at a fixed time: storage, Sobolev norms, Gevrey
//! decay fits, the batch Cauchy solve across frequencies, and grid synthesis.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::log_complex::{LogComplex, OVERFLOW_GUARD};
use crate::regression::fit_line;
use crate::symbol_ode::SymbolSpec;

/// Lattice frequency; ordered lexicographically by `Vec`'s `Ord`.
pub type Frequency = Vec<i64>;

/// Build the frequency supported on one axis: `eta * e_axis` (0-based axis).
pub fn axis_frequency(eta: i64, axis: usize, dimension: usize) -> Frequency {
    let mut xi = vec![0i64; dimension];
    xi[axis] = eta;
    xi
}

fn euclid_norm(xi: &[i64]) -> f64 {
    xi.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt()
}

/// Truncated frequency -> log-complex map at one time instant.
/// Missing entries are exact zeros.
#[derive(Debug, Clone)]
pub struct SpectralField {
    dimension: usize,
    truncation: i64,
    timestamp: f64,
    coefficients: BTreeMap<Frequency, LogComplex>,
}

impl SpectralField {
    pub fn new(dimension: usize, truncation: i64, timestamp: f64) -> Result<Self> {
        if dimension == 0 || truncation < 1 {
            return Err(Error::InvalidSpec(
                "field needs dimension >= 1 and truncation >= 1".into(),
            ));
        }
        Ok(SpectralField {
            dimension,
            truncation,
            timestamp,
            coefficients: BTreeMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn with_timestamp(mut self, t: f64) -> Self {
        self.timestamp = t;
        self
    }

    pub fn insert(&mut self, xi: Frequency, value: LogComplex) -> Result<()> {
        if xi.len() != self.dimension {
            return Err(Error::InvalidSpec("frequency dimension mismatch".into()));
        }
        if xi.iter().any(|k| k.abs() > self.truncation) {
            return Err(Error::InvalidSpec(format!(
                "frequency {xi:?} exceeds truncation {}",
                self.truncation
            )));
        }
        if !value.is_zero() {
            self.coefficients.insert(xi, value);
        }
        Ok(())
    }

    /// Stored coefficient, or exact zero when absent.
    pub fn coefficient(&self, xi: &[i64]) -> LogComplex {
        self.coefficients
            .get(xi)
            .copied()
            .unwrap_or(LogComplex::ZERO)
    }

    /// Nonzero entries in lexicographic frequency order.
    pub fn iter(&self) -> impl Iterator<Item = (&Frequency, &LogComplex)> {
        self.coefficients.iter()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// All lattice points of the truncation box in lexicographic order.
    pub fn frequency_box(dimension: usize, truncation: i64) -> Vec<Frequency> {
        let side = (2 * truncation + 1) as usize;
        let total = side.pow(dimension as u32);
        let mut out = Vec::with_capacity(total);
        let mut xi = vec![-truncation; dimension];
        loop {
            out.push(xi.clone());
            let mut d = dimension;
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                if xi[d] < truncation {
                    xi[d] += 1;
                    for entry in xi.iter_mut().skip(d + 1) {
                        *entry = -truncation;
                    }
                    break;
                }
            }
        }
    }

    /// Map every stored coefficient.
    pub fn map<F: Fn(&Frequency, LogComplex) -> LogComplex>(&self, f: F) -> SpectralField {
        let mut out = self.clone();
        out.coefficients = self
            .coefficients
            .iter()
            .map(|(xi, v)| (xi.clone(), f(xi, *v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    /// Sobolev norm `(sum |u(xi)|^2 (1 + |xi|)^{2r})^{1/2}` with Euclidean
    /// `|xi|`, accumulated in log-domain. Returns `f64::INFINITY` when the
    /// result exceeds the overflow guard.
    pub fn sobolev_norm(&self, r: f64) -> f64 {
        if self.coefficients.is_empty() {
            return 0.0;
        }
        let mut terms: Vec<f64> = Vec::with_capacity(self.coefficients.len());
        for (xi, v) in &self.coefficients {
            let lm = 2.0 * v.logmag() + 2.0 * r * (1.0 + euclid_norm(xi)).ln();
            terms.push(lm);
        }
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return 0.0;
        }
        let sum: f64 = terms.iter().map(|lm| (lm - max).exp()).sum();
        let log_norm = 0.5 * (max + sum.ln());
        if log_norm > OVERFLOW_GUARD {
            f64::INFINITY
        } else {
            log_norm.exp()
        }
    }

    /// Inverse discrete synthesis on the uniform torus grid with
    /// `grid_points_per_dim` points per dimension (direct summation).
    /// Samples are returned in row-major order, last dimension fastest.
    pub fn synthesize(&self, grid_points_per_dim: usize) -> Result<Vec<Complex64>> {
        if grid_points_per_dim == 0 {
            return Err(Error::InvalidSpec("grid needs at least one point".into()));
        }
        let entries: Vec<(&Frequency, Complex64)> = self
            .coefficients
            .iter()
            .map(|(xi, v)| v.to_complex().map(|z| (xi, z)))
            .collect::<Result<_>>()?;
        let g = grid_points_per_dim;
        let total = g.pow(self.dimension as u32);
        let step = std::f64::consts::TAU / g as f64;
        let mut out = Vec::with_capacity(total);
        let mut index = vec![0usize; self.dimension];
        for _ in 0..total {
            let mut sample = Complex64::new(0.0, 0.0);
            for (xi, z) in &entries {
                let mut phase = 0.0;
                for (d, &k) in xi.iter().enumerate() {
                    phase += k as f64 * index[d] as f64 * step;
                }
                sample += z * Complex64::from_polar(1.0, phase);
            }
            out.push(sample);
            for d in (0..self.dimension).rev() {
                index[d] += 1;
                if index[d] < g {
                    break;
                }
                index[d] = 0;
            }
        }
        Ok(out)
    }

    /// Fit `logmag(xi) ~ log C - delta |xi|^{1/s}` along coordinate rays
    /// (and the diagonals in dimension >= 2), reporting the worst (largest)
    /// admissible `s`.
    pub fn gevrey_fit(&self) -> Result<DecayFit> {
        let mut directions: Vec<Frequency> = Vec::new();
        for axis in 0..self.dimension {
            directions.push(axis_frequency(1, axis, self.dimension));
            directions.push(axis_frequency(-1, axis, self.dimension));
        }
        if self.dimension >= 2 {
            directions.push(vec![1; self.dimension]);
            directions.push(vec![-1; self.dimension]);
        }

        let mut best: Option<DecayFit> = None;
        for dir in &directions {
            let mut norms = Vec::new();
            let mut logmags = Vec::new();
            for k in 1..=self.truncation {
                let xi: Frequency = dir.iter().map(|&d| d * k).collect();
                let v = self.coefficient(&xi);
                if !v.is_zero() {
                    norms.push(euclid_norm(&xi));
                    logmags.push(v.logmag());
                }
            }
            if norms.len() < MIN_FIT_SAMPLES {
                continue;
            }
            let fit = fit_ray(&norms, &logmags);
            let replace = match &best {
                None => true,
                Some(b) => fit.s_hat > b.s_hat,
            };
            if replace {
                best = Some(fit);
            }
        }
        best.ok_or_else(|| {
            Error::InsufficientData(format!(
                "need at least {MIN_FIT_SAMPLES} nonzero magnitudes along a sampled ray"
            ))
        })
    }
}

/// Minimum number of magnitude samples for an admissible decay fit.
pub const MIN_FIT_SAMPLES: usize = 8;

/// Residual threshold (RMS of log-magnitudes) for an admissible fit.
pub const FIT_RESIDUAL_THRESHOLD: f64 = 0.5;

/// Search range for the Gevrey index; values outside are clamped and the
/// fit marked inadmissible by its residual.
pub const S_SEARCH_RANGE: (f64, f64) = (1.0, 10.0);

/// Result of a Gevrey decay fit.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub s_hat: f64,
    pub delta_hat: f64,
    /// RMS regression residual in log-magnitude units.
    pub residual: f64,
    pub admissible: bool,
}

impl DecayFit {
    /// Human-readable flag for clearly non-decaying data.
    pub fn diagnostic(&self) -> Option<&'static str> {
        if self.delta_hat <= 0.0 {
            Some("positive-slope: magnitudes grow along the ray")
        } else if !self.admissible {
            Some("residual above threshold: no Gevrey-type decay model fits")
        } else {
            None
        }
    }
}

fn residual_for_s(norms: &[f64], logmags: &[f64], s: f64) -> (f64, f64, f64) {
    let xs: Vec<f64> = norms.iter().map(|n| n.powf(1.0 / s)).collect();
    match fit_line(&xs, logmags) {
        Some(fit) => (fit.rms_residual, -fit.slope, fit.intercept),
        None => (f64::INFINITY, 0.0, 0.0),
    }
}

fn fit_ray(norms: &[f64], logmags: &[f64]) -> DecayFit {
    // Golden-section search for the s minimizing the linear-fit residual.
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = S_SEARCH_RANGE;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = residual_for_s(norms, logmags, c).0;
    let mut fd = residual_for_s(norms, logmags, d).0;
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = residual_for_s(norms, logmags, c).0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = residual_for_s(norms, logmags, d).0;
        }
        if (b - a).abs() < 1e-8 {
            break;
        }
    }
    let s_hat = 0.5 * (a + b);
    let (residual, delta_hat, _) = residual_for_s(norms, logmags, s_hat);
    let admissible =
        residual <= FIT_RESIDUAL_THRESHOLD && delta_hat > 0.0 && norms.len() >= MIN_FIT_SAMPLES;
    DecayFit {
        s_hat,
        delta_hat,
        residual,
        admissible,
    }
}

/// Which part of the lattice a data generator populates.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionMask {
    /// Every lattice point.
    Full,
    /// Only multiples of one coordinate axis (0-based), restricted by sign.
    Axis { axis: usize, sign: AxisSign },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSign {
    Positive,
    Negative,
    Both,
}

impl DirectionMask {
    fn admits(&self, xi: &[i64]) -> bool {
        match self {
            DirectionMask::Full => true,
            DirectionMask::Axis { axis, sign } => {
                let eta = xi[*axis];
                if eta == 0 {
                    return false;
                }
                for (d, &k) in xi.iter().enumerate() {
                    if d != *axis && k != 0 {
                        return false;
                    }
                }
                match sign {
                    AxisSign::Positive => eta > 0,
                    AxisSign::Negative => eta < 0,
                    AxisSign::Both => true,
                }
            }
        }
    }
}

/// Spectral data generator for initial data or forcing amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum DataGen {
    Zero,
    SingleMode {
        frequency: Frequency,
        amplitude: Complex64,
    },
    /// `amplitude * exp(-delta |xi|^{1/s})` on the masked lattice.
    GevreyDecay {
        delta: f64,
        s: f64,
        amplitude: Complex64,
        mask: DirectionMask,
    },
    /// `amplitude * exp(-rate |xi|)` on the masked lattice.
    ExponentialDecay {
        rate: f64,
        amplitude: Complex64,
        mask: DirectionMask,
    },
    Table(BTreeMap<Frequency, Complex64>),
}

impl DataGen {
    pub fn amplitude_at(&self, xi: &[i64]) -> Complex64 {
        match self {
            DataGen::Zero => Complex64::new(0.0, 0.0),
            DataGen::SingleMode {
                frequency,
                amplitude,
            } => {
                if frequency.as_slice() == xi {
                    *amplitude
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            DataGen::GevreyDecay {
                delta,
                s,
                amplitude,
                mask,
            } => {
                if mask.admits(xi) {
                    amplitude * (-delta * euclid_norm(xi).powf(1.0 / s)).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            DataGen::ExponentialDecay {
                rate,
                amplitude,
                mask,
            } => {
                if mask.admits(xi) {
                    amplitude * (-rate * euclid_norm(xi)).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            DataGen::Table(map) => map
                .get(xi)
                .copied()
                .unwrap_or_else(|| Complex64::new(0.0, 0.0)),
        }
    }

    /// Amplitude in log-domain, exact even when the linear value would
    /// underflow (decay exponents scale with the truncation).
    pub fn log_amplitude_at(&self, xi: &[i64]) -> LogComplex {
        match self {
            DataGen::Zero => LogComplex::ZERO,
            DataGen::SingleMode {
                frequency,
                amplitude,
            } => {
                if frequency.as_slice() == xi {
                    LogComplex::from_complex(*amplitude)
                } else {
                    LogComplex::ZERO
                }
            }
            DataGen::GevreyDecay {
                delta,
                s,
                amplitude,
                mask,
            } => {
                if mask.admits(xi) {
                    LogComplex::from_complex(*amplitude).mul(&LogComplex::new(
                        -delta * euclid_norm(xi).powf(1.0 / s),
                        0.0,
                    ))
                } else {
                    LogComplex::ZERO
                }
            }
            DataGen::ExponentialDecay {
                rate,
                amplitude,
                mask,
            } => {
                if mask.admits(xi) {
                    LogComplex::from_complex(*amplitude)
                        .mul(&LogComplex::new(-rate * euclid_norm(xi), 0.0))
                } else {
                    LogComplex::ZERO
                }
            }
            DataGen::Table(map) => map
                .get(xi)
                .map(|z| LogComplex::from_complex(*z))
                .unwrap_or(LogComplex::ZERO),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DataGen::Zero)
    }
}

/// Initial datum and (time-constant) forcing generators.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub initial: DataGen,
    pub forcing: DataGen,
}

impl DataSpec {
    pub fn zero() -> Self {
        DataSpec {
            initial: DataGen::Zero,
            forcing: DataGen::Zero,
        }
    }
}

/// Quadrature settings for the batch solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveSettings {
    /// Gauss-Legendre nodes per unit time for the forcing integral.
    pub nodes_per_unit: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings { nodes_per_unit: 64 }
    }
}

impl SolveSettings {
    pub fn nodes_for(&self, t: f64) -> usize {
        ((self.nodes_per_unit as f64 * t).ceil() as usize).max(8)
    }
}

/// Solve the Cauchy problem at the requested times over the truncated box.
/// One field per time; per-frequency solves run in parallel and are
/// individually deterministic.
pub fn solve_cauchy(
    spec: &SymbolSpec,
    data: &DataSpec,
    times: &[f64],
    truncation: i64,
    settings: SolveSettings,
) -> Result<Vec<SpectralField>> {
    if truncation < 1 {
        return Err(Error::InvalidSpec("truncation must be at least 1".into()));
    }
    for pair in times.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidSpec("times must be sorted".into()));
        }
    }
    for &t in times {
        if t < 0.0 || t > spec.horizon() * (1.0 + 1e-12) {
            return Err(Error::OutOfHorizon {
                t,
                horizon: spec.horizon(),
            });
        }
    }
    let frequencies = SpectralField::frequency_box(spec.dimension(), truncation);
    let mut fields = Vec::with_capacity(times.len());
    for &t in times {
        let nodes = settings.nodes_for(t);
        let computed: Vec<(Frequency, LogComplex)> = frequencies
            .par_iter()
            .map(|xi| -> Result<(Frequency, LogComplex)> {
                let g = data.initial.log_amplitude_at(xi);
                let f = data.forcing.log_amplitude_at(xi);
                if g.is_zero() && f.is_zero() {
                    return Ok((xi.clone(), LogComplex::ZERO));
                }
                let value = spec.duhamel_coefficient_log(g, |_| f, t, xi, nodes)?;
                Ok((xi.clone(), value))
            })
            .collect::<Result<_>>()?;
        let mut field = SpectralField::new(spec.dimension(), truncation, t)?;
        for (xi, value) in computed {
            field.insert(xi, value)?;
        }
        fields.push(field);
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time_coeffs::TimeCoefficient;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn heat_solve_reproduces_kernel() {
        let spec = SymbolSpec::heat(1, 1.0);
        let data = DataSpec {
            initial: DataGen::Table(
                SpectralField::frequency_box(1, 8)
                    .into_iter()
                    .map(|xi| (xi, c(1.0, 0.0)))
                    .collect(),
            ),
            forcing: DataGen::Zero,
        };
        let fields = solve_cauchy(&spec, &data, &[1.0], 8, SolveSettings::default()).unwrap();
        for (xi, v) in fields[0].iter() {
            let expect = -((xi[0] * xi[0]) as f64);
            assert_abs_diff_eq!(v.logmag(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_data_gives_zero_fields() {
        let spec = SymbolSpec::heat(1, 1.0);
        let fields = solve_cauchy(
            &spec,
            &DataSpec::zero(),
            &[0.0, 0.5, 1.0],
            4,
            SolveSettings::default(),
        )
        .unwrap();
        for f in &fields {
            assert!(f.is_empty());
            assert_eq!(f.sobolev_norm(2.0), 0.0);
        }
    }

    #[test]
    fn solve_at_time_zero_reproduces_data() {
        let spec = SymbolSpec::heat(1, 1.0);
        let data = DataSpec {
            initial: DataGen::GevreyDecay {
                delta: 1.0,
                s: 2.0,
                amplitude: c(1.0, 0.0),
                mask: DirectionMask::Full,
            },
            forcing: DataGen::Zero,
        };
        let fields = solve_cauchy(&spec, &data, &[0.0], 16, SolveSettings::default()).unwrap();
        for xi in SpectralField::frequency_box(1, 16) {
            let expected = data.initial.amplitude_at(&xi);
            let got = fields[0].coefficient(&xi).to_complex().unwrap();
            assert!((got - expected).norm() <= 1e-14 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn parabolic_uniform_bound_with_drift() {
        // c2 = -1, c1 = 1: sup_xi |u(t, xi)| <= sup |g| since
        // -|xi|^2 + |xi| <= 0 on the integer lattice
        let horizon = 1.0;
        let spec = SymbolSpec::new(
            1,
            horizon,
            TimeCoefficient::constant(horizon, c(0.0, -1.0)).unwrap(),
            vec![TimeCoefficient::constant(horizon, c(0.0, 1.0)).unwrap()],
            TimeCoefficient::zero(horizon).unwrap(),
        )
        .unwrap();
        let data = DataSpec {
            initial: DataGen::GevreyDecay {
                delta: 1.0,
                s: 1.0,
                amplitude: c(1.0, 0.0),
                mask: DirectionMask::Full,
            },
            forcing: DataGen::Zero,
        };
        let fields =
            solve_cauchy(&spec, &data, &[0.25, 1.0], 32, SolveSettings::default()).unwrap();
        for f in &fields {
            for (_, v) in f.iter() {
                assert!(v.logmag() <= 1e-12);
            }
        }
    }

    #[test]
    fn sobolev_norm_single_mode() {
        let mut field = SpectralField::new(2, 8, 0.0).unwrap();
        field
            .insert(vec![3, 4], LogComplex::from_complex(c(2.0, 0.0)))
            .unwrap();
        // 2 * (1 + 5)^1 = 12
        assert_abs_diff_eq!(field.sobolev_norm(1.0), 12.0, epsilon = 1e-12);
    }

    #[test]
    fn sobolev_norm_matches_direct_sum() {
        // exponential field on N = 1, Xi = 64, r = 0
        let mut field = SpectralField::new(1, 64, 0.0).unwrap();
        let mut direct = 0.0;
        for xi in SpectralField::frequency_box(1, 64) {
            let a = (-(xi[0].abs() as f64)).exp();
            direct += a * a;
            field
                .insert(xi, LogComplex::from_complex(c(a, 0.0)))
                .unwrap();
        }
        let direct = direct.sqrt();
        let got = field.sobolev_norm(0.0);
        assert!((got - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn sobolev_norm_overflow_is_infinity() {
        let mut field = SpectralField::new(1, 4, 0.0).unwrap();
        field.insert(vec![2], LogComplex::new(1e4, 0.0)).unwrap();
        assert!(field.sobolev_norm(0.0).is_infinite());
    }

    #[test]
    fn synthesize_single_mode() {
        let mut field = SpectralField::new(1, 2, 0.0).unwrap();
        field
            .insert(vec![1], LogComplex::from_complex(c(1.0, 0.0)))
            .unwrap();
        let samples = field.synthesize(4).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (s, e) in samples.iter().zip(expected.iter()) {
            assert!((s - e).norm() < 1e-14);
        }
    }

    #[test]
    fn synthesize_zero_field() {
        let field = SpectralField::new(2, 2, 0.0).unwrap();
        let samples = field.synthesize(3).unwrap();
        assert_eq!(samples.len(), 9);
        assert!(samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn parseval_identity_random_field() {
        // mean |u|^2 over the grid equals sum |u_hat|^2 when the grid
        // oversamples the truncation
        let mut field = SpectralField::new(1, 8, 0.0).unwrap();
        let mut sum_sq = 0.0;
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut rand_unit = move || {
            // xorshift, deterministic
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for xi in SpectralField::frequency_box(1, 8) {
            let z = c(rand_unit(), rand_unit());
            sum_sq += z.norm_sqr();
            field.insert(xi, LogComplex::from_complex(z)).unwrap();
        }
        let samples = field.synthesize(64).unwrap();
        let mean_sq: f64 = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / 64.0;
        assert!((mean_sq - sum_sq).abs() / sum_sq < 1e-10);
    }

    #[test]
    fn gevrey_fit_recovers_exact_models() {
        // logmag = -2 |xi|^{1/2}
        let mut field = SpectralField::new(1, 256, 0.0).unwrap();
        for k in 1..=256i64 {
            let lm = -2.0 * (k as f64).sqrt();
            field.insert(vec![k], LogComplex::new(lm, 0.0)).unwrap();
            field.insert(vec![-k], LogComplex::new(lm, 0.0)).unwrap();
        }
        let fit = field.gevrey_fit().unwrap();
        assert_abs_diff_eq!(fit.s_hat, 2.0, epsilon = 0.02);
        assert_abs_diff_eq!(fit.delta_hat, 2.0, epsilon = 0.04);
        assert!(fit.admissible);

        // analytic class: logmag = -3 |xi|
        let mut field = SpectralField::new(1, 256, 0.0).unwrap();
        for k in 1..=256i64 {
            let lm = -3.0 * k as f64;
            field.insert(vec![k], LogComplex::new(lm, 0.0)).unwrap();
        }
        let fit = field.gevrey_fit().unwrap();
        assert_abs_diff_eq!(fit.s_hat, 1.0, epsilon = 0.02);
        assert_abs_diff_eq!(fit.delta_hat, 3.0, epsilon = 0.06);
        assert!(fit.admissible);
    }

    #[test]
    fn gevrey_fit_clamps_on_heat_decay() {
        // logmag = -|xi|^2 decays faster than any Gevrey model in range:
        // s clamps to the lower bound and the fit is inadmissible.
        let mut field = SpectralField::new(1, 128, 1.0).unwrap();
        for k in 1..=128i64 {
            field
                .insert(vec![k], LogComplex::new(-((k * k) as f64), 0.0))
                .unwrap();
        }
        let fit = field.gevrey_fit().unwrap();
        assert!(fit.s_hat < 1.05);
        assert!(!fit.admissible);
        assert!(fit.diagnostic().is_some());
    }

    #[test]
    fn gevrey_fit_needs_enough_samples() {
        let mut field = SpectralField::new(1, 16, 0.0).unwrap();
        for k in 1..=4i64 {
            field
                .insert(vec![k], LogComplex::new(-(k as f64), 0.0))
                .unwrap();
        }
        assert!(matches!(
            field.gevrey_fit(),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn axis_mask_filters_lattice() {
        let gen = DataGen::ExponentialDecay {
            rate: 1.0,
            amplitude: c(1.0, 0.0),
            mask: DirectionMask::Axis {
                axis: 0,
                sign: AxisSign::Positive,
            },
        };
        assert!(gen.amplitude_at(&[3, 0]).norm() > 0.0);
        assert_eq!(gen.amplitude_at(&[-3, 0]).norm(), 0.0);
        assert_eq!(gen.amplitude_at(&[3, 1]).norm(), 0.0);
        assert_eq!(gen.amplitude_at(&[0, 0]).norm(), 0.0);
    }

    proptest! {
        /// r1 >= r2 implies norm(r1) >= norm(r2).
        #[test]
        fn norm_monotone_in_order(r1 in -3.0f64..3.0, r2 in -3.0f64..3.0, seed in 0u64..1000) {
            let (r1, r2) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
            let mut field = SpectralField::new(1, 16, 0.0).unwrap();
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            for xi in SpectralField::frequency_box(1, 16) {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let a = (state >> 11) as f64 / (1u64 << 53) as f64;
                field.insert(xi, LogComplex::from_complex(c(a, 0.0))).unwrap();
            }
            prop_assert!(field.sobolev_norm(r1) >= field.sobolev_norm(r2) - 1e-12);
        }
    }
}
