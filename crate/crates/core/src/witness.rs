//! Adversarial data and probe sequences: numerically certify blow-up or
//! boundedness of the per-frequency solution along explicit sequences
//! `(t_n, xi_n)`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::classifier::DegeneratePoint;
use crate::error::{Error, Result};
use crate::regression::fit_line;
use crate::spectral_field::{
    axis_frequency, AxisSign, DataGen, DataSpec, DirectionMask, Frequency,
};
use crate::symbol_ode::SymbolSpec;

/// A probe row is declared diverging only past this many natural-log units
/// (magnitude ~1e21, far beyond any bounded-case fluctuation at desk scale).
pub const DIVERGENCE_FLOOR: f64 = 50.0;

/// One probe point: index, time and frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub n: u64,
    pub time: f64,
    pub frequency: Frequency,
}

/// A labelled sequence of probe points, optionally with exact expected
/// log-magnitudes for closed-form checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSequence {
    pub label: String,
    pub entries: Vec<ProbeEntry>,
    pub expected_logmag: Option<Vec<f64>>,
}

impl ProbeSequence {
    pub fn new(
        label: impl Into<String>,
        entries: Vec<ProbeEntry>,
        expected_logmag: Option<Vec<f64>>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSpec("probe sequence is empty".into()));
        }
        for pair in entries.windows(2) {
            if pair[1].n <= pair[0].n {
                return Err(Error::InvalidSpec(
                    "probe indices must be strictly increasing".into(),
                ));
            }
        }
        for e in &entries {
            if e.time < 0.0 || !e.time.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "probe time {} is not a valid instant",
                    e.time
                )));
            }
        }
        if let Some(exp) = &expected_logmag {
            if exp.len() != entries.len() {
                return Err(Error::InvalidSpec(
                    "expected log-magnitudes must match the entry count".into(),
                ));
            }
        }
        Ok(ProbeSequence {
            label: label.into(),
            entries,
            expected_logmag,
        })
    }

    /// Probe a single axis at a fixed time: entries `(n, t, n * e_axis)`.
    pub fn fixed_time(
        label: impl Into<String>,
        time: f64,
        axis: usize,
        dimension: usize,
        ns: &[u64],
    ) -> Result<Self> {
        let entries = ns
            .iter()
            .map(|&n| ProbeEntry {
                n,
                time,
                frequency: axis_frequency(n as i64, axis, dimension),
            })
            .collect();
        Self::new(label, entries, None)
    }
}

/// Default geometric probe ladder: powers of two from 8 to 4096.
pub fn default_ladder() -> Vec<u64> {
    (3..=12).map(|k| 1u64 << k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClassification {
    Diverging,
    Bounded,
    Inconclusive,
}

/// One evaluated probe row.
#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub n: u64,
    pub time: f64,
    pub xi_norm: f64,
    pub logmag: f64,
    pub expected: Option<f64>,
    pub deviation: Option<f64>,
}

/// Evaluated probe with growth classification and fitted growth exponent.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub label: String,
    pub rows: Vec<ProbeRow>,
    pub classification: GrowthClassification,
    /// Fitted exponent of `logmag ~ a * |xi|^nu` over rows with positive
    /// log-magnitude, with its standard error.
    pub nu_hat: Option<f64>,
    pub nu_stderr: Option<f64>,
    /// Maximum absolute deviation from the expected log-magnitudes.
    pub max_deviation: Option<f64>,
}

/// Forcing data violating the necessary sign condition: zero initial datum
/// and the analytic forcing with coefficients `exp(-|xi|)` on the full
/// lattice. Blow-up occurs at any time where the leading imaginary part is
/// positive; `t_star` only selects where to probe.
pub fn parabolic_violation_data(_t_star: f64) -> DataSpec {
    DataSpec {
        initial: DataGen::Zero,
        forcing: DataGen::ExponentialDecay {
            rate: 1.0,
            amplitude: Complex64::new(1.0, 0.0),
            mask: DirectionMask::Full,
        },
    }
}

/// Forcing data for the flat-leading/active-drift case: single-axis forcing
/// `-i exp(-varsigma delta eta / 4)` along `axis` (0-based), zero datum.
pub fn drift_violation_data(axis: usize, varsigma: f64, delta: f64) -> Result<DataSpec> {
    if !(varsigma > 0.0 && delta > 0.0) {
        return Err(Error::InvalidSpec(
            "drift witness needs positive varsigma and delta".into(),
        ));
    }
    Ok(DataSpec {
        initial: DataGen::Zero,
        forcing: DataGen::ExponentialDecay {
            rate: varsigma * delta / 4.0,
            amplitude: Complex64::new(0.0, -1.0),
            mask: DirectionMask::Axis {
                axis,
                sign: AxisSign::Both,
            },
        },
    })
}

/// The comparison polynomial `f(x) = -Gamma x^{p+1}/(p+1) + gamma x^{q+1}/(q+1)`
/// controlling the exponent near a degenerate zero. It increases on
/// `(0, (gamma/Gamma)^{1/(p-q)})`.
pub fn comparison_polynomial(p: f64, q: f64, gamma_upper: f64, gamma_lower: f64, x: f64) -> f64 {
    -gamma_upper * x.powf(p + 1.0) / (p + 1.0) + gamma_lower * x.powf(q + 1.0) / (q + 1.0)
}

/// Witness for a supercritical degenerate zero: Gevrey data at the critical
/// index concentrated on the minimizing axis, and the probe sequence
/// approaching the zero at the matched rate. `gamma_upper`/`gamma_lower`
/// bound the leading and drift factors near the zero (from the declared
/// profiles); `ell` selects the ladder inside the monotonicity window of the
/// comparison polynomial.
///
/// `drift_positive` selects the drift-factor sign branch; the negative
/// branch probes the negated axis.
pub fn degenerate_witness(
    point: &DegeneratePoint,
    gamma_upper: f64,
    gamma_lower: f64,
    ell: u32,
) -> Result<(DataSpec, ProbeSequence)> {
    degenerate_witness_with(
        point,
        gamma_upper,
        gamma_lower,
        ell,
        true,
        &default_ladder(),
    )
}

/// Smallest ladder parameter inside the monotonicity window.
pub fn default_ladder_parameter(
    point: &DegeneratePoint,
    gamma_upper: f64,
    gamma_lower: f64,
) -> Result<u32> {
    if !point.in_critical_set() {
        return Err(Error::NotInK);
    }
    let p = point.leading_order;
    let q = point.min_drift_order();
    let window = (gamma_lower / gamma_upper).powf(1.0 / (p - q));
    Ok(((1.0 / window).floor() as u32 + 1).max(1))
}

pub fn degenerate_witness_with(
    point: &DegeneratePoint,
    gamma_upper: f64,
    gamma_lower: f64,
    ell: u32,
    drift_positive: bool,
    ladder: &[u64],
) -> Result<(DataSpec, ProbeSequence)> {
    if !point.in_critical_set() {
        return Err(Error::NotInK);
    }
    if !(gamma_upper >= gamma_lower && gamma_lower > 0.0) {
        return Err(Error::InvalidSpec(
            "factor bounds must satisfy 0 < lower <= upper".into(),
        ));
    }
    let p = point.leading_order;
    let q = point.min_drift_order();
    let window = (gamma_lower / gamma_upper).powf(1.0 / (p - q));
    if ell == 0 || 1.0 / ell as f64 >= window {
        return Err(Error::BadLadder(format!(
            "1/ell must lie inside the increasing window (0, {window:.6})"
        )));
    }
    let rho = point
        .threshold()
        .expect("supercritical point has a threshold")
        .to_f64()
        .unwrap();
    let nu = 1.0 / rho;
    let axis = point.minimizing_axis();
    let ell_f = ell as f64;
    let rate_exponent = 1.0 / (p - q);

    let f = |x: f64| comparison_polynomial(p, q, gamma_upper, gamma_lower, x);
    let (theta, times): (f64, Vec<f64>) = if point.time > 0.0 {
        // interior zero: forcing-driven, approach from the left at the
        // matched rate, amplitude from the window increment
        let varsigma = f(1.0 / (2.0 * ell_f)) - f(1.0 / (3.0 * ell_f));
        let theta = 0.5 * varsigma;
        let times = ladder
            .iter()
            .map(|&n| point.time - 1.0 / (3.0 * ell_f * (n as f64).powf(rate_exponent)))
            .collect();
        (theta, times)
    } else {
        // zero at the left endpoint: datum-driven
        let theta = 0.5 * f(1.0 / ell_f);
        let times = ladder
            .iter()
            .map(|&n| 1.0 / (ell_f * (n as f64).powf(rate_exponent)))
            .collect();
        (theta, times)
    };
    if times.iter().any(|&t| t < 0.0) {
        return Err(Error::BadLadder(
            "probe times fall outside [0, t_k]; increase ell or the ladder start".into(),
        ));
    }

    let sign = if drift_positive { 1i64 } else { -1i64 };
    let gen = DataGen::GevreyDecay {
        delta: theta,
        s: rho,
        amplitude: if point.time > 0.0 {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(1.0, 0.0)
        },
        mask: DirectionMask::Axis {
            axis,
            sign: AxisSign::Both,
        },
    };
    let data = if point.time > 0.0 {
        DataSpec {
            initial: DataGen::Zero,
            forcing: gen,
        }
    } else {
        DataSpec {
            initial: gen,
            forcing: DataGen::Zero,
        }
    };
    let entries: Vec<ProbeEntry> = ladder
        .iter()
        .zip(times.iter())
        .map(|(&n, &t)| ProbeEntry {
            n,
            time: t,
            frequency: axis_frequency(sign * n as i64, axis, point.drift_orders.len()),
        })
        .collect();
    let branch = if drift_positive { "" } else { " axis-negated" };
    let label = format!(
        "degenerate-witness p={} q={} rho={:.6} nu={:.6}{}",
        p, q, rho, nu, branch
    );
    let seq = ProbeSequence::new(label, entries, None)?;
    Ok((data, seq))
}

/// Evaluate the per-frequency solution along the sequence in log-domain,
/// classify the growth and fit the growth exponent.
pub fn probe(
    spec: &SymbolSpec,
    data: &DataSpec,
    seq: &ProbeSequence,
    nodes_per_unit: usize,
) -> Result<ProbeReport> {
    let rows: Vec<ProbeRow> = seq
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, entry)| -> Result<ProbeRow> {
            let g = data.initial.log_amplitude_at(&entry.frequency);
            let f = data.forcing.log_amplitude_at(&entry.frequency);
            let nodes = ((nodes_per_unit as f64 * entry.time).ceil() as usize).max(8);
            let value =
                spec.duhamel_coefficient_log(g, |_| f, entry.time, &entry.frequency, nodes)?;
            let expected = seq.expected_logmag.as_ref().map(|e| e[i]);
            let deviation = expected.map(|e| value.logmag() - e);
            Ok(ProbeRow {
                n: entry.n,
                time: entry.time,
                xi_norm: entry
                    .frequency
                    .iter()
                    .map(|&k| (k * k) as f64)
                    .sum::<f64>()
                    .sqrt(),
                logmag: value.logmag(),
                expected,
                deviation,
            })
        })
        .collect::<Result<_>>()?;

    let logs: Vec<f64> = rows.iter().map(|r| r.logmag).collect();
    let tail_start = logs.len() / 2;
    let tail = &logs[tail_start..];
    let tail_increasing = tail.windows(2).all(|w| w[1] > w[0]) && tail.len() >= 2;
    let max_log = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let last = *logs.last().unwrap();

    let classification = if tail_increasing && last >= DIVERGENCE_FLOOR {
        GrowthClassification::Diverging
    } else if max_log <= DIVERGENCE_FLOOR && !tail_increasing {
        GrowthClassification::Bounded
    } else {
        GrowthClassification::Inconclusive
    };

    // two-parameter regression log(logmag) ~ log a + nu log |xi|
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in &rows {
        if r.logmag > 0.0 && r.xi_norm > 0.0 {
            xs.push(r.xi_norm.ln());
            ys.push(r.logmag.ln());
        }
    }
    let (nu_hat, nu_stderr) = if xs.len() >= 3 {
        match fit_line(&xs, &ys) {
            Some(fit) => (Some(fit.slope), Some(fit.slope_stderr)),
            None => (None, None),
        }
    } else {
        (None, None)
    };

    let max_deviation = seq.expected_logmag.as_ref().map(|_| {
        rows.iter()
            .filter_map(|r| r.deviation)
            .map(f64::abs)
            .fold(0.0, f64::max)
    });

    Ok(ProbeReport {
        label: seq.label.clone(),
        rows,
        classification,
        nu_hat,
        nu_stderr,
        max_deviation,
    })
}
