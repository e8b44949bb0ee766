//! JSON problem-file schema and conversion into core types.
//!
//! Unknown keys are rejected everywhere; every number must be finite.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use torus_cauchy_core::classifier::{DegeneratePoint, DriftKind, ImaginaryStructure, LeadingSign};
use torus_cauchy_core::spectral_field::{AxisSign, DataGen, DataSpec, DirectionMask};
use torus_cauchy_core::symbol_ode::SymbolSpec;
use torus_cauchy_core::time_coeffs::{FactorSign, TimeCoefficient, VanishingProfile};

use crate::CliError;

type Cx = [f64; 2];

fn cx(v: Cx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn check_finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::schema(format!("{what} must be finite")));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub horizon: f64,
    pub coefficients: CoefficientsJson,
    #[serde(default)]
    pub structure: Option<StructureJson>,
    #[serde(default)]
    pub data: Option<DataJson>,
    #[serde(default)]
    pub solve: Option<SolveJson>,
    #[serde(default)]
    pub probe: Option<ProbeJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsJson {
    pub a2: CoefficientJson,
    pub a1: Vec<CoefficientJson>,
    pub a0: CoefficientJson,
    #[serde(default)]
    pub extra_monomials: Vec<MonomialJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialJson {
    pub degree: u32,
    pub coefficient: CoefficientJson,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientJson {
    Poly {
        coefficients: Vec<Cx>,
    },
    Factored {
        zeros: Vec<ZeroJson>,
        remainder: Vec<Cx>,
    },
    Named {
        profile: NamedProfileJson,
        scale: f64,
        amplitude: Cx,
    },
    Sampled {
        values: Vec<Cx>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedProfileJson {
    FlatExpDerivative,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroJson {
    pub location: f64,
    pub order: f64,
    #[serde(default = "one")]
    pub factor_lower: f64,
    #[serde(default = "one")]
    pub factor_upper: f64,
    pub factor_sign: SignJson,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignJson {
    Positive,
    Negative,
}

impl From<SignJson> for FactorSign {
    fn from(s: SignJson) -> Self {
        match s {
            SignJson::Positive => FactorSign::Positive,
            SignJson::Negative => FactorSign::Negative,
        }
    }
}

impl CoefficientJson {
    pub fn build(&self, horizon: f64) -> Result<TimeCoefficient, CliError> {
        let coef = match self {
            CoefficientJson::Poly { coefficients } => {
                for v in coefficients {
                    check_finite(v, "polynomial coefficients")?;
                }
                TimeCoefficient::polynomial(horizon, coefficients.iter().map(|&v| cx(v)).collect())
            }
            CoefficientJson::Factored { zeros, remainder } => {
                for v in remainder {
                    check_finite(v, "remainder coefficients")?;
                }
                let profiles = zeros
                    .iter()
                    .map(|z| {
                        check_finite(
                            &[z.location, z.order, z.factor_lower, z.factor_upper],
                            "zero declaration",
                        )?;
                        Ok(
                            VanishingProfile::new(z.location, z.order, z.factor_sign.into())
                                .with_factor_bounds(z.factor_lower, z.factor_upper),
                        )
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                TimeCoefficient::factored(
                    horizon,
                    profiles,
                    remainder.iter().map(|&v| cx(v)).collect(),
                )
            }
            CoefficientJson::Named {
                profile: NamedProfileJson::FlatExpDerivative,
                scale,
                amplitude,
            } => {
                check_finite(&[*scale, amplitude[0], amplitude[1]], "named profile")?;
                TimeCoefficient::flat_exp_derivative(horizon, *scale, cx(*amplitude))
            }
            CoefficientJson::Sampled { values } => {
                for v in values {
                    check_finite(v, "sampled values")?;
                }
                TimeCoefficient::sampled(horizon, values.iter().map(|&v| cx(v)).collect())
            }
        };
        coef.map_err(|e| CliError::schema(e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub leading: LeadingJson,
    pub drifts: Vec<DriftJson>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LeadingJson {
    SomewherePositive { t_star: f64 },
    StrictlyNegative,
    IdenticallyZero,
    Degenerate { zeros: Vec<DegenerateZeroJson> },
    InfiniteOrder,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegenerateZeroJson {
    pub time: f64,
    pub leading_order: f64,
    pub drift_orders: Vec<OrderJson>,
}

/// A drift vanishing order: a nonnegative number, or `"inf"` meaning the
/// drift imaginary part vanishes identically near the zero.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OrderJson {
    Number(f64),
    Text(String),
}

impl OrderJson {
    fn value(&self) -> Result<f64, CliError> {
        match self {
            OrderJson::Number(v) => {
                if v.is_finite() {
                    Ok(*v)
                } else {
                    Err(CliError::schema("drift orders must be finite or \"inf\""))
                }
            }
            OrderJson::Text(s) if s == "inf" => Ok(f64::INFINITY),
            OrderJson::Text(s) => Err(CliError::schema(format!(
                "unrecognized drift order {s:?}; use a number or \"inf\""
            ))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriftJson {
    IdenticallyZero,
    NonzeroOnInterval { interval: [f64; 2] },
    DegenerateOrders,
}

impl StructureJson {
    pub fn build(&self, dimension: usize) -> Result<ImaginaryStructure, CliError> {
        if self.drifts.len() != dimension {
            return Err(CliError::schema(format!(
                "structure declares {} drifts but the dimension is {dimension}",
                self.drifts.len()
            )));
        }
        let leading = match &self.leading {
            LeadingJson::SomewherePositive { t_star } => {
                LeadingSign::SomewherePositive { t_star: *t_star }
            }
            LeadingJson::StrictlyNegative => LeadingSign::StrictlyNegative,
            LeadingJson::IdenticallyZero => LeadingSign::IdenticallyZero,
            LeadingJson::InfiniteOrder => LeadingSign::InfiniteOrderSuspect,
            LeadingJson::Degenerate { zeros } => {
                let points = zeros
                    .iter()
                    .map(|z| {
                        let orders = z
                            .drift_orders
                            .iter()
                            .map(OrderJson::value)
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(DegeneratePoint::new(z.time, z.leading_order, orders))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                LeadingSign::DegenerateNonpositive { zeros: points }
            }
        };
        let drifts = self
            .drifts
            .iter()
            .map(|d| match d {
                DriftJson::IdenticallyZero => DriftKind::IdenticallyZero,
                DriftJson::NonzeroOnInterval { interval } => DriftKind::NonzeroOnInterval {
                    start: interval[0],
                    end: interval[1],
                },
                DriftJson::DegenerateOrders => DriftKind::DegenerateOrders,
            })
            .collect();
        Ok(ImaginaryStructure::new(leading, drifts))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataJson {
    pub initial: GenJson,
    pub forcing: GenJson,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GenJson {
    Zero,
    SingleMode {
        frequency: Vec<i64>,
        amplitude: Cx,
    },
    Gevrey {
        delta: f64,
        s: f64,
        #[serde(default = "unit_cx")]
        amplitude: Cx,
        #[serde(default)]
        mask: MaskJson,
    },
    Exponential {
        rate: f64,
        #[serde(default = "unit_cx")]
        amplitude: Cx,
        #[serde(default)]
        mask: MaskJson,
    },
    Table {
        entries: Vec<TableEntryJson>,
    },
}

fn unit_cx() -> Cx {
    [1.0, 0.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryJson {
    pub frequency: Vec<i64>,
    pub value: Cx,
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaskJson {
    #[default]
    Full,
    Axis {
        /// 1-based axis index.
        axis: usize,
        sign: AxisSignJson,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisSignJson {
    Positive,
    Negative,
    Both,
}

impl MaskJson {
    fn build(&self, dimension: usize) -> Result<DirectionMask, CliError> {
        Ok(match self {
            MaskJson::Full => DirectionMask::Full,
            MaskJson::Axis { axis, sign } => {
                if *axis == 0 || *axis > dimension {
                    return Err(CliError::schema(format!(
                        "axis {axis} out of range 1..={dimension}"
                    )));
                }
                DirectionMask::Axis {
                    axis: axis - 1,
                    sign: match sign {
                        AxisSignJson::Positive => AxisSign::Positive,
                        AxisSignJson::Negative => AxisSign::Negative,
                        AxisSignJson::Both => AxisSign::Both,
                    },
                }
            }
        })
    }
}

impl GenJson {
    pub fn build(&self, dimension: usize) -> Result<DataGen, CliError> {
        Ok(match self {
            GenJson::Zero => DataGen::Zero,
            GenJson::SingleMode {
                frequency,
                amplitude,
            } => {
                if frequency.len() != dimension {
                    return Err(CliError::schema("single-mode frequency dimension mismatch"));
                }
                check_finite(amplitude, "amplitude")?;
                DataGen::SingleMode {
                    frequency: frequency.clone(),
                    amplitude: cx(*amplitude),
                }
            }
            GenJson::Gevrey {
                delta,
                s,
                amplitude,
                mask,
            } => {
                check_finite(&[*delta, *s, amplitude[0], amplitude[1]], "gevrey data")?;
                if *delta <= 0.0 || *s < 1.0 {
                    return Err(CliError::schema("gevrey data needs delta > 0 and s >= 1"));
                }
                DataGen::GevreyDecay {
                    delta: *delta,
                    s: *s,
                    amplitude: cx(*amplitude),
                    mask: mask.build(dimension)?,
                }
            }
            GenJson::Exponential {
                rate,
                amplitude,
                mask,
            } => {
                check_finite(&[*rate, amplitude[0], amplitude[1]], "exponential data")?;
                DataGen::ExponentialDecay {
                    rate: *rate,
                    amplitude: cx(*amplitude),
                    mask: mask.build(dimension)?,
                }
            }
            GenJson::Table { entries } => {
                let mut map = BTreeMap::new();
                for e in entries {
                    if e.frequency.len() != dimension {
                        return Err(CliError::schema("table frequency dimension mismatch"));
                    }
                    check_finite(&e.value, "table value")?;
                    map.insert(e.frequency.clone(), cx(e.value));
                }
                DataGen::Table(map)
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveJson {
    pub times: Vec<f64>,
    pub truncation: i64,
    #[serde(default = "default_nodes_per_unit")]
    pub nodes_per_unit: usize,
}

fn default_nodes_per_unit() -> usize {
    64
}

#[derive(Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbeJson {
    /// Explicit probe points; uses the file's data block.
    Sequence {
        #[serde(default = "default_label")]
        label: String,
        entries: Vec<ProbeEntryJson>,
        #[serde(default)]
        expected_logmag: Option<Vec<f64>>,
        #[serde(default = "default_probe_nodes")]
        nodes_per_unit: usize,
    },
    /// Forcing violating the leading-sign condition, probed at `t_star`.
    Parabolic {
        t_star: f64,
        #[serde(default = "default_axis")]
        axis: usize,
        #[serde(default)]
        n_values: Option<Vec<u64>>,
        #[serde(default = "default_probe_nodes")]
        nodes_per_unit: usize,
    },
    /// Single-axis forcing for a flat leading part with active drift.
    Drift {
        #[serde(default = "default_axis")]
        axis: usize,
        varsigma: f64,
        delta: f64,
        #[serde(default)]
        n_values: Option<Vec<u64>>,
        #[serde(default = "default_probe_nodes")]
        nodes_per_unit: usize,
    },
    /// Witness for a supercritical degenerate zero of the structure block.
    Degenerate {
        #[serde(default)]
        zero_index: usize,
        #[serde(default)]
        factor_upper: Option<f64>,
        #[serde(default)]
        factor_lower: Option<f64>,
        #[serde(default)]
        ell: Option<u32>,
        #[serde(default)]
        n_values: Option<Vec<u64>>,
        #[serde(default = "default_probe_nodes")]
        nodes_per_unit: usize,
    },
}

fn default_label() -> String {
    "sequence".into()
}

fn default_axis() -> usize {
    1
}

fn default_probe_nodes() -> usize {
    1024
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeEntryJson {
    pub n: u64,
    pub time: f64,
    pub frequency: Vec<i64>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| CliError::schema(e.to_string()))?;
        if !(file.horizon > 0.0 && file.horizon.is_finite()) {
            return Err(CliError::schema("horizon must be positive and finite"));
        }
        if file.dimension == 0 {
            return Err(CliError::schema("dimension must be at least 1"));
        }
        Ok(file)
    }

    pub fn symbol_spec(&self) -> Result<SymbolSpec, CliError> {
        let a2 = self.coefficients.a2.build(self.horizon)?;
        let a1 = self
            .coefficients
            .a1
            .iter()
            .map(|c| c.build(self.horizon))
            .collect::<Result<Vec<_>, _>>()?;
        let a0 = self.coefficients.a0.build(self.horizon)?;
        let extras = self
            .coefficients
            .extra_monomials
            .iter()
            .map(|m| Ok((m.degree, m.coefficient.build(self.horizon)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        SymbolSpec::with_extra_monomials(self.dimension, self.horizon, a2, a1, a0, extras)
            .map_err(|e| CliError::schema(e.to_string()))
    }

    pub fn structure(&self) -> Result<ImaginaryStructure, CliError> {
        self.structure
            .as_ref()
            .ok_or_else(|| CliError::schema("this command needs a \"structure\" block"))?
            .build(self.dimension)
    }

    pub fn data_spec(&self) -> Result<DataSpec, CliError> {
        match &self.data {
            None => Ok(DataSpec::zero()),
            Some(d) => Ok(DataSpec {
                initial: d.initial.build(self.dimension)?,
                forcing: d.forcing.build(self.dimension)?,
            }),
        }
    }
}
