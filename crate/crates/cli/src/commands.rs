//! The five batch commands.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use torus_cauchy_core::classifier::{
    classify, GevreyThreshold, SobolevVerdict, Verdict, WpVerdict,
};
use torus_cauchy_core::error::Error as CoreError;
use torus_cauchy_core::spectral_field::{solve_cauchy, SolveSettings, SpectralField};
use torus_cauchy_core::symbol_ode::SymbolSpec;
use torus_cauchy_core::time_coeffs::{FactorSign, TimeCoefficient};
use torus_cauchy_core::witness::{
    default_ladder, default_ladder_parameter, degenerate_witness_with, drift_violation_data,
    parabolic_violation_data, probe, GrowthClassification, ProbeEntry, ProbeReport, ProbeSequence,
    DIVERGENCE_FLOOR,
};

use crate::output::{field_csv, probe_csv, write_file, Manifest};
use crate::schema::{ProbeJson, ProblemFile};
use crate::CliError;

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::Unclassifiable(msg) => CliError::unclassifiable(msg),
        CoreError::MalformedStructure(msg) | CoreError::InvalidSpec(msg) => CliError::schema(msg),
        other => CliError::solver(other.to_string()),
    }
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    let sobolev = match v.sobolev {
        SobolevVerdict::WellPosed => "well-posed",
        SobolevVerdict::WellPosedFiniteLoss => "well-posed-finite-loss",
        SobolevVerdict::IllPosed => "ill-posed",
    };
    let wp = |w: WpVerdict| match w {
        WpVerdict::WellPosed => "well-posed",
        WpVerdict::IllPosed => "ill-posed",
    };
    let threshold = match &v.gevrey_threshold {
        GevreyThreshold::Infinite => json!("inf"),
        other => json!(other.to_f64()),
    };
    json!({
        "sobolev": sobolev,
        "smooth": wp(v.smooth),
        "gevrey_threshold": threshold,
        "analytic": wp(v.analytic),
        "provenance": v.provenance.as_str(),
    })
}

pub fn cmd_classify(input_text: &str) -> Result<String, CliError> {
    let file = ProblemFile::parse(input_text)?;
    // the coefficients must at least form a valid spec
    file.symbol_spec()?;
    let structure = file.structure()?;
    let verdict = classify(&structure).map_err(core_err)?;
    serde_json::to_string_pretty(&verdict_json(&verdict))
        .map_err(|e| CliError::solver(e.to_string()))
}

pub fn cmd_solve(input_text: &str, out_dir: &Path, seed: u64) -> Result<String, CliError> {
    let file = ProblemFile::parse(input_text)?;
    let spec = file.symbol_spec()?;
    let data = file.data_spec()?;
    let solve = file
        .solve
        .as_ref()
        .ok_or_else(|| CliError::schema("solve command needs a \"solve\" block"))?;
    let settings = SolveSettings {
        nodes_per_unit: solve.nodes_per_unit,
    };
    let fields =
        solve_cauchy(&spec, &data, &solve.times, solve.truncation, settings).map_err(core_err)?;
    let mut outputs = Vec::new();
    for (i, field) in fields.iter().enumerate() {
        let name = format!("field_t{i}.csv");
        write_file(out_dir, &name, &field_csv(field))?;
        outputs.push(name);
    }
    let manifest = Manifest::new(
        "solve",
        input_text,
        seed,
        json!({
            "times": solve.times,
            "truncation": solve.truncation,
            "nodes_per_unit": solve.nodes_per_unit,
        }),
        outputs,
    );
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::solver(e.to_string()))?;
    write_file(out_dir, "manifest.json", &manifest_json)?;
    Ok(format!(
        "wrote {} field file(s) and manifest.json to {}",
        fields.len(),
        out_dir.display()
    ))
}

fn report_json(report: &ProbeReport) -> serde_json::Value {
    let classification = match report.classification {
        GrowthClassification::Diverging => "diverging",
        GrowthClassification::Bounded => "bounded",
        GrowthClassification::Inconclusive => "inconclusive",
    };
    json!({
        "label": report.label,
        "classification": classification,
        "nu_hat": report.nu_hat,
        "nu_stderr": report.nu_stderr,
        "max_deviation": report.max_deviation,
        "rows": report.rows.len(),
        "divergence_floor": DIVERGENCE_FLOOR,
    })
}

/// Resolve the probe preset into data, sequence and node count.
fn build_probe(
    file: &ProblemFile,
    spec: &SymbolSpec,
) -> Result<
    (
        torus_cauchy_core::spectral_field::DataSpec,
        ProbeSequence,
        usize,
    ),
    CliError,
> {
    let probe_json = file
        .probe
        .as_ref()
        .ok_or_else(|| CliError::schema("witness command needs a \"probe\" block"))?;
    match probe_json {
        ProbeJson::Sequence {
            label,
            entries,
            expected_logmag,
            nodes_per_unit,
        } => {
            let data = file.data_spec()?;
            let entries: Vec<ProbeEntry> = entries
                .iter()
                .map(|e| {
                    if e.frequency.len() != file.dimension {
                        return Err(CliError::schema("probe frequency dimension mismatch"));
                    }
                    Ok(ProbeEntry {
                        n: e.n,
                        time: e.time,
                        frequency: e.frequency.clone(),
                    })
                })
                .collect::<Result<_, _>>()?;
            let seq = ProbeSequence::new(label.clone(), entries, expected_logmag.clone())
                .map_err(core_err)?;
            Ok((data, seq, *nodes_per_unit))
        }
        ProbeJson::Parabolic {
            t_star,
            axis,
            n_values,
            nodes_per_unit,
        } => {
            let axis = checked_axis(*axis, file.dimension)?;
            let data = parabolic_violation_data(*t_star);
            let ns = n_values.clone().unwrap_or_else(default_ladder);
            let seq = ProbeSequence::fixed_time(
                "parabolic-violation",
                *t_star,
                axis,
                file.dimension,
                &ns,
            )
            .map_err(core_err)?;
            Ok((data, seq, *nodes_per_unit))
        }
        ProbeJson::Drift {
            axis,
            varsigma,
            delta,
            n_values,
            nodes_per_unit,
        } => {
            let axis = checked_axis(*axis, file.dimension)?;
            let data = drift_violation_data(axis, *varsigma, *delta).map_err(core_err)?;
            let ns = n_values.clone().unwrap_or_else(default_ladder);
            // probe at the end of the horizon; the active-drift interval is
            // part of the coefficient declaration
            let seq = ProbeSequence::fixed_time(
                "drift-violation",
                file.horizon,
                axis,
                file.dimension,
                &ns,
            )
            .map_err(core_err)?;
            Ok((data, seq, *nodes_per_unit))
        }
        ProbeJson::Degenerate {
            zero_index,
            factor_upper,
            factor_lower,
            ell,
            n_values,
            nodes_per_unit,
        } => {
            let structure = file.structure()?;
            let zeros = match &structure.leading {
                torus_cauchy_core::classifier::LeadingSign::DegenerateNonpositive { zeros } => {
                    zeros.clone()
                }
                _ => {
                    return Err(CliError::schema(
                        "degenerate probe needs a degenerate leading structure",
                    ))
                }
            };
            let point = zeros
                .get(*zero_index)
                .ok_or_else(|| CliError::schema(format!("zero_index {zero_index} out of range")))?;
            // factor bounds default to the declared profile bounds
            let upper = factor_upper
                .or_else(|| {
                    spec.a2()
                        .vanishing_profiles()
                        .iter()
                        .find(|z| (z.location - point.time).abs() < 1e-12)
                        .map(|z| z.factor_upper)
                })
                .ok_or_else(|| {
                    CliError::schema(
                        "no factor_upper given and the leading coefficient declares no \
                         profile at this zero",
                    )
                })?;
            let j0 = point.minimizing_axis();
            let drift = &spec.a1()[j0];
            let drift_profile = drift
                .vanishing_profiles()
                .iter()
                .find(|z| (z.location - point.time).abs() < 1e-12);
            let (lower_default, drift_positive) = match drift_profile {
                Some(z) => (Some(z.factor_lower), z.factor_sign == FactorSign::Positive),
                None => {
                    let im = drift.eval(point.time).map_err(core_err)?.im;
                    ((im != 0.0).then(|| im.abs()), im > 0.0)
                }
            };
            let lower = factor_lower.or(lower_default).ok_or_else(|| {
                CliError::schema(
                    "no factor_lower given and the minimizing drift vanishes at the zero",
                )
            })?;
            let ell = match ell {
                Some(l) => *l,
                None => default_ladder_parameter(point, upper, lower).map_err(core_err)?,
            };
            let ns = n_values.clone().unwrap_or_else(default_ladder);
            let (data, seq) =
                degenerate_witness_with(point, upper, lower, ell, drift_positive, &ns)
                    .map_err(core_err)?;
            Ok((data, seq, *nodes_per_unit))
        }
    }
}

fn checked_axis(axis_1based: usize, dimension: usize) -> Result<usize, CliError> {
    if axis_1based == 0 || axis_1based > dimension {
        return Err(CliError::schema(format!(
            "axis {axis_1based} out of range 1..={dimension}"
        )));
    }
    Ok(axis_1based - 1)
}

pub fn cmd_witness(input_text: &str, out_dir: &Path, seed: u64) -> Result<String, CliError> {
    let file = ProblemFile::parse(input_text)?;
    let spec = file.symbol_spec()?;
    let (data, seq, nodes_per_unit) = build_probe(&file, &spec)?;
    let report = probe(&spec, &data, &seq, nodes_per_unit).map_err(core_err)?;
    write_file(out_dir, "probe.csv", &probe_csv(&report))?;
    let report_value = report_json(&report);
    let manifest = Manifest::new(
        "witness",
        input_text,
        seed,
        json!({
            "label": seq.label,
            "nodes_per_unit": nodes_per_unit,
            "entries": seq.entries.len(),
        }),
        vec!["probe.csv".into(), "report.json".into()],
    );
    write_file(
        out_dir,
        "report.json",
        &serde_json::to_string_pretty(&report_value)
            .map_err(|e| CliError::solver(e.to_string()))?,
    )?;
    write_file(
        out_dir,
        "manifest.json",
        &serde_json::to_string_pretty(&manifest).map_err(|e| CliError::solver(e.to_string()))?,
    )?;
    serde_json::to_string_pretty(&report_value).map_err(|e| CliError::solver(e.to_string()))
}

fn unit_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let re = rng.gen_range(-1.0..1.0);
        let im = rng.gen_range(-1.0..1.0);
        if re * re + im * im <= 1.0 {
            return Complex64::new(re, im);
        }
    }
}

fn random_polynomial_coefficient(rng: &mut ChaCha8Rng, horizon: f64) -> TimeCoefficient {
    let degree = rng.gen_range(0..=3);
    let coeffs: Vec<Complex64> = (0..=degree).map(|_| unit_disk(rng)).collect();
    TimeCoefficient::polynomial(horizon, coeffs).unwrap()
}

const ORACLE_TOLERANCE: f64 = 1e-6;

/// Compare the closed-form propagator against the fixed-step RK4 oracle:
/// the file's own spec first, then seeded random polynomial specs. The
/// 1e4-step oracle is validated by step doubling and refined where it is
/// too coarse to serve as a 1e-6 reference.
pub fn cmd_oracle_check(
    input_text: &str,
    trials: usize,
    nodes_per_unit: usize,
    seed: u64,
) -> Result<String, CliError> {
    let file = ProblemFile::parse(input_text)?;
    let file_spec = file.symbol_spec()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0usize;
    let mut overflowed = 0usize;
    let mut refined = 0usize;
    let mut max_rel: f64 = 0.0;
    let forcing = |s: f64| Complex64::new(0.0, s).exp();

    for trial in 0..trials.max(1) {
        let (spec, xi, t);
        if trial == 0 {
            spec = file_spec.clone();
            let mut v = vec![0i64; spec.dimension()];
            v[0] = 4;
            xi = v;
            t = 0.5 * spec.horizon();
        } else {
            let dimension = rng.gen_range(1..=2usize);
            let horizon = 1.0;
            let a2 = random_polynomial_coefficient(&mut rng, horizon);
            let a1: Vec<_> = (0..dimension)
                .map(|_| random_polynomial_coefficient(&mut rng, horizon))
                .collect();
            let a0 = random_polynomial_coefficient(&mut rng, horizon);
            spec = SymbolSpec::new(dimension, horizon, a2, a1, a0).map_err(core_err)?;
            xi = (0..dimension).map(|_| rng.gen_range(-16..=16)).collect();
            t = 0.1 * rng.gen_range(1..=10) as f64;
        }

        let pinned = match spec.rk4_oracle(Complex64::new(1.0, 0.0), forcing, t, &xi, 10_000) {
            Ok(v) => v,
            Err(_) => {
                overflowed += 1;
                continue;
            }
        };
        let doubled = spec
            .rk4_oracle(Complex64::new(1.0, 0.0), forcing, t, &xi, 20_000)
            .map_err(core_err)?;
        let disc = (pinned - doubled).norm() / doubled.norm().max(1e-300);
        let reference = if disc <= ORACLE_TOLERANCE {
            pinned
        } else {
            refined += 1;
            spec.rk4_oracle(Complex64::new(1.0, 0.0), forcing, t, &xi, 640_000)
                .map_err(core_err)?
        };
        let nodes = ((nodes_per_unit as f64 * t).ceil() as usize).max(8);
        let closed = spec
            .duhamel_coefficient(Complex64::new(1.0, 0.0), forcing, t, &xi, nodes)
            .map_err(core_err)?
            .to_complex()
            .map_err(core_err)?;
        let rel = (closed - reference).norm() / reference.norm().max(1e-300);
        max_rel = max_rel.max(rel);
        compared += 1;
    }

    let pass = max_rel <= ORACLE_TOLERANCE;
    let summary = json!({
        "trials": trials.max(1),
        "seed": seed,
        "compared": compared,
        "overflowed": overflowed,
        "refined": refined,
        "nodes_per_unit": nodes_per_unit,
        "max_relative_error": max_rel,
        "tolerance": ORACLE_TOLERANCE,
        "pass": pass,
    });
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::solver(e.to_string()))?;
    if pass {
        Ok(text)
    } else {
        Err(CliError::oracle_check(text))
    }
}

pub fn cmd_fit_decay(csv_text: &str) -> Result<String, CliError> {
    let mut lines = csv_text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::schema("empty field file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let dim = columns.iter().take_while(|c| c.starts_with("xi_")).count();
    if dim == 0 || columns.len() != dim + 2 {
        return Err(CliError::schema(
            "expected header xi_1,...,xi_N,logmag,phase",
        ));
    }

    struct Entry {
        xi: Vec<i64>,
        logmag: f64,
        phase: f64,
    }
    let mut entries = Vec::new();
    let mut truncation: i64 = 1;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != dim + 2 {
            return Err(CliError::schema(format!(
                "row {}: expected {} columns",
                lineno + 2,
                dim + 2
            )));
        }
        let xi: Vec<i64> = parts[..dim]
            .iter()
            .map(|p| p.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::schema(format!("row {}: {e}", lineno + 2)))?;
        let logmag = if parts[dim] == "-inf" {
            f64::NEG_INFINITY
        } else {
            parts[dim]
                .parse::<f64>()
                .map_err(|e| CliError::schema(format!("row {}: {e}", lineno + 2)))?
        };
        let phase = parts[dim + 1]
            .parse::<f64>()
            .map_err(|e| CliError::schema(format!("row {}: {e}", lineno + 2)))?;
        truncation = truncation.max(xi.iter().map(|k| k.abs()).max().unwrap_or(0));
        entries.push(Entry { xi, logmag, phase });
    }

    let mut field = SpectralField::new(dim, truncation.max(1), 0.0).map_err(core_err)?;
    for e in entries {
        if e.logmag > f64::NEG_INFINITY {
            field
                .insert(e.xi, torus_cauchy_core::LogComplex::new(e.logmag, e.phase))
                .map_err(core_err)?;
        }
    }
    let fit = field.gevrey_fit().map_err(core_err)?;
    let out = json!({
        "s_hat": fit.s_hat,
        "delta_hat": fit.delta_hat,
        "residual": fit.residual,
        "admissible": fit.admissible,
        "diagnostic": fit.diagnostic(),
    });
    serde_json::to_string_pretty(&out).map_err(|e| CliError::solver(e.to_string()))
}
