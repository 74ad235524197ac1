//! Subcommand implementations: each builds a serializable report rendered
//! as text or JSON.

use std::collections::BTreeMap;
use std::result::Result;

use coarsedata::*;
use serde::Serialize;

use crate::formats::{self, set_key, ModelFile};
use crate::report::{fmt_sig, fmt_value, LogValue, SIG_DIGITS};
use crate::CliError;

pub enum Rendered {
    Text(String),
    Json(serde_json::Value),
}

pub fn render<T: Serialize>(report: &T, text: String, json: bool) -> Result<Rendered, CliError> {
    if json {
        Ok(Rendered::Json(serde_json::to_value(report).map_err(
            |e| CliError::Input(format!("serialization failed: {e}")),
        )?))
    } else {
        Ok(Rendered::Text(text))
    }
}

#[derive(Serialize)]
struct ViolationReport {
    set: String,
    world_a: String,
    world_b: String,
    value_a: f64,
    value_b: f64,
}

#[derive(Serialize)]
struct ConditionReport {
    condition: String,
    holds: bool,
    violations: Vec<ViolationReport>,
    excluded_sets: Vec<String>,
}

#[derive(Serialize)]
struct CheckReport {
    conditions: Vec<ConditionReport>,
}

fn condition_report(world: &World, name: &str, report: &CarReport) -> ConditionReport {
    ConditionReport {
        condition: name.to_string(),
        holds: report.holds,
        violations: report
            .violations
            .iter()
            .map(|v| ViolationReport {
                set: v.set.to_string(),
                world_a: world.label(v.world_a).to_string(),
                world_b: world.label(v.world_b).to_string(),
                value_a: v.value_a,
                value_b: v.value_b,
            })
            .collect(),
        excluded_sets: report.excluded.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn cmd_check(model: &ModelFile, tol: f64, json: bool) -> Result<Rendered, CliError> {
    let theta = model
        .theta
        .as_ref()
        .ok_or_else(|| CliError::Input("check needs a theta entry in the model file".into()))?;
    let lambda = model
        .lambda
        .as_ref()
        .ok_or_else(|| CliError::Input("check needs a lambda entry in the model file".into()))?;
    let world = &model.world;
    let report = CheckReport {
        conditions: vec![
            condition_report(world, "w-car", &is_wcar(theta, lambda, tol)?),
            condition_report(world, "s-car", &is_scar(lambda, tol)),
            condition_report(world, "fair-evidence", &fair_evidence(theta, lambda, tol)?),
        ],
    };
    let mut text = String::new();
    for c in &report.conditions {
        text.push_str(&format!(
            "{:<14} {}\n",
            format!("{}:", c.condition),
            if c.holds { "yes" } else { "no" }
        ));
        for v in &c.violations {
            text.push_str(&format!(
                "  {}: lambda({}) = {} differs from lambda({}) = {}\n",
                v.set,
                v.world_a,
                fmt_value(v.value_a),
                v.world_b,
                fmt_value(v.value_b)
            ));
        }
        if !c.excluded_sets.is_empty() {
            text.push_str(&format!(
                "  (zero-probability sets excluded: {})\n",
                c.excluded_sets.join(", ")
            ));
        }
    }
    render(&report, text, json)
}

#[derive(Serialize)]
struct ThetaEntry {
    world: String,
    prob: f64,
}

#[derive(Serialize)]
struct FactorSummary {
    class: String,
    support: Option<String>,
    factor: LogValue,
}

#[derive(Serialize)]
struct MaximumReport {
    theta: Vec<ThetaEntry>,
    params: Option<Vec<f64>>,
    support: String,
    face_value: LogValue,
    c_factor: Option<FactorSummary>,
    profile: Option<LogValue>,
    converged: bool,
    iterations: usize,
    stationarity_residual: f64,
}

#[derive(Serialize)]
struct FitReport {
    class: String,
    model: String,
    maxima: Vec<MaximumReport>,
}

fn theta_entries(theta: &CompleteDistribution) -> Vec<ThetaEntry> {
    theta
        .world()
        .labels()
        .iter()
        .zip(theta.probs())
        .map(|(l, &p)| ThetaEntry {
            world: l.clone(),
            prob: p,
        })
        .collect()
}

fn maximum_report(
    sample: &ObservedSample,
    fit: &FitResult,
    factor: Option<(&str, Option<CoarseSet>, LogLikelihood)>,
) -> Result<MaximumReport, CliError> {
    let face_value = log_lfv(&fit.theta, sample)?;
    let (c_factor, profile) = match factor {
        None => (None, None),
        Some((class, support, value)) => (
            Some(FactorSummary {
                class: class.to_string(),
                support: support.map(|s| s.to_string()),
                factor: value.into(),
            }),
            Some(LogValue::new(value.value() + face_value.value())),
        ),
    };
    Ok(MaximumReport {
        theta: theta_entries(&fit.theta),
        params: fit.params.clone(),
        support: fit.stratum.to_string(),
        face_value: face_value.into(),
        c_factor,
        profile,
        converged: fit.converged,
        iterations: fit.iterations,
        stationarity_residual: fit.stationarity_residual,
    })
}

fn render_maximum(out: &mut String, index: usize, m: &MaximumReport) {
    out.push_str(&format!("-- maximum {}\n", index + 1));
    let theta_line: Vec<String> = m
        .theta
        .iter()
        .map(|t| format!("{}={}", t.world, fmt_value(t.prob)))
        .collect();
    out.push_str(&format!("theta: {}\n", theta_line.join(" ")));
    if let Some(params) = &m.params {
        let rendered: Vec<String> = params.iter().map(|&p| fmt_value(p)).collect();
        out.push_str(&format!("params: ({})\n", rendered.join(", ")));
    }
    out.push_str(&format!("support: {}\n", m.support));
    out.push_str(&format!("face-value: {}\n", m.face_value.render()));
    if let Some(f) = &m.c_factor {
        out.push_str(&format!(
            "c-factor ({}{}): {}\n",
            f.class,
            f.support
                .as_ref()
                .map(|s| format!(", {s}"))
                .unwrap_or_default(),
            f.factor.render()
        ));
    }
    if let Some(p) = &m.profile {
        out.push_str(&format!("profile: {}\n", p.render()));
    }
    out.push_str(&format!(
        "converged: {}  iterations: {}  residual: {}\n",
        m.converged,
        m.iterations,
        fmt_sig(m.stationarity_residual, 3)
    ));
}

pub struct FitArgs {
    pub class: String,
    pub model: Option<String>,
    pub support: Option<String>,
    pub all_maxima: bool,
    pub grid_steps: usize,
    pub max_iter: Option<usize>,
}

pub fn cmd_fit(sample: &ObservedSample, args: &FitArgs, json: bool) -> Result<Rendered, CliError> {
    let world = sample.world();
    let opts = EmOptions {
        max_iter: args.max_iter.unwrap_or(EmOptions::default().max_iter),
        ..EmOptions::default()
    };
    let support = args
        .support
        .as_ref()
        .map(|s| {
            let labels: Vec<&str> = s.split(',').map(str::trim).collect();
            world
                .set_from_labels(&labels)
                .map_err(|e| CliError::Input(format!("--support: {e}")))
        })
        .transpose()?;
    let model_name = args.model.clone().unwrap_or_else(|| "saturated".into());
    let model = formats::parse_model_flag(world, &model_name)?;

    // Face-value maximization shared by the fv and scar classes.
    let fv_fit = |sample: &ObservedSample| -> Result<FitResult, CliError> {
        match (&support, &model) {
            (Some(v), _) => Ok(em_fv(sample, v, None, opts)?),
            (None, CompleteDataModel::Saturated { .. }) => {
                Ok(em_fv(sample, &world.full_set(), None, opts)?)
            }
            (None, CompleteDataModel::FixedSupport { support }) => {
                Ok(em_fv(sample, support, None, opts)?)
            }
            (None, CompleteDataModel::PairedBinary { .. }) => {
                Ok(mle_fv_parametric(&model, sample, args.grid_steps)?)
            }
        }
    };

    let maxima: Vec<MaximumReport> = match args.class.as_str() {
        "fv" => {
            let fit = fv_fit(sample)?;
            vec![maximum_report(sample, &fit, None)?]
        }
        "scar" => {
            let fit = fv_fit(sample)?;
            let factor = c_scar(sample);
            vec![maximum_report(
                sample,
                &fit,
                Some(("s-car", None, factor.log_value)),
            )?]
        }
        "wcar" => match (&support, &model) {
            (Some(v), _) | (None, CompleteDataModel::FixedSupport { support: v }) => {
                let fit = em_fv(sample, v, None, opts)?;
                let factor = c_wcar(v, sample)?;
                vec![maximum_report(
                    sample,
                    &fit,
                    Some(("w-car", Some(v.clone()), factor.log_value)),
                )?]
            }
            (None, CompleteDataModel::Saturated { .. }) => {
                let fits = profile_wcar_maxima(sample, None)?;
                if fits.is_empty() {
                    return Err(CliError::Numerical(
                        "no support-exact profile maxima found".into(),
                    ));
                }
                let take = if args.all_maxima { fits.len() } else { 1 };
                fits.iter()
                    .take(take)
                    .map(|fit| {
                        let factor = c_wcar(&fit.stratum, sample)?;
                        maximum_report(
                            sample,
                            fit,
                            Some(("w-car", Some(fit.stratum.clone()), factor.log_value)),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            (None, CompleteDataModel::PairedBinary { .. }) => {
                let scan = profile_wcar_parametric(&model, sample)?;
                let factor = c_wcar(&scan.argmax.stratum, sample)?;
                vec![maximum_report(
                    sample,
                    &scan.argmax,
                    Some(("w-car", Some(scan.argmax.stratum.clone()), factor.log_value)),
                )?]
            }
        },
        other => {
            return Err(CliError::Input(format!(
                "--class must be fv, wcar or scar (got {other:?})"
            )))
        }
    };

    if let Some(bad) = maxima.iter().find(|m| !m.converged) {
        return Err(CliError::Numerical(format!(
            "fit did not converge (residual {})",
            fmt_sig(bad.stationarity_residual, 3)
        )));
    }

    let report = FitReport {
        class: args.class.clone(),
        model: model_name,
        maxima,
    };
    let mut text = format!(
        "class: {}  model: {}\nmaxima: {}\n",
        report.class,
        report.model,
        report.maxima.len()
    );
    for (i, m) in report.maxima.iter().enumerate() {
        render_maximum(&mut text, i, m);
    }
    render(&report, text, json)
}

#[derive(Serialize)]
struct ProfileRow {
    theta: Vec<ThetaEntry>,
    support: String,
    face_value: LogValue,
    c_wcar: LogValue,
    profile_wcar: LogValue,
    c_scar: LogValue,
    profile_scar: LogValue,
}

#[derive(Serialize)]
struct ProfileReport {
    rows: Vec<ProfileRow>,
}

pub fn cmd_profile_thetas(
    sample: &ObservedSample,
    thetas: &[CompleteDistribution],
    json: bool,
) -> Result<Rendered, CliError> {
    let scar_factor = c_scar(sample).log_value;
    let mut rows = Vec::new();
    for theta in thetas {
        let face = log_lfv(theta, sample)?;
        let wcar_factor = c_wcar(&theta.support(), sample)?.log_value;
        rows.push(ProfileRow {
            theta: theta_entries(theta),
            support: theta.support().to_string(),
            face_value: face.into(),
            c_wcar: wcar_factor.into(),
            profile_wcar: log_profile(theta, sample, CoarseningClass::WCar)?.into(),
            c_scar: scar_factor.into(),
            profile_scar: log_profile(theta, sample, CoarseningClass::SCar)?.into(),
        });
    }
    let report = ProfileReport { rows };
    let mut text = String::new();
    for (i, row) in report.rows.iter().enumerate() {
        let theta_line: Vec<String> = row
            .theta
            .iter()
            .map(|t| format!("{}={}", t.world, fmt_value(t.prob)))
            .collect();
        text.push_str(&format!("-- theta {} ({})\n", i + 1, theta_line.join(" ")));
        text.push_str(&format!("support:        {}\n", row.support));
        text.push_str(&format!("face-value:     {}\n", row.face_value.render()));
        text.push_str(&format!("c-factor w-car: {}\n", row.c_wcar.render()));
        text.push_str(&format!("profile w-car:  {}\n", row.profile_wcar.render()));
        text.push_str(&format!("c-factor s-car: {}\n", row.c_scar.render()));
        text.push_str(&format!("profile s-car:  {}\n", row.profile_scar.render()));
    }
    render(&report, text, json)
}

#[derive(Serialize)]
struct StratumRow {
    support: String,
    region: String,
    params: Option<Vec<f64>>,
    face_value: Option<LogValue>,
    c_factor: LogValue,
    profile: LogValue,
    support_attained: bool,
}

#[derive(Serialize)]
struct Discontinuity {
    smaller_support: String,
    larger_support: String,
    factor_ratio: f64,
}

#[derive(Serialize)]
struct GridReport {
    grid_step: f64,
    rows: Vec<StratumRow>,
    argmax: MaximumReport,
    discontinuities: Vec<Discontinuity>,
}

fn region_string(region: &StratumRegion) -> String {
    match region {
        StratumRegion::SupportExactly => "support-exactly".to_string(),
        StratumRegion::ParamBox(axes) => {
            let parts: Vec<String> = axes
                .iter()
                .enumerate()
                .map(|(i, a)| match a {
                    AxisRange::Open01 => format!("0<p{}<1", i + 1),
                    AxisRange::Fixed(v) => format!("p{}={}", i + 1, v),
                })
                .collect();
            parts.join(", ")
        }
    }
}

pub fn cmd_profile_grid(
    sample: &ObservedSample,
    model_name: &str,
    grid_step: f64,
    json: bool,
) -> Result<Rendered, CliError> {
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(CliError::Input("--grid-step must be in (0, 1)".into()));
    }
    let model = formats::parse_model_flag(sample.world(), model_name)?;
    let scan = profile_wcar_parametric(&model, sample)?;
    let rows: Vec<StratumRow> = scan
        .rows
        .iter()
        .map(|r| StratumRow {
            support: r.stratum.support.to_string(),
            region: region_string(&r.stratum.region),
            params: r.fit.as_ref().and_then(|f| f.params.clone()),
            face_value: r
                .fit
                .as_ref()
                .map(|f| LogValue::new(f.log_likelihood.value())),
            c_factor: r.c_factor.into(),
            profile: r.profile.into(),
            support_attained: r.support_attained,
        })
        .collect();
    // Factor jumps across nested attained strata: the profile is
    // discontinuous at their boundary.
    let attained: Vec<&StratumProfile> = scan.rows.iter().filter(|r| r.support_attained).collect();
    let mut discontinuities = Vec::new();
    for a in &attained {
        for b in &attained {
            if a.stratum.support != b.stratum.support
                && a.stratum.support.is_subset_of(&b.stratum.support)
                && a.c_factor.is_finite()
                && b.c_factor.is_finite()
            {
                discontinuities.push(Discontinuity {
                    smaller_support: a.stratum.support.to_string(),
                    larger_support: b.stratum.support.to_string(),
                    factor_ratio: (a.c_factor.value() - b.c_factor.value()).exp(),
                });
            }
        }
    }
    let factor = c_wcar(&scan.argmax.stratum, sample)?;
    let argmax = maximum_report(
        sample,
        &scan.argmax,
        Some(("w-car", Some(scan.argmax.stratum.clone()), factor.log_value)),
    )?;
    let report = GridReport {
        grid_step,
        rows,
        argmax,
        discontinuities,
    };
    let mut text = String::new();
    for row in &report.rows {
        text.push_str(&format!(
            "stratum {} [{}]: profile {}{}\n",
            row.support,
            row.region,
            row.profile.render(),
            if row.support_attained || row.face_value.is_none() {
                ""
            } else {
                " (supremum not attained)"
            }
        ));
        if let Some(params) = &row.params {
            let rendered: Vec<String> = params.iter().map(|&p| fmt_value(p)).collect();
            text.push_str(&format!("  max at params ({})\n", rendered.join(", ")));
        }
    }
    for d in &report.discontinuities {
        text.push_str(&format!(
            "discontinuity at boundary {} | {}: factor ratio {}\n",
            d.smaller_support,
            d.larger_support,
            fmt_value(d.factor_ratio)
        ));
    }
    text.push_str("-- profile argmax\n");
    render_maximum(&mut text, 0, &report.argmax);
    render(&report, text, json)
}

#[derive(Serialize)]
struct WitnessRow {
    world: String,
    lambdas: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct CompatCheck {
    class: String,
    compatible: bool,
    world_sums: Option<Vec<f64>>,
    witness: Option<Vec<WitnessRow>>,
    violating_worlds: Option<String>,
    obstruction: Option<String>,
}

#[derive(Serialize)]
struct CompatReport {
    theta: Vec<ThetaEntry>,
    checks: Vec<CompatCheck>,
}

fn witness_rows(kernel: &CoarseningKernel) -> Vec<WitnessRow> {
    let world = kernel.world();
    (0..world.n())
        .map(|w| WitnessRow {
            world: world.label(w).to_string(),
            lambdas: kernel
                .row(w)
                .filter(|(_, p)| *p > 0.0)
                .map(|(set, p)| (set_key(&set), p))
                .collect(),
        })
        .collect()
}

pub fn cmd_compat(
    sample: &ObservedSample,
    theta: &CompleteDistribution,
    class: &str,
    tol: f64,
    json: bool,
) -> Result<Rendered, CliError> {
    let mut checks = Vec::new();
    if class == "all" || class == "sat" {
        let res = is_compatible(sample, theta, tol)?;
        checks.push(CompatCheck {
            class: "saturated".into(),
            compatible: res.compatible,
            world_sums: None,
            witness: res.witness.as_ref().map(witness_rows),
            violating_worlds: res.violating_worlds.map(|s| s.to_string()),
            obstruction: None,
        });
    }
    if class == "all" || class == "wcar" {
        let res = is_wcar_compatible(sample, theta, tol)?;
        checks.push(CompatCheck {
            class: "w-car".into(),
            compatible: res.compatible,
            world_sums: Some(res.world_sums),
            witness: None,
            violating_worlds: None,
            obstruction: res
                .zero_probability_set
                .map(|s| format!("observed set {s} has probability zero")),
        });
    }
    if class == "all" || class == "scar" {
        let res = is_scar_compatible(sample, theta, tol)?;
        checks.push(CompatCheck {
            class: "s-car".into(),
            compatible: res.compatible,
            world_sums: Some(res.world_sums),
            witness: res.witness.as_ref().map(witness_rows),
            violating_worlds: None,
            obstruction: res.obstruction.map(|o| format!("{o:?}")),
        });
    }
    if checks.is_empty() {
        return Err(CliError::Input(format!(
            "--class must be sat, wcar, scar or all (got {class:?})"
        )));
    }
    let report = CompatReport {
        theta: theta_entries(theta),
        checks,
    };
    let mut text = String::new();
    for c in &report.checks {
        text.push_str(&format!(
            "{:<10} {}\n",
            format!("{}:", c.class),
            if c.compatible {
                "compatible"
            } else {
                "incompatible"
            }
        ));
        if let Some(sums) = &c.world_sums {
            let rendered: Vec<String> = theta
                .world()
                .labels()
                .iter()
                .zip(sums)
                .map(|(l, &s)| format!("{l}: {}", fmt_value(s)))
                .collect();
            text.push_str(&format!("  world sums: {}\n", rendered.join("  ")));
        }
        if let Some(v) = &c.violating_worlds {
            text.push_str(&format!("  violated subset: {v}\n"));
        }
        if let Some(o) = &c.obstruction {
            text.push_str(&format!("  obstruction: {o}\n"));
        }
        if let Some(rows) = &c.witness {
            text.push_str("  witness:\n");
            for row in rows {
                let entries: Vec<String> = row
                    .lambdas
                    .iter()
                    .map(|(k, &v)| format!("{k}: {}", fmt_value(v)))
                    .collect();
                text.push_str(&format!("    {} -> {}\n", row.world, entries.join(", ")));
            }
        }
    }
    render(&report, text, json)
}

#[derive(Serialize)]
struct BindingReport {
    world: String,
    sum: f64,
    forced_equality: bool,
    active: bool,
    slack_set: Option<String>,
}

#[derive(Serialize)]
struct CFactorReport {
    class: String,
    support: Option<String>,
    factor: LogValue,
    lambda: BTreeMap<String, f64>,
    bindings: Vec<BindingReport>,
    kkt_residual: f64,
    method: String,
    disjoint_set: Option<String>,
}

pub fn cmd_cfactor(
    sample: &ObservedSample,
    support: Option<&CoarseSet>,
    json: bool,
) -> Result<Rendered, CliError> {
    let world = sample.world();
    let (class, support_name, result) = match support {
        Some(v) => ("w-car", Some(v.to_string()), c_wcar(v, sample)?),
        None => ("s-car", None, c_scar(sample)),
    };
    let report = CFactorReport {
        class: class.to_string(),
        support: support_name,
        factor: result.log_value.into(),
        lambda: result
            .lambda
            .iter()
            .map(|(set, &l)| (set_key(set), l))
            .collect(),
        bindings: result
            .bindings
            .iter()
            .map(|b| BindingReport {
                world: world.label(b.world).to_string(),
                sum: b.sum,
                forced_equality: b.forced_equality,
                active: b.active,
                slack_set: b.slack_set.as_ref().map(|s| s.to_string()),
            })
            .collect(),
        kkt_residual: result.kkt_residual,
        method: format!("{:?}", result.method),
        disjoint_set: result.disjoint_set.map(|s| s.to_string()),
    };
    let mut text = format!(
        "c-factor ({}{}): {}\n",
        report.class,
        report
            .support
            .as_ref()
            .map(|s| format!(", {s}"))
            .unwrap_or_default(),
        report.factor.render()
    );
    if let Some(d) = &report.disjoint_set {
        text.push_str(&format!(
            "observed set {d} is disjoint from the support; face value vanishes there\n"
        ));
    }
    for (key, &l) in &report.lambda {
        text.push_str(&format!("lambda[{key}] = {}\n", fmt_value(l)));
    }
    for b in &report.bindings {
        text.push_str(&format!(
            "world {}: sum {}{}{}{}\n",
            b.world,
            fmt_value(b.sum),
            if b.active { " (active)" } else { "" },
            if b.forced_equality {
                " (forced equality)"
            } else {
                ""
            },
            b.slack_set
                .as_ref()
                .map(|s| format!(" slack via {s}"))
                .unwrap_or_default()
        ));
    }
    text.push_str(&format!(
        "kkt residual: {}  method: {}\n",
        fmt_sig(report.kkt_residual, 3),
        report.method
    ));
    render(&report, text, json)
}

#[derive(Serialize)]
struct HullReport {
    orderings_tried: usize,
    extremes: Vec<Vec<ThetaEntry>>,
}

pub fn cmd_hull(sample: &ObservedSample, json: bool) -> Result<Rendered, CliError> {
    let hull = dempster_extremes(sample)?;
    let report = HullReport {
        orderings_tried: hull.orderings_tried,
        extremes: hull.extremes.iter().map(theta_entries).collect(),
    };
    let mut text = format!(
        "orderings tried: {}\nextreme points: {}\n",
        report.orderings_tried,
        report.extremes.len()
    );
    for (i, e) in report.extremes.iter().enumerate() {
        let line: Vec<String> = e
            .iter()
            .map(|t| format!("{}={}", t.world, fmt_value(t.prob)))
            .collect();
        text.push_str(&format!("{}: {}\n", i + 1, line.join(" ")));
    }
    render(&report, text, json)
}

#[derive(Serialize)]
struct ScarTestReport {
    model: String,
    statistic: f64,
    sup_saturated_log: f64,
    sup_scar_log: f64,
}

pub fn cmd_scar_test(
    sample: &ObservedSample,
    model_name: &str,
    json: bool,
) -> Result<Rendered, CliError> {
    let model = formats::parse_model_flag(sample.world(), model_name)?;
    let lrt = lrt_scar(&model, sample)?;
    let report = ScarTestReport {
        model: model_name.to_string(),
        statistic: lrt.statistic,
        sup_saturated_log: lrt.sup_saturated.value(),
        sup_scar_log: lrt.sup_scar.value(),
    };
    let text = format!(
        "model: {}\nstatistic: {}\nsup log-likelihood (unrestricted): {}\n\
         sup log-likelihood (s-car): {}\nnote: no reference distribution is attached\n",
        report.model,
        fmt_value(report.statistic),
        fmt_sig(report.sup_saturated_log, SIG_DIGITS),
        fmt_sig(report.sup_scar_log, SIG_DIGITS),
    );
    render(&report, text, json)
}
