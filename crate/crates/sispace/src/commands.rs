//! The subcommands. Each writes its CSV files and returns a JSON report;
//! the caller persists the report and decides the exit code.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use sispace_core::{
    bracket, build_generator, dual_coefficients, g_minimality, gram_field, inner, l2_norm, orthogonalize,
    periodization_tail, pointwise_multiply, principal_coefficient, project_onto, project_oracle, reconstruct,
    relative_distance, weighted_norm, Complex64, CoeffSet, FiberedFunction, GeneratorKind, GeneratorSpec, OrthoSystem,
    TrigPoly,
};

use crate::config::{Command, Job, Signal};
use crate::error::CliError;
use crate::formats::{save_periodic, save_spectrum};

/// Wall-clock phases, reported separately from the deterministic output.
#[derive(Debug, Default)]
pub struct Timings(pub Vec<(String, f64)>);

impl Timings {
    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push((label.to_string(), start.elapsed().as_secs_f64()));
        out
    }

    /// Seconds per label, summed over repeats.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (label, secs) in &self.0 {
            let total = map.get(label).and_then(Value::as_f64).unwrap_or(0.0) + secs;
            map.insert(label.clone(), json!(total));
        }
        Value::Object(map)
    }
}

/// Result of a command that ran to completion.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// A check entry; `passed` is false for NaN values.
fn entry(name: &str, value: f64, tolerance: f64) -> Value {
    json!({ "name": name, "value": value, "tolerance": tolerance, "passed": value <= tolerance })
}

fn header(job: &Job, command: Command) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), json!(command));
    map.insert("grid".into(), json!({ "M": job.grid.fibers(), "K": job.grid.radius() }));
    map.insert("generators".into(), json!(job.names()));
    map.insert("tolerances".into(), json!(job.tolerances));
    map
}

fn require_signal(job: &Job, command: Command) -> Result<&Signal, CliError> {
    job.signal.as_ref().ok_or_else(|| {
        CliError::input(format!("command '{}' requires a signal in the configuration", json!(command).as_str().unwrap_or("")))
    })
}

pub fn orthogonalize_cmd(job: &Job, out: &Path, timings: &mut Timings) -> Result<Outcome, CliError> {
    let tol = &job.tolerances;
    let gens = &job.spectra;
    let scale = gram_field(gens)?.scale();
    let sys = timings.time("orthogonalize", || orthogonalize(gens, tol.zero_tol))?;
    let max_off = sys.max_offdiagonal()?;
    let defect = sys.reconstruction_defect(gens)?;
    let mut per_generator = Vec::with_capacity(sys.len());
    for k in 0..sys.len() {
        save_periodic(&out.join(format!("weight_g{}.csv", k + 1)), sys.weight(k))?;
        for j in 0..k {
            save_periodic(&out.join(format!("b_{}_{}.csv", k + 1, j + 1)), sys.coefficient_fn(k, j))?;
        }
        per_generator.push(json!({
            "name": job.generators[k].name(),
            "weight_max": sys.weight(k).max_real(),
            "weight_mean": sys.weight(k).mean().re,
            "mask_fraction": sys.zero_mask(k).fraction(),
        }));
    }
    let checks = vec![
        entry("orthogonality", ratio(max_off, scale), tol.orthogonality),
        entry("triangular_reconstruction", ratio(defect, scale), tol.reconstruction),
    ];
    let passed = all_passed(&checks);
    let mut report = header(job, Command::Orthogonalize);
    report.insert("scale".into(), json!(scale));
    report.insert("max_offdiagonal_bracket".into(), json!(max_off));
    report.insert("reconstruction_defect".into(), json!(defect));
    report.insert("masked_fraction".into(), json!(sys.masked_union().fraction()));
    report.insert("orthogonalized".into(), json!(per_generator));
    report.insert("checks".into(), json!(checks));
    report.insert("passed".into(), json!(passed));
    Ok(Outcome { passed, report: Value::Object(report) })
}

/// `‖P(Pf) − Pf‖ / ‖f‖`.
fn idempotence(f: &FiberedFunction, p: &FiberedFunction, sys: &OrthoSystem) -> Result<f64, CliError> {
    let pp = project_onto(p, sys)?;
    Ok(ratio(l2_norm(&pp.try_sub(p)?), l2_norm(f)))
}

pub fn project_cmd(job: &Job, out: &Path, timings: &mut Timings) -> Result<Outcome, CliError> {
    let tol = &job.tolerances;
    let f = &require_signal(job, Command::Project)?.f;
    let sys = timings.time("orthogonalize", || orthogonalize(&job.spectra, tol.zero_tol))?;
    let p = timings.time("project", || project_onto(f, &sys))?;
    let oracle = timings.time("oracle", || project_oracle(f, &job.spectra, tol.zero_tol))?;
    save_spectrum(&out.join("projection.csv"), &p)?;
    let checks = vec![
        entry("oracle_equivalence", relative_distance(&p, &oracle)?, tol.oracle),
        entry("projection_idempotence", idempotence(f, &p, &sys)?, tol.idempotence),
    ];
    let passed = all_passed(&checks);
    let mut report = header(job, Command::Project);
    report.insert("signal_norm".into(), json!(l2_norm(f)));
    report.insert("projection_norm".into(), json!(l2_norm(&p)));
    report.insert("distance_to_space".into(), json!(l2_norm(&f.try_sub(&p)?)));
    report.insert("checks".into(), json!(checks));
    report.insert("passed".into(), json!(passed));
    Ok(Outcome { passed, report: Value::Object(report) })
}

fn coefficients(f: &FiberedFunction, job: &Job) -> Result<CoeffSet, CliError> {
    let zero_tol = job.tolerances.zero_tol;
    Ok(match job.spectra.as_slice() {
        [phi] => principal_coefficient(f, phi, zero_tol)?,
        gens => dual_coefficients(f, gens, zero_tol)?,
    })
}

/// Largest `|m_j − T_j|` over fibers outside the masks.
fn coefficient_error(set: &CoeffSet, polys: &[TrigPoly], job: &Job) -> Result<f64, CliError> {
    let mask = set.masked_union();
    let mut max = 0.0f64;
    for (m, poly) in set.coefficients.iter().zip(polys) {
        let diff = m.try_sub(&poly.eval(&job.grid)?)?;
        for (i, v) in diff.values().iter().enumerate() {
            if !mask.contains(i) {
                max = max.max(v.norm());
            }
        }
    }
    Ok(max)
}

pub fn coeffs_cmd(job: &Job, out: &Path, timings: &mut Timings) -> Result<Outcome, CliError> {
    let tol = &job.tolerances;
    let signal = require_signal(job, Command::Coeffs)?;
    let f = &signal.f;
    let set = timings.time("coefficients", || coefficients(f, job))?;
    for j in 0..set.len() {
        save_periodic(&out.join(format!("m_{}.csv", j + 1)), &set.coefficients[j])?;
        save_periodic(&out.join(format!("w_h_{}.csv", j + 1)), &set.weights[j])?;
    }
    let rebuilt = reconstruct(&set, &job.spectra)?;
    let residual = relative_distance(&rebuilt, f)?;
    let norm = l2_norm(f);
    let gap = sispace_core::bessel_gap(f, &set);
    let passed = !signal.in_space() || residual <= tol.residual_bound;

    let mut report = header(job, Command::Coeffs);
    report.insert("in_space".into(), json!(signal.in_space()));
    report.insert("reconstruction_residual".into(), json!(residual));
    report.insert("residual_bound".into(), json!(tol.residual_bound));
    report.insert("bessel_gap".into(), json!(gap));
    report.insert("bessel_gap_relative".into(), json!(ratio(gap, norm * norm)));
    report.insert("norms".into(), json!({ "signal": norm, "coefficients": set.norms }));
    report.insert("masked_fraction".into(), json!(set.masked_union().fraction()));
    report.insert(
        "minimality".into(),
        json!(set
            .minimality
            .iter()
            .map(|v| json!({ "ratio": v.ratio, "positive_fraction": v.positive_fraction, "minimal": v.minimal }))
            .collect::<Vec<_>>()),
    );
    if let Some(polys) = &signal.polys {
        report.insert("coefficient_error".into(), json!(coefficient_error(&set, polys, job)?));
    }
    report.insert("passed".into(), json!(passed));
    Ok(Outcome { passed, report: Value::Object(report) })
}

/// Fixed probe signals: two seeded band-limited spectra filling the band.
fn probes(job: &Job) -> Result<Vec<FiberedFunction>, CliError> {
    let radius = job.grid.radius() as f64 + 0.5;
    let mut out = Vec::with_capacity(3);
    for seed in [0x5eed_0001u64, 0x5eed_0002] {
        let spec = GeneratorSpec::new("probe", GeneratorKind::BandlimitedRandom { seed, radius });
        out.push(build_generator(&spec, &job.grid)?);
    }
    if let Some(signal) = &job.signal {
        out.push(signal.f.clone());
    }
    Ok(out)
}

/// `F(t) = 1 + e^{2πit}/2 − i e^{−4πit}/4`, keeping the terms below the
/// Nyquist degree.
fn isometry_multiplier(job: &Job) -> Result<TrigPoly, CliError> {
    let terms = [(0i64, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.5, 0.0)), (-2, Complex64::new(0.0, -0.25))];
    let m = job.grid.fibers() as i64;
    Ok(TrigPoly::from_coeffs(terms.into_iter().filter(|(k, _)| 2 * k.abs() < m))?)
}

fn all_passed(entries: &[Value]) -> bool {
    entries.iter().all(|e| e["passed"] == json!(true))
}

pub fn check_cmd(job: &Job, _out: &Path, timings: &mut Timings) -> Result<Outcome, CliError> {
    let tol = &job.tolerances;
    let gens = &job.spectra;
    let gram = timings.time("gram", || gram_field(gens))?;
    let scale = gram.scale();
    let mut entries = Vec::new();

    entries.push(entry("cauchy_schwarz", ratio(gram.cauchy_schwarz_excess().max(0.0), scale * scale), tol.cauchy_schwarz));

    let mult = isometry_multiplier(job)?.eval(&job.grid)?;
    let mut iso = 0.0f64;
    for phi in gens {
        let lhs = weighted_norm(&mult, &bracket(phi, phi)?)?;
        let rhs = l2_norm(&pointwise_multiply(&mult, phi)?);
        iso = iso.max((lhs - rhs).abs());
    }
    entries.push(entry("isometry", ratio(iso, scale), tol.isometry));

    let sys = timings.time("orthogonalize", || orthogonalize(gens, tol.zero_tol))?;
    entries.push(entry("orthogonality", ratio(sys.max_offdiagonal()?, scale), tol.orthogonality));
    entries.push(entry("triangular_reconstruction", ratio(sys.reconstruction_defect(gens)?, scale), tol.reconstruction));

    let probes = probes(job)?;
    let projected = timings.time("project", || {
        probes.iter().map(|f| project_onto(f, &sys)).collect::<Result<Vec<_>, _>>()
    })?;
    let mut idem = 0.0f64;
    let mut adjoint = 0.0f64;
    let mut oracle = 0.0f64;
    for (n, (f, p)) in probes.iter().zip(&projected).enumerate() {
        idem = idem.max(idempotence(f, p, &sys)?);
        let o = timings.time("oracle", || project_oracle(f, gens, tol.zero_tol))?;
        oracle = oracle.max(relative_distance(p, &o)?);
        let (g, q) = (&probes[(n + 1) % probes.len()], &projected[(n + 1) % probes.len()]);
        let lhs = inner(p, g)?;
        let rhs = inner(f, q)?;
        adjoint = adjoint.max(ratio((lhs - rhs).norm(), l2_norm(f) * l2_norm(g)));
    }
    entries.push(entry("projection_idempotence", idem, tol.idempotence));
    entries.push(entry("projection_self_adjoint", adjoint, tol.self_adjoint));
    entries.push(entry("oracle_equivalence", oracle, tol.oracle));

    if gens.len() >= 2 {
        let verdicts = timings.time("g_minimality", || g_minimality(gens, tol.rel_tol, tol.zero_tol))?;
        let min_ratio = verdicts.iter().map(|v| v.ratio).fold(f64::INFINITY, f64::min);
        entries.push(json!({
            "name": "g_minimality",
            "value": min_ratio,
            "tolerance": tol.rel_tol,
            "verdicts": verdicts.iter().map(|v| v.minimal).collect::<Vec<_>>(),
            "passed": verdicts.iter().all(|v| v.minimal),
        }));
    }

    let mut tail = 0.0f64;
    for (g, phi) in job.generators.iter().zip(gens) {
        if let Some(spec) = g.spec() {
            let t = periodization_tail(&spec, &job.grid)?;
            let peak = bracket(phi, phi)?.try_add(&t.energy)?.max_real();
            tail = tail.max(ratio(t.bound, peak));
        }
    }
    entries.push(entry("periodization_tail", tail, tol.tail));

    if let Some(Signal { f, polys: Some(_) }) = &job.signal {
        let set = timings.time("coefficients", || coefficients(f, job))?;
        let residual = relative_distance(&reconstruct(&set, gens)?, f)?;
        entries.push(entry("coefficient_round_trip", residual, tol.residual_bound));
    }

    let passed = all_passed(&entries);
    let mut report = header(job, Command::Check);
    report.insert("scale".into(), json!(scale));
    report.insert("entries".into(), json!(entries));
    report.insert("passed".into(), json!(passed));
    Ok(Outcome { passed, report: Value::Object(report) })
}
