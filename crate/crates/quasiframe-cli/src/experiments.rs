//! The runnable experiments. Each one is thin orchestration: draw seeded
//! inputs, call library operations, lay the results out in a [`Table`].
//! No formulas live here.

use quasiframe::diagnostics;
use quasiframe::measurement::{
    broadcast, entropy_delta, measure_chain, measure_once, positivity_necessity_check,
    uniqueness_grid_scan, MeasParams, MeasProcess, MeterHandling,
};
use quasiframe::sampling;
use quasiframe::sic::{bloch_from_sic, chsh_from_sic, correlator_from_sic, singlet_sic, SicDist};
use quasiframe::types::tol;
use quasiframe::{oracle, ChshSettings, MeasDirection, Sign};

use crate::config::{Config, Experiment};
use crate::output::{fmt_float, Table, Value};
use crate::CliError;

/// Run the configured experiment and return its result table.
pub fn dispatch(config: &Config) -> Result<Table, CliError> {
    match config.experiment {
        Experiment::Measure => measure(config),
        Experiment::Chain => chain(config),
        Experiment::FamilyScan => family_scan(config),
        Experiment::Uniqueness => uniqueness(config),
        Experiment::Entropy => entropy(config),
        Experiment::Chsh => chsh(config),
        Experiment::Negativity => negativity(config),
        Experiment::Broadcast => broadcast_experiment(config),
        Experiment::OracleDiff => oracle_diff(config),
    }
}

fn base(config: &Config, columns: &[&str]) -> Table {
    let mut t = Table::new(columns);
    t.meta("experiment", Value::text(config.experiment.name()));
    t.meta("seed", config.seed);
    t
}

fn dir_echo(m: &MeasDirection) -> String {
    let v = m.vector();
    format!("{},{},{}", fmt_float(v.x), fmt_float(v.y), fmt_float(v.z))
}

fn beta_tag(beta: Sign) -> &'static str {
    match beta {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn require_positive(value: usize, what: &str) -> Result<usize, CliError> {
    if value == 0 {
        return Err(CliError::Usage(format!("{what} must be at least 1")));
    }
    Ok(value)
}

fn bloch_rows(t: &mut Table, prefix: &str, p: &SicDist) -> Result<(), CliError> {
    let b = bloch_from_sic(p)?.vector();
    t.row(vec![Value::text(format!("{prefix}_bloch_x")), b.x.into()]);
    t.row(vec![Value::text(format!("{prefix}_bloch_y")), b.y.into()]);
    t.row(vec![Value::text(format!("{prefix}_bloch_z")), b.z.into()]);
    Ok(())
}

/// One canonical measurement of an explicit state: outcome probabilities,
/// post-measurement register, and conditional states.
fn measure(config: &Config) -> Result<Table, CliError> {
    let spec = config.require_s()?;
    let m = config.require_m()?;
    let outcome = measure_once(&spec.register()?, &MeasProcess::canonical(m))?;

    let mut t = base(config, &["quantity", "value"]);
    t.meta("s", Value::text(spec.echo()));
    t.meta("m", Value::text(dir_echo(m)));
    t.meta("entry_tolerance", tol::ENTRY);
    t.row(vec![Value::text("p_plus"), outcome.p_plus.into()]);
    t.row(vec![Value::text("p_minus"), outcome.p_minus.into()]);
    t.row(vec![
        Value::text("meter_expectation"),
        outcome.state.meter_expectation().into(),
    ]);
    bloch_rows(&mut t, "post", &outcome.state.qubit_marginal())?;
    for beta in Sign::BOTH {
        if outcome.outcome_probability(beta) > tol::ENTRY {
            let prefix = format!("cond_{}", beta_tag(beta));
            bloch_rows(&mut t, &prefix, &outcome.conditional_qubit(beta)?)?;
        }
    }
    for index in 0..8 {
        t.row(vec![
            Value::text(format!("register_{index}")),
            outcome.state.get(index).into(),
        ]);
    }
    t.row(vec![
        Value::text("min_entry_raw"),
        outcome.min_entry_raw.into(),
    ]);
    t.row(vec![
        Value::text("clamped_entries"),
        outcome.clamped_entries.into(),
    ]);
    Ok(t)
}

/// A chain of canonical measurements with per-step positivity telemetry.
/// Directions are all `--m` when given, otherwise seeded random draws.
fn chain(config: &Config) -> Result<Table, CliError> {
    let spec = config.require_s()?;
    let k = require_positive(config.chain_len.unwrap_or(10), "chain-len")?;
    let mut rng = sampling::rng_from_seed(config.seed);
    let directions: Vec<MeasDirection> = match config.m {
        Some(m) => vec![m; k],
        None => (0..k).map(|_| sampling::random_direction(&mut rng)).collect(),
    };
    let handling = if config.reset_meter {
        MeterHandling::Reset
    } else {
        MeterHandling::Keep
    };
    let run = measure_chain(&spec.register()?, &directions, handling);

    let mut t = base(
        config,
        &["step", "dir_x", "dir_y", "dir_z", "min_entry", "clamped_entries"],
    );
    t.meta("s", Value::text(spec.echo()));
    t.meta(
        "directions",
        Value::text(match config.m {
            Some(ref m) => dir_echo(m),
            None => "random".to_string(),
        }),
    );
    t.meta("chain_len", k);
    t.meta("reset_meter", Value::text(config.reset_meter.to_string()));
    t.meta("negative_floor", tol::NEGATIVE_FLOOR);
    t.meta("worst_min_entry", run.worst_min_entry());
    t.meta(
        "all_nonnegative",
        Value::text(run.all_nonnegative().to_string()),
    );
    t.meta("final_p_plus", run.meter_probability(Sign::Plus));
    let final_bloch = bloch_from_sic(&run.qubit_marginal())?.vector();
    t.meta("final_bloch_x", final_bloch.x);
    t.meta("final_bloch_y", final_bloch.y);
    t.meta("final_bloch_z", final_bloch.z);
    for (step, dir) in run.steps.iter().zip(directions.iter()) {
        let v = dir.vector();
        t.row(vec![
            step.step.into(),
            v.x.into(),
            v.y.into(),
            v.z.into(),
            step.min_entry.into(),
            step.clamped_entries.into(),
        ]);
    }
    Ok(t)
}

/// Sample the three-parameter process family: per member, its smallest
/// entry and its distance from the canonical point. `--xyz` pins a single
/// member, otherwise parameters are seeded draws from [-3, 3]^3.
fn family_scan(config: &Config) -> Result<Table, CliError> {
    let mut rng = sampling::rng_from_seed(config.seed);
    let members: Vec<MeasParams> = match config.xyz {
        Some([x, y, z]) => vec![MeasParams::new(x, y, z)],
        None => {
            let samples = require_positive(config.samples.unwrap_or(100), "samples")?;
            (0..samples)
                .map(|_| sampling::random_params(&mut rng, -3.0, 3.0))
                .collect()
        }
    };

    let mut t = base(
        config,
        &["index", "x", "y", "z", "m_x", "m_y", "m_z", "min_entry", "residual"],
    );
    t.meta("samples", members.len());
    t.meta(
        "m",
        Value::text(match config.m {
            Some(ref m) => dir_echo(m),
            None => "random".to_string(),
        }),
    );
    t.meta("negative_floor", tol::NEGATIVE_FLOOR);
    let mut max_min_entry = f64::NEG_INFINITY;
    for (index, params) in members.iter().enumerate() {
        let m = config.m.unwrap_or_else(|| sampling::random_direction(&mut rng));
        let process = MeasProcess::new(&m, *params);
        let min_entry = process.min_entry();
        max_min_entry = max_min_entry.max(min_entry);
        let v = m.vector();
        t.row(vec![
            index.into(),
            params.x.into(),
            params.y.into(),
            params.z.into(),
            v.x.into(),
            v.y.into(),
            v.z.into(),
            min_entry.into(),
            quasiframe::measurement::uniqueness_residual(*params, &m).into(),
        ]);
    }
    t.meta("max_min_entry", max_min_entry);
    Ok(t)
}

/// Grid scan of the uniqueness residual over the parameter cube
/// [-2, 2]^3; rows are the zero set.
fn uniqueness(config: &Config) -> Result<Table, CliError> {
    let points = require_positive(config.grid.unwrap_or(41), "grid")?;
    let m = config.m_or_z();
    let zero_tol = tol::DERIVED;
    let scan = uniqueness_grid_scan(&m, -2.0, 2.0, points, zero_tol);

    let mut t = base(config, &["x", "y", "z", "residual"]);
    t.meta("m", Value::text(dir_echo(&m)));
    t.meta("grid", points);
    t.meta("cube_low", -2.0);
    t.meta("cube_high", 2.0);
    t.meta("zero_tolerance", zero_tol);
    t.meta("zero_count", scan.zeros.len());
    t.meta("min_nonzero_residual", scan.min_nonzero_residual);
    t.meta(
        "canonical_residual",
        quasiframe::measurement::uniqueness_residual(MeasParams::CANONICAL, &m),
    );
    for params in &scan.zeros {
        t.row(vec![
            params.x.into(),
            params.y.into(),
            params.z.into(),
            quasiframe::measurement::uniqueness_residual(*params, &m).into(),
        ]);
    }
    Ok(t)
}

/// Collision-entropy change of the register under one canonical
/// measurement: a single explicit (s, m) pair, or a seeded ensemble.
fn entropy(config: &Config) -> Result<Table, CliError> {
    if let Some(spec) = &config.s {
        let m = config.require_m()?;
        let report = entropy_delta(&spec.bloch()?, m);
        let mut t = base(config, &["quantity", "value"]);
        t.meta("s", Value::text(spec.echo()));
        t.meta("m", Value::text(dir_echo(m)));
        t.meta("closed_form_tolerance", tol::DERIVED);
        t.row(vec![Value::text("h2_before"), report.h2_before.into()]);
        t.row(vec![Value::text("h2_after"), report.h2_after.into()]);
        t.row(vec![Value::text("delta"), report.delta.into()]);
        t.row(vec![Value::text("closed_form"), report.closed_form.into()]);
        t.row(vec![
            Value::text("deviation"),
            (report.delta - report.closed_form).abs().into(),
        ]);
        return Ok(t);
    }

    let samples = require_positive(config.samples.unwrap_or(1000), "samples")?;
    let mut rng = sampling::rng_from_seed(config.seed);
    let mut t = base(
        config,
        &[
            "index", "s_x", "s_y", "s_z", "m_x", "m_y", "m_z", "h2_before", "h2_after", "delta",
            "closed_form",
        ],
    );
    t.meta("samples", samples);
    t.meta("closed_form_tolerance", tol::DERIVED);
    let mut max_deviation = 0.0f64;
    for index in 0..samples {
        let s = sampling::random_bloch(&mut rng);
        let m = sampling::random_direction(&mut rng);
        let report = entropy_delta(&s, &m);
        max_deviation = max_deviation.max((report.delta - report.closed_form).abs());
        let sv = s.vector();
        let mv = m.vector();
        t.row(vec![
            index.into(),
            sv.x.into(),
            sv.y.into(),
            sv.z.into(),
            mv.x.into(),
            mv.y.into(),
            mv.z.into(),
            report.h2_before.into(),
            report.h2_after.into(),
            report.delta.into(),
            report.closed_form.into(),
        ]);
    }
    t.meta("max_deviation", max_deviation);
    Ok(t)
}

/// CHSH on the singlet frame distribution, cross-checked against the
/// density-matrix route. Settings: tsirelson (default), equal, random.
fn chsh(config: &Config) -> Result<Table, CliError> {
    let p = singlet_sic();
    let rho = oracle::singlet_density();
    let name = config.settings.as_deref().unwrap_or("tsirelson");

    let mut t = base(
        config,
        &["index", "e11", "e12", "e21", "e22", "chsh_frame", "chsh_oracle", "deviation"],
    );
    t.meta("settings", Value::text(name));
    t.meta("route_tolerance", 1e-6);

    let emit = |t: &mut Table, index: usize, settings: &ChshSettings| -> Result<(), CliError> {
        let frame = chsh_from_sic(&p, settings)?;
        let oracle_value = oracle::chsh_value(&rho, settings);
        t.row(vec![
            index.into(),
            correlator_from_sic(&p, &settings.a1, &settings.b1)?.into(),
            correlator_from_sic(&p, &settings.a1, &settings.b2)?.into(),
            correlator_from_sic(&p, &settings.a2, &settings.b1)?.into(),
            correlator_from_sic(&p, &settings.a2, &settings.b2)?.into(),
            frame.into(),
            oracle_value.into(),
            (frame - oracle_value).abs().into(),
        ]);
        Ok(())
    };

    match name {
        "tsirelson" => {
            let settings = ChshSettings::tsirelson();
            t.meta("a1", Value::text(dir_echo(&settings.a1)));
            t.meta("a2", Value::text(dir_echo(&settings.a2)));
            t.meta("b1", Value::text(dir_echo(&settings.b1)));
            t.meta("b2", Value::text(dir_echo(&settings.b2)));
            emit(&mut t, 0, &settings)?;
        }
        "equal" => {
            let settings = ChshSettings::all_equal(config.m_or_z());
            t.meta("a1", Value::text(dir_echo(&settings.a1)));
            emit(&mut t, 0, &settings)?;
        }
        "random" => {
            let samples = require_positive(config.samples.unwrap_or(100), "samples")?;
            t.meta("samples", samples);
            let mut rng = sampling::rng_from_seed(config.seed);
            for index in 0..samples {
                let settings = ChshSettings {
                    a1: sampling::random_direction(&mut rng),
                    a2: sampling::random_direction(&mut rng),
                    b1: sampling::random_direction(&mut rng),
                    b2: sampling::random_direction(&mut rng),
                };
                emit(&mut t, index, &settings)?;
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown settings `{other}`; expected tsirelson, equal, or random"
            )))
        }
    }
    Ok(t)
}

/// Negativity of the canonical process: seeded random directions at unit
/// scale, plus the shrunken-direction verdicts at scales 1/3 and 1 on a
/// deterministic direction grid.
fn negativity(config: &Config) -> Result<Table, CliError> {
    let samples = require_positive(config.samples.unwrap_or(1000), "samples")?;
    let grid = require_positive(config.grid.unwrap_or(1000), "grid")?;
    let mut rng = sampling::rng_from_seed(config.seed);

    let mut t = base(
        config,
        &["kind", "index", "scale", "min_entry", "max_direction_min"],
    );
    t.meta("samples", samples);
    t.meta("grid", grid);
    t.meta("negative_floor", tol::NEGATIVE_FLOOR);

    let mut max_canonical_min = f64::NEG_INFINITY;
    for index in 0..samples {
        let m = sampling::random_direction(&mut rng);
        let min_entry = MeasProcess::canonical(&m).min_entry();
        max_canonical_min = max_canonical_min.max(min_entry);
        t.row(vec![
            Value::text("canonical"),
            index.into(),
            1.0.into(),
            min_entry.into(),
            min_entry.into(),
        ]);
    }
    t.meta("max_canonical_min_entry", max_canonical_min);

    for (index, scale) in [1.0 / 3.0, 1.0].into_iter().enumerate() {
        let verdict = positivity_necessity_check(scale, grid)?;
        t.row(vec![
            Value::text("scaled"),
            index.into(),
            verdict.scale.into(),
            verdict.min_entry.into(),
            verdict.max_direction_min.into(),
        ]);
        if index == 0 {
            t.meta(
                "nonnegative_at_one_third",
                Value::text(verdict.nonnegative_everywhere().to_string()),
            );
        } else {
            t.meta(
                "negative_at_unit_scale",
                Value::text(verdict.negative_for_every_direction().to_string()),
            );
        }
    }
    Ok(t)
}

/// Broadcast one measurement outcome to several observer bits and check
/// that the qubit-meter marginal is untouched.
fn broadcast_experiment(config: &Config) -> Result<Table, CliError> {
    let spec = config.require_s()?;
    let m = config.require_m()?;
    let observers = config.observers.unwrap_or(2);
    let outcome = broadcast(&spec.register()?, &MeasProcess::canonical(m), observers)?;

    let mut t = base(config, &["observer", "outcome_correlation"]);
    t.meta("s", Value::text(spec.echo()));
    t.meta("m", Value::text(dir_echo(m)));
    t.meta("observers", observers);
    t.meta("p_plus", outcome.measurement().p_plus);
    t.meta("p_minus", outcome.measurement().p_minus);
    let single = outcome.measurement().state.clone();
    let marginal = outcome.qubit_meter_marginal();
    let mut deviation = 0.0f64;
    for index in 0..8 {
        deviation = deviation.max((marginal.get(index) - single.get(index)).abs());
    }
    t.meta("marginal_max_deviation", deviation);
    t.meta("entry_tolerance", tol::ENTRY);
    for observer in 1..=observers {
        t.row(vec![
            observer.into(),
            outcome.observer_outcome_correlation(observer)?.into(),
        ]);
    }
    Ok(t)
}

/// Cross-validate the frame route against the density-matrix route on
/// seeded random ensembles; any category out of tolerance is an error
/// carrying the worst sample's inputs.
fn oracle_diff(config: &Config) -> Result<Table, CliError> {
    let samples = require_positive(config.samples.unwrap_or(1000), "samples")?;
    let reports = diagnostics::oracle_diff(config.seed, samples);

    let mut t = base(
        config,
        &["category", "samples", "max_deviation", "tolerance", "status"],
    );
    t.meta("samples", samples);
    for report in &reports {
        t.row(vec![
            Value::text(report.category),
            report.samples.into(),
            report.max_deviation.into(),
            report.tolerance.into(),
            Value::text(if report.passed() { "pass" } else { "fail" }),
        ]);
    }
    if let Some(worst) = reports.iter().find(|r| !r.passed()) {
        return Err(CliError::Invariant(format!(
            "category {} deviated by {} (tolerance {}); worst sample: {}",
            worst.category,
            fmt_float(worst.max_deviation),
            fmt_float(worst.tolerance),
            worst.worst_input
        )));
    }
    Ok(t)
}
