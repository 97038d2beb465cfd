use std::fs::File;
use std::io::{BufWriter, Write};

use qptg_core::games::{
    classical_strategy_value_dg, classical_value_mpmg, dg_baseline_strategy, doily_spec,
    hill_climb_classical, mpmg_spec, Rational, WinEngine,
};
use qptg_core::regions::{
    dg_win_bell_diagonal, dg_win_werner, export_region_points, mc_volume_ratio,
    mpmg_win_bell_diagonal, mpmg_win_werner, relative_sizes, table2, werner_pq, werner_threshold,
    write_region_points, Denominator, Family, RegionId,
};
use qptg_core::states::{bell_diagonal, werner, BellDiagParams, WernerParam};
use qptg_core::verify::run_verify;
use qptg_core::Error;
use serde_json::json;

use crate::args::{Command, FamilyArg, GameArg, OutputArgs, SamplingArgs, StateArgs};
use crate::report::Report;

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or parameters (exit 2).
    Usage(String),
    /// The computation itself failed (exit 1).
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Configuration(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

pub enum Outcome {
    Report(Report),
    /// Report plus a non-zero exit status (failed verification).
    Failed(Report),
    /// Output already written (CSV stream to stdout).
    Done,
}

fn threads(s: &SamplingArgs) -> usize {
    s.threads.unwrap_or(0)
}

fn exact(v: Rational) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

pub fn run(command: &Command, out: &OutputArgs) -> Result<Outcome, Failure> {
    let report = match command {
        Command::Winprob { game, state } => winprob(*game, state)?,
        Command::Threshold { region, family } => {
            if *family != FamilyArg::Werner {
                return Err(Failure::Compute(
                    "thresholds are defined along the Werner family only".into(),
                ));
            }
            let region = RegionId::from(*region);
            let t = werner_threshold(region)?;
            let mut r = Report::new("threshold")
                .input("family", Family::Werner.name())
                .input("region", region.name());
            r.push("f_min", t.f_min, None, "bisection");
            r.push("f_min_closed_form", t.closed_form, None, "analytic")
                .insert("expression".into(), json!(t.closed_form_expr));
            r
        }
        Command::Pq { region } => {
            let region = RegionId::from(*region);
            let pq = werner_pq(region)?;
            let mut r = Report::new("pq")
                .input("family", Family::Werner.name())
                .input("region", region.name());
            r.push("pq", pq, None, "closed-form threshold");
            r.push("p", pq / 2.0, None, "closed-form threshold");
            r
        }
        Command::Volume {
            region,
            denominator,
            family,
            sampling,
        } => {
            let region = RegionId::from(*region);
            let denominator = Denominator::from(*denominator);
            let est = mc_volume_ratio(
                region,
                denominator,
                Family::from(*family),
                sampling.samples,
                sampling.seed,
                threads(sampling),
            )?;
            let mut r = Report::new("volume")
                .input(
                    "denominator",
                    if denominator == Denominator::All {
                        "S"
                    } else {
                        "E"
                    },
                )
                .input("family", est.family.name())
                .input("region", region.name())
                .input("samples", sampling.samples)
                .input("seed", sampling.seed);
            r.push("ratio", est.mean, Some(est.stderr), "monte-carlo")
                .insert("denominator_count".into(), json!(est.denominator_count));
            r
        }
        Command::Table2 { sampling } => {
            let t = table2(sampling.samples, sampling.seed, threads(sampling))?;
            let mut r = Report::new("table2")
                .input("samples", sampling.samples)
                .input("seed", sampling.seed);
            for e in &t.entries {
                let name = format!("pq_{}_{}", e.region, e.family);
                let rec = r.push(&name, e.value, e.stderr, e.provenance);
                if let Some(a) = e.analytic {
                    rec.insert("analytic".into(), json!(a));
                }
            }
            r
        }
        Command::Ratios { sampling } => {
            let t = table2(sampling.samples, sampling.seed, threads(sampling))?;
            let mut r = Report::new("ratios")
                .input("samples", sampling.samples)
                .input("seed", sampling.seed);
            for s in relative_sizes(&t)? {
                let suffix = if s.provenance == "analytic numerator" {
                    "_analytic"
                } else {
                    ""
                };
                let name = format!("{}_over_chsh_{}{suffix}", s.region, s.family);
                r.push(&name, s.value, s.stderr, s.provenance);
            }
            r
        }
        Command::RegionsExport { region, sampling } => {
            let region = RegionId::from(*region);
            match &out.output {
                Some(path) => {
                    let members =
                        export_region_points(region, sampling.samples, sampling.seed, path)?;
                    let mut r = Report::new("regions-export")
                        .input("output", path.display().to_string())
                        .input("region", region.name())
                        .input("samples", sampling.samples)
                        .input("seed", sampling.seed);
                    r.push("members", members as f64, None, "monte-carlo");
                    emit(&r, out.format, None)?;
                    return Ok(Outcome::Done);
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut w = BufWriter::new(stdout.lock());
                    write_region_points(region, sampling.samples, sampling.seed, &mut w)
                        .and_then(|_| w.flush())
                        .map_err(|e| Failure::Compute(format!("writing to stdout: {e}")))?;
                    return Ok(Outcome::Done);
                }
            }
        }
        Command::Classical {
            game,
            restarts,
            seed,
        } => classical(*game, *restarts, *seed)?,
        Command::Verify => {
            let v = run_verify()?;
            let mut r = Report::new("verify");
            for c in &v.checks {
                let value = if c.passed { 1.0 } else { 0.0 };
                let rec = r.push(&c.name, value, None, c.anchor);
                rec.insert("passed".into(), json!(c.passed));
                rec.insert("informational".into(), json!(c.informational));
                rec.insert("expected".into(), json!(c.expected));
                rec.insert("actual".into(), json!(c.actual));
            }
            for c in v.failures() {
                eprintln!(
                    "FAILED {} [{}]: expected {}, got {}",
                    c.name, c.anchor, c.expected, c.actual
                );
            }
            if !v.all_passed() {
                return Ok(Outcome::Failed(r));
            }
            r
        }
    };
    Ok(Outcome::Report(report))
}

fn winprob(game: GameArg, state: &StateArgs) -> Result<Report, Failure> {
    let spec = match game {
        GameArg::Mpmg => mpmg_spec(),
        GameArg::Dg => doily_spec()?,
    };
    let engine = WinEngine::new(&spec)?;
    let r = Report::new("winprob").input("game", spec.kind.to_string());
    let (mut r, s, closed, tag) = match state.family {
        FamilyArg::Werner => {
            let f = state
                .fidelity
                .ok_or_else(|| Failure::Usage("--F is required for the werner family".into()))?;
            if state.a.is_some() || state.b.is_some() || state.c.is_some() {
                return Err(Failure::Usage(
                    "--a/--b/--c apply to the bell-diagonal family".into(),
                ));
            }
            let p = WernerParam::new(f)?;
            let (closed, tag) = match game {
                GameArg::Mpmg => (mpmg_win_werner(f), "closed-form:mpmg-werner-quadratic"),
                GameArg::Dg => (dg_win_werner(f), "closed-form:dg-werner-quadratic"),
            };
            (
                r.input("F", f).input("family", Family::Werner.name()),
                werner(p),
                closed,
                tag,
            )
        }
        FamilyArg::BellDiagonal => {
            let (Some(a), Some(b), Some(c)) = (state.a, state.b, state.c) else {
                return Err(Failure::Usage(
                    "--a, --b and --c are required for the bell-diagonal family".into(),
                ));
            };
            if state.fidelity.is_some() {
                return Err(Failure::Usage("--F applies to the werner family".into()));
            }
            let p = BellDiagParams::new(a, b, c)?;
            let (closed, tag) = match game {
                GameArg::Mpmg => (
                    mpmg_win_bell_diagonal(&p),
                    "closed-form:mpmg-bell-diagonal-polynomial",
                ),
                GameArg::Dg => (
                    dg_win_bell_diagonal(&p),
                    "closed-form:dg-bell-diagonal-quadratic",
                ),
            };
            let r = r
                .input("a", a)
                .input("b", b)
                .input("c", c)
                .input("family", Family::BellDiagonal.name());
            (r, bell_diagonal(p)?, closed, tag)
        }
    };
    r.push(
        "win_probability",
        engine.average_win_prob(&s),
        None,
        "projector-engine",
    );
    r.push("win_probability_closed_form", closed, None, tag);
    Ok(r)
}

fn classical(game: GameArg, restarts: Option<usize>, seed: u64) -> Result<Report, Failure> {
    let mut r = Report::new("classical");
    match game {
        GameArg::Mpmg => {
            r = r.input("game", "mpmg");
            let v = classical_value_mpmg();
            r.push("classical_value", exact(v), None, "exhaustive-search")
                .insert("exact".into(), json!(v.to_string()));
            if let Some(n) = restarts {
                r = r.input("restarts", n).input("seed", seed);
                let h = hill_climb_classical(&mpmg_spec(), n, seed);
                r.push(
                    "local_search_value",
                    exact(h.best_value()),
                    None,
                    "hill-climb",
                )
                .insert("exact".into(), json!(h.best_value().to_string()));
            }
        }
        GameArg::Dg => {
            r = r.input("game", "dg");
            let spec = doily_spec()?;
            let base = dg_baseline_strategy(&spec);
            let v = classical_strategy_value_dg(&base, &base)?;
            r.push("baseline_value", exact(v), None, "exact-rational")
                .insert("exact".into(), json!(v.to_string()));
            if let Some(n) = restarts {
                r = r.input("restarts", n).input("seed", seed);
                let h = hill_climb_classical(&spec, n, seed);
                r.push(
                    "local_search_value",
                    exact(h.best_value()),
                    None,
                    "hill-climb",
                )
                .insert("exact".into(), json!(h.best_value().to_string()));
            }
        }
    }
    Ok(r)
}

/// Writes a rendered report to `--output` or stdout.
pub fn emit(
    report: &Report,
    format: crate::args::Format,
    path: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let text = report.render(format);
    match path {
        Some(p) => File::create(p)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| Failure::Compute(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Compute(format!("writing to stdout: {e}")))
        }
    }
}
