//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use qptg_core::games::{
    classical_strategy_value_dg, classical_value_mpmg, dg_baseline_strategy, doily_spec,
    line_projector, mpmg_spec, GameSpec, OutcomeTriple, Rational, WinEngine,
};
use qptg_core::linalg::ComplexMatrix;
use qptg_core::regions::{
    dg_bell_diagonal_pq_analytic, dg_win_bell_diagonal, dg_win_werner, member, mpmg_boundary_check,
    mpmg_win_bell_diagonal, mpmg_win_werner, printed_dg_werner_polynomial, table2, werner_pq,
    werner_threshold, Family, RegionId, SampleStream, StateParams,
};
use qptg_core::states::{bell_diagonal, werner, BellDiagParams, WernerParam};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn engines() -> Result<(WinEngine, WinEngine), String> {
    Ok((
        WinEngine::new(&mpmg_spec()).map_err(err)?,
        WinEngine::new(&doily_spec().map_err(err)?).map_err(err)?,
    ))
}

fn simplex_grid() -> Vec<BellDiagParams> {
    let mut out = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            for k in 0..20 {
                let (a, b, c) = (i as f64 / 19.0, j as f64 / 19.0, k as f64 / 19.0);
                if i + j + k <= 19 {
                    out.push(BellDiagParams { a, b, c });
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (m, d) = engines()?;
    let s = bell_diagonal(BellDiagParams::new(1.0, 0.0, 0.0).map_err(err)?).map_err(err)?;
    let (wm, wd) = (m.average_win_prob(&s), d.average_win_prob(&s));
    let elapsed = start.elapsed();
    check(
        (wm - 1.0).abs() <= 1e-12 && (wd - 1.0).abs() <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("mpmg {wm}, dg {wd}, {:.3} s", elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let (m, _) = engines()?;
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let f = i as f64 / 10.0;
        let s = werner(WernerParam::new(f).map_err(err)?);
        worst = worst.max((m.average_win_prob(&s) - mpmg_win_werner(f)).abs());
    }
    check(
        worst <= 1e-10,
        format!("max |Δ| = {worst:.2e} over 11 points"),
    )
}

fn grid_check(game: &str, poly: fn(&BellDiagParams) -> f64) -> Outcome {
    let start = Instant::now();
    let (m, d) = engines()?;
    let engine = if game == "mpmg" { m } else { d };
    let grid = simplex_grid();
    let mut worst: f64 = 0.0;
    for p in &grid {
        let s = bell_diagonal(*p).map_err(err)?;
        worst = worst.max((engine.average_win_prob(&s) - poly(p)).abs());
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && elapsed < Duration::from_secs(30),
        format!(
            "max |Δ| = {worst:.2e} over {} grid points, {:.2} s",
            grid.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    grid_check("mpmg", mpmg_win_bell_diagonal)
}

fn criterion_4() -> Outcome {
    grid_check("dg", dg_win_bell_diagonal)
}

fn criterion_5() -> Outcome {
    let (_, d) = engines()?;
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let f = i as f64 / 100.0;
        let s = werner(WernerParam::new(f).map_err(err)?);
        worst = worst.max((d.average_win_prob(&s) - dg_win_werner(f)).abs());
    }
    let t = werner_threshold(RegionId::Dg).map_err(err)?;
    let target = 3f64.sqrt() / 2.0;
    let deviation = (printed_dg_werner_polynomial(0.7) - dg_win_werner(0.7)).abs();
    check(
        worst <= 1e-10 && (t.f_min - target).abs() <= 1e-9,
        format!(
            "engine vs (8F²+7)/15 max |Δ| = {worst:.2e}; F_min = {:.12}; \
             [informational] printed polynomial 2F²/21+F/7+16/21 deviates by {deviation:.4} at F = 0.7, \
             inconsistent with threshold √3/2",
            t.f_min
        ),
    )
}

fn criterion_6() -> Outcome {
    let expected = [
        (RegionId::Mpmg, (3.0 * 39f64.sqrt() - 1.0) / 20.0),
        (RegionId::Dg, 3f64.sqrt() / 2.0),
        (RegionId::Chsh, (2.0 + 3.0 * 2f64.sqrt()) / 8.0),
        (RegionId::Cg, 17.0 / 20.0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (region, value) in expected {
        let t = werner_threshold(region).map_err(err)?;
        ok &= (t.f_min - value).abs() <= 1e-9;
        parts.push(format!("{region} {:.10}", t.f_min));
    }
    check(ok, parts.join(", "))
}

/// Rounds to 4 decimals, then to 3 with ties to even.
fn three_decimals_via_four(x: f64) -> i64 {
    let n4 = (x * 1e4).round() as i64;
    let (q, r) = (n4 / 10, n4 % 10);
    match r {
        0..=4 => q,
        5 if q % 2 == 0 => q,
        _ => q + 1,
    }
}

fn criterion_7() -> Outcome {
    let printed4 = [0.2265, 0.2679, 0.4393, 0.3000];
    let printed3 = [226, 268, 439, 300];
    let regions = [RegionId::Mpmg, RegionId::Dg, RegionId::Chsh, RegionId::Cg];
    let mut ok = true;
    let mut parts = Vec::new();
    for ((region, p4), p3) in regions.iter().zip(printed4).zip(printed3) {
        let pq = werner_pq(*region).map_err(err)?;
        ok &= (pq - p4).abs() < 5e-5 && three_decimals_via_four(pq) == p3;
        parts.push(format!("{region} {pq:.4}"));
    }
    let chsh = werner_pq(RegionId::Chsh).map_err(err)?;
    for (region, ratio) in [
        (RegionId::Mpmg, 0.515),
        (RegionId::Dg, 0.610),
        (RegionId::Cg, 0.683),
    ] {
        let r = werner_pq(region).map_err(err)? / chsh;
        ok &= (r - ratio).abs() <= 1e-3;
        parts.push(format!("{region}/chsh {r:.3}"));
    }
    check(ok, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mpmg = classical_value_mpmg();
    let spec = doily_spec().map_err(err)?;
    let base = dg_baseline_strategy(&spec);
    let dg = classical_strategy_value_dg(&base, &base).map_err(err)?;
    let elapsed = start.elapsed();
    check(
        mpmg == Rational::new(8, 9)
            && dg == Rational::new(13, 15)
            && elapsed < Duration::from_secs(10),
        format!(
            "mpmg {mpmg}, dg baseline {dg}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let t = table2(10_000_000, 42, 0).map_err(err)?;
    let elapsed = start.elapsed();
    let get = |r| t.get(r, Family::BellDiagonal).expect("row present").clone();
    let (chsh, cg, mpmg, dg) = (
        get(RegionId::Chsh),
        get(RegionId::Cg),
        get(RegionId::Mpmg),
        get(RegionId::Dg),
    );
    let analytic = dg_bell_diagonal_pq_analytic();
    let dg_se = dg.stderr.unwrap_or(0.0);
    let ok = (chsh.value - 0.175).abs() <= 0.005
        && (cg.value - 0.073).abs() <= 0.005
        && (mpmg.value - 0.003).abs() <= 0.001
        && (dg.value - analytic).abs() <= 3.0 * dg_se
        && (0.0035..=0.0055).contains(&dg.value)
        && elapsed < Duration::from_secs(120);
    check(
        ok,
        format!(
            "chsh {:.5}, cg {:.5}, mpmg {:.5}, dg {:.5} ± {:.5} (analytic {analytic:.5}; printed 0.004 differs), {:.1} s",
            chsh.value,
            cg.value,
            mpmg.value,
            dg.value,
            dg_se,
            elapsed.as_secs_f64()
        ),
    )
}

fn is_zero(m: &ComplexMatrix) -> bool {
    m.max_abs() <= 1e-12
}

fn line_properties(spec: &GameSpec) -> Result<usize, String> {
    let id = ComplexMatrix::identity(4);
    let mut checked = 0;
    for line in &spec.lines {
        let obs = line.points.map(|p| spec.points[p]);
        let projectors: Vec<(OutcomeTriple, ComplexMatrix)> = OutcomeTriple::all()
            .map(|t| line_projector(&obs, t).map(|p| (t, p)))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mut sum = ComplexMatrix::zeros(4);
        for (t, p) in &projectors {
            if t.product() != line.parity {
                if !is_zero(p) {
                    return Err(format!("parity-violating projector nonzero on {line:?}"));
                }
                continue;
            }
            if (&(p * p) - p).max_abs() > 1e-12 {
                return Err(format!("projector not idempotent on {line:?}"));
            }
            for (u, q) in &projectors {
                if u != t && !is_zero(&(p * q)) {
                    return Err(format!("projectors not orthogonal on {line:?}"));
                }
            }
            sum = &sum + p;
        }
        if (&sum - &id).max_abs() > 1e-12 {
            return Err(format!("projectors incomplete on {line:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

fn criterion_10() -> Outcome {
    let mpmg = mpmg_spec();
    let dg = doily_spec().map_err(err)?;
    let lines = line_properties(&mpmg)? + line_properties(&dg)?;

    let negative: BTreeSet<BTreeSet<String>> = dg
        .lines
        .iter()
        .filter(|l| l.parity.value() < 0)
        .map(|l| {
            l.points
                .iter()
                .map(|&p| dg.points[p].unsigned().to_string())
                .collect()
        })
        .collect();
    let red: BTreeSet<BTreeSet<String>> =
        [["ZZ", "XX", "YY"], ["ZX", "XY", "YZ"], ["YX", "ZY", "XZ"]]
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect();
    let doily_ok = dg.points.len() == 15 && dg.lines.len() == 15 && negative == red;

    let mut off_line_pairs = 0;
    let mut off_line_ok = true;
    for i in 0..mpmg.points.len() {
        for j in (i + 1)..mpmg.points.len() {
            let shared = mpmg
                .lines
                .iter()
                .any(|l| l.points.contains(&i) && l.points.contains(&j));
            if !shared {
                off_line_pairs += 1;
                off_line_ok &= !mpmg.points[i].commutes_with(&mpmg.points[j]);
            }
        }
    }
    check(
        doily_ok && off_line_ok,
        format!(
            "{lines} lines pass projector algebra; doily {} points / {} lines / {} negative lines; {off_line_pairs} off-line mpmg pairs anticommute: {off_line_ok}",
            dg.points.len(),
            dg.lines.len(),
            negative.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let order: Vec<f64> = [RegionId::Chsh, RegionId::Cg, RegionId::Dg, RegionId::Mpmg]
        .into_iter()
        .map(|r| werner_threshold(r).map(|t| t.f_min))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let werner_ok = order.windows(2).all(|w| w[0] < w[1]);
    let chain = [
        RegionId::Mpmg,
        RegionId::Dg,
        RegionId::Cg,
        RegionId::Chsh,
        RegionId::Ent,
    ];
    let mut counterexamples = 0u64;
    for p in SampleStream::new(Family::BellDiagonal, 42).points(0, 1_000_000) {
        let state = StateParams::BellDiagonal(p);
        let m: Vec<bool> = chain
            .iter()
            .map(|r| member(*r, &state))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        counterexamples += m.windows(2).filter(|w| w[0] && !w[1]).count() as u64;
    }
    check(
        werner_ok && counterexamples == 0,
        format!("werner thresholds ordered: {werner_ok}; {counterexamples} counterexamples in 10⁶ samples"),
    )
}

fn criterion_12() -> Outcome {
    let r = mpmg_boundary_check(12).map_err(err)?;
    check(
        r.boundary_points >= 100 && r.max_deviation <= 1e-9 && r.passed(1e-9),
        format!(
            "max |w - 8/9| = {:.2e} over {} boundary points; {} interior points, {} failures",
            r.max_deviation, r.boundary_points, r.interior_points, r.interior_failures
        ),
    )
}

fn table2_output(threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qptg"));
    cmd.args(["table2", "--samples", "1000000", "--seed", "42"]);
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let out = cmd.env_remove("QPTG_SEED").output().map_err(err)?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    Ok(out.stdout)
}

fn criterion_13() -> Outcome {
    let first = table2_output(None)?;
    let second = table2_output(None)?;
    let one = table2_output(Some("1"))?;
    let eight = table2_output(Some("8"))?;
    check(
        first == second && one == eight && first == one,
        format!(
            "{} bytes, repeat identical: {}, threads 1 vs 8 identical: {}",
            first.len(),
            first == second,
            one == eight
        ),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "perfect play", criterion_1),
        (2, "mpmg werner polynomial", criterion_2),
        (3, "mpmg bell-diagonal polynomial", criterion_3),
        (4, "dg bell-diagonal polynomial", criterion_4),
        (5, "dg werner adjudication", criterion_5),
        (6, "werner thresholds", criterion_6),
        (7, "werner P_Q", criterion_7),
        (8, "classical values", criterion_8),
        (9, "bell-diagonal table by monte carlo", criterion_9),
        (10, "projector and geometry properties", criterion_10),
        (11, "region nesting", criterion_11),
        (12, "magic square region boundary", criterion_12),
        (13, "reproducibility", criterion_13),
    ];
    let mut failed = 0;
    let stdout = std::io::stdout();
    for (n, name, f) in criteria {
        let (status, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let mut out = stdout.lock();
        let _ = writeln!(out, "criterion {n:>2} {status} {name}: {detail}");
        let _ = out.flush();
    }
    println!("acceptance: {} passed, {failed} failed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
