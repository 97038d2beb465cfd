//! Self-consistency checks tying the game constructions, the projector
//! engine, the closed forms and the region machinery together.

use crate::criteria::{cg_violable, chsh_violable};
use crate::games::{
    classical_strategy_value_dg, classical_value_mpmg, dg_baseline_strategy, doily_spec,
    hill_climb_classical, mpmg_spec, GameSpec, Rational, WinEngine,
};
use crate::regions::{
    dg_win_bell_diagonal, dg_win_werner, mpmg_boundary_check, mpmg_win_bell_diagonal,
    mpmg_win_werner, printed_dg_werner_polynomial, werner_pq, werner_threshold, Family, RegionId,
    SampleStream, CLASSICAL_DG,
};
use crate::states::{bell_diagonal, bell_state, werner, BellState, WernerParam};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Informational checks document known discrepancies and never fail the run.
    pub informational: bool,
    pub expected: String,
    pub actual: String,
    pub anchor: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }
}

/// Game descriptions to check; replaceable for fault injection.
#[derive(Clone, Debug)]
pub struct VerifyInputs {
    pub mpmg: GameSpec,
    pub doily: GameSpec,
}

impl VerifyInputs {
    pub fn standard() -> Result<Self> {
        Ok(Self {
            mpmg: mpmg_spec(),
            doily: doily_spec()?,
        })
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn push(
        &mut self,
        name: &str,
        anchor: &'static str,
        passed: bool,
        expected: String,
        actual: String,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            informational: false,
            expected,
            actual,
            anchor,
        });
    }

    fn close(&mut self, name: &str, anchor: &'static str, expected: f64, actual: f64, tol: f64) {
        let passed = (expected - actual).abs() <= tol;
        self.push(
            name,
            anchor,
            passed,
            format!("{expected:.12} ± {tol:e}"),
            format!("{actual:.12}"),
        );
    }

    fn info(
        &mut self,
        name: &str,
        anchor: &'static str,
        reproduced: bool,
        expected: String,
        actual: String,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: reproduced,
            informational: true,
            expected,
            actual,
            anchor,
        });
    }
}

/// Runs every check against the standard game descriptions.
pub fn run_verify() -> Result<VerifyReport> {
    run_verify_with(&VerifyInputs::standard()?)
}

pub fn run_verify_with(inputs: &VerifyInputs) -> Result<VerifyReport> {
    let mut b = Builder { checks: Vec::new() };

    let mut engines = Vec::new();
    for (label, spec, anchor) in [
        ("mpmg", &inputs.mpmg, "magic square observable table"),
        ("dg", &inputs.doily, "doily lines and parities"),
    ] {
        match spec.validate() {
            Ok(()) => b.push(
                &format!("{label} spec consistency"),
                anchor,
                true,
                "valid".into(),
                "valid".into(),
            ),
            Err(e) => b.push(
                &format!("{label} spec consistency"),
                anchor,
                false,
                "valid".into(),
                e.to_string(),
            ),
        }
        engines.push(WinEngine::new(spec).ok());
    }
    let (mpmg, dg) = (engines[0].take(), engines[1].take());

    let v = classical_value_mpmg();
    b.push(
        "mpmg classical value",
        "classical bound of the magic square",
        v == Rational::new(8, 9),
        "8/9".into(),
        v.to_string(),
    );
    let base = dg_baseline_strategy(&inputs.doily);
    let bv = classical_strategy_value_dg(&base, &base);
    b.push(
        "dg baseline strategy value",
        "classical bound of the doily game",
        matches!(bv, Ok(x) if x == Rational::new(13, 15)),
        "13/15".into(),
        bv.map(|x| x.to_string()).unwrap_or_else(|e| e.to_string()),
    );

    let phi = bell_state(BellState::PhiPlus);
    let mixed = werner(WernerParam::new(0.25)?);
    for (label, engine) in [("mpmg", &mpmg), ("dg", &dg)] {
        let Some(engine) = engine else {
            b.push(
                &format!("{label} engine construction"),
                "projector engine",
                false,
                "ok".into(),
                "failed".into(),
            );
            continue;
        };
        b.close(
            &format!("{label} perfect strategy on two Φ⁺ pairs"),
            "perfect quantum strategy",
            1.0,
            engine.average_win_prob(&phi),
            1e-12,
        );
        b.close(
            &format!("{label} maximally mixed state"),
            "white noise limit",
            0.5,
            engine.average_win_prob(&mixed),
            1e-12,
        );

        let poly_w: fn(f64) -> f64 = if label == "mpmg" {
            mpmg_win_werner
        } else {
            dg_win_werner
        };
        let mut worst: f64 = 0.0;
        for i in 0..=100 {
            let f = i as f64 / 100.0;
            worst = worst
                .max((engine.average_win_prob(&werner(WernerParam::new(f)?)) - poly_w(f)).abs());
        }
        b.close(
            &format!("{label} werner polynomial vs engine"),
            "werner win polynomials",
            0.0,
            worst,
            1e-10,
        );

        let poly_bd = if label == "mpmg" {
            mpmg_win_bell_diagonal
        } else {
            dg_win_bell_diagonal
        };
        let mut worst: f64 = 0.0;
        for p in SampleStream::new(Family::BellDiagonal, 7).points(0, 200) {
            worst = worst.max((engine.average_win_prob(&bell_diagonal(p)?) - poly_bd(&p)).abs());
        }
        b.close(
            &format!("{label} bell-diagonal polynomial vs engine"),
            "bell-diagonal win polynomials",
            0.0,
            worst,
            1e-10,
        );
    }

    for region in RegionId::ADVANTAGE {
        let t = werner_threshold(region)?;
        b.close(
            &format!("{region} werner threshold"),
            "werner thresholds",
            t.closed_form,
            t.f_min,
            1e-9,
        );
    }
    for (region, printed) in [
        (RegionId::Mpmg, 0.2265),
        (RegionId::Dg, 0.2679),
        (RegionId::Chsh, 0.4393),
        (RegionId::Cg, 0.3),
    ] {
        b.close(
            &format!("{region} werner P_Q"),
            "werner relative volumes",
            printed,
            werner_pq(region)?,
            5e-5,
        );
    }
    let chsh = werner_pq(RegionId::Chsh)?;
    for (region, printed) in [
        (RegionId::Mpmg, 0.515),
        (RegionId::Dg, 0.610),
        (RegionId::Cg, 0.683),
    ] {
        b.close(
            &format!("{region}/chsh werner ratio"),
            "relative sizes",
            printed,
            werner_pq(region)? / chsh,
            1e-3,
        );
    }
    let order: Vec<f64> = [RegionId::Chsh, RegionId::Cg, RegionId::Dg, RegionId::Mpmg]
        .into_iter()
        .map(|r| werner_threshold(r).map(|t| t.f_min))
        .collect::<Result<_>>()?;
    b.push(
        "werner threshold ordering",
        "hierarchy of criteria",
        order.windows(2).all(|w| w[0] < w[1]),
        "chsh < cg < dg < mpmg".into(),
        format!("{order:?}"),
    );

    let r = chsh_violable(&werner(WernerParam::new(0.75)?));
    b.close(
        "chsh eigenvalue sum at F = 3/4",
        "chsh criterion",
        2.0 / 9.0,
        r.lambda_sum,
        1e-12,
    );
    let cg = cg_violable(&WernerParam::new(0.85)?.as_bell_diagonal());
    b.close(
        "cg slack at F = 17/20",
        "collins-gisin criterion",
        0.0,
        cg.slack,
        1e-12,
    );

    let boundary = mpmg_boundary_check(12)?;
    b.push(
        "magic square region boundary",
        "piecewise description of the advantage region",
        boundary.passed(1e-9),
        "max |w - 8/9| <= 1e-9, all interior points inside".into(),
        format!(
            "max deviation {:.3e} over {} boundary points, {} interior failures, {} side failures",
            boundary.max_deviation,
            boundary.boundary_points,
            boundary.interior_failures,
            boundary.side_failures
        ),
    );

    let printed = printed_dg_werner_polynomial(0.7);
    let derived = dg_win_werner(0.7);
    b.info(
        "printed doily werner polynomial",
        "printed doily werner polynomial 2F²/21+F/7+16/21",
        (printed - derived).abs() > 0.1,
        format!("{derived:.6} from the projector engine at F = 0.7"),
        format!(
            "{printed:.6}; the printed form is inconsistent with the threshold sqrt(3)/2, which (8F²+7)/15 reproduces"
        ),
    );

    let climb = hill_climb_classical(&inputs.doily, 200, 1);
    let found = climb.best_value();
    b.info(
        "doily classical optimum",
        "classical bound of the doily game",
        found > Rational::new(13, 15),
        format!("13/15 = {CLASSICAL_DG:.6} claimed optimal"),
        format!(
            "parity-consistent deterministic strategies reach {found}; 13/15 is still used as the advantage bound"
        ),
    );

    Ok(VerifyReport { checks: b.checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Sign;

    #[test]
    fn standard_inputs_pass() {
        let r = run_verify().unwrap();
        assert!(r.checks.len() >= 20);
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert!(r.checks.iter().filter(|c| c.informational).count() >= 2);
        assert!(r
            .checks
            .iter()
            .filter(|c| c.informational)
            .all(|c| c.passed));
    }

    #[test]
    fn tampered_parity_is_reported_by_line() {
        let mut inputs = VerifyInputs::standard().unwrap();
        inputs.mpmg.lines[4].parity = Sign::Plus;
        let r = run_verify_with(&inputs).unwrap();
        assert!(!r.all_passed());
        let check = r
            .checks
            .iter()
            .find(|c| c.name == "mpmg spec consistency")
            .unwrap();
        assert!(!check.passed);
        assert!(check.actual.contains("line 4"), "{}", check.actual);
    }
}
