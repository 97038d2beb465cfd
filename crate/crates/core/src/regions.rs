//! Quantum-advantage and Bell-violation regions over the Werner segment and
//! the Bell-diagonal tetrahedron, with their measure ratios.
//!
//! Membership predicates use closed-form win polynomials and criteria; the
//! projector engine in [`crate::games`] is only used to validate them. Volume
//! estimates draw from a counter-based ChaCha stream keyed by (seed, sample
//! index), so the result does not depend on how the samples are split across
//! threads.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::criteria::{cg_violable, chsh_violable_bell_diagonal};
use crate::error::{invalid, Error, Result};
use crate::states::{BellDiagParams, WernerParam, ENTANGLEMENT_TOL};

pub const CLASSICAL_MPMG: f64 = 8.0 / 9.0;
pub const CLASSICAL_DG: f64 = 13.0 / 15.0;

/// Margin a point must clear to count as inside a region; boundaries are
/// measure-zero and classified as outside.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Smallest sample count accepted by [`mc_volume_ratio`].
pub const MIN_MC_SAMPLES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionId {
    Mpmg,
    Dg,
    Chsh,
    Cg,
    Ent,
    Sep,
}

impl RegionId {
    pub const ALL: [RegionId; 6] = [
        RegionId::Mpmg,
        RegionId::Dg,
        RegionId::Chsh,
        RegionId::Cg,
        RegionId::Ent,
        RegionId::Sep,
    ];

    /// Regions with a Werner threshold and a P_Q table row, in table order.
    pub const ADVANTAGE: [RegionId; 4] =
        [RegionId::Mpmg, RegionId::Dg, RegionId::Cg, RegionId::Chsh];

    pub fn name(self) -> &'static str {
        match self {
            RegionId::Mpmg => "mpmg",
            RegionId::Dg => "dg",
            RegionId::Chsh => "chsh",
            RegionId::Cg => "cg",
            RegionId::Ent => "ent",
            RegionId::Sep => "sep",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegionId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown region '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Werner,
    BellDiagonal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::BellDiagonal => "bell-diagonal",
        }
    }

    fn dimension(self) -> usize {
        match self {
            Family::Werner => 1,
            Family::BellDiagonal => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "werner" => Ok(Family::Werner),
            "bell-diagonal" | "bell_diagonal" | "belldiagonal" | "bell" => Ok(Family::BellDiagonal),
            _ => Err(invalid(format!("unknown state family '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateParams {
    Werner(WernerParam),
    BellDiagonal(BellDiagParams),
}

impl StateParams {
    pub fn family(&self) -> Family {
        match self {
            StateParams::Werner(_) => Family::Werner,
            StateParams::BellDiagonal(_) => Family::BellDiagonal,
        }
    }

    pub fn as_bell_diagonal(&self) -> BellDiagParams {
        match self {
            StateParams::Werner(f) => f.as_bell_diagonal(),
            StateParams::BellDiagonal(p) => *p,
        }
    }
}

/// Magic square win probability on two copies of a Werner state.
pub fn mpmg_win_werner(f: f64) -> f64 {
    (40.0 * f * f + 4.0 * f + 37.0) / 81.0
}

/// Magic square win probability on two copies of a Bell-diagonal state.
pub fn mpmg_win_bell_diagonal(p: &BellDiagParams) -> f64 {
    let BellDiagParams { a, b, c } = *p;
    8.0 / 9.0 * a * a
        + 4.0 / 9.0 * (2.0 * b + 2.0 * c - 1.0) * a
        + 4.0 / 9.0 * b * b
        + 4.0 / 9.0 * (2.0 * c - 1.0) * b
        + 4.0 / 9.0 * c * (c - 1.0)
        + 5.0 / 9.0
}

/// Doily win probability on two copies of a Bell-diagonal state; depends on
/// the |Φ⁺⟩ weight only.
pub fn dg_win_bell_diagonal(p: &BellDiagParams) -> f64 {
    (24.0 * p.a * p.a + 21.0) / 45.0
}

pub fn dg_win_werner(f: f64) -> f64 {
    (8.0 * f * f + 7.0) / 15.0
}

/// The Werner doily polynomial 2F²/21 + F/7 + 16/21 as printed in the source
/// literature. It disagrees with the projector engine and with its own
/// threshold √3/2; kept only so `verify` can report the discrepancy.
pub fn printed_dg_werner_polynomial(f: f64) -> f64 {
    2.0 / 21.0 * f * f + f / 7.0 + 16.0 / 21.0
}

fn entangled_margin(p: &BellDiagParams) -> f64 {
    p.max_weight() - 0.5 - ENTANGLEMENT_TOL
}

/// Signed distance-like margin; positive means inside the region.
fn margin(region: RegionId, p: &BellDiagParams) -> f64 {
    match region {
        RegionId::Mpmg => mpmg_win_bell_diagonal(p) - CLASSICAL_MPMG,
        RegionId::Dg => dg_win_bell_diagonal(p) - CLASSICAL_DG,
        RegionId::Chsh => chsh_violable_bell_diagonal(p).margin,
        RegionId::Cg => -cg_violable(p).slack,
        RegionId::Ent => entangled_margin(p),
        RegionId::Sep => -entangled_margin(p),
    }
}

fn inside(region: RegionId, p: &BellDiagParams) -> bool {
    match region {
        // separable includes the entanglement boundary
        RegionId::Sep => !inside(RegionId::Ent, p),
        RegionId::Ent => entangled_margin(p) > 0.0,
        _ => margin(region, p) > BOUNDARY_TOL,
    }
}

fn memberships(p: &BellDiagParams) -> [bool; 6] {
    RegionId::ALL.map(|r| inside(r, p))
}

/// Indicator of `region` at a point of a state family.
pub fn member(region: RegionId, params: &StateParams) -> Result<bool> {
    if let StateParams::BellDiagonal(p) = params {
        p.validate()?;
    }
    Ok(inside(region, &params.as_bell_diagonal()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdResult {
    pub region: RegionId,
    /// Bisection root of the region's defining margin along the Werner segment.
    pub f_min: f64,
    pub closed_form: f64,
    pub closed_form_expr: &'static str,
}

fn werner_margin(region: RegionId, f: f64) -> f64 {
    let p = WernerParam::new(f).expect("f in [0, 1]").as_bell_diagonal();
    match region {
        RegionId::Mpmg => mpmg_win_werner(f) - CLASSICAL_MPMG,
        RegionId::Dg => dg_win_werner(f) - CLASSICAL_DG,
        _ => margin(region, &p),
    }
}

/// Closed-form Werner threshold of an advantage region.
pub fn werner_threshold_closed_form(region: RegionId) -> Result<(f64, &'static str)> {
    match region {
        RegionId::Mpmg => Ok(((3.0 * 39f64.sqrt() - 1.0) / 20.0, "(3*sqrt(39)-1)/20")),
        RegionId::Dg => Ok((3f64.sqrt() / 2.0, "sqrt(3)/2")),
        RegionId::Chsh => Ok(((2.0 + 3.0 * 2f64.sqrt()) / 8.0, "(2+3*sqrt(2))/8")),
        RegionId::Cg => Ok((17.0 / 20.0, "17/20")),
        RegionId::Ent | RegionId::Sep => Err(invalid(format!(
            "region {region} has no advantage threshold"
        ))),
    }
}

/// Fidelity above which Werner states fall in `region`, by bisection on
/// [1/2, 1] down to an interval of 1e-12.
pub fn werner_threshold(region: RegionId) -> Result<ThresholdResult> {
    let (closed_form, closed_form_expr) = werner_threshold_closed_form(region)?;
    let (mut lo, mut hi) = (0.5, 1.0);
    if werner_margin(region, lo) > 0.0 || werner_margin(region, hi) <= 0.0 {
        return Err(Error::Construction(format!(
            "margin of {region} does not change sign on [0.5, 1]"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if werner_margin(region, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        region,
        f_min: 0.5 * (lo + hi),
        closed_form,
        closed_form_expr,
    })
}

/// Exact P_Q of a Werner region: (1 − F_min) over the entangled length 1/2.
pub fn werner_pq(region: RegionId) -> Result<f64> {
    match region {
        RegionId::Ent => Ok(1.0),
        RegionId::Sep => Ok(0.0),
        _ => Ok((1.0 - werner_threshold_closed_form(region)?.0) / 0.5),
    }
}

/// Exact P_Q of the Bell-diagonal doily region: the sub-tetrahedron a > √3/2
/// has relative volume (1 − √3/2)³, doubled for the entangled half.
pub fn dg_bell_diagonal_pq_analytic() -> f64 {
    2.0 * (1.0 - 3f64.sqrt() / 2.0).powi(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Denominator {
    /// All states of the family.
    All,
    /// Entangled states only.
    Entangled,
}

impl FromStr for Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "all" => Ok(Denominator::All),
            "e" | "ent" | "entangled" => Ok(Denominator::Entangled),
            _ => Err(invalid(format!(
                "unknown denominator '{s}' (expected S or E)"
            ))),
        }
    }
}

/// Sample point `index` of the stream keyed by `seed`.
///
/// Each sample consumes a fixed block of the ChaCha keystream, so any
/// contiguous range of indices can be regenerated independently.
#[derive(Clone, Copy, Debug)]
pub struct SampleStream {
    pub family: Family,
    pub seed: u64,
}

const U53: f64 = 1.0 / (1u64 << 53) as f64;

impl SampleStream {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    fn words_per_sample(&self) -> u128 {
        2 * self.family.dimension() as u128
    }

    fn rng_at(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(u128::from(index) * self.words_per_sample());
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> BellDiagParams {
        let mut uniform = || (rng.next_u64() >> 11) as f64 * U53;
        match self.family {
            Family::Werner => WernerParam::new(uniform())
                .expect("uniform draw lies in [0, 1)")
                .as_bell_diagonal(),
            Family::BellDiagonal => {
                let mut u = [uniform(), uniform(), uniform()];
                u.sort_by(f64::total_cmp);
                BellDiagParams {
                    a: u[0],
                    b: u[1] - u[0],
                    c: u[2] - u[1],
                }
            }
        }
    }

    /// Points `start..end` in index order.
    pub fn points(&self, start: u64, end: u64) -> impl Iterator<Item = BellDiagParams> + '_ {
        let mut rng = self.rng_at(start);
        (start..end).map(move |_| self.draw(&mut rng))
    }

    pub fn point(&self, index: u64) -> BellDiagParams {
        self.draw(&mut self.rng_at(index))
    }
}

/// Membership counts of every region over one sample stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionCounts {
    pub family: Family,
    pub samples: u64,
    pub seed: u64,
    counts: [u64; 6],
}

impl RegionCounts {
    pub fn count(&self, region: RegionId) -> u64 {
        self.counts[region.index()]
    }

    pub fn estimate(&self, region: RegionId, denominator: Denominator) -> VolumeEstimate {
        let n = match denominator {
            Denominator::All => self.samples,
            Denominator::Entangled => self.count(RegionId::Ent),
        };
        let k = self.count(region);
        let mean = if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let stderr = if n == 0 {
            0.0
        } else {
            (mean * (1.0 - mean) / n as f64).sqrt()
        };
        VolumeEstimate {
            region,
            family: self.family,
            denominator,
            mean,
            stderr,
            samples: self.samples,
            denominator_count: n,
            seed: self.seed,
        }
    }
}

const CHUNK: u64 = 1 << 15;

/// Counts every region's members among `samples` points of the stream.
///
/// `threads = 0` uses rayon's default pool size. The result is identical for
/// any thread count.
pub fn count_regions(
    family: Family,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<RegionCounts> {
    let stream = SampleStream::new(family, seed);
    let chunks = samples.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let start = ci * CHUNK;
                let end = (start + CHUNK).min(samples);
                let mut counts = [0u64; 6];
                for p in stream.points(start, end) {
                    for (c, m) in counts.iter_mut().zip(memberships(&p)) {
                        *c += u64::from(m);
                    }
                }
                counts
            })
            .reduce(|| [0u64; 6], |a, b| std::array::from_fn(|i| a[i] + b[i]))
    };
    let counts = if threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?
            .install(work)
    };
    Ok(RegionCounts {
        family,
        samples,
        seed,
        counts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub region: RegionId,
    pub family: Family,
    pub denominator: Denominator,
    pub mean: f64,
    /// Bernoulli standard error over `denominator_count` trials.
    pub stderr: f64,
    pub samples: u64,
    pub denominator_count: u64,
    pub seed: u64,
}

/// Monte-Carlo estimate of P(R) (denominator `All`) or P_Q(R) (`Entangled`).
pub fn mc_volume_ratio(
    region: RegionId,
    denominator: Denominator,
    family: Family,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<VolumeEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_MC_SAMPLES} samples required, got {samples}"
        )));
    }
    Ok(count_regions(family, samples, seed, threads)?.estimate(region, denominator))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2Entry {
    pub region: RegionId,
    pub family: Family,
    pub value: f64,
    pub stderr: Option<f64>,
    /// Exact value when one is known alongside the Monte-Carlo estimate.
    pub analytic: Option<f64>,
    pub provenance: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2 {
    pub samples: u64,
    pub seed: u64,
    pub entries: Vec<Table2Entry>,
}

impl Table2 {
    pub fn get(&self, region: RegionId, family: Family) -> Option<&Table2Entry> {
        self.entries
            .iter()
            .find(|e| e.region == region && e.family == family)
    }
}

/// P_Q for the four regions and both families: Werner exact, Bell-diagonal by
/// Monte Carlo.
pub fn table2(samples: u64, seed: u64, threads: usize) -> Result<Table2> {
    if samples < MIN_MC_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_MC_SAMPLES} samples required, got {samples}"
        )));
    }
    let counts = count_regions(Family::BellDiagonal, samples, seed, threads)?;
    let mut entries = Vec::with_capacity(8);
    for region in RegionId::ADVANTAGE {
        entries.push(Table2Entry {
            region,
            family: Family::Werner,
            value: werner_pq(region)?,
            stderr: None,
            analytic: None,
            provenance: "closed-form threshold",
        });
    }
    for region in RegionId::ADVANTAGE {
        let est = counts.estimate(region, Denominator::Entangled);
        entries.push(Table2Entry {
            region,
            family: Family::BellDiagonal,
            value: est.mean,
            stderr: Some(est.stderr),
            analytic: (region == RegionId::Dg).then(dg_bell_diagonal_pq_analytic),
            provenance: "monte-carlo",
        });
    }
    Ok(Table2 {
        samples,
        seed,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeSize {
    pub family: Family,
    pub region: RegionId,
    pub value: f64,
    pub stderr: Option<f64>,
    pub provenance: &'static str,
}

/// P_Q(region) / P_Q(CHSH) for MPMG, DG and CG in both families. For the
/// Bell-diagonal doily an extra ratio uses the analytic volume.
pub fn relative_sizes(table: &Table2) -> Result<Vec<RelativeSize>> {
    let mut out = Vec::with_capacity(7);
    for family in [Family::Werner, Family::BellDiagonal] {
        let chsh = table
            .get(RegionId::Chsh, family)
            .ok_or_else(|| invalid("table has no CHSH entry"))?;
        for region in [RegionId::Mpmg, RegionId::Dg, RegionId::Cg] {
            let e = table
                .get(region, family)
                .ok_or_else(|| invalid(format!("table has no {region} entry")))?;
            let value = e.value / chsh.value;
            let stderr = match (e.stderr, chsh.stderr) {
                (Some(se), Some(sc)) => {
                    Some(value * ((se / e.value).powi(2) + (sc / chsh.value).powi(2)).sqrt())
                }
                _ => None,
            };
            out.push(RelativeSize {
                family,
                region,
                value,
                stderr,
                provenance: e.provenance,
            });
            if let Some(exact) = e.analytic {
                out.push(RelativeSize {
                    family,
                    region,
                    value: exact / chsh.value,
                    stderr: chsh.stderr.map(|sc| exact / chsh.value * sc / chsh.value),
                    provenance: "analytic numerator",
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseSummary {
    pub case: &'static str,
    /// Points on the w = 8/9 surface.
    pub boundary_points: usize,
    pub max_deviation: f64,
    /// Points checked for membership (cross-sections entirely inside the region).
    pub interior_points: usize,
    pub interior_failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub max_deviation: f64,
    pub boundary_points: usize,
    pub interior_points: usize,
    pub interior_failures: usize,
    /// Boundary points where a small step inward/outward does not enter/leave
    /// the region.
    pub side_failures: usize,
    pub cases: Vec<CaseSummary>,
}

impl BoundaryReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.interior_failures == 0 && self.side_failures == 0
    }
}

/// Samples the piecewise description of the magic square advantage region.
///
/// Cases (I)–(III) contain the surface w = 8/9, parametrized by
/// b + c = ½ − a + √(1 − a²); every sampled point is evaluated with the
/// closed-form polynomial. In cases (IV)–(VI) the whole cross-section at fixed
/// a lies in the region, so points there are checked for membership instead.
pub fn mpmg_boundary_check(samples_per_case: usize) -> Result<BoundaryReport> {
    if samples_per_case < 10 {
        return Err(invalid("at least 10 samples per case required"));
    }
    let n = samples_per_case;
    let a_low = 3f64.sqrt() / 2.0;
    let a_mid = 0.25 + 7f64.sqrt() / 4.0;
    let a_high = 55f64.sqrt() / 8.0;
    let surface = |a: f64| 0.5 - a + (1.0 - a * a).sqrt();
    let grid =
        |lo: f64, hi: f64, k: usize| (lo + (hi - lo) * k as f64 / (n - 1) as f64).clamp(lo, hi);
    let open = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * (k + 1) as f64 / (n + 1) as f64;

    let mut cases = Vec::new();
    let mut side_failures = 0;
    let deviation = |p: &BellDiagParams| (mpmg_win_bell_diagonal(p) - CLASSICAL_MPMG).abs();
    let mut side_check = |p: &BellDiagParams| {
        // moving weight from |Ψ⁻⟩ to |Φ⁻⟩ enters the region, the reverse leaves it
        let step = 1e-6;
        let inward = BellDiagParams {
            c: p.c + step,
            ..*p
        };
        let outward = BellDiagParams {
            c: p.c - step,
            ..*p
        };
        if !inside(RegionId::Mpmg, &inward)
            || (outward.c >= 0.0 && inside(RegionId::Mpmg, &outward))
        {
            side_failures += 1;
        }
    };

    // (I) a = √3/2, face a + b + c = 1
    let mut pts = Vec::new();
    for k in 0..n {
        let b = grid(0.0, 1.0 - a_low, k);
        pts.push(BellDiagParams {
            a: a_low,
            b,
            c: (1.0 - a_low - b).max(0.0),
        });
    }
    cases.push(summarize("I", &pts, deviation, &[]));

    // (II) √3/2 < a < (1 + √7)/4: curved surface and its two edges
    let mut pts = Vec::new();
    for i in 0..n {
        let a = open(a_low, a_mid, i);
        let s = surface(a);
        pts.push(BellDiagParams { a, b: 0.0, c: s });
        pts.push(BellDiagParams { a, b: s, c: 0.0 });
        for k in 0..n {
            let b = open(0.0, s, k);
            pts.push(BellDiagParams { a, b, c: s - b });
        }
    }
    for p in &pts {
        side_check(p);
    }
    cases.push(summarize("II", &pts, deviation, &[]));

    // (III) a = (1 + √7)/4: the surface shrinks to the edge point b = c = 0
    let pts = vec![BellDiagParams {
        a: a_mid,
        b: 0.0,
        c: surface(a_mid).max(0.0),
    }];
    cases.push(summarize("III", &pts, deviation, &[]));

    // (IV)–(VI): whole cross-sections, including the b = c = 0 edge
    let cross_section = |a: f64| -> Vec<BellDiagParams> {
        let rest = 1.0 - a;
        let mut v = vec![
            BellDiagParams { a, b: 0.0, c: 0.0 },
            BellDiagParams { a, b: rest, c: 0.0 },
            BellDiagParams { a, b: 0.0, c: rest },
        ];
        for k in 0..n {
            let b = open(0.0, rest, k);
            v.push(BellDiagParams { a, b, c: 0.0 });
            v.push(BellDiagParams { a, b: 0.0, c: b });
            v.push(BellDiagParams {
                a,
                b,
                c: open(0.0, rest - b, k),
            });
        }
        v
    };
    let iv: Vec<BellDiagParams> = (0..n)
        .flat_map(|i| cross_section(open(a_mid, a_high, i)))
        .collect();
    cases.push(summarize("IV", &[], deviation, &iv));
    cases.push(summarize("V", &[], deviation, &cross_section(a_high)));
    let vi: Vec<BellDiagParams> = (0..n)
        .flat_map(|i| cross_section(grid(a_high, 1.0, i).max(a_high + 1e-9)))
        .collect();
    cases.push(summarize("VI", &[], deviation, &vi));

    Ok(BoundaryReport {
        max_deviation: cases.iter().map(|c| c.max_deviation).fold(0.0, f64::max),
        boundary_points: cases.iter().map(|c| c.boundary_points).sum(),
        interior_points: cases.iter().map(|c| c.interior_points).sum(),
        interior_failures: cases.iter().map(|c| c.interior_failures).sum(),
        side_failures,
        cases,
    })
}

fn summarize(
    case: &'static str,
    boundary: &[BellDiagParams],
    deviation: impl Fn(&BellDiagParams) -> f64,
    interior: &[BellDiagParams],
) -> CaseSummary {
    CaseSummary {
        case,
        boundary_points: boundary.len(),
        max_deviation: boundary.iter().map(deviation).fold(0.0, f64::max),
        interior_points: interior.len(),
        interior_failures: interior
            .iter()
            .filter(|p| !inside(RegionId::Mpmg, p))
            .count(),
    }
}

/// Formats `x` in plain decimal with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes `a,b,c,member` rows for `samples` Bell-diagonal points of the
/// stream keyed by `seed`. Returns the number of member rows.
pub fn write_region_points<W: Write>(
    region: RegionId,
    samples: u64,
    seed: u64,
    out: &mut W,
) -> std::io::Result<u64> {
    out.write_all(b"a,b,c,member\n")?;
    let mut members = 0;
    for p in SampleStream::new(Family::BellDiagonal, seed).points(0, samples) {
        let m = inside(region, &p);
        members += u64::from(m);
        writeln!(
            out,
            "{},{},{},{}",
            format_sig9(p.a),
            format_sig9(p.b),
            format_sig9(p.c),
            u8::from(m)
        )?;
    }
    Ok(members)
}

pub fn export_region_points(region: RegionId, samples: u64, seed: u64, path: &Path) -> Result<u64> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let members = write_region_points(region, samples, seed, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(members)
}
