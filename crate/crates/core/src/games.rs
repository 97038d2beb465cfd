//! The magic square game and the doily game.
//!
//! A game is a set of signed two-qubit Pauli observables (points), commuting
//! triples of them (lines) with a parity, and the questions: pairs of lines
//! sharing exactly one point. The quantum strategy measures each player's line
//! in its joint eigenbasis on their half of two copies of the shared state.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::pauli::{PauliLetter, PauliWord, Sign};
use crate::states::{two_copy, FourQubitState, TwoQubitState};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameKind {
    MagicSquare,
    Doily,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::MagicSquare => "mpmg",
            GameKind::Doily => "dg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub points: [usize; 3],
    pub parity: Sign,
}

impl Line {
    pub fn position_of(&self, point: usize) -> Option<usize> {
        self.points.iter().position(|&p| p == point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Question {
    pub alice_line: usize,
    pub bob_line: usize,
    pub shared_point: usize,
}

/// Reported values (a₁, a₂, a₃) for the three points of a line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeTriple(pub [Sign; 3]);

impl OutcomeTriple {
    pub fn from_values(values: [i64; 3]) -> Result<Self> {
        let mut out = [Sign::Plus; 3];
        for (o, v) in out.iter_mut().zip(values) {
            *o = Sign::from_value(v).ok_or_else(|| invalid(format!("outcome {v} is not ±1")))?;
        }
        Ok(Self(out))
    }

    pub fn all() -> impl Iterator<Item = OutcomeTriple> {
        (0..8u8).map(|bits| {
            OutcomeTriple([4, 2, 1].map(|mask| {
                if bits & mask == 0 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }))
        })
    }

    /// The four triples whose product equals `parity`.
    pub fn consistent_with(parity: Sign) -> [OutcomeTriple; 4] {
        let mut out = [OutcomeTriple([Sign::Plus; 3]); 4];
        for (slot, t) in out
            .iter_mut()
            .zip(Self::all().filter(|t| t.product() == parity))
        {
            *slot = t;
        }
        out
    }

    pub fn product(&self) -> Sign {
        self.0[0] * self.0[1] * self.0[2]
    }
}

/// Immutable description of a game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub kind: GameKind,
    pub points: Vec<PauliWord>,
    pub lines: Vec<Line>,
    pub questions: Vec<Question>,
    /// Player who negates reported values of observables with an odd number of Y letters.
    pub flip_role: Option<Role>,
}

impl GameSpec {
    /// Uniform probability of each question.
    pub fn question_weight(&self) -> Rational {
        Rational::new(1, self.questions.len() as i64)
    }

    pub fn line_observables(&self, line: usize) -> [PauliWord; 3] {
        self.lines[line].points.map(|p| self.points[p])
    }

    pub fn describe_line(&self, line: usize) -> String {
        let words: Vec<String> = self
            .line_observables(line)
            .iter()
            .map(|w| w.to_string())
            .collect();
        format!("line {line} {{{}}}", words.join(", "))
    }

    /// Same game with the odd-Y flip applied by the other player.
    pub fn with_flip_role(&self, role: Option<Role>) -> Self {
        Self {
            flip_role: role,
            ..self.clone()
        }
    }

    /// Checks commutation, exact parities, question geometry and the counts
    /// each game must have.
    pub fn validate(&self) -> Result<()> {
        for (li, line) in self.lines.iter().enumerate() {
            let [p, q, r] = line.points;
            if p == q || q == r || p == r || line.points.iter().any(|&i| i >= self.points.len()) {
                return Err(Error::Construction(format!(
                    "line {li} has invalid point indices {:?}",
                    line.points
                )));
            }
            let obs = self.line_observables(li);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if !obs[i].commutes_with(&obs[j]) {
                        return Err(Error::Construction(format!(
                            "{}: {} and {} do not commute",
                            self.describe_line(li),
                            obs[i],
                            obs[j]
                        )));
                    }
                }
            }
            let parity = line_product_sign(&obs)
                .map_err(|e| Error::Construction(format!("{}: {e}", self.describe_line(li))))?;
            if parity != line.parity {
                return Err(Error::Construction(format!(
                    "{}: declared parity {} but the product of its observables is {}I",
                    self.describe_line(li),
                    line.parity,
                    if parity == Sign::Plus { "+" } else { "-" }
                )));
            }
            if self.flip_role.is_some() {
                let flips = obs.iter().map(|o| o.y_count()).sum::<usize>();
                if flips % 2 != 0 {
                    return Err(Error::Construction(format!(
                        "{}: odd-Y flips do not preserve its parity",
                        self.describe_line(li)
                    )));
                }
            }
        }
        for (qi, q) in self.questions.iter().enumerate() {
            let (la, lb) = match (self.lines.get(q.alice_line), self.lines.get(q.bob_line)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Construction(format!(
                        "question {qi} refers to a missing line"
                    )))
                }
            };
            let shared: Vec<usize> = la
                .points
                .iter()
                .copied()
                .filter(|p| lb.points.contains(p))
                .collect();
            if shared != [q.shared_point] {
                return Err(Error::Construction(format!(
                    "question {qi}: lines {} and {} share {:?}, expected exactly point {}",
                    q.alice_line, q.bob_line, shared, q.shared_point
                )));
            }
        }
        let negative = self
            .lines
            .iter()
            .filter(|l| l.parity == Sign::Minus)
            .count();
        let expected = match self.kind {
            GameKind::MagicSquare => (9, 6, 9, 3),
            GameKind::Doily => (15, 15, 90, 3),
        };
        let actual = (
            self.points.len(),
            self.lines.len(),
            self.questions.len(),
            negative,
        );
        if actual != expected {
            return Err(Error::Construction(format!(
                "{} has (points, lines, questions, negative lines) = {actual:?}, expected {expected:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Sign ε with O₁O₂O₃ = ε·I, or an error when the product is not ±I.
pub fn line_product_sign(obs: &[PauliWord; 3]) -> Result<Sign> {
    let (ph1, w1) = obs[0].product(&obs[1]);
    let (ph2, w2) = w1.product(&obs[2]);
    if !w2.is_identity() {
        return Err(Error::Construction(format!(
            "product of {}, {}, {} is not proportional to the identity",
            obs[0], obs[1], obs[2]
        )));
    }
    (ph1 * ph2).as_sign().ok_or_else(|| {
        Error::Construction(format!(
            "product of {}, {}, {} has imaginary phase",
            obs[0], obs[1], obs[2]
        ))
    })
}

/// The magic square with rows for Alice (parity +1) and columns for Bob
/// (parity −1).
pub fn mpmg_spec() -> GameSpec {
    use PauliLetter::*;
    let points = vec![
        PauliWord::plus(I, Z),
        PauliWord::plus(Z, I),
        PauliWord::plus(Z, Z),
        PauliWord::plus(X, I),
        PauliWord::plus(I, X),
        PauliWord::plus(X, X),
        PauliWord::minus(X, Z),
        PauliWord::minus(Z, X),
        PauliWord::plus(Y, Y),
    ];
    let mut lines = Vec::with_capacity(6);
    for r in 0..3 {
        lines.push(Line {
            points: [3 * r, 3 * r + 1, 3 * r + 2],
            parity: Sign::Plus,
        });
    }
    for c in 0..3 {
        lines.push(Line {
            points: [c, c + 3, c + 6],
            parity: Sign::Minus,
        });
    }
    let questions = (0..3)
        .flat_map(|r| {
            (0..3).map(move |c| Question {
                alice_line: r,
                bob_line: 3 + c,
                shared_point: 3 * r + c,
            })
        })
        .collect();
    let spec = GameSpec {
        kind: GameKind::MagicSquare,
        points,
        lines,
        questions,
        flip_role: None,
    };
    spec.validate().expect("magic square is consistent");
    spec
}

/// The doily: all 15 non-identity words, with lines generated as the maximal
/// commuting triples {P, Q, ±PQ}.
pub fn doily_spec() -> Result<GameSpec> {
    let points = PauliWord::nontrivial();
    let index_of = |w: &PauliWord| points.iter().position(|p| p == w);

    let mut triples = BTreeSet::new();
    for (i, p) in points.iter().enumerate() {
        for q in points.iter().skip(i + 1) {
            if !p.commutes_with(q) {
                continue;
            }
            let (_, r) = p.product(q);
            let mut t = [
                index_of(p).expect("point"),
                index_of(q).expect("point"),
                index_of(&r).ok_or_else(|| {
                    Error::Construction(format!("product of {p} and {q} is the identity"))
                })?,
            ];
            t.sort_unstable();
            triples.insert(t);
        }
    }

    let mut lines = Vec::with_capacity(triples.len());
    for t in triples {
        let parity = line_product_sign(&t.map(|i| points[i]))?;
        lines.push(Line { points: t, parity });
    }
    let negative = lines.iter().filter(|l| l.parity == Sign::Minus).count();
    if lines.len() != 15 || negative != 3 {
        return Err(Error::Construction(format!(
            "generated {} lines with {negative} negative, expected 15 and 3",
            lines.len()
        )));
    }

    let mut questions = Vec::with_capacity(90);
    for (ia, la) in lines.iter().enumerate() {
        for (ib, lb) in lines.iter().enumerate() {
            if ia == ib {
                continue;
            }
            let shared: Vec<usize> = la
                .points
                .iter()
                .copied()
                .filter(|p| lb.points.contains(p))
                .collect();
            if let [point] = shared[..] {
                questions.push(Question {
                    alice_line: ia,
                    bob_line: ib,
                    shared_point: point,
                });
            }
        }
    }

    let spec = GameSpec {
        kind: GameKind::Doily,
        points,
        lines,
        questions,
        flip_role: Some(Role::Bob),
    };
    spec.validate()?;
    Ok(spec)
}

/// The observable a player effectively reports for point `o`: in the doily,
/// the flipping player negates words with an odd number of Y letters.
pub fn effective_observable(o: &PauliWord, player: Role, spec: &GameSpec) -> PauliWord {
    if spec.flip_role == Some(player) && o.y_count() % 2 == 1 {
        o.negated()
    } else {
        *o
    }
}

/// Joint eigenprojector Π = ∏ᵢ (I + tᵢ·Oᵢ)/2 of three commuting observables.
pub fn line_projector(observables: &[PauliWord; 3], t: OutcomeTriple) -> Result<ComplexMatrix> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if !observables[i].commutes_with(&observables[j]) {
                return Err(invalid(format!(
                    "{} and {} do not commute",
                    observables[i], observables[j]
                )));
            }
        }
    }
    let id = ComplexMatrix::identity(4);
    let mut out = id.clone();
    for (o, s) in observables.iter().zip(t.0) {
        let factor = (&id + &o.matrix().scale_real(s.as_f64())).scale_real(0.5);
        out = &out * &factor;
    }
    Ok(out)
}

/// Precomputed winning operators of a game.
///
/// For each question the 16×16 operator Σ_admissible Π_A ⊗ Π_B is built once by
/// enumerating all 64 outcome pairs, so evaluating a state is a single trace.
#[derive(Clone, Debug)]
pub struct WinEngine {
    spec: GameSpec,
    question_ops: Vec<ComplexMatrix>,
    average_op: ComplexMatrix,
}

impl WinEngine {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        let question_ops: Vec<ComplexMatrix> = spec
            .questions
            .iter()
            .map(|q| question_operator(spec, q))
            .collect::<Result<_>>()?;
        let weight = 1.0 / spec.questions.len() as f64;
        let average_op = question_ops
            .iter()
            .fold(ComplexMatrix::zeros(16), |acc, op| &acc + op)
            .scale_real(weight);
        Ok(Self {
            spec: spec.clone(),
            question_ops,
            average_op,
        })
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn question_operator(&self, index: usize) -> &ComplexMatrix {
        &self.question_ops[index]
    }

    pub fn question_win_prob(&self, index: usize, rho4: &FourQubitState) -> f64 {
        self.question_ops[index].trace_product(rho4.rho()).re
    }

    pub fn average_on_two_copy(&self, rho4: &FourQubitState) -> f64 {
        self.average_op.trace_product(rho4.rho()).re
    }

    pub fn average_win_prob(&self, s: &TwoQubitState) -> f64 {
        self.average_on_two_copy(&two_copy(s))
    }
}

fn question_operator(spec: &GameSpec, q: &Question) -> Result<ComplexMatrix> {
    let la = spec.lines[q.alice_line];
    let lb = spec.lines[q.bob_line];
    let (ia, ib) = match (
        la.position_of(q.shared_point),
        lb.position_of(q.shared_point),
    ) {
        (Some(ia), Some(ib)) => (ia, ib),
        _ => {
            return Err(invalid(format!(
                "shared point {} not on both lines",
                q.shared_point
            )))
        }
    };
    let alice_obs = la
        .points
        .map(|p| effective_observable(&spec.points[p], Role::Alice, spec));
    let bob_obs = lb
        .points
        .map(|p| effective_observable(&spec.points[p], Role::Bob, spec));

    let alice_proj: Vec<(OutcomeTriple, ComplexMatrix)> = OutcomeTriple::all()
        .map(|t| Ok((t, line_projector(&alice_obs, t)?)))
        .collect::<Result<_>>()?;
    let bob_proj: Vec<(OutcomeTriple, ComplexMatrix)> = OutcomeTriple::all()
        .map(|t| Ok((t, line_projector(&bob_obs, t)?)))
        .collect::<Result<_>>()?;

    let mut op = ComplexMatrix::zeros(16);
    for (ta, pa) in &alice_proj {
        for (tb, pb) in &bob_proj {
            let admissible =
                ta.product() == la.parity && tb.product() == lb.parity && ta.0[ia] == tb.0[ib];
            if admissible {
                op = &op + &kron(pa, pb)?;
            }
        }
    }
    Ok(op)
}

/// Winning probability of one question on a four-qubit state.
pub fn question_win_prob(spec: &GameSpec, q: &Question, rho4: &FourQubitState) -> Result<f64> {
    if !spec.questions.contains(q) {
        return Err(invalid(format!("{q:?} is not a question of {}", spec.kind)));
    }
    Ok(question_operator(spec, q)?.trace_product(rho4.rho()).re)
}

/// Average winning probability over the uniform question distribution when
/// the players share two copies of `s`.
pub fn average_win_prob(spec: &GameSpec, s: &TwoQubitState) -> Result<f64> {
    Ok(WinEngine::new(spec)?.average_win_prob(s))
}

/// Independent route to the average winning probability of a Bell-diagonal
/// state: each question is won with probability (1 + E)/2, E being the
/// two-copy correlation of the shared observable.
pub fn closed_form_win(spec: &GameSpec, s: &TwoQubitState) -> Result<f64> {
    let params = s.bell_diagonal_params(1e-10).ok_or_else(|| {
        Error::Unsupported("closed-form win probability needs a Bell-diagonal state".into())
    })?;
    let [tx, ty, tz] = params.pauli_correlations();
    let t = |l: PauliLetter| match l {
        PauliLetter::I => 1.0,
        PauliLetter::X => tx,
        PauliLetter::Y => ty,
        PauliLetter::Z => tz,
    };
    let total: f64 = spec
        .questions
        .iter()
        .map(|q| {
            let o = &spec.points[q.shared_point];
            let sa = effective_observable(o, Role::Alice, spec).sign;
            let sb = effective_observable(o, Role::Bob, spec).sign;
            let corr = (sa * sb).as_f64() * t(o.letters[0]) * t(o.letters[1]);
            (1.0 + corr) / 2.0
        })
        .sum();
    Ok(total / spec.questions.len() as f64)
}

/// Fixed answer per line. Lines a player is never asked may be left empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub answers: Vec<Option<OutcomeTriple>>,
}

/// Exact fraction of questions won by a deterministic strategy pair. Missing or
/// parity-inconsistent answers lose.
pub fn deterministic_value(
    spec: &GameSpec,
    alice: &DeterministicStrategy,
    bob: &DeterministicStrategy,
) -> Rational {
    let wins = spec
        .questions
        .iter()
        .filter(|q| {
            deterministic_win(
                spec,
                q,
                alice.answers[q.alice_line],
                bob.answers[q.bob_line],
            )
        })
        .count();
    Rational::new(wins as i64, spec.questions.len() as i64)
}

fn deterministic_win(
    spec: &GameSpec,
    q: &Question,
    a: Option<OutcomeTriple>,
    b: Option<OutcomeTriple>,
) -> bool {
    let (Some(a), Some(b)) = (a, b) else {
        return false;
    };
    let la = &spec.lines[q.alice_line];
    let lb = &spec.lines[q.bob_line];
    a.product() == la.parity
        && b.product() == lb.parity
        && a.0[la.position_of(q.shared_point).expect("on line")]
            == b.0[lb.position_of(q.shared_point).expect("on line")]
}

/// All deterministic strategies of a player who answers only `lines`.
fn enumerate_strategies(spec: &GameSpec, lines: &[usize]) -> Vec<DeterministicStrategy> {
    let mut out = vec![DeterministicStrategy {
        answers: vec![None; spec.lines.len()],
    }];
    for &l in lines {
        let choices = OutcomeTriple::consistent_with(spec.lines[l].parity);
        out = out
            .into_iter()
            .flat_map(|s| {
                choices.iter().map(move |&t| {
                    let mut s = s.clone();
                    s.answers[l] = Some(t);
                    s
                })
            })
            .collect();
    }
    out
}

/// Best classical success probability of the magic square game, by exhaustive
/// search over the 64 × 64 deterministic strategy pairs.
pub fn classical_value_mpmg() -> Rational {
    let spec = mpmg_spec();
    let alice_lines: BTreeSet<usize> = spec.questions.iter().map(|q| q.alice_line).collect();
    let bob_lines: BTreeSet<usize> = spec.questions.iter().map(|q| q.bob_line).collect();
    let alice = enumerate_strategies(&spec, &alice_lines.into_iter().collect::<Vec<_>>());
    let bob = enumerate_strategies(&spec, &bob_lines.into_iter().collect::<Vec<_>>());
    debug_assert_eq!((alice.len(), bob.len()), (64, 64));
    alice
        .par_iter()
        .map(|a| {
            bob.iter()
                .map(|b| deterministic_value(&spec, a, b))
                .max()
                .expect("non-empty")
        })
        .max()
        .expect("non-empty")
}

/// Per-line answer distributions with exact probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomizedStrategy {
    pub per_line: Vec<Vec<(OutcomeTriple, Rational)>>,
}

impl RandomizedStrategy {
    pub fn deterministic(answers: Vec<OutcomeTriple>) -> Self {
        Self {
            per_line: answers
                .into_iter()
                .map(|t| vec![(t, Rational::from_integer(1))])
                .collect(),
        }
    }
}

/// How parity-inconsistent answers are treated when valuing a strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconsistentAnswers {
    Reject,
    CountAsLoss,
}

/// Exact expected success of a pair of randomized strategies over the uniform
/// questions of `spec`.
pub fn classical_strategy_value(
    spec: &GameSpec,
    alice: &RandomizedStrategy,
    bob: &RandomizedStrategy,
    policy: InconsistentAnswers,
) -> Result<Rational> {
    for (who, s) in [("Alice", alice), ("Bob", bob)] {
        if s.per_line.len() != spec.lines.len() {
            return Err(invalid(format!(
                "{who}'s strategy covers {} lines, game has {}",
                s.per_line.len(),
                spec.lines.len()
            )));
        }
        for (li, dist) in s.per_line.iter().enumerate() {
            let total: Rational = dist.iter().map(|(_, p)| *p).sum();
            if dist.iter().any(|(_, p)| *p < Rational::from_integer(0))
                || total != Rational::from_integer(1)
            {
                return Err(invalid(format!(
                    "{who}'s distribution on line {li} is not a probability distribution"
                )));
            }
            if policy == InconsistentAnswers::Reject {
                if let Some((t, _)) = dist.iter().find(|(t, p)| {
                    *p != Rational::from_integer(0) && t.product() != spec.lines[li].parity
                }) {
                    return Err(invalid(format!(
                        "{who} answers {:?} on {}, which violates its parity",
                        t.0.map(Sign::value),
                        spec.describe_line(li)
                    )));
                }
            }
        }
    }

    let mut total = Rational::from_integer(0);
    for q in &spec.questions {
        for (ta, pa) in &alice.per_line[q.alice_line] {
            for (tb, pb) in &bob.per_line[q.bob_line] {
                if deterministic_win(spec, q, Some(*ta), Some(*tb)) {
                    total += pa * pb;
                }
            }
        }
    }
    Ok(total * spec.question_weight())
}

/// Strict (parity-checked) value of a doily strategy pair.
pub fn classical_strategy_value_dg(
    alice: &RandomizedStrategy,
    bob: &RandomizedStrategy,
) -> Result<Rational> {
    classical_strategy_value(&doily_spec()?, alice, bob, InconsistentAnswers::Reject)
}

/// All ones on positive lines; a uniformly random single −1 on negative lines.
pub fn dg_baseline_strategy(spec: &GameSpec) -> RandomizedStrategy {
    let third = Rational::new(1, 3);
    let per_line = spec
        .lines
        .iter()
        .map(|l| match l.parity {
            Sign::Plus => vec![(OutcomeTriple([Sign::Plus; 3]), Rational::from_integer(1))],
            Sign::Minus => (0..3)
                .map(|k| {
                    let mut t = [Sign::Plus; 3];
                    t[k] = Sign::Minus;
                    (OutcomeTriple(t), third)
                })
                .collect(),
        })
        .collect();
    RandomizedStrategy { per_line }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HillClimbReport {
    pub restarts: usize,
    pub best_wins: usize,
    pub questions: usize,
    pub best_alice: Vec<OutcomeTriple>,
    pub best_bob: Vec<OutcomeTriple>,
}

impl HillClimbReport {
    pub fn best_value(&self) -> Rational {
        Rational::new(self.best_wins as i64, self.questions as i64)
    }
}

/// Local search over parity-consistent deterministic strategy pairs, from
/// `restarts` random starting points. Gives a lower bound on the classical
/// value only.
pub fn hill_climb_classical(spec: &GameSpec, restarts: usize, seed: u64) -> HillClimbReport {
    let nl = spec.lines.len();
    let choices: Vec<[OutcomeTriple; 4]> = spec
        .lines
        .iter()
        .map(|l| OutcomeTriple::consistent_with(l.parity))
        .collect();
    // (question, position on alice line, position on bob line)
    let geometry: Vec<(usize, usize, usize, usize)> = spec
        .questions
        .iter()
        .map(|q| {
            (
                q.alice_line,
                q.bob_line,
                spec.lines[q.alice_line]
                    .position_of(q.shared_point)
                    .expect("on line"),
                spec.lines[q.bob_line]
                    .position_of(q.shared_point)
                    .expect("on line"),
            )
        })
        .collect();
    let mut touching: Vec<[Vec<usize>; 2]> = vec![[Vec::new(), Vec::new()]; nl];
    for (qi, &(la, lb, _, _)) in geometry.iter().enumerate() {
        touching[la][0].push(qi);
        touching[lb][1].push(qi);
    }

    let wins = |qi: usize, a: &[usize], b: &[usize]| -> bool {
        let (la, lb, ia, ib) = geometry[qi];
        choices[la][a[la]].0[ia] == choices[lb][b[lb]].0[ib]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    let mut moves: Vec<(usize, usize)> =
        (0..2).flat_map(|p| (0..nl).map(move |l| (p, l))).collect();

    for _ in 0..restarts {
        let mut strat = [
            (0..nl).map(|_| rng.gen_range(0..4)).collect::<Vec<usize>>(),
            (0..nl).map(|_| rng.gen_range(0..4)).collect::<Vec<usize>>(),
        ];
        let mut score = (0..geometry.len())
            .filter(|&qi| wins(qi, &strat[0], &strat[1]))
            .count();
        loop {
            moves.shuffle(&mut rng);
            let mut improved = false;
            for &(player, line) in &moves {
                let current = strat[player][line];
                let before = touching[line][player]
                    .iter()
                    .filter(|&&qi| wins(qi, &strat[0], &strat[1]))
                    .count();
                let mut best_move = (before, current);
                for alt in (0..4).filter(|&c| c != current) {
                    strat[player][line] = alt;
                    let after = touching[line][player]
                        .iter()
                        .filter(|&&qi| wins(qi, &strat[0], &strat[1]))
                        .count();
                    if after > best_move.0 {
                        best_move = (after, alt);
                    }
                }
                strat[player][line] = best_move.1;
                if best_move.1 != current {
                    score = score + best_move.0 - before;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, strat[0].clone(), strat[1].clone()));
        }
    }

    let (best_wins, a, b) = best.unwrap_or((0, vec![0; nl], vec![0; nl]));
    let pick = |s: &[usize]| -> Vec<OutcomeTriple> {
        s.iter().enumerate().map(|(l, &c)| choices[l][c]).collect()
    };
    HillClimbReport {
        restarts,
        best_wins,
        questions: spec.questions.len(),
        best_alice: pick(&a),
        best_bob: pick(&b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        bell_diagonal, bell_state, werner, BellDiagParams, BellState, WernerParam,
    };
    use PauliLetter::*;

    fn word_set(spec: &GameSpec, line: &Line) -> BTreeSet<PauliWord> {
        line.points.iter().map(|&p| spec.points[p]).collect()
    }

    #[test]
    fn mpmg_row_and_column_products() {
        let spec = mpmg_spec();
        assert_eq!(
            line_product_sign(&spec.line_observables(2)).unwrap(),
            Sign::Plus
        );
        assert_eq!(
            line_product_sign(&spec.line_observables(5)).unwrap(),
            Sign::Minus
        );
        // row 3 by explicit matrices
        let obs = spec.line_observables(2);
        let prod = &(&obs[0].matrix() * &obs[1].matrix()) * &obs[2].matrix();
        assert!(prod.approx_eq(&ComplexMatrix::identity(4), 1e-15));
    }

    #[test]
    fn mpmg_off_line_pairs_anticommute() {
        let spec = mpmg_spec();
        for i in 0..9 {
            for j in (i + 1)..9 {
                let aligned = i / 3 == j / 3 || i % 3 == j % 3;
                assert_eq!(
                    spec.points[i].commutes_with(&spec.points[j]),
                    aligned,
                    "{i} {j}"
                );
            }
        }
    }

    #[test]
    fn doily_negative_lines_match_known_triples() {
        let spec = doily_spec().unwrap();
        let negative: BTreeSet<BTreeSet<PauliWord>> = spec
            .lines
            .iter()
            .filter(|l| l.parity == Sign::Minus)
            .map(|l| word_set(&spec, l))
            .collect();
        let expected: BTreeSet<BTreeSet<PauliWord>> = [
            [(Z, Z), (X, X), (Y, Y)],
            [(Z, X), (X, Y), (Y, Z)],
            [(Y, X), (Z, Y), (X, Z)],
        ]
        .iter()
        .map(|t| t.iter().map(|&(a, b)| PauliWord::plus(a, b)).collect())
        .collect();
        assert_eq!(negative, expected);
    }

    #[test]
    fn doily_incidence_counts() {
        let spec = doily_spec().unwrap();
        assert_eq!(spec.points.len(), 15);
        assert_eq!(spec.lines.len(), 15);
        assert_eq!(spec.questions.len(), 90);
        for p in 0..15 {
            assert_eq!(
                spec.lines.iter().filter(|l| l.points.contains(&p)).count(),
                3
            );
        }
        for (i, a) in spec.lines.iter().enumerate() {
            let meets = spec
                .lines
                .iter()
                .enumerate()
                .filter(|(j, b)| *j != i && a.points.iter().any(|p| b.points.contains(p)))
                .count();
            assert_eq!(meets, 6);
        }
    }

    #[test]
    fn doily_flip_parity_is_conserved() {
        let spec = doily_spec().unwrap();
        for li in 0..spec.lines.len() {
            let ys: usize = spec.line_observables(li).iter().map(|o| o.y_count()).sum();
            assert_eq!(ys % 2, 0, "{}", spec.describe_line(li));
        }
    }

    #[test]
    fn tampered_parity_is_reported_with_line() {
        let mut spec = doily_spec().unwrap();
        spec.lines[4].parity = spec.lines[4].parity.flipped();
        let err = spec.validate().unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");
    }

    #[test]
    fn projector_examples() {
        let spec = mpmg_spec();
        let row3 = spec.line_observables(2);
        let p = line_projector(&row3, OutcomeTriple([Sign::Plus; 3])).unwrap();
        let phi = [0.5, -0.5, -0.5, -0.5].map(|x| num_complex::Complex64::new(x, 0.0));
        assert!(p.approx_eq(&ComplexMatrix::outer(&phi), 1e-15));

        let inconsistent = OutcomeTriple::from_values([1, 1, -1]).unwrap();
        let z = line_projector(&row3, inconsistent).unwrap();
        assert!(z.max_abs() < 1e-15);

        let sum = OutcomeTriple::all()
            .map(|t| line_projector(&row3, t).unwrap())
            .fold(ComplexMatrix::zeros(4), |acc, m| &acc + &m);
        assert!(sum.approx_eq(&ComplexMatrix::identity(4), 1e-15));

        let bad = [
            PauliWord::plus(X, I),
            PauliWord::plus(Z, I),
            PauliWord::plus(Y, I),
        ];
        assert!(line_projector(&bad, inconsistent).is_err());
    }

    #[test]
    fn effective_observable_examples() {
        let dg = doily_spec().unwrap();
        let iy = PauliWord::plus(I, Y);
        assert_eq!(
            effective_observable(&iy, Role::Bob, &dg),
            PauliWord::minus(I, Y)
        );
        assert_eq!(effective_observable(&iy, Role::Alice, &dg), iy);
        let yy = PauliWord::plus(Y, Y);
        assert_eq!(effective_observable(&yy, Role::Bob, &dg), yy);
        let mp = mpmg_spec();
        for o in &mp.points {
            assert_eq!(effective_observable(o, Role::Bob, &mp), *o);
            assert_eq!(effective_observable(o, Role::Alice, &mp), *o);
        }
    }

    #[test]
    fn question_win_prob_examples() {
        let spec = mpmg_spec();
        let phi2 = two_copy(&bell_state(BellState::PhiPlus));
        let mixed =
            FourQubitState::new(ComplexMatrix::identity(16).scale_real(1.0 / 16.0)).unwrap();
        for q in &spec.questions {
            assert!((question_win_prob(&spec, q, &phi2).unwrap() - 1.0).abs() < 1e-12);
            assert!((question_win_prob(&spec, q, &mixed).unwrap() - 0.5).abs() < 1e-12);
        }
        let dg = doily_spec().unwrap();
        let engine = WinEngine::new(&dg).unwrap();
        for qi in 0..dg.questions.len() {
            assert!((engine.question_win_prob(qi, &mixed) - 0.5).abs() < 1e-12);
        }

        // shared cell I⊗Z is row 0, column 0
        let q = spec.questions[0];
        assert_eq!(spec.points[q.shared_point], PauliWord::plus(I, Z));
        for f in [0.3, 0.7, 0.95] {
            let rho4 = two_copy(&werner(WernerParam::new(f).unwrap()));
            let expected = (1.0 + (4.0 * f - 1.0) / 3.0) / 2.0;
            assert!((question_win_prob(&spec, &q, &rho4).unwrap() - expected).abs() < 1e-12);
        }

        let foreign = Question {
            alice_line: 3,
            bob_line: 0,
            shared_point: 0,
        };
        assert!(question_win_prob(&spec, &foreign, &phi2).is_err());
    }

    #[test]
    fn average_win_prob_examples() {
        let mp = mpmg_spec();
        for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let w = average_win_prob(&mp, &werner(WernerParam::new(f).unwrap())).unwrap();
            assert!((w - (40.0 * f * f + 4.0 * f + 37.0) / 81.0).abs() < 1e-10);
        }
        let mixed = bell_diagonal(BellDiagParams::new(0.25, 0.25, 0.25).unwrap()).unwrap();
        assert!((average_win_prob(&mp, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!((closed_form_win(&mp, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let mp = mpmg_spec();
        let dg = doily_spec().unwrap();
        let pure = werner(WernerParam::new(1.0).unwrap());
        assert!((closed_form_win(&mp, &pure).unwrap() - 1.0).abs() < 1e-12);
        for f in [0.2, 0.5, 0.8] {
            let s = werner(WernerParam::new(f).unwrap());
            let u = 4.0 * f - 1.0;
            let expected = 0.5 + u / 15.0 + u * u / 30.0;
            assert!((expected - (8.0 * f * f + 7.0) / 15.0).abs() < 1e-14);
            assert!((closed_form_win(&dg, &s).unwrap() - expected).abs() < 1e-12);
        }
        let product = crate::states::TwoQubitState::new(
            kron(
                &ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]),
                &ComplexMatrix::from_real_rows([[0.5, 0.0], [0.0, 0.5]]),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            closed_form_win(&mp, &product),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn flip_convention_is_symmetric() {
        let dg = doily_spec().unwrap();
        let alice_flips = dg.with_flip_role(Some(Role::Alice));
        let e_bob = WinEngine::new(&dg).unwrap();
        let e_alice = WinEngine::new(&alice_flips).unwrap();
        for p in [(0.7, 0.1, 0.1), (0.3, 0.3, 0.2), (0.05, 0.9, 0.0)] {
            let s = bell_diagonal(BellDiagParams::new(p.0, p.1, p.2).unwrap()).unwrap();
            assert!((e_bob.average_win_prob(&s) - e_alice.average_win_prob(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn no_flip_loses_the_doily_at_phi_plus() {
        let dg = doily_spec().unwrap().with_flip_role(None);
        let w = average_win_prob(&dg, &bell_state(BellState::PhiPlus)).unwrap();
        assert!(w < 1.0 - 1e-3);
    }

    #[test]
    fn classical_mpmg_is_eight_ninths() {
        assert_eq!(classical_value_mpmg(), Rational::new(8, 9));
    }

    #[test]
    fn mpmg_strategy_values_are_ninths_and_construction_hits_eight() {
        let spec = mpmg_spec();
        let t = |v: [i64; 3]| Some(OutcomeTriple::from_values(v).unwrap());
        // Alice fills the square row-wise, Bob column-wise; the squares differ
        // only in the bottom-right cell
        let mut alice = DeterministicStrategy {
            answers: vec![None; 6],
        };
        alice.answers[0] = t([1, 1, 1]);
        alice.answers[1] = t([1, 1, 1]);
        alice.answers[2] = t([-1, -1, 1]);
        let mut bob = DeterministicStrategy {
            answers: vec![None; 6],
        };
        bob.answers[3] = t([1, 1, -1]);
        bob.answers[4] = t([1, 1, -1]);
        bob.answers[5] = t([1, 1, -1]);
        assert_eq!(
            deterministic_value(&spec, &alice, &bob),
            Rational::new(8, 9)
        );
        let all_plus_cols = DeterministicStrategy {
            answers: vec![
                None,
                None,
                None,
                t([1, 1, -1]),
                t([-1, 1, 1]),
                t([1, -1, 1]),
            ],
        };
        let v = deterministic_value(&spec, &alice, &all_plus_cols);
        assert!(*v.denom() % 9 == 0 || 9 % *v.denom() == 0);
    }

    #[test]
    fn doily_baseline_is_thirteen_fifteenths() {
        let spec = doily_spec().unwrap();
        let base = dg_baseline_strategy(&spec);
        assert_eq!(
            classical_strategy_value_dg(&base, &base).unwrap(),
            Rational::new(13, 15)
        );
    }

    #[test]
    fn doily_all_ones_counts_negative_lines_as_losses() {
        let spec = doily_spec().unwrap();
        let ones = RandomizedStrategy::deterministic(vec![OutcomeTriple([Sign::Plus; 3]); 15]);
        let touching = spec
            .questions
            .iter()
            .filter(|q| {
                spec.lines[q.alice_line].parity == Sign::Minus
                    || spec.lines[q.bob_line].parity == Sign::Minus
            })
            .count();
        assert_eq!(touching, 36);
        let v = classical_strategy_value(&spec, &ones, &ones, InconsistentAnswers::CountAsLoss)
            .unwrap();
        assert_eq!(v, Rational::new(3, 5));
        assert!(classical_strategy_value_dg(&ones, &ones).is_err());
    }

    #[test]
    fn randomized_strategy_must_be_a_distribution() {
        let spec = doily_spec().unwrap();
        let mut base = dg_baseline_strategy(&spec);
        base.per_line[0][0].1 = Rational::new(1, 2);
        let good = dg_baseline_strategy(&spec);
        assert!(
            classical_strategy_value(&spec, &base, &good, InconsistentAnswers::CountAsLoss)
                .is_err()
        );
    }

    #[test]
    fn hill_climb_strategy_is_parity_consistent_and_beats_baseline() {
        // local search finds 80/90 = 8/9, above the 13/15 baseline; the reported
        // strategy is re-valued through the strict exact evaluator
        let spec = doily_spec().unwrap();
        let report = hill_climb_classical(&spec, 500, 3);
        let alice = RandomizedStrategy::deterministic(report.best_alice.clone());
        let bob = RandomizedStrategy::deterministic(report.best_bob.clone());
        assert_eq!(
            classical_strategy_value_dg(&alice, &bob).unwrap(),
            report.best_value()
        );
        assert!(report.best_value() >= Rational::new(13, 15));
        assert_eq!(report.best_value(), Rational::new(8, 9));
    }

    #[test]
    fn hill_climb_finds_mpmg_optimum() {
        let report = hill_climb_classical(&mpmg_spec(), 50, 1);
        assert_eq!(report.best_value(), Rational::new(8, 9));
    }
}
