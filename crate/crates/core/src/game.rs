//! Outcome statistics from the probability rule
//! `Pr(x,y,z|a,b,c,m) = Tr[(M^A_{x|a} ⊗ M^B_{y|b} ⊗ M^C_{z|c}) W]`
//! and scoring of the two tripartite signaling games.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instruments::{instrument_for, Instrument, Strategy};
use crate::party::{FreeBits, Party};
use crate::process::{validate, ProcessMatrix, ValidityReport};
use crate::tensor::tensor;

/// Boolean function of the three free bits, stored as an 8-entry truth table
/// indexed by [`FreeBits`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Predicate(u8);

impl Predicate {
    pub fn from_fn(f: impl Fn(FreeBits) -> u8) -> Self {
        Predicate(FreeBits::all().fold(0, |t, bits| t | ((f(bits) & 1) << bits.0)))
    }

    /// The free bit of `party`.
    pub fn copy(party: Party) -> Self {
        Self::from_fn(|bits| bits.of(party))
    }

    pub fn parity(p: Party, q: Party) -> Self {
        Self::from_fn(|bits| bits.of(p) ^ bits.of(q))
    }

    pub fn and(p: Party, q: Party) -> Self {
        Self::from_fn(|bits| bits.of(p) & bits.of(q))
    }

    pub fn eval(&self, bits: FreeBits) -> u8 {
        (self.0 >> bits.0) & 1
    }
}

/// For one value of `m`: which party must output what.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Round {
    pub m: u8,
    pub target: Party,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GameKind {
    #[serde(rename = "all-to-one")]
    AllToOne,
    #[serde(rename = "selective")]
    Selective,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::AllToOne => "all-to-one",
            GameKind::Selective => "selective",
        })
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-to-one" => Ok(GameKind::AllToOne),
            "selective" => Ok(GameKind::Selective),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// A game: `m` is drawn uniformly from the rounds, the free bits uniformly
/// from `{0,1}³`, and the round's target must output the predicate value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    name: String,
    rounds: Vec<Round>,
}

impl GameSpec {
    pub fn new(name: impl Into<String>, rounds: Vec<Round>) -> Result<Self> {
        for (n, r) in rounds.iter().enumerate() {
            if rounds[..n].iter().any(|q| q.m == r.m) {
                return Err(Error::InvalidRound { m: r.m });
            }
        }
        if rounds.is_empty() {
            return Err(Error::InvalidRound { m: 0 });
        }
        Ok(GameSpec {
            name: name.into(),
            rounds,
        })
    }

    /// `m ∈ {1,2,3}` selects A, B or C to output the parity of the other two inputs.
    pub fn all_to_one() -> Self {
        use Party::{A, B, C};
        let round = |m, target, p, q| Round {
            m,
            target,
            predicate: Predicate::parity(p, q),
        };
        GameSpec {
            name: GameKind::AllToOne.to_string(),
            rounds: vec![round(1, A, B, C), round(2, B, A, C), round(3, C, A, B)],
        }
    }

    /// `m ∈ {1..6}` selects an ordered (sender, receiver) pair:
    /// A→B, A→C, B→A, B→C, C→A, C→B.
    pub fn selective() -> Self {
        use Party::{A, B, C};
        let pairs = [(A, B), (A, C), (B, A), (B, C), (C, A), (C, B)];
        let rounds = pairs
            .iter()
            .zip(1u8..)
            .map(|(&(sender, receiver), m)| Round {
                m,
                target: receiver,
                predicate: Predicate::copy(sender),
            })
            .collect();
        GameSpec {
            name: GameKind::Selective.to_string(),
            rounds,
        }
    }

    pub fn of_kind(kind: GameKind) -> Self {
        match kind {
            GameKind::AllToOne => Self::all_to_one(),
            GameKind::Selective => Self::selective(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn m_alphabet(&self) -> Vec<u8> {
        self.rounds.iter().map(|r| r.m).collect()
    }

    pub fn round(&self, m: u8) -> Result<&Round> {
        self.rounds.iter().find(|r| r.m == m).ok_or(Error::InvalidRound { m })
    }
}

/// `Pr(x,y,z | a,b,c,m)` indexed by `x << 2 | y << 1 | z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution([f64; 8]);

impl JointDistribution {
    pub fn get(&self, x: u8, y: u8, z: u8) -> f64 {
        self.0[FreeBits::new(x, y, z).0 as usize]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `Pr(party's outcome = bit)`, summing over the other two outcomes.
    pub fn marginal(&self, party: Party, bit: u8) -> f64 {
        (0..8u8)
            .map(FreeBits)
            .filter(|o| o.of(party) == bit)
            .map(|o| self.0[o.0 as usize])
            .sum()
    }

    pub fn as_array(&self) -> &[f64; 8] {
        &self.0
    }
}

/// Evaluates strategies against a process matrix that has already passed validation.
#[derive(Debug, Clone)]
pub struct GameEngine<'w> {
    w: &'w ProcessMatrix,
}

impl<'w> GameEngine<'w> {
    pub fn new(w: &'w ProcessMatrix, tol: f64) -> Result<Self> {
        let report = validate(w, tol)?;
        if !report.overall {
            return Err(Error::InvalidProcess(describe_failure(&report)));
        }
        Ok(GameEngine { w })
    }

    pub fn joint_distribution(&self, strategy: &Strategy, m: u8, bits: FreeBits) -> Result<JointDistribution> {
        strategy.check(&[m])?;
        self.joint_unchecked(strategy, m, bits)
    }

    fn joint_unchecked(&self, strategy: &Strategy, m: u8, bits: FreeBits) -> Result<JointDistribution> {
        let instruments = Party::ALL
            .iter()
            .map(|&p| instrument_for(strategy.program(p), m, bits.of(p)))
            .collect::<Result<Vec<Instrument>>>()?;
        let mut probs = [0.0; 8];
        for (n, p) in probs.iter_mut().enumerate() {
            let outcomes = FreeBits(n as u8);
            let factors: Vec<_> = Party::ALL
                .iter()
                .map(|&party| {
                    instruments[party.index()]
                        .element(outcomes.of(party))
                        .expect("two-outcome instrument")
                        .clone()
                })
                .collect();
            let op = tensor(&factors)?;
            *p = op.trace_product(self.w.matrix())?.re;
        }
        Ok(JointDistribution(probs))
    }

    /// Success probability per `m`, averaged uniformly over the free bits.
    pub fn per_m_scores(&self, strategy: &Strategy, game: &GameSpec) -> Result<BTreeMap<u8, f64>> {
        strategy.check(&game.m_alphabet())?;
        game.rounds()
            .iter()
            .map(|round| {
                let mut total = 0.0;
                for bits in FreeBits::all() {
                    let dist = self.joint_unchecked(strategy, round.m, bits)?;
                    total += dist.marginal(round.target, round.predicate.eval(bits));
                }
                Ok((round.m, total / 8.0))
            })
            .collect()
    }

    pub fn success_probability(&self, strategy: &Strategy, game: &GameSpec) -> Result<f64> {
        let per_m = self.per_m_scores(strategy, game)?;
        Ok(per_m.values().sum::<f64>() / per_m.len() as f64)
    }

    pub fn score(&self, strategy: &Strategy, game: &GameSpec) -> Result<ScoreReport> {
        let per_m = self.per_m_scores(strategy, game)?;
        let overall = per_m.values().sum::<f64>() / per_m.len() as f64;
        Ok(ScoreReport {
            game: game.name().to_string(),
            per_m,
            overall,
        })
    }
}

fn describe_failure(r: &ValidityReport) -> String {
    let mut parts = Vec::new();
    if !r.psd_ok {
        parts.push(format!("minimum eigenvalue {:e}", r.min_eigenvalue));
    }
    if !r.trace_ok {
        parts.push(format!("trace {} (expected {})", r.trace, r.expected));
    }
    if !r.terms_ok {
        let words: Vec<String> = r.offending_words.iter().map(|w| w.to_string()).collect();
        parts.push(format!("disallowed terms {}", words.join(",")));
    }
    parts.join("; ")
}

/// `{"game":"all-to-one","per_m":{"1":1.0,...},"overall":1.0}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub game: String,
    pub per_m: BTreeMap<u8, f64>,
    pub overall: f64,
}

pub fn joint_distribution(
    w: &ProcessMatrix,
    strategy: &Strategy,
    m: u8,
    a: u8,
    b: u8,
    c: u8,
) -> Result<JointDistribution> {
    GameEngine::new(w, crate::process::DEFAULT_TOL)?.joint_distribution(strategy, m, FreeBits::new(a, b, c))
}

pub fn success_probability(w: &ProcessMatrix, strategy: &Strategy, game: &GameSpec) -> Result<f64> {
    GameEngine::new(w, crate::process::DEFAULT_TOL)?.success_probability(strategy, game)
}

pub fn per_m_scores(w: &ProcessMatrix, strategy: &Strategy, game: &GameSpec) -> Result<BTreeMap<u8, f64>> {
    GameEngine::new(w, crate::process::DEFAULT_TOL)?.per_m_scores(strategy, game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::{all_to_one_strategy, selective_strategy, Axis, KExpr, PartyProgram};
    use crate::process::{build_w, DEFAULT_TOL};
    use crate::tensor::ComplexMatrix;

    /// Every party measures z and prepares |0⟩ in every round.
    fn silent_strategy(rounds: &[u8]) -> Strategy {
        let programs = Party::ALL
            .iter()
            .map(|&p| {
                rounds
                    .iter()
                    .fold(PartyProgram::new(p), |prog, &m| prog.with_rule(m, Axis::Z, KExpr::ZERO))
            })
            .collect();
        Strategy::new(programs).unwrap()
    }

    #[test]
    fn predicates() {
        let par = Predicate::parity(Party::B, Party::C);
        assert_eq!(par.eval(FreeBits::new(0, 1, 0)), 1);
        assert_eq!(par.eval(FreeBits::new(1, 1, 1)), 0);
        assert_eq!(Predicate::copy(Party::A).eval(FreeBits::new(1, 0, 0)), 1);
        assert_eq!(Predicate::and(Party::A, Party::B).eval(FreeBits::new(1, 1, 0)), 1);
        assert_eq!(Predicate::and(Party::A, Party::B).eval(FreeBits::new(1, 0, 1)), 0);
    }

    #[test]
    fn game_alphabets() {
        assert_eq!(GameSpec::all_to_one().m_alphabet(), vec![1, 2, 3]);
        assert_eq!(GameSpec::selective().m_alphabet(), vec![1, 2, 3, 4, 5, 6]);
        let sel = GameSpec::selective();
        let r4 = sel.round(4).unwrap();
        assert_eq!(r4.target, Party::C);
        assert_eq!(r4.predicate, Predicate::copy(Party::B));
        assert!(sel.round(7).is_err());
    }

    #[test]
    fn duplicate_rounds_rejected() {
        let r = Round {
            m: 1,
            target: Party::A,
            predicate: Predicate::copy(Party::B),
        };
        assert!(GameSpec::new("dup", vec![r, r]).is_err());
        assert!(GameSpec::new("empty", vec![]).is_err());
    }

    #[test]
    fn all_to_one_first_round_closed_form() {
        let w = build_w();
        let s = all_to_one_strategy();
        for bits in FreeBits::all() {
            let (a, b, c) = (bits.of(Party::A), bits.of(Party::B), bits.of(Party::C));
            let d = joint_distribution(&w, &s, 1, a, b, c).unwrap();
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let sign = if (x + b + c) % 2 == 0 { 1.0 } else { -1.0 };
                        assert!((d.get(x, y, z) - (1.0 + sign) / 8.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_wins() {
        let w = build_w();
        let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
        let p = engine.score(&all_to_one_strategy(), &GameSpec::all_to_one()).unwrap();
        assert!((p.overall - 1.0).abs() < 1e-9);
        assert!(p.per_m.values().all(|v| (v - 1.0).abs() < 1e-9));
        let q = engine.score(&selective_strategy(), &GameSpec::selective()).unwrap();
        assert!((q.overall - 1.0).abs() < 1e-9);
        assert_eq!(q.per_m.len(), 6);
        assert!(q.per_m.values().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn silent_strategy_scores_half() {
        // Frozen from the Pauli-expansion oracle below: the distribution is
        // (1 + (−1)^{y+z})/8 independent of the free bits.
        let w = build_w();
        let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
        let per_m = engine
            .per_m_scores(&silent_strategy(&[1, 2, 3]), &GameSpec::all_to_one())
            .unwrap();
        assert_eq!(per_m.len(), 3);
        assert!(per_m.values().all(|v| (v - 0.5).abs() < 1e-12));
        let p = engine
            .success_probability(&silent_strategy(&[1, 2, 3]), &GameSpec::all_to_one())
            .unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn first_round_only_target_marginal_moves() {
        let w = build_w();
        let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
        let s = all_to_one_strategy();
        for bits in FreeBits::all() {
            let d = engine.joint_distribution(&s, 1, bits).unwrap();
            assert!((d.marginal(Party::B, 0) - 0.5).abs() < 1e-9);
            assert!((d.marginal(Party::C, 0) - 0.5).abs() < 1e-9);
            let parity = bits.of(Party::B) ^ bits.of(Party::C);
            assert!((d.marginal(Party::A, parity) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_process_rejected() {
        let w = ProcessMatrix::new(ComplexMatrix::zeros(64)).unwrap();
        assert!(matches!(
            GameEngine::new(&w, DEFAULT_TOL),
            Err(Error::InvalidProcess(_))
        ));
    }

    #[test]
    fn missing_round_rejected() {
        let w = build_w();
        let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
        let err = engine
            .score(&all_to_one_strategy(), &GameSpec::selective())
            .unwrap_err();
        assert!(matches!(err, Error::MissingRule { m: 4, .. }));
    }

    #[test]
    fn score_report_json() {
        let w = build_w();
        let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
        let r = engine.score(&all_to_one_strategy(), &GameSpec::all_to_one()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"{"game":"all-to-one","per_m":{"1":"#), "{json}");
        let back: ScoreReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    /// Independent route: expand W in the Pauli basis and use
    /// `Tr[P σ] = (−1)^i δ` for the single-qubit projectors, never forming 64×64 operators.
    mod oracle {
        use super::*;
        use crate::instruments::RMapParams;
        use crate::process::{O1_WORD, O2_WORD, O3_WORD};
        use crate::tensor::{Pauli, PauliWord};

        fn projector_overlap(axis: Pauli, bit: u8, sigma: Pauli) -> f64 {
            let sign = if bit == 0 { 1.0 } else { -1.0 };
            match sigma {
                Pauli::I => 1.0,
                s if s == axis => sign,
                _ => 0.0,
            }
        }

        pub fn probability(params: [RMapParams; 3]) -> f64 {
            let words = [PauliWord::IDENTITY, O1_WORD, O2_WORD, O3_WORD];
            words
                .iter()
                .map(|w| {
                    let mut term = 0.125;
                    for (party, p) in Party::ALL.iter().zip(&params) {
                        let (inp, out) = w.party_labels(*party);
                        term *= projector_overlap(p.alpha().pauli(), p.outcome(), inp);
                        term *= projector_overlap(Pauli::Z, p.prepared(), out);
                    }
                    term
                })
                .sum()
        }

        #[test]
        fn engine_agrees_with_oracle() {
            let w = build_w();
            let engine = GameEngine::new(&w, DEFAULT_TOL).unwrap();
            for (s, game) in [
                (all_to_one_strategy(), GameSpec::all_to_one()),
                (selective_strategy(), GameSpec::selective()),
                (silent_strategy(&[1, 2, 3]), GameSpec::all_to_one()),
            ] {
                for m in game.m_alphabet() {
                    for bits in FreeBits::all() {
                        let d = engine.joint_distribution(&s, m, bits).unwrap();
                        for outcomes in FreeBits::all() {
                            let params =
                                Party::ALL.map(|p| s.program(p).params(m, bits.of(p), outcomes.of(p)).unwrap());
                            let expected = probability(params);
                            let got = d.as_array()[outcomes.0 as usize];
                            assert!((got - expected).abs() < 1e-12, "m={m} {bits:?} {outcomes:?}");
                        }
                    }
                }
            }
        }
    }
}
