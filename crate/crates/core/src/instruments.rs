//! Local operations in Choi–Jamiołkowski form.
//!
//! Every operation used here measures the input qubit along an axis α,
//! records the outcome `i`, and re-prepares the output qubit in the z-basis
//! state `|k⟩`:
//!
//! ```text
//! R^α_{i,k} = (𝟙 + (−1)^i σ_α)/2  ⊗  (𝟙 + (−1)^k σ_z)/2
//! ```
//!
//! A [`PartyProgram`] picks α and the rule for `k` for every value of the
//! shared variable `m`; `k` may depend on the party's free bit and on the
//! outcome just obtained.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::party::Party;
use crate::tensor::{hermitian_eigenvalues, partial_trace, pauli, ComplexMatrix, Pauli};

/// Tolerance for the CP and CPTP checks.
pub const INSTRUMENT_TOL: f64 = 1e-10;

/// Measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

fn check_bit(b: u8) -> Result<u8> {
    if b <= 1 {
        Ok(b)
    } else {
        Err(Error::InvalidBit(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RMapParams {
    alpha: Axis,
    i: u8,
    k: u8,
}

impl RMapParams {
    pub fn new(alpha: Axis, i: u8, k: u8) -> Result<Self> {
        Ok(RMapParams {
            alpha,
            i: check_bit(i)?,
            k: check_bit(k)?,
        })
    }

    pub fn alpha(&self) -> Axis {
        self.alpha
    }

    pub fn outcome(&self) -> u8 {
        self.i
    }

    pub fn prepared(&self) -> u8 {
        self.k
    }
}

/// `(𝟙 + (−1)^bit σ)/2`
fn projector(axis: Pauli, bit: u8) -> ComplexMatrix {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    (&pauli(Pauli::I) + &pauli(axis).scale_real(sign)).scale_real(0.5)
}

/// CJ matrix on `H₁ ⊗ H₂` of "measure α with outcome i, prepare |k⟩".
pub fn r_map(p: &RMapParams) -> ComplexMatrix {
    projector(p.alpha.pauli(), p.i).kron(&projector(Pauli::Z, p.k))
}

/// A GF(2)-affine bit function `k = constant ⊕ [free] ⊕ [outcome]`.
///
/// Written as `0`, `1`, `f`, `o`, `f^o`, ... where `f` is the free bit and `o`
/// the measurement outcome. With a party in context its own variable names
/// are accepted too (`a`/`x` for A, `b`/`y` for B, `c`/`z` for C), and `+`
/// may stand in for `^`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KExpr {
    pub constant: u8,
    pub free: bool,
    pub outcome: bool,
}

impl KExpr {
    pub const ZERO: KExpr = KExpr {
        constant: 0,
        free: false,
        outcome: false,
    };
    pub const FREE: KExpr = KExpr {
        constant: 0,
        free: true,
        outcome: false,
    };
    pub const OUTCOME: KExpr = KExpr {
        constant: 0,
        free: false,
        outcome: true,
    };

    /// All eight expressions in the grammar.
    pub fn all() -> impl Iterator<Item = KExpr> {
        (0u8..8).map(|n| KExpr {
            constant: n & 1,
            free: n & 2 != 0,
            outcome: n & 4 != 0,
        })
    }

    pub fn eval(&self, free: u8, outcome: u8) -> u8 {
        let mut k = self.constant;
        if self.free {
            k ^= free & 1;
        }
        if self.outcome {
            k ^= outcome & 1;
        }
        k
    }

    pub fn parse(s: &str, party: Option<Party>) -> Result<Self> {
        let bad = || Error::InvalidKExpr(s.to_string());
        let mut expr = KExpr::ZERO;
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad());
        }
        for token in cleaned.split(['^', '+']) {
            let mut chars = token.chars();
            let (Some(ch), None) = (chars.next(), chars.next()) else {
                return Err(bad());
            };
            match ch {
                '0' => {}
                '1' => expr.constant ^= 1,
                'f' => expr.free = !expr.free,
                'o' => expr.outcome = !expr.outcome,
                c if party.is_some_and(|p| p.free_name() == c) => expr.free = !expr.free,
                c if party.is_some_and(|p| p.outcome_name() == c) => expr.outcome = !expr.outcome,
                _ => return Err(bad()),
            }
        }
        Ok(expr)
    }

    /// Rendering with the party's own variable names, e.g. `b^y`.
    pub fn to_party_string(&self, party: Party) -> String {
        self.render(party.free_name(), party.outcome_name())
    }

    fn render(&self, f: char, o: char) -> String {
        let mut parts = Vec::new();
        if self.constant == 1 {
            parts.push("1".to_string());
        }
        if self.free {
            parts.push(f.to_string());
        }
        if self.outcome {
            parts.push(o.to_string());
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("^")
        }
    }
}

impl fmt::Display for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render('f', 'o'))
    }
}

impl FromStr for KExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KExpr::parse(s, None)
    }
}

/// One row of a party's strategy: the axis it measures and how it re-prepares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub alpha: Axis,
    pub k: KExpr,
}

/// Map from shared `m` to [`Rule`] for one party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ProgramFile", try_from = "ProgramFile")]
pub struct PartyProgram {
    party: Party,
    rules: BTreeMap<u8, Rule>,
}

impl PartyProgram {
    pub fn new(party: Party) -> Self {
        PartyProgram {
            party,
            rules: BTreeMap::new(),
        }
    }

    pub fn with_rule(mut self, m: u8, alpha: Axis, k: KExpr) -> Self {
        self.rules.insert(m, Rule { alpha, k });
        self
    }

    /// Builds a program from `(m, axis, k-expression)` rows written with the party's own names.
    pub fn from_rows(party: Party, rows: &[(u8, Axis, &str)]) -> Result<Self> {
        let mut program = PartyProgram::new(party);
        for &(m, alpha, k) in rows {
            if program.rules.contains_key(&m) {
                return Err(Error::DuplicateRule { party, m });
            }
            program.rules.insert(
                m,
                Rule {
                    alpha,
                    k: KExpr::parse(k, Some(party))?,
                },
            );
        }
        Ok(program)
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn rule(&self, m: u8) -> Option<&Rule> {
        self.rules.get(&m)
    }

    pub fn rounds(&self) -> impl Iterator<Item = u8> + '_ {
        self.rules.keys().copied()
    }

    /// R-map parameters for a given round, free bit and outcome.
    pub fn params(&self, m: u8, free: u8, outcome: u8) -> Result<RMapParams> {
        let rule = self.rule(m).ok_or(Error::MissingRule { party: self.party, m })?;
        RMapParams::new(rule.alpha, check_bit(outcome)?, rule.k.eval(check_bit(free)?, outcome))
    }
}

/// JSON form: `{"party":"A","rules":[{"m":1,"alpha":"z","k":"a"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramFile {
    pub party: Party,
    pub rules: Vec<RuleFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    pub m: u8,
    pub alpha: Axis,
    pub k: String,
}

impl From<PartyProgram> for ProgramFile {
    fn from(p: PartyProgram) -> Self {
        ProgramFile {
            party: p.party,
            rules: p
                .rules
                .iter()
                .map(|(&m, r)| RuleFile {
                    m,
                    alpha: r.alpha,
                    k: r.k.to_party_string(p.party),
                })
                .collect(),
        }
    }
}

impl TryFrom<ProgramFile> for PartyProgram {
    type Error = Error;

    fn try_from(f: ProgramFile) -> Result<Self> {
        let rows: Vec<(u8, Axis, &str)> = f.rules.iter().map(|r| (r.m, r.alpha, r.k.as_str())).collect();
        PartyProgram::from_rows(f.party, &rows)
    }
}

/// Outcome-indexed family of CJ matrices on `H₁ ⊗ H₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    elements: Vec<(u8, ComplexMatrix)>,
}

impl Instrument {
    pub fn new(elements: Vec<(u8, ComplexMatrix)>) -> Result<Self> {
        for (n, (outcome, _)) in elements.iter().enumerate() {
            if elements[..n].iter().any(|(o, _)| o == outcome) {
                return Err(Error::DuplicateOutcome(*outcome));
            }
        }
        Ok(Instrument { elements })
    }

    pub fn elements(&self) -> &[(u8, ComplexMatrix)] {
        &self.elements
    }

    pub fn element(&self, outcome: u8) -> Option<&ComplexMatrix> {
        self.elements.iter().find(|(o, _)| *o == outcome).map(|(_, m)| m)
    }
}

/// The two-outcome instrument a party applies for shared value `m` and free bit `free`.
pub fn instrument_for(program: &PartyProgram, m: u8, free: u8) -> Result<Instrument> {
    let elements = (0..2u8)
        .map(|outcome| Ok((outcome, r_map(&program.params(m, free, outcome)?))))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(elements)
}

fn is_psd(m: &ComplexMatrix) -> bool {
    match hermitian_eigenvalues(m) {
        Ok(ev) => ev.first().is_none_or(|&l| l >= -INSTRUMENT_TOL),
        Err(_) => false,
    }
}

/// Every element is positive semi-definite (vacuously true when empty).
pub fn is_cp(inst: &Instrument) -> bool {
    inst.elements.iter().all(|(_, m)| is_psd(m))
}

/// The summed element traces to `𝟙₂` over the output factor.
pub fn is_cptp_sum(inst: &Instrument) -> bool {
    let Some((_, first)) = inst.elements.first() else {
        return false;
    };
    if inst.elements.iter().any(|(_, m)| m.dim() != 4) {
        return false;
    }
    let sum = inst.elements[1..].iter().fold(first.clone(), |acc, (_, m)| &acc + m);
    partial_trace(&sum, &[2, 2], &[1])
        .map(|marginal| marginal.approx_eq(&ComplexMatrix::identity(2), INSTRUMENT_TOL))
        .unwrap_or(false)
}

/// Programs for A, B and C, in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    programs: [PartyProgram; 3],
}

impl Strategy {
    /// Accepts the three programs in any order, one per party.
    pub fn new(programs: Vec<PartyProgram>) -> Result<Self> {
        let parties: Vec<String> = programs.iter().map(|p| p.party.to_string()).collect();
        let describe = || {
            Error::ProgramParties(if parties.is_empty() {
                "none".into()
            } else {
                parties.join(", ")
            })
        };
        let mut slots: [Option<PartyProgram>; 3] = [None, None, None];
        for p in programs {
            let slot = &mut slots[p.party.index()];
            if slot.is_some() {
                return Err(describe());
            }
            *slot = Some(p);
        }
        match slots {
            [Some(a), Some(b), Some(c)] => Ok(Strategy { programs: [a, b, c] }),
            _ => Err(describe()),
        }
    }

    pub fn program(&self, party: Party) -> &PartyProgram {
        &self.programs[party.index()]
    }

    pub fn programs(&self) -> &[PartyProgram; 3] {
        &self.programs
    }

    /// Checks that every party has a CP, trace-preserving instrument for each
    /// listed round and both free-bit values.
    pub fn check(&self, rounds: &[u8]) -> Result<()> {
        for program in &self.programs {
            for &m in rounds {
                for free in 0..2u8 {
                    let inst = instrument_for(program, m, free)?;
                    if !is_cp(&inst) || !is_cptp_sum(&inst) {
                        return Err(Error::NotCptp {
                            party: program.party,
                            m,
                            free,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.programs).expect("programs serialize")
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.programs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let programs = Vec::<PartyProgram>::deserialize(d)?;
        Strategy::new(programs).map_err(serde::de::Error::custom)
    }
}

/// Strategies that win the all-to-one game.
pub fn all_to_one_strategy() -> Strategy {
    use Axis::{X, Y, Z};
    let a = PartyProgram::from_rows(Party::A, &[(1, Z, "a"), (2, Z, "a"), (3, Z, "a^x")]);
    let b = PartyProgram::from_rows(Party::B, &[(1, X, "b^y"), (2, Z, "b"), (3, Y, "b^y")]);
    let c = PartyProgram::from_rows(Party::C, &[(1, Y, "c^z"), (2, Z, "c^z"), (3, X, "c")]);
    Strategy::new(vec![a.unwrap(), b.unwrap(), c.unwrap()]).expect("static table")
}

/// Strategies that win the selective signaling game.
pub fn selective_strategy() -> Strategy {
    use Axis::{X, Y, Z};
    let a = PartyProgram::from_rows(
        Party::A,
        &[
            (1, Z, "a"),
            (2, Z, "a^x"),
            (3, Z, "a"),
            (4, Z, "x"),
            (5, Z, "x"),
            (6, Z, "0"),
        ],
    );
    let b = PartyProgram::from_rows(
        Party::B,
        &[
            (1, Z, "b"),
            (2, Y, "y"),
            (3, X, "y^b"),
            (4, Y, "y^b"),
            (5, X, "y"),
            (6, Z, "b"),
        ],
    );
    let c = PartyProgram::from_rows(
        Party::C,
        &[
            (1, Z, "z"),
            (2, X, "c"),
            (3, Y, "z"),
            (4, X, "c"),
            (5, Y, "z^c"),
            (6, Z, "z^c"),
        ],
    );
    Strategy::new(vec![a.unwrap(), b.unwrap(), c.unwrap()]).expect("static table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn params(alpha: Axis, i: u8, k: u8) -> RMapParams {
        RMapParams::new(alpha, i, k).unwrap()
    }

    #[test]
    fn rmap_z00_is_first_basis_projector() {
        let m = r_map(&params(Axis::Z, 0, 0));
        let mut expected = ComplexMatrix::zeros(4);
        expected.set(0, 0, Complex64::new(1.0, 0.0));
        assert!(m.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn rmap_x10_is_minus_state_times_zero() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = ComplexMatrix::outer(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
        let zero = ComplexMatrix::outer(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(r_map(&params(Axis::X, 1, 0)).approx_eq(&minus.kron(&zero), 1e-15));
    }

    #[test]
    fn rmap_outcomes_complete() {
        for alpha in Axis::ALL {
            for k in 0..2 {
                let sum = &r_map(&params(alpha, 0, k)) + &r_map(&params(alpha, 1, k));
                let pk = projector(Pauli::Z, k);
                assert!(sum.approx_eq(&ComplexMatrix::identity(2).kron(&pk), 1e-15));
                let marginal = partial_trace(&sum, &[2, 2], &[1]).unwrap();
                assert!(marginal.approx_eq(&ComplexMatrix::identity(2), 1e-15));
            }
        }
    }

    #[test]
    fn rmap_is_rank_one_unit_trace() {
        for alpha in Axis::ALL {
            for i in 0..2 {
                for k in 0..2 {
                    let ev = hermitian_eigenvalues(&r_map(&params(alpha, i, k))).unwrap();
                    assert!(ev[..3].iter().all(|x| x.abs() < 1e-10));
                    assert!((ev[3] - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rmap_params_reject_non_bits() {
        assert_eq!(RMapParams::new(Axis::Z, 2, 0), Err(Error::InvalidBit(2)));
        assert_eq!(RMapParams::new(Axis::Z, 0, 7), Err(Error::InvalidBit(7)));
    }

    #[test]
    fn kexpr_grammar() {
        assert_eq!("0".parse::<KExpr>().unwrap(), KExpr::ZERO);
        assert_eq!("f".parse::<KExpr>().unwrap(), KExpr::FREE);
        assert_eq!("o".parse::<KExpr>().unwrap(), KExpr::OUTCOME);
        let fo: KExpr = "f^o".parse().unwrap();
        assert_eq!((fo.eval(1, 0), fo.eval(1, 1), fo.eval(0, 1)), (1, 0, 1));
        assert_eq!("1".parse::<KExpr>().unwrap().eval(0, 0), 1);
        assert_eq!(KExpr::parse("b+y", Some(Party::B)).unwrap(), fo);
        assert_eq!(KExpr::parse("y^b", Some(Party::B)).unwrap(), fo);
        assert_eq!(KExpr::parse("x", Some(Party::A)).unwrap(), KExpr::OUTCOME);
        assert!(KExpr::parse("x", Some(Party::B)).is_err());
        assert!("".parse::<KExpr>().is_err());
        assert!("f^^o".parse::<KExpr>().is_err());
        assert!("ab".parse::<KExpr>().is_err());
        for e in KExpr::all() {
            assert_eq!(e.to_string().parse::<KExpr>().unwrap(), e);
            assert_eq!(KExpr::parse(&e.to_party_string(Party::C), Some(Party::C)).unwrap(), e);
        }
    }

    #[test]
    fn table_one_party_a_first_round() {
        let s = all_to_one_strategy();
        let inst = instrument_for(s.program(Party::A), 1, 1).unwrap();
        assert!(inst.element(0).unwrap().approx_eq(&r_map(&params(Axis::Z, 0, 1)), 0.0));
        assert!(inst.element(1).unwrap().approx_eq(&r_map(&params(Axis::Z, 1, 1)), 0.0));
    }

    #[test]
    fn table_one_party_b_first_round() {
        let s = all_to_one_strategy();
        let inst = instrument_for(s.program(Party::B), 1, 1).unwrap();
        assert!(inst.element(0).unwrap().approx_eq(&r_map(&params(Axis::X, 0, 1)), 0.0));
        assert!(inst.element(1).unwrap().approx_eq(&r_map(&params(Axis::X, 1, 0)), 0.0));
    }

    #[test]
    fn table_two_party_a_sixth_round() {
        let s = selective_strategy();
        for a in 0..2 {
            let inst = instrument_for(s.program(Party::A), 6, a).unwrap();
            assert!(inst.element(0).unwrap().approx_eq(&r_map(&params(Axis::Z, 0, 0)), 0.0));
            assert!(inst.element(1).unwrap().approx_eq(&r_map(&params(Axis::Z, 1, 0)), 0.0));
        }
    }

    #[test]
    fn instrument_for_unknown_round() {
        let s = all_to_one_strategy();
        assert_eq!(
            instrument_for(s.program(Party::C), 4, 0),
            Err(Error::MissingRule { party: Party::C, m: 4 })
        );
    }

    #[test]
    fn cp_checks() {
        let neg = Instrument::new(vec![(0, r_map(&params(Axis::Z, 0, 0)).scale_real(-1.0))]).unwrap();
        assert!(!is_cp(&neg));
        assert!(is_cp(&Instrument::new(vec![]).unwrap()));
    }

    #[test]
    fn cptp_checks() {
        for k0 in 0..2 {
            for k1 in 0..2 {
                let inst = Instrument::new(vec![
                    (0, r_map(&params(Axis::Z, 0, k0))),
                    (1, r_map(&params(Axis::Z, 1, k1))),
                ])
                .unwrap();
                assert!(is_cptp_sum(&inst));
            }
        }
        let single = Instrument::new(vec![(0, r_map(&params(Axis::Z, 0, 0)))]).unwrap();
        assert!(!is_cptp_sum(&single));
        assert!(!is_cptp_sum(&Instrument::new(vec![]).unwrap()));
    }

    #[test]
    fn duplicate_outcomes_rejected() {
        let m = r_map(&params(Axis::Z, 0, 0));
        assert_eq!(
            Instrument::new(vec![(0, m.clone()), (0, m)]),
            Err(Error::DuplicateOutcome(0))
        );
    }

    #[test]
    fn table_instruments_are_cptp() {
        for (s, rounds) in [(all_to_one_strategy(), 1..=3u8), (selective_strategy(), 1..=6u8)] {
            let rounds: Vec<u8> = rounds.collect();
            assert!(s.check(&rounds).is_ok());
        }
    }

    #[test]
    fn strategy_requires_each_party_once() {
        let a = PartyProgram::new(Party::A);
        let b = PartyProgram::new(Party::B);
        assert!(matches!(
            Strategy::new(vec![a.clone(), b.clone()]),
            Err(Error::ProgramParties(_))
        ));
        assert!(matches!(
            Strategy::new(vec![a.clone(), b, a]),
            Err(Error::ProgramParties(_))
        ));
    }

    #[test]
    fn duplicate_rows_rejected() {
        assert_eq!(
            PartyProgram::from_rows(Party::A, &[(1, Axis::Z, "a"), (1, Axis::X, "0")]),
            Err(Error::DuplicateRule { party: Party::A, m: 1 })
        );
    }

    #[test]
    fn strategy_json_roundtrip() {
        let s = selective_strategy();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains(r#"{"m":2,"alpha":"y","k":"y"}"#), "{json}");
        let back: Strategy = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
