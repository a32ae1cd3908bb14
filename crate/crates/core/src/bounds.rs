//! Classical bounds under definite causal order, by exhaustive enumeration.
//!
//! Each laboratory opens once and so receives a single message (one bit by
//! default) from the parties before it. A fixed total order of A, B, C lets
//! the second party receive a function of the first party's free bit and
//! the third a function of both earlier free bits. Only the target's output
//! is scored, so for a fixed order and `m` it suffices to enumerate the
//! target's reception function together with its output function.
//!
//! * convex-definite: one order for all `m` (mixtures cannot beat the best order),
//! * adaptive-definite: a fixed first party, which picks the order of the
//!   other two after seeing `m`.
//!
//! All values are exact rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::party::{FreeBits, Party};

/// An exact rational printed as `"num/den"`, or `"num"` when integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational64);

impl Exact {
    pub fn new(numer: i64, denom: i64) -> Self {
        Exact(Rational64::new(numer, denom))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Exact {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownLabel(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<i64>().map_err(|_| bad())?,
                d.trim().parse::<i64>().map_err(|_| bad())?,
            ),
            None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
        };
        if d == 0 {
            return Err(bad());
        }
        Ok(Exact::new(n, d))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A causal order of the three laboratories, earliest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TotalOrder(pub [Party; 3]);

impl TotalOrder {
    /// The six permutations in lexicographic order.
    pub fn all() -> [TotalOrder; 6] {
        use Party::{A, B, C};
        [
            TotalOrder([A, B, C]),
            TotalOrder([A, C, B]),
            TotalOrder([B, A, C]),
            TotalOrder([B, C, A]),
            TotalOrder([C, A, B]),
            TotalOrder([C, B, A]),
        ]
    }

    /// The two orders that start with `first`.
    pub fn starting_with(first: Party) -> impl Iterator<Item = TotalOrder> {
        Self::all().into_iter().filter(move |o| o.0[0] == first)
    }

    pub fn position(&self, party: Party) -> usize {
        self.0.iter().position(|&p| p == party).expect("permutation")
    }

    pub fn first(&self) -> Party {
        self.0[0]
    }
}

impl fmt::Display for TotalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} < {} < {}", self.0[0], self.0[1], self.0[2])
    }
}

/// Size of the single message a laboratory can receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalModel {
    message_bits: u32,
}

impl Default for ClassicalModel {
    fn default() -> Self {
        ClassicalModel { message_bits: 1 }
    }
}

impl ClassicalModel {
    /// One or two bits. Two bits already carry both earlier free bits, so
    /// larger messages change nothing.
    pub fn with_message_bits(bits: u32) -> Result<Self> {
        match bits {
            1 | 2 => Ok(ClassicalModel { message_bits: bits }),
            other => Err(Error::MessageBits(other)),
        }
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    fn alphabet(&self) -> usize {
        1 << self.message_bits
    }

    /// Best score of the target, over all reception and output functions,
    /// counted in the 8 free-bit assignments.
    fn best_count(&self, order: TotalOrder, round_target: Party, predicate: impl Fn(FreeBits) -> u8) -> u32 {
        let s = self.alphabet();
        let pos = order.position(round_target);
        let earlier: Vec<Party> = order.0[..pos].to_vec();
        // reception depends on the free bits of all earlier parties
        let reception_inputs = 1usize << earlier.len();
        let reception_count = s.pow(reception_inputs as u32);
        let output_count = 1usize << (2 * s);

        let bits_list: Vec<FreeBits> = FreeBits::all().collect();
        let required: Vec<u8> = bits_list.iter().map(|&b| predicate(b)).collect();
        let own: Vec<usize> = bits_list.iter().map(|b| b.of(round_target) as usize).collect();
        let seen: Vec<usize> = bits_list
            .iter()
            .map(|b| earlier.iter().fold(0usize, |acc, &p| (acc << 1) | b.of(p) as usize))
            .collect();

        let mut best = 0;
        for reception in 0..reception_count {
            let symbol: Vec<usize> = seen
                .iter()
                .map(|&input| (reception / s.pow(input as u32)) % s)
                .collect();
            for output in 0..output_count {
                let wins = (0..8)
                    .filter(|&n| ((output >> (own[n] * s + symbol[n])) & 1) as u8 == required[n])
                    .count() as u32;
                best = best.max(wins);
            }
        }
        best
    }

    pub fn max_success_at_m(&self, order: TotalOrder, game: &GameSpec, m: u8) -> Result<Exact> {
        let round = game.round(m)?;
        let best = self.best_count(order, round.target, |b| round.predicate.eval(b));
        Ok(Exact::new(best as i64, 8))
    }

    fn table(&self, game: &GameSpec) -> Result<Vec<OrderRow>> {
        TotalOrder::all()
            .into_iter()
            .map(|order| {
                let per_m = game
                    .m_alphabet()
                    .into_iter()
                    .map(|m| Ok((m, self.max_success_at_m(order, game, m)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(OrderRow { order, per_m })
            })
            .collect()
    }

    pub fn convex_bound(&self, game: &GameSpec) -> Result<BoundReport> {
        let table = self.table(game)?;
        let mut best: Option<(&OrderRow, Exact)> = None;
        for row in &table {
            let value = mean(row.per_m.values().copied());
            let better = match best {
                None => true,
                Some((b, bv)) => value > bv || (value == bv && row.per_m.values().cmp(b.per_m.values()).is_gt()),
            };
            if better {
                best = Some((row, value));
            }
        }
        let (row, value) = best.expect("six orders");
        Ok(BoundReport {
            model: CausalModel::Convex,
            game: game.name().to_string(),
            value,
            witness: Witness::Convex { order: row.order },
            per_m: row.per_m.clone(),
            table,
        })
    }

    pub fn adaptive_bound(&self, game: &GameSpec) -> Result<BoundReport> {
        // first party, per-m orders, per-m values, mean
        type Candidate = (Party, BTreeMap<u8, TotalOrder>, BTreeMap<u8, Exact>, Exact);
        let table = self.table(game)?;
        let mut best: Option<Candidate> = None;
        for first in Party::ALL {
            let rows: Vec<&OrderRow> = table.iter().filter(|r| r.order.first() == first).collect();
            let mut orders = BTreeMap::new();
            let mut per_m = BTreeMap::new();
            for m in game.m_alphabet() {
                let choice = rows
                    .iter()
                    .copied()
                    .reduce(|a, b| if b.per_m[&m] > a.per_m[&m] { b } else { a })
                    .expect("two orders per first party");
                orders.insert(m, choice.order);
                per_m.insert(m, choice.per_m[&m]);
            }
            let value = mean(per_m.values().copied());
            if best.as_ref().is_none_or(|b| value > b.3) {
                best = Some((first, orders, per_m, value));
            }
        }
        let (first, orders, per_m, value) = best.expect("three parties");
        Ok(BoundReport {
            model: CausalModel::Adaptive,
            game: game.name().to_string(),
            value,
            witness: Witness::Adaptive { first, orders },
            per_m,
            table,
        })
    }

    pub fn verify_half_or_one(&self, game: &GameSpec) -> Result<bool> {
        let half = Exact::new(1, 2);
        let one = Exact::new(1, 1);
        Ok(self
            .table(game)?
            .iter()
            .flat_map(|row| row.per_m.values())
            .all(|&v| v == half || v == one))
    }
}

fn mean(values: impl Iterator<Item = Exact>) -> Exact {
    let (sum, n) = values.fold((Rational64::from_integer(0), 0i64), |(s, n), v| (s + v.0, n + 1));
    Exact(sum / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalModel {
    Convex,
    Adaptive,
}

impl fmt::Display for CausalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalModel::Convex => "convex",
            CausalModel::Adaptive => "adaptive",
        })
    }
}

impl FromStr for CausalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(CausalModel::Convex),
            "adaptive" => Ok(CausalModel::Adaptive),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(try_from = "WitnessFields")]
pub enum Witness {
    /// The single order used for every `m`.
    Convex { order: TotalOrder },
    /// The first party and the order it picks for each `m`.
    Adaptive {
        first: Party,
        orders: BTreeMap<u8, TotalOrder>,
    },
}

// untagged enums buffer their input, which loses integer map keys
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFields {
    order: Option<TotalOrder>,
    first: Option<Party>,
    orders: Option<BTreeMap<u8, TotalOrder>>,
}

impl TryFrom<WitnessFields> for Witness {
    type Error = String;

    fn try_from(f: WitnessFields) -> std::result::Result<Self, String> {
        match f {
            WitnessFields {
                order: Some(order),
                first: None,
                orders: None,
            } => Ok(Witness::Convex { order }),
            WitnessFields {
                order: None,
                first: Some(first),
                orders: Some(orders),
            } => Ok(Witness::Adaptive { first, orders }),
            _ => Err("witness needs either \"order\" or both \"first\" and \"orders\"".into()),
        }
    }
}

/// Best success per `m` for one total order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRow {
    pub order: TotalOrder,
    pub per_m: BTreeMap<u8, Exact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: CausalModel,
    pub game: String,
    pub value: Exact,
    pub witness: Witness,
    /// Per-`m` values achieved by the witness.
    pub per_m: BTreeMap<u8, Exact>,
    /// Every (order, m) cell.
    pub table: Vec<OrderRow>,
}

pub fn max_success_at_m(order: TotalOrder, game: &GameSpec, m: u8) -> Result<Exact> {
    ClassicalModel::default().max_success_at_m(order, game, m)
}

pub fn convex_bound(game: &GameSpec) -> BoundReport {
    ClassicalModel::default()
        .convex_bound(game)
        .expect("rounds come from the game")
}

pub fn adaptive_bound(game: &GameSpec) -> BoundReport {
    ClassicalModel::default()
        .adaptive_bound(game)
        .expect("rounds come from the game")
}

pub fn bound(game: &GameSpec, model: CausalModel) -> BoundReport {
    match model {
        CausalModel::Convex => convex_bound(game),
        CausalModel::Adaptive => adaptive_bound(game),
    }
}

pub fn verify_half_or_one(game: &GameSpec) -> bool {
    ClassicalModel::default()
        .verify_half_or_one(game)
        .expect("rounds come from the game")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Predicate, Round};
    use Party::{A, B, C};

    fn single_round(target: Party, predicate: Predicate) -> GameSpec {
        GameSpec::new(
            "single",
            vec![Round {
                m: 1,
                target,
                predicate,
            }],
        )
        .unwrap()
    }

    #[test]
    fn exact_formatting() {
        assert_eq!(Exact::new(2, 3).to_string(), "2/3");
        assert_eq!(Exact::new(8, 8).to_string(), "1");
        assert_eq!(Exact::new(4, 8).to_string(), "1/2");
        assert_eq!("5/6".parse::<Exact>().unwrap(), Exact::new(10, 12));
        assert_eq!("1".parse::<Exact>().unwrap(), Exact::new(1, 1));
        assert!("1/0".parse::<Exact>().is_err());
        assert!("one".parse::<Exact>().is_err());
    }

    #[test]
    fn parity_reaches_last_party() {
        let g = GameSpec::all_to_one();
        assert_eq!(
            max_success_at_m(TotalOrder([B, C, A]), &g, 1).unwrap(),
            Exact::new(1, 1)
        );
        assert_eq!(
            max_success_at_m(TotalOrder([A, B, C]), &g, 1).unwrap(),
            Exact::new(1, 2)
        );
    }

    #[test]
    fn one_hop_forwarding() {
        let g = GameSpec::selective();
        assert_eq!(
            max_success_at_m(TotalOrder([B, A, C]), &g, 3).unwrap(),
            Exact::new(1, 1)
        );
        assert_eq!(
            max_success_at_m(TotalOrder([B, A, C]), &g, 1).unwrap(),
            Exact::new(1, 2)
        );
    }

    #[test]
    fn invalid_round() {
        let g = GameSpec::all_to_one();
        assert_eq!(
            max_success_at_m(TotalOrder([A, B, C]), &g, 4),
            Err(Error::InvalidRound { m: 4 })
        );
    }

    #[test]
    fn convex_values() {
        let r = convex_bound(&GameSpec::all_to_one());
        assert_eq!(r.value, Exact::new(2, 3));
        assert_eq!(
            r.witness,
            Witness::Convex {
                order: TotalOrder([B, C, A])
            }
        );
        assert_eq!(r.per_m[&1], Exact::new(1, 1));
        assert_eq!(convex_bound(&GameSpec::selective()).value, Exact::new(3, 4));
    }

    #[test]
    fn adaptive_values() {
        let r = adaptive_bound(&GameSpec::all_to_one());
        assert_eq!(r.value, Exact::new(5, 6));
        let Witness::Adaptive { first, orders } = &r.witness else {
            panic!("adaptive witness expected");
        };
        assert_eq!(*first, A);
        assert_eq!(orders[&2], TotalOrder([A, C, B]));
        assert_eq!(orders[&3], TotalOrder([A, B, C]));
        assert_eq!(adaptive_bound(&GameSpec::selective()).value, Exact::new(5, 6));
    }

    #[test]
    fn degenerate_games() {
        let last = single_round(C, Predicate::parity(A, B));
        assert_eq!(convex_bound(&last).value, Exact::new(1, 1));
        // adaptive forces a common first party; C first gets nothing
        let first = single_round(A, Predicate::parity(B, C));
        assert_eq!(
            ClassicalModel::default()
                .max_success_at_m(TotalOrder([A, B, C]), &first, 1)
                .unwrap(),
            Exact::new(1, 2)
        );
    }

    #[test]
    fn and_game_breaks_half_or_one() {
        let g = single_round(A, Predicate::and(B, C));
        assert_eq!(
            max_success_at_m(TotalOrder([A, B, C]), &g, 1).unwrap(),
            Exact::new(3, 4)
        );
        assert!(!verify_half_or_one(&g));
    }

    #[test]
    fn two_bit_messages_do_not_change_builtin_games() {
        let two = ClassicalModel::with_message_bits(2).unwrap();
        assert_eq!(
            two.convex_bound(&GameSpec::all_to_one()).unwrap().value,
            Exact::new(2, 3)
        );
        assert_eq!(
            two.adaptive_bound(&GameSpec::selective()).unwrap().value,
            Exact::new(5, 6)
        );
        assert_eq!(ClassicalModel::with_message_bits(3), Err(Error::MessageBits(3)));
        assert_eq!(ClassicalModel::with_message_bits(0), Err(Error::MessageBits(0)));
    }

    #[test]
    fn report_json_shape() {
        let r = convex_bound(&GameSpec::all_to_one());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["model"], "convex");
        assert_eq!(v["game"], "all-to-one");
        assert_eq!(v["value"], "2/3");
        assert_eq!(v["witness"]["order"], serde_json::json!(["B", "C", "A"]));
        assert_eq!(v["per_m"], serde_json::json!({"1": "1", "2": "1/2", "3": "1/2"}));
        let back: BoundReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);

        let a = adaptive_bound(&GameSpec::selective());
        let back: BoundReport = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
