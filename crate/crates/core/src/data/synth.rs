//! Seeded synthetic playthroughs.
//!
//! Players follow one of three archetypes:
//!
//! * `deliberate` players take long turns and concentrate grassroots work
//!   on the districts most opposed to their candidate, raise funds where
//!   support is already high, and run voter drives often. Their vote totals
//!   climb steadily.
//! * `hurried` players click through quickly and rarely act, so their
//!   totals stay nearly flat.
//! * `scattered` players act every turn, but in uniformly random districts.
//!
//! The level itself (district populations and starting shares) is drawn
//! once per dataset, so every player starts from the same state. Districts
//! 1 and 2 start with the most opposition and district 4, when present,
//! with the most support.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataError, Dataset, DistrictState, Playthrough, TurnRecord};

/// Action vocabulary of generated datasets.
pub const ACTIONS: [&str; 4] = ["fundraiser", "grassroots", "rally", "voter_drive"];

const STARTING_BUDGET: f64 = 1000.0;
const TURN_INCOME: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Deliberate,
    Hurried,
    Scattered,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Deliberate, Strategy::Hurried, Strategy::Scattered];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Deliberate => "deliberate",
            Strategy::Hurried => "hurried",
            Strategy::Scattered => "scattered",
        }
    }

    /// Recover the archetype from a generated player id (`p0007-hurried`).
    pub fn from_player_id(id: &str) -> Option<Self> {
        id.rsplit('-').next()?.parse().ok()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| DataError::Config(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_players: usize,
    pub n_turns: usize,
    pub n_districts: usize,
    pub level: u32,
    /// Weight per archetype; absent archetypes weigh 0. Must sum to 1.
    pub strategy_mix: BTreeMap<Strategy, f64>,
}

impl SimConfig {
    pub fn new(seed: u64, n_players: usize, n_turns: usize, n_districts: usize) -> Self {
        SimConfig {
            seed,
            n_players,
            n_turns,
            n_districts,
            level: 1,
            strategy_mix: BTreeMap::from([
                (Strategy::Deliberate, 0.5),
                (Strategy::Hurried, 0.25),
                (Strategy::Scattered, 0.25),
            ]),
        }
    }

    pub fn with_mix(mut self, mix: &[(Strategy, f64)]) -> Self {
        self.strategy_mix = mix.iter().copied().collect();
        self
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::Config(m));
        if self.n_players < 1 || self.n_turns < 1 || self.n_districts < 1 {
            return bad("players, turns and districts must each be >= 1".into());
        }
        if self.level < 1 {
            return bad("level must be >= 1".into());
        }
        if self.strategy_mix.values().any(|w| !w.is_finite() || *w < 0.0) {
            return bad("strategy weights must be nonnegative".into());
        }
        let sum: f64 = self.strategy_mix.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("strategy weights sum to {sum}, expected 1"));
        }
        Ok(())
    }
}

/// Parse `deliberate=0.7,hurried=0.3`.
pub fn parse_mix(s: &str) -> Result<BTreeMap<Strategy, f64>, DataError> {
    let mut mix = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, w) = part
            .split_once('=')
            .ok_or_else(|| DataError::Config(format!("expected name=weight, got {part:?}")))?;
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| DataError::Config(format!("bad weight in {part:?}")))?;
        mix.insert(name.trim().parse()?, w);
    }
    Ok(mix)
}

/// Largest-remainder apportionment of `n` players over the mix.
fn apportion(n: usize, mix: &BTreeMap<Strategy, f64>) -> Vec<(Strategy, usize)> {
    let mut counts: Vec<(Strategy, usize, f64)> = Strategy::ALL
        .iter()
        .map(|&s| {
            let exact = mix.get(&s).copied().unwrap_or(0.0) * n as f64;
            (s, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|c| c.1).sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].2.total_cmp(&counts[a].2).then(a.cmp(&b)));
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i].1 += 1;
    }
    counts.into_iter().map(|(s, c, _)| (s, c)).collect()
}

#[derive(Debug, Clone)]
struct District {
    population: u64,
    favorability: f64,
    unregistered: f64,
    undecided: f64,
    for_share: f64,
    against: f64,
}

fn level_template(rng: &mut ChaCha8Rng, n: usize) -> Vec<District> {
    (1..=n)
        .map(|id| {
            let population = rng.random_range(200..2000u64) * 10;
            let mut against = if id <= 2 { rng.random_range(0.35..0.5) } else { rng.random_range(0.15..0.3) };
            let mut for_share = if id == 4 { rng.random_range(0.35..0.45) } else { rng.random_range(0.1..0.2) };
            let mut unregistered = rng.random_range(0.05..0.15);
            let committed = against + for_share + unregistered;
            if committed > 0.95 {
                let k = 0.95 / committed;
                against *= k;
                for_share *= k;
                unregistered *= k;
            }
            District {
                population,
                favorability: rng.random_range(40.0..60.0),
                unregistered,
                undecided: 1.0 - against - for_share - unregistered,
                for_share,
                against,
            }
        })
        .collect()
}

fn round_to(v: f64, scale: f64) -> f64 {
    (v * scale).round() / scale
}

struct Player<'a> {
    rng: &'a mut ChaCha8Rng,
    districts: Vec<District>,
    budget: f64,
    strength: f64,
}

impl Player<'_> {
    fn act(&mut self, action: &str, d: usize, flags: &mut [BTreeMap<String, u8>]) {
        let cost = match action {
            "fundraiser" => 30.0,
            "grassroots" => 50.0,
            "rally" => 150.0,
            _ => 80.0,
        };
        if self.budget < cost {
            return;
        }
        self.budget -= cost;
        let s = self.strength;
        let st = &mut self.districts[d];
        match action {
            "fundraiser" => self.budget += 200.0 * s + 200.0 * st.for_share,
            "grassroots" => {
                let moved = s * 0.15 * st.undecided;
                st.undecided -= moved;
                st.for_share += moved;
            }
            "rally" => {
                st.favorability += s * self.rng.random_range(3.0..8.0);
                let moved = s * 0.1 * st.undecided;
                st.undecided -= moved;
                st.for_share += moved;
            }
            _ => {
                let moved = s * 0.2 * st.unregistered;
                st.unregistered -= moved;
                st.undecided += moved / 2.0;
                st.for_share += moved / 2.0;
            }
        }
        flags[d].insert(action.to_string(), 1);
    }

    fn record(&self, turn_index: u32, duration_s: f64, flags: Vec<BTreeMap<String, u8>>) -> TurnRecord {
        let total_votes = self
            .districts
            .iter()
            .map(|d| (d.population as f64 * d.for_share).round() as u64)
            .sum();
        let districts = self
            .districts
            .iter()
            .zip(flags)
            .enumerate()
            .map(|(i, (d, actions))| DistrictState {
                district_id: i as u32 + 1,
                population: d.population,
                favorability: round_to(d.favorability, 1e3),
                unregistered: round_to(d.unregistered, 1e6).clamp(0.0, 1.0),
                undecided: round_to(d.undecided, 1e6).clamp(0.0, 1.0),
                for_share: round_to(d.for_share, 1e6).clamp(0.0, 1.0),
                against_share: round_to(d.against, 1e6).clamp(0.0, 1.0),
                actions,
            })
            .collect();
        TurnRecord {
            turn_index,
            total_votes,
            budget: round_to(self.budget, 1e2),
            duration_s,
            districts,
        }
    }
}

/// Generate a dataset; a pure function of `config`.
pub fn generate_synthetic(config: &SimConfig) -> Result<Dataset, DataError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let template = level_template(&mut rng, config.n_districts);

    let mut strategies: Vec<Strategy> = apportion(config.n_players, &config.strategy_mix)
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s, c))
        .collect();
    strategies.shuffle(&mut rng);

    // Most-opposed districts get the deliberate players' grassroots work.
    let mut by_against: Vec<usize> = (0..template.len()).collect();
    by_against.sort_by(|&a, &b| template[b].against.total_cmp(&template[a].against).then(a.cmp(&b)));
    let focus: Vec<usize> = by_against.iter().copied().take(2).collect();
    let support = (0..template.len())
        .max_by(|&a, &b| template[a].for_share.total_cmp(&template[b].for_share).then(b.cmp(&a)))
        .unwrap_or(0);

    let slow = Normal::<f64>::new(48.0, 8.0).expect("valid normal");
    let fast = Normal::<f64>::new(14.0, 4.0).expect("valid normal");
    let medium = Normal::<f64>::new(30.0, 8.0).expect("valid normal");

    let n = config.n_districts;
    let mut playthroughs = Vec::with_capacity(config.n_players);
    for (i, &strategy) in strategies.iter().enumerate() {
        let strength = match strategy {
            Strategy::Deliberate => 1.0,
            Strategy::Hurried => 0.3,
            Strategy::Scattered => 0.7,
        };
        let mut player = Player { rng: &mut rng, districts: template.clone(), budget: STARTING_BUDGET, strength };
        let mut turns = Vec::with_capacity(config.n_turns);
        for turn in 0..config.n_turns {
            player.budget += TURN_INCOME;
            for d in &mut player.districts {
                d.favorability += player.rng.random_range(-1.0..1.0);
            }
            let mut flags: Vec<BTreeMap<String, u8>> =
                vec![ACTIONS.iter().map(|a| (a.to_string(), 0)).collect(); n];
            let duration = match strategy {
                Strategy::Deliberate => {
                    for &d in &focus {
                        if player.rng.random_bool(0.75) {
                            player.act("grassroots", d, &mut flags);
                        }
                    }
                    if player.rng.random_bool(0.5) {
                        player.act("fundraiser", support, &mut flags);
                    }
                    if player.rng.random_bool(0.6) {
                        let d = player.rng.random_range(0..n);
                        player.act("voter_drive", d, &mut flags);
                    }
                    if player.rng.random_bool(0.3) {
                        let d = focus[player.rng.random_range(0..focus.len())];
                        player.act("rally", d, &mut flags);
                    }
                    slow.sample(player.rng).max(5.0)
                }
                Strategy::Hurried => {
                    for action in ACTIONS {
                        if player.rng.random_bool(0.15) {
                            let d = player.rng.random_range(0..n);
                            player.act(action, d, &mut flags);
                        }
                    }
                    fast.sample(player.rng).max(2.0)
                }
                Strategy::Scattered => {
                    let k = player.rng.random_range(1..=3);
                    for _ in 0..k {
                        let action = ACTIONS[player.rng.random_range(0..ACTIONS.len())];
                        let d = player.rng.random_range(0..n);
                        player.act(action, d, &mut flags);
                    }
                    medium.sample(player.rng).max(3.0)
                }
            };
            turns.push(player.record(turn as u32, round_to(duration, 10.0), flags));
        }
        playthroughs.push(Playthrough {
            player_id: format!("p{i:04}-{strategy}"),
            level: config.level,
            turns,
        });
    }
    Dataset::new(playthroughs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_dataset, serialize_dataset};

    #[test]
    fn deterministic_for_seed() {
        let cfg = SimConfig::new(7, 20, 6, 4);
        let a = serialize_dataset(&generate_synthetic(&cfg).unwrap());
        let b = serialize_dataset(&generate_synthetic(&cfg).unwrap());
        assert_eq!(a, b);
        let c = serialize_dataset(&generate_synthetic(&SimConfig { seed: 8, ..cfg }).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn every_turn_has_configured_districts() {
        let ds = generate_synthetic(&SimConfig::new(1, 5, 7, 4)).unwrap();
        assert_eq!(ds.district_count(), 4);
        for (_, t) in ds.iter_points() {
            assert_eq!(t.districts.len(), 4);
        }
        assert_eq!(ds.action_vocabulary(), ACTIONS);
    }

    #[test]
    fn round_trips_through_jsonl() {
        let ds = generate_synthetic(&SimConfig::new(3, 10, 5, 6)).unwrap();
        assert_eq!(parse_dataset(&serialize_dataset(&ds)).unwrap(), ds);
    }

    #[test]
    fn apportionment_is_exact() {
        let mix = BTreeMap::from([(Strategy::Deliberate, 0.7), (Strategy::Hurried, 0.3)]);
        assert_eq!(
            apportion(10, &mix),
            [(Strategy::Deliberate, 7), (Strategy::Hurried, 3), (Strategy::Scattered, 0)]
        );
        let thirds = BTreeMap::from([
            (Strategy::Deliberate, 1.0 / 3.0),
            (Strategy::Hurried, 1.0 / 3.0),
            (Strategy::Scattered, 1.0 / 3.0),
        ]);
        let total: usize = apportion(100, &thirds).iter().map(|c| c.1).sum();
        assert_eq!(total, 100);
    }

    #[test]
    fn config_validation() {
        let cfg = SimConfig::new(1, 10, 5, 4);
        assert!(cfg.clone().with_mix(&[(Strategy::Deliberate, 0.7)]).validate().is_err());
        assert!(cfg.clone().with_mix(&[(Strategy::Deliberate, 1.2), (Strategy::Hurried, -0.2)]).validate().is_err());
        assert!(SimConfig { n_districts: 0, ..cfg }.validate().is_err());
    }

    #[test]
    fn parses_mix() {
        let mix = parse_mix("deliberate=0.7, hurried=0.3").unwrap();
        assert_eq!(mix[&Strategy::Hurried], 0.3);
        assert!(parse_mix("lazy=1").is_err());
        assert!(parse_mix("deliberate").is_err());
    }

    #[test]
    fn archetypes_behave() {
        let cfg = SimConfig::new(11, 60, 10, 4)
            .with_mix(&[(Strategy::Deliberate, 0.5), (Strategy::Hurried, 0.5)]);
        let ds = generate_synthetic(&cfg).unwrap();
        for p in ds.playthroughs() {
            let votes: Vec<u64> = p.turns.iter().map(|t| t.total_votes).collect();
            assert!(votes.windows(2).all(|w| w[1] >= w[0]), "votes never fall");
            let gain = votes[votes.len() - 1] - votes[0];
            match Strategy::from_player_id(&p.player_id).unwrap() {
                Strategy::Deliberate => assert!(gain > 0, "{}", p.player_id),
                _ => {}
            }
        }
    }
}
