//! The extensive-form game contract and the types every other module
//! consumes: players, actions, histories, information sets, strategies.

use std::collections::BTreeMap;
use std::fmt;

use crate::dist::Scenario;
use crate::error::{Error, Result};

/// Absolute tolerance for probability comparisons.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Who acts at a node. Chance owns stochastic nodes and never accumulates
/// regret.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlayerRole {
    Player1,
    Player2,
    Chance,
}

impl PlayerRole {
    /// Both strategic players, in fixed order.
    pub const STRATEGIC: [PlayerRole; 2] = [PlayerRole::Player1, PlayerRole::Player2];

    /// The other strategic player. Panics if called on `Chance`.
    pub fn opponent(self) -> PlayerRole {
        match self {
            PlayerRole::Player1 => PlayerRole::Player2,
            PlayerRole::Player2 => PlayerRole::Player1,
            PlayerRole::Chance => panic!("chance has no opponent"),
        }
    }

    pub fn is_strategic(self) -> bool {
        !matches!(self, PlayerRole::Chance)
    }

    /// 0 for Player1, 1 for Player2. Panics if called on `Chance`.
    pub fn index(self) -> usize {
        match self {
            PlayerRole::Player1 => 0,
            PlayerRole::Player2 => 1,
            PlayerRole::Chance => panic!("chance has no player index"),
        }
    }
}

impl fmt::Display for PlayerRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlayerRole::Player1 => write!(f, "p1"),
            PlayerRole::Player2 => write!(f, "p2"),
            PlayerRole::Chance => write!(f, "chance"),
        }
    }
}

/// One legal move at a decision point: a dense index into the node's
/// action list plus a display label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionId {
    pub index: usize,
    pub label: String,
}

impl ActionId {
    pub fn new(index: usize, label: impl Into<String>) -> Self {
        ActionId {
            index,
            label: label.into(),
        }
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// A path of action indices from the root. Every prefix of a valid
/// history is itself valid; terminal histories have no legal actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(Vec<u32>);

impl History {
    /// The empty history.
    pub fn root() -> Self {
        History(Vec::new())
    }

    /// The history reached by taking `action` here. This is the successor
    /// function: deterministic, append-only.
    pub fn child(&self, action: usize) -> Self {
        let mut actions = Vec::with_capacity(self.0.len() + 1);
        actions.extend_from_slice(&self.0);
        actions.push(action as u32);
        History(actions)
    }

    pub fn actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&a| a as usize)
    }

    pub fn action_at(&self, depth: usize) -> Option<usize> {
        self.0.get(depth).map(|&a| a as usize)
    }

    pub fn last_action(&self) -> Option<usize> {
        self.0.last().map(|&a| a as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// What one player knows at a decision point: the owning player plus a
/// canonical byte encoding of everything that player has observed (own
/// actions and public observations). Two histories with the same key must
/// offer identical action lists.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoKey {
    owner: PlayerRole,
    observation: Vec<u8>,
}

impl InfoKey {
    pub fn new(owner: PlayerRole, observation: impl Into<Vec<u8>>) -> Self {
        InfoKey {
            owner,
            observation: observation.into(),
        }
    }

    pub fn owner(&self) -> PlayerRole {
        self.owner
    }

    pub fn observation(&self) -> &[u8] {
        &self.observation
    }

    /// The observation as text. Built-in games always encode printable
    /// UTF-8; foreign bytes are rendered lossily.
    pub fn observation_text(&self) -> String {
        String::from_utf8_lossy(&self.observation).into_owned()
    }
}

impl fmt::Display for InfoKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.owner, self.observation_text())
    }
}

/// Behavioural contract for a two-player zero-sum extensive-form game.
///
/// The tree is never materialized: implementations interpret a [`History`]
/// (the action path from the root) and answer queries about it. Terminal
/// utilities are parameterized by a [`Scenario`], one joint draw of the
/// game's uncertain payoff symbols; games without uncertainty ignore it
/// and declare `num_symbols() == 0`.
///
/// Implementations must be immutable once constructed and freely shareable
/// across threads; traversals keep all mutable state on the caller's side.
///
/// Invariants:
/// - zero-sum: `utility(Player1, z, w) == -utility(Player2, z, w)` for
///   every terminal `z` and scenario `w`;
/// - `player_at` is defined for every non-terminal history;
/// - chance nodes expose a fixed outcome distribution via
///   [`chance_probabilities`](Game::chance_probabilities);
/// - histories with equal [`InfoKey`]s have identical action lists.
pub trait Game {
    /// Where play starts. Defaults to the empty history.
    fn initial_history(&self) -> History {
        History::root()
    }

    fn is_terminal(&self, history: &History) -> bool;

    /// Whose turn it is at a non-terminal history.
    fn player_at(&self, history: &History) -> PlayerRole;

    /// The labeled actions available at a non-terminal history. Indices
    /// are dense `0..n`.
    fn legal_actions(&self, history: &History) -> Vec<ActionId>;

    /// Action count at a non-terminal history. Override when labels are
    /// expensive to build; traversals only need the count.
    fn num_actions(&self, history: &History) -> usize {
        self.legal_actions(history).len()
    }

    /// Deterministic successor function.
    fn successor(&self, history: &History, action: usize) -> History {
        let _ = self;
        history.child(action)
    }

    /// The acting player's information set at a decision history.
    fn info_key(&self, history: &History) -> InfoKey;

    /// Outcome distribution at a chance node, aligned with its actions.
    /// Games without chance nodes keep the default.
    fn chance_probabilities(&self, history: &History) -> Vec<f64> {
        let _ = history;
        Vec::new()
    }

    /// Payoff to `player` at a terminal history under one scenario.
    fn utility(&self, player: PlayerRole, terminal: &History, scenario: &Scenario) -> f64;

    /// How many uncertain payoff symbols the utility function reads.
    fn num_symbols(&self) -> usize {
        0
    }

    /// Display name for a player, used in reports and file names.
    fn player_label(&self, player: PlayerRole) -> &str {
        match player {
            PlayerRole::Player1 => "player1",
            PlayerRole::Player2 => "player2",
            PlayerRole::Chance => "chance",
        }
    }
}

impl<G: Game + ?Sized> Game for &G {
    fn initial_history(&self) -> History {
        (**self).initial_history()
    }
    fn is_terminal(&self, history: &History) -> bool {
        (**self).is_terminal(history)
    }
    fn player_at(&self, history: &History) -> PlayerRole {
        (**self).player_at(history)
    }
    fn legal_actions(&self, history: &History) -> Vec<ActionId> {
        (**self).legal_actions(history)
    }
    fn num_actions(&self, history: &History) -> usize {
        (**self).num_actions(history)
    }
    fn successor(&self, history: &History, action: usize) -> History {
        (**self).successor(history, action)
    }
    fn info_key(&self, history: &History) -> InfoKey {
        (**self).info_key(history)
    }
    fn chance_probabilities(&self, history: &History) -> Vec<f64> {
        (**self).chance_probabilities(history)
    }
    fn utility(&self, player: PlayerRole, terminal: &History, scenario: &Scenario) -> f64 {
        (**self).utility(player, terminal, scenario)
    }
    fn num_symbols(&self) -> usize {
        (**self).num_symbols()
    }
    fn player_label(&self, player: PlayerRole) -> &str {
        (**self).player_label(player)
    }
}

impl<G: Game + ?Sized> Game for Box<G> {
    fn initial_history(&self) -> History {
        (**self).initial_history()
    }
    fn is_terminal(&self, history: &History) -> bool {
        (**self).is_terminal(history)
    }
    fn player_at(&self, history: &History) -> PlayerRole {
        (**self).player_at(history)
    }
    fn legal_actions(&self, history: &History) -> Vec<ActionId> {
        (**self).legal_actions(history)
    }
    fn num_actions(&self, history: &History) -> usize {
        (**self).num_actions(history)
    }
    fn successor(&self, history: &History, action: usize) -> History {
        (**self).successor(history, action)
    }
    fn info_key(&self, history: &History) -> InfoKey {
        (**self).info_key(history)
    }
    fn chance_probabilities(&self, history: &History) -> Vec<f64> {
        (**self).chance_probabilities(history)
    }
    fn utility(&self, player: PlayerRole, terminal: &History, scenario: &Scenario) -> f64 {
        (**self).utility(player, terminal, scenario)
    }
    fn num_symbols(&self) -> usize {
        (**self).num_symbols()
    }
    fn player_label(&self, player: PlayerRole) -> &str {
        (**self).player_label(player)
    }
}

/// A behavioural strategy for both players: one probability row per
/// information set, keyed by [`InfoKey`] (which carries the owner).
///
/// Rows are validated on insert: non-negative entries summing to 1 within
/// [`PROB_TOLERANCE`]. Iteration order is deterministic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StrategyProfile {
    rows: BTreeMap<InfoKey, Vec<f64>>,
}

impl StrategyProfile {
    pub fn new() -> Self {
        StrategyProfile {
            rows: BTreeMap::new(),
        }
    }

    /// Insert (or replace) the row for one information set.
    pub fn insert(&mut self, key: InfoKey, probabilities: Vec<f64>) -> Result<()> {
        validate_distribution(&key, &probabilities)?;
        self.rows.insert(key, probabilities);
        Ok(())
    }

    pub fn get(&self, key: &InfoKey) -> Option<&[f64]> {
        self.rows.get(key).map(Vec::as_slice)
    }

    /// Like [`get`](StrategyProfile::get) but failing with a
    /// missing-strategy error.
    pub fn row(&self, key: &InfoKey) -> Result<&[f64]> {
        self.get(key)
            .ok_or_else(|| Error::MissingStrategy(key.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InfoKey, &[f64])> {
        self.rows.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Rows owned by one player, in key order.
    pub fn player_rows(&self, player: PlayerRole) -> impl Iterator<Item = (&InfoKey, &[f64])> {
        self.iter().filter(move |(k, _)| k.owner() == player)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Merge another profile's rows into this one (replacing duplicates).
    pub fn extend(&mut self, other: StrategyProfile) {
        self.rows.extend(other.rows);
    }
}

fn validate_distribution(key: &InfoKey, probabilities: &[f64]) -> Result<()> {
    if probabilities.is_empty() {
        return Err(Error::InvalidDistribution {
            key: key.clone(),
            reason: "empty probability row".into(),
        });
    }
    let mut sum = 0.0;
    for &p in probabilities {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution {
                key: key.clone(),
                reason: format!("entry {p} is not a probability"),
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidDistribution {
            key: key.clone(),
            reason: format!("row sums to {sum}, expected 1"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn history_prefixes_are_valid() {
        let h = History::root().child(2).child(0).child(5);
        assert_eq!(h.len(), 3);
        assert_eq!(h.actions().collect::<Vec<_>>(), vec![2, 0, 5]);
        assert_eq!(h.action_at(0), Some(2));
        assert_eq!(h.last_action(), Some(5));
        assert!(History::root().is_empty());
    }

    #[test]
    fn info_key_ordering_is_stable() {
        let a = InfoKey::new(PlayerRole::Player1, "b");
        let b = InfoKey::new(PlayerRole::Player1, "a");
        let c = InfoKey::new(PlayerRole::Player2, "a");
        assert!(b < a);
        assert!(a < c); // player1 sorts before player2
        assert_eq!(c.to_string(), "p2:a");
    }

    #[test]
    fn profile_rejects_bad_rows() {
        let key = InfoKey::new(PlayerRole::Player1, "x");
        let mut profile = StrategyProfile::new();
        assert!(profile.insert(key.clone(), vec![0.5, 0.6]).is_err());
        assert!(profile.insert(key.clone(), vec![-0.1, 1.1]).is_err());
        assert!(profile.insert(key.clone(), vec![]).is_err());
        profile.insert(key.clone(), vec![0.25, 0.75]).unwrap();
        assert_eq!(profile.row(&key).unwrap(), &[0.25, 0.75]);

        let missing = InfoKey::new(PlayerRole::Player2, "y");
        assert_eq!(
            profile.row(&missing),
            Err(Error::MissingStrategy(missing.clone()))
        );
    }
}
