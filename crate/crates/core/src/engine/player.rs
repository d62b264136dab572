use rand::Rng;

use super::config::GameConfig;
use super::strategy::{generate_strategy, Action, StrategyTable};

/// Integer currency and volume units.
///
/// 128 bits: at small board lots wealth compounds multiplicatively during
/// bursts and leaves the 64-bit range within a few thousand steps.
pub type Amount = i128;

/// An open round-trip position, real or virtual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    /// Opening action, `Buy` for long and `Sell` for short.
    pub direction: Action,
    pub open_step: u64,
    /// Cognitive price recorded after the opening step's cognition update.
    pub open_cognitive_price: i64,
    /// Order volume; 1 for virtual positions.
    pub quantity: Amount,
}

/// What an effective action does to a player's position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Open,
    Hold,
    Close,
    Idle,
}

/// Resolves a strategy recommendation against the current position.
///
/// A repeated recommendation in the direction of the open position is a
/// hold; only the opposite action closes it.
pub fn decide_action(recommendation: Action, position: Option<&Position>) -> (Action, Transition) {
    match (position, recommendation) {
        (None, Action::Hold) => (Action::Hold, Transition::Idle),
        (None, rec) => (rec, Transition::Open),
        (Some(_), Action::Hold) => (Action::Hold, Transition::Hold),
        (Some(pos), rec) if rec == pos.direction => (Action::Hold, Transition::Hold),
        (Some(_), rec) => (rec, Transition::Close),
    }
}

/// Order volume `floor(wealth / board_lot)`; zero means the player cannot trade.
pub fn order_quantity(wealth: Amount, board_lot: i64) -> Amount {
    assert!(board_lot >= 1);
    wealth.max(0) / board_lot as Amount
}

/// Strategy gain of a round trip closed at cognitive price `cognitive_price`.
pub fn settle_round_trip(position: &Position, cognitive_price: i64) -> i64 {
    position.direction.value() * (cognitive_price - position.open_cognitive_price)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerState {
    pub wealth: Amount,
    pub strategies: Vec<StrategyTable>,
    /// Accumulated strategy gains, one per strategy.
    pub gains: Vec<i64>,
    pub in_use: usize,
    pub real_position: Option<Position>,
    /// Unit-volume shadow positions, one per strategy. The in-use entry
    /// mirrors the real position.
    pub virtual_positions: Vec<Option<Position>>,
}

impl PlayerState {
    /// A flat player with zero gains using strategy 0.
    pub fn new(wealth: Amount, strategies: Vec<StrategyTable>) -> Self {
        assert!(!strategies.is_empty());
        let s = strategies.len();
        Self {
            wealth,
            strategies,
            gains: vec![0; s],
            in_use: 0,
            real_position: None,
            virtual_positions: vec![None; s],
        }
    }
}

/// Credits a closed real trade to the player's wealth.
///
/// Returns `true` when the player can no longer afford one board lot and
/// must withdraw.
pub fn settle_wealth(
    player: &mut PlayerState,
    gain: i64,
    open_quantity: Amount,
    board_lot: i64,
) -> bool {
    player.wealth += gain as Amount * open_quantity;
    player.wealth < board_lot as Amount
}

/// A fresh entrant: new random strategies and wealth `floor(B + U[0,100))`.
pub fn replace_player<R: Rng + ?Sized>(rng: &mut R, config: &GameConfig) -> PlayerState {
    let strategies = (0..config.n_strategies)
        .map(|_| generate_strategy(rng, config.memory))
        .collect();
    let u: f64 = rng.random_range(0.0..100.0);
    let wealth = (config.board_lot as f64 + u).floor() as Amount;
    PlayerState::new(wealth, strategies)
}

/// Switches to the best-scoring strategy after a real round trip closed.
///
/// Ties go to the current strategy, then to the lowest index. On a switch
/// the adopted strategy's virtual position is dropped without touching its
/// gain. Returns the index in use afterwards.
pub fn review_strategies(player: &mut PlayerState) -> usize {
    let mut best = player.in_use;
    for (j, &g) in player.gains.iter().enumerate() {
        if g > player.gains[best] {
            best = j;
        }
    }
    if best != player.in_use {
        player.virtual_positions[best] = None;
        player.in_use = best;
    }
    best
}
