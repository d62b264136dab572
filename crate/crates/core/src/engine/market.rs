use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{ConfigError, GameConfig};
use super::history::{History, QuantizedMove};
use super::player::{
    decide_action, order_quantity, replace_player, review_strategies, settle_round_trip,
    settle_wealth, Amount, PlayerState, Position, Transition,
};
use super::strategy::Action;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub step: u64,
    pub market_price: f64,
    /// Integer price of the cognitive world, `P(0) = 0`.
    pub cognitive_price: i64,
    pub history: History,
}

/// One player's effective order for a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Order {
    pub action: Action,
    pub quantity: Amount,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clearing {
    pub excess_demand: Amount,
    pub price_change: f64,
    pub price: f64,
    pub buy_volume: Amount,
    pub sell_volume: Amount,
    pub n_buyers: usize,
    pub n_sellers: usize,
}

/// Aggregates simultaneous orders into excess demand and the new price.
pub fn clear_market(orders: &[Order], n_players: usize, previous_price: f64) -> Clearing {
    let mut buy_volume: Amount = 0;
    let mut sell_volume: Amount = 0;
    let mut n_buyers = 0;
    let mut n_sellers = 0;
    for o in orders {
        match o.action {
            Action::Buy => {
                buy_volume += o.quantity;
                n_buyers += 1;
            }
            Action::Sell => {
                sell_volume += o.quantity;
                n_sellers += 1;
            }
            Action::Hold => {}
        }
    }
    let excess_demand = buy_volume - sell_volume;
    let price_change = excess_demand as f64 / n_players as f64;
    Clearing {
        excess_demand,
        price_change,
        price: previous_price + price_change,
        buy_volume,
        sell_volume,
        n_buyers,
        n_sellers,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cognition {
    pub quantized_move: QuantizedMove,
    pub cognitive_price: i64,
}

/// Quantizes a price change against the threshold, advances the cognitive
/// price and shifts the move into the history window.
pub fn update_cognition(
    price_change: f64,
    threshold: f64,
    previous_cognitive_price: i64,
    history: &mut History,
) -> Cognition {
    debug_assert!(threshold > 0.0);
    let h: QuantizedMove = if price_change > threshold {
        2
    } else if price_change > 0.0 {
        1
    } else if price_change == 0.0 {
        0
    } else if price_change >= -threshold {
        -1
    } else {
        -2
    };
    history.push(h);
    Cognition {
        quantized_move: h,
        cognitive_price: previous_cognitive_price + h as i64,
    }
}

/// Per-step market aggregates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub excess_demand: Amount,
    pub price_change: f64,
    pub quantized_move: QuantizedMove,
    pub buy_volume: Amount,
    pub sell_volume: Amount,
    pub n_buyers: usize,
    pub n_sellers: usize,
    pub n_replaced: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Replacement {
    pub step: u64,
    pub player: usize,
}

/// One running trial.
#[derive(Debug, Clone)]
pub struct Market {
    config: GameConfig,
    state: MarketState,
    players: Vec<PlayerState>,
    replacement_rng: ChaCha8Rng,
    orders: Vec<Order>,
    transitions: Vec<Transition>,
    last_replacements: Vec<usize>,
}

impl Market {
    /// Random initial history and population drawn from `config.seed`.
    pub fn new(config: GameConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let mut init = stream_rng(config.seed, Stream::Initialization);
        let history: Vec<QuantizedMove> = (0..config.memory)
            .map(|_| init.random_range(-2..=2))
            .collect();
        let players = (0..config.n_players)
            .map(|_| replace_player(&mut init, &config))
            .collect();
        Self::from_parts(config, history, players)
    }

    /// A market with an explicit initial history window and population.
    ///
    /// Replacement draws still come from `config.seed`.
    pub fn from_parts(
        config: GameConfig,
        history: Vec<QuantizedMove>,
        players: Vec<PlayerState>,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        let bad = |message: String| ConfigError::OutOfRange {
            key: "players",
            message,
        };
        if history.len() != config.memory {
            return Err(ConfigError::OutOfRange {
                key: "memory",
                message: format!("history has {} digits, expected {}", history.len(), config.memory),
            });
        }
        if players.len() != config.n_players {
            return Err(bad(format!("{} players given, expected {}", players.len(), config.n_players)));
        }
        for (i, p) in players.iter().enumerate() {
            if p.strategies.len() != config.n_strategies
                || p.strategies.iter().any(|s| s.len() != config.n_histories())
            {
                return Err(bad(format!("player {i} has malformed strategy tables")));
            }
            if p.wealth < config.board_lot as Amount {
                return Err(bad(format!("player {i} cannot afford one board lot")));
            }
        }
        let n = players.len();
        Ok(Self {
            state: MarketState {
                step: 0,
                market_price: config.initial_price,
                cognitive_price: 0,
                history: History::new(history),
            },
            replacement_rng: stream_rng(config.seed, Stream::Replacement),
            config,
            players,
            orders: vec![Order { action: Action::Hold, quantity: 0 }; n],
            transitions: vec![Transition::Idle; n],
            last_replacements: Vec::new(),
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn state(&self) -> &MarketState {
        &self.state
    }

    pub fn players(&self) -> &[PlayerState] {
        &self.players
    }

    /// Players replaced during the most recent step.
    pub fn last_replacements(&self) -> &[usize] {
        &self.last_replacements
    }

    /// Advances the market by one time step.
    pub fn step(&mut self) -> StepRecord {
        let t = self.state.step + 1;
        let index = self.state.history.index();
        let board_lot = self.config.board_lot;

        // Real orders from the in-use strategies.
        for (i, p) in self.players.iter().enumerate() {
            let rec = p.strategies[p.in_use].recommend(index);
            let (action, transition) = decide_action(rec, p.real_position.as_ref());
            let quantity = match transition {
                Transition::Open => order_quantity(p.wealth, board_lot),
                Transition::Close => p.real_position.map_or(0, |pos| pos.quantity),
                Transition::Hold | Transition::Idle => 0,
            };
            debug_assert!(action == Action::Hold || quantity >= 1);
            self.orders[i] = Order { action, quantity };
            self.transitions[i] = transition;
        }

        let clearing = clear_market(&self.orders, self.config.n_players, self.state.market_price);
        let cognition = update_cognition(
            clearing.price_change,
            self.config.cognitive_threshold,
            self.state.cognitive_price,
            &mut self.state.history,
        );
        let cp = cognition.cognitive_price;
        self.state.step = t;
        self.state.market_price = clearing.price;
        self.state.cognitive_price = cp;

        // Virtual round trips for every strategy, scored in the cognitive world.
        for p in &mut self.players {
            for j in 0..p.strategies.len() {
                let rec = p.strategies[j].recommend(index);
                match decide_action(rec, p.virtual_positions[j].as_ref()) {
                    (_, Transition::Open) => {
                        p.virtual_positions[j] = Some(Position {
                            direction: rec,
                            open_step: t,
                            open_cognitive_price: cp,
                            quantity: 1,
                        });
                    }
                    (_, Transition::Close) => {
                        if let Some(pos) = p.virtual_positions[j].take() {
                            p.gains[j] += settle_round_trip(&pos, cp);
                        }
                    }
                    _ => {}
                }
            }
        }

        // Real positions, wealth and strategy review.
        self.last_replacements.clear();
        for (i, p) in self.players.iter_mut().enumerate() {
            match self.transitions[i] {
                Transition::Open => {
                    p.real_position = Some(Position {
                        direction: self.orders[i].action,
                        open_step: t,
                        open_cognitive_price: cp,
                        quantity: self.orders[i].quantity,
                    });
                }
                Transition::Close => {
                    let pos = p.real_position.take().expect("closing without a position");
                    let gain = settle_round_trip(&pos, cp);
                    if settle_wealth(p, gain, pos.quantity, board_lot) {
                        *p = replace_player(&mut self.replacement_rng, &self.config);
                        self.last_replacements.push(i);
                    } else {
                        review_strategies(p);
                    }
                }
                Transition::Hold | Transition::Idle => {}
            }
        }

        StepRecord {
            excess_demand: clearing.excess_demand,
            price_change: clearing.price_change,
            quantized_move: cognition.quantized_move,
            buy_volume: clearing.buy_volume,
            sell_volume: clearing.sell_volume,
            n_buyers: clearing.n_buyers,
            n_sellers: clearing.n_sellers,
            n_replaced: self.last_replacements.len(),
        }
    }
}

/// Series produced by one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutput {
    /// Market prices `p(0..=T)`.
    pub prices: Vec<f64>,
    /// Cognitive prices `P(0..=T)`.
    pub cognitive_prices: Vec<i64>,
    /// `records[t - 1]` describes step `t`.
    pub records: Vec<StepRecord>,
    pub replacements: Vec<Replacement>,
}

impl TrialOutput {
    pub fn steps(&self) -> usize {
        self.records.len()
    }

    /// `true` when every price is strictly positive, so log returns exist
    /// at every step.
    pub fn prices_positive(&self) -> bool {
        self.prices.iter().all(|&p| p > 0.0)
    }
}

/// Runs `config.steps` steps of a freshly initialized market.
pub fn run_trial(config: &GameConfig) -> Result<TrialOutput, ConfigError> {
    let mut market = Market::new(config.clone())?;
    let steps = config.steps;
    let mut out = TrialOutput {
        prices: Vec::with_capacity(steps + 1),
        cognitive_prices: Vec::with_capacity(steps + 1),
        records: Vec::with_capacity(steps),
        replacements: Vec::new(),
    };
    out.prices.push(market.state().market_price);
    out.cognitive_prices.push(market.state().cognitive_price);
    for _ in 0..steps {
        let record = market.step();
        let step = market.state().step;
        out.replacements
            .extend(market.last_replacements().iter().map(|&player| Replacement { step, player }));
        out.prices.push(market.state().market_price);
        out.cognitive_prices.push(market.state().cognitive_price);
        out.records.push(record);
    }
    Ok(out)
}
