//! The Speculation Game market engine.
//!
//! One [`Market`] is one trial: `N` players each hold `S` strategy tables
//! keyed by the last `M` quantized price moves. Players trade round trips
//! (open, hold, close) with volume proportional to their wealth, the price
//! moves by the excess demand over `N`, and strategies are scored in a
//! coarse-grained "cognitive" price built from the quantized moves.

mod config;
mod history;
mod market;
mod player;
mod strategy;

pub use config::{ConfigError, GameConfig};
pub use history::{encode_history, History, QuantizedMove};
pub use market::{
    clear_market, run_trial, update_cognition, Clearing, Cognition, Market, MarketState, Order,
    Replacement, StepRecord, TrialOutput,
};
pub use player::{
    decide_action, order_quantity, replace_player, review_strategies, settle_round_trip,
    settle_wealth, Amount, PlayerState, Position, Transition,
};
pub use strategy::{generate_strategy, Action, StrategyTable};
