use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported memory. A strategy table has `5^memory` entries.
pub const MAX_MEMORY: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{key}: {message}")]
    OutOfRange { key: &'static str, message: String },
}

/// Model parameters of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Number of players `N`; also the market depth in `dp = D / N`.
    pub n_players: usize,
    /// Memory `M`: number of quantized moves in the history window.
    pub memory: usize,
    /// Strategies per player `S`.
    pub n_strategies: usize,
    /// Board lot `B`: wealth needed per unit of order volume.
    pub board_lot: i64,
    /// Cognitive threshold `C` separating "large" from ordinary moves.
    pub cognitive_threshold: f64,
    pub initial_price: f64,
    /// Number of time steps `T`.
    pub steps: usize,
    pub seed: u64,
}

impl Default for GameConfig {
    /// The baseline setting N=1000, M=5, S=2, B=9, C=3, p(0)=100, T=50,000.
    fn default() -> Self {
        Self {
            n_players: 1000,
            memory: 5,
            n_strategies: 2,
            board_lot: 9,
            cognitive_threshold: 3.0,
            initial_price: 100.0,
            steps: 50_000,
            seed: 42,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn fail(key: &'static str, message: &str) -> Result<(), ConfigError> {
            Err(ConfigError::OutOfRange {
                key,
                message: message.to_string(),
            })
        }
        if self.n_players < 1 {
            return fail("n_players", "must be at least 1");
        }
        if self.memory < 1 || self.memory > MAX_MEMORY {
            return fail("memory", &format!("must be in 1..={MAX_MEMORY}"));
        }
        if self.n_strategies < 1 {
            return fail("n_strategies", "must be at least 1");
        }
        if self.board_lot < 1 {
            return fail("board_lot", "must be at least 1");
        }
        if !(self.cognitive_threshold > 0.0 && self.cognitive_threshold.is_finite()) {
            return fail("cognitive_threshold", "must be a positive finite number");
        }
        if !self.initial_price.is_finite() {
            return fail("initial_price", "must be finite");
        }
        if self.steps < 1 {
            return fail("steps", "must be at least 1");
        }
        Ok(())
    }

    /// Number of distinct history windows, `5^memory`.
    pub fn n_histories(&self) -> usize {
        5usize.pow(self.memory as u32)
    }
}
