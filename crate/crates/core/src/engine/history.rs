use std::collections::VecDeque;

/// A quantized price move `h(t)` in `{-2, -1, 0, 1, 2}`.
pub type QuantizedMove = i8;

/// Index of a history window in a strategy table.
///
/// Positional base-5 with digit value `h + 2`; the most recent move (last
/// element) is the least significant digit.
///
/// # Panics
///
/// Panics if a digit lies outside `-2..=2`.
pub fn encode_history(history: &[QuantizedMove]) -> usize {
    history.iter().fold(0usize, |acc, &h| {
        assert!((-2..=2).contains(&h), "history digit {h} out of range");
        acc * 5 + (h + 2) as usize
    })
}

/// The last `M` quantized moves, oldest first, with the encoded index cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    digits: VecDeque<QuantizedMove>,
    index: usize,
    modulus: usize,
}

impl History {
    /// # Panics
    ///
    /// Panics on an empty window or an out-of-range digit.
    pub fn new(digits: Vec<QuantizedMove>) -> Self {
        assert!(!digits.is_empty(), "history window must hold at least one digit");
        let index = encode_history(&digits);
        let modulus = 5usize.pow(digits.len() as u32);
        Self {
            digits: digits.into(),
            index,
            modulus,
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> Vec<QuantizedMove> {
        self.digits.iter().copied().collect()
    }

    /// Drops the oldest move and appends `h`.
    pub fn push(&mut self, h: QuantizedMove) {
        assert!((-2..=2).contains(&h), "history digit {h} out of range");
        self.digits.pop_front();
        self.digits.push_back(h);
        self.index = (self.index * 5 + (h + 2) as usize) % self.modulus;
    }
}
