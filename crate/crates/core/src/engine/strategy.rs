use rand::Rng;

/// A trading action: sell (-1), hold/idle (0) or buy (+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Action {
    Sell = -1,
    Hold = 0,
    Buy = 1,
}

impl Action {
    pub fn value(self) -> i64 {
        self as i8 as i64
    }

    pub fn opposite(self) -> Action {
        match self {
            Action::Sell => Action::Buy,
            Action::Hold => Action::Hold,
            Action::Buy => Action::Sell,
        }
    }

    /// # Panics
    ///
    /// Panics for values outside `-1..=1`.
    pub fn from_value(v: i8) -> Action {
        match v {
            -1 => Action::Sell,
            0 => Action::Hold,
            1 => Action::Buy,
            _ => panic!("action value {v} out of range"),
        }
    }
}

/// Recommended action for every one of the `5^M` history windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTable {
    entries: Vec<Action>,
}

impl StrategyTable {
    /// # Panics
    ///
    /// Panics unless the table length is a power of five.
    pub fn new(entries: Vec<Action>) -> Self {
        let mut n = entries.len();
        assert!(n > 0, "empty strategy table");
        while n % 5 == 0 {
            n /= 5;
        }
        assert_eq!(n, 1, "strategy table length must be 5^M");
        Self { entries }
    }

    /// Builds a table from `-1/0/1` values.
    pub fn from_values(values: &[i8]) -> Self {
        Self::new(values.iter().map(|&v| Action::from_value(v)).collect())
    }

    #[inline]
    pub fn recommend(&self, history_index: usize) -> Action {
        self.entries[history_index]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Action] {
        &self.entries
    }
}

/// Base-3 expansion of every byte value below `3^5 = 243`.
const TRIT_BLOCKS: [[Action; 5]; 243] = {
    let mut table = [[Action::Hold; 5]; 243];
    let mut v = 0;
    while v < 243 {
        let mut x = v;
        let mut k = 0;
        while k < 5 {
            table[v][k] = match x % 3 {
                0 => Action::Sell,
                1 => Action::Hold,
                _ => Action::Buy,
            };
            x /= 3;
            k += 1;
        }
        v += 1;
    }
    table
};

/// A table of `5^memory` actions drawn i.i.d. uniformly from `{-1, 0, 1}`.
pub fn generate_strategy<R: Rng + ?Sized>(rng: &mut R, memory: usize) -> StrategyTable {
    assert!(memory >= 1);
    let len = 5usize.pow(memory as u32);
    let mut entries = Vec::with_capacity(len + 5);
    while entries.len() < len {
        // Bytes >= 243 are rejected so each accepted byte carries five
        // independent uniform trits.
        for byte in rng.random::<u64>().to_le_bytes() {
            if byte < 243 && entries.len() < len {
                entries.extend_from_slice(&TRIT_BLOCKS[byte as usize]);
            }
        }
    }
    entries.truncate(len);
    StrategyTable { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(generate_strategy(&mut rng, 1).len(), 5);
        assert_eq!(generate_strategy(&mut rng, 5).len(), 3125);
    }

    #[test]
    fn actions_are_uniform() {
        // Chi-square goodness of fit over 10^6 entries, plus the +-0.01 band.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0u64; 3];
        let mut total = 0u64;
        while total < 1_000_000 {
            let t = generate_strategy(&mut rng, 6);
            for a in t.entries() {
                counts[(a.value() + 1) as usize] += 1;
            }
            total += t.len() as u64;
        }
        let expected = total as f64 / 3.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9% quantile of chi-square with 2 degrees of freedom.
        assert!(chi2 < 13.816, "chi2 = {chi2}");
        for c in counts {
            assert!((c as f64 / total as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn trit_blocks_enumerate_all_patterns() {
        let mut seen = std::collections::HashSet::new();
        for block in TRIT_BLOCKS.iter() {
            assert!(seen.insert(*block));
        }
        assert_eq!(seen.len(), 243);
    }

    #[test]
    fn adjacent_entries_are_independent() {
        // Pairs (e[k], e[k+1]) within one draw must be uniform over 9 cells.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut cells = [0u64; 9];
        for _ in 0..200 {
            let t = generate_strategy(&mut rng, 5);
            for w in t.entries().chunks_exact(2) {
                cells[((w[0].value() + 1) * 3 + w[1].value() + 1) as usize] += 1;
            }
        }
        let total: u64 = cells.iter().sum();
        let expected = total as f64 / 9.0;
        let chi2: f64 = cells.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi-square with 8 degrees of freedom.
        assert!(chi2 < 26.12, "chi2 = {chi2}");
    }

    #[test]
    #[should_panic]
    fn rejects_bad_length() {
        StrategyTable::from_values(&[0, 1, -1]);
    }
}
