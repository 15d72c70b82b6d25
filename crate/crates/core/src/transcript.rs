//! Bit accounting for simulated protocol runs.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub player: usize,
    pub bits: u64,
    pub tag: String,
}

/// Per-player bit counts and the ordered message log of one execution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub bits_per_player: Vec<u64>,
    pub messages: Vec<Message>,
    pub output: Option<(usize, usize)>,
}

impl Transcript {
    pub fn new(players: usize) -> Self {
        Transcript {
            bits_per_player: vec![0; players],
            messages: Vec::new(),
            output: None,
        }
    }

    pub fn players(&self) -> usize {
        self.bits_per_player.len()
    }

    /// Records a message of `bits` bits sent by `player`.
    ///
    /// Panics if `player` is not a participant.
    pub fn charge(&mut self, player: usize, bits: u64, tag: impl Into<String>) {
        self.bits_per_player[player] += bits;
        self.messages.push(Message { player, bits, tag: tag.into() });
    }

    pub fn total_bits(&self) -> u64 {
        self.bits_per_player.iter().sum()
    }

    /// Appends another transcript's messages (same player set).
    pub fn absorb(&mut self, other: &Transcript) {
        for msg in &other.messages {
            self.charge(msg.player, msg.bits, msg.tag.clone());
        }
    }

    /// Checks that the per-player counters agree with the message log.
    pub fn is_consistent(&self) -> bool {
        let mut sums = vec![0u64; self.players()];
        for msg in &self.messages {
            if msg.player >= sums.len() {
                return false;
            }
            sums[msg.player] += msg.bits;
        }
        sums == self.bits_per_player
    }
}
