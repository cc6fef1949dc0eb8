//! Erasure channel observations of symbol sequences.
//!
//! Channel files hold one line per symbol with `p` characters from
//! `{0, 1, x}`, most significant constituent bit first; `x` marks an erased
//! bit. So for GF(8) the line `0xx` is the observation `b_2 = 0` and the
//! eligible set `{0, 1, 2, 3}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Symbol, MAX_P};
use crate::subspace::{Coset, Subspace};

/// Observed constituent bits of one symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitObservation {
    known: u8,
    values: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolStatus {
    Received,
    PartiallyErased,
    Erased,
}

impl BitObservation {
    pub fn erased() -> Self {
        BitObservation::default()
    }

    pub fn received(s: Symbol, p: u8) -> Self {
        let mask = ((1u16 << p) - 1) as u8;
        BitObservation { known: mask, values: s.0 & mask }
    }

    /// `known` marks observed bits; `values` gives them (other bits ignored).
    pub fn new(known: u8, values: u8) -> Self {
        BitObservation { known, values: values & known }
    }

    pub fn known_mask(&self) -> u8 {
        self.known
    }

    pub fn values(&self) -> u8 {
        self.values
    }

    /// Observed value of `b_i`, if any.
    pub fn bit(&self, i: u8) -> Option<bool> {
        ((self.known >> i) & 1 == 1).then_some((self.values >> i) & 1 == 1)
    }

    pub fn with_bit(mut self, i: u8, value: bool) -> Self {
        self.known |= 1 << i;
        self.values = (self.values & !(1 << i)) | ((value as u8) << i);
        self
    }

    pub fn status(&self, p: u8) -> SymbolStatus {
        let mask = ((1u16 << p) - 1) as u8;
        match self.known & mask {
            0 => SymbolStatus::Erased,
            k if k == mask => SymbolStatus::Received,
            _ => SymbolStatus::PartiallyErased,
        }
    }

    /// The a priori eligible set: every symbol agreeing with the observed bits.
    pub fn a_priori(&self, p: u8) -> Coset {
        let mask = ((1u16 << p) - 1) as u8;
        Coset::new(Symbol(self.values), Subspace::coordinate(!self.known & mask))
    }
}

/// Per-symbol observations for a length-`N` word.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelOutput {
    p: u8,
    epsilon: Option<f64>,
    observations: Vec<BitObservation>,
}

impl ChannelOutput {
    pub fn new(p: u8, observations: Vec<BitObservation>) -> Self {
        ChannelOutput { p, epsilon: None, observations }
    }

    /// Everything erased.
    pub fn all_erased(p: u8, n: usize) -> Self {
        Self::new(p, vec![BitObservation::erased(); n])
    }

    /// Every bit received.
    pub fn noiseless(word: &[Symbol], p: u8) -> Self {
        Self::new(p, word.iter().map(|&s| BitObservation::received(s, p)).collect())
    }

    /// Send `word` through BEC(`epsilon`): each of the `N p` bits is erased
    /// independently with probability `epsilon`.
    pub fn transmit<R: Rng + ?Sized>(word: &[Symbol], p: u8, epsilon: f64, rng: &mut R) -> Self {
        let observations = word
            .iter()
            .map(|&s| {
                let mut known = 0u8;
                for i in 0..p {
                    if !rng.gen_bool(epsilon) {
                        known |= 1 << i;
                    }
                }
                BitObservation::new(known, s.0)
            })
            .collect();
        ChannelOutput { p, epsilon: Some(epsilon), observations }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Erasure probability used to generate this output, when known.
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn observations(&self) -> &[BitObservation] {
        &self.observations
    }

    pub fn observation_mut(&mut self, n: usize) -> &mut BitObservation {
        &mut self.observations[n]
    }

    pub fn erased_bits(&self) -> usize {
        let mask = ((1u16 << self.p) - 1) as u8;
        self.observations.iter().map(|o| (!o.known & mask).count_ones() as usize).sum()
    }

    /// `ℰ_n` for every variable.
    pub fn a_priori_sets(&self) -> Vec<Coset> {
        self.observations.iter().map(|o| o.a_priori(self.p)).collect()
    }

    /// Whether `word` agrees with every observed bit.
    pub fn is_consistent_with(&self, word: &[Symbol]) -> bool {
        word.len() == self.observations.len()
            && word.iter().zip(&self.observations).all(|(s, o)| s.0 & o.known == o.values)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.observations.len() * (self.p as usize + 1));
        for o in &self.observations {
            for i in (0..self.p).rev() {
                out.push(match o.bit(i) {
                    None => 'x',
                    Some(false) => '0',
                    Some(true) => '1',
                });
            }
            out.push('\n');
        }
        out
    }

    /// Parse a channel file for symbols of `p` bits, skipping `#` comments.
    pub fn from_text(text: &str, p: u8) -> Result<Self> {
        if p == 0 || p > MAX_P {
            return Err(Error::Field(format!("extension degree must be in 1..={MAX_P}, got {p}")));
        }
        let mut observations = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.starts_with('#') {
                continue;
            }
            if line.len() != p as usize {
                return Err(Error::parse(i + 1, format!("expected {p} characters, got `{line}`")));
            }
            let mut obs = BitObservation::erased();
            for (k, c) in line.bytes().enumerate() {
                let bit = p - 1 - k as u8;
                obs = match c {
                    b'x' | b'X' => obs,
                    b'0' => obs.with_bit(bit, false),
                    b'1' => obs.with_bit(bit, true),
                    _ => return Err(Error::parse(i + 1, format!("invalid character `{}`", c as char))),
                };
            }
            observations.push(obs);
        }
        Ok(ChannelOutput::new(p, observations))
    }
}
