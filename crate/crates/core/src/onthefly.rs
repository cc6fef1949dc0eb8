//! Minimum-delay decoding: bits are fed one at a time and every received bit
//! is propagated through the checks right away.
//!
//! Arrival stream files hold one bit per line, `symbol_index bit_position
//! bit_value`, where `bit_position` is the index `i` of the constituent bit
//! `b_i` (0 is the least significant bit).

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binary::Encoder;
use crate::channel::{BitObservation, ChannelOutput};
use crate::code::LdpcCode;
use crate::decoder::decode;
use crate::error::{Error, Result};
use crate::gf::Symbol;
use crate::subspace::{AffineSet, Coset, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitArrival {
    pub var: usize,
    pub pos: u8,
    pub value: bool,
}

/// An ordered sequence of received bits, each `(variable, position)` at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArrivalStream {
    bits: Vec<BitArrival>,
}

impl ArrivalStream {
    /// Validate against a code with `n` symbols of `p` bits.
    pub fn new(bits: Vec<BitArrival>, n: usize, p: u8) -> Result<Self> {
        let mut seen = vec![0u8; n];
        for (i, b) in bits.iter().enumerate() {
            if b.var >= n || b.pos >= p {
                return Err(Error::Invalid(format!("arrival {i}: bit ({}, {}) out of range", b.var, b.pos)));
            }
            if seen[b.var] >> b.pos & 1 == 1 {
                return Err(Error::Invalid(format!("arrival {i}: bit ({}, {}) received twice", b.var, b.pos)));
            }
            seen[b.var] |= 1 << b.pos;
        }
        Ok(ArrivalStream { bits })
    }

    /// All `N p` bits of `word` in a uniformly random order.
    pub fn shuffled<R: Rng + ?Sized>(word: &[Symbol], p: u8, rng: &mut R) -> Self {
        let mut bits: Vec<BitArrival> = word
            .iter()
            .enumerate()
            .flat_map(|(var, s)| (0..p).map(move |pos| BitArrival { var, pos, value: s.bit(pos) }))
            .collect();
        bits.shuffle(rng);
        ArrivalStream { bits }
    }

    pub fn bits(&self) -> &[BitArrival] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The first `k` arrivals as a channel output over `n` symbols.
    pub fn prefix_channel(&self, k: usize, n: usize, p: u8) -> ChannelOutput {
        let mut obs = vec![BitObservation::erased(); n];
        for b in &self.bits[..k.min(self.bits.len())] {
            obs[b.var] = obs[b.var].with_bit(b.pos, b.value);
        }
        ChannelOutput::new(p, obs)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.bits {
            writeln!(out, "{} {} {}", b.var, b.pos, b.value as u8).unwrap();
        }
        out
    }

    pub fn from_text(text: &str, n: usize, p: u8) -> Result<Self> {
        let mut bits = Vec::new();
        let mut seen = vec![0u8; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [var, pos, value] = fields[..] else {
                return Err(Error::parse(i + 1, "expected `symbol_index bit_position bit_value`"));
            };
            let var: usize = var.parse().map_err(|_| Error::parse(i + 1, "bad symbol index"))?;
            let pos: u8 = pos.parse().map_err(|_| Error::parse(i + 1, "bad bit position"))?;
            let value = match value {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(i + 1, "bit value must be 0 or 1")),
            };
            if var >= n || pos >= p {
                return Err(Error::parse(i + 1, format!("bit ({var}, {pos}) out of range")));
            }
            if seen[var] >> pos & 1 == 1 {
                return Err(Error::parse(i + 1, format!("bit ({var}, {pos}) received twice")));
            }
            seen[var] |= 1 << pos;
            bits.push(BitArrival { var, pos, value });
        }
        Ok(ArrivalStream { bits })
    }
}

/// Eligible sets under incremental reception.
#[derive(Clone, Debug)]
pub struct OnTheFlyDecoder<'c> {
    code: &'c LdpcCode,
    sets: Vec<Coset>,
    unresolved: usize,
    received: usize,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    touched: Vec<bool>,
    pushed: Vec<Coset>,
    suffix: Vec<Coset>,
}

impl<'c> OnTheFlyDecoder<'c> {
    pub fn new(code: &'c LdpcCode) -> Self {
        let full = Coset::full(code.p());
        OnTheFlyDecoder {
            code,
            sets: vec![full; code.n()],
            unresolved: code.n(),
            received: 0,
            queue: VecDeque::new(),
            queued: vec![false; code.n()],
            touched: vec![false; code.n()],
            pushed: Vec::new(),
            suffix: Vec::new(),
        }
    }

    pub fn sets(&self) -> &[Coset] {
        &self.sets
    }

    /// Bits ingested so far.
    pub fn received(&self) -> usize {
        self.received
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved == 0
    }

    /// Receive `b_pos = value` for variable `var` and propagate to
    /// quiescence. Returns the variables whose set shrank, in order of first
    /// change.
    pub fn ingest_bit(&mut self, var: usize, pos: u8, value: bool) -> Result<Vec<usize>> {
        let p = self.code.p();
        if var >= self.code.n() || pos >= p {
            return Err(Error::Invalid(format!("bit ({var}, {pos}) out of range")));
        }
        self.received += 1;
        let mask = ((1u16 << p) - 1) as u8;
        let plane = Coset::new(Symbol((value as u8) << pos), Subspace::coordinate(mask & !(1 << pos)));
        let mut changed = Vec::new();
        let result = self.propagate(var, &plane, &mut changed);
        for &n in &changed {
            self.touched[n] = false;
        }
        if result.is_err() {
            for n in self.queue.drain(..) {
                self.queued[n] = false;
            }
        }
        result.map(|_| changed)
    }

    fn propagate(&mut self, var: usize, plane: &Coset, changed: &mut Vec<usize>) -> Result<()> {
        if self.shrink(var, plane, changed)? {
            self.enqueue(var);
        }
        while let Some(n) = self.queue.pop_front() {
            self.queued[n] = false;
            for &e in self.code.var_edges(n) {
                let m = self.code.edges()[e].check;
                self.process_check(m, n, changed)?;
            }
        }
        Ok(())
    }

    fn enqueue(&mut self, n: usize) {
        if !self.queued[n] {
            self.queued[n] = true;
            self.queue.push_back(n);
        }
    }

    /// `ℰ_n ← ℰ_n ∩ s`. Returns whether the set shrank.
    fn shrink(&mut self, n: usize, s: &Coset, changed: &mut Vec<usize>) -> Result<bool> {
        let AffineSet::Coset(next) = self.sets[n].intersect(s) else {
            return Err(Error::Contradiction { var: n });
        };
        if next.dim() == self.sets[n].dim() {
            return Ok(false);
        }
        if self.sets[n].dim() > 0 && next.dim() == 0 {
            self.unresolved -= 1;
        }
        if !self.touched[n] {
            self.touched[n] = true;
            changed.push(n);
        }
        self.sets[n] = next;
        Ok(true)
    }

    /// Update every neighbour `n' ≠ from` of check `m` to
    /// `ℰ_{n'} ∩ h_{n'}^{-1} Σ_{k ≠ n'} h_k ℰ_k`.
    fn process_check(&mut self, m: usize, from: usize, changed: &mut Vec<usize>) -> Result<()> {
        let code = self.code;
        let edges = code.check_edges(m);
        self.pushed.clear();
        self.pushed.extend(edges.iter().map(|&e| self.sets[code.edges()[e].var].transform(code.edge_map(e))));
        self.suffix.clear();
        self.suffix.resize(edges.len() + 1, Coset::linear(Subspace::zero()));
        for i in (0..edges.len()).rev() {
            self.suffix[i] = self.suffix[i + 1].sum(&self.pushed[i]);
        }
        let mut prefix = Coset::linear(Subspace::zero());
        for (i, &e) in edges.iter().enumerate() {
            let n = code.edges()[e].var;
            if n != from {
                let allowed = prefix.sum(&self.suffix[i + 1]).transform(code.edge_inv_map(e));
                if self.shrink(n, &allowed, changed)? {
                    self.enqueue(n);
                }
            }
            prefix = prefix.sum(&self.pushed[i]);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StreamOutcome {
    /// Prefix length after which every set is a singleton; `None` when the
    /// stream ran out first.
    pub k_received: Option<usize>,
    pub sets: Vec<Coset>,
}

/// Feed `stream` in order, stopping as soon as every symbol is determined.
pub fn decode_stream(code: &LdpcCode, stream: &ArrivalStream) -> Result<StreamOutcome> {
    let mut dec = OnTheFlyDecoder::new(code);
    if dec.is_complete() {
        return Ok(StreamOutcome { k_received: Some(0), sets: dec.sets });
    }
    for b in stream.bits() {
        dec.ingest_bit(b.var, b.pos, b.value)?;
        if dec.is_complete() {
            return Ok(StreamOutcome { k_received: Some(dec.received()), sets: dec.sets });
        }
    }
    Ok(StreamOutcome { k_received: None, sets: dec.sets })
}

/// Whether the on-the-fly state after the first `k` arrivals equals the
/// batch decoder's fixed point on the same received bits.
pub fn equivalence_check(code: &LdpcCode, stream: &ArrivalStream, k: usize) -> Result<bool> {
    let mut dec = OnTheFlyDecoder::new(code);
    for b in &stream.bits()[..k.min(stream.len())] {
        dec.ingest_bit(b.var, b.pos, b.value)?;
    }
    let channel = stream.prefix_channel(k, code.n(), code.p());
    let batch = decode(code, &channel, Some(usize::MAX))?;
    Ok(batch.sets == dec.sets)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InefficiencyReport {
    /// `μ = K_received / K_bin` for every completed trial, in trial order.
    pub mu_samples: Vec<f64>,
    pub mu_mean: f64,
    pub std_error: f64,
    /// Completed trials.
    pub trials: usize,
    /// Trials that did not complete even after all `N p` bits.
    pub incomplete: usize,
    pub k_bin: usize,
}

/// Per-trial generator: trial `t` of a run seeded with `seed` uses stream `t`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Monte-Carlo average inefficiency of `code`: each trial encodes a random
/// message and presents its `N p` bits in a uniformly random order.
pub fn estimate_inefficiency(code: &LdpcCode, trials: usize, seed: u64) -> Result<InefficiencyReport> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    let encoder = Encoder::new(code);
    let k_bin = encoder.k_bin();
    if k_bin == 0 {
        return Err(Error::Invalid("the code has binary dimension 0".into()));
    }
    let p = code.p();
    let outcomes: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<usize>> {
            let mut rng = trial_rng(seed, t as u64);
            let message: Vec<bool> = (0..k_bin).map(|_| rng.gen()).collect();
            let word = encoder.encode(&message)?;
            let stream = ArrivalStream::shuffled(&word, p, &mut rng);
            Ok(decode_stream(code, &stream)?.k_received)
        })
        .collect::<Result<_>>()?;
    let mu_samples: Vec<f64> = outcomes.iter().flatten().map(|&k| k as f64 / k_bin as f64).collect();
    let done = mu_samples.len();
    let (mu_mean, std_error) = mean_and_std_error(&mu_samples);
    Ok(InefficiencyReport { mu_samples, mu_mean, std_error, trials: done, incomplete: trials - done, k_bin })
}

/// Sample mean and standard error of the mean.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Edge;
    use crate::gf::{Field, GroupKind, Label};

    fn pair_code() -> LdpcCode {
        let field = Field::with_degree(2).unwrap();
        let edges = vec![
            Edge { check: 0, var: 0, label: Label::Unit(Symbol(1)) },
            Edge { check: 0, var: 1, label: Label::Unit(Symbol(1)) },
        ];
        LdpcCode::new(field, GroupKind::Field, 3, 1, edges).unwrap()
    }

    #[test]
    fn closure_forces_equal_symbols() {
        let code = pair_code();
        let mut dec = OnTheFlyDecoder::new(&code);
        assert_eq!(dec.ingest_bit(0, 0, true).unwrap(), vec![0, 1]);
        dec.ingest_bit(0, 1, true).unwrap();
        assert_eq!(dec.sets()[1].as_singleton(), Some(Symbol(3)));
        // idempotent
        assert!(dec.ingest_bit(1, 0, true).unwrap().is_empty());
        // the isolated variable only halves
        assert_eq!(dec.ingest_bit(2, 1, false).unwrap(), vec![2]);
        assert_eq!(dec.sets()[2].dim(), 1);
        assert!(matches!(dec.ingest_bit(1, 1, false), Err(Error::Contradiction { var: 1 })));
    }

    #[test]
    fn repetition_code_inefficiency_one() {
        let field = Field::with_degree(2).unwrap();
        let edges = vec![
            Edge { check: 0, var: 0, label: Label::Unit(Symbol(1)) },
            Edge { check: 0, var: 1, label: Label::Unit(Symbol(1)) },
        ];
        let code = LdpcCode::new(field, GroupKind::Field, 2, 1, edges).unwrap();
        let stream = ArrivalStream::new(
            vec![BitArrival { var: 0, pos: 0, value: true }, BitArrival { var: 0, pos: 1, value: false }],
            2,
            2,
        )
        .unwrap();
        let out = decode_stream(&code, &stream).unwrap();
        assert_eq!(out.k_received, Some(2));
        assert_eq!(Encoder::new(&code).k_bin(), 2);
        assert_eq!(out.sets[1].as_singleton(), Some(Symbol(1)));
    }

    #[test]
    fn stream_file_round_trip() {
        let stream = ArrivalStream::new(
            vec![BitArrival { var: 2, pos: 1, value: true }, BitArrival { var: 0, pos: 0, value: false }],
            3,
            2,
        )
        .unwrap();
        let text = stream.to_text();
        assert_eq!(text, "2 1 1\n0 0 0\n");
        assert_eq!(ArrivalStream::from_text(&text, 3, 2).unwrap(), stream);
        assert!(ArrivalStream::from_text("0 2 1\n", 3, 2).is_err());
        assert!(ArrivalStream::from_text("0 1 1\n0 1 0\n", 3, 2).is_err());
        assert!(ArrivalStream::from_text("0 1\n", 3, 2).is_err());
        assert!(ArrivalStream::from_text("0 1 2\n", 3, 2).is_err());
    }

    #[test]
    fn unconstrained_code_has_unit_inefficiency() {
        let field = Field::with_degree(2).unwrap();
        let code = LdpcCode::new(field, GroupKind::Field, 5, 0, vec![]).unwrap();
        let report = estimate_inefficiency(&code, 20, 1).unwrap();
        assert!(report.mu_samples.iter().all(|&mu| mu == 1.0));
        assert_eq!((report.trials, report.incomplete), (20, 0));
    }

    #[test]
    fn empty_and_full_prefixes() {
        let code = pair_code();
        let word = [Symbol(2), Symbol(2), Symbol(1)];
        let stream = ArrivalStream::shuffled(&word, 2, &mut trial_rng(5, 0));
        assert!(equivalence_check(&code, &stream, 0).unwrap());
        assert!(equivalence_check(&code, &stream, stream.len()).unwrap());
        assert_eq!(decode_stream(&code, &stream).unwrap().k_received.map(|k| k <= 6), Some(true));
    }
}
