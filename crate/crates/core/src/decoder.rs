//! Batch iterative decoding on sets of eligible symbols.
//!
//! Messages are affine subspaces of GF(2^p). A flooding iteration computes
//! every check-to-variable set `ℬ_{m,n} = Σ h_{m,n'} 𝒜_{m,n'}`, then every
//! variable-to-check set `𝒜_{m,n} = ℰ_n ∩ ⋂ h_{m',n}^{-1} ℬ_{m',n}` and the
//! a posteriori sets `ℰ̄_n`. Nodes whose inputs did not change are skipped,
//! which gives the same result as recomputing them.

use crate::channel::ChannelOutput;
use crate::code::LdpcCode;
use crate::error::{Error, Result};
use crate::subspace::{AffineSet, Coset, Subspace};

/// `ℬ_{m,n}` for edge `e = (m, n)` from the incoming sets `a` (indexed by edge).
pub fn check_message(code: &LdpcCode, a: &[Coset], e: usize) -> Coset {
    let m = code.edges()[e].check;
    code.check_edges(m)
        .iter()
        .filter(|&&k| k != e)
        .fold(Coset::linear(Subspace::zero()), |acc, &k| acc.sum(&a[k].transform(code.edge_map(k))))
}

/// `𝒜_{m,n}` for edge `e = (m, n)` from the a priori set of `n` and the
/// incoming sets `b` (indexed by edge).
pub fn variable_message(code: &LdpcCode, a_priori: &Coset, b: &[Coset], e: usize) -> AffineSet {
    let n = code.edges()[e].var;
    code.var_edges(n).iter().filter(|&&k| k != e).fold(AffineSet::Coset(*a_priori), |acc, &k| {
        acc.intersect(&AffineSet::Coset(b[k].transform(code.edge_inv_map(k))))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Every a posteriori set is a singleton.
    Success,
    /// A fixed point or the iteration limit was reached first.
    Stalled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// The a posteriori sets `ℰ̄_n`.
    pub sets: Vec<Coset>,
    pub outcome: DecodeOutcome,
    pub iterations: usize,
}

impl DecodeResult {
    /// Constituent bits still undetermined, `Σ dim ℰ̄_n`.
    pub fn residual_bits(&self) -> usize {
        self.sets.iter().map(Coset::dim).sum()
    }
}

/// Flooding decoder state.
#[derive(Clone, Debug)]
pub struct BatchDecoder<'c> {
    code: &'c LdpcCode,
    a_priori: Vec<Coset>,
    a: Vec<Coset>,
    b: Vec<Coset>,
    post: Vec<Coset>,
    iteration: usize,
    check_dirty: Vec<bool>,
    var_dirty: Vec<bool>,
    scratch: Vec<Coset>,
    pulled: Vec<Coset>,
    meets: Vec<AffineSet>,
}

impl<'c> BatchDecoder<'c> {
    pub fn new(code: &'c LdpcCode, channel: &ChannelOutput) -> Result<Self> {
        if channel.len() != code.n() || channel.p() != code.p() {
            return Err(Error::Invalid(format!(
                "channel output has {} symbols of {} bits, the code has {} symbols of {} bits",
                channel.len(),
                channel.p(),
                code.n(),
                code.p()
            )));
        }
        Ok(Self::from_sets(code, channel.a_priori_sets()))
    }

    /// Start from arbitrary a priori sets.
    pub fn from_sets(code: &'c LdpcCode, a_priori: Vec<Coset>) -> Self {
        assert_eq!(a_priori.len(), code.n(), "one a priori set per variable");
        let a = code.edges().iter().map(|e| a_priori[e.var]).collect();
        let b = vec![Coset::full(code.p()); code.edges().len()];
        BatchDecoder {
            code,
            post: a_priori.clone(),
            a_priori,
            a,
            b,
            iteration: 0,
            check_dirty: vec![true; code.m()],
            var_dirty: vec![true; code.n()],
            scratch: Vec::new(),
            pulled: Vec::new(),
            meets: Vec::new(),
        }
    }

    pub fn code(&self) -> &LdpcCode {
        self.code
    }

    pub fn a_priori(&self) -> &[Coset] {
        &self.a_priori
    }

    /// `𝒜_{m,n}`, indexed by edge.
    pub fn var_to_check(&self) -> &[Coset] {
        &self.a
    }

    /// `ℬ_{m,n}`, indexed by edge. Before the first iteration every entry is
    /// the full space.
    pub fn check_to_var(&self) -> &[Coset] {
        &self.b
    }

    pub fn a_posteriori(&self) -> &[Coset] {
        &self.post
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn is_success(&self) -> bool {
        self.post.iter().all(|s| s.dim() == 0)
    }

    /// One flooding iteration. Returns whether any set changed.
    pub fn step(&mut self) -> Result<bool> {
        let code = self.code;
        self.iteration += 1;
        let mut changed = false;

        for m in 0..code.m() {
            if !std::mem::take(&mut self.check_dirty[m]) {
                continue;
            }
            let edges = code.check_edges(m);
            // suffix sums of h·𝒜, then a running prefix
            self.scratch.clear();
            self.scratch.resize(edges.len() + 1, Coset::linear(Subspace::zero()));
            for (i, &e) in edges.iter().enumerate().rev() {
                self.scratch[i] = self.scratch[i + 1].sum(&self.a[e].transform(code.edge_map(e)));
            }
            let mut prefix = Coset::linear(Subspace::zero());
            for (i, &e) in edges.iter().enumerate() {
                let msg = prefix.sum(&self.scratch[i + 1]);
                if msg != self.b[e] {
                    self.b[e] = msg;
                    self.var_dirty[code.edges()[e].var] = true;
                    changed = true;
                }
                prefix = prefix.sum(&self.a[e].transform(code.edge_map(e)));
            }
        }

        for n in 0..code.n() {
            if !std::mem::take(&mut self.var_dirty[n]) {
                continue;
            }
            let edges = code.var_edges(n);
            let pulled = &mut self.pulled;
            pulled.clear();
            pulled.extend(edges.iter().map(|&e| self.b[e].transform(code.edge_inv_map(e))));
            let suffix = &mut self.meets;
            suffix.clear();
            suffix.resize(edges.len() + 1, AffineSet::Coset(Coset::full(code.p())));
            for i in (0..edges.len()).rev() {
                suffix[i] = suffix[i + 1].intersect(&AffineSet::Coset(pulled[i]));
            }
            let mut prefix = AffineSet::Coset(self.a_priori[n]);
            for (i, &e) in edges.iter().enumerate() {
                let msg = *prefix.intersect(&suffix[i + 1]).as_coset().ok_or(Error::Contradiction { var: n })?;
                if msg != self.a[e] {
                    self.a[e] = msg;
                    self.check_dirty[code.edges()[e].check] = true;
                    changed = true;
                }
                prefix = prefix.intersect(&AffineSet::Coset(pulled[i]));
            }
            let post = *prefix.as_coset().ok_or(Error::Contradiction { var: n })?;
            if post != self.post[n] {
                self.post[n] = post;
                changed = true;
            }
        }
        Ok(changed)
    }

    /// Iterate until success, a fixed point, or `max_iters` iterations.
    pub fn run(&mut self, max_iters: usize) -> Result<DecodeOutcome> {
        while self.iteration < max_iters {
            let changed = self.step()?;
            if self.is_success() {
                return Ok(DecodeOutcome::Success);
            }
            if !changed {
                break;
            }
        }
        Ok(if self.is_success() { DecodeOutcome::Success } else { DecodeOutcome::Stalled })
    }

    pub fn into_result(self, outcome: DecodeOutcome) -> DecodeResult {
        DecodeResult { sets: self.post, outcome, iterations: self.iteration }
    }
}

/// Decode `channel` with at most `max_iters` flooding iterations (default `N`).
pub fn decode(code: &LdpcCode, channel: &ChannelOutput, max_iters: Option<usize>) -> Result<DecodeResult> {
    let max_iters = max_iters.unwrap_or(code.n()).max(1);
    let mut dec = BatchDecoder::new(code, channel)?;
    let outcome = dec.run(max_iters)?;
    Ok(dec.into_result(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::BitObservation;
    use crate::code::Edge;
    use crate::gf::{Field, GroupKind, Label, Symbol};

    fn set(elems: &[u8]) -> Coset {
        *AffineSet::from_elements(&elems.iter().map(|&v| Symbol(v)).collect::<Vec<_>>()).unwrap().as_coset().unwrap()
    }

    fn elems(c: &Coset) -> Vec<u8> {
        c.elements().into_iter().map(Symbol::value).collect()
    }

    fn single_check(p: u8, labels: &[u8]) -> LdpcCode {
        let field = Field::with_degree(p).unwrap();
        let edges =
            labels.iter().enumerate().map(|(v, &h)| Edge { check: 0, var: v, label: Label::Unit(Symbol(h)) }).collect();
        LdpcCode::new(field, GroupKind::Field, labels.len(), 1, edges).unwrap()
    }

    #[test]
    fn check_rule_examples() {
        let code = single_check(2, &[2, 1, 1]);
        // edge 2 sees h=2 on {0,1} and h=1 on {0}
        let a = vec![set(&[0, 1]), set(&[0]), Coset::full(2)];
        assert_eq!(elems(&check_message(&code, &a, 2)), vec![0, 2]);
        let deg1 = single_check(2, &[3]);
        assert_eq!(elems(&check_message(&deg1, &[Coset::full(2)], 0)), vec![0]);
    }

    #[test]
    fn variable_rule_examples() {
        let field = Field::with_degree(3).unwrap();
        let edges = vec![
            Edge { check: 0, var: 0, label: Label::Unit(Symbol(1)) },
            Edge { check: 1, var: 0, label: Label::Unit(Symbol(1)) },
        ];
        let code = LdpcCode::new(field, GroupKind::Field, 1, 2, edges).unwrap();
        let b = vec![Coset::full(3), set(&[0, 1, 4, 5])];
        let out = variable_message(&code, &set(&[0, 1, 2, 3]), &b, 0);
        assert_eq!(out.elements().into_iter().map(Symbol::value).collect::<Vec<_>>(), vec![0, 1]);
        // degree one: a priori set passes through
        let out = variable_message(&code, &set(&[2, 3]), &b, 1);
        assert_eq!(out, AffineSet::Coset(set(&[2, 3])));
    }

    #[test]
    fn solves_single_check() {
        // s1 + 2 s2 = 0 over GF(4) with s1 = 1 known
        let code = single_check(2, &[1, 2]);
        let ch = ChannelOutput::new(2, vec![BitObservation::received(Symbol(1), 2), BitObservation::erased()]);
        let res = decode(&code, &ch, None).unwrap();
        assert_eq!(res.outcome, DecodeOutcome::Success);
        let field = Field::with_degree(2).unwrap();
        let expected = field.mul(field.inv(Symbol(2)).unwrap(), Symbol(1));
        assert_eq!(res.sets[1].as_singleton(), Some(expected));
        assert_eq!(expected, Symbol(3));
    }

    #[test]
    fn trivial_channels() {
        let code = single_check(2, &[1, 2, 3]);
        let ch = ChannelOutput::noiseless(&[Symbol(0); 3], 2);
        let res = decode(&code, &ch, None).unwrap();
        assert_eq!((res.outcome, res.iterations), (DecodeOutcome::Success, 1));
        let res = decode(&code, &ChannelOutput::all_erased(2, 3), None).unwrap();
        assert_eq!(res.outcome, DecodeOutcome::Stalled);
        assert!(res.sets.iter().all(|s| *s == Coset::full(2)));
        assert_eq!(res.residual_bits(), 6);
    }

    #[test]
    fn contradiction_is_reported() {
        // s0 + s1 = 0 but s0 = 1, s1 = 2 observed
        let code = single_check(2, &[1, 1]);
        let ch = ChannelOutput::noiseless(&[Symbol(1), Symbol(2)], 2);
        assert!(matches!(decode(&code, &ch, None), Err(Error::Contradiction { .. })));
    }

    #[test]
    fn size_mismatch() {
        let code = single_check(2, &[1, 1]);
        assert!(decode(&code, &ChannelOutput::all_erased(2, 3), None).is_err());
        assert!(decode(&code, &ChannelOutput::all_erased(3, 2), None).is_err());
    }
}
