//! Density evolution on conjugation classes.
//!
//! When `f` is uniform over the label group, the law of `h V` is constant on
//! every orbit `{g V : g ∈ 𝕃}`, and sums and intersections of independent
//! orbit-uniform subspaces are again orbit-uniform. The check messages and
//! the label-pushed variable messages are then described by one mass per
//! orbit. The a priori law `γ` is not orbit-uniform (it lives on coordinate
//! subspaces), so the variable update is taken through a table of
//! `V₀ ∩ W` for each coordinate subspace `V₀` and orbit of `W`. The orbit of
//! `{0}` is `{0}` itself, so `P_ℓ({0})` is tracked exactly.
//!
//! For the full matrix group the orbits are the dimensions `0..=p`.

use std::sync::Arc;

use super::{bisect, run_evolution, DeQuery, Evolution, Lattice, Recursion, SubspaceDist};
use crate::error::{Error, Result};
use crate::subspace::{conjugation_classes, Partition, Subspace};

fn normalize(v: &mut [f64]) {
    let t: f64 = v.iter().sum();
    if t > 0.0 {
        v.iter_mut().for_each(|x| *x /= t);
    }
}

#[derive(Clone, Debug)]
pub struct ReducedEvolution {
    query: DeQuery,
    partition: Partition,
    /// `class_sum[(a*K + b)*K + c] = Pr(V₁ + V₂ ∈ c)` for `V₁, V₂` uniform on orbits `a`, `b`.
    class_sum: Vec<f64>,
    class_meet: Vec<f64>,
    /// Per coordinate subspace `V₀` (by erased-bit count `k`): `Pr(V₀ ∩ W ∈ c')`
    /// for `W` uniform on orbit `c`, stored as `[c * K + c']`.
    gamma_meet: Vec<(i32, Vec<f64>)>,
    zero_class: usize,
    full_class: usize,
}

/// Build the orbit-reduced recursion. Requires `f` uniform over the whole
/// label group.
pub fn reduce_by_conjugation(query: DeQuery) -> Result<ReducedEvolution> {
    query.validate()?;
    let ens = &query.ensemble;
    if !ens.pdf.is_uniform_over_group(&ens.field) {
        return Err(Error::Distribution("orbit reduction requires a uniform label distribution".into()));
    }
    let lattice = Arc::new(Lattice::new(ens.field.p())?);
    let labels: Vec<_> = ens.pdf.support().iter().map(|(h, _)| *h).collect();
    let partition = conjugation_classes(lattice.grassmannian(), &ens.field, &labels);
    let k = partition.len();
    let classes = partition.classes();

    let table = |op: &dyn Fn(usize, usize) -> usize| {
        let mut t = vec![0.0; k * k * k];
        for a in 0..k {
            for b in 0..k {
                let w = 1.0 / (classes[a].len() * classes[b].len()) as f64;
                for &i in &classes[a] {
                    for &j in &classes[b] {
                        t[(a * k + b) * k + partition.class_of(op(i, j))] += w;
                    }
                }
            }
        }
        t
    };
    let class_sum = table(&|i, j| lattice.sum_index(i, j));
    let class_meet = table(&|i, j| lattice.meet_index(i, j));

    let g = lattice.grassmannian();
    let p = ens.field.p();
    let gamma_meet = (0u8..=(((1u16 << p) - 1) as u8))
        .map(|mask| {
            let v0 = g.position(&Subspace::coordinate(mask)).expect("coordinate subspace");
            let mut t = vec![0.0; k * k];
            for (c, members) in classes.iter().enumerate() {
                let w = 1.0 / members.len() as f64;
                for &j in members {
                    t[c * k + partition.class_of(lattice.meet_index(v0, j))] += w;
                }
            }
            (mask.count_ones() as i32, t)
        })
        .collect();
    let zero_class = partition.class_of(g.zero_index());
    let full_class = partition.class_of(g.full_index());
    Ok(ReducedEvolution { query, partition, class_sum, class_meet, gamma_meet, zero_class, full_class })
}

impl ReducedEvolution {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Number of orbits, the size of the reduced state.
    pub fn state_size(&self) -> usize {
        self.partition.len()
    }

    pub fn query(&self) -> &DeQuery {
        &self.query
    }

    /// Orbit masses of a distribution over the Grassmannian.
    pub fn class_masses(&self, d: &SubspaceDist) -> Vec<f64> {
        let mut out = vec![0.0; self.state_size()];
        for (i, &m) in d.masses().iter().enumerate() {
            out[self.partition.class_of(i)] += m;
        }
        out
    }

    fn convolve(&self, a: &[f64], b: &[f64], table: &[f64]) -> Vec<f64> {
        let k = self.state_size();
        let mut out = vec![0.0; k];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0.0 {
                    let row = &table[(i * k + j) * k..(i * k + j + 1) * k];
                    for (o, &t) in out.iter_mut().zip(row) {
                        *o += x * y * t;
                    }
                }
            }
        }
        out
    }

    /// Orbit masses of `γ`.
    pub fn gamma(&self, epsilon: f64) -> Vec<f64> {
        let k = self.state_size();
        let p = self.query.ensemble.field.p() as i32;
        let full = self.full_class;
        let mut out = vec![0.0; k];
        for (dim, t) in &self.gamma_meet {
            let w = epsilon.powi(*dim) * (1.0 - epsilon).powi(p - dim);
            for (o, &x) in out.iter_mut().zip(&t[full * k..(full + 1) * k]) {
                *o += w * x;
            }
        }
        out
    }

    /// Orbit masses of `(Q_{ℓ+1}, P_{ℓ+1})` from those of `P_ℓ`.
    pub fn reduced_iteration(&self, p: &[f64], epsilon: f64) -> (Vec<f64>, Vec<f64>) {
        let k = self.state_size();
        let degrees = &self.query.ensemble.degrees;
        let mut q = vec![0.0; k];
        let mut acc = vec![0.0; k];
        acc[self.zero_class] = 1.0;
        for d in 1..=degrees.max_check_degree() {
            if d > 1 {
                acc = self.convolve(&acc, p, &self.class_sum);
            }
            if let Some(&w) = degrees.rho().get(&d) {
                q.iter_mut().zip(&acc).for_each(|(o, x)| *o += w * x);
            }
        }
        normalize(&mut q);

        let pdim = self.query.ensemble.field.p() as i32;
        let mut next = vec![0.0; k];
        let mut acc = vec![0.0; k];
        acc[self.full_class] = 1.0;
        for d in 1..=degrees.max_var_degree() {
            if d > 1 {
                acc = self.convolve(&acc, &q, &self.class_meet);
            }
            if let Some(&w) = degrees.lambda().get(&d) {
                for (dim, t) in &self.gamma_meet {
                    let g = w * epsilon.powi(*dim) * (1.0 - epsilon).powi(pdim - dim);
                    if g == 0.0 {
                        continue;
                    }
                    for (c, &x) in acc.iter().enumerate() {
                        if x != 0.0 {
                            for (o, &t) in next.iter_mut().zip(&t[c * k..(c + 1) * k]) {
                                *o += g * x * t;
                            }
                        }
                    }
                }
            }
        }
        normalize(&mut next);
        (q, next)
    }

    pub fn evolve(&self, epsilon: f64) -> Evolution {
        run_evolution(self, &self.query, epsilon)
    }

    pub fn threshold(&self) -> f64 {
        bisect(self.query.bisection_tolerance, |eps| self.evolve(eps).converged)
    }
}

impl Recursion for ReducedEvolution {
    type State = Vec<f64>;

    fn initial(&self, epsilon: f64) -> Vec<f64> {
        self.gamma(epsilon)
    }

    fn step(&self, state: &Vec<f64>, epsilon: f64) -> Vec<f64> {
        self.reduced_iteration(state, epsilon).1
    }

    fn p_zero(&self, state: &Vec<f64>) -> f64 {
        state[self.zero_class]
    }

    fn masses(state: &Vec<f64>) -> Vec<f64> {
        state.clone()
    }
}
