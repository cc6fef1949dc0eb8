//! Density evolution over the Grassmannian.
//!
//! With the all-zero codeword sent, every message is a linear subspace of
//! GF(2)^p, and in the large-blocklength limit its law is a distribution
//! over the Grassmannian. `P_ℓ` is the law of the variable-to-check sets
//! and `Q_ℓ` that of the check-to-variable sets:
//!
//! ```text
//! Q_{ℓ+1} = Σ_d ρ_d · (d-1)-fold sum-convolution of  law(h A),    A ~ P_ℓ
//! P_{ℓ+1} = Σ_d λ_d · γ ∩-convolved with (d-1) copies of law(h⁻¹ B), B ~ Q_{ℓ+1}
//! ```
//!
//! where `γ` is the law of the a priori set and `h ~ f`. Decoding succeeds
//! when `P_ℓ({0}) → 1`; the threshold is the largest erasure probability for
//! which it does.

mod direct;
mod reduced;
mod surface;

use std::sync::Arc;

use crate::ensemble::{Ensemble, LabelPdf};
use crate::error::{Error, Result};
use crate::gf::BinMatrix;
use crate::subspace::{Grassmannian, Subspace};

pub use direct::{de_iteration_direct, DIRECT_BUDGET};
pub use reduced::{reduce_by_conjugation, ReducedEvolution};
pub use surface::{simplex_grid, surface_csv, threshold_points, threshold_surface, SurfacePoint};

const NEGATIVE_TOLERANCE: f64 = 1e-12;
const TOTAL_TOLERANCE: f64 = 1e-9;

/// A probability distribution over an enumerated Grassmannian.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceDist {
    mass: Vec<f64>,
}

impl SubspaceDist {
    pub fn zeros(len: usize) -> Self {
        SubspaceDist { mass: vec![0.0; len] }
    }

    pub fn point(len: usize, index: usize) -> Self {
        let mut d = Self::zeros(len);
        d.mass[index] = 1.0;
        d
    }

    /// Checks nonnegativity (up to `1e-12`) and total mass (up to `1e-9`).
    pub fn from_masses(mass: Vec<f64>) -> Result<Self> {
        let d = SubspaceDist { mass };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((i, m)) = self.mass.iter().enumerate().find(|(_, m)| !m.is_finite() || **m < -NEGATIVE_TOLERANCE) {
            return Err(Error::Distribution(format!("mass {m} at subspace {i}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > TOTAL_TOLERANCE {
            return Err(Error::Distribution(format!("total mass {total}")));
        }
        Ok(())
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Largest absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &SubspaceDist) -> f64 {
        self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Rescale to total mass 1. Iterated products turn a rounding deficit
    /// `δ` into roughly `(d_c - 1)(d_v - 1) δ` per iteration, so the
    /// recursion renormalizes after every update.
    pub fn normalize(&mut self) {
        let t = self.total();
        if t > 0.0 {
            self.mass.iter_mut().for_each(|m| *m /= t);
        }
    }

    fn add_scaled(&mut self, other: &SubspaceDist, w: f64) {
        for (a, b) in self.mass.iter_mut().zip(&other.mass) {
            *a += w * b;
        }
    }
}

/// The Grassmannian of GF(2)^p with its sum and intersection tables.
#[derive(Clone, Debug)]
pub struct Lattice {
    g: Grassmannian,
    sum: Vec<u8>,
    meet: Vec<u8>,
}

impl Lattice {
    pub fn new(p: u8) -> Result<Self> {
        let g = Grassmannian::enumerate(p)?;
        let n = g.len();
        let mut sum = vec![0u8; n * n];
        let mut meet = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (g.get(i), g.get(j));
                sum[i * n + j] = g.position(&a.sum(b)).expect("sum of subspaces") as u8;
                meet[i * n + j] = g.position(&a.intersect(b)).expect("meet of subspaces") as u8;
            }
        }
        Ok(Lattice { g, sum, meet })
    }

    pub fn grassmannian(&self) -> &Grassmannian {
        &self.g
    }

    pub fn p(&self) -> u8 {
        self.g.p()
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    #[inline]
    pub fn sum_index(&self, i: usize, j: usize) -> usize {
        self.sum[i * self.len() + j] as usize
    }

    #[inline]
    pub fn meet_index(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.len() + j] as usize
    }

    /// `index(h V_i)` for every `i`.
    pub fn action(&self, h: &BinMatrix) -> Vec<u8> {
        self.g.spaces().iter().map(|v| self.g.position(&v.transform(h)).expect("image of a subspace") as u8).collect()
    }

    /// Law of the a priori set on BEC(ε): the span of the erased unit
    /// vectors, so `γ(V) = ε^k (1-ε)^(p-k)` on coordinate subspaces of
    /// dimension `k` and zero elsewhere.
    pub fn gamma(&self, epsilon: f64) -> SubspaceDist {
        let p = self.p();
        let mut d = SubspaceDist::zeros(self.len());
        for mask in 0u8..=(((1u16 << p) - 1) as u8) {
            let k = mask.count_ones() as i32;
            let i = self.g.position(&Subspace::coordinate(mask)).expect("coordinate subspace");
            d.mass[i] += epsilon.powi(k) * (1.0 - epsilon).powi(p as i32 - k);
        }
        d
    }

    /// `out(V) = Σ_{V₁+V₂=V} a(V₁) b(V₂)`.
    pub fn check_convolve(&self, a: &SubspaceDist, b: &SubspaceDist) -> SubspaceDist {
        self.convolve(a, b, &self.sum)
    }

    /// `out(V) = Σ_{V₁∩V₂=V} a(V₁) b(V₂)`.
    pub fn variable_convolve(&self, a: &SubspaceDist, b: &SubspaceDist) -> SubspaceDist {
        self.convolve(a, b, &self.meet)
    }

    fn convolve(&self, a: &SubspaceDist, b: &SubspaceDist, table: &[u8]) -> SubspaceDist {
        let n = self.len();
        let mut out = SubspaceDist::zeros(n);
        for (i, &x) in a.mass.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let row = &table[i * n..(i + 1) * n];
            for (j, &y) in b.mass.iter().enumerate() {
                if y != 0.0 {
                    out.mass[row[j] as usize] += x * y;
                }
            }
        }
        out
    }
}

/// Forward pushes compute the law of `h V`, inverse pushes the law of `h⁻¹ V`,
/// for `h ~ f` independent of `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushDirection {
    Forward,
    Inverse,
}

/// Ensemble plus the numerical settings of the recursion and the bisection.
#[derive(Clone, Debug)]
pub struct DeQuery {
    pub ensemble: Ensemble,
    pub max_iters: usize,
    /// Convergence is declared once `P_ℓ({0}) > 1 - convergence_delta`.
    pub convergence_delta: f64,
    pub bisection_tolerance: f64,
    /// Change of `P_ℓ({0})`, relative to the remaining mass `1 - P_ℓ({0})`,
    /// treated as no change.
    pub stagnation_tolerance: f64,
    /// Consecutive unchanged iterations after which the run stops.
    pub stagnation_window: usize,
}

impl DeQuery {
    pub fn new(ensemble: Ensemble) -> Self {
        DeQuery {
            ensemble,
            max_iters: 200_000,
            convergence_delta: 1e-9,
            bisection_tolerance: 1e-5,
            stagnation_tolerance: 1e-12,
            stagnation_window: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        for (name, v) in [
            ("convergence_delta", self.convergence_delta),
            ("bisection_tolerance", self.bisection_tolerance),
            ("stagnation_tolerance", self.stagnation_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Result of running the recursion at one erasure probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub converged: bool,
    pub iterations: usize,
    /// `P_ℓ({0})` for `ℓ = 0..=iterations`.
    pub p_zero: Vec<f64>,
    pub final_p: Vec<f64>,
}

/// One step of a density evolution recursion, over any state space.
pub(crate) trait Recursion {
    type State;
    fn initial(&self, epsilon: f64) -> Self::State;
    fn step(&self, state: &Self::State, epsilon: f64) -> Self::State;
    fn p_zero(&self, state: &Self::State) -> f64;
    fn masses(state: &Self::State) -> Vec<f64>;
}

pub(crate) fn run_evolution<R: Recursion>(r: &R, query: &DeQuery, epsilon: f64) -> Evolution {
    let mut state = r.initial(epsilon);
    let mut p_zero = vec![r.p_zero(&state)];
    let mut still = 0;
    let mut converged = false;
    loop {
        let z = *p_zero.last().unwrap();
        if z > 1.0 - query.convergence_delta {
            converged = true;
            break;
        }
        if p_zero.len() > query.max_iters || still >= query.stagnation_window {
            break;
        }
        state = r.step(&state, epsilon);
        let next = r.p_zero(&state);
        if (next - z).abs() <= query.stagnation_tolerance * (1.0 - z).abs() {
            still += 1;
        } else {
            still = 0;
        }
        p_zero.push(next);
    }
    Evolution { converged, iterations: p_zero.len() - 1, p_zero, final_p: R::masses(&state) }
}

pub(crate) fn bisect<F: Fn(f64) -> bool>(tolerance: f64, converges: F) -> f64 {
    if converges(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if converges(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The full recursion over the Grassmannian for one ensemble.
#[derive(Clone, Debug)]
pub struct DensityEvolution {
    lattice: Arc<Lattice>,
    query: DeQuery,
    /// `push[i * G + j] = Pr(h V_i = V_j)` for `h ~ f`.
    push: Vec<f64>,
}

impl DensityEvolution {
    pub fn new(query: DeQuery) -> Result<Self> {
        let lattice = Arc::new(Lattice::new(query.ensemble.field.p())?);
        Self::with_lattice(lattice, query)
    }

    /// Reuse precomputed lattice tables.
    pub fn with_lattice(lattice: Arc<Lattice>, query: DeQuery) -> Result<Self> {
        query.validate()?;
        if lattice.p() != query.ensemble.field.p() {
            return Err(Error::Invalid("lattice and ensemble use different extension degrees".into()));
        }
        let n = lattice.len();
        let mut push = vec![0.0; n * n];
        for (h, f) in query.ensemble.pdf.support() {
            let act = lattice.action(&query.ensemble.field.label_matrix(h));
            for (i, &j) in act.iter().enumerate() {
                push[i * n + j as usize] += f;
            }
        }
        Ok(DensityEvolution { lattice, query, push })
    }

    /// Same tables and settings, different label pdf.
    pub fn with_pdf(&self, pdf: LabelPdf) -> Result<Self> {
        let mut query = self.query.clone();
        query.ensemble.pdf = pdf;
        Self::with_lattice(self.lattice.clone(), query)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> Arc<Lattice> {
        self.lattice.clone()
    }

    pub fn query(&self) -> &DeQuery {
        &self.query
    }

    pub fn gamma(&self, epsilon: f64) -> SubspaceDist {
        self.lattice.gamma(epsilon)
    }

    /// Forward: `out(V) = Σ_h f(h) d(h⁻¹V)`. Inverse: `out(V) = Σ_h f(h) d(hV)`.
    pub fn scale_push(&self, d: &SubspaceDist, direction: PushDirection) -> SubspaceDist {
        let n = self.lattice.len();
        let mut out = SubspaceDist::zeros(n);
        match direction {
            PushDirection::Forward => {
                for (i, &x) in d.mass.iter().enumerate() {
                    if x != 0.0 {
                        for (o, &t) in out.mass.iter_mut().zip(&self.push[i * n..(i + 1) * n]) {
                            *o += t * x;
                        }
                    }
                }
            }
            PushDirection::Inverse => {
                for (i, o) in out.mass.iter_mut().enumerate() {
                    *o = self.push[i * n..(i + 1) * n].iter().zip(&d.mass).map(|(t, x)| t * x).sum();
                }
            }
        }
        out
    }

    /// `(Q_{ℓ+1}, P_{ℓ+1})` from `P_ℓ`.
    pub fn de_iteration(&self, p: &SubspaceDist, epsilon: f64) -> (SubspaceDist, SubspaceDist) {
        let l = &*self.lattice;
        let n = l.len();
        let degrees = &self.query.ensemble.degrees;

        let pushed = self.scale_push(p, PushDirection::Forward);
        let mut q = SubspaceDist::zeros(n);
        let mut acc = SubspaceDist::point(n, l.grassmannian().zero_index());
        for d in 1..=degrees.max_check_degree() {
            if d > 1 {
                acc = l.check_convolve(&acc, &pushed);
            }
            if let Some(&w) = degrees.rho().get(&d) {
                q.add_scaled(&acc, w);
            }
        }
        q.normalize();

        let pulled = self.scale_push(&q, PushDirection::Inverse);
        let mut next = SubspaceDist::zeros(n);
        let mut acc = self.gamma(epsilon);
        for d in 1..=degrees.max_var_degree() {
            if d > 1 {
                acc = l.variable_convolve(&acc, &pulled);
            }
            if let Some(&w) = degrees.lambda().get(&d) {
                next.add_scaled(&acc, w);
            }
        }
        next.normalize();
        (q, next)
    }

    pub fn evolve(&self, epsilon: f64) -> Evolution {
        run_evolution(self, &self.query, epsilon)
    }

    /// Largest ε (to the bisection tolerance) for which the recursion converges.
    pub fn threshold(&self) -> f64 {
        bisect(self.query.bisection_tolerance, |eps| self.evolve(eps).converged)
    }
}

impl Recursion for DensityEvolution {
    type State = SubspaceDist;

    fn initial(&self, epsilon: f64) -> SubspaceDist {
        self.gamma(epsilon)
    }

    fn step(&self, state: &SubspaceDist, epsilon: f64) -> SubspaceDist {
        self.de_iteration(state, epsilon).1
    }

    fn p_zero(&self, state: &SubspaceDist) -> f64 {
        state.get(self.lattice.grassmannian().zero_index())
    }

    fn masses(state: &SubspaceDist) -> Vec<f64> {
        state.mass.clone()
    }
}

/// Threshold of `query` with the full recursion.
pub fn threshold(query: DeQuery) -> Result<f64> {
    Ok(DensityEvolution::new(query)?.threshold())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DegreeDist;
    use crate::gf::{Field, GroupKind};

    fn gf4(lambda: usize, rho: usize, pdf: &[(u8, f64)]) -> DensityEvolution {
        let field = Field::with_degree(2).unwrap();
        let pdf = LabelPdf::from_units(&field, pdf).unwrap();
        let ens = Ensemble::new(field, DegreeDist::regular(lambda, rho).unwrap(), pdf);
        DensityEvolution::new(DeQuery::new(ens)).unwrap()
    }

    fn index(l: &Lattice, elems: &[u8]) -> usize {
        l.grassmannian().position(&Subspace::span(elems.iter().copied())).unwrap()
    }

    #[test]
    fn gamma_matches_a_priori_table() {
        let l = Lattice::new(3).unwrap();
        let eps = 0.3;
        let g = l.gamma(eps);
        assert!((g.get(l.grassmannian().full_index()) - eps.powi(3)).abs() < 1e-15);
        assert!((g.get(index(&l, &[1])) - eps * (1.0 - eps).powi(2)).abs() < 1e-15);
        assert!((g.get(index(&l, &[1, 2])) - eps.powi(2) * (1.0 - eps)).abs() < 1e-15);
        assert_eq!(g.get(index(&l, &[3])), 0.0);
        assert!((g.total() - 1.0).abs() < 1e-15);
        assert_eq!(l.gamma(0.0), SubspaceDist::point(16, 0));
    }

    #[test]
    fn push_examples() {
        let de = gf4(2, 3, &[(1, 1.0 / 3.0), (2, 1.0 / 3.0), (3, 1.0 / 3.0)]);
        let l = de.lattice();
        let line = SubspaceDist::point(5, index(l, &[1]));
        let out = de.scale_push(&line, PushDirection::Forward);
        for v in [1, 2, 3] {
            assert!((out.get(index(l, &[v])) - 1.0 / 3.0).abs() < 1e-15);
        }
        let zero = SubspaceDist::point(5, 0);
        assert_eq!(de.scale_push(&zero, PushDirection::Inverse), zero);
        let id = gf4(2, 3, &[(1, 1.0)]);
        let mixed = SubspaceDist::from_masses(vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        assert_eq!(id.scale_push(&mixed, PushDirection::Forward), mixed);
    }

    #[test]
    fn convolution_examples() {
        let l = Lattice::new(2).unwrap();
        let one = index(&l, &[1]);
        let mut half = SubspaceDist::zeros(5);
        half.mass[0] = 0.5;
        half.mass[one] = 0.5;
        let out = l.check_convolve(&half, &half);
        assert!((out.get(0) - 0.25).abs() < 1e-15 && (out.get(one) - 0.75).abs() < 1e-15);
        let full = SubspaceDist::point(5, 4);
        assert_eq!(l.check_convolve(&half, &full), full);
        assert_eq!(l.check_convolve(&half, &SubspaceDist::point(5, 0)), half);
        assert_eq!(l.variable_convolve(&half, &full), half);
        let a = SubspaceDist::point(5, one);
        let b = SubspaceDist::point(5, index(&l, &[2]));
        assert_eq!(l.variable_convolve(&a, &b), SubspaceDist::point(5, 0));
    }

    #[test]
    fn degenerate_channels() {
        let de = gf4(2, 3, &[(1, 1.0 / 3.0), (2, 1.0 / 3.0), (3, 1.0 / 3.0)]);
        let zero = SubspaceDist::point(5, 0);
        assert_eq!(de.de_iteration(&zero, 0.0).1, zero);
        let full = SubspaceDist::point(5, 4);
        assert_eq!(de.de_iteration(&full, 1.0).1, full);
        assert_eq!(de.evolve(0.0).iterations, 0);
        assert!(de.evolve(0.0).converged);
        assert!(!de.evolve(1.0).converged);
    }

    #[test]
    fn matrix_labels_accepted() {
        let field = Field::with_degree(2).unwrap();
        let pdf = LabelPdf::uniform(&field, GroupKind::Matrix).unwrap();
        let ens = Ensemble::new(field, DegreeDist::regular(2, 3).unwrap(), pdf);
        let de = DensityEvolution::new(DeQuery::new(ens)).unwrap();
        let (q, p) = de.de_iteration(&de.gamma(0.4), 0.4);
        q.validate().unwrap();
        p.validate().unwrap();
    }
}
