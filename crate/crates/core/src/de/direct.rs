//! The un-factored density evolution sums, by exhaustive enumeration of
//! label tuples and subspace tuples. Exponential in the node degrees; kept
//! as a reference for the convolution form.

use super::{DensityEvolution, SubspaceDist};
use crate::error::{Error, Result};
use crate::gf::BinMatrix;
use crate::subspace::Subspace;

/// Largest number of enumerated terms per node degree.
pub const DIRECT_BUDGET: u64 = 50_000_000;

/// Calls `visit` with every tuple in `{0..base}^len`.
fn for_each_tuple<F: FnMut(&[usize])>(base: usize, len: usize, mut visit: F) {
    let mut t = vec![0usize; len];
    loop {
        visit(&t);
        let mut k = 0;
        while k < len {
            t[k] += 1;
            if t[k] < base {
                break;
            }
            t[k] = 0;
            k += 1;
        }
        if k == len {
            return;
        }
    }
}

fn terms(labels: usize, spaces: usize, len: usize, extra: usize) -> Option<u64> {
    let per = (labels as u64).checked_mul(spaces as u64)?;
    per.checked_pow(len as u32)?.checked_mul(extra as u64)
}

/// `(Q_{ℓ+1}, P_{ℓ+1})` from `P_ℓ` by direct summation over label sequences
/// and subspace tuples, with `budget` bounding the number of terms per degree.
pub fn de_iteration_direct(
    de: &DensityEvolution,
    p: &SubspaceDist,
    epsilon: f64,
    budget: u64,
) -> Result<(SubspaceDist, SubspaceDist)> {
    let ens = &de.query().ensemble;
    let g = de.lattice().grassmannian();
    let n = g.len();
    let labels: Vec<(BinMatrix, BinMatrix, f64)> = ens
        .pdf
        .support()
        .iter()
        .map(|(h, f)| {
            let m = ens.field.label_matrix(h);
            (m, m.inverse().expect("labels are invertible"), *f)
        })
        .collect();
    let nl = labels.len();

    let mut q = SubspaceDist::zeros(n);
    for (&d, &rho) in ens.degrees.rho() {
        let len = d - 1;
        if terms(nl, n, len, 1).is_none_or(|t| t > budget) {
            return Err(Error::Budget(format!("check degree {d}: more than {budget} terms")));
        }
        for_each_tuple(nl, len, |hs| {
            let fh: f64 = hs.iter().map(|&k| labels[k].2).product();
            for_each_tuple(n, len, |vs| {
                // Π P(h_i⁻¹ V_i) over tuples with Σ V_i = V
                let mut sum = Subspace::zero();
                let mut prob = fh;
                for (&k, &v) in hs.iter().zip(vs) {
                    let space = g.get(v);
                    sum = sum.sum(space);
                    prob *= p.get(g.position(&space.transform(&labels[k].1)).unwrap());
                }
                if prob != 0.0 {
                    q.mass[g.position(&sum).unwrap()] += rho * prob;
                }
            });
        });
    }

    let gamma = de.gamma(epsilon);
    let mut next = SubspaceDist::zeros(n);
    for (&d, &lambda) in ens.degrees.lambda() {
        let len = d - 1;
        if terms(nl, n, len, n).is_none_or(|t| t > budget) {
            return Err(Error::Budget(format!("variable degree {d}: more than {budget} terms")));
        }
        for_each_tuple(nl, len, |hs| {
            let fh: f64 = hs.iter().map(|&k| labels[k].2).product();
            for_each_tuple(n, len + 1, |vs| {
                // γ(V_0) Π Q(h_i V_i) over tuples with ⋂ V_i = V
                let mut meet = *g.get(vs[0]);
                let mut prob = fh * gamma.get(vs[0]);
                for (&k, &v) in hs.iter().zip(&vs[1..]) {
                    let space = g.get(v);
                    meet = meet.intersect(space);
                    prob *= q.get(g.position(&space.transform(&labels[k].0)).unwrap());
                }
                if prob != 0.0 {
                    next.mass[g.position(&meet).unwrap()] += lambda * prob;
                }
            });
        });
    }
    Ok((q, next))
}
