//! Labeled Tanner graphs, ensemble sampling and the code file format.
//!
//! Code files are line oriented:
//!
//! ```text
//! N M q group-kind [polynomial]
//! d v:h v:h ...        (one line per check, M lines)
//! ```
//!
//! `d` is the check degree, `v` a 0-based variable index and `h` the edge
//! label: a decimal field element for `field` codes, a row-major `0`/`1`
//! pattern of length `p*p` for `matrix` codes. The optional polynomial (hex,
//! e.g. `0xd`) is written only when it differs from the default for `p`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{DegreeDist, Ensemble, LabelPdf};
use crate::error::{Error, Result};
use crate::gf::{BinMatrix, Field, FieldSpec, GroupKind, Label, Symbol};

/// Limits applied when reading code files.
pub const MAX_FILE_NODES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub check: usize,
    pub var: usize,
    pub label: Label,
}

/// A parity-check matrix over a label group, viewed as a Tanner graph.
#[derive(Clone, Debug)]
pub struct LdpcCode {
    field: Field,
    kind: GroupKind,
    n: usize,
    m: usize,
    edges: Vec<Edge>,
    check_edges: Vec<Vec<usize>>,
    var_edges: Vec<Vec<usize>>,
    maps: Vec<BinMatrix>,
    inv_maps: Vec<BinMatrix>,
}

impl PartialEq for LdpcCode {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.kind == other.kind
            && self.n == other.n
            && self.m == other.m
            && self.edges == other.edges
    }
}

impl LdpcCode {
    /// Build a code from its edge list. Edges are stored sorted by
    /// `(check, var)`; parallel edges and invalid labels are rejected.
    pub fn new(field: Field, kind: GroupKind, n: usize, m: usize, mut edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            if e.check >= m || e.var >= n {
                return Err(Error::Invalid(format!("edge ({}, {}) out of range for a {m}x{n} matrix", e.check, e.var)));
            }
            if e.label.kind() != kind {
                return Err(Error::Label(format!("edge ({}, {}) has a label of the wrong group", e.check, e.var)));
            }
            field.validate_label(&e.label)?;
        }
        edges.sort_by_key(|e| (e.check, e.var));
        if let Some(w) = edges.windows(2).find(|w| w[0].check == w[1].check && w[0].var == w[1].var) {
            return Err(Error::Invalid(format!(
                "parallel edges between check {} and variable {}",
                w[0].check, w[0].var
            )));
        }
        let mut check_edges = vec![Vec::new(); m];
        let mut var_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            check_edges[e.check].push(i);
            var_edges[e.var].push(i);
        }
        let maps: Vec<BinMatrix> = edges.iter().map(|e| field.label_matrix(&e.label)).collect();
        let inv_maps = maps.iter().map(|h| h.inverse().expect("labels are invertible")).collect();
        Ok(LdpcCode { field, kind, n, m, edges, check_edges, var_edges, maps, inv_maps })
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.field.p()
    }

    #[inline]
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Number of variable nodes.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of check nodes.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge indices at check `m`, ordered by variable.
    #[inline]
    pub fn check_edges(&self, m: usize) -> &[usize] {
        &self.check_edges[m]
    }

    /// Edge indices at variable `n`, ordered by check.
    #[inline]
    pub fn var_edges(&self, n: usize) -> &[usize] {
        &self.var_edges[n]
    }

    /// Binary matrix of `s -> h_e s`.
    #[inline]
    pub fn edge_map(&self, e: usize) -> &BinMatrix {
        &self.maps[e]
    }

    /// Binary matrix of `s -> h_e^{-1} s`.
    #[inline]
    pub fn edge_inv_map(&self, e: usize) -> &BinMatrix {
        &self.inv_maps[e]
    }

    pub fn var_degree(&self, n: usize) -> usize {
        self.var_edges[n].len()
    }

    pub fn check_degree(&self, m: usize) -> usize {
        self.check_edges[m].len()
    }

    /// Whether every check equation `Σ h_{m,n} s_n = 0` holds.
    pub fn verify_codeword(&self, word: &[Symbol]) -> bool {
        if word.len() != self.n {
            return false;
        }
        (0..self.m).all(|m| {
            self.check_edges[m].iter().fold(0u8, |acc, &e| acc ^ self.maps[e].apply(word[self.edges[e].var].0)) == 0
        })
    }

    /// Histogram `degree -> number of variable nodes`.
    pub fn var_degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for n in 0..self.n {
            *h.entry(self.var_degree(n)).or_insert(0) += 1;
        }
        h
    }

    pub fn check_degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for m in 0..self.m {
            *h.entry(self.check_degree(m)).or_insert(0) += 1;
        }
        h
    }

    /// Serialize in the labeled-alist format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let spec = self.field.spec();
        write!(out, "{} {} {} {}", self.n, self.m, spec.q(), self.kind).unwrap();
        if !spec.is_default_polynomial() {
            write!(out, " {:#x}", spec.polynomial()).unwrap();
        }
        out.push('\n');
        for m in 0..self.m {
            write!(out, "{}", self.check_edges[m].len()).unwrap();
            for &e in &self.check_edges[m] {
                let edge = &self.edges[e];
                write!(out, " {}:{}", edge.var, self.field.format_label(&edge.label)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parse the labeled-alist format. Lines starting with `#` are comments.
    /// Rejects malformed input with the offending line number.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines =
            text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens.len() != 4 && tokens.len() != 5 {
            return Err(Error::parse(1, "header must be `N M q group-kind [polynomial]`"));
        }
        let n: usize = tokens[0].parse().map_err(|_| Error::parse(1, "N is not an integer"))?;
        let m: usize = tokens[1].parse().map_err(|_| Error::parse(1, "M is not an integer"))?;
        let q: usize = tokens[2].parse().map_err(|_| Error::parse(1, "q is not an integer"))?;
        let kind: GroupKind = tokens[3].parse().map_err(|e: Error| Error::parse(1, e.to_string()))?;
        if n > MAX_FILE_NODES || m > MAX_FILE_NODES {
            return Err(Error::parse(1, format!("code dimensions exceed {MAX_FILE_NODES}")));
        }
        let mut spec = FieldSpec::from_order(q).map_err(|e| Error::parse(1, e.to_string()))?;
        if let Some(poly) = tokens.get(4) {
            let digits = poly.strip_prefix("0x").ok_or_else(|| Error::parse(1, "polynomial must be hex, e.g. 0xb"))?;
            let poly = u16::from_str_radix(digits, 16).map_err(|_| Error::parse(1, "bad polynomial"))?;
            spec = FieldSpec::with_polynomial(spec.p(), poly).map_err(|e| Error::parse(1, e.to_string()))?;
        }
        let field = Field::new(spec);
        let mut edges = Vec::new();
        for check in 0..m {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(check + 2, format!("expected {m} check lines, found {check}")))?;
            let mut toks = line.split_whitespace();
            let degree: usize = toks
                .next()
                .ok_or_else(|| Error::parse(ln, "missing check degree"))?
                .parse()
                .map_err(|_| Error::parse(ln, "check degree is not an integer"))?;
            let mut count = 0;
            for tok in toks {
                let (v, h) =
                    tok.split_once(':').ok_or_else(|| Error::parse(ln, format!("expected `v:h`, got `{tok}`")))?;
                let var: usize = v.parse().map_err(|_| Error::parse(ln, format!("bad variable index `{v}`")))?;
                if var >= n {
                    return Err(Error::parse(ln, format!("variable index {var} out of range")));
                }
                let label = field.parse_label(kind, h).map_err(|e| Error::parse(ln, e.to_string()))?;
                edges.push(Edge { check, var, label });
                count += 1;
            }
            if count != degree {
                return Err(Error::parse(ln, format!("check declares degree {degree} but lists {count} edges")));
            }
        }
        if let Some((ln, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(ln, format!("unexpected trailing content `{line}`")));
        }
        LdpcCode::new(field, kind, n, m, edges).map_err(|e| Error::parse(0, e.to_string()))
    }
}

/// How node counts are derived when `N` does not give integer counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DegreeRounding {
    /// Every node count must come out integral; otherwise the ensemble is
    /// rejected as infeasible.
    #[default]
    Exact,
    /// Round node counts to the nearest integers (largest remainder) and
    /// adjust a few check degrees by one so the socket counts agree.
    Nearest,
}

const INTEGRALITY_TOLERANCE: f64 = 1e-6;

fn near_integer(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= INTEGRALITY_TOLERANCE * x.abs().max(1.0)).then_some(r as usize)
}

/// Largest-remainder apportionment of `total` over `weights` (summing to 1).
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Variable and check degree sequences for `n` variable nodes.
pub fn degree_sequences(n: usize, dist: &DegreeDist, rounding: DegreeRounding) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::Infeasible("code length must be positive".into()));
    }
    let lint = dist.lambda_integral();
    let var_degrees: Vec<usize> = dist.lambda().keys().copied().collect();
    let var_weights: Vec<f64> = dist.lambda().iter().map(|(&d, &c)| c / d as f64 / lint).collect();
    let check_degrees: Vec<usize> = dist.rho().keys().copied().collect();
    let rint = dist.rho_integral();

    let var_counts: Vec<usize> = match rounding {
        DegreeRounding::Exact => var_weights
            .iter()
            .zip(&var_degrees)
            .map(|(w, d)| {
                near_integer(w * n as f64).ok_or_else(|| {
                    Error::Infeasible(format!("N = {n} gives {} variable nodes of degree {d}", w * n as f64))
                })
            })
            .collect::<Result<_>>()?,
        DegreeRounding::Nearest => apportion(n, &var_weights),
    };
    let edges: usize = var_counts.iter().zip(&var_degrees).map(|(c, d)| c * d).sum();

    let mut check_seq: Vec<usize> = match rounding {
        DegreeRounding::Exact => {
            let mut seq = Vec::new();
            for (&d, &c) in dist.rho() {
                let count = near_integer(edges as f64 * c / d as f64).ok_or_else(|| {
                    Error::Infeasible(format!(
                        "{edges} edges give {} check nodes of degree {d}",
                        edges as f64 * c / d as f64
                    ))
                })?;
                seq.extend(std::iter::repeat_n(d, count));
            }
            seq
        }
        DegreeRounding::Nearest => {
            let m = ((edges as f64 * rint).round() as usize).max(1);
            let weights: Vec<f64> = dist.rho().iter().map(|(&d, &c)| c / d as f64 / rint).collect();
            let counts = apportion(m, &weights);
            let mut seq: Vec<usize> =
                counts.iter().zip(&check_degrees).flat_map(|(&c, &d)| std::iter::repeat_n(d, c)).collect();
            let mut sockets: usize = seq.iter().sum();
            // walk from the high-degree end when removing, the low end when adding
            let mut i = 0;
            while sockets > edges {
                let k = seq.len() - 1 - (i % seq.len());
                if seq[k] > 1 {
                    seq[k] -= 1;
                    sockets -= 1;
                }
                i += 1;
            }
            let mut i = 0;
            while sockets < edges {
                let k = i % seq.len();
                seq[k] += 1;
                sockets += 1;
                i += 1;
            }
            seq
        }
    };
    check_seq.sort_unstable();

    let var_seq: Vec<usize> =
        var_counts.iter().zip(&var_degrees).flat_map(|(&c, &d)| std::iter::repeat_n(d, c)).collect();
    let check_sockets: usize = check_seq.iter().sum();
    if check_sockets != edges || check_seq.is_empty() {
        return Err(Error::Infeasible(format!("{edges} variable sockets but {check_sockets} check sockets")));
    }
    Ok((var_seq, check_seq))
}

const SWAP_RETRIES: usize = 200;
const MAX_RESTARTS: usize = 100;

/// Pair sockets at random, then break up parallel edges by swapping with
/// random other sockets. `None` when the retry budget runs out.
fn configuration_model(var_seq: &[usize], check_seq: &[usize], rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let var_of: Vec<usize> = var_seq.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d)).collect();
    let mut start = Vec::with_capacity(var_seq.len() + 1);
    start.push(0);
    for &d in var_seq {
        start.push(start.last().unwrap() + d);
    }
    let mut check_of: Vec<usize> = check_seq.iter().enumerate().flat_map(|(c, &d)| std::iter::repeat_n(c, d)).collect();
    check_of.shuffle(rng);
    let total = check_of.len();

    let has_check = |check_of: &[usize], v: usize, c: usize, skip: usize| {
        (start[v]..start[v + 1]).any(|s| s != skip && check_of[s] == c)
    };

    for v in 0..var_seq.len() {
        for s in start[v]..start[v + 1] {
            if !has_check(&check_of, v, check_of[s], s) {
                continue;
            }
            let mut fixed = false;
            for _ in 0..SWAP_RETRIES {
                let t = rng.gen_range(0..total);
                let w = var_of[t];
                if w == v {
                    continue;
                }
                let (c, d) = (check_of[s], check_of[t]);
                if !has_check(&check_of, v, d, s) && !has_check(&check_of, w, c, t) {
                    check_of.swap(s, t);
                    fixed = true;
                    break;
                }
            }
            if !fixed {
                return None;
            }
        }
    }
    Some(var_of.into_iter().zip(check_of).map(|(v, c)| (c, v)).collect())
}

/// Draw a code from the ensemble `E(λ, ρ, f)` with `n` variable nodes: a
/// configuration-model bipartite graph with the prescribed degree profile and
/// independent edge labels drawn from `f`.
pub fn sample_code(n: usize, ensemble: &Ensemble, seed: u64, rounding: DegreeRounding) -> Result<LdpcCode> {
    let (var_seq, check_seq) = degree_sequences(n, &ensemble.degrees, rounding)?;
    let m = check_seq.len();
    if check_seq.iter().any(|&d| d > n) {
        return Err(Error::Infeasible(format!(
            "a check of degree {} needs more than N = {n} variables",
            check_seq[m - 1]
        )));
    }
    let pdf: &LabelPdf = &ensemble.pdf;
    if pdf.support().is_empty() {
        return Err(Error::Distribution("label pdf has empty support".into()));
    }
    let weights =
        WeightedIndex::new(pdf.support().iter().map(|(_, p)| *p)).map_err(|e| Error::Distribution(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESTARTS {
        if let Some(mut pairs) = configuration_model(&var_seq, &check_seq, &mut rng) {
            pairs.sort_unstable();
            let edges = pairs
                .into_iter()
                .map(|(check, var)| Edge { check, var, label: pdf.support()[weights.sample(&mut rng)].0 })
                .collect();
            return LdpcCode::new(ensemble.field.clone(), ensemble.kind, n, m, edges);
        }
    }
    Err(Error::Infeasible(format!("no simple graph found after {MAX_RESTARTS} restarts")))
}
