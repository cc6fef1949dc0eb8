//! Ensemble parameters: edge-perspective degree distributions, the edge-label
//! pdf, and the JSON ensemble configuration.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec, GroupKind, Label};

const SUM_TOLERANCE: f64 = 1e-9;

fn parse_terms(text: &str, what: &str) -> Result<BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    for term in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        // optional `exponent:` prefix, e.g. "1:1.0@2" for X^1 at degree 2
        let (exponent, rest) = match term.split_once(':') {
            Some((e, r)) => {
                let e: usize =
                    e.trim().parse().map_err(|_| Error::Distribution(format!("{what}: bad exponent in `{term}`")))?;
                (Some(e), r)
            }
            None => (None, term),
        };
        let (coeff, degree) = rest
            .split_once('@')
            .ok_or_else(|| Error::Distribution(format!("{what}: expected `coeff@degree`, got `{term}`")))?;
        let coeff: f64 =
            coeff.trim().parse().map_err(|_| Error::Distribution(format!("{what}: bad coefficient in `{term}`")))?;
        let degree: usize =
            degree.trim().parse().map_err(|_| Error::Distribution(format!("{what}: bad degree in `{term}`")))?;
        if let Some(e) = exponent {
            if e + 1 != degree {
                return Err(Error::Distribution(format!(
                    "{what}: exponent {e} does not match degree {degree} in `{term}`"
                )));
            }
        }
        *out.entry(degree).or_insert(0.0) += coeff;
    }
    Ok(out)
}

fn validate_coeffs(coeffs: &BTreeMap<usize, f64>, what: &str) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::Distribution(format!("{what} has no terms")));
    }
    let mut total = 0.0;
    for (&d, &c) in coeffs {
        if d == 0 {
            return Err(Error::Distribution(format!("{what}: degree must be at least 1")));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Distribution(format!("{what}: coefficient of degree {d} must be nonnegative")));
        }
        total += c;
    }
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Distribution(format!("{what} coefficients sum to {total}, not 1")));
    }
    Ok(())
}

fn format_terms(coeffs: &BTreeMap<usize, f64>) -> String {
    coeffs.iter().map(|(d, c)| format!("{c}@{d}")).collect::<Vec<_>>().join(",")
}

/// Edge-perspective degree distributions `λ(X) = Σ λ_d X^{d-1}` and
/// `ρ(X) = Σ ρ_d X^{d-1}`, keyed by node degree `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDist {
    lambda: BTreeMap<usize, f64>,
    rho: BTreeMap<usize, f64>,
}

impl DegreeDist {
    pub fn new<L, R>(lambda: L, rho: R) -> Result<Self>
    where
        L: IntoIterator<Item = (usize, f64)>,
        R: IntoIterator<Item = (usize, f64)>,
    {
        let mut l = BTreeMap::new();
        for (d, c) in lambda {
            *l.entry(d).or_insert(0.0) += c;
        }
        let mut r = BTreeMap::new();
        for (d, c) in rho {
            *r.entry(d).or_insert(0.0) += c;
        }
        Self::from_maps(l, r)
    }

    fn from_maps(mut lambda: BTreeMap<usize, f64>, mut rho: BTreeMap<usize, f64>) -> Result<Self> {
        validate_coeffs(&lambda, "lambda")?;
        validate_coeffs(&rho, "rho")?;
        lambda.retain(|_, c| *c > 0.0);
        rho.retain(|_, c| *c > 0.0);
        Ok(DegreeDist { lambda, rho })
    }

    /// Regular ensemble with variable degree `dv` and check degree `dc`.
    pub fn regular(dv: usize, dc: usize) -> Result<Self> {
        Self::new([(dv, 1.0)], [(dc, 1.0)])
    }

    /// Parse the flag syntax: comma-separated `coeff@degree` terms, with an
    /// optional `exponent:` prefix (`exponent` must equal `degree - 1`).
    pub fn parse(lambda: &str, rho: &str) -> Result<Self> {
        Self::from_maps(parse_terms(lambda, "lambda")?, parse_terms(rho, "rho")?)
    }

    pub fn lambda(&self) -> &BTreeMap<usize, f64> {
        &self.lambda
    }

    pub fn rho(&self) -> &BTreeMap<usize, f64> {
        &self.rho
    }

    pub fn max_var_degree(&self) -> usize {
        self.lambda.keys().copied().max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        self.rho.keys().copied().max().unwrap_or(0)
    }

    /// `∫λ = Σ λ_d / d`, the number of variable nodes per edge.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda.iter().map(|(&d, &c)| c / d as f64).sum()
    }

    pub fn rho_integral(&self) -> f64 {
        self.rho.iter().map(|(&d, &c)| c / d as f64).sum()
    }

    /// `1 - ∫ρ / ∫λ`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.rho_integral() / self.lambda_integral()
    }

    pub fn mean_var_degree(&self) -> f64 {
        1.0 / self.lambda_integral()
    }

    pub fn lambda_string(&self) -> String {
        format_terms(&self.lambda)
    }

    pub fn rho_string(&self) -> String {
        format_terms(&self.rho)
    }
}

impl fmt::Display for DegreeDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda={} rho={}", self.lambda_string(), self.rho_string())
    }
}

/// Probability distribution of edge labels, as an explicit support list.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelPdf {
    kind: GroupKind,
    support: Vec<(Label, f64)>,
}

impl LabelPdf {
    /// Validates labels (distinct, invertible, right kind) and probabilities
    /// (nonnegative, summing to 1). Zero-probability entries are dropped.
    pub fn new(field: &Field, kind: GroupKind, support: Vec<(Label, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (i, (h, pr)) in support.iter().enumerate() {
            if h.kind() != kind {
                return Err(Error::Distribution(format!("label {i} is not a {kind} label")));
            }
            field.validate_label(h)?;
            if !pr.is_finite() || *pr < 0.0 {
                return Err(Error::Distribution(format!("probability of label {} is negative", field.format_label(h))));
            }
            if support[..i].iter().any(|(g, _)| g == h) {
                return Err(Error::Distribution(format!("label {} listed twice", field.format_label(h))));
            }
            total += pr;
        }
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Distribution(format!("label probabilities sum to {total}, not 1")));
        }
        let support = support.into_iter().filter(|(_, pr)| *pr > 0.0).collect();
        Ok(LabelPdf { kind, support })
    }

    pub fn uniform(field: &Field, kind: GroupKind) -> Result<Self> {
        let labels = field.enumerate_labels(kind)?;
        let w = 1.0 / labels.len() as f64;
        Ok(LabelPdf { kind, support: labels.into_iter().map(|h| (h, w)).collect() })
    }

    /// All mass on one label.
    pub fn point(field: &Field, h: Label) -> Result<Self> {
        Self::new(field, h.kind(), vec![(h, 1.0)])
    }

    /// Field-unit pdf from `(element, probability)` pairs.
    pub fn from_units(field: &Field, entries: &[(u8, f64)]) -> Result<Self> {
        let support = entries.iter().map(|&(v, pr)| (Label::Unit(crate::gf::Symbol(v)), pr)).collect();
        Self::new(field, GroupKind::Field, support)
    }

    /// Parse `uniform` or comma-separated `label:prob` pairs; labels are
    /// integers for field units and row-major bit patterns for matrices.
    pub fn parse(field: &Field, kind: GroupKind, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "uniform" {
            return Self::uniform(field, kind);
        }
        let mut support = Vec::new();
        for term in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (label, pr) = term
                .split_once(':')
                .ok_or_else(|| Error::Distribution(format!("expected `label:prob`, got `{term}`")))?;
            let h = field.parse_label(kind, label.trim())?;
            let pr: f64 = pr.trim().parse().map_err(|_| Error::Distribution(format!("bad probability in `{term}`")))?;
            support.push((h, pr));
        }
        Self::new(field, kind, support)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn support(&self) -> &[(Label, f64)] {
        &self.support
    }

    /// `f(h)`, zero off the support.
    pub fn prob(&self, h: &Label) -> f64 {
        self.support.iter().find(|(g, _)| g == h).map_or(0.0, |(_, p)| *p)
    }

    /// Whether this is the uniform distribution over the whole group.
    pub fn is_uniform_over_group(&self, field: &Field) -> bool {
        let Ok(labels) = field.enumerate_labels(self.kind) else {
            return false;
        };
        let w = 1.0 / labels.len() as f64;
        labels.len() == self.support.len() && labels.iter().all(|h| (self.prob(h) - w).abs() <= 1e-12)
    }

    pub fn format(&self, field: &Field) -> String {
        self.support.iter().map(|(h, p)| format!("{}:{}", field.format_label(h), p)).collect::<Vec<_>>().join(",")
    }
}

/// A code family `(q, group, λ, ρ, f)`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub field: Field,
    pub kind: GroupKind,
    pub degrees: DegreeDist,
    pub pdf: LabelPdf,
}

impl Ensemble {
    pub fn new(field: Field, degrees: DegreeDist, pdf: LabelPdf) -> Self {
        let kind = pdf.kind();
        Ensemble { field, kind, degrees, pdf }
    }
}

/// A degree distribution in a JSON config: either the flag string or a map
/// from degree to coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeSpec {
    Text(String),
    Map(BTreeMap<String, f64>),
}

impl DegreeSpec {
    /// The equivalent `coeff@degree` flag string.
    pub fn to_flag(&self) -> Result<String> {
        match self {
            DegreeSpec::Text(s) => Ok(s.clone()),
            DegreeSpec::Map(m) => {
                let mut terms = Vec::new();
                for (d, c) in m {
                    let d: usize = d
                        .trim()
                        .parse()
                        .map_err(|_| Error::Distribution(format!("degree key `{d}` is not an integer")))?;
                    terms.push(format!("{c}@{d}"));
                }
                Ok(terms.join(","))
            }
        }
    }
}

/// JSON ensemble configuration with fields `p`, `group`, `lambda`, `rho`,
/// `f`, `seed`. Every field is optional so flags can fill the gaps.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<DegreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<DegreeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl EnsembleConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    /// Resolve into an ensemble. `p`, `lambda` and `rho` are required; the
    /// group defaults to field units and `f` to uniform.
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let p = self.p.ok_or_else(|| Error::Invalid("ensemble config is missing `p`".into()))?;
        let field = Field::new(FieldSpec::new(p)?);
        let kind = self.group.unwrap_or(GroupKind::Field);
        let lambda = self
            .lambda
            .as_ref()
            .ok_or_else(|| Error::Invalid("ensemble config is missing `lambda`".into()))?
            .to_flag()?;
        let rho =
            self.rho.as_ref().ok_or_else(|| Error::Invalid("ensemble config is missing `rho`".into()))?.to_flag()?;
        let degrees = DegreeDist::parse(&lambda, &rho)?;
        let pdf = LabelPdf::parse(&field, kind, self.f.as_deref().unwrap_or("uniform"))?;
        Ok(Ensemble::new(field, degrees, pdf))
    }
}
