//! Thresholds as a function of the label distribution.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DeQuery, DensityEvolution};
use crate::ensemble::LabelPdf;
use crate::error::{Error, Result};
use crate::gf::Label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    /// Probability of each label, in group enumeration order.
    pub f: Vec<f64>,
    pub threshold: f64,
}

/// Triangular grid on the 2-simplex with `resolution` points per axis and
/// step `1 / (resolution - 1)`: `resolution (resolution + 1) / 2` points,
/// ordered by `f1` then `f2`.
pub fn simplex_grid(resolution: usize) -> Result<Vec<[f64; 3]>> {
    if resolution < 2 {
        return Err(Error::Invalid(format!("grid resolution must be at least 2, got {resolution}")));
    }
    let steps = resolution - 1;
    let mut out = Vec::with_capacity(resolution * (resolution + 1) / 2);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let f1 = i as f64 / steps as f64;
            let f2 = j as f64 / steps as f64;
            let f3 = (steps - i - j) as f64 / steps as f64;
            out.push([f1, f2, f3]);
        }
    }
    Ok(out)
}

/// Threshold at each probability vector over `labels`, computed in parallel.
/// Output order follows `points`.
pub fn threshold_points(base: &DeQuery, labels: &[Label], points: &[Vec<f64>]) -> Result<Vec<SurfacePoint>> {
    let engine = DensityEvolution::new(base.clone())?;
    let field = &base.ensemble.field;
    let kind = base.ensemble.kind;
    let pdfs: Vec<LabelPdf> = points
        .iter()
        .map(|f| {
            if f.len() != labels.len() {
                return Err(Error::Distribution(format!("{} probabilities for {} labels", f.len(), labels.len())));
            }
            LabelPdf::new(field, kind, labels.iter().copied().zip(f.iter().copied()).collect())
        })
        .collect::<Result<_>>()?;
    pdfs.into_par_iter()
        .zip(points.par_iter())
        .map(|(pdf, f)| {
            let de = engine.with_pdf(pdf)?;
            Ok(SurfacePoint { f: f.clone(), threshold: de.threshold() })
        })
        .collect()
}

/// Sweep the simplex of label distributions for a group with three labels.
pub fn threshold_surface(base: &DeQuery, resolution: usize) -> Result<Vec<SurfacePoint>> {
    let labels = base.ensemble.field.enumerate_labels(base.ensemble.kind)?;
    if labels.len() != 3 {
        return Err(Error::Invalid(format!(
            "surface sweeps need exactly 3 labels, the group has {}; pass explicit points instead",
            labels.len()
        )));
    }
    let points: Vec<Vec<f64>> = simplex_grid(resolution)?.into_iter().map(|f| f.to_vec()).collect();
    threshold_points(base, &labels, &points)
}

/// CSV with header `f1,f2,f3,threshold` and six decimals.
pub fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut out = String::from("f1,f2,f3,threshold\n");
    for pt in points {
        for x in &pt.f {
            write!(out, "{x:.6},").unwrap();
        }
        writeln!(out, "{:.6}", pt.threshold).unwrap();
    }
    out
}
