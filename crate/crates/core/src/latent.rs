//! Multi-view latent observations and the weighted cosine similarity every
//! reward term is built from.
//!
//! An observation is one fixed-length vector per named view. Two observations
//! are compared view by view with plain cosine similarity and the per-view
//! scores are combined as a weighted average, normalized by the weight sum.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norms below this are treated as degenerate; their cosine is 0.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Default view labels, in declared order.
pub const DEFAULT_VIEWS: [&str; 3] = ["left", "top", "close"];

/// Default per-view dimension.
pub const DEFAULT_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ViewId(String);

impl ViewId {
    pub fn new(label: impl Into<String>) -> Self {
        ViewId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ViewId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The ordered, duplicate-free set of views used by a run.
///
/// Cloning is cheap; all latents of a run share one allocation.
#[derive(Clone, Debug)]
pub struct ViewSet(Arc<[ViewId]>);

impl ViewSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let views: Vec<ViewId> = labels.into_iter().map(|s| ViewId::new(s)).collect();
        if views.is_empty() {
            return Err(Error::usage("a view set needs at least one view"));
        }
        for (i, v) in views.iter().enumerate() {
            if v.as_str().is_empty() {
                return Err(Error::usage("view labels must be non-empty"));
            }
            if views[..i].contains(v) {
                return Err(Error::usage(format!("duplicate view label {v:?}")));
            }
        }
        Ok(ViewSet(views.into()))
    }

    /// `left`, `top`, `close`.
    pub fn standard() -> Self {
        ViewSet::new(DEFAULT_VIEWS).expect("default labels are valid")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ViewId> {
        self.0.iter()
    }

    pub fn labels(&self) -> &[ViewId] {
        &self.0
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|v| v.as_str() == label)
    }
}

impl PartialEq for ViewSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for ViewSet {}

/// A single view's feature vector. Entries are always finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatentVector(Vec<f64>);

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::usage("latent vectors must be non-empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::usage(format!(
                "latent entry {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(LatentVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        LatentVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Multiplies every entry by `c`. Panics if the result is not finite.
    pub fn scaled(&self, c: f64) -> Self {
        LatentVector::new(self.0.iter().map(|v| v * c).collect()).expect("finite scale")
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl TryFrom<Vec<f64>> for LatentVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        LatentVector::new(values)
    }
}

impl From<LatentVector> for Vec<f64> {
    fn from(v: LatentVector) -> Self {
        v.0
    }
}

/// One timestep's observation: a vector per view, in the view set's order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiViewLatent {
    views: ViewSet,
    vectors: Vec<LatentVector>,
}

impl MultiViewLatent {
    pub fn new(views: ViewSet, vectors: Vec<LatentVector>) -> Result<Self> {
        if vectors.len() != views.len() {
            return Err(Error::usage(format!(
                "{} vectors for {} views",
                vectors.len(),
                views.len()
            )));
        }
        Ok(MultiViewLatent { views, vectors })
    }

    pub fn views(&self) -> &ViewSet {
        &self.views
    }

    pub fn vectors(&self) -> &[LatentVector] {
        &self.vectors
    }

    pub fn view(&self, label: &str) -> Option<&LatentVector> {
        self.views.index_of(label).map(|i| &self.vectors[i])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.vectors.iter().map(LatentVector::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.vectors.iter().map(LatentVector::dim).sum()
    }

    /// Concatenation of all views in declared order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_dim());
        for v in &self.vectors {
            out.extend_from_slice(v.as_slice());
        }
        out
    }

    /// Same shape, every view multiplied by its own factor.
    pub fn scaled_per_view(&self, factors: &[f64]) -> Self {
        assert_eq!(factors.len(), self.vectors.len());
        MultiViewLatent {
            views: self.views.clone(),
            vectors: self
                .vectors
                .iter()
                .zip(factors)
                .map(|(v, &c)| v.scaled(c))
                .collect(),
        }
    }

    pub(crate) fn vectors_mut(&mut self) -> &mut [LatentVector] {
        &mut self.vectors
    }

    /// True when both latents have the same views and per-view dimensions.
    pub fn same_shape(&self, other: &MultiViewLatent) -> bool {
        self.views == other.views
            && self
                .vectors
                .iter()
                .zip(&other.vectors)
                .all(|(a, b)| a.dim() == b.dim())
    }
}

/// Nonnegative per-view weights with at least one strictly positive entry.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewWeights {
    views: ViewSet,
    weights: Vec<f64>,
    total: f64,
}

impl ViewWeights {
    pub fn new(views: ViewSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != views.len() {
            return Err(Error::usage(format!(
                "{} weights for {} views",
                weights.len(),
                views.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::usage("view weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::usage("at least one view weight must be positive"));
        }
        Ok(ViewWeights {
            views,
            weights,
            total,
        })
    }

    /// Equal weight on every view.
    pub fn uniform(views: ViewSet) -> Self {
        let n = views.len();
        ViewWeights::new(views, vec![1.0; n]).expect("uniform weights are valid")
    }

    /// Builds weights from `(label, weight)` pairs covering exactly `views`.
    pub fn from_pairs<'a, I>(views: ViewSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut weights = vec![None; views.len()];
        for (label, w) in pairs {
            let i = views
                .index_of(label)
                .ok_or_else(|| Error::usage(format!("weight for unknown view {label:?}")))?;
            if weights[i].replace(w).is_some() {
                return Err(Error::usage(format!("view {label:?} weighted twice")));
            }
        }
        let weights = weights
            .into_iter()
            .zip(views.iter())
            .map(|(w, v)| w.ok_or_else(|| Error::usage(format!("no weight for view {v}"))))
            .collect::<Result<Vec<_>>>()?;
        ViewWeights::new(views, weights)
    }

    pub fn views(&self) -> &ViewSet {
        &self.views
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.views.index_of(label).map(|i| self.weights[i])
    }

    /// Copy with one view's weight set to zero.
    pub fn without_view(&self, label: &str) -> Result<Self> {
        let i = self
            .views
            .index_of(label)
            .ok_or_else(|| Error::usage(format!("no view named {label:?}")))?;
        let mut weights = self.weights.clone();
        weights[i] = 0.0;
        ViewWeights::new(self.views.clone(), weights)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        ViewWeights::new(
            self.views.clone(),
            self.weights.iter().map(|w| w * c).collect(),
        )
    }
}

/// Cosine similarity of two equal-length vectors, clamped to `[-1, 1]`.
///
/// Returns 0 when either vector has norm below [`DEGENERATE_NORM`].
pub fn cosine(a: &LatentVector, b: &LatentVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::usage(format!(
            "cosine of vectors with dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(cosine_unchecked(a.as_slice(), b.as_slice()))
}

pub(crate) fn cosine_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (na, nb) = (na.sqrt(), nb.sqrt());
    if na < DEGENERATE_NORM || nb < DEGENERATE_NORM {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Weighted average of per-view cosines: `Σ wᵢ cos(aᵢ, bᵢ) / Σ wᵢ`.
pub fn multi_view_similarity(
    a: &MultiViewLatent,
    b: &MultiViewLatent,
    weights: &ViewWeights,
) -> Result<f64> {
    if a.views != b.views || a.views != weights.views {
        return Err(Error::usage("view sets of latents and weights differ"));
    }
    let mut acc = 0.0;
    for ((va, vb), &w) in a.vectors.iter().zip(&b.vectors).zip(&weights.weights) {
        if w == 0.0 {
            if va.dim() != vb.dim() {
                return Err(Error::usage("per-view dimensions differ"));
            }
            continue;
        }
        acc += w * cosine(va, vb)?;
    }
    Ok((acc / weights.total).clamp(-1.0, 1.0))
}
