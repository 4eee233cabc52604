//! Result types shared by the constructions, the oracles and the CLI.

use serde::{Deserialize, Serialize};

use crate::circle_diameter::{self, AllocationTriple};
use crate::error::{invalid, Result};
use crate::exact::{self, Rational};
use crate::measures::{Codebook, MixedMeasure, Point};
use crate::segments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    CircleDiameter,
    Disconnected,
    Connected,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::CircleDiameter, Model::Disconnected, Model::Connected];

    pub fn measure(&self) -> MixedMeasure {
        match self {
            Model::CircleDiameter => MixedMeasure::circle_diameter(),
            Model::Disconnected => MixedMeasure::disconnected(),
            Model::Connected => MixedMeasure::connected(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::CircleDiameter => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::CircleDiameter => "circle-diameter",
            Model::Disconnected => "disconnected",
            Model::Connected => "connected",
        }
    }

    /// Closed-form optimal set of n-means.
    pub fn optimal_set(&self, n: usize) -> Result<QuantizationResult> {
        match self {
            Model::CircleDiameter => circle_diameter::optimal_set(n),
            Model::Disconnected => segments::optimal_set_disconnected(n),
            Model::Connected => segments::optimal_set_connected(n),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Lloyd,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocation {
    Circle(AllocationTriple),
    /// Number of points in the left interval `[0, ½]`.
    Split { k: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationResult {
    pub codebook: Codebook,
    pub error: f64,
    pub error_exact: Option<Rational>,
    pub allocation: Option<Allocation>,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationRecord {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n2: Option<usize>,
}

impl From<Allocation> for AllocationRecord {
    fn from(a: Allocation) -> Self {
        match a {
            Allocation::Circle(t) => Self {
                k: t.k,
                n1: Some(t.n1),
                n2: Some(t.n2),
            },
            Allocation::Split { k } => Self { k, n1: None, n2: None },
        }
    }
}

/// Planar points serialise as `[x, y]`, points on the line as plain numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRecord {
    Line(f64),
    Plane([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub model: Model,
    pub n: usize,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub allocation: Option<AllocationRecord>,
    pub points: Vec<PointRecord>,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_exact: Option<String>,
}

impl OutputRecord {
    pub fn new(model: Model, result: &QuantizationResult) -> Self {
        let points = result
            .codebook
            .points()
            .iter()
            .map(|p| {
                if result.codebook.dim() == 1 {
                    PointRecord::Line(p.x)
                } else {
                    PointRecord::Plane([p.x, p.y])
                }
            })
            .collect();
        Self {
            model,
            n: result.codebook.len(),
            method: result.method,
            allocation: result.allocation.map(AllocationRecord::from),
            points,
            error: result.error,
            error_exact: result.error_exact.map(exact::format),
        }
    }

    pub fn codebook(&self) -> Result<Codebook> {
        let pts: Vec<Point> = self
            .points
            .iter()
            .map(|p| match *p {
                PointRecord::Line(x) => Point::on_line(x),
                PointRecord::Plane([x, y]) => Point::new(x, y),
            })
            .collect();
        if pts.len() != self.n {
            return invalid(format!("record lists {} points for n={}", pts.len(), self.n));
        }
        Codebook::with_dim(self.model.dim(), pts)
    }
}
