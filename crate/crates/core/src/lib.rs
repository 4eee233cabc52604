//! Optimal quantizers for mixtures of uniform distributions.
//!
//! Three models are covered: half uniform on the unit circle plus half
//! uniform on a diameter, and two mixtures of uniforms on `[0, ½]` and a
//! second interval (`[¾, 1]` or `[½, 1]`) with weights ¾ and ¼. For each
//! model the crate builds the optimal codebook and its quantization error in
//! closed or semi-closed form, and [`oracle`] checks those results against
//! Lloyd iteration and brute-force search.

pub mod circle_diameter;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod exact;
pub mod measures;
pub mod oracle;
pub mod quadrature;
pub mod result;
pub mod roots;
pub mod segments;

pub use error::{Error, Result};
pub use measures::{Codebook, MixedMeasure, Point};
pub use result::{Allocation, Method, Model, QuantizationResult};
