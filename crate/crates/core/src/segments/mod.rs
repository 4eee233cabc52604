//! Mixtures of two uniform distributions on adjacent or separated intervals.

pub mod connected;
pub mod disconnected;

pub use connected::{
    formula_alloc_connected, optimal_set_connected, ConnectedSolution,
};
pub use disconnected::{alloc_disconnected, h, optimal_set_disconnected, split_error};

use crate::error::{invalid, Error, Result};
use crate::result::{Allocation, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitModel {
    Disconnected,
    Connected,
}

impl TryFrom<Model> for SplitModel {
    type Error = Error;
    fn try_from(m: Model) -> Result<Self> {
        match m {
            Model::Disconnected => Ok(SplitModel::Disconnected),
            Model::Connected => Ok(SplitModel::Connected),
            Model::CircleDiameter => invalid("the circle model has no interval split"),
        }
    }
}

/// Number of points placed on `[0, ½]` by the improve-while-better search.
pub fn local_search_alloc(n: usize, model: SplitModel) -> Result<usize> {
    match model {
        SplitModel::Disconnected => disconnected::local_search_alloc(n),
        SplitModel::Connected => connected::local_search_alloc(n),
    }
}

pub fn local_search_path(n: usize, model: SplitModel) -> Result<Vec<usize>> {
    match model {
        SplitModel::Disconnected => disconnected::local_search_path(n),
        SplitModel::Connected => connected::local_search_path(n),
    }
}

/// Names of the properties that were checked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuralReport {
    pub checked: Vec<String>,
}

fn require(report: &mut StructuralReport, ok: bool, what: &str, n: usize) -> Result<()> {
    if !ok {
        return Err(Error::Assertion(format!("{what} (n={n})")));
    }
    report.checked.push(what.to_owned());
    Ok(())
}

/// Structural properties of the optimal codebook for `n ≥ 2`.
pub fn structural_checks(model: SplitModel, n: usize) -> Result<StructuralReport> {
    if n < 2 {
        return invalid(format!("structural checks need n >= 2, got {n}"));
    }
    let mut report = StructuralReport::default();
    let result = match model {
        SplitModel::Disconnected => optimal_set_disconnected(n)?,
        SplitModel::Connected => optimal_set_connected(n)?,
    };
    let xs = result.codebook.xs();
    let Some(Allocation::Split { k }) = result.allocation else {
        return Err(Error::Assertion(format!("missing split for n={n}")));
    };
    require(
        &mut report,
        xs.windows(2).all(|w| w[0] < w[1]),
        "points strictly increasing",
        n,
    )?;
    require(&mut report, k >= 1 && k < n, "both intervals populated", n)?;
    let (left, right) = (xs[k - 1], xs[k]);
    let boundary = 0.5 * (left + right);
    match model {
        SplitModel::Disconnected => {
            require(
                &mut report,
                xs.iter().all(|&x| x <= 0.5 || x >= 0.75),
                "no point inside the gap (1/2, 3/4)",
                n,
            )?;
            require(
                &mut report,
                left <= 0.5 && right >= 0.75,
                "left points in [0, 1/2], right points in [3/4, 1]",
                n,
            )?;
            require(
                &mut report,
                (0.5..=0.75).contains(&boundary),
                "boundary between the intervals lies in the gap",
                n,
            )?;
        }
        SplitModel::Connected => {
            require(
                &mut report,
                left <= 0.5 && right >= 0.5,
                "left points in [0, 1/2], right points in [1/2, 1]",
                n,
            )?;
            require(&mut report, boundary >= 0.5, "junction boundary at or right of 1/2", n)?;
            require(
                &mut report,
                connected::centroid_residual(&xs) < 1e-12,
                "every point is the centroid of its cell",
                n,
            )?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disconnected_checks_pass() {
        for n in 2..=60 {
            structural_checks(SplitModel::Disconnected, n).unwrap();
        }
        let r = structural_checks(SplitModel::Disconnected, 5).unwrap();
        assert_eq!(r.checked.len(), 5);
    }

    #[test]
    fn connected_checks_pass() {
        for n in 2..=40 {
            structural_checks(SplitModel::Connected, n).unwrap();
        }
    }

    #[test]
    fn two_point_boundary() {
        let r = optimal_set_disconnected(2).unwrap();
        let xs = r.codebook.xs();
        assert_eq!(0.5 * (xs[0] + xs[1]), 9.0 / 16.0);
    }

    #[test]
    fn circle_model_is_not_a_split() {
        assert!(SplitModel::try_from(Model::CircleDiameter).is_err());
        assert!(structural_checks(SplitModel::Connected, 1).is_err());
    }
}
