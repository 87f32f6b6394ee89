//! Axis-aligned boxes with named coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

/// An axis-aligned box. Coordinates are ordered; points in the box are plain
/// `f64` slices in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    names: Vec<String>,
    bounds: Vec<Interval>,
}

impl BoxDomain {
    /// Builds a box from `(name, lo, hi)` triples.
    ///
    /// Fails on duplicate names, `lo > hi`, or non-finite bounds.
    pub fn new<I, S>(coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64, f64)>,
        S: Into<String>,
    {
        let mut names: Vec<String> = Vec::new();
        let mut bounds = Vec::new();
        for (name, lo, hi) in coords {
            let name = name.into();
            if names.contains(&name) {
                return Err(Error::Domain(format!("duplicate coordinate `{name}`")));
            }
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Domain(format!(
                    "coordinate `{name}` has non-finite bounds"
                )));
            }
            let bound = Interval::new(lo, hi).ok_or_else(|| {
                Error::Domain(format!("coordinate `{name}` has lo {lo} > hi {hi}"))
            })?;
            names.push(name);
            bounds.push(bound);
        }
        Ok(Self { names, bounds })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bound_of(&self, name: &str) -> Option<Interval> {
        self.index_of(name).map(|i| self.bounds[i])
    }

    /// `true` when `point` has the right dimension and every coordinate lies
    /// within its bounds.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim()
            && self
                .bounds
                .iter()
                .zip(point)
                .all(|(b, &v)| b.contains(v))
    }

    /// Errors with a domain error unless `point` lies in the box.
    pub fn check_contains(&self, point: &[f64], what: &str) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::Domain(format!(
                "{what} has {} coordinates, expected {}",
                point.len(),
                self.dim()
            )));
        }
        if !self.contains(point) {
            return Err(Error::Domain(format!("{what} {point:?} lies outside the box")));
        }
        Ok(())
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.bounds.iter().map(Interval::midpoint).collect()
    }

    /// Cartesian product: `self`'s coordinates followed by `other`'s.
    pub fn product(&self, other: &BoxDomain) -> Result<BoxDomain> {
        let coords = self
            .names
            .iter()
            .zip(&self.bounds)
            .chain(other.names.iter().zip(&other.bounds))
            .map(|(n, b)| (n.clone(), b.lo, b.hi));
        BoxDomain::new(coords)
    }

    /// Pairs each coordinate name with the matching entry of `point`.
    pub fn assign<'a>(&'a self, point: &'a [f64]) -> Vec<(&'a str, f64)> {
        self.names
            .iter()
            .map(String::as_str)
            .zip(point.iter().copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_boxes() {
        assert!(BoxDomain::new([("x", 1.0, 0.0)]).is_err());
        assert!(BoxDomain::new([("x", 0.0, 1.0), ("x", 0.0, 1.0)]).is_err());
        assert!(BoxDomain::new([("x", f64::NEG_INFINITY, 1.0)]).is_err());
    }

    #[test]
    fn membership_and_product() {
        let x = BoxDomain::new([("x", -1.0, 1.0)]).unwrap();
        let y = BoxDomain::new([("y", 0.0, 2.0)]).unwrap();
        let xy = x.product(&y).unwrap();
        assert_eq!(xy.names(), ["x", "y"]);
        assert!(xy.contains(&[1.0, 2.0]));
        assert!(!xy.contains(&[1.0, 2.5]));
        assert!(!xy.contains(&[1.0]));
        assert!(x.product(&x).is_err());
    }
}
