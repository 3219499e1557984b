//! Points of the model spaces.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Space family a point belongs to. Oracle calls check the tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Finite-dimensional normed space; vector coordinates.
    Normed,
    /// Hyperbolic plane; polar coordinates around the base point.
    Hyperbolic,
    /// Glued-interval tree; (segment, offset) address.
    Tree,
}

/// Address of a point on a glued-interval tree.
///
/// Segment 0 is the base line (offset = coordinate, any real). Segments
/// `1..` are attached intervals; their offset ranges are declared by the
/// space that issued the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeAddress<S> {
    pub segment: usize,
    pub offset: S,
}

/// A point of one model space.
#[derive(Debug, Clone, PartialEq)]
pub enum Point<S> {
    Vector(Vec<S>),
    Polar { r: S, theta: S },
    Tree(TreeAddress<S>),
}

impl<S: Scalar> Point<S> {
    pub fn vector(coords: impl Into<Vec<S>>) -> Self {
        Point::Vector(coords.into())
    }

    pub fn polar(r: S, theta: S) -> Self {
        Point::Polar { r, theta }
    }

    pub fn tree(segment: usize, offset: S) -> Self {
        Point::Tree(TreeAddress { segment, offset })
    }

    pub fn family(&self) -> Family {
        match self {
            Point::Vector(_) => Family::Normed,
            Point::Polar { .. } => Family::Hyperbolic,
            Point::Tree(_) => Family::Tree,
        }
    }

    /// Structural validity: finite coordinates, polar r >= 0.
    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            Point::Vector(v) => v.iter().all(|c| c.is_finite()),
            Point::Polar { r, theta } => r.is_finite() && theta.is_finite() && *r >= S::zero(),
            Point::Tree(a) => a.offset.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!("non-finite or out-of-range coordinates: {self:?}")))
        }
    }

    pub fn as_vector(&self) -> Result<&[S]> {
        match self {
            Point::Vector(v) => Ok(v),
            other => Err(Error::InvalidPoint(format!("expected vector coordinates, got {:?}", other.family()))),
        }
    }

    pub fn as_polar(&self) -> Result<(S, S)> {
        match self {
            Point::Polar { r, theta } => Ok((*r, *theta)),
            other => Err(Error::InvalidPoint(format!("expected polar coordinates, got {:?}", other.family()))),
        }
    }

    pub fn as_tree(&self) -> Result<TreeAddress<S>> {
        match self {
            Point::Tree(a) => Ok(*a),
            other => Err(Error::InvalidPoint(format!("expected tree address, got {:?}", other.family()))),
        }
    }
}
