//! Finite-dimensional normed (Minkowski) geometries.
//!
//! Distances evaluate the norm of the coordinate difference; geodesics are
//! affine segments. For norms that are not strictly convex (p = 1, p = inf,
//! polygons) the affine segment is the canonical geodesic selection; the
//! uniqueness probe in the convexity module surfaces the other geodesics.

use crate::error::{Error, Result};
use crate::numeric::{gamma, simpson};
use crate::scalar::Scalar;

/// Which norm the space carries.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind<S> {
    /// p-norm, `1 <= p`; `p = inf` is represented exactly by the max norm.
    P(S),
    PInfinity,
    /// Weighted p-norm `(sum (w_i |x_i|)^p)^(1/p)`, weights positive.
    WeightedP { p: S, weights: Vec<S> },
    /// Gauge of a symmetric convex polygon (2D only), vertices counterclockwise.
    Polygon(Vec<[S; 2]>),
}

/// Validated description of a normed space.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSpec<S> {
    pub dim: usize,
    pub kind: NormKind<S>,
}

impl<S: Scalar> NormSpec<S> {
    pub fn lp(dim: usize, p: S) -> Result<Self> {
        Self::new(dim, if p.is_infinite() { NormKind::PInfinity } else { NormKind::P(p) })
    }

    pub fn new(dim: usize, kind: NormKind<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        match &kind {
            NormKind::P(p) => {
                if !(*p >= S::one()) {
                    return Err(Error::InvalidSpec(format!("p-norm exponent must satisfy p >= 1, got {p}")));
                }
            }
            NormKind::PInfinity => {}
            NormKind::WeightedP { p, weights } => {
                if !(*p >= S::one()) {
                    return Err(Error::InvalidSpec(format!("p-norm exponent must satisfy p >= 1, got {p}")));
                }
                if weights.len() != dim {
                    return Err(Error::InvalidSpec("one weight per coordinate required".into()));
                }
                if weights.iter().any(|w| !(*w > S::zero()) || !w.is_finite()) {
                    return Err(Error::InvalidSpec("weights must be positive and finite".into()));
                }
            }
            NormKind::Polygon(verts) => {
                if dim != 2 {
                    return Err(Error::InvalidSpec("polygonal norms are 2D only".into()));
                }
                validate_polygon(verts)?;
            }
        }
        Ok(Self { dim, kind })
    }

    /// Norm of a coordinate vector.
    pub fn norm(&self, v: &[S]) -> S {
        match &self.kind {
            NormKind::P(p) => {
                if *p == S::one() {
                    v.iter().map(|c| c.abs()).sum()
                } else if *p == S::two() {
                    v.iter().map(|c| *c * *c).sum::<S>().sqrt()
                } else {
                    let s: S = v.iter().map(|c| c.abs().powf(*p)).sum();
                    s.powf(p.recip())
                }
            }
            NormKind::PInfinity => v.iter().fold(S::zero(), |m, c| m.max(c.abs())),
            NormKind::WeightedP { p, weights } => {
                let s: S = v.iter().zip(weights).map(|(c, w)| (c.abs() * *w).powf(*p)).sum();
                s.powf(p.recip())
            }
            NormKind::Polygon(verts) => polygon_gauge(verts, v),
        }
    }

    /// Lebesgue volume of the unit ball.
    ///
    /// p-norm balls use the closed form from the Gamma function; polygons use
    /// the shoelace area. Both are cross-checked against quasi-exact radial
    /// quadrature in tests.
    pub fn unit_ball_volume(&self) -> S {
        let n = self.dim as f64;
        match &self.kind {
            NormKind::P(p) => S::of(lp_ball_volume(n, p.as_f64())),
            NormKind::PInfinity => S::of(2f64.powf(n)),
            NormKind::WeightedP { p, weights } => {
                let base = lp_ball_volume(n, p.as_f64());
                let scale: f64 = weights.iter().map(|w| w.as_f64()).product();
                S::of(base / scale)
            }
            NormKind::Polygon(verts) => S::of(shoelace(verts)),
        }
    }

    /// Quasi-exact 2D unit-ball area by radial quadrature (cross-check route).
    pub fn unit_ball_area_quadrature(&self) -> Result<S> {
        if self.dim != 2 {
            return Err(Error::Unsupported("radial quadrature area is 2D only".into()));
        }
        let rho = |theta: f64| {
            let dir = [S::of(theta.cos()), S::of(theta.sin())];
            let g = self.norm(&dir).as_f64();
            1.0 / (g * g)
        };
        // area = 1/2 * integral of rho(theta)^... rho here is 1/gauge^2 already
        let area = 0.5 * simpson(rho, 0.0, 2.0 * std::f64::consts::PI, 1 << 14);
        Ok(S::of(area))
    }

    /// Per-axis extent of the unit ball: `sup { |x_i| : ||x|| <= 1 }`.
    /// Bounding boxes for rejection sampling come from this.
    pub fn axis_extents(&self) -> Vec<S> {
        match &self.kind {
            NormKind::P(_) | NormKind::PInfinity => vec![S::one(); self.dim],
            NormKind::WeightedP { weights, .. } => weights.iter().map(|w| w.recip()).collect(),
            NormKind::Polygon(verts) => {
                let mut ex = S::zero();
                let mut ey = S::zero();
                for v in verts {
                    ex = ex.max(v[0].abs());
                    ey = ey.max(v[1].abs());
                }
                vec![ex, ey]
            }
        }
    }

    /// Whether the unit sphere contains no segment (unique geodesics).
    pub fn strictly_convex(&self) -> bool {
        match &self.kind {
            NormKind::P(p) => *p > S::one(),
            NormKind::PInfinity | NormKind::Polygon(_) => false,
            NormKind::WeightedP { p, .. } => *p > S::one(),
        }
    }
}

/// Volume of the n-dimensional unit p-ball: `(2 Gamma(1 + 1/p))^n / Gamma(1 + n/p)`.
fn lp_ball_volume(n: f64, p: f64) -> f64 {
    (2.0 * gamma(1.0 + 1.0 / p)).powf(n) / gamma(1.0 + n / p)
}

fn shoelace<S: Scalar>(verts: &[[S; 2]]) -> f64 {
    let mut acc = 0.0;
    for i in 0..verts.len() {
        let a = &verts[i];
        let b = &verts[(i + 1) % verts.len()];
        acc += a[0].as_f64() * b[1].as_f64() - b[0].as_f64() * a[1].as_f64();
    }
    0.5 * acc.abs()
}

/// Gauge of a convex symmetric polygon: `max_i <n_i, v> / c_i` over edge
/// half-planes `{ x : <n_i, x> <= c_i }`.
fn polygon_gauge<S: Scalar>(verts: &[[S; 2]], v: &[S]) -> S {
    let mut g = S::zero();
    for i in 0..verts.len() {
        let a = &verts[i];
        let b = &verts[(i + 1) % verts.len()];
        // outward normal of edge a->b for a CCW polygon
        let nx = b[1] - a[1];
        let ny = a[0] - b[0];
        let c = nx * a[0] + ny * a[1];
        let num = nx * v[0] + ny * v[1];
        g = g.max(num / c);
    }
    g.max(S::zero())
}

fn validate_polygon<S: Scalar>(verts: &[[S; 2]]) -> Result<()> {
    if verts.len() < 4 {
        return Err(Error::InvalidSpec("polygon needs at least 4 vertices".into()));
    }
    if verts.len() % 2 != 0 {
        return Err(Error::InvalidSpec("symmetric polygon has an even vertex count".into()));
    }
    let n = verts.len();
    let tol = S::of(1e-9);
    // symmetry about the origin: v_{i + n/2} = -v_i
    for i in 0..n / 2 {
        let a = &verts[i];
        let b = &verts[i + n / 2];
        if (a[0] + b[0]).abs() > tol || (a[1] + b[1]).abs() > tol {
            return Err(Error::InvalidSpec("polygon is not symmetric about the origin".into()));
        }
    }
    // convexity and orientation: all cross products of consecutive edges positive
    for i in 0..n {
        let a = &verts[i];
        let b = &verts[(i + 1) % n];
        let c = &verts[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if !(cross > S::zero()) {
            return Err(Error::InvalidSpec("polygon must be strictly convex and counterclockwise".into()));
        }
    }
    // origin interior: every edge constant positive
    for i in 0..n {
        let a = &verts[i];
        let b = &verts[(i + 1) % n];
        let nx = b[1] - a[1];
        let ny = a[0] - b[0];
        let c = nx * a[0] + ny * a[1];
        if !(c > S::zero()) {
            return Err(Error::InvalidSpec("origin is not interior to the polygon".into()));
        }
    }
    Ok(())
}

/// A symmetric convex hexagon used as the stock polygonal norm in tests
/// and the CLI (`hexagon`).
pub fn hexagon_vertices<S: Scalar>() -> Vec<[S; 2]> {
    vec![
        [S::of(1.0), S::of(0.0)],
        [S::of(0.5), S::of(0.8)],
        [S::of(-0.5), S::of(0.8)],
        [S::of(-1.0), S::of(0.0)],
        [S::of(-0.5), S::of(-0.8)],
        [S::of(0.5), S::of(-0.8)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_distance_is_pythagorean() {
        let spec = NormSpec::lp(2, 2.0f64).unwrap();
        assert!((spec.norm(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn p_one_and_infinity() {
        let l1 = NormSpec::lp(2, 1.0f64).unwrap();
        assert_eq!(l1.norm(&[1.0, 2.0]), 3.0);
        let li = NormSpec::lp(2, f64::INFINITY).unwrap();
        assert_eq!(li.norm(&[1.0, 2.0]), 2.0);
    }

    #[test]
    fn p_three_halves_norm_value() {
        // oracle: (1 + 1)^(1/1.5) = 2^(2/3)
        let spec = NormSpec::lp(2, 1.5f64).unwrap();
        let expected = 2f64.powf(2.0 / 3.0);
        assert!((spec.norm(&[1.0, 1.0]) - expected).abs() < 1e-14);
    }

    #[test]
    fn ball_volumes_match_quadrature_in_2d() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let spec = NormSpec::lp(2, p).unwrap();
            let closed = spec.unit_ball_volume();
            let quad = spec.unit_ball_area_quadrature().unwrap();
            assert!(
                (closed - quad).abs() < 1e-8 * closed,
                "p={p}: closed {closed} vs quadrature {quad}"
            );
        }
        let hex = NormSpec::new(2, NormKind::Polygon(hexagon_vertices::<f64>())).unwrap();
        let closed = hex.unit_ball_volume();
        let quad = hex.unit_ball_area_quadrature().unwrap();
        assert!((closed - quad).abs() < 1e-6 * closed);
    }

    #[test]
    fn known_ball_volumes() {
        // disk area pi; cross-polytope (l1 ball) area 2; square area 4
        assert!((NormSpec::lp(2, 2.0f64).unwrap().unit_ball_volume() - std::f64::consts::PI).abs() < 1e-12);
        assert!((NormSpec::lp(2, 1.0f64).unwrap().unit_ball_volume() - 2.0).abs() < 1e-12);
        assert!((NormSpec::lp(2, f64::INFINITY).unwrap().unit_ball_volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_norm_and_volume() {
        let spec = NormSpec::new(
            2,
            NormKind::WeightedP { p: 2.0f64, weights: vec![1.0, 2.0] },
        )
        .unwrap();
        assert!((spec.norm(&[3.0, 2.0]) - 5.0).abs() < 1e-14);
        // ellipse semi-axes 1 and 1/2
        assert!((spec.unit_ball_volume() - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_gauge_on_hexagon() {
        let spec = NormSpec::new(2, NormKind::Polygon(hexagon_vertices::<f64>())).unwrap();
        // vertices lie on the unit sphere
        for v in hexagon_vertices::<f64>() {
            assert!((spec.norm(&v) - 1.0).abs() < 1e-12);
        }
        assert!((spec.norm(&[2.0, 0.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(NormSpec::lp(2, 0.5f64).is_err());
        assert!(NormSpec::new(2, NormKind::WeightedP { p: 2.0f64, weights: vec![1.0, -1.0] }).is_err());
        // asymmetric quadrilateral
        let bad = vec![[1.0f64, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.2, -1.0]];
        assert!(NormSpec::new(2, NormKind::Polygon(bad)).is_err());
    }
}
