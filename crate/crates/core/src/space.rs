//! The space bundle: distance oracle, geodesic oracle, measure, sampler.
//!
//! A [`Space`] is one of three analytic geometries (normed, hyperbolic plane,
//! glued-interval tree), optionally rescaled, optionally restricted to a
//! convex region, optionally carrying a Gaussian-type weight on the measure.
//! Every oracle is a closed formula; nothing is discretized, so inequality
//! audits see no mesh error. Spaces are immutable and freely shareable
//! across workers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::simpson;
use crate::point::{Family, Point, TreeAddress};
use crate::rng::RandomStream;
use crate::scalar::Scalar;
use crate::spaces::hyperbolic;
use crate::spaces::normed::NormSpec;
use crate::spaces::tree::TreeGeometry;

/// Analytic geometry behind a space.
#[derive(Debug, Clone)]
pub enum Geometry<S> {
    Normed(NormSpec<S>),
    Hyperbolic,
    Tree(TreeGeometry<S>),
}

/// Convex restriction region, in base coordinates.
#[derive(Debug, Clone)]
pub enum Region<S> {
    Ball { center: Point<S>, radius: S },
    /// `{ x : <normal, x> >= offset }`; normed spaces only.
    HalfSpace { normal: Vec<S>, offset: S },
}

/// Radial weight `e^{-r^power}` against the hyperbolic area element,
/// with `r` the distance from the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec<S> {
    pub power: S,
}

impl<S: Scalar> WeightSpec<S> {
    /// The Gaussian-type weight `e^{-r^2}`.
    pub fn gaussian() -> Self {
        Self { power: S::two() }
    }

    pub fn new(power: S) -> Result<Self> {
        if power >= S::one() && power.is_finite() {
            Ok(Self { power })
        } else {
            Err(Error::InvalidSpec(format!("weight exponent must be >= 1, got {power}")))
        }
    }
}

/// How `ball_mass` was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassMethod {
    Exact,
    MonteCarlo,
}

/// A mass value with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate<S> {
    pub value: S,
    pub std_error: S,
    pub method: MassMethod,
    pub samples: usize,
}

impl<S: Scalar> MassEstimate<S> {
    pub fn exact(value: S) -> Self {
        Self { value, std_error: S::zero(), method: MassMethod::Exact, samples: 0 }
    }
}

/// Measure carried by a space (for `describe`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Lebesgue,
    HyperbolicArea,
    WeightedHyperbolicArea,
    Length,
}

/// Summary of a space's capabilities.
#[derive(Debug, Clone)]
pub struct SpaceInfo {
    pub family: Family,
    pub dim: usize,
    pub measure: MeasureKind,
    pub domain_radius: f64,
    pub exact_jacobian: bool,
    pub uniquely_geodesic_norm: bool,
    pub restricted: bool,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct Space<S> {
    geometry: Arc<Geometry<S>>,
    /// Distances are `scale` times the base-geometry distances.
    scale: S,
    region: Option<Arc<Region<S>>>,
    weight: Option<WeightSpec<S>>,
    /// Sampler cap in base units (radius for hyperbolic, per-axis box for
    /// normed, base-coordinate window for trees).
    domain_cap: S,
    origin_override: Option<Point<S>>,
}

impl<S: Scalar> Space<S> {
    pub(crate) fn from_geometry(geometry: Geometry<S>, domain_cap: S) -> Self {
        Self {
            geometry: Arc::new(geometry),
            scale: S::one(),
            region: None,
            weight: None,
            domain_cap,
            origin_override: None,
        }
    }

    pub fn geometry(&self) -> &Geometry<S> {
        &self.geometry
    }

    pub fn family(&self) -> Family {
        match &*self.geometry {
            Geometry::Normed(_) => Family::Normed,
            Geometry::Hyperbolic => Family::Hyperbolic,
            Geometry::Tree(_) => Family::Tree,
        }
    }

    pub fn dim(&self) -> usize {
        match &*self.geometry {
            Geometry::Normed(spec) => spec.dim,
            Geometry::Hyperbolic => 2,
            Geometry::Tree(_) => 1,
        }
    }

    pub fn scale(&self) -> S {
        self.scale
    }

    pub fn region(&self) -> Option<&Region<S>> {
        self.region.as_deref()
    }

    pub fn weight(&self) -> Option<&WeightSpec<S>> {
        self.weight.as_ref()
    }

    /// Sampler cap expressed as a radius in (scaled) distance units.
    pub fn domain_radius(&self) -> S {
        self.scale * self.domain_cap
    }

    pub fn info(&self) -> SpaceInfo {
        SpaceInfo {
            family: self.family(),
            dim: self.dim(),
            measure: match (&*self.geometry, &self.weight) {
                (Geometry::Normed(_), _) => MeasureKind::Lebesgue,
                (Geometry::Hyperbolic, None) => MeasureKind::HyperbolicArea,
                (Geometry::Hyperbolic, Some(_)) => MeasureKind::WeightedHyperbolicArea,
                (Geometry::Tree(_), _) => MeasureKind::Length,
            },
            domain_radius: self.domain_radius().as_f64(),
            exact_jacobian: self.has_exact_jacobian(),
            uniquely_geodesic_norm: match &*self.geometry {
                Geometry::Normed(spec) => spec.strictly_convex(),
                _ => true,
            },
            restricted: self.region.is_some(),
            scale: self.scale.as_f64(),
        }
    }

    /// Canonical marked point.
    pub fn origin(&self) -> Point<S> {
        if let Some(o) = &self.origin_override {
            return o.clone();
        }
        if let Some(region) = self.region.as_deref() {
            match region {
                Region::Ball { center, .. } => return center.clone(),
                Region::HalfSpace { normal, offset } => {
                    let geom_origin = self.geometry_origin();
                    if self.region_contains(&geom_origin) {
                        return geom_origin;
                    }
                    // nearest boundary point to the coordinate origin
                    let n2: S = normal.iter().map(|c| *c * *c).sum();
                    let coords = normal.iter().map(|c| *c * *offset / n2).collect();
                    return Point::Vector(coords);
                }
            }
        }
        self.geometry_origin()
    }

    fn geometry_origin(&self) -> Point<S> {
        match &*self.geometry {
            Geometry::Normed(spec) => Point::Vector(vec![S::zero(); spec.dim]),
            Geometry::Hyperbolic => Point::polar(S::zero(), S::zero()),
            Geometry::Tree(_) => Point::tree(0, S::zero()),
        }
    }

    // ----- modifiers (used by the constructors in `spaces`) -----

    /// Restricts to a convex region. The ball radius is taken in the space's
    /// current (scaled) distance units and stored in base-geometry units so
    /// later rescaling keeps the region geometric.
    pub(crate) fn with_region(mut self, region: Region<S>) -> Result<Self> {
        if self.region.is_some() {
            return Err(Error::InvalidSpec("space is already restricted to a region".into()));
        }
        let region = match (&*self.geometry, region) {
            (Geometry::Normed(spec), Region::HalfSpace { normal, offset }) => {
                if normal.len() != spec.dim {
                    return Err(Error::InvalidSpec("half-space normal has wrong dimension".into()));
                }
                if normal.iter().all(|c| *c == S::zero()) {
                    return Err(Error::InvalidSpec("half-space normal must be nonzero".into()));
                }
                Region::HalfSpace { normal, offset }
            }
            (_, Region::HalfSpace { .. }) => {
                return Err(Error::InvalidSpec("half-space regions exist only in normed spaces".into()));
            }
            (_, Region::Ball { center, radius }) => {
                if !(radius > S::zero()) {
                    return Err(Error::InvalidSpec("region ball radius must be positive".into()));
                }
                self.validate_point_unrestricted(&center)?;
                if self.check_ball_domain(&center, radius).is_err() {
                    return Err(Error::InvalidSpec("region ball exceeds the sampler domain".into()));
                }
                Region::Ball { center, radius: radius / self.scale }
            }
        };
        self.region = Some(Arc::new(region));
        Ok(self)
    }

    /// The same geometry with restriction and weight stripped.
    pub fn unrestricted(&self) -> Space<S> {
        Space {
            geometry: self.geometry.clone(),
            scale: self.scale,
            region: None,
            weight: None,
            domain_cap: self.domain_cap,
            origin_override: None,
        }
    }

    pub(crate) fn with_weight(mut self, weight: WeightSpec<S>) -> Result<Self> {
        match &*self.geometry {
            Geometry::Hyperbolic => {}
            _ => return Err(Error::InvalidSpec("weights are supported on the hyperbolic plane only".into())),
        }
        if self.weight.is_some() {
            return Err(Error::InvalidSpec("space already carries a weight".into()));
        }
        self.weight = Some(weight);
        Ok(self)
    }

    pub(crate) fn rescaled(mut self, lambda: S, center: Option<Point<S>>) -> Result<Self> {
        if !(lambda > S::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("rescale factor must be positive, got {lambda}")));
        }
        if let Some(c) = &center {
            self.validate_point(c)?;
        }
        self.scale = self.scale * lambda;
        if center.is_some() {
            self.origin_override = center;
        }
        Ok(self)
    }

    // ----- validity -----

    fn region_contains(&self, pt: &Point<S>) -> bool {
        match self.region.as_deref() {
            None => true,
            Some(Region::Ball { center, radius }) => {
                let d = self.base_distance(center, pt);
                d <= *radius * (S::one() + S::of(1e-12)) + S::of(1e-300)
            }
            Some(Region::HalfSpace { normal, offset }) => match pt {
                Point::Vector(v) => {
                    let dot: S = normal.iter().zip(v).map(|(n, c)| *n * *c).sum();
                    dot >= *offset - S::of(1e-12) * (S::one() + offset.abs())
                }
                _ => false,
            },
        }
    }

    fn validate_point_unrestricted(&self, pt: &Point<S>) -> Result<()> {
        pt.validate()?;
        match (&*self.geometry, pt) {
            (Geometry::Normed(spec), Point::Vector(v)) => {
                if v.len() != spec.dim {
                    return Err(Error::InvalidPoint(format!(
                        "expected {} coordinates, got {}",
                        spec.dim,
                        v.len()
                    )));
                }
            }
            (Geometry::Hyperbolic, Point::Polar { r, .. }) => {
                if r.as_f64() > hyperbolic::MAX_RADIUS {
                    return Err(Error::InvalidPoint(format!("polar radius {r} beyond formula range")));
                }
            }
            (Geometry::Tree(tree), Point::Tree(addr)) => tree.validate(addr)?,
            (_, other) => {
                return Err(Error::InvalidPoint(format!(
                    "point family {:?} does not match space family {:?}",
                    other.family(),
                    self.family()
                )));
            }
        }
        Ok(())
    }

    pub fn validate_point(&self, pt: &Point<S>) -> Result<()> {
        self.validate_point_unrestricted(pt)?;
        if !self.region_contains(pt) {
            return Err(Error::InvalidPoint("point lies outside the restricted region".into()));
        }
        Ok(())
    }

    pub fn contains(&self, pt: &Point<S>) -> bool {
        self.validate_point(pt).is_ok()
    }

    // ----- metric oracles -----

    fn base_distance(&self, a: &Point<S>, b: &Point<S>) -> S {
        match (&*self.geometry, a, b) {
            (Geometry::Normed(spec), Point::Vector(u), Point::Vector(v)) => {
                let diff: Vec<S> = u.iter().zip(v).map(|(x, y)| *x - *y).collect();
                spec.norm(&diff)
            }
            (Geometry::Hyperbolic, Point::Polar { r: r1, theta: t1 }, Point::Polar { r: r2, theta: t2 }) => {
                hyperbolic::distance(*r1, *t1, *r2, *t2)
            }
            (Geometry::Tree(tree), Point::Tree(x), Point::Tree(y)) => tree.distance(x, y),
            _ => S::nan(),
        }
    }

    /// Distance between two points of this space.
    pub fn distance(&self, a: &Point<S>, b: &Point<S>) -> Result<S> {
        self.validate_point(a)?;
        self.validate_point(b)?;
        Ok(self.scale * self.base_distance(a, b))
    }

    /// The t-intermediate point on the canonical shortest path `p -> x`.
    pub fn intermediate(&self, p: &Point<S>, x: &Point<S>, t: S) -> Result<Point<S>> {
        if !(t >= S::zero() && t <= S::one()) {
            return Err(Error::InvalidParams(format!("t must lie in [0, 1], got {t}")));
        }
        self.validate_point(p)?;
        self.validate_point(x)?;
        if t == S::zero() {
            return Ok(p.clone());
        }
        if t == S::one() {
            return Ok(x.clone());
        }
        match (&*self.geometry, p, x) {
            (Geometry::Normed(_), Point::Vector(u), Point::Vector(v)) => {
                let coords = u.iter().zip(v).map(|(a, b)| *a + t * (*b - *a)).collect();
                Ok(Point::Vector(coords))
            }
            (Geometry::Hyperbolic, Point::Polar { r: r1, theta: t1 }, Point::Polar { r: r2, theta: t2 }) => {
                let d = hyperbolic::distance(*r1, *t1, *r2, *t2);
                let (r, theta) = hyperbolic::geodesic_point((*r1, *t1), (*r2, *t2), t * d);
                Ok(Point::polar(r, theta))
            }
            (Geometry::Tree(tree), Point::Tree(a), Point::Tree(b)) => {
                let d = tree.distance(a, b);
                let addr = tree.walk(a, b, t * d)?;
                Ok(Point::Tree(addr))
            }
            _ => unreachable!("validated points match the geometry"),
        }
    }

    /// Pointwise image of `pts` under the t-contraction toward `p`.
    pub fn contract_set(&self, p: &Point<S>, t: S, pts: &[Point<S>]) -> Result<Vec<Point<S>>> {
        pts.iter().map(|x| self.intermediate(p, x, t)).collect()
    }

    /// Point at (scaled) arclength `s` on the geodesic from `from` through
    /// `through`, extended beyond the endpoints where the family allows it.
    /// `s` may be negative or exceed the distance.
    pub fn ray_point(&self, from: &Point<S>, through: &Point<S>, s: S) -> Result<Point<S>> {
        self.validate_point(from)?;
        self.validate_point(through)?;
        let s_base = s / self.scale;
        let out = match (&*self.geometry, from, through) {
            (Geometry::Normed(spec), Point::Vector(u), Point::Vector(v)) => {
                let diff: Vec<S> = v.iter().zip(u).map(|(b, a)| *b - *a).collect();
                let n = spec.norm(&diff);
                if n == S::zero() {
                    return Err(Error::InvalidParams("ray direction is degenerate (from == through)".into()));
                }
                let coords = u.iter().zip(&diff).map(|(a, d)| *a + s_base / n * *d).collect();
                Point::Vector(coords)
            }
            (Geometry::Hyperbolic, Point::Polar { r: r1, theta: t1 }, Point::Polar { r: r2, theta: t2 }) => {
                let (r, theta) = hyperbolic::geodesic_point((*r1, *t1), (*r2, *t2), s_base);
                if r.as_f64() > hyperbolic::MAX_RADIUS {
                    return Err(Error::DomainExceeded(format!("ray point radius {r} beyond formula range")));
                }
                Point::polar(r, theta)
            }
            (Geometry::Tree(tree), Point::Tree(a), Point::Tree(b)) => {
                if tree.distance(a, b) == S::zero() {
                    return Err(Error::InvalidParams("ray direction is degenerate (from == through)".into()));
                }
                Point::Tree(tree.walk(a, b, s_base)?)
            }
            _ => unreachable!("validated points match the geometry"),
        };
        if !self.region_contains(&out) {
            return Err(Error::DomainExceeded("ray extension leaves the restricted region".into()));
        }
        Ok(out)
    }

    // ----- measure -----

    /// Weight density at a point (1 for unweighted spaces).
    pub fn density(&self, pt: &Point<S>) -> S {
        match (&self.weight, pt) {
            (Some(w), Point::Polar { r, .. }) => (-r.powf(w.power)).exp(),
            _ => S::one(),
        }
    }

    /// Infinitesimal mass-distortion factor of the t-contraction toward `p`
    /// at `x`, for families with a closed form.
    pub fn radial_jacobian(&self, p: &Point<S>, x: &Point<S>, t: S) -> Result<S> {
        if self.weight.is_some() {
            return Err(Error::Unsupported("no closed-form jacobian for weighted measures".into()));
        }
        match &*self.geometry {
            Geometry::Normed(spec) => Ok(t.powi(spec.dim as i32)),
            Geometry::Hyperbolic => {
                self.validate_point(p)?;
                self.validate_point(x)?;
                let d = self.base_distance(p, x);
                if d == S::zero() {
                    return Ok(t * t); // limit of t sinh(td)/sinh(d) as d -> 0
                }
                Ok(t * (t * d).sinh() / d.sinh())
            }
            Geometry::Tree(_) => Err(Error::Unsupported(
                "tree contractions overlap; use the exact interval image instead".into(),
            )),
        }
    }

    pub fn has_exact_jacobian(&self) -> bool {
        self.weight.is_none() && !matches!(&*self.geometry, Geometry::Tree(_))
    }

    /// Whether `ball_mass` has an exact closed form at this center.
    pub fn has_exact_ball_mass(&self, p: &Point<S>) -> bool {
        if self.region.is_some() {
            return false;
        }
        match (&*self.geometry, &self.weight) {
            (Geometry::Normed(_), _) => true,
            (Geometry::Hyperbolic, None) => true,
            (Geometry::Hyperbolic, Some(_)) => match p {
                Point::Polar { r, .. } => *r == S::zero(),
                _ => false,
            },
            (Geometry::Tree(_), _) => true,
        }
    }

    fn check_ball_domain(&self, p: &Point<S>, r: S) -> Result<()> {
        let r_base = r / self.scale;
        let cap = self.domain_cap;
        let ok = match (&*self.geometry, p) {
            (Geometry::Normed(spec), Point::Vector(v)) => {
                let extents = spec.axis_extents();
                v.iter()
                    .zip(&extents)
                    .all(|(c, e)| c.abs() + r_base * *e <= cap * (S::one() + S::of(1e-12)))
            }
            (Geometry::Hyperbolic, Point::Polar { r: rp, .. }) => *rp + r_base <= cap,
            (Geometry::Tree(tree), Point::Tree(a)) => {
                let reach = match a.segment {
                    0 => a.offset.abs() + r_base,
                    seg => {
                        let attach = tree.attachment(seg).unwrap_or(S::zero());
                        attach.abs() + a.offset.abs() + r_base
                    }
                };
                reach <= cap
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DomainExceeded(format!(
                "ball of radius {r} at {p:?} exceeds the sampler domain (cap {})",
                self.domain_radius()
            )))
        }
    }

    /// Mass of the ball B(p, r): exact closed form where one exists, Monte
    /// Carlo with a reported standard error otherwise.
    pub fn ball_mass(&self, p: &Point<S>, r: S, budget: usize, rng: &mut RandomStream) -> Result<MassEstimate<S>> {
        self.validate_point(p)?;
        if !(r > S::zero()) {
            return Err(Error::InvalidParams(format!("radius must be positive, got {r}")));
        }
        self.check_ball_domain(p, r)?;
        if self.has_exact_ball_mass(p) {
            return Ok(MassEstimate::exact(self.exact_ball_mass(p, r)));
        }
        self.ball_mass_mc(p, r, budget, rng)
    }

    fn exact_ball_mass(&self, p: &Point<S>, r: S) -> S {
        let r_base = r / self.scale;
        let n = S::of(self.dim() as f64);
        let vol_scale = self.scale.powf(n);
        match (&*self.geometry, &self.weight) {
            (Geometry::Normed(spec), _) => spec.unit_ball_volume() * r.powi(spec.dim as i32),
            (Geometry::Hyperbolic, None) => vol_scale * hyperbolic::disk_area(r_base),
            (Geometry::Hyperbolic, Some(w)) => {
                // centered weighted disk: 2 pi * integral of e^{-s^power} sinh s
                let power = w.power.as_f64();
                let integral = simpson(
                    |s| (-(s.powf(power))).exp() * s.sinh(),
                    0.0,
                    r_base.as_f64(),
                    1 << 12,
                );
                vol_scale * S::two() * S::PI() * S::of(integral)
            }
            (Geometry::Tree(tree), _) => {
                let addr = match p {
                    Point::Tree(a) => a,
                    _ => unreachable!(),
                };
                let cover = tree.ball_cover(addr, r_base);
                self.scale * TreeGeometry::cover_mass(&cover)
            }
        }
    }

    /// Monte Carlo ball mass (forced, even when a closed form exists):
    /// samples the unweighted unrestricted ball and averages the weight and
    /// region indicators.
    pub fn ball_mass_mc(&self, p: &Point<S>, r: S, budget: usize, rng: &mut RandomStream) -> Result<MassEstimate<S>> {
        self.validate_point(p)?;
        self.check_ball_domain(p, r)?;
        if budget == 0 {
            return Err(Error::InvalidParams("Monte Carlo ball mass needs a positive budget".into()));
        }
        let enclosing = {
            // mass of the unweighted, unrestricted ball
            let plain = Space {
                geometry: self.geometry.clone(),
                scale: self.scale,
                region: None,
                weight: None,
                domain_cap: self.domain_cap,
                origin_override: None,
            };
            plain.exact_ball_mass(p, r)
        };
        let mut sum = S::zero();
        let mut sum_sq = S::zero();
        for _ in 0..budget {
            let z = self.sample_geometry_ball(p, r, rng);
            let f = if self.region_contains(&z) { self.density(&z) } else { S::zero() };
            sum = sum + f;
            sum_sq = sum_sq + f * f;
        }
        let m = S::of(budget as f64);
        let mean = sum / m;
        let var = (sum_sq / m - mean * mean).max(S::zero());
        let value = enclosing * mean;
        let std_error = enclosing * (var / m).sqrt();
        Ok(MassEstimate { value, std_error, method: MassMethod::MonteCarlo, samples: budget })
    }

    /// One uniform draw from the unweighted, unrestricted ball B(p, r).
    fn sample_geometry_ball(&self, p: &Point<S>, r: S, rng: &mut RandomStream) -> Point<S> {
        let r_base = r / self.scale;
        match (&*self.geometry, p) {
            (Geometry::Normed(spec), Point::Vector(c)) => {
                let extents = spec.axis_extents();
                loop {
                    let u: Vec<S> = extents
                        .iter()
                        .map(|e| rng.range(-S::one(), S::one()) * *e)
                        .collect();
                    if spec.norm(&u) <= S::one() {
                        let coords = c.iter().zip(&u).map(|(a, d)| *a + r_base * *d).collect();
                        return Point::Vector(coords);
                    }
                }
            }
            (Geometry::Hyperbolic, Point::Polar { r: rp, theta: tp }) => {
                let s = hyperbolic::radial_quantile(r_base, rng.unit::<S>());
                let phi = rng.range(S::zero(), S::two() * S::PI());
                let (rr, tt) = hyperbolic::translate_from_origin((*rp, *tp), (s, phi));
                Point::polar(rr, tt)
            }
            (Geometry::Tree(tree), Point::Tree(a)) => {
                let cover = tree.ball_cover(a, r_base);
                let total = TreeGeometry::cover_mass(&cover);
                let mut u = rng.unit::<S>() * total;
                for iv in &cover {
                    if u <= iv.length() {
                        return Point::tree(iv.segment, iv.lo + u);
                    }
                    u = u - iv.length();
                }
                let last = cover.last().expect("ball cover is non-empty for r > 0");
                Point::tree(last.segment, last.hi)
            }
            _ => unreachable!("validated points match the geometry"),
        }
    }

    /// i.i.d. draws from the reference measure restricted to B(p, r).
    pub fn sample_ball(&self, p: &Point<S>, r: S, count: usize, rng: &mut RandomStream) -> Result<Vec<Point<S>>> {
        self.validate_point(p)?;
        if !(r > S::zero()) {
            return Err(Error::InvalidParams(format!("radius must be positive, got {r}")));
        }
        self.check_ball_domain(p, r)?;
        if count == 0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::with_capacity(count);
        let max_attempts = 1000usize.saturating_mul(count).max(100_000);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::EmptyRegion(format!(
                    "ball of radius {r} at {p:?} has (near-)zero mass under the restriction"
                )));
            }
            let z = self.sample_geometry_ball(p, r, rng);
            if !self.region_contains(&z) {
                continue;
            }
            let w = self.density(&z);
            if w < S::one() && rng.unit::<S>() > w {
                continue;
            }
            out.push(z);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces;

    #[test]
    fn euclidean_distance_345() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let d = sp.distance(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![3.0, 4.0])).unwrap();
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn linf_distance() {
        let sp = spaces::lp_space(2, f64::INFINITY).unwrap();
        let d = sp.distance(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![1.0, 2.0])).unwrap();
        assert_eq!(d, 2.0);
    }

    #[test]
    fn family_mismatch_is_invalid_point() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let err = sp.distance(&Point::vector(vec![0.0, 0.0]), &Point::polar(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidPoint(_)));
    }

    #[test]
    fn intermediate_euclidean_quarter() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let q = sp
            .intermediate(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![2.0, 0.0]), 0.25)
            .unwrap();
        assert_eq!(q.as_vector().unwrap(), &[0.5, 0.0]);
    }

    #[test]
    fn intermediate_endpoints() {
        let sp = spaces::hyperbolic_space::<f64>();
        let p = Point::polar(0.3, 1.0);
        let x = Point::polar(1.2, -0.4);
        assert_eq!(sp.intermediate(&p, &x, 0.0).unwrap(), p);
        assert_eq!(sp.intermediate(&p, &x, 1.0).unwrap(), x);
    }

    #[test]
    fn hyperbolic_radial_intermediate() {
        let sp = spaces::hyperbolic_space::<f64>();
        let q = sp
            .intermediate(&Point::polar(0.0, 0.0), &Point::polar(1.0, 0.0), 0.3)
            .unwrap();
        let (r, theta) = q.as_polar().unwrap();
        assert!((r - 0.3).abs() < 1e-12 && theta.abs() < 1e-12);
    }

    #[test]
    fn contract_set_t0_t1() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let p = Point::vector(vec![0.0, 0.0]);
        let pts = vec![Point::vector(vec![1.0, 0.0]), Point::vector(vec![0.0, 1.0])];
        let same = sp.contract_set(&p, 1.0, &pts).unwrap();
        assert_eq!(same, pts);
        let collapsed = sp.contract_set(&p, 0.0, &pts).unwrap();
        assert!(collapsed.iter().all(|q| q == &p));
        let half = sp.contract_set(&p, 0.5, &pts).unwrap();
        assert_eq!(half[0].as_vector().unwrap(), &[0.5, 0.0]);
        assert_eq!(half[1].as_vector().unwrap(), &[0.0, 0.5]);
    }

    #[test]
    fn ball_mass_euclidean_disk() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::vector(vec![0.0, 0.0]), 1.0, 0, &mut rng).unwrap();
        assert_eq!(m.method, MassMethod::Exact);
        assert!((m.value - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(m.std_error, 0.0);
    }

    #[test]
    fn ball_mass_l1_cross_polytope() {
        let sp = spaces::lp_space(2, 1.0f64).unwrap();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::vector(vec![0.0, 0.0]), 1.0, 0, &mut rng).unwrap();
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ball_mass_hyperbolic_disk() {
        // oracle: 2 pi (cosh 1 - 1), evaluated in f64
        let sp = spaces::hyperbolic_space::<f64>();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::polar(0.0, 0.0), 1.0, 0, &mut rng).unwrap();
        let expected = 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0);
        assert!((m.value - expected).abs() < 1e-12);
        assert!((expected - 3.412_280_636_075_568).abs() < 1e-12);
    }

    #[test]
    fn ball_mass_off_center_hyperbolic_matches_homogeneity() {
        let sp = spaces::hyperbolic_space::<f64>();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::polar(1.3, 0.7), 0.8, 0, &mut rng).unwrap();
        let expected = 2.0 * std::f64::consts::PI * (0.8f64.cosh() - 1.0);
        assert!((m.value - expected).abs() < 1e-12);
    }

    #[test]
    fn ball_mass_domain_cap() {
        let sp = spaces::hyperbolic_space::<f64>();
        let mut rng = RandomStream::new(1, 1);
        let err = sp.ball_mass(&Point::polar(0.0, 0.0), 100.0, 0, &mut rng).unwrap_err();
        assert!(matches!(err, Error::DomainExceeded(_)));
    }

    #[test]
    fn sample_ball_count_zero_is_empty() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let mut rng = RandomStream::new(1, 1);
        let pts = sp.sample_ball(&Point::vector(vec![0.0, 0.0]), 1.0, 0, &mut rng).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn sample_ball_respects_radius_and_determinism() {
        let sp = spaces::lp_space(2, 1.5f64).unwrap();
        let p = Point::vector(vec![0.2, -0.1]);
        let mut rng1 = RandomStream::new(9, 4);
        let mut rng2 = RandomStream::new(9, 4);
        let a = sp.sample_ball(&p, 0.7, 64, &mut rng1).unwrap();
        let b = sp.sample_ball(&p, 0.7, 64, &mut rng2).unwrap();
        assert_eq!(a, b);
        for z in &a {
            assert!(sp.distance(&p, z).unwrap() <= 0.7 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mc_mass_agrees_with_exact_on_disk() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let p = Point::vector(vec![0.0, 0.0]);
        let mut rng = RandomStream::new(5, 2);
        let est = sp.ball_mass_mc(&p, 1.0, 20_000, &mut rng).unwrap();
        // the plain ball estimator has zero variance by construction
        assert!((est.value - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn weighted_density_values() {
        let sp = spaces::weighted_hyperbolic::<f64>().unwrap();
        assert_eq!(sp.density(&Point::polar(0.0, 0.0)), 1.0);
        let ratio = sp.density(&Point::polar(1.0, 0.3)) / sp.density(&Point::polar(0.0, 0.0));
        assert!((ratio - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn weighted_ball_mass_matches_quadrature() {
        // oracle: 2 pi * integral_0^1 e^{-s^2} sinh(s) ds by fine Simpson
        let sp = spaces::weighted_hyperbolic::<f64>().unwrap();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::polar(0.0, 0.0), 1.0, 0, &mut rng).unwrap();
        let oracle = 2.0
            * std::f64::consts::PI
            * simpson(|s| (-(s * s)).exp() * s.sinh(), 0.0, 1.0, 1 << 14);
        assert_eq!(m.method, MassMethod::Exact);
        assert!((m.value - oracle).abs() < 1e-10);
        // off-center falls back to Monte Carlo
        let m2 = sp.ball_mass(&Point::polar(0.5, 0.0), 0.3, 20_000, &mut rng).unwrap();
        assert_eq!(m2.method, MassMethod::MonteCarlo);
        assert!(m2.std_error > 0.0);
    }

    #[test]
    fn rescale_doubles_distances() {
        let base = spaces::lp_space(2, 2.0f64).unwrap();
        let sp = spaces::rescale(&base, 2.0, None).unwrap();
        let d = sp.distance(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![1.0, 0.0])).unwrap();
        assert_eq!(d, 2.0);
        let identity = spaces::rescale(&base, 1.0, None).unwrap();
        let d1 = identity
            .distance(&Point::vector(vec![0.0, 0.0]), &Point::vector(vec![1.0, 0.0]))
            .unwrap();
        assert_eq!(d1, 1.0);
    }

    #[test]
    fn rescaled_hyperbolic_mass_change_of_variables() {
        // mass of radius-1 ball in 10x-scaled hyperbolic = 100 * area(r = 0.1)
        let base = spaces::hyperbolic_space::<f64>();
        let sp = spaces::rescale(&base, 10.0, None).unwrap();
        let mut rng = RandomStream::new(1, 1);
        let m = sp.ball_mass(&Point::polar(0.0, 0.0), 1.0, 0, &mut rng).unwrap();
        let expected = 100.0 * 2.0 * std::f64::consts::PI * (0.1f64.cosh() - 1.0);
        assert!((m.value - expected).abs() < 1e-12);
    }

    #[test]
    fn subset_distance_equals_ambient() {
        let base = spaces::hyperbolic_space::<f64>();
        let sub = spaces::convex_ball_subset(&base, Point::polar(0.0, 0.0), 0.5).unwrap();
        let a = Point::polar(0.2, 0.0);
        let b = Point::polar(0.3, 2.0);
        let da = base.distance(&a, &b).unwrap();
        let ds = sub.distance(&a, &b).unwrap();
        assert_eq!(da, ds);
        // outside point rejected
        assert!(sub.distance(&a, &Point::polar(0.9, 0.0)).is_err());
    }

    #[test]
    fn subset_radius_beyond_cap_rejected() {
        let base = spaces::hyperbolic_space::<f64>();
        let err = spaces::convex_ball_subset(&base, Point::polar(0.0, 0.0), 1e6).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn ray_point_affine_extension() {
        let sp = spaces::lp_space(2, 2.0f64).unwrap();
        let a = Point::vector(vec![0.0, 0.0]);
        let b = Point::vector(vec![1.0, 0.0]);
        let e = sp.ray_point(&a, &b, 3.0).unwrap();
        assert_eq!(e.as_vector().unwrap(), &[3.0, 0.0]);
        let back = sp.ray_point(&a, &b, -2.0).unwrap();
        assert_eq!(back.as_vector().unwrap(), &[-2.0, 0.0]);
    }

    #[test]
    fn halfplane_ray_exits_domain() {
        let sp = spaces::euclidean_halfplane::<f64>().unwrap();
        let a = Point::vector(vec![1.0, 0.0]);
        let b = Point::vector(vec![0.5, 0.0]);
        let err = sp.ray_point(&a, &b, 2.0).unwrap_err();
        assert!(matches!(err, Error::DomainExceeded(_)));
    }

    #[test]
    fn generic_scalar_f32_smoke() {
        let sp = spaces::lp_space(2, 2.0f32).unwrap();
        let d = sp
            .distance(&Point::vector(vec![0.0f32, 0.0]), &Point::vector(vec![3.0f32, 4.0]))
            .unwrap();
        assert!((d - 5.0f32).abs() < 1e-5);
        let h = spaces::hyperbolic_space::<f32>();
        let dh = h.distance(&Point::polar(1.0f32, 0.0), &Point::polar(1.0f32, std::f32::consts::PI)).unwrap();
        assert!((dh - 2.0).abs() < 1e-4);
    }
}
