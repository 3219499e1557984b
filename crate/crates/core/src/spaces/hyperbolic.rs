//! The hyperbolic plane of curvature -1.
//!
//! Points are stored in polar coordinates (r, theta) around the base point.
//! Distances use the law-of-cosines identity rewritten without cancellation:
//!
//!   cosh d - 1 = 2 sinh^2((r1 - r2)/2) + 2 sinh(r1) sinh(r2) sin^2(dtheta/2)
//!
//! which is exact near coincident points and safe for radii up to ~300.
//! Geodesic interpolation runs through the hyperboloid model, so theta
//! wraparound never enters the arithmetic.

use crate::numeric::acosh1p;
use crate::scalar::Scalar;

/// Largest radius the formulas accept before sinh/cosh magnitudes get close
/// to the f64 overflow edge (in products).
pub const MAX_RADIUS: f64 = 300.0;

pub fn distance<S: Scalar>(r1: S, t1: S, r2: S, t2: S) -> S {
    let dr = (r1 - r2) * S::half();
    let sh = dr.sinh();
    let half_angle = (t1 - t2) * S::half();
    let sa = half_angle.sin();
    let u = S::two() * sh * sh + S::two() * r1.sinh() * r2.sinh() * sa * sa;
    S::of(acosh1p(u.as_f64()))
}

/// Hyperboloid coordinates (x0, x1, x2) with x0^2 - x1^2 - x2^2 = 1.
pub fn to_hyperboloid<S: Scalar>(r: S, theta: S) -> [S; 3] {
    let sh = r.sinh();
    [r.cosh(), sh * theta.cos(), sh * theta.sin()]
}

pub fn from_hyperboloid<S: Scalar>(x: [S; 3]) -> (S, S) {
    // asinh of the spatial norm is stable near the apex; hypot avoids overflow
    let h = x[1].hypot(x[2]);
    let r = h.asinh();
    let theta = if h == S::zero() { S::zero() } else { x[2].atan2(x[1]) };
    (r, theta)
}

/// Point at arclength `s` on the unit-speed geodesic from `a` through `b`
/// (polar inputs). `s` may be negative (extension behind `a`) or exceed
/// d(a, b) (extension beyond `b`).
pub fn geodesic_point<S: Scalar>(a: (S, S), b: (S, S), s: S) -> (S, S) {
    let d = distance(a.0, a.1, b.0, b.1);
    if d < S::of(1e-300) {
        return a;
    }
    let xa = to_hyperboloid(a.0, a.1);
    let xb = to_hyperboloid(b.0, b.1);
    // unit tangent at a toward b: (xb - cosh(d) xa) / sinh(d)
    let cd = d.cosh();
    let sd = d.sinh();
    let mut v = [S::zero(); 3];
    for i in 0..3 {
        v[i] = (xb[i] - cd * xa[i]) / sd;
    }
    let cs = s.cosh();
    let ss = s.sinh();
    let mut out = [S::zero(); 3];
    for i in 0..3 {
        out[i] = cs * xa[i] + ss * v[i];
    }
    from_hyperboloid(out)
}

/// Isometry sending the origin to `c` (a boost along the direction of `c`),
/// applied to the polar point `p`.
pub fn translate_from_origin<S: Scalar>(c: (S, S), p: (S, S)) -> (S, S) {
    let (rc, tc) = c;
    if rc == S::zero() {
        return p;
    }
    // rotate so the boost axis is x1, boost by rapidity rc, rotate back
    let (r, t) = p;
    let x = to_hyperboloid(r, t - tc);
    let ch = rc.cosh();
    let sh = rc.sinh();
    let boosted = [ch * x[0] + sh * x[1], sh * x[0] + ch * x[1], x[2]];
    let (r2, t2) = from_hyperboloid(boosted);
    (r2, t2 + tc)
}

/// Area of a disk of radius `r` (any center): `2 pi (cosh r - 1)`.
pub fn disk_area<S: Scalar>(r: S) -> S {
    S::two() * S::PI() * (r.cosh() - S::one())
}

/// Inverse of the radial area CDF on a disk of radius `rmax`:
/// returns `s` with `(cosh s - 1)/(cosh rmax - 1) = u`.
pub fn radial_quantile<S: Scalar>(rmax: S, u: S) -> S {
    let m = rmax.cosh() - S::one();
    S::of(acosh1p((u * m).as_f64()))
}
