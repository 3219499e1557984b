//! Audits of the contraction inequalities: convexity `d(x_t, y_t) <= t d(x, y)`,
//! the reverse concavity, their two-sided (cone-type) combination, Lipschitz
//! bounds of the contraction map, geodesic uniqueness and extendability
//! probes, the parallel-ray limit construction, and the subdivision chain
//! used to globalize local concavity.

use crate::audit::{max_violation_audit, violation_scale, AuditReport, SampleRegion, TrialOutcome, Verdict, Witness};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::rng::RandomStream;
use crate::scalar::Scalar;
use crate::space::Space;

const BATCHES: usize = 8;

fn sample_one<S: Scalar>(space: &Space<S>, region: &SampleRegion<S>, rng: &mut RandomStream) -> Option<Point<S>> {
    space
        .sample_ball(&region.center, region.radius, 1, rng)
        .ok()
        .and_then(|mut v| v.pop())
}

fn check_region<S: Scalar>(space: &Space<S>, region: &SampleRegion<S>) -> Result<()> {
    let mut probe = RandomStream::new(0, u64::MAX);
    space.sample_ball(&region.center, region.radius, 1, &mut probe)?;
    Ok(())
}

/// Convexity of the metric under contraction: samples triples (p, x, y) and
/// t, and flags `d(x_t, y_t) > t d(x, y)` beyond the relative tolerance.
pub fn busemann_convexity_audit<S: Scalar>(
    space: &Space<S>,
    region: &SampleRegion<S>,
    trials: usize,
    tol: S,
    rng: &RandomStream,
) -> Result<AuditReport<S>> {
    check_region(space, region)?;
    Ok(max_violation_audit("busemann-convexity", trials, tol, rng, BATCHES, |stream| {
        let p = sample_one(space, region, stream)?;
        let x = sample_one(space, region, stream)?;
        let y = sample_one(space, region, stream)?;
        let t = stream.open_range(S::zero(), S::one());
        contraction_violation(space, &p, &x, &y, t, Side::Convexity)
    }))
}

/// Concavity `d(x_t, y_t) >= t d(x, y)` with a fixed contraction center.
pub fn concavity_audit<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    region: &SampleRegion<S>,
    trials: usize,
    tol: S,
    rng: &RandomStream,
) -> Result<AuditReport<S>> {
    space.validate_point(p)?;
    check_region(space, region)?;
    Ok(max_violation_audit("busemann-concavity", trials, tol, rng, BATCHES, |stream| {
        let x = sample_one(space, region, stream)?;
        let y = sample_one(space, region, stream)?;
        let t = stream.open_range(S::zero(), S::one());
        contraction_violation(space, p, &x, &y, t, Side::Concavity)
    }))
}

/// Two-sided equality `d(x_t, y_t) = t d(x, y)` with a fixed center.
pub fn cone_type_audit<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    region: &SampleRegion<S>,
    trials: usize,
    tol: S,
    rng: &RandomStream,
) -> Result<AuditReport<S>> {
    space.validate_point(p)?;
    check_region(space, region)?;
    Ok(max_violation_audit("cone-type", trials, tol, rng, BATCHES, |stream| {
        let x = sample_one(space, region, stream)?;
        let y = sample_one(space, region, stream)?;
        let t = stream.open_range(S::zero(), S::one());
        contraction_violation(space, p, &x, &y, t, Side::TwoSided)
    }))
}

enum Side {
    Convexity,
    Concavity,
    TwoSided,
}

fn contraction_violation<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    x: &Point<S>,
    y: &Point<S>,
    t: S,
    side: Side,
) -> Option<TrialOutcome<S>> {
    let dxy = space.distance(x, y).ok()?;
    let dpx = space.distance(p, x).ok()?;
    let dpy = space.distance(p, y).ok()?;
    let ambient = dpx + dpy;
    if dxy + ambient < S::of(1e-13) * (S::one() + ambient) {
        return None; // degenerate triple, resample
    }
    let xt = space.intermediate(p, x, t).ok()?;
    let yt = space.intermediate(p, y, t).ok()?;
    let dtt = space.distance(&xt, &yt).ok()?;
    let raw = match side {
        Side::Convexity => dtt - t * dxy,
        Side::Concavity => t * dxy - dtt,
        Side::TwoSided => (dtt - t * dxy).abs(),
    };
    let violation = raw / violation_scale(t * dxy, ambient);
    Some(TrialOutcome {
        violation,
        witness: Witness {
            points: vec![p.clone(), x.clone(), y.clone()],
            t: Some(t),
            raw,
            violation,
        },
    })
}

/// Re-evaluate a contraction witness (used to confirm reported violations).
pub fn reevaluate_cone_witness<S: Scalar>(space: &Space<S>, witness: &Witness<S>) -> Result<S> {
    let [p, x, y] = match witness.points.as_slice() {
        [p, x, y] => [p, x, y],
        _ => return Err(Error::InvalidParams("witness must carry (p, x, y)".into())),
    };
    let t = witness.t.ok_or_else(|| Error::InvalidParams("witness is missing t".into()))?;
    let dxy = space.distance(x, y)?;
    let xt = space.intermediate(p, x, t)?;
    let yt = space.intermediate(p, y, t)?;
    let dtt = space.distance(&xt, &yt)?;
    let ambient = space.distance(p, x)? + space.distance(p, y)?;
    Ok((dtt - t * dxy).abs() / violation_scale(t * dxy, ambient))
}

/// Result of the Lipschitz estimate for the contraction map.
#[derive(Debug, Clone)]
pub struct LipschitzEstimate<S> {
    pub report: AuditReport<S>,
    pub t: S,
    /// Largest observed `d(Phi_t x, Phi_t y) / d(x, y)`.
    pub sup_ratio: S,
}

/// Estimates `sup d(Phi_t x, Phi_t y)/d(x, y)`; passes iff it stays below
/// `t (1 + tol)`.
pub fn contraction_lipschitz_audit<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    t: S,
    region: &SampleRegion<S>,
    trials: usize,
    tol: S,
    rng: &RandomStream,
) -> Result<LipschitzEstimate<S>> {
    space.validate_point(p)?;
    check_region(space, region)?;
    if !(t > S::zero() && t <= S::one()) {
        return Err(Error::InvalidParams(format!("t must lie in (0, 1], got {t}")));
    }
    let report = max_violation_audit("contraction-lipschitz", trials, tol, rng, BATCHES, |stream| {
        let x = sample_one(space, region, stream)?;
        let y = sample_one(space, region, stream)?;
        let dxy = space.distance(&x, &y).ok()?;
        if dxy < S::of(1e-12) * (S::one() + region.radius) {
            return None;
        }
        let xt = space.intermediate(p, &x, t).ok()?;
        let yt = space.intermediate(p, &y, t).ok()?;
        let ratio = space.distance(&xt, &yt).ok()? / dxy;
        let violation = (ratio - t) / t;
        Some(TrialOutcome {
            violation,
            witness: Witness { points: vec![p.clone(), x, y], t: Some(t), raw: ratio, violation },
        })
    });
    let sup_ratio = t * (S::one() + report.worst_violation);
    Ok(LipschitzEstimate { report, t, sup_ratio })
}

/// Verdict of the midpoint-uniqueness probe.
#[derive(Debug, Clone)]
pub enum MidpointVerdict<S> {
    /// All resolved midpoints agree within resolution.
    Unique { midpoint: Point<S>, spread: S },
    /// Two midpoints separated by more than ten tolerances.
    Multiple { witnesses: (Point<S>, Point<S>), separation: S },
}

/// Searches the midpoint set `{ z : |d(x,z) - d/2| + |d(z,y) - d/2| <= tol }`
/// with a farthest-point net of `grid` candidates refined by a metric-only
/// stochastic descent, and reports whether the resolved midpoints split.
///
/// The probe is deterministic: it draws from a fixed internal stream.
pub fn uniqueness_probe<S: Scalar>(
    space: &Space<S>,
    x: &Point<S>,
    y: &Point<S>,
    grid: usize,
    tol: S,
) -> Result<MidpointVerdict<S>> {
    let d = space.distance(x, y)?;
    if d <= S::zero() {
        return Err(Error::InvalidParams("uniqueness probe needs distinct endpoints".into()));
    }
    if grid < 32 {
        return Err(Error::Inconclusive("candidate grid too coarse (need at least 32)".into()));
    }
    let mut rng = RandomStream::new(0x4d49_4450, 0);
    let center = space.intermediate(x, y, S::half())?;
    let radius = S::of(0.8) * d;
    let defect = |z: &Point<S>| -> Option<S> {
        let a = space.distance(x, z).ok()?;
        let b = space.distance(z, y).ok()?;
        Some((a - d * S::half()).abs() + (b - d * S::half()).abs())
    };

    // candidate pool, then keep a diverse set of low-defect representatives
    let pool = space.sample_ball(&center, radius, 8 * grid, &mut rng)?;
    let mut scored: Vec<(S, &Point<S>)> = pool.iter().filter_map(|z| defect(z).map(|f| (f, z))).collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(grid);
    if scored.is_empty() {
        return Err(Error::Inconclusive("no candidates could be scored".into()));
    }
    // farthest-point selection of up to 16 representatives
    let mut reps: Vec<Point<S>> = vec![scored[0].1.clone()];
    while reps.len() < 16 && reps.len() < scored.len() {
        let mut best: Option<(S, &Point<S>)> = None;
        for (_, cand) in &scored {
            let dist = reps
                .iter()
                .map(|r| space.distance(cand, r).unwrap_or(S::zero()))
                .fold(S::infinity(), S::min);
            if best.as_ref().map_or(true, |(b, _)| dist > *b) {
                best = Some((dist, cand));
            }
        }
        match best {
            Some((sep, cand)) if sep > S::of(1e-12) * d => reps.push((*cand).clone()),
            _ => break,
        }
    }

    // metric-only stochastic descent on the defect
    let mut resolved: Vec<(S, Point<S>)> = Vec::new();
    for rep in reps {
        let mut z = rep;
        let mut f = match defect(&z) {
            Some(f) => f,
            None => continue,
        };
        let mut rho = radius / S::of(8.0);
        let floor = tol / S::of(20.0);
        while rho > floor {
            let proposals = match space.sample_ball(&z, rho, 12, &mut rng) {
                Ok(p) => p,
                Err(_) => {
                    rho = rho * S::half();
                    continue;
                }
            };
            let mut improved = false;
            for cand in proposals {
                if let Some(fc) = defect(&cand) {
                    if fc < f {
                        f = fc;
                        z = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                rho = rho * S::half();
            }
        }
        if f <= tol {
            resolved.push((f, z));
        }
    }

    if resolved.is_empty() {
        return Err(Error::Inconclusive(format!(
            "descent did not resolve any midpoint at tolerance {tol}"
        )));
    }

    let mut worst_sep = S::zero();
    let mut pair = (0usize, 0usize);
    for i in 0..resolved.len() {
        for j in (i + 1)..resolved.len() {
            let sep = space.distance(&resolved[i].1, &resolved[j].1)?;
            if sep > worst_sep {
                worst_sep = sep;
                pair = (i, j);
            }
        }
    }
    if worst_sep > S::of(10.0) * tol {
        Ok(MidpointVerdict::Multiple {
            witnesses: (resolved[pair.0].1.clone(), resolved[pair.1].1.clone()),
            separation: worst_sep,
        })
    } else {
        resolved.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        Ok(MidpointVerdict::Unique { midpoint: resolved[0].1.clone(), spread: worst_sep })
    }
}

/// One (r, t) cell of the extendability audit.
#[derive(Debug, Clone)]
pub struct ExtendabilityCase<S> {
    pub r: S,
    pub t: S,
    /// Largest distance from a probe to the sampled contraction image.
    pub worst_miss: S,
    /// The density bound `delta * t * r`.
    pub allowed: S,
    /// Sampling slack: twice the estimated covering radius of the image sample.
    pub sampling_slack: S,
    pub witness: Option<Point<S>>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ExtendabilityReport<S> {
    pub delta: S,
    pub cases: Vec<ExtendabilityCase<S>>,
    pub verdict: Verdict,
}

/// Checks that the image of `Phi_t : B(p, r) -> B(p, t r)` is
/// `(delta t r)`-dense in `B(p, t r)`, up to the sampling slack reported
/// separately (probes must come within `delta t r + 2 cov` of the image,
/// where `cov` estimates the covering radius of the finite image sample).
pub fn almost_extendability_audit<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    delta: S,
    radii: &[S],
    t_grid: &[S],
    probes: usize,
    rng: &RandomStream,
) -> Result<ExtendabilityReport<S>> {
    space.validate_point(p)?;
    if delta < S::zero() {
        return Err(Error::InvalidParams("delta must be non-negative".into()));
    }
    let image_count = (4 * probes).max(2048);
    let mut cases = Vec::new();
    let mut stream_idx = 0u64;
    for &r in radii {
        for &t in t_grid {
            if !(t > S::zero() && t < S::one()) {
                return Err(Error::InvalidParams(format!("t grid must lie in (0,1), got {t}")));
            }
            let mut rng_x = rng.substream(stream_idx);
            let mut rng_q = rng.substream(stream_idx + 1);
            stream_idx += 2;

            let xs = space.sample_ball(p, r, image_count, &mut rng_x)?;
            let image = space.contract_set(p, t, &xs)?;
            let qs = space.sample_ball(p, t * r, probes, &mut rng_q)?;

            // covering-radius estimate from nearest-neighbor statistics
            let sub = image.len().min(256);
            let mut cov = S::zero();
            for i in 0..sub {
                let zi = &image[i * image.len() / sub];
                let mut nn = S::infinity();
                for (j, zj) in image.iter().enumerate() {
                    if j != i * image.len() / sub {
                        let dij = space.distance(zi, zj)?;
                        if dij < nn {
                            nn = dij;
                        }
                    }
                }
                if nn.is_finite() && nn > cov {
                    cov = nn;
                }
            }

            let mut worst_miss = S::zero();
            let mut witness = None;
            for q in &qs {
                let mut miss = S::infinity();
                for z in &image {
                    let dzq = space.distance(z, q)?;
                    if dzq < miss {
                        miss = dzq;
                    }
                }
                if miss > worst_miss {
                    worst_miss = miss;
                    witness = Some(q.clone());
                }
            }

            let allowed = delta * t * r;
            let slack = S::two() * cov;
            let pass = worst_miss <= allowed + slack;
            cases.push(ExtendabilityCase {
                r,
                t,
                worst_miss,
                allowed,
                sampling_slack: slack,
                witness,
                pass,
            });
        }
    }
    let verdict = if cases.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail };
    Ok(ExtendabilityReport { delta, cases, verdict })
}

/// A sampled ray: origin, direction anchor, and evaluated grid points.
#[derive(Debug, Clone)]
pub struct RaySample<S> {
    pub origin: Point<S>,
    pub anchor: Point<S>,
    pub grid: Vec<(S, Point<S>)>,
}

impl<S: Scalar> RaySample<S> {
    /// Builds the ray from `origin` through `anchor`, evaluated at `params`,
    /// and verifies the isometric-embedding invariant on the grid.
    pub fn new(space: &Space<S>, origin: Point<S>, anchor: Point<S>, params: &[S]) -> Result<Self> {
        let mut grid = Vec::with_capacity(params.len());
        for &s in params {
            if s < S::zero() {
                return Err(Error::InvalidParams("ray parameters must be non-negative".into()));
            }
            grid.push((s, space.ray_point(&origin, &anchor, s)?));
        }
        let ray = Self { origin, anchor, grid };
        ray.check_isometric(space, S::of(1e-10))?;
        Ok(ray)
    }

    pub fn at(&self, space: &Space<S>, s: S) -> Result<Point<S>> {
        space.ray_point(&self.origin, &self.anchor, s)
    }

    /// `d(gamma(s), gamma(t)) = |s - t|` within `tol` over the grid.
    pub fn check_isometric(&self, space: &Space<S>, tol: S) -> Result<()> {
        for (i, (si, pi)) in self.grid.iter().enumerate() {
            for (sj, pj) in self.grid.iter().skip(i + 1) {
                let d = space.distance(pi, pj)?;
                let expect = (*si - *sj).abs();
                if (d - expect).abs() > tol * (S::one() + expect) {
                    return Err(Error::InvalidParams(format!(
                        "ray grid is not isometric: |{si} - {sj}| vs distance {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Diagnostics of the parallel-ray limit construction.
#[derive(Debug, Clone)]
pub struct ParallelRay<S> {
    pub ray: RaySample<S>,
    /// Horizon at which the Cauchy criterion was met.
    pub converged_at: S,
    /// Successive-horizon gaps per grid parameter (last pair).
    pub cauchy_gaps: Vec<S>,
    /// `(t, d(gamma(t), eta(t)))` per grid parameter.
    pub transport_gaps: Vec<(S, S)>,
    /// Reference distance d(x, y).
    pub base_distance: S,
}

/// Builds a ray from `y` that runs parallel to `gamma` (a ray from `x`):
/// `eta_i(t)` is the point at arclength `t` on the path from `y` to
/// `gamma(T 2^i)`, and the construction accepts once successive horizons
/// agree within `1e-6 (1 + t)` on the whole grid.
pub fn parallel_ray_construct<S: Scalar>(
    space: &Space<S>,
    x: &Point<S>,
    y: &Point<S>,
    gamma: &RaySample<S>,
    horizon: S,
) -> Result<ParallelRay<S>> {
    space.validate_point(x)?;
    space.validate_point(y)?;
    if !(horizon > S::zero()) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let params: Vec<S> = gamma.grid.iter().map(|(s, _)| *s).collect();
    if params.is_empty() {
        return Err(Error::InvalidParams("gamma carries an empty grid".into()));
    }
    let dxy = space.distance(x, y)?;

    let eval = |target: &Point<S>| -> Result<Vec<Point<S>>> {
        params.iter().map(|&t| space.ray_point(y, target, t)).collect()
    };

    let mut prev: Option<(Vec<Point<S>>, Point<S>)> = None;
    for i in 0..=6u32 {
        let ti = horizon * S::of(2f64.powi(i as i32));
        let q = match gamma.at(space, ti) {
            Ok(q) => q,
            Err(e) => {
                return Err(Error::NoConvergence(format!(
                    "gamma is not defined at horizon {ti}: {e}"
                )))
            }
        };
        let eta = eval(&q)?;
        if let Some((eta_prev, _)) = &prev {
            let mut gaps = Vec::with_capacity(params.len());
            let mut ok = true;
            for (k, &t) in params.iter().enumerate() {
                let gap = space.distance(&eta_prev[k], &eta[k])?;
                if gap > S::of(1e-6) * (S::one() + t) {
                    ok = false;
                }
                gaps.push(gap);
            }
            if ok {
                let mut transport = Vec::with_capacity(params.len());
                for (k, &t) in params.iter().enumerate() {
                    let g = gamma.at(space, t)?;
                    transport.push((t, space.distance(&g, &eta[k])?));
                }
                let grid: Vec<(S, Point<S>)> = params.iter().copied().zip(eta).collect();
                let ray = RaySample { origin: y.clone(), anchor: q, grid };
                ray.check_isometric(space, S::of(1e-8))?;
                return Ok(ParallelRay {
                    ray,
                    converged_at: ti,
                    cauchy_gaps: gaps,
                    transport_gaps: transport,
                    base_distance: dxy,
                });
            }
        }
        prev = Some((eta, q));
    }
    Err(Error::NoConvergence(
        "successive horizons never met the Cauchy criterion".into(),
    ))
}

/// One link of the globalization chain.
#[derive(Debug, Clone)]
pub struct ChainLink<S> {
    pub d_contracted: S,
    pub d_extended: S,
    /// `d(z_i, z_{i+1}) - t d(w_i, w_{i+1})`: negative values violate the
    /// per-link concavity.
    pub slack: S,
}

#[derive(Debug, Clone)]
pub struct ChainCheck<S> {
    pub links: Vec<ChainLink<S>>,
    /// Worst scale-relative per-link violation.
    pub worst_violation: S,
    /// `d(x_t, y_t)` vs `t d(x, y)` for the whole chain.
    pub contracted_total: S,
    pub target_total: S,
    pub verdict: Verdict,
}

/// Verifies the subdivision argument behind globalized concavity: split the
/// geodesic from `x_t` to `y_t` into `m` links `z_i`, extend each `p -> z_i`
/// to `w_i` at arclength `d(p, z_i)/t`, and check every link inequality
/// `d(z_i, z_{i+1}) >= t d(w_i, w_{i+1})`.
pub fn globalization_chain_check<S: Scalar>(
    space: &Space<S>,
    p: &Point<S>,
    x: &Point<S>,
    y: &Point<S>,
    t: S,
    subdivisions: usize,
    tol: S,
) -> Result<ChainCheck<S>> {
    if subdivisions < 2 {
        return Err(Error::InvalidParams("need at least 2 subdivisions".into()));
    }
    if !(t > S::zero() && t < S::one()) {
        return Err(Error::InvalidParams(format!("t must lie in (0,1), got {t}")));
    }
    let xt = space.intermediate(p, x, t)?;
    let yt = space.intermediate(p, y, t)?;
    let m = subdivisions;
    let mut zs = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let u = S::of(i as f64 / m as f64);
        zs.push(space.intermediate(&xt, &yt, u)?);
    }
    let mut ws = Vec::with_capacity(m + 1);
    for z in &zs {
        let dpz = space.distance(p, z)?;
        if dpz == S::zero() {
            ws.push(p.clone());
        } else {
            ws.push(space.ray_point(p, z, dpz / t)?);
        }
    }
    let mut links = Vec::with_capacity(m);
    let mut worst = S::neg_infinity();
    for i in 0..m {
        let dz = space.distance(&zs[i], &zs[i + 1])?;
        let dw = space.distance(&ws[i], &ws[i + 1])?;
        let slack = dz - t * dw;
        let scale = violation_scale(t * dw, space.distance(p, &zs[i])? + space.distance(p, &zs[i + 1])?);
        let violation = -slack / scale;
        if violation > worst {
            worst = violation;
        }
        links.push(ChainLink { d_contracted: dz, d_extended: dw, slack });
    }
    let contracted_total = space.distance(&xt, &yt)?;
    let target_total = t * space.distance(x, y)?;
    Ok(ChainCheck {
        links,
        worst_violation: worst,
        contracted_total,
        target_total,
        verdict: if worst <= tol { Verdict::Pass } else { Verdict::Fail },
    })
}
