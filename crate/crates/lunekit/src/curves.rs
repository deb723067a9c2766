//! Curves of constant geodesic curvature λ > 0: classification, unit-speed
//! arc evaluation, the convex regions F_λ they bound, and the discrete
//! swerve (integral geodesic curvature) of polylines.
//!
//! All three kinds share one ambient closed form: a unit-speed curve of
//! geodesic curvature λ in the embedded model satisfies γ‴ + (λ²+κ)·γ′ = 0,
//! so arc evaluation needs no per-kind chart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    self, add, distance, generalized_trig, geodesic_point, log_dir, rotate90, scale, sub,
    Curvature, ModelPoint, TangentVector, V3,
};

/// Curvature band around λ = √−κ treated as a horocycle.
pub const HOROCYCLE_BAND: f64 = 1e-9;

/// Classification of a complete curve of constant geodesic curvature λ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Circle,
    Horocycle,
    Hypercycle,
}

/// Classifies the curve of geodesic curvature λ in M²(κ).
pub fn classify(kappa: Curvature, lambda: f64) -> Result<CurveKind> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if kappa.kappa() < -kernel::KAPPA_FLAT_EPS {
        let k = kappa.k();
        if (lambda - k).abs() < HOROCYCLE_BAND {
            Ok(CurveKind::Horocycle)
        } else if lambda > k {
            Ok(CurveKind::Circle)
        } else {
            Ok(CurveKind::Hypercycle)
        }
    } else {
        Ok(CurveKind::Circle)
    }
}

/// Geodesic radius of F_λ when it is a disk; `None` when F_λ is unbounded.
///
/// Solves cot_κ(r) = λ: r = 1/λ flat, atan(k/λ)/k sphere, atanh(k/λ)/k
/// hyperbolic circles.
pub fn f_lambda_radius(kappa: Curvature, lambda: f64) -> Result<Option<f64>> {
    match classify(kappa, lambda)? {
        CurveKind::Circle => {
            let r = if kappa.is_flat() {
                1.0 / lambda
            } else if kappa.kappa() > 0.0 {
                let k = kappa.k();
                (k / lambda).atan() / k
            } else {
                let k = kappa.k();
                (k / lambda).atanh() / k
            };
            Ok(Some(r))
        }
        _ => Ok(None),
    }
}

/// Circumference L_λ of ∂F_λ when compact, +∞ otherwise.
pub fn f_lambda_perimeter(kappa: Curvature, lambda: f64) -> Result<f64> {
    match f_lambda_radius(kappa, lambda)? {
        Some(r) => Ok(2.0 * std::f64::consts::PI * kappa.sn(r)),
        None => Ok(f64::INFINITY),
    }
}

/// Axis distance of the hypercycle of curvature λ (κ < 0, λ < √−κ):
/// tanh(k·d) = λ/k.
pub(crate) fn hypercycle_axis_distance(kappa: Curvature, lambda: f64) -> f64 {
    let k = kappa.k();
    (lambda / k).atanh() / k
}

// ---------------------------------------------------------------------------

/// A unit-speed arc of constant geodesic curvature λ.
///
/// The frame is (anchor, tangent, inward normal) at arclength 0; the curve
/// turns toward the inward normal. With the boundary convention (domain on
/// the left, counterclockwise) the inward normal is the tangent rotated +90°.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantCurvatureArc {
    kappa: Curvature,
    lambda: f64,
    kind: CurveKind,
    anchor: ModelPoint,
    tangent: V3,
    normal_in: V3,
    s_min: f64,
    s_max: f64,
}

impl ConstantCurvatureArc {
    /// Arc through `frame.base()` with unit tangent `frame.dir()`, curving
    /// toward the left (counterclockwise / domain-on-the-left convention).
    pub fn from_frame(frame: TangentVector, lambda: f64, s_min: f64, s_max: f64) -> Result<Self> {
        let kind = classify(frame.base().kappa(), lambda)?;
        if s_min > s_max {
            return Err(Error::ParamOutOfRange {
                name: "s_min",
                value: s_min,
                min: f64::NEG_INFINITY,
                max: s_max,
            });
        }
        let normal_in = rotate90(frame.base(), frame.dir());
        Ok(ConstantCurvatureArc {
            kappa: frame.base().kappa(),
            lambda,
            kind,
            anchor: *frame.base(),
            tangent: frame.dir(),
            normal_in,
            s_min,
            s_max,
        })
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn anchor(&self) -> &ModelPoint {
        &self.anchor
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn length(&self) -> f64 {
        self.s_max - self.s_min
    }

    pub(crate) fn with_range(&self, s_min: f64, s_max: f64) -> Self {
        let mut a = self.clone();
        a.s_min = s_min;
        a.s_max = s_max;
        a
    }

    /// Point at arclength s (requires s ∈ [s_min, s_max]).
    pub fn arc_point(&self, s: f64) -> Result<ModelPoint> {
        if s < self.s_min - 1e-12 || s > self.s_max + 1e-12 {
            return Err(Error::ParamOutOfRange {
                name: "s",
                value: s,
                min: self.s_min,
                max: self.s_max,
            });
        }
        Ok(self.point_unclamped(s))
    }

    /// Closed-form evaluation of γ‴ + (λ²+κ)γ′ = 0 with the stored frame;
    /// no range check.
    pub(crate) fn point_unclamped(&self, s: f64) -> ModelPoint {
        let a = self.anchor.coords();
        let t = self.tangent;
        let acc = sub(scale(self.normal_in, self.lambda), scale(a, self.kappa.kappa()));
        let w2 = self.lambda * self.lambda + self.kappa.kappa();
        let coords = if w2 > 1e-12 {
            let w = w2.sqrt();
            add(
                a,
                add(
                    scale(t, (w * s).sin() / w),
                    scale(acc, (1.0 - (w * s).cos()) / w2),
                ),
            )
        } else if w2 < -1e-12 {
            let mu = (-w2).sqrt();
            add(
                a,
                add(
                    scale(t, (mu * s).sinh() / mu),
                    scale(acc, ((mu * s).cosh() - 1.0) / (-w2)),
                ),
            )
        } else {
            add(a, add(scale(t, s), scale(acc, s * s / 2.0)))
        };
        ModelPoint::project(self.kappa, coords)
    }

    /// Unit tangent at arclength s.
    pub fn tangent_at(&self, s: f64) -> Result<TangentVector> {
        let a = self.anchor.coords();
        let t = self.tangent;
        let acc = sub(scale(self.normal_in, self.lambda), scale(a, self.kappa.kappa()));
        let w2 = self.lambda * self.lambda + self.kappa.kappa();
        let dir = if w2 > 1e-12 {
            let w = w2.sqrt();
            add(scale(t, (w * s).cos()), scale(acc, (w * s).sin() / w))
        } else if w2 < -1e-12 {
            let mu = (-w2).sqrt();
            add(scale(t, (mu * s).cosh()), scale(acc, (mu * s).sinh() / mu))
        } else {
            add(t, scale(acc, s))
        };
        TangentVector::new(self.point_unclamped(s), dir)
    }

    /// Uniform arclength sampling with step ≤ h over [s_min, s_max],
    /// including the start, excluding the end when `half_open`.
    pub fn sample(&self, h: f64, half_open: bool) -> Vec<ModelPoint> {
        let len = self.length();
        let n = ((len / h).ceil() as usize).max(2);
        let last = if half_open { n } else { n + 1 };
        (0..last)
            .map(|i| self.point_unclamped(self.s_min + len * i as f64 / n as f64))
            .collect()
    }
}

// ---------------------------------------------------------------------------

/// Locus data of a closed convex region bounded by a complete curve of
/// geodesic curvature λ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RegionLocus {
    /// Geodesic disk: center and radius.
    Circle { center: ModelPoint, radius: f64 },
    /// Horoball: future null direction ℓ and the boundary level b = −⟪x,ℓ⟫.
    Horocycle { null_dir: V3, level: f64 },
    /// Hypercycle region: unit spacelike pole w of the axis geodesic and the
    /// signed axis distance of the boundary (boundary on the +w side).
    Hypercycle { pole: V3, axis_offset: f64 },
}

/// The closed convex region F_λ bounded by a complete curve of constant
/// geodesic curvature λ; compact iff the curve is a circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FLambdaRegion {
    kappa: Curvature,
    lambda: f64,
    kind: CurveKind,
    locus: RegionLocus,
    anchor: ModelPoint,
}

/// Where a point sits relative to a region boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Constructs the F_λ whose boundary passes through `s` with the region on
/// the `inward` side (Blaschke supporting region at s).
pub fn f_lambda_supporting_at(
    s: &ModelPoint,
    inward: &TangentVector,
    lambda: f64,
) -> Result<FLambdaRegion> {
    s.kappa().same(inward.base().kappa())?;
    if !inward.base().approx_eq(s, 1e-9) {
        return Err(Error::NotNormalized);
    }
    let kappa = s.kappa();
    let kind = classify(kappa, lambda)?;
    let locus = match kind {
        CurveKind::Circle => {
            let radius = f_lambda_radius(kappa, lambda)?.expect("circle kind");
            let center = geodesic_point(inward, radius)?;
            RegionLocus::Circle { center, radius }
        }
        CurveKind::Horocycle => {
            let k = kappa.k();
            let null_dir = add(scale(s.coords(), k), inward.dir());
            let level = -kappa.form(s.coords(), null_dir);
            RegionLocus::Horocycle { null_dir, level }
        }
        CurveKind::Hypercycle => {
            let d = hypercycle_axis_distance(kappa, lambda);
            // gamma(t) = cs(t) s + sn(t) inward; pole = -gamma'(d)
            let (sn, cs) = generalized_trig(kappa, d);
            let gp = add(
                scale(s.coords(), -kappa.kappa() * sn),
                scale(inward.dir(), cs),
            );
            RegionLocus::Hypercycle {
                pole: scale(gp, -1.0),
                axis_offset: d,
            }
        }
    };
    Ok(FLambdaRegion {
        kappa,
        lambda,
        kind,
        locus,
        anchor: *s,
    })
}

impl FLambdaRegion {
    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn locus(&self) -> &RegionLocus {
        &self.locus
    }

    /// The support point the region was constructed at (a boundary point).
    pub fn anchor(&self) -> &ModelPoint {
        &self.anchor
    }

    /// Signed distance-like gauge to the boundary, positive inside.
    ///
    /// Exact geodesic distance for circles and horocycles; for hypercycles it
    /// is the axis-distance gap, which is zero exactly on the boundary and
    /// correct to first order near it.
    pub fn signed_inside_distance(&self, p: &ModelPoint) -> Result<f64> {
        self.kappa.same(p.kappa())?;
        match &self.locus {
            RegionLocus::Circle { center, radius } => Ok(radius - distance(center, p)?),
            RegionLocus::Horocycle { null_dir, level } => {
                let b = -self.kappa.form(p.coords(), *null_dir);
                Ok((level / b).ln() / self.kappa.k())
            }
            RegionLocus::Hypercycle { pole, axis_offset } => {
                let r = self.kappa.model_radius();
                let sx = r * (self.kappa.form(p.coords(), *pole) / r).asinh();
                Ok(axis_offset - sx)
            }
        }
    }

    /// Classifies `p` against the boundary with tolerance band `tol`.
    pub fn region_contains(&self, p: &ModelPoint, tol: f64) -> Result<Containment> {
        let d = self.signed_inside_distance(p)?;
        Ok(if d > tol {
            Containment::Inside
        } else if d < -tol {
            Containment::Outside
        } else {
            Containment::Boundary
        })
    }

    /// Unit inward normal (into the region) at a boundary point `x`.
    pub fn inward_normal_at(&self, x: &ModelPoint) -> Result<TangentVector> {
        match &self.locus {
            RegionLocus::Circle { center, .. } => {
                TangentVector::new_unit(*x, log_dir(x, center)?)
            }
            RegionLocus::Horocycle { null_dir, .. } => {
                // tangential part of the null direction points at the ideal point
                let c = self.kappa.kappa() * self.kappa.form(*null_dir, x.coords());
                let v = sub(*null_dir, scale(x.coords(), c));
                TangentVector::new(*x, v)
            }
            RegionLocus::Hypercycle { pole, .. } => {
                let c = self.kappa.kappa() * self.kappa.form(*pole, x.coords());
                let v = sub(*pole, scale(x.coords(), c));
                // toward the axis: against the pole side
                TangentVector::new(*x, scale(v, -1.0))
            }
        }
    }

    /// Boundary arc anchored at `x` (must lie on the boundary), oriented
    /// counterclockwise (region on the left), parameter range [s_min, s_max].
    pub fn boundary_arc_at(&self, x: &ModelPoint, s_min: f64, s_max: f64) -> Result<ConstantCurvatureArc> {
        let n = self.inward_normal_at(x)?;
        // inward = tangent rotated +90  =>  tangent = inward rotated -90
        let tangent = scale(rotate90(x, n.dir()), -1.0);
        ConstantCurvatureArc::from_frame(TangentVector::new_unit(*x, tangent)?, self.lambda, s_min, s_max)
    }
}

// ---------------------------------------------------------------------------
// swerve

/// Which side of the polyline the domain lies on; turning toward that side
/// counts positive. `Left` matches the counterclockwise boundary convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwerveSide {
    #[default]
    Left,
    Right,
}

fn check_polyline(points: &[ModelPoint], min_len: usize) -> Result<()> {
    if points.len() < min_len {
        return Err(Error::TooFewPoints {
            needed: min_len,
            got: points.len(),
        });
    }
    let kappa = points[0].kappa();
    for (i, w) in points.windows(2).enumerate() {
        kappa.same(w[1].kappa())?;
        if w[0].approx_eq(&w[1], 1e-14) {
            return Err(Error::RepeatedPoint(i + 1));
        }
    }
    Ok(())
}

/// Signed turn at `at` coming from `prev` and continuing to `next`,
/// positive when turning toward `side`.
pub(crate) fn turn_at(
    prev: &ModelPoint,
    at: &ModelPoint,
    next: &ModelPoint,
    side: SwerveSide,
) -> Result<f64> {
    let incoming = scale(log_dir(at, prev)?, -1.0);
    let outgoing = log_dir(at, next)?;
    let t = kernel::signed_angle(at, incoming, outgoing);
    Ok(match side {
        SwerveSide::Left => t,
        SwerveSide::Right => -t,
    })
}

/// Swerve of an open polyline: Σ (π − α_i) over interior vertices only
/// (the endpoint turns need an ambient curve and are excluded).
pub fn swerve_open(points: &[ModelPoint], side: SwerveSide) -> Result<f64> {
    check_polyline(points, 3)?;
    let mut total = 0.0;
    for i in 1..points.len() - 1 {
        total += turn_at(&points[i - 1], &points[i], &points[i + 1], side)?;
    }
    Ok(total)
}

/// Swerve of a closed polyline ring (no repeated closing vertex): all
/// vertices count, wrapping around.
pub fn swerve_closed(points: &[ModelPoint], side: SwerveSide) -> Result<f64> {
    check_polyline(points, 3)?;
    let n = points.len();
    if points[0].approx_eq(&points[n - 1], 1e-14) {
        return Err(Error::RepeatedPoint(n - 1));
    }
    let mut total = 0.0;
    for i in 0..n {
        total += turn_at(
            &points[(i + n - 1) % n],
            &points[i],
            &points[(i + 1) % n],
            side,
        )?;
    }
    Ok(total)
}

/// Per-vertex signed turns of a closed ring (same convention as
/// `swerve_closed`); used by the sliding-window λ-convexity check.
pub(crate) fn turn_angles_closed(points: &[ModelPoint], side: SwerveSide) -> Result<Vec<f64>> {
    check_polyline(points, 3)?;
    let n = points.len();
    (0..n)
        .map(|i| {
            turn_at(
                &points[(i + n - 1) % n],
                &points[i],
                &points[(i + 1) % n],
                side,
            )
        })
        .collect()
}
