//! Exact-formula primitives for the three model planes M²(κ).
//!
//! Points live in embedding coordinates: the round sphere of radius 1/√κ in
//! Euclidean 3-space for κ > 0, the plane z = 0 for κ = 0, and the upper
//! hyperboloid sheet ⟪x,x⟫ = 1/κ in Minkowski 3-space (signature +,+,−) for
//! κ < 0. Distances, geodesics and reflections are inner-product formulas,
//! so there are no chart singularities to work around.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this |κ| the flat formulas are used to avoid cancellation.
pub const KAPPA_FLAT_EPS: f64 = 1e-12;

/// Default absolute tolerance for kernel operations.
pub const KERNEL_TOL: f64 = 1e-10;

/// Antipodal guard band on the sphere.
const ANTIPODAL_EPS: f64 = 1e-9;

// ---------------------------------------------------------------------------
// small 3-vector helpers (plain arrays keep the serialized formats trivial)

pub(crate) type V3 = [f64; 3];

pub(crate) fn add(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: V3, c: f64) -> V3 {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub(crate) fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

// ---------------------------------------------------------------------------

/// Sectional curvature κ of a model plane, in 1/length².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature(f64);

impl Curvature {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidCurvature(kappa));
        }
        Ok(Curvature(kappa))
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    /// True when |κ| is below the flat cutover band.
    pub fn is_flat(self) -> bool {
        self.0.abs() < KAPPA_FLAT_EPS
    }

    /// k = √|κ|.
    pub fn k(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Model radius 1/√|κ| (curved case only).
    pub fn model_radius(self) -> f64 {
        1.0 / self.k()
    }

    /// κ-indexed sine: the solution of sn″ + κ·sn = 0 with sn(0)=0, sn′(0)=1.
    pub fn sn(self, t: f64) -> f64 {
        if self.is_flat() {
            t
        } else if self.0 > 0.0 {
            let k = self.k();
            (k * t).sin() / k
        } else {
            let k = self.k();
            (k * t).sinh() / k
        }
    }

    /// κ-indexed cosine, cs = sn′.
    pub fn cs(self, t: f64) -> f64 {
        if self.is_flat() {
            1.0
        } else if self.0 > 0.0 {
            (self.k() * t).cos()
        } else {
            (self.k() * t).cosh()
        }
    }

    /// Geodesic curvature of the distance-r circle: cs(r)/sn(r).
    pub fn cot(self, r: f64) -> f64 {
        self.cs(r) / self.sn(r)
    }

    /// Ambient bilinear form: Euclidean for κ ≥ 0, Minkowski diag(+,+,−) for κ < 0.
    pub fn form(self, a: V3, b: V3) -> f64 {
        let s = a[0] * b[0] + a[1] * b[1];
        if self.0 < -KAPPA_FLAT_EPS {
            s - a[2] * b[2]
        } else {
            s + a[2] * b[2]
        }
    }

    pub(crate) fn same(self, other: Curvature) -> Result<()> {
        if self.0 == other.0 {
            Ok(())
        } else {
            Err(Error::CurvatureMismatch(self.0, other.0))
        }
    }
}

/// κ-indexed sine/cosine pair (sn, cs) at arclength t.
pub fn generalized_trig(kappa: Curvature, t: f64) -> (f64, f64) {
    (kappa.sn(t), kappa.cs(t))
}

// ---------------------------------------------------------------------------

/// A point of M²(κ) in embedding coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    kappa: Curvature,
    coords: V3,
}

impl ModelPoint {
    /// Base point of the model: (0,0,1/√|κ|) on the quadrics, (0,0,0) flat.
    pub fn origin(kappa: Curvature) -> Self {
        let coords = if kappa.is_flat() {
            [0.0, 0.0, 0.0]
        } else {
            [0.0, 0.0, kappa.model_radius()]
        };
        ModelPoint { kappa, coords }
    }

    /// Builds a point from embedding coordinates, validating the surface
    /// constraint to 1e-12 relative.
    pub fn new(kappa: Curvature, coords: V3) -> Result<Self> {
        let p = ModelPoint { kappa, coords };
        let res = p.surface_residual();
        if res > 1e-12 {
            return Err(Error::OffSurface(res));
        }
        if kappa.kappa() < -KAPPA_FLAT_EPS && coords[2] <= 0.0 {
            return Err(Error::OffSurface(-coords[2]));
        }
        Ok(p)
    }

    /// Builds a point from raw coordinates, projecting back to the quadric.
    pub fn project(kappa: Curvature, coords: V3) -> Self {
        let mut p = ModelPoint { kappa, coords };
        p.renormalize();
        p
    }

    /// Chart helper: the point at planar coordinates (x, y), i.e. exp from the
    /// origin in direction (x, y) by distance |(x, y)|.
    pub fn from_plane(kappa: Curvature, x: f64, y: f64) -> Result<Self> {
        if kappa.is_flat() {
            return Ok(ModelPoint {
                kappa,
                coords: [x, y, 0.0],
            });
        }
        let d = x.hypot(y);
        if d == 0.0 {
            return Ok(ModelPoint::origin(kappa));
        }
        let dir = [x / d, y / d, 0.0];
        let v = TangentVector::new(ModelPoint::origin(kappa), dir)?;
        geodesic_point(&v, d)
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn coords(&self) -> V3 {
        self.coords
    }

    /// Relative deviation from the model surface constraint.
    pub fn surface_residual(&self) -> f64 {
        let k = self.kappa.kappa();
        if self.kappa.is_flat() {
            self.coords[2].abs()
        } else {
            let r2 = 1.0 / k;
            (self.kappa.form(self.coords, self.coords) - r2).abs() / r2.abs()
        }
    }

    /// Projects the coordinates back onto the quadric surface.
    pub fn renormalize(&mut self) {
        if self.kappa.is_flat() {
            self.coords[2] = 0.0;
            return;
        }
        let q = self.kappa.form(self.coords, self.coords);
        let target = 1.0 / self.kappa.kappa();
        // both q and target share the sign of kappa
        let s = (target / q).sqrt();
        self.coords = scale(self.coords, s);
    }

    pub fn approx_eq(&self, other: &ModelPoint, tol: f64) -> bool {
        self.kappa == other.kappa
            && sub(self.coords, other.coords)
                .iter()
                .all(|c| c.abs() <= tol)
    }
}

/// A unit tangent vector at a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    base: ModelPoint,
    dir: V3,
}

impl TangentVector {
    /// Normalizes `dir` against the ambient form and projects out any
    /// component along the base point.
    pub fn new(base: ModelPoint, dir: V3) -> Result<Self> {
        let kappa = base.kappa();
        let mut d = dir;
        if kappa.is_flat() {
            d[2] = 0.0;
        } else {
            // remove the radial component: d -= <d,p>/<p,p> p
            let c = kappa.form(d, base.coords()) * kappa.kappa();
            d = sub(d, scale(base.coords(), c));
        }
        let n2 = kappa.form(d, d);
        if !(n2 > 1e-30) {
            return Err(Error::DegenerateDirection);
        }
        Ok(TangentVector {
            base,
            dir: scale(d, 1.0 / n2.sqrt()),
        })
    }

    /// Accepts only vectors that are already unit and tangent (1e-8 band).
    pub fn new_unit(base: ModelPoint, dir: V3) -> Result<Self> {
        let kappa = base.kappa();
        let n2 = kappa.form(dir, dir);
        let radial = if kappa.is_flat() {
            dir[2].abs()
        } else {
            kappa.form(dir, base.coords()).abs() * kappa.k()
        };
        if (n2 - 1.0).abs() > 1e-8 || radial > 1e-8 {
            return Err(Error::NotNormalized);
        }
        Ok(TangentVector { base, dir })
    }

    pub fn base(&self) -> &ModelPoint {
        &self.base
    }

    pub fn dir(&self) -> V3 {
        self.dir
    }

    pub fn negated(&self) -> TangentVector {
        TangentVector {
            base: self.base,
            dir: scale(self.dir, -1.0),
        }
    }

    /// The vector rotated +90° (counterclockwise) in the tangent plane.
    pub fn rotated90(&self) -> TangentVector {
        TangentVector {
            base: self.base,
            dir: rotate90(&self.base, self.dir),
        }
    }
}

/// Rotates tangent direction `v` at `p` by +90° (counterclockwise).
pub fn rotate90(p: &ModelPoint, v: V3) -> V3 {
    let kappa = p.kappa();
    if kappa.is_flat() {
        [-v[1], v[0], 0.0]
    } else {
        let c = cross(p.coords(), v);
        let c = if kappa.kappa() < 0.0 {
            [c[0], c[1], -c[2]]
        } else {
            c
        };
        scale(c, kappa.k())
    }
}

// ---------------------------------------------------------------------------

/// Geodesic distance between two points of the same model plane.
pub fn distance(p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    p.kappa().same(q.kappa())?;
    let kappa = p.kappa();
    if kappa.is_flat() {
        let d = sub(p.coords(), q.coords());
        return Ok((d[0] * d[0] + d[1] * d[1]).sqrt());
    }
    let r = kappa.model_radius();
    let ip = kappa.form(p.coords(), q.coords());
    if kappa.kappa() > 0.0 {
        let c = (ip / (r * r)).clamp(-1.0, 1.0);
        let d = r * c.acos();
        if std::f64::consts::PI * r - d < ANTIPODAL_EPS {
            return Err(Error::AntipodalPoints);
        }
        Ok(d)
    } else {
        let c = (-ip / (r * r)).max(1.0);
        Ok(r * acosh(c))
    }
}

fn acosh(x: f64) -> f64 {
    // f64::acosh loses precision near 1; the sqrt form is fine here
    x.acosh()
}

/// Unit initial direction of the geodesic from `p` to `q`.
pub fn log_dir(p: &ModelPoint, q: &ModelPoint) -> Result<V3> {
    let d = distance(p, q)?;
    if d < 1e-13 {
        return Err(Error::CoincidentPoints);
    }
    let kappa = p.kappa();
    let (sn, cs) = generalized_trig(kappa, d);
    // q = cs(d) p + sn(d) u
    let mut u = scale(sub(q.coords(), scale(p.coords(), cs)), 1.0 / sn);
    // For nearby points far from the model origin the subtraction above loses
    // enough precision that u drifts off the tangent plane and off unit norm.
    // Re-orthogonalize and renormalize so callers always get unit tangents.
    if kappa.is_flat() {
        u[2] = 0.0;
    } else {
        let c = kappa.form(u, p.coords()) * kappa.kappa();
        u = sub(u, scale(p.coords(), c));
    }
    let n2 = kappa.form(u, u);
    if !(n2 > 1e-30) {
        return Err(Error::DegenerateDirection);
    }
    Ok(scale(u, 1.0 / n2.sqrt()))
}

/// Internal geodesic flow: allows negative t (public `exp_map` enforces t ≥ 0).
pub(crate) fn geodesic_point(v: &TangentVector, t: f64) -> Result<ModelPoint> {
    let kappa = v.base().kappa();
    if kappa.kappa() > KAPPA_FLAT_EPS && t.abs() >= std::f64::consts::PI * kappa.model_radius() {
        return Err(Error::ParamOutOfRange {
            name: "t",
            value: t,
            min: -std::f64::consts::PI * kappa.model_radius(),
            max: std::f64::consts::PI * kappa.model_radius(),
        });
    }
    let (sn, cs) = generalized_trig(kappa, t);
    let coords = add(scale(v.base().coords(), cs), scale(v.dir(), sn));
    Ok(ModelPoint::project(kappa, coords))
}

/// Point at arclength t along the unit-speed geodesic with initial data `v`.
pub fn exp_map(v: &TangentVector, t: f64) -> Result<ModelPoint> {
    if t < 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "t",
            value: t,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    geodesic_point(v, t)
}

/// Angle at `at` between the geodesics to `p` and to `q`, in [0, π].
pub fn angle(at: &ModelPoint, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    at.kappa().same(p.kappa())?;
    at.kappa().same(q.kappa())?;
    let u = log_dir(at, p)?;
    let w = log_dir(at, q)?;
    let c = at.kappa().form(u, w).clamp(-1.0, 1.0);
    Ok(c.acos())
}

/// Signed angle from tangent direction `u` to `w` at `p`, in (−π, π],
/// positive counterclockwise.
pub fn signed_angle(p: &ModelPoint, u: V3, w: V3) -> f64 {
    let kappa = p.kappa();
    let c = kappa.form(u, w).clamp(-1.0, 1.0);
    let s = kappa.form(rotate90(p, u), w);
    s.atan2(c)
}

/// The point reflection R_m: m is the midpoint of the segment x–R_m(x).
pub fn point_reflection(m: &ModelPoint, x: &ModelPoint) -> Result<ModelPoint> {
    m.kappa().same(x.kappa())?;
    let d = distance(m, x)?;
    if d < 1e-13 {
        return Ok(*m);
    }
    let u = log_dir(m, x)?;
    let v = TangentVector::new_unit(*m, scale(u, -1.0))?;
    geodesic_point(&v, d)
}

/// A geodesic segment with its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub start: ModelPoint,
    pub end: ModelPoint,
    pub length: f64,
}

impl GeodesicSegment {
    pub fn new(start: ModelPoint, end: ModelPoint) -> Result<Self> {
        let length = distance(&start, &end)?;
        Ok(GeodesicSegment { start, end, length })
    }

    /// Geodesic midpoint.
    pub fn midpoint(&self) -> Result<ModelPoint> {
        if self.length < 1e-13 {
            return Ok(self.start);
        }
        let u = log_dir(&self.start, &self.end)?;
        let v = TangentVector::new_unit(self.start, u)?;
        geodesic_point(&v, self.length / 2.0)
    }
}

/// Maps a point under the curvature rescaling κ → κ/c², lengths → c·lengths.
/// Used by the scaling-covariance checks.
pub fn rescaled(p: &ModelPoint, c: f64) -> ModelPoint {
    let kappa = Curvature(p.kappa().kappa() / (c * c));
    if kappa.is_flat() {
        ModelPoint {
            kappa,
            coords: [p.coords()[0] * c, p.coords()[1] * c, 0.0],
        }
    } else {
        ModelPoint {
            kappa,
            coords: scale(p.coords(), c),
        }
    }
}

/// Signed distance data of the geodesic through two points: the unit pole
/// vector w with ⟪x,w⟫ = R·sn(d/R) for x at signed distance d on the +w side
/// (κ ≠ 0), or the planar unit normal with offset (κ = 0).
pub(crate) fn geodesic_pole(a: &ModelPoint, b: &ModelPoint) -> Result<(V3, f64)> {
    let kappa = a.kappa();
    if kappa.is_flat() {
        let e = sub(b.coords(), a.coords());
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        if len < 1e-15 {
            return Err(Error::CoincidentPoints);
        }
        let n = [-e[1] / len, e[0] / len, 0.0];
        let off = n[0] * a.coords()[0] + n[1] * a.coords()[1];
        Ok((n, off))
    } else {
        let mut w = cross(a.coords(), b.coords());
        if kappa.kappa() < 0.0 {
            w[2] = -w[2];
        }
        let n2 = kappa.form(w, w);
        if !(n2 > 1e-28) {
            return Err(Error::CoincidentPoints);
        }
        Ok((scale(w, 1.0 / n2.sqrt()), 0.0))
    }
}

/// Signed distance from `p` to the (complete) geodesic described by a pole
/// from `geodesic_pole`; positive on the +w / +normal side.
pub(crate) fn signed_dist_to_geodesic(p: &ModelPoint, pole: &(V3, f64)) -> f64 {
    let kappa = p.kappa();
    if kappa.is_flat() {
        pole.0[0] * p.coords()[0] + pole.0[1] * p.coords()[1] - pole.1
    } else {
        let r = kappa.model_radius();
        let s = kappa.form(p.coords(), pole.0) / r;
        if kappa.kappa() > 0.0 {
            r * s.clamp(-1.0, 1.0).asin()
        } else {
            r * s.asinh()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn kv(k: f64) -> Curvature {
        Curvature::new(k).unwrap()
    }

    fn pt(k: f64, c: V3) -> ModelPoint {
        ModelPoint::new(kv(k), c).unwrap()
    }

    #[test]
    fn euclidean_distance_pythagoras() {
        let p = pt(0.0, [0.0, 0.0, 0.0]);
        let q = pt(0.0, [3.0, 4.0, 0.0]);
        assert!((distance(&p, &q).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_quarter_great_circle() {
        let np = pt(1.0, [0.0, 0.0, 1.0]);
        let eq = pt(1.0, [1.0, 0.0, 0.0]);
        assert!((distance(&np, &eq).unwrap() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_distance_closed_form() {
        let o = pt(-1.0, [0.0, 0.0, 1.0]);
        let q = pt(-1.0, [1f64.sinh(), 0.0, 1f64.cosh()]);
        assert!((distance(&o, &q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_rejects_curvature_mismatch() {
        let p = pt(0.0, [0.0, 0.0, 0.0]);
        let q = pt(1.0, [0.0, 0.0, 1.0]);
        assert!(matches!(
            distance(&p, &q),
            Err(Error::CurvatureMismatch(_, _))
        ));
    }

    #[test]
    fn distance_rejects_antipodal() {
        let p = pt(1.0, [0.0, 0.0, 1.0]);
        let q = pt(1.0, [0.0, 0.0, -1.0]);
        assert!(matches!(distance(&p, &q), Err(Error::AntipodalPoints)));
    }

    #[test]
    fn exp_map_flat() {
        let v = TangentVector::new(pt(0.0, [0.0, 0.0, 0.0]), [1.0, 0.0, 0.0]).unwrap();
        let p = exp_map(&v, 2.0).unwrap();
        assert!(p.approx_eq(&pt(0.0, [2.0, 0.0, 0.0]), 1e-14));
    }

    #[test]
    fn exp_map_sphere_to_equator() {
        let np = pt(1.0, [0.0, 0.0, 1.0]);
        let v = TangentVector::new(np, [0.6, 0.8, 0.0]).unwrap();
        let p = exp_map(&v, PI / 2.0).unwrap();
        assert!(p.coords()[2].abs() < 1e-14);
    }

    #[test]
    fn exp_map_hyperbolic_closed_form() {
        let o = pt(-1.0, [0.0, 0.0, 1.0]);
        let v = TangentVector::new(o, [1.0, 0.0, 0.0]).unwrap();
        let p = exp_map(&v, 1.0).unwrap();
        assert!(p.approx_eq(&pt(-1.0, [1f64.sinh(), 0.0, 1f64.cosh()]), 1e-12));
        assert!((distance(&o, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exp_map_rejects_negative_t() {
        let v = TangentVector::new(pt(0.0, [0.0, 0.0, 0.0]), [1.0, 0.0, 0.0]).unwrap();
        assert!(exp_map(&v, -1.0).is_err());
    }

    #[test]
    fn angle_right_and_collinear() {
        let o = pt(0.0, [0.0, 0.0, 0.0]);
        let a = angle(&o, &pt(0.0, [1.0, 0.0, 0.0]), &pt(0.0, [0.0, 1.0, 0.0])).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-14);
        let b = angle(&o, &pt(0.0, [1.0, 0.0, 0.0]), &pt(0.0, [2.0, 0.0, 0.0])).unwrap();
        assert!(b.abs() < 1e-14);
    }

    #[test]
    fn angle_rejects_coincident() {
        let o = pt(0.0, [0.0, 0.0, 0.0]);
        assert!(angle(&o, &o, &pt(0.0, [1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn hyperbolic_equilateral_angle() {
        // law-of-cosines oracle: acos(cosh1*(cosh1-1)/sinh^2 1)
        let o = pt(-1.0, [0.0, 0.0, 1.0]);
        let v1 = TangentVector::new(o, [1.0, 0.0, 0.0]).unwrap();
        let p = exp_map(&v1, 1.0).unwrap();
        // direction at 60 Euclidean degrees does not give an equilateral
        // triangle; instead solve: place q via the hyperbolic angle alpha at o
        let expect = (1f64.cosh() * (1f64.cosh() - 1.0) / 1f64.sinh().powi(2)).acos();
        let v2 = TangentVector::new(o, [expect.cos(), expect.sin(), 0.0]).unwrap();
        let q = exp_map(&v2, 1.0).unwrap();
        // all sides length 1 -> the vertex angle matches the oracle
        assert!((distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);
        let a = angle(&o, &p, &q).unwrap();
        assert!((a - expect).abs() < 1e-12);
    }

    #[test]
    fn point_reflection_flat() {
        let m = pt(0.0, [0.0, 0.0, 0.0]);
        let x = pt(0.0, [1.0, 2.0, 0.0]);
        let r = point_reflection(&m, &x).unwrap();
        assert!(r.approx_eq(&pt(0.0, [-1.0, -2.0, 0.0]), 1e-14));
    }

    #[test]
    fn point_reflection_fixed_point_and_involution() {
        for k in [-1.0, 0.0, 1.0] {
            let m = ModelPoint::from_plane(kv(k), 0.2, -0.1).unwrap();
            assert!(point_reflection(&m, &m).unwrap().approx_eq(&m, 1e-12));
            let x = ModelPoint::from_plane(kv(k), 0.7, 0.4).unwrap();
            let r = point_reflection(&m, &x).unwrap();
            let rr = point_reflection(&m, &r).unwrap();
            assert!(rr.approx_eq(&x, 1e-10));
            // m is the midpoint
            let d1 = distance(&m, &x).unwrap();
            let d2 = distance(&m, &r).unwrap();
            assert!((d1 - d2).abs() < 1e-12);
        }
    }

    #[test]
    fn point_reflection_hyperboloid_example() {
        let m = pt(-1.0, [0.0, 0.0, 1.0]);
        let x = pt(-1.0, [1f64.sinh(), 0.0, 1f64.cosh()]);
        let r = point_reflection(&m, &x).unwrap();
        assert!(r.approx_eq(&pt(-1.0, [-(1f64.sinh()), 0.0, 1f64.cosh()]), 1e-12));
    }

    #[test]
    fn generalized_trig_values() {
        let (sn, cs) = generalized_trig(kv(0.0), 3.0);
        assert_eq!((sn, cs), (3.0, 1.0));
        let (sn, cs) = generalized_trig(kv(1.0), PI / 2.0);
        assert!((sn - 1.0).abs() < 1e-15 && cs.abs() < 1e-15);
        let (sn, cs) = generalized_trig(kv(-4.0), 1.0);
        assert!((sn - 2f64.sinh() / 2.0).abs() < 1e-14);
        assert!((cs - 2f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn generalized_trig_satisfies_jacobi_ode() {
        // second central difference of sn vs -kappa*sn
        for k in [-4.0, -1.0, 0.5, 2.0] {
            let kap = kv(k);
            let h = 1e-4;
            for t in [0.3, 1.0, 1.7] {
                let dd = (kap.sn(t + h) - 2.0 * kap.sn(t) + kap.sn(t - h)) / (h * h);
                assert!(
                    (dd + k * kap.sn(t)).abs() < 1e-5,
                    "k={k} t={t}: {dd} vs {}",
                    -k * kap.sn(t)
                );
            }
        }
    }

    #[test]
    fn scaling_covariance() {
        for k in [-1.0, 0.5, 1.0] {
            let p = ModelPoint::from_plane(kv(k), 0.3, 0.4).unwrap();
            let q = ModelPoint::from_plane(kv(k), -0.2, 0.9).unwrap();
            let d = distance(&p, &q).unwrap();
            for c in [0.5, 2.0, 10.0] {
                let dc = distance(&rescaled(&p, c), &rescaled(&q, c)).unwrap();
                assert!((dc - c * d).abs() < 1e-9 * c.max(1.0), "k={k} c={c}");
            }
        }
    }

    #[test]
    fn rotate90_is_tangent_unit_and_orientation_consistent() {
        for k in [-1.0, 0.0, 1.0] {
            let p = ModelPoint::from_plane(kv(k), 0.3, -0.5).unwrap();
            let v = TangentVector::new(p, [0.3, 0.9, 0.1]).unwrap();
            let w = rotate90(&p, v.dir());
            let kap = p.kappa();
            assert!((kap.form(w, w) - 1.0).abs() < 1e-12);
            assert!(kap.form(w, v.dir()).abs() < 1e-12);
            // double rotation negates
            let ww = rotate90(&p, w);
            assert!(sub(ww, scale(v.dir(), -1.0)).iter().all(|c| c.abs() < 1e-12));
        }
    }
}
