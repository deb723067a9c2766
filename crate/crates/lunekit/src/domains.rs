//! Discrete convex domains: seeded generation of λ-convex domains as finite
//! intersections of F_λ regions, the λ-convexity test, numeric inradius,
//! circumradius and area, and the symmetrization constructions (balanced
//! chord, reflected half, rolling containment).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curves::{
    f_lambda_supporting_at, turn_angles_closed, ConstantCurvatureArc, CurveKind, FLambdaRegion,
    RegionLocus, SwerveSide,
};
use crate::error::{Error, Result};
use crate::kernel::{
    add, distance, exp_map, geodesic_pole, log_dir, point_reflection, rotate90, scale,
    signed_angle, signed_dist_to_geodesic, sub, Curvature, ModelPoint, TangentVector, V3,
};

/// Turning angles this negative fail convexity validation; small negatives
/// absorb bisection residue at reflection seams.
const TURN_TOL: f64 = 1e-5;
/// Arclength threshold below which a boundary position counts as a vertex.
const VERTEX_SNAP: f64 = 1e-9;

/// Closed strictly convex boundary ring, counterclockwise, domain on the left.
#[derive(Debug, Clone)]
pub struct ConvexPolyDomain {
    kappa: Curvature,
    boundary: Vec<ModelPoint>,
    /// cum_len[i] is the arclength from vertex 0 to vertex i; the closing
    /// edge is not included (see `perimeter`).
    cum_len: Vec<f64>,
    perimeter: f64,
    turns: Vec<f64>,
}

impl ConvexPolyDomain {
    /// Validates closure, distinctness and (non-strict) convexity.
    pub fn new(kappa: Curvature, boundary: Vec<ModelPoint>) -> Result<Self> {
        if boundary.len() < 3 {
            return Err(Error::TooFewPoints {
                needed: 3,
                got: boundary.len(),
            });
        }
        for p in &boundary {
            kappa.same(p.kappa())?;
        }
        let turns = turn_angles_closed(&boundary, SwerveSide::Left)?;
        if let Some((i, &t)) = turns
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
        {
            if t < -TURN_TOL {
                return Err(Error::NotConvex { vertex: i, turn: t });
            }
        }
        let n = boundary.len();
        let mut cum_len = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            cum_len.push(acc);
            acc += distance(&boundary[i], &boundary[(i + 1) % n])?;
        }
        Ok(ConvexPolyDomain {
            kappa,
            boundary,
            cum_len,
            perimeter: acc,
            turns,
        })
    }

    /// Extra validation for sampled domains: at least 8 vertices and no edge
    /// longer than 10·h.
    pub fn validate_sampling(&self, h: f64) -> Result<()> {
        if self.boundary.len() < 8 {
            return Err(Error::TooFewPoints {
                needed: 8,
                got: self.boundary.len(),
            });
        }
        for i in 0..self.boundary.len() {
            if self.edge_len(i) > 10.0 * h {
                return Err(Error::ParamOutOfRange {
                    name: "edge_length",
                    value: self.edge_len(i),
                    min: 0.0,
                    max: 10.0 * h,
                });
            }
        }
        Ok(())
    }

    pub fn kappa(&self) -> Curvature {
        self.kappa
    }

    pub fn boundary(&self) -> &[ModelPoint] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn cumulative_arclength(&self) -> &[f64] {
        &self.cum_len
    }

    /// Signed turn (toward the domain) at each vertex.
    pub fn turns(&self) -> &[f64] {
        &self.turns
    }

    pub fn edge_len(&self, i: usize) -> f64 {
        let n = self.boundary.len();
        if i + 1 < n {
            self.cum_len[i + 1] - self.cum_len[i]
        } else {
            self.perimeter - self.cum_len[n - 1]
        }
    }

    pub fn swerve(&self) -> Result<f64> {
        Ok(self.turns.iter().sum())
    }

    /// An interior point: the projected vertex centroid (interior by
    /// convexity; for κ > 0 the domain sits in an open hemisphere).
    pub fn interior_point(&self) -> ModelPoint {
        let mut c = [0.0; 3];
        for p in &self.boundary {
            c = add(c, p.coords());
        }
        ModelPoint::project(self.kappa, scale(c, 1.0 / self.boundary.len() as f64))
    }

    /// Boundary point at arclength s (wrapped mod perimeter).
    pub fn point_at_arclength(&self, s: f64) -> Result<ModelPoint> {
        let (i, u) = self.locate(s);
        if u == 0.0 {
            return Ok(self.boundary[i]);
        }
        let n = self.boundary.len();
        let v = TangentVector::new_unit(
            self.boundary[i],
            log_dir(&self.boundary[i], &self.boundary[(i + 1) % n])?,
        )?;
        exp_map(&v, u)
    }

    /// Tangent of edge i's geodesic, transported to offset u along it.
    fn edge_tangent_at(&self, i: usize, u: f64) -> Result<TangentVector> {
        let n = self.boundary.len();
        let a = self.boundary[i];
        let b = self.boundary[(i + 1) % n];
        let dir0 = log_dir(&a, &b)?;
        let t0 = TangentVector::new(a, dir0)?;
        let (sn, cs) = crate::kernel::generalized_trig(self.kappa, u);
        let fwd = add(
            scale(a.coords(), -self.kappa.kappa() * sn),
            scale(t0.dir(), cs),
        );
        let v = TangentVector::new_unit(a, dir0)?;
        let p = exp_map(&v, u)?;
        TangentVector::new(p, fwd)
    }

    /// Forward unit tangent at arclength s: the raw edge tangent inside an
    /// edge, and the bisector of the two incident edges (midpoint of the
    /// tangent cone) when s sits on a vertex. Boundary corners genuinely
    /// carry a cone of tangent directions, so point evaluations must not
    /// smear corner turning into the neighboring edges.
    pub fn tangent_at_arclength(&self, s: f64) -> Result<TangentVector> {
        let (i, u) = self.locate(s);
        let n = self.boundary.len();
        let e = self.edge_len(i);
        if u <= VERTEX_SNAP || e - u <= VERTEX_SNAP {
            let v = if u <= VERTEX_SNAP { i } else { (i + 1) % n };
            let t = self.edge_tangent_at(v, 0.0)?;
            let delta = -self.turns[v] / 2.0;
            let rot = add(
                scale(t.dir(), delta.cos()),
                scale(rotate90(&self.boundary[v], t.dir()), delta.sin()),
            );
            return TangentVector::new(self.boundary[v], rot);
        }
        self.edge_tangent_at(i, u)
    }

    /// Tangent directions available at arclength s: one inside an edge, the
    /// two cone extremes on a vertex.
    fn tangent_cone(&self, s: f64) -> Result<Vec<TangentVector>> {
        let (i, u) = self.locate(s);
        let n = self.boundary.len();
        let e = self.edge_len(i);
        if u <= VERTEX_SNAP || e - u <= VERTEX_SNAP {
            let v = if u <= VERTEX_SNAP { i } else { (i + 1) % n };
            let prev = (v + n - 1) % n;
            Ok(vec![
                self.edge_tangent_at(prev, self.edge_len(prev))?,
                self.edge_tangent_at(v, 0.0)?,
            ])
        } else {
            Ok(vec![self.edge_tangent_at(i, u)?])
        }
    }

    /// (edge index, offset into the edge) for arclength s mod perimeter.
    fn locate(&self, s: f64) -> (usize, f64) {
        let mut s = s.rem_euclid(self.perimeter);
        if !s.is_finite() {
            s = 0.0;
        }
        let i = match self
            .cum_len
            .binary_search_by(|c| c.total_cmp(&s))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (i, s - self.cum_len[i])
    }

    /// Enclosed area by geodesic fan triangulation from an interior point;
    /// curved triangles by angle excess, flat by the cross product.
    pub fn area(&self) -> Result<f64> {
        let o = self.interior_point();
        let n = self.boundary.len();
        let mut total = 0.0;
        if self.kappa.is_flat() {
            for i in 0..n {
                let a = sub(self.boundary[i].coords(), o.coords());
                let b = sub(self.boundary[(i + 1) % n].coords(), o.coords());
                total += 0.5 * (a[0] * b[1] - a[1] * b[0]);
            }
        } else {
            for i in 0..n {
                let a = &self.boundary[i];
                let b = &self.boundary[(i + 1) % n];
                let excess = crate::kernel::angle(&o, a, b)?
                    + crate::kernel::angle(a, b, &o)?
                    + crate::kernel::angle(b, &o, a)?
                    - std::f64::consts::PI;
                total += excess / self.kappa.kappa();
            }
        }
        Ok(total)
    }

    /// Minimum distance from `p` to the boundary polyline, evaluated over
    /// edges (point-to-geodesic-segment), via a coarse vertex scan refined
    /// around the best candidates.
    pub fn distance_to_boundary(&self, p: &ModelPoint) -> Result<f64> {
        let n = self.boundary.len();
        let stride = (n as f64).sqrt() as usize + 1;
        // coarse pass over stride vertices
        let mut coarse: Vec<(usize, f64)> = Vec::with_capacity(n / stride + 1);
        let mut best = f64::INFINITY;
        let mut i = 0;
        while i < n {
            let d = distance(p, &self.boundary[i])?;
            coarse.push((i, d));
            best = best.min(d);
            i += stride;
        }
        // refine every window that could hide a closer vertex: the distance
        // along the boundary is 1-Lipschitz in arclength
        let max_edge = self.perimeter / n as f64 * 1.5 + 1e-12;
        let slack = stride as f64 * max_edge;
        let mut best_vertex = 0;
        let mut best_exact = f64::INFINITY;
        for &(i0, d0) in &coarse {
            if d0 > best + slack {
                continue;
            }
            for j in 0..stride {
                let v = (i0 + n - stride / 2 + j + n) % n;
                let d = distance(p, &self.boundary[v])?;
                if d < best_exact {
                    best_exact = d;
                    best_vertex = v;
                }
            }
        }
        // polish with the segments incident to the best vertices
        let mut r = best_exact;
        for off in 0..4usize {
            let e = (best_vertex + n - 2 + off) % n;
            r = r.min(self.segment_distance(p, e)?);
        }
        Ok(r)
    }

    /// Maximum distance from `p` to a boundary vertex, same coarse stride
    /// plus Lipschitz-slack refinement as `distance_to_boundary`. The max
    /// over vertices is what the enclosing-ball radius needs; edges never
    /// exceed their endpoints for the max.
    pub fn max_distance_to_boundary(&self, p: &ModelPoint) -> Result<f64> {
        let n = self.boundary.len();
        let stride = (n as f64).sqrt() as usize + 1;
        let mut coarse: Vec<(usize, f64)> = Vec::with_capacity(n / stride + 1);
        let mut best = 0.0f64;
        let mut i = 0;
        while i < n {
            let d = distance(p, &self.boundary[i])?;
            coarse.push((i, d));
            best = best.max(d);
            i += stride;
        }
        let max_edge = self.perimeter / n as f64 * 1.5 + 1e-12;
        let slack = stride as f64 * max_edge;
        let mut best_exact = 0.0f64;
        for &(i0, d0) in &coarse {
            if d0 < best - slack {
                continue;
            }
            for j in 0..stride {
                let v = (i0 + n - stride / 2 + j + n) % n;
                best_exact = best_exact.max(distance(p, &self.boundary[v])?);
            }
        }
        Ok(best_exact)
    }

    /// Distance from p to boundary edge i (geodesic segment).
    fn segment_distance(&self, p: &ModelPoint, i: usize) -> Result<f64> {
        let n = self.boundary.len();
        let a = &self.boundary[i];
        let b = &self.boundary[(i + 1) % n];
        let da = distance(p, a)?;
        let db = distance(p, b)?;
        let end_min = da.min(db);
        if self.edge_len(i) < 1e-14 {
            return Ok(end_min);
        }
        // the foot of the perpendicular lies inside the segment iff both
        // base angles are acute
        let ab = log_dir(a, b)?;
        let ap = log_dir(a, p)?;
        let ba = log_dir(b, a)?;
        let bp = log_dir(b, p)?;
        let acute_a = self.kappa.form(ab, ap) >= 0.0;
        let acute_b = self.kappa.form(ba, bp) >= 0.0;
        if acute_a && acute_b {
            let pole = geodesic_pole(a, b)?;
            Ok(signed_dist_to_geodesic(p, &pole).abs().min(end_min))
        } else {
            Ok(end_min)
        }
    }
}

// ---------------------------------------------------------------------------
// λ-convexity check

/// Result of the sliding-window λ-convexity test.
#[derive(Debug, Clone)]
pub struct LambdaConvexReport {
    pub ok: bool,
    /// Minimum of (swerve − λ·arclength) over all contiguous windows.
    pub min_margin: f64,
    /// Vertex index range (start, end) of the minimizing window.
    pub worst_window: (usize, usize),
}

/// Checks Eq.-(1)-style λ-convexity: every contiguous boundary window must
/// have swerve ≥ λ·arclength − tol. Interior-vertex swerve only, so single
/// edges contribute −λ·h; pass tol ≥ a few multiples of λ·h.
pub fn is_lambda_convex(d: &ConvexPolyDomain, lambda: f64, tol: f64) -> LambdaConvexReport {
    let n = d.len();
    let turns = d.turns();
    // doubled prefix sums; window i..j (edges i..j-1, interior vertices
    // i+1..j-1) has margin B[j] - A[i]
    let mut tt = vec![0.0; 2 * n + 1];
    let mut ss = vec![0.0; 2 * n + 1];
    for j in 0..2 * n {
        tt[j + 1] = tt[j] + turns[j % n];
        ss[j + 1] = ss[j] + d.edge_len(j % n);
    }
    let a = |i: usize| tt[i + 1] - lambda * ss[i];
    let b = |j: usize| tt[j] - lambda * ss[j];
    let mut min_margin = f64::INFINITY;
    let mut worst = (0, 0);
    // deque of candidate window starts, decreasing in a(i)
    let mut dq: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for j in 1..2 * n {
        let lo = j.saturating_sub(n);
        let i_new = j - 1;
        if i_new < n {
            while let Some(&back) = dq.back() {
                if a(back) <= a(i_new) {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(i_new);
        }
        while let Some(&front) = dq.front() {
            if front < lo {
                dq.pop_front();
            } else {
                break;
            }
        }
        if let Some(&front) = dq.front() {
            let m = b(j) - a(front);
            if m < min_margin {
                min_margin = m;
                worst = (front % n, j % n);
            }
        }
    }
    LambdaConvexReport {
        ok: min_margin >= -tol,
        min_margin,
        worst_window: worst,
    }
}

// ---------------------------------------------------------------------------
// generation

/// Smallest positive t with P·cos(kt) + Q·sin(kt) = C, if any.
fn solve_cos_sin(k: f64, p: f64, q: f64, c: f64) -> Option<f64> {
    let amp = p.hypot(q);
    if amp < 1e-300 {
        return None;
    }
    let ratio = c / amp;
    if ratio.abs() > 1.0 + 1e-12 {
        return None;
    }
    let psi = q.atan2(p);
    let d = ratio.clamp(-1.0, 1.0).acos();
    let tau = std::f64::consts::TAU;
    let mut best: Option<f64> = None;
    for cand in [psi + d, psi - d] {
        let t = cand.rem_euclid(tau) / k;
        if t > 1e-12 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    }
    best
}

/// Smallest positive t with P·cosh(kt) + Q·sinh(kt) = C, if any
/// (z = e^{kt} root of (P+Q)z² − 2Cz + (P−Q) = 0, z > 1).
fn solve_cosh_sinh(k: f64, p: f64, q: f64, c: f64) -> Option<f64> {
    let a2 = p + q;
    let a0 = p - q;
    let mut best: Option<f64> = None;
    let mut push = |z: f64| {
        if z > 1.0 + 1e-15 {
            let t = z.ln() / k;
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
    };
    if a2.abs() < 1e-300 {
        // degenerate: linear in z
        if c.abs() > 1e-300 {
            push(a0 / (2.0 * c));
        }
        return best;
    }
    let disc = c * c - a2 * a0;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    push((c + sq) / a2);
    push((c - sq) / a2);
    best
}

/// Exit parameter of the unit-speed geodesic ray from `o` with tangent `u`
/// out of the region; `None` when the ray never leaves. `o` must be interior.
fn ray_exit(f: &FLambdaRegion, o: &ModelPoint, u: V3) -> Option<f64> {
    let kappa = f.kappa();
    if kappa.is_flat() {
        // only disks exist in the flat case
        if let RegionLocus::Circle { center, radius } = f.locus() {
            let oc = sub(o.coords(), center.coords());
            let b = u[0] * oc[0] + u[1] * oc[1];
            let c0 = oc[0] * oc[0] + oc[1] * oc[1] - radius * radius;
            let disc = b * b - c0;
            if disc < 0.0 {
                return None;
            }
            let t = -b + disc.sqrt();
            return (t > 0.0).then_some(t);
        }
        return None;
    }
    let k = kappa.k();
    match f.locus() {
        RegionLocus::Circle { center, radius } => {
            let p = kappa.kappa() * kappa.form(o.coords(), center.coords());
            let q = kappa.kappa() * kappa.form(u, center.coords()) / k;
            if kappa.kappa() > 0.0 {
                solve_cos_sin(k, p, q, (k * radius).cos())
            } else {
                solve_cosh_sinh(k, p, q, (k * radius).cosh())
            }
        }
        RegionLocus::Horocycle { null_dir, level } => {
            let p = -kappa.form(o.coords(), *null_dir);
            let q = -kappa.form(u, *null_dir) / k;
            solve_cosh_sinh(k, p, q, *level)
        }
        RegionLocus::Hypercycle { pole, axis_offset } => {
            let p = kappa.form(o.coords(), *pole);
            let q = kappa.form(u, *pole) / k;
            solve_cosh_sinh(k, p, q, (k * axis_offset).sinh() / k)
        }
    }
}

/// Angle of `x` as seen from the model origin in the (e1, e2) tangent frame.
fn angle_from_origin(o: &ModelPoint, x: &ModelPoint) -> Result<f64> {
    let v = log_dir(o, x)?;
    Ok(v[1].atan2(v[0]))
}

fn wrap_pos(a: f64) -> f64 {
    a.rem_euclid(std::f64::consts::TAU)
}

/// Assembles the counterclockwise boundary ring of ∩ regions, sampled at
/// arclength step ≤ h. All regions must contain the model origin strictly.
fn assemble_boundary(
    kappa: Curvature,
    regions: &[FLambdaRegion],
    h: f64,
) -> Result<Vec<ModelPoint>> {
    let o = ModelPoint::origin(kappa);
    let dir = |phi: f64| -> V3 { [phi.cos(), phi.sin(), 0.0] };
    let exit_of = |i: usize, phi: f64| -> Option<f64> { ray_exit(&regions[i], &o, dir(phi)) };
    let sweep = 512usize.max(64 * regions.len());
    let tau = std::f64::consts::TAU;
    let mut active = Vec::with_capacity(sweep);
    for j in 0..sweep {
        let phi = tau * j as f64 / sweep as f64;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..regions.len() {
            if let Some(t) = exit_of(i, phi) {
                if best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((i, t));
                }
            }
        }
        match best {
            Some((i, _)) => active.push(i),
            None => return Err(Error::GenerationFailed("unbounded intersection")),
        }
    }
    // corner angles: where the active region changes
    let mut corners: Vec<(f64, usize, usize)> = Vec::new(); // (phi, from, to)
    for j in 0..sweep {
        let a = active[j];
        let b = active[(j + 1) % sweep];
        if a == b {
            continue;
        }
        let mut lo = tau * j as f64 / sweep as f64;
        let mut hi = tau * (j + 1) as f64 / sweep as f64;
        // bisect on exit_a - exit_b; fall back to failure if a third region
        // interposes inside the cell (sweep too coarse)
        let g = |phi: f64| -> Option<f64> {
            Some(exit_of(a, phi)? - exit_of(b, phi)?)
        };
        let (Some(glo), Some(_)) = (g(lo), g(hi)) else {
            return Err(Error::GenerationFailed("corner bracket"));
        };
        if glo > 0.0 {
            return Err(Error::GenerationFailed("corner orientation"));
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match g(mid) {
                Some(v) if v <= 0.0 => lo = mid,
                Some(_) => hi = mid,
                None => return Err(Error::GenerationFailed("corner bracket")),
            }
        }
        corners.push((0.5 * (lo + hi), a, b));
    }
    if corners.is_empty() {
        // the intersection equals a single compact region: sample its circle
        let i = active[0];
        if let RegionLocus::Circle { .. } = regions[i].locus() {
            let t = exit_of(i, 0.0).ok_or(Error::GenerationFailed("full-disk exit"))?;
            let anchor = exp_map(&TangentVector::new(o, dir(0.0))?, t)?;
            let lam = regions[i].lambda();
            let per = crate::curves::f_lambda_perimeter(kappa, lam)?;
            let arc = regions[i].boundary_arc_at(&anchor, 0.0, per)?;
            return Ok(arc.sample(h, true));
        }
        return Err(Error::GenerationFailed("unbounded single region"));
    }
    // walk corner to corner along the active arcs
    let mut ring: Vec<ModelPoint> = Vec::new();
    let m = corners.len();
    for c in 0..m {
        let (phi_a, _, region) = corners[c];
        let (phi_b, check, _) = corners[(c + 1) % m];
        if region != check {
            return Err(Error::GenerationFailed("corner pairing"));
        }
        let t_a = exit_of(region, phi_a).ok_or(Error::GenerationFailed("corner exit"))?;
        let corner_a = exp_map(&TangentVector::new(o, dir(phi_a))?, t_a)?;
        let t_b = exit_of(region, phi_b).ok_or(Error::GenerationFailed("corner exit"))?;
        let corner_b = exp_map(&TangentVector::new(o, dir(phi_b))?, t_b)?;
        let arc = regions[region].boundary_arc_at(&corner_a, 0.0, f64::INFINITY)?;
        let s_b = arc_param_of(&arc, &o, phi_a, phi_b, &corner_b, kappa, &regions[region])?;
        let steps = (s_b / h).ceil().max(1.0) as usize;
        for i in 0..steps {
            ring.push(arc.point_unclamped(s_b * i as f64 / steps as f64));
        }
    }
    Ok(ring)
}

/// Arclength along `arc` (counterclockwise from its anchor at angle φ_a)
/// of the boundary point at angle φ_b, located by bisection on the monotone
/// angle-around-origin.
fn arc_param_of(
    arc: &ConstantCurvatureArc,
    o: &ModelPoint,
    phi_a: f64,
    phi_b: f64,
    corner_b: &ModelPoint,
    kappa: Curvature,
    region: &FLambdaRegion,
) -> Result<f64> {
    let target = wrap_pos(phi_b - phi_a);
    let psi = |s: f64| -> Result<f64> {
        Ok(wrap_pos(angle_from_origin(o, &arc.point_unclamped(s))? - phi_a))
    };
    let cap = match region.kind() {
        CurveKind::Circle => crate::curves::f_lambda_perimeter(kappa, region.lambda())?,
        _ => f64::INFINITY,
    };
    let mut hi = 0.1f64.min(cap * 0.5);
    let mut lo = 0.0;
    let mut guard = 0;
    while psi(hi)? < target {
        lo = hi;
        hi = (hi * 2.0).min(cap * 0.999_999);
        guard += 1;
        if guard > 80 {
            return Err(Error::NonConvergence("arc corner bracket"));
        }
    }
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if psi(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    // sanity: the located point must coincide with the corner
    if !arc.point_unclamped(s).approx_eq(corner_b, 1e-6) {
        return Err(Error::NonConvergence("arc corner location"));
    }
    Ok(s)
}

/// Generates a random λ-convex domain as the intersection of `n_supports`
/// F_λ regions placed around the model origin, boundary sampled at step ≤ h.
/// Deterministic in `seed`; retries (reseeding the stream) up to 100 times
/// when a draw yields an unbounded or degenerate intersection.
pub fn generate_lambda_convex(
    kappa: Curvature,
    lambda: f64,
    seed: u64,
    n_supports: usize,
    h: f64,
) -> Result<ConvexPolyDomain> {
    if n_supports < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: n_supports,
        });
    }
    if !(h > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "h",
            value: h,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_cap = match crate::curves::classify(kappa, lambda)? {
        CurveKind::Circle => {
            0.9 * crate::curves::f_lambda_radius(kappa, lambda)?.expect("circle kind")
        }
        _ => 1.0,
    };
    let o = ModelPoint::origin(kappa);
    let mut last = Error::GenerationFailed("no attempt");
    for _ in 0..100 {
        let mut regions = Vec::with_capacity(n_supports);
        // with two supports, independent directions almost never bound the
        // intersection for hypercycle loci, so pair them antipodally: the
        // result is an exact lune, which is also what two supports should mean
        let mut placements: Vec<(f64, f64)> = Vec::with_capacity(n_supports);
        for i in 0..n_supports {
            if n_supports == 2 && i == 1 {
                let (phi0, t0) = placements[0];
                placements.push((phi0 + std::f64::consts::PI, t0));
            } else {
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let t: f64 = t_cap * rng.gen_range(0.35..0.95);
                placements.push((phi, t));
            }
        }
        for &(phi, t) in &placements {
            let out = TangentVector::new(o, [phi.cos(), phi.sin(), 0.0])?;
            let s = exp_map(&out, t)?;
            // inward normal points back at the origin
            let inward = TangentVector::new_unit(s, log_dir(&s, &o)?)?;
            regions.push(f_lambda_supporting_at(&s, &inward, lambda)?);
        }
        match assemble_boundary(kappa, &regions, h)
            .and_then(|ring| ConvexPolyDomain::new(kappa, ring))
            .and_then(|d| d.validate_sampling(h).map(|()| d))
        {
            Ok(d) => return Ok(d),
            Err(e) => last = e,
        }
    }
    Err(last)
}

// ---------------------------------------------------------------------------
// inradius / circumradius

/// Tangent frame directions at p for the stencil searches.
fn stencil_dirs(p: &ModelPoint, n: usize) -> Vec<V3> {
    // any tangent vector seeds the frame
    let seed = if p.coords()[0].abs() + p.coords()[1].abs() < 1e-9 {
        [1.0, 0.0, 0.0]
    } else {
        [-p.coords()[1], p.coords()[0], 0.0]
    };
    let e1 = TangentVector::new(*p, seed).expect("frame seed");
    let e2v = rotate90(p, e1.dir());
    (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            add(scale(e1.dir(), a.cos()), scale(e2v, a.sin()))
        })
        .collect()
}

/// Largest inscribed-ball radius and its center. Distance-to-boundary is
/// concave on convex domains in the model planes, so stencil ascent with a
/// shrinking step finds the global maximum.
pub fn inradius(d: &ConvexPolyDomain, tol: f64) -> Result<(f64, ModelPoint)> {
    let mut cur = d.interior_point();
    let mut f_cur = d.distance_to_boundary(&cur)?;
    let mut step = (f_cur * 0.8).max(1e-3);
    let step_min = (tol * 1e-2).clamp(1e-9, 1e-6);
    let mut rounds = 0;
    let mut level_rounds = 0;
    while step > step_min {
        let mut improved = false;
        // sub-roundoff "gains" must not count as progress or the step never
        // shrinks and the loop stalls at the optimum
        let margin = 1e-14 * f_cur.max(1.0);
        for dir in stencil_dirs(&cur, 12) {
            let cand = exp_map(&TangentVector::new(cur, dir)?, step)?;
            let f = d.distance_to_boundary(&cand)?;
            if f > f_cur + margin {
                cur = cand;
                f_cur = f;
                improved = true;
            }
        }
        level_rounds += 1;
        if !improved || level_rounds > 400 {
            step *= 0.5;
            level_rounds = 0;
        }
        rounds += 1;
        if rounds > 20_000 {
            return Err(Error::NonConvergence("inradius ascent"));
        }
    }
    Ok((f_cur, cur))
}

/// Smallest enclosing-ball radius and its center: minimizes the (convex)
/// max distance to boundary vertices by the same stencil scheme.
pub fn circumradius(d: &ConvexPolyDomain, tol: f64) -> Result<(f64, ModelPoint)> {
    let g = |p: &ModelPoint| -> Result<f64> {
        d.max_distance_to_boundary(p)
    };
    let mut cur = d.interior_point();
    let mut g_cur = g(&cur)?;
    let mut step = (g_cur * 0.5).max(1e-3);
    let step_min = (tol * 1e-2).clamp(1e-9, 1e-6);
    let mut rounds = 0;
    let mut level_rounds = 0;
    while step > step_min {
        let mut improved = false;
        let margin = 1e-14 * g_cur.max(1.0);
        for dir in stencil_dirs(&cur, 12) {
            let cand = exp_map(&TangentVector::new(cur, dir)?, step)?;
            let v = g(&cand)?;
            if v < g_cur - margin {
                cur = cand;
                g_cur = v;
                improved = true;
            }
        }
        level_rounds += 1;
        if !improved || level_rounds > 400 {
            step *= 0.6;
            level_rounds = 0;
        }
        rounds += 1;
        if rounds > 20_000 {
            return Err(Error::NonConvergence("circumradius descent"));
        }
    }
    Ok((g_cur, cur))
}

// ---------------------------------------------------------------------------
// symmetrization

/// A chord splitting the boundary into two arcs of equal length with the
/// balanced angle condition α + β = π at its endpoints.
#[derive(Debug, Clone)]
pub struct BalancedChord {
    pub p_star: ModelPoint,
    pub q_star: ModelPoint,
    /// Geodesic midpoint of the chord.
    pub m: ModelPoint,
    /// Boundary arclengths of p* and q* (s_q = s_p + L/2).
    pub s_p: f64,
    pub s_q: f64,
    /// |α + β − π| at the returned chord.
    pub residual: f64,
}

/// Angle defect g(s) = α(x) + β(y) − π for the chord between the boundary
/// points at arclengths s and s + L/2. Antisymmetric under the half-turn
/// s ↦ s + L/2, so a root always exists. On a vertex the whole tangent cone
/// is admissible: g is the signed value of the cone's defect interval
/// nearest zero, which keeps g continuous through corners.
pub fn chord_imbalance(d: &ConvexPolyDomain, s: f64) -> Result<f64> {
    let half = d.perimeter() / 2.0;
    let x = d.point_at_arclength(s)?;
    let y = d.point_at_arclength(s + half)?;
    let cx = log_dir(&x, &y)?;
    let cy = log_dir(&y, &x)?;
    let mut alphas = Vec::with_capacity(2);
    for t in d.tangent_cone(s)? {
        alphas.push(signed_angle(&x, t.dir(), cx).abs());
    }
    let mut betas = Vec::with_capacity(2);
    for t in d.tangent_cone(s + half)? {
        betas.push(std::f64::consts::PI - signed_angle(&y, t.dir(), cy).abs());
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &a in &alphas {
        for &b in &betas {
            let g = a + b - std::f64::consts::PI;
            lo = lo.min(g);
            hi = hi.max(g);
        }
    }
    if lo <= 0.0 && hi >= 0.0 {
        Ok(0.0)
    } else if lo.abs() <= hi.abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}

/// Finds the balanced chord through boundary antipodes (equal arclengths) by
/// a sign-change scan plus bisection on the angle defect.
pub fn balanced_chord(d: &ConvexPolyDomain, o: &ModelPoint) -> Result<BalancedChord> {
    d.kappa().same(o.kappa())?;
    let half = d.perimeter() / 2.0;
    let n_scan = 256.max(d.len() / 8);
    let mut prev_s = 0.0;
    let mut prev_g = chord_imbalance(d, 0.0)?;
    let mut found: Option<(f64, f64)> = None;
    for i in 1..=n_scan {
        let s = half * i as f64 / n_scan as f64;
        let g = chord_imbalance(d, s)?;
        if prev_g == 0.0 || prev_g.signum() != g.signum() {
            found = Some((prev_s, s));
            break;
        }
        prev_s = s;
        prev_g = g;
    }
    let (mut lo, mut hi) = found.ok_or(Error::RootNotBracketed("chord angle defect"))?;
    let g_lo = chord_imbalance(d, lo)?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let g = chord_imbalance(d, mid)?;
        if g == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s_p = 0.5 * (lo + hi);
    // corner-pinned roots: place the endpoint exactly on the vertex so the
    // cone balance applies and downstream rings stay clean
    let (i, u) = d.locate(s_p);
    let e = d.edge_len(i);
    if u <= VERTEX_SNAP {
        s_p = d.cumulative_arclength()[i];
    } else if e - u <= VERTEX_SNAP {
        s_p = d.cumulative_arclength()[i] + e;
    }
    let p_star = d.point_at_arclength(s_p)?;
    let q_star = d.point_at_arclength(s_p + half)?;
    let m = crate::kernel::GeodesicSegment::new(p_star, q_star)?.midpoint()?;
    Ok(BalancedChord {
        p_star,
        q_star,
        m,
        s_p,
        s_q: s_p + half,
        residual: chord_imbalance(d, s_p)?.abs(),
    })
}

/// Replaces the half of ∂D beyond the balanced chord with the point
/// reflection (through the chord midpoint) of the first half. The result is
/// centrally symmetric with the same perimeter, and stays λ-convex.
pub fn reflect_arc(d: &ConvexPolyDomain, chord: &BalancedChord) -> Result<ConvexPolyDomain> {
    let n = d.len();
    let cum = d.cumulative_arclength();
    let s_a = chord.s_p;
    let per = d.perimeter();
    let h_min = per / n as f64 / 4.0;
    // vertices with unwrapped arclength strictly inside (s_a, s_a + L/2)
    let mut tagged: Vec<(f64, ModelPoint)> = Vec::new();
    for i in 0..n {
        let mut s = cum[i];
        if s <= s_a {
            s += per;
        }
        if s > s_a && s < s_a + per / 2.0 {
            tagged.push((s, d.boundary()[i]));
        }
    }
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut interior: Vec<ModelPoint> = tagged.into_iter().map(|(_, p)| p).collect();
    // drop interior vertices that crowd the chord endpoints
    while let Some(first) = interior.first() {
        if distance(first, &chord.p_star)? < h_min {
            interior.remove(0);
        } else {
            break;
        }
    }
    while let Some(last) = interior.last() {
        if distance(last, &chord.q_star)? < h_min {
            interior.pop();
        } else {
            break;
        }
    }
    let mut ring = Vec::with_capacity(2 * interior.len() + 2);
    ring.push(chord.p_star);
    ring.extend(interior.iter().copied());
    ring.push(chord.q_star);
    for p in &interior {
        ring.push(point_reflection(&chord.m, p)?);
    }
    ConvexPolyDomain::new(d.kappa(), ring)
}

// ---------------------------------------------------------------------------
// rolling check

/// Result of the supporting-region (Blaschke rolling) containment test.
#[derive(Debug, Clone)]
pub struct RollingReport {
    pub ok: bool,
    /// Maximum signed protrusion of any vertex outside any supporting F_λ.
    pub max_violation: f64,
}

/// At `n_samples` boundary points, builds the supporting F_λ (tangent from
/// the vertex-bisector direction) and verifies every domain vertex lies
/// inside within tol.
pub fn rolling_check(
    d: &ConvexPolyDomain,
    lambda: f64,
    n_samples: usize,
    tol: f64,
) -> Result<RollingReport> {
    let n = d.len();
    let mut worst = 0.0f64;
    for j in 0..n_samples {
        let i = j * n / n_samples;
        let s = d.cumulative_arclength()[i];
        let tangent = d.tangent_at_arclength(s)?;
        let x = d.boundary()[i];
        let inward = TangentVector::new(x, rotate90(&x, tangent.dir()))?;
        let f = f_lambda_supporting_at(&x, &inward, lambda)?;
        for v in d.boundary() {
            let depth = f.signed_inside_distance(v)?;
            if -depth > worst {
                worst = -depth;
            }
        }
    }
    Ok(RollingReport {
        ok: worst <= tol,
        max_violation: worst,
    })
}

// ---------------------------------------------------------------------------
// radial profiles (shape comparison around a center)

/// Radial distance profile of a boundary ring around `center`, resampled on
/// `bins` uniform angles by linear interpolation in angle.
pub fn radial_profile(
    points: &[ModelPoint],
    center: &ModelPoint,
    bins: usize,
) -> Result<Vec<f64>> {
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        let v = log_dir(center, p)?;
        // frame: project onto a fixed tangent basis at the center
        let e1 = stencil_dirs(center, 1)[0];
        let e2 = rotate90(center, e1);
        let kappa = center.kappa();
        let a = kappa.form(v, e2).atan2(kappa.form(v, e1));
        samples.push((wrap_pos(a), distance(center, p)?));
    }
    samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    let tau = std::f64::consts::TAU;
    let m = samples.len();
    let mut out = Vec::with_capacity(bins);
    for b in 0..bins {
        let a = tau * b as f64 / bins as f64;
        let j = samples.partition_point(|s| s.0 <= a) % m;
        let i = (j + m - 1) % m;
        let (a0, r0) = samples[i];
        let (a1, r1) = samples[j];
        let span = wrap_pos(a1 - a0);
        let f = if span < 1e-12 {
            0.0
        } else {
            wrap_pos(a - a0) / span
        };
        out.push(r0 + (r1 - r0) * f.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Resamples a closed boundary ring at `n` points uniformly spaced in
/// arclength (chordal arclength of the ring's own polygon).
pub fn resample_ring(ring: &[ModelPoint], n: usize) -> Result<Vec<ModelPoint>> {
    let m = ring.len();
    let mut cum = Vec::with_capacity(m + 1);
    let mut total = 0.0;
    cum.push(0.0);
    for i in 0..m {
        total += distance(&ring[i], &ring[(i + 1) % m])?;
        cum.push(total);
    }
    let mut out = Vec::with_capacity(n);
    let mut j = 0usize;
    for b in 0..n {
        let s = total * b as f64 / n as f64;
        while cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let p = ring[j];
        if seg < 1e-15 || s <= cum[j] {
            out.push(p);
            continue;
        }
        let q = ring[(j + 1) % m];
        let v = TangentVector::new(p, log_dir(&p, &q)?)?;
        out.push(exp_map(&v, s - cum[j])?);
    }
    Ok(out)
}

/// Distance-to-center profile of a ring indexed by arclength: `n` uniform
/// arclength samples, each mapped to its distance from `center`. Invariant
/// under rigid motions and, being 1-Lipschitz in arclength, free of the
/// corner-spike amplification that angle-binned radial profiles suffer.
pub fn arclength_profile(ring: &[ModelPoint], center: &ModelPoint, n: usize) -> Result<Vec<f64>> {
    resample_ring(ring, n)?
        .iter()
        .map(|p| distance(center, p))
        .collect()
}

/// Smallest sup-difference between two equal-length radial profiles over all
/// cyclic shifts and reversal (rotation / reflection alignment).
pub fn profile_mismatch(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut best = f64::INFINITY;
    let mut rev: Vec<f64> = b.to_vec();
    rev.reverse();
    for cand in [b, rev.as_slice()] {
        for shift in 0..n {
            let mut worst = 0.0f64;
            for i in 0..n {
                worst = worst.max((a[i] - cand[(i + shift) % n]).abs());
                if worst >= best {
                    break;
                }
            }
            best = best.min(worst);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lune::{build_lune, rho};
    use std::f64::consts::PI;

    fn kv(k: f64) -> Curvature {
        Curvature::new(k).unwrap()
    }

    fn flat_ring(pts: &[[f64; 2]]) -> ConvexPolyDomain {
        let ring = pts
            .iter()
            .map(|c| ModelPoint::new(kv(0.0), [c[0], c[1], 0.0]).unwrap())
            .collect();
        ConvexPolyDomain::new(kv(0.0), ring).unwrap()
    }

    fn unit_square() -> ConvexPolyDomain {
        flat_ring(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn flat_circle(r: f64, n: usize) -> ConvexPolyDomain {
        let ring: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        flat_ring(&ring)
    }

    fn lune_domain(kappa: f64, lambda: f64, length: f64, h: f64) -> ConvexPolyDomain {
        let l = build_lune(kv(kappa), lambda, length).unwrap();
        ConvexPolyDomain::new(kv(kappa), l.sample_boundary(h)).unwrap()
    }

    #[test]
    fn square_perimeter_area() {
        let d = unit_square();
        assert!((d.perimeter() - 4.0).abs() < 1e-12);
        assert!((d.area().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disk_perimeter_area() {
        let d = flat_circle(1.0, 4000);
        assert!((d.perimeter() - 2.0 * PI).abs() < 1e-5);
        assert!((d.area().unwrap() - PI).abs() < 1e-5);
    }

    #[test]
    fn spherical_octant_area() {
        // triangle with three right angles, densified edges
        let k = kv(1.0);
        let verts = [
            ModelPoint::new(k, [1.0, 0.0, 0.0]).unwrap(),
            ModelPoint::new(k, [0.0, 1.0, 0.0]).unwrap(),
            ModelPoint::new(k, [0.0, 0.0, 1.0]).unwrap(),
        ];
        let mut ring = Vec::new();
        for i in 0..3 {
            let a = verts[i];
            let b = verts[(i + 1) % 3];
            let v = TangentVector::new_unit(a, log_dir(&a, &b).unwrap()).unwrap();
            let len = distance(&a, &b).unwrap();
            for j in 0..200 {
                ring.push(exp_map(&v, len * j as f64 / 200.0).unwrap());
            }
        }
        let d = ConvexPolyDomain::new(k, ring).unwrap();
        assert!((d.area().unwrap() - PI / 2.0).abs() < 1e-9);
        // Gauss-Bonnet: swerve + area = 2 pi on the unit sphere
        let gb = d.swerve().unwrap() + d.area().unwrap() - 2.0 * PI;
        assert!(gb.abs() < 1e-9, "residual {gb}");
    }

    #[test]
    fn square_inradius_circumradius() {
        let d = unit_square();
        let (r, c) = inradius(&d, 1e-6).unwrap();
        assert!((r - 0.5).abs() < 1e-6);
        assert!((c.coords()[0] - 0.5).abs() < 1e-4 && (c.coords()[1] - 0.5).abs() < 1e-4);
        let (rr, cc) = circumradius(&d, 1e-6).unwrap();
        assert!((rr - 2f64.sqrt() / 2.0).abs() < 1e-5, "R {rr}");
        assert!((cc.coords()[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn disk_inradius_circumradius() {
        let d = flat_circle(1.0, 3000);
        let (r, _) = inradius(&d, 1e-6).unwrap();
        assert!((r - 1.0).abs() < 1e-5, "r {r}");
        let (rr, _) = circumradius(&d, 1e-6).unwrap();
        assert!((rr - 1.0).abs() < 1e-5, "R {rr}");
    }

    #[test]
    fn lune_inradius_matches_rho() {
        let d = lune_domain(0.0, 1.0, PI, 1e-3);
        let (r, _) = inradius(&d, 1e-6).unwrap();
        assert!((r - (1.0 - (PI / 4.0).cos())).abs() < 1e-5, "r {r}");
        let (rr, _) = circumradius(&d, 1e-6).unwrap();
        assert!((rr - (PI / 4.0).sin()).abs() < 1e-4, "R {rr}");
    }

    #[test]
    fn lambda_convexity_circles() {
        let d1 = flat_circle(1.0, 2000);
        let h = d1.perimeter() / 2000.0;
        assert!(is_lambda_convex(&d1, 1.0, 5.0 * h).ok);
        let d2 = flat_circle(2.0, 2000);
        let rep = is_lambda_convex(&d2, 1.0, 5.0 * (d2.perimeter() / 2000.0));
        assert!(!rep.ok);
        assert!(rep.min_margin < -0.1, "margin {}", rep.min_margin);
    }

    #[test]
    fn lambda_convexity_lune_with_corners() {
        let d = lune_domain(0.0, 1.0, PI, 1e-3);
        let rep = is_lambda_convex(&d, 1.0, 5e-3);
        assert!(rep.ok, "margin {}", rep.min_margin);
    }

    #[test]
    fn generator_deterministic_and_valid() {
        for (kappa, lambda) in [(1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (-1.0, 1.0), (-1.0, 0.5)] {
            let h = 2e-3;
            let d1 = generate_lambda_convex(kv(kappa), lambda, 42, 5, h).unwrap();
            let d2 = generate_lambda_convex(kv(kappa), lambda, 42, 5, h).unwrap();
            assert_eq!(d1.len(), d2.len());
            for (a, b) in d1.boundary().iter().zip(d2.boundary()) {
                assert_eq!(a.coords(), b.coords());
            }
            let rep = is_lambda_convex(&d1, lambda, 5.0 * lambda.max(1.0) * h);
            assert!(rep.ok, "kappa={kappa} lambda={lambda} margin={}", rep.min_margin);
            // Gauss-Bonnet on the generated ring
            let gb = d1.swerve().unwrap() + kappa * d1.area().unwrap() - 2.0 * PI;
            assert!(gb.abs() < 10.0 * h, "kappa={kappa} lambda={lambda} gb={gb}");
        }
    }

    #[test]
    fn generator_perimeter_below_disk_perimeter() {
        let d = generate_lambda_convex(kv(0.0), 1.0, 42, 5, 1e-3).unwrap();
        assert!(d.perimeter() < 2.0 * PI);
    }

    #[test]
    fn generator_rejects_one_support() {
        assert!(generate_lambda_convex(kv(0.0), 1.0, 1, 1, 1e-3).is_err());
    }

    #[test]
    fn generated_inradius_meets_bound() {
        for (kappa, lambda) in [(1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (-1.0, 1.0), (-1.0, 0.5)] {
            let h = 2e-3;
            let d = generate_lambda_convex(kv(kappa), lambda, 7, 4, h).unwrap();
            let (r, _) = inradius(&d, 1e-6).unwrap();
            let bound = rho(kv(kappa), lambda, d.perimeter()).unwrap();
            assert!(
                r >= bound - 5e-3,
                "kappa={kappa} lambda={lambda}: r={r} bound={bound}"
            );
        }
    }

    #[test]
    fn two_supports_make_a_lune() {
        let h = 1e-3;
        let d = generate_lambda_convex(kv(0.0), 1.0, 9, 2, h).unwrap();
        let (r, _) = inradius(&d, 1e-6).unwrap();
        let bound = rho(kv(0.0), 1.0, d.perimeter()).unwrap();
        assert!((r - bound).abs() < 1e-4, "r={r} bound={bound}");
    }

    #[test]
    fn balanced_chord_on_disk() {
        let d = flat_circle(1.0, 2048);
        let o = ModelPoint::origin(kv(0.0));
        let c = balanced_chord(&d, &o).unwrap();
        assert!(c.residual < 1e-6, "residual {}", c.residual);
        assert!((distance(&c.p_star, &c.q_star).unwrap() - 2.0).abs() < 1e-4);
        assert!(c.m.coords()[0].abs() < 1e-4 && c.m.coords()[1].abs() < 1e-4);
    }

    #[test]
    fn chord_antisymmetry() {
        let d = generate_lambda_convex(kv(0.0), 1.0, 5, 4, 1e-3).unwrap();
        let half = d.perimeter() / 2.0;
        for i in 0..100 {
            let s = d.perimeter() * i as f64 / 100.0;
            let g1 = chord_imbalance(&d, s).unwrap();
            let g2 = chord_imbalance(&d, s + half).unwrap();
            assert!((g1 + g2).abs() < 1e-8, "s={s}: {g1} vs {g2}");
        }
    }

    #[test]
    fn balanced_chord_on_generated_domain() {
        for (kappa, lambda) in [(1.0, 1.0), (0.0, 1.0), (-1.0, 0.5)] {
            let d = generate_lambda_convex(kv(kappa), lambda, 11, 4, 1e-3).unwrap();
            let c = balanced_chord(&d, &d.interior_point()).unwrap();
            assert!(c.residual < 1e-6, "kappa={kappa} residual {}", c.residual);
            assert!(((c.s_q - c.s_p) - d.perimeter() / 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn reflect_arc_disk_is_disk() {
        let d = flat_circle(1.0, 1024);
        let c = balanced_chord(&d, &ModelPoint::origin(kv(0.0))).unwrap();
        let g = reflect_arc(&d, &c).unwrap();
        assert!((g.perimeter() - d.perimeter()).abs() < 1e-3);
        let (r, _) = inradius(&g, 1e-6).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "r {r}");
    }

    #[test]
    fn reflect_arc_stays_lambda_convex() {
        for (kappa, lambda) in [(0.0, 1.0), (-1.0, 1.0), (1.0, 1.0)] {
            let h = 1e-3;
            let d = generate_lambda_convex(kv(kappa), lambda, 13, 4, h).unwrap();
            let c = balanced_chord(&d, &d.interior_point()).unwrap();
            let g = reflect_arc(&d, &c).unwrap();
            assert!((g.perimeter() - d.perimeter()).abs() < 2e-2 * d.perimeter());
            let rep = is_lambda_convex(&g, lambda, 10.0 * lambda.max(1.0) * h);
            assert!(rep.ok, "kappa={kappa} margin {}", rep.min_margin);
            // central symmetry about the chord midpoint
            let m = &c.m;
            for i in (0..g.len()).step_by(97) {
                let r = point_reflection(m, &g.boundary()[i]).unwrap();
                let dmin = g
                    .boundary()
                    .iter()
                    .map(|v| distance(&r, v).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!(dmin < 5.0 * h, "kappa={kappa} i={i} dmin={dmin}");
            }
        }
    }

    #[test]
    fn rolling_unit_circle_exact() {
        let d = flat_circle(1.0, 1500);
        let rep = rolling_check(&d, 1.0, 25, 1e-2).unwrap();
        assert!(rep.ok, "violation {}", rep.max_violation);
        let small = flat_circle(0.5, 1500);
        let rep = rolling_check(&small, 1.0, 25, 1e-2).unwrap();
        assert!(rep.ok && rep.max_violation <= 1e-12);
        let big = flat_circle(2.0, 1500);
        let rep = rolling_check(&big, 1.0, 25, 1e-2).unwrap();
        assert!(!rep.ok);
        assert!(rep.max_violation > 0.5, "violation {}", rep.max_violation);
    }

    #[test]
    fn ray_exit_agrees_with_signed_distance() {
        // closed-form exits vs bisection on the region gauge
        for (kappa, lambda) in [(1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (-1.0, 1.0), (-1.0, 0.5)] {
            let k = kv(kappa);
            let o = ModelPoint::origin(k);
            let anchor_dir = TangentVector::new(o, [0.3f64.cos(), 0.3f64.sin(), 0.0]).unwrap();
            let s = exp_map(&anchor_dir, 0.4).unwrap();
            let inward = TangentVector::new_unit(s, log_dir(&s, &o).unwrap()).unwrap();
            let f = f_lambda_supporting_at(&s, &inward, lambda).unwrap();
            for j in 0..16 {
                let phi = 2.0 * PI * j as f64 / 16.0;
                let u = [phi.cos(), phi.sin(), 0.0];
                let closed = ray_exit(&f, &o, u);
                // bisection oracle
                let seg = TangentVector::new(o, u).unwrap();
                let gauge = |t: f64| {
                    f.signed_inside_distance(&exp_map(&seg, t).unwrap()).unwrap()
                };
                let mut hi = 0.1;
                let mut reached = None;
                for _ in 0..60 {
                    if gauge(hi) < 0.0 {
                        reached = Some(hi);
                        break;
                    }
                    hi *= 1.4;
                    if kappa > 0.0 && hi > 2.0 * PI {
                        break;
                    }
                    if hi > 1e4 {
                        break;
                    }
                }
                match (closed, reached) {
                    (Some(t), Some(mut b)) => {
                        let mut a = 0.0;
                        for _ in 0..70 {
                            let mid = 0.5 * (a + b);
                            if gauge(mid) > 0.0 {
                                a = mid;
                            } else {
                                b = mid;
                            }
                        }
                        let t_ref = 0.5 * (a + b);
                        assert!(
                            (t - t_ref).abs() < 1e-9,
                            "kappa={kappa} lambda={lambda} phi={phi}: {t} vs {t_ref}"
                        );
                    }
                    (None, None) => {}
                    (c, r) => panic!(
                        "kappa={kappa} lambda={lambda} phi={phi}: closed={c:?} bisect={r:?}"
                    ),
                }
            }
        }
    }

    #[test]
    fn radial_profile_of_circle_is_flat() {
        let d = flat_circle(1.0, 600);
        let prof = radial_profile(d.boundary(), &ModelPoint::origin(kv(0.0)), 128).unwrap();
        for r in &prof {
            assert!((r - 1.0).abs() < 1e-4);
        }
        assert!(profile_mismatch(&prof, &prof) < 1e-12);
    }

    #[test]
    fn profile_mismatch_detects_shape_difference() {
        let a = radial_profile(
            flat_circle(1.0, 600).boundary(),
            &ModelPoint::origin(kv(0.0)),
            128,
        )
        .unwrap();
        let lune = lune_domain(0.0, 1.0, PI, 2e-3);
        let (_, inc) = inradius(&lune, 1e-6).unwrap();
        let b = radial_profile(lune.boundary(), &inc, 128).unwrap();
        assert!(profile_mismatch(&a, &b) > 0.2);
    }

    #[test]
    fn validate_sampling_limits() {
        let d = unit_square();
        assert!(d.validate_sampling(1e-3).is_err()); // 4 vertices, edges 1.0
        let c = flat_circle(1.0, 5000);
        assert!(c.validate_sampling(2e-3).is_ok());
    }

    #[test]
    fn rejects_nonconvex_ring() {
        let r = ConvexPolyDomain::new(
            kv(0.0),
            [[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [1.0, 2.0]]
                .iter()
                .map(|c| ModelPoint::new(kv(0.0), [c[0], c[1], 0.0]).unwrap())
                .collect(),
        );
        assert!(matches!(r, Err(Error::NotConvex { .. })));
    }
}
