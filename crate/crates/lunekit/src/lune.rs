//! λ-convex lunes and the sharp inradius bound ρ_λ(L).
//!
//! ρ_λ is evaluated in closed form per curvature branch and cross-checked
//! against an independent geometric construction (`build_lune` +
//! `lune_inradius_numeric`). The hypercycle branch follows the
//! Fermi-coordinate derivation,
//!   ρ = (1/k)·[atanh(λ/k) − atanh((λ/k)/cosh(L·√(k²−λ²)/4))],
//! which the construction oracle confirms to 1e-10.

use serde::{Deserialize, Serialize};

use crate::curves::{classify, f_lambda_perimeter, f_lambda_radius, f_lambda_supporting_at};
use crate::curves::{hypercycle_axis_distance, ConstantCurvatureArc, CurveKind, FLambdaRegion};
use crate::error::{Error, Result};
use crate::kernel::{
    distance, exp_map, point_reflection, signed_angle, Curvature, ModelPoint, TangentVector,
};

/// Closed-form branch of ρ_λ, named by the governing parameter regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhoBranch {
    /// κ > 0 (spherical cap lune).
    SphereCircle,
    /// κ = 0 (Euclidean sagitta).
    Flat,
    /// κ < 0, λ > √−κ (hyperbolic circle).
    HypCircle,
    /// κ < 0, λ = √−κ within the cutover band (horocycle).
    Horocycle,
    /// κ < 0, λ < √−κ (hypercycle).
    Hypercycle,
}

impl RhoBranch {
    /// Stable short label used in CLI output and reports.
    pub fn label(self) -> &'static str {
        match self {
            RhoBranch::SphereCircle => "eq2",
            RhoBranch::Flat => "eq3",
            RhoBranch::HypCircle => "eq4",
            RhoBranch::Horocycle => "eq5",
            RhoBranch::Hypercycle => "eq7",
        }
    }
}

/// Selects the active closed-form branch for (κ, λ).
pub fn rho_branch(kappa: Curvature, lambda: f64) -> Result<RhoBranch> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    let k2 = kappa.kappa();
    if k2 > crate::kernel::KAPPA_FLAT_EPS {
        Ok(RhoBranch::SphereCircle)
    } else if k2 >= -crate::kernel::KAPPA_FLAT_EPS {
        Ok(RhoBranch::Flat)
    } else {
        match classify(kappa, lambda)? {
            CurveKind::Circle => Ok(RhoBranch::HypCircle),
            CurveKind::Horocycle => Ok(RhoBranch::Horocycle),
            CurveKind::Hypercycle => Ok(RhoBranch::Hypercycle),
        }
    }
}

/// Natural domain I_λ of ρ_λ: [0, L_λ] when F_λ is compact, [0, ∞) otherwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RhoDomain {
    pub kappa: Curvature,
    pub lambda: f64,
    /// Upper endpoint L_λ; +∞ for the unbounded cases.
    pub upper: f64,
}

impl RhoDomain {
    pub fn contains(&self, length: f64) -> bool {
        length >= 0.0 && length <= self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }
}

pub fn rho_domain(kappa: Curvature, lambda: f64) -> Result<RhoDomain> {
    Ok(RhoDomain {
        kappa,
        lambda,
        upper: f_lambda_perimeter(kappa, lambda)?,
    })
}

/// The inradius ρ_λ(L) of the λ-convex lune with boundary length L.
pub fn rho(kappa: Curvature, lambda: f64, length: f64) -> Result<f64> {
    let dom = rho_domain(kappa, lambda)?;
    if !dom.contains(length) {
        return Err(Error::LengthOutOfDomain {
            length,
            upper: dom.upper,
        });
    }
    let l = lambda;
    Ok(match rho_branch(kappa, lambda)? {
        RhoBranch::Flat => (1.0 - (length * l / 4.0).cos()) / l,
        RhoBranch::SphereCircle => {
            let k = kappa.k();
            let w = (l * l + k * k).sqrt();
            ((k / l).atan() - ((k / l) * (w * length / 4.0).cos()).atan()) / k
        }
        RhoBranch::HypCircle => {
            let k = kappa.k();
            let w = (l * l - k * k).sqrt();
            ((k / l).atanh() - ((k / l) * (w * length / 4.0).cos()).atanh()) / k
        }
        RhoBranch::Horocycle => {
            let k = kappa.k();
            (1.0 + length * length * k * k / 16.0).ln() / (2.0 * k)
        }
        RhoBranch::Hypercycle => {
            let k = kappa.k();
            let w = (k * k - l * l).sqrt();
            ((l / k).atanh() - ((l / k) / (w * length / 4.0).cosh()).atanh()) / k
        }
    })
}

/// Analytic dρ_λ/dL of the active branch; strictly positive on the interior.
pub fn rho_derivative(kappa: Curvature, lambda: f64, length: f64) -> Result<f64> {
    let dom = rho_domain(kappa, lambda)?;
    if length <= 0.0 || length >= dom.upper {
        return Err(Error::LengthOutOfDomain {
            length,
            upper: dom.upper,
        });
    }
    let l = lambda;
    Ok(match rho_branch(kappa, lambda)? {
        RhoBranch::Flat => (length * l / 4.0).sin() / 4.0,
        RhoBranch::SphereCircle => {
            let k = kappa.k();
            let w = (l * l + k * k).sqrt();
            let th = w * length / 4.0;
            let c = th.cos();
            (w / (4.0 * l)) * th.sin() / (1.0 + (k * k / (l * l)) * c * c)
        }
        RhoBranch::HypCircle => {
            let k = kappa.k();
            let w = (l * l - k * k).sqrt();
            let th = w * length / 4.0;
            let c = th.cos();
            (w / (4.0 * l)) * th.sin() / (1.0 - (k * k / (l * l)) * c * c)
        }
        RhoBranch::Horocycle => {
            let k = kappa.k();
            length * k / (16.0 + length * length * k * k)
        }
        RhoBranch::Hypercycle => {
            let k = kappa.k();
            let w = (k * k - l * l).sqrt();
            let x = w * length / 4.0;
            let ch = x.cosh();
            (l * w / (4.0 * k * k)) * x.sinh() / (ch * ch - l * l / (k * k))
        }
    })
}

// ---------------------------------------------------------------------------

/// A λ-convex lune: intersection of two F_λ regions whose boundary arcs have
/// equal length L/2, centrally symmetric about its center m.
#[derive(Debug, Clone)]
pub struct Lune {
    pub kappa: Curvature,
    pub lambda: f64,
    /// Total boundary length.
    pub boundary_length: f64,
    /// Center of symmetry.
    pub center: ModelPoint,
    /// Axis of symmetry at m, pointing at the midpoint of the first arc.
    pub axis: TangentVector,
    /// The two boundary arcs; each parametrized over [-L/4, L/4] about its
    /// midpoint, counterclockwise.
    pub arcs: [ConstantCurvatureArc; 2],
    /// The two corners (p*, q*).
    pub corners: [ModelPoint; 2],
    /// The two supporting regions whose intersection is the lune.
    pub regions: [FLambdaRegion; 2],
}

/// One lune trial at arc-midpoint half-width t: constructs the opposed
/// supporting regions and returns (half-arc length u*, the pieces).
/// u* is the arclength from the arc midpoint to the corner.
fn lune_trial(
    kappa: Curvature,
    lambda: f64,
    t: f64,
) -> Result<(f64, [FLambdaRegion; 2], ConstantCurvatureArc)> {
    let m = ModelPoint::origin(kappa);
    let e2 = TangentVector::new(m, [0.0, 1.0, 0.0])?;
    let s_up = exp_map(&e2, t)?;
    let s_down = point_reflection(&m, &s_up)?;
    // inward normal at the arc midpoint points back at m
    let up = f_lambda_supporting_at(&s_up, &TangentVector::new_unit(s_up, {
        let (sn, cs) = crate::kernel::generalized_trig(kappa, t);
        crate::kernel::sub(
            crate::kernel::scale(m.coords(), kappa.kappa() * sn),
            crate::kernel::scale([0.0, 1.0, 0.0], cs),
        )
    })?, lambda)?;
    let down_n = {
        let (sn, cs) = crate::kernel::generalized_trig(kappa, t);
        crate::kernel::sub(
            crate::kernel::scale(m.coords(), kappa.kappa() * sn),
            crate::kernel::scale([0.0, -1.0, 0.0], cs),
        )
    };
    let down = f_lambda_supporting_at(&s_down, &TangentVector::new_unit(s_down, down_n)?, lambda)?;

    // upper boundary arc, centered at its midpoint; corner where it exits
    // the opposite region (signed inside distance crosses zero)
    let probe = up.boundary_arc_at(&s_up, -1.0, 1.0)?;
    let g = |u: f64| -> Result<f64> { down.signed_inside_distance(&probe.point_unclamped(u)) };
    if g(0.0)? <= 0.0 {
        return Err(Error::RootNotBracketed("lune corner search"));
    }
    // cap the search at half the closed boundary for compact kinds
    let u_cap = match classify(kappa, lambda)? {
        CurveKind::Circle => f_lambda_perimeter(kappa, lambda)? / 2.0,
        _ => f64::INFINITY,
    };
    let mut hi = (0.25f64).min(u_cap);
    let mut lo = 0.0;
    while g(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi >= u_cap {
            hi = u_cap;
            if g(hi)? > 0.0 {
                return Err(Error::RootNotBracketed("lune corner search"));
            }
            break;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), [up, down], probe))
}

/// Largest admissible arc-midpoint half-width for the bisection bracket.
fn lune_t_max(kappa: Curvature, lambda: f64) -> Result<f64> {
    Ok(match classify(kappa, lambda)? {
        // t -> r_lambda degenerates into the full disk F_lambda
        CurveKind::Circle => f_lambda_radius(kappa, lambda)?.expect("circle kind"),
        CurveKind::Horocycle => f64::INFINITY,
        // beyond the axis distance the two hypercycle boundaries no longer meet
        CurveKind::Hypercycle => hypercycle_axis_distance(kappa, lambda),
    })
}

/// Constructs the λ-convex lune of boundary length L by bisection on the
/// half-width of the two supporting regions (boundary length is monotone in
/// the width; 80 iterations).
pub fn build_lune(kappa: Curvature, lambda: f64, length: f64) -> Result<Lune> {
    let dom = rho_domain(kappa, lambda)?;
    if !(length > 0.0) || length >= dom.upper {
        return Err(Error::LengthOutOfDomain {
            length,
            upper: dom.upper,
        });
    }
    let t_max = lune_t_max(kappa, lambda)?;
    // boundary length of the trial lune at width t is 4 u*(t)
    let ell = |t: f64| -> Result<f64> { Ok(4.0 * lune_trial(kappa, lambda, t)?.0) };
    let (mut lo, mut hi);
    if t_max.is_finite() {
        lo = t_max * 1e-12;
        hi = t_max * (1.0 - 1e-12);
    } else {
        lo = 1e-12;
        hi = 1.0;
        while ell(hi)? < length {
            lo = hi;
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::NonConvergence("lune width bracket"));
            }
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if ell(mid)? < length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let (u, [up, down], probe) = lune_trial(kappa, lambda, t)?;
    let m = ModelPoint::origin(kappa);
    let axis = TangentVector::new(m, [0.0, 1.0, 0.0])?;
    let arc_up = probe.with_range(-u, u);
    let s_mid = probe.arc_point(0.0)?;
    let s_down = point_reflection(&m, &s_mid)?;
    let arc_down = down.boundary_arc_at(&s_down, -u, u)?;
    let p_star = arc_up.arc_point(u)?;
    let q_star = arc_up.arc_point(-u)?;
    Ok(Lune {
        kappa,
        lambda,
        boundary_length: 4.0 * u,
        center: m,
        axis,
        arcs: [arc_up, arc_down],
        corners: [p_star, q_star],
        regions: [up, down],
    })
}

impl Lune {
    /// Inradius from the construction: distance from the center to the
    /// midpoint of the first arc (the deepest boundary point).
    pub fn inradius_numeric(&self) -> Result<f64> {
        let mid = self.arcs[0].arc_point(0.0)?;
        distance(&self.center, &mid)
    }

    /// Circumradius: distance from the center to a corner.
    pub fn corner_distance(&self) -> Result<f64> {
        distance(&self.center, &self.corners[0])
    }

    /// Closed counterclockwise boundary ring sampled at arclength step ≤ h.
    /// Orientation: upper arc traversed backward (corner q* has negative
    /// parameter), so the ring runs q* → arc₀ → p* → arc₁.
    pub fn sample_boundary(&self, h: f64) -> Vec<ModelPoint> {
        let mut ring = self.arcs[0].sample(h, true);
        ring.extend(self.arcs[1].sample(h, true));
        ring
    }

    /// Exact enclosed area. Flat case by the circular-segment formula,
    /// curved cases from total turning: κ·A + λL + 2·corner turn = 2π.
    pub fn area(&self) -> Result<f64> {
        let l = self.boundary_length;
        if self.kappa.is_flat() {
            if self.lambda <= 0.0 {
                return Ok(0.0);
            }
            let r = 1.0 / self.lambda;
            let theta = 0.5 * l * self.lambda;
            return Ok(r * r * (theta - theta.sin()));
        }
        let u = 0.25 * l;
        // corner p* is arcs[0] at +L/4 and arcs[1] at -L/4
        let incoming = self.arcs[0].tangent_at(u)?;
        let outgoing = self.arcs[1].tangent_at(-u)?;
        let turn = signed_angle(&self.corners[0], incoming.dir(), outgoing.dir());
        let swerve = self.lambda * l + 2.0 * turn;
        Ok((2.0 * std::f64::consts::PI - swerve) / self.kappa.kappa())
    }
}

/// `lune_inradius_numeric` spec name (free-function form).
pub fn lune_inradius_numeric(lune: &Lune) -> Result<f64> {
    lune.inradius_numeric()
}

// ---------------------------------------------------------------------------

/// One row of a phase-transition probe at a given ε.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseGap {
    pub eps: f64,
    /// |ρ at λ = k(1+ε), circle branch − ρ at λ = k, horocycle branch|.
    pub gap_from_circle: f64,
    /// |ρ at λ = k(1−ε), hypercycle branch − ρ at λ = k|.
    pub gap_from_hypercycle: f64,
    /// |ρ at κ = ±ε² − flat ρ| probing the κ → 0 limit at λ = 1; NaN when
    /// L falls outside I_λ for the flat or perturbed branch.
    pub gap_flat_pos: f64,
    pub gap_flat_neg: f64,
}

/// Phase-transition report of Remark-style continuity across branch
/// boundaries: λ → √−κ from both sides, and κ → 0 from both signs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseTransitionReport {
    pub k: f64,
    pub length: f64,
    pub rows: Vec<PhaseGap>,
    /// Gaps decrease along the given ε sequence.
    pub monotone: bool,
}

pub fn phase_transition_check(k: f64, length: f64, eps_sequence: &[f64]) -> Result<PhaseTransitionReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidLambda(k));
    }
    let kappa = Curvature::new(-k * k)?;
    let base = rho(kappa, k, length)?;
    let flat = rho(Curvature::new(0.0)?, 1.0, length).ok();
    let mut rows = Vec::with_capacity(eps_sequence.len());
    for &eps in eps_sequence {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::ParamOutOfRange {
                name: "eps",
                value: eps,
                min: 0.0,
                max: 0.5,
            });
        }
        let up = rho(kappa, k * (1.0 + eps), length)?;
        let down = rho(kappa, k * (1.0 - eps), length)?;
        // kappa -> 0 probes use curvature eps^2 so the geometry scale matches
        let kp = Curvature::new(eps * eps)?;
        let kn = Curvature::new(-eps * eps)?;
        let flat_gap = |kc: Curvature| match flat {
            Some(f) => rho(kc, 1.0, length).map_or(f64::NAN, |v| (v - f).abs()),
            None => f64::NAN,
        };
        rows.push(PhaseGap {
            eps,
            gap_from_circle: (up - base).abs(),
            gap_from_hypercycle: (down - base).abs(),
            gap_flat_pos: flat_gap(kp),
            gap_flat_neg: flat_gap(kn),
        });
    }
    let monotone = rows.windows(2).all(|w| {
        w[1].gap_from_circle <= w[0].gap_from_circle + 1e-15
            && w[1].gap_from_hypercycle <= w[0].gap_from_hypercycle + 1e-15
    });
    Ok(PhaseTransitionReport {
        k,
        length,
        rows,
        monotone,
    })
}
