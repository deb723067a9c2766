//! SVG rendering of model-surface scenes.
//!
//! Curved geometry is emitted as dense polylines after projection, never as
//! SVG arc primitives, so images stay correct under every projection:
//! Poincaré disk for κ < 0, orthographic (optionally re-centered) for κ > 0,
//! identity for the flat plane.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernel::{exp_map, rotate90, Curvature, ModelPoint, TangentVector};

/// Planar projection of the model surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// κ = 0: drop the z coordinate.
    Plane,
    /// κ < 0: hyperboloid to unit disk, (x, y) / (R + z).
    PoincareDisk,
    /// κ > 0: orthographic view along +z after rotating `view_center`
    /// (default the north pole) to the top; the far hemisphere is clipped.
    OrthographicSphere { view_center: Option<ModelPoint> },
}

impl Projection {
    pub fn default_for(kappa: Curvature) -> Projection {
        let k = kappa.kappa();
        if k > 0.0 {
            Projection::OrthographicSphere { view_center: None }
        } else if k < 0.0 {
            Projection::PoincareDisk
        } else {
            Projection::Plane
        }
    }

    pub fn validate(&self, kappa: Curvature) -> Result<()> {
        let k = kappa.kappa();
        let ok = match self {
            Projection::Plane => k == 0.0,
            Projection::PoincareDisk => k < 0.0,
            Projection::OrthographicSphere { .. } => k > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ProjectionMismatch {
                projection: format!("{self:?}"),
                kappa: k,
            })
        }
    }
}

/// Stroke/fill attributes carried by each element.
#[derive(Debug, Clone)]
pub struct Style {
    pub stroke: String,
    pub width: f64,
    pub dashed: bool,
}

impl Style {
    pub fn line(stroke: &str, width: f64) -> Style {
        Style {
            stroke: stroke.to_string(),
            width,
            dashed: false,
        }
    }

    pub fn dashed(stroke: &str, width: f64) -> Style {
        Style {
            stroke: stroke.to_string(),
            width,
            dashed: true,
        }
    }
}

#[derive(Debug, Clone)]
enum Element {
    Polyline {
        points: Vec<ModelPoint>,
        closed: bool,
        style: Style,
    },
    Marker {
        at: ModelPoint,
        label: Option<String>,
        style: Style,
    },
}

/// A renderable collection of same-curvature elements plus a projection.
#[derive(Debug, Clone)]
pub struct RenderScene {
    pub kappa: Curvature,
    pub projection: Projection,
    elements: Vec<Element>,
}

impl RenderScene {
    pub fn new(kappa: Curvature, projection: Projection) -> Result<RenderScene> {
        projection.validate(kappa)?;
        Ok(RenderScene {
            kappa,
            projection,
            elements: Vec::new(),
        })
    }

    fn check(&self, p: &ModelPoint) -> Result<()> {
        self.kappa.same(p.kappa())
    }

    pub fn add_polyline(&mut self, points: Vec<ModelPoint>, closed: bool, style: Style) -> Result<()> {
        for p in &points {
            self.check(p)?;
        }
        self.elements.push(Element::Polyline {
            points,
            closed,
            style,
        });
        Ok(())
    }

    pub fn add_marker(&mut self, at: ModelPoint, label: Option<String>, style: Style) -> Result<()> {
        self.check(&at)?;
        self.elements.push(Element::Marker { at, label, style });
        Ok(())
    }

    /// Metric circle of geodesic radius r about `center`, sampled densely.
    pub fn add_metric_circle(&mut self, center: &ModelPoint, r: f64, style: Style) -> Result<()> {
        self.check(center)?;
        let n = 512;
        let e1 = first_tangent(center)?;
        let e2 = rotate90(center, e1.dir());
        let mut ring = Vec::with_capacity(n);
        for j in 0..n {
            let phi = std::f64::consts::TAU * j as f64 / n as f64;
            let d = [
                phi.cos() * e1.dir()[0] + phi.sin() * e2[0],
                phi.cos() * e1.dir()[1] + phi.sin() * e2[1],
                phi.cos() * e1.dir()[2] + phi.sin() * e2[2],
            ];
            let v = TangentVector::new(*center, d)?;
            ring.push(exp_map(&v, r)?);
        }
        self.elements.push(Element::Polyline {
            points: ring,
            closed: true,
            style,
        });
        Ok(())
    }

    /// Projects a point; None when hidden (far hemisphere).
    fn project(&self, p: &ModelPoint) -> Option<(f64, f64)> {
        let c = p.coords();
        match &self.projection {
            Projection::Plane => Some((c[0], c[1])),
            Projection::PoincareDisk => {
                let r_model = self.kappa.model_radius();
                Some((c[0] / (r_model + c[2]), c[1] / (r_model + c[2])))
            }
            Projection::OrthographicSphere { view_center } => {
                let q = match view_center {
                    Some(vc) => rotate_to_pole(vc.coords(), c),
                    None => c,
                };
                if q[2] < 0.0 {
                    None
                } else {
                    Some((q[0], q[1]))
                }
            }
        }
    }

    /// Serializes the scene as a standalone SVG 1.1 document.
    pub fn to_svg(&self) -> String {
        // gather projected geometry, splitting polylines at hidden runs
        let mut shapes: Vec<(Vec<(f64, f64)>, bool, Style)> = Vec::new();
        let mut markers: Vec<((f64, f64), Option<String>, Style)> = Vec::new();
        for e in &self.elements {
            match e {
                Element::Polyline {
                    points,
                    closed,
                    style,
                } => {
                    let mut looped: Vec<&ModelPoint> = points.iter().collect();
                    if *closed {
                        if let Some(first) = points.first() {
                            looped.push(first);
                        }
                    }
                    let mut run: Vec<(f64, f64)> = Vec::new();
                    let mut any_hidden = false;
                    for p in looped {
                        match self.project(p) {
                            Some(xy) => run.push(xy),
                            None => {
                                any_hidden = true;
                                if run.len() > 1 {
                                    shapes.push((std::mem::take(&mut run), false, style.clone()));
                                } else {
                                    run.clear();
                                }
                            }
                        }
                    }
                    if run.len() > 1 {
                        shapes.push((run, *closed && !any_hidden, style.clone()));
                    }
                }
                Element::Marker { at, label, style } => {
                    if let Some(xy) = self.project(at) {
                        markers.push((xy, label.clone(), style.clone()));
                    }
                }
            }
        }

        // bounds with a margin; Poincaré disk always shows the unit circle
        let mut min = (f64::INFINITY, f64::INFINITY);
        let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |(x, y): (f64, f64)| {
            min.0 = min.0.min(x);
            min.1 = min.1.min(y);
            max.0 = max.0.max(x);
            max.1 = max.1.max(y);
        };
        if self.projection == Projection::PoincareDisk {
            grow((-1.0, -1.0));
            grow((1.0, 1.0));
        }
        for (pts, _, _) in &shapes {
            for &xy in pts {
                grow(xy);
            }
        }
        for &(xy, _, _) in &markers {
            grow(xy);
        }
        if !min.0.is_finite() {
            min = (-1.0, -1.0);
            max = (1.0, 1.0);
        }
        let span = (max.0 - min.0).max(max.1 - min.1).max(1e-9);
        let margin = 0.06 * span;
        let (x0, y0) = (min.0 - margin, min.1 - margin);
        let (w, h) = (max.0 - min.0 + 2.0 * margin, max.1 - min.1 + 2.0 * margin);
        let px = 720.0;
        let scale = px / w.max(h);
        // svg y grows downward; flip about the vertical midline
        let map = |(x, y): (f64, f64)| ((x - x0) * scale, (y0 + h - y) * scale);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">",
            w * scale,
            h * scale,
            w * scale,
            h * scale
        );
        let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        if self.projection == Projection::PoincareDisk {
            let (cx, cy) = map((0.0, 0.0));
            let _ = writeln!(
                svg,
                "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>",
                scale
            );
        }
        for (pts, closed, style) in &shapes {
            let tag = if *closed { "polygon" } else { "polyline" };
            let mut coords = String::new();
            for &xy in pts {
                let (x, y) = map(xy);
                let _ = write!(coords, "{x:.2},{y:.2} ");
            }
            let dash = if style.dashed {
                " stroke-dasharray=\"6 4\""
            } else {
                ""
            };
            let _ = writeln!(
                svg,
                "<{tag} points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2}\"{dash}/>",
                coords.trim_end(),
                style.stroke,
                style.width
            );
        }
        for (xy, label, style) in &markers {
            let (x, y) = map(*xy);
            let _ = writeln!(
                svg,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"{}\"/>",
                style.stroke
            );
            if let Some(text) = label {
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" fill=\"{}\">{}</text>",
                    x + 6.0,
                    y - 6.0,
                    style.stroke,
                    text
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Deterministic unit tangent at p (same frame the radial profiles use).
fn first_tangent(p: &ModelPoint) -> Result<TangentVector> {
    let c = p.coords();
    let trial = if c[0].abs() < 0.9 * p.kappa().model_radius().max(1.0) || p.kappa().is_flat() {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    match TangentVector::new(*p, trial) {
        Ok(v) => Ok(v),
        Err(_) => TangentVector::new(*p, [0.0, 1.0, 0.0]),
    }
}

/// Rotates the sphere so `pole` goes to (0, 0, |pole|), applied to `c`.
fn rotate_to_pole(pole: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    let n = (pole[0] * pole[0] + pole[1] * pole[1] + pole[2] * pole[2]).sqrt();
    let w = [pole[0] / n, pole[1] / n, pole[2] / n];
    // u1 = normalize(w x z-hat) unless parallel
    let cx = w[1];
    let cy = -w[0];
    let cn = (cx * cx + cy * cy).sqrt();
    if cn < 1e-12 {
        return if w[2] > 0.0 { c } else { [c[0], -c[1], -c[2]] };
    }
    let u1 = [cx / cn, cy / cn, 0.0];
    // u2 = w x u1
    let u2 = [
        w[1] * u1[2] - w[2] * u1[1],
        w[2] * u1[0] - w[0] * u1[2],
        w[0] * u1[1] - w[1] * u1[0],
    ];
    [
        u1[0] * c[0] + u1[1] * c[1] + u1[2] * c[2],
        u2[0] * c[0] + u2[1] * c[1] + u2[2] * c[2],
        w[0] * c[0] + w[1] * c[1] + w[2] * c[2],
    ]
}
