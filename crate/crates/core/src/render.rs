//! Static SVG pictures of the Poincaré disk.
//!
//! Classes are mapped to the disk through the fixed orthogonal splitting
//! `t = 2x + y`, `s₁ = √5·y`, `s₂ = √2·lam`, under which the pairing
//! becomes `t² − s₁² − s₂²`, followed by the hyperboloid-to-disk map
//! `(s₁, s₂)/(t + √(v²))`.

use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::hyperbolic::generator_fixed_points;
use crate::isometry::{fixed_points, g_star, FixedPoints, LatticeIsometry};
use crate::lattice::HilbClass;

/// Rows give `(t, s₁, s₂)` in terms of `(x, lam, y)`.
pub const SPLITTING: [[&str; 3]; 3] = [["2", "0", "1"], ["0", "0", "√5"], ["0", "√2", "0"]];

const SIZE: f64 = 520.0;
const RADIUS: f64 = 240.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("{0} is not in the positive cone")]
    NotInterior(HilbClass),
}

fn split(v: [f64; 3]) -> [f64; 3] {
    let [x, lam, y] = v;
    [2.0 * x + y, 5f64.sqrt() * y, 2f64.sqrt() * lam]
}

fn to_f64(v: &HilbClass) -> [f64; 3] {
    v.coords().map(|c| c.to_f64().unwrap_or(f64::NAN))
}

/// Disk coordinates of a positive class.
pub fn disk_point(v: &HilbClass) -> Result<(f64, f64), RenderError> {
    let sq = v.square();
    let [t, s1, s2] = split(to_f64(v));
    if !sq.is_positive() || t <= 0.0 {
        return Err(RenderError::NotInterior(v.clone()));
    }
    let den = t + sq.to_f64().unwrap_or(f64::INFINITY).sqrt();
    Ok((s1 / den, s2 / den))
}

/// Disk coordinates of a null direction, on the unit circle.
pub fn boundary_disk_point(v: [f64; 3]) -> (f64, f64) {
    let [t, s1, s2] = split(v);
    (s1 / t, s2 / t)
}

/// `cosh` of the hyperbolic distance between two disk points.
pub fn disk_distance_cosh(p: (f64, f64), q: (f64, f64)) -> f64 {
    let d2 = (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2);
    let (np, nq) = (p.0 * p.0 + p.1 * p.1, q.0 * q.0 + q.1 * q.1);
    1.0 + 2.0 * d2 / ((1.0 - np) * (1.0 - nq))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenePoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<ScenePoint>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DiskScene {
    pub points: Vec<ScenePoint>,
    /// Geodesic segments between two entries of `points`.
    pub geodesics: Vec<(usize, usize)>,
    pub boundary: Vec<ScenePoint>,
    pub orbits: Vec<Polyline>,
}

impl DiskScene {
    pub fn empty() -> Self {
        DiskScene::default()
    }

    pub fn add_point(&mut self, label: impl Into<String>, v: &HilbClass) -> Result<usize, RenderError> {
        let (x, y) = disk_point(v)?;
        self.points.push(ScenePoint { label: label.into(), x, y });
        Ok(self.points.len() - 1)
    }

    /// `base, M·base, …, Mⁿ·base`.
    pub fn add_orbit(&mut self, label: impl Into<String>, base: &HilbClass, m: &LatticeIsometry, steps: usize) -> Result<(), RenderError> {
        let mut cur = base.clone();
        let mut points = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let (x, y) = disk_point(&cur)?;
            points.push(ScenePoint { label: format!("{i}"), x, y });
            cur = m.apply(&cur);
        }
        self.orbits.push(Polyline { label: label.into(), points });
        Ok(())
    }

    /// The three generator fixed points, the geodesic triangle between them
    /// and the two boundary fixed points of `g*`.
    pub fn standard() -> Self {
        let mut scene = DiskScene::empty();
        for (i, p) in generator_fixed_points().iter().enumerate() {
            scene.add_point(format!("p{i} {}", p.class()), p.class()).expect("interior");
        }
        scene.geodesics = vec![(0, 1), (1, 2), (0, 2)];
        if let Ok(FixedPoints::Boundary { attracting, repelling }) = fixed_points(&g_star()) {
            for (label, b) in [("g+", attracting), ("g-", repelling)] {
                let (x, y) = boundary_disk_point(b.to_f64());
                scene.boundary.push(ScenePoint { label: label.into(), x, y });
            }
        }
        scene
    }

    /// [`DiskScene::standard`] plus the `g*`-orbit of `h₁`.
    pub fn standard_with_orbit(steps: usize) -> Self {
        let mut scene = Self::standard();
        scene.add_orbit("g-orbit of h1", &HilbClass::new(1, 0, 0), &g_star(), steps).expect("h1 is interior");
        scene
    }
}

fn screen(p: (f64, f64)) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * p.0, SIZE / 2.0 - RADIUS * p.1)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG path of the hyperbolic geodesic from `p` to `q`.
fn geodesic_path(p: (f64, f64), q: (f64, f64)) -> String {
    // circle orthogonal to the unit circle: 2c·p = |p|² + 1, 2c·q = |q|² + 1
    let (a1, b1, r1) = (2.0 * p.0, 2.0 * p.1, p.0 * p.0 + p.1 * p.1 + 1.0);
    let (a2, b2, r2) = (2.0 * q.0, 2.0 * q.1, q.0 * q.0 + q.1 * q.1 + 1.0);
    let det = a1 * b2 - a2 * b1;
    let (sp, sq) = (screen(p), screen(q));
    if det.abs() < 1e-12 {
        return format!("M {:.6} {:.6} L {:.6} {:.6}", sp.0, sp.1, sq.0, sq.1);
    }
    let c = ((r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det);
    let r = ((c.0 - p.0).powi(2) + (c.1 - p.1).powi(2)).sqrt() * RADIUS;
    let sc = screen(c);
    let cross = (sp.0 - sc.0) * (sq.1 - sc.1) - (sp.1 - sc.1) * (sq.0 - sc.0);
    let sweep = if cross > 0.0 { 1 } else { 0 };
    format!("M {:.6} {:.6} A {r:.6} {r:.6} 0 0 {sweep} {:.6} {:.6}", sp.0, sp.1, sq.0, sq.1)
}

/// Deterministic SVG 1.1 rendering.
pub fn render_svg(scene: &DiskScene) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<!--");
    let _ = writeln!(s, "  Poincare disk model. A class (x, lam, y) in the basis h1, e, h2 is split as");
    for (name, row) in ["t ", "s1", "s2"].iter().zip(SPLITTING) {
        let _ = writeln!(s, "    {name} = [{}] . (x, lam, y)", row.join(", "));
    }
    let _ = writeln!(s, "  so that v.v = t^2 - s1^2 - s2^2, and drawn at (s1, s2) / (t + sqrt(v.v)).");
    let _ = writeln!(s, "  data-x / data-y hold disk coordinates; the disk has radius {RADIUS} px.");
    let _ = writeln!(s, "-->");
    let c = SIZE / 2.0;
    let _ = writeln!(s, r##"<circle cx="{c}" cy="{c}" r="{RADIUS}" fill="#f8f8f4" stroke="#222" stroke-width="1.5"/>"##);
    for &(i, j) in &scene.geodesics {
        let (p, q) = (&scene.points[i], &scene.points[j]);
        let _ = writeln!(
            s,
            r##"<path class="geodesic" d="{}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##,
            geodesic_path((p.x, p.y), (q.x, q.y))
        );
    }
    for orbit in &scene.orbits {
        let pts: Vec<String> = orbit
            .points
            .iter()
            .map(|p| {
                let (x, y) = screen((p.x, p.y));
                format!("{x:.6},{y:.6}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="orbit" data-label="{}" points="{}" fill="none" stroke="#b5482a" stroke-dasharray="4 3"/>"##,
            escape(&orbit.label),
            pts.join(" ")
        );
        for p in &orbit.points {
            let (x, y) = screen((p.x, p.y));
            let _ = writeln!(
                s,
                r##"<circle class="orbit-point" cx="{x:.6}" cy="{y:.6}" r="2.5" fill="#b5482a" data-x="{:.15}" data-y="{:.15}"/>"##,
                p.x, p.y
            );
        }
    }
    for p in &scene.boundary {
        let (x, y) = screen((p.x, p.y));
        let _ = writeln!(
            s,
            r##"<circle class="boundary-point" cx="{x:.6}" cy="{y:.6}" r="4" fill="none" stroke="#2a7b3f" stroke-width="1.5" data-x="{:.15}" data-y="{:.15}"/>"##,
            p.x, p.y
        );
        let _ = writeln!(s, r#"<text x="{:.6}" y="{:.6}" font-size="11" font-family="monospace">{}</text>"#, x + 6.0, y - 6.0, escape(&p.label));
    }
    for p in &scene.points {
        let (x, y) = screen((p.x, p.y));
        let _ = writeln!(
            s,
            r##"<circle class="point" cx="{x:.6}" cy="{y:.6}" r="4" fill="#1f4e9c" data-label="{}" data-x="{:.15}" data-y="{:.15}"/>"##,
            escape(&p.label),
            p.x,
            p.y
        );
        let _ = writeln!(s, r#"<text x="{:.6}" y="{:.6}" font-size="12" font-family="monospace">{}</text>"#, x + 6.0, y - 6.0, escape(&p.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Reads back `(label, x, y)` of the `class="point"` markers.
pub fn parse_points(svg: &str) -> Vec<(String, f64, f64)> {
    let attr = |line: &str, key: &str| -> Option<String> {
        let start = line.find(&format!(r#" {key}=""#))? + key.len() + 3;
        let end = line[start..].find('"')? + start;
        Some(line[start..end].to_string())
    };
    svg.lines()
        .filter(|l| l.contains(r#"class="point""#))
        .filter_map(|l| {
            Some((attr(l, "data-label")?, attr(l, "data-x")?.parse().ok()?, attr(l, "data-y")?.parse().ok()?))
        })
        .collect()
}
