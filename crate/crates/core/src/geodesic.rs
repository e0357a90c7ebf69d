//! Straight-line flow on the glued floor plan: geodesics on translation
//! surfaces and billiard paths in mirror rooms.

use std::f64::consts::PI;

use crate::geometry::{Point2, Vec2};
use crate::scene::{cone_angles, GluingKind, SceneConfig, VertexClass, VertexRef, WallKind};

/// Distance below which a path is considered to run into a corner.
pub const VERTEX_TOLERANCE: f64 = 1e-9;

const MIN_STEP: f64 = 1e-12;

/// One straight piece of a trace, in the coordinates of its polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSegment {
    pub polygon: String,
    pub start: Point2,
    pub end: Point2,
    pub index: usize,
}

impl TraceSegment {
    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceBudget {
    MaxLength(f64),
    /// Portal crossings plus mirror bounces.
    MaxCrossings(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    BudgetReached,
    SolidWall,
    /// Ran into a singular or boundary corner, where the continuation is
    /// not well defined.
    HitVertex,
}

/// Where the path stopped, in the coordinates of `polygon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEnd {
    pub polygon: usize,
    pub point: Point2,
    pub direction: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTrace {
    pub segments: Vec<TraceSegment>,
    pub status: TraceStatus,
    pub end: TraceEnd,
    pub length: f64,
    pub crossings: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("unknown polygon {0:?}")]
    UnknownPolygon(String),
    #[error("start point ({0}, {1}) is not strictly inside polygon {2:?}")]
    StartOutside(f64, f64, String),
    #[error("direction must be a finite unit vector")]
    BadDirection,
    #[error("budget must be positive and finite")]
    BadBudget,
    #[error("trace lost its polygon at ({0}, {1})")]
    Lost(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Origin {
    Interior,
    Edge(usize),
    Vertex(usize),
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Edge { edge: usize, t: f64, point: Point2 },
    Vertex { vertex: usize, t: f64 },
}

impl Event {
    fn t(&self) -> f64 {
        match *self {
            Event::Edge { t, .. } | Event::Vertex { t, .. } => t,
        }
    }
}

fn rotate(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(v.x * c - v.y * s, v.x * s + v.y * c)
}

fn next_event(scene: &SceneConfig, polygon: usize, x: Point2, d: Vec2, origin: Origin) -> Option<Event> {
    let poly = &scene.polygons[polygon];
    let n = poly.edge_count();
    let touches = |edge: usize| match origin {
        Origin::Interior => false,
        Origin::Edge(e) => e == edge,
        Origin::Vertex(v) => edge == v || (edge + 1) % n == v,
    };

    let mut best: Option<Event> = None;
    for i in 0..n {
        if touches(i) {
            continue;
        }
        let (a, b) = poly.edge(i);
        let e = b - a;
        if d.dot(poly.inward_normal(i)) >= 0.0 {
            continue;
        }
        let denom = d.cross(e);
        if denom.abs() < 1e-15 {
            continue;
        }
        let t = (a - x).cross(e) / denom;
        let u = (a - x).cross(d) / denom;
        let slack = VERTEX_TOLERANCE / e.length();
        if t <= MIN_STEP || u < -slack || u > 1.0 + slack {
            continue;
        }
        if best.is_none_or(|b| t < b.t()) {
            best = Some(Event::Edge {
                edge: i,
                t,
                point: a + e * u.clamp(0.0, 1.0),
            });
        }
    }
    let limit = best.map_or(f64::INFINITY, |b| b.t());

    // corners lying on the path, including reflex corners it only grazes
    let mut corner: Option<Event> = None;
    for v in 0..n {
        if origin == Origin::Vertex(v) {
            continue;
        }
        let w = poly.vertex(v) - x;
        let s = w.dot(d);
        if s <= MIN_STEP || s > limit + VERTEX_TOLERANCE {
            continue;
        }
        if w.cross(d).abs() <= VERTEX_TOLERANCE && corner.is_none_or(|c| s < c.t()) {
            corner = Some(Event::Vertex { vertex: v, t: s });
        }
    }
    corner.or(best)
}

struct Tracer<'a> {
    scene: &'a SceneConfig,
    classes: Vec<VertexClass>,
    segments: Vec<TraceSegment>,
    length: f64,
    crossings: usize,
}

impl Tracer<'_> {
    fn push(&mut self, polygon: usize, start: Point2, end: Point2) {
        let len = start.distance(end);
        if len > 0.0 {
            self.segments.push(TraceSegment {
                polygon: self.scene.polygons[polygon].id.clone(),
                start,
                end,
                index: self.segments.len(),
            });
            self.length += len;
        }
    }

    fn class_of(&self, polygon: usize, vertex: usize) -> &VertexClass {
        let r = VertexRef { polygon, vertex };
        self.classes
            .iter()
            .find(|c| c.members.contains(&r))
            .expect("every corner belongs to a class")
    }

    /// Continue straight through a regular corner by walking the glued
    /// corners counterclockwise until half a turn is used up.
    fn through_vertex(&mut self, polygon: usize, vertex: usize, d: Vec2) -> Option<TraceEnd> {
        let class = self.class_of(polygon, vertex);
        if class.singular || class.boundary {
            return None;
        }
        let (mut p, mut k) = (polygon, vertex);
        let edge_dir = |p: usize, k: usize| {
            let poly = &self.scene.polygons[p];
            (poly.vertex(k + 1) - poly.vertex(k)).normalized()
        };
        let e = edge_dir(p, k);
        let back = -d;
        let mut start = e.cross(back).atan2(e.dot(back));
        if start < 0.0 {
            start += 2.0 * PI;
        }
        let mut rem = PI;
        for _ in 0..=class.members.len() {
            let poly = &self.scene.polygons[p];
            let alpha = poly.interior_angle(k);
            let start_here = start.min(alpha);
            if rem <= alpha - start_here {
                return Some(TraceEnd {
                    polygon: p,
                    point: poly.vertex(k),
                    direction: rotate(edge_dir(p, k), start_here + rem).normalized(),
                });
            }
            rem -= alpha - start_here;
            let n = poly.edge_count();
            let crossed = (k + n - 1) % n;
            let wall = self.scene.wall(crate::scene::EdgeRef {
                polygon: p,
                edge: crossed,
            });
            match &wall.kind {
                WallKind::Portal {
                    partner, gluing, ..
                } if *gluing != GluingKind::Reflection => {
                    p = partner.polygon;
                    k = partner.edge;
                    start = 0.0;
                    self.crossings += 1;
                }
                _ => return None,
            }
        }
        None
    }
}

/// Follow the straight line from `start` in direction `dir` across the
/// glued floor plan.
///
/// Portal edges carry the path to their partner, mirrors reflect it and
/// solid walls end it. A path through a corner continues only when the
/// corner's cone angle is `2π` and all edges around it are
/// orientation-preserving portals; otherwise the trace stops with
/// [`TraceStatus::HitVertex`].
pub fn trace_geodesic_2d(
    scene: &SceneConfig,
    polygon: &str,
    start: Point2,
    dir: Vec2,
    budget: TraceBudget,
) -> Result<GeodesicTrace, TraceError> {
    let mut p = scene
        .polygon_index(polygon)
        .ok_or_else(|| TraceError::UnknownPolygon(polygon.to_string()))?;
    if !start.is_finite() || !scene.polygons[p].contains_strictly(start, VERTEX_TOLERANCE) {
        return Err(TraceError::StartOutside(start.x, start.y, polygon.to_string()));
    }
    if !dir.is_finite() || (dir.length() - 1.0).abs() > 1e-9 {
        return Err(TraceError::BadDirection);
    }
    let (max_length, max_crossings) = match budget {
        TraceBudget::MaxLength(l) if l.is_finite() && l > 0.0 => (l, usize::MAX),
        TraceBudget::MaxCrossings(c) if c > 0 => (f64::INFINITY, c),
        _ => return Err(TraceError::BadBudget),
    };

    let mut tracer = Tracer {
        scene,
        classes: cone_angles(scene),
        segments: Vec::new(),
        length: 0.0,
        crossings: 0,
    };
    let mut x = start;
    let mut d = dir.normalized();
    let mut origin = Origin::Interior;

    let status = loop {
        let Some(event) = next_event(scene, p, x, d, origin) else {
            return Err(TraceError::Lost(x.x, x.y));
        };
        let remaining = max_length - tracer.length;
        if remaining <= event.t() {
            let end = x + d * remaining;
            tracer.push(p, x, end);
            x = end;
            break TraceStatus::BudgetReached;
        }
        if tracer.crossings >= max_crossings {
            let end = match event {
                Event::Edge { point, .. } => point,
                Event::Vertex { vertex, .. } => scene.polygons[p].vertex(vertex),
            };
            tracer.push(p, x, end);
            x = end;
            break TraceStatus::BudgetReached;
        }
        match event {
            Event::Vertex { vertex, .. } => {
                let corner = scene.polygons[p].vertex(vertex);
                tracer.push(p, x, corner);
                x = corner;
                match tracer.through_vertex(p, vertex, d) {
                    Some(next) => {
                        p = next.polygon;
                        x = next.point;
                        d = next.direction;
                        let n = scene.polygons[p].edge_count();
                        let here = (0..n)
                            .find(|&v| scene.polygons[p].vertex(v) == x)
                            .expect("corner walk ends on a corner");
                        origin = Origin::Vertex(here);
                    }
                    None => break TraceStatus::HitVertex,
                }
            }
            Event::Edge { edge, point, .. } => {
                tracer.push(p, x, point);
                x = point;
                let wall = scene.wall(crate::scene::EdgeRef { polygon: p, edge });
                match &wall.kind {
                    WallKind::Portal {
                        partner, isometry, ..
                    } => {
                        p = partner.polygon;
                        x = isometry.apply_point(point);
                        d = isometry.apply_vector(d).normalized();
                        origin = Origin::Edge(partner.edge);
                    }
                    WallKind::Mirror => {
                        let n = wall.inward_normal;
                        d = (d - n * (2.0 * d.dot(n))).normalized();
                        origin = Origin::Edge(edge);
                    }
                    WallKind::Solid => break TraceStatus::SolidWall,
                }
                tracer.crossings += 1;
            }
        }
    };

    Ok(GeodesicTrace {
        status,
        end: TraceEnd {
            polygon: p,
            point: x,
            direction: d,
        },
        length: tracer.length,
        crossings: tracer.crossings,
        segments: tracer.segments,
    })
}
