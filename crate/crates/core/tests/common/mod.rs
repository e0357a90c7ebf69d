//! Shared helpers for the integration tests: golden files and independent
//! reference computations. Nothing here calls the engine's own geometry
//! helpers beyond reading scene data.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use flatroom::render::{render_image, CameraFrame};
use flatroom::scene::{NodeKind, SdfNode, WallKind};
use flatroom::{builtin_scene, SceneConfig, Vec2, Vec3, BUILTIN_NAMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_SIZE: u32 = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn builtins() -> Vec<SceneConfig> {
    BUILTIN_NAMES.iter().map(|n| builtin_scene(n).unwrap()).collect()
}

// ---------------------------------------------------------------- goldens

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// `FLATROOM_BLESS=1` rewrites golden files instead of comparing.
pub fn blessing() -> bool {
    std::env::var("FLATROOM_BLESS").is_ok_and(|v| v == "1")
}

/// Compare `actual` with the golden file at `rel`, or write it when
/// blessing. Returns a description of the mismatch.
pub fn check_golden(rel: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(rel);
    if blessing() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with FLATROOM_BLESS=1 to create)", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let line = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .map_or_else(|| "length".to_string(), |i| format!("line {}", i + 1));
    Err(format!("{} differs from the golden file at {line}", path.display()))
}

/// SHA-256 of the default-camera 64×64 render of every builtin.
pub fn render_hashes(threads: usize) -> BTreeMap<String, String> {
    builtins()
        .iter()
        .map(|s| {
            let cam = CameraFrame::from_spec(&s.camera);
            let img = render_image(s, &cam, GOLDEN_SIZE, GOLDEN_SIZE, threads);
            (s.name.clone(), img.sha256_hex())
        })
        .collect()
}

pub const RENDER_HASHES: &str = "render_hashes.json";

pub fn golden_render_hashes() -> BTreeMap<String, String> {
    let text = std::fs::read_to_string(golden_dir().join(RENDER_HASHES)).expect("render hash golden file");
    serde_json::from_str(&text).unwrap()
}

// ----------------------------------------------------------- cone angles

/// Interior angle at vertex `i` of a counterclockwise polygon, from the
/// turning angle of its two edges.
pub fn corner_angle(v: &[Vec2], i: usize) -> f64 {
    let n = v.len();
    let a = v[(i + n - 1) % n];
    let b = v[i];
    let c = v[(i + 1) % n];
    let (e1x, e1y) = (b.x - a.x, b.y - a.y);
    let (e2x, e2y) = (c.x - b.x, c.y - b.y);
    let turn = (e1x * e2y - e1y * e2x).atan2(e1x * e2x + e1y * e2y);
    PI - turn
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Cone angles by brute force: each portal's isometry is applied to both
/// endpoints of its edge, and the image is matched against every corner of
/// the partner polygon. Returns the class angles in ascending order.
pub fn cone_angle_oracle(scene: &SceneConfig) -> Vec<f64> {
    let mut ids = Vec::new();
    for (pi, p) in scene.polygons.iter().enumerate() {
        for vi in 0..p.vertices.len() {
            ids.push((pi, vi));
        }
    }
    let index = |pi: usize, vi: usize| ids.iter().position(|&x| x == (pi, vi)).unwrap();
    let mut uf = UnionFind((0..ids.len()).collect());
    for w in &scene.walls {
        let WallKind::Portal { partner, isometry, .. } = &w.kind else {
            continue;
        };
        let l = isometry.linear;
        let t = isometry.translation;
        let poly = &scene.polygons[w.edge.polygon];
        let n = poly.vertices.len();
        for vi in [w.edge.edge, (w.edge.edge + 1) % n] {
            let p = poly.vertices[vi];
            let img = Vec2::new(l[0][0] * p.x + l[0][1] * p.y + t.x, l[1][0] * p.x + l[1][1] * p.y + t.y);
            let target = &scene.polygons[partner.polygon];
            let hits: Vec<usize> = (0..target.vertices.len())
                .filter(|&j| (target.vertices[j].x - img.x).hypot(target.vertices[j].y - img.y) < 1e-9)
                .collect();
            assert_eq!(hits.len(), 1, "endpoint image must land on exactly one corner");
            uf.union(index(w.edge.polygon, vi), index(partner.polygon, hits[0]));
        }
    }
    let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
    for (k, &(pi, vi)) in ids.iter().enumerate() {
        let root = uf.find(k);
        *sums.entry(root).or_default() += corner_angle(&scene.polygons[pi].vertices, vi);
    }
    let mut angles: Vec<f64> = sums.into_values().collect();
    angles.sort_by(f64::total_cmp);
    angles
}

// ------------------------------------------------------------ membership

/// Point-in-solid test for an object tree, from the primitives' defining
/// inequalities. `None` when `p` is within `margin` of some primitive's
/// boundary and the answer could flip under rounding.
pub fn inside(node: &SdfNode, p: Vec3, margin: f64) -> Option<bool> {
    match &node.kind {
        NodeKind::Sphere { center, radius } => {
            let r = (p - *center).length();
            ((r - radius).abs() > margin).then_some(r < *radius)
        }
        NodeKind::Box { center, half_extents } => {
            let d = p - *center;
            let slack = [
                half_extents.x - d.x.abs(),
                half_extents.y - d.y.abs(),
                half_extents.z - d.z.abs(),
            ];
            if slack.iter().any(|s| s.abs() <= margin) {
                None
            } else {
                Some(slack.iter().all(|s| *s > 0.0))
            }
        }
        NodeKind::Cylinder {
            axis,
            radius,
            z_min,
            z_max,
        } => {
            let r = (p.x - axis.x).hypot(p.y - axis.y);
            let slack = [radius - r, p.z - z_min, z_max - p.z];
            if slack.iter().any(|s| s.abs() <= margin) {
                None
            } else {
                Some(slack.iter().all(|s| *s > 0.0))
            }
        }
        NodeKind::Union(children) => {
            let v: Option<Vec<bool>> = children.iter().map(|c| inside(c, p, margin)).collect();
            v.map(|v| v.into_iter().any(|b| b))
        }
        NodeKind::Intersection(children) => {
            let v: Option<Vec<bool>> = children.iter().map(|c| inside(c, p, margin)).collect();
            v.map(|v| v.into_iter().all(|b| b))
        }
        NodeKind::Difference(a, b) => Some(inside(a, p, margin)? && !inside(b, p, margin)?),
    }
}

// ---------------------------------------------------------- sampling

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let l = v.length();
        if l > 1e-3 && l <= 1.0 {
            return v * (1.0 / l);
        }
    }
}

/// A uniformly random point strictly inside the room.
pub fn random_interior_point(scene: &SceneConfig, rng: &mut impl Rng) -> Vec3 {
    let (lo, hi) = scene.bounds();
    loop {
        let p = Vec3::new(
            rng.gen_range(lo.x..hi.x),
            rng.gen_range(lo.y..hi.y),
            rng.gen_range(0.02 * scene.height..0.98 * scene.height),
        );
        if scene.contains_point(p) {
            return p;
        }
    }
}

// ------------------------------------------------------------ torus

/// First intersection of `o + t·d` with the sphere `(c, r)`, if in front.
pub fn ray_sphere(o: Vec3, d: Vec3, c: Vec3, r: f64) -> Option<f64> {
    let oc = o - c;
    let b = oc.dot(d);
    let cc = oc.dot(oc) - r * r;
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t > 0.0).then_some(t)
}

pub struct Unfolded {
    pub t: f64,
    /// Unit-square walls crossed before the hit.
    pub crossings: u32,
    /// Cosine between the ray and the sphere normal at the hit.
    pub incidence: f64,
    /// Closest approach, before the hit, to any other sphere copy or to the
    /// floor and ceiling planes.
    pub clearance: f64,
}

/// Smallest distance from the segment `o + t·d`, `t ∈ [0, len]`, to `c`.
fn segment_point_distance(o: Vec3, d: Vec3, len: f64, c: Vec3) -> f64 {
    let t = (c - o).dot(d).clamp(0.0, len);
    (o + d * t - c).length()
}

/// Unit-square torus unfolded into the plane: the ray against every
/// lattice copy of a sphere within reach, plus the floor and ceiling.
/// `None` when the ray meets the floor or ceiling first.
pub fn torus_unfolded(o: Vec3, d: Vec3, center: Vec3, r: f64, height: f64, reach: i32) -> Option<Unfolded> {
    let mut best: Option<(f64, Vec3)> = None;
    for i in -reach..=reach {
        for j in -reach..=reach {
            let c = Vec3::new(center.x + i as f64, center.y + j as f64, center.z);
            if let Some(t) = ray_sphere(o, d, c, r) {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, c));
                }
            }
        }
    }
    let (t, c) = best?;
    let plane = if d.z < 0.0 {
        -o.z / d.z
    } else if d.z > 0.0 {
        (height - o.z) / d.z
    } else {
        f64::INFINITY
    };
    if plane <= t {
        return None;
    }
    let p = o + d * t;
    let crossings = (p.x.floor() - o.x.floor()).abs() + (p.y.floor() - o.y.floor()).abs();
    let n = (p - c) * (1.0 / r);
    let mut clearance = o.z.min(p.z).min(height - o.z).min(height - p.z);
    for i in -reach..=reach {
        for j in -reach..=reach {
            let other = Vec3::new(center.x + i as f64, center.y + j as f64, center.z);
            if other != c {
                clearance = clearance.min(segment_point_distance(o, d, t, other) - r);
            }
        }
    }
    Some(Unfolded {
        t,
        crossings: crossings as u32,
        incidence: -n.dot(d),
        clearance,
    })
}

// ------------------------------------------------------------ billiards

/// Straight-line billiard in a convex polygon with mirror walls: returns
/// the reflection points in order, for `bounces` reflections.
pub fn billiard(poly: &[Vec2], start: Vec2, dir: Vec2, bounces: usize) -> Vec<Vec2> {
    let n = poly.len();
    let mut p = start;
    let mut d = dir;
    let mut last: Option<usize> = None;
    let mut out = Vec::new();
    for _ in 0..bounces {
        let mut best: Option<(f64, usize)> = None;
        for k in 0..n {
            if Some(k) == last {
                continue;
            }
            let a = poly[k];
            let b = poly[(k + 1) % n];
            let e = b - a;
            let den = d.cross(e);
            if den.abs() < 1e-15 {
                continue;
            }
            let t = (a - p).cross(e) / den;
            let s = (a - p).cross(d) / den;
            if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, k));
            }
        }
        let (t, k) = best.expect("billiard ray must hit a side");
        p += d * t;
        let e = (poly[(k + 1) % n] - poly[k]).normalized();
        let nrm = Vec2::new(-e.y, e.x);
        d = d - nrm * (2.0 * d.dot(nrm));
        last = Some(k);
        out.push(p);
    }
    out
}

/// Reflect point `p` across the line through `a` and `b`.
pub fn reflect_across(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let e = (b - a).normalized();
    let ap = p - a;
    let along = e * ap.dot(e);
    a + along * 2.0 - ap
}

/// Billiard in a triangle by unfolding: the ray runs straight through a
/// chain of reflected copies of the triangle, and each exit point is
/// carried back to the original triangle by its barycentric coordinates.
pub fn unfolded_billiard(tri: [Vec2; 3], start: Vec2, dir: Vec2, bounces: usize) -> Vec<Vec2> {
    let mut copy = tri;
    let mut last: Option<usize> = None;
    let mut out = Vec::new();
    for _ in 0..bounces {
        let mut best: Option<(f64, usize, f64)> = None;
        for k in 0..3 {
            if Some(k) == last {
                continue;
            }
            let a = copy[k];
            let e = copy[(k + 1) % 3] - a;
            let den = dir.cross(e);
            if den.abs() < 1e-15 {
                continue;
            }
            let t = (a - start).cross(e) / den;
            let s = (a - start).cross(dir) / den;
            if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) && best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, k, s));
            }
        }
        let (_, k, s) = best.expect("unfolded ray must leave the copy");
        // exit point is (1−s)·v_k + s·v_{k+1} in every copy
        out.push(tri[k] * (1.0 - s) + tri[(k + 1) % 3] * s);
        let (a, b) = (copy[k], copy[(k + 1) % 3]);
        let opposite = (k + 2) % 3;
        copy[opposite] = reflect_across(copy[opposite], a, b);
        last = Some(k);
    }
    out
}
