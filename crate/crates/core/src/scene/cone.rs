//! Vertex classes of the glued surface and their cone angles.

use std::f64::consts::TAU;

use super::{SceneConfig, WallKind, GLUING_TOLERANCE};

/// Tolerance on `|angle − 2π|` below which a class is regular.
pub const CONE_ANGLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub polygon: usize,
    pub vertex: usize,
}

/// One point of the surface obtained by gluing polygon corners together.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexClass {
    /// Sorted by polygon then vertex index.
    pub members: Vec<VertexRef>,
    /// Sum of the interior angles of the member corners, in radians.
    pub angle: f64,
    /// `|angle − 2π| > 1e-6`.
    pub singular: bool,
    /// Some member corner touches a mirror or solid wall.
    pub boundary: bool,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so class order is stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Group polygon corners under the gluing maps and sum their angles.
///
/// Each portal isometry is applied to its edge's endpoints; an image is
/// matched to the partner endpoint it lands on (within `1e-9`) and the two
/// corners are merged. Classes come back ordered by their first member.
pub fn cone_angles(scene: &SceneConfig) -> Vec<VertexClass> {
    let offsets: Vec<usize> = scene
        .polygons
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.vertices.len();
            Some(o)
        })
        .collect();
    let total: usize = scene.polygons.iter().map(|p| p.vertices.len()).sum();
    let node = |p: usize, v: usize| offsets[p] + v % scene.polygons[p].vertices.len();

    let mut sets = DisjointSet::new(total);
    let mut boundary = vec![false; total];

    for wall in &scene.walls {
        let e = wall.edge;
        let a = node(e.polygon, e.edge);
        let b = node(e.polygon, e.edge + 1);
        match &wall.kind {
            WallKind::Portal {
                partner, isometry, ..
            } => {
                let q = &scene.polygons[partner.polygon];
                let (p0, p1) = q.edge(partner.edge);
                let n0 = node(partner.polygon, partner.edge);
                let n1 = node(partner.polygon, partner.edge + 1);
                for (src, pt) in [(a, wall.start), (b, wall.end)] {
                    let img = isometry.apply_point(pt);
                    let (d0, d1) = (img.distance(p0), img.distance(p1));
                    debug_assert!(d0.min(d1) <= GLUING_TOLERANCE * 10.0);
                    sets.union(src, if d0 <= d1 { n0 } else { n1 });
                }
            }
            WallKind::Mirror | WallKind::Solid => {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
    }

    let mut classes: Vec<(usize, VertexClass)> = Vec::new();
    for (p, poly) in scene.polygons.iter().enumerate() {
        for v in 0..poly.vertices.len() {
            let id = node(p, v);
            let root = sets.find(id);
            let angle = poly.interior_angle(v);
            let member = VertexRef { polygon: p, vertex: v };
            match classes.iter_mut().find(|(r, _)| *r == root) {
                Some((_, c)) => {
                    c.members.push(member);
                    c.angle += angle;
                    c.boundary |= boundary[id];
                }
                None => classes.push((
                    root,
                    VertexClass {
                        members: vec![member],
                        angle,
                        singular: false,
                        boundary: boundary[id],
                    },
                )),
            }
        }
    }
    classes
        .into_iter()
        .map(|(_, mut c)| {
            c.singular = (c.angle - TAU).abs() > CONE_ANGLE_TOLERANCE;
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::builtin_scene;
    use std::f64::consts::PI;

    #[test]
    fn torus_has_one_regular_class() {
        let classes = cone_angles(&builtin_scene("torus").unwrap());
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members.len(), 4);
        assert!((classes[0].angle - TAU).abs() < 1e-12);
        assert!(!classes[0].singular);
    }

    #[test]
    fn mirror_triangle_corners_stay_apart() {
        let classes = cone_angles(&builtin_scene("mirror_triangle_equilateral").unwrap());
        assert_eq!(classes.len(), 3);
        for c in &classes {
            assert!(c.boundary);
            assert!((c.angle - PI / 3.0).abs() < 1e-12);
        }
    }
}
