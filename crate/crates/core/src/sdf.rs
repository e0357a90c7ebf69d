//! Signed distance functions for primitives, CSG trees, walls and the tagged
//! scene field.

use crate::geometry::{point_segment_distance, Point2, Point3, Vec3};
use crate::scene::{CeilingStyle, FloorStyle, NodeKind, SceneConfig, SdfNode, WallRule};

/// What the nearest surface is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    /// Root object by index into [`SceneConfig::objects`].
    Object(usize),
    /// Singularity marker cylinder by index into
    /// [`SceneConfig::marker_points`].
    Marker(usize),
    /// Wall by index into [`SceneConfig::walls`].
    Wall(usize),
    Floor,
    Ceiling,
    None,
}

/// Signed distance together with the tag of the surface that realizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedDistance {
    pub distance: f64,
    pub tag: Tag,
}

pub fn sdf_sphere(p: Point3, c: Point3, r: f64) -> f64 {
    (p - c).length() - r
}

/// Exact distance to an axis-aligned box with half extents `h`.
pub fn sdf_box(p: Point3, c: Point3, h: Vec3) -> f64 {
    let q = (p - c).abs() - h;
    q.max_scalar(0.0).length() + q.max_component().min(0.0)
}

/// Exact distance to a capped cylinder with vertical axis through `a`.
pub fn sdf_vertical_cylinder(p: Point3, a: Point2, r: f64, z0: f64, z1: f64) -> f64 {
    let radial = (p.xy() - a).length() - r;
    let half = 0.5 * (z1 - z0);
    let axial = (p.z - 0.5 * (z0 + z1)).abs() - half;
    let outside = radial.max(0.0).hypot(axial.max(0.0));
    outside + radial.max(axial).min(0.0)
}

pub fn csg_union(d1: f64, d2: f64) -> f64 {
    d1.min(d2)
}

pub fn csg_intersection(d1: f64, d2: f64) -> f64 {
    d1.max(d2)
}

/// The first shape with the second carved out.
pub fn csg_difference(d1: f64, d2: f64) -> f64 {
    d1.max(-d2)
}

/// Evaluate an object tree at `p`.
pub fn eval_csg(node: &SdfNode, p: Point3) -> f64 {
    match &node.kind {
        NodeKind::Sphere { center, radius } => sdf_sphere(p, *center, *radius),
        NodeKind::Box {
            center,
            half_extents,
        } => sdf_box(p, *center, *half_extents),
        NodeKind::Cylinder {
            axis,
            radius,
            z_min,
            z_max,
        } => sdf_vertical_cylinder(p, *axis, *radius, *z_min, *z_max),
        NodeKind::Union(children) => children
            .iter()
            .map(|c| eval_csg(c, p))
            .fold(f64::INFINITY, csg_union),
        NodeKind::Intersection(children) => children
            .iter()
            .map(|c| eval_csg(c, p))
            .fold(f64::NEG_INFINITY, csg_intersection),
        NodeKind::Difference(a, b) => csg_difference(eval_csg(a, p), eval_csg(b, p)),
    }
}

/// Unsigned distance to the wall rectangle: the edge segment extruded over
/// `z ∈ [0, height]`.
pub fn sdf_wall(wall: &WallRule, height: f64, p: Point3) -> f64 {
    let horizontal = point_segment_distance(p.xy(), wall.start, wall.end);
    let vertical = (-p.z).max(p.z - height).max(0.0);
    horizontal.hypot(vertical)
}

/// True when the floor plane `z = 0` belongs to the field, either as a
/// surface or as the lower wrap plane of a prism.
pub fn has_floor(scene: &SceneConfig) -> bool {
    scene.prism.enabled || scene.render.floor_style != FloorStyle::None
}

pub fn has_ceiling(scene: &SceneConfig) -> bool {
    scene.prism.enabled || scene.render.ceiling_style == CeilingStyle::Solid
}

/// Scene distance with the tag of the nearest part.
///
/// Parts are evaluated in the order objects, markers, walls, floor,
/// ceiling; on ties the earlier part keeps the tag.
pub fn eval_scene_sdf(scene: &SceneConfig, p: Point3) -> TaggedDistance {
    eval_parts(scene, p, None)
}

/// [`eval_scene_sdf`] restricted to the parts a ray at `p` heading along
/// `dir` can leave the room through: a wall counts only when `p` is on its
/// room side (up to `ε`) and the ray is heading out through its line;
/// floor and ceiling count only when the ray moves toward them.
///
/// A ray inside one polygon must cross that polygon's own walls before it
/// can reach anything else in the plane, so the result is still a safe
/// step length. It does not shrink to `2ε` right after a crossing, and a
/// wall shared by two polygons is only seen from the side the ray is on.
pub fn eval_scene_sdf_toward(scene: &SceneConfig, p: Point3, dir: Vec3) -> TaggedDistance {
    eval_parts(scene, p, Some(dir))
}

fn eval_parts(scene: &SceneConfig, p: Point3, dir: Option<Vec3>) -> TaggedDistance {
    let mut best = TaggedDistance {
        distance: f64::INFINITY,
        tag: Tag::None,
    };
    let mut consider = |d: f64, tag: Tag| {
        if d < best.distance {
            best = TaggedDistance { distance: d, tag };
        }
    };
    for (i, o) in scene.objects.iter().enumerate() {
        consider(eval_csg(o, p), Tag::Object(i));
    }
    let top = scene.height;
    let marker_radius = scene.singularity_markers.radius;
    for (i, m) in scene.marker_points().iter().enumerate() {
        consider(
            sdf_vertical_cylinder(p, *m, marker_radius, 0.0, top),
            Tag::Marker(i),
        );
    }
    for (i, w) in scene.walls.iter().enumerate() {
        if let Some(d) = dir {
            let heading_out = d.xy().dot(w.inward_normal) < 0.0;
            if !heading_out || w.signed_line_distance(p.xy()) < -scene.render.epsilon {
                continue;
            }
        }
        consider(sdf_wall(w, top, p), Tag::Wall(i));
    }
    if has_floor(scene) && dir.is_none_or(|d| d.z < 0.0) {
        consider(p.z, Tag::Floor);
    }
    if has_ceiling(scene) && dir.is_none_or(|d| d.z > 0.0) {
        consider(top - p.z, Tag::Ceiling);
    }
    best
}

/// Untagged scene distance.
pub fn scene_distance(scene: &SceneConfig, p: Point3) -> f64 {
    eval_scene_sdf(scene, p).distance
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("degenerate gradient at ({x}, {y}, {z})")]
pub struct DegenerateNormal {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Central-difference gradient of any distance field, normalized.
pub fn gradient_normal(
    f: impl Fn(Point3) -> f64,
    p: Point3,
    h: f64,
) -> Result<Vec3, DegenerateNormal> {
    let dx = Vec3::new(h, 0.0, 0.0);
    let dy = Vec3::new(0.0, h, 0.0);
    let dz = Vec3::new(0.0, 0.0, h);
    let g = Vec3::new(
        f(p + dx) - f(p - dx),
        f(p + dy) - f(p - dy),
        f(p + dz) - f(p - dz),
    );
    let len = g.length();
    if !len.is_finite() || len <= 1e-12 * h {
        return Err(DegenerateNormal {
            x: p.x,
            y: p.y,
            z: p.z,
        });
    }
    Ok(g / len)
}

/// Surface normal at a point near the scene surface, from central
/// differences of the untagged field with step `render.normal_step`.
pub fn estimate_normal(scene: &SceneConfig, p: Point3) -> Result<Vec3, DegenerateNormal> {
    gradient_normal(|q| scene_distance(scene, q), p, scene.render.normal_step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scene::builtin_scene;

    #[test]
    fn sphere_values() {
        let o = Vec3::ZERO;
        assert_eq!(sdf_sphere(Vec3::new(3.0, 4.0, 0.0), o, 2.0), 3.0);
        assert_eq!(sdf_sphere(o, o, 1.0), -1.0);
        assert_eq!(sdf_sphere(Vec3::new(1.0, 0.0, 0.0), o, 1.0), 0.0);
    }

    #[test]
    fn box_values() {
        let h = Vec3::ONE;
        assert_eq!(sdf_box(Vec3::new(2.0, 0.0, 0.0), Vec3::ZERO, h), 1.0);
        assert_eq!(sdf_box(Vec3::new(2.0, 2.0, 0.0), Vec3::ZERO, h), 2f64.sqrt());
        assert_eq!(sdf_box(Vec3::ZERO, Vec3::ZERO, h), -1.0);
    }

    #[test]
    fn cylinder_values() {
        let a = Vec2::ZERO;
        assert_eq!(sdf_vertical_cylinder(Vec3::new(2.0, 0.0, 0.5), a, 1.0, 0.0, 1.0), 1.0);
        assert_eq!(sdf_vertical_cylinder(Vec3::new(0.0, 0.0, 0.5), a, 0.25, 0.0, 1.0), -0.25);
        assert_eq!(sdf_vertical_cylinder(Vec3::new(0.0, 0.0, 2.0), a, 1.0, 0.0, 1.0), 1.0);
        // corner region: diagonal distance to the rim
        let d = sdf_vertical_cylinder(Vec3::new(2.0, 0.0, 2.0), a, 1.0, 0.0, 1.0);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn csg_table() {
        assert_eq!(csg_difference(0.5, 0.3), 0.5);
        assert_eq!(csg_difference(-0.5, -0.2), 0.2);
        assert_eq!(csg_union(0.7, 0.2), 0.2);
        assert_eq!(csg_intersection(0.7, 0.2), 0.7);
        let two = SdfNode::union(vec![
            SdfNode::sphere(Vec3::new(-2.0, 0.0, 0.0), 1.0),
            SdfNode::sphere(Vec3::new(2.0, 0.0, 0.0), 1.0),
        ]);
        assert_eq!(eval_csg(&two, Vec3::new(3.5, 0.0, 0.0)), 0.5);
    }

    #[test]
    fn torus_center_inside_sphere() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects = vec![SdfNode::sphere(Vec3::new(0.5, 0.5, 0.5), 0.1)];
        let td = eval_scene_sdf(&s, Vec3::new(0.5, 0.5, 0.5));
        assert_eq!(td.tag, Tag::Object(0));
        assert!((td.distance + 0.1).abs() < 1e-15);
    }

    #[test]
    fn nearest_wall_is_tagged() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects.clear();
        // 0.05 from the bottom wall (wall 0), at least 0.3 from anything else
        let td = eval_scene_sdf(&s, Vec3::new(0.5, 0.05, 0.5));
        assert_eq!(td.tag, Tag::Wall(0));
        assert!((td.distance - 0.05).abs() < 1e-15);
    }

    #[test]
    fn empty_room_floor() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects.clear();
        s.render.floor_style = FloorStyle::Solid;
        let p = Vec3::new(0.5, 0.5, 0.3);
        let td = eval_scene_sdf(&s, p);
        // independent parts: walls are 0.5 away horizontally, floor 0.3 below
        let wall_min = s
            .walls
            .iter()
            .map(|w| point_segment_distance(p.xy(), w.start, w.end))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(wall_min, 0.5);
        assert_eq!(td.tag, Tag::Floor);
        assert_eq!(td.distance, 0.3);
    }

    #[test]
    fn tie_prefers_earlier_part() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects = vec![SdfNode::sphere(Vec3::new(0.5, 0.5, 0.75), 0.25)];
        // sphere surface and floor are both exactly 0.25 away
        let td = eval_scene_sdf(&s, Vec3::new(0.5, 0.5, 0.25));
        assert_eq!(td.distance, 0.25);
        assert_eq!(td.tag, Tag::Object(0));
        let td = eval_scene_sdf(&s, Vec3::new(0.5, 0.5, 0.125));
        assert_eq!(td.tag, Tag::Floor);
    }

    #[test]
    fn no_geometry_is_untagged() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects.clear();
        s.walls.clear();
        s.render.floor_style = FloorStyle::None;
        let td = eval_scene_sdf(&s, Vec3::new(0.5, 0.5, 0.5));
        assert_eq!(td.tag, Tag::None);
        assert!(td.distance.is_infinite());
    }

    #[test]
    fn sphere_normal_is_radial() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects = vec![SdfNode::sphere(Vec3::ZERO, 1.0)];
        s.walls.clear();
        s.render.floor_style = FloorStyle::None;
        let n = estimate_normal(&s, Vec3::new(1.0 + 1e-4, 0.0, 0.0)).unwrap();
        assert!((n - Vec3::new(1.0, 0.0, 0.0)).abs().max_component() <= 1e-3);
    }

    #[test]
    fn box_face_normal() {
        let mut s = builtin_scene("torus").unwrap();
        s.objects = vec![SdfNode::cuboid(Vec3::ZERO, Vec3::ONE)];
        s.walls.clear();
        s.render.floor_style = FloorStyle::None;
        let n = estimate_normal(&s, Vec3::new(0.2, 1.0 + 5e-5, -0.3)).unwrap();
        assert!((n - Vec3::new(0.0, 1.0, 0.0)).abs().max_component() <= 1e-3);
    }

    #[test]
    fn flat_field_has_no_normal() {
        assert!(gradient_normal(|_| 1.0, Vec3::ZERO, 1e-4).is_err());
    }
}
