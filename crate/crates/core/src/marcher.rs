//! Sphere tracing through the glued room, and normal-based shading.

use crate::geometry::{Point3, Vec3};
use crate::scene::{FloorStyle, Rgb, SceneConfig, WallKind};
use crate::sdf::{estimate_normal, eval_scene_sdf_toward, Tag};
use crate::surface::{reflect_ray, teleport_ray, wrap_vertical, Ray3};

/// Checker cell size on floors styled `checker`.
pub const CHECKER_PERIOD: f64 = 0.25;

/// Color used for budget-exhausted pixels when debugging.
pub const BUDGET_DEBUG_COLOR: Rgb = Vec3::new(1.0, 0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitStatus {
    Hit,
    Miss,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitResult {
    pub status: HitStatus,
    /// Final ray position, in the coordinates of the room copy it ended in.
    pub point: Point3,
    /// Final ray direction.
    pub direction: Vec3,
    /// Unit surface normal; `None` unless hit, or when the field has no
    /// usable gradient at the hit point.
    pub normal: Option<Vec3>,
    pub tag: Tag,
    pub traveled: f64,
    pub teleports: u32,
    pub transmittance: f64,
    pub steps: u32,
}

/// One field evaluation seen by [`march_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchStep {
    pub point: Point3,
    pub distance: f64,
    pub tag: Tag,
    pub traveled: f64,
}

/// Move a ray that is heading steeply into a wall exactly onto its line.
fn land_on_wall(scene: &SceneConfig, ray: &mut Ray3, wall: usize) {
    let w = &scene.walls[wall];
    let toward = -ray.direction.xy().dot(w.inward_normal);
    if toward >= 0.5 {
        let t = w.signed_line_distance(ray.origin.xy()).max(0.0) / toward;
        ray.origin = ray.at(t);
        ray.traveled += t;
    }
}

/// Sphere-trace `ray` through the scene.
pub fn march(scene: &SceneConfig, ray: Ray3) -> HitResult {
    march_with(scene, ray, |_| {})
}

/// [`march`], reporting every field evaluation to `visit`.
pub fn march_with(scene: &SceneConfig, mut ray: Ray3, mut visit: impl FnMut(&MarchStep)) -> HitResult {
    let r = &scene.render;
    let eps = r.epsilon;
    let mut steps = 0u32;
    let finish = |status, ray: &Ray3, tag, normal, steps| HitResult {
        status,
        point: ray.origin,
        direction: ray.direction,
        normal,
        tag,
        traveled: ray.traveled,
        teleports: ray.teleports,
        transmittance: ray.transmittance,
        steps,
    };

    loop {
        if ray.traveled >= r.max_distance {
            return finish(HitStatus::Miss, &ray, Tag::None, None, steps);
        }
        if steps >= r.max_steps {
            return finish(HitStatus::BudgetExhausted, &ray, Tag::None, None, steps);
        }
        let td = eval_scene_sdf_toward(scene, ray.origin, ray.direction);
        steps += 1;
        visit(&MarchStep {
            point: ray.origin,
            distance: td.distance,
            tag: td.tag,
            traveled: ray.traveled,
        });
        if td.tag == Tag::None {
            return finish(HitStatus::Miss, &ray, Tag::None, None, steps);
        }

        if td.distance <= eps {
            let moved = match td.tag {
                Tag::Wall(i) => match &scene.walls[i].kind {
                    WallKind::Portal { .. } => {
                        land_on_wall(scene, &mut ray, i);
                        teleport_ray(scene, &ray, i)
                    }
                    WallKind::Mirror => {
                        land_on_wall(scene, &mut ray, i);
                        reflect_ray(&ray, scene.walls[i].inward_normal.extend(0.0), r)
                    }
                    WallKind::Solid => {
                        let n = scene.walls[i].inward_normal.extend(0.0);
                        return finish(HitStatus::Hit, &ray, Tag::Wall(i), Some(n), steps);
                    }
                },
                Tag::Floor | Tag::Ceiling if scene.prism.enabled => {
                    wrap_vertical(&ray, scene.prism.period, r)
                }
                tag => {
                    let normal = estimate_normal(scene, ray.origin).ok();
                    return finish(HitStatus::Hit, &ray, tag, normal, steps);
                }
            };
            match moved {
                Ok(next) => ray = next,
                Err(_) => return finish(HitStatus::BudgetExhausted, &ray, td.tag, None, steps),
            }
            continue;
        }

        ray.origin = ray.at(td.distance);
        ray.traveled += td.distance;
    }
}

/// Fog blend: `base·T + fog·(1 − T)`.
pub fn blend_fog(base: Rgb, transmittance: f64, fog: Rgb) -> Rgb {
    base * transmittance + fog * (1.0 - transmittance)
}

/// Linear RGB of a march result, with budget-exhausted rays drawn as the
/// background.
pub fn shade(scene: &SceneConfig, hit: &HitResult) -> Rgb {
    shade_with(scene, hit, false)
}

/// [`shade`], optionally painting budget-exhausted rays magenta.
pub fn shade_with(scene: &SceneConfig, hit: &HitResult, debug_budget: bool) -> Rgb {
    let r = &scene.render;
    let base = match hit.status {
        HitStatus::Miss => r.background,
        HitStatus::BudgetExhausted if debug_budget => return BUDGET_DEBUG_COLOR,
        HitStatus::BudgetExhausted => r.background,
        HitStatus::Hit => surface_color(scene, hit),
    };
    blend_fog(base, hit.transmittance, r.fog_color)
}

fn surface_color(scene: &SceneConfig, hit: &HitResult) -> Rgb {
    let Some(n) = hit.normal else {
        return Vec3::splat(0.5);
    };
    let view = -hit.direction;
    let facing = n.dot(view).max(0.0);
    let material = match hit.tag {
        Tag::Object(i) => scene.objects.get(i).and_then(|o| o.material),
        _ => None,
    };
    let mut base = match material {
        Some(c) => c * (0.25 + 0.75 * facing),
        None => (n + Vec3::ONE) * 0.5,
    };
    if scene.render.headlight {
        // light and half vector both point back at the camera
        base = base * (0.25 + 0.75 * facing) + Vec3::splat(0.25 * facing.powi(32));
    }
    if hit.tag == Tag::Floor && scene.render.floor_style == FloorStyle::Checker {
        let cell = (hit.point.x / CHECKER_PERIOD).floor() + (hit.point.y / CHECKER_PERIOD).floor();
        if cell.rem_euclid(2.0) == 1.0 {
            base = base * 0.75;
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scene::{builtin_scene, parse_scene, SdfNode};
    use crate::sdf::scene_distance;

    fn open_torus(objects: Vec<SdfNode>) -> SceneConfig {
        let mut s = builtin_scene("torus").unwrap();
        s.objects = objects;
        s.render.floor_style = FloorStyle::None;
        s
    }

    #[test]
    fn empty_all_portal_room_misses() {
        let mut s = open_torus(vec![]);
        // about one crossing per unit traveled
        s.render.max_teleports = 1000;
        let hit = march(&s, Ray3::new(Vec3::new(0.5, 0.5, 0.5), Vec3::new(1.0, 0.0, 0.0)));
        assert_eq!(hit.status, HitStatus::Miss, "{hit:?}");
        assert!(hit.traveled >= s.render.max_distance);
        assert!(hit.teleports <= s.render.max_teleports);
    }

    #[test]
    fn sphere_far_from_walls() {
        let json = r#"{
            "version": "1", "name": "big", "height": 10,
            "polygons": [{"id": "r", "vertices": [[-50,-50],[50,-50],[50,50],[-50,50]]}],
            "objects": [{"type": "sphere", "center": [0,0,5], "radius": 1}],
            "render": {"floor_style": "none"}
        }"#;
        let s = parse_scene(json).unwrap();
        let hit = march(&s, Ray3::new(Vec3::ZERO, Vec3::Z));
        assert_eq!(hit.status, HitStatus::Hit);
        assert_eq!(hit.tag, Tag::Object(0));
        // ray–sphere: |o + t v − c| = r → t = 5 − 1
        assert!((hit.traveled - 4.0).abs() <= 10.0 * s.render.epsilon);
        assert!(hit.steps <= 64);
        let n = hit.normal.unwrap();
        assert!((n - Vec3::new(0.0, 0.0, -1.0)).length() < 1e-4);
    }

    #[test]
    fn torus_wrap_then_sphere() {
        let s = open_torus(vec![SdfNode::sphere(Vec3::new(0.5, 0.5, 0.5), 0.1)]);
        let eps = s.render.epsilon;
        let hit = march(&s, Ray3::new(Vec3::new(0.1, 0.5, 0.5), Vec3::new(-1.0, 0.0, 0.0)));
        assert_eq!(hit.status, HitStatus::Hit);
        assert_eq!(hit.teleports, 1);
        assert!((hit.traveled - 0.5).abs() <= 14.0 * eps);
        assert!((hit.point - Vec3::new(0.6, 0.5, 0.5)).length() <= 14.0 * eps);
        assert_eq!(hit.transmittance, s.render.wall_tint);
    }

    #[test]
    fn solid_wall_gets_flat_normal() {
        let json = r#"{"version":"1","name":"box","polygons":[{"id":"r","vertices":[[0,0],[2,0],[2,1],[0,1]]}],
            "render":{"floor_style":"none"}}"#;
        let s = parse_scene(json).unwrap();
        let hit = march(&s, Ray3::new(Vec3::new(1.0, 0.5, 0.5), Vec3::new(1.0, 0.0, 0.0)));
        assert_eq!(hit.status, HitStatus::Hit);
        assert_eq!(hit.tag, Tag::Wall(1));
        assert_eq!(hit.normal, Some(Vec3::new(-1.0, 0.0, 0.0)));
        assert!(scene_distance(&s, hit.point).abs() <= s.render.epsilon);
    }

    #[test]
    fn mirrors_exhaust_the_budget() {
        let s = builtin_scene("mirror_triangle_equilateral").unwrap();
        let mut s = s;
        s.objects.clear();
        s.render.floor_style = FloorStyle::None;
        let c = s.polygons[0].interior_point();
        let ray = Ray3::new(c.extend(0.5), Vec3::new(0.3, 1.0, 0.0));
        let hit = march(&s, ray);
        assert_eq!(hit.status, HitStatus::BudgetExhausted);
        assert_eq!(hit.steps, s.render.max_steps);
        let expect = s.render.mirror_attenuation.powi(hit.teleports as i32);
        assert!((hit.transmittance - expect).abs() < 1e-12);

        s.render.max_steps = 1_000_000;
        let hit = march(&s, ray);
        assert_eq!(hit.status, HitStatus::BudgetExhausted);
        assert_eq!(hit.teleports, s.render.max_teleports);
        let expect = s.render.mirror_attenuation.powi(64);
        assert!((hit.transmittance - expect).abs() < 1e-12);
    }

    #[test]
    fn prism_wraps_vertically() {
        let mut s = builtin_scene("l_prism").unwrap();
        s.objects = vec![SdfNode::sphere(Vec3::new(0.5, 0.5, 0.5), 0.2)];
        s.singularity_markers.enabled = false;
        // straight up from below the sphere: wrap through the ceiling
        let hit = march(&s, Ray3::new(Vec3::new(0.5, 0.5, 0.8), Vec3::Z));
        assert_eq!(hit.status, HitStatus::Hit);
        assert_eq!(hit.teleports, 1);
        assert!((hit.point.z - 0.3).abs() < 1e-3);
    }

    #[test]
    fn deterministic() {
        let s = builtin_scene("cube_net").unwrap();
        let ray = Ray3::new(s.camera.position, Vec3::new(0.2, 1.0, 0.05));
        assert_eq!(march(&s, ray), march(&s, ray));
    }

    #[test]
    fn shading_examples() {
        let s = open_torus(vec![]);
        let up = HitResult {
            status: HitStatus::Hit,
            point: Vec3::new(0.5, 0.5, 0.0),
            direction: Vec3::new(0.0, 0.0, -1.0),
            normal: Some(Vec3::Z),
            tag: Tag::Wall(0),
            traveled: 1.0,
            teleports: 0,
            transmittance: 1.0,
            steps: 1,
        };
        assert_eq!(shade(&s, &up), Vec3::new(0.5, 0.5, 1.0));
        let miss = HitResult {
            status: HitStatus::Miss,
            normal: None,
            ..up
        };
        assert_eq!(shade(&s, &miss), s.render.background);
        let budget = HitResult {
            status: HitStatus::BudgetExhausted,
            ..miss
        };
        assert_eq!(shade(&s, &budget), s.render.background);
        assert_eq!(shade_with(&s, &budget, true), BUDGET_DEBUG_COLOR);
        assert_eq!(
            blend_fog(Vec3::new(1.0, 0.0, 0.0), 0.5, Vec3::ZERO),
            Vec3::new(0.5, 0.0, 0.0)
        );

        let mut red = open_torus(vec![
            SdfNode::sphere(Vec3::splat(0.5), 0.1).with_material(Vec3::new(1.0, 0.0, 0.0))
        ]);
        red.render.fog_color = Vec3::ZERO;
        let facing = HitResult {
            tag: Tag::Object(0),
            normal: Some(Vec3::new(0.0, 0.0, 1.0)),
            transmittance: 0.5,
            ..up
        };
        assert_eq!(shade(&red, &facing), Vec3::new(0.5, 0.0, 0.0));
    }

    #[test]
    fn checker_floor() {
        let s = builtin_scene("torus").unwrap();
        let at = |x: f64, y: f64| HitResult {
            status: HitStatus::Hit,
            point: Vec2::new(x, y).extend(0.0),
            direction: Vec3::new(0.0, 0.0, -1.0),
            normal: Some(Vec3::Z),
            tag: Tag::Floor,
            traveled: 1.0,
            teleports: 0,
            transmittance: 1.0,
            steps: 1,
        };
        assert_eq!(shade(&s, &at(0.1, 0.1)), Vec3::new(0.5, 0.5, 1.0));
        assert_eq!(shade(&s, &at(0.3, 0.1)), Vec3::new(0.375, 0.375, 0.75));
        assert_eq!(shade(&s, &at(0.3, 0.3)), Vec3::new(0.5, 0.5, 1.0));
    }
}
