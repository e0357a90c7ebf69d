//! Flat-surface structure on rays: portal teleports, mirror bounces and the
//! vertical wrap of translation prisms.
//!
//! Every operation moves the ray origin `2ε` into the room it lands in, so
//! the next field evaluation does not immediately report the same wall
//! again. The offset is not added to [`Ray3::traveled`]; each crossing can
//! therefore under-count the traveled length by at most `2ε`.

use crate::geometry::{Isometry2, Point3, Vec3};
use crate::scene::{RenderSettings, SceneConfig, WallKind};

/// Marching state of one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray3 {
    pub origin: Point3,
    /// Unit length.
    pub direction: Vec3,
    pub traveled: f64,
    /// Portal crossings, mirror bounces and wraps so far.
    pub teleports: u32,
    pub transmittance: f64,
}

impl Ray3 {
    pub fn new(origin: Point3, direction: Vec3) -> Self {
        Self {
            origin,
            direction: direction.normalized(),
            traveled: 0.0,
            teleports: 0,
            transmittance: 1.0,
        }
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("teleport budget of {0} crossings exhausted")]
pub struct BudgetExhausted(pub u32);

/// Map the horizontal part of `p` by `iso`, keeping the height.
pub fn apply_isometry(iso: &Isometry2, p: Point3) -> Point3 {
    iso.apply_point(p.xy()).extend(p.z)
}

/// Map a direction by the linear part of `iso`, keeping its vertical part.
pub fn apply_isometry_direction(iso: &Isometry2, d: Vec3) -> Vec3 {
    if iso.is_linear_identity(0.0) {
        return d;
    }
    iso.apply_vector(d.xy()).extend(d.z).normalized()
}

fn spend(ray: &Ray3, budget: u32) -> Result<u32, BudgetExhausted> {
    if ray.teleports >= budget {
        Err(BudgetExhausted(budget))
    } else {
        Ok(ray.teleports + 1)
    }
}

/// Carry a ray that reached portal wall `wall` across to its partner.
///
/// The origin is mapped by the gluing isometry and placed `2ε` inside the
/// partner wall; the direction is mapped by the linear part; transmittance
/// is multiplied by `render.wall_tint`.
///
/// # Panics
/// If `wall` is not a portal.
pub fn teleport_ray(scene: &SceneConfig, ray: &Ray3, wall: usize) -> Result<Ray3, BudgetExhausted> {
    let rule = &scene.walls[wall];
    let WallKind::Portal {
        partner_wall,
        isometry,
        ..
    } = &rule.kind
    else {
        panic!("teleport_ray called on {} wall {wall}", rule.kind.name());
    };
    let teleports = spend(ray, scene.render.max_teleports)?;
    let partner = &scene.walls[*partner_wall];
    let eps = scene.render.epsilon;
    let mapped = apply_isometry(isometry, ray.origin);
    let offset = 2.0 * eps - partner.signed_line_distance(mapped.xy());
    let xy = mapped.xy() + partner.inward_normal * offset;
    Ok(Ray3 {
        origin: xy.extend(mapped.z),
        direction: apply_isometry_direction(isometry, ray.direction),
        traveled: ray.traveled,
        teleports,
        transmittance: ray.transmittance * scene.render.wall_tint,
    })
}

/// Ideal mirror bounce off a wall with inward unit normal `wall_normal`.
pub fn reflect_ray(
    ray: &Ray3,
    wall_normal: Vec3,
    render: &RenderSettings,
) -> Result<Ray3, BudgetExhausted> {
    let teleports = spend(ray, render.max_teleports)?;
    let d = ray.direction;
    let direction = d - wall_normal * (2.0 * d.dot(wall_normal));
    Ok(Ray3 {
        origin: ray.origin + wall_normal * (2.0 * render.epsilon),
        direction,
        traveled: ray.traveled,
        teleports,
        transmittance: ray.transmittance * render.mirror_attenuation,
    })
}

/// Re-enter a translation prism through the opposite horizontal plane.
///
/// A ray leaving through the ceiling re-enters `2ε` above the floor and
/// vice versa; a horizontal ray is wrapped away from the plane it is
/// closer to.
pub fn wrap_vertical(
    ray: &Ray3,
    period: f64,
    render: &RenderSettings,
) -> Result<Ray3, BudgetExhausted> {
    let teleports = spend(ray, render.max_teleports)?;
    let eps = render.epsilon;
    let upward = if ray.direction.z != 0.0 {
        ray.direction.z > 0.0
    } else {
        ray.origin.z > 0.5 * period
    };
    let z = if upward { 2.0 * eps } else { period - 2.0 * eps };
    Ok(Ray3 {
        origin: Vec3::new(ray.origin.x, ray.origin.y, z),
        teleports,
        ..*ray
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scene::builtin_scene;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn isometry_on_points() {
        let p = Vec3::new(0.5, 0.0, 0.7);
        assert_eq!(apply_isometry(&Isometry2::IDENTITY, p), p);
        let t = Isometry2::translation(Vec2::new(0.0, 1.0));
        assert_eq!(apply_isometry(&t, p), Vec3::new(0.5, 1.0, 0.7));
        let r = Isometry2::rotation_about(Vec2::ZERO, FRAC_PI_2).snapped();
        assert_eq!(
            apply_isometry(&r, Vec3::new(1.0, 0.0, 0.3)),
            Vec3::new(0.0, 1.0, 0.3)
        );
    }

    #[test]
    fn torus_left_wall_teleport() {
        let s = builtin_scene("torus").unwrap();
        let eps = s.render.epsilon;
        let ray = Ray3::new(Vec3::new(0.0, 0.5, 0.5), Vec3::new(-1.0, 0.0, 0.0));
        // edge 3 runs (0,1) -> (0,0)
        let out = teleport_ray(&s, &ray, 3).unwrap();
        assert!((out.origin - Vec3::new(1.0 - 2.0 * eps, 0.5, 0.5)).length() < 1e-15);
        assert_eq!(out.direction, ray.direction);
        assert_eq!(out.teleports, 1);
        assert_eq!(out.transmittance, s.render.wall_tint);
    }

    #[test]
    fn cube_net_quarter_turn() {
        let s = builtin_scene("cube_net").unwrap();
        // edge 2 is the right side x = 2 of face [1,2]x[1,2], glued to edge 3
        let ray = Ray3::new(Vec3::new(2.0, 1.5, 0.4), Vec3::new(1.0, 0.0, 0.0));
        let out = teleport_ray(&s, &ray, 2).unwrap();
        assert!((out.direction - Vec3::new(0.0, 1.0, 0.0)).length() < 1e-15);
        assert_eq!(out.origin.z, 0.4);
        // endpoint oracle: (2,1)->(3,2) and (2,2)->(2,2), so (2,1.5) -> (2.5,2)
        let eps = s.render.epsilon;
        assert!((out.origin.xy() - Vec2::new(2.5, 2.0 + 2.0 * eps)).length() < 1e-12);
    }

    #[test]
    fn teleport_round_trip() {
        let s = builtin_scene("double_pentagon").unwrap();
        let eps = s.render.epsilon;
        for (i, w) in s.walls.iter().enumerate() {
            let mid = (w.start + w.end) * 0.5;
            let d = (-w.inward_normal + (w.end - w.start).normalized() * 0.3)
                .extend(0.1)
                .normalized();
            let ray = Ray3::new(mid.extend(0.5), d);
            let across = teleport_ray(&s, &ray, i).unwrap();
            let WallKind::Portal { partner_wall, .. } = w.kind else {
                unreachable!()
            };
            let back_ray = Ray3 {
                direction: -across.direction,
                ..across
            };
            let back = teleport_ray(&s, &back_ray, partner_wall).unwrap();
            assert!((back.origin - ray.origin).length() <= 5.0 * eps);
            assert!((-back.direction - ray.direction).length() <= 1e-9);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = builtin_scene("torus").unwrap();
        let mut ray = Ray3::new(Vec3::new(0.0, 0.5, 0.5), Vec3::new(-1.0, 0.0, 0.0));
        ray.teleports = s.render.max_teleports;
        assert_eq!(teleport_ray(&s, &ray, 3), Err(BudgetExhausted(64)));
        assert!(reflect_ray(&ray, Vec3::new(1.0, 0.0, 0.0), &s.render).is_err());
        assert!(wrap_vertical(&ray, 1.0, &s.render).is_err());
    }

    #[test]
    fn mirror_bounces() {
        let r = RenderSettings::default();
        let head_on = Ray3::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let out = reflect_ray(&head_on, Vec3::new(-1.0, 0.0, 0.0), &r).unwrap();
        assert_eq!(out.direction, Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(out.transmittance, 0.97);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let diag = Ray3::new(Vec3::ZERO, Vec3::new(h, h, 0.0));
        let out = reflect_ray(&diag, Vec3::new(0.0, -1.0, 0.0), &r).unwrap();
        assert!((out.direction - Vec3::new(h, -h, 0.0)).length() < 1e-15);
    }

    #[test]
    fn vertical_wrap() {
        let r = RenderSettings::default();
        let eps = r.epsilon;
        let up = Ray3::new(Vec3::new(0.3, 0.3, 1.0 - eps), Vec3::new(0.0, 0.6, 0.8));
        let w = wrap_vertical(&up, 1.0, &r).unwrap();
        assert!((w.origin.z - 2.0 * eps).abs() < 1e-15);
        assert_eq!(w.direction, up.direction);
        assert_eq!(w.origin.xy(), up.origin.xy());
        let down = Ray3::new(Vec3::new(0.3, 0.3, eps), Vec3::new(0.0, 0.6, -0.8));
        assert!((wrap_vertical(&down, 1.0, &r).unwrap().origin.z - (1.0 - 2.0 * eps)).abs() < 1e-15);
        // wrap and counter-wrap
        let back = wrap_vertical(
            &Ray3 {
                direction: -w.direction,
                ..w
            },
            1.0,
            &r,
        )
        .unwrap();
        assert!((back.origin.z - up.origin.z).abs() <= 5.0 * eps);
    }
}
