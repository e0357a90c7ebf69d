//! Camera-crossing test vectors for the interactive viewer.
//!
//! The viewer moves its camera on the client and re-applies wall gluings
//! from the shader manifest itself. These fixtures pin down what that code
//! must produce, computed here with the engine's own isometry maps and
//! geodesic tracer.

use serde::{Deserialize, Serialize};

use crate::geodesic::{trace_geodesic_2d, TraceBudget, TraceStatus};
use crate::geometry::Vec2;
use crate::scene::{builtin_scene, SceneConfig, WallKind};
use crate::surface::{apply_isometry, apply_isometry_direction};

/// Maximum deviation the viewer is allowed from these values.
pub const FIXTURE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub position: [f64; 3],
    pub yaw: f64,
    pub pitch: f64,
}

/// One movement step that crosses a single portal wall.
///
/// The camera moves by `displacement` from `before`, meets wall
/// `wall` at `crossing` and continues from the glued point on the partner
/// wall. `after` is where it ends up with no safe offset applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossingFixture {
    pub scene: String,
    pub wall: usize,
    pub partner: usize,
    pub before: CameraPose,
    pub displacement: [f64; 3],
    pub crossing: [f64; 3],
    pub after: CameraPose,
    /// `after.yaw − before.yaw`, wrapped into `(−π, π]`.
    pub yaw_delta: f64,
}

/// A long straight walk through several walls, for checking that yaw
/// changes accumulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WalkFixture {
    pub scene: String,
    pub start: CameraPose,
    pub distance: f64,
    pub crossings: usize,
    pub after: CameraPose,
    /// Sum of the per-crossing yaw changes, not wrapped.
    pub total_yaw_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewerFixtures {
    pub tolerance: f64,
    pub crossings: Vec<CrossingFixture>,
    pub walks: Vec<WalkFixture>,
}

fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = a.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r - tau
    } else {
        r
    }
}

fn yaw_of(v: Vec2) -> f64 {
    v.y.atan2(v.x)
}

/// Crossing fixtures for every portal wall: the camera starts 0.1 inside
/// the wall, heads out through its midpoint at 0.3 rad off the normal and
/// moves 0.2.
pub fn crossing_fixtures(scene: &SceneConfig) -> Vec<CrossingFixture> {
    let z = 0.5 * scene.height;
    let pitch = 0.1;
    let (s, c) = 0.3f64.sin_cos();
    scene
        .walls
        .iter()
        .enumerate()
        .filter_map(|(i, w)| {
            let WallKind::Portal {
                partner_wall,
                isometry,
                ..
            } = &w.kind
            else {
                return None;
            };
            let out = -w.inward_normal;
            let u = Vec2::new(c * out.x - s * out.y, s * out.x + c * out.y);
            let mid = (w.start + w.end) * 0.5;
            let p0 = (mid - u * 0.1).extend(z);
            let dir = u.extend(0.0);
            let crossing = mid.extend(z);
            let landed = apply_isometry(isometry, crossing);
            let moved = apply_isometry_direction(isometry, dir);
            let p1 = landed + moved * 0.1;
            let yaw0 = yaw_of(u);
            let yaw1 = yaw_of(moved.xy());
            Some(CrossingFixture {
                scene: scene.name.clone(),
                wall: i,
                partner: *partner_wall,
                before: CameraPose {
                    position: p0.into(),
                    yaw: yaw0,
                    pitch,
                },
                displacement: (dir * 0.2).into(),
                crossing: crossing.into(),
                after: CameraPose {
                    position: p1.into(),
                    yaw: yaw1,
                    pitch,
                },
                yaw_delta: wrap_angle(yaw1 - yaw0),
            })
        })
        .collect()
}

/// Walk `distance` straight ahead from the scene's default camera.
pub fn walk_fixture(scene: &SceneConfig, yaw: f64, distance: f64) -> Option<WalkFixture> {
    let start = scene.camera.position;
    let poly = scene.locate(start.xy())?;
    let dir = Vec2::new(yaw.cos(), yaw.sin());
    let trace = trace_geodesic_2d(
        scene,
        &scene.polygons[poly].id,
        start.xy(),
        dir,
        TraceBudget::MaxLength(distance),
    )
    .ok()?;
    if trace.status != TraceStatus::BudgetReached {
        return None;
    }
    let mut total = 0.0;
    let mut heading = dir;
    for seg in &trace.segments {
        let d = (seg.end - seg.start).normalized();
        total += heading.cross(d).atan2(heading.dot(d));
        heading = d;
    }
    total += heading.cross(trace.end.direction).atan2(heading.dot(trace.end.direction));
    Some(WalkFixture {
        scene: scene.name.clone(),
        start: CameraPose {
            position: start.into(),
            yaw,
            pitch: 0.0,
        },
        distance,
        crossings: trace.crossings,
        after: CameraPose {
            position: trace.end.point.extend(start.z).into(),
            yaw: yaw_of(trace.end.direction),
            pitch: 0.0,
        },
        total_yaw_change: total,
    })
}

/// Builtins whose walls are all portals; the viewer slides along mirrors
/// and solid walls instead of crossing them.
pub const FIXTURE_SCENES: [&str; 4] = ["torus", "l_surface", "double_pentagon", "cube_net"];

/// Fixtures for all portal-only builtins.
pub fn builtin_fixtures() -> ViewerFixtures {
    let mut crossings = Vec::new();
    let mut walks = Vec::new();
    for name in FIXTURE_SCENES {
        let scene = builtin_scene(name).expect("builtin scenes are valid");
        crossings.extend(crossing_fixtures(&scene));
        for (yaw, distance) in [(0.3, 7.0), (1.234, 11.0), (-2.2, 5.0)] {
            walks.extend(walk_fixture(&scene, yaw, distance));
        }
    }
    ViewerFixtures {
        tolerance: FIXTURE_TOLERANCE,
        crossings,
        walks,
    }
}
