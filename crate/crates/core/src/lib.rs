//! Ray marching inside flat surfaces.
//!
//! A room is a set of planar polygons whose edges are glued by isometries,
//! bounded by mirrors or closed off by solid walls, and extruded to a fixed
//! height. Rays are sphere-traced through the room and carried across glued
//! edges, so a torus, a cube surface or a billiard table can be walked
//! through and rendered from the inside.

pub mod floorplan;
pub mod geodesic;
pub mod geometry;
pub mod marcher;
pub mod render;
pub mod scene;
pub mod sdf;
pub mod shader;
pub mod surface;
pub mod viewer;

pub use geometry::{Isometry2, Point2, Point3, Vec2, Vec3};
pub use scene::{builtin_scene, parse_scene, SceneConfig, SceneError, BUILTIN_NAMES};
