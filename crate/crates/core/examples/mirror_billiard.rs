//! Follow one ray around a mirror room and print each bounce.
//!
//! ```text
//! cargo run --example mirror_billiard -- [scene]
//! ```

use flatroom::marcher::march_with;
use flatroom::sdf::Tag;
use flatroom::surface::Ray3;
use flatroom::{builtin_scene, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "mirror_triangle_30_60_90".into());
    let scene = builtin_scene(&name)?;
    let start = scene.camera.position;
    let dir = Vec3::new(1.0, 0.37, 0.0);

    let mut bounces = Vec::new();
    let ray = Ray3::new(start, dir);
    let hit = march_with(&scene, ray, |step| {
        if let Tag::Wall(w) = step.tag {
            if step.distance <= scene.render.epsilon {
                bounces.push((w, step.point, step.traveled));
            }
        }
    });
    for (k, (wall, p, traveled)) in bounces.iter().enumerate() {
        println!("bounce {:>3}: wall {wall} at ({:.5}, {:.5}) after {:.5}", k + 1, p.x, p.y, traveled);
    }
    println!(
        "{name}: {:?} after {} bounces, {} steps, traveled {:.4}, transmittance {:.4}",
        hit.status,
        bounces.len(), hit.steps, hit.traveled, hit.transmittance
    );
    Ok(())
}
