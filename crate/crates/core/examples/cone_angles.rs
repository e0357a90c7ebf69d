//! Vertex classes and cone angles of every builtin surface.
//!
//! ```text
//! cargo run --example cone_angles
//! ```

use std::f64::consts::PI;

use flatroom::scene::cone_angles;
use flatroom::{builtin_scene, BUILTIN_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in BUILTIN_NAMES {
        let scene = builtin_scene(name)?;
        let classes = cone_angles(&scene);
        let singular = classes.iter().filter(|c| c.singular).count();
        println!("{name}: {} classes, {singular} singular", classes.len());
        for c in &classes {
            let corners: Vec<String> = c
                .members
                .iter()
                .map(|m| format!("{}#{}", scene.polygons[m.polygon].id, m.vertex))
                .collect();
            println!(
                "  {:>8.4}π  {}{}  [{}]",
                c.angle / PI,
                if c.singular { "cone point" } else { "regular" },
                if c.boundary { ", on a mirror/solid wall" } else { "" },
                corners.join(" ")
            );
        }
    }
    Ok(())
}
