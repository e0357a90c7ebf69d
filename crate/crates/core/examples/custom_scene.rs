//! Build a scene from JSON, validate it and render it.
//!
//! The room is a regular hexagon with opposite sides glued by translation,
//! which is another flat torus, holding a capped column and a small sphere.
//!
//! ```text
//! cargo run --release --example custom_scene -- [out.png]
//! ```

use flatroom::render::{render_image, CameraFrame};
use flatroom::scene::cone_angles;
use flatroom::parse_scene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "hexagon.png".into());
    let h = 3f64.sqrt() / 2.0;
    let json = format!(
        r#"{{
  "version": "1",
  "name": "hex_torus",
  "polygons": [
    {{"id": "hex", "vertices": [[1,0],[0.5,{h}],[-0.5,{h}],[-1,0],[-0.5,-{h}],[0.5,-{h}]]}}
  ],
  "walls": [
    {{"polygon": "hex", "edge": 0, "kind": "portal", "partner": {{"polygon": "hex", "edge": 3}}}},
    {{"polygon": "hex", "edge": 1, "kind": "portal", "partner": {{"polygon": "hex", "edge": 4}}}},
    {{"polygon": "hex", "edge": 2, "kind": "portal", "partner": {{"polygon": "hex", "edge": 5}}}}
  ],
  "height": 1.2,
  "objects": [
    {{"type": "union", "children": [
      {{"type": "cylinder", "axis": [0, 0], "radius": 0.08, "z_range": [0, 0.9]}},
      {{"type": "sphere", "center": [0, 0, 0.95], "radius": 0.14}}
    ], "material": [0.85, 0.55, 0.2]}}
  ],
  "render": {{"headlight": true, "fog_color": [0.75, 0.8, 0.9]}},
  "camera": {{"position": [-0.6, -0.2, 0.6], "yaw": 0.35, "pitch": -0.05, "fov": 75}}
}}"#
    );
    let scene = parse_scene(&json)?;
    for class in cone_angles(&scene) {
        println!("vertex class of {} corners, angle {:.6}", class.members.len(), class.angle);
    }
    let cam = CameraFrame::from_spec(&scene.camera);
    let img = render_image(&scene, &cam, 480, 300, 4);
    img.write(out.as_ref())?;
    println!("{} -> {out} (sha256 {})", scene.name, img.sha256_hex());
    Ok(())
}
