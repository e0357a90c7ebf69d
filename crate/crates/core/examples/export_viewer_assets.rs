//! Write everything the web viewer loads: one shader bundle per builtin,
//! a scene index, and the camera-crossing fixtures its tests replay.
//!
//! ```text
//! cargo run --example export_viewer_assets -- [assets_dir]
//! ```

use std::path::PathBuf;

use flatroom::shader::{synthesize_fragment_shader, write_bundle};
use flatroom::viewer::builtin_fixtures;
use flatroom::{builtin_scene, BUILTIN_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "viewer-assets".into()));
    std::fs::create_dir_all(&out)?;
    let mut index = Vec::new();
    for name in BUILTIN_NAMES {
        let bundle = synthesize_fragment_shader(&builtin_scene(name)?)?;
        write_bundle(&bundle, &out)?;
        index.push(bundle.file_stem());
    }
    std::fs::write(out.join("scenes.json"), serde_json::to_string_pretty(&index)? + "\n")?;

    let fixtures = builtin_fixtures();
    std::fs::write(
        out.join("camera_crossings.json"),
        serde_json::to_string_pretty(&fixtures)? + "\n",
    )?;
    println!(
        "{} bundles, {} crossing and {} walk fixtures -> {}",
        index.len(),
        fixtures.crossings.len(),
        fixtures.walks.len(),
        out.display()
    );
    Ok(())
}
