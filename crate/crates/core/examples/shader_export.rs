//! Compile scenes to GLSL ES fragment shaders with viewer manifests.
//!
//! ```text
//! cargo run --example shader_export -- [out_dir]
//! ```

use std::path::PathBuf;

use flatroom::shader::{synthesize_fragment_shader, write_bundle};
use flatroom::{builtin_scene, BUILTIN_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "shaders".into()));
    std::fs::create_dir_all(&out)?;
    for name in BUILTIN_NAMES {
        let bundle = synthesize_fragment_shader(&builtin_scene(name)?)?;
        let (frag, manifest) = write_bundle(&bundle, &out)?;
        println!(
            "{name:<28} {:>6} bytes, {:>2} walls  {} {}",
            bundle.fragment_source.len(),
            bundle.manifest.wall_planes.len(),
            frag.display(),
            manifest.display()
        );
    }
    Ok(())
}
