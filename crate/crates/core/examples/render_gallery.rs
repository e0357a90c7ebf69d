//! Render every builtin scene from its default camera.
//!
//! ```text
//! cargo run --release --example render_gallery -- [out_dir] [width] [height]
//! ```

use std::path::PathBuf;

use flatroom::render::{render_image, CameraFrame};
use flatroom::{builtin_scene, BUILTIN_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "gallery".into()));
    let width: u32 = args.next().map_or(Ok(320), |a| a.parse())?;
    let height: u32 = args.next().map_or(Ok(200), |a| a.parse())?;
    std::fs::create_dir_all(&out)?;

    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    for name in BUILTIN_NAMES {
        let scene = builtin_scene(name)?;
        let cam = CameraFrame::from_spec(&scene.camera);
        let started = std::time::Instant::now();
        let img = render_image(&scene, &cam, width, height, threads);
        let path = out.join(format!("{name}.png"));
        img.write(&path)?;
        println!("{:<28} {:>7.1} ms  {}", name, started.elapsed().as_secs_f64() * 1e3, path.display());
    }
    Ok(())
}
