//! `flatroom`: render scenes, export floor plans and shaders from the shell.
//!
//! Exit status is 0 on success, 1 for usage and validation errors and 2 for
//! I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use flatroom::floorplan::export_floorplan_svg;
use flatroom::geodesic::{trace_geodesic_2d, TraceBudget};
use flatroom::render::{render_image_with, CameraFrame, RenderOptions};
use flatroom::scene::cone_angles;
use flatroom::shader::{synthesize_fragment_shader, ShaderError};
use flatroom::{builtin_scene, parse_scene, SceneConfig, SceneError, Vec2, Vec3, BUILTIN_NAMES};

#[derive(Parser)]
#[command(name = "flatroom", version, about = "Sphere-traced flat surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene to a PNG or PPM image.
    Render {
        /// Scene JSON file, or `builtin:NAME`.
        scene: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 640)]
        width: u32,
        #[arg(long, default_value_t = 400)]
        height: u32,
        /// Override the scene camera: `x,y,z,yaw,pitch` (radians).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_floats::<5>)]
        camera: Option<[f64; 5]>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Paint rays that run out of budget magenta.
        #[arg(long)]
        debug_budget: bool,
    },
    /// Trace a 2D geodesic and draw it on the floor plan as SVG.
    Floorplan {
        scene: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_floats::<2>)]
        start: [f64; 2],
        #[arg(long, allow_hyphen_values = true, value_parser = parse_floats::<2>)]
        dir: [f64; 2],
        #[arg(long, default_value_t = 10.0)]
        length: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Emit the fragment shader and viewer manifest for a scene.
    Shader {
        scene: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Manifest path (default: next to the shader, `.manifest.json`).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// List the builtin scenes.
    Scenes,
    /// Check a scene file and summarize it.
    Validate { scene: String },
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {:?}", s));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("{p:?} is not a number"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn load_scene(source: &str) -> Result<SceneConfig, Failure> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok(builtin_scene(name)?);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_scene(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Render {
            scene,
            output,
            width,
            height,
            camera,
            threads,
            debug_budget,
        } => {
            if width == 0 || height == 0 {
                return Err(Failure::Invalid("image dimensions must be positive".into()));
            }
            let scene = load_scene(&scene)?;
            let cam = match camera {
                Some([x, y, z, yaw, pitch]) => {
                    let p = Vec3::new(x, y, z);
                    if !scene.contains_point(p) {
                        return Err(SceneError::CameraOutsideRoom(x, y, z).into());
                    }
                    CameraFrame::new(p, yaw, pitch, scene.camera.fov)
                }
                None => CameraFrame::from_spec(&scene.camera),
            };
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let started = Instant::now();
            let img = render_image_with(&scene, &cam, width, height, threads, RenderOptions { debug_budget });
            let elapsed = started.elapsed();
            img.write(&output).map_err(|e| match e {
                flatroom::render::ImageError::Extension(_) => Failure::Invalid(e.to_string()),
                _ => io_failure(&output, e),
            })?;
            println!(
                "{} {}x{} in {:.2}s sha256:{} -> {}",
                scene.name,
                width,
                height,
                elapsed.as_secs_f64(),
                img.sha256_hex(),
                output.display()
            );
        }
        Command::Floorplan {
            scene,
            start,
            dir,
            length,
            output,
        } => {
            let scene = load_scene(&scene)?;
            let start = Vec2::new(start[0], start[1]);
            let poly = scene
                .locate(start)
                .ok_or_else(|| Failure::Invalid(format!("start ({}, {}) is not inside any polygon", start.x, start.y)))?;
            let id = scene.polygons[poly].id.clone();
            let dir = Vec2::new(dir[0], dir[1]);
            if dir.length() == 0.0 {
                return Err(Failure::Invalid("--dir must be nonzero".into()));
            }
            let trace = trace_geodesic_2d(&scene, &id, start, dir.normalized(), TraceBudget::MaxLength(length))
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            export_floorplan_svg(&scene, &trace.segments, &output).map_err(|e| io_failure(&output, e))?;
            println!(
                "{} segments, length {:.6}, {} crossings, ended: {:?} -> {}",
                trace.segments.len(),
                trace.length,
                trace.crossings,
                trace.status,
                output.display()
            );
        }
        Command::Shader { scene, output, manifest } => {
            let scene = load_scene(&scene)?;
            let bundle = synthesize_fragment_shader(&scene).map_err(|e| match e {
                ShaderError::Io(_) => Failure::Io(e.to_string()),
                _ => Failure::Invalid(e.to_string()),
            })?;
            let manifest = manifest.unwrap_or_else(|| default_manifest_path(&output));
            std::fs::write(&output, &bundle.fragment_source).map_err(|e| io_failure(&output, e))?;
            std::fs::write(&manifest, bundle.manifest_json()).map_err(|e| io_failure(&manifest, e))?;
            println!("{} -> {}, {}", scene.name, output.display(), manifest.display());
        }
        Command::Scenes => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
        }
        Command::Validate { scene } => {
            let scene = load_scene(&scene)?;
            let portals = scene.walls.iter().filter(|w| w.is_portal()).count();
            println!(
                "{}: ok ({} polygons, {} walls, {} portal pairs, {} objects)",
                scene.name,
                scene.polygons.len(),
                scene.walls.len(),
                portals / 2,
                scene.objects.len()
            );
            for class in cone_angles(&scene) {
                println!(
                    "  vertex class of {} corners: cone angle {:.6} ({:.4}π){}",
                    class.members.len(),
                    class.angle,
                    class.angle / std::f64::consts::PI,
                    if class.singular { ", singular" } else { "" }
                );
            }
        }
    }
    Ok(())
}

fn default_manifest_path(frag: &Path) -> PathBuf {
    let stem = frag.file_stem().map_or_else(|| "scene".into(), |s| s.to_string_lossy().into_owned());
    frag.with_file_name(format!("{stem}.manifest.json"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Invalid(msg) | Failure::Io(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
