//! Golden artifacts. Regenerate with `FLATROOM_BLESS=1 cargo test --test goldens`.

mod common;

use flatroom::floorplan::floorplan_svg;
use flatroom::geodesic::{trace_geodesic_2d, TraceBudget};
use flatroom::render::{render_image, CameraFrame};
use flatroom::shader::{reference_scene, synthesize_fragment_shader};
use flatroom::viewer::builtin_fixtures;
use flatroom::{builtin_scene, Vec2, BUILTIN_NAMES};

use common::*;

#[test]
fn render_hashes_match() {
    let hashes = render_hashes(4);
    let text = serde_json::to_string_pretty(&hashes).unwrap() + "\n";
    check_golden(RENDER_HASHES, &text).unwrap();
}

#[test]
fn shader_bundles_match() {
    for name in BUILTIN_NAMES {
        let bundle = synthesize_fragment_shader(&builtin_scene(name).unwrap()).unwrap();
        check_golden(&format!("shaders/{name}.frag"), &bundle.fragment_source).unwrap();
        check_golden(&format!("shaders/{name}.manifest.json"), &bundle.manifest_json()).unwrap();
    }
}

#[test]
fn shader_constants_reproduce_the_golden_renders() {
    let hashes = render_hashes(4);
    for name in BUILTIN_NAMES {
        let bundle = synthesize_fragment_shader(&builtin_scene(name).unwrap()).unwrap();
        let rebuilt = reference_scene(&bundle.fragment_source, &bundle.manifest).unwrap();
        let cam = CameraFrame::from_spec(&rebuilt.camera);
        let img = render_image(&rebuilt, &cam, GOLDEN_SIZE, GOLDEN_SIZE, 4);
        assert_eq!(img.sha256_hex(), hashes[name], "{name}");
    }
}

#[test]
fn l_surface_floorplan() {
    let scene = builtin_scene("l_surface").unwrap();
    let trace = trace_geodesic_2d(
        &scene,
        "l",
        Vec2::new(0.3, 0.2),
        Vec2::new(1.0, 0.618).normalized(),
        TraceBudget::MaxLength(12.0),
    )
    .unwrap();
    let svg = floorplan_svg(&scene, &trace.segments);
    assert_eq!(svg.matches("<polygon").count(), 1);
    assert_eq!(svg.matches("class=\"portal\"").count(), 8);
    check_golden("floorplans/l_surface.svg", &svg).unwrap();
}

#[test]
fn viewer_fixtures() {
    let fixtures = builtin_fixtures();
    let text = serde_json::to_string_pretty(&fixtures).unwrap() + "\n";
    check_golden("viewer/camera_crossings.json", &text).unwrap();
}

#[test]
fn scene_files_match_the_builtins() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    for name in BUILTIN_NAMES {
        let scene = builtin_scene(name).unwrap();
        let path = dir.join(format!("{name}.json"));
        if blessing() {
            std::fs::write(&path, scene.to_json() + "\n").unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(flatroom::parse_scene(&text).unwrap(), scene, "{name}");
    }
}

#[test]
fn readme_scene_blocks_match_the_builtins() {
    let readme = std::fs::read_to_string(std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let mut seen = Vec::new();
    for block in readme.split("```json\n").skip(1) {
        let body = block.split("```").next().unwrap();
        if !body.contains("\"version\"") {
            continue;
        }
        let scene = flatroom::parse_scene(body).unwrap_or_else(|e| panic!("{e}\n{body}"));
        assert_eq!(scene, builtin_scene(&scene.name).unwrap(), "{}", scene.name);
        seen.push(scene.name);
    }
    seen.sort();
    let mut all: Vec<String> = BUILTIN_NAMES.iter().map(|s| s.to_string()).collect();
    all.sort();
    assert_eq!(seen, all);
}
