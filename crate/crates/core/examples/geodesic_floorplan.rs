//! Trace straight-line paths on the floor plan and save them as SVG.
//!
//! ```text
//! cargo run --example geodesic_floorplan -- [out_dir]
//! ```

use std::path::PathBuf;

use flatroom::floorplan::export_floorplan_svg;
use flatroom::geodesic::{trace_geodesic_2d, TraceBudget};
use flatroom::{builtin_scene, Vec2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "floorplans".into()));
    std::fs::create_dir_all(&out)?;

    // (scene, start, direction, length)
    let runs = [
        ("torus", Vec2::new(0.25, 0.25), Vec2::new(2.0, 3.0), 13f64.sqrt()),
        ("l_surface", Vec2::new(0.3, 0.2), Vec2::new(1.0, 0.618), 12.0),
        ("double_pentagon", Vec2::new(0.5, 0.4), Vec2::new(0.3, 1.0), 10.0),
        ("cube_net", Vec2::new(1.5, 1.3), Vec2::new(1.0, 0.23), 9.0),
        ("mirror_triangle_irrational", Vec2::new(0.4, 0.2), Vec2::new(1.0, 0.7), 15.0),
    ];
    for (name, start, dir, length) in runs {
        let scene = builtin_scene(name)?;
        let poly = scene.locate(start).ok_or("start outside the floor plan")?;
        let trace = trace_geodesic_2d(
            &scene,
            &scene.polygons[poly].id,
            start,
            dir.normalized(),
            TraceBudget::MaxLength(length),
        )?;
        let path = out.join(format!("{name}.svg"));
        export_floorplan_svg(&scene, &trace.segments, &path)?;
        println!(
            "{name:<28} {:>3} segments {:>3} crossings  end ({:.4}, {:.4})  {:?}",
            trace.segments.len(),
            trace.crossings,
            trace.end.point.x,
            trace.end.point.y,
            trace.status
        );
    }

    // Fagnano's orbit joins the side midpoints and closes after one perimeter
    let scene = builtin_scene("mirror_triangle_equilateral")?;
    let v = &scene.polygons[0].vertices;
    let mid = |i: usize| (v[i] + v[(i + 1) % 3]) * 0.5;
    let start = mid(0) + (mid(1) - mid(0)) * 0.25;
    let perimeter = 3.0 * mid(0).distance(mid(1));
    let trace = trace_geodesic_2d(
        &scene,
        &scene.polygons[0].id,
        start,
        (mid(1) - mid(0)).normalized(),
        TraceBudget::MaxLength(perimeter),
    )?;
    export_floorplan_svg(&scene, &trace.segments, &out.join("fagnano.svg"))?;
    println!(
        "fagnano: {} reflections, closing error {:.2e}",
        trace.crossings,
        trace.end.point.distance(start)
    );
    Ok(())
}
