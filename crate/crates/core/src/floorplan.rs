//! SVG floor plans: polygons, color-coded wall pairs, singular corners and
//! a traced path.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::geodesic::TraceSegment;
use crate::geometry::Point2;
use crate::scene::{cone_angles, SceneConfig, WallKind};

/// Stroke colors cycled over portal pairs, in pair order.
pub const PAIR_COLORS: [&str; 10] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#9a6324",
    "#808000", "#469990",
];
pub const MIRROR_COLOR: &str = "#7fb2e5";
pub const SOLID_COLOR: &str = "#222222";
pub const TRACE_COLOR: &str = "#d40000";

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn pt(p: Point2) -> String {
    format!("{},{}", num(p.x), num(p.y))
}

/// Render the floor plan as an SVG document.
///
/// Scene coordinates are used directly, with `y` pointing up. Portal
/// walls share a color with their partner, mirrors are drawn light blue
/// and doubled, solid walls dark. Corners of singular vertex classes get
/// a circle, and the trace is one `<path>` (a new subpath wherever the
/// trace jumps across a portal).
pub fn floorplan_svg(scene: &SceneConfig, segments: &[TraceSegment]) -> String {
    let (lo, hi) = scene.bounds();
    let size = (hi.x - lo.x).max(hi.y - lo.y);
    let pad = 0.05 * size;
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let wall_width = 0.012 * size;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        num(x0),
        num(-(y0 + h)),
        num(w),
        num(h),
        (600.0 * w / w.max(h)).round(),
        (600.0 * h / w.max(h)).round(),
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&scene.name));
    out.push_str("  <g transform=\"scale(1,-1)\">\n");

    for poly in &scene.polygons {
        let points: Vec<String> = poly.vertices.iter().map(|v| pt(*v)).collect();
        let _ = writeln!(
            out,
            "    <polygon id=\"{}\" points=\"{}\" fill=\"#f4f1ea\" stroke=\"none\"/>",
            escape(&poly.id),
            points.join(" ")
        );
    }

    let mut pair_of = vec![usize::MAX; scene.walls.len()];
    let mut pairs = 0;
    for (i, wall) in scene.walls.iter().enumerate() {
        if let WallKind::Portal { partner_wall, .. } = wall.kind {
            if pair_of[i] == usize::MAX {
                pair_of[i] = pairs;
                pair_of[partner_wall] = pairs;
                pairs += 1;
            }
        }
    }
    for (i, wall) in scene.walls.iter().enumerate() {
        let (class, stroke, extra) = match wall.kind {
            WallKind::Portal { .. } => (
                "portal",
                PAIR_COLORS[pair_of[i] % PAIR_COLORS.len()],
                format!(" data-pair=\"{}\"", pair_of[i]),
            ),
            WallKind::Mirror => ("mirror", MIRROR_COLOR, String::new()),
            WallKind::Solid => ("solid", SOLID_COLOR, String::new()),
        };
        let _ = writeln!(
            out,
            "    <line class=\"{class}\"{extra} x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{}\" stroke-linecap=\"round\"/>",
            num(wall.start.x),
            num(wall.start.y),
            num(wall.end.x),
            num(wall.end.y),
            num(if class == "mirror" { 2.0 * wall_width } else { wall_width }),
        );
    }

    for class in cone_angles(scene).iter().filter(|c| c.singular) {
        for m in &class.members {
            let v = scene.polygons[m.polygon].vertex(m.vertex);
            let _ = writeln!(
                out,
                "    <circle class=\"singular\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#000000\"/>",
                num(v.x),
                num(v.y),
                num(0.02 * size),
            );
        }
    }

    if !segments.is_empty() {
        let mut d = String::new();
        let mut pen: Option<Point2> = None;
        for s in segments {
            if pen.is_none_or(|p| p.distance(s.start) > 1e-9) {
                let _ = write!(d, "M{} ", pt(s.start));
            }
            let _ = write!(d, "L{} ", pt(s.end));
            pen = Some(s.end);
        }
        let _ = writeln!(
            out,
            "    <path class=\"trace\" d=\"{}\" fill=\"none\" stroke=\"{TRACE_COLOR}\" stroke-width=\"{}\" stroke-linejoin=\"round\"/>",
            d.trim_end(),
            num(0.5 * wall_width),
        );
    }

    out.push_str("  </g>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Write [`floorplan_svg`] to `path`.
pub fn export_floorplan_svg(scene: &SceneConfig, segments: &[TraceSegment], path: &Path) -> io::Result<()> {
    std::fs::write(path, floorplan_svg(scene, segments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{trace_geodesic_2d, TraceBudget};
    use crate::geometry::Vec2;
    use crate::scene::builtin_scene;

    #[test]
    fn torus_trace() {
        let s = builtin_scene("torus").unwrap();
        let t = trace_geodesic_2d(&s, &s.polygons[0].id, Vec2::new(0.5, 0.5), Vec2::new(1.0, 0.0), TraceBudget::MaxLength(1.0)).unwrap();
        let svg = floorplan_svg(&s, &t.segments);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("class=\"portal\"").count(), 4);
        assert!(svg.contains("d=\"M0.500000,0.500000 L1.000000,0.500000 M0.000000,0.500000 L0.500000,0.500000\""));
        assert!(!svg.contains("singular"));
    }

    #[test]
    fn bare_plan() {
        let s = builtin_scene("mirror_triangle_equilateral").unwrap();
        let svg = floorplan_svg(&s, &[]);
        assert!(!svg.contains("<path"));
        assert_eq!(svg.matches("class=\"mirror\"").count(), 3);
        // corners of π/3 are singular
        assert_eq!(svg.matches("class=\"singular\"").count(), 3);
    }

    #[test]
    fn pairs_share_colors() {
        let s = builtin_scene("l_surface").unwrap();
        let svg = floorplan_svg(&s, &[]);
        for pair in 0..4 {
            let tag = format!("data-pair=\"{pair}\"");
            assert_eq!(svg.matches(&tag).count(), 2);
        }
        assert_eq!(num(-0.0), "0.000000");
    }

    #[test]
    fn writes_file() {
        let s = builtin_scene("torus").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.svg");
        export_floorplan_svg(&s, &[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), floorplan_svg(&s, &[]));
        assert!(export_floorplan_svg(&s, &[], &dir.path().join("missing/plan.svg")).is_err());
    }
}
