//! The gallery of built-in rooms.
//!
//! Non-rational coordinates (pentagon vertices, triangle apexes) are frozen
//! as literals so that renders and emitted shaders do not depend on the
//! platform's trigonometric functions.

use super::format::{
    CameraFile, EdgeRefFile, MarkersFile, NodeFile, PolygonFile, PrismFile, RenderFile,
    SceneFile, WallFile,
};
use super::{Result, SceneConfig, SceneError, FORMAT_VERSION};

pub const BUILTIN_NAMES: [&str; 9] = [
    "torus",
    "l_surface",
    "double_pentagon",
    "cube_net",
    "mirror_triangle_irrational",
    "mirror_triangle_30_60_90",
    "mirror_triangle_equilateral",
    "l_prism",
    "double_pentagon_prism",
];

/// Build one of the [`BUILTIN_NAMES`] scenes.
pub fn builtin_scene(name: &str) -> Result<SceneConfig> {
    let file = match name {
        "torus" => torus(),
        "l_surface" => l_surface(false),
        "double_pentagon" => double_pentagon(false),
        "cube_net" => cube_net(),
        "mirror_triangle_irrational" => mirror_triangle_irrational(),
        "mirror_triangle_30_60_90" => mirror_triangle_30_60_90(),
        "mirror_triangle_equilateral" => mirror_triangle_equilateral(),
        "l_prism" => l_surface(true),
        "double_pentagon_prism" => double_pentagon(true),
        other => return Err(SceneError::UnknownBuiltin(other.to_string())),
    };
    SceneConfig::from_file(file)
}

/// Regular pentagon with unit sides whose top edge is `(0.5, 0)–(−0.5, 0)`,
/// counterclockwise from the top-right vertex.
const PENTAGON: [[f64; 2]; 5] = [
    [0.5, 0.0],
    [-0.5, 0.0],
    [-0.8090169943749475, -0.9510565162951535],
    [0.0, -1.5388417685876268],
    [0.8090169943749475, -0.9510565162951535],
];

/// Apothem of the unit-side regular pentagon.
const PENTAGON_APOTHEM: f64 = 0.6881909602355868;

const SQRT_3: f64 = 1.7320508075688772;
const HALF_SQRT_3: f64 = 0.8660254037844386;

/// Apex of the triangle with base `(0,0)–(1.5,0)` and base angles
/// `(60 + √2)°` and `75°`.
const IRRATIONAL_APEX: [f64; 2] = [1.0055345978240886, 1.8453700035054819];

fn poly(id: &str, vertices: &[[f64; 2]]) -> PolygonFile {
    PolygonFile {
        id: id.to_string(),
        vertices: vertices.to_vec(),
    }
}

/// Both directions of a portal pair.
fn portal_pair(a: (&str, usize), b: (&str, usize), gluing: &str) -> [WallFile; 2] {
    let one = |from: (&str, usize), to: (&str, usize)| WallFile {
        polygon: from.0.to_string(),
        edge: from.1,
        kind: "portal".into(),
        partner: Some(EdgeRefFile {
            polygon: to.0.to_string(),
            edge: to.1,
        }),
        gluing: Some(gluing.to_string()),
    };
    [one(a, b), one(b, a)]
}

fn mirrors(id: &str, count: usize) -> Vec<WallFile> {
    (0..count)
        .map(|edge| WallFile {
            polygon: id.to_string(),
            edge,
            kind: "mirror".into(),
            partner: None,
            gluing: None,
        })
        .collect()
}

/// A cube with a sphere carved out of it, centered at `c`.
fn test_object(c: [f64; 3], half: f64) -> NodeFile {
    NodeFile::Difference {
        children: vec![
            NodeFile::Box {
                center: c,
                half_extents: [half; 3],
                material: None,
            },
            NodeFile::Sphere {
                center: c,
                radius: half * 1.3,
                material: None,
            },
        ],
        material: None,
    }
}

fn camera(position: [f64; 3], yaw: f64, pitch: f64) -> Option<CameraFile> {
    Some(CameraFile {
        position,
        yaw,
        pitch,
        fov: 70.0,
    })
}

fn base(name: &str, polygons: Vec<PolygonFile>, walls: Vec<WallFile>) -> SceneFile {
    SceneFile {
        version: FORMAT_VERSION.to_string(),
        name: name.to_string(),
        polygons,
        walls,
        height: 1.0,
        prism: PrismFile::default(),
        singularity_markers: MarkersFile::default(),
        objects: Vec::new(),
        render: RenderFile::default(),
        camera: None,
    }
}

fn markers_on() -> MarkersFile {
    MarkersFile {
        enabled: true,
        ..MarkersFile::default()
    }
}

fn torus() -> SceneFile {
    let id = "square";
    let mut walls = Vec::new();
    walls.extend(portal_pair((id, 0), (id, 2), "translation"));
    walls.extend(portal_pair((id, 1), (id, 3), "translation"));
    let mut f = base(
        "torus",
        vec![poly(id, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])],
        walls,
    );
    f.objects = vec![test_object([0.5, 0.5, 0.5], 0.12)];
    f.camera = camera([0.15, 0.2, 0.45], 0.7, 0.0);
    f
}

/// Three unit squares in an L; the two long sides are split at their
/// midpoints so that every edge has a unit-length parallel partner.
fn l_surface(prism: bool) -> SceneFile {
    let id = "l";
    let vertices = [
        [0.0, 0.0],
        [1.0, 0.0],
        [2.0, 0.0],
        [2.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
        [0.0, 1.0],
    ];
    let mut walls = Vec::new();
    // columns: bottom edges against top edges
    walls.extend(portal_pair((id, 0), (id, 5), "translation"));
    walls.extend(portal_pair((id, 1), (id, 3), "translation"));
    // rows: right edges against left edges
    walls.extend(portal_pair((id, 2), (id, 7), "translation"));
    walls.extend(portal_pair((id, 4), (id, 6), "translation"));
    let name = if prism { "l_prism" } else { "l_surface" };
    let mut f = base(name, vec![poly(id, &vertices)], walls);
    f.objects = vec![test_object([0.5, 0.5, 0.5], 0.12)];
    if prism {
        f.prism = PrismFile {
            enabled: true,
            period: Some(1.0),
        };
        f.camera = camera([1.6, 0.3, 0.3], 2.96, 0.35);
    } else {
        f.singularity_markers = markers_on();
        f.camera = camera([1.6, 0.3, 0.45], 2.96, 0.0);
    }
    f
}

/// Two unit-side regular pentagons, the second the half-turn of the first,
/// sharing the horizontal edge on `y = 0`. Edge `k` of one pentagon is
/// glued by translation to the parallel edge `k` of the other.
fn double_pentagon(prism: bool) -> SceneFile {
    let lower: Vec<[f64; 2]> = PENTAGON.to_vec();
    let upper: Vec<[f64; 2]> = PENTAGON
        .iter()
        .map(|[x, y]| [if *x == 0.0 { 0.0 } else { -x }, if *y == 0.0 { 0.0 } else { -y }])
        .collect();
    let mut walls = Vec::new();
    for k in 0..5 {
        walls.extend(portal_pair(("lower", k), ("upper", k), "translation"));
    }
    let name = if prism {
        "double_pentagon_prism"
    } else {
        "double_pentagon"
    };
    let mut f = base(
        name,
        vec![poly("lower", &lower), poly("upper", &upper)],
        walls,
    );
    f.objects = vec![test_object([0.0, -PENTAGON_APOTHEM, 0.5], 0.12)];
    if prism {
        f.prism = PrismFile {
            enabled: true,
            period: Some(1.0),
        };
        f.camera = camera([0.1, 0.6, 0.3], -1.5, 0.35);
    } else {
        f.singularity_markers = markers_on();
        f.camera = camera([0.1, 0.6, 0.45], -1.5, 0.0);
    }
    f
}

/// Cross-shaped net of the unit cube: a column of four faces
/// `[1,2]×[0,4]` with arms `[0,1]×[2,3]` and `[2,3]×[2,3]`.
fn cube_net() -> SceneFile {
    let id = "net";
    let vertices = [
        [1.0, 0.0],
        [2.0, 0.0],
        [2.0, 1.0],
        [2.0, 2.0],
        [3.0, 2.0],
        [3.0, 3.0],
        [2.0, 3.0],
        [2.0, 4.0],
        [1.0, 4.0],
        [1.0, 3.0],
        [0.0, 3.0],
        [0.0, 2.0],
        [1.0, 2.0],
        [1.0, 1.0],
    ];
    let mut walls = Vec::new();
    walls.extend(portal_pair((id, 0), (id, 7), "translation"));
    walls.extend(portal_pair((id, 1), (id, 4), "rotation"));
    walls.extend(portal_pair((id, 2), (id, 3), "rotation"));
    walls.extend(portal_pair((id, 5), (id, 6), "rotation"));
    walls.extend(portal_pair((id, 8), (id, 9), "rotation"));
    walls.extend(portal_pair((id, 10), (id, 13), "rotation"));
    walls.extend(portal_pair((id, 11), (id, 12), "rotation"));
    let mut f = base("cube_net", vec![poly(id, &vertices)], walls);
    f.objects = vec![test_object([1.5, 2.5, 0.5], 0.12)];
    f.singularity_markers = markers_on();
    f.camera = camera([1.5, 0.5, 0.45], std::f64::consts::FRAC_PI_2, 0.0);
    f
}

fn mirror_room(name: &str, vertices: &[[f64; 2]], half: f64, cam: [f64; 3], yaw: f64) -> SceneFile {
    let id = "triangle";
    let n = vertices.len() as f64;
    let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut f = base(name, vec![poly(id, vertices)], mirrors(id, vertices.len()));
    f.objects = vec![test_object([cx, cy, 0.5], half)];
    f.camera = camera(cam, yaw, 0.0);
    f
}

fn mirror_triangle_irrational() -> SceneFile {
    mirror_room(
        "mirror_triangle_irrational",
        &[[0.0, 0.0], [1.5, 0.0], IRRATIONAL_APEX],
        0.1,
        [0.8, 0.15, 0.45],
        1.5,
    )
}

fn mirror_triangle_30_60_90() -> SceneFile {
    mirror_room(
        "mirror_triangle_30_60_90",
        &[[0.0, 0.0], [SQRT_3, 0.0], [0.0, 1.0]],
        0.07,
        [1.2, 0.15, 0.45],
        2.857,
    )
}

fn mirror_triangle_equilateral() -> SceneFile {
    mirror_room(
        "mirror_triangle_equilateral",
        &[[0.0, 0.0], [1.0, 0.0], [0.5, HALF_SQRT_3]],
        0.06,
        [0.2, 0.12, 0.45],
        0.51,
    )
}
