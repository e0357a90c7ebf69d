//! Compile a scene into a self-contained GLSL ES 3.00 fragment shader and a
//! JSON manifest for the interactive viewer.
//!
//! Scene data is embedded as `const` declarations, one per line, with every
//! float written in scientific notation with nine significant digits. The
//! march loop, teleports, shading and camera model follow the CPU modules
//! step for step. Objects are flattened into leaf parameter arrays and a
//! postfix program (`OP_CODE`/`OP_ARG`) evaluated on a small stack.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{Isometry2, Point2, Vec2, Vec3};
use crate::scene::{
    CameraSpec, CeilingStyle, EdgeRef, FloorStyle, GluingKind, NodeKind, Polygon, Prism,
    RenderSettings, SceneConfig, SdfNode, SingularityMarkers, WallKind, WallRule,
};
use crate::sdf::{has_ceiling, has_floor};

pub const MAX_WALLS: usize = 64;
pub const MAX_LEAVES: usize = 32;

/// Uniforms the viewer must set, with their GLSL types.
pub const UNIFORMS: [(&str, &str); 5] = [
    ("uResolution", "vec2"),
    ("uCamPos", "vec3"),
    ("uCamYaw", "float"),
    ("uCamPitch", "float"),
    ("uTime", "float"),
];

const OP_LEAF: i64 = 0;
const OP_UNION: i64 = 1;
const OP_INTERSECTION: i64 = 2;
const OP_DIFFERENCE: i64 = 3;

#[derive(Debug, thiserror::Error)]
pub enum ShaderError {
    #[error("scene has {0} walls; the shader supports at most {MAX_WALLS}")]
    TooManyWalls(usize),
    #[error("scene objects have {0} primitive leaves; the shader supports at most {MAX_LEAVES}")]
    TooManyLeaves(usize),
    #[error("shader constant {0} is missing or malformed")]
    Constant(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometrySpec {
    /// Row-major 2×2 linear part.
    pub linear: [f64; 4],
    pub translation: [f64; 2],
}

impl From<&Isometry2> for IsometrySpec {
    fn from(iso: &Isometry2) -> Self {
        Self {
            linear: iso.linear_flat(),
            translation: [iso.translation.x, iso.translation.y],
        }
    }
}

impl IsometrySpec {
    pub fn to_isometry(&self) -> Isometry2 {
        let l = self.linear;
        Isometry2 {
            linear: [[l[0], l[1]], [l[2], l[3]]],
            translation: Vec2::new(self.translation[0], self.translation[1]),
        }
    }
}

/// A wall as a vertical plane through `point` with room-side `normal`
/// (`normal · x = offset` on the plane), bounded by the segment `a`–`b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WallPlane {
    pub index: usize,
    pub polygon: String,
    pub edge: usize,
    pub kind: String,
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub offset: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Portal walls only.
    pub isometry: Option<IsometrySpec>,
    /// Portal walls only.
    pub partner_index: Option<usize>,
    /// Portal walls only: `translation`, `rotation` or `reflection`.
    pub gluing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraDefaults {
    pub position: [f64; 3],
    pub yaw: f64,
    pub pitch: f64,
    pub fov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifestSettings {
    pub height: f64,
    pub prism: bool,
    pub prism_period: f64,
    pub epsilon: f64,
    pub max_steps: u32,
    pub max_distance: f64,
    pub max_teleports: u32,
    pub floor_style: String,
    pub ceiling_style: String,
    pub headlight: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub scene: String,
    pub fingerprint: String,
    pub uniforms: Vec<UniformSpec>,
    pub wall_planes: Vec<WallPlane>,
    pub bounds: Bounds,
    pub camera: CameraDefaults,
    pub settings: ManifestSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShaderBundle {
    pub name: String,
    pub fragment_source: String,
    pub manifest: Manifest,
}

impl ShaderBundle {
    /// Pretty JSON with fields in declaration order and a final newline.
    pub fn manifest_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// File stem used by [`write_bundle`]: the scene name with anything
    /// outside `[A-Za-z0-9_-]` replaced by `_`.
    pub fn file_stem(&self) -> String {
        self.name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect()
    }
}

/// SHA-256 of the scene's canonical JSON.
pub fn scene_fingerprint(scene: &SceneConfig) -> String {
    hex::encode(Sha256::digest(scene.to_json().as_bytes()))
}

/// Float literal with nine significant digits, e.g. `-1.25000000e-1`.
pub fn glsl_float(x: f64) -> String {
    let s = format!("{x:.8e}");
    if s.starts_with("-0.00000000e") {
        "0.00000000e0".to_string()
    } else {
        s
    }
}

fn vec2_lit(v: Vec2) -> String {
    format!("vec2({}, {})", glsl_float(v.x), glsl_float(v.y))
}

fn vec3_lit(v: Vec3) -> String {
    format!("vec3({}, {}, {})", glsl_float(v.x), glsl_float(v.y), glsl_float(v.z))
}

fn vec4_lit(v: [f64; 4]) -> String {
    let parts: Vec<String> = v.iter().map(|x| glsl_float(*x)).collect();
    format!("vec4({})", parts.join(", "))
}

/// `const T NAME[N] = T[N](...)`, padded with `pad` when empty since GLSL
/// has no zero-length arrays.
fn const_array(out: &mut String, ty: &str, name: &str, items: &[String], pad: &str) {
    let items: Vec<&str> = if items.is_empty() {
        vec![pad]
    } else {
        items.iter().map(String::as_str).collect()
    };
    let n = items.len();
    let _ = writeln!(out, "const {ty} {name}[{n}] = {ty}[{n}]({});", items.join(", "));
}

fn const_scalar(out: &mut String, ty: &str, name: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "const {ty} {name} = {value};");
}

struct FlatObjects {
    leaf_kind: Vec<i64>,
    leaf_a: Vec<[f64; 4]>,
    leaf_b: Vec<[f64; 4]>,
    op_code: Vec<i64>,
    op_arg: Vec<i64>,
    obj_first: Vec<usize>,
    obj_len: Vec<usize>,
    obj_color: Vec<[f64; 4]>,
}

fn flatten(objects: &[SdfNode]) -> FlatObjects {
    fn walk(node: &SdfNode, f: &mut FlatObjects) {
        let (code, arg) = match &node.kind {
            NodeKind::Sphere { center, radius } => {
                f.leaf_kind.push(0);
                f.leaf_a.push([center.x, center.y, center.z, *radius]);
                f.leaf_b.push([0.0; 4]);
                (OP_LEAF, f.leaf_kind.len() as i64 - 1)
            }
            NodeKind::Box {
                center,
                half_extents: h,
            } => {
                f.leaf_kind.push(1);
                f.leaf_a.push([center.x, center.y, center.z, 0.0]);
                f.leaf_b.push([h.x, h.y, h.z, 0.0]);
                (OP_LEAF, f.leaf_kind.len() as i64 - 1)
            }
            NodeKind::Cylinder {
                axis,
                radius,
                z_min,
                z_max,
            } => {
                f.leaf_kind.push(2);
                f.leaf_a.push([axis.x, axis.y, *radius, 0.0]);
                f.leaf_b.push([*z_min, *z_max, 0.0, 0.0]);
                (OP_LEAF, f.leaf_kind.len() as i64 - 1)
            }
            NodeKind::Union(children) | NodeKind::Intersection(children) => {
                for c in children {
                    walk(c, f);
                }
                let code = if matches!(node.kind, NodeKind::Union(_)) {
                    OP_UNION
                } else {
                    OP_INTERSECTION
                };
                (code, children.len() as i64)
            }
            NodeKind::Difference(a, b) => {
                walk(a, f);
                walk(b, f);
                (OP_DIFFERENCE, 2)
            }
        };
        f.op_code.push(code);
        f.op_arg.push(arg);
    }

    let mut f = FlatObjects {
        leaf_kind: Vec::new(),
        leaf_a: Vec::new(),
        leaf_b: Vec::new(),
        op_code: Vec::new(),
        op_arg: Vec::new(),
        obj_first: Vec::new(),
        obj_len: Vec::new(),
        obj_color: Vec::new(),
    };
    for o in objects {
        let first = f.op_code.len();
        walk(o, &mut f);
        f.obj_first.push(first);
        f.obj_len.push(f.op_code.len() - first);
        f.obj_color.push(match o.material {
            Some(c) => [c.x, c.y, c.z, 1.0],
            None => [0.0; 4],
        });
    }
    f
}

fn floor_code(s: FloorStyle) -> i64 {
    match s {
        FloorStyle::Checker => 0,
        FloorStyle::Solid => 1,
        FloorStyle::None => 2,
    }
}

fn ceiling_code(s: CeilingStyle) -> i64 {
    match s {
        CeilingStyle::Solid => 0,
        CeilingStyle::None => 1,
    }
}

fn kind_code(k: &WallKind) -> i64 {
    match k {
        WallKind::Portal { .. } => 0,
        WallKind::Mirror => 1,
        WallKind::Solid => 2,
    }
}

fn floor_name(s: FloorStyle) -> &'static str {
    match s {
        FloorStyle::Checker => "checker",
        FloorStyle::Solid => "solid",
        FloorStyle::None => "none",
    }
}

fn ceiling_name(s: CeilingStyle) -> &'static str {
    match s {
        CeilingStyle::Solid => "solid",
        CeilingStyle::None => "none",
    }
}

fn constants_block(scene: &SceneConfig) -> String {
    let r = &scene.render;
    let mut c = String::new();
    let b = |v: bool| if v { "true" } else { "false" };

    const_scalar(&mut c, "float", "HEIGHT", glsl_float(scene.height));
    const_scalar(&mut c, "bool", "PRISM", b(scene.prism.enabled));
    const_scalar(&mut c, "float", "PRISM_PERIOD", glsl_float(scene.prism.period));
    const_scalar(&mut c, "float", "EPSILON", glsl_float(r.epsilon));
    const_scalar(&mut c, "int", "MAX_STEPS", r.max_steps);
    const_scalar(&mut c, "float", "MAX_DIST", glsl_float(r.max_distance));
    const_scalar(&mut c, "int", "MAX_TELEPORTS", r.max_teleports);
    const_scalar(&mut c, "float", "NORMAL_STEP", glsl_float(r.normal_step));
    const_scalar(&mut c, "vec3", "FOG_COLOR", vec3_lit(r.fog_color));
    const_scalar(&mut c, "float", "WALL_TINT", glsl_float(r.wall_tint));
    const_scalar(&mut c, "float", "MIRROR_ATT", glsl_float(r.mirror_attenuation));
    const_scalar(&mut c, "vec3", "BACKGROUND", vec3_lit(r.background));
    const_scalar(&mut c, "int", "FLOOR_STYLE", floor_code(r.floor_style));
    const_scalar(&mut c, "int", "CEILING_STYLE", ceiling_code(r.ceiling_style));
    const_scalar(&mut c, "bool", "HAS_FLOOR", b(has_floor(scene)));
    const_scalar(&mut c, "bool", "HAS_CEILING", b(has_ceiling(scene)));
    const_scalar(&mut c, "bool", "HEADLIGHT", b(r.headlight));
    const_scalar(&mut c, "float", "FOV_DEG", glsl_float(scene.camera.fov));
    c.push('\n');

    let walls = &scene.walls;
    let wall_items = |f: &dyn Fn(usize, &WallRule) -> String| -> Vec<String> {
        walls.iter().enumerate().map(|(i, w)| f(i, w)).collect()
    };
    const_scalar(&mut c, "int", "POLY_COUNT", scene.polygons.len());
    let mut first = Vec::new();
    let mut acc = 0;
    for p in &scene.polygons {
        first.push(acc.to_string());
        acc += p.vertices.len();
    }
    const_array(&mut c, "int", "POLY_FIRST", &first, "0");
    const_scalar(&mut c, "int", "WALL_COUNT", walls.len());
    const_array(&mut c, "vec2", "WALL_A", &wall_items(&|_, w| vec2_lit(w.start)), "");
    const_array(&mut c, "vec2", "WALL_B", &wall_items(&|_, w| vec2_lit(w.end)), "");
    const_array(&mut c, "vec2", "WALL_N", &wall_items(&|_, w| vec2_lit(w.inward_normal)), "");
    const_array(&mut c, "int", "WALL_KIND", &wall_items(&|_, w| kind_code(&w.kind).to_string()), "");
    const_array(
        &mut c,
        "int",
        "WALL_PARTNER",
        &wall_items(&|i, w| match w.kind {
            WallKind::Portal { partner_wall, .. } => partner_wall.to_string(),
            _ => i.to_string(),
        }),
        "",
    );
    let iso = |w: &WallRule| w.isometry().copied().unwrap_or(Isometry2::IDENTITY);
    // mat2 takes columns
    const_array(
        &mut c,
        "mat2",
        "WALL_LIN",
        &wall_items(&|_, w| {
            let m = iso(w).linear;
            format!(
                "mat2({}, {}, {}, {})",
                glsl_float(m[0][0]),
                glsl_float(m[1][0]),
                glsl_float(m[0][1]),
                glsl_float(m[1][1])
            )
        }),
        "",
    );
    const_array(&mut c, "vec2", "WALL_T", &wall_items(&|_, w| vec2_lit(iso(w).translation)), "");
    c.push('\n');

    let markers = scene.marker_points();
    const_scalar(&mut c, "int", "MARKER_COUNT", markers.len());
    const_scalar(&mut c, "float", "MARKER_R", glsl_float(scene.singularity_markers.radius));
    let items: Vec<String> = markers.iter().map(|m| vec2_lit(*m)).collect();
    const_array(&mut c, "vec2", "MARKER_P", &items, "vec2(0.00000000e0, 0.00000000e0)");
    c.push('\n');

    let f = flatten(&scene.objects);
    let ints = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let usizes = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let vec4s = |v: &[[f64; 4]]| v.iter().map(|x| vec4_lit(*x)).collect::<Vec<_>>();
    let zero4 = vec4_lit([0.0; 4]);
    const_scalar(&mut c, "int", "LEAF_COUNT", f.leaf_kind.len());
    const_array(&mut c, "int", "LEAF_KIND", &ints(&f.leaf_kind), "0");
    const_array(&mut c, "vec4", "LEAF_A", &vec4s(&f.leaf_a), &zero4);
    const_array(&mut c, "vec4", "LEAF_B", &vec4s(&f.leaf_b), &zero4);
    const_scalar(&mut c, "int", "OP_COUNT", f.op_code.len());
    const_array(&mut c, "int", "OP_CODE", &ints(&f.op_code), "0");
    const_array(&mut c, "int", "OP_ARG", &ints(&f.op_arg), "0");
    const_scalar(&mut c, "int", "OBJ_COUNT", f.obj_first.len());
    const_array(&mut c, "int", "OBJ_FIRST", &usizes(&f.obj_first), "0");
    const_array(&mut c, "int", "OBJ_LEN", &usizes(&f.obj_len), "0");
    const_array(&mut c, "vec4", "OBJ_COLOR", &vec4s(&f.obj_color), &zero4);
    c
}

const GLSL_BODY: &str = r#"
const int STACK_SIZE = 32;

struct Sample {
    float d;
    int kind;
    int index;
};

const int K_NONE = 0;
const int K_OBJECT = 1;
const int K_MARKER = 2;
const int K_WALL = 3;
const int K_FLOOR = 4;
const int K_CEILING = 5;

float sdSphere(vec3 p, vec3 c, float r) {
    return length(p - c) - r;
}

float sdBox(vec3 p, vec3 c, vec3 h) {
    vec3 q = abs(p - c) - h;
    return length(max(q, 0.0)) + min(max(q.x, max(q.y, q.z)), 0.0);
}

float sdCylinder(vec3 p, vec2 a, float r, float z0, float z1) {
    float radial = length(p.xy - a) - r;
    float axial = abs(p.z - 0.5 * (z0 + z1)) - 0.5 * (z1 - z0);
    float outside = length(max(vec2(radial, axial), 0.0));
    return outside + min(max(radial, axial), 0.0);
}

float sdLeaf(int i, vec3 p) {
    vec4 a = LEAF_A[i];
    vec4 b = LEAF_B[i];
    if (LEAF_KIND[i] == 0) return sdSphere(p, a.xyz, a.w);
    if (LEAF_KIND[i] == 1) return sdBox(p, a.xyz, b.xyz);
    return sdCylinder(p, a.xy, a.z, b.x, b.y);
}

float sdObject(int o, vec3 p) {
    float stack[STACK_SIZE];
    int sp = 0;
    int last = OBJ_FIRST[o] + OBJ_LEN[o];
    for (int i = OBJ_FIRST[o]; i < last; i++) {
        int code = OP_CODE[i];
        int arg = OP_ARG[i];
        if (code == 0) {
            stack[sp] = sdLeaf(arg, p);
            sp++;
        } else if (code == 3) {
            float carved = stack[sp - 1];
            sp--;
            stack[sp - 1] = max(stack[sp - 1], -carved);
        } else {
            float acc = code == 1 ? 1e30 : -1e30;
            for (int k = 0; k < arg; k++) {
                sp--;
                acc = code == 1 ? min(acc, stack[sp]) : max(acc, stack[sp]);
            }
            stack[sp] = acc;
            sp++;
        }
    }
    return stack[0];
}

float sdWall(int i, vec3 p) {
    vec2 a = WALL_A[i];
    vec2 ab = WALL_B[i] - a;
    float t = clamp(dot(p.xy - a, ab) / dot(ab, ab), 0.0, 1.0);
    float horizontal = length(p.xy - (a + ab * t));
    float vertical = max(max(-p.z, p.z - HEIGHT), 0.0);
    return length(vec2(horizontal, vertical));
}

// With `directional`, only parts the ray along `dir` can still leave
// through are considered; otherwise this is the full field.
Sample sceneSample(vec3 p, vec3 dir, bool directional) {
    Sample s = Sample(1e30, K_NONE, -1);
    for (int i = 0; i < OBJ_COUNT; i++) {
        float d = sdObject(i, p);
        if (d < s.d) s = Sample(d, K_OBJECT, i);
    }
    for (int i = 0; i < MARKER_COUNT; i++) {
        float d = sdCylinder(p, MARKER_P[i], MARKER_R, 0.0, HEIGHT);
        if (d < s.d) s = Sample(d, K_MARKER, i);
    }
    for (int i = 0; i < WALL_COUNT; i++) {
        if (directional) {
            vec2 n = WALL_N[i];
            if (!(dot(dir.xy, n) < 0.0) || dot(p.xy - WALL_A[i], n) < -EPSILON) continue;
        }
        float d = sdWall(i, p);
        if (d < s.d) s = Sample(d, K_WALL, i);
    }
    if (HAS_FLOOR && (!directional || dir.z < 0.0)) {
        if (p.z < s.d) s = Sample(p.z, K_FLOOR, -1);
    }
    if (HAS_CEILING && (!directional || dir.z > 0.0)) {
        if (HEIGHT - p.z < s.d) s = Sample(HEIGHT - p.z, K_CEILING, -1);
    }
    return s;
}

float sceneDist(vec3 p) {
    return sceneSample(p, vec3(0.0), false).d;
}

vec3 estimateNormal(vec3 p, out bool ok) {
    float h = NORMAL_STEP;
    vec3 g = vec3(
        sceneDist(p + vec3(h, 0.0, 0.0)) - sceneDist(p - vec3(h, 0.0, 0.0)),
        sceneDist(p + vec3(0.0, h, 0.0)) - sceneDist(p - vec3(0.0, h, 0.0)),
        sceneDist(p + vec3(0.0, 0.0, h)) - sceneDist(p - vec3(0.0, 0.0, h)));
    float len = length(g);
    ok = len > 1e-12 * h;
    return ok ? g / len : vec3(0.0, 0.0, 1.0);
}

struct Ray {
    vec3 o;
    vec3 d;
    float traveled;
    int teleports;
    float T;
};

void landOnWall(inout Ray r, int i) {
    float toward = -dot(r.d.xy, WALL_N[i]);
    if (toward >= 0.5) {
        float t = max(dot(r.o.xy - WALL_A[i], WALL_N[i]), 0.0) / toward;
        r.o += r.d * t;
        r.traveled += t;
    }
}

void teleport(inout Ray r, int i) {
    int j = WALL_PARTNER[i];
    vec2 mapped = WALL_LIN[i] * r.o.xy + WALL_T[i];
    float offset = 2.0 * EPSILON - dot(mapped - WALL_A[j], WALL_N[j]);
    r.o = vec3(mapped + WALL_N[j] * offset, r.o.z);
    r.d = normalize(vec3(WALL_LIN[i] * r.d.xy, r.d.z));
    r.teleports++;
    r.T *= WALL_TINT;
}

void reflectRay(inout Ray r, int i) {
    vec3 n = vec3(WALL_N[i], 0.0);
    r.d = r.d - n * (2.0 * dot(r.d, n));
    r.o += n * (2.0 * EPSILON);
    r.teleports++;
    r.T *= MIRROR_ATT;
}

void wrapVertical(inout Ray r) {
    bool upward = r.d.z != 0.0 ? r.d.z > 0.0 : r.o.z > 0.5 * PRISM_PERIOD;
    r.o.z = upward ? 2.0 * EPSILON : PRISM_PERIOD - 2.0 * EPSILON;
    r.teleports++;
}

const int HIT = 0;
const int MISS = 1;
const int BUDGET = 2;

int march(inout Ray r, out Sample hit) {
    hit = Sample(0.0, K_NONE, -1);
    int steps = 0;
    for (int guard = 0; guard <= MAX_STEPS; guard++) {
        if (r.traveled >= MAX_DIST) return MISS;
        if (steps >= MAX_STEPS) return BUDGET;
        Sample s = sceneSample(r.o, r.d, true);
        steps++;
        if (s.kind == K_NONE) return MISS;
        if (s.d <= EPSILON) {
            hit = s;
            if (s.kind == K_WALL) {
                int kind = WALL_KIND[s.index];
                if (kind == 2) return HIT;
                landOnWall(r, s.index);
                if (r.teleports >= MAX_TELEPORTS) return BUDGET;
                if (kind == 0) teleport(r, s.index); else reflectRay(r, s.index);
                continue;
            }
            if (PRISM && (s.kind == K_FLOOR || s.kind == K_CEILING)) {
                if (r.teleports >= MAX_TELEPORTS) return BUDGET;
                wrapVertical(r);
                continue;
            }
            return HIT;
        }
        r.o += r.d * s.d;
        r.traveled += s.d;
    }
    return BUDGET;
}

vec3 shade(int status, Ray r, Sample hit) {
    vec3 base = BACKGROUND;
    if (status == HIT) {
        bool ok = true;
        vec3 n = hit.kind == K_WALL ? vec3(WALL_N[hit.index], 0.0) : estimateNormal(r.o, ok);
        if (!ok) {
            base = vec3(0.5);
        } else {
            float facing = max(dot(n, -r.d), 0.0);
            vec4 material = hit.kind == K_OBJECT ? OBJ_COLOR[hit.index] : vec4(0.0);
            base = material.w > 0.5 ? material.rgb * (0.25 + 0.75 * facing) : (n + vec3(1.0)) * 0.5;
            if (HEADLIGHT) {
                base = base * (0.25 + 0.75 * facing) + vec3(0.25 * pow(facing, 32.0));
            }
            if (hit.kind == K_FLOOR && FLOOR_STYLE == 0) {
                float cell = floor(r.o.x / 0.25) + floor(r.o.y / 0.25);
                if (mod(cell, 2.0) == 1.0) base *= 0.75;
            }
        }
    }
    return base * r.T + FOG_COLOR * (1.0 - r.T);
}

void main() {
    float pitch = clamp(uCamPitch, -1.5707953, 1.5707953);
    vec3 forward = vec3(cos(pitch) * cos(uCamYaw), cos(pitch) * sin(uCamYaw), sin(pitch));
    vec3 right = vec3(sin(uCamYaw), -cos(uCamYaw), 0.0);
    vec3 up = cross(right, forward);
    float halfWidth = tan(radians(FOV_DEG) * 0.5);
    vec2 screen = gl_FragCoord.xy / uResolution * 2.0 - 1.0;
    vec3 dir = normalize(forward + right * (screen.x * halfWidth)
        + up * (screen.y * halfWidth * uResolution.y / uResolution.x));
    Ray r = Ray(uCamPos, dir, 0.0, 0, 1.0);
    Sample hit;
    int status = march(r, hit);
    vec3 color = shade(status, r, hit);
    fragColor = vec4(pow(clamp(color, 0.0, 1.0), vec3(1.0 / 2.2)), 1.0);
}
"#;

/// Build the fragment shader and manifest for `scene`.
pub fn synthesize_fragment_shader(scene: &SceneConfig) -> Result<ShaderBundle, ShaderError> {
    if scene.walls.len() > MAX_WALLS {
        return Err(ShaderError::TooManyWalls(scene.walls.len()));
    }
    let leaves: usize = scene.objects.iter().map(SdfNode::leaf_count).sum();
    if leaves > MAX_LEAVES {
        return Err(ShaderError::TooManyLeaves(leaves));
    }
    let fingerprint = scene_fingerprint(scene);

    let mut src = String::new();
    src.push_str("#version 300 es\n");
    let _ = writeln!(src, "// flatroom scene shader: {}", scene.name.replace(['\n', '\r'], " "));
    let _ = writeln!(src, "// fingerprint: sha256:{fingerprint}");
    src.push_str("precision highp float;\nprecision highp int;\n\n");
    for (name, ty) in UNIFORMS {
        let _ = writeln!(src, "uniform {ty} {name};");
    }
    src.push_str("\nout vec4 fragColor;\n\n");
    src.push_str(&constants_block(scene));
    src.push_str(GLSL_BODY);

    Ok(ShaderBundle {
        name: scene.name.clone(),
        fragment_source: src,
        manifest: build_manifest(scene, fingerprint),
    })
}

fn build_manifest(scene: &SceneConfig, fingerprint: String) -> Manifest {
    let wall_planes = scene
        .walls
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (isometry, partner_index, gluing) = match &w.kind {
                WallKind::Portal {
                    partner_wall,
                    gluing,
                    isometry,
                    ..
                } => (
                    Some(IsometrySpec::from(isometry)),
                    Some(*partner_wall),
                    Some(gluing.as_str().to_string()),
                ),
                _ => (None, None, None),
            };
            WallPlane {
                index: i,
                polygon: scene.polygons[w.edge.polygon].id.clone(),
                edge: w.edge.edge,
                kind: w.kind.name().to_string(),
                point: [w.start.x, w.start.y, 0.0],
                // adding 0.0 turns -0.0 into 0.0
                normal: [w.inward_normal.x + 0.0, w.inward_normal.y + 0.0, 0.0],
                offset: w.inward_normal.dot(w.start) + 0.0,
                a: [w.start.x, w.start.y],
                b: [w.end.x, w.end.y],
                isometry,
                partner_index,
                gluing,
            }
        })
        .collect();
    let (lo, hi) = scene.bounds();
    let cam = &scene.camera;
    let r = &scene.render;
    Manifest {
        scene: scene.name.clone(),
        fingerprint,
        uniforms: UNIFORMS
            .iter()
            .map(|(name, ty)| UniformSpec {
                name: name.to_string(),
                ty: ty.to_string(),
            })
            .collect(),
        wall_planes,
        bounds: Bounds {
            min: [lo.x, lo.y, lo.z],
            max: [hi.x, hi.y, hi.z],
        },
        camera: CameraDefaults {
            position: [cam.position.x, cam.position.y, cam.position.z],
            yaw: cam.yaw,
            pitch: cam.pitch,
            fov: cam.fov,
        },
        settings: ManifestSettings {
            height: scene.height,
            prism: scene.prism.enabled,
            prism_period: scene.prism.period,
            epsilon: r.epsilon,
            max_steps: r.max_steps,
            max_distance: r.max_distance,
            max_teleports: r.max_teleports,
            floor_style: floor_name(r.floor_style).to_string(),
            ceiling_style: ceiling_name(r.ceiling_style).to_string(),
            headlight: r.headlight,
        },
    }
}

/// Write `<stem>.frag` and `<stem>.manifest.json` into `dir`.
pub fn write_bundle(bundle: &ShaderBundle, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
    let stem = bundle.file_stem();
    let frag = dir.join(format!("{stem}.frag"));
    let manifest = dir.join(format!("{stem}.manifest.json"));
    std::fs::write(&frag, &bundle.fragment_source)?;
    std::fs::write(&manifest, bundle.manifest_json())?;
    Ok((frag, manifest))
}

/// Names of the uniforms declared in a shader source, in order.
pub fn declared_uniforms(src: &str) -> Vec<(String, String)> {
    src.lines()
        .filter_map(|l| l.trim().strip_prefix("uniform "))
        .filter_map(|rest| {
            let mut it = rest.trim_end_matches(';').split_whitespace();
            let ty = it.next()?;
            let name = it.next()?;
            Some((name.to_string(), ty.to_string()))
        })
        .collect()
}

/// Numeric values of every top-level `const` in a shader, keyed by name.
/// Booleans read as `1`/`0`; vectors and matrices are flattened in source
/// order (so `mat2` comes out column by column).
pub fn parse_constants(src: &str) -> BTreeMap<String, Vec<f64>> {
    let mut out = BTreeMap::new();
    for line in src.lines() {
        let Some(rest) = line.strip_prefix("const ") else {
            continue;
        };
        let Some((lhs, rhs)) = rest.split_once('=') else {
            continue;
        };
        let Some(name) = lhs.split_whitespace().nth(1) else {
            continue;
        };
        let name = name.split('[').next().unwrap_or(name).to_string();
        // drop the array constructor `T[N](`, whose size is not a value
        let rhs = rhs.split_once("](").map_or(rhs, |(_, r)| r);
        let values = rhs
            .split(|c: char| !(c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '+' || c == '_'))
            .filter_map(|tok| match tok {
                "true" => Some(1.0),
                "false" => Some(0.0),
                t if t.starts_with(|c: char| c.is_ascii_digit() || c == '-') => t.parse().ok(),
                _ => None,
            })
            .collect();
        out.insert(name, values);
    }
    out
}

struct Constants(BTreeMap<String, Vec<f64>>);

impl Constants {
    fn all(&self, name: &str) -> Result<&[f64], ShaderError> {
        self.0
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| ShaderError::Constant(name.to_string()))
    }

    fn one(&self, name: &str) -> Result<f64, ShaderError> {
        match self.all(name)? {
            [v] => Ok(*v),
            _ => Err(ShaderError::Constant(name.to_string())),
        }
    }

    fn count(&self, name: &str) -> Result<usize, ShaderError> {
        Ok(self.one(name)? as usize)
    }

    /// First `n` groups of `width` values.
    fn groups(&self, name: &str, width: usize, n: usize) -> Result<Vec<&[f64]>, ShaderError> {
        let v = self.all(name)?;
        if v.len() < width * n {
            return Err(ShaderError::Constant(name.to_string()));
        }
        Ok(v.chunks(width).take(n).collect())
    }

    fn vec3(&self, name: &str) -> Result<Vec3, ShaderError> {
        match self.all(name)? {
            [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
            _ => Err(ShaderError::Constant(name.to_string())),
        }
    }
}

/// Rebuild the scene the shader encodes from its embedded constants, with
/// the camera taken from the manifest.
///
/// Rendering the result on the CPU shows what the emitted shader computes,
/// up to GPU float precision; any transcription mistake in the constants
/// shows up as a different image.
pub fn reference_scene(src: &str, manifest: &Manifest) -> Result<SceneConfig, ShaderError> {
    let c = Constants(parse_constants(src));
    let bad = |n: &str| ShaderError::Constant(n.to_string());

    let n_walls = c.count("WALL_COUNT")?;
    let n_polys = c.count("POLY_COUNT")?;
    let firsts: Vec<usize> = c.groups("POLY_FIRST", 1, n_polys)?.iter().map(|v| v[0] as usize).collect();
    let a = c.groups("WALL_A", 2, n_walls)?;
    let bpts = c.groups("WALL_B", 2, n_walls)?;
    let normals = c.groups("WALL_N", 2, n_walls)?;
    let kinds = c.groups("WALL_KIND", 1, n_walls)?;
    let partners = c.groups("WALL_PARTNER", 1, n_walls)?;
    let lin = c.groups("WALL_LIN", 4, n_walls)?;
    let trans = c.groups("WALL_T", 2, n_walls)?;

    let mut polygons = Vec::new();
    let mut edge_of = Vec::new();
    for (k, &f) in firsts.iter().enumerate() {
        let end = firsts.get(k + 1).copied().unwrap_or(n_walls);
        if f >= end || end > n_walls {
            return Err(bad("POLY_FIRST"));
        }
        polygons.push(Polygon {
            id: manifest
                .wall_planes
                .get(f)
                .map_or_else(|| format!("p{k}"), |w| w.polygon.clone()),
            vertices: (f..end).map(|i| Vec2::new(a[i][0], a[i][1])).collect(),
        });
        edge_of.extend((0..end - f).map(|e| EdgeRef { polygon: k, edge: e }));
    }
    if edge_of.len() != n_walls {
        return Err(bad("POLY_FIRST"));
    }

    let mut walls = Vec::with_capacity(n_walls);
    for i in 0..n_walls {
        let kind = match kinds[i][0] as i64 {
            0 => {
                let j = partners[i][0] as usize;
                let m = lin[i];
                let isometry = Isometry2 {
                    linear: [[m[0], m[2]], [m[1], m[3]]],
                    translation: Vec2::new(trans[i][0], trans[i][1]),
                };
                let gluing = if isometry.determinant() < 0.0 {
                    GluingKind::Reflection
                } else if isometry.is_linear_identity(1e-9) {
                    GluingKind::Translation
                } else {
                    GluingKind::Rotation
                };
                WallKind::Portal {
                    partner: *edge_of.get(j).ok_or_else(|| bad("WALL_PARTNER"))?,
                    partner_wall: j,
                    gluing,
                    isometry,
                }
            }
            1 => WallKind::Mirror,
            2 => WallKind::Solid,
            _ => return Err(bad("WALL_KIND")),
        };
        walls.push(WallRule {
            edge: edge_of[i],
            kind,
            start: Vec2::new(a[i][0], a[i][1]),
            end: Vec2::new(bpts[i][0], bpts[i][1]),
            inward_normal: Vec2::new(normals[i][0], normals[i][1]),
        });
    }

    let n_markers = c.count("MARKER_COUNT")?;
    let marker_points: Vec<Point2> = c
        .groups("MARKER_P", 2, n_markers)?
        .iter()
        .map(|v| Vec2::new(v[0], v[1]))
        .collect();

    let objects = rebuild_objects(&c)?;

    let render = RenderSettings {
        epsilon: c.one("EPSILON")?,
        max_steps: c.count("MAX_STEPS")? as u32,
        max_distance: c.one("MAX_DIST")?,
        max_teleports: c.count("MAX_TELEPORTS")? as u32,
        normal_step: c.one("NORMAL_STEP")?,
        fog_color: c.vec3("FOG_COLOR")?,
        wall_tint: c.one("WALL_TINT")?,
        mirror_attenuation: c.one("MIRROR_ATT")?,
        background: c.vec3("BACKGROUND")?,
        floor_style: match c.count("FLOOR_STYLE")? {
            0 => FloorStyle::Checker,
            1 => FloorStyle::Solid,
            2 => FloorStyle::None,
            _ => return Err(bad("FLOOR_STYLE")),
        },
        ceiling_style: match c.count("CEILING_STYLE")? {
            0 => CeilingStyle::Solid,
            1 => CeilingStyle::None,
            _ => return Err(bad("CEILING_STYLE")),
        },
        headlight: c.one("HEADLIGHT")? != 0.0,
    };
    let cam = &manifest.camera;
    let camera = CameraSpec {
        position: Vec3::new(cam.position[0], cam.position[1], cam.position[2]),
        yaw: cam.yaw,
        pitch: cam.pitch,
        fov: c.one("FOV_DEG")?,
    };

    Ok(SceneConfig::from_parts(
        manifest.scene.clone(),
        polygons,
        walls,
        c.one("HEIGHT")?,
        Prism {
            enabled: c.one("PRISM")? != 0.0,
            period: c.one("PRISM_PERIOD")?,
        },
        SingularityMarkers {
            enabled: n_markers > 0,
            radius: c.one("MARKER_R")?,
        },
        marker_points,
        objects,
        render,
        camera,
    ))
}

fn rebuild_objects(c: &Constants) -> Result<Vec<SdfNode>, ShaderError> {
    let bad = |n: &str| ShaderError::Constant(n.to_string());
    let n_leaves = c.count("LEAF_COUNT")?;
    let n_ops = c.count("OP_COUNT")?;
    let n_obj = c.count("OBJ_COUNT")?;
    let kinds = c.groups("LEAF_KIND", 1, n_leaves)?;
    let la = c.groups("LEAF_A", 4, n_leaves)?;
    let lb = c.groups("LEAF_B", 4, n_leaves)?;
    let codes = c.groups("OP_CODE", 1, n_ops)?;
    let args = c.groups("OP_ARG", 1, n_ops)?;
    let firsts = c.groups("OBJ_FIRST", 1, n_obj)?;
    let lens = c.groups("OBJ_LEN", 1, n_obj)?;
    let colors = c.groups("OBJ_COLOR", 4, n_obj)?;

    let mut objects = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let first = firsts[o][0] as usize;
        let len = lens[o][0] as usize;
        let mut stack: Vec<SdfNode> = Vec::new();
        for i in first..first + len {
            let arg = args.get(i).ok_or_else(|| bad("OP_ARG"))?[0] as usize;
            let node = match codes.get(i).ok_or_else(|| bad("OP_CODE"))?[0] as i64 {
                OP_LEAF => {
                    let (k, a, b) = (
                        kinds.get(arg).ok_or_else(|| bad("LEAF_KIND"))?[0] as i64,
                        la[arg],
                        lb[arg],
                    );
                    match k {
                        0 => SdfNode::sphere(Vec3::new(a[0], a[1], a[2]), a[3]),
                        1 => SdfNode::cuboid(Vec3::new(a[0], a[1], a[2]), Vec3::new(b[0], b[1], b[2])),
                        2 => SdfNode::cylinder(Vec2::new(a[0], a[1]), a[2], b[0], b[1]),
                        _ => return Err(bad("LEAF_KIND")),
                    }
                }
                code @ (OP_UNION | OP_INTERSECTION | OP_DIFFERENCE) => {
                    if stack.len() < arg {
                        return Err(bad("OP_ARG"));
                    }
                    let children = stack.split_off(stack.len() - arg);
                    match code {
                        OP_UNION => SdfNode::union(children),
                        OP_INTERSECTION => SdfNode::intersection(children),
                        _ => {
                            let mut it = children.into_iter();
                            match (it.next(), it.next()) {
                                (Some(x), Some(y)) => SdfNode::difference(x, y),
                                _ => return Err(bad("OP_ARG")),
                            }
                        }
                    }
                }
                _ => return Err(bad("OP_CODE")),
            };
            stack.push(node);
        }
        let mut root = match (stack.pop(), stack.is_empty()) {
            (Some(n), true) => n,
            _ => return Err(bad("OBJ_LEN")),
        };
        let col = colors[o];
        if col[3] > 0.5 {
            root.material = Some(Vec3::new(col[0], col[1], col[2]));
        }
        objects.push(root);
    }
    Ok(objects)
}
