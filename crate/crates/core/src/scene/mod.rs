//! Scene data model: polygons, wall rules, objects, render settings and the
//! camera, plus validation of the JSON scene format.
//!
//! A [`SceneConfig`] is only ever built by validation, so every value of the
//! type satisfies the room invariants: counterclockwise simple polygons, one
//! wall rule per edge, symmetric portal pairs with derived isometries and a
//! camera strictly inside the room.

mod builtin;
mod cone;
mod format;
mod gluing;

use std::collections::HashMap;
use std::fmt;

use crate::geometry::{Isometry2, Point2, Point3, Vec2, Vec3};

pub use builtin::{builtin_scene, BUILTIN_NAMES};
pub use cone::{cone_angles, VertexClass, VertexRef};
pub use format::{
    CameraFile, EdgeRefFile, MarkersFile, NodeFile, PolygonFile, PrismFile, RenderFile,
    SceneFile, WallFile,
};
pub use gluing::{derive_identification_isometry, DirectedEdge, GluingError};

/// The only scene format version understood by this crate.
pub const FORMAT_VERSION: &str = "1";

/// Tolerance for edge-length and endpoint agreement of gluings.
pub const GLUING_TOLERANCE: f64 = 1e-9;

/// Linear RGB color with channels in `[0, 1]`.
pub type Rgb = Vec3;

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("malformed scene JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown scene format version {0:?} (expected \"1\")")]
    UnknownVersion(String),
    #[error("duplicate polygon id {0:?}")]
    DuplicatePolygon(String),
    #[error("polygon {0:?} needs at least 3 vertices")]
    TooFewVertices(String),
    #[error("polygon {0:?} has a non-finite or repeated vertex")]
    DegenerateVertex(String),
    #[error("polygon {0:?} is clockwise; vertices must be listed counterclockwise")]
    Clockwise(String),
    #[error("polygon {0:?} is not simple (edges {1} and {2} intersect)")]
    NotSimple(String, usize, usize),
    #[error("wall references unknown polygon {0:?}")]
    UnknownPolygon(String),
    #[error("edge index {edge} out of range for polygon {polygon:?} with {count} edges")]
    EdgeOutOfRange {
        polygon: String,
        edge: usize,
        count: usize,
    },
    #[error("unknown wall kind {0:?} (expected portal, mirror or solid)")]
    UnknownWallKind(String),
    #[error("unknown gluing kind {0:?} (expected translation, rotation or reflection)")]
    UnknownGluingKind(String),
    #[error("{0} is listed more than once")]
    DuplicateWall(EdgeLabel),
    #[error("{edge}: {reason}")]
    InvalidWall { edge: EdgeLabel, reason: String },
    #[error("edge length mismatch: {from} has length {from_len}, {to} has length {to_len}")]
    EdgeLengthMismatch {
        from: EdgeLabel,
        to: EdgeLabel,
        from_len: f64,
        to_len: f64,
    },
    #[error("{from} -> {to}: declared {declared} gluing but the edges are related by a {actual}")]
    GluingKindMismatch {
        from: EdgeLabel,
        to: EdgeLabel,
        declared: GluingKind,
        actual: GluingKind,
    },
    #[error("camera position ({0}, {1}, {2}) is outside the room")]
    CameraOutsideRoom(f64, f64, f64),
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("unknown builtin scene {0:?}")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, SceneError>;

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> SceneError {
    SceneError::InvalidParameter {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Human-readable edge name used in diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabel {
    pub polygon: String,
    pub edge: usize,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "polygon {:?} edge {}", self.polygon, self.edge)
    }
}

/// An edge addressed by polygon index and edge index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub id: String,
    /// Counterclockwise; edge `i` runs from vertex `i` to vertex `i + 1`.
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        a.distance(b)
    }

    /// Unit normal of edge `i` pointing into the polygon.
    pub fn inward_normal(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge(i);
        (b - a).normalized().perp()
    }

    /// Shoelace area; positive for counterclockwise polygons.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    /// Interior angle at vertex `i`, in `(0, 2π)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let v = self.vertices[i];
        let prev = self.vertices[(i + n - 1) % n] - v;
        let next = self.vertices[(i + 1) % n] - v;
        let a = next.cross(prev).atan2(next.dot(prev));
        if a <= 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    /// Even-odd containment test.
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the polygon outline.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        (0..self.edge_count())
            .map(|i| {
                let (a, b) = self.edge(i);
                crate::geometry::point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_strictly(&self, p: Point2, margin: f64) -> bool {
        self.contains(p) && self.boundary_distance(p) > margin
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// A point strictly inside: the centroid if it is interior, otherwise the
    /// centroid of the first ear.
    pub fn interior_point(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let centroid = self.vertices.iter().fold(Vec2::ZERO, |acc, v| acc + *v) / n;
        if self.contains_strictly(centroid, 1e-6) {
            return centroid;
        }
        let m = self.vertices.len();
        for i in 0..m {
            let a = self.vertices[(i + m - 1) % m];
            let b = self.vertices[i];
            let c = self.vertices[(i + 1) % m];
            if (b - a).cross(c - b) <= 1e-12 {
                continue;
            }
            let candidate = (a + b + c) / 3.0;
            if self.contains_strictly(candidate, 1e-9) {
                return candidate;
            }
        }
        centroid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluingKind {
    Translation,
    Rotation,
    Reflection,
}

impl GluingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GluingKind::Translation => "translation",
            GluingKind::Rotation => "rotation",
            GluingKind::Reflection => "reflection",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "translation" => Ok(GluingKind::Translation),
            "rotation" => Ok(GluingKind::Rotation),
            "reflection" => Ok(GluingKind::Reflection),
            other => Err(SceneError::UnknownGluingKind(other.to_string())),
        }
    }
}

impl fmt::Display for GluingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallKind {
    Portal {
        partner: EdgeRef,
        /// Index of the partner's rule in [`SceneConfig::walls`].
        partner_wall: usize,
        gluing: GluingKind,
        /// Maps this edge onto the partner edge so that an outward crossing
        /// here re-enters the partner polygon.
        isometry: Isometry2,
    },
    Mirror,
    Solid,
}

impl WallKind {
    pub fn name(&self) -> &'static str {
        match self {
            WallKind::Portal { .. } => "portal",
            WallKind::Mirror => "mirror",
            WallKind::Solid => "solid",
        }
    }
}

/// The rule for one polygon edge, with its geometry cached.
#[derive(Debug, Clone, PartialEq)]
pub struct WallRule {
    pub edge: EdgeRef,
    pub kind: WallKind,
    pub start: Point2,
    pub end: Point2,
    pub inward_normal: Vec2,
}

impl WallRule {
    pub fn is_portal(&self) -> bool {
        matches!(self.kind, WallKind::Portal { .. })
    }

    pub fn isometry(&self) -> Option<&Isometry2> {
        match &self.kind {
            WallKind::Portal { isometry, .. } => Some(isometry),
            _ => None,
        }
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }

    /// Signed horizontal distance to the wall's line, positive on the room side.
    pub fn signed_line_distance(&self, p: Point2) -> f64 {
        (p - self.start).dot(self.inward_normal)
    }
}

/// Primitive and CSG nodes of an object.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Sphere {
        center: Point3,
        radius: f64,
    },
    Box {
        center: Point3,
        half_extents: Vec3,
    },
    /// Capped cylinder with a vertical axis through `axis`.
    Cylinder {
        axis: Point2,
        radius: f64,
        z_min: f64,
        z_max: f64,
    },
    Union(Vec<SdfNode>),
    Intersection(Vec<SdfNode>),
    Difference(Box<SdfNode>, Box<SdfNode>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdfNode {
    pub kind: NodeKind,
    pub material: Option<Rgb>,
}

impl SdfNode {
    pub fn sphere(center: Point3, radius: f64) -> Self {
        Self::plain(NodeKind::Sphere { center, radius })
    }

    pub fn cuboid(center: Point3, half_extents: Vec3) -> Self {
        Self::plain(NodeKind::Box {
            center,
            half_extents,
        })
    }

    pub fn cylinder(axis: Point2, radius: f64, z_min: f64, z_max: f64) -> Self {
        Self::plain(NodeKind::Cylinder {
            axis,
            radius,
            z_min,
            z_max,
        })
    }

    pub fn union(children: Vec<SdfNode>) -> Self {
        Self::plain(NodeKind::Union(children))
    }

    pub fn intersection(children: Vec<SdfNode>) -> Self {
        Self::plain(NodeKind::Intersection(children))
    }

    pub fn difference(a: SdfNode, b: SdfNode) -> Self {
        Self::plain(NodeKind::Difference(Box::new(a), Box::new(b)))
    }

    fn plain(kind: NodeKind) -> Self {
        Self {
            kind,
            material: None,
        }
    }

    pub fn with_material(mut self, color: Rgb) -> Self {
        self.material = Some(color);
        self
    }

    /// Number of primitive leaves below (and including) this node.
    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            NodeKind::Sphere { .. } | NodeKind::Box { .. } | NodeKind::Cylinder { .. } => 1,
            NodeKind::Union(c) | NodeKind::Intersection(c) => c.iter().map(Self::leaf_count).sum(),
            NodeKind::Difference(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{path}.{what}"), "must be finite and > 0"))
            }
        };
        let finite3 = |v: Vec3, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{path}.{what}"), "must be finite"))
            }
        };
        if let Some(c) = self.material {
            check_color(c, &format!("{path}.material"))?;
        }
        match &self.kind {
            NodeKind::Sphere { center, radius } => {
                finite3(*center, "center")?;
                positive(*radius, "radius")
            }
            NodeKind::Box {
                center,
                half_extents,
            } => {
                finite3(*center, "center")?;
                positive(half_extents.x, "half_extents")?;
                positive(half_extents.y, "half_extents")?;
                positive(half_extents.z, "half_extents")
            }
            NodeKind::Cylinder {
                axis,
                radius,
                z_min,
                z_max,
            } => {
                if !axis.is_finite() {
                    return Err(invalid(format!("{path}.axis"), "must be finite"));
                }
                positive(*radius, "radius")?;
                if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
                    return Err(invalid(format!("{path}.z_range"), "needs z0 < z1"));
                }
                Ok(())
            }
            NodeKind::Union(children) | NodeKind::Intersection(children) => {
                if children.len() < 2 {
                    return Err(invalid(path, "union/intersection needs at least 2 children"));
                }
                for (i, c) in children.iter().enumerate() {
                    c.validate(&format!("{path}.children[{i}]"))?;
                }
                Ok(())
            }
            NodeKind::Difference(a, b) => {
                a.validate(&format!("{path}.children[0]"))?;
                b.validate(&format!("{path}.children[1]"))
            }
        }
    }
}

fn check_color(c: Rgb, field: &str) -> Result<()> {
    for v in [c.x, c.y, c.z] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(field, "color channels must lie in [0, 1]"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorStyle {
    Checker,
    Solid,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeilingStyle {
    Solid,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSettings {
    /// Hit threshold in scene units.
    pub epsilon: f64,
    pub max_steps: u32,
    pub max_distance: f64,
    /// Shared budget for portal crossings, mirror bounces and vertical wraps.
    pub max_teleports: u32,
    /// Central-difference step for normals.
    pub normal_step: f64,
    pub fog_color: Rgb,
    /// Transmittance factor applied per portal crossing, in `(0, 1]`.
    pub wall_tint: f64,
    /// Transmittance factor applied per mirror bounce, in `(0, 1]`.
    pub mirror_attenuation: f64,
    pub background: Rgb,
    pub floor_style: FloorStyle,
    pub ceiling_style: CeilingStyle,
    /// Modulate the normal coloring by a Blinn–Phong headlight.
    pub headlight: bool,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_steps: 512,
            max_distance: 100.0,
            max_teleports: 64,
            normal_step: 1e-4,
            fog_color: Vec3::new(0.82, 0.86, 0.9),
            wall_tint: 0.92,
            mirror_attenuation: 0.97,
            background: Vec3::new(0.08, 0.09, 0.12),
            floor_style: FloorStyle::Checker,
            ceiling_style: CeilingStyle::None,
            headlight: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prism {
    pub enabled: bool,
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityMarkers {
    pub enabled: bool,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraSpec {
    pub position: Point3,
    pub yaw: f64,
    pub pitch: f64,
    /// Horizontal field of view in degrees.
    pub fov: f64,
}

/// A validated flat-surface room.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub version: String,
    pub name: String,
    pub polygons: Vec<Polygon>,
    /// One rule per edge, ordered by polygon then edge index.
    pub walls: Vec<WallRule>,
    pub height: f64,
    pub prism: Prism,
    pub singularity_markers: SingularityMarkers,
    pub objects: Vec<SdfNode>,
    pub render: RenderSettings,
    pub camera: CameraSpec,
    wall_offsets: Vec<usize>,
    marker_points: Vec<Point2>,
}

/// Parse and validate a scene from JSON text.
pub fn parse_scene(json_text: &str) -> Result<SceneConfig> {
    let file: SceneFile = serde_json::from_str(json_text)?;
    SceneConfig::from_file(file)
}

impl SceneConfig {
    /// Index of the rule for `edge` in [`SceneConfig::walls`].
    pub fn wall_index(&self, edge: EdgeRef) -> usize {
        self.wall_offsets[edge.polygon] + edge.edge
    }

    pub fn wall(&self, edge: EdgeRef) -> &WallRule {
        &self.walls[self.wall_index(edge)]
    }

    pub fn polygon_index(&self, id: &str) -> Option<usize> {
        self.polygons.iter().position(|p| p.id == id)
    }

    pub fn edge_label(&self, edge: EdgeRef) -> EdgeLabel {
        EdgeLabel {
            polygon: self.polygons[edge.polygon].id.clone(),
            edge: edge.edge,
        }
    }

    /// Horizontal positions of the singularity marker cylinders (empty unless
    /// markers are enabled).
    pub fn marker_points(&self) -> &[Point2] {
        &self.marker_points
    }

    /// Index of a polygon strictly containing `p` (margin `1e-9`).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        self.polygons
            .iter()
            .position(|poly| poly.contains_strictly(p, 1e-9))
    }

    /// True when `p` is strictly inside the thickened room.
    pub fn contains_point(&self, p: Point3) -> bool {
        p.z > 0.0 && p.z < self.height && self.locate(p.xy()).is_some()
    }

    /// Bounding box of the room `(min, max)` including the height range.
    pub fn bounds(&self) -> (Point3, Point3) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.polygons {
            let (a, b) = p.bounds();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        (lo.extend(0.0), hi.extend(self.height))
    }

    /// Assemble a scene from parts that are already consistent, skipping
    /// validation. `walls` must be ordered by polygon then edge.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        name: String,
        polygons: Vec<Polygon>,
        walls: Vec<WallRule>,
        height: f64,
        prism: Prism,
        singularity_markers: SingularityMarkers,
        marker_points: Vec<Point2>,
        objects: Vec<SdfNode>,
        render: RenderSettings,
        camera: CameraSpec,
    ) -> SceneConfig {
        let wall_offsets = polygons
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.vertices.len();
                Some(o)
            })
            .collect();
        SceneConfig {
            version: FORMAT_VERSION.to_string(),
            name,
            polygons,
            walls,
            height,
            prism,
            singularity_markers,
            objects,
            render,
            camera,
            wall_offsets,
            marker_points,
        }
    }

    /// Serialize back to the JSON data model.
    pub fn to_file(&self) -> SceneFile {
        format::to_file(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scene serialization cannot fail")
    }

    /// Validate a deserialized scene file.
    pub fn from_file(file: SceneFile) -> Result<SceneConfig> {
        if file.version != FORMAT_VERSION {
            return Err(SceneError::UnknownVersion(file.version));
        }
        let polygons = validate_polygons(&file.polygons)?;

        if !(file.height.is_finite() && file.height > 0.0) {
            return Err(invalid("height", "must be finite and > 0"));
        }
        let height = file.height;

        let mut wall_offsets = Vec::with_capacity(polygons.len());
        let mut total = 0;
        for p in &polygons {
            wall_offsets.push(total);
            total += p.edge_count();
        }

        let walls = build_walls(&polygons, &wall_offsets, &file.walls)?;

        let prism = match file.prism.enabled {
            false => Prism {
                enabled: false,
                period: file.prism.period.unwrap_or(height),
            },
            true => {
                let period = file.prism.period.unwrap_or(height);
                if (period - height).abs() > 1e-12 {
                    return Err(invalid(
                        "prism.period",
                        format!("must equal the room height {height}"),
                    ));
                }
                Prism {
                    enabled: true,
                    period: height,
                }
            }
        };
        if !(prism.period.is_finite() && prism.period > 0.0) {
            return Err(invalid("prism.period", "must be finite and > 0"));
        }

        let singularity_markers = SingularityMarkers {
            enabled: file.singularity_markers.enabled,
            radius: file.singularity_markers.radius,
        };
        if !(singularity_markers.radius.is_finite() && singularity_markers.radius > 0.0) {
            return Err(invalid("singularity_markers.radius", "must be finite and > 0"));
        }

        let objects = file
            .objects
            .iter()
            .map(format::node_from_file)
            .collect::<Result<Vec<_>>>()?;
        for (i, o) in objects.iter().enumerate() {
            o.validate(&format!("objects[{i}]"))?;
        }

        let render = format::render_from_file(&file.render)?;
        validate_render(&render)?;

        let mut scene = SceneConfig {
            version: file.version,
            name: file.name,
            polygons,
            walls,
            height,
            prism,
            singularity_markers,
            objects,
            render,
            camera: CameraSpec {
                position: Vec3::ZERO,
                yaw: 0.0,
                pitch: 0.0,
                fov: 70.0,
            },
            wall_offsets,
            marker_points: Vec::new(),
        };

        scene.camera = match &file.camera {
            Some(c) => CameraSpec {
                position: Vec3::new(c.position[0], c.position[1], c.position[2]),
                yaw: c.yaw,
                pitch: c.pitch,
                fov: c.fov,
            },
            None => CameraSpec {
                position: scene.polygons[0].interior_point().extend(height * 0.5),
                yaw: 0.0,
                pitch: 0.0,
                fov: 70.0,
            },
        };
        let cam = scene.camera;
        if !(cam.yaw.is_finite() && cam.pitch.is_finite()) {
            return Err(invalid("camera", "yaw and pitch must be finite"));
        }
        if cam.pitch.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(invalid("camera.pitch", "must lie in (-π/2, π/2)"));
        }
        if !(cam.fov > 0.0 && cam.fov < 180.0) {
            return Err(invalid("camera.fov", "must lie in (0, 180) degrees"));
        }
        if !cam.position.is_finite() || !scene.contains_point(cam.position) {
            return Err(SceneError::CameraOutsideRoom(
                cam.position.x,
                cam.position.y,
                cam.position.z,
            ));
        }

        if scene.singularity_markers.enabled {
            scene.marker_points = cone_angles(&scene)
                .iter()
                .filter(|c| c.singular && !c.boundary)
                .flat_map(|c| c.members.iter())
                .map(|v| scene.polygons[v.polygon].vertices[v.vertex])
                .collect();
        }
        Ok(scene)
    }
}

fn validate_polygons(files: &[PolygonFile]) -> Result<Vec<Polygon>> {
    if files.is_empty() {
        return Err(invalid("polygons", "at least one polygon is required"));
    }
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(files.len());
    for f in files {
        if seen.insert(f.id.clone(), ()).is_some() {
            return Err(SceneError::DuplicatePolygon(f.id.clone()));
        }
        let poly = Polygon {
            id: f.id.clone(),
            vertices: f.vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect(),
        };
        validate_polygon(&poly)?;
        out.push(poly);
    }
    Ok(out)
}

fn validate_polygon(poly: &Polygon) -> Result<()> {
    let n = poly.vertices.len();
    if n < 3 {
        return Err(SceneError::TooFewVertices(poly.id.clone()));
    }
    for i in 0..n {
        if !poly.vertices[i].is_finite() || poly.edge_length(i) <= GLUING_TOLERANCE {
            return Err(SceneError::DegenerateVertex(poly.id.clone()));
        }
    }
    if poly.signed_area() <= 0.0 {
        return Err(SceneError::Clockwise(poly.id.clone()));
    }
    // adjacent edges may only be collinear when they continue forward
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let (_, c) = poly.edge(i + 1);
        let u = b - a;
        let w = c - b;
        if u.cross(w).abs() <= 1e-12 * u.length() * w.length() && u.dot(w) < 0.0 {
            return Err(SceneError::NotSimple(poly.id.clone(), i, (i + 1) % n));
        }
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = poly.edge(i);
            let (c, d) = poly.edge(j);
            if segments_touch(a, b, c, d) {
                return Err(SceneError::NotSimple(poly.id.clone(), i, j));
            }
        }
    }
    Ok(())
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

/// Closed-segment intersection test (touching counts).
fn segments_touch(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let tol = 1e-12;
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
    {
        return true;
    }
    (d1.abs() <= tol && on_segment(c, d, a))
        || (d2.abs() <= tol && on_segment(c, d, b))
        || (d3.abs() <= tol && on_segment(a, b, c))
        || (d4.abs() <= tol && on_segment(a, b, d))
}

struct PendingPortal {
    partner: EdgeRef,
    gluing: Option<GluingKind>,
}

enum PendingKind {
    Portal(PendingPortal),
    Mirror,
    Solid,
}

fn build_walls(
    polygons: &[Polygon],
    offsets: &[usize],
    files: &[WallFile],
) -> Result<Vec<WallRule>> {
    let label = |e: EdgeRef| EdgeLabel {
        polygon: polygons[e.polygon].id.clone(),
        edge: e.edge,
    };
    let resolve = |polygon: &str, edge: usize| -> Result<EdgeRef> {
        let p = polygons
            .iter()
            .position(|p| p.id == polygon)
            .ok_or_else(|| SceneError::UnknownPolygon(polygon.to_string()))?;
        let count = polygons[p].edge_count();
        if edge >= count {
            return Err(SceneError::EdgeOutOfRange {
                polygon: polygon.to_string(),
                edge,
                count,
            });
        }
        Ok(EdgeRef { polygon: p, edge })
    };

    let total: usize = polygons.iter().map(Polygon::edge_count).sum();
    let mut pending: Vec<Option<PendingKind>> = (0..total).map(|_| None).collect();
    let slot = |e: EdgeRef| offsets[e.polygon] + e.edge;

    for wf in files {
        let edge = resolve(&wf.polygon, wf.edge)?;
        let kind = match wf.kind.as_str() {
            "portal" => {
                let partner = wf.partner.as_ref().ok_or_else(|| SceneError::InvalidWall {
                    edge: label(edge),
                    reason: "portal walls need a partner".into(),
                })?;
                let partner = resolve(&partner.polygon, partner.edge)?;
                if partner == edge {
                    return Err(SceneError::InvalidWall {
                        edge: label(edge),
                        reason: "an edge cannot be glued to itself".into(),
                    });
                }
                let gluing = wf.gluing.as_deref().map(GluingKind::parse).transpose()?;
                PendingKind::Portal(PendingPortal { partner, gluing })
            }
            "mirror" | "solid" => {
                if wf.partner.is_some() || wf.gluing.is_some() {
                    return Err(SceneError::InvalidWall {
                        edge: label(edge),
                        reason: format!("{} walls take no partner or gluing", wf.kind),
                    });
                }
                if wf.kind == "mirror" {
                    PendingKind::Mirror
                } else {
                    PendingKind::Solid
                }
            }
            other => return Err(SceneError::UnknownWallKind(other.to_string())),
        };
        let s = slot(edge);
        if pending[s].is_some() {
            return Err(SceneError::DuplicateWall(label(edge)));
        }
        pending[s] = Some(kind);
    }

    // complete one-sided portal declarations and check symmetry
    let edges: Vec<EdgeRef> = polygons
        .iter()
        .enumerate()
        .flat_map(|(p, poly)| (0..poly.edge_count()).map(move |e| EdgeRef { polygon: p, edge: e }))
        .collect();
    for &e in &edges {
        let (partner, gluing) = match &pending[slot(e)] {
            Some(PendingKind::Portal(pp)) => (pp.partner, pp.gluing),
            _ => continue,
        };
        match &mut pending[slot(partner)] {
            None => {
                pending[slot(partner)] = Some(PendingKind::Portal(PendingPortal {
                    partner: e,
                    gluing,
                }))
            }
            Some(PendingKind::Portal(back)) => {
                if back.partner != e {
                    return Err(SceneError::InvalidWall {
                        edge: label(partner),
                        reason: format!(
                            "is partnered with {} but {} names it as partner",
                            label(back.partner),
                            label(e)
                        ),
                    });
                }
                match (back.gluing, gluing) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(SceneError::InvalidWall {
                            edge: label(partner),
                            reason: format!("gluing {a} disagrees with partner's {b}"),
                        })
                    }
                    (None, Some(b)) => back.gluing = Some(b),
                    _ => {}
                }
            }
            Some(_) => {
                return Err(SceneError::InvalidWall {
                    edge: label(partner),
                    reason: format!("is not a portal but {} names it as partner", label(e)),
                })
            }
        }
    }

    let mut walls = Vec::with_capacity(total);
    for &e in &edges {
        let poly = &polygons[e.polygon];
        let (start, end) = poly.edge(e.edge);
        let kind = match pending[slot(e)].take() {
            None | Some(PendingKind::Solid) => WallKind::Solid,
            Some(PendingKind::Mirror) => WallKind::Mirror,
            Some(PendingKind::Portal(pp)) => {
                let (pa, pb) = polygons[pp.partner.polygon].edge(pp.partner.edge);
                let from = DirectedEdge { start, end };
                let to = DirectedEdge { start: pa, end: pb };
                let derived = match pp.gluing {
                    Some(kind) => derive_identification_isometry(from, to, kind).map(|i| (kind, i)),
                    None => gluing::infer_orientation_preserving(from, to),
                };
                let (gluing, isometry) = derived.map_err(|err| match err {
                    GluingError::LengthMismatch { from_len, to_len } => {
                        SceneError::EdgeLengthMismatch {
                            from: label(e),
                            to: label(pp.partner),
                            from_len,
                            to_len,
                        }
                    }
                    GluingError::KindMismatch { declared, actual } => {
                        SceneError::GluingKindMismatch {
                            from: label(e),
                            to: label(pp.partner),
                            declared,
                            actual,
                        }
                    }
                })?;
                WallKind::Portal {
                    partner: pp.partner,
                    partner_wall: slot(pp.partner),
                    gluing,
                    isometry,
                }
            }
        };
        walls.push(WallRule {
            edge: e,
            kind,
            start,
            end,
            inward_normal: poly.inward_normal(e.edge),
        });
    }
    Ok(walls)
}

fn validate_render(r: &RenderSettings) -> Result<()> {
    let pos = |v: f64, f: &str| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(invalid(format!("render.{f}"), "must be finite and > 0"))
        }
    };
    pos(r.epsilon, "epsilon")?;
    pos(r.max_distance, "max_distance")?;
    pos(r.normal_step, "normal_step")?;
    if r.max_steps < 1 {
        return Err(invalid("render.max_steps", "must be >= 1"));
    }
    if r.max_teleports < 1 {
        return Err(invalid("render.max_teleports", "must be >= 1"));
    }
    for (v, f) in [(r.wall_tint, "wall_tint"), (r.mirror_attenuation, "mirror_attenuation")] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(invalid(format!("render.{f}"), "must lie in (0, 1]"));
        }
    }
    check_color(r.fog_color, "render.fog_color")?;
    check_color(r.background, "render.background")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = r#"{
        "version": "1",
        "name": "minimal",
        "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
        "walls": [
            {"polygon": "sq", "edge": 0, "kind": "portal", "partner": {"polygon": "sq", "edge": 2}},
            {"polygon": "sq", "edge": 2, "kind": "portal", "partner": {"polygon": "sq", "edge": 0}},
            {"polygon": "sq", "edge": 1, "kind": "portal", "partner": {"polygon": "sq", "edge": 3}},
            {"polygon": "sq", "edge": 3, "kind": "portal", "partner": {"polygon": "sq", "edge": 1}}
        ],
        "objects": [{"type": "sphere", "center": [0.5, 0.5, 0.5], "radius": 0.1}],
        "camera": {"position": [0.2, 0.2, 0.5], "yaw": 0, "pitch": 0, "fov": 70}
    }"#;

    #[test]
    fn minimal_torus_parses() {
        let s = parse_scene(TORUS).unwrap();
        assert_eq!(s.name, "minimal");
        assert_eq!(s.walls.len(), 4);
        let expected = [(0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)];
        for (w, (tx, ty)) in s.walls.iter().zip(expected) {
            let iso = w.isometry().unwrap();
            assert!(iso.is_linear_identity(0.0));
            assert_eq!(iso.translation, Vec2::new(tx, ty));
        }
        assert_eq!(s.render.epsilon, 1e-4);
        assert_eq!(s.render.max_steps, 512);
        assert_eq!(s.height, 1.0);
    }

    #[test]
    fn length_mismatch_names_both_edges() {
        // bottom edge has length 2, top edge length 1
        let text = TORUS.replace("[[0,0],[1,0],[1,1],[0,1]]", "[[0,0],[2,0],[1,1],[0,1]]");
        let err = parse_scene(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("edge length mismatch"), "{msg}");
        assert!(msg.contains("edge 0") && msg.contains("edge 2"), "{msg}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(parse_scene("{"), Err(SceneError::Json(_))));
        let v2 = TORUS.replace(r#""version": "1""#, r#""version": "2""#);
        assert!(matches!(parse_scene(&v2), Err(SceneError::UnknownVersion(_))));
        let cw = TORUS.replace("[[0,0],[1,0],[1,1],[0,1]]", "[[0,1],[1,1],[1,0],[0,0]]");
        assert!(matches!(parse_scene(&cw), Err(SceneError::Clockwise(_))));
        let bowtie = TORUS.replace("[[0,0],[1,0],[1,1],[0,1]]", "[[0,0],[1,1],[1,0],[0,1]]");
        assert!(matches!(
            parse_scene(&bowtie),
            Err(SceneError::NotSimple(..)) | Err(SceneError::Clockwise(_))
        ));
        let range = TORUS.replace(r#""edge": 3, "kind""#, r#""edge": 7, "kind""#);
        assert!(matches!(parse_scene(&range), Err(SceneError::EdgeOutOfRange { .. })));
        let kind = TORUS.replacen(r#""kind": "portal""#, r#""kind": "window""#, 1);
        assert!(matches!(parse_scene(&kind), Err(SceneError::UnknownWallKind(_))));
        let cam = TORUS.replace("[0.2, 0.2, 0.5]", "[1.5, 0.2, 0.5]");
        assert!(matches!(parse_scene(&cam), Err(SceneError::CameraOutsideRoom(..))));
        let cam_z = TORUS.replace("[0.2, 0.2, 0.5]", "[0.2, 0.2, 1.0]");
        assert!(matches!(parse_scene(&cam_z), Err(SceneError::CameraOutsideRoom(..))));
    }

    #[test]
    fn bowtie_is_not_simple() {
        // counterclockwise overall area but self-intersecting
        let poly = Polygon {
            id: "p".into(),
            vertices: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(2.0, 0.0),
                Vec2::new(2.0, 2.0),
                Vec2::new(1.0, -1.0),
                Vec2::new(0.0, 2.0),
            ],
        };
        assert!(matches!(validate_polygon(&poly), Err(SceneError::NotSimple(..))));
    }

    #[test]
    fn one_sided_portal_is_completed() {
        let text = r#"{
            "version": "1", "name": "half",
            "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
            "walls": [{"polygon": "sq", "edge": 1, "kind": "portal", "partner": {"polygon": "sq", "edge": 3}}]
        }"#;
        let s = parse_scene(text).unwrap();
        assert!(s.walls[1].is_portal() && s.walls[3].is_portal());
        assert!(matches!(s.walls[0].kind, WallKind::Solid));
        let a = s.walls[1].isometry().unwrap();
        let b = s.walls[3].isometry().unwrap();
        let id = a.compose(b);
        assert!(id.is_linear_identity(1e-12) && id.translation.length() < 1e-12);
        // default camera lands inside the room
        assert!(s.contains_point(s.camera.position));
    }

    #[test]
    fn asymmetric_partners_rejected() {
        let text = r#"{
            "version": "1", "name": "bad",
            "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
            "walls": [
                {"polygon": "sq", "edge": 1, "kind": "portal", "partner": {"polygon": "sq", "edge": 3}},
                {"polygon": "sq", "edge": 3, "kind": "mirror"}
            ]
        }"#;
        assert!(matches!(parse_scene(text), Err(SceneError::InvalidWall { .. })));
    }

    #[test]
    fn declared_translation_on_rotated_edges_is_rejected() {
        // bottom edge glued to the right edge cannot be a translation
        let text = r#"{
            "version": "1", "name": "bad",
            "polygons": [{"id": "sq", "vertices": [[0,0],[1,0],[1,1],[0,1]]}],
            "walls": [{"polygon": "sq", "edge": 0, "kind": "portal",
                       "partner": {"polygon": "sq", "edge": 1}, "gluing": "translation"}]
        }"#;
        assert!(matches!(
            parse_scene(text),
            Err(SceneError::GluingKindMismatch { .. })
        ));
    }

    #[test]
    fn prism_period_must_match_height() {
        let text = TORUS.replace(
            r#""objects""#,
            r#""prism": {"enabled": true, "period": 2.0}, "objects""#,
        );
        assert!(matches!(parse_scene(&text), Err(SceneError::InvalidParameter { .. })));
        let ok = TORUS.replace(r#""objects""#, r#""prism": {"enabled": true}, "objects""#);
        let s = parse_scene(&ok).unwrap();
        assert!(s.prism.enabled);
        assert_eq!(s.prism.period, s.height);
    }

    #[test]
    fn interior_angles() {
        let l = Polygon {
            id: "l".into(),
            vertices: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(2.0, 0.0),
                Vec2::new(2.0, 1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(1.0, 2.0),
                Vec2::new(0.0, 2.0),
            ],
        };
        use std::f64::consts::{FRAC_PI_2, PI};
        assert!((l.interior_angle(0) - FRAC_PI_2).abs() < 1e-15);
        assert!((l.interior_angle(3) - 3.0 * FRAC_PI_2).abs() < 1e-15);
        let total: f64 = (0..6).map(|i| l.interior_angle(i)).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        assert!(l.contains(Vec2::new(0.5, 1.5)));
        assert!(!l.contains(Vec2::new(1.5, 1.5)));
    }
}
