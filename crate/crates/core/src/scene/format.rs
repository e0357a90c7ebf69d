//! Serde data model of the JSON scene format (version "1").

use serde::{Deserialize, Serialize};

use super::{
    invalid, CeilingStyle, FloorStyle, NodeKind, RenderSettings, Result, SceneConfig, SdfNode,
    WallKind,
};
use crate::geometry::{Vec2, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: String,
    pub name: String,
    pub polygons: Vec<PolygonFile>,
    #[serde(default)]
    pub walls: Vec<WallFile>,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default)]
    pub prism: PrismFile,
    #[serde(default)]
    pub singularity_markers: MarkersFile,
    #[serde(default)]
    pub objects: Vec<NodeFile>,
    #[serde(default)]
    pub render: RenderFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera: Option<CameraFile>,
}

fn default_height() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRefFile {
    pub polygon: String,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallFile {
    pub polygon: String,
    pub edge: usize,
    /// `portal`, `mirror` or `solid`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<EdgeRefFile>,
    /// `translation`, `rotation` or `reflection`; portals only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrismFile {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkersFile {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_marker_radius")]
    pub radius: f64,
}

fn default_marker_radius() -> f64 {
    0.03
}

impl Default for MarkersFile {
    fn default() -> Self {
        Self {
            enabled: false,
            radius: default_marker_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeFile {
    Sphere {
        center: [f64; 3],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
    Box {
        center: [f64; 3],
        half_extents: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
    Cylinder {
        axis: [f64; 2],
        radius: f64,
        z_range: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
    Union {
        children: Vec<NodeFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
    Intersection {
        children: Vec<NodeFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
    Difference {
        children: Vec<NodeFile>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        material: Option<[f64; 3]>,
    },
}

/// Every field is optional; omitted fields take [`RenderSettings::default`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_teleports: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fog_color: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_tint: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_attenuation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_style: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling_style: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headlight: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
    #[serde(default)]
    pub pitch: f64,
    #[serde(default = "default_fov")]
    pub fov: f64,
}

fn default_fov() -> f64 {
    70.0
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn arr3(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub(super) fn node_from_file(f: &NodeFile) -> Result<SdfNode> {
    let (kind, material) = match f {
        NodeFile::Sphere {
            center,
            radius,
            material,
        } => (
            NodeKind::Sphere {
                center: v3(*center),
                radius: *radius,
            },
            material,
        ),
        NodeFile::Box {
            center,
            half_extents,
            material,
        } => (
            NodeKind::Box {
                center: v3(*center),
                half_extents: v3(*half_extents),
            },
            material,
        ),
        NodeFile::Cylinder {
            axis,
            radius,
            z_range,
            material,
        } => (
            NodeKind::Cylinder {
                axis: Vec2::new(axis[0], axis[1]),
                radius: *radius,
                z_min: z_range[0],
                z_max: z_range[1],
            },
            material,
        ),
        NodeFile::Union { children, material } => (
            NodeKind::Union(children.iter().map(node_from_file).collect::<Result<_>>()?),
            material,
        ),
        NodeFile::Intersection { children, material } => (
            NodeKind::Intersection(children.iter().map(node_from_file).collect::<Result<_>>()?),
            material,
        ),
        NodeFile::Difference { children, material } => {
            if children.len() != 2 {
                return Err(invalid(
                    "difference",
                    format!("needs exactly 2 children, got {}", children.len()),
                ));
            }
            (
                NodeKind::Difference(
                    Box::new(node_from_file(&children[0])?),
                    Box::new(node_from_file(&children[1])?),
                ),
                material,
            )
        }
    };
    Ok(SdfNode {
        kind,
        material: material.map(v3),
    })
}

pub(super) fn node_to_file(n: &SdfNode) -> NodeFile {
    let material = n.material.map(arr3);
    match &n.kind {
        NodeKind::Sphere { center, radius } => NodeFile::Sphere {
            center: arr3(*center),
            radius: *radius,
            material,
        },
        NodeKind::Box {
            center,
            half_extents,
        } => NodeFile::Box {
            center: arr3(*center),
            half_extents: arr3(*half_extents),
            material,
        },
        NodeKind::Cylinder {
            axis,
            radius,
            z_min,
            z_max,
        } => NodeFile::Cylinder {
            axis: [axis.x, axis.y],
            radius: *radius,
            z_range: [*z_min, *z_max],
            material,
        },
        NodeKind::Union(c) => NodeFile::Union {
            children: c.iter().map(node_to_file).collect(),
            material,
        },
        NodeKind::Intersection(c) => NodeFile::Intersection {
            children: c.iter().map(node_to_file).collect(),
            material,
        },
        NodeKind::Difference(a, b) => NodeFile::Difference {
            children: vec![node_to_file(a), node_to_file(b)],
            material,
        },
    }
}

pub(super) fn render_from_file(f: &RenderFile) -> Result<RenderSettings> {
    let d = RenderSettings::default();
    let floor_style = match f.floor_style.as_deref() {
        None => d.floor_style,
        Some("checker") => FloorStyle::Checker,
        Some("solid") => FloorStyle::Solid,
        Some("none") => FloorStyle::None,
        Some(other) => {
            return Err(invalid(
                "render.floor_style",
                format!("{other:?} is not one of checker, solid, none"),
            ))
        }
    };
    let ceiling_style = match f.ceiling_style.as_deref() {
        None => d.ceiling_style,
        Some("solid") => CeilingStyle::Solid,
        Some("none") => CeilingStyle::None,
        Some(other) => {
            return Err(invalid(
                "render.ceiling_style",
                format!("{other:?} is not one of solid, none"),
            ))
        }
    };
    Ok(RenderSettings {
        epsilon: f.epsilon.unwrap_or(d.epsilon),
        max_steps: f.max_steps.unwrap_or(d.max_steps),
        max_distance: f.max_distance.unwrap_or(d.max_distance),
        max_teleports: f.max_teleports.unwrap_or(d.max_teleports),
        normal_step: f.normal_step.unwrap_or(d.normal_step),
        fog_color: f.fog_color.map(v3).unwrap_or(d.fog_color),
        wall_tint: f.wall_tint.unwrap_or(d.wall_tint),
        mirror_attenuation: f.mirror_attenuation.unwrap_or(d.mirror_attenuation),
        background: f.background.map(v3).unwrap_or(d.background),
        floor_style,
        ceiling_style,
        headlight: f.headlight.unwrap_or(d.headlight),
    })
}

pub(super) fn render_to_file(r: &RenderSettings) -> RenderFile {
    RenderFile {
        epsilon: Some(r.epsilon),
        max_steps: Some(r.max_steps),
        max_distance: Some(r.max_distance),
        max_teleports: Some(r.max_teleports),
        normal_step: Some(r.normal_step),
        fog_color: Some(arr3(r.fog_color)),
        wall_tint: Some(r.wall_tint),
        mirror_attenuation: Some(r.mirror_attenuation),
        background: Some(arr3(r.background)),
        floor_style: Some(
            match r.floor_style {
                FloorStyle::Checker => "checker",
                FloorStyle::Solid => "solid",
                FloorStyle::None => "none",
            }
            .into(),
        ),
        ceiling_style: Some(
            match r.ceiling_style {
                CeilingStyle::Solid => "solid",
                CeilingStyle::None => "none",
            }
            .into(),
        ),
        headlight: Some(r.headlight),
    }
}

pub(super) fn to_file(s: &SceneConfig) -> SceneFile {
    let walls = s
        .walls
        .iter()
        .map(|w| {
            let (partner, gluing) = match &w.kind {
                WallKind::Portal {
                    partner, gluing, ..
                } => (
                    Some(EdgeRefFile {
                        polygon: s.polygons[partner.polygon].id.clone(),
                        edge: partner.edge,
                    }),
                    Some(gluing.as_str().to_string()),
                ),
                _ => (None, None),
            };
            WallFile {
                polygon: s.polygons[w.edge.polygon].id.clone(),
                edge: w.edge.edge,
                kind: w.kind.name().to_string(),
                partner,
                gluing,
            }
        })
        .collect();
    SceneFile {
        version: s.version.clone(),
        name: s.name.clone(),
        polygons: s
            .polygons
            .iter()
            .map(|p| PolygonFile {
                id: p.id.clone(),
                vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect(),
            })
            .collect(),
        walls,
        height: s.height,
        prism: PrismFile {
            enabled: s.prism.enabled,
            period: Some(s.prism.period),
        },
        singularity_markers: MarkersFile {
            enabled: s.singularity_markers.enabled,
            radius: s.singularity_markers.radius,
        },
        objects: s.objects.iter().map(node_to_file).collect(),
        render: render_to_file(&s.render),
        camera: Some(CameraFile {
            position: arr3(s.camera.position),
            yaw: s.camera.yaw,
            pitch: s.camera.pitch,
            fov: s.camera.fov,
        }),
    }
}
