//! Derivation of the isometry that identifies two polygon edges.
//!
//! Orientation-preserving gluings send the directed edge `from` onto the
//! reversal of `to`: `from.start -> to.end` and `from.end -> to.start`. A
//! point just outside `from` then lands just inside `to`'s polygon.
//! Reflection gluings send `from.start -> to.start` and `from.end -> to.end`,
//! the orientation-reversing map with the same outside-to-inside property.

use super::{GluingKind, GLUING_TOLERANCE};
use crate::geometry::{Isometry2, Point2, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub start: Point2,
    pub end: Point2,
}

impl DirectedEdge {
    pub fn new(start: Point2, end: Point2) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GluingError {
    #[error("edge length mismatch ({from_len} vs {to_len})")]
    LengthMismatch { from_len: f64, to_len: f64 },
    #[error("declared {declared} gluing but the edges are related by a {actual}")]
    KindMismatch {
        declared: GluingKind,
        actual: GluingKind,
    },
}

fn check_lengths(from: DirectedEdge, to: DirectedEdge) -> Result<(f64, f64), GluingError> {
    let from_len = from.length();
    let to_len = to.length();
    if (from_len - to_len).abs() > GLUING_TOLERANCE {
        return Err(GluingError::LengthMismatch { from_len, to_len });
    }
    Ok((from_len, to_len))
}

fn orientation_preserving(from: DirectedEdge, to: DirectedEdge, lf: f64, lt: f64) -> Isometry2 {
    let u = (from.end - from.start) / lf;
    let w = (to.start - to.end) / lt;
    let (c, s) = (u.dot(w), u.cross(w));
    let linear = [[c, -s], [s, c]];
    let mut iso = Isometry2 {
        linear,
        translation: Vec2::ZERO,
    }
    .snapped();
    iso.translation = to.end - iso.apply_vector(from.start);
    iso.snapped()
}

fn orientation_reversing(from: DirectedEdge, to: DirectedEdge, lf: f64, lt: f64) -> Isometry2 {
    let u = (from.end - from.start) / lf;
    let w = (to.end - to.start) / lt;
    let bisector = u + w;
    let m = if bisector.length() > 1e-6 {
        bisector.normalized()
    } else {
        u.perp()
    };
    let linear = [
        [2.0 * m.x * m.x - 1.0, 2.0 * m.x * m.y],
        [2.0 * m.x * m.y, 2.0 * m.y * m.y - 1.0],
    ];
    let mut iso = Isometry2 {
        linear,
        translation: Vec2::ZERO,
    }
    .snapped();
    iso.translation = to.start - iso.apply_vector(from.start);
    iso.snapped()
}

/// Isometry identifying `from` with `to` for a declared gluing kind.
pub fn derive_identification_isometry(
    from: DirectedEdge,
    to: DirectedEdge,
    kind: GluingKind,
) -> Result<Isometry2, GluingError> {
    let (lf, lt) = check_lengths(from, to)?;
    match kind {
        GluingKind::Reflection => Ok(orientation_reversing(from, to, lf, lt)),
        GluingKind::Translation | GluingKind::Rotation => {
            let iso = orientation_preserving(from, to, lf, lt);
            let actual = classify(&iso);
            if actual != kind {
                return Err(GluingError::KindMismatch {
                    declared: kind,
                    actual,
                });
            }
            Ok(iso)
        }
    }
}

/// Orientation-preserving gluing with the kind read off the linear part.
pub(crate) fn infer_orientation_preserving(
    from: DirectedEdge,
    to: DirectedEdge,
) -> Result<(GluingKind, Isometry2), GluingError> {
    let (lf, lt) = check_lengths(from, to)?;
    let iso = orientation_preserving(from, to, lf, lt);
    Ok((classify(&iso), iso))
}

fn classify(iso: &Isometry2) -> GluingKind {
    if iso.determinant() < 0.0 {
        GluingKind::Reflection
    } else if iso.is_linear_identity(GLUING_TOLERANCE) {
        GluingKind::Translation
    } else {
        GluingKind::Rotation
    }
}
