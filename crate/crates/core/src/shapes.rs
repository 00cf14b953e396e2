//! The 36-class shape vocabulary.
//!
//! Three names occur in both gesture families. The multi-finger variants carry
//! a suffix (`heart-3d`, `house-3d`, `pyramid-3d`) so every label is unique.

use crate::trajectory::GestureType;

/// How a recognised shape is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Mesh3D,
    Vector2D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShapeEntry {
    pub label: &'static str,
    pub gesture_type: GestureType,
    pub output: OutputKind,
}

const fn single(label: &'static str) -> ShapeEntry {
    ShapeEntry {
        label,
        gesture_type: GestureType::Single,
        output: OutputKind::Vector2D,
    }
}

const fn multi(label: &'static str) -> ShapeEntry {
    ShapeEntry {
        label,
        gesture_type: GestureType::Multi,
        output: OutputKind::Mesh3D,
    }
}

pub const SHAPES: [ShapeEntry; 36] = [
    single("bag"),
    single("circle"),
    single("cross"),
    single("diamond"),
    single("flower"),
    single("heart"),
    single("up"),
    single("down"),
    single("right"),
    single("left"),
    // drawn as a front triangle plus a base rectangle, rendered as a solid
    ShapeEntry {
        label: "pyramid",
        gesture_type: GestureType::Single,
        output: OutputKind::Mesh3D,
    },
    single("house"),
    single("pentagon"),
    single("moon"),
    single("omega"),
    single("triangle"),
    single("star"),
    single("plus"),
    single("rectangle"),
    single("at"),
    single("leaf"),
    multi("cone"),
    multi("balloon"),
    multi("cloud"),
    multi("bottle"),
    multi("hemisphere"),
    multi("heart-3d"),
    multi("house-3d"),
    multi("square-pyramid"),
    multi("spiral"),
    multi("pipe"),
    multi("pyramid-3d"),
    multi("tree"),
    multi("cube"),
    multi("sphere"),
    multi("cylinder"),
];

pub fn lookup(label: &str) -> Option<&'static ShapeEntry> {
    SHAPES.iter().find(|s| s.label == label)
}

pub fn labels(gesture_type: GestureType) -> impl Iterator<Item = &'static str> {
    SHAPES
        .iter()
        .filter(move |s| s.gesture_type == gesture_type)
        .map(|s| s.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn vocabulary_split() {
        assert_eq!(labels(GestureType::Single).count(), 21);
        assert_eq!(labels(GestureType::Multi).count(), 15);
        let unique: HashSet<_> = SHAPES.iter().map(|s| s.label).collect();
        assert_eq!(unique.len(), 36);
        assert_eq!(lookup("pyramid").unwrap().output, OutputKind::Mesh3D);
        assert!(lookup("hexagon").is_none());
    }
}
