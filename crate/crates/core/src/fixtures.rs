//! Small reference inputs shared by tests, benches and docs.

use crate::scene::{Attribute, BBox, DetectedObject, SceneRecord};

/// "a blue sphere on top of a red cube"
pub const SPHERE_ABOVE_CUBE_RULE: &str =
    "kp :- shape(O1,sphere), color(O1,blue), shape(O2,cube), color(O2,red), position(O1,O2,above).";

/// "two blue spheres and one red cube"
pub const TWO_BLUE_SPHERES_RED_CUBE: &str = "kp :- shape(A, sphere), color(A, blue), shape(B, sphere), color(B, blue), shape(C, cube), color(C, red).";

/// Detections carrying the attribute probabilities of the blue-sphere-on-red-cube
/// example: sphere 1, blue 0.95, cube 0.58, red 0.83, sphere well above the cube.
pub fn sphere_above_cube_scene() -> SceneRecord {
    SceneRecord::new(
        "worked_example",
        vec![
            DetectedObject::new("obj1", BBox::new(0.5, 0.2, 0.2, 0.2))
                .with(Attribute::Shape, &[("sphere", 1.0)])
                .with(Attribute::Color, &[("blue", 0.95), ("red", 0.03)]),
            DetectedObject::new("obj2", BBox::new(0.5, 0.75, 0.3, 0.3))
                .with(Attribute::Shape, &[("cube", 0.58), ("sphere", 0.40)])
                .with(Attribute::Color, &[("red", 0.83), ("blue", 0.1)]),
        ],
    )
}
