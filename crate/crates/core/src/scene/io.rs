//! Detections file format: one JSON scene per record, JSONL for pools.
//!
//! ```json
//! {"schema_version": 1, "image_id": "img_001",
//!  "objects": [{"bbox": [0.5, 0.2, 0.2, 0.2], "shape": {"sphere": 1.0}, "color": {"blue": 0.95}}],
//!  "external_scores": {"baseline": 31.2}}
//! ```
//!
//! Objects are identified `obj1`, `obj2`, … in file order unless an `id` is given.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{BBox, DetectedObject, Distribution, SceneError, SceneRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct SceneJson {
    schema_version: u32,
    image_id: String,
    #[serde(default)]
    objects: Vec<ObjectJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    external_scores: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    bbox: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<Distribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<Distribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<Distribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<Distribution>,
}

/// Default object id for the object at `index` (0-based).
pub fn default_object_id(index: usize) -> String {
    format!("obj{}", index + 1)
}

impl SceneJson {
    fn into_record(self) -> Result<SceneRecord, SceneError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SceneError::SchemaVersion(self.schema_version));
        }
        let objects = self
            .objects
            .into_iter()
            .enumerate()
            .map(|(i, o)| {
                let [cx, cy, w, h] = o.bbox;
                DetectedObject {
                    id: o.id.unwrap_or_else(|| default_object_id(i)),
                    bbox: BBox::new(cx, cy, w, h),
                    shape: o.shape.unwrap_or_default(),
                    color: o.color.unwrap_or_default(),
                    size: o.size.unwrap_or_default(),
                    class: o.class.unwrap_or_default(),
                }
            })
            .collect();
        let record = SceneRecord {
            image_id: self.image_id,
            objects,
            external_scores: self.external_scores.unwrap_or_default(),
        };
        record.validate()?;
        Ok(record)
    }

    fn from_record(scene: &SceneRecord) -> Self {
        let some = |d: &Distribution| (!d.is_empty()).then(|| d.clone());
        SceneJson {
            schema_version: SCHEMA_VERSION,
            image_id: scene.image_id.clone(),
            objects: scene
                .objects
                .iter()
                .enumerate()
                .map(|(i, o)| ObjectJson {
                    id: (o.id != default_object_id(i)).then(|| o.id.clone()),
                    bbox: o.bbox.to_array(),
                    shape: some(&o.shape),
                    color: some(&o.color),
                    size: some(&o.size),
                    class: some(&o.class),
                })
                .collect(),
            external_scores: (!scene.external_scores.is_empty()).then(|| scene.external_scores.clone()),
        }
    }
}

/// Parses and validates one scene document.
pub fn parse_scene(json: &str) -> Result<SceneRecord, SceneError> {
    let doc: SceneJson = serde_json::from_str(json).map_err(|e| SceneError::Json {
        line: None,
        message: e.to_string(),
    })?;
    doc.into_record()
}

pub fn scene_to_json(scene: &SceneRecord) -> String {
    serde_json::to_string(&SceneJson::from_record(scene)).expect("scene serializes")
}

/// Reads a JSONL pool; blank lines are skipped. Errors carry the 1-based line.
pub fn read_pool<R: BufRead>(reader: R) -> Result<Vec<SceneRecord>, SceneError> {
    let mut pool = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| SceneError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let scene = parse_scene(&line).map_err(|e| e.at_line(i + 1))?;
        pool.push(scene);
    }
    Ok(pool)
}

pub fn write_pool<W: Write>(mut writer: W, pool: &[SceneRecord]) -> std::io::Result<()> {
    for scene in pool {
        writeln!(writer, "{}", scene_to_json(scene))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Attribute;

    #[test]
    fn parses_minimal_scene_and_assigns_ids() {
        let src = r#"{"schema_version":1,"image_id":"a","objects":[
            {"bbox":[0.5,0.2,0.2,0.2],"shape":{"sphere":1.0},"color":{"blue":0.95},"extra":true},
            {"bbox":[0.5,0.8,0.2,0.2],"class":{"dog":0.7}}],"note":"ignored"}"#;
        let scene = parse_scene(src).unwrap();
        assert_eq!(scene.objects.len(), 2);
        assert_eq!(scene.objects[0].id, "obj1");
        assert_eq!(scene.objects[1].id, "obj2");
        assert_eq!(scene.objects[1].prob(Attribute::Class, "dog"), 0.7);
        assert!(scene.objects[1].shape.is_empty());
    }

    #[test]
    fn rejects_unknown_schema_version() {
        let src = r#"{"schema_version":2,"image_id":"a","objects":[]}"#;
        assert!(matches!(parse_scene(src), Err(SceneError::SchemaVersion(2))));
    }

    #[test]
    fn rejects_invalid_content() {
        let bad_mass = r#"{"schema_version":1,"image_id":"a","objects":[{"bbox":[0.5,0.5,0.1,0.1],"shape":{"a":0.7,"b":0.7}}]}"#;
        assert!(matches!(parse_scene(bad_mass), Err(SceneError::InvalidObject { .. })));
        let bad_box = r#"{"schema_version":1,"image_id":"a","objects":[{"bbox":[0.5,0.5,0.1]}]}"#;
        assert!(matches!(parse_scene(bad_box), Err(SceneError::Json { .. })));
        assert!(matches!(parse_scene("not json"), Err(SceneError::Json { .. })));
    }

    #[test]
    fn pool_roundtrip_and_line_numbers() {
        let scene = crate::fixtures::sphere_above_cube_scene();
        let mut buf = Vec::new();
        write_pool(&mut buf, &[scene.clone(), scene.clone()]).unwrap();
        let back = read_pool(buf.as_slice()).unwrap();
        assert_eq!(back, vec![scene.clone(), scene]);

        let text = format!("{}\n\n{{\"schema_version\":1}}\n", String::from_utf8(buf).unwrap().lines().next().unwrap());
        match read_pool(text.as_bytes()) {
            Err(SceneError::Json { line, .. }) => assert_eq!(line, Some(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_ids_survive_roundtrip() {
        let mut scene = crate::fixtures::sphere_above_cube_scene();
        scene.objects.reverse();
        scene.external_scores.insert("baseline".into(), 31.5);
        let back = parse_scene(&scene_to_json(&scene)).unwrap();
        assert_eq!(back, scene);
    }
}
