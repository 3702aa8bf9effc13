use std::collections::{BTreeMap, HashSet};

use super::{Attribute, SceneError};

/// Probability distribution over the values of one attribute. Mass may be
/// missing (top-k truncation) but never exceeds 1.
pub type Distribution = BTreeMap<String, f64>;

const MASS_SLACK: f64 = 1e-6;

/// Center-format bounding box in normalized image coordinates, y growing downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        BBox { cx, cy, w, h }
    }

    /// From a corner-format `[x, y, w, h]` box in pixels.
    pub fn from_corner_pixels(x: f64, y: f64, w: f64, h: f64, image_w: f64, image_h: f64) -> Self {
        BBox {
            cx: (x + w / 2.0) / image_w,
            cy: (y + h / 2.0) / image_h,
            w: w / image_w,
            h: h / image_h,
        }
    }

    /// From normalized `[x0, y0, x1, y1]` corners.
    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        BBox {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            w: x1 - x0,
            h: y1 - y0,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.cx, self.cy, self.w, self.h]
    }

    fn validate(&self) -> Result<(), String> {
        let finite = [self.cx, self.cy, self.w, self.h].iter().all(|v| v.is_finite());
        if !finite {
            return Err("bbox has non-finite coordinates".into());
        }
        if !(0.0..=1.0).contains(&self.cx) || !(0.0..=1.0).contains(&self.cy) {
            return Err(format!("bbox center ({}, {}) outside [0,1]", self.cx, self.cy));
        }
        if self.w <= 0.0 || self.h <= 0.0 || self.w > 1.0 || self.h > 1.0 {
            return Err(format!("bbox extent ({}, {}) outside (0,1]", self.w, self.h));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedObject {
    pub id: String,
    pub bbox: BBox,
    pub shape: Distribution,
    pub color: Distribution,
    pub size: Distribution,
    pub class: Distribution,
}

impl DetectedObject {
    pub fn new(id: impl Into<String>, bbox: BBox) -> Self {
        DetectedObject {
            id: id.into(),
            bbox,
            shape: Distribution::new(),
            color: Distribution::new(),
            size: Distribution::new(),
            class: Distribution::new(),
        }
    }

    pub fn with(mut self, attribute: Attribute, entries: &[(&str, f64)]) -> Self {
        let dist = self.distribution_mut(attribute);
        for (name, p) in entries {
            dist.insert((*name).to_string(), *p);
        }
        self
    }

    pub fn distribution(&self, attribute: Attribute) -> &Distribution {
        match attribute {
            Attribute::Shape => &self.shape,
            Attribute::Color => &self.color,
            Attribute::Size => &self.size,
            Attribute::Class => &self.class,
        }
    }

    pub fn distribution_mut(&mut self, attribute: Attribute) -> &mut Distribution {
        match attribute {
            Attribute::Shape => &mut self.shape,
            Attribute::Color => &mut self.color,
            Attribute::Size => &mut self.size,
            Attribute::Class => &mut self.class,
        }
    }

    /// Probability of `value` under `attribute`; absent entries are 0.
    pub fn prob(&self, attribute: Attribute, value: &str) -> f64 {
        self.distribution(attribute).get(value).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let invalid = |reason: String| SceneError::InvalidObject {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() {
            return Err(invalid("empty object id".into()));
        }
        self.bbox.validate().map_err(invalid)?;
        for attr in Attribute::ALL {
            let dist = self.distribution(attr);
            let mut total = 0.0;
            for (name, &p) in dist {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("{attr}({name}) = {p} outside [0,1]")));
                }
                total += p;
            }
            if total > 1.0 + MASS_SLACK {
                return Err(invalid(format!("{attr} distribution sums to {total} > 1")));
            }
        }
        Ok(())
    }
}

/// One candidate image as a list of detected objects.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SceneRecord {
    pub image_id: String,
    pub objects: Vec<DetectedObject>,
    /// Opaque per-candidate scores (e.g. from another ranker), echoed into results.
    pub external_scores: BTreeMap<String, f64>,
}

impl SceneRecord {
    pub fn new(image_id: impl Into<String>, objects: Vec<DetectedObject>) -> Self {
        SceneRecord {
            image_id: image_id.into(),
            objects,
            external_scores: BTreeMap::new(),
        }
    }

    pub fn object(&self, id: &str) -> Option<&DetectedObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Checks per-object invariants and id uniqueness. The object-count cap is
    /// enforced at valuation time.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut seen = HashSet::new();
        for obj in &self.objects {
            obj.validate()?;
            if !seen.insert(obj.id.as_str()) {
                return Err(SceneError::DuplicateObjectId {
                    image_id: self.image_id.clone(),
                    id: obj.id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Ordered candidate pool; pool order is candidate order.
pub type ScenePool = Vec<SceneRecord>;
