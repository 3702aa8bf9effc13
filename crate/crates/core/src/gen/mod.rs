//! Synthetic CLEVR-style candidate pools with ground truth, and the
//! counting-separation benchmark built on them.
//!
//! Objects are placed on distinct rows and distinct columns of a grid with at
//! least five levels per axis, so boxes never overlap and no two centers
//! share a coordinate. Emitted detections perturb the true one-hot
//! attributes: logits `onehot + σ·z` are passed through a softmax at
//! temperature `temperature_scale·σ`; box centers get Gaussian noise of scale
//! `σ/4`. The random stream consumes the same draws for every σ, so pools
//! generated with one seed differ across noise levels only in the emitted
//! probabilities and centers.

mod bench;

pub use bench::{bench_count, counting_program, write_bench_csv, BenchRow};

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scene::{
    default_object_id, Attribute, BBox, DetectedObject, Distribution, Relation, SceneRecord,
    DEFAULT_MAX_OBJECTS,
};

const MIN_GRID_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("{0} vocabulary is empty")]
    EmptyVocabulary(&'static str),
    #[error("invalid object count range {min}..{max} (cap {cap})")]
    InvalidRange { min: usize, max: usize, cap: usize },
    #[error("noise must be finite and non-negative, got {0}")]
    InvalidNoise(f64),
    #[error("pool size must be at least 1")]
    ZeroCount,
    #[error("class `{0}` is not in the class vocabulary")]
    UnknownClass(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    /// Inclusive bounds on objects per scene.
    pub object_count: (usize, usize),
    pub shapes: Vec<String>,
    pub colors: Vec<String>,
    /// Ordered small to large; empty omits the attribute.
    pub sizes: Vec<String>,
    /// Empty omits the attribute.
    pub classes: Vec<String>,
    pub noise: f64,
    pub temperature_scale: f64,
    pub seed: u64,
}

fn words(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|s| s.to_string()).collect()
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            object_count: (1, 6),
            shapes: words(&["cube", "sphere", "cylinder"]),
            colors: words(&["gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"]),
            sizes: words(&["small", "large"]),
            classes: words(&["dog", "cat", "person", "car", "horse"]),
            noise: 0.0,
            temperature_scale: 2.0,
            seed: 0,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.shapes.is_empty() {
            return Err(GenError::EmptyVocabulary("shape"));
        }
        if self.colors.is_empty() {
            return Err(GenError::EmptyVocabulary("color"));
        }
        let (min, max) = self.object_count;
        if min > max || max > DEFAULT_MAX_OBJECTS {
            return Err(GenError::InvalidRange {
                min,
                max,
                cap: DEFAULT_MAX_OBJECTS,
            });
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(GenError::InvalidNoise(self.noise));
        }
        if !(self.temperature_scale > 0.0 && self.temperature_scale.is_finite()) {
            return Err(GenError::InvalidNoise(self.temperature_scale));
        }
        Ok(())
    }

    fn vocab(&self, attribute: Attribute) -> &[String] {
        match attribute {
            Attribute::Shape => &self.shapes,
            Attribute::Color => &self.colors,
            Attribute::Size => &self.sizes,
            Attribute::Class => &self.classes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthObject {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    /// `[cx, cy, w, h]`
    pub bbox: [f64; 4],
}

impl GroundTruthObject {
    pub fn label(&self, attribute: Attribute) -> Option<&str> {
        match attribute {
            Attribute::Shape => self.shape.as_deref(),
            Attribute::Color => self.color.as_deref(),
            Attribute::Size => self.size.as_deref(),
            Attribute::Class => self.class.as_deref(),
        }
    }

    fn label_mut(&mut self, attribute: Attribute) -> &mut Option<String> {
        match attribute {
            Attribute::Shape => &mut self.shape,
            Attribute::Color => &mut self.color,
            Attribute::Size => &mut self.size,
            Attribute::Class => &mut self.class,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthScene {
    pub image_id: String,
    pub objects: Vec<GroundTruthObject>,
}

impl GroundTruthScene {
    /// Crisp spatial relation "object i is `relation` of object j" by strict
    /// center comparison.
    pub fn relation(&self, i: usize, j: usize, relation: Relation) -> bool {
        let (a, b) = (&self.objects[i].bbox, &self.objects[j].bbox);
        match relation {
            Relation::Above => a[1] < b[1],
            Relation::Below => a[1] > b[1],
            Relation::Left => a[0] < b[0],
            Relation::Right => a[0] > b[0],
        }
    }

    pub fn count(&self, attribute: Attribute, value: &str) -> usize {
        self.objects
            .iter()
            .filter(|o| o.label(attribute) == Some(value))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("truth serializes")
    }
}

/// Samples `count` scenes; deterministic in `spec.seed`.
pub fn generate_pool(
    spec: &SceneSpec,
    count: usize,
) -> Result<(Vec<SceneRecord>, Vec<GroundTruthScene>), GenError> {
    spec.validate()?;
    if count == 0 {
        return Err(GenError::ZeroCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pool = Vec::with_capacity(count);
    let mut truth = Vec::with_capacity(count);
    for i in 0..count {
        let n = rng.random_range(spec.object_count.0..=spec.object_count.1);
        let t = sample_truth(&mut rng, spec, format!("scene_{i:05}"), n, None);
        pool.push(emit(&mut rng, spec, &t));
        truth.push(t);
    }
    Ok((pool, truth))
}

/// Pins the class of exactly `count` objects; the rest draw from the other classes.
pub(crate) struct ClassPlan<'a> {
    pub class: &'a str,
    pub count: usize,
}

pub(crate) fn sample_truth(
    rng: &mut ChaCha8Rng,
    spec: &SceneSpec,
    image_id: String,
    n: usize,
    plan: Option<ClassPlan<'_>>,
) -> GroundTruthScene {
    let mut objects: Vec<GroundTruthObject> = (0..n)
        .map(|i| GroundTruthObject {
            id: default_object_id(i),
            shape: None,
            color: None,
            size: None,
            class: None,
            bbox: [0.0; 4],
        })
        .collect();

    for attribute in Attribute::ALL {
        let vocab = spec.vocab(attribute);
        if vocab.is_empty() {
            continue;
        }
        for obj in objects.iter_mut() {
            let idx = rng.random_range(0..vocab.len());
            *obj.label_mut(attribute) = Some(vocab[idx].clone());
        }
    }

    if let Some(plan) = plan {
        let members = sample(rng, n, plan.count.min(n)).into_vec();
        let others: Vec<&String> = spec.classes.iter().filter(|c| *c != plan.class).collect();
        for (i, obj) in objects.iter_mut().enumerate() {
            let label = if members.contains(&i) {
                plan.class.to_string()
            } else if others.is_empty() {
                // no distractor class exists; the object carries no class
                String::new()
            } else {
                others[rng.random_range(0..others.len())].clone()
            };
            obj.class = (!label.is_empty()).then_some(label);
        }
    }

    let levels = n.max(MIN_GRID_LEVELS);
    let cell = 1.0 / levels as f64;
    let rows = sample(rng, levels, n).into_vec();
    let cols = sample(rng, levels, n).into_vec();
    for (i, obj) in objects.iter_mut().enumerate() {
        let extent = match (&obj.size, spec.sizes.len()) {
            (Some(s), k) if k > 1 => {
                let rank = spec.sizes.iter().position(|x| x == s).unwrap_or(0);
                0.4 + 0.4 * rank as f64 / (k - 1) as f64
            }
            _ => 0.6,
        } * cell;
        obj.bbox = [
            (cols[i] as f64 + 0.5) * cell,
            (rows[i] as f64 + 0.5) * cell,
            extent,
            extent,
        ];
    }

    GroundTruthScene { image_id, objects }
}

/// Perturbed detections for `truth`. Draws a fixed number of variates
/// regardless of σ.
pub(crate) fn emit(rng: &mut ChaCha8Rng, spec: &SceneSpec, truth: &GroundTruthScene) -> SceneRecord {
    let sigma = spec.noise;
    let objects = truth
        .objects
        .iter()
        .map(|t| {
            let mut obj = DetectedObject::new(t.id.clone(), BBox::new(0.0, 0.0, t.bbox[2], t.bbox[3]));
            for attribute in Attribute::ALL {
                let vocab = spec.vocab(attribute);
                if vocab.is_empty() {
                    continue;
                }
                let z: Vec<f64> = (0..vocab.len()).map(|_| rng.sample(StandardNormal)).collect();
                if let Some(label) = t.label(attribute) {
                    *obj.distribution_mut(attribute) = perturb(vocab, label, &z, sigma, spec.temperature_scale);
                }
            }
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            obj.bbox.cx = (t.bbox[0] + sigma / 4.0 * zx).clamp(0.0, 1.0);
            obj.bbox.cy = (t.bbox[1] + sigma / 4.0 * zy).clamp(0.0, 1.0);
            obj
        })
        .collect();
    SceneRecord::new(truth.image_id.clone(), objects)
}

fn perturb(vocab: &[String], label: &str, z: &[f64], sigma: f64, scale: f64) -> Distribution {
    let onehot = |name: &str| if name == label { 1.0 } else { 0.0 };
    if sigma == 0.0 {
        return vocab.iter().map(|v| (v.clone(), onehot(v))).collect();
    }
    let temperature = scale * sigma;
    let logits: Vec<f64> = vocab
        .iter()
        .zip(z)
        .map(|(v, zi)| (onehot(v) + sigma * zi) / temperature)
        .collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    vocab
        .iter()
        .zip(exps)
        .map(|(v, e)| (v.clone(), e / total))
        .collect::<BTreeMap<_, _>>()
}

pub fn write_truth<W: Write>(mut writer: W, truth: &[GroundTruthScene]) -> std::io::Result<()> {
    for t in truth {
        writeln!(writer, "{}", t.to_json())?;
    }
    Ok(())
}
