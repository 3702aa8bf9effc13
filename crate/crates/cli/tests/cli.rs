use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_logicrank");

const SPHERE_ABOVE_CUBE: &str =
    "kp :- shape(O1,sphere), color(O1,blue), shape(O2,cube), color(O2,red), position(O1,O2,above).\n";

const WORKED_SCENE: &str = r#"{"schema_version": 1, "image_id": "example",
 "objects": [
  {"bbox": [0.5, 0.2, 0.2, 0.2], "shape": {"sphere": 1.0}, "color": {"blue": 0.95, "red": 0.03}},
  {"bbox": [0.5, 0.75, 0.3, 0.3], "shape": {"cube": 0.58, "sphere": 0.4}, "color": {"red": 0.83, "blue": 0.1}}
 ]}"#;

/// Shape of a scene converted from an annotation file with two dogs.
const TWO_DOGS: &str = r#"{"schema_version":1,"image_id":"coco_000001","objects":[{"id":"ann_1","bbox":[0.3,0.4,0.2,0.3],"class":{"dog":1.0}},{"id":"ann_2","bbox":[0.7,0.6,0.25,0.2],"class":{"dog":1.0}}]}"#;

const COUNTING: &str = "kp_1 :- at_least(class, dog, 1), not at_least(class, dog, 2).\n\
                        kp_2 :- at_least(class, dog, 2), not at_least(class, dog, 3).\n\
                        kp_3 :- at_least(class, dog, 3), not at_least(class, dog, 4).\n";

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn records(stdout: &[u8]) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn explain_prints_the_worked_example() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "r.pl", SPHERE_ABOVE_CUBE);
    let scene = write(dir.path(), "s.json", WORKED_SCENE);
    let out = run(&["explain", "--rules", s(&rules), "--query", "kp", "--scene", s(&scene)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "image: example\n\
         color(obj1, blue): 0.95\n\
         color(obj2, red): 0.83\n\
         position(obj1, obj2, above): 1.00\n\
         shape(obj1, sphere): 1.00\n\
         shape(obj2, cube): 0.58\n\
         product: 0.4573 (n = 5)\n\
         kp: 0.86\n"
    );
}

#[test]
fn converted_two_dog_scene_is_counted_exactly() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "count.pl", COUNTING);
    let pool = write(dir.path(), "pool.jsonl", &format!("{TWO_DOGS}\n"));
    for (query, expected) in [("kp_1", 0.0), ("kp_2", 1.0), ("kp_3", 0.0)] {
        let out = run(&["rank", "--rules", s(&rules), "--query", query, "--detections", s(&pool)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let recs = records(&out.stdout);
        assert_eq!(recs.len(), 1);
        let score = recs[0]["score"].as_f64().unwrap();
        assert!((score - expected).abs() <= 1e-9, "{query}: {score}");
    }
}

#[test]
fn rank_output_fields_and_top_k() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "r.pl", SPHERE_ABOVE_CUBE);
    let pool = dir.path().join("pool.jsonl");
    let out = run(&["gen-scenes", "--n", "12", "--objects", "2..5", "--noise", "0.05", "--seed", "4", "--out", s(&pool)]);
    assert!(out.status.success());
    let ranked = dir.path().join("ranked.jsonl");
    let out = run(&["rank", "--rules", s(&rules), "--query", "kp", "--detections", s(&pool), "--top", "3", "--out", s(&ranked), "--explain"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(String::from_utf8_lossy(&out.stderr).matches("image: ").count(), 3);
    let recs = records(&fs::read(&ranked).unwrap());
    assert_eq!(recs.len(), 3);
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r["rank"], i + 1);
        for field in ["image_id", "score", "raw_score", "n", "atoms", "external_scores"] {
            assert!(r.get(field).is_some(), "missing {field}");
        }
    }
    assert!(recs[0]["score"].as_f64() >= recs[1]["score"].as_f64());
}

#[test]
fn weights_file_scales_clauses() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "r.pl", "kp :- class(X, dog).\n");
    let pool = write(dir.path(), "pool.jsonl", &format!("{TWO_DOGS}\n"));
    let weights = write(dir.path(), "w.json", "[0.0]");
    let out = run(&["rank", "--rules", s(&rules), "--detections", s(&pool), "--weights", s(&weights)]);
    assert!(out.status.success());
    assert_eq!(records(&out.stdout)[0]["score"], 0.5);
    let unit = write(dir.path(), "unit.json", "[null]");
    let out = run(&["rank", "--rules", s(&rules), "--detections", s(&pool), "--weights", s(&unit)]);
    assert_eq!(records(&out.stdout)[0]["score"], 1.0);
    let wrong = write(dir.path(), "wrong.json", "[0.0, 1.0]");
    let out = run(&["rank", "--rules", s(&rules), "--detections", s(&pool), "--weights", s(&wrong)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes_follow_error_categories() {
    let dir = TempDir::new().unwrap();
    let good = write(dir.path(), "r.pl", SPHERE_ABOVE_CUBE);
    let pool = write(dir.path(), "pool.jsonl", &format!("{TWO_DOGS}\n"));

    let bad_rules = write(dir.path(), "bad.pl", "kp :- shape(O1,).\n");
    let out = run(&["rank", "--rules", s(&bad_rules), "--detections", s(&pool)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:16"));

    let unstratified = write(dir.path(), "neg.pl", "p :- not p.\nkp :- p.\n");
    assert_eq!(run(&["rank", "--rules", s(&unstratified), "--detections", s(&pool)]).status.code(), Some(2));
    assert_eq!(run(&["rank", "--rules", s(&good), "--query", "nope", "--detections", s(&pool)]).status.code(), Some(2));

    let bad_schema = write(dir.path(), "v2.jsonl", "{\"schema_version\":2,\"image_id\":\"a\",\"objects\":[]}\n");
    assert_eq!(run(&["rank", "--rules", s(&good), "--detections", s(&bad_schema)]).status.code(), Some(3));
    let garbage = write(dir.path(), "g.jsonl", "{not json\n");
    let out = run(&["rank", "--rules", s(&good), "--detections", s(&garbage)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let empty = write(dir.path(), "e.jsonl", "");
    assert_eq!(run(&["rank", "--rules", s(&good), "--detections", s(&empty)]).status.code(), Some(3));
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(run(&["rank", "--rules", s(&good), "--detections", s(&missing)]).status.code(), Some(3));
    assert_eq!(run(&["rank", "--rules", s(&good), "--detections", s(&pool), "--tau", "0"]).status.code(), Some(3));

    // 16 objects under six distinct variables exceed the grounding guard
    let objects: Vec<String> = (0..16)
        .map(|i| format!(r#"{{"bbox":[{:.3},0.5,0.05,0.05],"shape":{{"cube":0.9}}}}"#, 0.03 + i as f64 * 0.06))
        .collect();
    let crowded = write(
        dir.path(),
        "crowded.json",
        &format!(r#"{{"schema_version":1,"image_id":"crowded","objects":[{}]}}"#, objects.join(",")),
    );
    let wide = write(
        dir.path(),
        "wide.pl",
        "kp :- shape(A, cube), shape(B, cube), shape(C, cube), shape(D, cube), shape(E, cube), shape(F, cube).\n",
    );
    let out = run(&["explain", "--rules", s(&wide), "--scene", s(&crowded)]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    // in a pool the same failure scores the candidate 0 instead of aborting
    let crowded_pool = write(dir.path(), "crowded.jsonl", &format!("{}\n", fs::read_to_string(&crowded).unwrap()));
    let out = run(&["rank", "--rules", s(&wide), "--detections", s(&crowded_pool)]);
    assert!(out.status.success());
    let recs = records(&out.stdout);
    assert_eq!(recs[0]["score"], 0.0);
    assert!(recs[0]["error"].as_str().unwrap().contains("ground"));
}

#[test]
fn empty_scene_explains_no_grounding() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "r.pl", SPHERE_ABOVE_CUBE);
    let scene = write(dir.path(), "s.json", r#"{"schema_version":1,"image_id":"empty","objects":[]}"#);
    let out = run(&["explain", "--rules", s(&rules), "--scene", s(&scene)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "image: empty\nno grounding; score 0\n");
}

#[test]
fn bench_count_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = run(&["bench-count", "--groups", "1..3", "--per-group", "4", "--class", "dog", "--noise", "0", "--seed", "9", "--out", s(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("group,rule,image_id,prob"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 4 * 3);
    for r in rows {
        let expected = if r[0] == r[1] { "1.0" } else { "0.0" };
        assert_eq!(r[3], expected, "{r:?}");
    }
    let out = run(&["bench-count", "--groups", "1..3", "--per-group", "4", "--class", "unicorn", "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_scenes_writes_truth_alongside() {
    let dir = TempDir::new().unwrap();
    let pool = dir.path().join("p.jsonl");
    let truth = dir.path().join("t.jsonl");
    let out = run(&["gen-scenes", "--n", "7", "--objects", "3", "--seed", "2", "--out", s(&pool), "--truth", s(&truth)]);
    assert!(out.status.success());
    let scenes = records(&fs::read(&pool).unwrap());
    let truths = records(&fs::read(&truth).unwrap());
    assert_eq!(scenes.len(), 7);
    assert_eq!(truths.len(), 7);
    for (a, b) in scenes.iter().zip(&truths) {
        assert_eq!(a["image_id"], b["image_id"]);
        assert_eq!(a["objects"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn hidden_oracle_agrees_with_reasoner() {
    let dir = TempDir::new().unwrap();
    let rules = write(dir.path(), "r.pl", SPHERE_ABOVE_CUBE);
    let scene = write(dir.path(), "s.json", WORKED_SCENE);
    let out = run(&["oracle", "--rules", s(&rules), "--scene", s(&scene)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reasoner"], v["recursive"]);
    assert_eq!(v["crisp"], true);
}
