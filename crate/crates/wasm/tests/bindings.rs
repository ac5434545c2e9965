use serde_json::Value;
use vbmo_wasm::{bmo_json, distance_json, whitney_json};

const DISK: &str = r#"{"type": "disk", "params": {"center": [0.0, 0.0], "radius": 1.0}, "resolution": {"h": "1/32"}}"#;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn distance_view_is_signed_and_image_ordered() {
    let v = parse(&distance_json(DISK).unwrap());
    let (w, h) = (v["width"].as_u64().unwrap() as usize, v["height"].as_u64().unwrap() as usize);
    let s: Vec<f64> = v["signed"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(s.len(), w * h);
    let inside = s.iter().filter(|d| **d > 0.0).count();
    assert_eq!(inside as u64, v["cells"].as_u64().unwrap());
    // the center of the image is deepest inside
    let mid = s[(h / 2) * w + w / 2];
    assert!(mid > 0.9, "{mid}");
    assert!(s[0] < 0.0);
}

#[test]
fn whitney_view_draws_every_cube() {
    let v = parse(&whitney_json(DISK).unwrap());
    assert_eq!(v["certified"], true);
    let svg = v["svg"].as_str().unwrap();
    let rects = svg.matches("<rect").count() as u64;
    assert!(rects >= v["cubes"].as_u64().unwrap());
}

#[test]
fn bmo_view_reports_a_witness_inside_the_bound() {
    let a = bmo_json(DISK, 3, 0.25).unwrap();
    assert_eq!(a, bmo_json(DISK, 3, 0.25).unwrap());
    let v = parse(&a);
    assert!(v["report"]["value"].as_f64().unwrap() > 0.0);
    assert!(v["report"]["witness"]["radius"].as_f64().unwrap() < 0.25);
    assert_eq!(v["svg"].as_str().unwrap().matches("<circle").count(), 1);
    let inf = parse(&bmo_json(DISK, 3, 0.0).unwrap());
    assert_eq!(inf["report"]["params"]["mu"], "inf");
}

#[test]
fn bad_specs_are_reported() {
    assert!(distance_json("{").is_err());
    let ball = r#"{"type": "ball", "params": {"center": [0, 0, 0], "radius": 1}, "resolution": {"h": "1/8"}}"#;
    assert!(whitney_json(ball).unwrap_err().contains("planar"));
    let fine = r#"{"type": "disk", "params": {"center": [0, 0], "radius": 1}, "resolution": {"h": "1/512"}}"#;
    assert!(bmo_json(fine, 1, 0.1).is_err());
}

/// The specs the page builds.
#[test]
fn page_shapes_build() {
    let shapes = [
        r#""type": "disk", "params": {"center": [0, 0], "radius": 1}"#,
        r#""type": "annulus", "params": {"center": [0, 0], "r_in": 0.4, "r_out": 1}"#,
        r#""type": "square", "params": {"lo": [0, 0], "side": 1}"#,
        r#""type": "l_shape", "params": {"lo": [-1, -1], "side": 2}"#,
        r#""type": "cusp", "params": {"radius": 0.5}"#,
        r#""type": "perturbed_half_space", "params": {"extent": [-1, 1], "height": 1, "amplitude": 0.2, "width": 0.5, "center": 0}"#,
    ];
    for s in shapes {
        let spec = format!(r#"{{{s}, "resolution": {{"h": "1/16"}}}}"#);
        distance_json(&spec).unwrap_or_else(|e| panic!("{s}: {e}"));
        whitney_json(&spec).unwrap_or_else(|e| panic!("{s}: {e}"));
        bmo_json(&spec, 1, 0.25).unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}
