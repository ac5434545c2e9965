use vbmo_core::field::RandomSmooth;
use vbmo_core::grid_domain::{DomainSpec, Shape};
use vbmo_core::io::*;
use vbmo_core::seminorms::{bmo_seminorm, Lattice};
use vbmo_core::build_domain;

fn disk() -> vbmo_core::GridDomain {
    build_domain(&DomainSpec::new(Shape::Disk { center: vec![0.1, 0.0], radius: 0.7 }, 1.0 / 16.0)).unwrap()
}

#[test]
fn pgm_masks_round_trip() {
    let dom = disk();
    let bytes = mask_to_pgm(&dom.grid, &dom.mask);
    assert!(bytes.starts_with(b"P5\n"));
    let header = GridHeader::of(&dom.grid);
    let json = serde_json::to_string(&header).unwrap();
    let back: GridHeader = serde_json::from_str(&json).unwrap();
    let (grid, mask) = pgm_to_mask(&bytes, &back).unwrap();
    assert_eq!(grid, dom.grid);
    assert_eq!(mask, dom.mask);
}

#[test]
fn pgm_with_wrong_size_is_rejected() {
    let dom = disk();
    let mut bytes = mask_to_pgm(&dom.grid, &dom.mask);
    bytes.pop();
    assert!(pgm_to_mask(&bytes, &GridHeader::of(&dom.grid)).is_err());
    assert!(pgm_to_mask(b"P2\n1 1\n255\n0", &GridHeader::of(&dom.grid)).is_err());
}

#[test]
fn field_binaries_round_trip_bit_for_bit() {
    let dom = disk();
    let a = RandomSmooth::new(1, 2, 4, 2.0).sample(&dom.grid);
    let b: Vec<f64> = a.values.iter().map(|x| x.exp() - 1e-300).collect();
    let bytes = field_to_bytes(&[&a.values, &b]);
    assert_eq!(bytes.len(), 16 * a.values.len());
    let header = field_header(&dom.grid, 2);
    assert_eq!(header.dtype, "f64-le");
    let json = serde_json::to_value(&header).unwrap();
    assert_eq!(json["dim"], 2);
    let (grid, blocks) = bytes_to_field(&bytes, &header).unwrap();
    assert_eq!(grid, dom.grid);
    assert_eq!(blocks[0], a.values);
    assert_eq!(blocks[1], b);
    let one = field_to_bytes(&[&a.values]);
    assert_eq!(read_scalar(&one, &field_header(&dom.grid, 1)).unwrap().values, a.values);
    assert!(read_scalar(&bytes[1..], &header).is_err());
}

#[test]
fn reports_serialize_with_the_documented_keys() {
    let dom = disk();
    let f = RandomSmooth::new(2, 2, 4, 2.0).sample(&dom.grid);
    let r = bmo_seminorm(&f, &dom, 0.25, Lattice::default());
    let rep = Report::from_seminorm(&r, serde_json::json!({ "mu": 0.25 }));
    let s = to_json(&rep).unwrap();
    assert!(s.ends_with('\n'));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["counts", "kind", "params", "value", "witness"]);
    assert_eq!(v["value"].as_f64().unwrap(), r.value);
    assert!(v["witness"]["radius"].as_f64().unwrap() < 0.25);
    assert_eq!(to_json(&rep).unwrap(), s);
}

#[test]
fn csv_tables_round_trip_floats_exactly() {
    let mut t = Table::new(["h", "value"]);
    let xs = [0.1, 1.0 / 3.0, 2f64.powi(-40), 12345.678];
    for x in xs {
        t.push_f64(&[x, -x]).unwrap();
    }
    assert!(t.push(vec!["1".into()]).is_err());
    let s = t.to_csv().unwrap();
    assert!(s.starts_with("h,value\n"));
    let back = Table::from_csv(&s).unwrap();
    assert_eq!(back, t);
    for (row, x) in back.rows.iter().zip(xs) {
        assert_eq!(row[0].parse::<f64>().unwrap(), x);
    }
}

#[test]
fn svg_outputs_contain_one_shape_per_item() {
    let dom = disk();
    let sq = [(0.0, 0.0, 0.25), (0.25, 0.0, 0.125)];
    let s = whitney_svg(Some(&dom), &sq, ([-1.0, -1.0], [1.0, 1.0]));
    assert!(s.starts_with("<svg"));
    assert!(s.trim_end().ends_with("</svg>"));
    let w = vec![WitnessJson { center: vec![0.1, 0.0], radius: 0.3 }];
    let s = witness_svg(&dom, &w).unwrap();
    assert_eq!(s.matches("<circle").count(), 1);
}
