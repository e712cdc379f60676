//! Round-trip properties of the file formats: matrix JSON/CSV, shape files,
//! and curve encoding.

use glueq_cli::format::{
    decode_curve, encode_curve, matrix_to_csv, parse_matrix, parse_shapes, resolve_curves,
    shapes_to_json, to_json_string, MatrixJson, TriangulationFile,
};
use glueq_core::cusp::CuspSurface;
use glueq_core::gluing::C64;
use glueq_core::matrix::IntMatrix;
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-1_000_000i64..1_000_001, rows * cols).prop_map(
            move |entries| {
                let mut m = IntMatrix::zero(rows, cols);
                for (k, &v) in entries.iter().enumerate() {
                    if v % 3 != 0 {
                        // leave roughly a third of the entries zero
                        m.set(k / cols, k % cols, v);
                    }
                }
                m
            },
        )
    })
}

proptest! {
    #[test]
    fn matrix_json_roundtrip(m in small_matrix()) {
        let text = to_json_string(&MatrixJson::of(&m)).unwrap();
        let back = parse_matrix(&text).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn matrix_csv_roundtrip(m in small_matrix()) {
        let text = matrix_to_csv("T", "test ordering", &m);
        let back = parse_matrix(&text).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn shape_file_roundtrip(re in proptest::collection::vec(-4.0f64..4.0, 2), im in proptest::collection::vec(-4.0f64..4.0, 2)) {
        // n = 2 on two tetrahedra: one shape column per tetrahedron.
        let z: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
        let text = shapes_to_json(&z, 2, 2).unwrap();
        let back = parse_shapes(&text, 2, 2).unwrap();
        prop_assert_eq!(back, z);
    }
}

fn load(name: &str) -> TriangulationFile {
    let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    TriangulationFile::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn curve_encoding_roundtrips_on_corpus() {
    for name in ["m003.json", "m004.json", "m129.json"] {
        let file = load(name);
        let tri = file.triangulation().unwrap();
        let surf = CuspSurface::new(&tri).unwrap();
        let curves = resolve_curves(&tri, &surf, &file, None).unwrap();
        assert!(!curves.is_empty());
        for curve in &curves {
            let encoded = encode_curve(curve);
            let back = decode_curve(&encoded).unwrap();
            assert_eq!(back.segments.len(), curve.segments.len());
            back.validate(&tri).unwrap();
            for (a, b) in back.segments.iter().zip(&curve.segments) {
                assert_eq!((a.tet, a.vertex, a.enter, a.exit), (b.tet, b.vertex, b.enter, b.exit));
            }
        }
    }
}

#[test]
fn shape_files_for_higher_n_cover_all_subsimplices() {
    // n = 3 on one tetrahedron has four subsimplex columns.
    let z: Vec<C64> = (0..4).map(|k| C64::new(0.3 + 0.1 * k as f64, 0.9)).collect();
    let text = shapes_to_json(&z, 1, 3).unwrap();
    let back = parse_shapes(&text, 1, 3).unwrap();
    assert_eq!(back, z);
}

#[test]
fn parse_shapes_rejects_missing_and_duplicate_keys() {
    assert!(parse_shapes(r#"{"0,0000": [0.5, 0.5]}"#, 2, 2).is_err());
    assert!(parse_shapes(r#"{"0,0000": [0.5, 0.5], "0,9999": [0.5, 0.5]}"#, 1, 2).is_err());
}
