use arpist::io::{load_mesh, save_mesh, MeshIoError};
use arpist_core::icosphere;
use std::fs;

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for (level, r) in [(0, 1.0), (2, 6371.0)] {
        let mesh = icosphere(level, r).unwrap();
        let path = dir.path().join(format!("ico{level}.tri"));
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        assert_eq!(back, mesh);
        for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
            assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
        }
    }
}

#[test]
fn clockwise_triangle_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cw.tri");
    fs::write(&path, "SPHERETRI 1\n1 4 2\n1 0 0\n0 1 0\n0 0 1\n-1 0 0\n1 2 3\n1 3 2\n").unwrap();
    match load_mesh(&path).unwrap_err() {
        MeshIoError::Parse { line, message } => {
            assert_eq!(line, 8);
            assert!(message.contains("triangle 2") && message.contains("clockwise"), "{message}");
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn empty_file_misses_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.tri");
    fs::write(&path, "").unwrap();
    let e = load_mesh(&path).unwrap_err();
    assert!(e.to_string().contains("missing header"), "{e}");
}

#[test]
fn off_sphere_vertex_reports_its_line() {
    let text = "SPHERETRI 1\n1 3 1\n1 0 0\n0 1.1 0\n0 0 1\n1 2 3\n";
    let e = arpist::io::read_mesh(text.as_bytes()).unwrap_err();
    assert!(e.to_string().starts_with("line 4"), "{e}");
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_mesh("/nonexistent/mesh.tri"), Err(MeshIoError::Io { .. })));
}
