use morphoskel::mesh::{
    is_watertight, load_mesh, load_mesh_auto, load_point_cloud, parse_mesh, ply, save_mesh, save_point_cloud,
    MeshFormat, PlyEncoding,
};
use morphoskel::shapes::AnalyticShape;
use morphoskel::{Error, Point};
use proptest::prelude::*;

fn torus() -> morphoskel::TriangleMesh {
    AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (24, 10) }
        .generate_mesh()
        .unwrap()
        .mesh
}

#[test]
fn ply_mesh_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ply");
    let mesh = torus();
    save_mesh(&path, &mesh, MeshFormat::Ply).unwrap();
    let back = load_mesh_auto(&path).unwrap();
    assert_eq!(back.vertices(), mesh.vertices());
    assert_eq!(back.triangles(), mesh.triangles());
    assert!(is_watertight(&back).closed);
}

#[test]
fn obj_mesh_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.obj");
    let mesh = torus();
    save_mesh(&path, &mesh, MeshFormat::Obj).unwrap();
    let back = load_mesh(&path, MeshFormat::Obj).unwrap();
    assert_eq!(back.triangles(), mesh.triangles());
    assert_eq!(back.vertices(), mesh.vertices());
}

#[test]
fn all_ply_encodings_agree() {
    let mesh = torus();
    let radius: Vec<f64> = mesh.vertices().iter().map(|p| p.coords.norm()).collect();
    let mut parsed = Vec::new();
    for enc in [PlyEncoding::Ascii, PlyEncoding::BinaryLittleEndian, PlyEncoding::BinaryBigEndian] {
        let mut buf = Vec::new();
        ply::write(&mut buf, enc, mesh.vertices(), &[("radius", &radius)], Some(mesh.triangles())).unwrap();
        parsed.push(ply::parse(&buf).unwrap());
    }
    for p in &parsed {
        assert_eq!(p.vertices, mesh.vertices());
        assert_eq!(p.scalar("radius").unwrap(), radius.as_slice());
        assert_eq!(p.faces.len(), mesh.triangle_count());
    }
}

#[test]
fn open_mesh_reports_boundary() {
    let text = b"v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 4\n";
    let mesh = parse_mesh(text, MeshFormat::Obj).unwrap();
    let report = is_watertight(&mesh);
    assert!(!report.closed);
    assert_eq!(report.boundary_edge_count, 3);
    assert!(matches!(mesh.ensure_watertight(), Err(Error::NotWatertight { boundary_edges: 3, .. })));
}

#[test]
fn malformed_inputs_are_parse_errors() {
    for bad in [&b"ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nend_header\n1\n"[..], b"not a ply", b""] {
        assert!(matches!(parse_mesh(bad, MeshFormat::Ply), Err(Error::Parse(_))));
    }
    assert!(matches!(parse_mesh(b"v 0 0\n", MeshFormat::Obj), Err(Error::Parse(_))));
    assert!(matches!(parse_mesh(b"v 0 0 0\nf 1 2 3\n", MeshFormat::Obj), Err(Error::Parse(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn point_cloud_round_trip(
        pts in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6, -1e6f64..1e6, -1.0f64..1.0), 0..100)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ply");
        let points: Vec<Point> = pts.iter().map(|&(x, y, z, _)| Point::new(x, y, z)).collect();
        let w: Vec<f64> = pts.iter().map(|p| p.3).collect();
        save_point_cloud(&path, &points, &[("weight", &w)]).unwrap();
        let back = load_point_cloud(&path).unwrap();
        prop_assert_eq!(&back.points, &points);
        prop_assert_eq!(back.scalar("weight").unwrap(), w.as_slice());
    }

    #[test]
    fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = ply::parse(&bytes);
        let _ = parse_mesh(&bytes, MeshFormat::Obj);
        let mut with_header = b"ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty double x\nproperty double y\nproperty double z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n".to_vec();
        with_header.extend_from_slice(&bytes);
        let _ = ply::parse(&with_header);
    }
}

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.display().to_string(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn fuzz_seeds_are_valid_inputs() {
    for (name, bytes) in corpus("fuzz_ply") {
        ply::parse(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in corpus("fuzz_obj") {
        parse_mesh(&bytes, MeshFormat::Obj).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    for (name, bytes) in corpus("fuzz_ply").into_iter().filter(|(n, _)| n.contains("tetra")) {
        let tetra = parse_mesh(&bytes, MeshFormat::Ply).unwrap();
        assert!(is_watertight(&tetra).closed, "{name}");
    }
    for (name, bytes) in corpus("fuzz_shape_spec") {
        let text = String::from_utf8(bytes).unwrap();
        let spec: morphoskel::shapes::ShapeSpec = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(spec.to_string().parse::<morphoskel::shapes::ShapeSpec>().unwrap(), spec);
    }
}
