#![no_main]

use libfuzzer_sys::fuzz_target;
use morphoskel::mesh::{parse_mesh, ply, MeshFormat};

fuzz_target!(|data: &[u8]| {
    if let Ok(parsed) = ply::parse(data) {
        for list in &parsed.faces {
            let _ = list.len();
        }
    }
    if let Ok(mesh) = parse_mesh(data, MeshFormat::Ply) {
        let _ = morphoskel::mesh::is_watertight(&mesh);
    }
});
