#![no_main]

use libfuzzer_sys::fuzz_target;
use morphoskel::mesh::{obj, parse_mesh, MeshFormat};

fuzz_target!(|data: &[u8]| {
    let _ = obj::parse(data);
    if let Ok(mesh) = parse_mesh(data, MeshFormat::Obj) {
        let _ = morphoskel::mesh::is_watertight(&mesh);
    }
});
