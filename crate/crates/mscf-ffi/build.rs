use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").expect("manifest dir"));
    let header = crate_dir.join("include").join("mscf.h");
    std::fs::create_dir_all(header.parent().expect("include dir")).expect("create include dir");

    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("MSCF_H".to_string()),
        cpp_compat: true,
        documentation: true,
        header: Some("/* C interface for the MSCF tracker. Generated; do not edit. */".to_string()),
        enumeration: cbindgen::EnumConfig {
            prefix_with_name: true,
            ..Default::default()
        },
        ..Default::default()
    };

    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        Err(e) => {
            // header generation must not break `cargo check` in odd setups
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=build.rs");
}
