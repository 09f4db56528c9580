use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

const CRATES: [&str; 7] = ["poly", "geonet", "variety", "elimination", "partition", "dirops", "experiments"];

fn collect(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.is_dir() {
            collect(&path, out);
        } else if path.extension().is_some_and(|e| e == "rs") {
            out.push(path);
        }
    }
}

fn main() {
    let root = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap()).join("..");
    let mut hashes = Vec::new();
    for name in CRATES {
        let dir = root.join(name);
        let mut files = vec![dir.join("Cargo.toml")];
        collect(&dir.join("src"), &mut files);
        files.sort();
        let mut h = Sha256::new();
        for f in &files {
            println!("cargo:rerun-if-changed={}", f.display());
            let rel = f.strip_prefix(&dir).unwrap_or(f);
            h.update(rel.to_string_lossy().as_bytes());
            h.update([0]);
            h.update(fs::read(f).unwrap_or_default());
            h.update([0]);
        }
        let digest: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        hashes.push(format!("vardir-{name}={digest}"));
    }
    println!("cargo:rerun-if-changed={}", root.join("experiments/src").display());
    println!("cargo:rustc-env=VARDIR_SOURCE_HASHES={}", hashes.join(";"));
}
