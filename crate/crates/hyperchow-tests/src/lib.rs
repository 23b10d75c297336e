//! Fixture access for the acceptance target.

use std::path::{Path, PathBuf};

use hyperchow::input::parse_path;
use hyperchow_core::arrangement::StackyArrangement;

pub fn fixture_path(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(file)
}

/// A fixture arrangement by name, read from `fixtures/<name>.toml`.
pub fn fixture(name: &str) -> StackyArrangement {
    let path = fixture_path(&format!("{}.toml", name));
    parse_path(&path)
        .unwrap_or_else(|e| panic!("{}: {}", path.display(), e))
        .arrangement()
        .unwrap_or_else(|e| panic!("{}: {}", path.display(), e))
}
