//! Reading manifests and dataset directories; writing generated datasets.

use std::fs;
use std::path::{Path, PathBuf};

use packbench::instance::{parse_bpplib, parse_manifest, parse_orlib, Dataset, Format, ManifestEntry, ShufflePolicy};

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn sorted_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn load_entry(base: &Path, entry: &ManifestEntry) -> Result<Dataset, CliError> {
    let dir = base.join(&entry.dir);
    let io = |e: std::io::Error| CliError::Io(format!("dataset `{}` ({}): {e}", entry.name, dir.display()));
    let mut instances = Vec::new();
    for file in sorted_files(&dir).map_err(io)? {
        let text = fs::read_to_string(&file).map_err(io)?;
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
        match entry.format {
            Format::Bpplib => instances.push(parse_bpplib(&text, stem)?),
            Format::Orlib => instances.extend(parse_orlib(&text, stem)?),
        }
    }
    if instances.is_empty() {
        return Err(CliError::Io(format!(
            "dataset `{}` ({}) has no instances",
            entry.name,
            dir.display()
        )));
    }
    let ds = Dataset::new(entry.name.clone(), instances)?;
    Ok(match entry.shuffle {
        ShufflePolicy::None => ds,
        ShufflePolicy::Seed(s) => ds.shuffled(s),
    })
}

/// Every dataset listed in the manifest, directories resolved against the
/// manifest's own location.
pub fn load_manifest(path: &Path) -> Result<Vec<Dataset>, CliError> {
    let entries = parse_manifest(&read(path)?)?;
    if entries.is_empty() {
        return Err(CliError::Usage(format!(
            "manifest {} lists no datasets",
            path.display()
        )));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    entries.iter().map(|e| load_entry(base, e)).collect()
}

/// Writes one BPPLib file per instance under `root/dir`.
pub fn write_dataset(root: &Path, dir: &str, ds: &Dataset) -> Result<(), CliError> {
    for inst in &ds.instances {
        write(&root.join(dir).join(format!("{}.txt", inst.id)), &inst.to_bpplib())?;
    }
    Ok(())
}
