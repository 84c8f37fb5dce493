//! Dataset manifest: a two-column CSV (`path,label`) mapping audio files to
//! genre labels. Paths containing commas are rejected rather than quoted.

use std::fs;
use std::path::{Path, PathBuf};

use super::AudioError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    /// (file path, class label) in file order.
    pub entries: Vec<(String, String)>,
    /// Sorted distinct labels; class index = position in this list.
    pub class_names: Vec<String>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<(String, String)>) -> Self {
        let mut class_names: Vec<String> = entries.iter().map(|(_, l)| l.clone()).collect();
        class_names.sort();
        class_names.dedup();
        DatasetManifest {
            entries,
            class_names,
        }
    }

    /// Class index of each entry, in entry order.
    pub fn label_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|(_, l)| self.class_names.iter().position(|c| c == l).unwrap())
            .collect()
    }

    /// Entry paths resolved against the manifest file's directory.
    pub fn resolved_paths(&self, manifest_path: &Path) -> Vec<PathBuf> {
        let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        self.entries
            .iter()
            .map(|(p, _)| {
                let pb = PathBuf::from(p);
                if pb.is_absolute() {
                    pb
                } else {
                    base.join(pb)
                }
            })
            .collect()
    }
}

pub fn load_manifest<P: AsRef<Path>>(path: P) -> Result<DatasetManifest, AudioError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(AudioError::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == "path,label" => {}
        _ => {
            return Err(AudioError::MalformedManifest {
                line: 1,
                detail: "header must be exactly `path,label`".to_string(),
            })
        }
    }

    let mut entries = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(AudioError::MalformedManifest {
                line: idx + 1,
                detail: format!("expected 2 comma-separated fields, got {}", fields.len()),
            });
        }
        let (p, label) = (fields[0].to_string(), fields[1].to_string());
        if entries.iter().any(|(existing, _)| *existing == p) {
            return Err(AudioError::DuplicatePath(p));
        }
        entries.push((p, label));
    }
    if entries.is_empty() {
        return Err(AudioError::EmptyManifest);
    }
    Ok(DatasetManifest::new(entries))
}

pub fn save_manifest<P: AsRef<Path>>(
    manifest: &DatasetManifest,
    path: P,
) -> Result<(), AudioError> {
    let mut out = String::from("path,label\n");
    for (i, (p, label)) in manifest.entries.iter().enumerate() {
        if p.contains(',') || label.contains(',') || p.contains('\n') || label.contains('\n') {
            return Err(AudioError::MalformedManifest {
                line: i + 2,
                detail: "path or label contains a comma or newline".to_string(),
            });
        }
        out.push_str(p);
        out.push(',');
        out.push_str(label);
        out.push('\n');
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tmp_manifest(content: &str) -> tempfile::TempPath {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.into_temp_path()
    }

    #[test]
    fn balanced_twenty_row_manifest() {
        let mut content = String::from("path,label\n");
        for i in 0..10 {
            content.push_str(&format!("classical_{i:02}.wav,classical\n"));
        }
        for i in 0..10 {
            content.push_str(&format!("metal_{i:02}.wav,metal\n"));
        }
        let m = load_manifest(tmp_manifest(&content)).unwrap();
        assert_eq!(m.entries.len(), 20);
        assert_eq!(m.class_names, vec!["classical", "metal"]);
        let idx = m.label_indices();
        assert_eq!(idx.iter().filter(|&&i| i == 0).count(), 10);
        assert_eq!(idx.iter().filter(|&&i| i == 1).count(), 10);
    }

    #[test]
    fn single_row_manifest_is_valid() {
        let m = load_manifest(tmp_manifest("path,label\na.wav,classical\n")).unwrap();
        assert_eq!(m.entries.len(), 1);
        assert_eq!(m.class_names, vec!["classical"]);
    }

    #[test]
    fn duplicate_path_is_rejected() {
        let r = load_manifest(tmp_manifest("path,label\na.wav,x\na.wav,y\n"));
        assert!(matches!(r, Err(AudioError::DuplicatePath(p)) if p == "a.wav"));
    }

    #[test]
    fn empty_manifest_is_rejected() {
        assert!(matches!(
            load_manifest(tmp_manifest("path,label\n")),
            Err(AudioError::EmptyManifest)
        ));
    }

    #[test]
    fn missing_file_is_reported() {
        assert!(matches!(
            load_manifest("/nonexistent/manifest.csv"),
            Err(AudioError::MissingFile(_))
        ));
    }

    #[test]
    fn comma_in_path_is_rejected() {
        let r = load_manifest(tmp_manifest("path,label\na,b.wav,classical\n"));
        assert!(matches!(r, Err(AudioError::MalformedManifest { .. })));
    }

    #[test]
    fn resolves_relative_paths_against_manifest_dir() {
        let m = DatasetManifest::new(vec![("clip.wav".into(), "classical".into())]);
        let resolved = m.resolved_paths(Path::new("/data/corpus/manifest.csv"));
        assert_eq!(resolved[0], PathBuf::from("/data/corpus/clip.wav"));
    }

    proptest! {
        #[test]
        fn parse_then_serialize_is_idempotent(
            names in proptest::collection::vec("[a-z]{1,8}\\.wav", 1..12),
            labels in proptest::collection::vec("[a-z]{1,6}", 1..12),
        ) {
            // Build a normalized CSV with unique paths.
            let mut seen = std::collections::HashSet::new();
            let mut content = String::from("path,label\n");
            for (i, name) in names.iter().enumerate() {
                let unique = format!("{i}_{name}");
                if seen.insert(unique.clone()) {
                    content.push_str(&format!("{unique},{}\n", labels[i % labels.len()]));
                }
            }
            let path = tmp_manifest(&content);
            let m = load_manifest(&path).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let out = dir.path().join("roundtrip.csv");
            save_manifest(&m, &out).unwrap();
            prop_assert_eq!(std::fs::read_to_string(&out).unwrap(), content);
        }
    }
}
