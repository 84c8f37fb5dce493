//! Feature CSV: header `path,label,<feature names>`, one row per file,
//! values printed with 9 significant digits.

use std::fs;
use std::path::Path;

use crate::dataset::Dataset;

use super::FeatureError;

/// Format a value with 9 significant digits.
fn format_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_features_csv<P: AsRef<Path>>(path: P, ds: &Dataset) -> Result<(), FeatureError> {
    let mut out = String::from("path,label");
    for name in &ds.feature_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (row_idx, row) in ds.x.iter().enumerate() {
        let file = ds.paths.get(row_idx).cloned().unwrap_or_default();
        let label = &ds.class_names[ds.y[row_idx]];
        out.push_str(&file);
        out.push(',');
        out.push_str(label);
        for v in row {
            out.push(',');
            out.push_str(&format_value(*v));
        }
        out.push('\n');
    }
    fs::write(path.as_ref(), out).map_err(|e| FeatureError::Audio(e.into()))?;
    Ok(())
}

pub fn read_features_csv<P: AsRef<Path>>(path: P) -> Result<Dataset, FeatureError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(FeatureError::Audio(
            crate::audio_io::AudioError::MissingFile(path.to_path_buf()),
        ));
    }
    let text = fs::read_to_string(path).map_err(|e| FeatureError::Audio(e.into()))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or(FeatureError::EmptyCsv)?;
    let header_fields: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if header_fields.len() < 3 || header_fields[0] != "path" || header_fields[1] != "label" {
        return Err(FeatureError::MalformedCsv {
            line: 1,
            detail: "header must start with `path,label` and name at least one feature"
                .to_string(),
        });
    }
    let feature_names: Vec<String> = header_fields[2..].iter().map(|s| s.to_string()).collect();
    let n_features = feature_names.len();

    let mut paths = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_features + 2 {
            return Err(FeatureError::MalformedCsv {
                line: idx + 1,
                detail: format!(
                    "expected {} fields, got {}",
                    n_features + 2,
                    fields.len()
                ),
            });
        }
        paths.push(fields[0].to_string());
        labels.push(fields[1].to_string());
        let row: Result<Vec<f64>, _> = fields[2..].iter().map(|f| f.parse::<f64>()).collect();
        rows.push(row.map_err(|e| FeatureError::MalformedCsv {
            line: idx + 1,
            detail: format!("bad value: {e}"),
        })?);
    }
    if rows.is_empty() {
        return Err(FeatureError::EmptyCsv);
    }

    let mut class_names: Vec<String> = labels.clone();
    class_names.sort();
    class_names.dedup();
    let y = labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).unwrap())
        .collect();

    Ok(Dataset {
        x: rows,
        y,
        class_names,
        feature_names,
        paths,
    })
}
