//! CSV serialization with `#` comment headers and atomic file replacement.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::figures::Curve;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Renders a curve as CSV: `#` header lines (tool version, tag, metadata),
/// a column-name row, then one row per point. Uses `\n` endings and the
/// shortest round-trip float formatting, so identical inputs always produce
/// identical bytes.
pub fn curve_to_csv(curve: &Curve) -> String {
    let mut s = String::new();
    s.push_str(&format!("# thspeff {TOOL_VERSION}\n"));
    s.push_str(&format!("# tag: {}\n", curve.tag));
    s.push_str(&format!("# curve: {}\n", curve.name));
    for (k, v) in &curve.meta {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    s.push_str(&curve.columns.join(","));
    s.push('\n');
    for row in &curve.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Writes `contents` to `path` atomically: a temp file in the same
/// directory, flushed, then renamed over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_curve() -> Curve {
        Curve {
            name: "demo".into(),
            tag: "figure-0".into(),
            meta: vec![("beta".into(), "0.5".into())],
            columns: vec!["x", "y"],
            rows: vec![vec![1.0, 2.5], vec![2.0, 0.125]],
        }
    }

    #[test]
    fn csv_layout() {
        let csv = curve_to_csv(&sample_curve());
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# thspeff "));
        assert_eq!(lines[1], "# tag: figure-0");
        assert_eq!(lines[3], "# beta: 0.5");
        assert_eq!(lines[4], "x,y");
        assert_eq!(lines[5], "1,2.5");
        assert_eq!(lines[6], "2,0.125");
    }

    #[test]
    fn atomic_write_round_trip() {
        let dir = std::env::temp_dir().join("thspeff-output-test");
        let path = dir.join("curve.csv");
        let csv = curve_to_csv(&sample_curve());
        write_atomic(&path, &csv).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), csv);
        // Overwrite is atomic and idempotent.
        write_atomic(&path, &csv).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), csv);
        fs::remove_dir_all(&dir).unwrap();
    }
}
