//! Dataset plumbing: sequence loading, ground-truth parsing, synthetic
//! sequence generation, and the CLI entry points.

pub mod cli;
pub mod io;
mod synth;

pub use synth::{generate_synthetic, DistractorSpec, SynthSpec};

use std::path::{Path, PathBuf};

use crate::error::{MscfError, Result};
use crate::features::Image;
use crate::geometry::BoundingBox;

/// One benchmark sequence on disk.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    pub frames_dir: PathBuf,
    pub groundtruth: PathBuf,
    pub name: String,
    pub attributes: Vec<String>,
}

/// Lazily decoded frame stream over a sorted file list.
pub struct FrameStream {
    paths: Vec<PathBuf>,
    next: usize,
}

impl FrameStream {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }
}

impl Iterator for FrameStream {
    type Item = Result<Image>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.paths.get(self.next)?.clone();
        self.next += 1;
        Some(load_image(&path))
    }
}

/// Decodes one image file (PNG/JPEG/PNM) into 8-bit RGB.
pub fn load_image(path: &Path) -> Result<Image> {
    let decoded = image::open(path).map_err(|e| {
        MscfError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
        )
    })?;
    let rgb = decoded.to_rgb8();
    Image::new(rgb.width() as usize, rgb.height() as usize, rgb.into_raw())
}

fn numeric_key(path: &Path) -> (u64, String) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    let digits: String = stem.chars().filter(|c| c.is_ascii_digit()).collect();
    let n = digits.parse::<u64>().unwrap_or(u64::MAX);
    (n, stem)
}

/// Lists the frame files of a sequence directory (or its `img/` child),
/// sorted by the numeric part of the filename.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let img_child = dir.join("img");
    let scan = if img_child.is_dir() { img_child } else { dir.to_path_buf() };
    let mut paths = Vec::new();
    let entries = std::fs::read_dir(&scan).map_err(|e| MscfError::io(&scan, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| MscfError::io(&scan, e))?;
        let path = entry.path();
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        if matches!(ext.as_str(), "png" | "jpg" | "jpeg" | "ppm" | "pgm" | "pnm" | "bmp") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(MscfError::invalid(format!(
            "no frame images found under {}",
            scan.display()
        )));
    }
    paths.sort_by(|a, b| numeric_key(a).cmp(&numeric_key(b)));
    Ok(paths)
}

/// Parses one ground-truth line: `x,y,w,h` separated by comma, tab, or
/// whitespace, 1-based pixel origin. A line of NaNs marks an absent target.
fn parse_gt_line(line: &str, line_no: usize) -> Result<Option<BoundingBox>> {
    let fields: Vec<&str> = line
        .split(|c: char| c == ',' || c == '\t' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if fields.len() != 4 {
        return Err(MscfError::Parse {
            line: line_no,
            msg: format!("expected 4 fields, got {} in `{line}`", fields.len()),
        });
    }
    let mut vals = [0.0f64; 4];
    let mut any_nan = false;
    for (i, f) in fields.iter().enumerate() {
        let v = f.parse::<f64>().map_err(|_| MscfError::Parse {
            line: line_no,
            msg: format!("`{f}` is not a number"),
        })?;
        if v.is_nan() {
            any_nan = true;
        }
        vals[i] = v;
    }
    if any_nan {
        return Ok(None); // absent-target marker
    }
    let bbox = BoundingBox::new(vals[0] - 1.0, vals[1] - 1.0, vals[2], vals[3]).map_err(|e| {
        MscfError::Parse {
            line: line_no,
            msg: e.to_string(),
        }
    })?;
    Ok(Some(bbox))
}

/// Loads a ground-truth file: one box per line, converted to 0-based pixels.
pub fn load_groundtruth(path: &Path) -> Result<Vec<Option<BoundingBox>>> {
    let text = std::fs::read_to_string(path).map_err(|e| MscfError::io(path, e))?;
    let mut boxes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        boxes.push(parse_gt_line(line, idx + 1)?);
    }
    if boxes.is_empty() {
        return Err(MscfError::Parse {
            line: 0,
            msg: format!("{} contains no ground-truth rows", path.display()),
        });
    }
    Ok(boxes)
}

/// Reads the optional attribute sidecar (`attributes.txt`, one tag per
/// line) of a sequence directory.
pub fn load_attributes(dir: &Path) -> Vec<String> {
    let path = dir.join("attributes.txt");
    match std::fs::read_to_string(&path) {
        Ok(text) => text
            .lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect(),
        Err(_) => Vec::new(),
    }
}

/// Opens a sequence: sorted lazy frame stream plus parsed ground truth,
/// truncated to the shorter of the two with a warning on mismatch.
pub fn load_sequence(spec: &SequenceSpec) -> Result<(FrameStream, Vec<Option<BoundingBox>>)> {
    let paths = list_frames(&spec.frames_dir)?;
    let mut truth = load_groundtruth(&spec.groundtruth)?;
    if truth.len() > paths.len() {
        log::warn!(
            "sequence {}: {} ground-truth rows but {} frames; truncating",
            spec.name,
            truth.len(),
            paths.len()
        );
        truth.truncate(paths.len());
    }
    let mut paths = paths;
    if paths.len() > truth.len() {
        log::warn!(
            "sequence {}: {} frames but {} ground-truth rows; truncating",
            spec.name,
            paths.len(),
            truth.len()
        );
        paths.truncate(truth.len());
    }
    Ok((FrameStream { paths, next: 0 }, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gt_line_converts_one_based_origin() {
        let b = parse_gt_line("10,20,30,40", 1).unwrap().unwrap();
        assert_eq!((b.x, b.y, b.w, b.h), (9.0, 19.0, 30.0, 40.0));
    }

    #[test]
    fn gt_separators_are_equivalent() {
        let a = parse_gt_line("10,20,30,40", 1).unwrap().unwrap();
        let b = parse_gt_line("10\t20\t30\t40", 1).unwrap().unwrap();
        let c = parse_gt_line("10 20  30 40", 1).unwrap().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn nan_line_is_absent_marker() {
        assert!(parse_gt_line("NaN,NaN,NaN,NaN", 3).unwrap().is_none());
        assert!(parse_gt_line("nan,nan,nan,nan", 3).unwrap().is_none());
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let err = parse_gt_line("10,20,thirty,40", 7).unwrap_err();
        match err {
            MscfError::Parse { line, .. } => assert_eq!(line, 7),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn frame_sorting_is_numeric() {
        let dir = std::env::temp_dir().join("mscf_sort_test");
        let img_dir = dir.join("img");
        std::fs::create_dir_all(&img_dir).unwrap();
        for name in ["10.png", "2.png", "0001.png", "31.png"] {
            let img = Image::filled(2, 2, [1, 2, 3]);
            io::save_png(&img, &img_dir.join(name)).unwrap();
        }
        let frames = list_frames(&dir).unwrap();
        let names: Vec<String> = frames
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
            .collect();
        assert_eq!(names, vec!["0001.png", "2.png", "10.png", "31.png"]);
        std::fs::remove_dir_all(&dir).ok();
    }
}
