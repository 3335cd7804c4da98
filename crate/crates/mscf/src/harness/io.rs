//! On-disk formats: the versioned per-frame trace JSON, curve CSVs, and the
//! metric summary JSON.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{MscfError, Result};
use crate::eval::CurveData;
use crate::features::Image;
use crate::tracker::FrameReport;

pub const TRACE_SCHEMA: u32 = 1;

/// Versioned tracking trace: one report per frame, including the first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackTrace {
    pub schema: u32,
    pub name: String,
    pub frames: Vec<FrameReport>,
}

impl TrackTrace {
    pub fn new(name: impl Into<String>, frames: Vec<FrameReport>) -> TrackTrace {
        TrackTrace {
            schema: TRACE_SCHEMA,
            name: name.into(),
            frames,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| MscfError::invalid(format!("trace serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| MscfError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<TrackTrace> {
        let text = std::fs::read_to_string(path).map_err(|e| MscfError::io(path, e))?;
        let trace: TrackTrace = serde_json::from_str(&text).map_err(|e| MscfError::Parse {
            line: e.line(),
            msg: format!("{}: {e}", path.display()),
        })?;
        if trace.schema != TRACE_SCHEMA {
            return Err(MscfError::invalid(format!(
                "unsupported trace schema {} in {}",
                trace.schema,
                path.display()
            )));
        }
        Ok(trace)
    }
}

/// Scalar metric summary for one sequence or a benchmark aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub precision20: f64,
    pub auc: f64,
    pub fps: f64,
}

impl Summary {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| MscfError::invalid(format!("summary serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| MscfError::io(path, e))
    }
}

/// Writes a curve as `threshold,value` lines.
pub fn save_curve_csv(curve: &CurveData, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for (t, v) in curve.thresholds.iter().zip(curve.values.iter()) {
        writeln!(out, "{t},{v}").expect("in-memory write");
    }
    std::fs::write(path, out).map_err(|e| MscfError::io(path, e))
}

/// Encodes a frame as PNG.
pub fn save_png(img: &Image, path: &Path) -> Result<()> {
    image::save_buffer(
        path,
        img.pixels(),
        img.width() as u32,
        img.height() as u32,
        image::ColorType::Rgb8,
    )
    .map_err(|e| {
        MscfError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::Other, e.to_string()),
        )
    })
}
