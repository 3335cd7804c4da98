//! Seeded synthetic sequences: a textured rectangle on a noise background,
//! moving at constant velocity with border reflection, plus an optional
//! correlated distractor for mutation experiments.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MscfError, Result};
use crate::features::Image;
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistractorSpec {
    /// First frame (0-based) on which the distractor is rendered.
    pub appear_frame: usize,
    /// Offset from the target at the appearance frame, in pixels. The
    /// distractor then stays at that scene position, so an offset along the
    /// target's heading puts it in the target's path.
    pub offset: (f64, f64),
    /// Texture correlation with the target in [0, 1].
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub frame_w: usize,
    pub frame_h: usize,
    pub target_w: usize,
    pub target_h: usize,
    pub velocity: (f64, f64),
    pub texture_seed: u64,
    pub n_frames: usize,
    pub distractor: Option<DistractorSpec>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            frame_w: 128,
            frame_h: 128,
            target_w: 24,
            target_h: 24,
            velocity: (2.0, 1.0),
            texture_seed: 7,
            n_frames: 100,
            distractor: None,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frame_w == 0 || self.frame_h == 0 || self.n_frames == 0 {
            return Err(MscfError::invalid("synthetic spec must be non-empty"));
        }
        if self.target_w == 0 || self.target_h == 0 {
            return Err(MscfError::invalid("target size must be >= 1"));
        }
        if self.target_w > self.frame_w || self.target_h > self.frame_h {
            return Err(MscfError::invalid("target must fit inside the frame"));
        }
        if let Some(d) = &self.distractor {
            if !(0.0..=1.0).contains(&d.similarity) {
                return Err(MscfError::invalid("distractor similarity must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` spec format.
    pub fn from_config_str(text: &str) -> Result<SynthSpec> {
        let mut spec = SynthSpec::default();
        let mut distractor = DistractorSpec {
            appear_frame: 0,
            offset: (0.0, 0.0),
            similarity: 0.0,
        };
        let mut has_distractor = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| MscfError::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| MscfError::Parse { line: line_no, msg };
            let as_usize = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| bad(format!("`{v}` is not a count")))
            };
            let as_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("`{v}` is not a number")))
            };
            if key.starts_with("distractor_") {
                has_distractor = true;
            }
            match key {
                "frame_w" => spec.frame_w = as_usize(value)?,
                "frame_h" => spec.frame_h = as_usize(value)?,
                "target_w" => spec.target_w = as_usize(value)?,
                "target_h" => spec.target_h = as_usize(value)?,
                "vel_x" => spec.velocity.0 = as_f64(value)?,
                "vel_y" => spec.velocity.1 = as_f64(value)?,
                "seed" => {
                    spec.texture_seed = value.parse::<u64>().map_err(|_| MscfError::Parse {
                        line: line_no,
                        msg: format!("`{value}` is not a seed"),
                    })?
                }
                "n_frames" => spec.n_frames = as_usize(value)?,
                "distractor_appear" => distractor.appear_frame = as_usize(value)?,
                "distractor_dx" => distractor.offset.0 = as_f64(value)?,
                "distractor_dy" => distractor.offset.1 = as_f64(value)?,
                "distractor_similarity" => distractor.similarity = as_f64(value)?,
                _ => {
                    return Err(MscfError::Parse {
                        line: line_no,
                        msg: format!("unknown synthetic spec key `{key}`"),
                    })
                }
            }
        }
        spec.distractor = has_distractor.then_some(distractor);
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<SynthSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| MscfError::io(path, e))?;
        SynthSpec::from_config_str(&text)
    }
}

/// Folds a coordinate into [0, span] with mirror reflection.
fn reflect(p: f64, span: f64) -> f64 {
    if span <= 0.0 {
        return 0.0;
    }
    let period = 2.0 * span;
    let m = p.rem_euclid(period);
    if m > span {
        period - m
    } else {
        m
    }
}

fn fill_texture(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: u8, hi: u8) -> Vec<[u8; 3]> {
    (0..w * h)
        .map(|_| {
            [
                rng.gen_range(lo..=hi),
                rng.gen_range(lo..=hi),
                rng.gen_range(lo..=hi),
            ]
        })
        .collect()
}

/// Renders the sequence and its exact ground truth. Deterministic for a
/// fixed spec: identical seeds yield bit-identical frame bytes.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(Vec<Image>, Vec<BoundingBox>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.texture_seed);
    let (fw, fh) = (spec.frame_w, spec.frame_h);
    let (tw, th) = (spec.target_w, spec.target_h);

    // low-contrast noise background, rich target texture
    let background = fill_texture(&mut rng, fw, fh, 96, 144);
    let target_tex = fill_texture(&mut rng, tw, th, 0, 255);
    let distractor_noise = fill_texture(&mut rng, tw, th, 0, 255);

    let distractor_tex: Option<Vec<[u8; 3]>> = spec.distractor.as_ref().map(|d| {
        target_tex
            .iter()
            .zip(distractor_noise.iter())
            .map(|(t, n)| {
                let mut px = [0u8; 3];
                for c in 0..3 {
                    let v = d.similarity * t[c] as f64 + (1.0 - d.similarity) * n[c] as f64;
                    px[c] = v.round().clamp(0.0, 255.0) as u8;
                }
                px
            })
            .collect()
    });

    let span_x = (fw - tw) as f64;
    let span_y = (fh - th) as f64;
    let start_x = span_x / 2.0;
    let start_y = span_y / 2.0;
    let pos_at = |t: usize| -> (usize, usize) {
        (
            reflect(start_x + spec.velocity.0 * t as f64, span_x).round() as usize,
            reflect(start_y + spec.velocity.1 * t as f64, span_y).round() as usize,
        )
    };

    // the distractor parks at target + offset (at its appearance frame) and
    // stays there while the target moves on
    let distractor_pos: Option<(usize, usize)> = spec.distractor.as_ref().map(|d| {
        let (ax, ay) = pos_at(d.appear_frame);
        (
            (ax as f64 + d.offset.0).round().clamp(0.0, span_x) as usize,
            (ay as f64 + d.offset.1).round().clamp(0.0, span_y) as usize,
        )
    });

    let mut frames = Vec::with_capacity(spec.n_frames);
    let mut truth = Vec::with_capacity(spec.n_frames);
    for t in 0..spec.n_frames {
        let (px, py) = pos_at(t);

        let mut img = Image::filled(fw, fh, [0, 0, 0]);
        for y in 0..fh {
            for x in 0..fw {
                img.set_rgb(x, y, background[y * fw + x]);
            }
        }

        for y in 0..th {
            for x in 0..tw {
                img.set_rgb(px + x, py + y, target_tex[y * tw + x]);
            }
        }

        // drawn last: the distractor occludes the target when they overlap
        if let (Some(d), Some(tex), Some((dx, dy))) =
            (&spec.distractor, &distractor_tex, distractor_pos)
        {
            if t >= d.appear_frame {
                for y in 0..th {
                    for x in 0..tw {
                        img.set_rgb(dx + x, dy + y, tex[y * tw + x]);
                    }
                }
            }
        }

        frames.push(img);
        truth.push(BoundingBox::new(px as f64, py as f64, tw as f64, th as f64)?);
    }
    Ok((frames, truth))
}
