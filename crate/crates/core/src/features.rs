//! RGB color histogram features and instance assembly from frame files.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Instance, MetricKind, Shot};

/// An 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl FrameImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if pixels.len() as u64 != u64::from(width) * u64::from(height) {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height} frame needs {} pixels, got {}",
                u64::from(width) * u64::from(height),
                pixels.len()
            )));
        }
        Ok(FrameImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Decodes an image file. Portable pixmaps and PNG are supported.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.is_file() {
            return Err(Error::MissingFrame(path.to_path_buf()));
        }
        let img = image::ImageReader::open(path)
            .and_then(|r| r.with_guessed_format())
            .map_err(|e| Error::Image {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
            .decode()
            .map_err(|e| Error::Image {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
            .into_rgb8();
        let (width, height) = img.dimensions();
        let pixels = img.pixels().map(|p| p.0).collect();
        FrameImage::new(width, height, pixels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramConfig {
    pub bins_per_channel: usize,
    pub normalize: bool,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        HistogramConfig {
            bins_per_channel: 32,
            normalize: true,
        }
    }
}

impl HistogramConfig {
    pub fn validate(&self) -> Result<()> {
        let b = self.bins_per_channel;
        if b == 0 || b > 256 || 256 % b != 0 {
            return Err(Error::InvalidArgument(format!(
                "bins per channel must divide 256, got {b}"
            )));
        }
        Ok(())
    }

    pub fn feature_len(&self) -> usize {
        3 * self.bins_per_channel
    }
}

/// Per-channel color histogram laid out as `[R bins | G bins | B bins]`.
///
/// Channel value `v` falls in bin `floor(v * bins / 256)`. With
/// `normalize` each channel block sums to one.
pub fn compute_histogram(frame: &FrameImage, cfg: &HistogramConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if frame.pixels.is_empty() {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    let bins = cfg.bins_per_channel;
    let mut counts = vec![0u64; 3 * bins];
    for px in &frame.pixels {
        for (c, &v) in px.iter().enumerate() {
            counts[c * bins + usize::from(v) * bins / 256] += 1;
        }
    }
    let n = frame.pixels.len() as f64;
    Ok(counts
        .into_iter()
        .map(|c| if cfg.normalize { c as f64 / n } else { c as f64 })
        .collect())
}

/// Reads a `frame_filename,duration_seconds` manifest. A header row is
/// skipped when its duration field is not a number.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<(String, f64)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() != 2 {
            return Err(Error::Parse(format!(
                "manifest line {}: expected frame_filename,duration_seconds",
                line + 1
            )));
        }
        match record[1].parse::<f64>() {
            Ok(d) => entries.push((record[0].to_string(), d)),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("manifest line {}: {e}", line + 1))),
        }
    }
    Ok(entries)
}

/// Builds an instance whose shot `k` is the `k`-th manifest row: the
/// histogram of its frame plus its duration.
pub fn build_instance(
    frames_dir: impl AsRef<Path>,
    manifest: impl AsRef<Path>,
    budget_s: f64,
    cfg: &HistogramConfig,
    metric: MetricKind,
) -> Result<Instance> {
    cfg.validate()?;
    let manifest = manifest.as_ref();
    let entries = read_manifest(manifest)?;
    if entries.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let name = manifest
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("video")
        .to_string();
    let shots = entries
        .into_iter()
        .map(|(file, duration)| {
            let frame = FrameImage::open(frames_dir.as_ref().join(&file))?;
            let id = Path::new(&file)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(&file)
                .to_string();
            Ok(Shot::new(id, duration, compute_histogram(&frame, cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(name, shots, budget_s, metric)
}

/// Encodes a frame as a binary portable pixmap (P6).
pub fn encode_ppm(frame: &FrameImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend(frame.pixels.iter().flatten());
    out
}
