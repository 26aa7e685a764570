//! Image decoding, mask and overlay files, and dataset manifests.

use std::collections::HashSet;
use std::fmt;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::{DynamicImage, GrayImage, ImageError, ImageFormat, ImageReader, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{ImageBuffer, PixelRgb};
use crate::error::{Error, Result};
use crate::mask::RuleMask;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound { path: path.into() }
        } else {
            Error::Io {
                path: path.into(),
                source,
            }
        }
    })
}

fn decode(path: &Path) -> Result<DynamicImage> {
    let bytes = read_bytes(path)?;
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        _ => return Err(Error::UnsupportedFormat { path: path.into() }),
    }
    // Decoding reads from memory, so an I/O error here means truncated data.
    reader.decode().map_err(|e| match e {
        ImageError::Unsupported(_) => Error::UnsupportedFormat { path: path.into() },
        other => Error::CorruptImage {
            path: path.into(),
            message: other.to_string(),
        },
    })
}

/// Reduces any decoded image to 8-bit RGB. Alpha is dropped, grey is
/// replicated, and 16-bit samples keep their high byte.
pub fn to_rgb_buffer(img: &DynamicImage) -> ImageBuffer<PixelRgb> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let hi = |v: u16| (v >> 8) as u8;
    let pixels: Vec<PixelRgb> = match img {
        DynamicImage::ImageLuma16(b) => b
            .pixels()
            .map(|p| PixelRgb::new(hi(p[0]), hi(p[0]), hi(p[0])))
            .collect(),
        DynamicImage::ImageLumaA16(b) => b
            .pixels()
            .map(|p| PixelRgb::new(hi(p[0]), hi(p[0]), hi(p[0])))
            .collect(),
        DynamicImage::ImageRgb16(b) => b
            .pixels()
            .map(|p| PixelRgb::new(hi(p[0]), hi(p[1]), hi(p[2])))
            .collect(),
        DynamicImage::ImageRgba16(b) => b
            .pixels()
            .map(|p| PixelRgb::new(hi(p[0]), hi(p[1]), hi(p[2])))
            .collect(),
        // 8-bit grey, grey+alpha and RGBA all convert exactly.
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| PixelRgb::from(p.0))
            .collect(),
    };
    ImageBuffer::new(w, h, pixels).expect("decoder dimensions match pixel count")
}

/// Decodes a PNG or JPEG file to 8-bit RGB.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer<PixelRgb>> {
    let path = path.as_ref();
    let img = decode(path)?;
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::CorruptImage {
            path: path.into(),
            message: "zero-sized image".into(),
        });
    }
    Ok(to_rgb_buffer(&img))
}

fn save(path: &Path, result: image::ImageResult<()>) -> Result<()> {
    result.map_err(|e| match e {
        ImageError::IoError(source) => Error::Io {
            path: path.into(),
            source,
        },
        other => Error::Encode {
            path: path.into(),
            message: other.to_string(),
        },
    })
}

pub fn write_rgb_png(img: &ImageBuffer<PixelRgb>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = img.pixels().iter().flat_map(|p| [p.r, p.g, p.b]).collect();
    let buf = RgbImage::from_raw(img.width() as u32, img.height() as u32, raw).expect("raw length");
    save(path, buf.save_with_format(path, ImageFormat::Png))
}

/// Writes a single-channel 8-bit PNG with 255 for set pixels and 0 elsewhere.
pub fn write_mask(mask: &RuleMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let raw: Vec<u8> = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let buf =
        GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw).expect("raw length");
    save(path, buf.save_with_format(path, ImageFormat::Png))
}

/// Reads a mask image; any nonzero luma counts as set.
pub fn load_mask(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<RuleMask> {
    let img = decode(path.as_ref())?;
    let dims = (img.width() as usize, img.height() as usize);
    if dims != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: dims,
        });
    }
    let bits = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw().into_iter().map(|v| v != 0).collect(),
        other => other
            .to_luma16()
            .into_raw()
            .into_iter()
            .map(|v| v != 0)
            .collect(),
    };
    RuleMask::new(dims.0, dims.1, bits)
}

/// Replaces masked pixels with pure green.
pub fn render_overlay(
    img: &ImageBuffer<PixelRgb>,
    mask: &RuleMask,
) -> Result<ImageBuffer<PixelRgb>> {
    mask.check_dims(img.dims())?;
    let mut out = img.clone();
    for (p, &on) in out.pixels_mut().iter_mut().zip(mask.bits()) {
        if on {
            *p = PixelRgb::GREEN;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fire,
    NoFire,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Fire => "fire",
            Label::NoFire => "nofire",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "fire" => Ok(Label::Fire),
            "nofire" => Ok(Label::NoFire),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path as written in the manifest.
    pub path: PathBuf,
    pub label: Label,
    pub mask_path: Option<PathBuf>,
}

/// Labeled image list. Relative paths resolve against `base_dir`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Parses `path,label[,mask_path]` lines. Blank lines and lines starting
    /// with `#` are skipped. `origin` is used for error messages only.
    pub fn parse(text: &str, origin: &Path, base_dir: PathBuf) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let malformed = |message: &str| Error::MalformedLine {
                path: origin.into(),
                line: line_no,
                message: message.into(),
            };
            if !(2..=3).contains(&fields.len()) {
                return Err(malformed("expected path,label[,mask_path]"));
            }
            if fields[0].is_empty() {
                return Err(malformed("empty image path"));
            }
            let label = fields[1]
                .parse::<Label>()
                .map_err(|_| Error::UnknownLabel {
                    path: origin.into(),
                    line: line_no,
                    label: fields[1].into(),
                })?;
            let mask_path = match fields.get(2) {
                Some(&"") => return Err(malformed("empty mask path")),
                Some(m) => Some(PathBuf::from(m)),
                None => None,
            };
            if !seen.insert(fields[0].to_string()) {
                return Err(Error::DuplicatePath {
                    path: origin.into(),
                    line: line_no,
                    entry: fields[0].into(),
                });
            }
            entries.push(ManifestEntry {
                path: PathBuf::from(fields[0]),
                label,
                mask_path,
            });
        }
        Ok(Self { base_dir, entries })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.path.to_string_lossy());
            out.push(',');
            out.push_str(e.label.as_str());
            if let Some(m) = &e.mask_path {
                out.push(',');
                out.push_str(&m.to_string_lossy());
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::MalformedLine {
        path: path.into(),
        line: 0,
        message: "manifest is not valid UTF-8".into(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Manifest::parse(&text, path, base)
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub path: PathBuf,
    pub label: Label,
    pub image: ImageBuffer<PixelRgb>,
    pub truth_mask: Option<RuleMask>,
}

/// Decoded manifests. Entries that fail to decode are listed in `failures`
/// and left out of `items`; input order is preserved.
#[derive(Debug, Default)]
pub struct Corpus {
    pub items: Vec<CorpusItem>,
    pub failures: Vec<(PathBuf, Error)>,
}

impl Corpus {
    pub fn with_label(&self, label: Label) -> impl Iterator<Item = &CorpusItem> {
        self.items.iter().filter(move |i| i.label == label)
    }

    pub fn images(&self, label: Label) -> Vec<ImageBuffer<PixelRgb>> {
        self.with_label(label).map(|i| i.image.clone()).collect()
    }
}

/// Reads each manifest file and loads the combined corpus.
pub fn load_manifest_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Corpus> {
    let manifests = paths
        .iter()
        .map(|p| Ok((p.as_ref().to_path_buf(), load_manifest(p)?)))
        .collect::<Result<Vec<_>>>()?;
    load_corpus(&manifests)
}

/// Decodes every entry of the given manifests in parallel. Labels come from
/// the entries themselves. The same resolved path in two manifests is an error.
pub fn load_corpus(manifests: &[(PathBuf, Manifest)]) -> Result<Corpus> {
    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    for (origin, m) in manifests {
        for e in &m.entries {
            let resolved = m.resolve(&e.path);
            if !seen.insert(resolved.clone()) {
                return Err(Error::RepeatedAcrossManifests {
                    path: origin.clone(),
                    entry: e.path.to_string_lossy().into_owned(),
                });
            }
            jobs.push((
                resolved,
                e.label,
                e.mask_path.as_ref().map(|p| m.resolve(p)),
            ));
        }
    }
    let loaded: Vec<(PathBuf, Result<CorpusItem>)> = jobs
        .into_par_iter()
        .map(|(path, label, mask)| {
            let item = load_image(&path).and_then(|image| {
                let truth_mask = mask.map(|m| load_mask(m, image.dims())).transpose()?;
                Ok(CorpusItem {
                    path: path.clone(),
                    label,
                    image,
                    truth_mask,
                })
            });
            (path, item)
        })
        .collect();
    let mut corpus = Corpus::default();
    for (path, r) in loaded {
        match r {
            Ok(item) => corpus.items.push(item),
            Err(e) => corpus.failures.push((path, e)),
        }
    }
    Ok(corpus)
}
