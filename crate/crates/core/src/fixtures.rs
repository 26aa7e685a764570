//! Deterministic synthetic corpus: fire scenes with ground-truth masks and
//! fire-colored distractor scenes.
//!
//! Color ranges are chosen so that, under the default configuration, every
//! planted fire pixel passes all seven rules and no distractor pixel does.
//! Fire pixels in this corpus are never more than about a quarter of a scene,
//! which keeps them above the image means that rule 5 compares against.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::{ImageBuffer, PixelRgb};
use crate::error::{Error, Result};
use crate::io::{write_mask, write_rgb_png, Label, Manifest, ManifestEntry};
use crate::mask::RuleMask;

pub const SEED: u64 = 0x00F1_4E5E_ED00;
pub const SCENE_SIZE: usize = 64;
pub const FIRE_SCENES: usize = 12;
pub const DISTRACTOR_SCENES: usize = 12;

pub const FIRE_MANIFEST: &str = "fire.manifest";
pub const NOFIRE_MANIFEST: &str = "nofire.manifest";

/// Outer flame: gap |Cb - Cr| roughly 89 to 141.
const FLAME: Palette = Palette::new(230..=255, 120..=200, 0..=60);
/// Hot core: gap roughly 77 to 94, still above the default threshold.
const CORE: Palette = Palette::new(250..=255, 195..=207, 80..=105);

const FOREST: Palette = Palette::new(20..=80, 40..=110, 20..=70);
const SKY: Palette = Palette::new(90..=130, 140..=180, 190..=235);
const MEADOW: Palette = Palette::new(30..=90, 100..=160, 20..=60);
const DUSK: Palette = Palette::new(10..=50, 10..=40, 30..=70);

/// Sun disk: blue at or above 140 fails the RGB bounds rule.
const SUN: Palette = Palette::new(250..=255, 240..=255, 200..=240);
const SUN_GLOW: Palette = Palette::new(250..=255, 215..=235, 150..=185);
/// Red flowers: green at or below 100 fails the RGB bounds rule.
const FLOWER: Palette = Palette::new(200..=240, 20..=60, 30..=80);
/// Orange objects: green at or below 95 fails the RGB bounds rule.
const ORANGE: Palette = Palette::new(225..=250, 60..=95, 0..=40);
/// Pale sand: passes the RGB rules but its chroma gap (about 55 to 66) stays
/// under the default threshold, so it only fires at low thresholds.
const SAND: Palette = Palette::new(236..=245, 184..=195, 124..=135);

#[derive(Debug, Clone)]
struct Palette {
    r: RangeInclusive<u8>,
    g: RangeInclusive<u8>,
    b: RangeInclusive<u8>,
}

impl Palette {
    const fn new(r: RangeInclusive<u8>, g: RangeInclusive<u8>, b: RangeInclusive<u8>) -> Self {
        Self { r, g, b }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> PixelRgb {
        PixelRgb::new(
            rng.gen_range(self.r.clone()),
            rng.gen_range(self.g.clone()),
            rng.gen_range(self.b.clone()),
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Disk {
    cx: f64,
    cy: f64,
    radius: f64,
}

impl Disk {
    fn random(rng: &mut ChaCha8Rng, radius: RangeInclusive<f64>) -> Self {
        let radius = rng.gen_range(radius);
        let lo = radius;
        let hi = SCENE_SIZE as f64 - radius;
        Disk {
            cx: rng.gen_range(lo..hi),
            cy: rng.gen_range(lo..hi),
            radius,
        }
    }

    /// Normalized distance from the center; below 1 is inside.
    fn rel(&self, x: usize, y: usize) -> f64 {
        let dx = x as f64 + 0.5 - self.cx;
        let dy = y as f64 + 0.5 - self.cy;
        (dx * dx + dy * dy).sqrt() / self.radius
    }
}

fn background(rng: &mut ChaCha8Rng, palette: &Palette) -> ImageBuffer<PixelRgb> {
    ImageBuffer::from_fn(SCENE_SIZE, SCENE_SIZE, |_, _| palette.sample(rng)).expect("nonzero scene")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FireKind {
    /// Flame ring around a hot core.
    Flame,
    /// Core colors only; the whole blob sits at chroma gaps below 94.
    Glow,
}

/// A forest scene with one to three fire blobs. Returns the image and the
/// planted fire region.
pub fn fire_scene(kind: FireKind, rng: &mut ChaCha8Rng) -> (ImageBuffer<PixelRgb>, RuleMask) {
    let mut img = background(rng, &FOREST);
    let mut truth = RuleMask::empty(SCENE_SIZE, SCENE_SIZE);
    let blobs = rng.gen_range(1..=3);
    for _ in 0..blobs {
        let disk = Disk::random(rng, 4.0..=10.0);
        for y in 0..SCENE_SIZE {
            for x in 0..SCENE_SIZE {
                let d = disk.rel(x, y);
                if d < 1.0 {
                    let palette = if kind == FireKind::Glow || d < 0.45 {
                        &CORE
                    } else {
                        &FLAME
                    };
                    img.set(x, y, palette.sample(rng));
                    truth.set(x, y, true);
                }
            }
        }
    }
    (img, truth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distractor {
    Sun,
    Flowers,
    Orange,
    Sand,
}

impl Distractor {
    pub const ALL: [Distractor; 4] = [
        Distractor::Sun,
        Distractor::Flowers,
        Distractor::Orange,
        Distractor::Sand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distractor::Sun => "sun",
            Distractor::Flowers => "flowers",
            Distractor::Orange => "orange",
            Distractor::Sand => "sand",
        }
    }
}

/// A fire-free scene containing fire-colored objects of the given kind.
pub fn distractor_scene(kind: Distractor, rng: &mut ChaCha8Rng) -> ImageBuffer<PixelRgb> {
    let (bg, objects, radius, fg) = match kind {
        Distractor::Sun => (&SKY, 1, 6.0..=12.0, &SUN),
        Distractor::Flowers => (&MEADOW, 8, 2.0..=4.0, &FLOWER),
        Distractor::Orange => (&FOREST, 2, 4.0..=9.0, &ORANGE),
        Distractor::Sand => (&DUSK, 2, 4.0..=9.0, &SAND),
    };
    let mut img = background(rng, bg);
    for _ in 0..objects {
        let disk = Disk::random(rng, radius.clone());
        for y in 0..SCENE_SIZE {
            for x in 0..SCENE_SIZE {
                let d = disk.rel(x, y);
                if d < 1.0 {
                    img.set(x, y, fg.sample(rng));
                } else if kind == Distractor::Sun && d < 1.4 {
                    img.set(x, y, SUN_GLOW.sample(rng));
                }
            }
        }
    }
    img
}

/// 32x32 image on a (0, 0, 60) background with exactly `count` pixels of
/// (255, 180, 20), laid out row-major inside a 10-wide block. Each planted
/// pixel passes all seven rules for `count <= 100`; background pixels fail
/// the RGB ordering rule.
pub fn blob_fixture(count: usize) -> ImageBuffer<PixelRgb> {
    assert!(count <= 100, "blob fixture holds at most 100 pixels");
    let mut img = ImageBuffer::filled(32, 32, PixelRgb::new(0, 0, 60)).expect("nonzero");
    for i in 0..count {
        img.set(4 + i % 10, 8 + i / 10, PixelRgb::new(255, 180, 20));
    }
    img
}

#[derive(Debug, Clone)]
pub struct GeneratedCorpus {
    pub fire_manifest: PathBuf,
    pub nofire_manifest: PathBuf,
    pub files: Vec<PathBuf>,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

/// Writes the corpus under `outdir`: `fire/` scenes with `.mask.png` ground
/// truth, `nofire/` distractors, and one manifest per class. Output is
/// byte-identical across runs.
pub fn generate(outdir: impl AsRef<Path>) -> Result<GeneratedCorpus> {
    let outdir = outdir.as_ref();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut files = Vec::new();

    create_dir(&outdir.join("fire"))?;
    create_dir(&outdir.join("nofire"))?;

    let mut fire = Manifest::default();
    for i in 0..FIRE_SCENES {
        let kind = if i % 4 == 3 {
            FireKind::Glow
        } else {
            FireKind::Flame
        };
        let (img, truth) = fire_scene(kind, &mut rng);
        let name = format!("fire/fire_{i:02}.png");
        let mask = format!("fire/fire_{i:02}.mask.png");
        write_rgb_png(&img, outdir.join(&name))?;
        write_mask(&truth, outdir.join(&mask))?;
        files.extend([outdir.join(&name), outdir.join(&mask)]);
        fire.entries.push(ManifestEntry {
            path: name.into(),
            label: Label::Fire,
            mask_path: Some(mask.into()),
        });
    }

    let mut nofire = Manifest::default();
    for i in 0..DISTRACTOR_SCENES {
        let kind = Distractor::ALL[i % Distractor::ALL.len()];
        let img = distractor_scene(kind, &mut rng);
        let name = format!("nofire/{}_{i:02}.png", kind.name());
        write_rgb_png(&img, outdir.join(&name))?;
        files.push(outdir.join(&name));
        nofire.entries.push(ManifestEntry {
            path: name.into(),
            label: Label::NoFire,
            mask_path: None,
        });
    }

    let fire_manifest = outdir.join(FIRE_MANIFEST);
    let nofire_manifest = outdir.join(NOFIRE_MANIFEST);
    let header = "# synthetic fixture corpus; path,label[,mask_path]\n";
    write_text(&fire_manifest, &format!("{header}{}", fire.to_text()))?;
    write_text(&nofire_manifest, &format!("{header}{}", nofire.to_text()))?;
    files.extend([fire_manifest.clone(), nofire_manifest.clone()]);

    Ok(GeneratedCorpus {
        fire_manifest,
        nofire_manifest,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{segment, ClassifierConfig};

    #[test]
    fn fire_scenes_segment_exactly_to_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for i in 0..FIRE_SCENES * 3 {
            let kind = if i % 2 == 0 {
                FireKind::Flame
            } else {
                FireKind::Glow
            };
            let (img, truth) = fire_scene(kind, &mut rng);
            let det = segment(&img, &ClassifierConfig::default(), false).unwrap();
            assert_eq!(det.fire_mask, truth);
            assert!(det.is_fire_image);
        }
    }

    #[test]
    fn distractors_have_no_fire_pixels() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
        for round in 0..6 {
            for kind in Distractor::ALL {
                let img = distractor_scene(kind, &mut rng);
                let det = segment(&img, &ClassifierConfig::default(), false).unwrap();
                assert_eq!(det.fire_pixel_count, 0, "{} round {round}", kind.name());
            }
        }
    }

    #[test]
    fn sun_disks_violate_rgb_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            assert!(SUN.sample(&mut rng).b >= 140);
            assert!(SUN_GLOW.sample(&mut rng).b >= 140);
        }
    }

    #[test]
    fn blob_counts() {
        for n in [0, 9, 10, 100] {
            let det = segment(&blob_fixture(n), &ClassifierConfig::default(), false).unwrap();
            assert_eq!(det.fire_pixel_count, n);
        }
    }
}
