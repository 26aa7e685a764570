//! ROC sweep over the chroma-gap threshold and operating-point selection.
//!
//! Calibration runs rules 1 to 5 plus the thresholded chroma-gap rule; the
//! chroma-bounds rule is left out of the sweep pipeline. An image counts as
//! positive under the same `min_fire_pixels` decision used by detection.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{rgb_to_ycbcr, ChannelMeans, ImageBuffer, PixelRgb};
use crate::error::{Error, Result};
use crate::rules::{ClassifierConfig, Rule};

pub const DEFAULT_TH_RANGE: RangeInclusive<u32> = 1..=100;
pub const DEFAULT_TPR_MIN: f64 = 0.95;
pub const DEFAULT_FPR_MAX: f64 = 0.30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub th: u32,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    points: Vec<RocPoint>,
}

impl RocCurve {
    /// Builds a curve from points in any order. Points are sorted by `th`;
    /// duplicate thresholds, rates outside [0, 1] and rates that rise with
    /// `th` are rejected.
    pub fn new(mut points: Vec<RocPoint>) -> Result<Self> {
        points.sort_by_key(|p| p.th);
        for p in &points {
            if !(0.0..=1.0).contains(&p.tpr) || !(0.0..=1.0).contains(&p.fpr) {
                return Err(Error::InvalidCurve(format!(
                    "rates out of range at th={}",
                    p.th
                )));
            }
        }
        for w in points.windows(2) {
            if w[0].th == w[1].th {
                return Err(Error::InvalidCurve(format!("duplicate th={}", w[0].th)));
            }
            if w[1].tpr > w[0].tpr || w[1].fpr > w[0].fpr {
                return Err(Error::InvalidCurve(format!(
                    "rates increase between th={} and th={}",
                    w[0].th, w[1].th
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, th: u32) -> Option<&RocPoint> {
        self.points
            .binary_search_by_key(&th, |p| p.th)
            .ok()
            .map(|i| &self.points[i])
    }

    /// Tab-separated table with a `th\ttpr\tfpr` header row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("th\ttpr\tfpr\n");
        for p in &self.points {
            let _ = writeln!(out, "{}\t{}\t{}", p.th, p.tpr, p.fpr);
        }
        out
    }
}

/// The configuration actually used during a sweep: chroma bounds off, chroma
/// gap on, everything else from `base`.
pub fn sweep_config(base: &ClassifierConfig) -> ClassifierConfig {
    ClassifierConfig {
        enabled_rules: base
            .enabled_rules
            .without(Rule::ChromaBounds)
            .with(Rule::ChromaGap),
        ..*base
    }
}

/// Largest threshold at which the image is still declared fire, i.e. the
/// `min_fire_pixels`-th largest chroma gap among pixels passing every other
/// sweep rule. `None` if too few pixels pass at all.
fn detection_ceiling(img: &ImageBuffer<PixelRgb>, cfg: &ClassifierConfig) -> Result<Option<f64>> {
    let means = ChannelMeans::from_rgb(img)?;
    let rules: Vec<Rule> = cfg
        .enabled_rules
        .iter()
        .filter(|&r| r != Rule::ChromaGap)
        .collect();
    let mut gaps: Vec<f64> = img
        .pixels()
        .iter()
        .filter_map(|&rgb| {
            let ycc = rgb_to_ycbcr(rgb);
            rules
                .iter()
                .all(|r| r.eval(rgb, ycc, &means, cfg))
                .then(|| (ycc.cb - ycc.cr).abs())
        })
        .collect();
    let k = cfg.min_fire_pixels;
    if gaps.len() < k {
        return Ok(None);
    }
    gaps.sort_by(|a, b| b.total_cmp(a));
    Ok(Some(gaps[k - 1]))
}

fn ceilings(images: &[ImageBuffer<PixelRgb>], cfg: &ClassifierConfig) -> Result<Vec<Option<f64>>> {
    images
        .par_iter()
        .map(|img| detection_ceiling(img, cfg))
        .collect()
}

fn positive_rate(ceilings: &[Option<f64>], th: f64) -> f64 {
    let hits = ceilings
        .iter()
        .filter(|c| c.is_some_and(|g| g >= th))
        .count();
    hits as f64 / ceilings.len() as f64
}

/// Sweeps the chroma-gap threshold over `th_range` and records, per value, the
/// fraction of fire images and of no-fire images declared fire.
pub fn sweep_roc(
    fire_set: &[ImageBuffer<PixelRgb>],
    nofire_set: &[ImageBuffer<PixelRgb>],
    base: &ClassifierConfig,
    th_range: RangeInclusive<u32>,
) -> Result<RocCurve> {
    if fire_set.is_empty() {
        return Err(Error::EmptySet("fire"));
    }
    if nofire_set.is_empty() {
        return Err(Error::EmptySet("no-fire"));
    }
    if th_range.is_empty() || *th_range.end() > 255 {
        return Err(Error::Config(format!(
            "threshold range {}..={} must be non-empty and within [0, 255]",
            th_range.start(),
            th_range.end()
        )));
    }
    let cfg = sweep_config(base);
    cfg.validate()?;

    let fire = ceilings(fire_set, &cfg)?;
    let nofire = ceilings(nofire_set, &cfg)?;
    let points = th_range
        .map(|th| RocPoint {
            th,
            tpr: positive_rate(&fire, f64::from(th)),
            fpr: positive_rate(&nofire, f64::from(th)),
        })
        .collect();
    RocCurve::new(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub th: u32,
    pub point: RocPoint,
    /// False when no point met both targets and the choice fell back to the
    /// point maximizing `tpr - fpr`.
    pub meets_targets: bool,
}

/// Picks the largest `th` with `tpr >= tpr_min` and `fpr < fpr_max`. Without
/// such a point, falls back to the maximum of `tpr - fpr` (largest `th` on
/// ties) and clears `meets_targets`.
pub fn pick_threshold(curve: &RocCurve, tpr_min: f64, fpr_max: f64) -> Result<ThresholdChoice> {
    let points = curve.points();
    if points.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let qualifying = points
        .iter()
        .filter(|p| p.tpr >= tpr_min && p.fpr < fpr_max)
        .max_by_key(|p| p.th);
    if let Some(p) = qualifying {
        return Ok(ThresholdChoice {
            th: p.th,
            point: *p,
            meets_targets: true,
        });
    }
    // Rates are small fractions; differences within rounding noise are ties.
    const TIE: f64 = 1e-12;
    let score = |p: &RocPoint| p.tpr - p.fpr;
    let top = points.iter().map(score).fold(f64::NEG_INFINITY, f64::max);
    let best = points
        .iter()
        .filter(|p| score(p) >= top - TIE)
        .max_by_key(|p| p.th)
        .expect("non-empty");
    Ok(ThresholdChoice {
        th: best.th,
        point: *best,
        meets_targets: false,
    })
}
