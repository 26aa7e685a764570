//! The seven fire-pixel rules, their conjunction, and the image-level verdict.
//!
//! Rules 1 and 2 compare integer RGB with strict inequalities. Rules 3 to 7
//! work on unrounded YCbCr and are inclusive. Rule 5 compares against the
//! image-wide channel means, so segmentation is a two-pass operation: means
//! first, then the per-pixel conjunction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::color::{convert_image, ChannelMeans, ImageBuffer, PixelRgb, PixelYCbCr};
use crate::error::{Error, Result};
pub use crate::mask::RuleMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// R > G > B
    RgbOrder,
    /// R > r_min, G > g_min, B < b_max
    RgbBounds,
    /// Y >= Cb
    LumaOverBlue,
    /// Cr >= Cb
    RedOverBlue,
    /// Y >= mean Y, Cb <= mean Cb, Cr >= mean Cr
    AboveImageMean,
    /// |Cb - Cr| >= Th
    ChromaGap,
    /// Cb <= cb_max, Cr >= cr_min
    ChromaBounds,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::RgbOrder,
        Rule::RgbBounds,
        Rule::LumaOverBlue,
        Rule::RedOverBlue,
        Rule::AboveImageMean,
        Rule::ChromaGap,
        Rule::ChromaBounds,
    ];

    /// 1-based rule number.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Rule> {
        Rule::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn eval(
        self,
        rgb: PixelRgb,
        ycc: PixelYCbCr,
        means: &ChannelMeans,
        cfg: &ClassifierConfig,
    ) -> bool {
        match self {
            Rule::RgbOrder => rule1(rgb),
            Rule::RgbBounds => rule2(rgb, cfg),
            Rule::LumaOverBlue => rule3(ycc),
            Rule::RedOverBlue => rule4(ycc),
            Rule::AboveImageMean => rule5(ycc, means),
            Rule::ChromaGap => rule6(ycc, cfg),
            Rule::ChromaBounds => rule7(ycc, cfg),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule{}", self.number())
    }
}

/// Subset of the seven rules, stored as a bit set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet(u8);

impl RuleSet {
    pub const ALL: RuleSet = RuleSet(0b111_1111);
    pub const EMPTY: RuleSet = RuleSet(0);

    pub fn only(rules: &[Rule]) -> RuleSet {
        rules.iter().fold(RuleSet::EMPTY, |s, &r| s.with(r))
    }

    pub fn contains(self, r: Rule) -> bool {
        self.0 & (1 << r as u8) != 0
    }

    pub fn with(self, r: Rule) -> RuleSet {
        RuleSet(self.0 | (1 << r as u8))
    }

    pub fn without(self, r: Rule) -> RuleSet {
        RuleSet(self.0 & !(1 << r as u8))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Enabled rules in evaluation order (1 to 7).
    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |&r| self.contains(r))
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::ALL
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nums: Vec<String> = self.iter().map(|r| r.number().to_string()).collect();
        f.write_str(&nums.join(","))
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    /// Parses a comma-separated list of rule numbers, e.g. `1,2,6`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = RuleSet::EMPTY;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let rule = part
                .parse::<u8>()
                .ok()
                .and_then(Rule::from_number)
                .ok_or_else(|| Error::Config(format!("invalid rule number '{part}'")))?;
            set = set.with(rule);
        }
        if set.is_empty() {
            return Err(Error::Config("rule set is empty".into()));
        }
        Ok(set)
    }
}

/// Every tunable constant of the classifier. `Default` is the published
/// configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub rule2_r_min: u8,
    pub rule2_g_min: u8,
    pub rule2_b_max: u8,
    pub rule6_th: f64,
    pub rule7_cb_max: f64,
    pub rule7_cr_min: f64,
    pub min_fire_pixels: usize,
    pub enabled_rules: RuleSet,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            rule2_r_min: 190,
            rule2_g_min: 100,
            rule2_b_max: 140,
            rule6_th: 70.0,
            rule7_cb_max: 120.0,
            rule7_cr_min: 150.0,
            min_fire_pixels: 10,
            enabled_rules: RuleSet::ALL,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rule6_th", self.rule6_th),
            ("rule7_cb_max", self.rule7_cb_max),
            ("rule7_cr_min", self.rule7_cr_min),
        ] {
            if !(0.0..=255.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 255]")));
            }
        }
        if self.min_fire_pixels < 1 {
            return Err(Error::Config("min_fire_pixels must be at least 1".into()));
        }
        if self.enabled_rules.is_empty() {
            return Err(Error::Config("no rules enabled".into()));
        }
        Ok(())
    }

    /// Sets one field from a `key=value` pair (config files and bindings).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn fmt::Display| Error::Config(format!("{key}: {e}"));
        let value = value.trim();
        match key.trim() {
            "th" | "rule6_th" => self.rule6_th = value.parse().map_err(|e| bad(&e))?,
            "r_min" | "rule2_r_min" => self.rule2_r_min = value.parse().map_err(|e| bad(&e))?,
            "g_min" | "rule2_g_min" => self.rule2_g_min = value.parse().map_err(|e| bad(&e))?,
            "b_max" | "rule2_b_max" => self.rule2_b_max = value.parse().map_err(|e| bad(&e))?,
            "cb_max" | "rule7_cb_max" => self.rule7_cb_max = value.parse().map_err(|e| bad(&e))?,
            "cr_min" | "rule7_cr_min" => self.rule7_cr_min = value.parse().map_err(|e| bad(&e))?,
            "min_fire_pixels" => self.min_fire_pixels = value.parse().map_err(|e| bad(&e))?,
            "rules" | "enabled_rules" => self.enabled_rules = value.parse()?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

pub fn rule1(p: PixelRgb) -> bool {
    p.r > p.g && p.g > p.b
}

pub fn rule2(p: PixelRgb, cfg: &ClassifierConfig) -> bool {
    p.r > cfg.rule2_r_min && p.g > cfg.rule2_g_min && p.b < cfg.rule2_b_max
}

pub fn rule3(p: PixelYCbCr) -> bool {
    p.y >= p.cb
}

pub fn rule4(p: PixelYCbCr) -> bool {
    p.cr >= p.cb
}

pub fn rule5(p: PixelYCbCr, means: &ChannelMeans) -> bool {
    p.y >= means.y_mean && p.cb <= means.cb_mean && p.cr >= means.cr_mean
}

pub fn rule6(p: PixelYCbCr, cfg: &ClassifierConfig) -> bool {
    (p.cb - p.cr).abs() >= cfg.rule6_th
}

pub fn rule7(p: PixelYCbCr, cfg: &ClassifierConfig) -> bool {
    p.cb <= cfg.rule7_cb_max && p.cr >= cfg.rule7_cr_min
}

/// Conjunction of the enabled rules, evaluated 1 to 7 with early exit.
pub fn classify_pixel(
    rgb: PixelRgb,
    ycc: PixelYCbCr,
    means: &ChannelMeans,
    cfg: &ClassifierConfig,
) -> bool {
    cfg.enabled_rules
        .iter()
        .all(|r| r.eval(rgb, ycc, means, cfg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub fire_mask: RuleMask,
    pub fire_pixel_count: usize,
    pub is_fire_image: bool,
    /// One mask per rule (all seven), filled only when requested.
    pub per_rule_masks: Option<BTreeMap<Rule, RuleMask>>,
}

/// Segments fire pixels and applies the image-level decision.
pub fn segment(
    img: &ImageBuffer<PixelRgb>,
    cfg: &ClassifierConfig,
    emit_per_rule: bool,
) -> Result<Detection> {
    cfg.validate()?;
    let means = ChannelMeans::from_rgb(img)?;
    let ycc = convert_image(img);
    let (w, h) = img.dims();

    let bits: Vec<bool> = img
        .pixels()
        .par_iter()
        .zip(ycc.pixels().par_iter())
        .map(|(&rgb, &y)| classify_pixel(rgb, y, &means, cfg))
        .collect();
    let fire_mask = RuleMask::new(w, h, bits)?;

    let per_rule_masks = if emit_per_rule {
        let mut map = BTreeMap::new();
        for rule in Rule::ALL {
            let bits: Vec<bool> = img
                .pixels()
                .par_iter()
                .zip(ycc.pixels().par_iter())
                .map(|(&rgb, &y)| rule.eval(rgb, y, &means, cfg))
                .collect();
            map.insert(rule, RuleMask::new(w, h, bits)?);
        }
        Some(map)
    } else {
        None
    };

    let fire_pixel_count = fire_mask.count();
    Ok(Detection {
        is_fire_image: fire_pixel_count >= cfg.min_fire_pixels,
        fire_mask,
        fire_pixel_count,
        per_rule_masks,
    })
}
