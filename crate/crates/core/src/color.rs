//! Pixel types, the studio-swing RGB to YCbCr transform, and channel statistics.
//!
//! The transform uses four-decimal BT.601 coefficients. They are stored scaled
//! by 10^4 so that the affine map is evaluated exactly in integers and rounded
//! once on the final division. Equal inputs along any channel combination then
//! produce bit-equal outputs (grey pixels give Cb == Cr == 128 exactly), which
//! keeps the inclusive chroma comparisons of the rules stable.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::RuleMask;

/// Conversion matrix rows (Y, Cb, Cr) applied to (R, G, B).
pub const YCBCR_MATRIX: [[f64; 3]; 3] = [
    [0.2568, 0.5041, 0.0979],
    [-0.1482, -0.2910, 0.4392],
    [0.4392, -0.3678, -0.0714],
];

pub const YCBCR_OFFSET: [f64; 3] = [16.0, 128.0, 128.0];

const SCALE: i64 = 10_000;

const MATRIX_E4: [[i64; 3]; 3] = [[2568, 5041, 979], [-1482, -2910, 4392], [4392, -3678, -714]];

const OFFSET_E4: [i64; 3] = [160_000, 1_280_000, 1_280_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PixelRgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl PixelRgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub const GREEN: PixelRgb = PixelRgb::new(0, 255, 0);
}

impl From<[u8; 3]> for PixelRgb {
    fn from([r, g, b]: [u8; 3]) -> Self {
        Self { r, g, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelYCbCr {
    pub y: f64,
    pub cb: f64,
    pub cr: f64,
}

impl PixelYCbCr {
    pub const fn new(y: f64, cb: f64, cr: f64) -> Self {
        Self { y, cb, cr }
    }
}

/// Row-major raster. `width` is the column count N, `height` the row count M.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

impl<P> ImageBuffer<P> {
    pub fn new(width: usize, height: usize, pixels: Vec<P>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::InvalidDimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> P,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false for a constructed buffer; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [P] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<P> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> &P {
        &self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, p: P) {
        self.pixels[y * self.width + x] = p;
    }
}

impl<P: Clone> ImageBuffer<P> {
    pub fn filled(width: usize, height: usize, p: P) -> Result<Self> {
        Self::new(width, height, vec![p; width.saturating_mul(height)])
    }
}

/// Converts one pixel. Output stays real-valued; no rounding or clamping.
pub fn rgb_to_ycbcr(p: PixelRgb) -> PixelYCbCr {
    let rgb = [i64::from(p.r), i64::from(p.g), i64::from(p.b)];
    let row = |k: usize| {
        let m = MATRIX_E4[k];
        let num = m[0] * rgb[0] + m[1] * rgb[1] + m[2] * rgb[2] + OFFSET_E4[k];
        num as f64 / SCALE as f64
    };
    PixelYCbCr {
        y: row(0),
        cb: row(1),
        cr: row(2),
    }
}

pub fn convert_image(img: &ImageBuffer<PixelRgb>) -> ImageBuffer<PixelYCbCr> {
    let pixels = img.pixels.par_iter().map(|&p| rgb_to_ycbcr(p)).collect();
    ImageBuffer {
        width: img.width,
        height: img.height,
        pixels,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelMeans {
    pub y_mean: f64,
    pub cb_mean: f64,
    pub cr_mean: f64,
}

impl ChannelMeans {
    /// Image-wide YCbCr means computed straight from the RGB raster.
    ///
    /// The transform is affine, so the mean of the converted channels equals
    /// the transform of the summed RGB numerators. Sums are exact integers and
    /// each mean is rounded once, so a pixel equal to the mean compares equal.
    pub fn from_rgb(img: &ImageBuffer<PixelRgb>) -> Result<Self> {
        if img.is_empty() {
            return Err(Error::EmptyImage);
        }
        let mut sums = [0i64; 3];
        for p in &img.pixels {
            sums[0] += i64::from(p.r);
            sums[1] += i64::from(p.g);
            sums[2] += i64::from(p.b);
        }
        let n = img.pixels.len() as i64;
        let row = |k: usize| {
            let m = MATRIX_E4[k];
            let num = m[0] * sums[0] + m[1] * sums[1] + m[2] * sums[2] + OFFSET_E4[k] * n;
            num as f64 / (n * SCALE) as f64
        };
        Ok(Self {
            y_mean: row(0),
            cb_mean: row(1),
            cr_mean: row(2),
        })
    }
}

/// Arithmetic means of Y, Cb and Cr over every pixel.
pub fn channel_means(img: &ImageBuffer<PixelYCbCr>) -> Result<ChannelMeans> {
    if img.is_empty() {
        return Err(Error::EmptyImage);
    }
    let [y_mean, cb_mean, cr_mean] = masked_mean(img.pixels.iter())?;
    Ok(ChannelMeans {
        y_mean,
        cb_mean,
        cr_mean,
    })
}

// Mean as pivot + mean deviation from the first sample: exact for constant
// input and well-conditioned otherwise.
fn masked_mean<'a, P: PixelChannels + 'a>(mut it: impl Iterator<Item = &'a P>) -> Result<[f64; 3]> {
    let pivot = it.next().ok_or(Error::EmptyRegion)?.native();
    let mut dev = [0.0f64; 3];
    let mut n = 1usize;
    for p in it {
        let v = p.native();
        for k in 0..3 {
            dev[k] += v[k] - pivot[k];
        }
        n += 1;
    }
    Ok(std::array::from_fn(|k| pivot[k] + dev[k] / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    R,
    G,
    B,
    Y,
    Cb,
    Cr,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::R,
        Channel::G,
        Channel::B,
        Channel::Y,
        Channel::Cb,
        Channel::Cr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
            Channel::Y => "Y",
            Channel::Cb => "Cb",
            Channel::Cr => "Cr",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown channel '{s}'")))
    }
}

/// Uniform channel access over both pixel representations.
pub trait PixelChannels {
    /// The pixel's own three channels as reals (R,G,B or Y,Cb,Cr).
    fn native(&self) -> [f64; 3];
    fn channel(&self, c: Channel) -> Option<f64>;
}

impl PixelChannels for PixelRgb {
    fn native(&self) -> [f64; 3] {
        [f64::from(self.r), f64::from(self.g), f64::from(self.b)]
    }

    fn channel(&self, c: Channel) -> Option<f64> {
        Some(match c {
            Channel::R => f64::from(self.r),
            Channel::G => f64::from(self.g),
            Channel::B => f64::from(self.b),
            Channel::Y => rgb_to_ycbcr(*self).y,
            Channel::Cb => rgb_to_ycbcr(*self).cb,
            Channel::Cr => rgb_to_ycbcr(*self).cr,
        })
    }
}

impl PixelChannels for PixelYCbCr {
    fn native(&self) -> [f64; 3] {
        [self.y, self.cb, self.cr]
    }

    fn channel(&self, c: Channel) -> Option<f64> {
        match c {
            Channel::Y => Some(self.y),
            Channel::Cb => Some(self.cb),
            Channel::Cr => Some(self.cr),
            _ => None,
        }
    }
}

/// Per-channel mean of the pixel's native channels over the masked region.
pub fn region_stats<P: PixelChannels>(img: &ImageBuffer<P>, mask: &RuleMask) -> Result<[f64; 3]> {
    mask.check_dims(img.dims())?;
    masked_mean(
        img.pixels
            .iter()
            .zip(mask.bits())
            .filter_map(|(p, &on)| on.then_some(p)),
    )
}

/// 256-bin histogram of one channel over the masked region. Real values are
/// rounded to the nearest integer and clamped to [0, 255]. An empty mask gives
/// an all-zero histogram.
pub fn region_histogram<P: PixelChannels>(
    img: &ImageBuffer<P>,
    mask: &RuleMask,
    channel: Channel,
) -> Result<[u64; 256]> {
    mask.check_dims(img.dims())?;
    let mut bins = [0u64; 256];
    for (p, &on) in img.pixels.iter().zip(mask.bits()) {
        if !on {
            continue;
        }
        let v = p
            .channel(channel)
            .ok_or(Error::ChannelUnavailable(channel.name()))?;
        bins[v.round().clamp(0.0, 255.0) as usize] += 1;
    }
    Ok(bins)
}
