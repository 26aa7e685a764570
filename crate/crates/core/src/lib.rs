//! Rule-based fire-pixel segmentation over RGB and YCbCr, with ROC calibration
//! of the chroma-gap threshold and image-level error-matrix evaluation.

pub mod calibrate;
pub mod cli;
pub mod color;
pub mod error;
pub mod evaluate;
pub mod fixtures;
pub mod io;
mod mask;
pub mod rules;

pub use calibrate::{pick_threshold, sweep_roc, RocCurve, RocPoint, ThresholdChoice};
pub use color::{
    channel_means, convert_image, region_histogram, region_stats, rgb_to_ycbcr, Channel,
    ChannelMeans, ImageBuffer, PixelRgb, PixelYCbCr,
};
pub use error::{Error, Result};
pub use evaluate::{
    build_matrix, derive_report, kappa_quality, ErrorMatrix, EvalReport, KappaGrade,
};
pub use rules::{classify_pixel, segment, ClassifierConfig, Detection, Rule, RuleMask, RuleSet};
