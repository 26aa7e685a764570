//! Python module `firepx`.
//!
//! Images cross the boundary as packed RGB `bytes` (row-major, 3 bytes per
//! pixel) plus width and height. Masks come back as `bytes` of 0/1 values.

use std::path::PathBuf;

use firepx::calibrate::{self, pick_threshold, sweep_roc};
use firepx::color::{ImageBuffer, PixelRgb};
use firepx::evaluate::{self, ClassStats, ErrorMatrix, EvalReport};
use firepx::io::{self, Label};
use firepx::rules::{self, Detection, RuleMask, RuleSet};
use firepx::{fixtures, Error};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

fn to_py(e: Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(name = "ClassifierConfig", module = "firepx", skip_from_py_object)]
#[derive(Clone)]
struct PyClassifierConfig {
    inner: rules::ClassifierConfig,
}

#[pymethods]
impl PyClassifierConfig {
    #[new]
    #[pyo3(signature = (
        th = 70.0, r_min = 190, g_min = 100, b_max = 140,
        cb_max = 120.0, cr_min = 150.0, min_fire_pixels = 10, rules = "1,2,3,4,5,6,7"
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        th: f64,
        r_min: u8,
        g_min: u8,
        b_max: u8,
        cb_max: f64,
        cr_min: f64,
        min_fire_pixels: usize,
        rules: &str,
    ) -> PyResult<Self> {
        let inner = rules::ClassifierConfig {
            rule2_r_min: r_min,
            rule2_g_min: g_min,
            rule2_b_max: b_max,
            rule6_th: th,
            rule7_cb_max: cb_max,
            rule7_cr_min: cr_min,
            min_fire_pixels,
            enabled_rules: rules.parse::<RuleSet>().map_err(to_py)?,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Sets one field by its config-file key, e.g. `set("th", "64")`.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        let mut next = self.inner;
        next.set(key, value).map_err(to_py)?;
        next.validate().map_err(to_py)?;
        self.inner = next;
        Ok(())
    }

    #[getter]
    fn th(&self) -> f64 {
        self.inner.rule6_th
    }

    #[getter]
    fn r_min(&self) -> u8 {
        self.inner.rule2_r_min
    }

    #[getter]
    fn g_min(&self) -> u8 {
        self.inner.rule2_g_min
    }

    #[getter]
    fn b_max(&self) -> u8 {
        self.inner.rule2_b_max
    }

    #[getter]
    fn cb_max(&self) -> f64 {
        self.inner.rule7_cb_max
    }

    #[getter]
    fn cr_min(&self) -> f64 {
        self.inner.rule7_cr_min
    }

    #[getter]
    fn min_fire_pixels(&self) -> usize {
        self.inner.min_fire_pixels
    }

    #[getter]
    fn rules(&self) -> String {
        self.inner.enabled_rules.to_string()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "ClassifierConfig(th={}, r_min={}, g_min={}, b_max={}, cb_max={}, cr_min={}, min_fire_pixels={}, rules='{}')",
            c.rule6_th,
            c.rule2_r_min,
            c.rule2_g_min,
            c.rule2_b_max,
            c.rule7_cb_max,
            c.rule7_cr_min,
            c.min_fire_pixels,
            c.enabled_rules
        )
    }
}

fn config_of(cfg: Option<PyRef<'_, PyClassifierConfig>>) -> rules::ClassifierConfig {
    cfg.map(|c| c.inner).unwrap_or_default()
}

fn mask_bytes(m: &RuleMask) -> Vec<u8> {
    m.bits().iter().map(|&b| u8::from(b)).collect()
}

#[pyclass(name = "Detection", module = "firepx", frozen)]
struct PyDetection {
    inner: Detection,
}

#[pymethods]
impl PyDetection {
    #[getter]
    fn fire_pixel_count(&self) -> usize {
        self.inner.fire_pixel_count
    }

    #[getter]
    fn is_fire_image(&self) -> bool {
        self.inner.is_fire_image
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.fire_mask.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.fire_mask.height()
    }

    /// Row-major 0/1 bytes, one per pixel.
    #[getter]
    fn fire_mask<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &mask_bytes(&self.inner.fire_mask))
    }

    /// `{rule_number: mask_bytes}` when segmented with `per_rule=True`.
    #[getter]
    fn per_rule_masks<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let Some(masks) = &self.inner.per_rule_masks else {
            return Ok(None);
        };
        let d = PyDict::new(py);
        for (rule, mask) in masks {
            d.set_item(rule.number(), PyBytes::new(py, &mask_bytes(mask)))?;
        }
        Ok(Some(d))
    }

    fn __repr__(&self) -> String {
        format!(
            "Detection(fire_pixel_count={}, is_fire_image={})",
            self.inner.fire_pixel_count,
            if self.inner.is_fire_image {
                "True"
            } else {
                "False"
            }
        )
    }
}

fn image_from_bytes(data: &[u8], width: usize, height: usize) -> PyResult<ImageBuffer<PixelRgb>> {
    let expected = width.checked_mul(height).and_then(|n| n.checked_mul(3));
    if expected != Some(data.len()) {
        return Err(PyValueError::new_err(format!(
            "expected {width}x{height}x3 bytes, got {}",
            data.len()
        )));
    }
    let pixels = data
        .chunks_exact(3)
        .map(|c| PixelRgb::new(c[0], c[1], c[2]))
        .collect();
    ImageBuffer::new(width, height, pixels).map_err(to_py)
}

/// `(y, cb, cr)` for one RGB pixel.
#[pyfunction]
fn rgb_to_ycbcr(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let p = firepx::rgb_to_ycbcr(PixelRgb::new(r, g, b));
    (p.y, p.cb, p.cr)
}

#[pyfunction]
#[pyo3(signature = (data, width, height, config = None, per_rule = false))]
fn segment(
    py: Python<'_>,
    data: &[u8],
    width: usize,
    height: usize,
    config: Option<PyRef<'_, PyClassifierConfig>>,
    per_rule: bool,
) -> PyResult<PyDetection> {
    let img = image_from_bytes(data, width, height)?;
    let cfg = config_of(config);
    let inner = py
        .detach(|| rules::segment(&img, &cfg, per_rule))
        .map_err(to_py)?;
    Ok(PyDetection { inner })
}

#[pyfunction]
#[pyo3(signature = (path, config = None, per_rule = false))]
fn segment_file(
    py: Python<'_>,
    path: PathBuf,
    config: Option<PyRef<'_, PyClassifierConfig>>,
    per_rule: bool,
) -> PyResult<PyDetection> {
    let cfg = config_of(config);
    let inner = py
        .detach(|| io::load_image(&path).and_then(|img| rules::segment(&img, &cfg, per_rule)))
        .map_err(to_py)?;
    Ok(PyDetection { inner })
}

/// Decodes a PNG or JPEG into `(rgb_bytes, width, height)`.
#[pyfunction]
fn load_image<'py>(
    py: Python<'py>,
    path: PathBuf,
) -> PyResult<(Bound<'py, PyBytes>, usize, usize)> {
    let img = py.detach(|| io::load_image(&path)).map_err(to_py)?;
    let bytes: Vec<u8> = img.pixels().iter().flat_map(|p| [p.r, p.g, p.b]).collect();
    Ok((PyBytes::new(py, &bytes), img.width(), img.height()))
}

fn stats_dict<'py>(py: Python<'py>, s: &ClassStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("omission_error", s.omission_error)?;
    d.set_item("commission_error", s.commission_error)?;
    d.set_item("user_accuracy", s.user_accuracy)?;
    d.set_item("producer_accuracy", s.producer_accuracy)?;
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, r: &EvalReport) -> PyResult<Bound<'py, PyDict>> {
    let m = &r.matrix;
    let d = PyDict::new(py);
    d.set_item("matrix", (m.a, m.b, m.c, m.d))?;
    d.set_item("fire", stats_dict(py, &r.fire)?)?;
    d.set_item("nofire", stats_dict(py, &r.nofire)?)?;
    d.set_item("overall_accuracy", r.overall_accuracy)?;
    d.set_item("kappa", r.kappa)?;
    d.set_item(
        "kappa_quality",
        r.kappa.map(|k| evaluate::kappa_quality(k).as_str()),
    )?;
    Ok(d)
}

/// Accuracy report for the error matrix `(a, b, c, d)`: rows are the
/// classified label, columns the actual label. Percentages; undefined
/// statistics are `None`.
#[pyfunction]
fn derive_report<'py>(
    py: Python<'py>,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = evaluate::derive_report(&ErrorMatrix::new(a, b, c, d)).map_err(to_py)?;
    report_dict(py, &r)
}

#[pyfunction]
fn kappa_quality(k: f64) -> &'static str {
    evaluate::kappa_quality(k).as_str()
}

/// Threshold sweep over labeled manifests. Returns the curve as
/// `[(th, tpr, fpr), ...]` and the chosen operating point.
#[pyfunction]
#[pyo3(name = "calibrate", signature = (
    manifests, th_min = 1, th_max = 100,
    tpr_min = calibrate::DEFAULT_TPR_MIN, fpr_max = calibrate::DEFAULT_FPR_MAX, config = None
))]
fn calibrate_manifests<'py>(
    py: Python<'py>,
    manifests: Vec<PathBuf>,
    th_min: u32,
    th_max: u32,
    tpr_min: f64,
    fpr_max: f64,
    config: Option<PyRef<'_, PyClassifierConfig>>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_of(config);
    let (curve, choice, excluded) = py
        .detach(|| {
            let corpus = io::load_manifest_corpus(&manifests)?;
            let curve = sweep_roc(
                &corpus.images(Label::Fire),
                &corpus.images(Label::NoFire),
                &cfg,
                th_min..=th_max,
            )?;
            let choice = pick_threshold(&curve, tpr_min, fpr_max)?;
            Ok((curve, choice, corpus.failures.len()))
        })
        .map_err(to_py)?;
    let d = PyDict::new(py);
    let points: Vec<(u32, f64, f64)> = curve
        .points()
        .iter()
        .map(|p| (p.th, p.tpr, p.fpr))
        .collect();
    d.set_item("points", points)?;
    d.set_item("th", choice.th)?;
    d.set_item("tpr", choice.point.tpr)?;
    d.set_item("fpr", choice.point.fpr)?;
    d.set_item("meets_targets", choice.meets_targets)?;
    d.set_item("excluded_images", excluded)?;
    Ok(d)
}

/// Error matrix and accuracy report over labeled manifests.
#[pyfunction]
#[pyo3(name = "evaluate", signature = (manifests, config = None))]
fn evaluate_manifests<'py>(
    py: Python<'py>,
    manifests: Vec<PathBuf>,
    config: Option<PyRef<'_, PyClassifierConfig>>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_of(config);
    let (result, excluded) = py
        .detach(|| {
            let corpus = io::load_manifest_corpus(&manifests)?;
            Ok((
                evaluate::evaluate_corpus(&corpus, &cfg)?,
                corpus.failures.len(),
            ))
        })
        .map_err(to_py)?;
    let d = report_dict(py, &result.report)?;
    d.set_item("excluded_images", excluded)?;
    d.set_item("pixel_iou_mean", result.pixel_iou)?;
    Ok(d)
}

/// Writes the synthetic fixture corpus; returns `(fire_manifest, nofire_manifest)`.
#[pyfunction]
fn make_fixtures(py: Python<'_>, outdir: PathBuf) -> PyResult<(PathBuf, PathBuf)> {
    let c = py.detach(|| fixtures::generate(&outdir)).map_err(to_py)?;
    Ok((c.fire_manifest, c.nofire_manifest))
}

#[pymodule(name = "firepx")]
fn firepx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyClassifierConfig>()?;
    m.add_class::<PyDetection>()?;
    m.add_function(wrap_pyfunction!(rgb_to_ycbcr, m)?)?;
    m.add_function(wrap_pyfunction!(segment, m)?)?;
    m.add_function(wrap_pyfunction!(segment_file, m)?)?;
    m.add_function(wrap_pyfunction!(load_image, m)?)?;
    m.add_function(wrap_pyfunction!(derive_report, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_quality, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_manifests, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_manifests, m)?)?;
    m.add_function(wrap_pyfunction!(make_fixtures, m)?)?;
    Ok(())
}
