//! Image-level error matrix and the accuracy statistics derived from it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{Corpus, Label};
use crate::mask::RuleMask;
use crate::rules::{segment, ClassifierConfig, Detection};

/// 2x2 classification error matrix. Rows are the classified label, columns
/// the reference label.
///
/// ```text
///                 actual fire   actual no-fire
/// classified fire      a              b          r1
/// classified no-fire   c              d          r2
///                      c1             c2         total
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ErrorMatrix {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ErrorMatrix {
    pub const fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }

    pub fn r1(&self) -> u64 {
        self.a + self.b
    }

    pub fn r2(&self) -> u64 {
        self.c + self.d
    }

    pub fn c1(&self) -> u64 {
        self.a + self.c
    }

    pub fn c2(&self) -> u64 {
        self.b + self.d
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn record(&mut self, actual_fire: bool, classified_fire: bool) {
        match (classified_fire, actual_fire) {
            (true, true) => self.a += 1,
            (true, false) => self.b += 1,
            (false, true) => self.c += 1,
            (false, false) => self.d += 1,
        }
    }
}

/// Tallies per-image verdicts of the fire set and the no-fire set.
pub fn build_matrix(
    fire_verdicts: impl IntoIterator<Item = bool>,
    nofire_verdicts: impl IntoIterator<Item = bool>,
) -> ErrorMatrix {
    let mut m = ErrorMatrix::default();
    fire_verdicts.into_iter().for_each(|v| m.record(true, v));
    nofire_verdicts.into_iter().for_each(|v| m.record(false, v));
    m
}

/// Per-class statistics in percent. `None` marks an undefined ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub omission_error: Option<f64>,
    pub commission_error: Option<f64>,
    pub user_accuracy: Option<f64>,
    pub producer_accuracy: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub matrix: ErrorMatrix,
    pub fire: ClassStats,
    pub nofire: ClassStats,
    pub overall_accuracy: Option<f64>,
    pub kappa: Option<f64>,
}

fn pct(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn class_stats(hit: u64, row: u64, col: u64) -> ClassStats {
    ClassStats {
        omission_error: pct(col - hit, col),
        commission_error: pct(row - hit, row),
        user_accuracy: pct(hit, row),
        producer_accuracy: pct(hit, col),
    }
}

/// Cohen's kappa with marginal-product chance agreement. Undefined for an
/// empty matrix or when chance agreement is 1.
pub fn kappa(m: &ErrorMatrix) -> Option<f64> {
    let t = m.total();
    if t == 0 {
        return None;
    }
    // Integer numerators keep the degenerate check exact.
    let t = u128::from(t);
    let diag = u128::from(m.a + m.d);
    let chance = u128::from(m.r1()) * u128::from(m.c1()) + u128::from(m.r2()) * u128::from(m.c2());
    let tt = t * t;
    if chance == tt {
        return None;
    }
    let num = (diag * t) as f64 - chance as f64;
    let den = tt as f64 - chance as f64;
    Some(num / den)
}

pub fn derive_report(m: &ErrorMatrix) -> Result<EvalReport> {
    if m.total() == 0 {
        return Err(Error::EmptySet("evaluation"));
    }
    Ok(EvalReport {
        matrix: *m,
        fire: class_stats(m.a, m.r1(), m.c1()),
        nofire: class_stats(m.d, m.r2(), m.c2()),
        overall_accuracy: pct(m.a + m.d, m.total()),
        kappa: kappa(m),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaGrade {
    Good,
    NotGood,
}

impl KappaGrade {
    pub fn as_str(self) -> &'static str {
        match self {
            KappaGrade::Good => "good",
            KappaGrade::NotGood => "not good",
        }
    }
}

/// Strictly above 0.75 is graded good.
pub fn kappa_quality(k: f64) -> KappaGrade {
    if k > 0.75 {
        KappaGrade::Good
    } else {
        KappaGrade::NotGood
    }
}

/// Mean pixel IoU between predicted and reference masks. Not part of the
/// image-level methodology; reported as an extra.
pub fn mean_pixel_iou<'a>(
    pairs: impl IntoIterator<Item = (&'a RuleMask, &'a RuleMask)>,
) -> Result<Option<f64>> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for (pred, truth) in pairs {
        if let Some(v) = pred.iou(truth)? {
            sum += v;
            n += 1;
        }
    }
    Ok((n > 0).then(|| sum / n as f64))
}

#[derive(Debug, Clone)]
pub struct CorpusEvaluation {
    pub report: EvalReport,
    /// Mean IoU over items that carry a reference mask.
    pub pixel_iou: Option<f64>,
    /// One detection per corpus item, in corpus order.
    pub detections: Vec<Detection>,
}

/// Classifies every loaded corpus item and scores the verdicts against the
/// manifest labels. Items that failed to load are not counted.
pub fn evaluate_corpus(corpus: &Corpus, cfg: &ClassifierConfig) -> Result<CorpusEvaluation> {
    let detections: Vec<Detection> = corpus
        .items
        .par_iter()
        .map(|item| segment(&item.image, cfg, false))
        .collect::<Result<_>>()?;
    let verdicts = |label: Label| -> Vec<bool> {
        corpus
            .items
            .iter()
            .zip(&detections)
            .filter(|(i, _)| i.label == label)
            .map(|(_, d)| d.is_fire_image)
            .collect()
    };
    let report = derive_report(&build_matrix(
        verdicts(Label::Fire),
        verdicts(Label::NoFire),
    ))?;
    let pixel_iou = mean_pixel_iou(
        corpus
            .items
            .iter()
            .zip(&detections)
            .filter_map(|(i, d)| i.truth_mask.as_ref().map(|t| (&d.fire_mask, t))),
    )?;
    Ok(CorpusEvaluation {
        report,
        pixel_iou,
        detections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Copy)]
    struct Frac(i128, i128);

    impl Frac {
        fn f(self) -> Option<f64> {
            (self.1 != 0).then(|| self.0 as f64 / self.1 as f64)
        }
    }

    // Oracle: every statistic as an exact fraction, converted once.
    fn oracle(m: &ErrorMatrix) -> [Option<f64>; 10] {
        let (a, b, c, d) = (m.a as i128, m.b as i128, m.c as i128, m.d as i128);
        let t = a + b + c + d;
        let (r1, r2, c1, c2) = (a + b, c + d, a + c, b + d);
        let k_num = (a + d) * t - (r1 * c1 + r2 * c2);
        let k_den = t * t - (r1 * c1 + r2 * c2);
        [
            Frac(100 * c, c1).f(),
            Frac(100 * b, r1).f(),
            Frac(100 * a, r1).f(),
            Frac(100 * a, c1).f(),
            Frac(100 * b, c2).f(),
            Frac(100 * c, r2).f(),
            Frac(100 * d, r2).f(),
            Frac(100 * d, c2).f(),
            Frac(100 * (a + d), t).f(),
            Frac(k_num, k_den).f(),
        ]
    }

    fn flat(r: &EvalReport) -> [Option<f64>; 10] {
        [
            r.fire.omission_error,
            r.fire.commission_error,
            r.fire.user_accuracy,
            r.fire.producer_accuracy,
            r.nofire.omission_error,
            r.nofire.commission_error,
            r.nofire.user_accuracy,
            r.nofire.producer_accuracy,
            r.overall_accuracy,
            r.kappa,
        ]
    }

    #[test]
    fn published_matrix() {
        let m = ErrorMatrix::new(198, 28, 2, 172);
        assert_eq!(
            (m.r1(), m.r2(), m.c1(), m.c2(), m.total()),
            (226, 174, 200, 200, 400)
        );
        let r = derive_report(&m).unwrap();
        let close = |v: Option<f64>, want: f64| (v.unwrap() - want).abs() <= 0.01;
        assert!(close(r.fire.omission_error, 1.0));
        assert!(close(r.fire.commission_error, 12.389));
        assert!(close(r.fire.user_accuracy, 87.61));
        assert!(close(r.fire.producer_accuracy, 99.0));
        assert!(close(r.nofire.omission_error, 14.0));
        assert!(close(r.nofire.commission_error, 1.149));
        assert!(close(r.nofire.user_accuracy, 98.85));
        assert!(close(r.nofire.producer_accuracy, 86.0));
        assert!(close(r.overall_accuracy, 92.5));
        assert!((r.kappa.unwrap() - 0.85).abs() < 1e-12);
        assert_eq!(kappa_quality(r.kappa.unwrap()), KappaGrade::Good);
    }

    #[test]
    fn perfect_and_chance() {
        let r = derive_report(&ErrorMatrix::new(7, 0, 0, 7)).unwrap();
        assert_eq!(r.kappa, Some(1.0));
        assert_eq!(r.overall_accuracy, Some(100.0));
        assert_eq!(r.fire.omission_error, Some(0.0));
        assert_eq!(r.nofire.commission_error, Some(0.0));

        let r = derive_report(&ErrorMatrix::new(25, 25, 25, 25)).unwrap();
        assert_eq!(r.overall_accuracy, Some(50.0));
        assert_eq!(r.kappa, Some(0.0));
    }

    #[test]
    fn undefined_statistics() {
        // Flags everything: no-fire row empty.
        let r = derive_report(&ErrorMatrix::new(3, 3, 0, 0)).unwrap();
        assert_eq!(r.nofire.user_accuracy, None);
        assert_eq!(r.nofire.commission_error, None);
        assert_eq!(r.nofire.producer_accuracy, Some(0.0));
        assert_eq!(r.kappa, Some(0.0));

        // Only one class present: chance agreement is 1.
        let r = derive_report(&ErrorMatrix::new(5, 0, 0, 0)).unwrap();
        assert_eq!(r.kappa, None);
        assert!(derive_report(&ErrorMatrix::default()).is_err());
    }

    #[test]
    fn build_matrix_examples() {
        assert_eq!(
            build_matrix([true; 3], [false; 3]),
            ErrorMatrix::new(3, 0, 0, 3)
        );
        assert_eq!(
            build_matrix([true; 4], [true; 2]),
            ErrorMatrix::new(4, 2, 0, 0)
        );
        let fire = (0..200).map(|i| i >= 2);
        let nofire = (0..200).map(|i| i < 28);
        assert_eq!(
            build_matrix(fire, nofire),
            ErrorMatrix::new(198, 28, 2, 172)
        );
    }

    #[test]
    fn grade_boundary() {
        assert_eq!(kappa_quality(0.85), KappaGrade::Good);
        assert_eq!(kappa_quality(0.75), KappaGrade::NotGood);
        assert_eq!(kappa_quality(-1.0), KappaGrade::NotGood);
    }

    #[test]
    fn iou_mean() {
        let a = RuleMask::new(2, 1, vec![true, true]).unwrap();
        let b = RuleMask::new(2, 1, vec![true, false]).unwrap();
        let e = RuleMask::empty(2, 1);
        assert_eq!(
            mean_pixel_iou([(&a, &b), (&a, &a), (&e, &e)]).unwrap(),
            Some(0.75)
        );
        assert_eq!(mean_pixel_iou([(&e, &e)]).unwrap(), None);
    }

    fn matrix() -> impl Strategy<Value = ErrorMatrix> {
        (0u64..500, 0u64..500, 0u64..500, 0u64..500)
            .prop_filter("non-empty", |&(a, b, c, d)| a + b + c + d > 0)
            .prop_map(|(a, b, c, d)| ErrorMatrix::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn marginals_agree(m in matrix()) {
            prop_assert_eq!(m.r1() + m.r2(), m.total());
            prop_assert_eq!(m.c1() + m.c2(), m.total());
        }

        #[test]
        fn matches_rational_oracle(m in matrix()) {
            let got = flat(&derive_report(&m).unwrap());
            for (g, w) in got.iter().zip(oracle(&m)) {
                match (g, w) {
                    (Some(g), Some(w)) => prop_assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0)),
                    (None, None) => {}
                    _ => prop_assert!(false, "definedness differs: {:?} vs {:?}", g, w),
                }
            }
        }

        #[test]
        fn kappa_symmetric_and_bounded(m in matrix()) {
            let k = kappa(&m);
            let kt = kappa(&m.transpose());
            prop_assert_eq!(k.is_some(), kt.is_some());
            if let (Some(k), Some(kt)) = (k, kt) {
                prop_assert!((k - kt).abs() < 1e-12);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
            }
        }

        #[test]
        fn overall_accuracy_identity(m in matrix()) {
            let r = derive_report(&m).unwrap();
            let oa = 100.0 * (m.a + m.d) as f64 / m.total() as f64;
            prop_assert_eq!(r.overall_accuracy, Some(oa));
        }
    }
}
