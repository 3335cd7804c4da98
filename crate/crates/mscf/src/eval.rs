//! One-pass-evaluation metrics: center location error, precision plot,
//! IoU success plot with its AUC, and tracker throughput.

use crate::error::{MscfError, Result};
use crate::geometry::BoundingBox;

/// Per-sequence tracking output paired with ground truth. A `None` truth
/// entry marks an absent-target annotation; such frames are excluded from
/// the metrics and counted.
#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub predicted: Vec<BoundingBox>,
    pub truth: Vec<Option<BoundingBox>>,
    pub elapsed_per_frame: Vec<f64>,
}

impl SequenceResult {
    pub fn new(
        predicted: Vec<BoundingBox>,
        truth: Vec<Option<BoundingBox>>,
        elapsed_per_frame: Vec<f64>,
    ) -> Result<SequenceResult> {
        if predicted.is_empty() {
            return Err(MscfError::invalid("sequence result must cover >= 1 frame"));
        }
        if predicted.len() != truth.len() || predicted.len() != elapsed_per_frame.len() {
            return Err(MscfError::invalid(format!(
                "sequence result lengths differ: {} predictions, {} truths, {} timings",
                predicted.len(),
                truth.len(),
                elapsed_per_frame.len()
            )));
        }
        Ok(SequenceResult {
            predicted,
            truth,
            elapsed_per_frame,
        })
    }

    pub fn excluded_frames(&self) -> usize {
        self.truth.iter().filter(|t| t.is_none()).count()
    }

    fn valid_pairs(&self) -> impl Iterator<Item = (&BoundingBox, &BoundingBox)> {
        self.predicted
            .iter()
            .zip(self.truth.iter())
            .filter_map(|(p, t)| t.as_ref().map(|t| (p, t)))
    }
}

/// Threshold sweep of a metric; values are frame fractions in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

/// Euclidean distance between box centers.
pub fn cle(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

/// Intersection over union.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.area() + b.area() - inter)
}

/// Precision plot over CLE thresholds 0..=50 px: the fraction of valid
/// frames with `cle <= t`. The headline precision is the value at 20 px.
pub fn precision_curve(res: &SequenceResult) -> Result<CurveData> {
    let cles: Vec<f64> = res.valid_pairs().map(|(p, t)| cle(p, t)).collect();
    if cles.is_empty() {
        return Err(MscfError::invalid("no valid ground-truth frames to score"));
    }
    let n = cles.len() as f64;
    let thresholds: Vec<f64> = (0..=50).map(|t| t as f64).collect();
    let values = thresholds
        .iter()
        .map(|&t| cles.iter().filter(|&&d| d <= t).count() as f64 / n)
        .collect();
    Ok(CurveData { thresholds, values })
}

/// Precision at the conventional 20-pixel threshold.
pub fn precision_at_20(curve: &CurveData) -> f64 {
    curve.values[20]
}

/// Success plot over 51 IoU thresholds 0, 0.02, …, 1.0 with the strict
/// `iou > t` convention, plus its AUC (the mean over the grid).
pub fn success_auc(res: &SequenceResult) -> Result<(CurveData, f64)> {
    let ious: Vec<f64> = res.valid_pairs().map(|(p, t)| iou(p, t)).collect();
    if ious.is_empty() {
        return Err(MscfError::invalid("no valid ground-truth frames to score"));
    }
    let n = ious.len() as f64;
    let thresholds: Vec<f64> = (0..=50).map(|t| t as f64 * 0.02).collect();
    let values: Vec<f64> = thresholds
        .iter()
        .map(|&t| ious.iter().filter(|&&v| v > t).count() as f64 / n)
        .collect();
    let auc = values.iter().sum::<f64>() / values.len() as f64;
    Ok((CurveData { thresholds, values }, auc))
}

/// Frames per second over the tracker-only timings.
pub fn fps(res: &SequenceResult) -> f64 {
    let total: f64 = res.elapsed_per_frame.iter().sum();
    if total <= 0.0 {
        return f64::INFINITY;
    }
    res.elapsed_per_frame.len() as f64 / total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    fn result_of(pairs: Vec<(BoundingBox, Option<BoundingBox>)>) -> SequenceResult {
        let n = pairs.len();
        let (p, t): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        SequenceResult::new(p, t, vec![0.01; n]).unwrap()
    }

    #[test]
    fn cle_basics() {
        let a = bb(0.0, 0.0, 10.0, 10.0);
        assert_eq!(cle(&a, &a), 0.0);
        let b = bb(3.0, 4.0, 10.0, 10.0); // centers offset by (3, 4)
        assert_eq!(cle(&a, &b), 5.0);
        assert_eq!(cle(&a, &b), cle(&b, &a));
    }

    #[test]
    fn iou_basics() {
        let a = bb(0.0, 0.0, 2.0, 2.0);
        assert_eq!(iou(&a, &a), 1.0);
        let disjoint = bb(10.0, 10.0, 2.0, 2.0);
        assert_eq!(iou(&a, &disjoint), 0.0);
        // hand geometry: intersection 2, union 6
        let b = bb(1.0, 0.0, 2.0, 2.0);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(iou(&a, &b), iou(&b, &a));
    }

    #[test]
    fn exact_predictions_score_perfect_precision() {
        let t = bb(5.0, 5.0, 8.0, 8.0);
        let res = result_of(vec![(t, Some(t)); 4]);
        let curve = precision_curve(&res).unwrap();
        assert!(curve.values.iter().all(|&v| v == 1.0));
        assert_eq!(precision_at_20(&curve), 1.0);
    }

    #[test]
    fn precision_step_sits_at_the_cle_value() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let p = bb(25.0, 0.0, 10.0, 10.0); // cle 25
        let res = result_of(vec![(p, Some(t)); 3]);
        let curve = precision_curve(&res).unwrap();
        assert_eq!(precision_at_20(&curve), 0.0);
        assert_eq!(curve.values[25], 1.0);
        assert_eq!(curve.values[24], 0.0);
    }

    #[test]
    fn precision_counts_mixed_cles() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let res = result_of(vec![
            (t, Some(t)),                              // cle 0
            (bb(10.0, 0.0, 10.0, 10.0), Some(t)),      // cle 10
            (bb(30.0, 0.0, 10.0, 10.0), Some(t)),      // cle 30
        ]);
        let curve = precision_curve(&res).unwrap();
        assert!((precision_at_20(&curve) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_overlap_auc_is_fifty_over_fifty_one() {
        let t = bb(0.0, 0.0, 4.0, 4.0);
        let res = result_of(vec![(t, Some(t)); 5]);
        let (_, auc) = success_auc(&res).unwrap();
        assert!((auc - 50.0 / 51.0).abs() < 1e-12);
    }

    #[test]
    fn zero_overlap_auc_is_zero() {
        let t = bb(0.0, 0.0, 4.0, 4.0);
        let p = bb(100.0, 100.0, 4.0, 4.0);
        let res = result_of(vec![(p, Some(t)); 5]);
        let (curve, auc) = success_auc(&res).unwrap();
        assert_eq!(auc, 0.0);
        assert!(curve.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_perfect_half_disjoint_halves_the_auc() {
        let t = bb(0.0, 0.0, 4.0, 4.0);
        let p = bb(100.0, 100.0, 4.0, 4.0);
        let res = result_of(vec![(t, Some(t)), (p, Some(t)), (t, Some(t)), (p, Some(t))]);
        let (_, auc) = success_auc(&res).unwrap();
        assert!((auc - 0.5 * 50.0 / 51.0).abs() < 1e-12);
    }

    #[test]
    fn curves_are_monotone() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let preds = [0.0, 3.0, 7.5, 14.0, 33.0, 2.0, 9.0];
        let res = result_of(
            preds
                .iter()
                .map(|&dx| (bb(dx, dx / 2.0, 10.0, 10.0), Some(t)))
                .collect(),
        );
        let pc = precision_curve(&res).unwrap();
        for w in pc.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let (sc, auc) = success_auc(&res).unwrap();
        for w in sc.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn auc_ignores_frame_order() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let mut frames: Vec<(BoundingBox, Option<BoundingBox>)> = (0..9)
            .map(|i| (bb(i as f64, 0.0, 10.0, 10.0), Some(t)))
            .collect();
        let (_, auc1) = success_auc(&result_of(frames.clone())).unwrap();
        frames.reverse();
        let (_, auc2) = success_auc(&result_of(frames)).unwrap();
        assert_eq!(auc1, auc2);
    }

    #[test]
    fn absent_truth_frames_are_excluded() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let far = bb(500.0, 0.0, 10.0, 10.0);
        let res = result_of(vec![(t, Some(t)), (far, None), (t, Some(t))]);
        assert_eq!(res.excluded_frames(), 1);
        let curve = precision_curve(&res).unwrap();
        assert_eq!(precision_at_20(&curve), 1.0);
    }

    #[test]
    fn all_excluded_is_an_error() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let res = result_of(vec![(t, None), (t, None)]);
        assert!(precision_curve(&res).is_err());
        assert!(success_auc(&res).is_err());
    }

    #[test]
    fn fps_counts_tracker_time_only() {
        let t = bb(0.0, 0.0, 10.0, 10.0);
        let res = SequenceResult::new(vec![t; 4], vec![Some(t); 4], vec![0.05; 4]).unwrap();
        assert!((fps(&res) - 20.0).abs() < 1e-9);
    }
}
