//! COCO-style detection metrics: 101-point interpolated average
//! precision per class per IoU threshold, averaged over the two ripeness
//! classes; mAR is mean recall at 100 detections per image over the
//! 0.50:0.05:0.95 threshold ladder. All values are reported on a 0-100
//! scale. For average precision, a detection matches a ground truth at
//! IoU >= threshold (the COCO convention), unlike the strict `>` of the
//! standalone matcher.

use super::matching::iou;
use crate::dataset::{DetectionRecord, Frame, Ripeness};
use crate::estimators_2d::BoundingBox;

const MAX_DETECTIONS_PER_IMAGE: usize = 100;
const RECALL_SAMPLES: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionMetrics {
    pub map50: f64,
    pub map75: f64,
    pub map50_95: f64,
    pub mar: f64,
}

/// Per-frame evaluation input: ground-truth boxes with classes, and
/// scored detections.
#[derive(Debug, Clone, Default)]
pub struct EvalFrame {
    pub ground_truths: Vec<(BoundingBox, Ripeness)>,
    pub detections: Vec<(BoundingBox, Ripeness, f64)>,
}

/// Groups loaded frames and a detection list into evaluation inputs.
pub fn evaluation_frames(frames: &[Frame], detections: &[DetectionRecord]) -> Vec<EvalFrame> {
    frames
        .iter()
        .map(|frame| EvalFrame {
            ground_truths: frame
                .fruits
                .iter()
                .map(|fruit| (fruit.bbox, fruit.ripeness))
                .collect(),
            detections: detections
                .iter()
                .filter(|d| d.frame_id == frame.frame_id)
                .map(|d| (d.bbox, d.class, d.score))
                .collect(),
        })
        .collect()
}

fn iou_ladder() -> Vec<f64> {
    (0..10).map(|i| 0.5 + 0.05 * i as f64).collect()
}

/// Greedy COCO matching for one class and threshold. Returns the
/// true/false positive flags in global descending-score order, plus the
/// class ground-truth count.
fn match_class_at_threshold(
    frames: &[EvalFrame],
    class: Ripeness,
    threshold: f64,
) -> (Vec<bool>, usize) {
    let n_gt: usize = frames
        .iter()
        .map(|f| f.ground_truths.iter().filter(|g| g.1 == class).count())
        .sum();

    // Per frame, detections of the class capped at the top-100 by score.
    struct Det {
        frame: usize,
        index: usize,
        score: f64,
    }
    let mut dets: Vec<Det> = Vec::new();
    for (fi, frame) in frames.iter().enumerate() {
        let mut local: Vec<(usize, f64)> = frame
            .detections
            .iter()
            .enumerate()
            .filter(|(_, d)| d.1 == class)
            .map(|(i, d)| (i, d.2))
            .collect();
        local.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        local.truncate(MAX_DETECTIONS_PER_IMAGE);
        for (i, score) in local {
            dets.push(Det {
                frame: fi,
                index: i,
                score,
            });
        }
    }
    dets.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.frame.cmp(&b.frame))
            .then(a.index.cmp(&b.index))
    });

    let mut gt_used: Vec<Vec<bool>> = frames
        .iter()
        .map(|f| vec![false; f.ground_truths.len()])
        .collect();
    let mut tp_flags = Vec::with_capacity(dets.len());
    for det in &dets {
        let frame = &frames[det.frame];
        let dbox = &frame.detections[det.index].0;
        let mut best: Option<(usize, f64)> = None;
        for (gi, (gbox, gclass)) in frame.ground_truths.iter().enumerate() {
            if *gclass != class || gt_used[det.frame][gi] {
                continue;
            }
            let overlap = iou(dbox, gbox);
            if overlap >= threshold {
                let better = match best {
                    None => true,
                    Some((_, b)) => overlap > b,
                };
                if better {
                    best = Some((gi, overlap));
                }
            }
        }
        match best {
            Some((gi, _)) => {
                gt_used[det.frame][gi] = true;
                tp_flags.push(true);
            }
            None => tp_flags.push(false),
        }
    }
    (tp_flags, n_gt)
}

/// 101-point interpolated AP from true-positive flags in score order.
fn average_precision(tp_flags: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut precisions = Vec::with_capacity(tp_flags.len());
    let mut recalls = Vec::with_capacity(tp_flags.len());
    let mut tp = 0usize;
    for (k, &flag) in tp_flags.iter().enumerate() {
        if flag {
            tp += 1;
        }
        precisions.push(tp as f64 / (k + 1) as f64);
        recalls.push(tp as f64 / n_gt as f64);
    }
    // Monotone non-increasing precision envelope.
    for k in (0..precisions.len().saturating_sub(1)).rev() {
        if precisions[k] < precisions[k + 1] {
            precisions[k] = precisions[k + 1];
        }
    }
    let mut total = 0.0;
    for s in 0..RECALL_SAMPLES {
        let r = s as f64 / (RECALL_SAMPLES - 1) as f64;
        // Envelope precision at the first recall >= r.
        let p = recalls
            .iter()
            .position(|&rec| rec >= r - 1e-12)
            .map(|idx| precisions[idx])
            .unwrap_or(0.0);
        total += p;
    }
    total / RECALL_SAMPLES as f64
}

fn recall_at(tp_flags: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    tp_flags.iter().filter(|&&f| f).count() as f64 / n_gt as f64
}

/// Computes mAP50, mAP75, mAP50:95 and mAR over all frames. Classes with
/// no ground truth are excluded from the class means.
pub fn detection_metrics(frames: &[EvalFrame]) -> DetectionMetrics {
    let classes: Vec<Ripeness> = [Ripeness::Ripe, Ripeness::Unripe]
        .into_iter()
        .filter(|&c| {
            frames
                .iter()
                .any(|f| f.ground_truths.iter().any(|g| g.1 == c))
        })
        .collect();
    if classes.is_empty() {
        return DetectionMetrics {
            map50: 0.0,
            map75: 0.0,
            map50_95: 0.0,
            mar: 0.0,
        };
    }

    let ladder = iou_ladder();
    let mut ap: Vec<Vec<f64>> = Vec::new(); // [class][threshold]
    let mut recall: Vec<Vec<f64>> = Vec::new();
    for &class in &classes {
        let mut ap_row = Vec::with_capacity(ladder.len());
        let mut recall_row = Vec::with_capacity(ladder.len());
        for &t in &ladder {
            let (flags, n_gt) = match_class_at_threshold(frames, class, t);
            ap_row.push(average_precision(&flags, n_gt));
            recall_row.push(recall_at(&flags, n_gt));
        }
        ap.push(ap_row);
        recall.push(recall_row);
    }

    let class_mean = |per_class: &[Vec<f64>], idx: usize| -> f64 {
        per_class.iter().map(|row| row[idx]).sum::<f64>() / per_class.len() as f64
    };
    let ladder_mean = |per_class: &[Vec<f64>]| -> f64 {
        per_class
            .iter()
            .map(|row| row.iter().sum::<f64>() / row.len() as f64)
            .sum::<f64>()
            / per_class.len() as f64
    };

    DetectionMetrics {
        map50: 100.0 * class_mean(&ap, 0),
        map75: 100.0 * class_mean(&ap, 5),
        map50_95: 100.0 * ladder_mean(&ap),
        mar: 100.0 * ladder_mean(&recall),
    }
}
