//! IoU computation and greedy detection-to-ground-truth matching.

use crate::dataset::{AnnotatedFruit, DetectionRecord};
use crate::estimators_2d::BoundingBox;

/// Intersection over union of two boxes, in [0, 1].
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.u_max.min(b.u_max) - a.u_min.max(b.u_min)).max(0.0);
    let ih = (a.v_max.min(b.v_max) - a.v_min.max(b.v_min)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub detection: usize,
    pub ground_truth: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    pub pairs: Vec<MatchPair>,
    pub unmatched_detections: Vec<usize>,
    pub unmatched_ground_truths: Vec<usize>,
}

/// Matches detections to ground truths of one frame, greedily in
/// descending score order; each detection takes the highest-IoU
/// still-unmatched ground truth with IoU strictly above the threshold.
/// Matching is class-agnostic: it pairs boxes, not labels.
pub fn match_detections(
    detections: &[DetectionRecord],
    ground_truths: &[AnnotatedFruit],
    threshold: f64,
) -> MatchResult {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| {
        detections[b]
            .score
            .total_cmp(&detections[a].score)
            .then(a.cmp(&b))
    });

    let mut gt_taken = vec![false; ground_truths.len()];
    let mut result = MatchResult::default();
    for &det_idx in &order {
        let mut best: Option<(usize, f64)> = None;
        for (gt_idx, gt) in ground_truths.iter().enumerate() {
            if gt_taken[gt_idx] {
                continue;
            }
            let overlap = iou(&detections[det_idx].bbox, &gt.bbox);
            if overlap > threshold {
                let better = match best {
                    None => true,
                    Some((_, best_iou)) => overlap > best_iou,
                };
                if better {
                    best = Some((gt_idx, overlap));
                }
            }
        }
        match best {
            Some((gt_idx, overlap)) => {
                gt_taken[gt_idx] = true;
                result.pairs.push(MatchPair {
                    detection: det_idx,
                    ground_truth: gt_idx,
                    iou: overlap,
                });
            }
            None => result.unmatched_detections.push(det_idx),
        }
    }
    result.unmatched_detections.sort_unstable();
    result.unmatched_ground_truths = gt_taken
        .iter()
        .enumerate()
        .filter(|(_, &taken)| !taken)
        .map(|(i, _)| i)
        .collect();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Ripeness;

    fn bb(u0: f64, v0: f64, u1: f64, v1: f64) -> BoundingBox {
        BoundingBox::new(u0, v0, u1, v1).unwrap()
    }

    fn det(bbox: BoundingBox, score: f64) -> DetectionRecord {
        DetectionRecord {
            frame_id: "f".into(),
            bbox,
            class: Ripeness::Ripe,
            score,
        }
    }

    fn gt(bbox: BoundingBox) -> AnnotatedFruit {
        AnnotatedFruit {
            fruit_id: "g".into(),
            bbox,
            mask: None,
            ripeness: Ripeness::Ripe,
            gt_diameter_mm: Some(70.0),
        }
    }

    #[test]
    fn identical_boxes_have_iou_one() {
        let a = bb(3.0, 4.0, 13.0, 24.0);
        assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn disjoint_boxes_have_iou_zero() {
        assert_eq!(iou(&bb(0.0, 0.0, 5.0, 5.0), &bb(10.0, 10.0, 15.0, 15.0)), 0.0);
        // Touching edges count as zero overlap.
        assert_eq!(iou(&bb(0.0, 0.0, 5.0, 5.0), &bb(5.0, 0.0, 10.0, 5.0)), 0.0);
    }

    #[test]
    fn strip_overlap_is_one_third() {
        // Two 10x10 boxes overlapping in a 5x10 strip: 50 / 150.
        let a = bb(0.0, 0.0, 10.0, 10.0);
        let b = bb(5.0, 0.0, 15.0, 10.0);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_detection_matches_above_threshold() {
        let gts = vec![gt(bb(0.0, 0.0, 10.0, 10.0))];
        let dets = vec![det(bb(0.0, 0.0, 10.0, 10.0), 0.9)];
        let m = match_detections(&dets, &gts, 0.7);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].iou, 1.0);
        assert!(m.unmatched_detections.is_empty());
        assert!(m.unmatched_ground_truths.is_empty());
    }

    #[test]
    fn below_threshold_leaves_both_unmatched() {
        let gts = vec![gt(bb(0.0, 0.0, 10.0, 10.0))];
        // 6x10 overlap: IoU = 60 / 140 = 0.428...; and a 0.6-IoU case:
        // overlap 7.5x10 = 75, union 125 -> 0.6 exactly, still rejected
        // because matching requires strictly greater.
        let dets = vec![det(bb(2.5, 0.0, 12.5, 10.0), 0.9)];
        let m = match_detections(&dets, &gts, 0.6);
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_detections, vec![0]);
        assert_eq!(m.unmatched_ground_truths, vec![0]);
    }

    #[test]
    fn higher_score_detection_wins_the_contested_gt() {
        let gts = vec![gt(bb(0.0, 0.0, 10.0, 10.0))];
        let dets = vec![
            det(bb(0.5, 0.0, 10.5, 10.0), 0.4),
            det(bb(0.0, 0.5, 10.0, 10.5), 0.8),
        ];
        let m = match_detections(&dets, &gts, 0.7);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.pairs[0].detection, 1, "higher score must win");
        assert_eq!(m.unmatched_detections, vec![0]);
    }

    #[test]
    fn each_side_matched_at_most_once() {
        let gts = vec![
            gt(bb(0.0, 0.0, 10.0, 10.0)),
            gt(bb(20.0, 0.0, 30.0, 10.0)),
        ];
        let dets = vec![
            det(bb(0.0, 0.0, 10.0, 10.0), 0.9),
            det(bb(0.1, 0.0, 10.1, 10.0), 0.8),
            det(bb(20.0, 0.0, 30.0, 10.0), 0.7),
        ];
        let m = match_detections(&dets, &gts, 0.7);
        assert_eq!(m.pairs.len(), 2);
        let matched_dets: Vec<usize> = m.pairs.iter().map(|p| p.detection).collect();
        assert!(matched_dets.contains(&0) && matched_dets.contains(&2));
        assert_eq!(m.unmatched_detections, vec![1]);
    }
}
