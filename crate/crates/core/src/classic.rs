//! Threshold-based metrics with OKS correspondence: AP/AR from greedy
//! confidence-ordered matching, and MOTA, IDF1 and IDSW for tracking.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::assignment::{solve_min_cost, CostMatrix};
use crate::error::{EvalError, Result};
use crate::model::{AlignedFrame, KeypointSchema, SequenceSet};
use crate::oks::{oks, VisibilityFilter};

/// OKS threshold used throughout the benchmark.
pub const DEFAULT_OKS_THRESHOLD: f64 = 0.5;

/// Thresholds `0.50, 0.55, ..., 0.95` for COCO-style averaged AP.
pub fn coco_thresholds() -> Vec<f64> {
    (0..10).map(|i| 0.5 + 0.05 * f64::from(i)).collect()
}

/// A ground-truth scene and the predictions for it.
pub type ScenePair<'a> = (&'a SequenceSet, &'a SequenceSet);

/// Outcome of greedy matching on one frame. Indices refer to the input slices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyMatch {
    /// `(gt, pred, oks)` for every accepted match, in processing order.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_gt: Vec<usize>,
    pub unmatched_pred: Vec<usize>,
}

impl GreedyMatch {
    /// Whether each prediction, by input index, was a true positive.
    pub fn pred_is_tp(&self, pred_len: usize) -> Vec<bool> {
        let mut tp = vec![false; pred_len];
        for &(_, p, _) in &self.pairs {
            tp[p] = true;
        }
        tp
    }
}

fn sorted_by_confidence(frame: &AlignedFrame<'_>) -> Result<Vec<usize>> {
    let mut scores = Vec::with_capacity(frame.pred.len());
    for (index, pose) in frame.pred.iter().enumerate() {
        let score = pose.score.ok_or(EvalError::MissingScore {
            frame: frame.frame_id,
            index,
        })?;
        scores.push(score);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    Ok(order)
}

/// Matches predictions in descending confidence (input order on ties) to the
/// unmatched ground truth of highest OKS, accepting when OKS >= `threshold`.
pub fn greedy_match(
    frame: AlignedFrame<'_>,
    schema: &KeypointSchema,
    threshold: f64,
) -> Result<GreedyMatch> {
    let order = sorted_by_confidence(&frame)?;
    let mut gt_taken = vec![false; frame.gt.len()];
    let mut result = GreedyMatch::default();
    for p in order {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in frame.gt.iter().enumerate() {
            if gt_taken[g] {
                continue;
            }
            let s = oks(gt, &frame.pred[p], schema, VisibilityFilter::All)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((g, s));
            }
        }
        match best {
            Some((g, s)) if s >= threshold => {
                gt_taken[g] = true;
                result.pairs.push((g, p, s));
            }
            _ => result.unmatched_pred.push(p),
        }
    }
    result.unmatched_pred.sort_unstable();
    result.unmatched_gt = (0..frame.gt.len()).filter(|&g| !gt_taken[g]).collect();
    Ok(result)
}

/// Precision and recall after each detection of the global confidence sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PrCurve {
    /// Detection scores, descending.
    pub scores: Vec<f64>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub ap: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ApResult {
    pub ap: f64,
    pub ar: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub gt_count: usize,
    pub curve: PrCurve,
}

/// Area under the precision envelope sampled at recall `0.00, 0.01, ..., 1.00`.
pub fn interpolated_ap(precision: &[f64], recall: &[f64]) -> f64 {
    let mut envelope = precision.to_vec();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        if envelope[i + 1] > envelope[i] {
            envelope[i] = envelope[i + 1];
        }
    }
    let mut sum = 0.0;
    for step in 0..=100u32 {
        let r = f64::from(step) / 100.0;
        let idx = recall.partition_point(|&x| x < r);
        if idx < envelope.len() {
            sum += envelope[idx];
        }
    }
    sum / 101.0
}

/// AP and AR at one OKS threshold over every frame of every scene.
pub fn average_precision(
    scenes: &[ScenePair<'_>],
    schema: &KeypointSchema,
    oks_threshold: f64,
) -> Result<ApResult> {
    let mut detections: Vec<(f64, bool)> = Vec::new();
    let mut gt_count = 0usize;
    for (gt, pred) in scenes {
        for frame in SequenceSet::aligned(gt, pred) {
            gt_count += frame.gt.len();
            let matched = greedy_match(frame, schema, oks_threshold)?;
            let tp = matched.pred_is_tp(frame.pred.len());
            for (pose, is_tp) in frame.pred.iter().zip(tp) {
                detections.push((pose.score.unwrap_or_default(), is_tp));
            }
        }
    }
    // Stable: ties keep scene, frame and input order.
    detections.sort_by(|a, b| b.0.total_cmp(&a.0));

    if gt_count == 0 {
        if !detections.is_empty() {
            log::warn!(
                "{} predictions scored against empty ground truth; AP set to 0",
                detections.len()
            );
        }
        return Ok(ApResult {
            false_positives: detections.len(),
            ..ApResult::default()
        });
    }

    let mut curve = PrCurve::default();
    let (mut tp, mut fp) = (0usize, 0usize);
    for &(score, is_tp) in &detections {
        if is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        curve.scores.push(score);
        curve.precision.push(tp as f64 / (tp + fp) as f64);
        curve.recall.push(tp as f64 / gt_count as f64);
    }
    curve.ap = interpolated_ap(&curve.precision, &curve.recall);
    Ok(ApResult {
        ap: curve.ap,
        ar: curve.recall.last().copied().unwrap_or(0.0),
        true_positives: tp,
        false_positives: fp,
        gt_count,
        curve,
    })
}

/// AP averaged over several OKS thresholds.
pub fn mean_average_precision(
    scenes: &[ScenePair<'_>],
    schema: &KeypointSchema,
    thresholds: &[f64],
) -> Result<f64> {
    if thresholds.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for &t in thresholds {
        sum += average_precision(scenes, schema, t)?.ap;
    }
    Ok(sum / thresholds.len() as f64)
}

/// CLEAR MOT and identity metrics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrackEvalResult {
    pub mota: f64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
    pub idsw: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_count: usize,
    pub matches: usize,
    pub gt_count: usize,
    pub pred_count: usize,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

impl TrackEvalResult {
    fn finish(mut self) -> Self {
        // Zero-length denominators are treated as one.
        let gt = self.gt_count.max(1) as f64;
        self.mota = 1.0 - (self.fp + self.fn_count + self.idsw) as f64 / gt;
        self.idfn = self.gt_count - self.idtp;
        self.idfp = self.pred_count - self.idtp;
        let dets = self.gt_count + self.pred_count;
        self.idf1 = if dets == 0 {
            1.0
        } else {
            2.0 * self.idtp as f64 / dets as f64
        };
        self.idp = if self.pred_count == 0 {
            1.0
        } else {
            self.idtp as f64 / self.pred_count as f64
        };
        self.idr = if self.gt_count == 0 {
            1.0
        } else {
            self.idtp as f64 / self.gt_count as f64
        };
        self
    }

    fn absorb(&mut self, other: &TrackEvalResult) {
        self.idsw += other.idsw;
        self.fp += other.fp;
        self.fn_count += other.fn_count;
        self.matches += other.matches;
        self.gt_count += other.gt_count;
        self.pred_count += other.pred_count;
        self.idtp += other.idtp;
    }
}

fn require_track_ids(seq: &SequenceSet) -> Result<()> {
    for frame in seq.frames() {
        for (index, pose) in frame.poses.iter().enumerate() {
            if pose.track_id.is_none() {
                return Err(EvalError::MissingTrackId {
                    frame: frame.frame_id,
                    index,
                });
            }
        }
        frame.check_unique_tracks()?;
    }
    Ok(())
}

/// Per-frame correspondence with CLEAR continuity: pairs kept from the previous
/// frame first, then a min-cost assignment on `1 - OKS` over the rest, both
/// restricted to OKS >= `threshold`.
fn match_frame(
    similarity: &[Vec<f64>],
    gt_ids: &[u64],
    pred_ids: &[u64],
    previous: &HashMap<u64, u64>,
    threshold: f64,
) -> Vec<(usize, usize)> {
    let mut gt_used = vec![false; gt_ids.len()];
    let mut pred_used = vec![false; pred_ids.len()];
    let mut pairs = Vec::new();
    for (g, gid) in gt_ids.iter().enumerate() {
        let Some(pid) = previous.get(gid) else {
            continue;
        };
        if let Some(p) = pred_ids.iter().position(|x| x == pid) {
            if !pred_used[p] && similarity[g][p] >= threshold {
                gt_used[g] = true;
                pred_used[p] = true;
                pairs.push((g, p));
            }
        }
    }
    let free_gt: Vec<usize> = (0..gt_ids.len()).filter(|&g| !gt_used[g]).collect();
    let free_pred: Vec<usize> = (0..pred_ids.len()).filter(|&p| !pred_used[p]).collect();
    if !free_gt.is_empty() && !free_pred.is_empty() {
        // Forbidden pairs cost more than any full set of allowed ones.
        let forbidden = (free_gt.len().min(free_pred.len()) + 1) as f64;
        let matrix = CostMatrix::from_fn(free_gt.len(), free_pred.len(), |r, c| {
            let s = similarity[free_gt[r]][free_pred[c]];
            if s >= threshold {
                1.0 - s
            } else {
                forbidden
            }
        })
        .expect("costs are finite and non-negative");
        for (r, c) in solve_min_cost(&matrix).pairs {
            let (g, p) = (free_gt[r], free_pred[c]);
            if similarity[g][p] >= threshold {
                pairs.push((g, p));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

fn scene_track_metrics(
    gt: &SequenceSet,
    pred: &SequenceSet,
    schema: &KeypointSchema,
    threshold: f64,
) -> Result<TrackEvalResult> {
    require_track_ids(gt)?;
    require_track_ids(pred)?;
    let mut out = TrackEvalResult::default();
    let mut previous: HashMap<u64, u64> = HashMap::new();
    let mut last_match: HashMap<u64, u64> = HashMap::new();
    let mut pair_hits: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut gt_tracks = BTreeSet::new();
    let mut pred_tracks = BTreeSet::new();

    for frame in SequenceSet::aligned(gt, pred) {
        let gt_ids: Vec<u64> = frame.gt.iter().filter_map(|p| p.track_id).collect();
        let pred_ids: Vec<u64> = frame.pred.iter().filter_map(|p| p.track_id).collect();
        gt_tracks.extend(gt_ids.iter().copied());
        pred_tracks.extend(pred_ids.iter().copied());
        let similarity = frame
            .gt
            .iter()
            .map(|g| {
                frame
                    .pred
                    .iter()
                    .map(|p| oks(g, p, schema, VisibilityFilter::All))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        for (g, row) in similarity.iter().enumerate() {
            for (p, &s) in row.iter().enumerate() {
                if s >= threshold {
                    *pair_hits.entry((gt_ids[g], pred_ids[p])).or_default() += 1;
                }
            }
        }

        let pairs = match_frame(&similarity, &gt_ids, &pred_ids, &previous, threshold);
        previous.clear();
        for &(g, p) in &pairs {
            let (gid, pid) = (gt_ids[g], pred_ids[p]);
            if let Some(&last) = last_match.get(&gid) {
                if last != pid {
                    out.idsw += 1;
                }
            }
            last_match.insert(gid, pid);
            previous.insert(gid, pid);
        }
        out.matches += pairs.len();
        out.fp += pred_ids.len() - pairs.len();
        out.fn_count += gt_ids.len() - pairs.len();
        out.gt_count += gt_ids.len();
        out.pred_count += pred_ids.len();
    }

    // Identity matching: maximize total co-detections over a global ID bijection.
    let gt_list: Vec<u64> = gt_tracks.into_iter().collect();
    let pred_list: Vec<u64> = pred_tracks.into_iter().collect();
    let best = pair_hits.values().copied().max().unwrap_or(0) as f64;
    let matrix = CostMatrix::from_fn(gt_list.len(), pred_list.len(), |r, c| {
        best - pair_hits
            .get(&(gt_list[r], pred_list[c]))
            .copied()
            .unwrap_or(0) as f64
    })?;
    out.idtp = solve_min_cost(&matrix)
        .pairs
        .iter()
        .map(|&(r, c)| {
            pair_hits
                .get(&(gt_list[r], pred_list[c]))
                .copied()
                .unwrap_or(0)
        })
        .sum();
    Ok(out)
}

/// MOTA, IDF1 and IDSW over all scenes, counts summed across scenes.
pub fn track_metrics(
    scenes: &[ScenePair<'_>],
    schema: &KeypointSchema,
    oks_threshold: f64,
) -> Result<TrackEvalResult> {
    let mut total = TrackEvalResult::default();
    for (gt, pred) in scenes {
        let scene = scene_track_metrics(gt, pred, schema, oks_threshold)?;
        total.absorb(&scene);
    }
    Ok(total.finish())
}
