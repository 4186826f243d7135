//! Hit rate, threshold calibration, accuracy, AUPR and small summaries.

use alloc::vec::Vec;

use crate::{Error, Result};

fn check_classes(labels: &[bool]) -> Result<()> {
    if labels.iter().any(|&l| l) && labels.iter().any(|&l| !l) {
        Ok(())
    } else {
        Err(Error::SingleClass)
    }
}

fn sorted_pairs(penalties: &[f64], labels: &[bool]) -> Vec<(f64, bool)> {
    let mut v: Vec<(f64, bool)> = penalties.iter().copied().zip(labels.iter().copied()).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Fraction of pairs classified correctly by "positive iff penalty < t".
pub fn accuracy(penalties: &[f64], labels: &[bool], t: f64) -> f64 {
    if penalties.is_empty() {
        return 0.0;
    }
    let correct = penalties.iter().zip(labels).filter(|&(&p, &l)| (p < t) == l).count();
    correct as f64 / penalties.len() as f64
}

/// Mean of the true-positive and true-negative rates under "positive iff penalty < t".
pub fn balanced_accuracy(penalties: &[f64], labels: &[bool], t: f64) -> Result<f64> {
    check_classes(labels)?;
    let (mut tp, mut tn, mut p, mut n) = (0usize, 0usize, 0usize, 0usize);
    for (&x, &l) in penalties.iter().zip(labels) {
        if l {
            p += 1;
            tp += (x < t) as usize;
        } else {
            n += 1;
            tn += (x >= t) as usize;
        }
    }
    Ok(0.5 * (tp as f64 / p as f64 + tn as f64 / n as f64))
}

/// Threshold maximizing balanced accuracy of "positive iff penalty < t".
///
/// Candidates are the distinct observed penalties `v_1 < v_2 < ...`. The
/// first maximizing candidate `v_j` is returned as the midpoint
/// `(v_{j-1} + v_j) / 2`, or as `v_1` itself when `j = 1`.
pub fn calibrate_threshold(penalties: &[f64], labels: &[bool]) -> Result<f64> {
    check_classes(labels)?;
    let sorted = sorted_pairs(penalties, labels);
    let total_pos = labels.iter().filter(|&&l| l).count() as f64;
    let total_neg = labels.len() as f64 - total_pos;
    // pairs strictly below the current candidate
    let (mut pos_below, mut neg_below) = (0.0, 0.0);
    let mut best = (f64::NEG_INFINITY, sorted[0].0);
    let mut prev: Option<f64> = None;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i].0;
        let score = 0.5 * (pos_below / total_pos + (total_neg - neg_below) / total_neg);
        if score > best.0 {
            best = (score, prev.map_or(v, |p| 0.5 * (p + v)));
        }
        while i < sorted.len() && sorted[i].0 == v {
            if sorted[i].1 {
                pos_below += 1.0;
            } else {
                neg_below += 1.0;
            }
            i += 1;
        }
        prev = Some(v);
    }
    Ok(best.1)
}

/// Area under the precision-recall curve with score `-penalty`, by the
/// trapezoidal rule. Tied penalties enter the curve together; the curve is
/// anchored at recall 0 with the first observed precision.
pub fn aupr(penalties: &[f64], labels: &[bool]) -> Result<f64> {
    check_classes(labels)?;
    let sorted = sorted_pairs(penalties, labels);
    let total_pos = labels.iter().filter(|&&l| l).count() as f64;
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == v {
            if sorted[i].1 {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        points.push((tp / total_pos, tp / (tp + fp)));
    }
    let mut area = 0.0;
    let mut last = (0.0, points[0].1);
    for &(r, p) in &points {
        area += (r - last.0) * 0.5 * (p + last.1);
        last = (r, p);
    }
    Ok(area)
}

/// `|top-r(predicted) ∩ accepted| / r`, where `accepted` holds every truth
/// entry whose count reaches the count at truth rank `r` (boundary ties are
/// hits). `truth` must be sorted by count, descending. `same` decides whether
/// a predicted item matches a truth item.
pub fn hit_rate<P, T>(
    predicted: &[P],
    truth: &[(T, u64)],
    r: usize,
    mut same: impl FnMut(&P, &T) -> bool,
) -> Result<f64> {
    if r == 0 || r > truth.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "rank {r} outside 1..={}",
            truth.len()
        )));
    }
    let cutoff = truth[r - 1].1;
    let accepted: Vec<&T> = truth.iter().filter(|(_, c)| *c >= cutoff).map(|(t, _)| t).collect();
    let hits = predicted
        .iter()
        .take(r)
        .filter(|p| accepted.iter().any(|t| same(p, t)))
        .count();
    Ok(hits as f64 / r as f64)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Median; the mean of the two middle values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
