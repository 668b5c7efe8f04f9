//! Threshold search for a target capacity.
//!
//! Every `(t1, t2)` pair of the grid is scored by a payload-agnostic
//! estimate: the expected squared error of the units needed to carry the
//! secret plus the header, averaged over all bit combinations. The best
//! estimated pairs are then encoded for real and the one with the lowest
//! actual MSE wins (ties: smaller `t2`, then smaller `t1`).

use super::{adjust_green, embed_r, encode_with, expand_embed, plan_overflow, unit_mode, EncodeReport, Predictions, Thresholds};
use crate::baselines::SchemeId;
use crate::bits::BitBuf;
use crate::classify::{delta_unchecked, Delta, RegionClass};
use crate::error::{Error, Result};
use crate::image::{invariant_gray, to_gray, unit_index_bits, ColorImage, TraversalRegion};

use super::header::{Header, MAX_INLINE_MAP};

/// Candidate `t2` values.
pub const T2_GRID: [u8; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 255];

/// Real encodes whose MSE is compared.
const VERIFY: usize = 6;
/// Real encodes attempted before giving up.
const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Default)]
struct ModeStats {
    safe: bool,
    /// Squared error summed over the 8 (sd1, sd2, ecb) combinations.
    cost8: u32,
    /// Red bits summed over the 4 (sd1, sd2) combinations.
    cap4: u8,
}

struct UnitStats {
    delta: Delta,
    smooth: ModeStats,
    normal: ModeStats,
}

fn mode_stats(scheme: SchemeId, mode: RegionClass, px: [u8; 3], gr: i32, preds: &Predictions) -> ModeStats {
    if !plan_overflow(scheme, mode, px, gr, preds) {
        return ModeStats::default();
    }
    let [r, g, b] = px.map(|v| v as i32);
    let mut cost8 = 0u32;
    let mut cap4 = 0u8;
    for sd1 in [false, true] {
        for sd2 in [false, true] {
            let red = embed_r(scheme, mode, r, preds, sd1, sd2);
            cap4 += red.consumed as u8;
            for ecb in [false, true] {
                let bm = expand_embed(b, preds.b(), ecb);
                let gm = adjust_green(gr, red.marked, bm, g).expect("checked by plan_overflow");
                cost8 += ((red.marked - r).pow(2) + (gm - g).pow(2) + (bm - b).pow(2)) as u32;
            }
        }
    }
    ModeStats { safe: true, cost8, cap4 }
}

fn unit_stats(scheme: SchemeId, cover: &ColorImage) -> Result<Vec<UnitStats>> {
    let region = TraversalRegion::of(cover)?;
    let gray = to_gray(cover);
    let cgray = invariant_gray(cover);
    Ok(region
        .iter()
        .map(|(i, j)| {
            let preds = Predictions::at(scheme, cover, &gray, i, j);
            let px = cover.pixel(i, j);
            let gr = gray.get(i, j) as i32;
            let smooth = match scheme {
                SchemeId::Hou => ModeStats::default(),
                _ => mode_stats(scheme, RegionClass::Smooth, px, gr, &preds),
            };
            UnitStats {
                delta: delta_unchecked(&cgray, i, j),
                smooth,
                normal: mode_stats(scheme, RegionClass::Normal, px, gr, &preds),
            }
        })
        .collect())
}

/// Forward walk over the units of one threshold pair.
#[derive(Default)]
struct Walk {
    next: usize,
    n: usize,
    ones: usize,
    cap4: u64,
    cost8: u64,
}

impl Walk {
    fn advance(&mut self, stats: &[UnitStats], scheme: SchemeId, th: Thresholds, target: u64) {
        while self.cap4 < target && self.next < stats.len() {
            let u = &stats[self.next];
            self.next += 1;
            let Some(mode) = unit_mode(scheme, u.delta, th) else {
                continue;
            };
            let m = if mode == RegionClass::Smooth { u.smooth } else { u.normal };
            self.n += 1;
            if m.safe {
                self.cap4 += m.cap4 as u64;
                self.cost8 += m.cost8 as u64;
            } else {
                self.ones += 1;
            }
        }
    }
}

/// Bits an adaptive binary coder needs for `n` flags with `ones` set, roughly.
fn lm_estimate(n: usize, ones: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let entropy = |p: f64| if p <= 0.0 || p >= 1.0 { 0.0 } else { -p * p.log2() - (1.0 - p) * (1.0 - p).log2() };
    let nf = n as f64;
    (nf * entropy(ones as f64 / nf) + (nf + 1.0).log2() + 2.0).ceil() as usize
}

fn candidates(scheme: SchemeId) -> Vec<Thresholds> {
    T2_GRID
        .iter()
        .flat_map(|&t2| {
            let t1_max = if scheme == SchemeId::Hou { 0 } else { t2 };
            (0..=t1_max).map(move |t1| Thresholds { t1, t2 })
        })
        .collect()
}

/// Grid pairs ordered by estimated distortion at `need_bits` secret bits.
/// Pairs whose expected capacity falls short come last, most capacious first.
pub fn rank_thresholds(scheme: SchemeId, cover: &ColorImage, need_bits: usize) -> Result<Vec<Thresholds>> {
    let stats = unit_stats(scheme, cover)?;
    let header = Header::total_bits(cover.width(), cover.height())?;
    let w = unit_index_bits(cover.width(), cover.height());

    let mut feasible: Vec<(u64, Thresholds)> = Vec::new();
    let mut short: Vec<(u64, Thresholds)> = Vec::new();
    for th in candidates(scheme) {
        let mut walk = Walk::default();
        // first reach the bare payload, then add the map it implies
        walk.advance(&stats, scheme, th, 4 * (need_bits + header) as u64);
        let map = lm_estimate(walk.n, walk.ones);
        let segments = map / MAX_INLINE_MAP;
        let target = 4 * (need_bits + header + map + segments * (w + 2)) as u64;
        walk.advance(&stats, scheme, th, target);
        if walk.cap4 >= target {
            feasible.push((walk.cost8, th));
        } else {
            short.push((u64::MAX - walk.cap4, th));
        }
    }
    feasible.sort();
    short.sort();
    Ok(feasible.into_iter().chain(short).map(|(_, th)| th).collect())
}

/// Embeds `secret` with thresholds chosen for it.
pub fn encode_auto(scheme: SchemeId, cover: &ColorImage, secret: &BitBuf) -> Result<(ColorImage, EncodeReport)> {
    let ranked = rank_thresholds(scheme, cover, secret.len())?;
    let mut best: Option<(ColorImage, EncodeReport)> = None;
    let mut successes = 0;
    let mut last_err = None;
    for th in ranked.into_iter().take(MAX_ATTEMPTS) {
        match encode_with(scheme, cover, secret, th) {
            Ok((marked, report)) => {
                let better = best.as_ref().is_none_or(|(_, b)| {
                    (report.mse, th.t2, th.t1) < (b.mse, b.thresholds.t2, b.thresholds.t1)
                });
                if better {
                    best = Some((marked, report));
                }
                successes += 1;
                if successes == VERIFY {
                    break;
                }
            }
            Err(e @ (Error::CapacityExceeded { .. } | Error::HeaderTooLarge { .. })) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or(Error::CapacityExceeded {
            needed: secret.len(),
            embedded: 0,
        })
    })
}
