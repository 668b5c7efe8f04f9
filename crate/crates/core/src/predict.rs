//! Pixel predictors.
//!
//! All context positions lie strictly south or east of the predicted pixel:
//!
//! ```text
//!          x    e    ee
//!    sw    s    se   see
//!    ssw   ss   sse
//! ```
//!
//! In forward (row-major) scan order these are not yet modified when a unit
//! is embedded, and in reverse order they are already restored when the
//! unit is decoded.

use crate::image::{Channel, ColorImage, GrayImage};

/// The nine causal samples of one channel around `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Context9 {
    pub e: i32,
    pub ee: i32,
    pub s: i32,
    pub se: i32,
    pub sw: i32,
    pub ss: i32,
    pub sse: i32,
    pub ssw: i32,
    pub see: i32,
}

impl Context9 {
    /// Gathers the context of `(i, j)`; needs `j >= 1`, `j + 2 < width`, `i + 2 < height`.
    #[inline]
    pub fn gather(img: &ColorImage, i: usize, j: usize, ch: Channel) -> Self {
        let p = |di: usize, dj: isize| img.get(i + di, (j as isize + dj) as usize, ch) as i32;
        Self {
            e: p(0, 1),
            ee: p(0, 2),
            s: p(1, 0),
            se: p(1, 1),
            sw: p(1, -1),
            ss: p(2, 0),
            sse: p(2, 1),
            ssw: p(2, -1),
            see: p(1, 2),
        }
    }

    /// All nine samples equal to `c`.
    pub fn constant(c: i32) -> Self {
        Self {
            e: c,
            ee: c,
            s: c,
            se: c,
            sw: c,
            ss: c,
            sse: c,
            ssw: c,
            see: c,
        }
    }

    fn min_max(&self) -> (i32, i32) {
        let v = [
            self.e, self.ee, self.s, self.se, self.sw, self.ss, self.sse, self.ssw, self.see,
        ];
        (*v.iter().min().unwrap(), *v.iter().max().unwrap())
    }
}

/// `round(num / den)` half away from zero, `den > 0`.
#[inline]
pub(crate) fn div_round(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    if num >= 0 {
        (2 * num + den) / (2 * den)
    } else {
        -((-2 * num + den) / (2 * den))
    }
}

/// Median edge detector.
#[inline]
pub fn med_predict(ctx: &Context9) -> i32 {
    let (e, s, se) = (ctx.e, ctx.s, ctx.se);
    if se >= e.max(s) {
        e.min(s)
    } else if se <= e.min(s) {
        e.max(s)
    } else {
        s + e - se
    }
}

/// Common denominator of the four gradient normalizers (9, 7, 6, 5).
const GRAD_SCALE: i64 = 630;

/// The four directional gradients scaled by 630, in the fixed tie-break
/// order H, V, +45, -45, each paired with its candidate pixel.
#[inline]
pub fn agsp_gradients(c: &Context9) -> [(i64, i32); 4] {
    let d = |a: i32, b: i32| (a - b).abs() as i64;
    let h = 2 * d(c.e, c.ee) + 2 * d(c.s, c.se) + 2 * d(c.s, c.sw) + d(c.ss, c.sse) + d(c.ss, c.ssw)
        + d(c.se, c.see);
    let v = 2 * d(c.e, c.se) + 2 * d(c.s, c.ss) + d(c.sw, c.ssw) + d(c.ee, c.see) + d(c.se, c.sse);
    let p45 = 2 * d(c.e, c.s) + 2 * d(c.s, c.ssw) + d(c.se, c.ss) + d(c.ee, c.see);
    let m45 = 2 * d(c.e, c.see) + 2 * d(c.s, c.sse) + d(c.sw, c.ss);
    [
        (h * (GRAD_SCALE / 9) + GRAD_SCALE, c.e),
        (v * (GRAD_SCALE / 7) + GRAD_SCALE, c.s),
        (p45 * (GRAD_SCALE / 6) + GRAD_SCALE, c.sw),
        (m45 * (GRAD_SCALE / 5) + GRAD_SCALE, c.se),
    ]
}

/// Accurate gradient selective prediction: blend the candidates of the two
/// flattest directions, each weighted by the other's gradient.
#[inline]
pub fn agsp_predict(ctx: &Context9) -> i32 {
    let g = agsp_gradients(ctx);
    // stable selection of the two smallest, earlier direction wins ties
    let (mut a, mut b) = (0usize, 1usize);
    if g[b].0 < g[a].0 {
        std::mem::swap(&mut a, &mut b);
    }
    for k in 2..4 {
        if g[k].0 < g[a].0 {
            b = a;
            a = k;
        } else if g[k].0 < g[b].0 {
            b = k;
        }
    }
    let (d1, c1) = g[a];
    let (d2, c2) = g[b];
    div_round(d1 * c2 as i64 + d2 * c1 as i64, d1 + d2) as i32
}

/// The MED and AGSP predictions of one channel sample and the values the
/// two-level scheme derives from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictionPair {
    pub p_med: i32,
    pub p_agsp: i32,
    pub p1: i32,
    pub p_min: i32,
    pub p_max: i32,
}

impl PredictionPair {
    pub fn new(p_med: i32, p_agsp: i32) -> Self {
        let p1 = div_round((p_med + p_agsp) as i64, 2).clamp(0, 255) as i32;
        Self {
            p_med,
            p_agsp,
            p1,
            p_min: p_med.min(p_agsp),
            p_max: p_med.max(p_agsp),
        }
    }

    #[inline]
    pub fn from_context(ctx: &Context9) -> Self {
        Self::new(
            med_predict(ctx).clamp(0, 255),
            agsp_predict(ctx).clamp(0, 255),
        )
    }

    /// True when `v` lies strictly between the two predictions.
    #[inline]
    pub fn strictly_inside(&self, v: i32) -> bool {
        self.p_min < v && v < self.p_max
    }
}

/// Second-level prediction of the once-marked value: the nearer of the two
/// predictions when `p_wm1` is outside them, `None` when strictly inside.
#[inline]
pub fn second_level_predict(pair: &PredictionPair, p_wm1: i32) -> Option<i32> {
    if p_wm1 <= pair.p_min {
        Some(pair.p_min)
    } else if p_wm1 >= pair.p_max {
        Some(pair.p_max)
    } else {
        None
    }
}

/// Quadratic-in-gray predictor of one channel sample.
///
/// Fits `k = a + b*gr + c*gr^2` to three neighbours by least squares and
/// evaluates it at `gr_here`. With three pairwise distinct gray values the
/// fit interpolates, so the Lagrange form gives the exact rational; if any
/// two coincide the normal matrix is singular and the mean of `k` is used.
pub fn poly_predict(gr_neighbors: [i32; 3], k: [i32; 3], gr_here: i32) -> i32 {
    let [x0, x1, x2] = gr_neighbors.map(|v| v as i64);
    let [y0, y1, y2] = k.map(|v| v as i64);
    if x0 == x1 || x0 == x2 || x1 == x2 {
        return div_round(y0 + y1 + y2, 3).clamp(0, 255) as i32;
    }
    let x = gr_here as i64;
    // common denominator (x0-x1)(x0-x2)(x1-x2)
    let d01 = x0 - x1;
    let d02 = x0 - x2;
    let d12 = x1 - x2;
    let den = d01 * d02 * d12;
    let num = y0 * (x - x1) * (x - x2) * d12 - y1 * (x - x0) * (x - x2) * d02
        + y2 * (x - x0) * (x - x1) * d01;
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    div_round(num, den).clamp(0, 255) as i32
}

/// Polynomial prediction of `ch` at `(i, j)` from the neighbours
/// `(i+1, j)`, `(i, j+1)`, `(i+1, j+1)`.
#[inline]
pub fn poly_predict_at(img: &ColorImage, gray: &GrayImage, i: usize, j: usize, ch: Channel) -> i32 {
    let pos = [(i + 1, j), (i, j + 1), (i + 1, j + 1)];
    let gr = pos.map(|(a, b)| gray.get(a, b) as i32);
    let k = pos.map(|(a, b)| img.get(a, b, ch) as i32);
    poly_predict(gr, k, gray.get(i, j) as i32)
}

/// Range of the context, for the convex-blend property of AGSP.
pub fn context_range(ctx: &Context9) -> (i32, i32) {
    ctx.min_max()
}
