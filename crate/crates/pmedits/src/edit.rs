//! Alignments, edit distance and edit information.
//!
//! Every optimal alignment produced here comes from a DP backtrace with a
//! fixed preference order: diagonal (match or substitution), then deletion,
//! then insertion. The full table and the banded table yield the same path
//! whenever the distance fits in the band, which is what lets an encoder and a
//! decoder agree on alignments they compute independently.

use crate::strings::{Fragment, Sym};
use crate::{Error, Result};

/// A monotone lattice path from `(src.start, dst.start)` to `(src.end, dst.end)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alignment {
    pub points: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn identity(src: Fragment, dst_start: usize) -> Self {
        Alignment {
            points: (0..=src.len())
                .map(|i| (src.start + i, dst_start + i))
                .collect(),
        }
    }

    pub fn src(&self) -> Fragment {
        Fragment::new(self.points[0].0, self.points[self.points.len() - 1].0)
    }

    pub fn dst(&self) -> Fragment {
        Fragment::new(self.points[0].1, self.points[self.points.len() - 1].1)
    }

    pub fn first(&self) -> (usize, usize) {
        self.points[0]
    }

    pub fn last(&self) -> (usize, usize) {
        self.points[self.points.len() - 1]
    }

    /// Checks the step rule of the alignment definition.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Invalid("alignment has no points".into()));
        }
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ok = (b.0 == a.0 + 1 && (b.1 == a.1 + 1 || b.1 == a.1)) || (b.0 == a.0 && b.1 == a.1 + 1);
            if !ok {
                return Err(Error::Invalid(format!("bad step {a:?} -> {b:?}")));
            }
        }
        Ok(())
    }

    /// Cost against concrete strings: insertions, deletions and substitutions.
    pub fn cost(&self, x: &[Sym], y: &[Sym]) -> Result<usize> {
        self.validate()?;
        let (s, d) = (self.src(), self.dst());
        if s.end > x.len() || d.end > y.len() {
            return Err(Error::Invalid("alignment exceeds its strings".into()));
        }
        Ok(self
            .points
            .windows(2)
            .filter(|w| {
                let (a, b) = (w[0], w[1]);
                !(b.0 == a.0 + 1 && b.1 == a.1 + 1 && x[a.0] == y[a.1])
            })
            .count())
    }

    /// Cost of the sub-path between two of its points, given by index.
    pub fn cost_between(&self, from: usize, to: usize, x: &[Sym], y: &[Sym]) -> usize {
        self.points[from..=to]
            .windows(2)
            .filter(|w| {
                let (a, b) = (w[0], w[1]);
                !(b.0 == a.0 + 1 && b.1 == a.1 + 1 && x[a.0] == y[a.1])
            })
            .count()
    }

    pub fn inverse(&self) -> Alignment {
        Alignment {
            points: self.points.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// Image of a source fragment: smallest `y` at the start, and the end
    /// mapped to `dst.end` when the fragment reaches the end of the source.
    pub fn image(&self, f: Fragment) -> Result<Fragment> {
        let src = self.src();
        if !src.contains(&f) {
            return Err(Error::OutOfRange(format!(
                "fragment {f:?} outside source {src:?}"
            )));
        }
        let first_y = |x: usize| {
            let i = self.points.partition_point(|p| p.0 < x);
            self.points[i].1
        };
        let y0 = first_y(f.start);
        let y1 = if f.end == src.end { self.dst().end } else { first_y(f.end) };
        Ok(Fragment::new(y0, y1))
    }

    /// Index of the first point with source coordinate `x`.
    pub fn first_index_at(&self, x: usize) -> Option<usize> {
        let i = self.points.partition_point(|p| p.0 < x);
        (i < self.points.len() && self.points[i].0 == x).then_some(i)
    }

    /// Index of the point `(x, y)` if present.
    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        let mut i = self.first_index_at(x)?;
        while i < self.points.len() && self.points[i].0 == x {
            if self.points[i].1 == y {
                return Some(i);
            }
            i += 1;
        }
        None
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.index_of(x, y).is_some()
    }
}

/// Product of `a: X -> Y` and `b: Y -> Z`.
///
/// Walks both paths in lockstep on the shared `Y` coordinate. A `Y` character
/// that `a` inserts and `b` deletes cancels out; every emitted point `(x, z)`
/// has a witness `y` with `(x, y)` in `a` and `(y, z)` in `b`.
pub fn compose(a: &Alignment, b: &Alignment) -> Result<Alignment> {
    if a.dst() != b.src() {
        return Err(Error::DomainMismatch);
    }
    let (pa, pb) = (&a.points, &b.points);
    let (mut i, mut j) = (0usize, 0usize);
    let mut out = vec![(pa[0].0, pb[0].1)];
    loop {
        if i + 1 == pa.len() && j + 1 == pb.len() {
            break;
        }
        // Steps of `a` that leave y unchanged (deletions of X).
        if i + 1 < pa.len() && pa[i + 1].1 == pa[i].1 {
            i += 1;
        } else if j + 1 < pb.len() && pb[j + 1].0 == pb[j].0 {
            // Insertions of Z by `b`.
            j += 1;
        } else {
            // Both advance over one Y character.
            i += 1;
            j += 1;
        }
        let p = (pa[i].0, pb[j].1);
        if p != *out.last().unwrap() {
            out.push(p);
        }
    }
    Ok(Alignment { points: out })
}

/// One edit step: `cx` / `cy` are `None` for the empty side of an indel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EditRecord {
    pub x: usize,
    pub cx: Option<Sym>,
    pub y: usize,
    pub cy: Option<Sym>,
}

/// Edit information of an alignment, in path order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EditInfo {
    pub records: Vec<EditRecord>,
}

impl EditInfo {
    pub fn cost(&self) -> usize {
        self.records.len()
    }
}

pub fn edit_info(a: &Alignment, x: &[Sym], y: &[Sym]) -> EditInfo {
    let mut records = Vec::new();
    for w in a.points.windows(2) {
        let (p, q) = (w[0], w[1]);
        let cx = (q.0 == p.0 + 1).then(|| x[p.0]);
        let cy = (q.1 == p.1 + 1).then(|| y[p.1]);
        if cx != cy {
            records.push(EditRecord { x: p.0, cx, y: p.1, cy });
        }
    }
    EditInfo { records }
}

/// Rebuilds an alignment of `X[0..src_len)` onto a fragment of `Y[0..dst_len)`.
///
/// A nonempty record list determines the path. An empty list needs the
/// identity start `identity_at`, since the records alone cannot place it.
pub fn reconstruct_alignment(
    e: &EditInfo,
    src_len: usize,
    dst_len: usize,
    identity_at: Option<usize>,
) -> Result<Alignment> {
    let corrupt = |msg: &str| Error::Corrupt(format!("edit info: {msg}"));
    let Some(first) = e.records.first() else {
        let y0 = identity_at.ok_or_else(|| corrupt("empty records without identity start"))?;
        if y0 + src_len > dst_len {
            return Err(corrupt("identity alignment exceeds destination"));
        }
        return Ok(Alignment::identity(Fragment::new(0, src_len), y0));
    };
    if first.y < first.x {
        return Err(corrupt("first record implies a negative start"));
    }
    let mut pts = Vec::with_capacity(src_len + e.records.len() + 1);
    let (mut x, mut y) = (0usize, first.y - first.x);
    pts.push((x, y));
    for r in &e.records {
        if r.x < x || r.y < y || r.x - x != r.y - y {
            return Err(corrupt("records are not on a common diagonal path"));
        }
        while x < r.x {
            x += 1;
            y += 1;
            pts.push((x, y));
        }
        match (r.cx, r.cy) {
            (Some(a), Some(b)) if a != b => {
                x += 1;
                y += 1;
            }
            (Some(_), None) => x += 1,
            (None, Some(_)) => y += 1,
            _ => return Err(corrupt("record does not describe an edit")),
        }
        if x > src_len || y > dst_len {
            return Err(corrupt("record outside the strings"));
        }
        pts.push((x, y));
    }
    while x < src_len {
        x += 1;
        y += 1;
        pts.push((x, y));
    }
    if y > dst_len {
        return Err(corrupt("alignment runs past the destination"));
    }
    Ok(Alignment { points: pts })
}

/// Checks that the records agree with concrete strings at their positions.
pub fn edit_info_consistent(e: &EditInfo, x: &[Sym], y: &[Sym]) -> bool {
    e.records.iter().all(|r| {
        r.cx.is_none_or(|c| x.get(r.x) == Some(&c)) && r.cy.is_none_or(|c| y.get(r.y) == Some(&c))
    })
}

fn backtrace(
    n: usize,
    m: usize,
    x: &[Sym],
    y: &[Sym],
    get: impl Fn(usize, usize) -> u32,
) -> Vec<(usize, usize)> {
    let (mut i, mut j) = (n, m);
    let mut pts = vec![(i, j)];
    while i > 0 || j > 0 {
        // A match never costs more than its diagonal predecessor.
        if i > 0 && j > 0 && x[i - 1] == y[j - 1] {
            i -= 1;
            j -= 1;
            pts.push((i, j));
            continue;
        }
        let d = get(i, j);
        if i > 0 && j > 0 && get(i - 1, j - 1) + u32::from(x[i - 1] != y[j - 1]) == d {
            i -= 1;
            j -= 1;
        } else if i > 0 && get(i - 1, j) + 1 == d {
            i -= 1;
        } else {
            debug_assert!(j > 0 && get(i, j - 1) + 1 == d);
            j -= 1;
        }
        pts.push((i, j));
    }
    pts.reverse();
    pts
}

fn shift(points: Vec<(usize, usize)>, dx: usize, dy: usize) -> Alignment {
    Alignment {
        points: points.into_iter().map(|(a, b)| (a + dx, b + dy)).collect(),
    }
}

/// Full-table edit distance with one optimal alignment.
pub fn edit_distance_full(x: &[Sym], y: &[Sym]) -> (usize, Alignment) {
    let (n, m) = (x.len(), y.len());
    let w = m + 1;
    let mut d = vec![0u32; (n + 1) * w];
    for j in 0..=m {
        d[j] = j as u32;
    }
    for i in 1..=n {
        d[i * w] = i as u32;
        for j in 1..=m {
            let sub = d[(i - 1) * w + j - 1] + u32::from(x[i - 1] != y[j - 1]);
            let del = d[(i - 1) * w + j] + 1;
            let ins = d[i * w + j - 1] + 1;
            d[i * w + j] = sub.min(del).min(ins);
        }
    }
    let pts = backtrace(n, m, x, y, |i, j| d[i * w + j]);
    (d[n * w + m] as usize, Alignment { points: pts })
}

/// Plain distance, linear memory.
pub fn edit_distance(x: &[Sym], y: &[Sym]) -> usize {
    let mut row: Vec<usize> = (0..=y.len()).collect();
    for i in 1..=x.len() {
        let mut diag = row[0];
        row[0] = i;
        for j in 1..=y.len() {
            let up = row[j];
            row[j] = (diag + usize::from(x[i - 1] != y[j - 1])).min(up + 1).min(row[j - 1] + 1);
            diag = up;
        }
    }
    row[y.len()]
}

/// DP table restricted to the band `|i - j| <= k`, values capped at `k + 1`.
///
/// Exact wherever the true value is at most `k`.
pub(crate) struct Band {
    k: usize,
    width: usize,
    rows: usize,
    cols: usize,
    cells: Vec<u32>,
}

impl Band {
    pub(crate) fn fill(x: &[Sym], y: &[Sym], k: usize) -> Band {
        let (rows, cols) = (x.len() + 1, y.len() + 1);
        let width = 2 * k + 1;
        let cap = (k + 1) as u32;
        let mut cells = vec![cap; rows * width];
        for j in 0..cols.min(k + 1) {
            cells[j + k] = j as u32;
        }
        for i in 1..rows {
            let lo = i.saturating_sub(k);
            let hi = (i + k).min(cols - 1);
            let base = i * width;
            let prev = (i - 1) * width;
            for j in lo..=hi {
                // Column j sits at offset j + k - i in row i.
                let o = j + k - i;
                let mut v = cap;
                if j == 0 {
                    v = v.min(i as u32);
                } else {
                    // (i-1, j-1) has the same offset in the previous row.
                    v = v.min(cells[prev + o] + u32::from(x[i - 1] != y[j - 1]));
                    if o > 0 {
                        v = v.min(cells[base + o - 1] + 1);
                    }
                }
                if o + 1 < width {
                    v = v.min(cells[prev + o + 1] + 1);
                }
                cells[base + o] = v.min(cap);
            }
        }
        Band { k, width, rows, cols, cells }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> u32 {
        if i >= self.rows || j >= self.cols || j + self.k < i || j > i + self.k {
            return (self.k + 1) as u32 * 4;
        }
        self.cells[i * self.width + j + self.k - i]
    }

    /// Optimal path from `(0, 0)` to `(i, j)`; the caller ensures `get(i, j) <= k`.
    pub(crate) fn path_to(&self, x: &[Sym], y: &[Sym], i: usize, j: usize) -> Vec<(usize, usize)> {
        backtrace(i, j, x, y, |a, b| self.get(a, b))
    }

    /// Number of distinct optimal paths from `(0, 0)` to `(i, j)`, saturating at 2.
    #[cfg(test)]
    pub(crate) fn count_optimal_paths(&self, x: &[Sym], y: &[Sym], i_end: usize, j_end: usize) -> u8 {
        let mut cnt = vec![0u8; self.rows * self.width];
        cnt[self.k] = 1;
        for i in 0..=i_end {
            let lo = i.saturating_sub(self.k);
            let hi = (i + self.k).min(j_end);
            for j in lo..=hi {
                if i == 0 && j == 0 {
                    continue;
                }
                let d = self.get(i, j);
                if d > self.k as u32 {
                    continue;
                }
                let mut c = 0u8;
                let mut add = |a: usize, b: usize, w: u32| {
                    if self.get(a, b) + w == d {
                        c = c.saturating_add(cnt[a * self.width + b + self.k - a]).min(2);
                    }
                };
                if i > 0 && j > 0 {
                    add(i - 1, j - 1, u32::from(x[i - 1] != y[j - 1]));
                }
                if i > 0 && j + self.k > i - 1 {
                    add(i - 1, j, 1);
                }
                if j > 0 && j - 1 + self.k >= i {
                    add(i, j - 1, 1);
                }
                cnt[i * self.width + j + self.k - i] = c;
            }
        }
        cnt[i_end * self.width + j_end + self.k - i_end]
    }
}

/// Edit distance if it is at most `k`, with the canonical optimal alignment.
pub fn edit_distance_bounded(x: &[Sym], y: &[Sym], k: usize) -> Option<(usize, Alignment)> {
    if x.len().abs_diff(y.len()) > k {
        return None;
    }
    let band = Band::fill(x, y, k);
    let d = band.get(x.len(), y.len());
    if d as usize > k {
        return None;
    }
    let pts = band.path_to(x, y, x.len(), y.len());
    Some((d as usize, Alignment { points: pts }))
}

/// Distances `δ(x, y[..j])` for every `j` where the distance is at most `k`,
/// as `(j, cost)` pairs in increasing `j`.
///
/// Landau-Vishkin diagonal extension with direct character comparisons:
/// `O(k^2)` plus the total length of the slides.
pub fn prefix_ends_within(x: &[Sym], y: &[Sym], k: usize) -> Vec<(usize, usize)> {
    let (n, m) = (x.len() as i64, y.len() as i64);
    let ki = k as i64;
    const NONE: i64 = i64::MIN / 4;
    // Diagonal d = j - i lives at index d + k + 1, with one guard on each side.
    let size = 2 * k + 3;
    let mut cur = vec![NONE; size];
    let mut prev = vec![NONE; size];
    let mut best = vec![usize::MAX; 2 * k + 1];
    let slide = |mut i: i64, d: i64| -> i64 {
        while i < n && i + d < m && x[i as usize] == y[(i + d) as usize] {
            i += 1;
        }
        i
    };
    for e in 0..=ki {
        for d in -e..=e {
            let idx = (d + ki + 1) as usize;
            let row = if e == 0 {
                0
            } else {
                let sub = prev[idx] + 1;
                let del = prev[idx + 1] + 1;
                let ins = prev[idx - 1];
                sub.max(del).max(ins)
            };
            if row < 0.max(-d) {
                cur[idx] = NONE;
                continue;
            }
            let row = row.min(n).min(m - d);
            if row < 0.max(-d) {
                cur[idx] = NONE;
                continue;
            }
            let row = slide(row, d);
            cur[idx] = row;
            if row == n {
                let b = &mut best[(d + ki) as usize];
                if *b == usize::MAX {
                    *b = e as usize;
                }
            }
        }
        std::mem::swap(&mut cur, &mut prev);
        cur.iter_mut().for_each(|v| *v = NONE);
    }
    let mut out = Vec::new();
    for (o, &c) in best.iter().enumerate() {
        if c != usize::MAX {
            let j = n + o as i64 - ki;
            out.push((j as usize, c));
        }
    }
    out
}

/// A k-edit occurrence `T[start..end)` with its optimal cost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostedOccurrence {
    pub start: usize,
    pub end: usize,
    pub cost: usize,
    pub alignment: Option<Alignment>,
}

impl CostedOccurrence {
    pub fn new(start: usize, end: usize, cost: usize) -> Self {
        CostedOccurrence { start, end, cost, alignment: None }
    }

    pub fn key(&self) -> (usize, usize, usize) {
        (self.start, self.end, self.cost)
    }
}

/// Furthest-reaching rows of the DP from `(0, 0)`: `rows[e][d + k]` is the
/// last `i` with `D(i, i + d) <= e`. Distances are nondecreasing along a
/// diagonal, so any cell with distance at most `k` can be read off.
struct Reach {
    k: usize,
    rows: Vec<i64>,
}

impl Reach {
    const NONE: i64 = i64::MIN / 4;

    fn new(x: &[Sym], y: &[Sym], k: usize) -> Reach {
        let (n, m) = (x.len() as i64, y.len() as i64);
        let ki = k as i64;
        let w = 2 * k + 1;
        let mut rows = vec![Self::NONE; (k + 1) * w];
        for e in 0..=ki {
            for d in -e..=e {
                let at = |e: i64, d: i64| -> i64 {
                    if d.abs() > e || d.abs() > ki {
                        Self::NONE
                    } else {
                        rows[e as usize * w + (d + ki) as usize]
                    }
                };
                let row = if e == 0 {
                    0
                } else {
                    (at(e - 1, d) + 1).max(at(e - 1, d + 1) + 1).max(at(e - 1, d - 1))
                };
                let row = row.min(n).min(m - d);
                let v = if row < 0.max(-d) {
                    Self::NONE
                } else {
                    let mut i = row;
                    while i < n && i + d < m && x[i as usize] == y[(i + d) as usize] {
                        i += 1;
                    }
                    i
                };
                rows[e as usize * w + (d + ki) as usize] = v;
            }
        }
        Reach { k, rows }
    }

    fn dist(&self, i: usize, j: usize) -> u32 {
        let cap = 4 * (self.k as u32 + 1);
        let d = j as i64 - i as i64;
        if d.unsigned_abs() as usize > self.k {
            return cap;
        }
        let w = 2 * self.k + 1;
        let col = (d + self.k as i64) as usize;
        let (mut lo, mut hi) = (0usize, self.k + 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.rows[mid * w + col] >= i as i64 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if lo > self.k {
            cap
        } else {
            lo as u32
        }
    }
}

/// Canonical optimal alignment of `p` onto `t[start..end)`, in absolute coordinates.
///
/// Same path as [`edit_distance_bounded`], read from a diagonal-reach table
/// instead of the full band.
pub fn canonical_alignment(p: &[Sym], t: &[Sym], start: usize, end: usize, k: usize) -> Option<Alignment> {
    let y = &t[start..end];
    if p.len().abs_diff(y.len()) > k {
        return None;
    }
    let reach = Reach::new(p, y, k);
    if reach.dist(p.len(), y.len()) as usize > k {
        return None;
    }
    let pts = backtrace(p.len(), y.len(), p, y, |a, b| reach.dist(a, b));
    Some(shift(pts, 0, start))
}

/// Exhaustive oracle: every `(t, t')` with `δ(p, t[t..t')) <= k`, with the
/// full-table alignment of each.
pub fn occ_edits_oracle(p: &[Sym], t: &[Sym], k: usize) -> Vec<CostedOccurrence> {
    let (m, n) = (p.len(), t.len());
    let mut out = Vec::new();
    for s in 0..=n {
        let u = &t[s..];
        let w = u.len() + 1;
        let mut d = vec![0usize; (m + 1) * w];
        for j in 0..w {
            d[j] = j;
        }
        for i in 1..=m {
            d[i * w] = i;
            for j in 1..w {
                d[i * w + j] = (d[(i - 1) * w + j - 1] + usize::from(p[i - 1] != u[j - 1]))
                    .min(d[(i - 1) * w + j] + 1)
                    .min(d[i * w + j - 1] + 1);
            }
        }
        for j in 0..w {
            let c = d[m * w + j];
            if c <= k {
                let (c2, a) = edit_distance_full(p, &u[..j]);
                debug_assert_eq!(c, c2);
                out.push(CostedOccurrence {
                    start: s,
                    end: s + j,
                    cost: c,
                    alignment: Some(shift(a.points, 0, s)),
                });
            }
        }
    }
    out
}

/// Sentinel symbol for the suffix/prefix reductions; never a valid input code.
const SENTINEL: Sym = Sym::MAX;

/// `min_y δ(p, t[y..))` if it is at most `k`, with the minimizing `y`.
///
/// Aligns `$^{2k} p` against the last `|p| + k` characters of `t`: every
/// sentinel costs exactly one, and the number of text characters absorbed by
/// sentinels is the start of the best suffix.
pub fn suffix_min_edit(p: &[Sym], t: &[Sym], k: usize) -> Option<(usize, usize)> {
    let off = t.len().saturating_sub(p.len() + k);
    let tt = &t[off..];
    let mut x = vec![SENTINEL; 2 * k];
    x.extend_from_slice(p);
    let (d, a) = edit_distance_bounded(&x, tt, 3 * k)?;
    if d < 2 * k {
        return None;
    }
    let y = a.points[a.points.partition_point(|q| q.0 < 2 * k)].1;
    Some((d - 2 * k, off + y))
}

/// `min_y δ(p, t[..y))` if it is at most `k`, with the minimizing `y`.
pub fn prefix_min_edit(p: &[Sym], t: &[Sym], k: usize) -> Option<(usize, usize)> {
    let rp: Vec<Sym> = p.iter().rev().copied().collect();
    let rt: Vec<Sym> = t.iter().rev().copied().collect();
    let (d, y) = suffix_min_edit(&rp, &rt, k)?;
    Some((d, t.len() - y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicMode {
    /// Any substring of `q^∞`.
    Substring,
    /// Prefixes of `q^∞` only.
    Prefix,
}

/// Best match of `s` against `q^∞`: cost and the matched window `[start, end)`
/// of `q^∞`, with `start < |q|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicFit {
    pub cost: usize,
    pub start: usize,
    pub end: usize,
}

/// `ed_periodic` restricted to costs at most `bound`.
///
/// The optimal window can be shifted by whole periods to start before `|q|`,
/// so the DP fixes free starts to `[0, |q|)` and keeps the band
/// `-bound <= j - i < |q| + bound`. Work is `O(|s| (|q| + bound))`.
pub fn ed_periodic_bounded(s: &[Sym], q: &[Sym], mode: PeriodicMode, bound: usize) -> Option<PeriodicFit> {
    assert!(!q.is_empty(), "period must be nonempty");
    let ql = q.len();
    let free = match mode {
        PeriodicMode::Substring => ql,
        PeriodicMode::Prefix => 1,
    };
    let lo = -(bound as i64);
    let hi = (free - 1 + bound) as i64;
    let width = (hi - lo + 1) as usize;
    let cap = (bound + 1) as u32;
    let ulen = free + s.len() + bound;
    let u = |j: usize| q[j % ql];
    // Cell (i, j) at row i, offset j - i - lo. Each cell also tracks its start column.
    let mut cur = vec![(cap, 0u32); width];
    let mut prev = vec![(cap, 0u32); width];
    for o in 0..width {
        let j = o as i64 + lo;
        if j < 0 || j as usize > ulen {
            continue;
        }
        let j = j as usize;
        cur[o] = if j < free {
            (0, j as u32)
        } else {
            (((j - (free - 1)) as u32).min(cap), (free - 1) as u32)
        };
    }
    for i in 1..=s.len() {
        std::mem::swap(&mut cur, &mut prev);
        for o in 0..width {
            let j = i as i64 + o as i64 + lo;
            if j < 0 || j as usize > ulen {
                cur[o] = (cap, 0);
                continue;
            }
            let j = j as usize;
            let mut best = (cap, 0u32);
            if j > 0 {
                // (i-1, j-1) shares offset o.
                let (v, st) = prev[o];
                let c = v + u32::from(s[i - 1] != u(j - 1));
                if c < best.0 {
                    best = (c, st);
                }
            }
            if o + 1 < width {
                let (v, st) = prev[o + 1];
                if v + 1 < best.0 {
                    best = (v + 1, st);
                }
            }
            if o > 0 && j > 0 {
                let (v, st) = cur[o - 1];
                if v + 1 < best.0 {
                    best = (v + 1, st);
                }
            }
            if j == 0 {
                let c = i as u32;
                if c < best.0 {
                    best = (c, 0);
                }
            }
            cur[o] = (best.0.min(cap), best.1);
        }
    }
    let i = s.len();
    let mut fit: Option<PeriodicFit> = None;
    for o in 0..width {
        let j = i as i64 + o as i64 + lo;
        if j < 0 || j as usize > ulen {
            continue;
        }
        let (v, st) = cur[o];
        if v <= bound as u32 && fit.is_none_or(|f| (v as usize) < f.cost) {
            fit = Some(PeriodicFit { cost: v as usize, start: st as usize, end: j as usize });
        }
    }
    fit
}

/// Exact distance from `s` to the closest substring (or prefix) of `q^∞`.
pub fn ed_periodic(s: &[Sym], q: &[Sym], mode: PeriodicMode) -> usize {
    ed_periodic_fit(s, q, mode).cost
}

pub fn ed_periodic_fit(s: &[Sym], q: &[Sym], mode: PeriodicMode) -> PeriodicFit {
    // The empty window always costs |s|, so `|s|` is a safe bound.
    ed_periodic_bounded(s, q, mode, s.len()).expect("cost |s| is always attainable")
}

/// `ed_periodic(s[..L], q, Substring)` for every `L` in `0..=|s|`.
///
/// Keeps one row of costs indexed by the phase of the end of the matched
/// window in `q^∞`; insertions wrap around the phase cycle, so each row is
/// relaxed once around the cycle starting from its minimum.
pub fn periodic_prefix_profile(s: &[Sym], q: &[Sym]) -> Vec<usize> {
    assert!(!q.is_empty(), "period must be nonempty");
    let ql = q.len();
    let mut row = vec![0usize; ql];
    let mut next = vec![0usize; ql];
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push(0);
    for &c in s {
        for ph in 0..ql {
            let back = if ph == 0 { ql - 1 } else { ph - 1 };
            next[ph] = (row[back] + usize::from(c != q[back])).min(row[ph] + 1);
        }
        let start = (0..ql).min_by_key(|&ph| next[ph]).unwrap();
        for step in 1..ql {
            let ph = (start + step) % ql;
            let back = if ph == 0 { ql - 1 } else { ph - 1 };
            next[ph] = next[ph].min(next[back] + 1);
        }
        out.push(next[start]);
        std::mem::swap(&mut row, &mut next);
    }
    out
}
