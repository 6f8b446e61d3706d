use super::{BlackIndexing, WeightFunction};
use crate::compress::{expand, lz_bounded_prefix, lz_leftmost, truncate, Direction, Factorization, Phrase};
use crate::compress::selfed_prefix_costs;
use crate::strings::Sym;
use crate::{Error, Result};

/// A fragment of the window stored as greedy phrases, read from `start`
/// in direction `dir` (rightwards for forward fragments, leftwards otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnedFragment {
    pub start: usize,
    pub dir: Direction,
    pub phrases: Factorization,
}

impl LearnedFragment {
    pub fn forward(t: &[Sym], lo: usize, hi_incl: usize) -> Self {
        LearnedFragment { start: lo, dir: Direction::Forward, phrases: lz_leftmost(&t[lo..=hi_incl]) }
    }

    pub fn len(&self) -> usize {
        self.phrases.iter().map(Phrase::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Window positions `[lo, hi)` covered by the fragment, if they fit.
    pub fn span(&self) -> Option<(usize, usize)> {
        let len = self.len();
        match self.dir {
            Direction::Forward => Some((self.start, self.start.checked_add(len)?)),
            Direction::Reversed => Some(((self.start + 1).checked_sub(len)?, self.start + 1)),
        }
    }

    /// `(position, symbol)` pairs of the fragment.
    pub fn symbols(&self) -> Option<Vec<(usize, Sym)>> {
        let s = expand(&self.phrases)?;
        let (lo, _) = self.span()?;
        Some(match self.dir {
            Direction::Forward => s.into_iter().enumerate().map(|(d, c)| (lo + d, c)).collect(),
            Direction::Reversed => s.into_iter().enumerate().map(|(d, c)| (self.start - d, c)).collect(),
        })
    }
}

/// Chosen set of black components with the fragments that spell them out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCover {
    pub fragments: Vec<LearnedFragment>,
    /// Per black component: whether its character is known from the fragments.
    pub learned: Vec<bool>,
}

impl PeriodCover {
    pub fn learned_count(&self) -> usize {
        self.learned.iter().filter(|&&b| b).count()
    }
}

/// Components with a black `T` position inside some fragment, and their symbols.
pub fn covered_components(
    idx: &BlackIndexing,
    fragments: &[LearnedFragment],
    n: usize,
) -> Result<(Vec<bool>, Vec<Option<Sym>>)> {
    let mut sym: Vec<Option<Sym>> = vec![None; idx.bc];
    for f in fragments {
        let bad = || Error::Corrupt("learned fragment does not fit the window".into());
        let (_, hi) = f.span().ok_or_else(bad)?;
        if hi > n {
            return Err(bad());
        }
        for (y, c) in f.symbols().ok_or_else(bad)? {
            if let Some(comp) = idx.comp_of_t[y] {
                match sym[comp] {
                    Some(prev) if prev != c => {
                        return Err(Error::Corrupt(format!("component {comp} learned with two symbols")));
                    }
                    _ => sym[comp] = Some(c),
                }
            }
        }
    }
    Ok((sym.iter().map(Option::is_some).collect(), sym))
}

fn taus0(idx: &BlackIndexing) -> Vec<usize> {
    idx.t_black[..idx.bc].to_vec()
}

/// Largest `c ∈ [from, hi]` with `|LZ(T[s..=τ_0^c])| <= bound`, where `s` is
/// `τ_0^from`, or `τ_0^from + 1` when `open`. With `open` the result may be
/// `from` itself, meaning an empty fragment.
fn reach_forward(t: &[Sym], taus: &[usize], from: usize, hi: usize, bound: usize, open: bool) -> (usize, Option<LearnedFragment>) {
    let s = taus[from] + usize::from(open);
    if bound == 0 || s >= t.len() {
        return (from, None);
    }
    let lz = lz_bounded_prefix(t, s, bound, Direction::Forward);
    let last = (from..=hi).take_while(|&c| taus[c] < s + lz.extent).last().unwrap_or(from);
    if open && last == from {
        return (from, None);
    }
    let len = taus[last] + 1 - s;
    let frag = LearnedFragment { start: s, dir: Direction::Forward, phrases: truncate(&lz.phrases, len) };
    (last, Some(frag))
}

/// Smallest `c ∈ [lo, to]` with `|LZ(rev T[τ_0^c..=τ_0^to])| <= bound`.
fn reach_backward(t: &[Sym], taus: &[usize], to: usize, lo: usize, bound: usize) -> (usize, Option<LearnedFragment>) {
    if bound == 0 {
        return (to, None);
    }
    let s = taus[to];
    let lz = lz_bounded_prefix(t, s, bound, Direction::Reversed);
    let first = (lo..=to).rev().take_while(|&c| taus[c] + lz.extent > s).last().unwrap_or(to);
    let len = s + 1 - taus[first];
    let frag = LearnedFragment { start: s, dir: Direction::Reversed, phrases: truncate(&lz.phrases, len) };
    (first, Some(frag))
}

/// Period cover built from bounded-size greedy factorizations, reading only
/// the window positions it ends up storing (plus one phrase of lookahead).
pub fn cover_recursive(t: &[Sym], idx: &BlackIndexing, wf: &WeightFunction, k: usize) -> Result<PeriodCover> {
    let bc = idx.bc;
    let taus = taus0(idx);
    let z = 12 * wf.total + 22 * k;
    let mut frags = Vec::new();
    frags.extend(reach_forward(t, &taus, 0, bc - 1, z, false).1);
    frags.extend(reach_backward(t, &taus, bc - 1, 0, z).1);
    frags.extend(reach_backward(t, &taus, idx.c_last, 0, z).1);
    if idx.c_last + 1 < bc {
        frags.extend(reach_forward(t, &taus, idx.c_last + 1, bc - 1, z, false).1);
    }
    let mut stack = vec![(0usize, bc - 1)];
    while let Some((i, j)) = stack.pop() {
        let w = wf.window_sum(i, j);
        if w == 0 {
            continue;
        }
        if i == j {
            frags.push(LearnedFragment::forward(t, taus[i], taus[i]));
            continue;
        }
        let h = (i + j) / 2;
        frags.extend(reach_backward(t, &taus, h, i, 12 * w).1);
        frags.extend(reach_forward(t, &taus, h, j, 12 * w, true).1);
        stack.push((h + 1, j));
        stack.push((i, h));
    }
    let (learned, _) = covered_components(idx, &frags, t.len())?;
    Ok(PeriodCover { fragments: frags, learned })
}

const COND_PREFIX: u8 = 1;
const COND_SUFFIX: u8 = 2;
const COND_LAST_SUFFIX: u8 = 4;
const COND_LAST_PREFIX: u8 = 8;
const COND_WEIGHT: u8 = 16;

/// Calls `f(a, b, conditions)` for every interval `[a, b]` meeting at least
/// one of the five covering conditions.
fn for_each_qualifying(t: &[Sym], idx: &BlackIndexing, wf: &WeightFunction, k: usize, mut f: impl FnMut(usize, usize, u8)) {
    let bc = idx.bc;
    let taus = taus0(idx);
    let th = 6 * wf.total + 11 * k;
    let last = idx.c_last;
    for a in 0..bc {
        let costs = selfed_prefix_costs(&t[taus[a]..=taus[bc - 1]]);
        for b in a..bc {
            let se = costs[taus[b] - taus[a] + 1];
            let mut mask = 0u8;
            if se <= th {
                if a == 0 {
                    mask |= COND_PREFIX;
                }
                if b == bc - 1 {
                    mask |= COND_SUFFIX;
                }
                if b == last {
                    mask |= COND_LAST_SUFFIX;
                }
                if a == last + 1 {
                    mask |= COND_LAST_PREFIX;
                }
            }
            if se <= 6 * wf.window_sum(a, b) {
                mask |= COND_WEIGHT;
            }
            if mask != 0 {
                f(a, b, mask);
            }
        }
    }
}

/// Exact check that `learned` contains every interval meeting a covering
/// condition. Quadratic in the window per component; meant for tests.
pub fn is_period_cover(t: &[Sym], idx: &BlackIndexing, wf: &WeightFunction, k: usize, learned: &[bool]) -> bool {
    let mut unlearned = vec![0usize; idx.bc + 1];
    for c in 0..idx.bc {
        unlearned[c + 1] = unlearned[c] + usize::from(!learned[c]);
    }
    let mut ok = true;
    for_each_qualifying(t, idx, wf, k, |a, b, _| {
        if unlearned[b + 1] > unlearned[a] {
            ok = false;
        }
    });
    ok
}

/// The smallest period cover: the union of all qualifying intervals, stored
/// through a selection of intervals that overlap at most twice.
pub fn cover_minimal(t: &[Sym], idx: &BlackIndexing, wf: &WeightFunction, k: usize) -> Result<PeriodCover> {
    let bc = idx.bc;
    let taus = taus0(idx);
    let mut boundary: [Option<(usize, usize)>; 4] = [None; 4];
    let mut widest = vec![None::<usize>; bc];
    for_each_qualifying(t, idx, wf, k, |a, b, mask| {
        for (slot, bit, prefer_b) in [
            (0, COND_PREFIX, true),
            (1, COND_SUFFIX, false),
            (2, COND_LAST_SUFFIX, false),
            (3, COND_LAST_PREFIX, true),
        ] {
            if mask & bit != 0 {
                let better = match boundary[slot] {
                    None => true,
                    Some((a0, b0)) => if prefer_b { b > b0 } else { a < a0 },
                };
                if better {
                    boundary[slot] = Some((a, b));
                }
            }
        }
        if mask & COND_WEIGHT != 0 {
            widest[a] = Some(widest[a].map_or(b, |x: usize| x.max(b)));
        }
    });
    let mut chosen: Vec<(usize, usize)> = boundary.iter().flatten().copied().collect();
    let ivs: Vec<(usize, usize)> = widest.iter().enumerate().filter_map(|(a, b)| b.map(|b| (a, b))).collect();
    if let Some(&first) = ivs.first() {
        let mut cur = first;
        chosen.push(cur);
        loop {
            let (aj, bj) = cur;
            let overlap = ivs.iter().filter(|&&(a, b)| aj < a && a <= bj && bj < b).max_by_key(|&&(_, b)| b);
            let next = overlap.or_else(|| ivs.iter().find(|&&(a, _)| a > bj));
            match next {
                Some(&iv) => {
                    chosen.push(iv);
                    cur = iv;
                }
                None => break,
            }
        }
    }
    chosen.sort_unstable();
    chosen.dedup();
    let frags: Vec<LearnedFragment> =
        chosen.iter().map(|&(a, b)| LearnedFragment::forward(t, taus[a], taus[b])).collect();
    let (learned, _) = covered_components(idx, &frags, t.len())?;
    Ok(PeriodCover { fragments: frags, learned })
}
