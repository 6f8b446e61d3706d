use super::{build_graph, AlignmentGraph, AlignmentSet, BlackIndexing, SetItem};
use crate::edit::{edit_distance, Alignment};
use crate::strings::Sym;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Per-component weights `w_S(c)` and their total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightFunction {
    pub w: Vec<usize>,
    pub total: usize,
}

impl WeightFunction {
    /// `Σ_{c=a-1}^{b} w(c)`, with `w(-1)` read as `w(bc-1)`.
    pub fn window_sum(&self, a: usize, b: usize) -> usize {
        let before = if a == 0 { self.w[self.w.len() - 1] } else { self.w[a - 1] };
        before + self.w[a..=b].iter().sum::<usize>()
    }
}

/// Running edit count along an alignment, read from its edit information.
fn cumulative_cost(it: &SetItem) -> Vec<u32> {
    let pts = &it.alignment.points;
    let mut edits = it.info.records.iter().map(|r| (r.x, r.y)).peekable();
    let mut cum = Vec::with_capacity(pts.len());
    let mut acc = 0u32;
    cum.push(0);
    for p in &pts[..pts.len() - 1] {
        while edits.peek().is_some_and(|&e| e < *p) {
            edits.next();
        }
        if edits.peek() == Some(p) {
            acc += 1;
            edits.next();
        }
        cum.push(acc);
    }
    cum
}

/// Index in `a` of the diagonal step leaving each black `P` position.
fn black_point_indices(a: &Alignment, p_black: &[usize]) -> Vec<usize> {
    let pts = &a.points;
    let mut out = Vec::with_capacity(p_black.len());
    let mut idx = 0usize;
    for &x in p_black {
        while pts[idx].0 < x || pts[idx + 1].0 == x {
            idx += 1;
        }
        out.push(idx);
    }
    out
}

/// The covering weight function built from `S` itself.
///
/// Each edge `(π_j^c, τ_i^c)` of the trimmed graph is weighted by the
/// cheapest partial cost, among alignments through it, of
/// `P[π_j^c..π_j^{c+1}) -> T[τ_i^c..τ_i^{c+1})`, and `w(c)` sums those
/// weights over component `c`. The prefix and suffix alignments add the
/// boundary terms to components `bc-1` and `c_last`.
pub fn weight_function(s: &AlignmentSet, idx: &BlackIndexing) -> Result<WeightFunction> {
    let bc = idx.bc;
    let np = idx.p_black.len();
    let cums: Vec<Vec<u32>> = s.items.iter().map(cumulative_cost).collect();
    let at: Vec<Vec<usize>> = s
        .items
        .iter()
        .map(|it| black_point_indices(&it.alignment, &idx.p_black))
        .collect();
    let mut by_shift: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, &d) in idx.deltas.iter().enumerate() {
        if d % bc != 0 {
            return Err(Error::InternalInvariantBroken(format!(
                "alignment shift {d} is not a multiple of bc = {bc}"
            )));
        }
        by_shift.entry(d).or_default().push(x);
    }
    let mut w = vec![0usize; bc];
    for members in by_shift.values() {
        for r in 0..np.saturating_sub(1) {
            let best = members
                .iter()
                .map(|&x| cums[x][at[x][r + 1]] - cums[x][at[x][r]])
                .min()
                .unwrap();
            w[r % bc] += best as usize;
        }
    }
    let (pref, suf) = (0usize, 1usize);
    let total_of = |x: usize| *cums[x].last().unwrap();
    let alpha = cums[pref][at[pref][0]] + cums[suf][at[suf][0]];
    let alpha2 = (total_of(suf) - cums[suf][at[suf][np - 1]]) + (total_of(pref) - cums[pref][at[pref][np - 1]]);
    w[bc - 1] += alpha as usize;
    w[idx.c_last] += alpha2 as usize;
    let total = w.iter().sum();
    Ok(WeightFunction { w, total })
}

/// Exhaustive check of the five covering conditions, each existential read as
/// a minimum over its finite range. Intended for small windows.
pub fn weight_covers(p: &[Sym], t: &[Sym], idx: &BlackIndexing, wf: &WeightFunction) -> bool {
    let bc = idx.bc;
    let (m0, n0, cl) = (idx.m0(), idx.n0(), idx.c_last);
    let w = &wf.w;
    for c in 0..bc {
        for j in 0..idx.m_c(c + 1) {
            for i in 0..idx.n_c(c + 1) {
                let d = edit_distance(&p[idx.pi(c, j)..idx.pi(c + 1, j)], &t[idx.tau(c, i)..idx.tau(c + 1, i)]);
                if d > w[c] {
                    return false;
                }
            }
        }
    }
    let head = &p[..idx.pi(0, 0)];
    if edit_distance(head, &t[..idx.tau(0, 0)]) > w[bc - 1] {
        return false;
    }
    for i in 1..n0 {
        let (lo, hi) = (idx.tau(bc - 1, i - 1), idx.tau(0, i));
        let best = (lo..=hi).map(|s| edit_distance(head, &t[s..hi])).min().unwrap();
        if best > w[bc - 1] {
            return false;
        }
    }
    let tail = &p[idx.pi(cl, m0 - 1)..];
    if edit_distance(tail, &t[idx.tau(cl, n0 - 1)..]) > w[cl] {
        return false;
    }
    for i in 0..n0.saturating_sub(1) {
        let (lo, hi) = (idx.tau(cl, i), idx.tau(cl + 1, i));
        let best = (lo..=hi).map(|e| edit_distance(tail, &t[lo..e])).min().unwrap();
        if best > w[cl] {
            return false;
        }
    }
    true
}

/// Whether `S` captures an occurrence starting at `start`: no black
/// components remain, or `start + π_0^0` is within `w + 3k` of some `τ_i^0`.
pub fn captures(idx: Option<&BlackIndexing>, w_total: usize, k: usize, start: usize) -> bool {
    let Some(idx) = idx else { return true };
    let target = start + idx.pi(0, 0);
    let radius = w_total + 3 * k;
    let taus: Vec<usize> = (0..idx.n0()).map(|i| idx.tau(0, i)).collect();
    let at = taus.partition_point(|&v| v < target);
    let near = |i: usize| taus.get(i).is_some_and(|&v| v.abs_diff(target) <= radius);
    near(at) || (at > 0 && near(at - 1))
}

/// The halving lemma's hypothesis for an alignment starting at `start`:
/// `|τ_i^0 - start - π_0^0| > w + 2k` for every `i ∈ [0, n0 - m0]`.
pub fn halving_hypothesis(idx: &BlackIndexing, w_total: usize, k: usize, start: usize) -> bool {
    let target = start + idx.pi(0, 0);
    let (m0, n0) = (idx.m0(), idx.n0());
    if n0 < m0 {
        return true;
    }
    (0..=n0 - m0).all(|i| idx.tau(0, i).abs_diff(target) > w_total + 2 * k)
}

/// Adds an alignment that the halving lemma applies to, rebuilds the graph
/// and checks that the number of black components at least halved.
pub fn extend_set(
    s: &AlignmentSet,
    g: &AlignmentGraph,
    idx: Option<&BlackIndexing>,
    w_total: usize,
    y: SetItem,
) -> Result<(AlignmentSet, AlignmentGraph)> {
    let Some(idx) = idx else { return Err(Error::RejectedCaptured) };
    let start = y.alignment.first().1;
    if y.cost() > s.k || !halving_hypothesis(idx, w_total, s.k, start) {
        return Err(Error::RejectedCaptured);
    }
    let mut next = s.clone();
    next.items.push(y);
    let g2 = build_graph(g.m, g.n, &next)?;
    if 2 * g2.bc > g.bc {
        return Err(Error::InternalInvariantBroken(format!(
            "black components went from {} to {} after an extension",
            g.bc, g2.bc
        )));
    }
    Ok((next, g2))
}
