//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use pmedits::edit::{edit_info, Alignment, CostedOccurrence, PeriodicMode};
use pmedits::graph::{
    black_indexing, build_graph, cover_minimal, cover_recursive, is_period_cover, mask, weight_covers,
    weight_function, AlignmentGraph, AlignmentSet,
};
use pmedits::sketch::structure_window;
use pmedits::Sym;
use rand::Rng;

/// Plain quadratic edit distance.
pub fn naive_ed(x: &[Sym], y: &[Sym]) -> usize {
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    for i in 1..=x.len() {
        let mut cur = vec![i; y.len() + 1];
        for j in 1..=y.len() {
            cur[j] = (prev[j - 1] + usize::from(x[i - 1] != y[j - 1])).min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[y.len()]
}

/// Every `(start, end, cost)` with `ed(p, t[start..end)) <= k`: one full
/// table per start, read off its last row.
pub fn naive_occ(p: &[Sym], t: &[Sym], k: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for s in 0..=t.len() {
        let y = &t[s..];
        let mut row: Vec<usize> = (0..=y.len()).collect();
        for (i, &c) in p.iter().enumerate() {
            let mut next = vec![i + 1; y.len() + 1];
            for j in 1..=y.len() {
                next[j] = (row[j - 1] + usize::from(c != y[j - 1])).min(row[j] + 1).min(next[j - 1] + 1);
            }
            row = next;
        }
        out.extend(row.iter().enumerate().filter(|(_, &d)| d <= k).map(|(j, &d)| (s, s + j, d)));
    }
    out
}

/// Minimum over every window of `q^∞` of bounded length.
pub fn brute_periodic(x: &[Sym], q: &[Sym], mode: PeriodicMode) -> usize {
    let starts = match mode {
        PeriodicMode::Substring => q.len(),
        PeriodicMode::Prefix => 1,
    };
    let unrolled: Vec<Sym> = q.iter().copied().cycle().take(2 * x.len() + 2 * q.len()).collect();
    (0..starts)
        .flat_map(|st| (st..=st + 2 * x.len()).map(move |e| (st, e)))
        .map(|(st, e)| naive_ed(x, &unrolled[st..e]))
        .min()
        .unwrap()
}

pub fn keys(v: &[CostedOccurrence]) -> Vec<(usize, usize, usize)> {
    v.iter().map(CostedOccurrence::key).collect()
}

/// Cost of a path, checked step by step.
pub fn path_cost(a: &Alignment, x: &[Sym], y: &[Sym]) -> Option<usize> {
    let mut cost = 0;
    for w in a.points.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        match (x1.checked_sub(x0)?, y1.checked_sub(y0)?) {
            (1, 1) => cost += usize::from(x[x0] != y[y0]),
            (1, 0) | (0, 1) => cost += 1,
            _ => return None,
        }
    }
    Some(cost)
}

pub fn random_string(rng: &mut impl Rng, len: usize, sigma: Sym) -> Vec<Sym> {
    (0..len).map(|_| rng.gen_range(0..sigma)).collect()
}

/// A random `(p, t)`; about half the time `t` carries edited copies of `p`.
pub fn random_instance(rng: &mut impl Rng, max_m: usize, max_n: usize, max_sigma: Sym, max_k: usize) -> (Vec<Sym>, Vec<Sym>, usize) {
    let sigma = rng.gen_range(1..=max_sigma);
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(0..=max_n);
    let k = rng.gen_range(1..=max_k);
    let p = random_string(rng, m, sigma);
    let mut t = random_string(rng, n, sigma);
    if rng.gen_bool(0.5) && sigma > 1 {
        for _ in 0..rng.gen_range(1..=3) {
            let occ = pmedits::workload::perturb(&p, rng.gen_range(0..=k), sigma, rng);
            if occ.len() <= t.len() {
                let at = rng.gen_range(0..=t.len() - occ.len());
                t[at..at + occ.len()].copy_from_slice(&occ);
            }
        }
    }
    (p, t, k)
}

/// Black-component congruence, checked on the raw graph: black characters of
/// `P_{|S}` and `T_{|S}` share a component exactly when their indices agree
/// modulo `bc`, and `|T_{|S}| ≡ |P_{|S}|`.
pub fn congruence_holds(g: &AlignmentGraph) -> bool {
    let bc = g.bc;
    let pb: Vec<usize> = (0..g.m).map(|x| g.p_vertex(x)).filter(|&v| g.is_black(v)).collect();
    let tb: Vec<usize> = (0..g.n).map(|y| g.t_vertex(y)).filter(|&v| g.is_black(v)).collect();
    if bc == 0 {
        return pb.is_empty() && tb.is_empty();
    }
    if pb.len() % bc != tb.len() % bc {
        return false;
    }
    let all: Vec<(usize, usize)> =
        pb.iter().enumerate().map(|(i, &v)| (i % bc, v)).chain(tb.iter().enumerate().map(|(i, &v)| (i % bc, v))).collect();
    let mut rep = vec![None; bc];
    let mut seen = std::collections::HashMap::new();
    for &(r, v) in &all {
        let c = g.component[v];
        match rep[r] {
            None => rep[r] = Some(c),
            Some(c0) if c0 != c => return false,
            _ => {}
        }
        if *seen.entry(c).or_insert(r) != r {
            return false;
        }
    }
    true
}

/// Everything the encoder promises about one structured window, checked
/// independently. Returns the first failure.
pub fn check_window(p: &[Sym], tw: &[Sym], k: usize, alphabet_size: usize) -> Result<WindowFacts, String> {
    let occ: Vec<CostedOccurrence> = naive_occ(p, tw, k).into_iter().map(|(s, e, c)| CostedOccurrence::new(s, e, c)).collect();
    let ws = structure_window(p, tw, &occ, k).map_err(|e| format!("structure_window: {e}"))?;
    let m = p.len();
    let mut facts = WindowFacts { set_size: ws.set.len(), bc_trace: ws.bc_trace.clone(), ..Default::default() };
    let log2 = usize::BITS as usize - (m.max(1) - 1).leading_zeros() as usize;
    if ws.set.len() > log2 + 2 {
        return Err(format!("|S| = {} exceeds ceil(log2 m) + 2 = {}", ws.set.len(), log2 + 2));
    }
    for w in ws.bc_trace.windows(2) {
        if 2 * w[1] > w[0] {
            return Err(format!("bc went from {} to {}", w[0], w[1]));
        }
    }
    // Every prefix of the growth sequence: congruence and the weight bound.
    for size in 2..=ws.set.len() {
        let sub = AlignmentSet { items: ws.set.items[..size].to_vec(), k };
        let g = build_graph(m, tw.len(), &sub).map_err(|e| e.to_string())?;
        if !congruence_holds(&g) {
            return Err(format!("congruence fails with |S| = {size}"));
        }
        if g.bc > 0 {
            let idx = black_indexing(&g, &sub).map_err(|e| e.to_string())?;
            let wf = weight_function(&sub, &idx).map_err(|e| e.to_string())?;
            if wf.total > k * size {
                return Err(format!("weight {} > k|S| = {}", wf.total, k * size));
            }
        }
    }
    let Some(idx) = ws.index.as_ref() else { return Ok(facts) };
    let wf = ws.weights.as_ref().unwrap();
    facts.weight = wf.total;
    if !weight_covers(p, tw, idx, wf) {
        return Err("weight function does not cover".into());
    }
    for (name, cover) in [("recursive", cover_recursive(tw, idx, wf, k)), ("minimal", cover_minimal(tw, idx, wf, k))] {
        let cover = cover.map_err(|e| format!("{name} cover: {e}"))?;
        if !is_period_cover(tw, idx, wf, k, &cover.learned) {
            return Err(format!("{name} cover is not a period cover"));
        }
        let mp = mask(p, tw, idx, &cover.learned, alphabet_size);
        let masked = naive_occ(&mp.p, &mp.t, k);
        if masked != keys(&occ) {
            return Err(format!("{name} masking changes the occurrence set"));
        }
        for o in &occ {
            let a = pmedits::edit::canonical_alignment(p, tw, o.start, o.end, k).unwrap();
            if edit_info(&a, p, tw) != edit_info(&a, &mp.p, &mp.t) || path_cost(&a, &mp.p, &mp.t) != Some(o.cost) {
                return Err(format!("{name} masking changes edit information at {:?}", o.key()));
            }
        }
        facts.covers_checked += 1;
    }
    Ok(facts)
}

#[derive(Debug, Default, Clone)]
pub struct WindowFacts {
    pub set_size: usize,
    pub bc_trace: Vec<usize>,
    pub weight: usize,
    pub covers_checked: usize,
}
