//! Computing every k-edit occurrence of `P` in `T`.
//!
//! [`match_banded`] is the reference path. [`find_occurrences`] runs the
//! structural pipeline: decompose `P`, derive candidate starting positions
//! from the decomposition, then verify each candidate.

use crate::analysis::{analyze, Decomposition, Region};
use crate::edit::{canonical_alignment, ed_periodic_fit, prefix_ends_within, CostedOccurrence, PeriodicMode};
use crate::sketch::{decode, encode, DecodeOptions, EncodeOptions};
use crate::strings::{exact_occurrences, Fragment, Sym};
use crate::Result;
use std::collections::HashMap;

/// Where a range of candidate starts came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Break(usize),
    Region(usize),
    /// Starts near the progression with this residue modulo the period.
    Periodic { phase: usize },
    /// A block where the periodic structure could not be used.
    Fallback,
    All,
}

/// A range `[starts.start, starts.end)` of candidate starting positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub starts: Fragment,
    pub source: Provenance,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub entries: Vec<Candidate>,
}

impl CandidateSet {
    pub fn all(n: usize) -> Self {
        CandidateSet { entries: vec![Candidate { starts: Fragment::new(0, n + 1), source: Provenance::All }] }
    }

    /// Adds `[lo, hi]` clipped to the start domain `[0, n]`.
    fn push_around(&mut self, lo: i64, hi: i64, n: usize, source: Provenance) {
        let lo = lo.max(0);
        let hi = hi.min(n as i64);
        if lo <= hi {
            self.entries.push(Candidate { starts: Fragment::new(lo as usize, hi as usize + 1), source });
        }
    }

    /// Distinct candidate starts, ascending.
    pub fn starts(&self) -> Vec<usize> {
        let mut iv: Vec<(usize, usize)> = self.entries.iter().map(|c| (c.starts.start, c.starts.end)).collect();
        iv.sort_unstable();
        let mut out = Vec::new();
        let mut next = 0usize;
        for (lo, hi) in iv {
            for x in lo.max(next)..hi {
                out.push(x);
            }
            next = next.max(hi);
        }
        out
    }

    /// Distinct values of `⌊x/k⌋` over candidate starts.
    pub fn buckets(&self, k: usize) -> Vec<usize> {
        let k = k.max(1);
        let mut b: Vec<usize> = self.starts().into_iter().map(|x| x / k).collect();
        b.dedup();
        b
    }

    pub fn contains(&self, x: usize) -> bool {
        self.entries.iter().any(|c| (c.starts.start..c.starts.end).contains(&x))
    }
}

const HASH_MOD: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 1_000_003;

fn mul_mod(a: u64, b: u64) -> u64 {
    let r = (a as u128) * (b as u128);
    let lo = (r as u64) & HASH_MOD;
    let hi = (r >> 61) as u64;
    let s = lo + hi;
    if s >= HASH_MOD {
        s - HASH_MOD
    } else {
        s
    }
}

fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= HASH_MOD {
        s - HASH_MOD
    } else {
        s
    }
}

fn hash_of(s: &[Sym]) -> u64 {
    s.iter().fold(0, |h, &c| add_mod(mul_mod(h, HASH_BASE), u64::from(c) + 1))
}

/// Starts that can begin a k-edit occurrence: some piece of the `k + 1`
/// pieces of `P` survives unedited and occurs exactly nearby.
fn pigeonhole_candidates(p: &[Sym], t: &[Sym], k: usize) -> Vec<bool> {
    let (m, n) = (p.len(), t.len());
    let piece = m / (k + 1);
    if piece == 0 || n < piece {
        return vec![piece == 0; n + 1];
    }
    let mut by_hash: HashMap<u64, Vec<usize>> = HashMap::new();
    for i in 0..=k {
        by_hash.entry(hash_of(&p[i * piece..(i + 1) * piece])).or_default().push(i);
    }
    let mut diff = vec![0i32; n + 2];
    let mut mark = |lo: i64, hi: i64| {
        let lo = lo.max(0) as usize;
        let hi = hi.min(n as i64);
        if hi >= 0 && lo <= hi as usize {
            diff[lo] += 1;
            diff[hi as usize + 1] -= 1;
        }
    };
    let top = (0..piece - 1).fold(1u64, |a, _| mul_mod(a, HASH_BASE));
    let mut h = hash_of(&t[..piece]);
    for y in 0..=n - piece {
        if y > 0 {
            let out = mul_mod(u64::from(t[y - 1]) + 1, top);
            h = add_mod(h, HASH_MOD - out);
            h = add_mod(mul_mod(h, HASH_BASE), u64::from(t[y + piece - 1]) + 1);
        }
        if let Some(ids) = by_hash.get(&h) {
            for &i in ids {
                if p[i * piece..(i + 1) * piece] == t[y..y + piece] {
                    let base = y as i64 - (i * piece) as i64;
                    mark(base - k as i64, base + k as i64);
                }
            }
        }
    }
    let mut out = vec![false; n + 1];
    let mut run = 0i32;
    for x in 0..=n {
        run += diff[x];
        out[x] = run > 0;
    }
    out
}

/// Occurrences starting at `x`, one per end, with minimal cost.
fn occurrences_at(p: &[Sym], t: &[Sym], k: usize, x: usize) -> impl Iterator<Item = CostedOccurrence> {
    let hi = t.len().min(x + p.len() + k);
    prefix_ends_within(p, &t[x..hi], k).into_iter().map(move |(j, c)| CostedOccurrence::new(x, x + j, c))
}

/// Exact set of k-edit occurrences `(start, end, cost)`, sorted by `(start, end)`.
///
/// Filters starts by exact occurrences of `k + 1` pattern pieces, then
/// extends each surviving start with a diagonal-band edit distance.
pub fn match_banded(p: &[Sym], t: &[Sym], k: usize) -> Vec<CostedOccurrence> {
    let cand = pigeonhole_candidates(p, t, k);
    cand.iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .flat_map(|(x, _)| occurrences_at(p, t, k, x))
        .collect()
}

/// Fills in canonical optimal alignments.
pub fn attach_alignments(p: &[Sym], t: &[Sym], k: usize, occs: &mut [CostedOccurrence]) {
    for o in occs {
        o.alignment = canonical_alignment(p, t, o.start, o.end, k);
    }
}

/// Candidates from exact occurrences of every break.
pub fn candidates_breaks(p: &[Sym], t: &[Sym], k: usize, breaks: &[Fragment]) -> CandidateSet {
    let n = t.len();
    let mut h = CandidateSet::default();
    for (id, b) in breaks.iter().enumerate() {
        if b.is_empty() {
            return CandidateSet::all(n);
        }
        for x in exact_occurrences(b.slice(p), t) {
            let base = x as i64 - b.start as i64;
            h.push_around(base - k as i64, base + k as i64, n, Provenance::Break(id));
        }
    }
    h
}

/// Inputs describing a string `R` with approximate period `Q`.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicParams<'a> {
    /// The pattern's length, fixing the `k ≤ m/32` regime.
    pub m: usize,
    pub q: &'a [Sym],
    /// Start of the window of `Q^∞` that `R` is aligned to.
    pub l_r: usize,
    /// Distance from `R` to that window.
    pub fit_cost: usize,
    pub kappa: usize,
    /// Upper bound on `fit_cost` and `kappa` used for the radius `6K`.
    pub big_k: usize,
}

/// Candidate starts for κ-edit occurrences of `r` in `t`.
///
/// `t` is cut into blocks of `|R|/2 - κ` starts. In each block, every exact
/// occurrence of `Q` in the stretch that any occurrence starting in the block
/// must cover fixes a residue of possible starts modulo `|Q|`; starts within
/// `6K` of one of those residues are kept. Blocks where the structure cannot
/// be relied upon contribute all their starts.
pub fn candidates_periodic(r: &[Sym], t: &[Sym], k: usize, prm: &PeriodicParams) -> CandidateSet {
    let (n, rl, ql) = (t.len(), r.len(), prm.q.len());
    let kappa = prm.kappa;
    let mut h = CandidateSet::default();
    let block = (rl / 2).saturating_sub(kappa);
    let structured = block >= 1 && 32 * k <= prm.m && prm.fit_cost <= prm.big_k && prm.kappa <= prm.big_k && ql > 0;
    if !structured {
        h.push_around(0, n as i64, n, Provenance::Fallback);
        return h;
    }
    let radius = 6 * prm.big_k;
    let mut b = 0usize;
    while b <= n {
        let b_end = (b + block).min(n + 1);
        let (lo, hi) = (b + rl / 2 + kappa, b + rl - kappa);
        if hi > n {
            // Every occurrence starting here would end past the text.
            break;
        }
        let segments = hi.saturating_sub(lo) / (2 * ql);
        let occ = if segments > kappa + prm.fit_cost { exact_occurrences(prm.q, &t[lo..hi]) } else { Vec::new() };
        if occ.is_empty() {
            h.push_around(b as i64, b_end as i64 - 1, n, Provenance::Fallback);
        } else if 2 * radius + 1 >= ql {
            h.push_around(b as i64, b_end as i64 - 1, n, Provenance::Periodic { phase: (lo + occ[0] + prm.l_r) % ql });
        } else {
            let mut phases: Vec<usize> = occ.iter().map(|&o| (lo + o + prm.l_r) % ql).collect();
            phases.sort_unstable();
            phases.dedup();
            for phase in phases {
                // Centers c ≡ phase (mod |Q|) whose radius reaches the block.
                let first = b.saturating_sub(radius);
                let mut c = first + (phase + ql - first % ql) % ql;
                while c <= b_end - 1 + radius {
                    let lo_x = (c as i64 - radius as i64).max(b as i64);
                    let hi_x = (c + radius).min(b_end - 1) as i64;
                    h.push_around(lo_x, hi_x, n, Provenance::Periodic { phase });
                    c += ql;
                }
            }
        }
        b = b_end;
    }
    h
}

/// Candidates from κ-edit occurrences of each region, bucketed by its budget.
pub fn candidates_regions(p: &[Sym], t: &[Sym], k: usize, regions: &[Region]) -> CandidateSet {
    let (m, n) = (p.len(), t.len());
    let mut h = CandidateSet::default();
    for (id, reg) in regions.iter().enumerate() {
        let r = reg.fragment.slice(p);
        let kappa = 4 * k * r.len() / m;
        let d = reg.budget.max(1);
        let fit = ed_periodic_fit(r, &reg.period, PeriodicMode::Substring);
        let prm = PeriodicParams { m, q: &reg.period, l_r: fit.start, fit_cost: fit.cost, kappa, big_k: reg.budget };
        let near = candidates_periodic(r, t, k, &prm);
        let mut last_bucket = None;
        for x in near.starts() {
            if occurrences_at(r, t, kappa, x).next().is_none() {
                continue;
            }
            let bucket = d * (x / d);
            if last_bucket == Some(bucket) {
                continue;
            }
            last_bucket = Some(bucket);
            let base = bucket as i64 - reg.fragment.start as i64;
            h.push_around(base - 10 * k as i64, base + 10 * k as i64, n, Provenance::Region(id));
        }
    }
    h
}

/// Exact occurrences among the candidate starts, by banded verification.
pub fn verify_candidates(p: &[Sym], t: &[Sym], k: usize, h: &CandidateSet) -> Vec<CostedOccurrence> {
    h.starts().into_iter().filter(|&x| x <= t.len()).flat_map(|x| occurrences_at(p, t, k, x)).collect()
}

/// The same set computed through the sketch: encode, decode from the sketch
/// alone, and keep the starts in `h`.
pub fn verify_candidates_masked(p: &[Sym], t: &[Sym], k: usize, h: &CandidateSet) -> Result<Vec<CostedOccurrence>> {
    if k == 0 {
        return Ok(verify_candidates(p, t, k, h));
    }
    let (sk, _) = encode(p, t, k, &EncodeOptions::default())?;
    let keep: Vec<usize> = h.starts();
    Ok(decode(&sk, DecodeOptions { alignments: false })?
        .into_iter()
        .map(|d| d.occurrence)
        .filter(|o| keep.binary_search(&o.start).is_ok())
        .collect())
}

/// Candidate starts derived from a decomposition of `p`.
pub fn candidates_for(p: &[Sym], t: &[Sym], k: usize, d: &Decomposition) -> CandidateSet {
    let m = p.len();
    match d {
        Decomposition::Breaks(bs) => candidates_breaks(p, t, k, bs),
        Decomposition::Regions(rs) => candidates_regions(p, t, k, rs),
        Decomposition::ApproxPeriod(q) => {
            let fit = ed_periodic_fit(p, q, PeriodicMode::Substring);
            let prm = PeriodicParams { m, q, l_r: fit.start, fit_cost: fit.cost, kappa: k, big_k: 8 * k };
            candidates_periodic(p, t, k, &prm)
        }
    }
}

/// The full pipeline: decompose, generate candidates, verify.
pub fn find_occurrences(p: &[Sym], t: &[Sym], k: usize) -> Result<Vec<CostedOccurrence>> {
    if k == 0 {
        return Ok(exact_occurrences(p, t).into_iter().map(|x| CostedOccurrence::new(x, x + p.len(), 0)).collect());
    }
    if k >= p.len() {
        return Ok(verify_candidates(p, t, k, &CandidateSet::all(t.len())));
    }
    let d = analyze(p, k)?;
    Ok(verify_candidates(p, t, k, &candidates_for(p, t, k, &d)))
}
