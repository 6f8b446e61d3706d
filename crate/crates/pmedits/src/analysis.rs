//! Structural decomposition of a pattern into breaks, repetitive regions or
//! a single approximate period.

use crate::edit::{ed_periodic_bounded, periodic_prefix_profile, PeriodicMode};
use crate::strings::{is_primitive, per, Fragment, Sym};
use crate::{Error, Result};
use std::cmp::Ordering;

/// A fragment of `P` close to a periodic string, with its edit budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub fragment: Fragment,
    pub period: Vec<Sym>,
    /// `⌈8k|R|/m⌉`, which is also the distance from `R` to `period^∞`.
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    /// `2k` disjoint fragments of length `⌊m/8k⌋`, each with a long period.
    Breaks(Vec<Fragment>),
    /// Disjoint repetitive regions covering at least `3m/8` positions.
    Regions(Vec<Region>),
    /// A short primitive `Q` with `ed_periodic(P, Q) < 8k`.
    ApproxPeriod(Vec<Sym>),
}

impl Decomposition {
    pub fn case_name(&self) -> &'static str {
        match self {
            Decomposition::Breaks(_) => "breaks",
            Decomposition::Regions(_) => "regions",
            Decomposition::ApproxPeriod(_) => "approx_period",
        }
    }
}

/// `⌈8k·len/m⌉`.
pub fn region_budget(len: usize, m: usize, k: usize) -> usize {
    (8 * k * len).div_ceil(m)
}

fn break_len(m: usize, k: usize) -> usize {
    m / (8 * k)
}

/// Sign of `ed_periodic(p[j..j2), q) - ⌈8k(j2-j)/m⌉`.
pub fn delta_sign(p: &[Sym], j: usize, j2: usize, q: &[Sym], k: usize) -> Result<Ordering> {
    let m = p.len();
    if k == 0 || q.is_empty() {
        return Err(Error::PreconditionFailed("need k >= 1 and a nonempty period".into()));
    }
    let lo = j.saturating_add(break_len(m, k));
    if j2 <= lo || j2 > m {
        return Err(Error::OutOfRange(format!("j2 = {j2} outside ({lo}, {m}]")));
    }
    let budget = region_budget(j2 - j, m, k);
    let d = ed_periodic_bounded(&p[j..j2], q, PeriodicMode::Substring, budget + 1).map_or(budget + 1, |f| f.cost);
    Ok(d.cmp(&budget))
}

/// Smallest `L > ⌊m/8k⌋` with `ed_periodic(p[j..j+L), q) = ⌈8kL/m⌉`.
///
/// Prefix distances grow by at most one per character and so does the
/// budget, so a single pass over all prefix lengths finds the first crossing.
pub fn find_region_prefix(p: &[Sym], j: usize, q: &[Sym], k: usize) -> Option<Fragment> {
    let m = p.len();
    if k == 0 || q.is_empty() || j >= m {
        return None;
    }
    let l0 = break_len(m, k);
    let prof = periodic_prefix_profile(&p[j..], q);
    (l0 + 1..=m - j).find(|&l| prof[l] == region_budget(l, m, k)).map(|l| Fragment::new(j, j + l))
}

/// Smallest `L >= min_len` such that the suffix `p[m-L..m)` has
/// `ed_periodic(·, q) = ⌈8kL/m⌉`.
pub fn find_region_suffix(p: &[Sym], min_len: usize, q: &[Sym], k: usize) -> Option<Fragment> {
    let m = p.len();
    if k == 0 || q.is_empty() || min_len > m {
        return None;
    }
    let rp: Vec<Sym> = p.iter().rev().copied().collect();
    let rq: Vec<Sym> = q.iter().rev().copied().collect();
    let prof = periodic_prefix_profile(&rp, &rq);
    (min_len.max(1)..=m).find(|&l| prof[l] == region_budget(l, m, k)).map(|l| Fragment::new(m - l, m))
}

/// Walks `P` left to right, classifying it into one of the three cases.
pub fn analyze(p: &[Sym], k: usize) -> Result<Decomposition> {
    let m = p.len();
    if k == 0 || k > m {
        return Err(Error::PreconditionFailed(format!("need 1 <= k <= m, got k = {k}, m = {m}")));
    }
    let l0 = break_len(m, k);
    if l0 == 0 {
        return Ok(Decomposition::Breaks(vec![Fragment::new(0, 0); 2 * k]));
    }
    let mut breaks = Vec::new();
    let mut regions: Vec<Region> = Vec::new();
    let mut covered = 0usize;
    let mut j = 0usize;
    loop {
        if j + l0 > m {
            return Err(Error::InternalInvariantBroken(format!("ran out of pattern at j = {j}")));
        }
        let window = &p[j..j + l0];
        let pw = per(window)?;
        if 128 * k * pw > m {
            breaks.push(Fragment::new(j, j + l0));
            if breaks.len() == 2 * k {
                return Ok(Decomposition::Breaks(breaks));
            }
            j += l0;
            continue;
        }
        let q = p[j..j + pw].to_vec();
        if let Some(r) = find_region_prefix(p, j, &q, k) {
            covered += r.len();
            j = r.end;
            regions.push(Region { fragment: r, budget: region_budget(r.len(), m, k), period: q });
            if 8 * covered >= 3 * m {
                return Ok(Decomposition::Regions(regions));
            }
            continue;
        }
        return Ok(match find_region_suffix(p, m - j, &q, k) {
            Some(r) => Decomposition::Regions(vec![Region { fragment: r, budget: region_budget(r.len(), m, k), period: q }]),
            None => Decomposition::ApproxPeriod(q),
        });
    }
}

fn disjoint(frags: &[Fragment]) -> bool {
    let mut v: Vec<&Fragment> = frags.iter().filter(|f| !f.is_empty()).collect();
    v.sort_by_key(|f| f.start);
    v.windows(2).all(|w| w[0].end <= w[1].start)
}

fn short_primitive(q: &[Sym], m: usize, k: usize) -> bool {
    !q.is_empty() && 128 * k * q.len() <= m && is_primitive(q).unwrap_or(false)
}

/// Rechecks every invariant of `d` from scratch.
pub fn verify_decomposition(p: &[Sym], k: usize, d: &Decomposition) -> bool {
    let m = p.len();
    if k == 0 || k > m {
        return false;
    }
    let l0 = break_len(m, k);
    match d {
        Decomposition::Breaks(bs) => {
            if bs.len() != 2 * k || bs.iter().any(|b| b.end > m || b.start > b.end || b.len() != l0) {
                return false;
            }
            if l0 == 0 {
                return true;
            }
            disjoint(bs) && bs.iter().all(|b| per(b.slice(p)).is_ok_and(|q| 128 * k * q > m))
        }
        Decomposition::Regions(rs) => {
            if rs.is_empty() || rs.iter().any(|r| r.fragment.end > m || r.fragment.start > r.fragment.end) {
                return false;
            }
            let frags: Vec<Fragment> = rs.iter().map(|r| r.fragment).collect();
            let total: usize = frags.iter().map(Fragment::len).sum();
            disjoint(&frags)
                && 8 * total >= 3 * m
                && rs.iter().all(|r| {
                    let len = r.fragment.len();
                    let want = region_budget(len, m, k);
                    8 * k * len >= m
                        && short_primitive(&r.period, m, k)
                        && r.budget == want
                        && ed_periodic_bounded(r.fragment.slice(p), &r.period, PeriodicMode::Substring, want)
                            .is_some_and(|f| f.cost == want)
                })
        }
        Decomposition::ApproxPeriod(q) => {
            short_primitive(q, m, k)
                && ed_periodic_bounded(p, q, PeriodicMode::Substring, 8 * k).is_some_and(|f| f.cost < 8 * k)
        }
    }
}
