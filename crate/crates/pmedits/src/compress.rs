//! LZ77-like factorization and self-edit distance.

use crate::edit::Alignment;
use crate::strings::Sym;
use std::fmt;

/// One phrase: a fresh symbol, or a copy of `len` symbols starting at an
/// earlier position (the copy may overlap the phrase itself).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phrase {
    Literal(Sym),
    Copy { src: usize, len: usize },
}

impl Phrase {
    pub fn len(&self) -> usize {
        match *self {
            Phrase::Literal(_) => 1,
            Phrase::Copy { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phrase::Literal(c) => match char::from_u32(c).filter(|ch| ch.is_ascii_graphic()) {
                Some(ch) => write!(f, "({ch},0)"),
                None => write!(f, "(#{c},0)"),
            },
            Phrase::Copy { src, len } => write!(f, "({src},{len})"),
        }
    }
}

pub type Factorization = Vec<Phrase>;

/// Expands a factorization, rejecting copies that read the future.
pub fn expand(phrases: &[Phrase]) -> Option<Vec<Sym>> {
    let mut out: Vec<Sym> = Vec::new();
    for ph in phrases {
        match *ph {
            Phrase::Literal(c) => out.push(c),
            Phrase::Copy { src, len } => {
                if len == 0 || src >= out.len() {
                    return None;
                }
                for d in 0..len {
                    let c = out[src + d];
                    out.push(c);
                }
            }
        }
    }
    Some(out)
}

/// Suffix automaton with the end index of each state's first occurrence.
struct Sam {
    len: Vec<u32>,
    link: Vec<i32>,
    first: Vec<u32>,
    next: Vec<Vec<(Sym, u32)>>,
    last: u32,
}

impl Sam {
    fn new(cap: usize) -> Self {
        let mut s = Sam {
            len: Vec::with_capacity(2 * cap + 1),
            link: Vec::with_capacity(2 * cap + 1),
            first: Vec::with_capacity(2 * cap + 1),
            next: Vec::with_capacity(2 * cap + 1),
            last: 0,
        };
        s.push(0, -1, 0, Vec::new());
        s
    }

    fn build(x: &[Sym]) -> Self {
        let mut s = Sam::new(x.len());
        for (i, &c) in x.iter().enumerate() {
            s.extend(c, i);
        }
        s
    }

    fn push(&mut self, len: u32, link: i32, first: u32, next: Vec<(Sym, u32)>) -> u32 {
        self.len.push(len);
        self.link.push(link);
        self.first.push(first);
        self.next.push(next);
        (self.len.len() - 1) as u32
    }

    fn get(&self, v: u32, c: Sym) -> Option<u32> {
        self.next[v as usize].iter().find(|e| e.0 == c).map(|e| e.1)
    }

    fn set(&mut self, v: u32, c: Sym, to: u32) {
        let edges = &mut self.next[v as usize];
        match edges.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1 = to,
            None => edges.push((c, to)),
        }
    }

    fn extend(&mut self, c: Sym, pos: usize) {
        let cur = self.push(self.len[self.last as usize] + 1, 0, pos as u32, Vec::new());
        let mut p = self.last as i32;
        while p >= 0 && self.get(p as u32, c).is_none() {
            self.set(p as u32, c, cur);
            p = self.link[p as usize];
        }
        if p >= 0 {
            let q = self.get(p as u32, c).unwrap();
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q as i32;
            } else {
                let edges = self.next[q as usize].clone();
                let clone = self.push(
                    self.len[p as usize] + 1,
                    self.link[q as usize],
                    self.first[q as usize],
                    edges,
                );
                while p >= 0 && self.get(p as u32, c) == Some(q) {
                    self.set(p as u32, c, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone as i32;
                self.link[cur as usize] = clone as i32;
            }
        }
        self.last = cur;
    }

    /// Longest `l` such that `x[i..i+l)` also starts before `i`, with the
    /// leftmost such start. Stops at `limit`.
    fn longest_previous(&self, x: &[Sym], i: usize, limit: usize) -> (usize, usize) {
        let (mut v, mut l) = (0u32, 0usize);
        while i + l < limit {
            match self.get(v, x[i + l]) {
                Some(w) if (self.first[w as usize] as usize) < i + l => {
                    v = w;
                    l += 1;
                }
                _ => break,
            }
        }
        let src = if l > 0 { self.first[v as usize] as usize + 1 - l } else { 0 };
        (l, src)
    }
}

/// Leftmost-source greedy phrases of `x`, at most `max_phrases` of them.
///
/// The automaton is built on a doubling prefix of `x`, so the work is
/// proportional to the length actually parsed.
fn greedy_leftmost(x: &[Sym], max_phrases: usize) -> Factorization {
    let n = x.len();
    let mut cap = n.min(256);
    loop {
        let sam = Sam::build(&x[..cap]);
        let mut out = Vec::new();
        let mut i = 0usize;
        let mut exhausted = false;
        while i < n && out.len() < max_phrases {
            let (l, src) = sam.longest_previous(x, i, cap);
            if i + l >= cap && cap < n {
                exhausted = true;
                break;
            }
            if l == 0 {
                out.push(Phrase::Literal(x[i]));
                i += 1;
            } else {
                out.push(Phrase::Copy { src, len: l });
                i += l;
            }
            if i >= cap && cap < n && out.len() < max_phrases {
                exhausted = true;
                break;
            }
        }
        if !exhausted {
            return out;
        }
        cap = (cap * 2).min(n);
    }
}

/// Greedy factorization with copies taken from the leftmost source.
pub fn lz_leftmost(x: &[Sym]) -> Factorization {
    greedy_leftmost(x, usize::MAX)
}

/// Canonical greedy factorization. Among the longest previous factors, the
/// source is the rightmost candidate start.
pub fn lz77(x: &[Sym]) -> Factorization {
    let mut out = lz_leftmost(x);
    let mut i = 0usize;
    for ph in out.iter_mut() {
        if let Phrase::Copy { src, len } = ph {
            let u = &x[i..i + *len];
            let s = (*src..i).rev().find(|&s| x[s..s + *len] == *u).unwrap();
            *src = s;
        }
        i += ph.len();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reversed,
}

/// Result of [`lz_bounded_prefix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLz {
    /// Number of symbols covered, counted from `start` in the scan direction.
    pub extent: usize,
    /// Factorization of the covered symbols in scan order.
    pub phrases: Factorization,
}

/// Longest run from `start` (inclusive, scanning in `dir`) whose greedy
/// factorization has at most `z` phrases.
///
/// The factorization of a prefix is the truncation of the factorization of
/// the whole string, so the answer is the end of the `z`-th phrase.
pub fn lz_bounded_prefix(x: &[Sym], start: usize, z: usize, dir: Direction) -> BoundedLz {
    let total = match dir {
        Direction::Forward => x.len().saturating_sub(start),
        Direction::Reversed => {
            if x.is_empty() {
                0
            } else {
                start.min(x.len() - 1) + 1
            }
        }
    };
    // A greedy parse of a prefix agrees with the full parse except possibly
    // for a last phrase that touches the cut, so grow the prefix until the
    // parse ends strictly inside it.
    let mut len = total.min(256);
    loop {
        let dom: Vec<Sym> = match dir {
            Direction::Forward => x[start..start + len].to_vec(),
            Direction::Reversed => x[start + 1 - len..=start].iter().rev().copied().collect(),
        };
        let phrases = greedy_leftmost(&dom, z);
        let extent: usize = phrases.iter().map(Phrase::len).sum();
        if extent < len || len == total {
            return BoundedLz { extent, phrases };
        }
        len = (len * 2).min(total);
    }
}

/// Factorization of `x` restricted to its first `len` symbols.
pub fn truncate(phrases: &[Phrase], len: usize) -> Factorization {
    let mut out = Vec::new();
    let mut at = 0usize;
    for ph in phrases {
        if at >= len {
            break;
        }
        let take = ph.len().min(len - at);
        out.push(match *ph {
            Phrase::Copy { src, .. } => Phrase::Copy { src, len: take },
            lit => lit,
        });
        at += take;
    }
    out
}

/// Minimum cost self-alignment that never aligns a character with itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfEdResult {
    pub cost: usize,
    pub witness: Alignment,
}

/// Self-edit distance with a witness. The diagonal step out of any cell
/// `(i, i)` is forbidden; every other step follows the usual edit costs.
pub fn selfed(x: &[Sym]) -> SelfEdResult {
    let n = x.len();
    let w = n + 1;
    let inf = u32::MAX / 2;
    let mut d = vec![inf; w * w];
    d[0] = 0;
    for i in 0..=n {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            let mut v = inf;
            if i > 0 && j > 0 && i - 1 != j - 1 {
                v = v.min(d[(i - 1) * w + j - 1] + u32::from(x[i - 1] != x[j - 1]));
            }
            if i > 0 {
                v = v.min(d[(i - 1) * w + j] + 1);
            }
            if j > 0 {
                v = v.min(d[i * w + j - 1] + 1);
            }
            d[i * w + j] = v;
        }
    }
    let (mut i, mut j) = (n, n);
    let mut pts = vec![(i, j)];
    while i > 0 || j > 0 {
        let v = d[i * w + j];
        if i > 0 && j > 0 && i != j && d[(i - 1) * w + j - 1] + u32::from(x[i - 1] != x[j - 1]) == v {
            i -= 1;
            j -= 1;
        } else if i > 0 && d[(i - 1) * w + j] + 1 == v {
            i -= 1;
        } else {
            j -= 1;
        }
        pts.push((i, j));
    }
    pts.reverse();
    SelfEdResult { cost: d[n * w + n] as usize, witness: Alignment { points: pts } }
}

/// `selfed(x[..e])` for every `e` in `0..=|x|`, from one DP pass.
pub fn selfed_prefix_costs(x: &[Sym]) -> Vec<usize> {
    let n = x.len();
    let inf = u32::MAX / 2;
    let mut prev = vec![inf; n + 1];
    let mut cur = vec![inf; n + 1];
    let mut out = vec![0usize; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            if i == 0 && j == 0 {
                cur[0] = 0;
                continue;
            }
            let mut v = inf;
            if i > 0 && j > 0 && i != j {
                v = v.min(prev[j - 1] + u32::from(x[i - 1] != x[j - 1]));
            }
            if i > 0 {
                v = v.min(prev[j] + 1);
            }
            if j > 0 {
                v = v.min(cur[j - 1] + 1);
            }
            cur[j] = v;
        }
        out[i] = cur[i] as usize;
        std::mem::swap(&mut prev, &mut cur);
    }
    out
}
