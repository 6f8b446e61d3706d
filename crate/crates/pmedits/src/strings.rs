//! Strings, fragments, periods and exact occurrences.

use crate::{Error, Result};
use std::collections::BTreeMap;

/// Alphabet code point. Input symbols are mapped to a dense prefix of the
/// code space; mask and sentinel symbols are allocated above it.
pub type Sym = u32;

/// Half-open fragment `[start, end)` of some parent string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fragment {
    pub start: usize,
    pub end: usize,
}

impl Fragment {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Fragment { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &Fragment) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn slice<'a, T>(&self, s: &'a [T]) -> &'a [T] {
        &s[self.start..self.end]
    }
}

/// Border array: `b[i]` is the length of the longest proper border of `x[..i]`.
pub fn border_array(x: &[Sym]) -> Vec<usize> {
    let mut b = vec![0usize; x.len() + 1];
    let mut k = 0usize;
    for i in 1..x.len() {
        while k > 0 && x[i] != x[k] {
            k = b[k];
        }
        if x[i] == x[k] {
            k += 1;
        }
        b[i + 1] = k;
    }
    b
}

/// Smallest period of a nonempty string.
pub fn per(s: &[Sym]) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::EmptyString);
    }
    Ok(s.len() - border_array(s)[s.len()])
}

pub fn is_primitive(s: &[Sym]) -> Result<bool> {
    let p = per(s)?;
    Ok(p == s.len() || s.len() % p != 0)
}

/// True when `p` is a period of `s` (any `p >= |s|` trivially is).
pub fn has_period(s: &[Sym], p: usize) -> bool {
    p > 0 && (p..s.len()).all(|i| s[i] == s[i - p])
}

/// Starting positions of exact occurrences of `p` in `t`, ascending.
///
/// An empty pattern occurs at every position `0..=|t|`.
pub fn exact_occurrences(p: &[Sym], t: &[Sym]) -> Vec<usize> {
    if p.is_empty() {
        return (0..=t.len()).collect();
    }
    let b = border_array(p);
    let mut out = Vec::new();
    let mut k = 0usize;
    for (i, &c) in t.iter().enumerate() {
        while k > 0 && (k == p.len() || p[k] != c) {
            k = b[k];
        }
        if p[k] == c {
            k += 1;
        }
        if k == p.len() {
            out.push(i + 1 - p.len());
        }
    }
    out
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `gcd(Occ(p, t))` for a text that starts and ends with `p` and has length at
/// most `2|p| + 1`. The result is a period of `t`, except in the degenerate
/// case `g = |p| + 1` (only the two forced occurrences, separated by one
/// character) where the claim is vacuous.
pub fn occ_gcd_period(p: &[Sym], t: &[Sym]) -> Result<usize> {
    let (m, n) = (p.len(), t.len());
    if m == 0 || n < m || n > 2 * m + 1 {
        return Err(Error::PreconditionFailed(format!(
            "need 1 <= |p| <= |t| <= 2|p|+1, got |p|={m}, |t|={n}"
        )));
    }
    if t[..m] != *p || t[n - m..] != *p {
        return Err(Error::PreconditionFailed(
            "p must be a prefix and a suffix of t".into(),
        ));
    }
    let occ = exact_occurrences(p, t);
    let g = occ.iter().fold(0usize, |g, &x| gcd(g, x));
    if g == 0 {
        // t = p: the only occurrence is 0 and every shift >= |t| is a period.
        return Ok(n.max(1));
    }
    if g != m + 1 && !has_period(t, g) {
        return Err(Error::InternalInvariantBroken(format!(
            "gcd {g} of occurrences is not a period of t"
        )));
    }
    Ok(g)
}

/// One symbol per input byte.
pub fn from_bytes(bytes: &[u8]) -> Vec<Sym> {
    bytes.iter().map(|&b| Sym::from(b)).collect()
}

/// Whitespace-separated unsigned integer tokens.
pub fn parse_tokens(text: &str) -> Result<Vec<Sym>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<Sym>()
                .map_err(|e| Error::BadParams(format!("bad symbol token {tok:?}: {e}")))
        })
        .collect()
}

/// Dense relabelling of the symbols used by a family of strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    to_dense: BTreeMap<Sym, Sym>,
    from_dense: Vec<Sym>,
}

impl Alphabet {
    pub fn of(strings: &[&[Sym]]) -> Self {
        let mut to_dense = BTreeMap::new();
        for s in strings {
            for &c in *s {
                to_dense.insert(c, 0);
            }
        }
        let from_dense: Vec<Sym> = to_dense.keys().copied().collect();
        for (i, v) in to_dense.values_mut().enumerate() {
            *v = i as Sym;
        }
        Alphabet { to_dense, from_dense }
    }

    pub fn size(&self) -> usize {
        self.from_dense.len()
    }

    /// Maps a string into dense codes; symbols outside the alphabet are an error.
    pub fn encode(&self, s: &[Sym]) -> Result<Vec<Sym>> {
        s.iter()
            .map(|c| {
                self.to_dense
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::BadParams(format!("symbol {c} not in alphabet")))
            })
            .collect()
    }

    pub fn decode_sym(&self, c: Sym) -> Option<Sym> {
        self.from_dense.get(c as usize).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Vec<Sym> {
        from_bytes(x.as_bytes())
    }

    #[test]
    fn kmp_handles_overlaps() {
        assert_eq!(exact_occurrences(&s("aa"), &s("aaaa")), vec![0, 1, 2]);
        assert_eq!(exact_occurrences(&s("abab"), &s("abababab")), vec![0, 2, 4]);
    }

    #[test]
    fn dense_alphabet_is_order_preserving() {
        let a = Alphabet::of(&[&[30, 10], &[20, 10]]);
        assert_eq!(a.size(), 3);
        assert_eq!(a.encode(&[10, 20, 30]).unwrap(), vec![0, 1, 2]);
        assert_eq!(a.decode_sym(2), Some(30));
        assert!(a.encode(&[5]).is_err());
    }
}
