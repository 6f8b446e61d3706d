//! Alignment graphs over a set of low-cost alignments of `P` onto a window
//! `T`, the periodic structure of their black components, and masking.
//!
//! Everything here works from alignments plus edit information. No
//! operation needs the characters of `P` or `T` except where a signature
//! asks for them explicitly.

mod cover;
mod weight;

pub use cover::{
    cover_minimal, cover_recursive, covered_components, is_period_cover, LearnedFragment,
    PeriodCover,
};
pub use weight::{
    captures, extend_set, halving_hypothesis, weight_covers, weight_function, WeightFunction,
};

use crate::edit::{edit_distance_full, edit_info, Alignment, EditInfo};
use crate::strings::Sym;
use crate::{Error, Result};

/// An alignment of `P` onto a fragment of the window, with its edit information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetItem {
    pub alignment: Alignment,
    pub info: EditInfo,
}

impl SetItem {
    pub fn new(alignment: Alignment, p: &[Sym], t: &[Sym]) -> Self {
        let info = edit_info(&alignment, p, t);
        SetItem { alignment, info }
    }

    pub fn cost(&self) -> usize {
        self.info.cost()
    }
}

/// Alignment set `S`. By convention item 0 aligns `P` with a prefix of the
/// window and item 1 aligns it with a suffix; they may be the same alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentSet {
    pub items: Vec<SetItem>,
    pub k: usize,
}

impl AlignmentSet {
    pub fn new(xpref: SetItem, xsuf: SetItem, k: usize) -> Self {
        AlignmentSet { items: vec![xpref, xsuf], k }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Checks the enclosing conditions against lengths `m = |P|`, `n = |T|`.
    pub fn encloses(&self, m: usize, n: usize) -> bool {
        if self.items.len() < 2 || n + 2 * self.k > 2 * m {
            return false;
        }
        let pref = &self.items[0].alignment;
        let suf = &self.items[1].alignment;
        pref.first() == (0, 0)
            && suf.last() == (m, n)
            && self.items.iter().all(|it| {
                it.cost() <= self.k && it.alignment.src().start == 0 && it.alignment.src().end == m
            })
    }
}

/// Edge colors and connected components of `G_S`.
#[derive(Debug, Clone)]
pub struct AlignmentGraph {
    pub m: usize,
    pub n: usize,
    /// Dense component id of each vertex: `P` positions, then `T`, then the sentinel.
    pub component: Vec<usize>,
    /// Whether each component contains a red edge.
    pub red: Vec<bool>,
    /// Whether each component has any edge at all.
    pub touched: Vec<bool>,
    /// Class of each vertex under black edges alone.
    pub black_class: Vec<usize>,
    pub bc: usize,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }

    fn dense(&mut self) -> (Vec<usize>, usize) {
        let n = self.0.len();
        let mut id = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for v in 0..n {
            let r = self.find(v);
            if id[r] == usize::MAX {
                id[r] = next;
                next += 1;
            }
            out[v] = id[r];
        }
        (out, next)
    }
}

impl AlignmentGraph {
    pub fn p_vertex(&self, x: usize) -> usize {
        x
    }

    pub fn t_vertex(&self, y: usize) -> usize {
        self.m + y
    }

    pub fn bottom(&self) -> usize {
        self.m + self.n
    }

    /// True when the vertex lies in a black component.
    pub fn is_black(&self, v: usize) -> bool {
        let c = self.component[v];
        self.touched[c] && !self.red[c] && v != self.bottom()
    }
}

/// Builds `G_S` for alignments of `P[0..m)` onto fragments of `T[0..n)`.
///
/// A diagonal step is a black edge unless the edit information lists it as
/// a substitution. Indels are red edges to the sentinel.
pub fn build_graph(m: usize, n: usize, s: &AlignmentSet) -> Result<AlignmentGraph> {
    let nv = m + n + 1;
    let bot = m + n;
    let mut all = Dsu::new(nv);
    let mut black = Dsu::new(nv);
    let mut red_edges: Vec<(usize, usize)> = Vec::new();
    let mut touched_v = vec![false; nv];
    for it in &s.items {
        let a = &it.alignment;
        a.validate()?;
        let (src, dst) = (a.src(), a.dst());
        if src.start != 0 || src.end != m || dst.end > n {
            return Err(Error::Invalid(format!(
                "alignment {src:?} -> {dst:?} does not map P[0..{m}) into T[0..{n})"
            )));
        }
        let mut subs = it
            .info
            .records
            .iter()
            .filter(|r| r.cx.is_some() && r.cy.is_some())
            .map(|r| (r.x, r.y))
            .peekable();
        for w in a.points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (u, v, is_red) = if q.0 == p.0 + 1 && q.1 == p.1 + 1 {
                while subs.peek().is_some_and(|&s| s < p) {
                    subs.next();
                }
                let red = subs.peek() == Some(&p);
                (p.0, m + p.1, red)
            } else if q.0 == p.0 + 1 {
                (p.0, bot, true)
            } else {
                (m + p.1, bot, true)
            };
            all.union(u, v);
            touched_v[u] = true;
            touched_v[v] = true;
            if is_red {
                red_edges.push((u, v));
            } else {
                black.union(u, v);
            }
        }
    }
    let (component, count) = all.dense();
    let mut red = vec![false; count];
    let mut touched = vec![false; count];
    for (u, _) in &red_edges {
        red[component[*u]] = true;
    }
    for v in 0..nv {
        if touched_v[v] {
            touched[component[v]] = true;
        }
    }
    let (black_class, _) = black.dense();
    let mut bc = 0;
    for c in 0..count {
        // An isolated vertex has no edges and is not counted; under enclosure
        // only the sentinel can be isolated.
        if touched[c] && !red[c] {
            bc += 1;
        }
    }
    Ok(AlignmentGraph { m, n, component, red, touched, black_class, bc })
}

/// Positions of black characters and their arrangement into components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackIndexing {
    pub bc: usize,
    /// `P_{|S}`: black positions of `P` in order.
    pub p_black: Vec<usize>,
    /// `T_{|S}`: black positions of `T` in order.
    pub t_black: Vec<usize>,
    pub c_last: usize,
    /// Shift of each alignment's induced occurrence of `P_{|S}` in `T_{|S}`.
    pub deltas: Vec<usize>,
    /// Component index of each black `P` position (`None` when red).
    pub comp_of_p: Vec<Option<usize>>,
    /// Component index of each black `T` position (`None` when red).
    pub comp_of_t: Vec<Option<usize>>,
}

impl BlackIndexing {
    /// `π_j^c`; `c = bc` aliases `π_{j+1}^0`.
    pub fn pi(&self, c: usize, j: usize) -> usize {
        self.p_black[c + j * self.bc]
    }

    /// `τ_i^c`; `c = bc` aliases `τ_{i+1}^0`.
    pub fn tau(&self, c: usize, i: usize) -> usize {
        self.t_black[c + i * self.bc]
    }

    pub fn m_c(&self, c: usize) -> usize {
        if c == self.bc {
            return self.m0() - 1;
        }
        (self.p_black.len() - c).div_ceil(self.bc)
    }

    pub fn n_c(&self, c: usize) -> usize {
        if c == self.bc {
            return self.n0() - 1;
        }
        (self.t_black.len() - c).div_ceil(self.bc)
    }

    pub fn m0(&self) -> usize {
        self.p_black.len().div_ceil(self.bc)
    }

    pub fn n0(&self) -> usize {
        self.t_black.len().div_ceil(self.bc)
    }
}

/// Numbers black components by their first `P` position and checks that
/// component `c` holds exactly the black characters at indices `≡ c (mod bc)`.
pub fn black_indexing(g: &AlignmentGraph, s: &AlignmentSet) -> Result<BlackIndexing> {
    if g.bc == 0 {
        return Err(Error::NoBlackComponents);
    }
    let broken = |msg: String| Err(Error::InternalInvariantBroken(msg));
    let p_black: Vec<usize> = (0..g.m).filter(|&x| g.is_black(g.p_vertex(x))).collect();
    let t_black: Vec<usize> = (0..g.n).filter(|&y| g.is_black(g.t_vertex(y))).collect();
    let bc = g.bc;
    if p_black.len() < bc {
        return broken(format!("{} black P positions for {bc} black components", p_black.len()));
    }
    let mut index_of_comp = std::collections::HashMap::new();
    for (c, &x) in p_black.iter().take(bc).enumerate() {
        if index_of_comp.insert(g.component[g.p_vertex(x)], c).is_some() {
            return broken("two of the first bc black P positions share a component".into());
        }
    }
    let mut comp_of_p = vec![None; g.m];
    for (i, &x) in p_black.iter().enumerate() {
        let c = index_of_comp[&g.component[g.p_vertex(x)]];
        if c != i % bc {
            return broken(format!("P_|S[{i}] lies in component {c}, expected {}", i % bc));
        }
        comp_of_p[x] = Some(c);
    }
    let mut comp_of_t = vec![None; g.n];
    for (i, &y) in t_black.iter().enumerate() {
        let c = index_of_comp.get(&g.component[g.t_vertex(y)]).copied();
        if c != Some(i % bc) {
            return broken(format!("T_|S[{i}] lies in component {c:?}, expected {}", i % bc));
        }
        comp_of_t[y] = c;
    }
    if t_black.len() % bc != p_black.len() % bc {
        return broken("|T_|S| and |P_|S| differ modulo bc".into());
    }
    let c_last = (p_black.len() - 1) % bc;

    // Each alignment must induce an exact occurrence of P_|S in T_|S.
    let mut t_rank = vec![usize::MAX; g.n];
    for (i, &y) in t_black.iter().enumerate() {
        t_rank[y] = i;
    }
    let mut deltas = Vec::with_capacity(s.items.len());
    for it in &s.items {
        let pts = &it.alignment.points;
        let mut delta: Option<usize> = None;
        let mut idx = 0usize;
        for (r, &x) in p_black.iter().enumerate() {
            while pts[idx].0 < x || (pts[idx + 1].0 == x) {
                idx += 1;
            }
            let y = pts[idx].1;
            let tr = t_rank[y];
            if tr == usize::MAX || tr < r {
                return broken("alignment pairs a black P character with a non-black one".into());
            }
            match delta {
                None => delta = Some(tr - r),
                Some(d) if d != tr - r => return broken("alignment shift is not constant".into()),
                _ => {}
            }
        }
        deltas.push(delta.unwrap_or(0));
    }
    Ok(BlackIndexing { bc, p_black, t_black, c_last, deltas, comp_of_p, comp_of_t })
}

/// `P#` and `T#`: characters of black components outside the cover replaced
/// by one fresh symbol per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedPair {
    pub p: Vec<Sym>,
    pub t: Vec<Sym>,
}

/// Fresh symbol for component `c`, above every input code.
pub fn mask_symbol(alphabet_size: usize, c: usize) -> Sym {
    (alphabet_size + c) as Sym
}

pub fn mask(p: &[Sym], t: &[Sym], idx: &BlackIndexing, learned: &[bool], alphabet_size: usize) -> MaskedPair {
    let sub = |c: Option<usize>, orig: Sym| match c {
        Some(c) if !learned[c] => mask_symbol(alphabet_size, c),
        _ => orig,
    };
    MaskedPair {
        p: p.iter().enumerate().map(|(x, &ch)| sub(idx.comp_of_p[x], ch)).collect(),
        t: t.iter().enumerate().map(|(y, &ch)| sub(idx.comp_of_t[y], ch)).collect(),
    }
}

/// The block alignment `A^{j,i}`: glues, for each component `c`, an optimal
/// alignment of `P[π_j^c..π_j^{c+1})` onto `T[τ_i^c..τ_i^{c+1})` that matches
/// the two leading characters.
pub fn block_alignment(p: &[Sym], t: &[Sym], idx: &BlackIndexing, j: usize, i: usize) -> Result<Alignment> {
    let (m0, n0) = (idx.m0(), idx.n0());
    if j >= m0 || i >= n0 || (i == n0 - 1 && j != m0 - 1) {
        return Err(Error::OutOfRange(format!("block pair (j={j}, i={i}) with m0={m0}, n0={n0}")));
    }
    let last = j == m0 - 1;
    let comps = if last { idx.c_last } else { idx.bc };
    let mut out: Option<Alignment> = None;
    let mut glue = |piece: Alignment| {
        out = Some(match out.take() {
            None => piece,
            Some(mut a) => {
                debug_assert_eq!(a.last(), piece.first());
                a.points.extend_from_slice(&piece.points[1..]);
                a
            }
        });
    };
    for c in 0..comps {
        let (x0, x1) = (idx.pi(c, j), idx.pi(c + 1, j));
        let (y0, y1) = (idx.tau(c, i), idx.tau(c + 1, i));
        let (_, rest) = edit_distance_full(&p[x0 + 1..x1], &t[y0 + 1..y1]);
        let mut pts = vec![(x0, y0)];
        pts.extend(rest.points.iter().map(|&(a, b)| (a + x0 + 1, b + y0 + 1)));
        glue(Alignment { points: pts });
    }
    if last {
        let (x, y) = (idx.pi(idx.c_last, j), idx.tau(idx.c_last, i));
        glue(Alignment { points: vec![(x, y), (x + 1, y + 1)] });
    }
    Ok(out.expect("at least one component"))
}
