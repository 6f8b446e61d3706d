//! One-way sketch of every k-edit occurrence of `P` in `T`.
//!
//! The text is cut into blocks of `m - 3k` starting positions. A block whose
//! occurrences span `T[ℓ..r)` is described by a small set of alignments of
//! `P` onto that window, from which the decoder rebuilds the alignment graph,
//! learns the characters it needs, and recomputes every occurrence starting
//! in the block over masked copies of `P` and the window.
//!
//! Wire format (all integers are LEB128 varints unless noted):
//!
//! ```text
//! header   "EPMS" version:u8 flags:u8 n m k alphabet block_len windows
//!          [m symbols, present when flags bit 1 is set]
//! window   tag:u8 payload
//!   0 EMPTY
//!   1 RAW         offset len symbols[len]
//!   2 SINGLE      alignment (absolute text coordinates)
//!   3 STRUCTURED  offset len dup:u8 count alignment[count]
//!                 fragments (dir:u8 start phrases phrase[phrases])[..]
//! alignment  y0 (y1-y0) records (x cx (y-y0) cy)[records], with ε = 0 and c = sym+1
//! phrase     2a+tag, then b for copies (literal: a = symbol; copy: a = src, b = len)
//! ```

mod lower_bound;
mod wire;

pub use lower_bound::{gen_lower_bound, recover_planted, LowerBoundInstance, LowerBoundParams};

use crate::compress::{Direction, Phrase};
use crate::edit::{canonical_alignment, edit_info, reconstruct_alignment, Alignment, CostedOccurrence, EditInfo, EditRecord};
use crate::graph::{
    black_indexing, build_graph, captures, cover_minimal, cover_recursive, covered_components, extend_set, mask,
    mask_symbol, weight_function, AlignmentGraph, AlignmentSet, BlackIndexing, LearnedFragment, PeriodCover, SetItem,
    WeightFunction,
};
use crate::matcher::match_banded;
use crate::strings::{Alphabet, Sym};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use wire::{Reader, Writer};

pub const MAGIC: &[u8; 4] = b"EPMS";
pub const VERSION: u8 = 1;
const FLAG_CHARS: u8 = 1;
const FLAG_PATTERN: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverStrategy {
    /// Bounded greedy factorizations; reads only what it stores.
    #[default]
    Recursive,
    /// All qualifying intervals; quadratic per component.
    Minimal,
}

#[derive(Debug, Clone)]
pub struct EncodeOptions {
    /// Keep input symbols instead of reducing to `P`'s alphabet plus one.
    pub chars: bool,
    /// Starting positions per block; at most `m - 3k`.
    pub block_len: Option<usize>,
    pub cover: CoverStrategy,
    /// Re-check each structured window against its masked strings.
    pub verify: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { chars: false, block_len: None, cover: CoverStrategy::Recursive, verify: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub version: u8,
    pub chars: bool,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub alphabet_size: usize,
    pub block_len: usize,
    pub window_count: usize,
}

impl Header {
    /// Starting positions owned by window `i`; the last window also owns `n`.
    pub fn block(&self, i: usize) -> (usize, usize) {
        let lo = i * self.block_len;
        let hi = if i + 1 == self.window_count { self.n + 1 } else { lo + self.block_len };
        (lo, hi)
    }
}

/// An alignment of `P` onto `T[y0..y1)` kept as its edit information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredAlignment {
    pub y0: usize,
    pub y1: usize,
    pub info: EditInfo,
}

impl StoredAlignment {
    fn of(a: &Alignment, info: EditInfo) -> Self {
        StoredAlignment { y0: a.first().1, y1: a.last().1, info }
    }

    fn rebuild(&self, m: usize, dst_len: usize) -> Result<Alignment> {
        if self.y0 > self.y1 || self.y1 > dst_len {
            return Err(Error::Corrupt("alignment endpoints outside the window".into()));
        }
        let a = reconstruct_alignment(&self.info, m, dst_len, Some(self.y0))?;
        if a.first() != (0, self.y0) || a.last() != (m, self.y1) {
            return Err(Error::Corrupt("edit records disagree with the stored endpoints".into()));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Empty,
    Raw,
    Single,
    Structured,
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::Empty => "EMPTY",
            WindowKind::Raw => "RAW",
            WindowKind::Single => "SINGLE",
            WindowKind::Structured => "STRUCTURED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowRecord {
    Empty,
    Raw { offset: usize, text: Vec<Sym> },
    Single(StoredAlignment),
    Structured {
        offset: usize,
        len: usize,
        /// Alignment set in window coordinates; item 1 repeats item 0 when they coincide.
        items: Vec<StoredAlignment>,
        fragments: Vec<LearnedFragment>,
    },
}

impl WindowRecord {
    pub fn kind(&self) -> WindowKind {
        match self {
            WindowRecord::Empty => WindowKind::Empty,
            WindowRecord::Raw { .. } => WindowKind::Raw,
            WindowRecord::Single(_) => WindowKind::Single,
            WindowRecord::Structured { .. } => WindowKind::Structured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sketch {
    pub header: Header,
    /// The reduced pattern, stored only when some window is RAW.
    pub pattern: Option<Vec<Sym>>,
    pub windows: Vec<WindowRecord>,
}

/// Per-window statistics gathered while encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowReport {
    pub index: usize,
    pub kind: WindowKind,
    pub offset: usize,
    pub len: usize,
    pub set_size: usize,
    /// Black component count after each growth step.
    pub bc_trace: Vec<usize>,
    pub weight_total: usize,
    pub learned: usize,
    pub bits: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeReport {
    pub windows: Vec<WindowReport>,
    /// Windows that fell back to RAW because a structural check failed.
    pub violations: Vec<String>,
}

/// One decoded occurrence: the fragment, its cost and optionally an optimal
/// alignment with its edit information (in absolute text coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub occurrence: CostedOccurrence,
    pub info: Option<EditInfo>,
}

/// Maps `P` and `T` to the sketch alphabet. Without `chars`, `P`'s distinct
/// symbols become `0..σ` in sorted order and any other text symbol becomes `σ`.
/// Returns the mapped strings and the alphabet size.
pub fn reduce_alphabet(p: &[Sym], t: &[Sym], chars: bool) -> (Vec<Sym>, Vec<Sym>, usize) {
    if chars {
        let top = p.iter().chain(t).copied().max().map_or(1, |c| c as usize + 1);
        return (p.to_vec(), t.to_vec(), top);
    }
    let alpha = Alphabet::of(&[p]);
    let sigma = alpha.size();
    let pr = alpha.encode(p).expect("pattern symbols are in its own alphabet");
    let lookup: HashMap<Sym, Sym> = (0..sigma as Sym).map(|c| (alpha.decode_sym(c).unwrap(), c)).collect();
    let tr = t.iter().map(|c| lookup.get(c).copied().unwrap_or(sigma as Sym)).collect();
    (pr, tr, sigma + 1)
}

/// The alignment set grown for one window, with the structure it induces.
#[derive(Debug, Clone)]
pub struct WindowStructure {
    pub set: AlignmentSet,
    pub graph: AlignmentGraph,
    pub index: Option<BlackIndexing>,
    pub weights: Option<WeightFunction>,
    pub bc_trace: Vec<usize>,
}

/// Grows `S` for a window `tw` until every occurrence in it is captured or
/// no black component is left. `occs` are all occurrences inside `tw`,
/// sorted by `(start, end)`, with the first starting at 0 and some ending at `|tw|`.
pub fn structure_window(p: &[Sym], tw: &[Sym], occs: &[CostedOccurrence], k: usize) -> Result<WindowStructure> {
    let m = p.len();
    let item = |o: &CostedOccurrence| -> Result<SetItem> {
        let a = canonical_alignment(p, tw, o.start, o.end, k)
            .ok_or_else(|| Error::InternalInvariantBroken(format!("[{}, {}) is not an occurrence", o.start, o.end)))?;
        Ok(SetItem::new(a, p, tw))
    };
    let pref = occs
        .iter()
        .filter(|o| o.start == 0)
        .min_by_key(|o| (o.cost, o.end))
        .ok_or_else(|| Error::PreconditionFailed("no occurrence starts the window".into()))?;
    let suf = occs
        .iter()
        .filter(|o| o.end == tw.len())
        .min_by_key(|o| (o.cost, std::cmp::Reverse(o.start)))
        .ok_or_else(|| Error::PreconditionFailed("no occurrence ends the window".into()))?;
    let mut set = AlignmentSet::new(item(pref)?, item(suf)?, k);
    if !set.encloses(m, tw.len()) {
        return Err(Error::PreconditionFailed("window too long for its alignment set".into()));
    }
    let mut graph = build_graph(m, tw.len(), &set)?;
    let mut bc_trace = vec![graph.bc];
    loop {
        if graph.bc == 0 {
            return Ok(WindowStructure { set, graph, index: None, weights: None, bc_trace });
        }
        let idx = black_indexing(&graph, &set)?;
        let wf = weight_function(&set, &idx)?;
        let uncaptured = occs
            .iter()
            .filter(|o| !captures(Some(&idx), wf.total, k, o.start))
            .min_by_key(|o| (o.start, o.cost, o.end));
        let Some(y) = uncaptured else {
            return Ok(WindowStructure { set, graph, index: Some(idx), weights: Some(wf), bc_trace });
        };
        let (next, g2) = extend_set(&set, &graph, Some(&idx), wf.total, item(y)?)?;
        set = next;
        graph = g2;
        bc_trace.push(graph.bc);
    }
}

/// The period cover of a structured window under the chosen strategy.
pub fn window_cover(tw: &[Sym], ws: &WindowStructure, k: usize, strategy: CoverStrategy) -> Result<Option<PeriodCover>> {
    let (Some(idx), Some(wf)) = (&ws.index, &ws.weights) else { return Ok(None) };
    Ok(Some(match strategy {
        CoverStrategy::Recursive => cover_recursive(tw, idx, wf, k)?,
        CoverStrategy::Minimal => cover_minimal(tw, idx, wf, k)?,
    }))
}

fn occ_keys(occs: &[CostedOccurrence]) -> Vec<(usize, usize, usize)> {
    let mut v: Vec<_> = occs.iter().map(CostedOccurrence::key).collect();
    v.sort_unstable();
    v
}

struct Encoded {
    record: WindowRecord,
    report: WindowReport,
    violation: Option<String>,
}

fn encode_structured(
    p: &[Sym],
    tw: &[Sym],
    local: &[CostedOccurrence],
    k: usize,
    alphabet_size: usize,
    opts: &EncodeOptions,
) -> Result<(Vec<StoredAlignment>, Vec<LearnedFragment>, WindowStructure, usize)> {
    let ws = structure_window(p, tw, local, k)?;
    let cover = window_cover(tw, &ws, k, opts.cover)?;
    if opts.verify {
        if let (Some(idx), Some(c)) = (&ws.index, &cover) {
            let masked = mask(p, tw, idx, &c.learned, alphabet_size);
            let again = match_banded(&masked.p, &masked.t, k);
            if occ_keys(&again) != occ_keys(local) {
                return Err(Error::InternalInvariantBroken(
                    "masked strings change the occurrence set".into(),
                ));
            }
        }
    }
    let mut items: Vec<StoredAlignment> =
        ws.set.items.iter().map(|it| StoredAlignment::of(&it.alignment, it.info.clone())).collect();
    if items[0] == items[1] {
        items.remove(1);
    }
    let learned = cover.as_ref().map_or(0, PeriodCover::learned_count);
    let fragments = cover.map(|c| c.fragments).unwrap_or_default();
    Ok((items, fragments, ws, learned))
}

fn encode_window(
    p: &[Sym],
    t: &[Sym],
    k: usize,
    occs: &[CostedOccurrence],
    index: usize,
    (lo, hi): (usize, usize),
    alphabet_size: usize,
    opts: &EncodeOptions,
) -> Encoded {
    let first = occs.partition_point(|o| o.start < lo);
    let last = occs.partition_point(|o| o.start < hi);
    let mine = &occs[first..last];
    let mut report = WindowReport {
        index,
        kind: WindowKind::Empty,
        offset: lo,
        len: 0,
        set_size: 0,
        bc_trace: Vec::new(),
        weight_total: 0,
        learned: 0,
        bits: 0,
    };
    let done = |record: WindowRecord, mut report: WindowReport, violation: Option<String>| {
        report.kind = record.kind();
        let mut w = Writer::default();
        write_window(&mut w, &record);
        report.bits = 8 * w.buf.len();
        Encoded { record, report, violation }
    };
    if mine.is_empty() {
        return done(WindowRecord::Empty, report, None);
    }
    if mine.len() == 1 {
        let o = &mine[0];
        let a = canonical_alignment(p, t, o.start, o.end, k).expect("occurrence from the matcher");
        let info = edit_info(&a, p, t);
        report.offset = o.start;
        report.len = o.end - o.start;
        report.set_size = 1;
        return done(WindowRecord::Single(StoredAlignment::of(&a, info)), report, None);
    }
    let ell = mine[0].start;
    let r = mine.iter().map(|o| o.end).max().unwrap();
    let tw = &t[ell..r];
    let local: Vec<CostedOccurrence> = occs[first..]
        .iter()
        .take_while(|o| o.start < r)
        .filter(|o| o.end <= r)
        .map(|o| CostedOccurrence::new(o.start - ell, o.end - ell, o.cost))
        .collect();
    report.offset = ell;
    report.len = r - ell;
    match encode_structured(p, tw, &local, k, alphabet_size, opts) {
        Ok((items, fragments, ws, learned)) => {
            report.set_size = ws.set.len();
            report.bc_trace = ws.bc_trace;
            report.weight_total = ws.weights.map_or(0, |w| w.total);
            report.learned = learned;
            let record = WindowRecord::Structured { offset: ell, len: r - ell, items, fragments };
            done(record, report, None)
        }
        Err(e) => {
            let msg = format!("window {index}: {e}");
            done(WindowRecord::Raw { offset: ell, text: tw.to_vec() }, report, Some(msg))
        }
    }
}

/// Builds the sketch of all k-edit occurrences of `p` in `t`.
pub fn encode(p: &[Sym], t: &[Sym], k: usize, opts: &EncodeOptions) -> Result<(Sketch, EncodeReport)> {
    if k == 0 {
        return Err(Error::BadParams("k must be at least 1".into()));
    }
    let (pr, tr, alphabet_size) = reduce_alphabet(p, t, opts.chars);
    let (n, m) = (tr.len(), pr.len());
    if alphabet_size.checked_add(n + m + 1).is_none_or(|v| v > Sym::MAX as usize) {
        return Err(Error::BadParams("alphabet too large to allocate mask symbols".into()));
    }
    let mut header = Header {
        version: VERSION,
        chars: opts.chars,
        n,
        m,
        k,
        alphabet_size,
        block_len: 0,
        window_count: 1,
    };
    if 4 * k > m {
        header.block_len = n + 1;
        let windows = vec![WindowRecord::Raw { offset: 0, text: tr.clone() }];
        let sketch = Sketch { header, pattern: Some(pr), windows };
        let bits = sketch_size_bits(&sketch);
        let report = WindowReport {
            index: 0,
            kind: WindowKind::Raw,
            offset: 0,
            len: n,
            set_size: 0,
            bc_trace: Vec::new(),
            weight_total: 0,
            learned: 0,
            bits,
        };
        return Ok((sketch, EncodeReport { windows: vec![report], violations: Vec::new() }));
    }
    let max_block = m - 3 * k;
    let block_len = opts.block_len.unwrap_or(max_block);
    if block_len == 0 || block_len > max_block {
        return Err(Error::BadParams(format!("block length must be in [1, {max_block}]")));
    }
    header.block_len = block_len;
    header.window_count = n.div_ceil(block_len).max(1);
    let occs = match_banded(&pr, &tr, k);
    let encoded: Vec<Encoded> = (0..header.window_count)
        .into_par_iter()
        .map(|i| encode_window(&pr, &tr, k, &occs, i, header.block(i), alphabet_size, opts))
        .collect();
    let mut report = EncodeReport::default();
    let mut windows = Vec::with_capacity(encoded.len());
    for e in encoded {
        windows.push(e.record);
        report.windows.push(e.report);
        report.violations.extend(e.violation);
    }
    let pattern = windows.iter().any(|w| w.kind() == WindowKind::Raw).then_some(pr);
    Ok((Sketch { header, pattern, windows }, report))
}

/// Exact serialized size in bits.
pub fn sketch_size_bits(s: &Sketch) -> usize {
    8 * s.to_bytes().len()
}

fn write_alignment(w: &mut Writer, a: &StoredAlignment) {
    w.uint(a.y0);
    w.uint(a.y1 - a.y0);
    w.uint(a.info.records.len());
    let sym = |c: Option<Sym>| c.map_or(0, |c| u64::from(c) + 1);
    for r in &a.info.records {
        w.uint(r.x);
        w.varint(sym(r.cx));
        w.uint(r.y - a.y0);
        w.varint(sym(r.cy));
    }
}

fn read_alignment(r: &mut Reader) -> Result<StoredAlignment> {
    let y0 = r.uint()?;
    let y1 = y0.checked_add(r.uint()?).ok_or_else(|| Error::Corrupt("alignment end overflows".into()))?;
    let count = r.count()?;
    let sym = |v: u64| -> Result<Option<Sym>> {
        match v {
            0 => Ok(None),
            v => Sym::try_from(v - 1).map(Some).map_err(|_| Error::Corrupt("symbol out of range".into())),
        }
    };
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let x = r.uint()?;
        let cx = sym(r.varint()?)?;
        let y = y0.checked_add(r.uint()?).ok_or_else(|| Error::Corrupt("record offset overflows".into()))?;
        let cy = sym(r.varint()?)?;
        records.push(EditRecord { x, cx, y, cy });
    }
    Ok(StoredAlignment { y0, y1, info: EditInfo { records } })
}

fn write_fragment(w: &mut Writer, f: &LearnedFragment) {
    w.byte(match f.dir {
        Direction::Forward => 0,
        Direction::Reversed => 1,
    });
    w.uint(f.start);
    w.uint(f.phrases.len());
    for ph in &f.phrases {
        match *ph {
            Phrase::Literal(c) => w.varint(u64::from(c) << 1),
            Phrase::Copy { src, len } => {
                w.varint(((src as u64) << 1) | 1);
                w.uint(len);
            }
        }
    }
}

fn read_fragment(r: &mut Reader) -> Result<LearnedFragment> {
    let dir = match r.byte()? {
        0 => Direction::Forward,
        1 => Direction::Reversed,
        d => return Err(Error::Corrupt(format!("bad fragment direction {d}"))),
    };
    let start = r.uint()?;
    let count = r.count()?;
    let mut phrases = Vec::with_capacity(count);
    for _ in 0..count {
        let a = r.varint()?;
        if a & 1 == 0 {
            let c = Sym::try_from(a >> 1).map_err(|_| Error::Corrupt("symbol out of range".into()))?;
            phrases.push(Phrase::Literal(c));
        } else {
            let src = usize::try_from(a >> 1).map_err(|_| Error::Corrupt("source out of range".into()))?;
            let len = r.uint()?;
            if len == 0 {
                return Err(Error::Corrupt("empty copy phrase".into()));
            }
            phrases.push(Phrase::Copy { src, len });
        }
    }
    Ok(LearnedFragment { start, dir, phrases })
}

fn write_window(w: &mut Writer, rec: &WindowRecord) {
    match rec {
        WindowRecord::Empty => w.byte(0),
        WindowRecord::Raw { offset, text } => {
            w.byte(1);
            w.uint(*offset);
            w.uint(text.len());
            for &c in text {
                w.varint(c.into());
            }
        }
        WindowRecord::Single(a) => {
            w.byte(2);
            write_alignment(w, a);
        }
        WindowRecord::Structured { offset, len, items, fragments } => {
            w.byte(3);
            w.uint(*offset);
            w.uint(*len);
            w.uint(items.len());
            for a in items {
                write_alignment(w, a);
            }
            w.uint(fragments.len());
            for f in fragments {
                write_fragment(w, f);
            }
        }
    }
}

fn read_window(r: &mut Reader) -> Result<WindowRecord> {
    Ok(match r.byte()? {
        0 => WindowRecord::Empty,
        1 => {
            let offset = r.uint()?;
            let len = r.count()?;
            let text = (0..len).map(|_| read_sym(r)).collect::<Result<_>>()?;
            WindowRecord::Raw { offset, text }
        }
        2 => WindowRecord::Single(read_alignment(r)?),
        3 => {
            let offset = r.uint()?;
            let len = r.uint()?;
            let count = r.count()?;
            if !(1..=2 + usize::BITS as usize).contains(&count) {
                return Err(Error::Corrupt(format!("alignment set of size {count}")));
            }
            let items = (0..count).map(|_| read_alignment(r)).collect::<Result<_>>()?;
            let nf = r.count()?;
            let fragments = (0..nf).map(|_| read_fragment(r)).collect::<Result<_>>()?;
            WindowRecord::Structured { offset, len, items, fragments }
        }
        tag => return Err(Error::Corrupt(format!("unknown window tag {tag}"))),
    })
}

fn read_sym(r: &mut Reader) -> Result<Sym> {
    Sym::try_from(r.varint()?).map_err(|_| Error::Corrupt("symbol out of range".into()))
}

impl Sketch {
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut w = Writer::default();
        w.bytes(MAGIC);
        w.byte(h.version);
        let mut flags = 0u8;
        if h.chars {
            flags |= FLAG_CHARS;
        }
        if self.pattern.is_some() {
            flags |= FLAG_PATTERN;
        }
        w.byte(flags);
        for v in [h.n, h.m, h.k, h.alphabet_size, h.block_len, h.window_count] {
            w.uint(v);
        }
        if let Some(p) = &self.pattern {
            for &c in p {
                w.varint(c.into());
            }
        }
        for rec in &self.windows {
            write_window(&mut w, rec);
        }
        w.buf
    }

    pub fn from_bytes(data: &[u8]) -> Result<Sketch> {
        let mut r = Reader::new(data);
        if r.take(4).map_err(|_| Error::Corrupt("missing magic".into()))? != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let version = r.byte()?;
        if version != VERSION {
            return Err(Error::Unsupported(version));
        }
        let flags = r.byte()?;
        if flags & !(FLAG_CHARS | FLAG_PATTERN) != 0 {
            return Err(Error::Corrupt(format!("unknown flags {flags:#x}")));
        }
        let n = r.uint()?;
        let m = r.uint()?;
        let k = r.uint()?;
        let alphabet_size = r.uint()?;
        let block_len = r.uint()?;
        let window_count = r.count()?;
        let header = Header { version, chars: flags & FLAG_CHARS != 0, n, m, k, alphabet_size, block_len, window_count };
        if k == 0 || block_len == 0 || window_count == 0 {
            return Err(Error::Corrupt("degenerate header".into()));
        }
        if n.div_ceil(block_len).max(1) != window_count {
            return Err(Error::Corrupt("window count does not match the block length".into()));
        }
        let pattern = if flags & FLAG_PATTERN != 0 {
            if m > data.len() {
                return Err(Error::Corrupt("pattern longer than the sketch".into()));
            }
            Some((0..m).map(|_| read_sym(&mut r)).collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        let windows = (0..window_count).map(|_| read_window(&mut r)).collect::<Result<Vec<_>>>()?;
        if !r.at_end() {
            return Err(Error::Corrupt("trailing bytes after the last window".into()));
        }
        Ok(Sketch { header, pattern, windows })
    }

    /// Serialized size of each window record in bits.
    pub fn window_bits(&self) -> Vec<usize> {
        self.windows
            .iter()
            .map(|rec| {
                let mut w = Writer::default();
                write_window(&mut w, rec);
                8 * w.buf.len()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Also produce an optimal alignment and edit information per occurrence.
    pub alignments: bool,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions { alignments: true }
    }
}

fn shift_info(e: &EditInfo, dy: usize) -> EditInfo {
    EditInfo { records: e.records.iter().map(|r| EditRecord { y: r.y + dy, ..*r }).collect() }
}

/// Occurrences of `p` in `text` (placed at `offset`) that start in `[lo, hi)`.
fn occurrences_in(p: &[Sym], text: &[Sym], offset: usize, k: usize, (lo, hi): (usize, usize), opts: DecodeOptions) -> Vec<Decoded> {
    match_banded(p, text, k)
        .into_iter()
        .filter(|o| (lo..hi).contains(&(o.start + offset)))
        .map(|o| {
            let (alignment, info) = if opts.alignments {
                let a = canonical_alignment(p, text, o.start, o.end, k).expect("verified occurrence");
                let info = edit_info(&a, p, text);
                let a = Alignment { points: a.points.iter().map(|&(x, y)| (x, y + offset)).collect() };
                (Some(a), Some(shift_info(&info, offset)))
            } else {
                (None, None)
            };
            Decoded {
                occurrence: CostedOccurrence { start: o.start + offset, end: o.end + offset, cost: o.cost, alignment },
                info,
            }
        })
        .collect()
}

/// Rebuilds `P#` and the masked window from a structured record.
pub fn rebuild_masked(
    header: &Header,
    len: usize,
    items: &[StoredAlignment],
    fragments: &[LearnedFragment],
) -> Result<(Vec<Sym>, Vec<Sym>)> {
    let m = header.m;
    let corrupt = |e: Error| match e {
        Error::Corrupt(s) => Error::Corrupt(s),
        other => Error::Corrupt(other.to_string()),
    };
    let mut set_items = Vec::with_capacity(items.len() + 1);
    for a in items {
        let alignment = a.rebuild(m, len)?;
        set_items.push(SetItem { alignment, info: a.info.clone() });
    }
    if set_items.len() == 1 {
        set_items.push(set_items[0].clone());
    }
    let set = AlignmentSet { items: set_items, k: header.k };
    if !set.encloses(m, len) {
        return Err(Error::Corrupt("alignment set does not enclose the window".into()));
    }
    let g = build_graph(m, len, &set).map_err(corrupt)?;
    let mut class_sym: HashMap<usize, Sym> = HashMap::new();
    for it in &set.items {
        for r in &it.info.records {
            for (v, c) in [(r.x, r.cx), (m + r.y, r.cy)] {
                if let Some(c) = c {
                    let cls = g.black_class[v];
                    if *class_sym.entry(cls).or_insert(c) != c {
                        return Err(Error::Corrupt("edit records disagree on a character".into()));
                    }
                }
            }
        }
    }
    let (idx, learned_sym) = if g.bc > 0 {
        let idx = black_indexing(&g, &set).map_err(corrupt)?;
        let (_, syms) = covered_components(&idx, fragments, len)?;
        (Some(idx), syms)
    } else {
        if !fragments.is_empty() {
            return Err(Error::Corrupt("fragments without black components".into()));
        }
        (None, Vec::new())
    };
    let sym_of = |v: usize, comp: Option<usize>| -> Result<Sym> {
        if let Some(c) = comp {
            return Ok(learned_sym[c].unwrap_or_else(|| mask_symbol(header.alphabet_size, c)));
        }
        class_sym
            .get(&g.black_class[v])
            .copied()
            .ok_or_else(|| Error::Corrupt(format!("character at vertex {v} cannot be determined")))
    };
    let comp_p = |x: usize| idx.as_ref().and_then(|i| i.comp_of_p[x]);
    let comp_t = |y: usize| idx.as_ref().and_then(|i| i.comp_of_t[y]);
    let p = (0..m).map(|x| sym_of(x, comp_p(x))).collect::<Result<Vec<_>>>()?;
    let t = (0..len).map(|y| sym_of(m + y, comp_t(y))).collect::<Result<Vec<_>>>()?;
    Ok((p, t))
}

fn decode_window(s: &Sketch, i: usize, opts: DecodeOptions) -> Result<Vec<Decoded>> {
    let h = &s.header;
    let block = h.block(i);
    let fits = |offset: usize, len: usize| offset.checked_add(len).is_some_and(|e| e <= h.n);
    match &s.windows[i] {
        WindowRecord::Empty => Ok(Vec::new()),
        WindowRecord::Raw { offset, text } => {
            let p = s.pattern.as_ref().ok_or_else(|| Error::Corrupt("RAW window without a stored pattern".into()))?;
            if !fits(*offset, text.len()) {
                return Err(Error::Corrupt("RAW window outside the text".into()));
            }
            Ok(occurrences_in(p, text, *offset, h.k, block, opts))
        }
        WindowRecord::Single(a) => {
            if a.y1 > h.n || !(block.0..block.1).contains(&a.y0) || a.info.cost() > h.k {
                return Err(Error::Corrupt("SINGLE record outside its block".into()));
            }
            let al = a.rebuild(h.m, h.n)?;
            let occurrence = CostedOccurrence {
                start: a.y0,
                end: a.y1,
                cost: a.info.cost(),
                alignment: opts.alignments.then_some(al),
            };
            Ok(vec![Decoded { occurrence, info: opts.alignments.then(|| a.info.clone()) }])
        }
        WindowRecord::Structured { offset, len, items, fragments } => {
            if !fits(*offset, *len) {
                return Err(Error::Corrupt("STRUCTURED window outside the text".into()));
            }
            let (p, t) = rebuild_masked(h, *len, items, fragments)?;
            Ok(occurrences_in(&p, &t, *offset, h.k, block, opts))
        }
    }
}

/// Recovers every k-edit occurrence from the sketch alone.
pub fn decode(s: &Sketch, opts: DecodeOptions) -> Result<Vec<Decoded>> {
    if s.windows.len() != s.header.window_count {
        return Err(Error::Corrupt("window count mismatch".into()));
    }
    let parts: Vec<Vec<Decoded>> =
        (0..s.windows.len()).into_par_iter().map(|i| decode_window(s, i, opts)).collect::<Result<_>>()?;
    let mut out: Vec<Decoded> = parts.into_iter().flatten().collect();
    out.sort_by_key(|d| (d.occurrence.start, d.occurrence.end));
    out.dedup_by_key(|d| (d.occurrence.start, d.occurrence.end));
    Ok(out)
}
