//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

mod common;

use common::{check_window, keys, naive_ed, path_cost, random_instance, random_string};
use pmedits::analysis::{analyze, verify_decomposition};
use pmedits::compress::{lz77, selfed, Phrase};
use pmedits::edit::{edit_info, occ_edits_oracle, reconstruct_alignment, CostedOccurrence, EditInfo};
use pmedits::matcher::{attach_alignments, find_occurrences, match_banded};
use pmedits::sketch::{
    decode, encode, gen_lower_bound, recover_planted, reduce_alphabet, sketch_size_bits, DecodeOptions, EncodeOptions,
    Sketch, WindowKind,
};
use pmedits::workload::{generate, perturb, Family};
use pmedits::Sym;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

/// Ceiling on the fitted envelope constant of criterion 7.
const ENVELOPE_C_MAX: f64 = 64.0;
/// Allowed deviation of the lower-bound size slope from 1.
const SLOPE_TOLERANCE: f64 = 0.25;
const MATCH_SECONDS: f64 = 10.0;
const SKETCH_SECONDS: f64 = 30.0;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Per-window tallies for criterion 5, filled while running 1 and 2.
#[derive(Default)]
struct WindowTally {
    windows: usize,
    covers: usize,
    max_set: usize,
    encoder_violations: usize,
    failures: Vec<String>,
}

fn same_info(d: Option<&EditInfo>, o: &CostedOccurrence, p: &[Sym], t: &[Sym]) -> bool {
    o.alignment.as_ref().is_some_and(|a| d == Some(&edit_info(a, p, t)))
}

/// An edit info round-trips if it rebuilds into an optimal alignment of
/// `p` onto `t[start..end)` whose own edit info is the same record list.
fn round_trips(info: &EditInfo, o: &CostedOccurrence, p: &[Sym], t: &[Sym]) -> bool {
    let Ok(a) = reconstruct_alignment(info, p.len(), t.len(), Some(o.start)) else { return false };
    a.first() == (0, o.start) && a.last() == (p.len(), o.end) && path_cost(&a, p, t) == Some(o.cost) && edit_info(&a, p, t) == *info
}

/// Exact equivalence of decode and match_banded with the oracle on one instance.
fn check_instance(p: &[Sym], t: &[Sym], k: usize, tally: &mut WindowTally) -> Result<(), String> {
    let (pr, tr, asz) = reduce_alphabet(p, t, false);
    let oracle = occ_edits_oracle(&pr, &tr, k);
    let (sk, rep) = encode(p, t, k, &EncodeOptions::default()).map_err(|e| e.to_string())?;
    tally.encoder_violations += rep.violations.len();
    let sk = Sketch::from_bytes(&sk.to_bytes()).map_err(|e| e.to_string())?;
    let dec = decode(&sk, DecodeOptions::default()).map_err(|e| e.to_string())?;
    if dec.len() != oracle.len() || dec.iter().zip(&oracle).any(|(d, o)| d.occurrence.key() != o.key()) {
        return Err("decode differs from the oracle".into());
    }
    for (d, o) in dec.iter().zip(&oracle) {
        let info = d.info.as_ref().ok_or("decode returned no edit info")?;
        if !round_trips(info, o, &pr, &tr) || !same_info(d.info.as_ref(), o, &pr, &tr) {
            return Err(format!("decoded edit info at {:?} does not match", o.key()));
        }
    }
    let mut mb = match_banded(&pr, &tr, k);
    if keys(&mb) != keys(&oracle) {
        return Err("match_banded differs from the oracle".into());
    }
    attach_alignments(&pr, &tr, k, &mut mb);
    for (b, o) in mb.iter().zip(&oracle) {
        let info = edit_info(b.alignment.as_ref().ok_or("no alignment")?, &pr, &tr);
        if !round_trips(&info, o, &pr, &tr) || !same_info(Some(&info), o, &pr, &tr) {
            return Err(format!("match_banded edit info at {:?} does not match", o.key()));
        }
    }
    for w in rep.windows.iter().filter(|w| w.kind == WindowKind::Structured) {
        let tw = &tr[w.offset..w.offset + w.len];
        tally.windows += 1;
        match check_window(&pr, tw, k, asz) {
            Ok(f) => {
                tally.covers += f.covers_checked;
                tally.max_set = tally.max_set.max(f.set_size);
            }
            Err(e) => tally.failures.push(format!("p={p:?} t={t:?} k={k}: {e}")),
        }
    }
    Ok(())
}

fn binary_strings(max_len: usize) -> Vec<Vec<Sym>> {
    (0..=max_len).flat_map(|len| (0..1u32 << len).map(move |b| (0..len).map(|i| (b >> i) & 1).collect())).collect()
}

fn c1(tally: &mut WindowTally) -> Outcome {
    let ps = binary_strings(6);
    let ts = binary_strings(9);
    let mut count = 0usize;
    let mut bad = Vec::new();
    for k in 1..=2 {
        for p in &ps {
            for t in &ts {
                count += 1;
                if let Err(e) = check_instance(p, t, k, tally) {
                    bad.push(format!("p={p:?} t={t:?} k={k}: {e}"));
                }
            }
        }
    }
    let detail = format!("{count} instances, {} mismatches{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default());
    Outcome { pass: bad.is_empty(), detail }
}

fn c2(tally: &mut WindowTally) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    let mut bad = Vec::new();
    let mut occs = 0usize;
    for _ in 0..1000 {
        let (p, t, k) = random_instance(&mut rng, 64, 96, 4, 8);
        occs += match_banded(&p, &t, k).len();
        if let Err(e) = check_instance(&p, &t, k, tally) {
            bad.push(format!("p={p:?} t={t:?} k={k}: {e}"));
        }
    }
    let detail = format!("1000 instances, {occs} occurrences, {} mismatches{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default());
    Outcome { pass: bad.is_empty(), detail }
}

fn c3() -> Outcome {
    let x: Vec<Sym> = "abacabcabcaaaab".bytes().map(Sym::from).collect();
    let want = vec![
        Phrase::Literal('a' as Sym),
        Phrase::Literal('b' as Sym),
        Phrase::Copy { src: 0, len: 1 },
        Phrase::Literal('c' as Sym),
        Phrase::Copy { src: 0, len: 2 },
        Phrase::Copy { src: 3, len: 5 },
        Phrase::Copy { src: 10, len: 3 },
        Phrase::Copy { src: 8, len: 1 },
    ];
    let got = lz77(&x);
    let shown: Vec<String> = got.iter().map(ToString::to_string).collect();
    Outcome { pass: got == want, detail: format!("z={} {}", got.len(), shown.join(" ")) }
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let mut violations = Vec::new();
    for _ in 0..500 {
        let sigma = rng.gen_range(1..=4);
        let n = rng.gen_range(0..=64);
        let x = if rng.gen_bool(0.5) {
            random_string(&mut rng, n, sigma)
        } else {
            let qlen = rng.gen_range(1..=6);
            let q = random_string(&mut rng, qlen, sigma);
            let base: Vec<Sym> = q.iter().copied().cycle().take(n).collect();
            let e = rng.gen_range(0..=4);
            let mut y = perturb(&base, e, sigma.max(2), &mut rng);
            y.truncate(64);
            y
        };
        let n = x.len();
        let sx = selfed(&x).cost;
        if lz77(&x).len() > 2 * sx {
            violations.push(format!("lz > 2 selfed on {x:?}"));
        }
        for _ in 0..8 {
            let i = rng.gen_range(0..=n);
            let j = rng.gen_range(i..=n);
            let i2 = rng.gen_range(0..=i);
            let j2 = rng.gen_range(j..=n);
            if selfed(&x[i..j]).cost > selfed(&x[i2..j2]).cost {
                violations.push(format!("monotonicity on {x:?} [{i},{j}) in [{i2},{j2})"));
            }
        }
        for cut in 0..=n {
            if sx > selfed(&x[..cut]).cost + selfed(&x[cut..]).cost {
                violations.push(format!("sub-additivity on {x:?} at {cut}"));
            }
        }
        let y = perturb(&x, rng.gen_range(0..=3), sigma.max(2), &mut rng);
        if selfed(&y).cost > sx + 2 * naive_ed(&x, &y) {
            violations.push(format!("triangle on {x:?} -> {y:?}"));
        }
    }
    let detail = format!("500 strings, {} violations{}", violations.len(), violations.first().map(|v| format!(", first: {v}")).unwrap_or_default());
    Outcome { pass: violations.is_empty(), detail }
}

fn c5(tally: &mut WindowTally) -> Outcome {
    // Larger windows than the exhaustive sets reach, from the workload families.
    for fam in Family::ALL {
        for (m, k) in [(64usize, 2usize), (128, 4)] {
            for seed in 0..3 {
                let (p, t) = generate(fam, 4 * m, m, k, seed).unwrap();
                let (pr, tr, asz) = reduce_alphabet(&p, &t, false);
                let (_, rep) = encode(&p, &t, k, &EncodeOptions::default()).unwrap();
                tally.encoder_violations += rep.violations.len();
                for w in rep.windows.iter().filter(|w| w.kind == WindowKind::Structured) {
                    tally.windows += 1;
                    match check_window(&pr, &tr[w.offset..w.offset + w.len], k, asz) {
                        Ok(f) => {
                            tally.covers += f.covers_checked;
                            tally.max_set = tally.max_set.max(f.set_size);
                        }
                        Err(e) => tally.failures.push(format!("{fam} m={m} k={k} seed={seed}: {e}")),
                    }
                }
            }
        }
    }
    let pass = tally.failures.is_empty() && tally.encoder_violations == 0 && tally.windows > 0;
    let detail = format!(
        "{} structured windows, {} covers checked, max |S| = {}, {} violations, {} encoder fallbacks{}",
        tally.windows,
        tally.covers,
        tally.max_set,
        tally.failures.len(),
        tally.encoder_violations,
        tally.failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    Outcome { pass, detail }
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let l: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = l.len() as f64;
    let mx = l.iter().map(|p| p.0).sum::<f64>() / n;
    let my = l.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = l.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = l.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn c6() -> Outcome {
    let (m, k) = (128usize, 8usize);
    let mut failures = Vec::new();
    for seed in 0..100 {
        let inst = gen_lower_bound(16 * m, m, k, seed).unwrap();
        let (sk, _) = encode(&inst.p, &inst.t, k, &EncodeOptions::default()).unwrap();
        let starts: Vec<usize> =
            decode(&sk, DecodeOptions { alignments: false }).unwrap().iter().map(|d| d.occurrence.start).collect();
        match recover_planted(&starts, &inst.params) {
            Ok(sets) if sets == inst.planted => {}
            Ok(_) => failures.push(format!("seed {seed}: wrong sets")),
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let mut pts = Vec::new();
    let mut ratios = Vec::new();
    for mult in [16usize, 32, 64] {
        let n = mult * m;
        let mean = (0..10u64)
            .map(|seed| {
                let inst = gen_lower_bound(n, m, k, 1000 + seed).unwrap();
                sketch_size_bits(&encode(&inst.p, &inst.t, k, &EncodeOptions::default()).unwrap().0) as f64
            })
            .sum::<f64>()
            / 10.0;
        let x = (n as f64 / m as f64) * k as f64 * (m as f64 / k as f64).log2();
        pts.push((x, mean));
        ratios.push(mean / x);
    }
    let slope = loglog_slope(&pts);
    let pass = failures.is_empty() && (slope - 1.0).abs() <= SLOPE_TOLERANCE;
    let detail = format!(
        "100 seeds, {} recovery failures; size slope {slope:.3} over n in [{}, {}], bits/((n/m)k log(m/k)) = {}",
        failures.len(),
        16 * m,
        64 * m,
        ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
    );
    Outcome { pass, detail }
}

fn c7() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut rows = 0;
    let mut wrong = Vec::new();
    for fam in Family::ALL {
        for m in [256usize, 1024, 4096] {
            for k in [4usize, 16, 64] {
                let n = 4 * m;
                let (p, t) = generate(fam, n, m, k, 1).unwrap();
                let (sk, _) = encode(&p, &t, k, &EncodeOptions::default()).unwrap();
                let got = decode(&sk, DecodeOptions { alignments: false }).unwrap();
                let (pr, tr, _) = reduce_alphabet(&p, &t, false);
                if !got.iter().map(|d| d.occurrence.key()).eq(match_banded(&pr, &tr, k).iter().map(CostedOccurrence::key)) {
                    wrong.push(format!("{fam} m={m} k={k}"));
                }
                let lg = (m as f64).log2();
                let c = sketch_size_bits(&sk) as f64 / ((n as f64 / m as f64) * k as f64 * lg * lg);
                if c > worst.0 {
                    worst = (c, format!("{fam} m={m} k={k}"));
                }
                rows += 1;
            }
        }
    }
    let pass = worst.0 <= ENVELOPE_C_MAX && wrong.is_empty();
    let detail =
        format!("{rows} configurations, fitted C = {:.2} (at {}), ceiling {ENVELOPE_C_MAX}, {} decode mismatches", worst.0, worst.1, wrong.len());
    Outcome { pass, detail }
}

/// A pattern of length `m` built to land in a particular case of the analysis.
fn shaped_pattern(rng: &mut impl Rng, shape: usize, m: usize, k: usize) -> Vec<Sym> {
    let primitive = |rng: &mut ChaCha8Rng, len: usize| loop {
        let q = random_string(rng, len, 4);
        if pmedits::strings::is_primitive(&q).unwrap() {
            return q;
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let qmax = (m / (128 * k)).max(1);
    let qlen = local.gen_range(1..=qmax);
    let q = primitive(&mut local, qlen);
    let periodic = |len: usize| -> Vec<Sym> { q.iter().copied().cycle().take(len).collect() };
    let mut p = match shape {
        // Random: long periods everywhere.
        0 => random_string(&mut local, m, 4),
        // Few edits on a short period.
        1 => perturb(&periodic(m), local.gen_range(0..8 * k), 4, &mut local),
        // Periodic head, random tail.
        2 => {
            let h = local.gen_range(m / 2..=m);
            let mut v = periodic(h);
            v.extend(random_string(&mut local, m - h, 4));
            v
        }
        // A few breaks, then a periodic tail: forces the suffix search.
        _ => {
            let l0 = m / (8 * k);
            let head = local.gen_range(1..2 * k) * l0;
            let mut v = random_string(&mut local, head, 4);
            let tail = m - v.len();
            v.extend(periodic(tail));
            v
        }
    };
    p.resize(m, 0);
    p
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0008);
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bad = Vec::new();
    for i in 0..1000 {
        let k = rng.gen_range(1..=4);
        let m = rng.gen_range(64..=4096).max(128 * k);
        let p = shaped_pattern(&mut rng, i % 4, m, k);
        match analyze(&p, k) {
            Ok(d) => {
                *cases.entry(d.case_name()).or_default() += 1;
                if !verify_decomposition(&p, k, &d) {
                    bad.push(format!("shape {} m={m} k={k}: {} rejected", i % 4, d.case_name()));
                }
            }
            Err(e) => bad.push(format!("shape {} m={m} k={k}: {e}", i % 4)),
        }
    }
    let pass = bad.is_empty() && cases.len() == 3;
    let detail = format!("1000 patterns, cases {cases:?}, {} failures{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default());
    Outcome { pass, detail }
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0009);
    let mut bad = Vec::new();
    let mut occs = 0usize;
    for i in 0..500 {
        let (p, t, k) = match i % 3 {
            0 => random_instance(&mut rng, 200, 800, 4, 8),
            1 => {
                let m = rng.gen_range(64..=512);
                let k = rng.gen_range(1..=(m / 16).min(16));
                let (p, t) = generate(Family::Periodic, rng.gen_range(m..=4 * m), m, k, rng.gen()).unwrap();
                (p, t, k)
            }
            _ => {
                let k = rng.gen_range(1..=3);
                let m = rng.gen_range(128 * k..=1024);
                let shape = rng.gen_range(0..4);
                let p = shaped_pattern(&mut rng, shape, m, k);
                let n = rng.gen_range(m..=3 * m);
                let mut t: Vec<Sym> = p.iter().copied().cycle().skip(rng.gen_range(0..m)).take(n).collect();
                for _ in 0..rng.gen_range(0..=3) {
                    let occ = perturb(&p, rng.gen_range(0..=k), 4, &mut rng);
                    if occ.len() <= n {
                        let at = rng.gen_range(0..=n - occ.len());
                        t[at..at + occ.len()].copy_from_slice(&occ);
                    }
                }
                for _ in 0..rng.gen_range(0..=n / 64) {
                    let at = rng.gen_range(0..n);
                    t[at] = rng.gen_range(0..4);
                }
                (p, t, k)
            }
        };
        let want = keys(&match_banded(&p, &t, k));
        occs += want.len();
        match find_occurrences(&p, &t, k) {
            Ok(got) if keys(&got) == want => {}
            Ok(_) => bad.push(format!("instance {i} (m={}, n={}, k={k}) differs", p.len(), t.len())),
            Err(e) => bad.push(format!("instance {i}: {e}")),
        }
    }
    let detail = format!("500 instances, {occs} occurrences, {} mismatches{}", bad.len(), bad.first().map(|b| format!(", first: {b}")).unwrap_or_default());
    Outcome { pass: bad.is_empty(), detail }
}

fn c10() -> Outcome {
    let (n, m, k) = (1_000_000usize, 100_000usize, 32usize);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0010);
    let p = random_string(&mut rng, m, 256);
    let mut t = random_string(&mut rng, n, 256);
    for _ in 0..4 {
        let occ = perturb(&p, rng.gen_range(0..=k), 256, &mut rng);
        let at = rng.gen_range(0..=n - occ.len());
        t[at..at + occ.len()].copy_from_slice(&occ);
    }
    let t0 = Instant::now();
    let found = find_occurrences(&p, &t, k).unwrap();
    let match_s = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let (sk, _) = encode(&p, &t, k, &EncodeOptions::default()).unwrap();
    let dec = decode(&sk, DecodeOptions { alignments: true }).unwrap();
    let sketch_s = t1.elapsed().as_secs_f64();
    let agree = dec.iter().map(|d| d.occurrence.key()).eq(found.iter().map(CostedOccurrence::key));
    let infos = dec.iter().all(|d| d.info.is_some());
    let pass = match_s < MATCH_SECONDS && sketch_s < SKETCH_SECONDS && agree && infos;
    let detail = format!(
        "{} occurrences; match {match_s:.2}s (limit {MATCH_SECONDS}s); encode+decode with edit infos {sketch_s:.2}s (limit {SKETCH_SECONDS}s); {} threads; decode agrees: {agree}",
        found.len(),
        rayon::current_num_threads()
    );
    Outcome { pass, detail }
}

fn main() {
    let mut tally = WindowTally::default();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, o: Outcome| {
        println!("[{}] {id}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    };
    report(1, "exhaustive oracle equivalence", c1(&mut tally));
    report(2, "randomized oracle equivalence", c2(&mut tally));
    report(3, "lz77 figure", c3());
    report(4, "compressibility laws", c4());
    report(5, "structural invariants per window", c5(&mut tally));
    report(6, "lower-bound family", c6());
    report(7, "size envelope", c7());
    report(8, "decomposition soundness", c8());
    report(9, "pipeline agreement", c9());
    report(10, "performance", c10());
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
