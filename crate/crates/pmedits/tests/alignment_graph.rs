mod common;

use common::{check_window, naive_occ, path_cost};
use pmedits::edit::{canonical_alignment, CostedOccurrence};
use pmedits::graph::{
    black_indexing, block_alignment, build_graph, captures, cover_minimal, cover_recursive, extend_set,
    is_period_cover, mask, mask_symbol, weight_covers, weight_function, AlignmentSet, SetItem,
};
use pmedits::sketch::{encode, reduce_alphabet, structure_window, EncodeOptions, WindowKind};
use pmedits::workload::perturb;
use pmedits::{Error, Sym};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(x: &str) -> Vec<Sym> {
    x.bytes().map(|b| Sym::from(b - b'a')).collect()
}

fn item(p: &[Sym], t: &[Sym], start: usize, end: usize, k: usize) -> SetItem {
    SetItem::new(canonical_alignment(p, t, start, end, k).unwrap(), p, t)
}

fn set(p: &[Sym], t: &[Sym], spans: &[(usize, usize)], k: usize) -> AlignmentSet {
    AlignmentSet { items: spans.iter().map(|&(a, b)| item(p, t, a, b, k)).collect(), k }
}

#[test]
fn identity_graph_has_one_component_per_position() {
    let p = s("abcde");
    let sset = set(&p, &p, &[(0, 5), (0, 5)], 0);
    assert!(sset.encloses(5, 5));
    let g = build_graph(5, 5, &sset).unwrap();
    assert_eq!(g.bc, 5);
    for x in 0..5 {
        assert_eq!(g.component[g.p_vertex(x)], g.component[g.t_vertex(x)]);
        assert!(g.is_black(g.p_vertex(x)));
    }
    let idx = black_indexing(&g, &sset).unwrap();
    assert_eq!(idx.p_black, vec![0, 1, 2, 3, 4]);
    assert_eq!(idx.c_last, 4);
}

#[test]
fn two_shifts_in_periodic_text_give_residue_classes() {
    let p = s("ababab");
    let t = s("abababab");
    let sset = set(&p, &t, &[(0, 6), (2, 8)], 0);
    assert!(sset.encloses(6, 8));
    let g = build_graph(6, 8, &sset).unwrap();
    assert_eq!(g.bc, 2);
    let idx = black_indexing(&g, &sset).unwrap();
    for c in 0..2 {
        for i in 0..idx.n_c(c) {
            assert_eq!(idx.tau(c, i), c + 2 * i);
        }
        for j in 0..idx.m_c(c) {
            assert_eq!(idx.pi(c, j), c + 2 * j);
        }
    }
    assert_eq!((idx.m0(), idx.n0()), (3, 4));
    assert_eq!(idx.c_last, 1);
    let wf = weight_function(&sset, &idx).unwrap();
    assert_eq!(wf.w, vec![0, 0]);
    assert!(weight_covers(&p, &t, &idx, &wf));
    for i in 0..idx.n0() {
        let j = if i == idx.n0() - 1 { idx.m0() - 1 } else { 0 };
        let a = block_alignment(&p, &t, &idx, j, i).unwrap();
        assert_eq!(path_cost(&a, &p, &t), Some(0));
    }
    assert!(matches!(block_alignment(&p, &t, &idx, 0, 3), Err(Error::OutOfRange(_))));
    assert!(captures(Some(&idx), 0, 0, 4));
    assert!(!captures(Some(&idx), 0, 0, 1));
    assert!(captures(None, 0, 0, 1));
    // Start 2 is already captured, so the halving lemma does not apply.
    let again = item(&p, &t, 2, 8, 0);
    assert!(matches!(extend_set(&sset, &g, Some(&idx), 0, again), Err(Error::RejectedCaptured)));
}

#[test]
fn substitution_makes_a_red_component() {
    let p = s("abc");
    let t = s("axc");
    let sset = set(&p, &t, &[(0, 3), (0, 3)], 1);
    let g = build_graph(3, 3, &sset).unwrap();
    assert!(!g.is_black(g.p_vertex(1)));
    assert!(!g.is_black(g.t_vertex(1)));
    assert_eq!(g.bc, 2);
    assert_eq!(sset.items[0].info.records.len(), 1);
}

#[test]
fn no_black_components() {
    let p = s("a");
    let t = s("b");
    let sset = set(&p, &t, &[(0, 1), (0, 1)], 1);
    let g = build_graph(1, 1, &sset).unwrap();
    assert_eq!(g.bc, 0);
    assert!(matches!(black_indexing(&g, &sset), Err(Error::NoBlackComponents)));
}

#[test]
fn masking_extremes() {
    let p = s("ababab");
    let t = s("abababab");
    let sset = set(&p, &t, &[(0, 6), (2, 8)], 0);
    let g = build_graph(6, 8, &sset).unwrap();
    let idx = black_indexing(&g, &sset).unwrap();
    let wf = weight_function(&sset, &idx).unwrap();
    assert!(is_period_cover(&t, &idx, &wf, 0, &[true, true]));
    let full = mask(&p, &t, &idx, &[true, true], 2);
    assert_eq!((full.p, full.t), (p.clone(), t.clone()));
    let none = mask(&p, &t, &idx, &[false, false], 2);
    assert_eq!(none.p, vec![2, 3, 2, 3, 2, 3]);
    assert_eq!(mask_symbol(2, 1), 3);
    // A fully periodic window is compressible everywhere, so every cover learns it all.
    for cover in [cover_recursive(&t, &idx, &wf, 0).unwrap(), cover_minimal(&t, &idx, &wf, 0).unwrap()] {
        assert!(is_period_cover(&t, &idx, &wf, 0, &cover.learned));
    }
}

#[test]
fn one_black_component_then_halving_to_zero() {
    // Shifts 0 and 1 on a unary text collapse everything into one component.
    let p = vec![0; 6];
    let t = vec![0; 7];
    let sset = set(&p, &t, &[(0, 6), (1, 7)], 0);
    let g = build_graph(6, 7, &sset).unwrap();
    assert_eq!(g.bc, 1);
    let idx = black_indexing(&g, &sset).unwrap();
    assert_eq!(idx.p_black, (0..6).collect::<Vec<_>>());
}

/// A windowed instance likely to need several alignments: `P` and `T`
/// close to one short period, with a few edits each.
fn periodic_instance(seed: u64) -> (Vec<Sym>, Vec<Sym>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=3);
    let m = rng.gen_range(4 * k..=40);
    let qlen = rng.gen_range(1..=4);
    let q: Vec<Sym> = (0..qlen).map(|_| rng.gen_range(0..3)).collect();
    let base: Vec<Sym> = q.iter().copied().cycle().take(4 * m).collect();
    let p = perturb(&base[..m], rng.gen_range(0..=k), 3, &mut rng);
    let n = rng.gen_range(m..=2 * m);
    let mut t = perturb(&base[..n], rng.gen_range(0..=2 * k), 3, &mut rng);
    if rng.gen_bool(0.3) {
        let at = rng.gen_range(0..t.len());
        t[at] = 7;
    }
    (p, t, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn encoded_windows_satisfy_all_invariants(seed in any::<u64>()) {
        let (p, t, k) = periodic_instance(seed);
        let (pr, tr, asz) = reduce_alphabet(&p, &t, false);
        let (_, rep) = encode(&p, &t, k, &EncodeOptions::default()).unwrap();
        prop_assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        for w in rep.windows.iter().filter(|w| w.kind == WindowKind::Structured) {
            let tw = &tr[w.offset..w.offset + w.len];
            if let Err(e) = check_window(&pr, tw, k, asz) {
                prop_assert!(false, "{}", e);
            }
            let occ: Vec<CostedOccurrence> =
                naive_occ(&pr, tw, k).into_iter().map(|(a, b, c)| CostedOccurrence::new(a, b, c)).collect();
            let ws = structure_window(&pr, tw, &occ, k).unwrap();
            let (Some(idx), Some(wf)) = (&ws.index, &ws.weights) else { continue };
            // Block alignments never cost more than the total weight.
            for i in 0..idx.n0() {
                for j in 0..idx.m0() {
                    if let Ok(a) = block_alignment(&pr, tw, idx, j, i) {
                        prop_assert!(path_cost(&a, &pr, tw).unwrap() <= wf.total);
                    }
                }
            }
            // Captured optimal alignments follow every unlearned component.
            let cover = cover_recursive(tw, idx, wf, k).unwrap();
            for o in occ.iter().filter(|o| captures(Some(idx), wf.total, k, o.start)) {
                let x = canonical_alignment(&pr, tw, o.start, o.end, k).unwrap();
                for c in (0..idx.bc).filter(|&c| !cover.learned[c]) {
                    let mc = idx.m_c(c);
                    let fits = (0..idx.n_c(c)).any(|i| {
                        i + mc <= idx.n_c(c) && (0..mc).all(|j| x.contains(idx.pi(c, j), idx.tau(c, i + j)))
                    });
                    prop_assert!(fits, "occurrence {:?} leaves component {}", o.key(), c);
                }
            }
        }
    }
}

#[test]
fn periodic_instances_reach_structured_windows() {
    let mut structured = 0;
    let mut grown = 0;
    for seed in 0..200 {
        let (p, t, k) = periodic_instance(seed);
        let (_, rep) = encode(&p, &t, k, &EncodeOptions::default()).unwrap();
        for w in rep.windows.iter().filter(|w| w.kind == WindowKind::Structured) {
            structured += 1;
            grown += usize::from(w.set_size > 2);
        }
    }
    assert!(structured > 50, "{structured}");
    assert!(grown > 0);
}
