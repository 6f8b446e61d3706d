//! The hard instance family `P = 0^m`, `T = S_0 S_0 S_1 S_1 ... 0*`.

use crate::strings::Sym;
use crate::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBoundParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
}

impl LowerBoundParams {
    /// Number of doubled blocks, `⌊n / (2m - 2)⌋`.
    pub fn blocks(&self) -> usize {
        self.n / (2 * self.m - 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub p: Vec<Sym>,
    pub t: Vec<Sym>,
    /// Sorted positions of the `k` ones in each `S_q`.
    pub planted: Vec<Vec<usize>>,
    pub params: LowerBoundParams,
}

pub fn gen_lower_bound(n: usize, m: usize, k: usize, seed: u64) -> Result<LowerBoundInstance> {
    if !(k > 0 && m > k && n >= 2 * m) {
        return Err(Error::BadParams(format!("need n/2 >= m > k > 0, got n={n}, m={m}, k={k}")));
    }
    let params = LowerBoundParams { n, m, k, seed };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::with_capacity(n);
    let mut planted = Vec::with_capacity(params.blocks());
    for _ in 0..params.blocks() {
        let mut ones = sample(&mut rng, m - 1, k).into_vec();
        ones.sort_unstable();
        let mut s = vec![0 as Sym; m - 1];
        for &i in &ones {
            s[i] = 1;
        }
        t.extend_from_slice(&s);
        t.extend_from_slice(&s);
        planted.push(ones);
    }
    t.resize(n, 0);
    Ok(LowerBoundInstance { p: vec![0; m], t, planted, params })
}

/// Reads the planted sets back from the starting positions of `Occ^E_k`:
/// `S_q[i] = 0` exactly when `q(2m-2) + i` starts an occurrence.
pub fn recover_planted(starts: &[usize], params: &LowerBoundParams) -> Result<Vec<Vec<usize>>> {
    let (m, k) = (params.m, params.k);
    let mut sorted = starts.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::with_capacity(params.blocks());
    for q in 0..params.blocks() {
        let base = q * (2 * m - 2);
        let ones: Vec<usize> = (0..m - 1).filter(|&i| sorted.binary_search(&(base + i)).is_err()).collect();
        if ones.len() != k {
            return Err(Error::NotFromFamily(format!(
                "block {q} would hold {} ones, expected {k}",
                ones.len()
            )));
        }
        out.push(ones);
    }
    Ok(out)
}
