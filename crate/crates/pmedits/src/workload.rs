//! Seeded instance families for benchmarks and size measurements.

use crate::sketch::gen_lower_bound;
use crate::strings::Sym;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Uniform text over four symbols with edited copies of `P` planted in it.
    Random,
    /// `P` and `T` both close to the same short period.
    Periodic,
    /// The lower-bound family `P = 0^m`, `T = S_0 S_0 S_1 S_1 ...`.
    Cclb,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Random, Family::Periodic, Family::Cclb];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Random => "random",
            Family::Periodic => "periodic",
            Family::Cclb => "cclb",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Family::Random),
            "periodic" => Ok(Family::Periodic),
            "cclb" => Ok(Family::Cclb),
            _ => Err(Error::BadParams(format!("unknown family {s:?}"))),
        }
    }
}

/// Applies `edits` random substitutions, insertions or deletions.
pub fn perturb(s: &[Sym], edits: usize, sigma: Sym, rng: &mut impl Rng) -> Vec<Sym> {
    let mut v = s.to_vec();
    for _ in 0..edits {
        let pos = rng.gen_range(0..=v.len());
        match rng.gen_range(0..3) {
            0 if pos < v.len() => v[pos] = (v[pos] + rng.gen_range(1..sigma)) % sigma,
            1 if pos < v.len() => {
                v.remove(pos);
            }
            _ => v.insert(pos, rng.gen_range(0..sigma)),
        }
    }
    v
}

fn random_string(len: usize, sigma: Sym, rng: &mut impl Rng) -> Vec<Sym> {
    (0..len).map(|_| rng.gen_range(0..sigma)).collect()
}

/// Copies of `p` with up to `k/2` edits each, written over `t` at random spots.
fn plant(t: &mut [Sym], p: &[Sym], copies: usize, k: usize, sigma: Sym, rng: &mut impl Rng) {
    for _ in 0..copies {
        let occ = perturb(p, rng.gen_range(0..=k / 2), sigma, rng);
        if occ.len() > t.len() {
            continue;
        }
        let at = rng.gen_range(0..=t.len() - occ.len());
        t[at..at + occ.len()].copy_from_slice(&occ);
    }
}

/// An instance `(P, T)` of the family with `|P| = m` and `|T| = n`.
pub fn generate(family: Family, n: usize, m: usize, k: usize, seed: u64) -> Result<(Vec<Sym>, Vec<Sym>)> {
    if m == 0 || k == 0 || n < m {
        return Err(Error::BadParams(format!("need n >= m >= 1 and k >= 1, got n={n}, m={m}, k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::Random => {
            let sigma = 4;
            let p = random_string(m, sigma, &mut rng);
            let mut t = random_string(n, sigma, &mut rng);
            plant(&mut t, &p, (n / (2 * m)).max(1), k, sigma, &mut rng);
            Ok((p, t))
        }
        Family::Periodic => {
            let sigma = 4;
            let q: Vec<Sym> = loop {
                let q = random_string(4, sigma, &mut rng);
                if crate::strings::is_primitive(&q)? {
                    break q;
                }
            };
            let base: Vec<Sym> = q.iter().copied().cycle().take(n + m).collect();
            let p = perturb(&base[..m], k / 4, sigma, &mut rng);
            let mut t = base[..n].to_vec();
            for _ in 0..(n * k / (4 * m)).max(1) {
                let pos = rng.gen_range(0..n);
                t[pos] = (t[pos] + rng.gen_range(1..sigma)) % sigma;
            }
            Ok((p, t))
        }
        Family::Cclb => {
            let inst = gen_lower_bound(n, m, k, seed)?;
            Ok((inst.p, inst.t))
        }
    }
}
