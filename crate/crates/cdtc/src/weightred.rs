//! Scaled checks on the torus, materialized symmetries and the two-stage repetition-cascade
//! decoder for horizontal-edge Z errors at infinite bias.
//!
//! Edges are indexed `x + L*y`; all coordinates are taken mod L.

use crate::rng::stream;
use crate::Error;
use rand::Rng;
use rayon::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative order of a modulo m.
pub fn ord_mod(a: u64, m: u64) -> Result<u64, Error> {
    if m < 2 || gcd(a % m, m) != 1 {
        return Err(Error::Invalid(format!("gcd({a}, {m}) != 1")));
    }
    let mut x = a % m;
    let mut t = 1;
    while x != 1 {
        x = x * a % m;
        t += 1;
    }
    Ok(t)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// ℓ prime, ℓ ≡ 2 (mod 3) and 2 a primitive root mod ℓ.
pub fn admissible(ell: u64) -> bool {
    is_prime(ell) && ell % 3 == 2 && ord_mod(2, ell).map(|o| o == ell - 1).unwrap_or(false)
}

/// Edge index of (x, y) mod L.
#[inline]
pub fn edge(x: i64, y: i64, l: usize) -> usize {
    let li = l as i64;
    (x.rem_euclid(li) + li * y.rem_euclid(li)) as usize
}

fn pow2_mod(k: u32, l: usize) -> i64 {
    let mut v = 1i64;
    for _ in 0..k {
        v = v * 2 % l as i64;
    }
    v
}

/// Sorted support with repeated edges cancelled.
fn xor_support(edges: &[usize]) -> Vec<usize> {
    let mut v = edges.to_vec();
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::new();
    for e in v {
        if out.last() == Some(&e) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    out
}

/// S̃_k at (x, y): edges (x,y), (x+2^{k+1}, y+2^k), (x+2^{k+1}, y+2^{k+1}).
pub fn scaled_check(k: u32, x: i64, y: i64, l: usize) -> Vec<usize> {
    let a = pow2_mod(k + 1, l);
    let b = pow2_mod(k, l);
    xor_support(&[edge(x, y, l), edge(x + a, y + b, l), edge(x + a, y + a, l)])
}

/// S_k at (x, y): edges (x,y), (x,y+2^k), (x+2^{k+1},y+2^k), (x+2^{k+1},y+3·2^k).
pub fn weight4_check(k: u32, x: i64, y: i64, l: usize) -> Vec<usize> {
    let a = pow2_mod(k + 1, l);
    let b = pow2_mod(k, l);
    xor_support(&[edge(x, y, l), edge(x, y + b, l), edge(x + a, y + b, l), edge(x + a, y + 3 * b, l)])
}

/// k* = ord_L(2) − 1.
pub fn k_star(l: usize) -> Result<u32, Error> {
    Ok(ord_mod(2, l as u64)? as u32 - 1)
}

/// Checks S_j at (x + 2^{j+1} − 2, y + 2^j − 1) for j = 0..=k*.
pub fn materialized_symmetry(x: i64, y: i64, l: usize) -> Result<Vec<Vec<usize>>, Error> {
    let ks = k_star(l)?;
    Ok((0..=ks)
        .map(|j| weight4_check(j, x + pow2_mod(j + 1, l) - 2, y + pow2_mod(j, l) - 1, l))
        .collect())
}

/// XOR of a list of supports.
pub fn support_product(parts: &[Vec<usize>]) -> Vec<usize> {
    let all: Vec<usize> = parts.iter().flatten().copied().collect();
    xor_support(&all)
}

/// Pair variable j of the symmetry anchored at (x, y): two edges in one column, 2^j apart.
pub fn pair_edges(j: u32, x: i64, y: i64, l: usize) -> (usize, usize) {
    let xx = x + pow2_mod(j + 1, l) - 2;
    let yy = y + pow2_mod(j, l) - 1;
    (edge(xx, yy, l), edge(xx, yy + pow2_mod(j, l), l))
}

/// Syndromes σ_k(x, y) of S̃_k for k = 0..=kmax, derived from the measured σ_0 only.
pub fn scaled_syndromes(sigma0: &[bool], l: usize, kmax: u32) -> Vec<Vec<bool>> {
    let mut out = vec![sigma0.to_vec()];
    for k in 1..=kmax {
        let prev = &out[k as usize - 1];
        let a = pow2_mod(k, l);
        let b = pow2_mod(k - 1, l);
        let mut cur = vec![false; l * l];
        for y in 0..l as i64 {
            for x in 0..l as i64 {
                cur[edge(x, y, l)] = prev[edge(x, y, l)] ^ prev[edge(x + a, y + b, l)] ^ prev[edge(x + a, y + a, l)];
            }
        }
        out.push(cur);
    }
    out
}

/// Base-check syndrome of a horizontal-edge error.
pub fn base_syndrome(err: &[bool], l: usize) -> Vec<bool> {
    let mut s = vec![false; l * l];
    for y in 0..l as i64 {
        for x in 0..l as i64 {
            s[edge(x, y, l)] = err[edge(x, y, l)] ^ err[edge(x + 2, y + 1, l)] ^ err[edge(x + 2, y + 2, l)];
        }
    }
    s
}

/// Cyclic repetition decode: variables v_0..v_{m−1} with checks v_j ⊕ v_{j+1} = c_j.
/// Returns the lighter consistent assignment; ties keep v_0 = 0. With odd total parity no
/// assignment satisfies every check and the last check is dropped.
pub fn cyclic_repetition(c: &[bool]) -> Vec<bool> {
    let m = c.len();
    let mut v = vec![false; m];
    for j in 0..m.saturating_sub(1) {
        v[j + 1] = v[j] ^ c[j];
    }
    let w = v.iter().filter(|&&b| b).count();
    if 2 * w > m {
        for b in &mut v {
            *b = !*b;
        }
    }
    v
}

/// Precomputed geometry for one lattice size.
pub struct Cascade {
    pub l: usize,
    pub k_star: u32,
}

impl Cascade {
    /// Accepts L = 7ℓ with ℓ admissible, or L = 7; verifies symmetry identities and pair coverage.
    pub fn new(l: usize) -> Result<Self, Error> {
        if l % 7 != 0 || !(l == 7 || admissible((l / 7) as u64)) {
            return Err(Error::Invalid(format!("L = {l} is not 7 times an admissible prime")));
        }
        let ks = k_star(l)?;
        let mut covered = vec![false; l * l];
        for y in 0..l as i64 {
            for x in 0..l as i64 {
                let pairs: Vec<(usize, usize)> = (0..=ks).map(|j| pair_edges(j, x, y, l)).collect();
                let mut all: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
                all.sort_unstable();
                all.dedup();
                if all.len() != 2 * pairs.len() {
                    return Err(Error::Validation(format!("pair variables overlap at anchor ({x},{y})")));
                }
                covered[pairs[0].0] = true;
            }
        }
        if let Some(e) = covered.iter().position(|&c| !c) {
            return Err(Error::Validation(format!("pair at edge {e} not inferred by any anchor")));
        }
        Ok(Self { l, k_star: ks })
    }

    /// Decode from the base syndrome; returns the horizontal-edge correction.
    pub fn decode(&self, sigma0: &[bool]) -> Vec<bool> {
        let l = self.l;
        let ks = self.k_star;
        let sig = scaled_syndromes(sigma0, l, ks + 1);
        // stage 1: pair parity v_0 = e(x,y) ⊕ e(x,y+1) for every anchor
        let mut pair = vec![false; l * l];
        for y in 0..l as i64 {
            for x in 0..l as i64 {
                // S_j at the symmetry's j-th anchor factors as S̃_j·S̃_{j+1} at (x−2, y−1)
                let c: Vec<bool> = (0..=ks as usize)
                    .map(|j| sig[j][edge(x - 2, y - 1, l)] ^ sig[j + 1][edge(x - 2, y - 1, l)])
                    .collect();
                pair[edge(x, y, l)] = cyclic_repetition(&c)[0];
            }
        }
        // stage 2: one cyclic repetition code per column
        let mut out = vec![false; l * l];
        for x in 0..l as i64 {
            let c: Vec<bool> = (0..l as i64).map(|y| pair[edge(x, y, l)]).collect();
            let v = cyclic_repetition(&c);
            for y in 0..l as i64 {
                out[edge(x, y, l)] = v[y as usize];
            }
        }
        out
    }
}

/// Fraction of trials whose correction differs from the sampled i.i.d. error.
pub fn failure_rate(l: usize, p: f64, trials: usize, seed: u64) -> Result<(usize, usize), Error> {
    let c = Cascade::new(l)?;
    let fails = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream(seed, i as u64);
            let err: Vec<bool> = (0..l * l).map(|_| rng.gen::<f64>() < p).collect();
            let s = base_syndrome(&err, l);
            c.decode(&s) != err
        })
        .count();
    Ok((fails, trials))
}
