//! Binary belief propagation with ordered-statistics post-processing.

use crate::algebra::{symplectic_product, BitMatrix, BitVec, PauliVec};
use crate::channel::BiasedChannel;
use crate::tilecode::StabilizerCode;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum BpMethod {
    ProductSum,
    MinSum { scale: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum OsdMethod {
    /// Information-set solve only.
    Osd0,
    /// Weight-1 flips on the first `single` non-pivot bits and weight-2 flips on the first
    /// `pair`; when at most `exhaustive_free` non-pivot bits exist, every pattern is tried.
    CombinationSweep { single: usize, pair: usize, exhaustive_free: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecoderConfig {
    pub bp: BpMethod,
    pub max_iter: usize,
    pub osd: OsdMethod,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            bp: BpMethod::ProductSum,
            max_iter: 30,
            osd: OsdMethod::CombinationSweep { single: 60, pair: 20, exhaustive_free: 12 },
        }
    }
}

impl DecoderConfig {
    /// Scaled min-sum with a short schedule, for large circuit-level detector error models.
    pub fn circuit_level() -> Self {
        Self { bp: BpMethod::MinSum { scale: 0.625 }, max_iter: 10, ..Self::default() }
    }
}

/// Output of one decode.
#[derive(Clone, Debug)]
pub struct Decoded {
    pub correction: BitVec,
    pub bp_converged: bool,
}

/// Decoder bound to a fixed parity matrix and priors; reusable across syndromes.
pub struct BpOsd {
    config: DecoderConfig,
    full_cols: usize,
    /// Active (nonzero-prior) columns in the original indexing.
    active: Vec<usize>,
    rows: usize,
    /// Per active column: rows touched, as a bitset over checks.
    col_sets: Vec<BitVec>,
    prior_llr: Vec<f64>,
    cost: Vec<f64>,
    /// Edges are numbered variable by variable: those of v are var_ptr[v]..var_ptr[v+1].
    var_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    /// Edge ids grouped by check.
    check_ptr: Vec<usize>,
    check_edge: Vec<usize>,
    rank: usize,
}

impl BpOsd {
    /// `h` is m×N; `priors[j]` is the probability that bit j flips.
    pub fn new(h: &BitMatrix, priors: &[f64], config: DecoderConfig) -> Self {
        assert_eq!(h.cols(), priors.len(), "one prior per column");
        let active: Vec<usize> = (0..h.cols()).filter(|&j| priors[j] > 0.0).collect();
        let ht = h.transpose();
        let col_sets: Vec<BitVec> = active.iter().map(|&j| ht.row(j)).collect();
        let prior_llr: Vec<f64> = active
            .iter()
            .map(|&j| {
                let p = priors[j].clamp(1e-300, 1.0 - 1e-16);
                ((1.0 - p) / p).ln()
            })
            .collect();
        let cost = prior_llr.clone();
        let mut by_check = vec![Vec::new(); h.rows()];
        let mut var_ptr = vec![0];
        let mut edge_var = Vec::new();
        for (v, set) in col_sets.iter().enumerate() {
            for c in set.iter_ones() {
                by_check[c].push(edge_var.len());
                edge_var.push(v);
            }
            var_ptr.push(edge_var.len());
        }
        let mut check_ptr = vec![0];
        let mut check_edge = Vec::with_capacity(edge_var.len());
        for es in by_check {
            check_edge.extend(es);
            check_ptr.push(check_edge.len());
        }
        let active_matrix = BitMatrix::from_rows(h.rows(), &col_sets);
        let rank = active_matrix.rank();
        Self {
            config,
            full_cols: h.cols(),
            active,
            rows: h.rows(),
            col_sets,
            prior_llr,
            cost,
            var_ptr,
            edge_var,
            check_ptr,
            check_edge,
            rank,
        }
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    fn expand(&self, local: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.full_cols);
        for i in local.iter_ones() {
            out.set(self.active[i], true);
        }
        out
    }

    fn local_syndrome(&self, x: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.rows);
        for v in x.iter_ones() {
            s.xor_assign(&self.col_sets[v]);
        }
        s
    }

    /// Belief propagation. Returns posterior LLRs, hard decision and convergence.
    pub fn bp(&self, syndrome: &BitVec) -> (Vec<f64>, BitVec, bool) {
        let nv = self.active.len();
        let ne = self.edge_var.len();
        let mut q: Vec<f64> = self.edge_var.iter().map(|&v| self.prior_llr[v]).collect();
        let mut r = vec![0.0f64; ne];
        let mut post = self.prior_llr.clone();
        let mut hard = vec![false; nv];
        let mut buf: Vec<f64> = Vec::new();
        let mut pre: Vec<f64> = Vec::new();
        for _ in 0..self.config.max_iter {
            for c in 0..self.rows {
                let edges = &self.check_edge[self.check_ptr[c]..self.check_ptr[c + 1]];
                let sign = if syndrome.get(c) { -1.0 } else { 1.0 };
                let d = edges.len();
                if d == 0 {
                    continue;
                }
                match self.config.bp {
                    BpMethod::ProductSum => {
                        buf.clear();
                        buf.extend(edges.iter().map(|&e| (q[e] * 0.5).tanh()));
                        // prefix/suffix products exclude each edge in turn
                        let mut prefix = 1.0;
                        pre.clear();
                        for &t in buf.iter() {
                            pre.push(prefix);
                            prefix *= t;
                        }
                        let mut suffix = 1.0;
                        for i in (0..d).rev() {
                            let prod = (pre[i] * suffix).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                            r[edges[i]] = sign * 2.0 * prod.atanh();
                            suffix *= buf[i];
                        }
                    }
                    BpMethod::MinSum { scale } => {
                        let mut min1 = f64::INFINITY;
                        let mut min2 = f64::INFINITY;
                        let mut arg = 0;
                        let mut parity = false;
                        for (i, &e) in edges.iter().enumerate() {
                            let a = q[e].abs();
                            parity ^= q[e] < 0.0;
                            if a < min1 {
                                min2 = min1;
                                min1 = a;
                                arg = i;
                            } else if a < min2 {
                                min2 = a;
                            }
                        }
                        let (m1, m2) = (sign * scale * min1, sign * scale * min2);
                        for (i, &e) in edges.iter().enumerate() {
                            let m = if i == arg { m2 } else { m1 };
                            r[e] = if parity ^ (q[e] < 0.0) { -m } else { m };
                        }
                    }
                }
            }
            for v in 0..nv {
                let es = self.var_ptr[v]..self.var_ptr[v + 1];
                let total: f64 = self.prior_llr[v] + r[es.clone()].iter().sum::<f64>();
                post[v] = total;
                for e in es {
                    q[e] = total - r[e];
                }
                hard[v] = total < 0.0;
            }
            let satisfied = (0..self.rows).all(|c| {
                let par = self.check_edge[self.check_ptr[c]..self.check_ptr[c + 1]]
                    .iter()
                    .fold(false, |a, &e| a ^ hard[self.edge_var[e]]);
                par == syndrome.get(c)
            });
            if satisfied {
                return (post, BitVec::from_bools(&hard), true);
            }
        }
        (post, BitVec::from_bools(&hard), false)
    }

    /// Full BP+OSD decode; the correction always reproduces the syndrome.
    pub fn decode(&self, syndrome: &BitVec) -> Result<Decoded, Error> {
        assert_eq!(syndrome.len(), self.rows, "syndrome length mismatch");
        if syndrome.is_zero() {
            return Ok(Decoded { correction: BitVec::zeros(self.full_cols), bp_converged: true });
        }
        let (post, hard, ok) = self.bp(syndrome);
        if ok {
            return Ok(Decoded { correction: self.expand(&hard), bp_converged: true });
        }
        let local = self.osd(syndrome, &post)?;
        Ok(Decoded { correction: self.expand(&local), bp_converged: false })
    }

    fn cost_of(&self, x: &BitVec) -> f64 {
        x.iter_ones().map(|v| self.cost[v]).sum()
    }

    /// Ordered-statistics decoding from the given posterior LLRs.
    pub fn osd(&self, syndrome: &BitVec, post: &[f64]) -> Result<BitVec, Error> {
        let nv = self.active.len();
        // most likely flipped first; index breaks ties
        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by(|&a, &b| post[a].partial_cmp(&post[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        let mut elim = Elimination::new(self.rows, self.rank);
        let mut free: Vec<(usize, BitVec)> = Vec::new();
        let want_free = match self.config.osd {
            OsdMethod::Osd0 => 0,
            OsdMethod::CombinationSweep { single, pair, exhaustive_free } => {
                let f = nv - self.rank;
                if f <= exhaustive_free {
                    f
                } else {
                    single.max(pair).min(f)
                }
            }
        };
        for &v in &order {
            if elim.pivots.len() == self.rank && free.len() >= want_free {
                break;
            }
            if let Some(tag) = elim.push(v, &self.col_sets[v]) {
                free.push((v, tag));
            }
        }
        let Some(base_tag) = elim.express(syndrome) else {
            return Err(Error::Invalid("syndrome is not in the column space of the decoding matrix".into()));
        };
        let pivot_cols = elim.pivots.clone();
        let to_local = |tag: &BitVec, flips: &[usize]| {
            let mut x = BitVec::zeros(nv);
            for i in tag.iter_ones() {
                x.flip(pivot_cols[i]);
            }
            for &f in flips {
                x.flip(f);
            }
            x
        };
        let mut best = to_local(&base_tag, &[]);
        let mut best_cost = self.cost_of(&best);
        let rank = elim.pivots.len();
        let pivot_cost: Vec<f64> = pivot_cols.iter().map(|&v| self.cost[v]).collect();
        let tag_cost = |t: &BitVec| -> f64 { t.iter_ones().map(|i| pivot_cost[i]).sum() };
        if let OsdMethod::CombinationSweep { single, pair, exhaustive_free } = self.config.osd {
            let f = nv - self.rank;
            if f <= exhaustive_free && free.len() == f {
                let mut cur = base_tag.clone();
                let mut flips = vec![false; f];
                for g in 1u64..(1u64 << f) {
                    let j = g.trailing_zeros() as usize;
                    cur.xor_assign(&free[j].1);
                    flips[j] = !flips[j];
                    let fc: f64 = (0..f).filter(|&i| flips[i]).map(|i| self.cost[free[i].0]).sum();
                    let c = tag_cost(&cur) + fc;
                    if c < best_cost {
                        best_cost = c;
                        let fl: Vec<usize> = (0..f).filter(|&i| flips[i]).map(|i| free[i].0).collect();
                        best = to_local(&cur, &fl);
                    }
                }
            } else {
                for i in 0..single.min(free.len()) {
                    let mut t = base_tag.clone();
                    t.xor_assign(&free[i].1);
                    let c = tag_cost(&t) + self.cost[free[i].0];
                    if c < best_cost {
                        best_cost = c;
                        best = to_local(&t, &[free[i].0]);
                    }
                }
                let lim = pair.min(free.len());
                for i in 0..lim {
                    let mut ti = base_tag.clone();
                    ti.xor_assign(&free[i].1);
                    for j in i + 1..lim {
                        let mut t = ti.clone();
                        t.xor_assign(&free[j].1);
                        let c = tag_cost(&t) + self.cost[free[i].0] + self.cost[free[j].0];
                        if c < best_cost {
                            best_cost = c;
                            best = to_local(&t, &[free[i].0, free[j].0]);
                        }
                    }
                }
            }
        }
        debug_assert_eq!(rank, self.rank);
        debug_assert_eq!(self.local_syndrome(&best), *syndrome);
        Ok(best)
    }
}

/// Column-by-column elimination tracking each basis vector as a combination of pivot columns.
struct Elimination {
    basis: Vec<BitVec>,
    tags: Vec<BitVec>,
    /// Basis vector owning each lead row; the basis is kept fully reduced.
    lead_of: Vec<Option<usize>>,
    pivots: Vec<usize>,
    rank_cap: usize,
}

impl Elimination {
    fn new(rows: usize, rank_cap: usize) -> Self {
        Self { basis: Vec::new(), tags: Vec::new(), lead_of: vec![None; rows], pivots: Vec::new(), rank_cap }
    }

    fn reduce(&self, v: &mut BitVec, tag: &mut BitVec) {
        // full reduction means XORing one basis vector never touches another lead
        for i in v.ones() {
            if let Some(k) = self.lead_of[i] {
                v.xor_assign(&self.basis[k]);
                tag.xor_assign(&self.tags[k]);
            }
        }
    }

    /// Insert column `col`; returns its pivot combination when it is dependent.
    fn push(&mut self, col: usize, set: &BitVec) -> Option<BitVec> {
        let mut v = set.clone();
        let mut tag = BitVec::zeros(self.rank_cap);
        self.reduce(&mut v, &mut tag);
        match v.first_one() {
            None => Some(tag),
            Some(lead) => {
                let idx = self.pivots.len();
                tag.flip(idx);
                for k in 0..self.basis.len() {
                    if self.basis[k].get(lead) {
                        self.basis[k].xor_assign(&v);
                        self.tags[k].xor_assign(&tag);
                    }
                }
                self.lead_of[lead] = Some(self.basis.len());
                self.basis.push(v);
                self.tags.push(tag);
                self.pivots.push(col);
                None
            }
        }
    }

    /// Pivot combination reproducing `s`, if any.
    fn express(&self, s: &BitVec) -> Option<BitVec> {
        let mut v = s.clone();
        let mut tag = BitVec::zeros(self.rank_cap);
        self.reduce(&mut v, &mut tag);
        v.is_zero().then_some(tag)
    }
}

/// Decoding matrix for symplectic errors: row r is [H_Z(r) | H_X(r)].
pub fn decode_matrix(code: &StabilizerCode) -> BitMatrix {
    code.parity_matrix()
}

/// Per-bit priors for [x-bits | z-bits].
pub fn channel_priors(n: usize, ch: &BiasedChannel) -> Vec<f64> {
    let (px, pz) = ch.decoder_priors();
    let mut v = vec![px; n];
    v.extend(std::iter::repeat(pz).take(n));
    v
}

pub fn syndrome(code: &StabilizerCode, e: &PauliVec) -> BitVec {
    code.syndrome(e)
}

/// Decoder for a code under an i.i.d. biased channel.
pub fn code_decoder(code: &StabilizerCode, ch: &BiasedChannel, config: DecoderConfig) -> BpOsd {
    BpOsd::new(&decode_matrix(code), &channel_priors(code.n(), ch), config)
}

pub fn correction_pauli(bits: &BitVec) -> PauliVec {
    PauliVec::from_symplectic(bits)
}

/// Residual e·c is a nontrivial logical.
pub fn is_failure(code: &StabilizerCode, logicals: &[PauliVec], error: &PauliVec, correction: &PauliVec) -> Result<bool, Error> {
    let r = error.mul(correction);
    if !code.syndrome(&r).is_zero() {
        return Err(Error::Invalid("residual has nonzero syndrome (decoder bug)".into()));
    }
    Ok(logicals.iter().any(|l| symplectic_product(l, &r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repetition(n: usize) -> BitMatrix {
        let mut h = BitMatrix::zeros(n - 1, n);
        for i in 0..n - 1 {
            h.set(i, i, true);
            h.set(i, i + 1, true);
        }
        h
    }

    #[test]
    fn zero_syndrome() {
        let h = repetition(5);
        let d = BpOsd::new(&h, &[0.1; 5], DecoderConfig::default());
        let r = d.decode(&BitVec::zeros(4)).unwrap();
        assert!(r.correction.is_zero() && r.bp_converged);
    }

    #[test]
    fn repetition_single_flip() {
        let h = repetition(5);
        let cfg = DecoderConfig { max_iter: 5, ..Default::default() };
        let d = BpOsd::new(&h, &[0.1; 5], cfg);
        for q in 0..5 {
            let e = BitVec::from_indices(5, &[q]);
            let s = h.mul_vec(&e);
            let (post, hard, ok) = d.bp(&s);
            assert!(ok);
            assert_eq!(hard, e);
            assert!(post.iter().all(|l| l.is_finite()));
        }
    }

    #[test]
    fn zero_prior_columns_never_flip() {
        let h = repetition(4);
        let d = BpOsd::new(&h, &[0.1, 0.0, 0.1, 0.1], DecoderConfig::default());
        let s = BitVec::from_indices(3, &[0, 1]);
        let c = d.decode(&s).unwrap().correction;
        assert!(!c.get(1));
        assert_eq!(h.mul_vec(&c), s);
    }
}
