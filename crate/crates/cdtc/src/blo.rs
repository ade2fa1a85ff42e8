//! Pure-Z logical structure: basis of logical operators (BLO), weights, overlaps, scaling.

use crate::algebra::{BitMatrix, BitVec, EchelonBasis, PauliVec};
use crate::tilecode::{StabilizerCode, TileLayout};
use crate::Error;
use num_bigint::BigUint;

/// Basis of ker(H_X) made of nontrivial pure-Z logicals.
#[derive(Clone, Debug)]
pub struct BloBasis {
    /// z-supports of the elements.
    pub elements: Vec<BitVec>,
    pub n_z: usize,
    pub k_z: usize,
    /// Pure-Z stabilizer generators (z-supports).
    pub stabilizers: Vec<BitVec>,
}

impl BloBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weights(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.weight()).collect()
    }

    pub fn as_paulis(&self) -> Vec<PauliVec> {
        self.elements.iter().cloned().map(PauliVec::pure_z).collect()
    }
}

/// Basis of the pure-Z stabilizer subgroup, as z-supports.
pub fn pure_z_stabilizers(code: &StabilizerCode) -> Vec<BitVec> {
    let n = code.n();
    let r = code.checks().rref();
    // with x-columns scanned first, rows pivoting in the z-block have zero x-part
    r.reduced
        .row_vecs()
        .into_iter()
        .zip(&r.pivots)
        .filter(|(_, &p)| p >= n)
        .map(|(v, _)| v.slice(n, 2 * n))
        .collect()
}

pub fn pure_z_stab_dim(code: &StabilizerCode) -> usize {
    code.rank() - code.x_part().rank()
}

fn sparsify(mut gens: Vec<BitVec>) -> Vec<BitVec> {
    loop {
        let mut changed = false;
        for i in 0..gens.len() {
            for j in 0..gens.len() {
                if i == j {
                    continue;
                }
                let mut t = gens[i].clone();
                t.xor_assign(&gens[j]);
                if t.weight() < gens[i].weight() {
                    gens[i] = t;
                    changed = true;
                }
            }
        }
        if !changed {
            return gens;
        }
    }
}

fn stabilizer_generators(code: &StabilizerCode) -> Vec<BitVec> {
    let n = code.n();
    let mut gens: Vec<BitVec> = (0..code.m())
        .map(|i| code.check(i))
        .filter(|p| p.x.is_zero())
        .map(|p| p.z)
        .collect();
    let span = EchelonBasis::from_vectors(n, gens.iter());
    let mut span = span;
    for v in pure_z_stabilizers(code) {
        if span.insert(v.clone()) {
            gens.push(v);
        }
    }
    let mut basis = EchelonBasis::new(n);
    let gens = sparsify(gens);
    gens.into_iter().filter(|g| basis.insert(g.clone())).collect()
}

pub fn blo_basis(code: &StabilizerCode) -> Result<BloBasis, Error> {
    let n = code.n();
    let stabilizers = stabilizer_generators(code);
    let n_z = stabilizers.len();
    let stab_span = EchelonBasis::from_vectors(n, stabilizers.iter());
    let kernel = code.x_part().kernel_basis();
    let mut reduced: Vec<BitVec> = kernel
        .into_iter()
        .map(|mut v| {
            stab_span.reduce(&mut v);
            v
        })
        .filter(|v| !v.is_zero())
        .collect();
    reduced.sort_by(|a, b| a.lex_cmp(b));
    let mut span = stab_span.clone();
    let reps: Vec<BitVec> = reduced.into_iter().filter(|v| span.insert(v.clone())).collect();
    let k_z = reps.len();
    if k_z == 0 {
        return Err(Error::Invalid("no pure-Z logicals".into()));
    }
    let mut elements = reps.clone();
    for s in &stabilizers {
        let mut e = reps[0].clone();
        e.xor_assign(s);
        elements.push(e);
    }
    Ok(BloBasis { elements, n_z, k_z, stabilizers })
}

/// |L_Z| = 2^{|B_Z|} − 2^{n_z}.
pub fn count_logicals(basis: &BloBasis) -> BigUint {
    (BigUint::from(1u8) << basis.len()) - (BigUint::from(1u8) << basis.n_z)
}

/// Every nontrivial pure-Z logical (feasible for |B_Z| ≲ 22).
pub fn enumerate_logicals(basis: &BloBasis) -> Vec<BitVec> {
    let d = basis.len();
    assert!(d <= 26, "too many basis elements to enumerate");
    let n = basis.elements.first().map_or(0, |e| e.len());
    let stabs = EchelonBasis::from_vectors(n, basis.stabilizers.iter());
    let mut out = Vec::new();
    let mut cur = BitVec::zeros(n);
    for g in 1u64..(1 << d) {
        // Gray code step
        let bit = g.trailing_zeros() as usize;
        cur.xor_assign(&basis.elements[bit]);
        if !stabs.contains(&cur) {
            out.push(cur.clone());
        }
    }
    out
}

/// Result of [`minimize_weights`].
#[derive(Clone, Debug)]
pub struct Minimized {
    pub basis: BloBasis,
    pub budget_exhausted: bool,
}

/// Lower element weights by multiplying with nearby pure-Z stabilizers.
pub fn minimize_weights(basis: &BloBasis, layout: Option<&TileLayout>, radius: f64, budget: u64) -> Minimized {
    let gens = &basis.stabilizers;
    let max_local = (budget.max(1) as f64).log2().floor() as usize;
    let mut exhausted = false;
    let mut elements = Vec::with_capacity(basis.len());
    for e in &basis.elements {
        let support = e.ones();
        let mut near: Vec<&BitVec> = gens
            .iter()
            .filter(|g| match layout {
                Some(l) => g.iter_ones().all(|q| support.iter().any(|&s| l.distance(q, s) <= radius)),
                None => g.overlap(e) > 0,
            })
            .collect();
        if near.len() > max_local {
            exhausted = true;
            near.sort_by_key(|g| std::cmp::Reverse(g.overlap(e)));
            near.truncate(max_local);
        }
        let mut best = e.clone();
        let mut cur = e.clone();
        for g in 1u64..(1u64 << near.len()) {
            cur.xor_assign(near[g.trailing_zeros() as usize]);
            if cur.weight() < best.weight() {
                best = cur.clone();
            }
        }
        loop {
            let mut improved = false;
            for s in gens {
                let mut t = best.clone();
                t.xor_assign(s);
                if t.weight() < best.weight() {
                    best = t;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        elements.push(best);
    }
    Minimized { basis: BloBasis { elements, ..basis.clone() }, budget_exhausted: exhausted }
}

/// Minimum-total-weight BLO by enumerating ker(H_X) (matroid greedy); `None` if too large.
pub fn min_weight_basis(basis: &BloBasis, max_dim: usize) -> Option<BloBasis> {
    if basis.len() > max_dim {
        return None;
    }
    let n = basis.elements.first().map_or(0, |e| e.len());
    let mut all = enumerate_logicals(basis);
    all.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| a.lex_cmp(b)));
    let mut span = EchelonBasis::new(n);
    let mut elements = Vec::new();
    for v in all {
        if elements.len() == basis.len() {
            break;
        }
        if span.insert(v.clone()) {
            elements.push(v);
        }
    }
    Some(BloBasis { elements, ..basis.clone() })
}

/// Pairwise support overlaps |supp(L_i) ∩ supp(L_j)|.
pub fn overlap_matrix(basis: &BloBasis) -> Vec<Vec<usize>> {
    let e = &basis.elements;
    (0..e.len()).map(|i| (0..e.len()).map(|j| e[i].overlap(&e[j])).collect()).collect()
}

/// Least-squares fit y = s·x + c.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 2 && xs.len() == ys.len(), "need at least two points");
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let s = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (s, my - s * mx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeDiagnostics {
    pub n: usize,
    pub blo_size: usize,
    pub n_z: usize,
    pub z_dist_ub: usize,
    pub max_pair_overlap: usize,
    pub total_overlap: usize,
    /// Sum of overlaps of each element with all others.
    pub per_element_overlap: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub sizes: Vec<SizeDiagnostics>,
    pub slope: f64,
    pub intercept: f64,
}

pub fn diagnostics(family: &[(usize, BloBasis)]) -> Diagnostics {
    let sizes: Vec<SizeDiagnostics> = family
        .iter()
        .map(|(n, b)| {
            let ov = overlap_matrix(b);
            let mut max_pair = 0;
            let mut total = 0;
            let mut per = vec![0; b.len()];
            for i in 0..b.len() {
                for j in 0..b.len() {
                    if i != j {
                        per[i] += ov[i][j];
                        if i < j {
                            total += ov[i][j];
                            max_pair = max_pair.max(ov[i][j]);
                        }
                    }
                }
            }
            SizeDiagnostics {
                n: *n,
                blo_size: b.len(),
                n_z: b.n_z,
                z_dist_ub: b.weights().into_iter().min().unwrap_or(0),
                max_pair_overlap: max_pair,
                total_overlap: total,
                per_element_overlap: per,
            }
        })
        .collect();
    let (slope, intercept) = if sizes.len() >= 2 {
        let xs: Vec<f64> = sizes.iter().map(|s| s.n as f64).collect();
        let ys: Vec<f64> = sizes.iter().map(|s| s.blo_size as f64).collect();
        slope_fit(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN)
    };
    Diagnostics { sizes, slope, intercept }
}

pub fn diagnostics_csv(d: &Diagnostics) -> String {
    let mut s = String::from("n,|B_Z|,n_z,z_dist_ub,max_pair_overlap,total_overlap\n");
    for r in &d.sizes {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.blo_size, r.n_z, r.z_dist_ub, r.max_pair_overlap, r.total_overlap
        ));
    }
    s
}

/// Matrix of basis elements as rows.
pub fn basis_matrix(basis: &BloBasis) -> BitMatrix {
    let n = basis.elements.first().map_or(0, |e| e.len());
    BitMatrix::from_rows(n, &basis.elements)
}
