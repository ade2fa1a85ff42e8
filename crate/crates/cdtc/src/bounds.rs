//! Analytic failure-probability bounds at infinite bias: union bounds, disjoint-basis
//! bounds, hybrid splits and overlap-load assignments.

use crate::algebra::{BitMatrix, BitVec, EchelonBasis};
use crate::blo::BloBasis;
use crate::Error;

/// Chernoff–Hoeffding bound on Pr[Bin(w, p) ≥ w/2].
pub fn chernoff_term(weight: usize, p: f64) -> Result<f64, Error> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Invalid(format!("p = {p} must lie in [0, 1/2)")));
    }
    if weight == 0 {
        return Err(Error::Invalid("weight must be at least 1".into()));
    }
    Ok((-2.0 * weight as f64 * (0.5 - p).powi(2)).exp())
}

/// Σ_L chernoff_term(|L|, p) over the supplied logical weights.
pub fn union_bound_all(weights: &[usize], p: f64) -> Result<f64, Error> {
    weights.iter().map(|&w| chernoff_term(w, p)).sum()
}

/// Pairwise-disjoint supports?
pub fn is_disjoint(elements: &[BitVec]) -> bool {
    let Some(first) = elements.first() else { return true };
    let mut seen = BitVec::zeros(first.len());
    for e in elements {
        if seen.overlap(e) > 0 {
            return false;
        }
        seen.or_assign(e);
    }
    true
}

/// Σ over elements of chernoff_term, or `None` when supports overlap.
pub fn nonoverlap_bound(elements: &[BitVec], p: f64) -> Result<Option<f64>, Error> {
    if !is_disjoint(elements) {
        return Ok(None);
    }
    let w: Vec<usize> = elements.iter().map(|e| e.weight()).collect();
    union_bound_all(&w, p).map(Some)
}

/// Overlap-load assignment: each qubit shared by several elements is charged to one of them.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadAssignment {
    pub loads: Vec<usize>,
    /// (qubit, owning element).
    pub assignment: Vec<(usize, usize)>,
    pub weights: Vec<usize>,
}

impl LoadAssignment {
    pub fn zero(elements: &[BitVec]) -> Self {
        Self { loads: vec![0; elements.len()], assignment: Vec::new(), weights: elements.iter().map(|e| e.weight()).collect() }
    }

    /// t_i = |L_i|/2 − o_i.
    pub fn thresholds(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.loads).map(|(&w, &o)| w as f64 / 2.0 - o as f64).collect()
    }

    pub fn min_threshold(&self) -> f64 {
        self.thresholds().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Qubits lying in at least two element supports, with the containing elements.
pub fn overlap_qubits(elements: &[BitVec]) -> Vec<(usize, Vec<usize>)> {
    let Some(first) = elements.first() else { return Vec::new() };
    (0..first.len())
        .filter_map(|q| {
            let owners: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].get(q)).collect();
            (owners.len() >= 2).then_some((q, owners))
        })
        .collect()
}

/// Greedy max-min assignment: each overlap qubit, in index order, goes to the containing
/// element with the largest current shifted threshold (lowest index on ties).
pub fn assign_loads(elements: &[BitVec]) -> LoadAssignment {
    let mut a = LoadAssignment::zero(elements);
    for (q, owners) in overlap_qubits(elements) {
        let t = a.thresholds();
        let mut best = owners[0];
        for &i in &owners[1..] {
            if t[i] > t[best] {
                best = i;
            }
        }
        a.loads[best] += 1;
        a.assignment.push((q, best));
    }
    a
}

/// Outcome of [`covering_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Covering {
    Pass { checked: usize },
    Fail { witness: BitVec, lhs: f64, rhs: f64 },
}

/// Verify Σ_{i∈decomp(L)} (|L_i|/2 − o_i) ≤ |L|/2 for every supplied logical.
pub fn covering_check(elements: &[BitVec], loads: &LoadAssignment, logicals: &[BitVec]) -> Result<Covering, Error> {
    let Some(first) = elements.first() else { return Ok(Covering::Pass { checked: 0 }) };
    let m = BitMatrix::from_rows(first.len(), elements).transpose();
    let t = loads.thresholds();
    for l in logicals {
        let c = m
            .solve(l)
            .ok_or_else(|| Error::Invalid("logical not in the span of the basis".into()))?;
        let lhs: f64 = c.iter_ones().map(|i| t[i]).sum();
        let rhs = l.weight() as f64 / 2.0;
        if lhs > rhs + 1e-9 {
            return Ok(Covering::Fail { witness: l.clone(), lhs, rhs });
        }
    }
    Ok(Covering::Pass { checked: logicals.len() })
}

/// Σ_i exp(−2(t_i − p|L_i|)²/|L_i|).
pub fn load_bound(loads: &LoadAssignment, p: f64) -> Result<f64, Error> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::Invalid(format!("p = {p} must lie in [0, 1/2)")));
    }
    let mut total = 0.0;
    for (&w, t) in loads.weights.iter().zip(loads.thresholds()) {
        let mean = p * w as f64;
        if t <= mean {
            return Err(Error::Invalid(format!("shifted threshold {t} not above p|L| = {mean}")));
        }
        // same operation order as chernoff_term so zero loads reproduce it bit for bit
        total += (-2.0 * w as f64 * (t / w as f64 - p).powi(2)).exp();
    }
    Ok(total)
}

/// All nontrivial logicals generated by `elements` modulo `stabilizers`.
pub fn enumerate_span(elements: &[BitVec], stabilizers: &[BitVec], max_dim: usize) -> Result<Vec<BitVec>, Error> {
    if elements.len() > max_dim {
        return Err(Error::Budget(format!("2^{} logicals exceed the enumeration limit", elements.len())));
    }
    let Some(first) = elements.first() else { return Ok(Vec::new()) };
    let stabs = EchelonBasis::from_vectors(first.len(), stabilizers.iter());
    let mut cur = BitVec::zeros(first.len());
    let mut out = Vec::new();
    for g in 1u64..(1u64 << elements.len()) {
        cur.xor_assign(&elements[g.trailing_zeros() as usize]);
        if !stabs.contains(&cur) {
            out.push(cur.clone());
        }
    }
    Ok(out)
}

/// Disjoint-sector bound plus the union bound over logicals of the overlapping sector.
pub fn hybrid_bound(disjoint: &[BitVec], overlapping: &[BitVec], stabilizers: &[BitVec], p: f64, max_dim: usize) -> Result<Option<f64>, Error> {
    let part1 = if disjoint.is_empty() { Some(0.0) } else { nonoverlap_bound(disjoint, p)? };
    let Some(part1) = part1 else { return Ok(None) };
    let logicals = enumerate_span(overlapping, stabilizers, max_dim)?;
    let w: Vec<usize> = logicals.iter().map(|l| l.weight()).collect();
    Ok(Some(part1 + union_bound_all(&w, p)?))
}

/// Structured certificate record.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CertificateReport {
    pub mode: String,
    pub p: f64,
    pub bound: Option<f64>,
    pub per_element_terms: Vec<f64>,
    pub covering: String,
}

/// Evaluate every applicable certificate for a basis at rate p.
pub fn certificates(basis: &BloBasis, p: f64, max_dim: usize) -> Result<Vec<CertificateReport>, Error> {
    let mut out = Vec::new();
    let terms: Vec<f64> = basis
        .elements
        .iter()
        .map(|e| chernoff_term(e.weight(), p))
        .collect::<Result<_, _>>()?;
    if basis.len() <= max_dim {
        let all = enumerate_span(&basis.elements, &basis.stabilizers, max_dim)?;
        let w: Vec<usize> = all.iter().map(|l| l.weight()).collect();
        out.push(CertificateReport {
            mode: "union".into(),
            p,
            bound: Some(union_bound_all(&w, p)?),
            per_element_terms: Vec::new(),
            covering: "n/a".into(),
        });
    }
    let disjoint = nonoverlap_bound(&basis.elements, p)?;
    out.push(CertificateReport {
        mode: "nonoverlap".into(),
        p,
        bound: disjoint,
        per_element_terms: terms.clone(),
        covering: if disjoint.is_some() { "disjoint".into() } else { "overlapping".into() },
    });
    let loads = assign_loads(&basis.elements);
    let (covering, certified) = if basis.len() <= max_dim {
        let all = enumerate_span(&basis.elements, &basis.stabilizers, max_dim)?;
        match covering_check(&basis.elements, &loads, &all)? {
            Covering::Pass { checked } => (format!("pass (exhaustive, {checked} logicals)"), true),
            Covering::Fail { lhs, rhs, .. } => (format!("fail (lhs {lhs} > rhs {rhs})"), false),
        }
    } else {
        ("not checked".into(), false)
    };
    let bound = if certified { load_bound(&loads, p).ok() } else { None };
    out.push(CertificateReport { mode: "load".into(), p, bound, per_element_terms: Vec::new(), covering });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chernoff_examples() {
        let v = chernoff_term(100, 0.3).unwrap();
        assert!((v - (-8.0f64).exp()).abs() < 1e-15);
        assert!(chernoff_term(10, 0.5).is_err());
        assert!(chernoff_term(10, 0.5 - 1e-9).unwrap() > 0.999_999);
    }

    #[test]
    fn disjoint_pair() {
        let a = BitVec::from_indices(20, &(0..10).collect::<Vec<_>>());
        let b = BitVec::from_indices(20, &(10..20).collect::<Vec<_>>());
        let v = nonoverlap_bound(&[a.clone(), b], 0.2).unwrap().unwrap();
        assert!((v - 2.0 * (-1.8f64).exp()).abs() < 1e-12);
        let c = BitVec::from_indices(20, &[0, 15]);
        assert_eq!(nonoverlap_bound(&[a, c], 0.2).unwrap(), None);
    }

    #[test]
    fn two_element_overlap_loads() {
        let a = BitVec::from_indices(12, &[0, 1, 2, 3, 4, 5]);
        let b = BitVec::from_indices(12, &[3, 4, 5, 6, 7, 8, 9, 10]);
        let l = assign_loads(&[a.clone(), b.clone()]);
        assert_eq!(l.loads.iter().sum::<usize>(), 3);
        let mut ab = a.clone();
        ab.xor_assign(&b);
        assert!(matches!(covering_check(&[a, b], &l, &[ab]).unwrap(), Covering::Pass { .. }));
    }

    #[test]
    fn load_bound_zero_loads() {
        let a = BitVec::from_indices(20, &(0..9).collect::<Vec<_>>());
        let b = BitVec::from_indices(20, &(9..20).collect::<Vec<_>>());
        let z = LoadAssignment::zero(&[a.clone(), b.clone()]);
        let lb = load_bound(&z, 0.1).unwrap();
        let nb = nonoverlap_bound(&[a, b], 0.1).unwrap().unwrap();
        assert_eq!(lb, nb);
        let heavy = LoadAssignment { loads: vec![4, 0], assignment: vec![], weights: vec![9, 11] };
        assert!(load_bound(&heavy, 0.2).is_err());
    }
}
