use cdtc::algebra::BitVec;
use cdtc::bounds::{assign_loads, chernoff_term, load_bound, nonoverlap_bound, overlap_qubits, LoadAssignment};
use cdtc::channel::{hashing_bound, Bias, BiasedChannel};
use cdtc::deform::{apply, random_map, write_map, Variant};
use cdtc::tilecode::{build_open, build_periodic, read_tilecode, write_tilecode, Orientation};
use proptest::prelude::*;
use std::collections::HashSet;

#[test]
fn open_family_parameters() {
    for l in [6, 8, 10, 12] {
        let t = build_open(l).unwrap();
        assert_eq!((t.n(), t.k()), (2 * l * l, 8), "L = {l}");
        let hx = t.code.x_part();
        let hz = t.code.z_part();
        assert!(hx.mul(&hz.transpose()).is_zero());
        assert_eq!(t.code.rank(), t.code.m(), "checks independent at L = {l}");
        assert!((0..t.code.m()).all(|i| t.code.check_weight(i) <= 6));
    }
}

#[test]
fn periodic_translation_invariance() {
    let t = build_periodic(7, 7).unwrap();
    assert_eq!(t.k(), 6);
    let lay = &t.layout;
    let rows: HashSet<BitVec> = t.code.checks().row_vecs().into_iter().collect();
    for (dx, dy) in [(1usize, 0usize), (0, 1)] {
        let shifted: HashSet<BitVec> = rows
            .iter()
            .map(|r| {
                let mut out = BitVec::zeros(r.len());
                for i in r.iter_ones() {
                    let (half, q) = (i / lay.n(), i % lay.n());
                    let (o, x, y) = lay.site(q);
                    out.set(half * lay.n() + lay.qubit(o, (x + dx) % lay.lx, (y + dy) % lay.ly), true);
                }
                out
            })
            .collect();
        assert_eq!(shifted, rows);
    }
    assert!((0..t.code.m()).all(|i| t.code.check_weight(i) == 6));
}

#[test]
fn tilecode_file_round_trip() {
    let t = build_open(6).unwrap();
    let text = write_tilecode(&t.layout, &t.code);
    let (lay, code) = read_tilecode(&text).unwrap();
    assert_eq!(lay, t.layout);
    assert_eq!(code.checks(), t.code.checks());
}

#[test]
fn named_variants_preserve_parameters() {
    let t = build_open(8).unwrap();
    for v in [Variant::Linear, Variant::Xy, Variant::TiMiddle] {
        let (_, c) = v.build(&t).unwrap();
        assert_eq!((c.n(), c.k(), c.rank()), (t.n(), t.k(), t.code.rank()), "{}", v.name());
        assert!(c.is_commuting());
    }
    assert_eq!(t.layout.qubit(Orientation::Vertical, 0, 0), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_deformation_preserves_code(a in 0.0f64..=1.0, b in 0.0f64..=1.0, seed in any::<u64>()) {
        prop_assume!(a + b <= 1.0);
        let t = build_open(6).unwrap();
        let m = random_map(t.n(), a, b, seed).unwrap();
        prop_assert_eq!(write_map(&m), write_map(&random_map(t.n(), a, b, seed).unwrap()));
        let c = apply(&t.code, &m).unwrap();
        prop_assert_eq!((c.n(), c.k(), c.rank()), (t.n(), t.k(), t.code.rank()));
        prop_assert!(c.is_commuting());
        // a logical of the original code maps to a logical of equal weight
        let z = t.code.css_logicals().1[0].clone();
        let mapped = m.apply_pauli(&z);
        prop_assert_eq!(mapped.weight(), z.weight());
        prop_assert!(c.is_logical(&mapped));
    }

    #[test]
    fn chernoff_dominates_binomial_tail(w in 1usize..60, p in 0.0f64..0.5) {
        let tail: f64 = (w.div_ceil(2)..=w)
            .map(|k| binom(w, k) * p.powi(k as i32) * (1.0 - p).powi((w - k) as i32))
            .sum();
        prop_assert!(chernoff_term(w, p).unwrap() >= tail - 1e-12);
    }

    #[test]
    fn zero_loads_reduce_to_nonoverlap(sizes in prop::collection::vec(1usize..8, 1..6), p in 0.0f64..0.5) {
        let n: usize = sizes.iter().sum();
        let mut start = 0;
        let elements: Vec<BitVec> = sizes
            .iter()
            .map(|&s| {
                let v = BitVec::from_indices(n, &(start..start + s).collect::<Vec<_>>());
                start += s;
                v
            })
            .collect();
        let a = load_bound(&LoadAssignment::zero(&elements), p).unwrap();
        let b = nonoverlap_bound(&elements, p).unwrap().unwrap();
        prop_assert!((a - b).abs() <= 1e-15 * b.max(1.0));
    }

    #[test]
    fn loads_conserve_overlap(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 12), 1..6)) {
        let elements: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bools(r)).collect();
        let a = assign_loads(&elements);
        prop_assert_eq!(a.loads.iter().sum::<usize>(), overlap_qubits(&elements).len());
        prop_assert_eq!(a.assignment.len(), overlap_qubits(&elements).len());
    }

    #[test]
    fn channel_is_normalized(p in 0.0f64..=1.0, eta in 0.01f64..1e6) {
        let (x, y, z) = BiasedChannel::new(p, Bias::Finite(eta)).unwrap().probs();
        prop_assert!(x >= 0.0 && y >= 0.0 && z >= 0.0);
        prop_assert!((x + y + z - p).abs() < 1e-12);
        prop_assert!(p == 0.0 || ((z / x - eta).abs() <= 1e-9 * eta && x == y));
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn hashing_limits() {
    assert_eq!(hashing_bound(Bias::Infinite), 0.5);
    assert!((hashing_bound(Bias::Finite(1.0)) - 0.1893).abs() < 1e-3);
    let etas = [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0];
    let v: Vec<f64> = etas.iter().map(|&e| hashing_bound(Bias::Finite(e))).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
}
