use cdtc::algebra::Pauli;
use cdtc::channel::{Bias, BiasedChannel};
use cdtc::circuit::*;
use cdtc::deform::Variant;
use cdtc::rng::stream;
use cdtc::tilecode::build_open;
use rand::Rng;

fn memory(variant: Variant, rounds: usize, p: f64) -> Circuit {
    let tile = build_open(6).unwrap();
    let map = variant.map(&tile).unwrap();
    let ch = BiasedChannel::new(p, Bias::Finite(100.0)).unwrap();
    build_memory(&tile, &map, rounds, &Schedule::default(), &NoiseModel::circuit_level(&ch)).unwrap()
}

#[test]
fn every_mechanism_matches_forward_propagation() {
    for v in [Variant::Css, Variant::Xy] {
        let c = memory(v, 2, 0.001);
        let mut expected = Vec::new();
        for (i, op) in c.ops.iter().enumerate() {
            if let Op::Noise { q, probs } = *op {
                for (p, pauli) in probs.iter().zip([Pauli::X, Pauli::Y, Pauli::Z]) {
                    if *p > 0.0 {
                        expected.push((*p, forced_fault(&c, i, q, pauli)));
                    }
                }
            }
        }
        assert_eq!(raw_mechanisms(&c), expected, "{}", v.name());
    }
}

#[test]
fn fault_symptom_matches_forced_fault_anywhere() {
    let c = memory(Variant::Linear, 2, 0.001);
    let mut rng = stream(4, 0);
    for _ in 0..300 {
        let at = rng.gen_range(0..c.ops.len());
        let q = rng.gen_range(0..c.num_qubits);
        let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
        assert_eq!(fault_symptom(&c, at, q, p), forced_fault(&c, at, q, p), "op {at} qubit {q} {p:?}");
    }
}

#[test]
fn dem_sampling_matches_circuit_marginals() {
    let c = memory(Variant::TiMiddle, 3, 0.004);
    let dem = build_dem(&c);
    let shots = 20_000;
    let a = frame_sample(&c, shots, 11);
    let b = sample_dem(&dem, shots, 12);
    let rate = |s: &Samples, j: usize, obs: bool| {
        let v = if obs { &s.observables } else { &s.detectors };
        v.iter().filter(|x| x.get(j)).count() as f64 / shots as f64
    };
    for j in 0..dem.num_detectors {
        let (x, y) = (rate(&a, j, false), rate(&b, j, false));
        let sd = ((x.max(y).max(1e-3)) * 2.0 / shots as f64).sqrt();
        assert!((x - y).abs() < 5.0 * sd, "detector {j}: circuit {x} dem {y}");
    }
    for j in 0..dem.num_observables {
        let (x, y) = (rate(&a, j, true), rate(&b, j, true));
        let sd = ((x.max(y).max(1e-3)) * 2.0 / shots as f64).sqrt();
        assert!((x - y).abs() < 5.0 * sd, "observable {j}: circuit {x} dem {y}");
    }
}

fn random_circuit(seed: u64) -> Circuit {
    let mut rng = stream(seed, 0);
    let n = rng.gen_range(2..=5);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Op::Rx(q));
    }
    let mut meas = Vec::new();
    for _ in 0..rng.gen_range(4..30) {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let op = match rng.gen_range(0..9) {
            0 => Op::H(a),
            1 => Op::S(a),
            2 => Op::Sdg(a),
            3 => Op::Cx(a, b),
            4 => Op::Cz(a, b),
            5 => Op::Cy(a, b),
            6 => Op::Mrx(a),
            7 => Op::Mx(a),
            _ => Op::Rx(a),
        };
        if let Some(m) = c.push(op) {
            meas.push(m);
        }
    }
    for q in 0..n {
        meas.push(c.push(Op::Mx(q)).unwrap());
    }
    for _ in 0..6 {
        let k = rng.gen_range(1..=3.min(meas.len()));
        let mut d: Vec<usize> = (0..k).map(|_| meas[rng.gen_range(0..meas.len())]).collect();
        d.sort_unstable();
        d.dedup();
        c.detectors.push(d);
    }
    c
}

#[test]
fn gauge_oracle_agrees_with_back_propagation() {
    let mut nondeterministic = 0;
    for seed in 0..100 {
        let c = random_circuit(seed);
        let det = determinism(&c);
        let s = gauge_sample(&c, 256, seed);
        for (j, &fixed) in det.detectors.iter().enumerate() {
            let fired = s.detectors.iter().filter(|d| d.get(j)).count();
            if fixed {
                assert_eq!(fired, 0, "circuit {seed} detector {j} should be deterministic");
            } else {
                nondeterministic += 1;
                assert!(fired > 0 && fired < 256, "circuit {seed} detector {j} should be random, fired {fired}");
            }
        }
    }
    assert!(nondeterministic > 0);
}

#[test]
fn memory_circuits_are_deterministic() {
    for v in [Variant::Css, Variant::Linear, Variant::Xy, Variant::TiMiddle] {
        let c = memory(v, 3, 0.0);
        assert!(determinism(&c).all(), "{}", v.name());
        let s = gauge_sample(&c, 128, 3);
        assert!(s.detectors.iter().chain(&s.observables).all(|d| d.is_zero()), "{}", v.name());
    }
}

#[test]
fn circuit_and_dem_files_round_trip() {
    let c = memory(Variant::Linear, 2, 0.002);
    assert_eq!(read_circuit(&write_circuit(&c)).unwrap(), c);
    let dem = build_dem(&c);
    let back = read_dem(&write_dem(&dem)).unwrap();
    assert_eq!(back.mechanisms.len(), dem.mechanisms.len());
    for (a, b) in back.mechanisms.iter().zip(&dem.mechanisms) {
        assert_eq!((&a.detectors, &a.observables), (&b.detectors, &b.observables));
        assert!((a.p - b.p).abs() <= 1e-12 * b.p);
    }
}
