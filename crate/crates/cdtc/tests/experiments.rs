use cdtc::algebra::{Pauli, PauliVec};
use cdtc::bposd::DecoderConfig;
use cdtc::capacity::{count_failures, p_sweep};
use cdtc::channel::{Bias, BiasedChannel};
use cdtc::circuit::Schedule;
use cdtc::deform::Variant;
use cdtc::effbias::*;
use cdtc::tilecode::build_open;

#[test]
fn compiled_rounds_keep_their_action() {
    let tile = build_open(6).unwrap();
    for v in [Variant::Css, Variant::Linear, Variant::Xy, Variant::TiMiddle] {
        let map = v.map(&tile).unwrap();
        let (nq, layers) = round_layers(&tile, &map, &Schedule::default()).unwrap();
        let flat: Vec<_> = layers.iter().flatten().copied().collect();
        for s in [Strategy::CxNative, Strategy::CzNative] {
            let compiled = compile(&layers, s);
            for layer in &compiled {
                let mut seen = vec![false; nq];
                for q in layer.iter().flat_map(|op| op.qubits()) {
                    assert!(!seen[q], "{} {}: layer reuses qubit {q}", v.name(), s.name());
                    seen[q] = true;
                }
            }
            let cflat: Vec<_> = compiled.iter().flatten().copied().collect();
            for q in (0..nq).step_by(5) {
                for p in [Pauli::X, Pauli::Z] {
                    let basis = PauliVec::single(nq, q, p);
                    assert_eq!(conjugate(&cflat, &basis), conjugate(&flat, &basis), "{} {} qubit {q}", v.name(), s.name());
                }
            }
        }
        assert_eq!(compile(&layers, Strategy::NoNative), layers);
    }
}

#[test]
fn ideal_platform_ignores_channel_table() {
    let tile = build_open(6).unwrap();
    let map = Variant::Linear.map(&tile).unwrap();
    let (nq, layers) = round_layers(&tile, &map, &Schedule::default()).unwrap();
    let layers = compile(&layers, Strategy::CxNative);
    let cfg = PropagationConfig { p: 3e-4, eta: 100.0, platform: Platform::NoPhysGate, samples: 4000, seed: 5 };
    let a = propagate_mc(nq, &layers, &ChannelTable::default_table(), &cfg).unwrap();
    let b = propagate_mc(nq, &layers, &ChannelTable::parse("").unwrap(), &cfg).unwrap();
    assert_eq!(a, b);
    assert!((a.i + a.x + a.y + a.z - 1.0).abs() < 1e-12);
    let hw = PropagationConfig { platform: Platform::TrappedIonsCx, ..cfg };
    let m = propagate_mc(nq, &layers, &ChannelTable::default_table(), &hw).unwrap();
    assert!((m.i + m.x + m.y + m.z - 1.0).abs() < 1e-12);
    assert_eq!(m, propagate_mc(nq, &layers, &ChannelTable::default_table(), &hw).unwrap());
}

#[test]
fn capacity_independent_of_thread_count() {
    let tile = build_open(6).unwrap();
    let (_, code) = Variant::Xy.build(&tile).unwrap();
    let ch = BiasedChannel::new(0.1, Bias::Finite(10.0)).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| count_failures(&code, &ch, DecoderConfig::default(), 300, 77).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert!(one > 0 && one < 300);
}

#[test]
fn infinite_bias_linear_beats_css() {
    let (r, _) = p_sweep(
        &[(6, "css".into(), build_open(6).unwrap().code), (6, "linear".into(), Variant::Linear.build(&build_open(6).unwrap()).unwrap().1)],
        (0.0, 0.0),
        Bias::Infinite,
        &[0.2],
        400,
        3,
        DecoderConfig::default(),
    )
    .unwrap();
    assert!(r[1].failures < r[0].failures, "{r:?}");
}
