//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A failing criterion is reported, not panicked on, so the binary exits 0 unless something
//! errors internally. Set `ACCEPTANCE_ONLY=2,9` to run a subset.

use cdtc::algebra::{BitMatrix, BitVec};
use cdtc::blo::{blo_basis, count_logicals, enumerate_logicals, slope_fit};
use cdtc::bounds::{assign_loads, chernoff_term, load_bound, nonoverlap_bound, union_bound_all, LoadAssignment};
use cdtc::bposd::DecoderConfig;
use cdtc::capacity::{count_failures, p_sweep, threshold_estimate, wilson};
use cdtc::channel::{hashing_bound, Bias, BiasedChannel};
use cdtc::circuit::{build_dem, build_memory, decode_circuit, frame_sample, schedule_search, NoiseModel, Schedule, DEFAULT_X_ORDER};
use cdtc::deform::Variant;
use cdtc::effbias::{compile, eff_params, gate_bias, propagate_mc, round_layers, ChannelTable, Platform, PropagationConfig, Strategy};
use cdtc::rng::stream;
use cdtc::tilecode::{build_open, build_periodic, distance_exact_upto, distance_upper, StabilizerCode};
use cdtc::weightred::{admissible, failure_rate, materialized_symmetry, support_product};
use num_bigint::BigUint;
use rand::Rng;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn c01_parameters() -> Outcome {
    let t = Instant::now();
    let mut got = Vec::new();
    let mut ok = true;
    for l in [6, 8, 10, 12, 13, 14] {
        let c = build_open(l).unwrap();
        ok &= c.n() == 2 * l * l && c.k() == 8;
        got.push(format!("L{l}=[[{},{}]]", c.n(), c.k()));
    }
    let p = build_periodic(7, 7).unwrap();
    ok &= p.k() == 6;
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    outcome(ok, format!("{} periodic7x7 k={} ({secs:.1}s)", got.join(" "), p.k()))
}

fn c02_distance() -> Outcome {
    let code = |l| build_open(l).unwrap().code;
    let d6 = distance_exact_upto(&code(6), 4, u64::MAX).unwrap().map(|r| r.0);
    let below6 = distance_exact_upto(&code(6), 3, u64::MAX).unwrap();
    let le5 = distance_exact_upto(&code(8), 5, u64::MAX).unwrap();
    let ub: Vec<(usize, usize)> = [(8, 6), (10, 9), (12, 12)]
        .iter()
        .map(|&(l, target)| {
            let c = code(l);
            let (w, cert) = distance_upper(&c, 5000, 1);
            assert!(c.is_logical(&cert) && cert.weight() == w, "certificate must be a logical");
            (w, target)
        })
        .collect();
    let pass = d6 == Some(4) && below6.is_none() && le5.is_none() && ub[0].0 == 6 && ub[1].0 <= 9 && ub[2].0 <= 12;
    outcome(
        pass,
        format!(
            "L6 exact d={:?}; L8 weight<=5 logicals: {}; certificates L8={} L10={} L12={}",
            d6,
            if le5.is_none() { "none" } else { "found" },
            ub[0].0,
            ub[1].0,
            ub[2].0
        ),
    )
}

fn brute_span_size(m: &BitMatrix) -> usize {
    let rows = m.row_vecs();
    let mut set = std::collections::HashSet::new();
    for mask in 0u32..1 << rows.len() {
        let mut v = BitVec::zeros(m.cols());
        for (i, r) in rows.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v.xor_assign(r);
            }
        }
        set.insert(v);
    }
    set.len()
}

fn c03_algebra_oracles() -> Outcome {
    let mut mismatches = 0;
    for t in 0..200u64 {
        let mut rng = stream(303, t);
        let (r, n) = (rng.gen_range(1..=10), rng.gen_range(2..=14));
        let dense: Vec<Vec<u8>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
        let hx = BitMatrix::from_dense(&dense);
        let vectors: Vec<BitVec> =
            (0u32..1 << n).map(|m| BitVec::from_bools(&(0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())).collect();
        let kernel_brute: Vec<&BitVec> = vectors.iter().filter(|v| hx.mul_vec(v).is_zero()).collect();
        let kernel = hx.kernel_basis();
        let rank_ok = 1usize << hx.rank() == brute_span_size(&hx);
        let kernel_ok = kernel_brute.len() == 1 << kernel.len() && kernel.iter().all(|v| hx.mul_vec(v).is_zero());
        // Z checks drawn from the kernel keep the code valid
        let hz_rows: Vec<BitVec> = kernel.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        let hz = BitMatrix::from_rows(n, &hz_rows);
        let code = StabilizerCode::css(&hx, &hz);
        let stab_span = brute_span_size(&hz);
        let logicals_brute = kernel_brute.len() - stab_span;
        let count_ok = match blo_basis(&code) {
            Ok(b) => count_logicals(&b) == BigUint::from(logicals_brute) && enumerate_logicals(&b).len() == logicals_brute,
            Err(_) => logicals_brute == 0,
        };
        if !(rank_ok && kernel_ok && count_ok) {
            mismatches += 1;
        }
    }
    let mut blo_bad = Vec::new();
    let mut checked = 0;
    let mut codes: Vec<(String, StabilizerCode)> = Vec::new();
    for l in [6, 8, 10, 12, 13, 14] {
        let tile = build_open(l).unwrap();
        for v in [Variant::Css, Variant::Linear, Variant::Xy, Variant::TiMiddle] {
            // the TI unit cell only tiles even lattices
            if let Ok((_, c)) = v.build(&tile) {
                codes.push((format!("open{l}-{}", v.name()), c));
            }
        }
    }
    let per = build_periodic(7, 7).unwrap();
    codes.push(("periodic7-css".into(), per.code.clone()));
    codes.push(("periodic7-random".into(), Variant::Random { pi_xz: 0.25, pi_yz: 0.5, seed: 3 }.build(&per).unwrap().1));
    for (name, code) in &codes {
        checked += 1;
        let expected = code.n() - code.x_part().rank();
        match blo_basis(code) {
            Ok(b) if b.len() == expected => {}
            Ok(b) => blo_bad.push(format!("{name}: {} vs {expected}", b.len())),
            Err(_) if expected == 0 => {}
            Err(e) => blo_bad.push(format!("{name}: {e}")),
        }
    }
    outcome(
        mismatches == 0 && blo_bad.is_empty(),
        format!("200 random matrices, {mismatches} mismatches; |B_Z| = n - rank(H_X) on {checked} codes, {} violations {:?}", blo_bad.len(), blo_bad),
    )
}

fn c04_blo_constancy() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [Variant::Linear, Variant::Xy, Variant::TiMiddle] {
        let mut sizes = Vec::new();
        let mut ns = Vec::new();
        let mut zd = Vec::new();
        for l in [6, 8, 10, 12] {
            let tile = build_open(l).unwrap();
            let (_, code) = v.build(&tile).unwrap();
            let b = blo_basis(&code).unwrap();
            sizes.push(b.len() as f64);
            ns.push(code.n() as f64);
            if l <= 10 {
                // the basis spans ker(H_X), so enumeration gives the exact pure-Z distance
                zd.push(enumerate_logicals(&b).iter().map(|x| x.weight()).min().unwrap() as f64);
            }
        }
        let (s, _) = slope_fit(&ns, &sizes);
        let ok = sizes.iter().all(|&x| x == 8.0) && s.abs() < 0.01 && zd.windows(2).all(|w| w[1] > w[0]);
        pass &= ok;
        parts.push(format!("{} |B_Z|={:?} slope={s:.4} z-dist(L6,8,10)={:?}{}", v.name(), sizes, zd, if ok { "" } else { " <- fails" }));
    }
    outcome(pass, parts.join("; "))
}

/// Two disjoint length-7 repetition blocks protected against Z by XX checks.
fn toy_code() -> StabilizerCode {
    let n = 14;
    let mut rows = Vec::new();
    for b in 0..2 {
        for i in 0..6 {
            rows.push(BitVec::from_indices(n, &[7 * b + i, 7 * b + i + 1]));
        }
    }
    StabilizerCode::css(&BitMatrix::from_rows(n, &rows), &BitMatrix::zeros(0, n))
}

fn c05_bounds() -> Outcome {
    let mut tail_bad = 0;
    for t in 0..200u64 {
        let mut rng = stream(505, t);
        let w: usize = rng.gen_range(1..=100);
        let p: f64 = rng.gen_range(0.0..0.5);
        let tail: f64 = (w.div_ceil(2)..=w)
            .map(|k| {
                let c = (0..k).fold(1.0, |acc, i| acc * (w - i) as f64 / (i + 1) as f64);
                c * p.powi(k as i32) * (1.0 - p).powi((w - k) as i32)
            })
            .sum();
        if chernoff_term(w, p).unwrap() < tail * (1.0 - 1e-12) {
            tail_bad += 1;
        }
    }
    let code = toy_code();
    let basis = blo_basis(&code).unwrap();
    let logicals = enumerate_logicals(&basis);
    let weights: Vec<usize> = logicals.iter().map(|l| l.weight()).collect();
    let hx = code.x_part();
    let mut zero_load_gap: f64 = 0.0;
    let mut rows = Vec::new();
    let mut ok = tail_bad == 0;
    for &p in &[0.05, 0.1, 0.2, 0.3] {
        let union = union_bound_all(&weights, p).unwrap();
        let nonover = nonoverlap_bound(&basis.elements, p).unwrap();
        let zero = load_bound(&LoadAssignment::zero(&basis.elements), p).unwrap();
        let loaded = load_bound(&assign_loads(&basis.elements), p).unwrap();
        if let Some(b) = nonover {
            zero_load_gap = zero_load_gap.max((zero - b).abs());
        } else {
            ok = false;
        }
        let trials = 100_000;
        let fails = (0..trials)
            .filter(|&i| {
                let mut rng = stream(5050 + (p * 1000.0) as u64, i as u64);
                let e = BitVec::from_bools(&(0..14).map(|_| rng.gen_bool(p)).collect::<Vec<_>>());
                let s = hx.mul_vec(&e);
                let e0 = hx.solve(&s).unwrap();
                // no pure-Z stabilizers, so each coset holds one operator and ML is minimum weight
                let best = std::iter::once(BitVec::zeros(14))
                    .chain(logicals.iter().cloned())
                    .map(|l| {
                        let mut c = e0.clone();
                        c.xor_assign(&l);
                        c
                    })
                    .min_by_key(|c| c.weight())
                    .unwrap();
                best != e
            })
            .count();
        let (lo, _) = wilson(fails, trials);
        let bounds = [union, nonover.unwrap_or(f64::NAN), zero, loaded];
        let good = bounds.iter().all(|&b| b >= lo);
        ok &= good;
        rows.push(format!("p={p}: ML={:.4} bounds={:.4}/{:.4}/{:.4}/{:.4}", fails as f64 / trials as f64, union, bounds[1], zero, loaded));
    }
    ok &= zero_load_gap <= 1e-15;
    outcome(ok, format!("chernoff >= tail {}/200; zero-load gap {zero_load_gap:e}; {}", 200 - tail_bad, rows.join(" ")))
}

fn c06_thresholds() -> Outcome {
    let config = DecoderConfig::default();
    let trials = 20_000;
    let open: Vec<_> = [6, 8, 10].iter().map(|&l| (l, format!("open{l}"), build_open(l).unwrap().code)).collect();
    let (_, curves) = p_sweep(&open, (0.0, 0.0), Bias::Infinite, &[0.08, 0.09, 0.10, 0.11, 0.12], trials, 61, config).unwrap();
    let t_open = threshold_estimate(&curves).unwrap();
    let per: Vec<_> = [7, 14, 21].iter().map(|&l| (l, format!("periodic{l}"), build_periodic(l, l).unwrap().code)).collect();
    let (_, curves) = p_sweep(&per, (0.0, 0.0), Bias::Infinite, &[0.06, 0.07, 0.08, 0.09], trials, 62, config).unwrap();
    let t_per = threshold_estimate(&curves).unwrap();
    let a = t_open.p_th.is_some_and(|p| (0.09..=0.11).contains(&p));
    let b = t_per.p_th.is_some_and(|p| (0.065..=0.085).contains(&p));
    outcome(
        a && b,
        format!(
            "open L6/8/10 p_th={:?} crossings {:?} (band 0.09-0.11); periodic 7/14/21 p_th={:?} crossings {:?} (band 0.065-0.085)",
            t_open.p_th, t_open.crossings, t_per.p_th, t_per.crossings
        ),
    )
}

fn c07_fifty_percent() -> Outcome {
    let sizes = [6, 8, 10, 12];
    let tiles: Vec<_> = sizes.iter().map(|&l| build_open(l).unwrap()).collect();
    let trials = 4000;
    let rates = |v: Variant, p: f64, seed: u64| -> Vec<f64> {
        tiles
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let v = match v {
                    Variant::Random { pi_xz, pi_yz, seed: s } => Variant::Random { pi_xz, pi_yz, seed: s ^ ((i as u64) << 32) },
                    other => other,
                };
                let (_, code) = v.build(t).unwrap();
                let ch = BiasedChannel::new(p, Bias::Infinite).unwrap();
                count_failures(&code, &ch, DecoderConfig::default(), trials, seed + i as u64).unwrap() as f64 / trials as f64
            })
            .collect()
    };
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(">");
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [Variant::Linear, Variant::Xy, Variant::TiMiddle] {
        for p in [0.40, 0.45] {
            let r = rates(v, p, 700);
            pass &= strictly_decreasing(&r);
            parts.push(format!("{} p={p}: {}", v.name(), fmt(&r)));
        }
    }
    for p in [0.40, 0.45] {
        let mut all = true;
        for s in 0..5 {
            let r = rates(Variant::Random { pi_xz: 0.25, pi_yz: 0.5, seed: 70 + s }, p, 710 + s);
            all &= strictly_decreasing(&r);
        }
        pass &= all;
        parts.push(format!("random(0.25,0.5) p={p}: decreasing in {} samples", if all { "all 5" } else { "not all" }));
    }
    let mut outside_decreasing = 0;
    for s in 0..5 {
        let r = rates(Variant::Random { pi_xz: 0.125, pi_yz: 0.125, seed: 80 + s }, 0.40, 720 + s);
        if strictly_decreasing(&r) {
            outside_decreasing += 1;
        }
    }
    pass &= outside_decreasing == 0;
    parts.push(format!("random(0.125,0.125) p=0.4: decreasing in {outside_decreasing}/5 samples"));
    outcome(pass, parts.join("; "))
}

fn c08_weight_reduction() -> Outcome {
    let identities = (0..7i64).flat_map(|y| (0..7i64).map(move |x| (x, y))).filter(|&(x, y)| support_product(&materialized_symmetry(x, y, 7).unwrap()).is_empty()).count();
    let adm = admissible(5) && admissible(11) && !admissible(7);
    let (f5, n) = failure_rate(35, 0.40, 10_000, 81).unwrap();
    let (f11, _) = failure_rate(77, 0.40, 10_000, 82).unwrap();
    let (g5, m) = failure_rate(35, 0.05, 10_000, 83).unwrap();
    let (g11, _) = failure_rate(77, 0.05, 10_000, 84).unwrap();
    outcome(
        identities == 49 && adm && f11 < f5,
        format!(
            "identity at {identities}/49 anchors; admissible(5,11,!7)={adm}; p=0.40 failure L35={:.4} L77={:.4}; (p=0.05: {:.4} vs {:.4})",
            f5 as f64 / n as f64,
            f11 as f64 / n as f64,
            g5 as f64 / m as f64,
            g11 as f64 / m as f64
        ),
    )
}

fn c09_schedules() -> Outcome {
    let t = Instant::now();
    let found = schedule_search(&build_open(6).unwrap(), DEFAULT_X_ORDER);
    let secs = t.elapsed().as_secs_f64();
    outcome(found.len() == 6 && secs < 1800.0, format!("{} of 720 Z orders valid ({secs:.1}s)", found.len()))
}

fn c10_circuit_level() -> Outcome {
    let shots = 20_000;
    let rounds = 8;
    let config = DecoderConfig::circuit_level();
    let run = |l: usize, v: Variant, p: f64, seed: u64| -> f64 {
        let tile = build_open(l).unwrap();
        let map = v.map(&tile).unwrap();
        let ch = BiasedChannel::new(p, Bias::Finite(1e4)).unwrap();
        let c = build_memory(&tile, &map, rounds, &Schedule::default(), &NoiseModel::circuit_level(&ch)).unwrap();
        let dem = build_dem(&c);
        let s = frame_sample(&c, shots, seed);
        decode_circuit(&dem, &s, config).unwrap() as f64 / shots as f64
    };
    let order = [Variant::Linear, Variant::TiMiddle, Variant::Xy, Variant::Css];
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, l) in [(4, 6), (6, 8)] {
        let r: Vec<f64> = order.iter().enumerate().map(|(i, &v)| run(l, v, 0.008, 1000 + 10 * l as u64 + i as u64)).collect();
        let ok = r.windows(2).all(|w| w[0] < w[1]);
        pass &= ok;
        parts.push(format!(
            "d={d} p=0.008: {}",
            order.iter().zip(&r).map(|(v, x)| format!("{}={x:.4}", v.name())).collect::<Vec<_>>().join(" < ")
        ));
    }
    let lo = (run(6, Variant::Linear, 0.005, 1100), run(8, Variant::Linear, 0.005, 1101));
    let hi = (run(6, Variant::Linear, 0.03, 1102), run(8, Variant::Linear, 0.03, 1103));
    pass &= lo.1 < lo.0 && hi.1 > hi.0;
    parts.push(format!("linear p=0.005 d4={:.4} d6={:.4}; p=0.03 d4={:.4} d6={:.4}", lo.0, lo.1, hi.0, hi.1));
    outcome(pass, parts.join("; "))
}

fn c11_effective_bias() -> Outcome {
    let table = ChannelTable::default_table();
    let tile = build_open(6).unwrap();
    let eff = |v: Variant, s: Strategy| {
        let map = v.map(&tile).unwrap();
        let (nq, layers) = round_layers(&tile, &map, &Schedule::default()).unwrap();
        let cfg = PropagationConfig { p: 3e-4, eta: 100.0, platform: Platform::NoPhysGate, samples: 100_000, seed: 111 };
        let m = propagate_mc(nq, &compile(&layers, s), &table, &cfg).unwrap();
        let (p, eta) = eff_params(&m);
        (p, eta.unwrap_or(f64::INFINITY))
    };
    let (p_css, eta_css) = eff(Variant::Css, Strategy::NoNative);
    let band = (0.22e-2..=0.38e-2).contains(&p_css) && (55.0..=95.0).contains(&eta_css);
    let mut mono = true;
    let mut parts = vec![format!("CSS no-native p_eff={:.3e} eta_eff={eta_css:.1}", p_css)];
    for v in [Variant::Css, Variant::Linear, Variant::TiMiddle] {
        let a = eff(v, Strategy::NoNative).1;
        let b = eff(v, Strategy::CxNative).1;
        mono &= a > b;
        parts.push(format!("{} eta no-native {a:.1} vs cx-native {b:.1}", v.name()));
    }
    let gb = |platform: &str, gate: &str| gate_bias(table.get(platform, gate).unwrap()).unwrap();
    let (cz, cx_ti, cx_sc) = (gb("trapped-ions-cz", "CZ"), gb("trapped-ions-cx", "CX"), gb("superconducting-cx", "CX"));
    let gates = (cz - 100.0).abs() <= 1.0 && (cx_ti - 1.13).abs() <= 0.02 && (cx_sc - 4.72).abs() <= 0.05;
    parts.push(format!("gate bias CZ(ions)={cz:.2} CX(ions)={cx_ti:.3} CX(sc)={cx_sc:.3}"));
    outcome(band && mono && gates, parts.join("; "))
}

fn c12_hashing() -> Outcome {
    let inf = hashing_bound(Bias::Infinite);
    let one = hashing_bound(Bias::Finite(1.0));
    let etas = [1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0, 1e4, 1e6];
    let curve: Vec<f64> = etas.iter().map(|&e| hashing_bound(Bias::Finite(e))).collect();
    let mono = curve.windows(2).all(|w| w[1] > w[0]) && curve.iter().all(|&h| h < inf);
    outcome(inf == 0.5 && (one - 0.1893).abs() <= 1e-3 && mono, format!("eta=inf {inf}; eta=1 {one:.5}; monotone over {} points: {mono}", etas.len()))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "parameter table", c01_parameters),
        (2, "distance", c02_distance),
        (3, "algebra and BLO oracles", c03_algebra_oracles),
        (4, "BLO constancy under deformation", c04_blo_constancy),
        (5, "analytic bounds", c05_bounds),
        (6, "code-capacity thresholds", c06_thresholds),
        (7, "50% region", c07_fifty_percent),
        (8, "weight reduction", c08_weight_reduction),
        (9, "schedule search", c09_schedules),
        (10, "circuit level", c10_circuit_level),
        (11, "effective bias", c11_effective_bias),
        (12, "hashing bound", c12_hashing),
    ];
    let mut passed = 0;
    let mut ran = 0;
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        ran += 1;
        passed += o.pass as usize;
        println!("{} C{id:02} {name} [{:.1}s]: {}", if o.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64(), o.detail);
    }
    println!("acceptance: {passed}/{ran} criteria passed");
}
