//! Syndrome-extraction circuits, Pauli-frame sampling, detector error models and the
//! schedule search.
//!
//! Frames are tracked 64 shots at a time, one `u64` per qubit for each of the x and z bits.

use crate::algebra::{BitMatrix, BitVec, Pauli};
use crate::bposd::{BpOsd, DecoderConfig};
use crate::channel::BiasedChannel;
use crate::deform::{DeformationMap, Tag};
use crate::rng::stream;
use crate::tilecode::{CheckKind, Orientation, TileCode};
use crate::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Op {
    /// Reset to |+⟩.
    Rx(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Cy(usize, usize),
    /// X-basis measurement.
    Mx(usize),
    /// X-basis measurement followed by reset to |+⟩.
    Mrx(usize),
    /// Independent X, Y, Z with the given probabilities.
    Noise { q: usize, probs: [f64; 3] },
    Tick,
}

impl Op {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Rx(q) | Op::H(q) | Op::S(q) | Op::Sdg(q) | Op::Mx(q) | Op::Mrx(q) | Op::Noise { q, .. } => vec![q],
            Op::Cx(a, b) | Op::Cz(a, b) | Op::Cy(a, b) => vec![a, b],
            Op::Tick => Vec::new(),
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Op::H(_) | Op::S(_) | Op::Sdg(_) | Op::Cx(..) | Op::Cz(..) | Op::Cy(..))
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Op::Mx(_) | Op::Mrx(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_data: usize,
    pub rounds: usize,
    pub ops: Vec<Op>,
    pub num_measurements: usize,
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<Vec<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, num_data: num_qubits, rounds: 0, ops: Vec::new(), num_measurements: 0, detectors: Vec::new(), observables: Vec::new() }
    }

    /// Append an op; measurements return their record index.
    pub fn push(&mut self, op: Op) -> Option<usize> {
        self.ops.push(op);
        if op.is_measurement() {
            self.num_measurements += 1;
            Some(self.num_measurements - 1)
        } else {
            None
        }
    }

    fn noise(&mut self, q: usize, probs: [f64; 3]) {
        if probs.iter().any(|&p| p > 0.0) {
            self.ops.push(Op::Noise { q, probs });
        }
    }

    /// Copy with every noise op removed.
    pub fn without_noise(&self) -> Circuit {
        let mut c = self.clone();
        c.ops.retain(|op| !matches!(op, Op::Noise { .. }));
        c
    }

    pub fn count(&self, f: impl Fn(&Op) -> bool) -> usize {
        self.ops.iter().filter(|op| f(op)).count()
    }
}

/// Single-qubit channel placements; each entry is (p_X, p_Y, p_Z).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub after_gate: [f64; 3],
    pub before_measure: [f64; 3],
    pub after_reset: [f64; 3],
    pub round_start_data: [f64; 3],
}

fn triple(ch: &BiasedChannel) -> [f64; 3] {
    let (x, y, z) = ch.probs();
    [x, y, z]
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { after_gate: [0.0; 3], before_measure: [0.0; 3], after_reset: [0.0; 3], round_start_data: [0.0; 3] }
    }

    /// Same channel after gates and resets, before measurements and on data at round start.
    pub fn circuit_level(ch: &BiasedChannel) -> Self {
        let t = triple(ch);
        Self { after_gate: t, before_measure: t, after_reset: t, round_start_data: t }
    }

    /// Data errors at round start and measurement errors only.
    pub fn phenomenological(ch: &BiasedChannel) -> Self {
        let t = triple(ch);
        Self { after_gate: [0.0; 3], before_measure: t, after_reset: [0.0; 3], round_start_data: t }
    }
}

/// Coupling order: X layer k uses template slot `x_order[k]`, Z layer k uses `z_order[k]`.
/// Slots 0..3 are horizontal offsets, 3..6 vertical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub x_order: [usize; 6],
    pub z_order: [usize; 6],
}

impl Default for Schedule {
    fn default() -> Self {
        Self { x_order: DEFAULT_X_ORDER, z_order: DEFAULT_Z_ORDER }
    }
}

pub const DEFAULT_X_ORDER: [usize; 6] = [0, 3, 1, 4, 2, 5];
pub const DEFAULT_Z_ORDER: [usize; 6] = [0, 3, 1, 4, 2, 5];

/// Data qubit coupled by check `i` at template slot `s`, if on the lattice.
pub fn slot_qubit(tile: &TileCode, i: usize, s: usize) -> Option<usize> {
    let (a, b) = tile.anchors[i];
    let t = &tile.template;
    let (h, v) = match tile.code.kinds()[i] {
        CheckKind::X => (&t.x_h, &t.x_v),
        CheckKind::Z => (&t.z_h, &t.z_v),
    };
    let (o, (dx, dy)) = if s < 3 { (Orientation::Horizontal, h[s]) } else { (Orientation::Vertical, v[s - 3]) };
    tile.layout.qubit_at(o, a + dx, b + dy)
}

/// Gates preparing the eigenstate of the deformed X from |+⟩, and undoing it before readout.
fn prep_gate(tag: Tag) -> Option<(fn(usize) -> Op, fn(usize) -> Op)> {
    match tag.apply(true, false) {
        (false, true) => Some((Op::H, Op::H)),
        (true, true) => Some((Op::S, Op::Sdg)),
        _ => None,
    }
}

/// Memory experiment in the deformed X basis with measurement indices for every check and round.
pub fn build_memory(tile: &TileCode, map: &DeformationMap, rounds: usize, schedule: &Schedule, noise: &NoiseModel) -> Result<Circuit, Error> {
    if rounds == 0 {
        return Err(Error::Invalid("rounds must be at least 1".into()));
    }
    let n = tile.n();
    if map.len() != n {
        return Err(Error::Invalid("deformation length differs from qubit count".into()));
    }
    let code = crate::deform::apply(&tile.code, map)?;
    let m = code.m();
    let checks = code.check_paulis();
    let kinds = code.kinds().to_vec();
    let mut c = Circuit::new(n + m);
    c.num_data = n;
    c.rounds = rounds;
    for q in 0..n + m {
        c.push(Op::Rx(q));
        c.noise(q, noise.after_reset);
    }
    for q in 0..n {
        if let Some((g, _)) = prep_gate(map.tags[q]) {
            c.push(g(q));
            c.noise(q, noise.after_gate);
        }
    }
    c.push(Op::Tick);
    let layer = |order: &[usize; 6], k: usize, kind: CheckKind| -> Vec<(usize, usize, Pauli)> {
        (0..m)
            .filter(|&i| kinds[i] == kind)
            .filter_map(|i| slot_qubit(tile, i, order[k]).map(|q| (i, q, checks[i].get(q))))
            .collect()
    };
    let mut meas = vec![Vec::with_capacity(rounds); m];
    for r in 0..rounds {
        for q in 0..n {
            c.noise(q, noise.round_start_data);
        }
        c.push(Op::Tick);
        for step in 0..7 {
            let mut couplings = Vec::new();
            if step < 6 {
                couplings.extend(layer(&schedule.x_order, step, CheckKind::X));
            }
            if step >= 1 {
                couplings.extend(layer(&schedule.z_order, step - 1, CheckKind::Z));
            }
            for (i, q, p) in couplings {
                let a = n + i;
                let op = match p {
                    Pauli::X => Op::Cx(a, q),
                    Pauli::Z => Op::Cz(a, q),
                    Pauli::Y => Op::Cy(a, q),
                    Pauli::I => return Err(Error::Validation(format!("check {i} has identity on slot qubit {q}"))),
                };
                c.push(op);
                c.noise(a, noise.after_gate);
                c.noise(q, noise.after_gate);
            }
            c.push(Op::Tick);
        }
        for i in 0..m {
            c.noise(n + i, noise.before_measure);
        }
        for i in 0..m {
            let idx = c.push(Op::Mrx(n + i)).expect("measurement index");
            meas[i].push(idx);
        }
        for i in 0..m {
            c.noise(n + i, noise.after_reset);
        }
        c.push(Op::Tick);
        for i in 0..m {
            if r == 0 {
                if kinds[i] == CheckKind::X {
                    c.detectors.push(vec![meas[i][0]]);
                }
            } else {
                c.detectors.push(vec![meas[i][r - 1], meas[i][r]]);
            }
        }
    }
    for q in 0..n {
        if let Some((_, g)) = prep_gate(map.tags[q]) {
            c.push(g(q));
            c.noise(q, noise.after_gate);
        }
    }
    for q in 0..n {
        c.noise(q, noise.before_measure);
    }
    let mut data_meas = vec![0; n];
    for (q, slot) in data_meas.iter_mut().enumerate() {
        *slot = c.push(Op::Mx(q)).expect("measurement index");
    }
    for i in 0..m {
        if kinds[i] == CheckKind::X {
            let mut d: Vec<usize> = checks[i].support().iter_ones().map(|q| data_meas[q]).collect();
            d.push(meas[i][rounds - 1]);
            c.detectors.push(d);
        }
    }
    let (xs, _) = tile.code.css_logicals();
    for l in xs {
        c.observables.push(l.x.iter_ones().map(|q| data_meas[q]).collect());
    }
    let report = determinism(&c);
    if let Some(d) = report.detectors.iter().position(|&ok| !ok) {
        return Err(Error::Validation(format!("detector {d} is not deterministic under this schedule")));
    }
    if let Some(o) = report.observables.iter().position(|&ok| !ok) {
        return Err(Error::Validation(format!("observable {o} is not deterministic")));
    }
    Ok(c)
}

/// Per-qubit sensitivity bitsets over detectors then observables.
struct Sensitivity {
    x: Vec<BitVec>,
    z: Vec<BitVec>,
    width: usize,
}

impl Sensitivity {
    fn new(nq: usize, width: usize) -> Self {
        Self { x: vec![BitVec::zeros(width); nq], z: vec![BitVec::zeros(width); nq], width }
    }

    fn conj(&mut self, op: &Op) {
        match *op {
            Op::H(q) => std::mem::swap(&mut self.x[q], &mut self.z[q]),
            Op::S(q) | Op::Sdg(q) => {
                let xq = self.x[q].clone();
                self.z[q].xor_assign(&xq);
            }
            Op::Cx(a, b) => {
                let xa = self.x[a].clone();
                self.x[b].xor_assign(&xa);
                let zb = self.z[b].clone();
                self.z[a].xor_assign(&zb);
            }
            Op::Cz(a, b) => {
                let xa = self.x[a].clone();
                self.z[b].xor_assign(&xa);
                let xb = self.x[b].clone();
                self.z[a].xor_assign(&xb);
            }
            Op::Cy(a, b) => {
                let mut t = self.x[b].clone();
                t.xor_assign(&self.z[b]);
                let xa = self.x[a].clone();
                self.x[b].xor_assign(&xa);
                self.z[b].xor_assign(&xa);
                self.z[a].xor_assign(&t);
            }
            _ => {}
        }
    }

    /// Symptom of Pauli `p` on qubit q at the current time.
    fn symptom(&self, q: usize, p: Pauli) -> BitVec {
        let (x, z) = p.bits();
        let mut s = BitVec::zeros(self.width);
        if x {
            s.xor_assign(&self.z[q]);
        }
        if z {
            s.xor_assign(&self.x[q]);
        }
        s
    }
}

fn measurement_masks(c: &Circuit) -> Vec<Vec<usize>> {
    let mut masks = vec![Vec::new(); c.num_measurements];
    for (d, ms) in c.detectors.iter().enumerate() {
        for &m in ms {
            masks[m].push(d);
        }
    }
    let nd = c.detectors.len();
    for (o, ms) in c.observables.iter().enumerate() {
        for &m in ms {
            masks[m].push(nd + o);
        }
    }
    masks
}

/// Walk the circuit backwards, calling `on_noise(op_index, q, probs, sens)` at every noise op.
/// Returns the set of detectors/observables that are not deterministic.
fn backward(c: &Circuit, mut on_noise: impl FnMut(usize, usize, [f64; 3], &Sensitivity)) -> BitVec {
    let width = c.detectors.len() + c.observables.len();
    let masks = measurement_masks(c);
    let mut s = Sensitivity::new(c.num_qubits, width);
    let mut bad = BitVec::zeros(width);
    let mut m = c.num_measurements;
    for (idx, op) in c.ops.iter().enumerate().rev() {
        match *op {
            Op::Rx(q) => {
                bad.or_assign(&s.z[q]);
                s.x[q] = BitVec::zeros(width);
                s.z[q] = BitVec::zeros(width);
            }
            Op::Mx(q) | Op::Mrx(q) => {
                m -= 1;
                if matches!(op, Op::Mrx(_)) {
                    bad.or_assign(&s.z[q]);
                    s.x[q] = BitVec::zeros(width);
                    s.z[q] = BitVec::zeros(width);
                }
                bad.or_assign(&s.z[q]);
                for &d in &masks[m] {
                    s.x[q].flip(d);
                }
            }
            Op::Noise { q, probs } => on_noise(idx, q, probs, &s),
            Op::Tick => {}
            _ => s.conj(op),
        }
    }
    // qubits never reset start in |+⟩ and tolerate only X support
    for q in 0..c.num_qubits {
        bad.or_assign(&s.z[q]);
    }
    bad
}

#[derive(Clone, Debug, PartialEq)]
pub struct Determinism {
    pub detectors: Vec<bool>,
    pub observables: Vec<bool>,
}

impl Determinism {
    pub fn all(&self) -> bool {
        self.detectors.iter().chain(&self.observables).all(|&b| b)
    }
}

/// Back-propagation determinism test for every detector and observable.
pub fn determinism(c: &Circuit) -> Determinism {
    let bad = backward(c, |_, _, _, _| {});
    let nd = c.detectors.len();
    Determinism {
        detectors: (0..nd).map(|d| !bad.get(d)).collect(),
        observables: (0..c.observables.len()).map(|o| !bad.get(nd + o)).collect(),
    }
}

pub fn determinism_check(c: &Circuit, detector: usize) -> bool {
    determinism(c).detectors[detector]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism {
    pub p: f64,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub mechanisms: Vec<Mechanism>,
}

/// Symptom (detectors ⊕ observables) of a single Pauli inserted just before op `at`.
pub fn fault_symptom(c: &Circuit, at: usize, q: usize, p: Pauli) -> BitVec {
    let width = c.detectors.len() + c.observables.len();
    let mut probe = c.clone();
    probe.ops.insert(at, Op::Noise { q, probs: [1.0, 0.0, 0.0] });
    let mut out = BitVec::zeros(width);
    backward(&probe, |idx, qq, _, s| {
        if idx == at && qq == q {
            out = s.symptom(q, p);
        }
    });
    out
}

/// Unmerged (probability, symptom) pairs for every noise op and Pauli.
pub fn raw_mechanisms(c: &Circuit) -> Vec<(f64, BitVec)> {
    let mut groups = Vec::new();
    backward(c, |_, q, probs, s| {
        let g: Vec<(f64, BitVec)> = probs
            .iter()
            .zip([Pauli::X, Pauli::Y, Pauli::Z])
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, pauli)| (*p, s.symptom(q, pauli)))
            .collect();
        groups.push(g);
    });
    // back-propagation visits noise ops last to first
    groups.into_iter().rev().flatten().collect()
}

pub fn build_dem(c: &Circuit) -> DetectorErrorModel {
    let nd = c.detectors.len();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut mechs: Vec<(f64, Vec<usize>)> = Vec::new();
    for (p, sym) in raw_mechanisms(c) {
        if sym.is_zero() {
            continue;
        }
        let key = sym.ones();
        match index.get(&key) {
            Some(&i) => {
                let q = mechs[i].0;
                mechs[i].0 = q * (1.0 - p) + p * (1.0 - q);
            }
            None => {
                index.insert(key.clone(), mechs.len());
                mechs.push((p, key));
            }
        }
    }
    let mechanisms = mechs
        .into_iter()
        .map(|(p, key)| Mechanism {
            p,
            detectors: key.iter().copied().filter(|&i| i < nd).collect(),
            observables: key.iter().copied().filter(|&i| i >= nd).map(|i| i - nd).collect(),
        })
        .collect();
    DetectorErrorModel { num_detectors: nd, num_observables: c.observables.len(), mechanisms }
}

impl DetectorErrorModel {
    pub fn check_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.num_detectors, self.mechanisms.len());
        for (j, m) in self.mechanisms.iter().enumerate() {
            for &d in &m.detectors {
                h.set(d, j, true);
            }
        }
        h
    }

    pub fn observable_matrix(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.num_observables, self.mechanisms.len());
        for (j, m) in self.mechanisms.iter().enumerate() {
            for &o in &m.observables {
                h.set(o, j, true);
            }
        }
        h
    }

    pub fn priors(&self) -> Vec<f64> {
        self.mechanisms.iter().map(|m| m.p).collect()
    }
}

/// Detector and observable bits per shot.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub detectors: Vec<BitVec>,
    pub observables: Vec<BitVec>,
}

impl Samples {
    pub fn shots(&self) -> usize {
        self.detectors.len()
    }
}

/// Geometric skip: number of non-events before the next event at rate p.
#[inline]
fn skip(rng: &mut ChaCha8Rng, ln_q: f64) -> usize {
    let u: f64 = rng.gen();
    let v = ((1.0 - u).ln() / ln_q).floor();
    if v >= 64.0 {
        64
    } else {
        v as usize
    }
}

/// Bit mask of shots (out of 64) hit by an event of probability `p`.
fn event_mask(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return u64::MAX;
    }
    let ln_q = (1.0 - p).ln();
    let mut mask = 0u64;
    let mut i = skip(rng, ln_q);
    while i < 64 {
        mask |= 1 << i;
        i += 1 + skip(rng, ln_q);
    }
    mask
}

struct FrameBatch {
    x: Vec<u64>,
    z: Vec<u64>,
    record: Vec<u64>,
}

fn run_batch(c: &Circuit, rng: &mut ChaCha8Rng, gauge: bool, forced: Option<(usize, usize, Pauli)>) -> FrameBatch {
    let nq = c.num_qubits;
    let mut f = FrameBatch { x: vec![0; nq], z: vec![0; nq], record: Vec::with_capacity(c.num_measurements) };
    for (idx, op) in c.ops.iter().enumerate() {
        if let Some((at, q, p)) = forced {
            if at == idx {
                let (px, pz) = p.bits();
                if px {
                    f.x[q] ^= u64::MAX;
                }
                if pz {
                    f.z[q] ^= u64::MAX;
                }
            }
        }
        match *op {
            Op::Rx(q) => {
                f.x[q] = if gauge { rng.gen() } else { 0 };
                f.z[q] = 0;
            }
            Op::H(q) => std::mem::swap(&mut f.x[q], &mut f.z[q]),
            Op::S(q) | Op::Sdg(q) => f.z[q] ^= f.x[q],
            Op::Cx(a, b) => {
                f.x[b] ^= f.x[a];
                f.z[a] ^= f.z[b];
            }
            Op::Cz(a, b) => {
                f.z[b] ^= f.x[a];
                f.z[a] ^= f.x[b];
            }
            Op::Cy(a, b) => {
                let t = f.x[b] ^ f.z[b];
                f.x[b] ^= f.x[a];
                f.z[b] ^= f.x[a];
                f.z[a] ^= t;
            }
            Op::Mx(q) => {
                f.record.push(f.z[q]);
                if gauge {
                    f.x[q] ^= rng.gen::<u64>();
                }
            }
            Op::Mrx(q) => {
                f.record.push(f.z[q]);
                f.x[q] = if gauge { rng.gen() } else { 0 };
                f.z[q] = 0;
            }
            Op::Noise { q, probs } => {
                if forced.is_some() {
                    continue;
                }
                let total: f64 = probs.iter().sum();
                let hits = event_mask(rng, total);
                let mut h = hits;
                while h != 0 {
                    let b = h.trailing_zeros();
                    h &= h - 1;
                    let u: f64 = rng.gen::<f64>() * total;
                    let bit = 1u64 << b;
                    if u < probs[0] {
                        f.x[q] ^= bit;
                    } else if u < probs[0] + probs[1] {
                        f.x[q] ^= bit;
                        f.z[q] ^= bit;
                    } else {
                        f.z[q] ^= bit;
                    }
                }
            }
            Op::Tick => {}
        }
    }
    f
}

fn parities(sets: &[Vec<usize>], record: &[u64]) -> Vec<u64> {
    sets.iter().map(|ms| ms.iter().fold(0u64, |a, &m| a ^ record[m])).collect()
}

fn unpack(words: &[Vec<u64>], shots: usize, width: usize) -> Vec<BitVec> {
    (0..shots)
        .map(|s| {
            let (b, i) = (s / 64, s % 64);
            let mut v = BitVec::zeros(width);
            for (j, &w) in words[b].iter().enumerate() {
                if (w >> i) & 1 == 1 {
                    v.set(j, true);
                }
            }
            v
        })
        .collect()
}

fn sample_impl(c: &Circuit, shots: usize, seed: u64, gauge: bool) -> Samples {
    let batches = shots.div_ceil(64);
    let per: Vec<(Vec<u64>, Vec<u64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let f = run_batch(c, &mut rng, gauge, None);
            (parities(&c.detectors, &f.record), parities(&c.observables, &f.record))
        })
        .collect();
    let (dw, ow): (Vec<_>, Vec<_>) = per.into_iter().unzip();
    Samples { detectors: unpack(&dw, shots, c.detectors.len()), observables: unpack(&ow, shots, c.observables.len()) }
}

/// Pauli-frame sampling of the noisy circuit; batch b of 64 shots draws from stream (seed, b).
pub fn frame_sample(c: &Circuit, shots: usize, seed: u64) -> Samples {
    sample_impl(c, shots, seed, false)
}

/// Noiseless sampling with random X gauges after every X reset and measurement, so that
/// non-deterministic parities come out random.
pub fn gauge_sample(c: &Circuit, shots: usize, seed: u64) -> Samples {
    sample_impl(&c.without_noise(), shots, seed, true)
}

/// Symptom of one Pauli forced just before op `at`, computed by forward frame propagation.
pub fn forced_fault(c: &Circuit, at: usize, q: usize, p: Pauli) -> BitVec {
    let mut rng = stream(0, 0);
    let f = run_batch(c, &mut rng, false, Some((at, q, p)));
    let mut v = BitVec::zeros(c.detectors.len() + c.observables.len());
    for (j, w) in parities(&c.detectors, &f.record).into_iter().chain(parities(&c.observables, &f.record)).enumerate() {
        if w & 1 == 1 {
            v.set(j, true);
        }
    }
    v
}

/// Independent sampling of DEM mechanisms.
pub fn sample_dem(dem: &DetectorErrorModel, shots: usize, seed: u64) -> Samples {
    let batches = shots.div_ceil(64);
    let per: Vec<(Vec<u64>, Vec<u64>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let mut d = vec![0u64; dem.num_detectors];
            let mut o = vec![0u64; dem.num_observables];
            for m in &dem.mechanisms {
                let mask = event_mask(&mut rng, m.p);
                if mask != 0 {
                    for &i in &m.detectors {
                        d[i] ^= mask;
                    }
                    for &i in &m.observables {
                        o[i] ^= mask;
                    }
                }
            }
            (d, o)
        })
        .collect();
    let (dw, ow): (Vec<_>, Vec<_>) = per.into_iter().unzip();
    Samples { detectors: unpack(&dw, shots, dem.num_detectors), observables: unpack(&ow, shots, dem.num_observables) }
}

/// Decode every shot; returns the number whose predicted observable flips differ.
pub fn decode_circuit(dem: &DetectorErrorModel, samples: &Samples, config: DecoderConfig) -> Result<usize, Error> {
    let decoder = BpOsd::new(&dem.check_matrix(), &dem.priors(), config);
    let obs = dem.observable_matrix();
    let fails: Vec<bool> = (0..samples.shots())
        .into_par_iter()
        .map(|s| {
            let d = decoder
                .decode(&samples.detectors[s])
                .map_err(|e| Error::Validation(format!("shot {s}: {e}")))?;
            Ok(obs.mul_vec(&d.correction) != samples.observables[s])
        })
        .collect::<Result<_, Error>>()?;
    Ok(fails.into_iter().filter(|&f| f).count())
}

/// Z-layer permutations (X order fixed) whose noiseless circuits are fully deterministic.
pub fn schedule_search(tile: &TileCode, x_order: [usize; 6]) -> Vec<Schedule> {
    let mut perms = Vec::new();
    permutations(&mut [0, 1, 2, 3, 4, 5], 0, &mut perms);
    perms.sort();
    let id = DeformationMap::identity(tile.n());
    perms
        .into_par_iter()
        .filter_map(|z_order| {
            let s = Schedule { x_order, z_order };
            build_memory(tile, &id, 2, &s, &NoiseModel::noiseless()).ok().map(|_| s)
        })
        .collect()
}

fn permutations(a: &mut [usize; 6], k: usize, out: &mut Vec<[usize; 6]>) {
    if k == a.len() {
        out.push(*a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permutations(a, k + 1, out);
        a.swap(k, i);
    }
}

fn fmt_probs(p: &[f64; 3]) -> String {
    format!("{} {} {}", p[0], p[1], p[2])
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut s = format!("circuit v1 qubits={} data={} rounds={}\n", c.num_qubits, c.num_data, c.rounds);
    for op in &c.ops {
        let line = match *op {
            Op::Rx(q) => format!("RX {q}"),
            Op::H(q) => format!("H {q}"),
            Op::S(q) => format!("S {q}"),
            Op::Sdg(q) => format!("SDG {q}"),
            Op::Cx(a, b) => format!("CX {a} {b}"),
            Op::Cz(a, b) => format!("CZ {a} {b}"),
            Op::Cy(a, b) => format!("CY {a} {b}"),
            Op::Mx(q) => format!("MX {q}"),
            Op::Mrx(q) => format!("MRX {q}"),
            Op::Noise { q, probs } => format!("NOISE {q} {}", fmt_probs(&probs)),
            Op::Tick => "TICK".into(),
        };
        s.push_str(&line);
        s.push('\n');
    }
    let join = |v: &[usize]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
    for d in &c.detectors {
        s.push_str(&format!("DETECTOR {}\n", join(d)));
    }
    for (k, o) in c.observables.iter().enumerate() {
        s.push_str(&format!("OBSERVABLE {k} {}\n", join(o)));
    }
    s
}

fn header_value(tok: Option<&str>, key: &str) -> Result<usize, Error> {
    let t = tok.ok_or_else(|| Error::Parse(format!("missing {key}")))?;
    t.strip_prefix(&format!("{key}="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header field {t}")))
}

pub fn read_circuit(text: &str) -> Result<Circuit, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("empty circuit".into()))?;
    let mut h = head.split_whitespace();
    if h.next() != Some("circuit") || h.next() != Some("v1") {
        return Err(Error::Parse("expected 'circuit v1' header".into()));
    }
    let nq = header_value(h.next(), "qubits")?;
    let mut c = Circuit::new(nq);
    c.num_data = header_value(h.next(), "data")?;
    c.rounds = header_value(h.next(), "rounds")?;
    for (ln, line) in lines.enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: {line}", ln + 2));
        let u = |i: usize| -> Result<usize, Error> {
            let v: usize = toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            Ok(v)
        };
        let f = |i: usize| -> Result<f64, Error> { toks.get(i).and_then(|t| t.parse().ok()).ok_or_else(bad) };
        let op = match toks[0] {
            "RX" => Op::Rx(u(1)?),
            "H" => Op::H(u(1)?),
            "S" => Op::S(u(1)?),
            "SDG" => Op::Sdg(u(1)?),
            "CX" => Op::Cx(u(1)?, u(2)?),
            "CZ" => Op::Cz(u(1)?, u(2)?),
            "CY" => Op::Cy(u(1)?, u(2)?),
            "MX" => Op::Mx(u(1)?),
            "MRX" => Op::Mrx(u(1)?),
            "NOISE" => Op::Noise { q: u(1)?, probs: [f(2)?, f(3)?, f(4)?] },
            "TICK" => Op::Tick,
            "DETECTOR" => {
                c.detectors.push((1..toks.len()).map(u).collect::<Result<_, _>>()?);
                continue;
            }
            "OBSERVABLE" => {
                let k = u(1)?;
                if k != c.observables.len() {
                    return Err(bad());
                }
                c.observables.push((2..toks.len()).map(u).collect::<Result<_, _>>()?);
                continue;
            }
            _ => return Err(bad()),
        };
        if op.qubits().iter().any(|&q| q >= nq) {
            return Err(bad());
        }
        c.push(op);
    }
    let nm = c.num_measurements;
    if c.detectors.iter().chain(&c.observables).flatten().any(|&m| m >= nm) {
        return Err(Error::Parse("measurement index out of range".into()));
    }
    Ok(c)
}

pub fn write_dem(dem: &DetectorErrorModel) -> String {
    let mut s = format!("dem v1 detectors={} observables={}\n", dem.num_detectors, dem.num_observables);
    for m in &dem.mechanisms {
        s.push_str(&format!("error({})", m.p));
        for d in &m.detectors {
            s.push_str(&format!(" D{d}"));
        }
        for o in &m.observables {
            s.push_str(&format!(" L{o}"));
        }
        s.push('\n');
    }
    s
}

pub fn read_dem(text: &str) -> Result<DetectorErrorModel, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let head = lines.next().ok_or_else(|| Error::Parse("empty dem".into()))?;
    let mut h = head.split_whitespace();
    if h.next() != Some("dem") || h.next() != Some("v1") {
        return Err(Error::Parse("expected 'dem v1' header".into()));
    }
    let nd = header_value(h.next(), "detectors")?;
    let no = header_value(h.next(), "observables")?;
    let mut mechanisms = Vec::new();
    for line in lines {
        let bad = || Error::Parse(format!("bad dem line: {line}"));
        let mut toks = line.split_whitespace();
        let first = toks.next().ok_or_else(bad)?;
        let p: f64 = first
            .strip_prefix("error(")
            .and_then(|t| t.strip_suffix(')'))
            .and_then(|t| t.parse().ok())
            .ok_or_else(bad)?;
        let mut m = Mechanism { p, detectors: Vec::new(), observables: Vec::new() };
        for t in toks {
            if let Some(d) = t.strip_prefix('D') {
                m.detectors.push(d.parse().map_err(|_| bad())?);
            } else if let Some(o) = t.strip_prefix('L') {
                m.observables.push(o.parse().map_err(|_| bad())?);
            } else {
                return Err(bad());
            }
        }
        if m.detectors.iter().any(|&d| d >= nd) || m.observables.iter().any(|&o| o >= no) {
            return Err(bad());
        }
        mechanisms.push(m);
    }
    Ok(DetectorErrorModel { num_detectors: nd, num_observables: no, mechanisms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_qubit_action(op: Op, x: [bool; 2], z: [bool; 2]) -> ([bool; 2], [bool; 2]) {
        let mut c = Circuit::new(2);
        c.push(op);
        let mut s = Sensitivity::new(2, 1);
        for q in 0..2 {
            s.x[q].set(0, x[q]);
            s.z[q].set(0, z[q]);
        }
        s.conj(&op);
        ([s.x[0].get(0), s.x[1].get(0)], [s.z[0].get(0), s.z[1].get(0)])
    }

    #[test]
    fn conjugation_tables() {
        // CX: X⊗I → X⊗X, I⊗Z → Z⊗Z
        assert_eq!(two_qubit_action(Op::Cx(0, 1), [true, false], [false, false]), ([true, true], [false, false]));
        assert_eq!(two_qubit_action(Op::Cx(0, 1), [false, false], [false, true]), ([false, false], [true, true]));
        // CZ: X⊗I → X⊗Z
        assert_eq!(two_qubit_action(Op::Cz(0, 1), [true, false], [false, false]), ([true, false], [false, true]));
        // CY: X⊗I → X⊗Y
        assert_eq!(two_qubit_action(Op::Cy(0, 1), [true, false], [false, false]), ([true, true], [false, true]));
    }

    #[test]
    fn bell_pair_detector() {
        let mut c = Circuit::new(2);
        c.push(Op::Rx(0));
        c.push(Op::Rx(1));
        c.push(Op::H(1));
        c.push(Op::Cx(0, 1));
        let a = c.push(Op::Mx(0)).unwrap();
        let b = c.push(Op::Mx(1)).unwrap();
        c.detectors = vec![vec![a], vec![a, b]];
        let d = determinism(&c);
        assert_eq!(d.detectors, vec![false, true]);
        let g = gauge_sample(&c, 256, 5);
        assert!(g.detectors.iter().all(|v| !v.get(1)));
        assert!(g.detectors.iter().any(|v| v.get(0)));
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(3);
        c.push(Op::Rx(0));
        c.push(Op::Noise { q: 0, probs: [0.1, 1e-7, 0.3333333333333333] });
        c.push(Op::Cy(0, 2));
        c.push(Op::Tick);
        let m = c.push(Op::Mrx(0)).unwrap();
        c.detectors.push(vec![m]);
        c.observables.push(vec![m]);
        let t = write_circuit(&c);
        assert_eq!(read_circuit(&t).unwrap(), c);
        let dem = build_dem(&c);
        assert_eq!(read_dem(&write_dem(&dem)).unwrap(), dem);
    }
}
