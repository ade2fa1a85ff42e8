//! Effective single-qubit Pauli statistics of compiled syndrome-extraction rounds under
//! hardware gate channels, by Monte Carlo propagation of Pauli strings.

use crate::algebra::{Pauli, PauliVec};
use crate::bposd::DecoderConfig;
use crate::channel::{Bias, BiasedChannel};
use crate::circuit::{build_dem, build_memory, decode_circuit, frame_sample, NoiseModel, Op, Schedule};
use crate::deform::DeformationMap;
use crate::rng::stream;
use crate::tilecode::TileCode;
use crate::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_CHANNELS: &str = include_str!("../data/channels.txt");

/// Pauli channel on one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateChannel {
    pub arity: usize,
    /// Non-identity Pauli strings (first letter acts on the first qubit) with probabilities.
    pub entries: Vec<(Vec<Pauli>, f64)>,
    /// Identity weight as tabulated; the sampled identity weight is 1 − Σ entries.
    pub stated_identity: f64,
}

impl GateChannel {
    pub fn error_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Probabilities (I, X, Y, Z) of a single-qubit channel.
    pub fn single(px: f64, py: f64, pz: f64) -> Self {
        Self {
            arity: 1,
            entries: vec![(vec![Pauli::X], px), (vec![Pauli::Y], py), (vec![Pauli::Z], pz)],
            stated_identity: 1.0 - px - py - pz,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.entries.iter().any(|(s, p)| s.len() != self.arity || *p < 0.0 || s.iter().all(|&x| x == Pauli::I)) {
            return Err(Error::Invalid("malformed channel entry".into()));
        }
        let w = self.error_weight();
        if w > 1.0 || self.entries.iter().any(|e| e.1 > 1.0 - w) {
            return Err(Error::Invalid("identity must be the largest entry".into()));
        }
        Ok(())
    }
}

/// (p_IZ + p_ZI + p_ZZ) over every other non-identity weight, using the tabulated identity.
pub fn gate_bias(ch: &GateChannel) -> Result<f64, Error> {
    if ch.arity != 2 {
        return Err(Error::Invalid(format!("gate bias needs a two-qubit channel, got arity {}", ch.arity)));
    }
    let dephasing: f64 = ch
        .entries
        .iter()
        .filter(|(s, _)| s.iter().all(|&p| p == Pauli::I || p == Pauli::Z))
        .map(|e| e.1)
        .sum();
    let total = 1.0 - ch.stated_identity;
    Ok(dephasing / (total - dephasing))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Platform {
    NoPhysGate,
    TrappedIonsCx,
    SuperconductingCx,
    TrappedIonsCz,
    NeutralAtomsCz,
}

pub const ALL_PLATFORMS: [Platform; 5] =
    [Platform::NoPhysGate, Platform::TrappedIonsCx, Platform::SuperconductingCx, Platform::TrappedIonsCz, Platform::NeutralAtomsCz];

impl Platform {
    pub fn name(self) -> &'static str {
        match self {
            Platform::NoPhysGate => "no-phys-gate",
            Platform::TrappedIonsCx => "trapped-ions-cx",
            Platform::SuperconductingCx => "superconducting-cx",
            Platform::TrappedIonsCz => "trapped-ions-cz",
            Platform::NeutralAtomsCz => "neutral-atoms-cz",
        }
    }

    pub fn parse(s: &str) -> Result<Platform, Error> {
        ALL_PLATFORMS
            .into_iter()
            .find(|p| p.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown platform {s}")))
    }

    /// Native two-qubit gate of the platform.
    pub fn native(self) -> Option<Strategy> {
        match self {
            Platform::NoPhysGate => None,
            Platform::TrappedIonsCx | Platform::SuperconductingCx => Some(Strategy::CxNative),
            Platform::TrappedIonsCz | Platform::NeutralAtomsCz => Some(Strategy::CzNative),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Strategy {
    NoNative,
    CxNative,
    CzNative,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::NoNative => "no-native",
            Strategy::CxNative => "cx-native",
            Strategy::CzNative => "cz-native",
        }
    }

    pub fn parse(s: &str) -> Result<Strategy, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "no-native" | "no" => Ok(Strategy::NoNative),
            "cx-native" | "cx" => Ok(Strategy::CxNative),
            "cz-native" | "cz" => Ok(Strategy::CzNative),
            _ => Err(Error::Parse(format!("unknown strategy {s}"))),
        }
    }
}

/// Parsed channel file: `channel <platform|all> <gate>` blocks of `PAULI p` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTable {
    pub blocks: Vec<(String, String, GateChannel)>,
}

impl ChannelTable {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut blocks: Vec<(String, String, GateChannel)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("channel file line {}: {raw}", ln + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] == "channel" {
                if toks.len() != 3 {
                    return Err(bad());
                }
                blocks.push((toks[1].to_string(), toks[2].to_string(), GateChannel { arity: 0, entries: Vec::new(), stated_identity: 1.0 }));
                continue;
            }
            let (_, _, ch) = blocks.last_mut().ok_or_else(bad)?;
            if toks.len() != 2 {
                return Err(bad());
            }
            let ps: Vec<Pauli> = toks[0].chars().map(|c| Pauli::parse(c).ok_or_else(bad)).collect::<Result<_, _>>()?;
            let p: f64 = toks[1].parse().map_err(|_| bad())?;
            if ch.arity == 0 {
                ch.arity = ps.len();
            } else if ch.arity != ps.len() {
                return Err(bad());
            }
            if ps.iter().all(|&x| x == Pauli::I) {
                ch.stated_identity = p;
            } else {
                ch.entries.push((ps, p));
            }
        }
        for (_, _, ch) in &blocks {
            ch.validate()?;
        }
        Ok(Self { blocks })
    }

    pub fn default_table() -> Self {
        Self::parse(DEFAULT_CHANNELS).expect("shipped channel table parses")
    }

    pub fn get(&self, platform: &str, gate: &str) -> Option<&GateChannel> {
        self.blocks
            .iter()
            .find(|(p, g, _)| p == platform && g == gate)
            .or_else(|| self.blocks.iter().find(|(p, g, _)| p == "all" && g == gate))
            .map(|b| &b.2)
    }
}

/// A gate layer: ops on pairwise disjoint qubits.
pub type Layer = Vec<Op>;

/// One noiseless extraction round as gate layers: data preparation then the entangling steps.
pub fn round_layers(tile: &TileCode, map: &DeformationMap, schedule: &Schedule) -> Result<(usize, Vec<Layer>), Error> {
    let c = build_memory(tile, map, 1, schedule, &NoiseModel::noiseless())?;
    let mut groups: Vec<Vec<Op>> = vec![Vec::new()];
    for op in &c.ops {
        match op {
            Op::Mx(_) | Op::Mrx(_) => break,
            Op::Tick => groups.push(Vec::new()),
            op if op.is_gate() => groups.last_mut().expect("group").push(*op),
            _ => {}
        }
    }
    let layers = groups.into_iter().flat_map(split_disjoint).collect();
    Ok((c.num_qubits, layers))
}

/// Greedy split into maximal disjoint-support sets in program order.
pub fn split_disjoint(ops: Vec<Op>) -> Vec<Layer> {
    let mut out: Vec<Layer> = Vec::new();
    let mut rest = ops;
    while !rest.is_empty() {
        let mut used = std::collections::HashSet::new();
        let mut layer = Vec::new();
        let mut next = Vec::new();
        let mut blocked = std::collections::HashSet::new();
        for op in rest {
            let qs = op.qubits();
            // an op may not jump ahead of an earlier deferred op on the same qubit
            if qs.iter().any(|q| used.contains(q) || blocked.contains(q)) {
                blocked.extend(qs);
                next.push(op);
            } else {
                used.extend(qs);
                layer.push(op);
            }
        }
        out.push(layer);
        rest = next;
    }
    out
}

/// Rewrite two-qubit gates into the strategy's native gate with conjugating layers.
pub fn compile(layers: &[Layer], strategy: Strategy) -> Vec<Layer> {
    if strategy == Strategy::NoNative {
        return layers.to_vec();
    }
    let mut out = Vec::new();
    for layer in layers {
        let mut pre = Vec::new();
        let mut mid = Vec::new();
        let mut post = Vec::new();
        for &op in layer {
            match (strategy, op) {
                (Strategy::CxNative, Op::Cz(c, t)) => {
                    pre.push(Op::H(t));
                    mid.push(Op::Cx(c, t));
                    post.push(Op::H(t));
                }
                (Strategy::CxNative, Op::Cy(c, t)) => {
                    pre.push(Op::Sdg(t));
                    mid.push(Op::Cx(c, t));
                    post.push(Op::S(t));
                }
                (Strategy::CzNative, Op::Cx(c, t)) => {
                    pre.push(Op::H(t));
                    mid.push(Op::Cz(c, t));
                    post.push(Op::H(t));
                }
                (Strategy::CzNative, Op::Cy(c, t)) => {
                    pre.push(Op::Sdg(t));
                    pre.push(Op::H(t));
                    mid.push(Op::Cz(c, t));
                    post.push(Op::H(t));
                    post.push(Op::S(t));
                }
                _ => mid.push(op),
            }
        }
        for part in [pre, mid, post] {
            if !part.is_empty() {
                out.extend(split_disjoint(part));
            }
        }
    }
    out
}

/// Heisenberg action of an op sequence on a Pauli (phases dropped).
pub fn conjugate(ops: &[Op], p: &PauliVec) -> PauliVec {
    let mut x: Vec<bool> = (0..p.n()).map(|q| p.x.get(q)).collect();
    let mut z: Vec<bool> = (0..p.n()).map(|q| p.z.get(q)).collect();
    for op in ops {
        match *op {
            Op::H(q) => std::mem::swap(&mut x[q], &mut z[q]),
            Op::S(q) | Op::Sdg(q) => z[q] ^= x[q],
            Op::Cx(a, b) => {
                x[b] ^= x[a];
                z[a] ^= z[b];
            }
            Op::Cz(a, b) => {
                z[b] ^= x[a];
                z[a] ^= x[b];
            }
            Op::Cy(a, b) => {
                let t = x[b] ^ z[b];
                x[b] ^= x[a];
                z[b] ^= x[a];
                z[a] ^= t;
            }
            _ => {}
        }
    }
    let mut out = PauliVec::identity(p.n());
    for q in 0..p.n() {
        out.set(q, Pauli::from_bits(x[q], z[q]));
    }
    out
}

/// Marginal label probabilities (I, X, Y, Z) over all qubits and samples.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Marginals {
    pub i: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// p_eff = p̄_X + p̄_Y + p̄_Z and η_eff = p̄_Z/(p̄_X + p̄_Y); `None` when the denominator vanishes.
pub fn eff_params(m: &Marginals) -> (f64, Option<f64>) {
    let den = m.x + m.y;
    (m.x + m.y + m.z, (den > 0.0).then(|| m.z / den))
}

#[derive(Clone, Debug)]
pub struct PropagationConfig {
    pub p: f64,
    pub eta: f64,
    pub platform: Platform,
    pub samples: usize,
    pub seed: u64,
}

struct Frames {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Frames {
    fn apply(&mut self, q: usize, p: Pauli, mask: u64) {
        let (px, pz) = p.bits();
        if px {
            self.x[q] ^= mask;
        }
        if pz {
            self.z[q] ^= mask;
        }
    }

    /// Sample a channel independently in each of the 64 shots.
    fn channel(&mut self, rng: &mut ChaCha8Rng, qs: &[usize], ch: &GateChannel) {
        let w = ch.error_weight();
        if w <= 0.0 {
            return;
        }
        for b in 0..64 {
            if rng.gen::<f64>() >= w {
                continue;
            }
            let mut u = rng.gen::<f64>() * w;
            let mut pick = &ch.entries[ch.entries.len() - 1].0;
            for (s, p) in &ch.entries {
                if u < *p {
                    pick = s;
                    break;
                }
                u -= p;
            }
            for (&q, &p) in qs.iter().zip(pick.iter()) {
                self.apply(q, p, 1 << b);
            }
        }
    }

    fn gate(&mut self, op: &Op) {
        match *op {
            Op::H(q) => std::mem::swap(&mut self.x[q], &mut self.z[q]),
            Op::S(q) | Op::Sdg(q) => self.z[q] ^= self.x[q],
            Op::Cx(a, b) => {
                self.x[b] ^= self.x[a];
                self.z[a] ^= self.z[b];
            }
            Op::Cz(a, b) => {
                self.z[b] ^= self.x[a];
                self.z[a] ^= self.x[b];
            }
            Op::Cy(a, b) => {
                let t = self.x[b] ^ self.z[b];
                self.x[b] ^= self.x[a];
                self.z[b] ^= self.x[a];
                self.z[a] ^= t;
            }
            _ => {}
        }
    }
}

fn gate_channel<'a>(table: &'a ChannelTable, platform: Platform, op: &Op) -> Option<&'a GateChannel> {
    let name = match op {
        Op::H(_) => "H",
        Op::S(_) | Op::Sdg(_) => "S",
        Op::Cx(..) => "CX",
        Op::Cz(..) => "CZ",
        _ => return None,
    };
    table.get(platform.name(), name)
}

/// Monte Carlo propagation over compiled layers; batch b of 64 samples uses stream (seed, b).
pub fn propagate_mc(num_qubits: usize, layers: &[Layer], table: &ChannelTable, cfg: &PropagationConfig) -> Result<Marginals, Error> {
    let ch = BiasedChannel::new(cfg.p, Bias::Finite(cfg.eta))?;
    let (px, py, pz) = ch.probs();
    let circ = GateChannel::single(px, py, pz);
    let initmeas = GateChannel::single(0.0, 0.0, py + pz);
    let batches = cfg.samples.div_ceil(64);
    let counts: Vec<[u64; 3]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(cfg.seed, b as u64);
            let mut f = Frames { x: vec![0; num_qubits], z: vec![0; num_qubits] };
            for q in 0..num_qubits {
                f.channel(&mut rng, &[q], &initmeas);
            }
            for layer in layers {
                for op in layer {
                    f.gate(op);
                }
                if cfg.platform == Platform::NoPhysGate {
                    for q in 0..num_qubits {
                        f.channel(&mut rng, &[q], &circ);
                    }
                } else {
                    let mut active = vec![false; num_qubits];
                    for op in layer {
                        let qs = op.qubits();
                        for &q in &qs {
                            active[q] = true;
                        }
                        if let Some(g) = gate_channel(table, cfg.platform, op) {
                            f.channel(&mut rng, &qs, g);
                        }
                    }
                    for q in (0..num_qubits).filter(|&q| !active[q]) {
                        f.channel(&mut rng, &[q], &circ);
                    }
                }
            }
            for q in 0..num_qubits {
                f.channel(&mut rng, &[q], &initmeas);
            }
            // the last batch may be partial
            let valid = if (b + 1) * 64 <= cfg.samples { u64::MAX } else { (1u64 << (cfg.samples - b * 64)) - 1 };
            let mut c = [0u64; 3];
            for q in 0..num_qubits {
                let (x, z) = (f.x[q] & valid, f.z[q] & valid);
                c[0] += (x & !z).count_ones() as u64;
                c[1] += (x & z).count_ones() as u64;
                c[2] += (z & !x).count_ones() as u64;
            }
            c
        })
        .collect();
    let tot = (cfg.samples * num_qubits) as f64;
    let s = counts.iter().fold([0u64; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);
    let (x, y, z) = (s[0] as f64 / tot, s[1] as f64 / tot, s[2] as f64 / tot);
    Ok(Marginals { i: 1.0 - x - y - z, x, y, z })
}

/// Logical error rate of a phenomenological memory experiment with the effective channel.
#[allow(clippy::too_many_arguments)]
pub fn pheno_eval(
    tile: &TileCode,
    map: &DeformationMap,
    p_eff: f64,
    eta_eff: Bias,
    rounds: usize,
    shots: usize,
    seed: u64,
    config: DecoderConfig,
) -> Result<f64, Error> {
    let ch = BiasedChannel::new(p_eff, eta_eff)?;
    let c = build_memory(tile, map, rounds, &Schedule::default(), &NoiseModel::phenomenological(&ch))?;
    let dem = build_dem(&c);
    let s = frame_sample(&c, shots, seed);
    let f = decode_circuit(&dem, &s, config)?;
    Ok(f as f64 / shots as f64)
}

pub const RESULTS_CSV_HEADER: &str = "variant,strategy,platform,p_eff,eta_eff,p_l";
