//! Code-capacity Monte Carlo: logical error rates, threshold crossings, bias and phase sweeps.

use crate::algebra::PauliVec;
use crate::bposd::{code_decoder, correction_pauli, is_failure, DecoderConfig};
use crate::channel::{hashing_bound, Bias, BiasedChannel};
use crate::deform::Variant;
use crate::rng::{derive, stream};
use crate::tilecode::{StabilizerCode, TileCode};
use crate::Error;
use rayon::prelude::*;

/// Wilson 95% interval for k failures out of n.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let ph = k as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (ph + z * z / (2.0 * nf)) / denom;
    let half = z * (ph * (1.0 - ph) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TrialResult {
    pub code: String,
    pub l: usize,
    pub pi_xz: f64,
    pub pi_yz: f64,
    pub eta: Bias,
    pub p: f64,
    pub trials: usize,
    pub failures: usize,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl TrialResult {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

pub const TRIALS_CSV_HEADER: &str = "code,L,pi_xz,pi_yz,eta,p,trials,failures,ci_lo,ci_hi,seed";

pub fn trials_csv_row(r: &TrialResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.6e},{:.6e},{}",
        r.code,
        r.l,
        r.pi_xz,
        r.pi_yz,
        r.eta.label(),
        r.p,
        r.trials,
        r.failures,
        r.ci_lo,
        r.ci_hi,
        r.seed
    )
}

/// Count decoding failures over `trials` samples; trial i draws from stream (seed, i).
pub fn count_failures(code: &StabilizerCode, channel: &BiasedChannel, config: DecoderConfig, trials: usize, seed: u64) -> Result<usize, Error> {
    let logicals = code.logical_operators();
    let decoder = code_decoder(code, channel, config);
    let n = code.n();
    let fails: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let e = channel.sample_error(n, &mut rng);
            let s = code.syndrome(&e);
            let d = decoder
                .decode(&s)
                .map_err(|err| Error::Validation(format!("trial {i}: {err}")))?;
            let c: PauliVec = correction_pauli(&d.correction);
            is_failure(code, &logicals, &e, &c).map_err(|err| Error::Validation(format!("trial {i}: {err}")))
        })
        .collect::<Result<_, Error>>()?;
    Ok(fails.into_iter().filter(|&f| f).count())
}

/// Parameters identifying one Monte Carlo point.
#[derive(Clone, Debug)]
pub struct PointSpec {
    pub code_name: String,
    pub l: usize,
    pub pi: (f64, f64),
    pub channel: BiasedChannel,
    pub trials: usize,
    pub seed: u64,
}

pub fn run_trials(code: &StabilizerCode, spec: &PointSpec, config: DecoderConfig) -> Result<TrialResult, Error> {
    let failures = count_failures(code, &spec.channel, config, spec.trials, spec.seed)?;
    let (ci_lo, ci_hi) = wilson(failures, spec.trials);
    Ok(TrialResult {
        code: spec.code_name.clone(),
        l: spec.l,
        pi_xz: spec.pi.0,
        pi_yz: spec.pi.1,
        eta: spec.channel.eta,
        p: spec.channel.p,
        trials: spec.trials,
        failures,
        ci_lo,
        ci_hi,
        seed: spec.seed,
    })
}

/// One logical-error curve: size and (p, p_L) points.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub size: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ThresholdEstimate {
    pub p_th: Option<f64>,
    pub spread: f64,
    pub crossings: Vec<Option<f64>>,
}

fn log_rate(x: f64) -> f64 {
    x.max(1e-12).ln()
}

/// First p where the larger code's curve rises above the smaller one, by log-linear interpolation.
pub fn crossing(small: &Curve, large: &Curve) -> Option<f64> {
    let pts: Vec<(f64, f64)> = small
        .points
        .iter()
        .filter_map(|&(p, a)| large.points.iter().find(|q| (q.0 - p).abs() < 1e-12).map(|&(_, b)| (p, log_rate(b) - log_rate(a))))
        .collect();
    for w in pts.windows(2) {
        let (p0, d0) = w[0];
        let (p1, d1) = w[1];
        if d0 == 0.0 {
            return Some(p0);
        }
        if d0 < 0.0 && d1 >= 0.0 {
            return Some(p0 + (p1 - p0) * (-d0) / (d1 - d0));
        }
    }
    None
}

/// Median crossing over adjacent size pairs, with max−min spread.
pub fn threshold_estimate(curves: &[Curve]) -> Result<ThresholdEstimate, Error> {
    if curves.len() < 2 {
        return Err(Error::Invalid("need at least two sizes".into()));
    }
    if curves.iter().any(|c| c.points.len() < 3) {
        return Err(Error::Invalid("need at least three p-points per size".into()));
    }
    let mut sorted = curves.to_vec();
    sorted.sort_by_key(|c| c.size);
    for c in &mut sorted {
        c.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let crossings: Vec<Option<f64>> = sorted.windows(2).map(|w| crossing(&w[0], &w[1])).collect();
    let mut found: Vec<f64> = crossings.iter().flatten().copied().collect();
    if found.is_empty() {
        return Ok(ThresholdEstimate { p_th: None, spread: 0.0, crossings });
    }
    found.sort_by(f64::total_cmp);
    let m = found.len();
    let median = if m % 2 == 1 { found[m / 2] } else { 0.5 * (found[m / 2 - 1] + found[m / 2]) };
    Ok(ThresholdEstimate { p_th: Some(median), spread: found[m - 1] - found[0], crossings })
}

pub const THRESHOLDS_CSV_HEADER: &str = "variant,eta,p_th,spread,method";

pub fn thresholds_csv_row(variant: &str, eta: Bias, t: &ThresholdEstimate) -> String {
    let p = t.p_th.map(|v| format!("{v:.6}")).unwrap_or_else(|| "none".into());
    format!("{variant},{},{p},{:.6},loglinear-crossing", eta.label(), t.spread)
}

/// Sweep p for one family of (size, code) pairs.
pub fn p_sweep(
    family: &[(usize, String, StabilizerCode)],
    pi: (f64, f64),
    eta: Bias,
    ps: &[f64],
    trials: usize,
    seed: u64,
    config: DecoderConfig,
) -> Result<(Vec<TrialResult>, Vec<Curve>), Error> {
    let mut results = Vec::new();
    let mut curves = Vec::new();
    for (i, (l, name, code)) in family.iter().enumerate() {
        let mut pts = Vec::new();
        for (j, &p) in ps.iter().enumerate() {
            let spec = PointSpec {
                code_name: name.clone(),
                l: *l,
                pi,
                channel: BiasedChannel::new(p, eta)?,
                trials,
                seed: derive(seed, ((i as u64) << 32) | j as u64),
            };
            let r = run_trials(code, &spec, config)?;
            pts.push((p, r.rate()));
            results.push(r);
        }
        curves.push(Curve { size: *l, points: pts });
    }
    Ok((results, curves))
}

/// Per-phase-point summary.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PhasePoint {
    pub pi_xz: f64,
    pub pi_yz: f64,
    pub results: Vec<TrialResult>,
    pub threshold: Option<ThresholdEstimate>,
    /// p_L decreases with size at the probe rate for every disorder sample.
    pub fifty_percent: bool,
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct PhaseSweepConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub ps: Vec<f64>,
    pub probe_p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Maximum number of decodes; points beyond it are marked incomplete.
    pub budget: u64,
    pub decoder: DecoderConfig,
}

/// Infinite-bias sweep over (Π_XZ, Π_YZ) with random deformations on periodic lattices.
pub fn phase_sweep(grid: &[(f64, f64)], cfg: &PhaseSweepConfig) -> Result<Vec<PhasePoint>, Error> {
    let tiles: Vec<TileCode> = cfg
        .sizes
        .iter()
        .map(|&l| crate::tilecode::build_periodic(l, l))
        .collect::<Result<_, _>>()?;
    let mut spent: u64 = 0;
    let per_point = (cfg.samples * tiles.len() * (cfg.ps.len() + 1) * cfg.trials) as u64;
    let mut out = Vec::new();
    for (g, &(pi_xz, pi_yz)) in grid.iter().enumerate() {
        if spent + per_point > cfg.budget {
            out.push(PhasePoint { pi_xz, pi_yz, results: Vec::new(), threshold: None, fifty_percent: false, complete: false });
            continue;
        }
        spent += per_point;
        let mut results = Vec::new();
        let mut averaged = vec![vec![0.0; cfg.ps.len()]; tiles.len()];
        let mut fifty = true;
        for s in 0..cfg.samples {
            let mut probe = Vec::new();
            for (t, tile) in tiles.iter().enumerate() {
                let label = ((g as u64) << 40) | ((s as u64) << 20) | t as u64;
                let v = Variant::Random { pi_xz, pi_yz, seed: derive(cfg.seed, label) };
                let (_, code) = v.build(tile)?;
                let name = format!("periodic-{}", v.name());
                for (j, &p) in cfg.ps.iter().chain(std::iter::once(&cfg.probe_p)).enumerate() {
                    let spec = PointSpec {
                        code_name: name.clone(),
                        l: tile.layout.lx,
                        pi: (pi_xz, pi_yz),
                        channel: BiasedChannel::new(p, Bias::Infinite)?,
                        trials: cfg.trials,
                        seed: derive(cfg.seed, label ^ ((j as u64 + 1) << 56)),
                    };
                    let r = run_trials(&code, &spec, cfg.decoder)?;
                    if j < cfg.ps.len() {
                        averaged[t][j] += r.rate() / cfg.samples as f64;
                    } else {
                        probe.push(r.rate());
                    }
                    results.push(r);
                }
            }
            if !probe.windows(2).all(|w| w[1] < w[0]) {
                fifty = false;
            }
        }
        let curves: Vec<Curve> = tiles
            .iter()
            .zip(&averaged)
            .map(|(t, a)| Curve { size: t.layout.lx, points: cfg.ps.iter().copied().zip(a.iter().copied()).collect() })
            .collect();
        let threshold = threshold_estimate(&curves).ok();
        out.push(PhasePoint { pi_xz, pi_yz, results, threshold, fifty_percent: fifty, complete: true });
    }
    Ok(out)
}

/// Bias sweep row: a variant's threshold (or p_L at a fixed rate) next to the hashing bound.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BiasPoint {
    pub variant: String,
    pub eta: Bias,
    pub hashing: f64,
    pub threshold: Option<ThresholdEstimate>,
    pub results: Vec<TrialResult>,
}

#[allow(clippy::too_many_arguments)]
pub fn bias_sweep(
    variants: &[Variant],
    sizes: &[usize],
    etas: &[Bias],
    ps: &[f64],
    trials: usize,
    seed: u64,
    config: DecoderConfig,
) -> Result<Vec<BiasPoint>, Error> {
    let tiles: Vec<TileCode> = sizes.iter().map(|&l| crate::tilecode::build_open(l)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (vi, v) in variants.iter().enumerate() {
        let family: Vec<(usize, String, StabilizerCode)> = tiles
            .iter()
            .map(|t| v.build(t).map(|(_, c)| (t.layout.lx, v.name(), c)))
            .collect::<Result<_, _>>()?;
        for (ei, &eta) in etas.iter().enumerate() {
            let s = derive(seed, ((vi as u64) << 32) | ei as u64);
            let (results, curves) = p_sweep(&family, (0.0, 0.0), eta, ps, trials, s, config)?;
            let threshold = if curves.len() >= 2 && ps.len() >= 3 { threshold_estimate(&curves).ok() } else { None };
            out.push(BiasPoint { variant: v.name(), eta, hashing: hashing_bound(eta), threshold, results });
        }
    }
    Ok(out)
}
