use crate::{CliError, Command, Status};
use cdtc::blo::{blo_basis, diagnostics, diagnostics_csv, minimize_weights, BloBasis};
use cdtc::bounds::certificates;
use cdtc::bposd::{BpMethod, DecoderConfig, OsdMethod};
use cdtc::capacity::*;
use cdtc::channel::{Bias, BiasedChannel};
use cdtc::circuit::*;
use cdtc::deform::{read_cell, ti_unitcell, write_map, DeformationMap, Variant};
use cdtc::effbias::*;
use cdtc::rng::derive;
use cdtc::tilecode::{build_open, build_periodic, distance_exact_upto, distance_upper, write_tilecode, TileCode};
use cdtc::weightred::{failure_rate, k_star};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::path::PathBuf;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| invalid("missing required key `seed`"))
}

fn read(path: &PathBuf, key: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("key `{key}`: {}: {e}", path.display())))
}

fn parse_bias(s: &str, key: &str) -> Result<Bias, CliError> {
    Bias::parse(s).map_err(|e| invalid(format!("key `{key}`: {e}")))
}

/// Lattice family, sizes and deformation shared by most commands.
#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CodeArgs {
    /// Open boundaries (the default).
    #[arg(long, conflicts_with = "periodic")]
    pub open: bool,
    /// Periodic boundaries.
    #[arg(long)]
    pub periodic: bool,
    /// Lattice size(s), comma separated.
    #[arg(long = "L", value_delimiter = ',', default_value = "6")]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    /// css, linear, xy, ti-middle or random.
    #[arg(long, default_value = "css")]
    pub variant: String,
    /// Π_XZ of a random deformation.
    #[arg(long, default_value_t = 0.0)]
    pub pi_xz: f64,
    /// Π_YZ of a random deformation.
    #[arg(long, default_value_t = 0.0)]
    pub pi_yz: f64,
}

impl CodeArgs {
    fn check(&self) -> Result<(), CliError> {
        if self.open && self.periodic {
            return Err(invalid("keys `open` and `periodic` are exclusive"));
        }
        if self.l.is_empty() {
            return Err(invalid("key `L` needs at least one size"));
        }
        Ok(())
    }

    fn single(&self) -> Result<usize, CliError> {
        self.check()?;
        match self.l[..] {
            [l] => Ok(l),
            _ => Err(invalid("key `L` takes a single size for this command")),
        }
    }

    fn tile(&self, l: usize) -> Result<TileCode, CliError> {
        let t = if self.periodic { build_periodic(l, l) } else { build_open(l) };
        t.map_err(|e| invalid(format!("key `L`: {e}")))
    }

    /// Random maps need a seed; each size gets its own stream.
    fn variant(&self, seed: Option<u64>, l: usize) -> Result<Variant, CliError> {
        if self.variant.trim().eq_ignore_ascii_case("random") {
            let seed = require_seed(seed)?;
            return Ok(Variant::Random { pi_xz: self.pi_xz, pi_yz: self.pi_yz, seed: derive(seed, l as u64) });
        }
        Variant::parse(&self.variant).map_err(|e| invalid(format!("key `variant`: {e}")))
    }

    fn build(&self, seed: Option<u64>, l: usize) -> Result<(TileCode, DeformationMap, Variant), CliError> {
        let tile = self.tile(l)?;
        let v = self.variant(seed, l)?;
        let map = v.map(&tile).map_err(|e| invalid(format!("key `variant`: {e}")))?;
        Ok((tile, map, v))
    }
}

/// Decoder flags; unset fields take the command's default and are filled in before echoing.
#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
pub struct DecoderArgs {
    /// product-sum or min-sum.
    #[arg(long)]
    pub bp: Option<String>,
    /// Min-sum scaling factor.
    #[arg(long)]
    pub ms_scale: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// osd0 or cs (combination sweep).
    #[arg(long)]
    pub osd: Option<String>,
    #[arg(long)]
    pub osd_single: Option<usize>,
    #[arg(long)]
    pub osd_pair: Option<usize>,
    /// Try every pattern when at most this many non-pivot bits remain.
    #[arg(long)]
    pub osd_exhaustive: Option<usize>,
}

impl DecoderArgs {
    fn resolve(&mut self, base: DecoderConfig) -> Result<(), CliError> {
        let cfg = self.config_over(base)?;
        let (bp, scale) = match cfg.bp {
            BpMethod::ProductSum => ("product-sum", self.ms_scale.unwrap_or(0.625)),
            BpMethod::MinSum { scale } => ("min-sum", scale),
        };
        let (osd, s, p, e) = match cfg.osd {
            OsdMethod::Osd0 => ("osd0", 0, 0, 0),
            OsdMethod::CombinationSweep { single, pair, exhaustive_free } => ("cs", single, pair, exhaustive_free),
        };
        *self = DecoderArgs {
            bp: Some(bp.into()),
            ms_scale: Some(scale),
            max_iter: Some(cfg.max_iter),
            osd: Some(osd.into()),
            osd_single: Some(s),
            osd_pair: Some(p),
            osd_exhaustive: Some(e),
        };
        Ok(())
    }

    fn config_over(&self, base: DecoderConfig) -> Result<DecoderConfig, CliError> {
        let base_scale = match base.bp {
            BpMethod::MinSum { scale } => scale,
            BpMethod::ProductSum => 0.625,
        };
        let scale = self.ms_scale.unwrap_or(base_scale);
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(invalid("key `ms_scale` must lie in (0, 1]"));
        }
        let bp = match self.bp.as_deref() {
            None => match base.bp {
                BpMethod::MinSum { .. } => BpMethod::MinSum { scale },
                b => b,
            },
            Some("product-sum") => BpMethod::ProductSum,
            Some("min-sum") => BpMethod::MinSum { scale },
            Some(b) => return Err(invalid(format!("key `bp`: unknown method {b}"))),
        };
        let (bs, bpair, be) = match base.osd {
            OsdMethod::CombinationSweep { single, pair, exhaustive_free } => (single, pair, exhaustive_free),
            OsdMethod::Osd0 => (60, 20, 12),
        };
        let sweep = OsdMethod::CombinationSweep {
            single: self.osd_single.unwrap_or(bs),
            pair: self.osd_pair.unwrap_or(bpair),
            exhaustive_free: self.osd_exhaustive.unwrap_or(be),
        };
        let osd = match self.osd.as_deref() {
            None if base.osd == OsdMethod::Osd0 => OsdMethod::Osd0,
            None | Some("cs") => sweep,
            Some("osd0") => OsdMethod::Osd0,
            Some(o) => return Err(invalid(format!("key `osd`: unknown method {o}"))),
        };
        let max_iter = self.max_iter.unwrap_or(base.max_iter);
        if max_iter == 0 {
            return Err(invalid("key `max_iter` must be positive"));
        }
        Ok(DecoderConfig { bp, max_iter, osd })
    }

    fn config(&self) -> DecoderConfig {
        self.config_over(DecoderConfig::default()).expect("resolved decoder flags are valid")
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct BuildCode {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Exhaustive distance search up to this weight (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub exact_upto: usize,
    /// Candidate budget for the exhaustive search.
    #[arg(long, default_value_t = 50_000_000)]
    pub exact_budget: u64,
    /// Randomized upper-bound search effort (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub effort: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for BuildCode {
    const NAME: &'static str = "build-code";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let l = self.code.single()?;
        let (tile, map, _) = self.code.build(self.seed, l)?;
        let code = cdtc::deform::apply(&tile.code, &map)?;
        let mut distance = None;
        let mut status = Status::Complete;
        if self.exact_upto > 0 {
            match distance_exact_upto(&code, self.exact_upto, self.exact_budget) {
                Ok(Some((d, _))) => distance = Some(format!("{d}")),
                Ok(None) => distance = Some(format!(">{}", self.exact_upto)),
                Err(cdtc::Error::Budget(m)) => {
                    writeln!(out, "# incomplete: exact search stopped: {m}").unwrap();
                    status = Status::Incomplete;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if self.effort > 0 && distance.as_deref().is_none_or(|d| d.starts_with('>')) {
            let (d, _) = distance_upper(&code, self.effort, self.seed.unwrap_or(0));
            distance = Some(match distance {
                Some(lower) => format!("{}..{d}", &lower[1..].parse::<usize>().unwrap() + 1),
                None => format!("<={d}"),
            });
        }
        match distance {
            Some(d) => writeln!(out, "# params [[{},{},{d}]]", code.n(), code.k()),
            None => writeln!(out, "# params [[{},{}]]", code.n(), code.k()),
        }
        .unwrap();
        out.push_str(&write_tilecode(&tile.layout, &code));
        Ok(status)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Deform {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Tile this unit-cell file over the lattice instead of using `variant`.
    #[arg(long)]
    pub cell: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for Deform {
    const NAME: &'static str = "deform";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let l = self.code.single()?;
        let map = match &self.cell {
            Some(path) => {
                let cell = read_cell(&read(path, "cell")?).map_err(|e| invalid(format!("key `cell`: {e}")))?;
                ti_unitcell(&self.code.tile(l)?.layout, &cell)?
            }
            None => self.code.build(self.seed, l)?.1,
        };
        out.push_str(&write_map(&map));
        Ok(Status::Complete)
    }
}

fn basis_for(code: &CodeArgs, seed: Option<u64>, l: usize, budget: u64, radius: f64) -> Result<(TileCode, BloBasis), CliError> {
    let (tile, map, _) = code.build(seed, l)?;
    let c = cdtc::deform::apply(&tile.code, &map)?;
    let mut basis = blo_basis(&c)?;
    if budget > 0 {
        basis = minimize_weights(&basis, Some(&tile.layout), radius, budget).basis;
    }
    Ok((tile, basis))
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Blo {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Weight-minimization budget per size (0 keeps the echelon basis).
    #[arg(long, default_value_t = 0)]
    pub minimize_budget: u64,
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for Blo {
    const NAME: &'static str = "blo";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        self.code.check()?;
        let family: Vec<(usize, BloBasis)> = self
            .code
            .l
            .iter()
            .map(|&l| basis_for(&self.code, self.seed, l, self.minimize_budget, self.radius).map(|(t, b)| (t.n(), b)))
            .collect::<Result<_, _>>()?;
        let d = diagnostics(&family);
        out.push_str(&diagnostics_csv(&d));
        if d.sizes.len() >= 2 {
            writeln!(out, "# fit |B_Z| = {} * n + {}", d.slope, d.intercept).unwrap();
        }
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Bounds {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Physical rate(s) for the certificates.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub p: Vec<f64>,
    /// Largest basis dimension whose span is enumerated.
    #[arg(long, default_value_t = 12)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 0)]
    pub minimize_budget: u64,
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for Bounds {
    const NAME: &'static str = "bounds";
    const JSON: bool = true;

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let l = self.code.single()?;
        let (tile, basis) = basis_for(&self.code, self.seed, l, self.minimize_budget, self.radius)?;
        let mut per_p = Vec::new();
        for &p in &self.p {
            let certs = certificates(&basis, p, self.max_dim).map_err(|e| invalid(format!("key `p`: {e}")))?;
            per_p.push(serde_json::json!({ "p": p, "certificates": certs }));
        }
        let doc = serde_json::json!({
            "n": tile.n(),
            "blo_size": basis.len(),
            "weights": basis.weights(),
            "bounds": per_p,
        });
        out.push_str(&doc.to_string());
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Capacity {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.15")]
    pub p: Vec<f64>,
    /// Bias η = p_Z/p_X, or inf.
    #[arg(long, default_value = "inf")]
    pub eta: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write a thresholds table here (needs two sizes and three rates).
    #[arg(long)]
    pub thresholds: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub decoder: DecoderArgs,
}

impl Command for Capacity {
    const NAME: &'static str = "capacity";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.decoder.resolve(DecoderConfig::default())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        self.code.check()?;
        let seed = require_seed(self.seed)?;
        let eta = parse_bias(&self.eta, "eta")?;
        let family: Vec<(usize, String, cdtc::tilecode::StabilizerCode)> = self
            .code
            .l
            .iter()
            .map(|&l| {
                let (tile, map, v) = self.code.build(Some(seed), l)?;
                Ok((l, v.name(), cdtc::deform::apply(&tile.code, &map)?))
            })
            .collect::<Result<_, CliError>>()?;
        let (results, curves) = p_sweep(&family, (self.code.pi_xz, self.code.pi_yz), eta, &self.p, self.trials, seed, self.decoder.config())?;
        writeln!(out, "{TRIALS_CSV_HEADER}").unwrap();
        for r in &results {
            writeln!(out, "{}", trials_csv_row(r)).unwrap();
        }
        if let Some(path) = &self.thresholds {
            let t = threshold_estimate(&curves).map_err(|e| invalid(format!("key `thresholds`: {e}")))?;
            let text = format!(
                "{}{THRESHOLDS_CSV_HEADER}\n{}\n",
                crate::config::header(Self::NAME, self),
                thresholds_csv_row(&family[0].1, eta, &t)
            );
            std::fs::write(path, text).map_err(|e| invalid(format!("key `thresholds`: {e}")))?;
        }
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct PhaseSweep {
    /// Periodic lattice sizes.
    #[arg(long = "L", value_delimiter = ',', default_value = "7,14")]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    /// Grid points as pi_xz:pi_yz; empty means a triangular grid with `steps` divisions.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 4)]
    pub steps: usize,
    /// Disorder samples per grid point.
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.35,0.4")]
    pub p: Vec<f64>,
    /// Rate at which decrease with size is tested.
    #[arg(long, default_value_t = 0.45)]
    pub probe_p: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of decodes.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub decoder: DecoderArgs,
}

impl PhaseSweep {
    fn points(&self) -> Result<Vec<(f64, f64)>, CliError> {
        if self.grid.is_empty() {
            if self.steps == 0 {
                return Err(invalid("key `steps` must be positive"));
            }
            let s = self.steps;
            return Ok((0..=s).flat_map(|i| (0..=s - i).map(move |j| (i as f64 / s as f64, j as f64 / s as f64))).collect());
        }
        self.grid
            .iter()
            .map(|g| {
                let (a, b) = g.split_once(':').ok_or_else(|| invalid(format!("key `grid`: expected pi_xz:pi_yz, got {g}")))?;
                let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| invalid(format!("key `grid`: bad number {t}")));
                Ok((parse(a)?, parse(b)?))
            })
            .collect()
    }
}

impl Command for PhaseSweep {
    const NAME: &'static str = "phase-sweep";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.decoder.resolve(DecoderConfig::default())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let cfg = PhaseSweepConfig {
            sizes: self.l.clone(),
            samples: self.samples,
            ps: self.p.clone(),
            probe_p: self.probe_p,
            trials: self.trials,
            seed: require_seed(self.seed)?,
            budget: self.budget,
            decoder: self.decoder.config(),
        };
        let points = phase_sweep(&self.points()?, &cfg)?;
        writeln!(out, "pi_xz,pi_yz,complete,p_th,spread,fifty_percent").unwrap();
        let mut complete = true;
        for pt in &points {
            complete &= pt.complete;
            let (p_th, spread) = match &pt.threshold {
                Some(t) => (t.p_th.map_or("none".into(), |v| format!("{v:.6}")), format!("{:.6}", t.spread)),
                None => ("none".into(), "none".into()),
            };
            writeln!(out, "{},{},{},{p_th},{spread},{}", pt.pi_xz, pt.pi_yz, pt.complete, pt.fifty_percent).unwrap();
        }
        if complete {
            Ok(Status::Complete)
        } else {
            writeln!(out, "# incomplete: budget exhausted").unwrap();
            Ok(Status::Incomplete)
        }
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct BiasSweep {
    #[arg(long, value_delimiter = ',', default_value = "css,linear")]
    pub variants: Vec<String>,
    /// Open lattice sizes.
    #[arg(long = "L", value_delimiter = ',', default_value = "6,8")]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,inf")]
    pub eta: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.15,0.2")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub decoder: DecoderArgs,
}

impl Command for BiasSweep {
    const NAME: &'static str = "bias-sweep";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.decoder.resolve(DecoderConfig::default())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let seed = require_seed(self.seed)?;
        let variants: Vec<Variant> = self
            .variants
            .iter()
            .map(|v| Variant::parse(v).map_err(|e| invalid(format!("key `variants`: {e}"))))
            .collect::<Result<_, _>>()?;
        let etas: Vec<Bias> = self.eta.iter().map(|e| parse_bias(e, "eta")).collect::<Result<_, _>>()?;
        let rows = bias_sweep(&variants, &self.l, &etas, &self.p, self.trials, seed, self.decoder.config())?;
        writeln!(out, "variant,eta,hashing,p_th,spread").unwrap();
        for r in &rows {
            let (p_th, spread) = match &r.threshold {
                Some(t) => (t.p_th.map_or("none".into(), |v| format!("{v:.6}")), format!("{:.6}", t.spread)),
                None => ("none".into(), "none".into()),
            };
            writeln!(out, "{},{},{:.6},{p_th},{spread}", r.variant, r.eta.label(), r.hashing).unwrap();
        }
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Weightred {
    /// Torus sizes; each must be 7 times an admissible prime.
    #[arg(long = "L", value_delimiter = ',', default_value = "35,77")]
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for Weightred {
    const NAME: &'static str = "weightred";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let seed = require_seed(self.seed)?;
        writeln!(out, "L,k_star,p,trials,failures,ci_lo,ci_hi").unwrap();
        for (i, &l) in self.l.iter().enumerate() {
            let k = k_star(l).map_err(|e| invalid(format!("key `L`: {e}")))?;
            for (j, &p) in self.p.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid(format!("key `p`: {p} is not a probability")));
                }
                let (f, t) = failure_rate(l, p, self.trials, derive(seed, ((i as u64) << 32) | j as u64))?;
                let (lo, hi) = wilson(f, t);
                writeln!(out, "{l},{k},{p},{t},{f},{lo:.6e},{hi:.6e}").unwrap();
            }
        }
        Ok(Status::Complete)
    }
}

/// Memory-experiment circuit parameters shared by circuit-build and circuit-run.
#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CircuitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0.001)]
    pub p_phys: f64,
    #[arg(long, default_value = "100")]
    pub eta: String,
    /// circuit, pheno or none.
    #[arg(long, default_value = "circuit")]
    pub noise: String,
}

impl CircuitArgs {
    fn build(&self, seed: Option<u64>) -> Result<(String, Circuit), CliError> {
        let l = self.code.single()?;
        let (tile, map, v) = self.code.build(seed, l)?;
        let ch = BiasedChannel::new(self.p_phys, parse_bias(&self.eta, "eta")?).map_err(|e| invalid(format!("key `p_phys`: {e}")))?;
        let noise = match self.noise.as_str() {
            "circuit" => NoiseModel::circuit_level(&ch),
            "pheno" => NoiseModel::phenomenological(&ch),
            "none" => NoiseModel::noiseless(),
            n => return Err(invalid(format!("key `noise`: unknown model {n}"))),
        };
        let c = build_memory(&tile, &map, self.rounds, &Schedule::default(), &noise).map_err(|e| invalid(format!("key `rounds`: {e}")))?;
        Ok((format!("L{l}-{}", v.name()), c))
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CircuitBuild {
    #[command(flatten)]
    #[serde(flatten)]
    pub circuit: CircuitArgs,
    /// Write the detector error model instead of the circuit.
    #[arg(long)]
    pub dem: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command for CircuitBuild {
    const NAME: &'static str = "circuit-build";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let (_, c) = self.circuit.build(self.seed)?;
        out.push_str(&if self.dem { write_dem(&build_dem(&c)) } else { write_circuit(&c) });
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct CircuitRun {
    /// Read this circuit file instead of building one.
    #[arg(long = "circuit")]
    #[serde(rename = "circuit")]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub decoder: DecoderArgs,
}

impl Command for CircuitRun {
    const NAME: &'static str = "circuit-run";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.decoder.resolve(DecoderConfig::circuit_level())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let seed = require_seed(self.seed)?;
        let (source, c) = match &self.file {
            Some(path) => {
                let c = read_circuit(&read(path, "circuit")?).map_err(|e| invalid(format!("key `circuit`: {e}")))?;
                (path.display().to_string(), c)
            }
            None => self.circuit.build(Some(seed))?,
        };
        if !determinism(&c).all() {
            return Err(invalid("circuit has nondeterministic detectors or observables"));
        }
        let dem = build_dem(&c);
        let samples = frame_sample(&c, self.shots, seed);
        let f = decode_circuit(&dem, &samples, self.decoder.config_over(DecoderConfig::circuit_level())?)?;
        let (lo, hi) = wilson(f, self.shots);
        writeln!(out, "source,detectors,mechanisms,shots,failures,ci_lo,ci_hi").unwrap();
        writeln!(out, "{source},{},{},{},{f},{lo:.6e},{hi:.6e}", dem.num_detectors, dem.mechanisms.len(), self.shots).unwrap();
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct ScheduleSearch {
    /// Open lattice size of the CSS code searched.
    #[arg(long = "L", default_value_t = 6)]
    #[serde(rename = "L")]
    pub l: usize,
    /// Fixed X-layer slot order.
    #[arg(long, value_delimiter = ',', default_value = "0,3,1,4,2,5")]
    pub x_order: Vec<usize>,
}

fn order_str(o: &[usize]) -> String {
    o.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

impl Command for ScheduleSearch {
    const NAME: &'static str = "schedule-search";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let x: [usize; 6] = self.x_order.clone().try_into().map_err(|_| invalid("key `x_order` needs six slots"))?;
        let mut sorted = x;
        sorted.sort_unstable();
        if sorted != [0, 1, 2, 3, 4, 5] {
            return Err(invalid("key `x_order` must be a permutation of 0..6"));
        }
        let tile = build_open(self.l).map_err(|e| invalid(format!("key `L`: {e}")))?;
        let found = schedule_search(&tile, x);
        writeln!(out, "# {} of 720 schedules are deterministic", found.len()).unwrap();
        writeln!(out, "x_order,z_order").unwrap();
        for s in &found {
            writeln!(out, "{},{}", order_str(&s.x_order), order_str(&s.z_order)).unwrap();
        }
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Effbias {
    /// Open lattice size.
    #[arg(long = "L", default_value_t = 6)]
    #[serde(rename = "L")]
    pub l: usize,
    #[arg(long, value_delimiter = ',', default_value = "css,linear,ti-middle")]
    pub variants: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "no-native,cx-native,cz-native")]
    pub strategies: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "no-phys-gate")]
    pub platforms: Vec<String>,
    /// Circuit-level rate of the idealized single-qubit channel.
    #[arg(long, default_value_t = 3e-4)]
    pub p_phys: f64,
    #[arg(long, default_value_t = 100.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gate channel table replacing the shipped one.
    #[arg(long)]
    pub channels: Option<PathBuf>,
}

struct EffRow {
    variant: Variant,
    strategy: Strategy,
    platform: Platform,
    p_eff: f64,
    eta_eff: Option<f64>,
}

impl Effbias {
    fn rows(&self) -> Result<Vec<EffRow>, CliError> {
        let seed = require_seed(self.seed)?;
        let table = match &self.channels {
            Some(path) => ChannelTable::parse(&read(path, "channels")?).map_err(|e| invalid(format!("key `channels`: {e}")))?,
            None => ChannelTable::default_table(),
        };
        let tile = build_open(self.l).map_err(|e| invalid(format!("key `L`: {e}")))?;
        let variants: Vec<Variant> = self
            .variants
            .iter()
            .map(|v| Variant::parse(v).map_err(|e| invalid(format!("key `variants`: {e}"))))
            .collect::<Result<_, _>>()?;
        let strategies: Vec<Strategy> = self
            .strategies
            .iter()
            .map(|s| Strategy::parse(s).map_err(|e| invalid(format!("key `strategies`: {e}"))))
            .collect::<Result<_, _>>()?;
        let platforms: Vec<Platform> = self
            .platforms
            .iter()
            .map(|s| Platform::parse(s).map_err(|e| invalid(format!("key `platforms`: {e}"))))
            .collect::<Result<_, _>>()?;
        let mut rows = Vec::new();
        for &variant in &variants {
            let map = variant.map(&tile).map_err(|e| invalid(format!("key `variants`: {e}")))?;
            let (nq, layers) = round_layers(&tile, &map, &Schedule::default())?;
            for &strategy in &strategies {
                let compiled = compile(&layers, strategy);
                for &platform in &platforms {
                    let cfg = PropagationConfig { p: self.p_phys, eta: self.eta, platform, samples: self.samples, seed };
                    let m = propagate_mc(nq, &compiled, &table, &cfg).map_err(|e| invalid(format!("key `p_phys`: {e}")))?;
                    let (p_eff, eta_eff) = eff_params(&m);
                    rows.push(EffRow { variant, strategy, platform, p_eff, eta_eff });
                }
            }
        }
        Ok(rows)
    }
}

fn eta_str(e: Option<f64>) -> String {
    e.map_or("inf".into(), |v| format!("{v:.4}"))
}

impl Command for Effbias {
    const NAME: &'static str = "effbias";

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        writeln!(out, "variant,strategy,platform,p_eff,eta_eff").unwrap();
        for r in self.rows()? {
            writeln!(out, "{},{},{},{:.6e},{}", r.variant.name(), r.strategy.name(), r.platform.name(), r.p_eff, eta_str(r.eta_eff)).unwrap();
        }
        Ok(Status::Complete)
    }
}

#[derive(Args, Serialize, Deserialize, Clone, Debug)]
pub struct Pheno {
    #[command(flatten)]
    #[serde(flatten)]
    pub eff: Effbias,
    #[arg(long, default_value_t = 6)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub decoder: DecoderArgs,
}

impl Command for Pheno {
    const NAME: &'static str = "pheno";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.decoder.resolve(DecoderConfig::circuit_level())
    }

    fn run(&self, out: &mut String) -> Result<Status, CliError> {
        let seed = require_seed(self.eff.seed)?;
        let tile = build_open(self.eff.l).map_err(|e| invalid(format!("key `L`: {e}")))?;
        let config = self.decoder.config_over(DecoderConfig::circuit_level())?;
        writeln!(out, "{RESULTS_CSV_HEADER}").unwrap();
        for (i, r) in self.eff.rows()?.into_iter().enumerate() {
            let map = r.variant.map(&tile)?;
            let eta = r.eta_eff.map_or(Bias::Infinite, Bias::Finite);
            let p_l = pheno_eval(&tile, &map, r.p_eff, eta, self.rounds, self.shots, derive(seed, i as u64), config)?;
            writeln!(
                out,
                "{},{},{},{:.6e},{},{:.6e}",
                r.variant.name(),
                r.strategy.name(),
                r.platform.name(),
                r.p_eff,
                eta_str(r.eta_eff),
                p_l
            )
            .unwrap();
        }
        Ok(Status::Complete)
    }
}
