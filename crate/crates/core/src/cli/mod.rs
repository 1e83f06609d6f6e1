//! Config-driven command runner behind the `matterwave` binary.
//!
//! A run config has a `[run]` section naming the command and output and a
//! `[params]` section with the command's inputs:
//!
//! ```text
//! [run]
//! command = slab-scan
//! output = fig1.csv
//!
//! [params]
//! re_n_lo = -3
//! re_n_hi = 3
//! re_n_step = 0.01
//! sigma = 0.95
//! c = 1.94
//! ```
//!
//! Exit status is 0 on success, 1 on a numerical or domain failure and 2 on
//! a configuration error.

pub mod config;
pub mod records;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{ConfigError, ConfigResult};
use config::{parse_document, Params, Quantity, UnitUse};

use crate::chain1d::{
    design_search, effective_incident_coefficients, negref_conditions, phi_between_coefficients, ChainSpec,
    DesignOptions, FreeParameter, ScattererRT, Slot,
};
use crate::foldy::{solve_exciting_fields, PlaneWave, ScattererSpec};
use crate::greens::{helmholtz_residual, GreenKind, WaveNumber};
use crate::negref::{
    default_far_field_grid, example1_report, example3d_report, extended_domain_integral, SignConvention,
};
use crate::packet::{inout_pair, synthesize, PacketSpec, SpectrumWeight};
use crate::quad::QuadOptions;
use crate::slab::{format_sig12, scan_transmittance, Grid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GreensEval,
    FoldySolve,
    NegrefCheck,
    ChainCheck,
    ChainDesign,
    SlabScan,
    PacketSynthesize,
}

impl Command {
    const ALL: [(Command, &'static str); 7] = [
        (Command::GreensEval, "greens-eval"),
        (Command::FoldySolve, "foldy-solve"),
        (Command::NegrefCheck, "negref-check"),
        (Command::ChainCheck, "chain-check"),
        (Command::ChainDesign, "chain-design"),
        (Command::SlabScan, "slab-scan"),
        (Command::PacketSynthesize, "packet-synthesize"),
    ];

    pub fn name(self) -> &'static str {
        Command::ALL.iter().find(|(c, _)| *c == self).map(|(_, n)| *n).unwrap_or("")
    }

    fn default_format(self) -> Format {
        match self {
            Command::SlabScan | Command::PacketSynthesize => Format::Csv,
            _ => Format::Json,
        }
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> ConfigResult<Self> {
        Command::ALL
            .iter()
            .find(|(_, n)| *n == s.trim())
            .map(|(c, _)| *c)
            .ok_or_else(|| ConfigError::InvalidValue {
                key: "command".into(),
                value: s.into(),
                reason: "unknown command".into(),
            })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NegrefScenario {
    Example1 {
        k: f64,
        g: Complex64,
        grid: Vec<f64>,
        sign: SignConvention,
    },
    Example3d {
        k: f64,
        f: Complex64,
    },
    Extended {
        k: f64,
        sigma: f64,
        f: Complex64,
        x_primes: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PacketMode {
    Evolve { t: f64 },
    InOut,
}

/// Fully validated command inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    GreensEval {
        kind: GreenKind,
        k: f64,
        point: [f64; 3],
        h: Option<f64>,
    },
    FoldySolve {
        scatterers: Vec<ScattererSpec>,
        k: f64,
        incident: PlaneWave,
    },
    NegrefCheck(NegrefScenario),
    ChainCheck(ChainSpec),
    ChainDesign {
        base: ChainSpec,
        free: Vec<FreeParameter>,
        options: DesignOptions,
    },
    SlabScan {
        grid: Grid,
        sigma: f64,
        c: f64,
    },
    PacketSynthesize {
        spec: PacketSpec,
        xs: Vec<f64>,
        mode: PacketMode,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: PathBuf,
    pub format: Format,
    pub seed: u64,
    pub job: Job,
}

fn bad(key: &str, value: impl fmt::Display, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.into(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn read_input(base_dir: &Path, raw: &str) -> ConfigResult<String> {
    let path = base_dir.join(raw);
    std::fs::read_to_string(&path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn nonzero(key: &str, k: f64) -> ConfigResult<f64> {
    WaveNumber::new(k).map(|w| w.value()).map_err(|e| bad(key, k, e.to_string()))
}

impl RunConfig {
    /// Parses a config. Relative input and output paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> ConfigResult<Self> {
        let sections = parse_document(text)?;
        let units = Rc::new(UnitUse::default());
        let mut run = None;
        let mut params = None;
        for s in &sections {
            match s.name.as_str() {
                "run" if run.is_none() => run = Some(Params::new(s, units.clone())),
                "params" if params.is_none() => params = Some(Params::new(s, units.clone())),
                "run" | "params" => {
                    return Err(ConfigError::Syntax {
                        line: s.line,
                        message: format!("section [{}] appears twice", s.name),
                    })
                }
                other => return Err(ConfigError::UnknownSection(other.to_string())),
            }
        }
        let run = run.ok_or_else(|| ConfigError::MissingKey {
            section: "run".into(),
            key: "command".into(),
        })?;
        let params = params.unwrap_or_else(|| Params::empty("params", units.clone()));

        let command: Command = run.require("command")?.parse()?;
        let output = base_dir.join(run.require("output")?);
        let format = match run.raw("format").map(str::trim) {
            None => command.default_format(),
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(bad("format", other, "expected csv or json")),
        };
        let seed = run.u64_or("seed", 0)?;
        run.finish()?;
        if format == Format::Csv && command.default_format() != Format::Csv {
            return Err(ConfigError::UnsupportedFormat {
                command: command.to_string(),
                format: "csv".into(),
            });
        }

        let job = parse_job(command, &params, seed, base_dir, &units)?;
        params.finish()?;
        Ok(RunConfig {
            command,
            output,
            format,
            seed,
            job,
        })
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir)
    }
}

fn parse_job(command: Command, p: &Params, seed: u64, base_dir: &Path, units: &Rc<UnitUse>) -> ConfigResult<Job> {
    Ok(match command {
        Command::GreensEval => {
            let raw = p.require("kind")?;
            let kind: GreenKind = raw.parse().map_err(|e: crate::Error| bad("kind", raw, e.to_string()))?;
            let k = nonzero("k", p.require_quantity("k", Quantity::WaveNumber)?)?;
            let point = [
                p.require_quantity("x", Quantity::Length)?,
                p.quantity_or("y", Quantity::Length, 0.0)?,
                p.quantity_or("z", Quantity::Length, 0.0)?,
            ];
            let h = p.quantity("h", Quantity::Length)?;
            if let Some(h) = h {
                if !(h > 0.0) {
                    return Err(bad("h", h, "step must be positive"));
                }
            }
            Job::GreensEval { kind, k, point, h }
        }
        Command::FoldySolve => {
            let scatterers = records::parse_scatterers(&read_input(base_dir, p.require("scatterers")?)?, units.clone())?;
            let k = nonzero("k", p.require_quantity("k", Quantity::WaveNumber)?)?;
            let direction = p.real_list("direction")?.unwrap_or_else(|| vec![1.0, 0.0, 0.0]);
            let direction: [f64; 3] = match direction.as_slice() {
                [x] => [*x, 0.0, 0.0],
                [x, y, z] => [*x, *y, *z],
                _ => return Err(bad("direction", format!("{direction:?}"), "expected 1 or 3 components")),
            };
            let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(bad("direction", format!("{direction:?}"), "must be nonzero"));
            }
            let amplitude = p.complex_or("amplitude", Complex64::new(1.0, 0.0))?;
            let incident = PlaneWave::new(direction.map(|d| d / norm * k)).scaled(amplitude);
            Job::FoldySolve { scatterers, k, incident }
        }
        Command::NegrefCheck => {
            let scenario = p.require("scenario")?;
            let k = nonzero("k", p.require_quantity("k", Quantity::WaveNumber)?)?;
            Job::NegrefCheck(match scenario.trim() {
                "example1" => {
                    let lo = p.quantity_or("x_lo", Quantity::Length, -10.0)?;
                    let hi = p.quantity_or("x_hi", Quantity::Length, 10.0)?;
                    let n = p.usize_or("points", 1000)?;
                    if n == 0 || !(hi >= lo) {
                        return Err(bad("points", n, "grid needs at least one point and x_lo <= x_hi"));
                    }
                    let sign = match p.raw("sign").map(str::trim).unwrap_or("either") {
                        "either" => SignConvention::Either,
                        "plus" => SignConvention::Plus,
                        "minus" => SignConvention::Minus,
                        other => return Err(bad("sign", other, "expected either, plus or minus")),
                    };
                    NegrefScenario::Example1 {
                        k,
                        g: p.complex_or("g", Complex64::new(1.0, 0.0))?,
                        grid: linspace(lo, hi, n),
                        sign,
                    }
                }
                "example3d" => NegrefScenario::Example3d {
                    k,
                    f: p.complex_or("f", Complex64::new(1.0, 0.0))?,
                },
                "extended" => {
                    let sigma = p.require_quantity("sigma", Quantity::Length)?;
                    if !(sigma > 0.0) {
                        return Err(bad("sigma", sigma, "must be positive"));
                    }
                    let lo = p.quantity_or("x_prime_lo", Quantity::Length, -2.0)?;
                    let hi = p.quantity_or("x_prime_hi", Quantity::Length, 2.0)?;
                    let n = p.usize_or("points", 50)?;
                    if n == 0 {
                        return Err(bad("points", n, "must be positive"));
                    }
                    NegrefScenario::Extended {
                        k,
                        sigma,
                        f: p.complex_or("f", Complex64::new(1.0, 0.0))?,
                        x_primes: linspace(lo, hi, n),
                    }
                }
                other => return Err(bad("scenario", other, "expected example1, example3d or extended")),
            })
        }
        Command::ChainCheck => Job::ChainCheck(records::parse_chain(
            &read_input(base_dir, p.require("chain")?)?,
            units.clone(),
        )?),
        Command::ChainDesign => {
            let base = match p.raw("chain") {
                Some(path) => records::parse_chain(&read_input(base_dir, path)?, units.clone())?,
                None => ChainSpec::new(vec![ScattererRT::default(); 3], vec![0.0, 1.0, 2.0], 1.0)
                    .expect("default chain is valid"),
            };
            let bound = p.real_or("bound", 1.0)?;
            if !(bound > 0.0) {
                return Err(bad("bound", bound, "must be positive"));
            }
            let free_raw = p.raw("free").unwrap_or("all");
            let slots: Vec<Slot> = if free_raw.trim() == "all" {
                Slot::ALL.to_vec()
            } else if free_raw.trim().is_empty() {
                Vec::new()
            } else {
                free_raw
                    .split(',')
                    .map(|s| Slot::parse(s).ok_or_else(|| bad("free", s.trim(), "unknown coefficient")))
                    .collect::<ConfigResult<_>>()?
            };
            let free = slots
                .into_iter()
                .map(|slot| FreeParameter {
                    slot,
                    re: (-bound, bound),
                    im: (-bound, bound),
                })
                .collect();
            let defaults = DesignOptions::default();
            let options = DesignOptions {
                tol: p.real_or("tol", defaults.tol)?,
                starts: p.usize_or("starts", defaults.starts)?,
                seed,
                max_iterations: p.usize_or("max_iterations", defaults.max_iterations)?,
                penalty_weight: p.real_or("penalty", defaults.penalty_weight)?,
                strict: p.bool_or("strict", defaults.strict)?,
            };
            if !(options.tol > 0.0) || !(options.penalty_weight >= 0.0) {
                return Err(bad("tol", options.tol, "tolerance must be positive, penalty non-negative"));
            }
            Job::ChainDesign { base, free, options }
        }
        Command::SlabScan => {
            let grid = Grid::new(
                p.real_or("re_n_lo", -3.0)?,
                p.real_or("re_n_hi", 3.0)?,
                p.real_or("re_n_step", 0.01)?,
            )
            .map_err(|e| bad("re_n_step", "", e.to_string()))?;
            let sigma = p.real_or("sigma", 0.95)?;
            let c = p.real_or("c", 1.94)?;
            if !(sigma >= 0.0) {
                return Err(bad("sigma", sigma, "must be non-negative"));
            }
            nonzero("c", c)?;
            Job::SlabScan { grid, sigma, c }
        }
        Command::PacketSynthesize => {
            let g = match p.raw("spectrum").map(str::trim).unwrap_or("gaussian") {
                "gaussian" => SpectrumWeight::Gaussian {
                    center: p.real_list("center")?.unwrap_or_else(|| vec![0.0]),
                    width: p.real_or("width", 1.0)?,
                    amplitude: p.complex_or("amplitude", Complex64::new(1.0, 0.0))?,
                },
                "point" => SpectrumWeight::PointMass {
                    k0: p.real_list("k0")?.ok_or_else(|| ConfigError::MissingKey {
                        section: "params".into(),
                        key: "k0".into(),
                    })?,
                    weight: p.complex_or("weight", Complex64::new(1.0, 0.0))?,
                },
                "sampled" => {
                    let rows = records::parse_samples(&read_input(base_dir, p.require("samples")?)?)?;
                    SpectrumWeight::sampled(rows).map_err(|e| bad("samples", "", e.to_string()))?
                }
                other => return Err(bad("spectrum", other, "expected gaussian, point or sampled")),
            };
            let dimension = match &g {
                SpectrumWeight::Gaussian { center, .. } => center.len(),
                SpectrumWeight::PointMass { k0, .. } => k0.len(),
                SpectrumWeight::Sampled { .. } => 1,
            };
            let mass = p.real_or("mass", 1.0)?;
            let spec = PacketSpec::with_mass(g, dimension, mass).map_err(|e| bad("spectrum", "", e.to_string()))?;
            let lo = p.real_or("x_lo", -10.0)?;
            let hi = p.real_or("x_hi", 10.0)?;
            let n = p.usize_or("points", 201)?;
            if n == 0 || !(hi >= lo) {
                return Err(bad("points", n, "grid needs at least one point and x_lo <= x_hi"));
            }
            let mode = match p.raw("mode").map(str::trim).unwrap_or("evolve") {
                "evolve" => PacketMode::Evolve { t: p.real_or("t", 0.0)? },
                "inout" => PacketMode::InOut,
                other => return Err(bad("mode", other, "expected evolve or inout")),
            };
            Job::PacketSynthesize {
                spec,
                xs: linspace(lo, hi, n),
                mode,
            }
        }
    })
}

/// Failure of a run, mapped onto the process exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Domain(#[from] crate::Error),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Domain(_) | RunError::Output { .. } => 1,
        }
    }
}

/// Produced files, as (path, contents) in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, String)>,
}

fn envelope(config: &RunConfig, result: Value) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": config.command.name(),
        "seed": config.seed,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn meta_path(output: &Path) -> PathBuf {
    output.with_extension("meta.json")
}

/// Runs the job and renders its artifacts without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Artifacts, RunError> {
    let out = config.output.clone();
    let json_only = |value: Value| Artifacts {
        files: vec![(out.clone(), envelope(config, value))],
    };
    Ok(match &config.job {
        Job::GreensEval { kind, k, point, h } => {
            let wk = WaveNumber::new(*k)?;
            let value = kind.eval(wk, *point)?;
            let residual = h.map(|h| helmholtz_residual(*kind, wk, *point, h)).transpose()?;
            json_only(json!({
                "kind": kind.to_string(),
                "k": k,
                "point": point,
                "value": complex_json(value),
                "helmholtz_residual": residual,
                "step": h,
            }))
        }
        Job::FoldySolve { scatterers, k, incident } => {
            let fields = solve_exciting_fields(scatterers, incident, WaveNumber::new(*k)?)?;
            json_only(json!({
                "k": k,
                "incident_k_vector": incident.k_vector,
                "scatterers": scatterers.len(),
                "condition": fields.condition,
                "xi": fields.xi.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            }))
        }
        Job::NegrefCheck(scenario) => json_only(match scenario {
            NegrefScenario::Example1 { k, g, grid, sign } => {
                let report = example1_report(WaveNumber::new(*k)?, *g, grid, *sign)?;
                json!({ "k": k, "g": complex_json(*g), "report": to_value(&report) })
            }
            NegrefScenario::Example3d { k, f } => {
                let wk = WaveNumber::new(*k)?;
                let grid = default_far_field_grid(wk);
                let (report, invalid) = example3d_report(wk, *f, &grid)?;
                json!({
                    "k": k,
                    "f": complex_json(*f),
                    "report": to_value(&report),
                    "paraxial_invalid_points": invalid,
                })
            }
            NegrefScenario::Extended { k, sigma, f, x_primes } => {
                let wk = WaveNumber::new(*k)?;
                let opts = QuadOptions::with_tolerances(1e-14, 1e-12);
                let rows = x_primes
                    .iter()
                    .map(|&x| extended_domain_integral(wk, *sigma, x, *f, &opts))
                    .collect::<crate::Result<Vec<_>>>()?;
                let ratios: Vec<Complex64> = rows.iter().map(|r| r.ratio).collect();
                let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
                let variation = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
                json!({
                    "k": k,
                    "sigma": sigma,
                    "f": complex_json(*f),
                    "mean_ratio": complex_json(mean),
                    "ratio_variation": variation,
                    "rows": x_primes.iter().zip(&rows).map(|(x, r)| json!({
                        "x_prime": x,
                        "numeric": complex_json(r.numeric),
                        "closed_form": complex_json(r.closed_form),
                        "ratio": complex_json(r.ratio),
                    })).collect::<Vec<_>>(),
                })
            }
        }),
        Job::ChainCheck(chain) => {
            let residuals = negref_conditions(chain)?;
            let phi = phi_between_coefficients(chain)?;
            let incident = effective_incident_coefficients(chain)?;
            json_only(json!({
                "k": chain.k,
                "residuals": to_value(&residuals),
                "phi_between": { "forward": complex_json(phi.forward), "backward": complex_json(phi.backward) },
                "effective_incident": {
                    "forward": complex_json(incident.forward),
                    "backward": complex_json(incident.backward),
                },
                "unitarity_deficits": chain.scatterers.iter().map(|s| to_value(&s.unitarity_deficit())).collect::<Vec<_>>(),
            }))
        }
        Job::ChainDesign { base, free, options } => {
            let report = design_search(base, free, options)?;
            json_only(json!({
                "free": free.iter().map(|p| p.slot.name()).collect::<Vec<_>>(),
                "tol": options.tol,
                "report": to_value(&report),
                "chain_record": records::write_chain(&report.chain),
            }))
        }
        Job::SlabScan { grid, sigma, c } => {
            let table = scan_transmittance(*grid, *sigma, *c)?;
            match config.format {
                Format::Csv => Artifacts {
                    files: vec![
                        (out.clone(), table.to_csv()),
                        (meta_path(&out), envelope(config, to_value(&table.metadata))),
                    ],
                },
                Format::Json => json_only(to_value(&table)),
            }
        }
        Job::PacketSynthesize { spec, xs, mode } => {
            let opts = QuadOptions::default();
            let point = |x: f64| {
                let mut r = vec![0.0; spec.dimension];
                r[0] = x;
                r
            };
            match mode {
                PacketMode::Evolve { t } => {
                    let rows = xs
                        .iter()
                        .map(|&x| synthesize(spec, &point(x), *t, &opts).map(|e| (x, e)))
                        .collect::<crate::Result<Vec<_>>>()?;
                    match config.format {
                        Format::Csv => {
                            let mut csv = String::from("x,re,im,error\n");
                            for (x, e) in &rows {
                                csv.push_str(&format!(
                                    "{},{},{},{}\n",
                                    format_sig12(*x),
                                    format_sig12(e.value.re),
                                    format_sig12(e.value.im),
                                    format_sig12(e.error)
                                ));
                            }
                            Artifacts {
                                files: vec![(out.clone(), csv)],
                            }
                        }
                        Format::Json => json_only(json!({
                            "t": t,
                            "rows": rows.iter().map(|(x, e)| json!({
                                "x": x, "psi": complex_json(e.value), "error": e.error,
                            })).collect::<Vec<_>>(),
                        })),
                    }
                }
                PacketMode::InOut => {
                    let rows = xs
                        .iter()
                        .map(|&x| inout_pair(spec, &point(x), &opts).map(|e| (x, e)))
                        .collect::<crate::Result<Vec<_>>>()?;
                    match config.format {
                        Format::Csv => {
                            let mut csv = String::from("x,in_re,in_im,out_re,out_im\n");
                            for (x, pair) in &rows {
                                csv.push_str(&format!(
                                    "{},{},{},{},{}\n",
                                    format_sig12(*x),
                                    format_sig12(pair.psi_in.re),
                                    format_sig12(pair.psi_in.im),
                                    format_sig12(pair.psi_out.re),
                                    format_sig12(pair.psi_out.im)
                                ));
                            }
                            Artifacts {
                                files: vec![(out.clone(), csv)],
                            }
                        }
                        Format::Json => json_only(json!({
                            "rows": rows.iter().map(|(x, p)| json!({
                                "x": x, "psi_in": complex_json(p.psi_in), "psi_out": complex_json(p.psi_out),
                            })).collect::<Vec<_>>(),
                        })),
                    }
                }
            }
        }
    })
}

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Runs a parsed config and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<Artifacts, RunError> {
    let artifacts = execute(config)?;
    for (path, contents) in &artifacts.files {
        write_atomic(path, contents).map_err(|e| RunError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(artifacts)
}

/// Loads, runs and reports; returns the process exit status.
pub fn run_path(path: &Path) -> i32 {
    let result = RunConfig::load(path).map_err(RunError::from).and_then(|c| run(&c));
    match result {
        Ok(artifacts) => {
            for (p, _) in &artifacts.files {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ConfigResult<RunConfig> {
        RunConfig::parse(text, Path::new("."))
    }

    #[test]
    fn slab_scan_config() {
        let cfg = parse("[run]\ncommand = slab-scan\noutput = out.csv\n[params]\nsigma = 0.95\nc = 1.94\n").unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.seed, 0);
        let art = execute(&cfg).unwrap();
        assert_eq!(art.files.len(), 2);
        assert_eq!(art.files[1].0, Path::new(".").join("out.meta.json"));
        assert_eq!(art.files[0].1.lines().count(), 602);
        assert!(art.files[1].1.contains("\"schema_version\": 1"));
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            parse("[run]\ncommand = nope\noutput = a\n"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            parse("[run]\ncommand = slab-scan\noutput = a\n[params]\nbogus = 1\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse("[run]\ncommand = slab-scan\noutput = a\ncolour = red\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse("[run]\ncommand = chain-check\noutput = a\nformat = csv\n[params]\nchain = x\n"),
            Err(ConfigError::UnsupportedFormat { .. })
        ));
        assert!(matches!(
            parse("[run]\ncommand = greens-eval\noutput = a\n[params]\nkind = 1d-outgoing\nk = 2 1/m\nx = 1\n"),
            Err(ConfigError::UnitMixing { .. })
        ));
        assert!(matches!(parse("[params]\nc = 1\n"), Err(ConfigError::MissingKey { .. })));
        assert!(matches!(
            parse("[run]\ncommand = slab-scan\noutput = a\n[extra]\n"),
            Err(ConfigError::UnknownSection(_))
        ));
    }

    #[test]
    fn greens_eval_in_si_units() {
        let cfg = parse(
            "[run]\ncommand = greens-eval\noutput = g.json\n[params]\nkind = 1d-outgoing\nk = 2 1/mm\nx = 0.5 mm\nh = 0.001 mm\n",
        )
        .unwrap();
        let Job::GreensEval { k, point, .. } = cfg.job else {
            panic!("wrong job")
        };
        assert!((k * point[0] - 1.0).abs() < 1e-12);
        let art = execute(&cfg).unwrap();
        let v: Value = serde_json::from_str(&art.files[0].1).unwrap();
        assert_eq!(v["result"]["kind"], "1d-outgoing");
        assert!(v["result"]["helmholtz_residual"].as_f64().unwrap() < 1e-3);
    }

    #[test]
    fn negref_example1_report() {
        let cfg = parse("[run]\ncommand = negref-check\noutput = n.json\n[params]\nscenario = example1\nk = 3\ng = 0.5-0.2i\n")
            .unwrap();
        let v: Value = serde_json::from_str(&execute(&cfg).unwrap().files[0].1).unwrap();
        assert!(v["result"]["report"]["max_residual"].as_f64().unwrap() < 1e-14);
        assert_eq!(v["result"]["report"]["grid_size"], 1000);
    }

    #[test]
    fn chain_design_default_chain() {
        let cfg = parse("[run]\ncommand = chain-design\noutput = d.json\nseed = 3\n[params]\nstarts = 8\n").unwrap();
        let v: Value = serde_json::from_str(&execute(&cfg).unwrap().files[0].1).unwrap();
        assert_eq!(v["seed"], 3);
        assert_eq!(v["result"]["report"]["status"], "solved");
    }

    #[test]
    fn domain_error_exit_code() {
        let cfg = parse("[run]\ncommand = greens-eval\noutput = g.json\n[params]\nkind = 3d-outgoing\nk = 1\nx = 0\n").unwrap();
        let err = execute(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
