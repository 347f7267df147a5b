//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::atoms::atomic_norm;
use crate::decompose::{decompose, DecomposeOptions};
use crate::error::{Error, Result};
use crate::func_repr::{Func, FunctionSpec};
use crate::functionals::global_condition_report;
use crate::maximal::{local_grand_maximal, Dictionary, EvalGrid, MaximalOptions, MaximalProfile};

mod verify;

pub use verify::{run_suite, Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_IN_H1: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DictionaryKind {
    Standard,
    Tent,
    Enriched,
}

/// Everything that shapes a run. Stored next to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Expected dimension of the input; None accepts any.
    pub dim: Option<usize>,
    /// Half-width of the region used by coverings and samplers.
    pub extent: f64,
    pub dictionary: DictionaryKind,
    /// Ratio of the geometric time grid of the maximal operator.
    pub ratio: f64,
    /// Evaluation points per local radius.
    pub grid: usize,
    /// Whitney parameter.
    pub delta: f64,
    /// Admissibility scale used by the checks.
    pub scale: f64,
    pub seed: u64,
    /// Not echoed into reports, so they do not depend on where they are written.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: None,
            extent: 4.0,
            dictionary: DictionaryKind::Standard,
            ratio: 2f64.powf(0.25),
            grid: 8,
            delta: 0.125,
            scale: 1.0,
            seed: 0,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if let Some(d) = self.dim {
            if !(1..=3).contains(&d) {
                return bad("--dim must be 1, 2 or 3");
            }
        }
        if !(self.extent > 0.0 && self.extent <= crate::measure::CLIP) {
            return bad("--extent must lie in (0, 40]");
        }
        if !(self.ratio > 1.0 && self.ratio <= 2.0) {
            return bad("--ratio must lie in (1, 2]");
        }
        if !(1..=256).contains(&self.grid) {
            return bad("--grid must lie in 1..=256");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("--delta must lie in (0, 1)");
        }
        if !(self.scale >= 1.0 && self.scale <= 16.0) {
            return bad("--scale must lie in [1, 16]");
        }
        Ok(())
    }

    fn dictionary(&self, dim: usize) -> Result<Dictionary> {
        match self.dictionary {
            DictionaryKind::Standard => Dictionary::standard(dim),
            DictionaryKind::Tent => Dictionary::tent_only(dim),
            DictionaryKind::Enriched => Dictionary::enriched(dim, 50),
        }
    }

    fn maximal_options(&self) -> MaximalOptions {
        MaximalOptions { ratio: self.ratio, ..MaximalOptions::default() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gauss-hardy", version, about = "Atomic Hardy space H1 for the Gauss measure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON file with a full run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reject inputs of any other dimension.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Half-width of the region used by coverings and samplers.
    #[arg(long, global = true)]
    pub extent: Option<f64>,
    /// Test-function dictionary of the maximal operator.
    #[arg(long, global = true, value_enum)]
    pub dictionary: Option<DictionaryKind>,
    /// Ratio of the geometric time grid, in (1, 2].
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    /// Evaluation points per local radius.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Whitney parameter.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Admissibility scale used by the checks.
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    /// Seed of the random corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; reports go to stdout without it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ‖f‖₁, ‖M̂_loc f‖₁, E, E₊ and divergence flags; profile CSV with --out.
    Norm { spec: PathBuf },
    /// Atomic decomposition with a summary block.
    Decompose { spec: PathBuf },
    /// Run a verification suite and write a JUnit-style report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Print the effective configuration.
    Config,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?
            }
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f.clone() { cfg.$f = v.into(); } )* };
        }
        take!(extent, dictionary, ratio, grid, delta, scale, seed);
        if self.dim.is_some() {
            cfg.dim = self.dim;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Output of one command: named files (written under --out, or printed)
/// and an exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub code: i32,
    pub message: Option<String>,
}

/// Key-sorted pretty JSON.
pub fn to_sorted_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn load_spec(path: &Path, cfg: &RunConfig) -> Result<Func> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let f = FunctionSpec::from_json(&text)?.resolve()?;
    if let Some(d) = cfg.dim {
        if d != f.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: f.dim() });
        }
    }
    Ok(f)
}

fn maximal_profile(f: &Func, cfg: &RunConfig) -> Result<MaximalProfile> {
    let Some(grid) = EvalGrid::for_local(f, cfg.grid)? else { return Ok(MaximalProfile::zero(f.dim())) };
    local_grand_maximal(f, &grid, &cfg.dictionary(f.dim())?, &cfg.maximal_options())
}

/// Norms and functionals of one function.
pub fn norm_report(f: &Func, cfg: &RunConfig) -> Result<(Value, MaximalProfile)> {
    let functionals = global_condition_report(f)?;
    let prof = maximal_profile(f, cfg)?;
    let report = json!({
        "dim": f.dim(),
        "l1_gauss": f.lp_norm_gauss(1.0),
        "maximal_l1_gauss": prof.l1_gauss(),
        "maximal_points": prof.points.len(),
        "e": functionals.e_value,
        "e_plus": functionals.e_plus_value,
        "flags": {
            "e_divergent": functionals.e_divergent(),
            "e_plus_divergent": functionals.e_plus_divergent(),
            "maximal_finite": prof.l1_gauss().is_finite(),
        },
        "truncations": {
            "e": functionals.e_diagnostics,
            "e_plus": functionals.e_plus_diagnostics,
        },
    });
    Ok((report, prof))
}

pub fn cmd_norm(spec: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let f = load_spec(spec, cfg)?;
    let (report, prof) = norm_report(&f, cfg)?;
    let report = json!({ "config": cfg, "report": report });
    Ok(Outcome {
        files: vec![("norm.json".into(), to_sorted_json(&report)), ("profile.csv".into(), prof.to_csv())],
        code: EXIT_OK,
        message: None,
    })
}

pub fn cmd_decompose(spec: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let f = load_spec(spec, cfg)?;
    let (d, stats) = decompose(&f, &DecomposeOptions::default())?;
    let norm = atomic_norm(&d)?;
    let per_axis = if f.dim() == 1 { 10_000 } else if f.dim() == 2 { 256 } else { 64 };
    let region = f.support().map(|s| clip_to(&s, &d.window));
    let recon = d.reconstruction_error(per_axis, region.as_ref());
    let (norms, _) = norm_report(&f, cfg)?;
    let maximal = norms["maximal_l1_gauss"].as_f64().unwrap_or(f64::NAN);
    let e = norms["e"].as_f64();
    let e_plus = norms["e_plus"].as_f64().unwrap_or(f64::NAN);
    let l1 = f.lp_norm_gauss(1.0);
    let numerator = maximal + e.unwrap_or(e_plus) + l1;
    let report = json!({
        "config": cfg,
        "atoms": d.records(),
        "stats": stats,
        "reconstruction": recon,
        "summary": {
            "coeff_sum": norm,
            "maximal_norm": maximal,
            "e": e,
            "e_plus": e_plus,
            "l1_gauss": l1,
            "ratios": {
                "sandwich": numerator / norm.max(f64::MIN_POSITIVE),
            },
        },
    });
    Ok(Outcome { files: vec![("decompose.json".into(), to_sorted_json(&report))], code: EXIT_OK, message: None })
}

fn clip_to(a: &crate::measure::AxisBox, w: &crate::measure::AxisBox) -> crate::measure::AxisBox {
    crate::measure::AxisBox {
        lo: a.lo.iter().zip(&w.lo).map(|(x, y)| x.max(*y)).collect(),
        hi: a.hi.iter().zip(&w.hi).map(|(x, y)| x.min(*y)).collect(),
    }
}

pub fn cmd_verify(suite: Suite, cfg: &RunConfig) -> Result<Outcome> {
    let report = run_suite(suite, cfg)?;
    let code = if report.failures() == 0 { EXIT_OK } else { EXIT_FAILURE };
    let name = suite.name();
    Ok(Outcome {
        files: vec![(format!("verify-{name}.xml"), report.to_junit()), (format!("verify-{name}.json"), to_sorted_json(&report))],
        code,
        message: Some(report.summary_line()),
    })
}

/// Parse, run and write outputs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match cli.run_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Norm { spec } => cmd_norm(spec, &cfg),
        Command::Decompose { spec } => cmd_decompose(spec, &cfg),
        Command::Verify { suite } => cmd_verify(*suite, &cfg),
        Command::Config => Ok(Outcome { files: vec![("config.json".into(), to_sorted_json(&cfg))], ..Outcome::default() }),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&out, cfg.out.as_deref()) {
                eprintln!("error: {e}");
                return EXIT_FAILURE;
            }
            if let Some(m) = &out.message {
                eprintln!("{m}");
            }
            out.code
        }
        Err(Error::NotInHardySpace(m)) => {
            eprintln!("not in H1(gamma) at this truncation: {m}");
            EXIT_NOT_IN_H1
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &Outcome, dir: Option<&Path>) -> std::io::Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, body) in &out.files {
                fs::write(dir.join(name), body)?;
            }
        }
        None => {
            // only the primary report goes to stdout
            if let Some((_, body)) = out.files.iter().find(|(n, _)| n.ends_with(".json")) {
                print!("{body}");
            }
        }
    }
    Ok(())
}
