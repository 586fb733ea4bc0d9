//! Option resolution: CLI flags override config-file keys, file keys
//! override defaults. Everything rejected here is a usage error (exit 2);
//! whatever passes is handed to the solvers fully typed and validated.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rabi_core::{critical_coupling, Branch, FitSubset, ModelParams};

use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flags shared by every subcommand; each is optional so the config file and
/// the defaults can fill the gaps. Flags not used by a given command are
/// ignored, which lets one config file drive several commands.
#[derive(Debug, clap::Args)]
pub struct Common {
    /// Level splitting of the two-level system (> 0, required)
    #[arg(long)]
    pub delta: Option<f64>,

    /// Coupling strength g; a scalar, or start:stop:count for sweep
    #[arg(long)]
    pub g: Option<String>,

    /// Coupling in units of the critical coupling; scalar or range
    #[arg(long = "g-over-gc")]
    pub g_over_gc: Option<String>,

    /// Fock basis size N (default 200); start:stop:count for convergence
    #[arg(long = "n-max")]
    pub n_max: Option<String>,

    /// Gauss-Hermite order Q (default max(201, 2N+1); must be >= 2N+1)
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,

    /// Number of levels K (default 10)
    #[arg(long)]
    pub levels: Option<usize>,

    /// Which solver(s) to run: bo | ed | both (default both)
    #[arg(long)]
    pub solver: Option<String>,

    /// Adiabatic branch: minus | plus (default minus)
    #[arg(long)]
    pub branch: Option<String>,

    /// Position-grid lower edge (default -8)
    #[arg(long = "xi-min", allow_hyphen_values = true)]
    pub xi_min: Option<f64>,

    /// Position-grid upper edge (default 8)
    #[arg(long = "xi-max", allow_hyphen_values = true)]
    pub xi_max: Option<f64>,

    /// Position-grid point count (default 801)
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,

    /// Eigenstate index for population/fit (default 0)
    #[arg(long)]
    pub state: Option<usize>,

    /// Population source: projected | coefficients | ed (default projected)
    #[arg(long)]
    pub source: Option<String>,

    /// Fock-index sublist for the fit command: all | even | odd (default all)
    #[arg(long)]
    pub subset: Option<String>,

    /// Pin the fitted shift n0 to 0
    #[arg(long = "pin-n0", num_args = 0..=1, default_missing_value = "true")]
    pub pin_n0: Option<bool>,

    /// Classify the population (population command): all | even | odd
    #[arg(long)]
    pub fit: Option<String>,

    /// Write the artifact here instead of stdout (atomic temp-file rename)
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Artifact format: csv | json (default csv)
    #[arg(long)]
    pub format: Option<String>,

    /// key = value config file; flags override file entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Sweep,
    Potential,
    Wavefunction,
    Population,
    Fit,
    Convergence,
    Compare,
}

impl CommandKind {
    pub fn label(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Sweep => "sweep",
            CommandKind::Potential => "potential",
            CommandKind::Wavefunction => "wavefunction",
            CommandKind::Population => "population",
            CommandKind::Fit => "fit",
            CommandKind::Convergence => "convergence",
            CommandKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Bo,
    Ed,
    Both,
}

impl Solver {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "bo" => Ok(Solver::Bo),
            "ed" => Ok(Solver::Ed),
            "both" => Ok(Solver::Both),
            _ => Err(usage(format!("solver: expected bo, ed, or both, got '{s}'"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Solver::Bo => "bo",
            Solver::Ed => "ed",
            Solver::Both => "both",
        }
    }

    pub fn wants_bo(self) -> bool {
        matches!(self, Solver::Bo | Solver::Both)
    }

    pub fn wants_ed(self) -> bool {
        matches!(self, Solver::Ed | Solver::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(usage(format!("format: expected csv or json, got '{s}'"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Projected,
    Coefficients,
    Ed,
}

impl Source {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "projected" => Ok(Source::Projected),
            "coefficients" => Ok(Source::Coefficients),
            "ed" => Ok(Source::Ed),
            _ => Err(usage(format!(
                "source: expected projected, coefficients, or ed, got '{s}'"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Source::Projected => "projected",
            Source::Coefficients => "coefficients",
            Source::Ed => "ed",
        }
    }
}

fn parse_branch(s: &str) -> Result<Branch, CliError> {
    match s {
        "minus" => Ok(Branch::Minus),
        "plus" => Ok(Branch::Plus),
        _ => Err(usage(format!("branch: expected minus or plus, got '{s}'"))),
    }
}

fn parse_subset(key: &str, s: &str) -> Result<FitSubset, CliError> {
    match s {
        "all" => Ok(FitSubset::All),
        "even" => Ok(FitSubset::Even),
        "odd" => Ok(FitSubset::Odd),
        _ => Err(usage(format!("{key}: expected all, even, or odd, got '{s}'"))),
    }
}

pub fn subset_label(s: FitSubset) -> &'static str {
    match s {
        FitSubset::All => "all",
        FitSubset::Even => "even",
        FitSubset::Odd => "odd",
    }
}

/// Scalar or `start:stop:count` range; ranges hold `count` evenly spaced
/// points with both endpoints exact.
#[derive(Debug, Clone, PartialEq)]
pub enum Span {
    Scalar(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl Span {
    fn parse(key: &str, s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if !s.contains(':') {
            return Ok(Span::Scalar(parse_f64(key, s)?));
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!("{key}: range must be start:stop:count, got '{s}'")));
        }
        let start = parse_f64(key, parts[0])?;
        let stop = parse_f64(key, parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| usage(format!("{key}: count must be an integer, got '{}'", parts[2])))?;
        if count < 2 {
            return Err(usage(format!("{key}: a range needs at least 2 points")));
        }
        if !(start < stop) {
            return Err(usage(format!("{key}: a range needs start < stop")));
        }
        Ok(Span::Range { start, stop, count })
    }

    fn values(&self) -> Vec<f64> {
        match *self {
            Span::Scalar(v) => vec![v],
            Span::Range { start, stop, count } => (0..count)
                .map(|i| {
                    if i + 1 == count {
                        stop
                    } else {
                        start + (stop - start) * i as f64 / (count - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Coupling resolved to absolute g and to units of g_c, in both directions.
#[derive(Debug, Clone)]
pub enum Coupling {
    Scalar { g: f64, ratio: f64 },
    Grid { gs: Vec<f64>, ratios: Vec<f64> },
}

impl Coupling {
    /// Single coupling of a non-sweep command (shape enforced by resolve).
    pub fn scalar(&self) -> (f64, f64) {
        match self {
            Coupling::Scalar { g, ratio } => (*g, *ratio),
            Coupling::Grid { .. } => unreachable!("resolve() rejects ranges here"),
        }
    }

    /// Grid view; a scalar is a one-point grid.
    pub fn grid(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Coupling::Scalar { g, ratio } => (vec![*g], vec![*ratio]),
            Coupling::Grid { gs, ratios } => (gs.clone(), ratios.clone()),
        }
    }
}

/// Fully resolved run configuration; every field is validated and defaulted.
#[derive(Debug)]
pub struct Resolved {
    pub command: CommandKind,
    pub delta: f64,
    pub coupling: Coupling,
    /// Basis sizes: one entry except for convergence.
    pub n_sizes: Vec<usize>,
    pub quad_order: Option<usize>,
    pub levels: usize,
    pub solver: Solver,
    pub branch: Branch,
    pub xi_min: f64,
    pub xi_max: f64,
    pub grid_points: usize,
    pub state: usize,
    pub source: Source,
    pub subset: FitSubset,
    pub pin_n0: bool,
    pub fit: Option<FitSubset>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Resolved {
    pub fn n_max(&self) -> usize {
        self.n_sizes[0]
    }

    pub fn xi_grid(&self) -> Vec<f64> {
        (0..self.grid_points)
            .map(|i| {
                if i + 1 == self.grid_points {
                    self.xi_max
                } else {
                    self.xi_min
                        + (self.xi_max - self.xi_min) * i as f64 / (self.grid_points - 1) as f64
                }
            })
            .collect()
    }
}

const KNOWN_KEYS: &[&str] = &[
    "delta",
    "g",
    "g-over-gc",
    "n-max",
    "quad-order",
    "levels",
    "solver",
    "branch",
    "xi-min",
    "xi-max",
    "grid-points",
    "state",
    "source",
    "subset",
    "pin-n0",
    "fit",
    "format",
    "output",
];

/// `key = value` lines; blank lines and `#` comments skipped; keys must be
/// known flag names and unique.
fn parse_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config file {} line {}: expected key = value",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(usage(format!(
                "config file {} line {}: unknown key '{key}'",
                path.display(),
                idx + 1
            )));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(usage(format!(
                "config file {} line {}: duplicate key '{key}'",
                path.display(),
                idx + 1
            )));
        }
    }
    Ok(map)
}

fn parse_f64(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: expected a number, got '{s}'")))
}

fn parse_usize(key: &str, s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: expected a nonnegative integer, got '{s}'")))
}

fn parse_bool(key: &str, s: &str) -> Result<bool, CliError> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got '{s}'"))),
    }
}

fn merged_f64(cli: Option<f64>, file: &HashMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|s| parse_f64(key, s)).transpose(),
    }
}

fn merged_usize(
    cli: Option<usize>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<usize>, CliError> {
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|s| parse_usize(key, s)).transpose(),
    }
}

fn merged_str(cli: &Option<String>, file: &HashMap<String, String>, key: &str) -> Option<String> {
    cli.clone().or_else(|| file.get(key).cloned())
}

fn coupling_from_span(key: &str, span: Span, gc: f64, is_g: bool) -> Result<Coupling, CliError> {
    let vals = span.values();
    if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(usage(format!("{key}: values must be finite and nonnegative")));
    }
    let (gs, ratios) = if is_g {
        (vals.clone(), vals.iter().map(|g| g / gc).collect())
    } else {
        (vals.iter().map(|r| r * gc).collect(), vals.clone())
    };
    Ok(match span {
        Span::Scalar(_) => Coupling::Scalar { g: gs[0], ratio: ratios[0] },
        Span::Range { .. } => Coupling::Grid { gs, ratios },
    })
}

/// Basis-size list: a scalar for most commands; convergence also accepts a
/// range whose points are rounded to strictly increasing integers.
fn resolve_n_sizes(
    command: CommandKind,
    spec: Option<String>,
) -> Result<Vec<usize>, CliError> {
    let default_scalar = 200usize;
    match command {
        CommandKind::Convergence => {
            let span = match spec {
                None => Span::Range { start: 50.0, stop: 250.0, count: 5 },
                Some(s) => Span::parse("n-max", &s)?,
            };
            let mut sizes = Vec::new();
            for v in span.values() {
                let n = v.round();
                if !(n >= 1.0) {
                    return Err(usage(format!("n-max: basis sizes must be >= 1, got {v}")));
                }
                sizes.push(n as usize);
            }
            if sizes.windows(2).any(|w| w[1] <= w[0]) {
                return Err(usage(
                    "n-max: range rounds to non-increasing basis sizes; use fewer points",
                ));
            }
            Ok(sizes)
        }
        _ => match spec {
            None => Ok(vec![default_scalar]),
            Some(s) => {
                if s.contains(':') {
                    return Err(usage(format!(
                        "{}: n-max must be a single integer, not a range",
                        command.label()
                    )));
                }
                let n = parse_usize("n-max", &s)?;
                if n < 1 {
                    return Err(usage("n-max: basis size must be >= 1"));
                }
                Ok(vec![n])
            }
        },
    }
}

/// Merge flags, file, and defaults into a validated [`Resolved`].
pub fn resolve(command: CommandKind, opts: &Common) -> Result<Resolved, CliError> {
    let file = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };

    let delta = merged_f64(opts.delta, &file, "delta")?
        .ok_or_else(|| usage("delta is required (flag --delta or config key 'delta')"))?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(usage(format!("delta must be finite and > 0, got {delta}")));
    }
    let gc = critical_coupling(&ModelParams::new(delta, 0.0).expect("delta validated"));

    // A coupling given on the command line suppresses both file keys, so a
    // file holding `g` can be overridden by `--g-over-gc` and vice versa.
    let cli_coupled = opts.g.is_some() || opts.g_over_gc.is_some();
    let (g_src, ratio_src) = if cli_coupled {
        (opts.g.clone(), opts.g_over_gc.clone())
    } else {
        (file.get("g").cloned(), file.get("g-over-gc").cloned())
    };
    let coupling = match (g_src, ratio_src) {
        (Some(_), Some(_)) => {
            return Err(usage("exactly one of g and g-over-gc may be given, got both"))
        }
        (None, None) => return Err(usage("one of g or g-over-gc is required")),
        (Some(s), None) => coupling_from_span("g", Span::parse("g", &s)?, gc, true)?,
        (None, Some(s)) => {
            coupling_from_span("g-over-gc", Span::parse("g-over-gc", &s)?, gc, false)?
        }
    };
    if command != CommandKind::Sweep {
        if let Coupling::Grid { .. } = coupling {
            return Err(usage(format!(
                "{}: coupling must be a single value, not a range",
                command.label()
            )));
        }
    }

    let n_sizes = resolve_n_sizes(command, merged_str(&opts.n_max, &file, "n-max"))?;

    let quad_order = merged_usize(opts.quad_order, &file, "quad-order")?;
    if let Some(q) = quad_order {
        let need = 2 * n_sizes.iter().max().unwrap() + 1;
        if q < need {
            return Err(usage(format!("quad-order must be >= 2N+1 = {need}, got {q}")));
        }
    }

    let levels = merged_usize(opts.levels, &file, "levels")?.unwrap_or(10);
    if levels < 1 {
        return Err(usage("levels must be >= 1"));
    }

    let solver_src = merged_str(&opts.solver, &file, "solver");
    let solver = match &solver_src {
        Some(s) => Solver::parse(s)?,
        None => Solver::Both,
    };
    if command == CommandKind::Compare && solver != Solver::Both {
        return Err(usage("compare runs both solvers; omit --solver or pass 'both'"));
    }

    let branch = match merged_str(&opts.branch, &file, "branch") {
        Some(s) => parse_branch(&s)?,
        None => Branch::Minus,
    };

    let xi_min = merged_f64(opts.xi_min, &file, "xi-min")?.unwrap_or(-8.0);
    let xi_max = merged_f64(opts.xi_max, &file, "xi-max")?.unwrap_or(8.0);
    if !xi_min.is_finite() || !xi_max.is_finite() || !(xi_min < xi_max) {
        return Err(usage(format!("xi grid needs xi-min < xi-max, got [{xi_min}, {xi_max}]")));
    }
    let grid_points = merged_usize(opts.grid_points, &file, "grid-points")?.unwrap_or(801);
    if grid_points < 2 {
        return Err(usage("grid-points must be >= 2"));
    }

    let state = merged_usize(opts.state, &file, "state")?.unwrap_or(0);

    let source = match merged_str(&opts.source, &file, "source") {
        Some(s) => Source::parse(&s)?,
        None => Source::Projected,
    };

    let subset = match merged_str(&opts.subset, &file, "subset") {
        Some(s) => parse_subset("subset", &s)?,
        None => FitSubset::All,
    };

    let pin_n0 = match opts.pin_n0 {
        Some(v) => v,
        None => match file.get("pin-n0") {
            Some(s) => parse_bool("pin-n0", s)?,
            None => false,
        },
    };

    let fit = merged_str(&opts.fit, &file, "fit")
        .map(|s| parse_subset("fit", &s))
        .transpose()?;

    let format_src = merged_str(&opts.format, &file, "format");
    let format = match &format_src {
        Some(s) => Format::parse(s)?,
        None => Format::Csv,
    };
    let format = if command == CommandKind::Population && fit.is_some() {
        match format_src.as_deref() {
            // The fit records do not fit the flat population schema, so the
            // fitted population artifact is JSON.
            None => Format::Json,
            Some("json") => Format::Json,
            Some(_) => {
                return Err(usage(
                    "population --fit emits structured JSON; use --format json or omit --format",
                ))
            }
        }
    } else {
        format
    };

    let output = opts
        .output
        .clone()
        .or_else(|| file.get("output").map(PathBuf::from));

    Ok(Resolved {
        command,
        delta,
        coupling,
        n_sizes,
        quad_order,
        levels,
        solver,
        branch,
        xi_min,
        xi_max,
        grid_points,
        state,
        source,
        subset,
        pin_n0,
        fit,
        format,
        output,
    })
}
