//! Deterministic command-line front end over the solver crate: eight
//! subcommands that emit CSV or JSON artifacts (spectra, sweeps, potentials,
//! wavefunctions, photon populations, distribution fits).
//!
//! Exit codes: 0 success, 1 solver/runtime failure, 2 usage or config error.
//! Failures print a single `error: ...` line to stderr.

mod config;
mod output;

use clap::Parser;
use serde_json::{Map, Value};

use rabi_core::{
    classify_population, default_quadrature_order, effective_potential, gauss_hermite_rule,
    population_from_bo, population_from_ed, quartic_expansion, solve_bo, solve_bo_with, solve_ed,
    sweep_coupling, wavefunctions_on_grid, BOSpectrum, BoPopulationMode, Branch, Classification,
    FitOptions, FockBasisSpec, FockParity, ModelParams, PhotonPopulation, SolverChoice,
    TotalParity,
};

use config::{CommandKind, Common, Coupling, Format, Resolved, Solver, Source};
use output::{json_document, num, write_artifact, Cell, Table};

/// Usage errors exit 2, runtime errors exit 1; both print one line.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

impl From<rabi_core::Error> for CliError {
    fn from(e: rabi_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "rabi",
    version,
    about = "Quantum Rabi model: adiabatic two-step and exact diagonalization, \
             effective potentials, wavefunctions, photon statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Eigenvalues and parity labels at one coupling
    Spectrum(Common),
    /// Energies, parities, and photon numbers across a coupling grid
    Sweep(Common),
    /// Effective potentials and their quartic expansion on a position grid
    Potential(Common),
    /// Branch eigenstates on a position grid
    Wavefunction(Common),
    /// Photon population P(n) of one eigenstate
    Population(Common),
    /// Least-squares fits of P(n) against the three closed-form families
    Fit(Common),
    /// Energy levels as a function of basis size
    Convergence(Common),
    /// Level-by-level comparison of the two solvers at one coupling
    Compare(Common),
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kind, opts) = match &cli.command {
        Command::Spectrum(o) => (CommandKind::Spectrum, o),
        Command::Sweep(o) => (CommandKind::Sweep, o),
        Command::Potential(o) => (CommandKind::Potential, o),
        Command::Wavefunction(o) => (CommandKind::Wavefunction, o),
        Command::Population(o) => (CommandKind::Population, o),
        Command::Fit(o) => (CommandKind::Fit, o),
        Command::Convergence(o) => (CommandKind::Convergence, o),
        Command::Compare(o) => (CommandKind::Compare, o),
    };
    match config::resolve(kind, opts).and_then(|cfg| execute(&cfg)) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(cfg: &Resolved) -> Result<(), CliError> {
    let bytes = match cfg.command {
        CommandKind::Spectrum => render_table(cfg, spectrum_table(cfg)?)?,
        CommandKind::Sweep => render_table(cfg, sweep_table(cfg)?)?,
        CommandKind::Potential => render_table(cfg, potential_table(cfg)?)?,
        CommandKind::Wavefunction => render_table(cfg, wavefunction_table(cfg)?)?,
        CommandKind::Population => match cfg.fit {
            None => render_table(cfg, population_table(cfg)?)?,
            Some(subset) => population_fit_json(cfg, subset)?,
        },
        CommandKind::Fit => render_table(cfg, fit_table(cfg)?)?,
        CommandKind::Convergence => render_table(cfg, convergence_table(cfg)?)?,
        CommandKind::Compare => render_table(cfg, compare_table(cfg)?)?,
    };
    write_artifact(cfg.output.as_deref(), &bytes)
}

fn render_table(cfg: &Resolved, table: Table) -> Result<Vec<u8>, CliError> {
    match cfg.format {
        Format::Csv => Ok(table.to_csv()?.into_bytes()),
        Format::Json => json_document(meta(cfg)?, table.to_json()?),
    }
}

fn model_params(cfg: &Resolved) -> Result<ModelParams, CliError> {
    let (g, _) = cfg.coupling.scalar();
    Ok(ModelParams::new(cfg.delta, g)?)
}

/// Gauss-Hermite order actually used for basis size `n`.
fn effective_quad(cfg: &Resolved, n: usize) -> usize {
    cfg.quad_order.unwrap_or_else(|| default_quadrature_order(n))
}

fn solve_bo_cfg(
    cfg: &Resolved,
    params: &ModelParams,
    n: usize,
    levels: usize,
) -> Result<BOSpectrum, CliError> {
    match cfg.quad_order {
        None => Ok(solve_bo(params, cfg.branch, n, levels)?),
        Some(q) => {
            let rule = gauss_hermite_rule(q)?;
            Ok(solve_bo_with(params, cfg.branch, FockBasisSpec::new(n)?, &rule, levels)?)
        }
    }
}

fn fock_label(p: FockParity) -> &'static str {
    match p {
        FockParity::Even => "even",
        FockParity::Odd => "odd",
    }
}

fn total_label(p: TotalParity) -> &'static str {
    match p {
        TotalParity::Even => "even",
        TotalParity::Odd => "odd",
    }
}

fn branch_label(b: Branch) -> &'static str {
    match b {
        Branch::Minus => "minus",
        Branch::Plus => "plus",
    }
}

fn spectrum_table(cfg: &Resolved) -> Result<Table, CliError> {
    let params = model_params(cfg)?;
    let (n, k) = (cfg.n_max(), cfg.levels);
    let bo = cfg
        .solver
        .wants_bo()
        .then(|| solve_bo_cfg(cfg, &params, n, k))
        .transpose()?;
    let ed = cfg
        .solver
        .wants_ed()
        .then(|| solve_ed(&params, n, k))
        .transpose()?;

    let mut columns = vec!["index"];
    if bo.is_some() {
        columns.push("energy_bo");
    }
    if ed.is_some() {
        columns.push("energy_ed");
    }
    if bo.is_some() {
        columns.push("parity_bo");
    }
    if ed.is_some() {
        columns.push("parity_ed");
    }
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let mut row = vec![Cell::Int(i as i64)];
        if let Some(b) = &bo {
            row.push(Cell::Float(b.energies()[i]));
        }
        if let Some(e) = &ed {
            row.push(Cell::Float(e.energies()[i]));
        }
        if let Some(b) = &bo {
            row.push(Cell::Str(fock_label(b.fock_parity()[i])));
        }
        if let Some(e) = &ed {
            row.push(Cell::Str(total_label(e.parity()[i])));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

fn sweep_table(cfg: &Resolved) -> Result<Table, CliError> {
    let (gs, _) = cfg.coupling.grid();
    let choice = match cfg.solver {
        Solver::Bo => SolverChoice::Bo,
        Solver::Ed => SolverChoice::Ed,
        Solver::Both => SolverChoice::Both,
    };
    let points = sweep_coupling(cfg.delta, &gs, cfg.n_max(), cfg.levels, choice)?;

    let mut columns = vec!["g", "g_over_gc", "index"];
    if cfg.solver.wants_bo() {
        columns.extend(["energy_bo", "parity_bo", "photons_bo"]);
    }
    if cfg.solver.wants_ed() {
        columns.extend(["energy_ed", "parity_ed", "photons_ed"]);
    }
    let mut rows = Vec::with_capacity(points.len() * cfg.levels);
    for pt in &points {
        for i in 0..cfg.levels {
            let mut row = vec![Cell::Float(pt.g), Cell::Float(pt.g_over_gc), Cell::Int(i as i64)];
            if cfg.solver.wants_bo() {
                let b = pt.bo.as_ref().expect("BO column requested");
                row.push(Cell::Float(b.energies[i]));
                row.push(Cell::Str(fock_label(b.parity[i])));
                // Photon numbers cover the lowest min(K, 4) states only.
                row.push(match b.mean_photons.get(i) {
                    Some(&v) => Cell::Float(v),
                    None => Cell::Empty,
                });
            }
            if cfg.solver.wants_ed() {
                let e = pt.ed.as_ref().expect("ED column requested");
                row.push(Cell::Float(e.energies[i]));
                row.push(Cell::Str(total_label(e.parity[i])));
                row.push(match e.mean_photons.get(i) {
                    Some(&v) => Cell::Float(v),
                    None => Cell::Empty,
                });
            }
            rows.push(row);
        }
    }
    Ok(Table { columns, rows })
}

fn potential_table(cfg: &Resolved) -> Result<Table, CliError> {
    let params = model_params(cfg)?;
    let quartic = quartic_expansion(&params);
    let mut rows = Vec::with_capacity(cfg.grid_points);
    for xi in cfg.xi_grid() {
        rows.push(vec![
            Cell::Float(xi),
            Cell::Float(effective_potential(&params, Branch::Minus, xi)),
            Cell::Float(effective_potential(&params, Branch::Plus, xi)),
            Cell::Float(quartic.c0 + quartic.c2 * xi * xi + quartic.c4 * xi.powi(4)),
        ]);
    }
    Ok(Table {
        columns: vec!["xi", "v_minus", "v_plus", "v_quartic"],
        rows,
    })
}

fn wavefunction_table(cfg: &Resolved) -> Result<Table, CliError> {
    let params = model_params(cfg)?;
    let spec = solve_bo_cfg(cfg, &params, cfg.n_max(), cfg.levels)?;
    let grid = cfg.xi_grid();
    let wf = wavefunctions_on_grid(&spec, &grid)?;
    let mut rows = Vec::with_capacity(cfg.levels * grid.len());
    for s in 0..wf.n_states() {
        for (i, &xi) in grid.iter().enumerate() {
            let comp = &wf.components()[s][i];
            rows.push(vec![
                Cell::Float(xi),
                Cell::Int(s as i64),
                Cell::Float(wf.psi()[s][i]),
                Cell::Float(comp.up),
                Cell::Float(comp.down),
            ]);
        }
    }
    Ok(Table {
        columns: vec!["xi", "state", "psi", "phi_up", "phi_down"],
        rows,
    })
}

fn population_cfg(cfg: &Resolved) -> Result<PhotonPopulation, CliError> {
    let params = model_params(cfg)?;
    let n = cfg.n_max();
    match cfg.source {
        Source::Ed => Ok(population_from_ed(
            &solve_ed(&params, n, cfg.state + 1)?,
            cfg.state,
        )?),
        Source::Projected | Source::Coefficients => {
            let spec = solve_bo_cfg(cfg, &params, n, cfg.state + 1)?;
            let rule = gauss_hermite_rule(effective_quad(cfg, n))?;
            let mode = match cfg.source {
                Source::Projected => BoPopulationMode::Projected,
                _ => BoPopulationMode::Coefficients,
            };
            Ok(population_from_bo(&spec, cfg.state, mode, &rule)?)
        }
    }
}

fn population_table(cfg: &Resolved) -> Result<Table, CliError> {
    let pop = population_cfg(cfg)?;
    let mut rows = Vec::with_capacity(pop.p().len());
    for (n, &p) in pop.p().iter().enumerate() {
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Float(p),
            Cell::Str(if n % 2 == 0 { "even" } else { "odd" }),
        ]);
    }
    Ok(Table {
        columns: vec!["n", "p", "parity"],
        rows,
    })
}

fn classification_cfg(
    cfg: &Resolved,
    subset: rabi_core::FitSubset,
) -> Result<(PhotonPopulation, Classification), CliError> {
    let pop = population_cfg(cfg)?;
    let options = FitOptions {
        subset,
        pin_n0: cfg.pin_n0,
        floor: 1e-12,
    };
    let cls = classify_population(&pop, &options)?;
    Ok((pop, cls))
}

fn float_array(xs: &[f64]) -> Result<Value, CliError> {
    let mut vals = Vec::with_capacity(xs.len());
    for &x in xs {
        vals.push(num(x)?);
    }
    Ok(Value::from(vals))
}

fn population_fit_json(cfg: &Resolved, subset: rabi_core::FitSubset) -> Result<Vec<u8>, CliError> {
    let (pop, cls) = classification_cfg(cfg, subset)?;

    let mut popj = Map::new();
    popj.insert("source".into(), Value::from(pop.source().label()));
    popj.insert("p".into(), float_array(pop.p())?);
    popj.insert("even_part".into(), float_array(pop.even_part())?);
    popj.insert("odd_part".into(), float_array(pop.odd_part())?);
    popj.insert("mean_n".into(), num(pop.mean_n())?);
    popj.insert("norm_deficit".into(), num(pop.norm_deficit())?);

    let mut fits = Vec::new();
    for fit in cls.fits() {
        let mut f = Map::new();
        f.insert("family".into(), Value::from(fit.family.label()));
        f.insert("amplitude".into(), num(fit.amplitude)?);
        f.insert("scale".into(), num(fit.scale)?);
        f.insert("shift".into(), num(fit.shift)?);
        f.insert("rss".into(), num(fit.rss)?);
        f.insert("points_used".into(), Value::from(fit.points_used as u64));
        f.insert("selected".into(), Value::from(fit.family == cls.selected()));
        fits.push(Value::Object(f));
    }

    let mut data = Map::new();
    data.insert("population".into(), Value::Object(popj));
    data.insert("fits".into(), Value::from(fits));
    data.insert("selected".into(), Value::from(cls.selected().label()));
    json_document(meta(cfg)?, Value::Object(data))
}

fn fit_table(cfg: &Resolved) -> Result<Table, CliError> {
    let (_, cls) = classification_cfg(cfg, cfg.subset)?;
    let mut rows = Vec::with_capacity(3);
    for fit in cls.fits() {
        rows.push(vec![
            Cell::Str(fit.family.label()),
            Cell::Float(fit.amplitude),
            Cell::Float(fit.scale),
            Cell::Float(fit.shift),
            Cell::Float(fit.rss),
            Cell::Int(fit.points_used as i64),
            Cell::Bool(fit.family == cls.selected()),
        ]);
    }
    Ok(Table {
        columns: vec![
            "family",
            "amplitude",
            "scale",
            "shift",
            "rss",
            "points_used",
            "selected",
        ],
        rows,
    })
}

fn convergence_table(cfg: &Resolved) -> Result<Table, CliError> {
    let params = model_params(cfg)?;
    let k = cfg.levels;
    let mut columns = vec!["n_max", "level"];
    if cfg.solver.wants_bo() {
        columns.push("energy_bo");
    }
    if cfg.solver.wants_ed() {
        columns.push("energy_ed");
    }
    let mut rows = Vec::with_capacity(cfg.n_sizes.len() * k);
    for &n in &cfg.n_sizes {
        let bo = cfg
            .solver
            .wants_bo()
            .then(|| solve_bo_cfg(cfg, &params, n, k))
            .transpose()?;
        let ed = cfg
            .solver
            .wants_ed()
            .then(|| solve_ed(&params, n, k))
            .transpose()?;
        for level in 0..k {
            let mut row = vec![Cell::Int(n as i64), Cell::Int(level as i64)];
            if let Some(b) = &bo {
                row.push(Cell::Float(b.energies()[level]));
            }
            if let Some(e) = &ed {
                row.push(Cell::Float(e.energies()[level]));
            }
            rows.push(row);
        }
    }
    Ok(Table { columns, rows })
}

fn compare_table(cfg: &Resolved) -> Result<Table, CliError> {
    let params = model_params(cfg)?;
    let (n, k) = (cfg.n_max(), cfg.levels);
    let bo = solve_bo_cfg(cfg, &params, n, k)?;
    let ed = solve_ed(&params, n, k)?;
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let (eb, ee) = (bo.energies()[i], ed.energies()[i]);
        rows.push(vec![
            Cell::Int(i as i64),
            Cell::Float(eb),
            Cell::Float(ee),
            Cell::Float((eb - ee).abs()),
            Cell::Str(fock_label(bo.fock_parity()[i])),
            Cell::Str(total_label(ed.parity()[i])),
        ]);
    }
    Ok(Table {
        columns: vec![
            "index",
            "energy_bo",
            "energy_ed",
            "abs_diff",
            "parity_bo",
            "parity_ed",
        ],
        rows,
    })
}

/// `meta` section: command, fully resolved config, module versions.
fn meta(cfg: &Resolved) -> Result<Value, CliError> {
    let mut c = Map::new();
    c.insert("delta".into(), num(cfg.delta)?);
    match &cfg.coupling {
        Coupling::Scalar { g, ratio } => {
            c.insert("g".into(), num(*g)?);
            c.insert("g_over_gc".into(), num(*ratio)?);
        }
        Coupling::Grid { gs, ratios } => {
            c.insert("g_grid".into(), float_array(gs)?);
            c.insert("g_over_gc_grid".into(), float_array(ratios)?);
        }
    }
    c.insert("format".into(), Value::from(cfg.format.label()));
    if let Some(path) = &cfg.output {
        c.insert("output".into(), Value::from(path.display().to_string()));
    }

    let basis_keys = |c: &mut Map<String, Value>, n: usize| {
        c.insert("n_max".into(), Value::from(n as u64));
        c.insert("quad_order".into(), Value::from(effective_quad(cfg, n) as u64));
    };
    let grid_keys = |c: &mut Map<String, Value>| -> Result<(), CliError> {
        c.insert("xi_min".into(), num(cfg.xi_min)?);
        c.insert("xi_max".into(), num(cfg.xi_max)?);
        c.insert("grid_points".into(), Value::from(cfg.grid_points as u64));
        Ok(())
    };

    match cfg.command {
        CommandKind::Spectrum | CommandKind::Compare => {
            basis_keys(&mut c, cfg.n_max());
            c.insert("levels".into(), Value::from(cfg.levels as u64));
            c.insert("solver".into(), Value::from(cfg.solver.label()));
            if cfg.solver.wants_bo() {
                c.insert("branch".into(), Value::from(branch_label(cfg.branch)));
            }
        }
        CommandKind::Sweep => {
            let n = cfg.n_max();
            c.insert("n_max".into(), Value::from(n as u64));
            // Sweeps build their own shared rule at the default order.
            c.insert(
                "quad_order".into(),
                Value::from(default_quadrature_order(n) as u64),
            );
            c.insert("levels".into(), Value::from(cfg.levels as u64));
            c.insert("solver".into(), Value::from(cfg.solver.label()));
        }
        CommandKind::Potential => {
            grid_keys(&mut c)?;
        }
        CommandKind::Wavefunction => {
            basis_keys(&mut c, cfg.n_max());
            c.insert("levels".into(), Value::from(cfg.levels as u64));
            c.insert("branch".into(), Value::from(branch_label(cfg.branch)));
            grid_keys(&mut c)?;
        }
        CommandKind::Population | CommandKind::Fit => {
            basis_keys(&mut c, cfg.n_max());
            c.insert("state".into(), Value::from(cfg.state as u64));
            c.insert("source".into(), Value::from(cfg.source.label()));
            if cfg.source != Source::Ed {
                c.insert("branch".into(), Value::from(branch_label(cfg.branch)));
            }
            if cfg.command == CommandKind::Fit {
                c.insert("subset".into(), Value::from(config::subset_label(cfg.subset)));
                c.insert("pin_n0".into(), Value::from(cfg.pin_n0));
            } else if let Some(subset) = cfg.fit {
                c.insert("fit".into(), Value::from(config::subset_label(subset)));
                c.insert("pin_n0".into(), Value::from(cfg.pin_n0));
            }
        }
        CommandKind::Convergence => {
            let sizes: Vec<Value> = cfg.n_sizes.iter().map(|&n| Value::from(n as u64)).collect();
            c.insert("n_max_grid".into(), Value::from(sizes));
            if let Some(q) = cfg.quad_order {
                c.insert("quad_order".into(), Value::from(q as u64));
            }
            c.insert("levels".into(), Value::from(cfg.levels as u64));
            c.insert("solver".into(), Value::from(cfg.solver.label()));
            if cfg.solver.wants_bo() {
                c.insert("branch".into(), Value::from(branch_label(cfg.branch)));
            }
        }
    }

    let mut versions = Map::new();
    versions.insert("rabi-cli".into(), Value::from(env!("CARGO_PKG_VERSION")));
    versions.insert("rabi-core".into(), Value::from(rabi_core::VERSION));

    let mut m = Map::new();
    m.insert("command".into(), Value::from(cfg.command.label()));
    m.insert("config".into(), Value::Object(c));
    m.insert("versions".into(), Value::Object(versions));
    Ok(Value::Object(m))
}
