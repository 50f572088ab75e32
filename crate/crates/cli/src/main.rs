use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;

use sepkit::criteria::{self, Alpha, Config, CRITERION_NAMES};
use sepkit::experiment::{joint_probabilities, mean_from_probs, shot_sample, ReflectionSet};
use sepkit::maps::{AntisymmetricUnitary, UKind};
use sepkit::matrix::{DimSpec, MatrixJson};
use sepkit::scan::{
    emit_csv, emit_svg, run_scan, AxisSpec, CriterionSpec, Family, ReversalChoice, ScanSpec,
};
use sepkit::states::{random_density, DensityMatrix, Side, StateJson};
use sepkit::witness::{
    build_witness, entropic_tableau, evaluate_witness, fact1_tableau, fact3_tableau,
    fact4_tableau, oddcut_tableau, operator_power_tableau, quadratic_tableau, tableau_scalar,
    MapTableau,
};

#[derive(Parser)]
#[command(
    name = "sepkit",
    version,
    about = "Separability criteria, region scans, multi-copy witnesses, and two-copy simulations"
)]
struct Cli {
    /// Margin tolerance: a criterion counts as satisfied when margin >= -tol.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Named reversal pattern: canonical or spin_flip (default depends on the family).
    #[arg(long, global = true)]
    u: Option<String>,
    /// JSON complex matrix {re,im} to use as the reversal unitary instead.
    #[arg(long, global = true)]
    u_file: Option<PathBuf>,
    /// Seed for random sampling (witness verification, shot noise).
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads for scans; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the main artifact (JSON lines / CSV / witness JSON) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate criteria on one state; prints one JSON report per line.
    ///
    /// Exits 3 when any requested criterion is violated.
    Check {
        /// State family: bell_diagonal, bell_mixture, divincenzo, so3_4x4.
        #[arg(long, conflicts_with = "state")]
        family: Option<String>,
        /// Family parameters, comma separated, in the family's canonical order.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        /// Density matrix JSON file (dims, re, im) instead of a family point.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Criteria as name[:alpha[:side]], comma separated, e.g. ppt,fact3:5,quadratic::A.
        #[arg(long, value_delimiter = ',', required = true)]
        criteria: Vec<String>,
    },
    /// Sweep a family over a parameter grid; emits CSV and optionally an SVG heatmap.
    Scan {
        /// Scan spec JSON file; --u/--u-file override its reversal choice.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// State family (flag route, when no --spec is given).
        #[arg(long)]
        family: Option<String>,
        /// Pinned parameters as name=value, comma separated.
        #[arg(long, value_delimiter = ',')]
        fixed: Vec<String>,
        /// Swept axes as name=min:max:steps, comma separated.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<String>,
        /// Criteria as name[:alpha[:side]], comma separated.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<String>,
        /// Also write an SVG heatmap here (needs exactly two grid axes).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Criterion label to plot; defaults to the first criterion.
        #[arg(long)]
        svg_label: Option<String>,
    },
    /// Build a multi-copy witness from a criterion's map tableau, verify it on
    /// random states, and optionally export it as JSON.
    Witness {
        /// One of: fact1, fact3, fact4, entropic, quadratic, oddcut, operator_power.
        #[arg(long)]
        criterion: String,
        /// Copy count (the polynomial order); fact4 needs 4k+1, quadratic is 2.
        #[arg(long)]
        alpha: Option<usize>,
        /// Bipartite dimensions as d1xd2, e.g. 2x2 or 4x4.
        #[arg(long)]
        dims: String,
        /// Marginal side (reversed side for quadratic): A or B.
        #[arg(long)]
        side: Option<String>,
        /// How many random states to check witness/scalar agreement on.
        #[arg(long, default_value_t = 20)]
        verify: usize,
    },
    /// Joint two-copy outcome distribution for an n-qubit state, plus the
    /// reflected-swap mean for the chosen qubit set.
    Simulate {
        /// Density matrix JSON file; every factor must be a qubit.
        #[arg(long)]
        state: PathBuf,
        /// 1-based qubit positions measured against the reflected projector pair.
        #[arg(long, value_delimiter = ',')]
        reflect: Vec<usize>,
        /// Expected qubit count; validated against the state when given.
        #[arg(long)]
        n: Option<usize>,
        /// Resample the distribution with this many shots before reporting.
        #[arg(long)]
        shots: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<sepkit::Error> for Failure {
    fn from(e: sepkit::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(), // clap: usage errors exit 2, help/version exit 0
    };
    if let Some(t) = cli.threads {
        // first initialization wins; repeated calls only matter in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            std::process::exit(2);
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            std::process::exit(1);
        }
    }
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    let cfg = Config {
        tol: cli.tol,
        ..Config::default()
    };
    match &cli.cmd {
        Cmd::Check {
            family,
            params,
            state,
            criteria,
        } => check(cli, &cfg, family.as_deref(), params, state.as_deref(), criteria),
        Cmd::Scan {
            spec,
            family,
            fixed,
            grid,
            criteria,
            svg,
            svg_label,
        } => scan(
            cli,
            &cfg,
            spec.as_deref(),
            family.as_deref(),
            fixed,
            grid,
            criteria,
            svg.as_deref(),
            svg_label.as_deref(),
        ),
        Cmd::Witness {
            criterion,
            alpha,
            dims,
            side,
            verify,
        } => witness(cli, criterion, *alpha, dims, side.as_deref(), *verify),
        Cmd::Simulate {
            state,
            reflect,
            n,
            shots,
        } => simulate(cli, state, reflect, *n, *shots),
    }
}

/// Parse one `name[:alpha[:side]]` criterion entry.
fn parse_criterion(entry: &str) -> Result<CriterionSpec, Failure> {
    let parts: Vec<&str> = entry.split(':').collect();
    if parts.len() > 3 || parts[0].is_empty() {
        return Err(usage(format!(
            "bad criterion entry {entry:?}; expected name[:alpha[:side]]"
        )));
    }
    let name = parts[0].to_string();
    if !CRITERION_NAMES.contains(&name.as_str()) {
        return Err(usage(format!(
            "unknown criterion {name:?}; known: {}",
            CRITERION_NAMES.join(", ")
        )));
    }
    let alpha = match parts.get(1) {
        Some(s) if !s.is_empty() => Some(
            Alpha::from_str(s).map_err(|e| usage(format!("bad alpha in {entry:?}: {e}")))?,
        ),
        _ => None,
    };
    let side = match parts.get(2) {
        Some(s) if !s.is_empty() => {
            Side::from_str(s).map_err(|e| usage(format!("bad side in {entry:?}: {e}")))?;
            Some(s.to_string())
        }
        _ => None,
    };
    Ok(CriterionSpec {
        name,
        alpha,
        side,
        label: None,
    })
}

fn load_state(path: &std::path::Path) -> Result<DensityMatrix, Failure> {
    let text = std::fs::read_to_string(path)?;
    let j: StateJson = serde_json::from_str(&text)?;
    Ok(DensityMatrix::from_json(&j)?)
}

/// Reversal choice from the global flags, else the given fallback pattern.
fn resolve_u(cli: &Cli, fallback: UKind) -> Result<ReversalChoice, Failure> {
    if let Some(path) = &cli.u_file {
        let text = std::fs::read_to_string(path)?;
        let mj: MatrixJson = serde_json::from_str(&text)?;
        return Ok(ReversalChoice::Custom(AntisymmetricUnitary::new(
            mj.to_matrix()?,
        )?));
    }
    let kind = match &cli.u {
        Some(s) => UKind::from_str(s).map_err(|e| usage(e.to_string()))?,
        None => fallback,
    };
    Ok(ReversalChoice::Kind(kind))
}

fn write_artifact(cli: &Cli, content: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn check(
    cli: &Cli,
    cfg: &Config,
    family: Option<&str>,
    params: &[f64],
    state: Option<&std::path::Path>,
    criteria: &[String],
) -> Result<i32, Failure> {
    let specs: Vec<CriterionSpec> = criteria
        .iter()
        .map(|e| parse_criterion(e))
        .collect::<Result<_, _>>()?;
    let (rho, fallback_u) = match (family, state) {
        (Some(f), None) => {
            let fam = Family::from_str(f).map_err(|e| usage(e.to_string()))?;
            if params.len() != fam.param_names().len() {
                return Err(usage(format!(
                    "{fam} takes parameters {:?}, got {} values",
                    fam.param_names(),
                    params.len()
                )));
            }
            (fam.build(params)?, fam.default_u())
        }
        (None, Some(path)) => {
            if !params.is_empty() {
                return Err(usage("--params only applies with --family"));
            }
            (load_state(path)?, UKind::Canonical)
        }
        _ => return Err(usage("give exactly one of --family or --state")),
    };
    let u = resolve_u(cli, fallback_u)?;
    let mut lines = String::new();
    let mut any_violated = false;
    for spec in &specs {
        let side = spec
            .side
            .as_deref()
            .map(Side::from_str)
            .transpose()
            .map_err(|e| usage(e.to_string()))?;
        let report = match &u {
            ReversalChoice::Kind(k) => {
                criteria::evaluate(&rho, &spec.name, spec.alpha, side, *k, cfg)?
            }
            ReversalChoice::Custom(cu) => {
                criteria::evaluate_with_u(&rho, &spec.name, spec.alpha, side, cu, cfg)?
            }
        };
        any_violated |= !report.satisfied;
        lines.push_str(&serde_json::to_string(&report)?);
        lines.push('\n');
    }
    write_artifact(cli, &lines)?;
    Ok(if any_violated { 3 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn scan(
    cli: &Cli,
    cfg: &Config,
    spec_path: Option<&std::path::Path>,
    family: Option<&str>,
    fixed: &[String],
    grid: &[String],
    criteria: &[String],
    svg: Option<&std::path::Path>,
    svg_label: Option<&str>,
) -> Result<i32, Failure> {
    let mut spec = match spec_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            ScanSpec::from_json(&text)?
        }
        None => {
            let fam = family.ok_or_else(|| usage("give --spec or --family"))?;
            let fam = Family::from_str(fam).map_err(|e| usage(e.to_string()))?;
            let mut fixed_map = BTreeMap::new();
            for entry in fixed {
                let (k, v) = entry
                    .split_once('=')
                    .ok_or_else(|| usage(format!("bad --fixed entry {entry:?}, want name=value")))?;
                let v: f64 = v
                    .parse()
                    .map_err(|_| usage(format!("bad value in --fixed entry {entry:?}")))?;
                fixed_map.insert(k.to_string(), v);
            }
            let mut axes = Vec::new();
            for entry in grid {
                let (name, rest) = entry.split_once('=').ok_or_else(|| {
                    usage(format!("bad --grid entry {entry:?}, want name=min:max:steps"))
                })?;
                let parts: Vec<&str> = rest.split(':').collect();
                let [min, max, steps] = parts.as_slice() else {
                    return Err(usage(format!(
                        "bad --grid entry {entry:?}, want name=min:max:steps"
                    )));
                };
                axes.push(AxisSpec {
                    name: name.to_string(),
                    min: min
                        .parse()
                        .map_err(|_| usage(format!("bad min in --grid entry {entry:?}")))?,
                    max: max
                        .parse()
                        .map_err(|_| usage(format!("bad max in --grid entry {entry:?}")))?,
                    steps: steps
                        .parse()
                        .map_err(|_| usage(format!("bad steps in --grid entry {entry:?}")))?,
                });
            }
            ScanSpec {
                family: fam,
                fixed: fixed_map,
                grid: axes,
                criteria: Vec::new(),
                u: None,
                u_file: None,
            }
        }
    };
    if !criteria.is_empty() {
        spec.criteria = criteria
            .iter()
            .map(|e| parse_criterion(e))
            .collect::<Result<_, _>>()?;
    }
    // global flags override the spec's reversal choice
    if let Some(path) = &cli.u_file {
        spec.u = None;
        spec.u_file = Some(path.to_string_lossy().into_owned());
    } else if let Some(u) = &cli.u {
        UKind::from_str(u).map_err(|e| usage(e.to_string()))?;
        spec.u = Some(u.clone());
        spec.u_file = None;
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let scan = run_scan(&spec, cfg)?;
    write_artifact(cli, &emit_csv(&scan))?;
    if let Some(svg_path) = svg {
        let label = match svg_label {
            Some(l) => l.to_string(),
            None => spec
                .criteria
                .first()
                .map(|c| c.label())
                .ok_or_else(|| usage("--svg needs at least one criterion"))?,
        };
        std::fs::write(svg_path, emit_svg(&scan, &label)?)?;
    }
    Ok(0)
}

fn witness(
    cli: &Cli,
    criterion: &str,
    alpha: Option<usize>,
    dims: &str,
    side: Option<&str>,
    verify: usize,
) -> Result<i32, Failure> {
    let dims = parse_dims(dims)?;
    let side_given = side
        .map(Side::from_str)
        .transpose()
        .map_err(|e| usage(e.to_string()))?;
    let need_alpha = || alpha.ok_or_else(|| usage(format!("{criterion} needs --alpha")));
    // marginal side for most tableaus, reversed side for quadratic
    let side = side_given.unwrap_or(match criterion {
        "quadratic" => Side::A,
        _ => Side::B,
    });
    let reversed = match criterion {
        "quadratic" => side,
        _ => side.opposite(),
    };
    let u = match resolve_u(cli, UKind::Canonical)? {
        ReversalChoice::Kind(k) => k
            .build(dims.factor(reversed.index()))
            .map_err(|e| usage(e.to_string()))?,
        ReversalChoice::Custom(u) => u,
    };
    let tableau: MapTableau = match criterion {
        "fact1" => {
            if side_given.is_some() {
                return Err(usage("fact1 fixes its sides; drop --side"));
            }
            fact1_tableau(&dims, need_alpha()?)?
        }
        "fact3" => fact3_tableau(&dims, need_alpha()?, side, &u)?,
        "fact4" => {
            let a = need_alpha()?;
            if a % 4 != 1 {
                return Err(usage(format!("fact4 needs alpha = 4k+1, got {a}")));
            }
            fact4_tableau(&dims, a / 4, side, &u)?
        }
        "entropic" => entropic_tableau(&dims, need_alpha()?, side)?,
        "quadratic" => {
            if let Some(a) = alpha {
                if a != 2 {
                    return Err(usage("quadratic is a two-copy witness; alpha must be 2"));
                }
            }
            quadratic_tableau(&dims, side, &u)?
        }
        "oddcut" => oddcut_tableau(&dims, need_alpha()?, side, &u)?,
        "operator_power" => operator_power_tableau(&dims, need_alpha()?, side, &u)?,
        other => {
            return Err(usage(format!(
                "no tableau construction for {other:?}; supported: fact1, fact3, fact4, \
                 entropic, quadratic, oddcut, operator_power"
            )))
        }
    };
    let w = build_witness(&tableau, criterion)?;
    println!(
        "witness {criterion} copies={} dims={} matrix_dim={}",
        w.copies,
        w.per_copy_dims,
        w.op.rows()
    );
    let mut rng = StdRng::seed_from_u64(cli.seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..verify {
        let rho = random_density(&dims, &mut rng);
        let direct = tableau_scalar(&tableau, &rho)?;
        let via_witness = evaluate_witness(&w, &rho)?;
        max_dev = max_dev.max((direct - via_witness).abs());
    }
    println!("verified {verify} random states, max deviation {max_dev:.3e}");
    if verify > 0 && max_dev > cli.tol {
        return Err(Failure::Runtime(format!(
            "witness disagrees with its scalar form: max deviation {max_dev:.3e} > {}",
            cli.tol
        )));
    }
    if cli.out.is_some() {
        write_artifact(cli, &serde_json::to_string(&w.to_json())?)?;
    }
    Ok(0)
}

fn parse_dims(s: &str) -> Result<DimSpec, Failure> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(usage(format!("bad --dims {s:?}; expected d1xd2, e.g. 2x2")));
    }
    let d: Vec<usize> = parts
        .iter()
        .map(|p| p.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad --dims {s:?}; expected d1xd2, e.g. 2x2")))?;
    if d[0] < 2 || d[1] < 2 {
        return Err(usage(format!("bad --dims {s:?}; factors must be at least 2")));
    }
    Ok(DimSpec::bipartite(d[0], d[1]))
}

fn simulate(
    cli: &Cli,
    state: &std::path::Path,
    reflect: &[usize],
    n: Option<usize>,
    shots: Option<u64>,
) -> Result<i32, Failure> {
    let rho = load_state(state)?;
    let qubits = rho.dims().num_factors();
    if let Some(n) = n {
        if n != qubits {
            return Err(usage(format!(
                "--n {n} does not match the state's {qubits} qubit factors"
            )));
        }
    }
    let mut indices = Vec::new();
    for &i in reflect {
        if i == 0 || i > qubits {
            return Err(usage(format!(
                "--reflect positions are 1-based and at most {qubits}, got {i}"
            )));
        }
        indices.push(i - 1);
    }
    indices.sort_unstable();
    indices.dedup();
    let reflected = ReflectionSet::new(indices)?;
    let mut table = joint_probabilities(&rho)?;
    if let Some(shots) = shots {
        table = shot_sample(&table, shots, cli.seed)?;
    }
    let mean = mean_from_probs(&table, &reflected)?;
    write_artifact(cli, &table.to_csv())?;
    println!("mean = {mean}");
    Ok(0)
}
