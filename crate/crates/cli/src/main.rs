//! Command-line laboratory for graph expansion testing: instance
//! generation, tester trials with persisted records, verification suites,
//! and cost-trend fits.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage error, 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use expander_lab::checks::{run_suite, separation_suite, CheckReport};
use expander_lab::error::Error as LabError;
use expander_lab::graph::{
    conductance_bruteforce, expansion_bruteforce, set_conductance, write_edge_list, Graph,
    GraphSpec, NodeSet,
};
use expander_lab::ledger::QueryLedger;
use expander_lab::parallel::run_batch;
use expander_lab::qff::NormBackend;
use expander_lab::rng::{stream, TRIAL};
use expander_lab::scaling::{run_scaling, ScalingPlan};
use expander_lab::tester::{
    resolve_params, run_tester, Decision, Overrides, Profile, RejectReason, ResolvedParams,
    TesterConfig, TesterKind,
};

const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "expander-lab",
    version,
    about = "Expansion-testing laboratory: generate instances, run testers, verify invariants, fit cost trends"
)]
struct Cli {
    /// Worker threads for trial-level parallelism (1 = sequential,
    /// 0 = one per core). Within-trial execution is always sequential.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TesterArg {
    Gr,
    Qff,
    SeededQff,
}

impl From<TesterArg> for TesterKind {
    fn from(arg: TesterArg) -> Self {
        match arg {
            TesterArg::Gr => TesterKind::Gr,
            TesterArg::Qff => TesterKind::Qff,
            TesterArg::SeededQff => TesterKind::SeededQff,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Paper,
    Desk,
}

impl From<ProfileArg> for Profile {
    fn from(arg: ProfileArg) -> Self {
        match arg {
            ProfileArg::Paper => Profile::Paper,
            ProfileArg::Desk => Profile::Desk,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write it as an edge list.
    ///
    /// Families: random-regular (n, d), dumbbell (n_half, d, bridges),
    /// dumbbell-regular (n_half, d, bridges), complete (n), cycle (n).
    Gen {
        /// Instance family name.
        family: String,
        /// Family parameters as key=value pairs, e.g. `n_half=8 d=8`.
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge-list output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run independent tester trials against a stored instance and write
    /// one record per trial.
    Test {
        /// Edge-list instance to test.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        tester: TesterArg,
        /// Expansion the instance is tested against.
        #[arg(long, default_value_t = 0.25)]
        phi: f64,
        /// Distance parameter of the far case.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
        profile: ProfileArg,
        /// Parameter override, repeatable. Keys: K (iterations), t (walk
        /// length), T (growth horizon), B (growth budget), theta,
        /// time_scale, budget_scale, trialsScale (sets both scales),
        /// backend (exact|noisy).
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Record output path (line-delimited records); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and print one pass/fail line with its
    /// measured margin per property.
    ///
    /// Suites: collision, eq1, eq3, lemma1, lemma2, lemma3, martingale,
    /// lemma8, lemma9, lemma10, growth, chebyshev, estimator, mixing,
    /// all (everything above), separation (tester experiments; honors
    /// --tester, otherwise runs every tester).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Restrict the separation suite to one tester.
        #[arg(long, value_enum)]
        tester: Option<TesterArg>,
    },
    /// Run a tester across ascending instance sizes and fit log-log cost
    /// slopes; the constant-per-trial control must stay flat.
    Scaling {
        #[arg(long, value_enum)]
        tester: TesterArg,
        /// Ascending instance sizes (at least four).
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.25)]
        phi: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Trials averaged per size.
        #[arg(long, default_value_t = 6)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
        profile: ProfileArg,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Report output path (single JSON document).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// One persisted trial: schema version, provenance, the exact
/// post-override parameters, verdict and ledger, wall time. Reruns with
/// the same seed are byte-identical except for `wall_ms`.
#[derive(Serialize)]
struct TrialRecord<'a> {
    schema_version: u32,
    experiment: &'a str,
    trial: usize,
    graph_fingerprint: &'a str,
    config: &'a ConfigEcho,
    decision: Decision,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<RejectReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<u32>>,
    ledger: QueryLedger,
    wall_ms: f64,
}

/// The configuration a trial actually ran with, after profile scaling and
/// explicit overrides.
#[derive(Serialize)]
struct ConfigEcho {
    tester: TesterKind,
    n: usize,
    d: u32,
    phi: f64,
    eps_dist: f64,
    profile: Profile,
    resolved: ResolvedParams,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let parallel = configure_threads(cli.threads);
    match dispatch(cli.command, parallel) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                LabError::Io(_) | LabError::MalformedFile(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Sizes the global worker pool; returns whether trial batches should be
/// parallel at all.
fn configure_threads(threads: usize) -> bool {
    if threads == 1 {
        return false;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    // A second invocation (only possible in-process, e.g. tests) keeps the
    // existing pool; sizing is best-effort.
    let _ = builder.build_global();
    true
}

fn dispatch(command: Command, parallel: bool) -> Result<ExitCode, LabError> {
    match command {
        Command::Gen {
            family,
            params,
            seed,
            out,
        } => cmd_gen(&family, &params, seed, &out),
        Command::Test {
            graph,
            tester,
            phi,
            eps,
            trials,
            seed,
            profile,
            overrides,
            out,
        } => cmd_test(
            &graph,
            tester.into(),
            phi,
            eps,
            trials,
            seed,
            profile.into(),
            &parse_overrides(&overrides)?,
            out.as_deref(),
            parallel,
        ),
        Command::Verify {
            suite,
            seed,
            tester,
        } => cmd_verify(&suite, seed, tester.map(Into::into), parallel),
        Command::Scaling {
            tester,
            sizes,
            phi,
            eps,
            trials,
            seed,
            profile,
            overrides,
            out,
        } => {
            let plan = ScalingPlan {
                kind: tester.into(),
                sizes,
                trials,
                degree: 4,
                phi,
                eps_dist: eps,
                profile: profile.into(),
                overrides: parse_overrides(&overrides)?,
            };
            cmd_scaling(&plan, seed, out.as_deref(), parallel)
        }
    }
}

// ---- gen ----

/// Parses `key=value` family parameters into a graph spec.
fn parse_spec(family: &str, params: &[String]) -> Result<GraphSpec, LabError> {
    let lookup = |key: &str| -> Result<Option<u32>, LabError> {
        let mut found = None;
        for pair in params {
            match pair.split_once('=') {
                Some((k, v)) if k == key => {
                    let value = v.parse::<u32>().map_err(|_| {
                        LabError::InvalidParameter(format!("{key} must be a number, got '{v}'"))
                    })?;
                    found = Some(value);
                }
                Some(_) => {}
                None => {
                    return Err(LabError::InvalidParameter(format!(
                        "family parameters are key=value pairs, got '{pair}'"
                    )));
                }
            }
        }
        Ok(found)
    };
    let require = |value: Option<u32>, key: &str| {
        value.ok_or_else(|| LabError::InvalidParameter(format!("{family} needs {key}=<number>")))
    };
    let known: &[&str] = match family {
        "random-regular" => &["n", "d"],
        "dumbbell" | "dumbbell-regular" => &["n_half", "d", "bridges"],
        "complete" | "cycle" => &["n"],
        other => {
            return Err(LabError::InvalidParameter(format!(
                "unknown family '{other}'; expected random-regular, dumbbell, dumbbell-regular, complete or cycle"
            )));
        }
    };
    for pair in params {
        if let Some((k, _)) = pair.split_once('=') {
            if !known.contains(&k) {
                return Err(LabError::InvalidParameter(format!(
                    "{family} does not take '{k}'; known keys: {known:?}"
                )));
            }
        }
    }
    Ok(match family {
        "random-regular" => GraphSpec::RandomRegular {
            n: require(lookup("n")?, "n")?,
            d: require(lookup("d")?, "d")?,
        },
        "dumbbell" => GraphSpec::Dumbbell {
            half: require(lookup("n_half")?, "n_half")?,
            d: require(lookup("d")?, "d")?,
            bridges: lookup("bridges")?.unwrap_or(1),
        },
        "dumbbell-regular" => GraphSpec::DumbbellRegular {
            half: require(lookup("n_half")?, "n_half")?,
            side_degree: require(lookup("d")?, "d")?,
            bridges: lookup("bridges")?.unwrap_or(1),
        },
        "complete" => GraphSpec::Complete {
            n: require(lookup("n")?, "n")?,
        },
        "cycle" => GraphSpec::Cycle {
            n: require(lookup("n")?, "n")?,
        },
        _ => unreachable!("family validated above"),
    })
}

fn cmd_gen(family: &str, params: &[String], seed: u64, out: &Path) -> Result<ExitCode, LabError> {
    let spec = parse_spec(family, params)?;
    let graph = spec.generate(seed)?;
    write_edge_list(&graph, out)?;
    println!(
        "wrote {}: n={} m={} d={}",
        out.display(),
        graph.node_count(),
        graph.edge_count(),
        graph.max_degree()
    );
    if graph.node_count() <= 22 {
        println!("expansion = {}", expansion_bruteforce(&graph)?);
        println!("conductance = {}", conductance_bruteforce(&graph)?);
    }
    if let GraphSpec::Dumbbell { half, .. } | GraphSpec::DumbbellRegular { half, .. } = spec {
        let side = NodeSet::new(&graph, (0..half).collect())?;
        println!("side conductance = {}", set_conductance(&graph, &side)?);
    }
    Ok(ExitCode::SUCCESS)
}

// ---- test ----

fn parse_overrides(pairs: &[String]) -> Result<Overrides, LabError> {
    let mut overrides = Overrides::default();
    for pair in pairs {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            LabError::InvalidParameter(format!("overrides are KEY=VALUE, got '{pair}'"))
        })?;
        let bad = |what: &str| {
            LabError::InvalidParameter(format!("override {key} needs {what}, got '{value}'"))
        };
        match key {
            "K" => overrides.iterations = Some(value.parse().map_err(|_| bad("a count"))?),
            "t" => overrides.walk_len = Some(value.parse().map_err(|_| bad("a length"))?),
            "T" => overrides.horizon = Some(value.parse().map_err(|_| bad("a horizon"))?),
            "B" => overrides.budget = Some(value.parse().map_err(|_| bad("a budget"))?),
            "theta" => overrides.theta = Some(value.parse().map_err(|_| bad("a number"))?),
            "time_scale" => {
                overrides.time_scale = Some(value.parse().map_err(|_| bad("a factor"))?)
            }
            "budget_scale" => {
                overrides.budget_scale = Some(value.parse().map_err(|_| bad("a factor"))?)
            }
            "trialsScale" => {
                let scale: f64 = value.parse().map_err(|_| bad("a factor"))?;
                overrides.time_scale = Some(scale);
                overrides.budget_scale = Some(scale);
            }
            "backend" => {
                overrides.backend = Some(match value {
                    "exact" => NormBackend::Exact,
                    "noisy" => NormBackend::Noisy,
                    _ => return Err(bad("exact or noisy")),
                })
            }
            _ => {
                return Err(LabError::InvalidParameter(format!(
                    "unknown override key '{key}'; known: K, t, T, B, theta, time_scale, budget_scale, trialsScale, backend"
                )));
            }
        }
    }
    Ok(overrides)
}

/// Stable 64-bit FNV-1a digest of the adjacency structure.
fn fingerprint(graph: &Graph) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |word: u64| {
        for byte in word.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(graph.node_count() as u64);
    for v in 0..graph.node_count() as u32 {
        for &w in graph.neighbors(v) {
            eat(((v as u64) << 32) | w as u64);
        }
    }
    format!("{hash:016x}")
}

#[allow(clippy::too_many_arguments)]
fn cmd_test(
    graph_path: &Path,
    tester: TesterKind,
    phi: f64,
    eps: f64,
    trials: usize,
    seed: u64,
    profile: Profile,
    overrides: &Overrides,
    out: Option<&Path>,
    parallel: bool,
) -> Result<ExitCode, LabError> {
    if trials == 0 {
        return Err(LabError::InvalidParameter("trials must be positive".into()));
    }
    let spec = GraphSpec::File {
        path: graph_path.to_path_buf(),
    };
    let graph = spec.generate(0)?;
    let degree = graph.regular_degree().ok_or(LabError::NotRegular)?;
    let cfg = TesterConfig::new(graph.node_count(), degree, phi, eps)?
        .with_profile(profile)
        .with_overrides(*overrides);
    let config_echo = ConfigEcho {
        tester,
        n: cfg.n,
        d: cfg.d,
        phi: cfg.phi,
        eps_dist: cfg.eps_dist,
        profile: cfg.profile,
        resolved: resolve_params(&cfg)?,
    };
    let digest = fingerprint(&graph);
    let stem = graph_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    let experiment = format!("{}:{stem}:{seed}", tester_name(tester));

    let outcomes = run_batch(trials, parallel, |trial| {
        let mut rng = stream(seed, &[TRIAL, trial as u64]);
        let started = Instant::now();
        run_tester(tester, &graph, &cfg, &mut rng)
            .map(|verdict| (verdict, started.elapsed().as_secs_f64() * 1e3))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut accepts = 0usize;
    let mut totals = QueryLedger::new();
    for (trial, (verdict, wall_ms)) in outcomes.iter().enumerate() {
        let record = TrialRecord {
            schema_version: RECORD_SCHEMA_VERSION,
            experiment: &experiment,
            trial,
            graph_fingerprint: &digest,
            config: &config_echo,
            decision: verdict.decision,
            reason: verdict.reason,
            witness: verdict.witness.clone(),
            ledger: verdict.ledger,
            wall_ms: *wall_ms,
        };
        serde_json::to_writer(&mut sink, &record)
            .map_err(|err| LabError::Io(std::io::Error::other(err)))?;
        writeln!(sink)?;
        if verdict.decision == Decision::Accept {
            accepts += 1;
        }
        totals.absorb(&verdict.ledger);
    }
    sink.flush()?;

    let count = outcomes.len();
    let rejects = count - accepts;
    println!(
        "accept {accepts}/{count} ({:.3})  reject {rejects}/{count} ({:.3})",
        accepts as f64 / count as f64,
        rejects as f64 / count as f64
    );
    let mean = |total: u64| total as f64 / count as f64;
    println!(
        "mean ledger per trial: esp={:.1} quantum={:.1} qram={:.1} neighbor={:.1} degree={:.1} uniform={:.1}",
        mean(totals.esp_cost),
        mean(totals.quantum_queries),
        mean(totals.qram_units),
        mean(totals.neighbor),
        mean(totals.degree),
        mean(totals.uniform_node),
    );
    Ok(ExitCode::SUCCESS)
}

fn tester_name(kind: TesterKind) -> &'static str {
    match kind {
        TesterKind::Gr => "gr",
        TesterKind::Qff => "qff",
        TesterKind::SeededQff => "seeded-qff",
    }
}

// ---- verify ----

fn cmd_verify(
    suite: &str,
    seed: u64,
    tester: Option<TesterKind>,
    parallel: bool,
) -> Result<ExitCode, LabError> {
    let reports = if suite == "separation" {
        let kinds = match tester {
            Some(kind) => vec![kind],
            None => vec![TesterKind::SeededQff, TesterKind::Qff, TesterKind::Gr],
        };
        let mut all = Vec::new();
        for kind in kinds {
            all.extend(separation_suite(kind, seed, parallel)?);
        }
        all
    } else {
        run_suite(suite, seed, parallel)?
    };
    let mut failures = 0usize;
    for CheckReport {
        name,
        pass,
        margin,
        details,
    } in &reports
    {
        let verdict = if *pass { "PASS" } else { "FAIL" };
        println!("{verdict}  {name:<42} margin {margin:+.3e}  {details}");
        if !pass {
            failures += 1;
        }
    }
    println!("{} checks, {} failed", reports.len(), failures);
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---- scaling ----

fn cmd_scaling(
    plan: &ScalingPlan,
    seed: u64,
    out: Option<&Path>,
    parallel: bool,
) -> Result<ExitCode, LabError> {
    let report = run_scaling(plan, seed, parallel)?;
    for point in &report.points {
        println!(
            "n={:<6} trials={} mean total={:.1} esp={:.1} quantum={:.1} classical={:.1}",
            point.n, point.trials, point.mean_total, point.mean_esp, point.mean_quantum,
            point.mean_classical,
        );
    }
    let opt = |slope: Option<f64>| match slope {
        Some(s) => format!("{s:.3}"),
        None => "n/a".into(),
    };
    println!(
        "total slope {:.3}  esp slope {}  estimator slope {}  classical slope {}  control slope {:+.3}",
        report.total_slope,
        opt(report.esp_slope),
        opt(report.quantum_slope),
        opt(report.classical_slope),
        report.control_slope,
    );
    if let Some(path) = out {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(file, &report)
            .map_err(|err| LabError::Io(std::io::Error::other(err)))?;
    }
    if report.control_slope.abs() > 0.05 {
        eprintln!(
            "control series is not flat (slope {:+.3}); the cost pipeline is suspect",
            report.control_slope
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
