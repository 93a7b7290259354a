//! `sqv` command-line driver.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or config error.

pub mod output;
mod selftest;

use clap::{Parser, Subcommand, ValueEnum};
use output::{fmt_float, ForestValue, Record, Table};
use sqv_core::feynman::{parse_theory, quadrature_moments, Theory};
use sqv_core::langevin::{pooled_moments, simulate_with, SimConfig};
use sqv_core::maps::{enumerate_maps, CombinatorialMap, EnumerateOptions};
use sqv_core::stochastic::{verify_forest_sum, verify_order, AmplitudeReport, Method, OrderReport};
use sqv_core::trees::{alpha_multiplicity, consistency_alpha_identity, plane_multiplicity, unlabeled_classes};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Records,
}

#[derive(Parser, Debug)]
#[command(name = "sqv", version, about = "Feynman vs stochastic amplitude verifier")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unlabeled maps grouped by abstract graph.
    EnumerateMaps {
        #[arg(long)]
        n: usize,
        /// Internal vertex degree; repeat for mixed degrees.
        #[arg(long, required = true)]
        degree: Vec<usize>,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        connected: bool,
    },
    /// Unlabeled trees on `p` vertices with recursive and plane counts.
    EnumerateTrees {
        #[arg(long)]
        p: usize,
    },
    /// Feynman amplitude and forest decomposition of one map.
    Amplitude {
        #[arg(long)]
        theory: PathBuf,
        /// Map record, e.g. `darts=2; alpha=(0 1); externals=[0,1]`.
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "closed")]
        method: Method,
    },
    /// Forest-sum check of every map at one order.
    Verify {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "closed")]
        method: Method,
    },
    /// Order summaries for orders 0 through `--order`.
    VerifyOrder {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "closed")]
        method: Method,
    },
    /// Langevin estimates of equilibrium moments.
    Simulate {
        #[arg(long)]
        theory: PathBuf,
        /// Time step h.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Steps after burn-in.
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 10_000)]
        burn_in: u64,
        #[arg(long, default_value_t = 10)]
        thin: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent trajectories, pooled.
        #[arg(long, default_value_t = 1)]
        chains: u64,
        /// Comma-separated site list; repeatable. Default: `0,0`.
        #[arg(long = "moment")]
        moments: Vec<String>,
        /// Compare against the quadrature oracle (N ≤ 3); fails beyond 3 standard errors.
        #[arg(long)]
        oracle: bool,
        /// Write the samples of trajectory 0 as `step v_0 … v_{N-1}` lines.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Built-in golden checks.
    Selftest,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

/// Parses `args` (program name first) and runs the command, writing reports to `out`.
pub fn run_with<I, T>(args: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("SQV_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let format = cli.format;
    match pool.install(|| dispatch(cli.command, format, out)) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout())
}

fn load_theory(path: &Path, n: Option<usize>) -> Result<Theory, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let theory = parse_theory(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    match n {
        Some(n) if theory.n_external() != n => {
            if theory.n_external() == 0 {
                Ok(theory.with_externals(vec![0; n])?)
            } else {
                Err(Failure::Usage(format!(
                    "{}: `externals` lists {} sites but --n is {n}",
                    path.display(),
                    theory.n_external()
                )))
            }
        }
        _ => Ok(theory),
    }
}

fn emit_records(out: &mut dyn Write, records: &[Record]) -> Result<(), Failure> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

fn dispatch(command: Command, format: Format, out: &mut dyn Write) -> Outcome {
    match command {
        Command::EnumerateMaps { n, degree, p, connected } => enumerate_maps_cmd(n, degree, p, connected, format, out),
        Command::EnumerateTrees { p } => enumerate_trees_cmd(p, format, out),
        Command::Amplitude { theory, map, method } => {
            let map: CombinatorialMap = map.parse()?;
            let theory = load_theory(&theory, Some(map.n_external()))?;
            let report = verify_forest_sum(&map, &theory, method)?;
            print_map_reports(&[report], format, out)
        }
        Command::Verify {
            theory,
            n,
            order,
            method,
        } => {
            let theory = load_theory(&theory, n)?;
            log::info!("verifying order {order} with the {method} method");
            let report = verify_order(&theory, order, method)?;
            let pass = print_map_reports(&report.reports, format, out)?;
            print_orders(&[report], format, out).map(|p| p && pass)
        }
        Command::VerifyOrder {
            theory,
            n,
            order,
            method,
        } => {
            let theory = load_theory(&theory, n)?;
            let reports = (0..=order)
                .map(|p| {
                    log::info!("order {p}");
                    verify_order(&theory, p, method)
                })
                .collect::<Result<Vec<_>, _>>()?;
            print_orders(&reports, format, out)
        }
        Command::Simulate {
            theory,
            step,
            steps,
            burn_in,
            thin,
            seed,
            chains,
            moments,
            oracle,
            dump,
        } => {
            let theory = load_theory(&theory, None)?;
            let monomials = parse_monomials(&moments, theory.dim())?;
            let cfg = SimConfig::new(step, burn_in, steps / thin.max(1), thin, seed);
            cfg.validate(theory.dim())?;
            if let Some(path) = dump {
                dump_trajectory(&theory, &cfg, &path)?;
            }
            let estimates = pooled_moments(&theory, &cfg, &monomials, chains)?;
            let reference = if oracle {
                Some(quadrature_moments(&theory, &monomials)?)
            } else {
                None
            };
            let mut pass = true;
            let records: Vec<Record> = monomials
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let e = estimates[i];
                    let o = reference.as_ref().map(|r| r[i]);
                    let ok = o.map(|o| (e.value - o).abs() <= 3.0 * e.std_error);
                    pass &= ok.unwrap_or(true);
                    Record::Moment {
                        monomial: m.clone(),
                        value: e.value,
                        std_error: e.std_error,
                        n_effective: e.n_effective,
                        oracle: o,
                        pass: ok,
                    }
                })
                .collect();
            match format {
                Format::Records => emit_records(out, &records)?,
                Format::Table => {
                    let mut t = Table::new(&["monomial", "value", "std_error", "n_effective", "oracle", "pass"]);
                    for r in &records {
                        if let Record::Moment {
                            monomial,
                            value,
                            std_error,
                            n_effective,
                            oracle,
                            pass,
                        } = r
                        {
                            t.row(vec![
                                monomial_name(monomial),
                                fmt_float(*value),
                                fmt_float(*std_error),
                                fmt_float(*n_effective),
                                oracle.map(fmt_float).unwrap_or_else(|| "-".into()),
                                pass.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
                            ]);
                        }
                    }
                    write!(out, "{}", t.render())?;
                }
            }
            Ok(pass)
        }
        Command::Selftest => {
            let checks = selftest::run_checks();
            let pass = checks.iter().all(|c| c.pass);
            let records: Vec<Record> = checks
                .into_iter()
                .map(|c| Record::Check {
                    name: c.name,
                    expected: c.expected,
                    got: c.got,
                    pass: c.pass,
                })
                .collect();
            match format {
                Format::Records => emit_records(out, &records)?,
                Format::Table => {
                    let mut t = Table::new(&["check", "expected", "got", "result"]);
                    for r in &records {
                        if let Record::Check {
                            name,
                            expected,
                            got,
                            pass,
                        } = r
                        {
                            t.row(vec![
                                name.clone(),
                                expected.clone(),
                                got.clone(),
                                if *pass { "PASS" } else { "FAIL" }.into(),
                            ]);
                        }
                    }
                    write!(out, "{}", t.render())?;
                }
            }
            Ok(pass)
        }
    }
}

fn monomial_name(m: &[usize]) -> String {
    let parts: Vec<String> = m.iter().map(|x| format!("phi{x}")).collect();
    parts.join("*")
}

fn parse_monomials(specs: &[String], dim: usize) -> Result<Vec<Vec<usize>>, Failure> {
    if specs.is_empty() {
        return Ok(vec![vec![0, 0]]);
    }
    specs
        .iter()
        .map(|s| {
            let sites = s
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("--moment `{s}`: {e}"))?;
            if let Some(&x) = sites.iter().find(|&&x| x >= dim) {
                return Err(Failure::Usage(format!("--moment `{s}`: site {x} out of range")));
            }
            Ok(sites)
        })
        .collect()
}

fn dump_trajectory(theory: &Theory, cfg: &SimConfig, path: &Path) -> Result<(), Failure> {
    let file = std::fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut w = std::io::BufWriter::new(file);
    let mut io_error = None;
    simulate_with(theory, cfg, 0, |step, phi| {
        if io_error.is_some() {
            return;
        }
        let vals: Vec<String> = phi.iter().map(|&v| fmt_float(v)).collect();
        if let Err(e) = writeln!(w, "{step} {}", vals.join(" ")) {
            io_error = Some(e);
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}

fn enumerate_maps_cmd(n: usize, degree: Vec<usize>, p: usize, connected: bool, format: Format, out: &mut dyn Write) -> Outcome {
    let mut opts = EnumerateOptions::new(n, degree, p);
    if connected {
        opts = opts.connected();
    }
    let classes = enumerate_maps(&opts)?;
    // graph -> (unlabeled maps, labeled pairings)
    let mut groups: BTreeMap<String, (usize, u64)> = BTreeMap::new();
    for c in &classes {
        let e = groups.entry(c.map.to_abstract_graph().to_string()).or_insert((0, 0));
        e.0 += 1;
        e.1 += c.multiplicity;
    }
    let records: Vec<Record> = groups
        .into_iter()
        .map(|(graph, (maps, labeled))| Record::Graph { graph, maps, labeled })
        .collect();
    match format {
        Format::Records => emit_records(out, &records)?,
        Format::Table => {
            let mut t = Table::new(&["graph", "maps", "labeled"]);
            for r in &records {
                if let Record::Graph { graph, maps, labeled } = r {
                    t.row(vec![graph.clone(), maps.to_string(), labeled.to_string()]);
                }
            }
            write!(out, "{}", t.render())?;
            writeln!(out, "{} graphs, {} maps", records.len(), classes.len())?;
        }
    }
    Ok(true)
}

fn enumerate_trees_cmd(p: usize, format: Format, out: &mut dyn Write) -> Outcome {
    if p == 0 || p > 9 {
        return Err(Failure::Usage("--p must lie in 1..=9".into()));
    }
    let records: Vec<Record> = unlabeled_classes(p)
        .into_keys()
        .map(|t| Record::Tree {
            tree: t.to_string(),
            vertices: t.len(),
            alpha: alpha_multiplicity(&t),
            plane: plane_multiplicity(&t),
            simplex: sqv_core::operator::simplex_integral_bounded(&t.poset()).to_string(),
            identity: consistency_alpha_identity(&t),
        })
        .collect();
    let pass = records.iter().all(|r| matches!(r, Record::Tree { identity: true, .. }));
    match format {
        Format::Records => emit_records(out, &records)?,
        Format::Table => {
            let mut t = Table::new(&["tree", "alpha", "plane", "simplex", "identity"]);
            for r in &records {
                if let Record::Tree {
                    tree,
                    alpha,
                    plane,
                    simplex,
                    identity,
                    ..
                } = r
                {
                    t.row(vec![
                        tree.clone(),
                        alpha.to_string(),
                        plane.to_string(),
                        format!("{simplex} t^{p}"),
                        identity.to_string(),
                    ]);
                }
            }
            write!(out, "{}", t.render())?;
        }
    }
    Ok(pass)
}

fn map_record(r: &AmplitudeReport) -> Record {
    Record::Map {
        order: r.order,
        key: r.map_key.to_string(),
        map: r.map.to_string(),
        method: r.method.to_string(),
        feynman: r.feynman_value,
        forest_sum: r.forest_sum,
        abs_discrepancy: r.abs_discrepancy,
        rel_discrepancy: r.rel_discrepancy,
        forests: r
            .forest_values
            .iter()
            .map(|(f, v)| ForestValue {
                forest: f.clone(),
                value: *v,
            })
            .collect(),
        pass: r.pass,
    }
}

fn print_map_reports(reports: &[AmplitudeReport], format: Format, out: &mut dyn Write) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    match format {
        Format::Records => emit_records(out, &reports.iter().map(map_record).collect::<Vec<_>>())?,
        Format::Table => {
            let mut t = Table::new(&["map", "forests", "feynman", "forest_sum", "rel_discrepancy", "result"]);
            for r in reports {
                t.row(vec![
                    r.map.to_string(),
                    r.forest_values.len().to_string(),
                    fmt_float(r.feynman_value),
                    fmt_float(r.forest_sum),
                    fmt_float(r.rel_discrepancy),
                    if r.pass { "PASS" } else { "FAIL" }.into(),
                ]);
            }
            write!(out, "{}", t.render())?;
            if let [single] = reports {
                for (f, v) in &single.forest_values {
                    writeln!(out, "  {f}  {}", fmt_float(*v))?;
                }
            }
        }
    }
    Ok(pass)
}

fn order_record(r: &OrderReport) -> Record {
    Record::Order {
        order: r.order,
        method: r.method.to_string(),
        maps: r.reports.len(),
        worst_rel_discrepancy: r.worst_rel_discrepancy,
        stochastic_total: r.stochastic_total,
        moment_reference: r.moment_reference,
        moment_rel_discrepancy: r.moment_rel_discrepancy,
        pass: r.pass,
    }
}

fn print_orders(reports: &[OrderReport], format: Format, out: &mut dyn Write) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    match format {
        Format::Records => emit_records(out, &reports.iter().map(order_record).collect::<Vec<_>>())?,
        Format::Table => {
            let mut t = Table::new(&[
                "order",
                "maps",
                "stochastic_total",
                "moment",
                "worst_rel_discrepancy",
                "result",
            ]);
            for r in reports {
                t.row(vec![
                    r.order.to_string(),
                    r.reports.len().to_string(),
                    fmt_float(r.stochastic_total),
                    fmt_float(r.moment_reference),
                    fmt_float(r.worst_rel_discrepancy.max(r.moment_rel_discrepancy)),
                    if r.pass { "PASS" } else { "FAIL" }.into(),
                ]);
            }
            write!(out, "{}", t.render())?;
        }
    }
    Ok(pass)
}
