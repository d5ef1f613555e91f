use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use supnorm::config::{load_config, RunConfig};
use supnorm::io;
use supnorm::pointwise::ChainDirection;
use supnorm::run::{self, DistanceSource, Problem};
use supnorm::{Error, Result};

#[derive(Parser)]
#[command(name = "supnorm", version, about = "Supremal functionals on grids: optimal values, minimizers, attainment sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Grid spacing override.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    stencil_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also write PGM heatmaps.
    #[arg(long)]
    heatmaps: bool,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = load_config(&self.config)?;
        if let Some(d) = cfg.domain.as_mut() {
            if let Some(h) = self.h {
                d.h = h;
            }
            if let Some(k) = self.stencil_k {
                d.stencil_k = k;
            }
        }
        if let Some(seed) = self.seed {
            cfg.solver.rng_seed = seed;
        }
        cfg.output.emit_heatmaps |= self.heatmaps;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Way {
    Up,
    Down,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal value, extremal minimizers and the absolute-minimizer iterate.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Output directory (default: the config's output prefix).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance transform d_λ from a node or from boundary values.
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: f64,
        /// Source node `i,j`.
        #[arg(long, conflicts_with = "from_boundary", required_unless_present = "from_boundary")]
        source: Option<String>,
        /// Field CSV whose boundary values seed the transform.
        #[arg(long)]
        from_boundary: Option<PathBuf>,
        /// Distances to the source instead of from it.
        #[arg(long)]
        reverse: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pointwise representative h_du of a field.
    Pointwise {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        field: PathBuf,
        /// Decreasing radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attainment set, chains and inclusion against other minimizers.
    Attain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        field: PathBuf,
        /// Other minimizers to compare with (repeatable).
        #[arg(long)]
        compare: Vec<PathBuf>,
        /// Optimal value; solved from the config when omitted.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        tau_fat: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ascent/descent chain from a node.
    Chain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        field: PathBuf,
        /// Seed node `i,j`.
        #[arg(long)]
        from: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, value_enum, default_value = "both")]
        direction: Way,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the fixture suite; exit status 0 iff every check passes.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fixture names, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        fixtures: Option<Vec<String>>,
        /// Cells per unit length for every fixture.
        #[arg(long)]
        cells: Option<usize>,
        /// Threshold override `fixture/check=value` (repeatable).
        #[arg(long = "override")]
        overrides: Vec<String>,
    },
}

fn out_dir(cfg: &RunConfig, out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| cfg.output.prefix.clone())
}

fn read_field(problem: &Problem, path: &Path) -> Result<supnorm::ScalarField> {
    let field = io::read_field(&problem.dom, path)?;
    if let Some(n) = problem.dom.inside_nodes().find(|&n| !field.values[n].is_finite()) {
        let (i, j) = problem.dom.ij(n);
        return Err(Error::Format {
            what: "field CSV",
            message: format!("{}: no finite value at inside node ({i}, {j})", path.display()),
        });
    }
    Ok(field)
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Solve { common, out } => {
            let cfg = common.load()?;
            let problem = Problem::from_config(&cfg)?;
            let out = run::solve(&cfg, &problem, &out_dir(&cfg, &out))?;
            println!("mu = {}", io::fmt_f64(out.trace.mu));
        }
        Command::Distance {
            common,
            lambda,
            source,
            from_boundary,
            reverse,
            out,
        } => {
            let cfg = common.load()?;
            let problem = Problem::from_config(&cfg)?;
            let source = match (source, from_boundary) {
                (Some(s), _) => DistanceSource::Node(run::parse_node(&problem.dom, &s)?),
                (None, Some(path)) => DistanceSource::Boundary(io::read_field(&problem.dom, &path)?),
                (None, None) => unreachable!("clap requires one source"),
            };
            run::distance(&cfg, &problem, lambda, &source, reverse, &out)?;
        }
        Command::Pointwise { common, field, radii, out } => {
            let mut cfg = common.load()?;
            if radii.is_some() {
                cfg.pointwise.radii = radii;
                cfg.validate()?;
            }
            let problem = Problem::from_config(&cfg)?;
            let u = read_field(&problem, &field)?;
            let pw = run::pointwise(&cfg, &problem, &u, &out_dir(&cfg, &out))?;
            println!("sup h_du = {}", io::fmt_f64(pw.sup().0));
        }
        Command::Attain {
            common,
            field,
            compare,
            mu,
            tau,
            tau_fat,
            out,
        } => {
            let mut cfg = common.load()?;
            cfg.pointwise.tau = tau.or(cfg.pointwise.tau);
            cfg.pointwise.tau_fat = tau_fat.or(cfg.pointwise.tau_fat);
            cfg.validate()?;
            let problem = Problem::from_config(&cfg)?;
            let u = read_field(&problem, &field)?;
            let others = compare
                .iter()
                .map(|p| read_field(&problem, p))
                .collect::<Result<Vec<_>>>()?;
            let mu = run::resolve_mu(&cfg, &problem, mu)?;
            let report = run::attain(&cfg, &problem, &u, &others, mu, &out_dir(&cfg, &out))?;
            println!("|A| = {}, sup = {}", report.set.len(), io::fmt_f64(report.sup_value));
            for v in &report.inclusion_verdicts {
                println!("{}: fraction {:.4}, reverse {:.4}", v.name, v.fraction, v.reverse_fraction);
            }
        }
        Command::Chain {
            common,
            field,
            from,
            mu,
            direction,
            out,
        } => {
            let cfg = common.load()?;
            let problem = Problem::from_config(&cfg)?;
            let u = read_field(&problem, &field)?;
            let seed = run::parse_node(&problem.dom, &from)?;
            let mu = run::resolve_mu(&cfg, &problem, mu)?;
            let direction = match direction {
                Way::Up => Some(ChainDirection::Up),
                Way::Down => Some(ChainDirection::Down),
                Way::Both => None,
            };
            run::chain(&problem, &u, seed, mu, direction, &out)?;
        }
        Command::Verify {
            config,
            out,
            fixtures,
            cells,
            overrides,
        } => {
            let mut cfg = match &config {
                Some(path) => load_config(path)?,
                None => RunConfig::default(),
            };
            if let Some(f) = fixtures {
                cfg.verify.fixtures = f;
            }
            if cells.is_some() {
                cfg.verify.cells = cells;
            }
            for o in &overrides {
                let bad = || Error::ConfigValue {
                    path: "verify.tolerance_overrides".into(),
                    message: format!("expected `fixture/check=value`, got `{o}`"),
                };
                let (name, value) = o.split_once('=').ok_or_else(bad)?;
                cfg.verify.tolerance_overrides.insert(name.to_string(), value.parse().map_err(|_| bad())?);
            }
            cfg.validate()?;
            let out = out_dir(&cfg, &out);
            let report = run::verify(&cfg, &out)?;
            for c in report.checks() {
                println!(
                    "{} {}: measured {:.6e}, {:?} {:.6e}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.comparison,
                    c.threshold
                );
            }
            println!(
                "{} of {} checks passed; report at {}",
                report.n_checks - report.failed.len(),
                report.n_checks,
                out.join("report.json").display()
            );
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("SUPNORM_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the worker pool: {e}");
                }
            }
            _ => log::warn!("ignoring SUPNORM_THREADS={v}: expected a positive integer"),
        }
    }
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
