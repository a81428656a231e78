//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when the input fails mathematical validation
//! (incomplete set, non-matching root, non-invariant group, ...), 1 for
//! argument, format and I/O errors. Failures print one line
//! `ERROR:<code>:<message>` on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::amalgam::{amalgamate, verify_amalgam_with_tol};
use crate::error::{Error, Result};
use crate::geometry::{rank, Polytope2D, TOL};
use crate::incarnation::{
    besselian_incarnate, cantor_ball, dual_ball, generators_from_polytope, triple_norm_budget,
};
use crate::io::{self, GeneratorSetFile, PolygonFile};
use crate::lp_experiments::{build_counterexample, csv_path, write_counterexample};
use crate::symmetry::{
    ample_deviation, commutant_dim, make_g1, make_g2, projection_constant_with, symmetry_group,
    LambdaOptions, GROUP_TOL,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "AMALGAM_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "amalgam-lab",
    version,
    about = "Incarnating sets, amalgams and projection constants in l_p"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Absolute/relative numerical tolerance.
    #[arg(long, global = true, default_value_t = TOL, value_parser = positive)]
    pub tol: f64,
    /// Angular tolerance for golden-section refinement, in radians.
    #[arg(long = "angle-tol", global = true, default_value_t = 1e-10, value_parser = positive)]
    pub angle_tol: f64,
    /// Seed for every random sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Progress messages on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a generator-set file and report its size and rank.
    Validate { input: PathBuf },
    /// Dual unit ball (zonotope) of a planar generator set.
    DualBall { input: PathBuf },
    /// Generators (half edge vectors) of a centrally symmetric polygon.
    Generators { input: PathBuf },
    /// Incarnate the column span of a basis inside l_p^N.
    Incarnate { input: PathBuf },
    /// Amalgamate a V-formation over l_1.
    Amalgamate {
        input: PathBuf,
        /// Also verify the result and embed the report.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Verify an amalgam of a V-formation (computed afresh unless given).
    Verify {
        input: PathBuf,
        /// Existing amalgam file to check instead of a fresh construction.
        #[arg(long)]
        amalgam: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Ample-group test and commutant dimension.
    AmpleCheck {
        /// Group file; alternatively use --g1 or --g2.
        input: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["input", "g2"])]
        g1: Option<usize>,
        #[arg(long, conflicts_with_all = ["input", "g1"])]
        g2: Option<usize>,
    },
    /// Projection constant of a planar generator set by invariant projections.
    ProjConst {
        input: PathBuf,
        /// Ambient exponent; defaults to the file's ambient_p.
        #[arg(long)]
        p: Option<f64>,
        /// Group file; defaults to the full symmetry group of the set.
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Use mu = id instead of optimizing.
        #[arg(long)]
        no_optimize: bool,
    },
    /// Projection constants of rotated polygon unions in l_p, p = 2n.
    Counterexample {
        /// Even exponent p = 2n with n in 2..=4.
        #[arg(long, default_value_t = 4)]
        p: usize,
        #[arg(long = "m-max", default_value_t = 4)]
        m_max: usize,
        /// Replace the ambient exponent (e.g. 2 for the Euclidean control).
        #[arg(long = "force-p")]
        force_p: Option<f64>,
    },
    /// Cantor-type centrally symmetric polygon of the given depth.
    Cantor {
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    configure_threads();
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "ERROR:{}:{}", e.code(), msg);
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails harmlessly if the pool was already built in this process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    tolerances: Value,
}

fn meta(cli: &Cli, command: &str) -> Value {
    serde_json::to_value(Meta {
        version: crate::VERSION,
        command,
        seed: cli.global.seed,
        tolerances: json!({"tol": cli.global.tol, "angle_tol": cli.global.angle_tol}),
    })
    .expect("meta serializes")
}

/// Serializes `body` and adds a `"meta"` member.
fn with_meta<T: Serialize>(body: &T, meta: Value) -> Result<Value> {
    let mut v = serde_json::to_value(body)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("meta".into(), meta);
            Ok(v)
        }
        None => Ok(json!({"result": v, "meta": meta})),
    }
}

fn emit_json(cli: &Cli, value: &Value, out: &mut dyn Write) -> Result<()> {
    match &cli.global.out {
        Some(path) => io::write_json(path, value),
        None => {
            out.write_all(io::to_json_string(value)?.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_csv(cli: &Cli, header: &[&str], rows: &[Vec<String>], out: &mut dyn Write) -> Result<()> {
    match &cli.global.out {
        Some(path) => io::write_csv(path, header, rows),
        None => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            out.write_all(&bytes)?;
            Ok(())
        }
    }
}

fn json_only(cli: &Cli, command: &str) -> Result<()> {
    if cli.global.format == Format::Csv {
        return Err(Error::InvalidArgument(format!(
            "{command} has no CSV output"
        )));
    }
    Ok(())
}

fn polygon_rows(p: &Polytope2D) -> Vec<Vec<String>> {
    p.vertices()
        .iter()
        .map(|v| vec![io::csv_number(v.x), io::csv_number(v.y)])
        .collect()
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let verbose = cli.global.verbose > 0;
    match &cli.command {
        Command::Validate { input } => {
            json_only(cli, "validate")?;
            let k = io::read_generator_set(input)?;
            let body = json!({
                "valid": true,
                "dim": k.dim(),
                "ambient_p": io::PValue::from_f64(k.ambient_p()),
                "generators": k.len(),
                "rank": rank(&k.matrix()),
            });
            emit_json(cli, &with_meta(&body, meta(cli, "validate"))?, out)
        }
        Command::DualBall { input } => {
            let k = io::read_generator_set(input)?;
            let ball = dual_ball(&k)?;
            match cli.global.format {
                Format::Csv => emit_csv(cli, &["x", "y"], &polygon_rows(&ball), out),
                Format::Json => emit_json(
                    cli,
                    &with_meta(&PolygonFile::from_polygon(&ball), meta(cli, "dual-ball"))?,
                    out,
                ),
            }
        }
        Command::Generators { input } => {
            let poly = io::read_polygon(input)?;
            let k = generators_from_polytope(&poly)?;
            match cli.global.format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = k
                        .generators()
                        .iter()
                        .map(|g| g.iter().map(|x| io::csv_number(*x)).collect())
                        .collect();
                    emit_csv(cli, &["x", "y"], &rows, out)
                }
                Format::Json => emit_json(
                    cli,
                    &with_meta(&GeneratorSetFile::from_set(&k), meta(cli, "generators"))?,
                    out,
                ),
            }
        }
        Command::Incarnate { input } => {
            json_only(cli, "incarnate")?;
            let (p, n, basis) = io::read_incarnate(input)?;
            let r = besselian_incarnate(p, n, &basis)?;
            let k = r.half_set_form()?;
            let mut body = serde_json::to_value(GeneratorSetFile::from_set(&k))?;
            let obj = body.as_object_mut().expect("object");
            obj.insert("ambient_dim".into(), json!(n));
            obj.insert("dropped_zeros".into(), json!(r.dropped_zeros()));
            obj.insert("triple_norm_budget".into(), json!(triple_norm_budget(&r)));
            if let Some(q) = r.evaluation_basis() {
                obj.insert("evaluation_basis".into(), json!(io::matrix_rows(q)));
            }
            emit_json(cli, &with_meta(&body, meta(cli, "incarnate"))?, out)
        }
        Command::Amalgamate {
            input,
            verify,
            samples,
        } => {
            json_only(cli, "amalgamate")?;
            let v = io::read_vformation(input)?;
            let a = amalgamate(&v)?;
            let report = if *verify {
                let r = verify_amalgam_with_tol(&v, &a, *samples, cli.global.seed, cli.global.tol)?;
                if verbose {
                    let _ = writeln!(err, "verification passed: {}", r.passed);
                }
                Some(r)
            } else {
                None
            };
            let failed = report.as_ref().is_some_and(|r| !r.passed);
            let file = io::AmalgamFile::new(&a, report, Some(meta(cli, "amalgamate")));
            emit_json(cli, &serde_json::to_value(&file)?, out)?;
            if failed {
                return Err(Error::Inconsistent("amalgam failed verification".into()));
            }
            Ok(())
        }
        Command::Verify {
            input,
            amalgam,
            samples,
        } => {
            json_only(cli, "verify")?;
            let v = io::read_vformation(input)?;
            let a = match amalgam {
                Some(path) => io::read_amalgam(path)?,
                None => amalgamate(&v)?,
            };
            let r = verify_amalgam_with_tol(&v, &a, *samples, cli.global.seed, cli.global.tol)?;
            emit_json(cli, &with_meta(&r, meta(cli, "verify"))?, out)?;
            if !r.passed {
                return Err(Error::Inconsistent("amalgam failed verification".into()));
            }
            Ok(())
        }
        Command::AmpleCheck { input, g1, g2 } => {
            json_only(cli, "ample-check")?;
            let (g, source) = match (input, g1, g2) {
                (Some(path), _, _) => (io::read_group(path)?, path.display().to_string()),
                (None, Some(n), _) => (make_g1(*n)?, format!("G1({n})")),
                (None, None, Some(n)) => (make_g2(*n)?, format!("G2({n})")),
                _ => {
                    return Err(Error::InvalidArgument(
                        "give a group file, --g1 N or --g2 N".into(),
                    ))
                }
            };
            let deviation = ample_deviation(&g);
            let body = json!({
                "group": source,
                "n": g.n(),
                "order": g.order(),
                "deviation": deviation,
                "ample": deviation <= cli.global.tol.max(GROUP_TOL),
                "commutant_dim": commutant_dim(&g),
            });
            emit_json(cli, &with_meta(&body, meta(cli, "ample-check"))?, out)
        }
        Command::ProjConst {
            input,
            p,
            group,
            grid,
            no_optimize,
        } => {
            json_only(cli, "proj-const")?;
            let k = io::read_generator_set(input)?;
            let p = p.unwrap_or(k.ambient_p());
            let g = match group {
                Some(path) => io::read_group(path)?,
                None => symmetry_group(&k)?,
            };
            let opts = LambdaOptions {
                grid_points: *grid,
                angle_tol: cli.global.angle_tol,
                optimize: !no_optimize,
                ..LambdaOptions::default()
            };
            if verbose {
                let _ = writeln!(err, "group order {}, grid {}", g.order(), grid);
            }
            let r = projection_constant_with(&k, p, &g, &opts)?;
            emit_json(cli, &with_meta(&r, meta(cli, "proj-const"))?, out)
        }
        Command::Counterexample { p, m_max, force_p } => {
            if p % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "p must be an even integer, got {p}"
                )));
            }
            let opts = LambdaOptions {
                angle_tol: cli.global.angle_tol,
                ..LambdaOptions::default()
            };
            let mut report = build_counterexample(p / 2, *m_max, *force_p, &opts)?;
            report.seed = cli.global.seed;
            if verbose {
                for row in &report.rows {
                    let _ = writeln!(err, "m = {}: lambda = {:.12}", row.m, row.lambda);
                }
            }
            match (cli.global.format, &cli.global.out) {
                (Format::Json, Some(path)) => {
                    write_counterexample(&report, path)?;
                    if verbose {
                        let _ = writeln!(
                            err,
                            "wrote {} and {}",
                            path.display(),
                            csv_path(path).display()
                        );
                    }
                    Ok(())
                }
                (Format::Json, None) => emit_json(cli, &serde_json::to_value(&report)?, out),
                (Format::Csv, _) => {
                    let rows: Vec<Vec<String>> = report
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.m.to_string(),
                                io::csv_number(r.lambda),
                                io::csv_number(r.euclid_c),
                            ]
                        })
                        .collect();
                    emit_csv(cli, &["m", "lambda", "euclid_c"], &rows, out)
                }
            }
        }
        Command::Cantor { depth } => {
            let ball = cantor_ball(*depth)?;
            match cli.global.format {
                Format::Csv => emit_csv(cli, &["x", "y"], &polygon_rows(&ball), out),
                Format::Json => {
                    let mut body = serde_json::to_value(PolygonFile::from_polygon(&ball))?;
                    body.as_object_mut()
                        .expect("object")
                        .insert("depth".into(), json!(depth));
                    emit_json(cli, &with_meta(&body, meta(cli, "cantor"))?, out)
                }
            }
        }
    }
}
