//! Command-line front end. [`run`] is the whole program minus process exit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::closed_form::{balanced_mechanism, optimal_boundary_homogeneous, optimal_line_blue, optimal_line_full};
use crate::error::{Error, Result};
use crate::graph::{boundary_graph_params_from, build_topology, ColoredGraph, LineSpec};
use crate::io::{self, to_canonical_json};
use crate::mechanism::{compare_dominance, expected_hamming_distortion, verify_dp, Mechanism, PrivacyParams};
use crate::morphism::{build_boundary_morphism, check_morphism, pullback, Morphism};
use crate::optimizer::optimize_with_boundary;
use crate::oracle::{find_improvement, grid_best, GridSpec, GridStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dpcolor", version, about = "Optimal differentially private answers to binary queries over dataset graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("epsilon").required(true).args(["eps", "eps_ln"])))]
struct PrivacyArgs {
    /// Privacy parameter epsilon.
    #[arg(long)]
    eps: Option<f64>,
    /// Epsilon given as ln(X); X = e^epsilon is kept exactly.
    #[arg(long = "eps-ln", value_name = "X")]
    eps_ln: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

impl PrivacyArgs {
    fn params(&self) -> Result<PrivacyParams> {
        match (self.eps, self.eps_ln) {
            (_, Some(x)) => PrivacyParams::from_exp(x, self.delta),
            (Some(e), None) => PrivacyParams::new(e, self.delta),
            (None, None) => Err(Error::InvalidParams("one of --eps or --eps-ln is required".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Topology, boundary line and boundary morphism of a graph.
    Inspect {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal mechanism on a line from the blue boundary's wrong-answer probability.
    Line {
        #[arg(long)]
        nb: usize,
        #[arg(long)]
        nr: usize,
        #[arg(long)]
        rb: f64,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal mechanism for fixed boundary truthfulness values.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bc: PathBuf,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also write the bare mechanism document here.
        #[arg(long)]
        mech_out: Option<PathBuf>,
    },
    /// Optimal mechanism with the same truthfulness on every blue boundary vertex.
    Homogeneous {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        mb: f64,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimal mechanism with equally truthful boundaries.
    Balanced {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Checks a mechanism against the privacy inequalities.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        mech: PathBuf,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dominance relation between two mechanisms.
    Compare {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expected Hamming distortion under a distribution over datasets.
    Utility {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        mech: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pulls a target mechanism back along a morphism.
    Pullback {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        morphism: PathBuf,
        #[arg(long)]
        mech: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Grid search; with --mech, certifies that no grid mechanism improves on it.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bc: PathBuf,
        #[arg(long)]
        mech: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[command(flatten)]
        privacy: PrivacyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Graphviz rendering, optionally labeled with a mechanism.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        mech: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Reports go to `stdout` unless redirected with `--out`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<ColoredGraph> {
    io::parse_graph(&read(path)?)
}

fn load_mechanism(path: &Path, g: &ColoredGraph) -> Result<Mechanism> {
    let m = io::parse_mechanism(&read(path)?)?;
    m.check_domain(g)?;
    Ok(m)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Parse(format!("cannot write output: {e}"))),
    }
}

fn emit_json<T: Serialize>(value: &T, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    if output.format != Format::Json {
        return Err(Error::PreconditionViolated("this command only produces JSON".into()));
    }
    emit(&to_canonical_json(value)?, output.out.as_deref(), stdout)
}

/// JSON emits `json_value`; DOT and CSV render `m` on `g`.
fn emit_mechanism<T: Serialize>(
    json_value: &T,
    g: &ColoredGraph,
    m: &Mechanism,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<()> {
    let text = match output.format {
        Format::Json => to_canonical_json(json_value)?,
        Format::Dot => io::to_dot(g, Some(m))?,
        Format::Csv => io::to_csv(g, m)?,
    };
    emit(&text, output.out.as_deref(), stdout)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Inspect { graph, output } => {
            let g = load_graph(&graph)?;
            let topo = build_topology(&g);
            let (spec, map, problem) = match (boundary_graph_params_from(&topo), build_boundary_morphism(&g)) {
                (Ok(spec), Ok(bm)) => (Some(spec), Some(bm.map), None),
                (Err(e), _) | (_, Err(e)) => (None, None, Some(e.to_string())),
            };
            let report = json!({
                "topology": topo,
                "line_spec": spec,
                "boundary_morphism": map,
                "problem": problem,
            });
            emit_json(&report, &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Line { nb, nr, rb, privacy, output } => {
            let p = privacy.params()?;
            let spec = LineSpec::new(nb, nr)?;
            let blue = optimal_line_blue(spec, rb, &p)?;
            let m = optimal_line_full(spec, rb, &p)?;
            let error_blue: Vec<f64> = (1..=nb).map(|i| blue.clamped(i).expect("blue node")).collect();
            let prob_blue_red: Vec<f64> =
                (nb + 1..=nb + nr).map(|i| m.prob_blue(&i.to_string()).expect("red node")).collect();
            let report = json!({
                "spec": spec,
                "tau": blue.tau,
                "blue_side": blue,
                "error_blue": error_blue,
                "prob_blue_red": prob_blue_red,
                "mechanism": m,
            });
            emit_mechanism(&report, &ColoredGraph::line(spec), &m, &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Solve { graph, bc, privacy, output, mech_out } => {
            let g = load_graph(&graph)?;
            let bc = io::parse_boundary_condition(&read(&bc)?)?;
            let p = privacy.params()?;
            let result = optimize_with_boundary(&g, &bc, &p)?;
            match &result.mechanism {
                Some(m) => {
                    if let Some(path) = &mech_out {
                        emit(&to_canonical_json(m)?, Some(path), stdout)?;
                    }
                    emit_mechanism(&result, &g, m, &output, stdout)?;
                    Ok(EXIT_OK)
                }
                None => {
                    emit_json(&result, &OutputArgs { format: Format::Json, out: output.out }, stdout)?;
                    Ok(EXIT_INFEASIBLE)
                }
            }
        }
        Command::Homogeneous { graph, mb, privacy, output } => {
            let g = load_graph(&graph)?;
            let m = optimal_boundary_homogeneous(&g, mb, &privacy.params()?)?;
            emit_mechanism(&m, &g, &m, &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Balanced { graph, privacy, output } => {
            let g = load_graph(&graph)?;
            let m = balanced_mechanism(&g, &privacy.params()?)?;
            emit_mechanism(&m, &g, &m, &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { graph, mech, privacy, tolerance, output } => {
            let g = load_graph(&graph)?;
            let m = load_mechanism(&mech, &g)?;
            let report = verify_dp(&g, &m, &privacy.params()?, tolerance)?;
            emit_json(&report, &output, stdout)?;
            Ok(if report.satisfied { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Compare { graph, first, second, tolerance, output } => {
            let g = load_graph(&graph)?;
            let (m1, m2) = (load_mechanism(&first, &g)?, load_mechanism(&second, &g)?);
            let d = compare_dominance(&g, &m1, &m2, tolerance)?;
            emit_json(&json!({ "dominance": d }), &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Utility { graph, mech, dist, output } => {
            let g = load_graph(&graph)?;
            let m = load_mechanism(&mech, &g)?;
            let weights = io::parse_distribution(&read(&dist)?)?.weights;
            let h = expected_hamming_distortion(&g, &m, &weights)?;
            emit_json(&json!({ "hamming_distortion": h }), &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Pullback { source, target, morphism, mech, output } => {
            let (src, tgt) = (load_graph(&source)?, load_graph(&target)?);
            let map = io::parse_morphism(&read(&morphism)?)?.map;
            let check = check_morphism(&src, &tgt, &map)?;
            if let Some((a, b)) = check.counterexample {
                return Err(Error::NotAMorphism(a, b));
            }
            let m2 = load_mechanism(&mech, &tgt)?;
            let m1 = pullback(&m2, &Morphism::new(&src, &tgt, map)?)?;
            emit_mechanism(&m1, &src, &m1, &output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { graph, bc, mech, step, max_vertices, privacy, output } => {
            let g = load_graph(&graph)?;
            let bc = io::parse_boundary_condition(&read(&bc)?)?;
            let p = privacy.params()?;
            let spec = GridSpec::new(step, max_vertices)?;
            match mech {
                Some(path) => {
                    let m = load_mechanism(&path, &g)?;
                    let improvement = find_improvement(&g, &m, &bc, &p, &spec)?;
                    let certified = improvement.is_none();
                    emit_json(&json!({ "certified": certified, "improvement": improvement }), &output, stdout)?;
                    Ok(if certified { EXIT_OK } else { EXIT_INFEASIBLE })
                }
                None => {
                    let report = grid_best(&g, &bc, &p, &spec)?;
                    emit_json(&report, &output, stdout)?;
                    Ok(if report.status == GridStatus::InfeasibleOnGrid { EXIT_INFEASIBLE } else { EXIT_OK })
                }
            }
        }
        Command::ExportDot { graph, mech, out } => {
            let g = load_graph(&graph)?;
            let m = mech.map(|path| load_mechanism(&path, &g)).transpose()?;
            emit(&io::to_dot(&g, m.as_ref())?, out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}
