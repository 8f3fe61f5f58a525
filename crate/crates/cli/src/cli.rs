use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hochlab::averaging::CocycleSpec;
use hochlab::chain::ComplexKind;
use hochlab::frame::FrameConfig;
use hochlab::homotopy::IdentityId;
use hochlab::norms::NormKind;

use crate::report::{run_scenario, summary, to_canonical, write_outputs, RunOptions, EXIT_PARSE};
use crate::scenario::{
    AlgebraRef, AveragingTask, BarTask, DecayTask, Expect, ExtensionRef, ExtensionTask, HomologyTask, IdentitiesTask,
    NormsTask, Scenario, Task,
};

#[derive(Parser, Debug)]
#[command(name = "hochlab", version, about = "Exact Hochschild homology scenarios and reports")]
pub struct Cli {
    /// Worker threads for running tasks (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Largest column count of any materialized matrix.
    #[arg(long, global = true)]
    pub budget_cols: Option<u64>,
    /// Write the differentials of homology tasks as sparse matrix files.
    #[arg(long, global = true)]
    pub dump_matrices: bool,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for report.json, per-task reports and summary.txt.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every task of a scenario file.
    Run {
        scenario: PathBuf,
        /// Run only the task with this index.
        #[arg(long)]
        task: Option<usize>,
    },
    /// Hochschild or bar homology dimensions.
    Homology {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum, default_value_t = KindArg::Hochschild)]
        kind: KindArg,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        cohomology: bool,
        /// Comma-separated expected dimensions, e.g. 1,0,0.
        #[arg(long, value_delimiter = ',')]
        expect_dims: Option<Vec<usize>>,
        #[command(flatten)]
        expect: ExpectArg,
    },
    /// Bar-complex acyclicity (H-unitality) up to a degree.
    Bar {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        max_degree: usize,
        #[command(flatten)]
        expect: ExpectArg,
    },
    /// Exact chain-homotopy identities on a shift frame.
    VerifyIdentities {
        /// `k,N` or `k,N,spare`.
        #[arg(long)]
        frame: Option<String>,
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long = "identity")]
        identities: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        degrees: Vec<usize>,
        #[arg(long)]
        sabotage: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long = "pivot")]
        pivots: Vec<usize>,
        #[arg(long)]
        corrupted: bool,
        #[command(flatten)]
        expect: ExpectArg,
    },
    /// Long exact sequence of an ideal extension.
    Les(ExtensionArgs),
    /// Excision comparison for an ideal extension.
    Excision(ExtensionArgs),
    /// Finite averaging of a cocycle over shift frames.
    AverageCocycle {
        #[command(flatten)]
        cocycle: CocycleArgs,
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[arg(long = "n", value_delimiter = ',')]
        blocks: Vec<usize>,
        #[command(flatten)]
        expect: ExpectArg,
    },
    /// Decay table of the averaged functional.
    Decay {
        #[command(flatten)]
        cocycle: CocycleArgs,
        #[arg(long)]
        k: usize,
        #[arg(long = "n", value_delimiter = ',')]
        blocks: Vec<usize>,
        #[command(flatten)]
        expect: ExpectArg,
    },
    /// Block-amplification and signed-permutation norm ratios.
    Norms {
        #[arg(long)]
        frame: String,
        #[arg(long, value_enum, default_value_t = NormArg::Linf)]
        norm: NormArg,
        #[arg(long = "n", value_delimiter = ',', default_value = "1,2")]
        blocks: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        expect: ExpectArg,
    },
}

#[derive(Args, Debug)]
pub struct ExpectArg {
    /// Expected verdict.
    #[arg(long, value_enum, default_value_t = ExpectValue::Pass)]
    pub expect: ExpectValue,
}

#[derive(Args, Debug)]
pub struct ExtensionArgs {
    /// `unitization:<algebra>`, `involution:<perm>` or `ideal:<algebra>:<i,j,..>`.
    #[arg(long)]
    pub extension: String,
    #[arg(long, value_enum, default_value_t = KindArg::Hochschild)]
    pub kind: KindArg,
    #[arg(long)]
    pub max_degree: usize,
    #[command(flatten)]
    pub expect: ExpectArg,
}

#[derive(Args, Debug)]
pub struct CocycleArgs {
    #[arg(long)]
    pub frame: String,
    #[arg(long, value_enum, default_value_t = CocycleArg::Random)]
    pub cocycle: CocycleArg,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = NormArg::Linf)]
    pub norm: NormArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KindArg {
    Hochschild,
    Bar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum NormArg {
    L1,
    Linf,
    L2Numeric,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CocycleArg {
    Random,
    Trace,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ExpectValue {
    Pass,
    Fail,
}

impl From<KindArg> for ComplexKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hochschild => ComplexKind::Hochschild,
            KindArg::Bar => ComplexKind::Bar,
        }
    }
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => NormKind::L1,
            NormArg::Linf => NormKind::Linf,
            NormArg::L2Numeric => NormKind::L2Numeric,
        }
    }
}

impl From<&ExpectArg> for Expect {
    fn from(e: &ExpectArg) -> Self {
        match e.expect {
            ExpectValue::Pass => Expect::Pass,
            ExpectValue::Fail => Expect::Fail,
        }
    }
}

impl From<CocycleArg> for CocycleSpec {
    fn from(c: CocycleArg) -> Self {
        match c {
            CocycleArg::Random => CocycleSpec::RandomCoboundary { seed: None, range: 3 },
            CocycleArg::Trace => CocycleSpec::TracePower {},
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect()
}

/// Parses the short algebra syntax used on the command line: `matrix:2`,
/// `scalar`, `zero`, `square-zero:1`, `unitization:<algebra>`,
/// `involution:1,0`, `frame-corner`, `frame-ambient` or `file:<path>`.
pub fn parse_algebra(text: &str) -> Result<AlgebraRef, String> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let number = |r: &str| r.parse::<usize>().map_err(|e| format!("bad size in {text:?}: {e}"));
    Ok(match head {
        "matrix" => AlgebraRef::Matrix { m: number(rest)? },
        "scalar" => AlgebraRef::Scalar {},
        "zero" => AlgebraRef::Zero {},
        "square-zero" => AlgebraRef::SquareZero { dim: number(rest)? },
        "unitization" => AlgebraRef::Unitization {
            of: Box::new(parse_algebra(rest)?),
        },
        "involution" => AlgebraRef::Involution {
            permutation: parse_list(rest)?,
            signs: None,
        },
        "frame-corner" => AlgebraRef::FrameCorner {},
        "frame-ambient" => AlgebraRef::FrameAmbient {},
        "file" => AlgebraRef::File { path: rest.to_string() },
        _ => return Err(format!("unknown algebra {text:?}")),
    })
}

pub fn parse_extension(text: &str) -> Result<ExtensionRef, String> {
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    Ok(match head {
        "unitization" => ExtensionRef::Unitization { of: parse_algebra(rest)? },
        "involution" => ExtensionRef::Involution {
            permutation: parse_list(rest)?,
            signs: None,
        },
        "ideal" => {
            let (alg, idx) = rest.rsplit_once(':').ok_or_else(|| format!("ideal needs basis indices: {text:?}"))?;
            ExtensionRef::Ideal {
                total: parse_algebra(alg)?,
                basis: parse_list(idx)?.into_iter().map(|i| vec![(i, "1".to_string())]).collect(),
            }
        }
        _ => return Err(format!("unknown extension {text:?}")),
    })
}

pub fn parse_frame(text: &str) -> Result<FrameConfig, String> {
    let v = parse_list(text)?;
    match v[..] {
        [k, n] => Ok(FrameConfig {
            k,
            n,
            spare: 0,
            coefficient_algebra: None,
        }),
        [k, n, spare] => Ok(FrameConfig {
            k,
            n,
            spare,
            coefficient_algebra: None,
        }),
        _ => Err(format!("frame must be k,N or k,N,spare: {text:?}")),
    }
}

fn parse_identity(text: &str) -> Result<IdentityId, String> {
    IdentityId::ALL
        .into_iter()
        .find(|id| id.as_str() == text)
        .ok_or_else(|| format!("unknown identity {text:?}"))
}

/// One-task scenario equivalent to a verb invocation.
fn verb_scenario(command: &Command) -> Result<Scenario, String> {
    let single = |name: &str, task: Task| Scenario {
        name: name.to_string(),
        seed: 0,
        budget_cols: None,
        algebra: None,
        frame: None,
        tasks: vec![task],
    };
    Ok(match command {
        Command::Run { .. } => unreachable!("run loads a file"),
        Command::Homology {
            algebra,
            kind,
            max_degree,
            cohomology,
            expect_dims,
            expect,
        } => single(
            "homology",
            Task::Homology(HomologyTask {
                expect: expect.into(),
                label: None,
                algebra: Some(parse_algebra(algebra)?),
                kind: (*kind).into(),
                max_degree: *max_degree,
                cohomology: *cohomology,
                expect_dims: expect_dims.clone(),
            }),
        ),
        Command::Bar {
            algebra,
            max_degree,
            expect,
        } => single(
            "bar",
            Task::BarAcyclicity(BarTask {
                expect: expect.into(),
                label: None,
                algebra: Some(parse_algebra(algebra)?),
                max_degree: *max_degree,
            }),
        ),
        Command::VerifyIdentities {
            frame,
            algebra,
            identities,
            degrees,
            sabotage,
            samples,
            pivots,
            corrupted,
            expect,
        } => single(
            "verify-identities",
            Task::VerifyIdentities(IdentitiesTask {
                expect: expect.into(),
                label: None,
                frame: frame.as_deref().map(parse_frame).transpose()?,
                algebra: algebra.as_deref().map(parse_algebra).transpose()?,
                identities: if identities.is_empty() {
                    None
                } else {
                    Some(identities.iter().map(|s| parse_identity(s)).collect::<Result<_, _>>()?)
                },
                degrees: degrees.clone(),
                sabotage: *sabotage,
                samples: *samples,
                pivots: (!pivots.is_empty()).then(|| pivots.clone()),
                kinds: None,
                corrupted: *corrupted,
            }),
        ),
        Command::Les(a) | Command::Excision(a) => {
            let t = ExtensionTask {
                expect: (&a.expect).into(),
                label: None,
                extension: Some(parse_extension(&a.extension)?),
                kind: a.kind.into(),
                max_degree: a.max_degree,
            };
            match command {
                Command::Les(_) => single("les", Task::Les(t)),
                _ => single("excision", Task::Excision(t)),
            }
        }
        Command::AverageCocycle { cocycle, k, blocks, expect } => single(
            "average-cocycle",
            Task::AverageCocycle(AveragingTask {
                expect: expect.into(),
                label: None,
                frame: Some(parse_frame(&cocycle.frame)?),
                cocycle: cocycle.cocycle.into(),
                degree: cocycle.degree,
                k: k.clone(),
                blocks: blocks.clone(),
                norm: cocycle.norm.into(),
            }),
        ),
        Command::Decay { cocycle, k, blocks, expect } => single(
            "decay",
            Task::Decay(DecayTask {
                expect: expect.into(),
                label: None,
                frame: Some(parse_frame(&cocycle.frame)?),
                cocycle: cocycle.cocycle.into(),
                degree: cocycle.degree,
                k: *k,
                blocks: blocks.clone(),
                norm: cocycle.norm.into(),
            }),
        ),
        Command::Norms {
            frame,
            norm,
            blocks,
            samples,
            expect,
        } => single(
            "norms",
            Task::Norms(NormsTask {
                expect: expect.into(),
                label: None,
                frame: Some(parse_frame(frame)?),
                norm: (*norm).into(),
                element: None,
                blocks: blocks.clone(),
                samples: *samples,
            }),
        ),
    })
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let (scenario, base_dir, only_task) = match &cli.command {
        Command::Run { scenario, task } => match Scenario::load(scenario) {
            Ok(s) => (s, scenario.parent().unwrap_or(Path::new(".")).to_path_buf(), *task),
            Err(e) => {
                eprintln!("error: {}: {e}", scenario.display());
                return EXIT_PARSE;
            }
        },
        other => match verb_scenario(other) {
            Ok(s) => (s, PathBuf::from("."), None),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_PARSE;
            }
        },
    };
    let options = RunOptions {
        jobs: cli.jobs,
        seed: cli.seed,
        budget_cols: cli.budget_cols,
        dump_matrices: cli.dump_matrices,
        only_task,
    };
    let outcome = match run_scenario(&scenario, &base_dir, &options) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARSE;
        }
    };
    if let Some(dir) = &cli.output_dir {
        if let Err(e) = write_outputs(&outcome, dir) {
            eprintln!("error: writing {}: {e}", dir.display());
            return crate::report::EXIT_VERDICT;
        }
    }
    if cli.json {
        print!("{}", to_canonical(&outcome.report));
    } else {
        print!("{}", summary(&outcome.report));
    }
    for t in outcome.report["tasks"].as_array().into_iter().flatten() {
        if let Some(msg) = t["error"]["message"].as_str() {
            eprintln!("task {} ({}) failed in {}: {msg}", t["index"], t["task"].as_str().unwrap_or("?"), t["module"].as_str().unwrap_or("?"));
        }
    }
    outcome.exit_code
}
