//! Command-line front end: parse group files, run closure / oracle /
//! embed / info / verify, emit JSON results on stdout.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use format::{group_to_file, parse_group_file, NamedGroup};
use mclosure::engine::{ClosureTrace, GroupClass, TraceKind, TraceNode};
use mclosure::{Caps, GeneratedGroup};

#[derive(Parser)]
#[command(
    name = "mclosure",
    version,
    about = "m-closures of permutation groups: recursive engine, brute-force oracle, embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Maximum number of cells in a tuple table
    #[arg(long, global = true, default_value_t = 10_000_000)]
    table_cap: usize,
    /// Degree cap for the brute-force closure at arity 2
    #[arg(long, global = true, default_value_t = 16)]
    m2_degree_cap: usize,
    /// Degree cap for the brute-force closure at arity >= 3
    #[arg(long, global = true, default_value_t = 12)]
    m3_degree_cap: usize,
    /// Degree cap for product-action wreaths
    #[arg(long, global = true, default_value_t = 4096)]
    product_degree_cap: usize,
    /// Cap for exhaustive element enumeration
    #[arg(long, global = true, default_value_t = 100_000)]
    element_cap: usize,
    /// Cap on enumerated block systems per decomposition search
    #[arg(long, global = true, default_value_t = 10_000)]
    block_system_cap: usize,
    /// Node cap for decomposition subset searches
    #[arg(long, global = true, default_value_t = 1_000_000)]
    search_cap: usize,
    /// Read generators in cycle notation instead of image arrays
    #[arg(long, global = true)]
    cycles: bool,
    /// Force the sequential reference implementations
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the m-closure with the recursive engine (m >= 3)
    Closure {
        /// Arity of the closure
        #[arg(short)]
        m: usize,
        /// Input group file
        #[arg(short)]
        input: PathBuf,
        /// Group class the engine certifies
        #[arg(long, value_enum, default_value_t = ClassArg::Solvable)]
        class: ClassArg,
        /// Also write the closure as a group file
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Compute the m-closure by definition (brute-force search)
    Oracle {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        input: PathBuf,
        #[arg(short)]
        output: Option<PathBuf>,
    },
    /// Solve the embedding problem into a product of smaller sections
    Embed {
        #[arg(short)]
        input: PathBuf,
    },
    /// Degree, order, orbits, and transitivity/primitivity/solvability
    Info {
        #[arg(short)]
        input: PathBuf,
    },
    /// Run the property suites over a directory of group files
    Verify {
        /// Directory of .json group files (defaults to the built-in corpus)
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Solvable,
    Odd,
    All,
}

impl From<ClassArg> for GroupClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Solvable => GroupClass::Solvable,
            ClassArg::Odd => GroupClass::OddOrder,
            ClassArg::All => GroupClass::All,
        }
    }
}

impl Cli {
    fn caps(&self) -> Caps {
        Caps {
            table_cells: self.table_cap,
            oracle_degree_m2: self.m2_degree_cap,
            oracle_degree_m3: self.m3_degree_cap,
            product_degree: self.product_degree_cap,
            element_enumeration: self.element_cap,
            block_systems: self.block_system_cap,
            search_nodes: self.search_cap,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let caps = cli.caps();
    match &cli.command {
        Command::Closure {
            m,
            input,
            class,
            output,
        } => {
            let named = load(input, cli.cycles)?;
            let (closure, trace) =
                run_engine(&named.group, *m, (*class).into(), &caps, cli.sequential)
                    .map_err(|e| e.to_string())?;
            let name = named.name.map(|n| format!("{n}^({m})"));
            emit_group_result(&closure, name, Some(&trace), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { m, input, output } => {
            let named = load(input, cli.cycles)?;
            let closure = run_oracle(&named.group, *m, &caps, cli.sequential)
                .map_err(|e| e.to_string())?;
            let name = named.name.map(|n| format!("{n}^({m})"));
            emit_group_result(&closure, name, None, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed { input } => {
            let named = load(input, cli.cycles)?;
            let result = mclosure::solve_embedding(&named.group, &caps)
                .map_err(|e| e.to_string())?;
            let value = match result {
                Some(e) => json!({
                    "found": true,
                    "operator": e.operator.symbol(),
                    "k": group_to_file(&e.k, None),
                    "l": group_to_file(&e.l, None),
                    "f": e.map.images(),
                }),
                None => json!({ "found": false }),
            };
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Info { input } => {
            let named = load(input, cli.cycles)?;
            let g = &named.group;
            let value = json!({
                "name": named.name,
                "degree": g.degree(),
                "order": g.order().to_string(),
                "orbits": g.orbits(),
                "transitive": g.is_transitive(),
                "primitive": mclosure::blocks::is_primitive(g),
                "solvable": g.is_solvable().map_err(|e| e.to_string())?,
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { corpus } => {
            let groups = match corpus {
                Some(dir) => load_corpus(dir, cli.cycles)?,
                None => mclosure::verify::default_corpus(),
            };
            if groups.is_empty() {
                return Err("the corpus is empty".into());
            }
            let results = mclosure::verify::run_suite(&groups, &caps);
            let mut all_passed = true;
            for r in &results {
                if r.passed {
                    println!("PASS {} ({} groups)", r.name, r.checked);
                } else {
                    all_passed = false;
                    println!("FAIL {}: {}", r.name, r.detail);
                }
            }
            println!(
                "{} of {} properties passed over {} groups",
                results.iter().filter(|r| r.passed).count(),
                results.len(),
                groups.len()
            );
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn load(path: &Path, cycles: bool) -> Result<NamedGroup, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_group_file(&text, cycles)
}

fn load_corpus(dir: &Path, cycles: bool) -> Result<Vec<(String, GeneratedGroup)>, String> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("cannot read {}: {e}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut groups = Vec::with_capacity(paths.len());
    for path in paths {
        let named = load(&path, cycles)?;
        let fallback = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        groups.push((named.name.unwrap_or(fallback), named.group));
    }
    Ok(groups)
}

fn emit_group_result(
    group: &GeneratedGroup,
    name: Option<String>,
    trace: Option<&ClosureTrace>,
    output: Option<&Path>,
) -> Result<(), String> {
    let file = group_to_file(group, name);
    let mut value = json!({
        "group": file,
        "order": group.order().to_string(),
    });
    if let Some(trace) = trace {
        value["trace"] = trace_json(&trace.root);
        value["oracleCalls"] = json!(trace.oracle_calls());
    }
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    if let Some(path) = output {
        let text = serde_json::to_string_pretty(&value["group"]).unwrap();
        fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn trace_json(node: &TraceNode) -> serde_json::Value {
    match &node.kind {
        TraceKind::Base { fast_path } => json!({
            "op": "base",
            "degree": node.degree,
            "fastPath": fast_path,
        }),
        TraceKind::Split {
            op,
            relative_call,
            left,
            right,
        } => json!({
            "op": op.symbol(),
            "degree": node.degree,
            "relativeCall": relative_call,
            "left": trace_json(left),
            "right": trace_json(right),
        }),
    }
}

fn run_engine(
    g: &GeneratedGroup,
    m: usize,
    class: GroupClass,
    caps: &Caps,
    sequential: bool,
) -> mclosure::Result<(GeneratedGroup, ClosureTrace)> {
    #[cfg(feature = "parallel")]
    if !sequential {
        return mclosure::engine::m_closure_par(g, m, class, caps);
    }
    let _ = sequential;
    mclosure::engine::m_closure(g, m, class, caps)
}

fn run_oracle(
    g: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    sequential: bool,
) -> mclosure::Result<GeneratedGroup> {
    #[cfg(feature = "parallel")]
    if !sequential {
        return mclosure::closure::brute_closure_par(g, m, caps);
    }
    let _ = sequential;
    mclosure::closure::brute_closure(g, m, caps)
}
