use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use replikit::bdl::{parse_bdl, shape_oracle};
use replikit::codons::Strand;
use replikit::engine::RunError;
use replikit::machines::{
    body_fragment, body_program, copier_feed, corpus, decode_tape, encode_tape, replicate,
    run_assembler, run_block_tm, run_builder, run_copier_with_feed, BlockTmOutcome, MachineError,
    DEFAULT_CHANNEL,
};
use replikit::mdl::{info_bits, parse_mdl, to_world, MdlDocument};
use replikit::trace::render_frame;
use replikit::turing::{library, rules_to_trna, Move, TuringError, TuringMachine};
use replikit::world::canonical_text;
use replikit::{Cell, Kind, WorldConfig};

#[derive(Parser)]
#[command(
    name = "replikit",
    version,
    about = "Block-world simulator for self-replicating machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an MDL file.
    ParseMdl {
        #[arg(long)]
        mdl: PathBuf,
    },
    /// Print the tick-0 frame of an MDL file.
    Render {
        #[arg(long)]
        mdl: PathBuf,
    },
    /// Run an MDL world and write its trace.
    Simulate {
        #[arg(long)]
        mdl: PathBuf,
        #[arg(long)]
        ticks: u64,
        #[arg(long, env = "REPLIKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Trace file; stdout when absent.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Extra free normal block at `x,y,z`; repeatable.
        #[arg(long, value_parser = parse_cell)]
        payload: Vec<Cell>,
        #[arg(long, default_value_t = WorldConfig::default().push_capacity)]
        push_capacity: usize,
        #[arg(long, default_value_t = WorldConfig::default().max_ticks)]
        max_ticks: u64,
    },
    /// Run a BDL program through the block-level builder.
    Build {
        #[arg(long)]
        bdl: String,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Copy a strand with the block-level copier.
    Copy {
        #[arg(long)]
        strand: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, env = "REPLIKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Slip one mutation anticodon onto the feed (arity 4).
        #[arg(long)]
        mutate: bool,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Assemble a machine body from its components.
    Assemble {
        /// One of trna, builder, assembler, copier, conveyor.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Run a Turing machine.
    Turing {
        #[command(subcommand)]
        mode: TuringMode,
    },
    /// Run the scripted replication cycle over the mRNA stack.
    Replicate {
        #[arg(long)]
        cycles: usize,
        #[arg(long, env = "REPLIKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Put a mutation anticodon on every copier feed.
        #[arg(long)]
        mutate: bool,
    },
    /// Information content of an MDL file.
    InfoBits {
        #[arg(long)]
        mdl: PathBuf,
    },
    /// Write the machine corpus and its manifest.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TuringMode {
    /// Block-level run on the block Turing machine.
    Run(TuringArgs),
    /// Symbolic reference run.
    Ref(TuringArgs),
}

#[derive(clap::Args)]
struct TuringArgs {
    /// Library name (1complement, halt, loop, times2, incrementer) or a machine file.
    #[arg(long)]
    machine: String,
    #[arg(long)]
    tape: String,
    /// Start cell; defaults to the right end when the start state moves
    /// left, otherwise to the first non-blank cell.
    #[arg(long)]
    head: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
}

/// Failure classes with their own exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Code {
    Parse,
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("parse error")
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Code>() == Some(&Code::Parse) {
        return 2;
    }
    for cause in err.chain() {
        let budget = matches!(
            cause.downcast_ref::<MachineError>(),
            Some(MachineError::BudgetExhausted { .. })
        ) || cause.downcast_ref::<RunError>().is_some()
            || matches!(
                cause.downcast_ref::<TuringError>(),
                Some(TuringError::MaxSteps(_))
            );
        if budget {
            return 3;
        }
    }
    1
}

fn parsed<T, E>(r: std::result::Result<T, E>) -> Result<T>
where
    E: std::error::Error + Send + Sync + 'static,
{
    r.map_err(anyhow::Error::from).context(Code::Parse)
}

fn parse_cell(s: &str) -> std::result::Result<Cell, String> {
    let v: Vec<i32> = s
        .split(',')
        .map(|p| p.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| e.to_string())?;
    match v.as_slice() {
        [x, y, z] => Ok(Cell::new(*x, *y, *z)),
        _ => Err(format!("expected x,y,z, got {s:?}")),
    }
}

fn read_mdl(path: &Path) -> Result<MdlDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parsed(parse_mdl(&text)).with_context(|| path.display().to_string())
}

fn load_machine(name: &str) -> Result<TuringMachine> {
    if let Some(tm) = library::by_name(name) {
        return Ok(tm);
    }
    let text = fs::read_to_string(name)
        .with_context(|| format!("{name:?} is neither a library machine nor a readable file"))?;
    parsed(TuringMachine::parse(&text))
}

fn start_head(tm: &TuringMachine, tape: &str) -> usize {
    let len = tape.chars().count();
    if tm.move_of(tm.start()) == Some(Move::Left) {
        len.saturating_sub(1)
    } else {
        tape.chars().position(|c| Some(c) != tm.blank).unwrap_or(0)
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::ParseMdl { mdl } => {
            let doc = read_mdl(&mdl)?;
            println!(
                "OK: {} planes, {} blocks",
                doc.planes().len(),
                doc.block_count()
            );
        }
        Command::Render { mdl } => {
            let doc = read_mdl(&mdl)?;
            print!("{}", render_frame(&to_world(&doc, WorldConfig::default())));
        }
        Command::Simulate {
            mdl,
            ticks,
            seed,
            trace,
            payload,
            push_capacity,
            max_ticks,
        } => {
            let doc = read_mdl(&mdl)?;
            let config = WorldConfig {
                push_capacity,
                max_ticks,
                rng_seed: seed,
                ..WorldConfig::default()
            };
            config.validate()?;
            let mut world = to_world(&doc, config);
            for cell in &payload {
                world
                    .add_block(Kind::Normal, *cell)
                    .with_context(|| format!("payload at {cell}"))?;
            }
            let frames = replikit::run(&mut world, ticks)?;
            let name = mdl
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let header = format!("# replikit trace mdl={name} ticks={ticks} seed={seed}");
            let text = frames.to_text(&header);
            match trace {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
        }
        Command::Build { bdl, arity, budget } => {
            let program = parsed(parse_bdl(&bdl))?;
            let report = run_builder(&program, arity, budget)?;
            for (i, c) in report.components.iter().enumerate() {
                println!("component {}:", i + 1);
                print!("{}", c.canonical);
            }
            println!("ticks: {}", report.ticks);
        }
        Command::Copy {
            strand,
            arity,
            seed,
            mutate,
            budget,
        } => {
            let strand = parsed(Strand::parse(arity, &strand))?;
            let feed = copier_feed(arity, seed, mutate)?;
            let report = run_copier_with_feed(&strand, &feed, budget)?;
            println!("{}", report.letters);
            println!("rejected: {}", report.rejected);
            println!("ticks: {}", report.ticks);
        }
        Command::Assemble { target, budget } => {
            let Some(program) = body_program(&target) else {
                bail!("unknown target {target:?}; expected trna, builder, assembler, copier or conveyor");
            };
            let report = run_assembler(&shape_oracle(&program), budget)?;
            print!("{}", report.canonical);
            let same = report.canonical == canonical_text(&body_fragment(&program));
            println!(
                "matches {target} fragment: {}",
                if same { "yes" } else { "no" }
            );
            println!("ticks: {}", report.ticks);
            if !same {
                bail!("assembled {target} differs from its fragment");
            }
        }
        Command::Turing { mode } => match mode {
            TuringMode::Ref(args) => {
                let tm = load_machine(&args.machine)?;
                let head = args.head.unwrap_or_else(|| start_head(&tm, &args.tape));
                let r = tm.run(&args.tape, tm.start(), head as i64, args.budget as usize)?;
                println!("{}", r.tape_string());
                println!("outcome: {:?}, steps: {}", r.outcome, r.steps);
            }
            TuringMode::Run(args) => {
                let tm = load_machine(&args.machine)?;
                let head = args.head.unwrap_or_else(|| start_head(&tm, &args.tape));
                let strand = encode_tape(&tm, &args.tape)?;
                let channel = strand.len().max(DEFAULT_CHANNEL);
                let r = run_block_tm(&rules_to_trna(&tm)?, &strand, head, channel, args.budget)?;
                println!("{}", decode_tape(&tm, &r.tape));
                println!(
                    "outcome: {:?}, steps: {}, ticks: {}",
                    r.outcome, r.steps, r.ticks
                );
                if r.outcome == BlockTmOutcome::BudgetExhausted {
                    return Err(MachineError::BudgetExhausted {
                        budget: args.budget,
                    }
                    .into());
                }
            }
        },
        Command::Replicate {
            cycles,
            seed,
            mutate,
        } => {
            let report = replicate(cycles, seed, mutate)?;
            print!("{report}");
            if !report.is_exact() {
                bail!("replication was not exact");
            }
            println!("replication exact over {cycles} cycles");
        }
        Command::InfoBits { mdl } => {
            println!("{}", info_bits(&read_mdl(&mdl)?));
        }
        Command::Corpus { out } => {
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let files = corpus()?;
            for (name, text) in &files {
                fs::write(out.join(name), text).with_context(|| format!("writing {name}"))?;
            }
            println!("wrote {} files to {}", files.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
