//! Machine factory and runners.
//!
//! Every machine is an MDL fragment (a rigid frame holding anchored movers
//! and gluers) plus named ports. Runners load a fragment, stage free parts at
//! its ports, drive the engine and read the product back from the world.
//! Staging parts at a port, collecting them from a port and shifting a strand
//! or product between cycles are host actions; matching, seating, writing,
//! gluing and discarding are done by the engine.

mod assembler;
mod block_tm;
mod builder;
mod codon_maker;
mod conveyor;
mod copier;
mod layout;
mod manifest;
mod matcher;
mod replicate;

pub use assembler::{
    body_fragment, body_program, piece_blocks, run_assembler, run_assembler_pieces, AssemblyReport,
    MAX_COMPONENT_ROWS,
};
pub use block_tm::{
    decode_tape, default_head, encode_tape, run_block_tm, run_block_tm_text, BlockTmOutcome,
    BlockTmReport, DEFAULT_CHANNEL,
};
pub use builder::{run_builder, BuildReport, BuiltComponent};
pub use codon_maker::{run_codon_maker, CodonMakerMode, CodonMakerReport};
pub use conveyor::{conveyor_path, run_belt, run_conveyor};
pub use copier::{
    copier_feed, run_copier, run_copier_with_feed, CopyReport, FeedItem, MAX_STRAND_ROWS,
};
pub use manifest::{parse_manifest, write_manifest, ManifestEntry};
pub use matcher::{matcher_scene, MatcherScene};
pub use replicate::{
    initial_stack, replicate, Generation, MachineBuild, Mrna, ReplicationReport, MRNA_STACK,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::codons::CodonError;
use crate::engine::{step, Event, EventKind};
use crate::mdl::MdlDocument;
use crate::turing::TuringError;
use crate::world::{BlockId, Cell, World, WorldConfig, WorldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("tick budget {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("collision: {0}")]
    Collision(String),
    #[error("machine did not behave as designed: {0}")]
    Contract(String),
    #[error(transparent)]
    Codon(#[from] CodonError),
    #[error(transparent)]
    Turing(#[from] TuringError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
}

/// The machine families the factory knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineKind {
    /// Carries a payload right by `n` cells and back once per cycle.
    Conveyor {
        n: u32,
    },
    /// Advances a queue of items by one cell per cycle.
    Belt,
    Matcher {
        arity: usize,
    },
    Builder {
        arity: usize,
    },
    Assembler,
    Copier {
        arity: usize,
    },
    CodonMaker,
    /// Tape channel holding up to `channel` codons either side of the head.
    BlockTm {
        channel: usize,
    },
}

impl MachineKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            MachineKind::Conveyor { .. } => "conveyor",
            MachineKind::Belt => "belt",
            MachineKind::Matcher { .. } => "matcher",
            MachineKind::Builder { .. } => "builder",
            MachineKind::Assembler => "assembler",
            MachineKind::Copier { .. } => "copier",
            MachineKind::CodonMaker => "codon_maker",
            MachineKind::BlockTm { .. } => "block_tm",
        }
    }

    /// Parameters as `key=value` text; empty for parameterless kinds.
    pub fn params(&self) -> String {
        match self {
            MachineKind::Conveyor { n } => format!("n={n}"),
            MachineKind::Matcher { arity }
            | MachineKind::Builder { arity }
            | MachineKind::Copier { arity } => {
                format!("arity={arity}")
            }
            MachineKind::BlockTm { channel } => format!("channel={channel}"),
            _ => String::new(),
        }
    }

    /// Inverse of `kind_name` and `params`.
    pub fn parse(kind: &str, params: &str) -> Result<MachineKind, MachineError> {
        let mut values = BTreeMap::new();
        for p in params.split_whitespace() {
            let (k, v) = p.split_once('=').ok_or_else(|| {
                MachineError::Unsupported(format!("parameter {p:?} is not key=value"))
            })?;
            let v: usize = v.parse().map_err(|_| {
                MachineError::Unsupported(format!("parameter {p:?} is not a number"))
            })?;
            values.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            values
                .get(k)
                .copied()
                .ok_or_else(|| MachineError::Unsupported(format!("{kind} needs {k}=...")))
        };
        Ok(match kind {
            "conveyor" => MachineKind::Conveyor {
                n: get("n")? as u32,
            },
            "belt" => MachineKind::Belt,
            "matcher" => MachineKind::Matcher {
                arity: get("arity")?,
            },
            "builder" => MachineKind::Builder {
                arity: get("arity")?,
            },
            "assembler" => MachineKind::Assembler,
            "copier" => MachineKind::Copier {
                arity: get("arity")?,
            },
            "codon_maker" => MachineKind::CodonMaker,
            "block_tm" => MachineKind::BlockTm {
                channel: get("channel")?,
            },
            other => {
                return Err(MachineError::Unsupported(format!(
                    "unknown machine kind {other:?}"
                )))
            }
        })
    }
}

impl fmt::Display for MachineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        if p.is_empty() {
            f.write_str(self.kind_name())
        } else {
            write!(f, "{}({p})", self.kind_name())
        }
    }
}

/// Which runner validates a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contract {
    Oscillate,
    Fifo,
    Match,
    Build,
    Assemble,
    Copy,
    MakeCodons,
    RunTape,
}

impl Contract {
    pub fn name(self) -> &'static str {
        match self {
            Contract::Oscillate => "oscillate",
            Contract::Fifo => "fifo",
            Contract::Match => "match",
            Contract::Build => "build",
            Contract::Assemble => "assemble",
            Contract::Copy => "copy",
            Contract::MakeCodons => "make_codons",
            Contract::RunTape => "run_tape",
        }
    }

    pub fn from_name(s: &str) -> Option<Contract> {
        [
            Contract::Oscillate,
            Contract::Fifo,
            Contract::Match,
            Contract::Build,
            Contract::Assemble,
            Contract::Copy,
            Contract::MakeCodons,
            Contract::RunTape,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

/// An inclusive box of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Port {
    pub lo: Cell,
    pub hi: Cell,
}

impl Port {
    pub fn new(a: Cell, b: Cell) -> Port {
        Port {
            lo: Cell::new(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z)),
            hi: Cell::new(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z)),
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        (self.lo.x..=self.hi.x).contains(&c.x)
            && (self.lo.y..=self.hi.y).contains(&c.y)
            && (self.lo.z..=self.hi.z).contains(&c.z)
    }

    pub fn shifted(&self, by: Cell) -> Port {
        Port {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }

    /// Blocks of `world` with a cell inside the box.
    pub fn occupants(&self, world: &World) -> Vec<BlockId> {
        let mut ids: Vec<BlockId> = world
            .occupied_cells()
            .filter(|(c, _)| self.contains(*c))
            .map(|(_, id)| id)
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={}..{} y={}..{} z={}..{}",
            self.lo.x, self.hi.x, self.lo.y, self.hi.y, self.lo.z, self.hi.z
        )
    }
}

/// A machine fragment with its ports and timing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub name: String,
    pub kind: MachineKind,
    pub mdl: MdlDocument,
    /// Where the fragment's MDL origin sits in the runner's coordinates.
    pub origin: Cell,
    /// Port boxes in MDL coordinates.
    pub ports: BTreeMap<String, Port>,
    pub cycle_length: u64,
    pub contract: Contract,
    pub config: WorldConfig,
}

impl Machine {
    /// A fresh world holding the fragment at its runner origin.
    pub fn instantiate(&self) -> World {
        let mut world = World::new(self.config.clone());
        self.mdl
            .place(&mut world, self.origin)
            .expect("fragment cells are distinct");
        world
    }

    /// A port in runner coordinates.
    pub fn port(&self, name: &str) -> Port {
        self.ports
            .get(name)
            .unwrap_or_else(|| panic!("{} has no {name} port", self.name))
            .shifted(self.origin)
    }

    /// Checks that the fragment loads as one rigid compound and that every
    /// port lies within one cell of its bounding box.
    pub fn check(&self) -> Result<(), String> {
        let world = self.instantiate();
        let compounds = world.compounds();
        if compounds.len() != 1 {
            return Err(format!(
                "{} loads as {} compounds",
                self.name,
                compounds.len()
            ));
        }
        let (lo, hi) = world
            .bounds()
            .ok_or_else(|| format!("{} is empty", self.name))?;
        let near = Port::new(lo + Cell::new(-1, -1, -1), hi + Cell::new(1, 1, 1));
        for (name, p) in &self.ports {
            let p = p.shifted(self.origin);
            if !near.contains(p.lo) || !near.contains(p.hi) {
                return Err(format!(
                    "{} port {name} ({p}) is away from the fragment",
                    self.name
                ));
            }
        }
        Ok(())
    }
}

/// Builds the fragment for a machine kind.
pub fn make_machine(kind: MachineKind) -> Result<Machine, MachineError> {
    match kind {
        MachineKind::Conveyor { n } => conveyor::conveyor(n),
        MachineKind::Belt => conveyor::belt(),
        MachineKind::Matcher { arity } => matcher::matcher(arity),
        MachineKind::Builder { arity } => builder::builder(arity),
        MachineKind::Assembler => assembler::assembler(),
        MachineKind::Copier { arity } => copier::copier(arity),
        MachineKind::CodonMaker => codon_maker::codon_maker(),
        MachineKind::BlockTm { channel } => block_tm::block_tm(channel),
    }
}

/// The machines shipped as the corpus, in manifest order.
pub fn corpus_kinds() -> Vec<MachineKind> {
    vec![
        MachineKind::Conveyor { n: 1 },
        MachineKind::Conveyor { n: 2 },
        MachineKind::Belt,
        MachineKind::Matcher { arity: 2 },
        MachineKind::Matcher { arity: 4 },
        MachineKind::Builder { arity: 4 },
        MachineKind::Assembler,
        MachineKind::Copier { arity: 2 },
        MachineKind::Copier { arity: 4 },
        MachineKind::CodonMaker,
        MachineKind::BlockTm { channel: 8 },
    ]
}

/// Name of the corpus manifest file.
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Every corpus file as `(file name, contents)`: one MDL file per machine
/// plus the manifest.
pub fn corpus() -> Result<Vec<(String, String)>, MachineError> {
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for kind in corpus_kinds() {
        let m = make_machine(kind)?;
        let entry = ManifestEntry::from_machine(&m);
        files.push((entry.file.clone(), crate::mdl::serialize_mdl(&m.mdl)));
        entries.push(entry);
    }
    files.push((MANIFEST_FILE.to_string(), write_manifest(&entries)));
    Ok(files)
}

/// Event counts per kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventSummary {
    pub counts: BTreeMap<EventKind, usize>,
}

impl EventSummary {
    pub fn add(&mut self, events: &[Event]) {
        for e in events {
            *self.counts.entry(e.kind).or_default() += 1;
        }
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }
}

impl fmt::Display for EventSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(k, n)| format!("{}={n}", k.name()))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// What a runner produced, in text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub ticks: u64,
    pub product: String,
    pub events: EventSummary,
}

/// Steps a world under a tick budget, keeping an event summary.
pub(crate) struct Driver {
    pub world: World,
    pub budget: u64,
    pub used: u64,
    pub summary: EventSummary,
}

impl Driver {
    pub fn new(world: World, budget: u64) -> Driver {
        Driver {
            world,
            budget,
            used: 0,
            summary: EventSummary::default(),
        }
    }

    pub fn tick(&mut self) -> Result<Vec<Event>, MachineError> {
        if self.used >= self.budget {
            return Err(MachineError::BudgetExhausted {
                budget: self.budget,
            });
        }
        let events = step(&mut self.world);
        self.used += 1;
        self.summary.add(&events);
        Ok(events)
    }

    /// Runs until the clock shows `phase` within the cycle; returns all events.
    pub fn run_to_phase(&mut self, phase: u64) -> Result<Vec<Event>, MachineError> {
        let period = self.world.config.cycle_period;
        let mut all = Vec::new();
        while self.world.tick % period != phase {
            all.extend(self.tick()?);
        }
        Ok(all)
    }

    /// Places loose blocks; each group becomes one bonded compound.
    pub fn stage(
        &mut self,
        group: &[(Cell, crate::world::Kind, bool)],
    ) -> Result<Vec<BlockId>, MachineError> {
        for (c, _, _) in group {
            if let Some(other) = self.world.at(*c) {
                return Err(MachineError::Collision(format!(
                    "cell {c} is held by {other}"
                )));
            }
        }
        let mut ids = Vec::new();
        for (c, k, active) in group {
            ids.push(self.world.add_block_with(*k, *c, *active)?);
        }
        self.world.bond_all_adjacent(&ids)?;
        Ok(ids)
    }

    pub fn remove_all(&mut self, ids: &[BlockId]) -> Result<(), MachineError> {
        for id in ids {
            self.world.remove_block(*id)?;
        }
        Ok(())
    }
}

pub(crate) fn expanded(events: &[Event], mover: BlockId) -> Option<u64> {
    events
        .iter()
        .find(|e| e.subject == mover && e.kind == EventKind::MoverExpanded)
        .map(|e| e.detail)
}

pub(crate) fn blocked(events: &[Event], mover: BlockId) -> bool {
    events
        .iter()
        .any(|e| e.subject == mover && e.kind == EventKind::MoverBlocked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_fragments_are_rigid_with_nearby_ports() {
        for kind in corpus_kinds() {
            let m = make_machine(kind).unwrap();
            m.check().unwrap();
            assert_eq!(m.kind, kind);
        }
    }

    #[test]
    fn shipped_corpus_matches_the_generator() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
        let files = corpus().unwrap();
        for (name, text) in &files {
            let shipped = std::fs::read_to_string(dir.join(name)).unwrap_or_default();
            assert_eq!(
                &shipped, text,
                "{name} is stale; regenerate with `replikit corpus --out crates/core/corpus`"
            );
        }
        let entries = parse_manifest(&files.last().unwrap().1).unwrap();
        for (entry, (name, text)) in entries.iter().zip(&files) {
            assert_eq!(&entry.file, name);
            let world = crate::mdl::to_world(
                &crate::mdl::parse_mdl(text).unwrap(),
                WorldConfig::default(),
            );
            assert_eq!(world.compounds().len(), 1, "{name}");
        }
    }

    #[test]
    fn kind_text_round_trips() {
        for kind in corpus_kinds() {
            assert_eq!(
                MachineKind::parse(kind.kind_name(), &kind.params()).unwrap(),
                kind
            );
        }
        assert!(MachineKind::parse("conveyor", "").is_err());
        assert!(MachineKind::parse("teleporter", "").is_err());
    }

    #[test]
    fn unsupported_params() {
        for kind in [
            MachineKind::Conveyor { n: 0 },
            MachineKind::Builder { arity: 3 },
            MachineKind::Copier { arity: 6 },
            MachineKind::Matcher { arity: 1 },
            MachineKind::BlockTm { channel: 0 },
        ] {
            assert!(
                matches!(make_machine(kind), Err(MachineError::Unsupported(_))),
                "{kind}"
            );
        }
    }
}
