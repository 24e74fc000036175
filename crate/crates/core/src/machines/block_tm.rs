use std::collections::BTreeSet;

use super::layout::Layout;
use super::matcher::group;
use super::{
    blocked, expanded, Contract, Driver, EventSummary, Machine, MachineError, MachineKind,
    RunReport,
};
use crate::codons::{alphabet, anticodon_shape, codon_shape, complement, CodonPattern, Strand};
use crate::turing::{rules_to_trna, Move, Peg, RuleTrna, TuringError, TuringMachine};
use crate::world::{BlockId, Cell, Direction, World, WorldConfig};

/// Channel of the shipped block TM.
pub const DEFAULT_CHANNEL: usize = 8;

pub(crate) fn block_tm(channel: usize) -> Result<Machine, MachineError> {
    if channel == 0 || channel > 32 {
        return Err(MachineError::Unsupported(format!(
            "block TM channel {channel}"
        )));
    }
    let ch = channel as i32;
    let c = Cell::new;
    let mut l = Layout::new();
    l.normal((-2 * ch..2 * ch).map(|y| c(-1, y, 0)));
    l.port("TAPE", c(0, -2 * ch, 0), c(1, 2 * ch - 1, 0));
    l.port("INPUT", c(0, 0, 0), c(1, 1, 0));
    l.port("FEED", c(2, 0, 0), c(3, 1, 0));
    l.port("WRITE", c(0, 0, 1), c(1, 1, 1));
    l.port("DISCARD", c(1, 0, 1), c(2, 1, 1));
    l.port("SPENT", c(0, 0, -1), c(1, 1, -1));
    l.keep_out_box(c(0, -2 * ch - 2, -1), c(3, 2 * ch + 2, 1));
    l.keep_out_box(c(0, 0, -2), c(1, 1, -2));
    l.mover(c(4, 0, 0), Direction::NegX, 0);
    l.mover(c(2, 0, -1), Direction::PosZ, 2);
    l.mover(c(0, 0, 2), Direction::NegZ, 6);
    Ok(l.finish(
        MachineKind::BlockTm { channel },
        10,
        Contract::RunTape,
        WorldConfig::default(),
    ))
}

/// How a block-level run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockTmOutcome {
    /// A rule with the halt peg fired.
    Halted,
    /// Every rule on the belt was turned away at the current cell.
    Stuck,
    /// The head moved past the end of the tape.
    OffTape,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTmReport {
    pub tape: Strand,
    pub outcome: BlockTmOutcome,
    pub head: i64,
    pub steps: usize,
    pub moves: Vec<Move>,
    pub ticks: u64,
    pub events: EventSummary,
}

impl From<BlockTmReport> for RunReport {
    fn from(r: BlockTmReport) -> RunReport {
        RunReport {
            ticks: r.ticks,
            product: r.tape.letters(),
            events: r.events,
        }
    }
}

fn symbol_codons() -> Vec<CodonPattern> {
    alphabet(2).expect("arity 2")
}

/// Tape text as a strand of 2-codons, symbol i spelled by codon i.
pub fn encode_tape(tm: &TuringMachine, tape: &str) -> Result<Strand, MachineError> {
    let codons = symbol_codons();
    let cells = tape
        .chars()
        .map(|ch| {
            let i = tm
                .symbols
                .iter()
                .position(|s| *s == ch)
                .ok_or(TuringError::UnknownSymbol(ch))?;
            codons
                .get(i)
                .cloned()
                .ok_or_else(|| TuringError::Capacity(format!("symbol {ch:?} has no 2-codon")))
        })
        .collect::<Result<Vec<_>, TuringError>>()?;
    Ok(Strand::new(cells)?)
}

pub fn decode_tape(tm: &TuringMachine, tape: &Strand) -> String {
    let codons = symbol_codons();
    tape.codons
        .iter()
        .map(|c| {
            codons
                .iter()
                .position(|k| k == c)
                .and_then(|i| tm.symbols.get(i))
                .copied()
                .unwrap_or('?')
        })
        .collect()
}

/// Pattern spelled by the loose codon whose backing starts at `base`.
fn read_codon(world: &World, base: Cell) -> Option<CodonPattern> {
    world.at(base)?;
    let bits = (0..2)
        .map(|r| world.at(base + Cell::new(1, r, 0)).is_some())
        .collect();
    CodonPattern::new(bits).ok()
}

/// Runs rule tRNA over a framed tape: each cycle tries rules from the belt
/// until one seats, writes its codon from above, then moves the tape as its
/// peg says.
pub fn run_block_tm(
    rules: &[RuleTrna],
    tape: &Strand,
    head: usize,
    channel: usize,
    budget: u64,
) -> Result<BlockTmReport, MachineError> {
    if rules.iter().any(RuleTrna::is_composite) {
        return Err(MachineError::Unsupported(
            "state codons need the composite tRNA machine".into(),
        ));
    }
    if tape.arity() != 2 || tape.len() > channel || head >= tape.len() {
        return Err(MachineError::Unsupported(format!(
            "tape of {} arity-{} codons with head {head} does not fit channel {channel}",
            tape.len(),
            tape.arity()
        )));
    }
    let m = block_tm(channel)?;
    let mut d = Driver::new(m.instantiate(), budget);
    let matcher = d.world.at(Cell::new(4, 0, 0)).expect("matcher mover");
    let window = m.port("INPUT").lo;
    let mut cells: Vec<Vec<BlockId>> = Vec::new();
    for (i, codon) in tape.codons.iter().enumerate() {
        let at = window + Cell::new(0, 2 * (i as i32 - head as i32), 0);
        cells.push(d.stage(&group(&codon_shape(codon)?, at))?);
    }
    let mut head = head as i64;
    let mut moves = Vec::new();
    let mut steps = 0;
    let mut cursor = 0usize;
    let outcome = loop {
        match step_once(&mut d, &m, rules, matcher, &mut cursor, &mut cells) {
            Ok(Some(peg)) => {
                steps += 1;
                let dy = match peg {
                    Peg::Halt => break BlockTmOutcome::Halted,
                    Peg::Left => {
                        head -= 1;
                        moves.push(Move::Left);
                        2
                    }
                    Peg::Right => {
                        head += 1;
                        moves.push(Move::Right);
                        -2
                    }
                };
                let all: BTreeSet<BlockId> = cells.iter().flatten().copied().collect();
                d.world.translate(&all, Cell::new(0, dy, 0))?;
                if d.run_to_phase(0).is_err() {
                    break BlockTmOutcome::BudgetExhausted;
                }
                if d.world.at(window).is_none() {
                    break BlockTmOutcome::OffTape;
                }
            }
            Ok(None) => break BlockTmOutcome::Stuck,
            Err(MachineError::BudgetExhausted { .. }) => break BlockTmOutcome::BudgetExhausted,
            Err(e) => return Err(e),
        }
    };
    let mut by_row: Vec<(i32, CodonPattern)> = Vec::new();
    for cell in &cells {
        let base = cell
            .iter()
            .map(|id| d.world.block(*id).expect("live").pos)
            .filter(|p| p.x == 0)
            .min()
            .expect("codons have a backing");
        let codon = read_codon(&d.world, base)
            .ok_or_else(|| MachineError::Contract("tape codon lost its keys".into()))?;
        by_row.push((base.y, codon));
    }
    by_row.sort_by_key(|(y, _)| *y);
    let tape = Strand::new(by_row.into_iter().map(|(_, c)| c).collect())?;
    Ok(BlockTmReport {
        tape,
        outcome,
        head,
        steps,
        moves,
        ticks: d.used,
        events: d.summary,
    })
}

/// One machine cycle. Returns the fired rule's peg, or `None` when every
/// rule was turned away.
fn step_once(
    d: &mut Driver,
    m: &Machine,
    rules: &[RuleTrna],
    matcher: BlockId,
    cursor: &mut usize,
    cells: &mut [Vec<BlockId>],
) -> Result<Option<Peg>, MachineError> {
    let feed = m.port("FEED").lo;
    let window = m.port("INPUT").lo;
    let mut misses = 0;
    let rule = loop {
        if misses >= rules.len() {
            return Ok(None);
        }
        let rule = &rules[*cursor % rules.len()];
        *cursor += 1;
        let piece = d.stage(&group(&anticodon_shape(&complement(&rule.reads[0]))?, feed))?;
        let events = d.tick()?;
        if expanded(&events, matcher).is_some() {
            d.tick()?;
            d.tick()?;
            let lifted = m.port("DISCARD").occupants(&d.world);
            if lifted != piece {
                return Err(MachineError::Contract(
                    "seated rule was not lifted off the tape".into(),
                ));
            }
            d.remove_all(&piece)?;
            break rule;
        }
        if !blocked(&events, matcher) {
            return Err(MachineError::Contract(
                "matcher neither seated nor rejected a rule".into(),
            ));
        }
        d.remove_all(&piece)?;
        misses += 1;
        d.run_to_phase(0)?;
    };
    let old_at = d.world.at(window).expect("window holds a codon");
    let slot = cells
        .iter()
        .position(|c| c.contains(&old_at))
        .expect("window codon is on the tape");
    let written = d.stage(&group(&codon_shape(&rule.writes)?, m.port("WRITE").lo))?;
    d.run_to_phase(7)?;
    let spent = m.port("SPENT").occupants(&d.world);
    let mut old = cells[slot].clone();
    old.sort();
    if spent != old {
        return Err(MachineError::Contract(
            "writer did not push the old codon out".into(),
        ));
    }
    d.remove_all(&old)?;
    cells[slot] = written;
    Ok(Some(rule.peg))
}

/// Block-level run of a symbolic machine on a text tape. The head starts on
/// the rightmost cell when the start state moves left, otherwise on cell 0.
pub fn run_block_tm_text(
    tm: &TuringMachine,
    tape: &str,
    budget: u64,
) -> Result<(String, BlockTmReport), MachineError> {
    let rules = rules_to_trna(tm)?;
    let strand = encode_tape(tm, tape)?;
    let head = default_head(tm, strand.len());
    let channel = strand.len().max(DEFAULT_CHANNEL);
    let report = run_block_tm(&rules, &strand, head, channel, budget)?;
    Ok((decode_tape(tm, &report.tape), report))
}

pub fn default_head(tm: &TuringMachine, len: usize) -> usize {
    if tm.move_of(tm.start()) == Some(Move::Left) {
        len.saturating_sub(1)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::library;

    #[test]
    fn one_complement_on_the_published_tape() {
        let (tape, r) = run_block_tm_text(&library::one_complement(), "0110100", 10_000).unwrap();
        assert_eq!(tape, "1001011");
        assert_eq!(r.outcome, BlockTmOutcome::OffTape);
        assert_eq!(r.steps, 7);
        assert!(r.moves.iter().all(|m| *m == Move::Left));
    }

    #[test]
    fn halt_machine_stops_on_the_first_one_from_the_right() {
        let (tape, r) = run_block_tm_text(&library::halt(), "0100", 10_000).unwrap();
        assert_eq!(tape, "0100");
        assert_eq!(r.outcome, BlockTmOutcome::Halted);
        assert_eq!(r.head, 1);
        assert_eq!(r.steps, 3);
    }

    #[test]
    fn loop_machine_alternates_until_the_budget_runs_out() {
        let (_, r) = run_block_tm_text(&library::infinite_loop(), "01", 500).unwrap();
        assert_eq!(r.outcome, BlockTmOutcome::BudgetExhausted);
        assert!(r.moves.len() > 5);
        assert!(r.moves.windows(2).all(|w| w[0] != w[1]));
        assert!(r.ticks <= 500);
    }

    #[test]
    fn missing_rule_is_stuck() {
        let tm = TuringMachine::new(
            &['0', '1'],
            &[("L", Move::Left)],
            &[(("L", '0'), ("L", '1'))],
            None,
        )
        .unwrap();
        let (tape, r) = run_block_tm_text(&tm, "100", 10_000).unwrap();
        assert_eq!(r.outcome, BlockTmOutcome::Stuck);
        assert_eq!(tape, "111");
    }

    #[test]
    fn composite_rules_are_unsupported() {
        assert!(matches!(
            run_block_tm_text(&library::times_two(), "01", 1000),
            Err(MachineError::Unsupported(_))
        ));
    }
}
