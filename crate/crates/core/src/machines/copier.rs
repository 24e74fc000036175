use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::Layout;
use super::matcher::group;
use super::{
    blocked, expanded, Contract, Driver, EventSummary, Machine, MachineError, MachineKind,
    RunReport,
};
use crate::codons::{
    alphabet, anticodon_shape, complement, mutation_anticodon, strand_shape, CodonPattern, Shape,
    Strand,
};
use crate::world::{BlockId, Cell, Direction, GluerMode, Kind, WorldConfig};

/// Longest strand, in rows, the corridor holds.
pub const MAX_STRAND_ROWS: i32 = 64;

fn supported(arity: usize) -> Result<(), MachineError> {
    if arity == 2 || arity == 4 {
        Ok(())
    } else {
        Err(MachineError::Unsupported(format!("copier arity {arity}")))
    }
}

pub(crate) fn copier(arity: usize) -> Result<Machine, MachineError> {
    supported(arity)?;
    let n = arity as i32;
    let c = Cell::new;
    let mut l = Layout::new();
    l.normal((-n..n).map(|y| c(-2, y, 0)));
    l.port("INPUT", c(-1, -1, 0), c(1, n - 1, 0));
    l.port("FEED", c(2, 0, 0), c(3, n - 1, 1));
    l.port("OUTPUT", c(1, -n, 0), c(2, -1, 1));
    let reach = MAX_STRAND_ROWS + 4;
    l.keep_out_box(c(-1, -reach, 0), c(3, reach, 1));
    l.mover(c(4, 0, 0), Direction::NegX, 0);
    l.gluer(c(2, 0, 2), Direction::NegZ, GluerMode::Glue);
    Ok(l.finish(
        MachineKind::Copier { arity },
        10,
        Contract::Copy,
        WorldConfig::default(),
    ))
}

/// One candidate on the copier's feed belt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeedItem {
    /// An ordinary anticodon; the belt never runs out of these.
    Anticodon(CodonPattern),
    /// A reduced anticodon that fits several codons; there is one of it.
    Mutation(Shape),
}

impl FeedItem {
    fn shape(&self) -> Result<Shape, MachineError> {
        Ok(match self {
            FeedItem::Anticodon(target) => anticodon_shape(&complement(target))?,
            FeedItem::Mutation(s) => s.clone(),
        })
    }
}

/// Every anticodon of the alphabet in a seeded random cyclic order. With
/// `mutate`, one mutation anticodon covering three codons is slipped in at a
/// seeded position (arity 4 only).
pub fn copier_feed(arity: usize, seed: u64, mutate: bool) -> Result<Vec<FeedItem>, MachineError> {
    supported(arity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feed: Vec<FeedItem> = alphabet(arity)?
        .into_iter()
        .map(FeedItem::Anticodon)
        .collect();
    feed.shuffle(&mut rng);
    if mutate {
        if arity != 4 {
            return Err(MachineError::Unsupported(
                "mutation anticodons need arity 4".into(),
            ));
        }
        let cover: Vec<CodonPattern> = alphabet(4)?.into_iter().filter(|c| !c.bits()[3]).collect();
        let at = rng.gen_range(0..=feed.len());
        feed.insert(at, FeedItem::Mutation(mutation_anticodon(4, &cover)?));
    }
    Ok(feed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyReport {
    /// Letters read off the copy; `?` marks a piece whose keys spell no codon.
    pub letters: String,
    /// Candidates the matcher turned away.
    pub rejected: usize,
    pub ticks: u64,
    pub events: EventSummary,
}

impl CopyReport {
    /// The copy as a strand, when every piece spells a codon.
    pub fn strand(&self, arity: usize) -> Option<Strand> {
        Strand::parse(arity, &self.letters).ok()
    }
}

impl From<CopyReport> for RunReport {
    fn from(r: CopyReport) -> RunReport {
        RunReport {
            ticks: r.ticks,
            product: r.letters,
            events: r.events,
        }
    }
}

/// Copies `strand` with the seeded feed for its arity.
pub fn run_copier(strand: &Strand, seed: u64, budget: u64) -> Result<CopyReport, MachineError> {
    let feed = copier_feed(strand.arity(), seed, false)?;
    run_copier_with_feed(strand, &feed, budget)
}

/// Copies `strand` offering candidates from `feed` in cyclic order; each
/// rejected candidate goes back on the belt.
pub fn run_copier_with_feed(
    strand: &Strand,
    feed: &[FeedItem],
    budget: u64,
) -> Result<CopyReport, MachineError> {
    let arity = strand.arity();
    let n = arity as i32;
    let m = copier(arity)?;
    if (strand.len() as i32) * n > MAX_STRAND_ROWS {
        return Err(MachineError::Unsupported(format!(
            "strand of {} codons is too long",
            strand.len()
        )));
    }
    let mut d = Driver::new(m.instantiate(), budget);
    let matcher = d.world.at(Cell::new(4, 0, 0)).expect("matcher mover");
    let shape = strand_shape(strand)?;
    let strand_ids = d.stage(&group(&shape.all(), Cell::ORIGIN))?;
    let mut moving: BTreeSet<BlockId> = strand_ids.iter().copied().collect();
    let feed_at = m.port("FEED").lo;
    let mut belt: Vec<FeedItem> = feed.to_vec();
    let mut cursor = 0usize;
    let mut pieces: Vec<Vec<BlockId>> = Vec::new();
    let mut rejected = 0;
    for i in 0..strand.len() {
        let mut misses = 0;
        loop {
            if belt.is_empty() || misses > belt.len() {
                return Err(MachineError::Contract(format!(
                    "no candidate on the belt fits codon {i}"
                )));
            }
            cursor %= belt.len();
            let item = belt[cursor].clone();
            let mut blocks = group(&item.shape()?, feed_at);
            let backing: Vec<Cell> = blocks
                .iter()
                .filter(|(c, _, _)| c.x == feed_at.x + 1)
                .map(|(c, _, _)| *c)
                .collect();
            blocks.extend(
                backing
                    .into_iter()
                    .map(|c| (c + Cell::new(0, 0, 1), Kind::Normal, false)),
            );
            let piece = d.stage(&blocks)?;
            let events = d.tick()?;
            if expanded(&events, matcher).is_some() {
                if matches!(item, FeedItem::Mutation(_)) {
                    belt.remove(cursor);
                } else {
                    cursor += 1;
                }
                d.tick()?;
                d.tick()?;
                moving.extend(&piece);
                pieces.push(piece);
                d.world
                    .translate(&moving, Cell::new(0, -n, 0))
                    .map_err(|e| MachineError::Collision(format!("strand advance: {e}")))?;
                d.run_to_phase(0)?;
                break;
            }
            if !blocked(&events, matcher) {
                return Err(MachineError::Contract(
                    "matcher neither seated nor rejected a candidate".into(),
                ));
            }
            d.remove_all(&piece)?;
            rejected += 1;
            misses += 1;
            cursor += 1;
            d.run_to_phase(0)?;
        }
    }
    if let Some(first) = pieces.first() {
        let copy = d.world.compound_of(first[0])?;
        if !pieces.iter().flatten().all(|id| copy.contains(id)) {
            return Err(MachineError::Contract(
                "copy pieces are not glued into one strand".into(),
            ));
        }
    }
    let letters = pieces
        .iter()
        .map(|p| read_piece(&d.world, p, arity))
        .collect();
    Ok(CopyReport {
        letters,
        rejected,
        ticks: d.used,
        events: d.summary,
    })
}

/// Letter spelled by a seated piece: its keys sit one column left of its
/// backing.
fn read_piece(world: &crate::world::World, piece: &[BlockId], arity: usize) -> char {
    let cells: Vec<Cell> = piece
        .iter()
        .map(|id| world.block(*id).expect("live").pos)
        .collect();
    let key_x = cells.iter().map(|c| c.x).min().expect("pieces have blocks");
    let base = cells
        .iter()
        .filter(|c| c.x == key_x + 1 && c.z == 0)
        .map(|c| c.y)
        .min()
        .expect("backing");
    let bits: Vec<bool> = (0..arity as i32)
        .map(|r| cells.contains(&Cell::new(key_x, base + r, 0)))
        .collect();
    let letters = alphabet(arity).expect("supported arity");
    CodonPattern::new(bits)
        .ok()
        .and_then(|p| letters.contains(&p).then(|| p.letter()))
        .unwrap_or('?')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aab_copies_to_bba() {
        let strand = Strand::parse(2, "AAB").unwrap();
        let r = run_copier(&strand, 7, 2000).unwrap();
        assert_eq!(r.letters, "BBA");
        assert_eq!(r.strand(2).unwrap(), strand.complement());
    }

    #[test]
    fn double_pass_is_identity_for_arity_four() {
        let strand = Strand::parse(4, "CCADAF").unwrap();
        let once = run_copier(&strand, 1, 10_000).unwrap().strand(4).unwrap();
        assert_eq!(once, strand.complement());
        let twice = run_copier(&once, 2, 10_000).unwrap().strand(4).unwrap();
        assert_eq!(twice.letters(), "CCADAF");
    }

    #[test]
    fn mismatch_blocks_then_a_later_candidate_fits() {
        let strand = Strand::parse(2, "A").unwrap();
        let letters = alphabet(2).unwrap();
        let feed = vec![
            FeedItem::Anticodon(letters[1].clone()),
            FeedItem::Anticodon(letters[0].clone()),
        ];
        let r = run_copier_with_feed(&strand, &feed, 100).unwrap();
        assert_eq!(r.rejected, 1);
        assert_eq!(r.events.count(crate::engine::EventKind::MoverBlocked), 1);
        assert_eq!(r.letters, "B");
        assert_eq!(r.ticks, 20);
    }

    #[test]
    fn mutation_piece_leaves_an_unreadable_codon() {
        let strand = Strand::parse(4, "AAAA").unwrap();
        let mutation = copier_feed(4, 0, true)
            .unwrap()
            .into_iter()
            .find(|i| matches!(i, FeedItem::Mutation(_)))
            .unwrap();
        let mut feed = vec![mutation];
        feed.extend(copier_feed(4, 3, false).unwrap());
        let r = run_copier_with_feed(&strand, &feed, 10_000).unwrap();
        assert_eq!(r.letters.chars().filter(|c| *c == '?').count(), 1);
        assert!(r.letters.starts_with('?'));
    }

    #[test]
    fn feed_is_seeded_and_complete() {
        let a = copier_feed(4, 11, false).unwrap();
        assert_eq!(a, copier_feed(4, 11, false).unwrap());
        assert_eq!(a.len(), 6);
        assert_eq!(copier_feed(4, 11, true).unwrap().len(), 7);
        assert!(copier_feed(2, 0, true).is_err());
    }
}
