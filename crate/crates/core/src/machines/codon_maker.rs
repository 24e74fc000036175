use std::collections::BTreeSet;

use super::layout::Layout;
use super::{Contract, Driver, EventSummary, Machine, MachineError, MachineKind, RunReport};
use crate::codons::{alphabet, CodonPattern, Shape};
use crate::world::{BlockId, Cell, Direction, GluerMode, Kind, World, WorldConfig};

const JIG_X: i32 = 10;

pub(crate) fn codon_maker() -> Result<Machine, MachineError> {
    let c = Cell::new;
    let mut l = Layout::new();
    l.port("FEED", c(0, 0, 0), c(2, 1, 0));
    l.port("OUTPUT", c(0, -1, 0), c(1, 0, 0));
    l.mover(c(3, 0, 0), Direction::NegX, 0);
    l.mover(c(3, 1, 0), Direction::NegX, 0);
    l.gluer(c(-1, 0, 0), Direction::PosX, GluerMode::Glue);
    l.gluer(c(-1, 1, 0), Direction::PosX, GluerMode::Glue);
    l.mover(c(0, 2, 0), Direction::NegY, 5);
    l.port("PAIR", c(JIG_X, 0, 0), c(JIG_X + 1, 4, 0));
    l.mover(c(JIG_X, 5, 0), Direction::NegY, 0);
    l.gluer(c(JIG_X - 1, 2, 0), Direction::PosX, GluerMode::Glue);
    Ok(l.finish(
        MachineKind::CodonMaker,
        10,
        Contract::MakeCodons,
        WorldConfig::default(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodonMakerMode {
    /// Make this many 2-codons, alternating A and B.
    Single { count: usize },
    /// Make the 2-codons AA, AB, BA, BB and glue each pair into a 4-codon.
    GluePairs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodonMakerReport {
    /// Product shapes with their minimum corner at the origin.
    pub codons: Vec<Shape>,
    /// Letter each product spells at its own arity, `?` if none.
    pub letters: String,
    pub ticks: u64,
    pub events: EventSummary,
}

impl From<CodonMakerReport> for RunReport {
    fn from(r: CodonMakerReport) -> RunReport {
        RunReport {
            ticks: r.ticks,
            product: r.letters,
            events: r.events,
        }
    }
}

fn shape_of(world: &World, ids: &BTreeSet<BlockId>) -> Shape {
    Shape::normals(ids.iter().map(|id| world.block(*id).expect("live").pos)).normalized()
}

/// Letter of a codon-shaped product: backing column at x = 0, keys at x = 1.
fn letter_of(shape: &Shape) -> char {
    let rows = shape.cells.keys().filter(|c| c.x == 0).count();
    let backing_ok = (0..rows as i32).all(|y| shape.cells.contains_key(&Cell::new(0, y, 0)));
    let bits: Vec<bool> = (0..rows as i32)
        .map(|y| shape.cells.contains_key(&Cell::new(1, y, 0)))
        .collect();
    let keys = shape.cells.keys().filter(|c| c.x == 1).count();
    match (backing_ok, CodonPattern::new(bits), alphabet(rows)) {
        (true, Ok(p), Ok(letters))
            if keys == p.bits().iter().filter(|b| **b).count() && letters.contains(&p) =>
        {
            p.letter()
        }
        _ => '?',
    }
}

/// Makes one 2-codon whose key sits on row `key_row`; returns its blocks.
fn make_one(d: &mut Driver, m: &Machine, key_row: i32) -> Result<BTreeSet<BlockId>, MachineError> {
    let feed = m.port("FEED").lo;
    let mut staged = Vec::new();
    for cell in [
        feed,
        feed + Cell::new(0, 1, 0),
        feed + Cell::new(2, key_row, 0),
    ] {
        staged.extend(d.stage(&[(cell, Kind::Normal, false)])?);
    }
    d.tick()?;
    d.run_to_phase(6)?;
    let out = m.port("OUTPUT");
    let found: BTreeSet<BlockId> = out.occupants(&d.world).into_iter().collect();
    let compound = match found.iter().next() {
        Some(id) => d.world.compound_of(*id)?,
        None => BTreeSet::new(),
    };
    if compound != staged.iter().copied().collect() {
        return Err(MachineError::Contract(format!(
            "codon {} left the maker unbonded",
            compound.len()
        )));
    }
    Ok(compound)
}

/// Runs the 2-codon maker. Blocks are staged loose at FEED each cycle; the
/// maker presses the key into place, glues the three blocks and ejects the
/// codon to OUTPUT.
pub fn run_codon_maker(
    mode: CodonMakerMode,
    budget: u64,
) -> Result<CodonMakerReport, MachineError> {
    let m = codon_maker()?;
    let mut d = Driver::new(m.instantiate(), budget);
    let mut codons = Vec::new();
    match mode {
        CodonMakerMode::Single { count } => {
            for i in 0..count {
                let made = make_one(&mut d, &m, (i % 2) as i32)?;
                codons.push(shape_of(&d.world, &made));
                d.remove_all(&made.into_iter().collect::<Vec<_>>())?;
                d.run_to_phase(0)?;
            }
        }
        CodonMakerMode::GluePairs => {
            let jig = m.port("PAIR").lo;
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let lower = make_one(&mut d, &m, a)?;
                place(&mut d, &lower, jig)?;
                d.run_to_phase(0)?;
                let upper = make_one(&mut d, &m, b)?;
                place(&mut d, &upper, jig + Cell::new(0, 3, 0))?;
                d.run_to_phase(0)?;
                d.tick()?;
                d.tick()?;
                let joined = d
                    .world
                    .compound_of(*lower.iter().next().expect("codon blocks"))?;
                if !upper.iter().all(|id| joined.contains(id)) {
                    return Err(MachineError::Contract("jig did not glue the pair".into()));
                }
                codons.push(shape_of(&d.world, &joined));
                d.remove_all(&joined.into_iter().collect::<Vec<_>>())?;
                d.run_to_phase(0)?;
            }
        }
    }
    let letters = codons.iter().map(letter_of).collect();
    Ok(CodonMakerReport {
        codons,
        letters,
        ticks: d.used,
        events: d.summary,
    })
}

/// Moves a made codon so its lowest backing block sits at `at`.
fn place(d: &mut Driver, codon: &BTreeSet<BlockId>, at: Cell) -> Result<(), MachineError> {
    let lo = codon
        .iter()
        .map(|id| d.world.block(*id).expect("live").pos)
        .reduce(|a, c| Cell::new(a.x.min(c.x), a.y.min(c.y), a.z.min(c.z)))
        .expect("codon blocks");
    d.world
        .translate(codon, at - lo)
        .map_err(|e| MachineError::Collision(format!("jig: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codons::codon_shape;

    #[test]
    fn makes_alternating_two_codons() {
        let r = run_codon_maker(CodonMakerMode::Single { count: 3 }, 100).unwrap();
        assert_eq!(r.letters, "ABA");
        let a = alphabet(2).unwrap();
        assert_eq!(r.codons[0], codon_shape(&a[0]).unwrap());
        assert_eq!(r.codons[1], codon_shape(&a[1]).unwrap());
        assert!(r.codons.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn zero_count_makes_nothing() {
        let r = run_codon_maker(CodonMakerMode::Single { count: 0 }, 10).unwrap();
        assert!(r.codons.is_empty());
        assert_eq!(r.ticks, 0);
    }

    #[test]
    fn glued_pairs_spell_b_to_e() {
        let r = run_codon_maker(CodonMakerMode::GluePairs, 1000).unwrap();
        assert_eq!(r.letters, "BCDE");
        let four = alphabet(4).unwrap();
        for (shape, want) in r.codons.iter().zip(&four[1..5]) {
            assert_eq!(*shape, codon_shape(want).unwrap());
        }
    }
}
