use super::layout::Layout;
use super::{
    blocked, expanded, make_machine, Contract, Driver, Machine, MachineError, MachineKind,
};
use crate::codons::{anticodon_shape, codon_shape, Anticodon, CodonPattern, Shape};
use crate::world::{BlockId, Cell, Direction, WorldConfig};

pub(crate) fn matcher(arity: usize) -> Result<Machine, MachineError> {
    if !(2..=4).contains(&arity) {
        return Err(MachineError::Unsupported(format!("matcher arity {arity}")));
    }
    let n = arity as i32;
    let mut l = Layout::new();
    l.normal((0..n).map(|y| Cell::new(-1, y, 0)));
    l.port("INPUT", Cell::new(0, 0, 0), Cell::new(1, n - 1, 0));
    l.port("FEED", Cell::new(2, 0, 0), Cell::new(3, n - 1, 0));
    l.mover(Cell::new(4, 0, 0), Direction::NegX, 0);
    Ok(l.finish(
        MachineKind::Matcher { arity },
        10,
        Contract::Match,
        WorldConfig::default(),
    ))
}

pub(crate) fn group(shape: &Shape, at: Cell) -> Vec<(Cell, crate::world::Kind, bool)> {
    shape
        .cells
        .iter()
        .map(|(c, k)| (*c + at, *k, false))
        .collect()
}

/// A matcher loaded with one codon and one candidate anticodon.
pub struct MatcherScene {
    pub driver_world: crate::world::World,
    pub mover: BlockId,
    pub codon: Vec<BlockId>,
    pub anticodon: Vec<BlockId>,
}

/// Loads the matcher of the codon's arity with the codon at INPUT and the
/// anticodon waiting at FEED.
pub fn matcher_scene(
    codon: &CodonPattern,
    anticodon: &Anticodon,
) -> Result<MatcherScene, MachineError> {
    if codon.arity() != anticodon.arity() {
        return Err(MachineError::Unsupported(
            "codon and anticodon arities differ".into(),
        ));
    }
    let m = make_machine(MachineKind::Matcher {
        arity: codon.arity(),
    })?;
    let mut d = Driver::new(m.instantiate(), 10);
    let mover = d.world.at(Cell::new(4, 0, 0)).expect("matcher mover");
    let codon = d.stage(&group(&codon_shape(codon)?, m.port("INPUT").lo))?;
    let anticodon = d.stage(&group(&anticodon_shape(anticodon)?, m.port("FEED").lo))?;
    Ok(MatcherScene {
        driver_world: d.world,
        mover,
        codon,
        anticodon,
    })
}

impl MatcherScene {
    /// Runs one push; true when the anticodon slid into its seat.
    pub fn trial(&mut self) -> Result<bool, MachineError> {
        let world = std::mem::take(&mut self.driver_world);
        let mut d = Driver::new(world, 10);
        let events = d.tick()?;
        self.driver_world = d.world;
        match (expanded(&events, self.mover), blocked(&events, self.mover)) {
            (Some(_), _) => Ok(true),
            (None, true) => Ok(false),
            _ => Err(MachineError::Contract(
                "matcher mover neither pushed nor blocked".into(),
            )),
        }
    }

    pub fn anticodon_min_x(&self) -> i32 {
        self.anticodon
            .iter()
            .map(|id| self.driver_world.block(*id).expect("live").pos.x)
            .min()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codons::{alphabet, complement, geometric_fit};

    #[test]
    fn push_succeeds_exactly_on_complement() {
        for n in [2, 3, 4] {
            let alpha = alphabet(n).unwrap();
            for c in &alpha {
                for p in &alpha {
                    let a = complement(p);
                    let mut scene = matcher_scene(c, &a).unwrap();
                    let seated = scene.trial().unwrap();
                    assert_eq!(seated, c == p, "n={n} codon {c} anticodon for {p}");
                    let fit =
                        geometric_fit(&codon_shape(c).unwrap(), &anticodon_shape(&a).unwrap());
                    assert_eq!(seated, fit);
                    assert_eq!(scene.anticodon_min_x(), if seated { 1 } else { 2 });
                }
            }
        }
    }
}
