use std::collections::BTreeSet;

use super::layout::Layout;
use super::matcher::group;
use super::{Contract, Driver, Machine, MachineError, MachineKind, RunReport};
use crate::bdl::{BdlProgram, ComponentShape};
use crate::codons::{
    alphabet, anticodon_shape, complement, default_kind, BlockClass, Payload, Side,
};
use crate::world::{canonical_form_of, BlockId, Cell, Direction, GluerMode, Kind, WorldConfig};

const BUILDER_CAPACITY: usize = 64;

fn supported(arity: usize) -> Result<(), MachineError> {
    if arity == 2 || arity == 4 {
        Ok(())
    } else {
        Err(MachineError::Unsupported(format!("builder arity {arity}")))
    }
}

pub(crate) fn builder(arity: usize) -> Result<Machine, MachineError> {
    supported(arity)?;
    let n = arity as i32;
    let c = Cell::new;
    let mut l = Layout::new();
    l.port("PRODUCT", c(0, 0, -1), c(1, 0, 0));
    l.port("FEED", c(0, 1, -1), c(1, 2 + n, 0));
    l.port("DISCARD", c(0, 1, 0), c(1, 2 + n, 0));
    l.keep_out_box(c(0, -24, -1), c(1, 0, 0));
    l.mover(c(1, 3 + n, -1), Direction::NegY, 0);
    l.gluer(c(-1, 0, -1), Direction::PosX, GluerMode::Glue);
    l.mover(c(1, 1, -2), Direction::PosZ, 5);
    let config = WorldConfig {
        push_capacity: BUILDER_CAPACITY,
        ..WorldConfig::default()
    };
    Ok(l.finish(MachineKind::Builder { arity }, 10, Contract::Build, config))
}

/// One finished component taken from PRODUCT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltComponent {
    pub shape: ComponentShape,
    /// Canonical form of the payload blocks alone.
    pub canonical: String,
    /// Payload and carrier blocks, with the lowest row at y = 0 and the
    /// carrier plate at z = -1.
    pub blocks: Vec<(Cell, Kind)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildReport {
    pub components: Vec<BuiltComponent>,
    pub ticks: u64,
    pub events: super::EventSummary,
}

impl From<BuildReport> for RunReport {
    fn from(r: BuildReport) -> RunReport {
        let product = r
            .components
            .iter()
            .map(|c| c.canonical.clone())
            .collect::<Vec<_>>()
            .join("--\n");
        RunReport {
            ticks: r.ticks,
            product,
            events: r.events,
        }
    }
}

fn payload_row(p: Payload, y: i32) -> Vec<(Cell, Kind, bool)> {
    let col = match p.side() {
        Side::Left => 0,
        Side::Right => 1,
    };
    vec![
        (Cell::new(0, y, -1), Kind::Normal, false),
        (Cell::new(1, y, -1), Kind::Normal, false),
        (Cell::new(col, y, 0), default_kind(p.class()), false),
    ]
}

pub(crate) fn class_of(kind: Kind) -> BlockClass {
    match kind {
        Kind::Normal => BlockClass::Normal,
        Kind::Mover { .. } => BlockClass::Mover,
        Kind::Gluer { .. } => BlockClass::Gluer,
    }
}

/// Anticodon standing along +y from row `y0`, keys at x = 0, backing at x = 1,
/// with the stem below its backing.
fn trna_blocks(arity: usize, p: Payload, y0: i32) -> Result<Vec<(Cell, Kind, bool)>, MachineError> {
    let letters = alphabet(arity)?;
    let codon = letters.get(p as usize).ok_or_else(|| {
        MachineError::Unsupported(format!(
            "letter {} needs a wider codon than {arity}",
            p.letter()
        ))
    })?;
    let shape = anticodon_shape(&complement(codon))?;
    let mut out = vec![(Cell::new(1, y0 - 1, -1), Kind::Normal, false)];
    for (cell, kind, active) in group(&shape, Cell::ORIGIN) {
        out.push((Cell::new(cell.x, y0 + cell.y, -1), kind, active));
    }
    Ok(out)
}

/// Feeds the program's tRNA through the builder one letter per cycle and
/// collects each component from PRODUCT.
pub fn run_builder(
    program: &BdlProgram,
    arity: usize,
    budget: u64,
) -> Result<BuildReport, MachineError> {
    let m = builder(arity)?;
    let mut d = Driver::new(m.instantiate(), budget);
    let slot = m.port("PRODUCT").lo;
    let discard = m.port("DISCARD");
    let mut components = Vec::new();
    for letters in &program.components {
        let mut payloads: Vec<BlockId> = Vec::new();
        let mut carriers: Vec<BlockId> = Vec::new();
        for p in letters {
            let row = d.stage(&payload_row(*p, slot.y + 1))?;
            carriers.extend(&row[..2]);
            payloads.push(row[2]);
            let trna = d.stage(&trna_blocks(arity, *p, slot.y + 3)?)?;
            d.tick()?;
            d.run_to_phase(0)?;
            let lifted: BTreeSet<BlockId> = discard.occupants(&d.world).into_iter().collect();
            if lifted != trna.iter().copied().collect() {
                return Err(MachineError::Contract(format!(
                    "spent tRNA for {} did not reach DISCARD ({} of {} blocks)",
                    p.letter(),
                    lifted.len(),
                    trna.len()
                )));
            }
            d.remove_all(&trna)?;
        }
        let at_slot = d
            .world
            .at(slot)
            .ok_or_else(|| MachineError::Contract("PRODUCT slot is empty".into()))?;
        let compound = d.world.compound_of(at_slot)?;
        let expected: BTreeSet<BlockId> = payloads.iter().chain(&carriers).copied().collect();
        if compound != expected {
            return Err(MachineError::Contract(format!(
                "component left PRODUCT as {} of {} blocks",
                compound.len(),
                expected.len()
            )));
        }
        let min_y = payloads
            .iter()
            .map(|id| d.world.block(*id).expect("live").pos.y)
            .min()
            .unwrap_or(0);
        let mut rows = vec![[None, None]; payloads.len()];
        let mut blocks = Vec::new();
        for id in &expected {
            let b = d.world.block(*id).expect("live");
            blocks.push((Cell::new(b.pos.x, b.pos.y - min_y, b.pos.z), b.kind));
        }
        for id in &payloads {
            let b = d.world.block(*id).expect("live");
            rows[(b.pos.y - min_y) as usize][b.pos.x as usize] = Some(class_of(b.kind));
        }
        let canonical = canonical_form_of(&d.world, &payloads);
        d.remove_all(&expected.iter().copied().collect::<Vec<_>>())?;
        blocks.sort();
        components.push(BuiltComponent {
            shape: ComponentShape { rows },
            canonical,
            blocks,
        });
    }
    Ok(BuildReport {
        components,
        ticks: d.used,
        events: d.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdl::{parse_bdl, shape_oracle};

    #[test]
    fn aab_builds_the_a_shape() {
        let program = parse_bdl("AAB").unwrap();
        let report = run_builder(&program, 4, 180).unwrap();
        let oracle = shape_oracle(&program);
        assert_eq!(report.components[0].shape, oracle[0]);
        assert_eq!(report.components[0].canonical, oracle[0].canonical_form());
        assert_eq!(report.ticks, 30);
        assert_eq!(report.components[0].blocks.len(), 9);
    }

    #[test]
    fn multi_component_program() {
        let program = parse_bdl("CCC_DAACAA_DAACAA").unwrap();
        let report = run_builder(&program, 4, 60 * 15).unwrap();
        let got: Vec<ComponentShape> = report.components.iter().map(|c| c.shape.clone()).collect();
        assert_eq!(got, shape_oracle(&program));
    }

    #[test]
    fn arity_two_builder_reads_a_and_b_only() {
        let program = parse_bdl("ABBA").unwrap();
        let report = run_builder(&program, 2, 400).unwrap();
        assert_eq!(report.components[0].shape, shape_oracle(&program)[0]);
        assert!(matches!(
            run_builder(&parse_bdl("C").unwrap(), 2, 100),
            Err(MachineError::Unsupported(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let program = parse_bdl("AAAA").unwrap();
        assert!(matches!(
            run_builder(&program, 4, 25),
            Err(MachineError::BudgetExhausted { budget: 25 })
        ));
    }
}
