use std::collections::BTreeSet;

use super::layout::Layout;
use super::{Contract, Driver, EventSummary, Machine, MachineError, MachineKind, RunReport};
use crate::bdl::{parse_bdl, BdlProgram, ComponentShape};
use crate::codons::default_kind;
use crate::world::{
    canonical_form_of, canonical_text, BlockId, Cell, Direction, GluerMode, Kind, WorldConfig,
};

/// Longest component the staging area takes.
pub const MAX_COMPONENT_ROWS: i32 = 12;

pub(crate) fn assembler() -> Result<Machine, MachineError> {
    let c = Cell::new;
    let top = MAX_COMPONENT_ROWS - 1;
    let mut l = Layout::new();
    l.port("FEED", c(0, 0, 0), c(1, top, 1));
    l.port("PRODUCT", c(0, 0, -1), c(1, top, 0));
    l.keep_out_box(c(-40, 0, -1), c(1, top, 1));
    l.normal((0..=top).map(|y| c(2, y, -1)));
    l.mover(c(0, 0, 2), Direction::NegZ, 0);
    l.mover(c(1, 0, 2), Direction::NegZ, 0);
    l.gluer(c(0, 0, -2), Direction::PosZ, GluerMode::Glue);
    let config = WorldConfig {
        push_capacity: 64,
        ..WorldConfig::default()
    };
    Ok(l.finish(MachineKind::Assembler, 10, Contract::Assemble, config))
}

/// A component as a rigid piece: its payload blocks at z = 0 over a full
/// two-wide carrier plate at z = -1, lowest row at y = 0.
pub fn piece_blocks(shape: &ComponentShape) -> Vec<(Cell, Kind)> {
    let mut out = Vec::new();
    for (y, row) in shape.rows.iter().enumerate() {
        for (x, cell) in row.iter().enumerate() {
            out.push((Cell::new(x as i32, y as i32, -1), Kind::Normal));
            if let Some(class) = cell {
                out.push((Cell::new(x as i32, y as i32, 0), default_kind(*class)));
            }
        }
    }
    out.sort();
    out
}

/// The machine body a BDL program describes: its components side by side,
/// component i two columns right of component i - 1.
pub fn body_fragment(program: &BdlProgram) -> Vec<(Cell, Kind)> {
    let mut out = Vec::new();
    for (i, letters) in program.components.iter().enumerate() {
        let shape = ComponentShape::from_payloads(letters);
        out.extend(
            piece_blocks(&shape)
                .into_iter()
                .map(|(c, k)| (c + Cell::new(2 * i as i32, 0, 0), k)),
        );
    }
    out.sort();
    out
}

/// Body plans of the machines that take part in replication.
pub fn body_program(name: &str) -> Option<BdlProgram> {
    let code = match name {
        "trna" => "A_B_C_D_E_F",
        "builder" => "CCC_DAACAA_DAACAA",
        "assembler" => "CCA_FAAAAAAF",
        "copier" => "AC_AC_AAA_AACA_AAAAAB",
        "conveyor" => "AC_AC_AA",
        _ => return None,
    };
    Some(parse_bdl(code).expect("built-in body plans parse"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyReport {
    /// Product blocks moved so the minimum corner is the origin.
    pub product: Vec<(Cell, Kind)>,
    pub canonical: String,
    pub ticks: u64,
    pub events: EventSummary,
}

impl From<AssemblyReport> for RunReport {
    fn from(r: AssemblyReport) -> RunReport {
        RunReport {
            ticks: r.ticks,
            product: r.canonical,
            events: r.events,
        }
    }
}

/// Seats each piece in turn, glues it to the piece before and advances the
/// product by two columns per cycle.
pub fn run_assembler(
    components: &[ComponentShape],
    budget: u64,
) -> Result<AssemblyReport, MachineError> {
    let pieces: Vec<Vec<(Cell, Kind)>> = components.iter().map(piece_blocks).collect();
    run_assembler_pieces(&pieces, budget)
}

/// Like `run_assembler` for pieces given block by block, as they come from
/// the builder.
pub fn run_assembler_pieces(
    pieces: &[Vec<(Cell, Kind)>],
    budget: u64,
) -> Result<AssemblyReport, MachineError> {
    let m = assembler()?;
    let mut d = Driver::new(m.instantiate(), budget);
    let feed = m.port("FEED");
    let seat = Cell::new(0, 0, -1);
    let mut product: BTreeSet<BlockId> = BTreeSet::new();
    for (i, piece) in pieces.iter().enumerate() {
        if piece
            .iter()
            .any(|(c, _)| c.y >= MAX_COMPONENT_ROWS || !(0..=1).contains(&c.x))
        {
            return Err(MachineError::Unsupported(format!(
                "piece {i} does not fit the staging area"
            )));
        }
        let staged: Vec<(Cell, Kind, bool)> = piece
            .iter()
            .map(|(c, k)| (*c + Cell::new(0, 0, 1), *k, false))
            .collect();
        debug_assert!(staged.iter().all(|(c, _, _)| feed.contains(*c)));
        let ids = d.stage(&staged)?;
        d.tick()?;
        d.tick()?;
        d.tick()?;
        let seated = d
            .world
            .at(seat)
            .ok_or_else(|| MachineError::Contract(format!("piece {i} was not seated")))?;
        let compound = d.world.compound_of(seated)?;
        if !ids.iter().all(|id| compound.contains(id))
            || !product.iter().all(|id| compound.contains(id))
        {
            return Err(MachineError::Contract(format!(
                "piece {i} is not glued to the product"
            )));
        }
        product = compound;
        d.world
            .translate(&product, Cell::new(-2, 0, 0))
            .map_err(|e| MachineError::Collision(format!("transporter: {e}")))?;
        d.run_to_phase(0)?;
    }
    let blocks: Vec<(Cell, Kind)> = product
        .iter()
        .map(|id| {
            let b = d.world.block(*id).expect("live");
            (b.pos, b.kind)
        })
        .collect();
    let canonical = canonical_form_of(&d.world, &product);
    let lo = blocks
        .iter()
        .map(|(c, _)| *c)
        .reduce(|a, c| Cell::new(a.x.min(c.x), a.y.min(c.y), a.z.min(c.z)));
    let mut normalized: Vec<(Cell, Kind)> = blocks
        .iter()
        .map(|(c, k)| (*c - lo.unwrap_or_default(), *k))
        .collect();
    normalized.sort();
    debug_assert_eq!(canonical, canonical_text(&normalized));
    Ok(AssemblyReport {
        product: normalized,
        canonical,
        ticks: d.used,
        events: d.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdl::shape_oracle;

    fn assemble(name: &str) -> AssemblyReport {
        let program = body_program(name).unwrap();
        run_assembler(&shape_oracle(&program), 1000).unwrap()
    }

    #[test]
    fn assembles_bodies_into_one_rigid_product() {
        for name in ["builder", "assembler", "copier", "conveyor", "trna"] {
            let program = body_program(name).unwrap();
            let r = assemble(name);
            assert_eq!(
                r.canonical,
                canonical_text(&body_fragment(&program)),
                "{name}"
            );
            assert_eq!(r.ticks, 10 * program.components.len() as u64);
        }
    }

    #[test]
    fn empty_list_gives_empty_product() {
        let r = run_assembler(&[], 10).unwrap();
        assert!(r.product.is_empty());
        assert_eq!(r.ticks, 0);
    }

    #[test]
    fn order_matters() {
        let program = body_program("assembler").unwrap();
        let mut shapes = shape_oracle(&program);
        shapes.reverse();
        let r = run_assembler(&shapes, 1000).unwrap();
        assert_ne!(r.canonical, canonical_text(&body_fragment(&program)));
    }

    #[test]
    fn pieces_are_validated() {
        let long = ComponentShape::from_payloads(&[crate::codons::Payload::NormalLeft; 13]);
        assert!(matches!(
            run_assembler(&[long], 100),
            Err(MachineError::Unsupported(_))
        ));
        assert!(matches!(
            run_assembler(&shape_oracle(&body_program("builder").unwrap()), 15),
            Err(MachineError::BudgetExhausted { .. })
        ));
    }
}
