//! The tick engine.
//!
//! One tick runs in fixed order: contract movers whose dwell expired, expand
//! movers whose phase matches the clock (ascending id), fire gluers
//! (ascending id), let glue-state blocks form bonds, advance the clock.
//! Movers only push; nothing is ever pulled.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::trace::{Frame, Trace};
use crate::world::{BlockId, Cell, Direction, GlueState, GluerMode, Kind, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    MoverContracted,
    MoverExpanded,
    MoverBlocked,
    MoverOverCapacity,
    GluerFired,
    BondRemoved,
    BondFormed,
    GlueStateEnded,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::MoverContracted => "MoverContracted",
            EventKind::MoverExpanded => "MoverExpanded",
            EventKind::MoverBlocked => "MoverBlocked",
            EventKind::MoverOverCapacity => "MoverOverCapacity",
            EventKind::GluerFired => "GluerFired",
            EventKind::BondRemoved => "BondRemoved",
            EventKind::BondFormed => "BondFormed",
            EventKind::GlueStateEnded => "GlueStateEnded",
        }
    }
}

/// Something that happened during a tick. `detail` depends on the kind:
/// push-set size for expansions and capacity failures, direction code for
/// blocks and contractions, partner or target id for gluer and bond events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
    pub subject: BlockId,
    pub detail: u64,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.tick,
            self.kind.name(),
            self.subject,
            self.detail
        )
    }
}

/// Blocks that would move if something pushed into `seed` along `dir`:
/// the closure over compounds and over blocks directly in front of members.
pub fn compute_push_set(world: &World, seed: Cell, dir: Direction) -> BTreeSet<BlockId> {
    let mut set = BTreeSet::new();
    let Some(first) = world.at(seed) else {
        return set;
    };
    let mut queue = VecDeque::from([first]);
    while let Some(id) = queue.pop_front() {
        if set.contains(&id) {
            continue;
        }
        let compound = world.compound_of(id).expect("occupant ids are live");
        for member in compound {
            if !set.insert(member) {
                continue;
            }
            let block = world.block(member).expect("live");
            for c in block.cells() {
                if let Some(ahead) = world.at(c.step(dir)) {
                    if !set.contains(&ahead) {
                        queue.push_back(ahead);
                    }
                }
            }
        }
    }
    set
}

/// Why an expansion attempt did nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PushOutcome {
    Moved(BTreeSet<BlockId>),
    Blocked,
    OverCapacity(usize),
}

fn try_expand(world: &mut World, id: BlockId, dir: Direction) -> PushOutcome {
    let pos = world.block(id).expect("live").pos;
    let head = pos.step(dir);
    let set = compute_push_set(world, head, dir);
    let own = world.compound_of(id).expect("live");
    if set.iter().any(|b| own.contains(b)) {
        return PushOutcome::Blocked;
    }
    if set.len() > world.config.push_capacity {
        return PushOutcome::OverCapacity(set.len());
    }
    world
        .translate(&set, dir.offset())
        .expect("push closure leaves the destination free");
    world.set_expanded(id, Some(world.tick));
    PushOutcome::Moved(set)
}

/// Fires one gluer at whatever sits in front of it. Returns the events; the
/// caller decides whether the gluer should fire at all this tick.
pub fn fire_gluer(world: &mut World, gluer: BlockId) -> Vec<Event> {
    let tick = world.tick;
    let mut events = Vec::new();
    let Some(block) = world.block(gluer) else {
        return events;
    };
    let Kind::Gluer { dir, mode } = block.kind else {
        return events;
    };
    let Some(target) = world.body_at(block.pos.step(dir)) else {
        return events;
    };
    if world.compound_of(gluer).expect("live").contains(&target) {
        return events;
    }
    events.push(Event {
        tick,
        kind: EventKind::GluerFired,
        subject: gluer,
        detail: target.0 as u64,
    });
    let former: Vec<BlockId> = world.partners(target).collect();
    if matches!(mode, GluerMode::Transfer | GluerMode::Unglue) {
        for p in &former {
            world.unbond(target, *p).expect("live");
            events.push(Event {
                tick,
                kind: EventKind::BondRemoved,
                subject: target,
                detail: p.0 as u64,
            });
        }
    }
    if matches!(mode, GluerMode::Glue | GluerMode::Transfer) {
        let mut excluded = world.compound_of(gluer).expect("live");
        if mode == GluerMode::Transfer {
            excluded.extend(former);
        }
        let remaining = world.config.glue_duration;
        world.block_mut(target).expect("live").glue = Some(GlueState {
            remaining,
            excluded,
        });
    }
    events
}

/// Advances the world by one tick and returns what happened.
pub fn step(world: &mut World) -> Vec<Event> {
    let tick = world.tick;
    let mut events = Vec::new();
    let ids: Vec<BlockId> = world.ids().collect();

    // contraction
    for &id in &ids {
        let b = world.block(id).expect("live");
        if let (Kind::Mover { dir, .. }, Some(at)) = (b.kind, b.expanded_at) {
            if tick >= at + world.config.dwell {
                world.set_expanded(id, None);
                events.push(Event {
                    tick,
                    kind: EventKind::MoverContracted,
                    subject: id,
                    detail: dir.code() as u64,
                });
            }
        }
    }

    // expansion
    let period = world.config.cycle_period;
    for &id in &ids {
        let b = world.block(id).expect("live");
        let Kind::Mover { dir, phase } = b.kind else {
            continue;
        };
        if !b.active || b.expanded_at.is_some() || tick % period != phase as u64 {
            continue;
        }
        let ev = match try_expand(world, id, dir) {
            PushOutcome::Moved(set) => (EventKind::MoverExpanded, set.len() as u64),
            PushOutcome::Blocked => (EventKind::MoverBlocked, dir.code() as u64),
            PushOutcome::OverCapacity(n) => (EventKind::MoverOverCapacity, n as u64),
        };
        events.push(Event {
            tick,
            kind: ev.0,
            subject: id,
            detail: ev.1,
        });
    }

    // gluers fire once per arrival of a new occupant
    for &id in &ids {
        let b = world.block(id).expect("live");
        let Kind::Gluer { dir, .. } = b.kind else {
            continue;
        };
        if !b.active {
            continue;
        }
        let occupant = world.body_at(b.pos.step(dir));
        let previous = b.last_target;
        world.block_mut(id).expect("live").last_target = occupant;
        if occupant.is_some() && occupant != previous {
            events.extend(fire_gluer(world, id));
        }
    }

    // bond formation
    for &id in &ids {
        let Some(state) = world.block(id).and_then(|b| b.glue.clone()) else {
            continue;
        };
        let pos = world.block(id).expect("live").pos;
        let partners: BTreeSet<BlockId> = pos
            .neighbours()
            .filter_map(|n| world.body_at(n))
            .filter(|other| !state.excluded.contains(other))
            .collect();
        for p in partners {
            if world.bond(id, p).expect("neighbours are adjacent") {
                events.push(Event {
                    tick,
                    kind: EventKind::BondFormed,
                    subject: id,
                    detail: p.0 as u64,
                });
            }
        }
        let b = world.block_mut(id).expect("live");
        if state.remaining <= 1 {
            b.glue = None;
            events.push(Event {
                tick,
                kind: EventKind::GlueStateEnded,
                subject: id,
                detail: 0,
            });
        } else {
            b.glue.as_mut().expect("present").remaining -= 1;
        }
    }

    world.tick += 1;
    events
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("requested {requested} ticks but the budget is {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
}

/// Runs `ticks` steps, recording a frame after each.
pub fn run(world: &mut World, ticks: u64) -> Result<Trace, RunError> {
    if ticks > world.config.max_ticks {
        return Err(RunError::BudgetExceeded {
            requested: ticks,
            budget: world.config.max_ticks,
        });
    }
    let mut trace = Trace::default();
    for _ in 0..ticks {
        let tick = world.tick;
        let events = step(world);
        trace.frames.push(Frame::capture(world, tick, events));
    }
    Ok(trace)
}

/// Runs `ticks` steps without keeping frames; returns the concatenated events.
pub fn run_quiet(world: &mut World, ticks: u64) -> Vec<Event> {
    let mut all = Vec::new();
    for _ in 0..ticks {
        all.extend(step(world));
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::WorldConfig;

    fn mover(dir: Direction, phase: u8) -> Kind {
        Kind::Mover { dir, phase }
    }

    #[test]
    fn push_set_cases() {
        let mut w = World::default();
        assert!(compute_push_set(&w, Cell::ORIGIN, Direction::PosX).is_empty());
        let a = w.add_block(Kind::Normal, Cell::ORIGIN).unwrap();
        assert_eq!(
            compute_push_set(&w, Cell::ORIGIN, Direction::PosX),
            BTreeSet::from([a])
        );
        // a bonded neighbour off-axis and a loose block in front both join
        let b = w.add_block(Kind::Normal, Cell::new(0, 1, 0)).unwrap();
        w.bond(a, b).unwrap();
        let c = w.add_block(Kind::Normal, Cell::new(1, 1, 0)).unwrap();
        let d = w.add_block(Kind::Normal, Cell::new(1, -1, 0)).unwrap();
        let set = compute_push_set(&w, Cell::ORIGIN, Direction::PosX);
        assert_eq!(set, BTreeSet::from([a, b, c]));
        assert!(!set.contains(&d));
    }

    #[test]
    fn mover_fires_on_its_phase_and_contracts_after_dwell() {
        let mut w = World::default();
        let m = w
            .add_block(mover(Direction::PosX, 4), Cell::ORIGIN)
            .unwrap();
        for t in 0..4 {
            assert!(step(&mut w).is_empty(), "tick {t}");
        }
        let ev = step(&mut w);
        assert_eq!(ev.len(), 1);
        assert_eq!(
            (ev[0].tick, ev[0].kind, ev[0].subject),
            (4, EventKind::MoverExpanded, m)
        );
        assert_eq!(w.at(Cell::new(1, 0, 0)), Some(m));
        let ev = step(&mut w);
        assert_eq!((ev[0].tick, ev[0].kind), (5, EventKind::MoverContracted));
        assert_eq!(w.at(Cell::new(1, 0, 0)), None);
    }

    #[test]
    fn mover_blocked_by_its_own_frame() {
        let mut w = World::default();
        let m = w
            .add_block(mover(Direction::PosX, 0), Cell::ORIGIN)
            .unwrap();
        let f1 = w.add_block(Kind::Normal, Cell::new(0, 1, 0)).unwrap();
        let f2 = w.add_block(Kind::Normal, Cell::new(1, 1, 0)).unwrap();
        let wall = w.add_block(Kind::Normal, Cell::new(1, 0, 0)).unwrap();
        w.bond_all_adjacent(&[m, f1, f2, wall]).unwrap();
        let before = w.clone();
        let ev = step(&mut w);
        assert_eq!(ev[0].kind, EventKind::MoverBlocked);
        assert_eq!(w.block(wall).unwrap().pos, before.block(wall).unwrap().pos);
    }

    #[test]
    fn over_capacity_is_a_silent_no_op() {
        let cfg = WorldConfig::default();
        let mut w = World::new(cfg.clone());
        w.add_block(mover(Direction::PosX, 0), Cell::ORIGIN)
            .unwrap();
        for i in 1..=(cfg.push_capacity as i32 + 1) {
            w.add_block(Kind::Normal, Cell::new(i, 0, 0)).unwrap();
        }
        let ev = step(&mut w);
        assert_eq!(ev[0].kind, EventKind::MoverOverCapacity);
        assert_eq!(ev[0].detail, cfg.push_capacity as u64 + 1);
        assert!(w
            .at(Cell::new(cfg.push_capacity as i32 + 2, 0, 0))
            .is_none());
    }

    #[test]
    fn glue_gluer_bonds_target_to_free_neighbour() {
        let mut w = World::default();
        let g = w
            .add_block(
                Kind::Gluer {
                    dir: Direction::PosX,
                    mode: GluerMode::Glue,
                },
                Cell::ORIGIN,
            )
            .unwrap();
        let x = w.add_block(Kind::Normal, Cell::new(1, 0, 0)).unwrap();
        let y = w.add_block(Kind::Normal, Cell::new(2, 0, 0)).unwrap();
        let ev = step(&mut w);
        assert!(ev
            .iter()
            .any(|e| e.kind == EventKind::BondFormed && e.subject == x && e.detail == y.0 as u64));
        assert!(!w.is_bonded(x, g));
    }

    #[test]
    fn transfer_moves_a_payload_between_partners() {
        let mut w = World::default();
        w.add_block(
            Kind::Gluer {
                dir: Direction::PosY,
                mode: GluerMode::Transfer,
            },
            Cell::ORIGIN,
        )
        .unwrap();
        let payload = w.add_block(Kind::Normal, Cell::new(0, 1, 0)).unwrap();
        let carrier = w.add_block(Kind::Normal, Cell::new(1, 1, 0)).unwrap();
        w.bond(payload, carrier).unwrap();
        let other = w.add_block(Kind::Normal, Cell::new(0, 2, 0)).unwrap();
        step(&mut w);
        assert!(!w.is_bonded(payload, carrier));
        assert!(w.is_bonded(payload, other));
    }

    #[test]
    fn mover_heads_are_neither_glued_nor_bonded() {
        let mut w = World::default();
        let mover = w
            .add_block(
                Kind::Mover {
                    dir: Direction::PosZ,
                    phase: 0,
                },
                Cell::new(4, 1, 1),
            )
            .unwrap();
        w.add_block(
            Kind::Gluer {
                dir: Direction::PosY,
                mode: GluerMode::Glue,
            },
            Cell::new(4, 0, 2),
        )
        .unwrap();
        let beside_head = w.add_block(Kind::Normal, Cell::new(3, 1, 2)).unwrap();
        let ev = step(&mut w);
        assert_eq!(w.block(mover).unwrap().head(), Some(Cell::new(4, 1, 2)));
        assert!(ev.iter().all(|e| e.kind != EventKind::GluerFired));
        assert!(!w.is_bonded(mover, beside_head));
        assert_eq!(w.body_at(Cell::new(4, 1, 2)), None);
        w.check_invariants().unwrap();
    }

    #[test]
    fn unglue_isolates_the_middle_of_a_chain() {
        let mut w = World::default();
        w.add_block(
            Kind::Gluer {
                dir: Direction::PosY,
                mode: GluerMode::Unglue,
            },
            Cell::new(1, -1, 0),
        )
        .unwrap();
        let ids: Vec<_> = (0..3)
            .map(|x| w.add_block(Kind::Normal, Cell::new(x, 0, 0)).unwrap())
            .collect();
        w.bond_all_adjacent(&ids).unwrap();
        let ev = step(&mut w);
        assert_eq!(
            ev.iter()
                .filter(|e| e.kind == EventKind::BondRemoved)
                .count(),
            2
        );
        for id in ids {
            assert_eq!(w.compound_of(id).unwrap().len(), 1);
        }
    }

    #[test]
    fn run_zero_is_empty_and_budget_is_enforced() {
        let mut w = World::default();
        w.add_block(Kind::Normal, Cell::ORIGIN).unwrap();
        let before = w.clone();
        assert!(run(&mut w, 0).unwrap().frames.is_empty());
        assert_eq!(w, before);
        w.config.max_ticks = 5;
        assert!(matches!(
            run(&mut w, 6),
            Err(RunError::BudgetExceeded { .. })
        ));
    }
}
