use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Contract, Machine, MachineKind, Port};
use crate::mdl::MdlDocument;
use crate::world::{Cell, Direction, Kind, WorldConfig};

/// Collects a fragment in design coordinates and joins it into one frame.
#[derive(Debug, Default)]
pub(crate) struct Layout {
    blocks: BTreeMap<Cell, Kind>,
    ports: BTreeMap<String, Port>,
    keep_out: BTreeSet<Cell>,
}

impl Layout {
    pub fn new() -> Layout {
        Layout::default()
    }

    pub fn put(&mut self, cell: Cell, kind: Kind) {
        let old = self.blocks.insert(cell, kind);
        assert!(
            old.is_none() || old == Some(kind),
            "layout cell {cell} used twice"
        );
    }

    pub fn normal(&mut self, cells: impl IntoIterator<Item = Cell>) {
        for c in cells {
            self.put(c, Kind::Normal);
        }
    }

    pub fn mover(&mut self, cell: Cell, dir: Direction, phase: u8) {
        self.put(cell, Kind::Mover { dir, phase });
        self.keep_out.insert(cell.step(dir));
    }

    pub fn gluer(&mut self, cell: Cell, dir: Direction, mode: crate::world::GluerMode) {
        self.put(cell, Kind::Gluer { dir, mode });
        self.keep_out.insert(cell.step(dir));
    }

    pub fn keep_out(&mut self, cells: impl IntoIterator<Item = Cell>) {
        self.keep_out.extend(cells);
    }

    pub fn keep_out_box(&mut self, a: Cell, b: Cell) {
        self.keep_out.extend(cells_of(Port::new(a, b)));
    }

    /// Records a port; its cells are kept free of frame.
    pub fn port(&mut self, name: &str, a: Cell, b: Cell) {
        let p = Port::new(a, b);
        self.keep_out.extend(cells_of(p));
        self.ports.insert(name.to_string(), p);
    }

    fn components(&self) -> Vec<BTreeSet<Cell>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.blocks.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(c) = stack.pop() {
                for n in c.neighbours() {
                    if self.blocks.contains_key(&n) && seen.insert(n) {
                        comp.insert(n);
                        stack.push(n);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Adds normal blocks along shortest free paths until the fragment is
    /// one face-connected piece.
    pub fn connect(&mut self) {
        loop {
            let comps = self.components();
            if comps.len() <= 1 {
                return;
            }
            let path = self
                .shortest_bridge(&comps[0])
                .expect("frame pieces can be joined");
            self.normal(path);
        }
    }

    fn shortest_bridge(&self, from: &BTreeSet<Cell>) -> Option<Vec<Cell>> {
        let (lo, hi) = self.extent();
        let inside = |c: Cell| {
            (lo.x - 3..=hi.x + 3).contains(&c.x)
                && (lo.y - 3..=hi.y + 3).contains(&c.y)
                && (lo.z - 3..=hi.z + 3).contains(&c.z)
        };
        let mut prev: BTreeMap<Cell, Option<Cell>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &c in from {
            for d in Direction::ALL {
                let n = c.step(d);
                if !self.blocks.contains_key(&n)
                    && !self.keep_out.contains(&n)
                    && !prev.contains_key(&n)
                {
                    prev.insert(n, None);
                    queue.push_back(n);
                }
            }
        }
        while let Some(c) = queue.pop_front() {
            let touches_other = Direction::ALL
                .iter()
                .any(|d| self.blocks.contains_key(&c.step(*d)) && !from.contains(&c.step(*d)));
            if touches_other {
                let mut path = vec![c];
                let mut cur = c;
                while let Some(Some(p)) = prev.get(&cur) {
                    path.push(*p);
                    cur = *p;
                }
                return Some(path);
            }
            for d in Direction::ALL {
                let n = c.step(d);
                if inside(n)
                    && !self.blocks.contains_key(&n)
                    && !self.keep_out.contains(&n)
                    && !prev.contains_key(&n)
                {
                    prev.insert(n, Some(c));
                    queue.push_back(n);
                }
            }
        }
        None
    }

    fn extent(&self) -> (Cell, Cell) {
        let all = self.blocks.keys().chain(self.keep_out.iter());
        let mut lo = Cell::new(i32::MAX, i32::MAX, i32::MAX);
        let mut hi = Cell::new(i32::MIN, i32::MIN, i32::MIN);
        for c in all {
            lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z));
            hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z));
        }
        (lo, hi)
    }

    /// Connects the frame and packs it into a machine whose origin keeps the
    /// design coordinates valid in the runner's world.
    pub fn finish(
        mut self,
        kind: MachineKind,
        cycle_length: u64,
        contract: Contract,
        config: WorldConfig,
    ) -> Machine {
        self.connect();
        let blocks: Vec<(Cell, Kind)> = self.blocks.iter().map(|(c, k)| (*c, *k)).collect();
        let origin = blocks
            .iter()
            .map(|(c, _)| *c)
            .reduce(|a, c| Cell::new(a.x.min(c.x), a.y.min(c.y), a.z.min(c.z)));
        let origin = origin.expect("fragment has blocks");
        let ports = self
            .ports
            .into_iter()
            .map(|(n, p)| (n, p.shifted(-origin)))
            .collect();
        let name = kind
            .to_string()
            .replace(['(', ')', '='], "_")
            .trim_end_matches('_')
            .replace("__", "_");
        Machine {
            name,
            kind,
            mdl: MdlDocument::from_blocks(&blocks),
            origin,
            ports,
            cycle_length,
            contract,
            config,
        }
    }
}

pub(crate) fn cells_of(p: Port) -> impl Iterator<Item = Cell> {
    (p.lo.z..=p.hi.z).flat_map(move |z| {
        (p.lo.y..=p.hi.y).flat_map(move |y| (p.lo.x..=p.hi.x).map(move |x| Cell::new(x, y, z)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connect_joins_pieces_around_keep_out() {
        let mut l = Layout::new();
        l.normal([Cell::new(0, 0, 0), Cell::new(4, 0, 0)]);
        l.keep_out([Cell::new(2, 0, 0)]);
        l.connect();
        assert_eq!(l.components().len(), 1);
        assert!(!l.blocks.contains_key(&Cell::new(2, 0, 0)));
    }

    #[test]
    fn finish_records_origin_and_relative_ports() {
        let mut l = Layout::new();
        l.normal([Cell::new(-2, 1, 0), Cell::new(-1, 1, 0)]);
        l.port("INPUT", Cell::new(0, 1, 0), Cell::new(0, 1, 0));
        let m = l.finish(
            MachineKind::Belt,
            10,
            Contract::Fifo,
            WorldConfig::default(),
        );
        assert_eq!(m.origin, Cell::new(-2, 1, 0));
        assert_eq!(m.ports["INPUT"].lo, Cell::new(2, 0, 0));
        assert_eq!(m.port("INPUT").lo, Cell::new(0, 1, 0));
        assert_eq!(m.name, "belt");
    }
}
