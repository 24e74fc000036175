//! Blocks on an unbounded integer grid, strong bonds between them, and the
//! compounds those bonds induce.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

/// A lattice position in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { x: 0, y: 0, z: 0 };

    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Cell { x, y, z }
    }

    pub fn step(self, dir: Direction) -> Cell {
        self + dir.offset()
    }

    /// Face-adjacent neighbours, in direction-code order.
    pub fn neighbours(self) -> impl Iterator<Item = Cell> {
        Direction::ALL.into_iter().map(move |d| self.step(d))
    }

    pub fn is_face_adjacent(self, other: Cell) -> bool {
        let d = other - self;
        d.x.abs() + d.y.abs() + d.z.abs() == 1
    }

    /// Sort key used by canonical forms and frame dumps: planes, then rows, then columns.
    pub fn zyx(self) -> (i32, i32, i32) {
        (self.z, self.y, self.x)
    }
}

impl Add for Cell {
    type Output = Cell;
    fn add(self, o: Cell) -> Cell {
        Cell::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Cell {
    type Output = Cell;
    fn sub(self, o: Cell) -> Cell {
        Cell::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Cell {
    type Output = Cell;
    fn neg(self) -> Cell {
        Cell::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// One of the six axis directions. Codes: 0:+x 1:+y 2:+z 3:-x 4:-y 5:-z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    PosX,
    PosY,
    PosZ,
    NegX,
    NegY,
    NegZ,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::PosX,
        Direction::PosY,
        Direction::PosZ,
        Direction::NegX,
        Direction::NegY,
        Direction::NegZ,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Direction> {
        Direction::ALL.get(code as usize).copied()
    }

    pub fn offset(self) -> Cell {
        match self {
            Direction::PosX => Cell::new(1, 0, 0),
            Direction::PosY => Cell::new(0, 1, 0),
            Direction::PosZ => Cell::new(0, 0, 1),
            Direction::NegX => Cell::new(-1, 0, 0),
            Direction::NegY => Cell::new(0, -1, 0),
            Direction::NegZ => Cell::new(0, 0, -1),
        }
    }

    pub fn opposite(self) -> Direction {
        Direction::ALL[(self.code() as usize + 3) % 6]
    }
}

/// What a gluer does to the block in front of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GluerMode {
    /// Put the target into the glue state; it bonds to whatever it touches.
    Glue,
    /// Cut the target loose from its current partners, then glue it to new ones.
    Transfer,
    /// Cut every bond of the target.
    Unglue,
}

impl GluerMode {
    pub fn code(self) -> u8 {
        match self {
            GluerMode::Glue => 0,
            GluerMode::Transfer => 1,
            GluerMode::Unglue => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<GluerMode> {
        match code {
            0 => Some(GluerMode::Glue),
            1 => Some(GluerMode::Transfer),
            2 => Some(GluerMode::Unglue),
            _ => None,
        }
    }
}

/// Block kind together with the per-kind parameters stored in an MDL token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Normal,
    Mover { dir: Direction, phase: u8 },
    Gluer { dir: Direction, mode: GluerMode },
}

impl Kind {
    /// The three-character MDL token for this kind.
    pub fn token(&self) -> String {
        match *self {
            Kind::Normal => "b__".to_string(),
            Kind::Mover { dir, phase } => format!("M{}{}", dir.code(), phase),
            Kind::Gluer { dir, mode } => format!("G{}{}", dir.code(), mode.code()),
        }
    }

    pub fn is_mover(&self) -> bool {
        matches!(self, Kind::Mover { .. })
    }

    pub fn is_gluer(&self) -> bool {
        matches!(self, Kind::Gluer { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u32);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Transient stickiness of a block after a gluer touched it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueState {
    pub remaining: u32,
    pub excluded: BTreeSet<BlockId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    pub kind: Kind,
    pub pos: Cell,
    /// Inactive movers never fire and inactive gluers never glue. Payload
    /// blocks carried on tRNA are inactive.
    pub active: bool,
    /// Tick at which a mover expanded; `None` while contracted.
    pub expanded_at: Option<u64>,
    pub glue: Option<GlueState>,
    /// Gluers fire once per arrival: the occupant seen at the last glue phase.
    pub last_target: Option<BlockId>,
}

impl Block {
    pub fn head(&self) -> Option<Cell> {
        match (self.kind, self.expanded_at) {
            (Kind::Mover { dir, .. }, Some(_)) => Some(self.pos.step(dir)),
            _ => None,
        }
    }

    /// Every cell this block occupies (two for an expanded mover).
    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        std::iter::once(self.pos).chain(self.head())
    }
}

/// Simulation parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldConfig {
    pub push_capacity: usize,
    pub cycle_period: u64,
    pub glue_duration: u32,
    pub dwell: u64,
    pub max_ticks: u64,
    pub rng_seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            push_capacity: 20,
            cycle_period: 10,
            glue_duration: 2,
            dwell: 1,
            max_ticks: 100_000,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("push capacity {0} outside [1, 1000000]")]
    Capacity(usize),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

impl WorldConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=1_000_000).contains(&self.push_capacity) {
            return Err(ConfigError::Capacity(self.push_capacity));
        }
        if self.cycle_period == 0 {
            return Err(ConfigError::NotPositive("cycle_period"));
        }
        if self.glue_duration == 0 {
            return Err(ConfigError::NotPositive("glue_duration"));
        }
        if self.dwell == 0 {
            return Err(ConfigError::NotPositive("dwell"));
        }
        if self.max_ticks == 0 {
            return Err(ConfigError::NotPositive("max_ticks"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("cell {0} is already occupied by block {1}")]
    Occupied(Cell, BlockId),
    #[error("unknown block {0}")]
    UnknownBlock(BlockId),
    #[error("blocks {0} and {1} are not face-adjacent")]
    NotAdjacent(BlockId, BlockId),
    #[error("a block cannot bond to itself ({0})")]
    SelfBond(BlockId),
}

/// The complete simulation state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub config: WorldConfig,
    pub tick: u64,
    next_id: u32,
    blocks: BTreeMap<BlockId, Block>,
    occupancy: HashMap<Cell, BlockId>,
    bonds: BTreeMap<BlockId, BTreeSet<BlockId>>,
}

impl Default for World {
    fn default() -> Self {
        World::new(WorldConfig::default())
    }
}

impl World {
    pub fn new(config: WorldConfig) -> Self {
        World {
            config,
            tick: 0,
            next_id: 0,
            blocks: BTreeMap::new(),
            occupancy: HashMap::new(),
            bonds: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Adds a contracted, active block and returns its id.
    pub fn add_block(&mut self, kind: Kind, pos: Cell) -> Result<BlockId, WorldError> {
        self.add_block_with(kind, pos, true)
    }

    pub fn add_block_with(
        &mut self,
        kind: Kind,
        pos: Cell,
        active: bool,
    ) -> Result<BlockId, WorldError> {
        if let Some(&other) = self.occupancy.get(&pos) {
            return Err(WorldError::Occupied(pos, other));
        }
        let id = BlockId(self.next_id);
        self.next_id += 1;
        self.occupancy.insert(pos, id);
        self.blocks.insert(
            id,
            Block {
                id,
                kind,
                pos,
                active,
                expanded_at: None,
                glue: None,
                last_target: None,
            },
        );
        Ok(id)
    }

    /// Removes a block together with its bonds.
    pub fn remove_block(&mut self, id: BlockId) -> Result<Block, WorldError> {
        let block = self
            .blocks
            .remove(&id)
            .ok_or(WorldError::UnknownBlock(id))?;
        for c in block.cells() {
            self.occupancy.remove(&c);
        }
        if let Some(partners) = self.bonds.remove(&id) {
            for p in partners {
                if let Some(set) = self.bonds.get_mut(&p) {
                    set.remove(&id);
                }
            }
        }
        Ok(block)
    }

    pub fn block(&self, id: BlockId) -> Option<&Block> {
        self.blocks.get(&id)
    }

    pub fn block_mut(&mut self, id: BlockId) -> Option<&mut Block> {
        self.blocks.get_mut(&id)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = BlockId> + '_ {
        self.blocks.keys().copied()
    }

    pub fn at(&self, cell: Cell) -> Option<BlockId> {
        self.occupancy.get(&cell).copied()
    }

    /// The block whose body sits at `cell`; `None` for empty cells and
    /// mover heads.
    pub fn body_at(&self, cell: Cell) -> Option<BlockId> {
        self.at(cell).filter(|id| self.blocks[id].pos == cell)
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = (Cell, BlockId)> + '_ {
        self.occupancy.iter().map(|(c, id)| (*c, *id))
    }

    /// Bonds join block bodies; a mover's head does not count.
    fn adjacent_blocks(&self, a: &Block, b: &Block) -> bool {
        a.pos.is_face_adjacent(b.pos)
    }

    pub fn are_adjacent(&self, a: BlockId, b: BlockId) -> Result<bool, WorldError> {
        let ba = self.blocks.get(&a).ok_or(WorldError::UnknownBlock(a))?;
        let bb = self.blocks.get(&b).ok_or(WorldError::UnknownBlock(b))?;
        Ok(self.adjacent_blocks(ba, bb))
    }

    /// Creates a strong bond. Returns `false` if the bond already existed.
    pub fn bond(&mut self, a: BlockId, b: BlockId) -> Result<bool, WorldError> {
        if a == b {
            return Err(WorldError::SelfBond(a));
        }
        if !self.are_adjacent(a, b)? {
            return Err(WorldError::NotAdjacent(a, b));
        }
        let fresh = self.bonds.entry(a).or_default().insert(b);
        self.bonds.entry(b).or_default().insert(a);
        Ok(fresh)
    }

    /// Removes a strong bond. Returns `false` if there was none.
    pub fn unbond(&mut self, a: BlockId, b: BlockId) -> Result<bool, WorldError> {
        for id in [a, b] {
            if !self.blocks.contains_key(&id) {
                return Err(WorldError::UnknownBlock(id));
            }
        }
        let removed = self.bonds.get_mut(&a).is_some_and(|s| s.remove(&b));
        if let Some(s) = self.bonds.get_mut(&b) {
            s.remove(&a);
        }
        Ok(removed)
    }

    pub fn is_bonded(&self, a: BlockId, b: BlockId) -> bool {
        self.bonds.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn partners(&self, id: BlockId) -> impl Iterator<Item = BlockId> + '_ {
        self.bonds.get(&id).into_iter().flatten().copied()
    }

    /// All bonds as ordered pairs `(low, high)`.
    pub fn bonds(&self) -> impl Iterator<Item = (BlockId, BlockId)> + '_ {
        self.bonds
            .iter()
            .flat_map(|(a, set)| set.iter().filter(move |b| a < *b).map(move |b| (*a, *b)))
    }

    pub fn bond_count(&self) -> usize {
        self.bonds().count()
    }

    /// Bonds every face-adjacent pair among `ids`.
    pub fn bond_all_adjacent(&mut self, ids: &[BlockId]) -> Result<usize, WorldError> {
        let set: BTreeSet<BlockId> = ids.iter().copied().collect();
        let mut made = 0;
        for &id in &set {
            let pos = self
                .blocks
                .get(&id)
                .ok_or(WorldError::UnknownBlock(id))?
                .pos;
            for n in pos.neighbours() {
                if let Some(other) = self.at(n) {
                    if other > id && set.contains(&other) && self.bond(id, other)? {
                        made += 1;
                    }
                }
            }
        }
        Ok(made)
    }

    /// The connected component of `id` under strong bonds.
    pub fn compound_of(&self, id: BlockId) -> Result<BTreeSet<BlockId>, WorldError> {
        if !self.blocks.contains_key(&id) {
            return Err(WorldError::UnknownBlock(id));
        }
        let mut seen = BTreeSet::from([id]);
        let mut queue = VecDeque::from([id]);
        while let Some(cur) = queue.pop_front() {
            for p in self.partners(cur) {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        Ok(seen)
    }

    /// Partition of all blocks into compounds, each sorted, ordered by smallest id.
    pub fn compounds(&self) -> Vec<BTreeSet<BlockId>> {
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for id in self.ids() {
            if done.contains(&id) {
                continue;
            }
            let c = self.compound_of(id).expect("id from iteration");
            done.extend(c.iter().copied());
            out.push(c);
        }
        out
    }

    /// Moves every block in `ids` by `delta` at once. Fails without change if
    /// a destination is held by a block outside the set.
    pub fn translate(&mut self, ids: &BTreeSet<BlockId>, delta: Cell) -> Result<(), WorldError> {
        for id in ids {
            let b = self.blocks.get(id).ok_or(WorldError::UnknownBlock(*id))?;
            for c in b.cells() {
                let dest = c + delta;
                if let Some(&other) = self.occupancy.get(&dest) {
                    if !ids.contains(&other) {
                        return Err(WorldError::Occupied(dest, other));
                    }
                }
            }
        }
        for id in ids {
            for c in self.blocks[id].cells().collect::<Vec<_>>() {
                self.occupancy.remove(&c);
            }
        }
        for id in ids {
            let b = self.blocks.get_mut(id).expect("checked above");
            b.pos = b.pos + delta;
            for c in b.cells().collect::<Vec<_>>() {
                self.occupancy.insert(c, *id);
            }
        }
        Ok(())
    }

    /// Occupies or releases an expanded mover's head cell. Used by the engine.
    pub(crate) fn set_expanded(&mut self, id: BlockId, at: Option<u64>) {
        let old_head = self.blocks[&id].head();
        if let Some(h) = old_head {
            self.occupancy.remove(&h);
        }
        let b = self.blocks.get_mut(&id).expect("engine passes live ids");
        b.expanded_at = at;
        if let Some(h) = b.head() {
            self.occupancy.insert(h, id);
        }
    }

    /// Minimum and maximum corner over all occupied cells of `ids`.
    pub fn bounds_of<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a BlockId>,
    ) -> Option<(Cell, Cell)> {
        let mut it = ids
            .into_iter()
            .filter_map(|id| self.blocks.get(id))
            .flat_map(|b| b.cells().collect::<Vec<_>>());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), c| {
            (
                Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z)),
                Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z)),
            )
        }))
    }

    pub fn bounds(&self) -> Option<(Cell, Cell)> {
        let ids: Vec<BlockId> = self.ids().collect();
        self.bounds_of(&ids)
    }

    /// Checks occupancy uniqueness and bond adjacency; returns a description
    /// of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen: HashMap<Cell, BlockId> = HashMap::new();
        for b in self.blocks.values() {
            for c in b.cells() {
                if let Some(o) = seen.insert(c, b.id) {
                    return Err(format!("cell {c} held by {o} and {}", b.id));
                }
                if self.occupancy.get(&c) != Some(&b.id) {
                    return Err(format!("occupancy index stale at {c}"));
                }
            }
        }
        if seen.len() != self.occupancy.len() {
            return Err("occupancy index has dangling cells".into());
        }
        for (a, b) in self.bonds() {
            if !self.adjacent_blocks(&self.blocks[&a], &self.blocks[&b]) {
                return Err(format!("bond {a}-{b} joins non-adjacent blocks"));
            }
        }
        Ok(())
    }
}

/// Translation-invariant text rendering of a set of blocks: one line per
/// block, `TOKEN x y z` relative to the minimum corner, sorted by (z, y, x).
pub fn canonical_form_of<'a>(world: &World, ids: impl IntoIterator<Item = &'a BlockId>) -> String {
    let blocks: Vec<(Cell, Kind)> = ids
        .into_iter()
        .filter_map(|id| world.block(*id))
        .map(|b| (b.pos, b.kind))
        .collect();
    canonical_text(&blocks)
}

/// Canonical form of loose `(position, kind)` pairs.
pub fn canonical_text(blocks: &[(Cell, Kind)]) -> String {
    let Some(lo) = blocks
        .iter()
        .map(|(c, _)| *c)
        .reduce(|a, c| Cell::new(a.x.min(c.x), a.y.min(c.y), a.z.min(c.z)))
    else {
        return String::new();
    };
    let mut rows: Vec<((i32, i32, i32), String)> = blocks
        .iter()
        .map(|(c, k)| {
            let r = *c - lo;
            (r.zyx(), format!("{} {} {} {}", k.token(), r.x, r.y, r.z))
        })
        .collect();
    rows.sort();
    rows.into_iter().map(|(_, l)| l + "\n").collect()
}

/// Canonical form of the whole world.
pub fn canonical_form(world: &World) -> String {
    let ids: Vec<BlockId> = world.ids().collect();
    canonical_form_of(world, &ids)
}
