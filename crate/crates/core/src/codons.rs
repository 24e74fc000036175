//! Codons, anticodons and their block geometry.
//!
//! An n-codon is an n-bit pattern with exactly `n / 2` ones. Geometrically a
//! codon is a full backing column with key blocks at the one-bits; its
//! anticodon carries key blocks at the complementary rows on the other side
//! of the key column, so the two interlock only when the keys are disjoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::world::{Cell, Kind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodonError {
    #[error("codon arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("arity {0} has no block geometry (supported: 2, 3, 4)")]
    UnsupportedArity(usize),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("pattern {0:?} does not have exactly half ones")]
    NotBalanced(Vec<bool>),
    #[error("no codon letter {letter:?} at arity {arity}")]
    UnknownLetter { letter: char, arity: usize },
    #[error("a strand needs at least one codon")]
    EmptyStrand,
    #[error("mutation cover is empty")]
    EmptyCover,
    #[error("no reduced anticodon fits exactly this cover")]
    Unrealizable,
    #[error("unknown payload letter {0:?}")]
    UnknownPayload(char),
}

/// A balanced bit pattern: `floor(n/2)` ones out of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodonPattern {
    bits: Vec<bool>,
}

/// The negated pattern a codon fits with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Anticodon {
    bits: Vec<bool>,
}

fn ones(bits: &[bool]) -> usize {
    bits.iter().filter(|b| **b).count()
}

impl CodonPattern {
    pub fn new(bits: Vec<bool>) -> Result<Self, CodonError> {
        if bits.len() < 2 {
            return Err(CodonError::ArityTooSmall(bits.len()));
        }
        if ones(&bits) != bits.len() / 2 {
            return Err(CodonError::NotBalanced(bits));
        }
        Ok(CodonPattern { bits })
    }

    /// Parses a pattern written as `0`/`1` digits.
    pub fn from_bit_str(s: &str) -> Result<Self, CodonError> {
        CodonPattern::new(s.chars().map(|c| c == '1').collect())
    }

    pub fn from_letter(arity: usize, letter: char) -> Result<Self, CodonError> {
        let idx = (letter as u32).wrapping_sub('A' as u32) as usize;
        alphabet(arity)?
            .into_iter()
            .nth(idx)
            .ok_or(CodonError::UnknownLetter { letter, arity })
    }

    pub fn arity(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Position in the alphabet as a capital letter.
    pub fn letter(&self) -> char {
        let idx = alphabet(self.arity())
            .expect("valid arity")
            .iter()
            .position(|p| p == self)
            .expect("balanced pattern is in its alphabet");
        (b'A' + idx as u8) as char
    }

    pub fn bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for CodonPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl Anticodon {
    pub fn arity(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The codon this anticodon was made for.
    pub fn target(&self) -> CodonPattern {
        CodonPattern {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// All balanced n-bit patterns, ones-first lexicographic order (letters A, B, ...).
pub fn alphabet(n: usize) -> Result<Vec<CodonPattern>, CodonError> {
    if n < 2 {
        return Err(CodonError::ArityTooSmall(n));
    }
    let k = n / 2;
    let mut out = Vec::new();
    // descending integer order of the big-endian bit string = ones first
    for v in (0u64..(1u64 << n)).rev() {
        if v.count_ones() as usize == k {
            let bits = (0..n).map(|i| v >> (n - 1 - i) & 1 == 1).collect();
            out.push(CodonPattern { bits });
        }
    }
    Ok(out)
}

pub fn complement(p: &CodonPattern) -> Anticodon {
    Anticodon {
        bits: p.bits.iter().map(|b| !b).collect(),
    }
}

/// A codon and anticodon match when the anticodon is the codon's complement.
pub fn matches(c: &CodonPattern, a: &Anticodon) -> Result<bool, CodonError> {
    if c.arity() != a.arity() {
        return Err(CodonError::ArityMismatch(c.arity(), a.arity()));
    }
    Ok(c.bits.iter().zip(&a.bits).all(|(x, y)| x != y))
}

/// A set of cells, each holding a block kind, in local coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Shape {
    pub cells: BTreeMap<Cell, Kind>,
}

impl Shape {
    pub fn normals(cells: impl IntoIterator<Item = Cell>) -> Shape {
        Shape {
            cells: cells.into_iter().map(|c| (c, Kind::Normal)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn translated(&self, by: Cell) -> Shape {
        Shape {
            cells: self.cells.iter().map(|(c, k)| (*c + by, *k)).collect(),
        }
    }

    pub fn cell_set(&self) -> BTreeSet<Cell> {
        self.cells.keys().copied().collect()
    }

    /// Face-connectivity of the cell set.
    pub fn is_connected(&self) -> bool {
        let cells = self.cell_set();
        let Some(&start) = cells.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            for n in c.neighbours() {
                if cells.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == cells.len()
    }

    /// Shape moved so its minimum corner sits at the origin.
    pub fn normalized(&self) -> Shape {
        let Some(lo) = self
            .cells
            .keys()
            .copied()
            .reduce(|a, c| Cell::new(a.x.min(c.x), a.y.min(c.y), a.z.min(c.z)))
        else {
            return Shape::default();
        };
        self.translated(-lo)
    }

    /// Equality up to translation.
    pub fn congruent(&self, other: &Shape) -> bool {
        self.normalized() == other.normalized()
    }
}

fn check_geometry(n: usize) -> Result<(), CodonError> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(CodonError::UnsupportedArity(n))
    }
}

/// Column the codon keys occupy; the anticodon keys slide into it.
pub const KEY_COLUMN: i32 = 1;

/// Offset that brings an anticodon shape from its local frame to its seat.
pub const SEAT: Cell = Cell::new(KEY_COLUMN, 0, 0);

/// Backing column at x = 0 over rows `0..n`, key blocks at x = 1 on one-bits.
pub fn codon_shape(p: &CodonPattern) -> Result<Shape, CodonError> {
    check_geometry(p.arity())?;
    let backing = (0..p.arity() as i32).map(|y| Cell::new(0, y, 0));
    let keys = p
        .bits
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(y, _)| Cell::new(1, y as i32, 0));
    Ok(Shape::normals(backing.chain(keys)))
}

fn keyed_anticodon(n: usize, key_rows: impl IntoIterator<Item = usize>) -> Shape {
    let keys = key_rows.into_iter().map(|y| Cell::new(0, y as i32, 0));
    let backing = (0..n as i32).map(|y| Cell::new(1, y, 0));
    Shape::normals(keys.chain(backing))
}

/// Key blocks at x = 0 on the anticodon's one-bits, backing column at x = 1.
pub fn anticodon_shape(a: &Anticodon) -> Result<Shape, CodonError> {
    check_geometry(a.arity())?;
    let rows = a
        .bits
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(y, _)| y);
    Ok(keyed_anticodon(a.arity(), rows))
}

/// Whether the anticodon slides into its seat against the codon without
/// any cell overlapping.
pub fn geometric_fit(codon: &Shape, anticodon: &Shape) -> bool {
    let seated = anticodon.translated(SEAT);
    codon.cells.keys().all(|c| !seated.cells.contains_key(c))
}

/// A reduced anticodon that fits every codon in `cover` and nothing else.
/// Its keys sit on the rows that no covered codon uses.
pub fn mutation_anticodon(n: usize, cover: &[CodonPattern]) -> Result<Shape, CodonError> {
    check_geometry(n)?;
    if cover.is_empty() {
        return Err(CodonError::EmptyCover);
    }
    if let Some(bad) = cover.iter().find(|c| c.arity() != n) {
        return Err(CodonError::ArityMismatch(n, bad.arity()));
    }
    let used: BTreeSet<usize> = cover
        .iter()
        .flat_map(|c| {
            c.bits
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| i)
        })
        .collect();
    let wanted: BTreeSet<&CodonPattern> = cover.iter().collect();
    let closure: Vec<CodonPattern> = alphabet(n)?
        .into_iter()
        .filter(|c| {
            c.bits
                .iter()
                .enumerate()
                .all(|(i, b)| !b || used.contains(&i))
        })
        .collect();
    if closure.len() != wanted.len() || closure.iter().any(|c| !wanted.contains(c)) {
        return Err(CodonError::Unrealizable);
    }
    Ok(keyed_anticodon(n, (0..n).filter(|i| !used.contains(i))))
}

/// Codons of arity `n` that a given anticodon shape fits.
pub fn fitting_codons(n: usize, anticodon: &Shape) -> Result<Vec<CodonPattern>, CodonError> {
    let mut out = Vec::new();
    for c in alphabet(n)? {
        if geometric_fit(&codon_shape(&c)?, anticodon) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Draws the codon a mutation anticodon ends up matching when every fitting
/// codon is equally likely. Returns the drawn codon.
pub fn draw_match<R: Rng>(rng: &mut R, fitting: &[CodonPattern]) -> CodonPattern {
    fitting[rng.gen_range(0..fitting.len())].clone()
}

/// Reading direction of a strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Forward,
    Reverse,
}

/// A sequence of same-arity codons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand {
    pub codons: Vec<CodonPattern>,
    pub encased: bool,
    pub orientation: Orientation,
}

impl Strand {
    pub fn new(codons: Vec<CodonPattern>) -> Result<Strand, CodonError> {
        let first = codons.first().ok_or(CodonError::EmptyStrand)?;
        if let Some(bad) = codons.iter().find(|c| c.arity() != first.arity()) {
            return Err(CodonError::ArityMismatch(first.arity(), bad.arity()));
        }
        Ok(Strand {
            codons,
            encased: true,
            orientation: Orientation::Forward,
        })
    }

    /// Parses letter notation such as `AAB`.
    pub fn parse(arity: usize, letters: &str) -> Result<Strand, CodonError> {
        let codons = letters
            .chars()
            .map(|ch| CodonPattern::from_letter(arity, ch))
            .collect::<Result<Vec<_>, _>>()?;
        Strand::new(codons)
    }

    pub fn arity(&self) -> usize {
        self.codons[0].arity()
    }

    pub fn letters(&self) -> String {
        self.codons.iter().map(|c| c.letter()).collect()
    }

    pub fn len(&self) -> usize {
        self.codons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codons.is_empty()
    }

    /// Letter-wise complement: each codon replaced by the codon its
    /// anticodon's bits spell.
    pub fn complement(&self) -> Strand {
        let codons = self
            .codons
            .iter()
            .map(|c| CodonPattern {
                bits: c.bits.iter().map(|b| !b).collect(),
            })
            .map(|p| {
                // only balanced for even arity; odd arities have no letter-wise complement
                CodonPattern::new(p.bits).expect("complement of an even-arity codon is balanced")
            })
            .collect();
        Strand {
            codons,
            encased: self.encased,
            orientation: self.orientation,
        }
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters())
    }
}

/// Cells of an encased strand: codons stacked along +y inside a casing that
/// runs down the back (x = -1) and caps both ends; the key side stays open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandShape {
    pub casing: Shape,
    pub codons: Vec<Shape>,
}

impl StrandShape {
    pub fn all(&self) -> Shape {
        let mut s = self.casing.clone();
        for c in &self.codons {
            s.cells.extend(c.cells.iter().map(|(k, v)| (*k, *v)));
        }
        s
    }
}

pub fn strand_shape(strand: &Strand) -> Result<StrandShape, CodonError> {
    let n = strand.arity();
    check_geometry(n)?;
    let len = (strand.len() * n) as i32;
    let codons = strand
        .codons
        .iter()
        .enumerate()
        .map(|(i, c)| codon_shape(c).map(|s| s.translated(Cell::new(0, i as i32 * n as i32, 0))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut casing: Vec<Cell> = (-1..=len).map(|y| Cell::new(-1, y, 0)).collect();
    if strand.encased {
        casing.push(Cell::new(0, -1, 0));
        casing.push(Cell::new(0, len, 0));
    }
    Ok(StrandShape {
        casing: Shape::normals(casing),
        codons,
    })
}

/// Instruction payload carried by a 4-tRNA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    NormalRight,
    NormalLeft,
    MoverRight,
    GluerRight,
    GluerLeft,
    MoverLeft,
}

/// Column of a two-wide component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Block class without orientation or timing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockClass {
    Normal,
    Mover,
    Gluer,
}

impl Payload {
    pub const ALL: [Payload; 6] = [
        Payload::NormalRight,
        Payload::NormalLeft,
        Payload::MoverRight,
        Payload::GluerRight,
        Payload::GluerLeft,
        Payload::MoverLeft,
    ];

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Result<Payload, CodonError> {
        let i = (c as u32).wrapping_sub('A' as u32) as usize;
        Payload::ALL
            .get(i)
            .copied()
            .ok_or(CodonError::UnknownPayload(c))
    }

    pub fn from_parts(class: BlockClass, side: Side) -> Payload {
        match (class, side) {
            (BlockClass::Normal, Side::Right) => Payload::NormalRight,
            (BlockClass::Normal, Side::Left) => Payload::NormalLeft,
            (BlockClass::Mover, Side::Right) => Payload::MoverRight,
            (BlockClass::Mover, Side::Left) => Payload::MoverLeft,
            (BlockClass::Gluer, Side::Right) => Payload::GluerRight,
            (BlockClass::Gluer, Side::Left) => Payload::GluerLeft,
        }
    }

    pub fn class(self) -> BlockClass {
        match self {
            Payload::NormalRight | Payload::NormalLeft => BlockClass::Normal,
            Payload::MoverRight | Payload::MoverLeft => BlockClass::Mover,
            Payload::GluerRight | Payload::GluerLeft => BlockClass::Gluer,
        }
    }

    pub fn side(self) -> Side {
        match self {
            Payload::NormalLeft | Payload::GluerLeft | Payload::MoverLeft => Side::Left,
            _ => Side::Right,
        }
    }

    /// The 4-codon this payload's tRNA reads.
    pub fn codon(self) -> CodonPattern {
        alphabet(4).expect("arity 4")[self as usize].clone()
    }
}

/// Default block kinds used for payload blocks before an assembly plan
/// assigns real timing and orientation.
pub fn default_kind(class: BlockClass) -> Kind {
    match class {
        BlockClass::Normal => Kind::Normal,
        BlockClass::Mover => Kind::Mover {
            dir: crate::world::Direction::PosX,
            phase: 0,
        },
        BlockClass::Gluer => Kind::Gluer {
            dir: crate::world::Direction::PosX,
            mode: crate::world::GluerMode::Glue,
        },
    }
}

/// Transfer RNA: an anticodon carrying one payload block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trna {
    pub payload: Payload,
    /// Anticodon and payload are held together loosely and come apart
    /// without a gluer (the Turing-machine variant).
    pub separable: bool,
}

impl Trna {
    pub fn new(payload: Payload) -> Trna {
        Trna {
            payload,
            separable: false,
        }
    }

    pub fn anticodon(&self) -> Anticodon {
        complement(&self.payload.codon())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn alphabet_sizes() {
        assert_eq!(alphabet(2).unwrap().len(), 2);
        assert_eq!(alphabet(3).unwrap().len(), 3);
        assert_eq!(alphabet(4).unwrap().len(), 6);
        for n in 2..=8 {
            assert_eq!(alphabet(n).unwrap().len(), binom(n, n / 2));
        }
        assert_eq!(alphabet(1), Err(CodonError::ArityTooSmall(1)));
    }

    #[test]
    fn letters_follow_ones_first_order() {
        let a2 = alphabet(2).unwrap();
        assert_eq!(a2[0].bit_string(), "10");
        assert_eq!(complement(&a2[0]).bits(), &[false, true]);
        let a4: Vec<String> = alphabet(4)
            .unwrap()
            .iter()
            .map(|c| c.bit_string())
            .collect();
        assert_eq!(a4, ["1100", "1010", "1001", "0110", "0101", "0011"]);
        assert_eq!(CodonPattern::from_letter(4, 'F').unwrap().letter(), 'F');
        assert!(CodonPattern::from_letter(4, 'G').is_err());
    }

    #[test]
    fn complement_is_involution() {
        for c in alphabet(4).unwrap() {
            assert_eq!(complement(&c).target(), c);
            assert!(matches(&c, &complement(&c)).unwrap());
        }
    }

    #[test]
    fn match_matrix_is_identity() {
        for n in 2..=4 {
            let abc = alphabet(n).unwrap();
            for (i, c) in abc.iter().enumerate() {
                for (j, a) in abc.iter().enumerate() {
                    assert_eq!(matches(c, &complement(a)).unwrap(), i == j);
                }
            }
        }
        let a2 = alphabet(2).unwrap();
        let a3 = alphabet(3).unwrap();
        assert!(matches(&a2[0], &complement(&a3[0])).is_err());
    }

    #[test]
    fn two_codon_is_three_blocks() {
        let a = &alphabet(2).unwrap()[0];
        let s = codon_shape(a).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.is_connected());
        assert_eq!(anticodon_shape(&complement(a)).unwrap().len(), 3);
    }

    #[test]
    fn odd_arity_shapes_differ() {
        let abc = alphabet(3).unwrap();
        for a in &abc {
            let anti = anticodon_shape(&complement(a)).unwrap();
            for c in &abc {
                assert!(!anti.congruent(&codon_shape(c).unwrap()));
            }
        }
    }

    #[test]
    fn seated_pairs_fill_a_solid_block() {
        for n in 2..=4 {
            for c in alphabet(n).unwrap() {
                let cs = codon_shape(&c).unwrap();
                let seated = anticodon_shape(&complement(&c)).unwrap().translated(SEAT);
                let mut all = cs.cell_set();
                for cell in seated.cell_set() {
                    assert!(all.insert(cell), "overlap at {cell}");
                }
                let expect: BTreeSet<Cell> = (0..3)
                    .flat_map(|x| (0..n as i32).map(move |y| Cell::new(x, y, 0)))
                    .collect();
                assert_eq!(all, expect);
                assert!(cs.is_connected());
                assert!(seated.is_connected());
            }
        }
    }

    #[test]
    fn geometric_fit_equals_logical_match() {
        for n in 2..=4 {
            for c in alphabet(n).unwrap() {
                for a in alphabet(n).unwrap() {
                    let anti = complement(&a);
                    let fit =
                        geometric_fit(&codon_shape(&c).unwrap(), &anticodon_shape(&anti).unwrap());
                    assert_eq!(fit, matches(&c, &anti).unwrap(), "n={n} {c} {a}");
                }
            }
        }
    }

    #[test]
    fn mutation_anticodons() {
        let abc = alphabet(4).unwrap();
        // rows 0..3 used: A=1100, B=1010, D=0110 share row 3 free
        let cover = vec![abc[0].clone(), abc[1].clone(), abc[3].clone()];
        let s = mutation_anticodon(4, &cover).unwrap();
        assert_eq!(fitting_codons(4, &s).unwrap(), cover);
        let single = mutation_anticodon(4, &abc[2..3]).unwrap();
        assert_eq!(single, anticodon_shape(&complement(&abc[2])).unwrap());
        let all = mutation_anticodon(4, &abc).unwrap();
        assert_eq!(fitting_codons(4, &all).unwrap().len(), 6);
        assert_eq!(
            mutation_anticodon(4, &abc[0..2]),
            Err(CodonError::Unrealizable)
        );
        assert_eq!(mutation_anticodon(4, &[]), Err(CodonError::EmptyCover));
    }

    #[test]
    fn strands() {
        let s = Strand::parse(2, "AAB").unwrap();
        assert_eq!(s.complement().letters(), "BBA");
        let shape = strand_shape(&s).unwrap();
        let casing = shape.casing.cell_set();
        for c in &shape.codons {
            assert!(c.cell_set().is_disjoint(&casing));
        }
        assert!(shape.all().is_connected());
        let one = strand_shape(&Strand::parse(2, "B").unwrap()).unwrap();
        assert_eq!(one.casing.len(), 6);
        assert_eq!(Strand::parse(2, ""), Err(CodonError::EmptyStrand));
    }

    #[test]
    fn payload_table() {
        let letters: String = Payload::ALL.iter().map(|p| p.letter()).collect();
        assert_eq!(letters, "ABCDEF");
        assert_eq!(Payload::from_letter('F').unwrap(), Payload::MoverLeft);
        assert_eq!(
            Payload::from_letter('D').unwrap().class(),
            BlockClass::Gluer
        );
        for p in Payload::ALL {
            assert_eq!(Payload::from_parts(p.class(), p.side()), p);
        }
    }
}
