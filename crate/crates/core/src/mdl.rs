//! Machine Description Language.
//!
//! Each cell is three characters: `___` empty, `b__` normal, `M<dir><phase>`
//! mover, `G<dir><mode>` gluer. A line of tokens runs along +x, successive
//! lines along +y, and consecutive token lines form one z-plane. Any comment
//! (`//`) or blank line between token lines starts the next plane.

use std::fmt;

use thiserror::Error;

use crate::world::{BlockId, Cell, Direction, GluerMode, Kind, World, WorldConfig};

/// One cell token with the source position it was read from.
#[derive(Debug, Clone, Copy)]
pub struct Token {
    pub kind: Option<Kind>,
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Token {}

impl Token {
    pub fn empty() -> Token {
        Token {
            kind: None,
            line: 0,
            col: 0,
        }
    }

    pub fn of(kind: Kind) -> Token {
        Token {
            kind: Some(kind),
            line: 0,
            col: 0,
        }
    }

    pub fn text(&self) -> String {
        self.kind.map_or_else(|| "___".to_string(), |k| k.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    Comment(String),
    Blank,
    Row(Vec<Token>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MdlDocument {
    pub lines: Vec<Line>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MdlError {
    #[error("line {line}, column {col}: unknown block kind in token {token:?}")]
    UnknownKind {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}, column {col}: malformed token {token:?}")]
    BadToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}, column {col}: direction digit out of range in {token:?}")]
    BadDirection {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}: row has {found} tokens, plane started with {expected}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
}

impl MdlError {
    pub fn line(&self) -> usize {
        match self {
            MdlError::UnknownKind { line, .. }
            | MdlError::BadToken { line, .. }
            | MdlError::BadDirection { line, .. }
            | MdlError::Ragged { line, .. } => *line,
        }
    }
}

fn parse_token(s: &str, line: usize, col: usize) -> Result<Token, MdlError> {
    let b = s.as_bytes();
    let bad = || MdlError::BadToken {
        line,
        col,
        token: s.to_string(),
    };
    let digit = |c: u8| {
        if c.is_ascii_digit() {
            Some(c - b'0')
        } else {
            None
        }
    };
    let kind = match b[0] {
        b'_' if s == "___" => None,
        b'b' if s == "b__" => Some(Kind::Normal),
        b'_' | b'b' => return Err(bad()),
        b'M' | b'G' => {
            let d = digit(b[1]).ok_or_else(bad)?;
            let dir = Direction::from_code(d).ok_or_else(|| MdlError::BadDirection {
                line,
                col,
                token: s.to_string(),
            })?;
            let p = digit(b[2]).ok_or_else(bad)?;
            if b[0] == b'M' {
                Some(Kind::Mover { dir, phase: p })
            } else {
                Some(Kind::Gluer {
                    dir,
                    mode: GluerMode::from_code(p).ok_or_else(bad)?,
                })
            }
        }
        _ => {
            return Err(MdlError::UnknownKind {
                line,
                col,
                token: s.to_string(),
            })
        }
    };
    Ok(Token { kind, line, col })
}

fn parse_row(text: &str, line: usize) -> Result<Vec<Token>, MdlError> {
    if !text.is_ascii() {
        return Err(MdlError::BadToken {
            line,
            col: 1,
            token: text.to_string(),
        });
    }
    let mut tokens = Vec::with_capacity(text.len() / 3);
    let mut i = 0;
    while i < text.len() {
        let end = (i + 3).min(text.len());
        let tok = &text[i..end];
        if tok.len() < 3 {
            return Err(MdlError::BadToken {
                line,
                col: i + 1,
                token: tok.to_string(),
            });
        }
        tokens.push(parse_token(tok, line, i + 1)?);
        i = end;
    }
    Ok(tokens)
}

/// Parses MDL text. Line and column numbers in errors are 1-based.
pub fn parse_mdl(text: &str) -> Result<MdlDocument, MdlError> {
    let mut doc = MdlDocument::default();
    let mut plane_width: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.starts_with("//") {
            doc.lines.push(Line::Comment(raw.to_string()));
            plane_width = None;
        } else if raw.trim().is_empty() {
            doc.lines.push(Line::Blank);
            plane_width = None;
        } else {
            let row = parse_row(raw, line)?;
            match plane_width {
                Some(w) if w != row.len() => {
                    return Err(MdlError::Ragged {
                        line,
                        expected: w,
                        found: row.len(),
                    })
                }
                _ => plane_width = Some(row.len()),
            }
            doc.lines.push(Line::Row(row));
        }
    }
    Ok(doc)
}

/// Renders a document; every line is terminated by `\n`.
pub fn serialize_mdl(doc: &MdlDocument) -> String {
    let mut out = String::new();
    for line in &doc.lines {
        match line {
            Line::Comment(c) => out.push_str(c),
            Line::Blank => {}
            Line::Row(tokens) => tokens.iter().for_each(|t| out.push_str(&t.text())),
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for MdlDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_mdl(self))
    }
}

impl MdlDocument {
    /// Planes in order, each a list of rows.
    pub fn planes(&self) -> Vec<Vec<&[Token]>> {
        let mut planes: Vec<Vec<&[Token]>> = Vec::new();
        let mut current: Vec<&[Token]> = Vec::new();
        for line in &self.lines {
            match line {
                Line::Row(t) => current.push(t),
                _ if !current.is_empty() => planes.push(std::mem::take(&mut current)),
                _ => {}
            }
        }
        if !current.is_empty() {
            planes.push(current);
        }
        planes
    }

    /// Every token with its grid position (x = column, y = row, z = plane).
    pub fn cells(&self) -> Vec<(Cell, Token)> {
        let mut out = Vec::new();
        for (z, plane) in self.planes().iter().enumerate() {
            for (y, row) in plane.iter().enumerate() {
                for (x, t) in row.iter().enumerate() {
                    out.push((Cell::new(x as i32, y as i32, z as i32), *t));
                }
            }
        }
        out
    }

    pub fn token_count(&self) -> usize {
        self.cells().len()
    }

    pub fn block_count(&self) -> usize {
        self.cells()
            .iter()
            .filter(|(_, t)| t.kind.is_some())
            .count()
    }

    /// Instantiates the document at `origin` inside an existing world; all
    /// face-adjacent blocks of the document are bonded together.
    pub fn place(
        &self,
        world: &mut World,
        origin: Cell,
    ) -> Result<Vec<BlockId>, crate::world::WorldError> {
        let mut ids = Vec::new();
        for (c, t) in self.cells() {
            if let Some(kind) = t.kind {
                ids.push(world.add_block(kind, origin + c)?);
            }
        }
        world.bond_all_adjacent(&ids)?;
        Ok(ids)
    }

    /// Builds a document from explicit blocks, one `// z=K:` header per plane.
    pub fn from_blocks(blocks: &[(Cell, Kind)]) -> MdlDocument {
        let mut doc = MdlDocument::default();
        let Some(first) = blocks.first() else {
            return doc;
        };
        let (mut lo, mut hi) = (first.0, first.0);
        for (c, _) in blocks {
            lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z));
            hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z));
        }
        let lookup: std::collections::HashMap<Cell, Kind> = blocks.iter().copied().collect();
        for z in lo.z..=hi.z {
            doc.lines.push(Line::Comment(format!("// z={}:", z - lo.z)));
            for y in lo.y..=hi.y {
                let row = (lo.x..=hi.x)
                    .map(|x| {
                        lookup
                            .get(&Cell::new(x, y, z))
                            .map_or_else(Token::empty, |k| Token::of(*k))
                    })
                    .collect();
                doc.lines.push(Line::Row(row));
            }
        }
        doc
    }

    /// Snapshot of a world (or part of it) with movers drawn contracted.
    pub fn from_world<'a>(
        world: &World,
        ids: impl IntoIterator<Item = &'a BlockId>,
    ) -> MdlDocument {
        let blocks: Vec<(Cell, Kind)> = ids
            .into_iter()
            .filter_map(|id| world.block(*id))
            .map(|b| (b.pos, b.kind))
            .collect();
        MdlDocument::from_blocks(&blocks)
    }
}

/// Loads a document into a fresh world with the given configuration.
pub fn to_world(doc: &MdlDocument, config: WorldConfig) -> World {
    let mut world = World::new(config);
    doc.place(&mut world, Cell::ORIGIN)
        .expect("document cells are distinct and adjacency is checked");
    world
}

/// Information content of a document under a fixed-width token code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfoBits {
    /// Cells in the document, empty ones included.
    pub token_count: usize,
    pub distinct_tokens: usize,
    pub bits_per_token: u32,
    pub total_bits: usize,
}

impl fmt::Display for InfoBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tokens: {}\ndistinct: {}\nbits_per_token: {}\ntotal_bits: {}",
            self.token_count, self.distinct_tokens, self.bits_per_token, self.total_bits
        )
    }
}

/// Counts every token and codes each with `max(ceil(log2(distinct)), 1)` bits.
pub fn info_bits(doc: &MdlDocument) -> InfoBits {
    let cells = doc.cells();
    let distinct: std::collections::BTreeSet<String> =
        cells.iter().map(|(_, t)| t.text()).collect();
    let d = distinct.len();
    let bits_per_token = if d <= 1 { 1 } else { (d - 1).ilog2() + 1 };
    InfoBits {
        token_count: cells.len(),
        distinct_tokens: d,
        bits_per_token,
        total_bits: cells.len() * bits_per_token as usize,
    }
}

/// Reference MDL listing of a five-plane builder.
pub const BUILDER_LISTING: &str = "\
// z=0:
b_____M25
b_____M25
______M25
// z=1:
b________
_________
// z=2:
M04______
_________
// z=3:
b________
_________
// z=4:
b__G01___
___G01___
";
