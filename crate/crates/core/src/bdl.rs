//! Builder Description Language: letters `A`-`F` naming tRNA payloads,
//! components separated by `_`.
//!
//! A component is built one letter per row from the bottom up; each row
//! holds exactly one block in the left or right column.

use std::fmt;

use thiserror::Error;

use crate::codons::{default_kind, BlockClass, Payload, Shape, Side, Trna};
use crate::world::{canonical_text, Cell};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BdlError {
    #[error("component {index} is empty")]
    EmptyComponent { index: usize },
    #[error("invalid letter {letter:?} at position {pos}")]
    InvalidLetter { pos: usize, letter: char },
    #[error("row {row} holds {count} blocks; components have exactly one per row")]
    RowCount { row: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BdlProgram {
    pub components: Vec<Vec<Payload>>,
}

impl BdlProgram {
    pub fn letter_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for BdlProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| c.iter().map(|p| p.letter()).collect())
            .collect();
        f.write_str(&parts.join("_"))
    }
}

/// Parses BDL text; positions in errors are 0-based character offsets.
pub fn parse_bdl(text: &str) -> Result<BdlProgram, BdlError> {
    let mut components = vec![Vec::new()];
    for (pos, ch) in text.chars().enumerate() {
        if ch == '_' {
            components.push(Vec::new());
            continue;
        }
        let p =
            Payload::from_letter(ch).map_err(|_| BdlError::InvalidLetter { pos, letter: ch })?;
        components.last_mut().expect("never empty").push(p);
    }
    if let Some(index) = components.iter().position(Vec::is_empty) {
        return Err(BdlError::EmptyComponent { index });
    }
    Ok(BdlProgram { components })
}

/// A two-wide component, rows listed bottom-up.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentShape {
    pub rows: Vec<[Option<BlockClass>; 2]>,
}

fn column(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl ComponentShape {
    pub fn from_payloads(letters: &[Payload]) -> ComponentShape {
        let rows = letters
            .iter()
            .map(|p| {
                let mut row = [None, None];
                row[column(p.side())] = Some(p.class());
                row
            })
            .collect();
        ComponentShape { rows }
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Cells with left column at x = 0, right at x = 1, row i at y = i.
    pub fn to_shape(&self) -> Shape {
        let mut shape = Shape::default();
        for (y, row) in self.rows.iter().enumerate() {
            for (x, cell) in row.iter().enumerate() {
                if let Some(class) = cell {
                    shape
                        .cells
                        .insert(Cell::new(x as i32, y as i32, 0), default_kind(*class));
                }
            }
        }
        shape
    }

    pub fn canonical_form(&self) -> String {
        let blocks: Vec<_> = self.to_shape().cells.into_iter().collect();
        canonical_text(&blocks)
    }
}

/// Predicted output of the builder for each component.
pub fn shape_oracle(program: &BdlProgram) -> Vec<ComponentShape> {
    program
        .components
        .iter()
        .map(|c| ComponentShape::from_payloads(c))
        .collect()
}

/// tRNA in the order the builder consumes them.
pub fn trna_sequence(program: &BdlProgram) -> Vec<Trna> {
    program
        .components
        .iter()
        .flatten()
        .map(|p| Trna::new(*p))
        .collect()
}

/// BDL text that rebuilds `shape`.
pub fn decompile(shape: &ComponentShape) -> Result<String, BdlError> {
    shape
        .rows
        .iter()
        .enumerate()
        .map(|(row, cells)| match cells {
            [Some(c), None] => Ok(Payload::from_parts(*c, Side::Left).letter()),
            [None, Some(c)] => Ok(Payload::from_parts(*c, Side::Right).letter()),
            [None, None] => Err(BdlError::RowCount { row, count: 0 }),
            [Some(_), Some(_)] => Err(BdlError::RowCount { row, count: 2 }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn parses_published_codes() {
        let lens = |s: &str| -> Vec<usize> {
            parse_bdl(s)
                .unwrap()
                .components
                .iter()
                .map(Vec::len)
                .collect()
        };
        assert_eq!(lens("CCC_DAACAA_DAACAA"), vec![3, 6, 6]);
        assert_eq!(lens("AC_AC_AA"), vec![2, 2, 2]);
        assert_eq!(
            parse_bdl("AC_AC_AAA_AACA_AAAAAB").unwrap().components.len(),
            5
        );
        assert_eq!(parse_bdl("AC_AC_AA").unwrap().to_string(), "AC_AC_AA");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_bdl("AB__A"),
            Err(BdlError::EmptyComponent { index: 1 })
        );
        assert_eq!(parse_bdl(""), Err(BdlError::EmptyComponent { index: 0 }));
        assert_eq!(
            parse_bdl("AXB"),
            Err(BdlError::InvalidLetter {
                pos: 1,
                letter: 'X'
            })
        );
        assert_eq!(
            parse_bdl("AB_g"),
            Err(BdlError::InvalidLetter {
                pos: 3,
                letter: 'g'
            })
        );
    }

    #[test]
    fn aab_is_right_right_left() {
        let shape = &shape_oracle(&parse_bdl("AAB").unwrap())[0];
        let n = Some(BlockClass::Normal);
        assert_eq!(shape.rows, vec![[None, n], [None, n], [n, None]]);
        assert_eq!(decompile(shape).unwrap(), "AAB");
    }

    #[test]
    fn eight_three_letter_shapes_are_distinct() {
        let mut seen = HashSet::new();
        for bits in 0..8u8 {
            let s: String = (0..3)
                .map(|i| if bits >> i & 1 == 1 { 'B' } else { 'A' })
                .collect();
            seen.insert(shape_oracle(&parse_bdl(&s).unwrap()).remove(0));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn builder_components() {
        let ccc = &shape_oracle(&parse_bdl("CCC").unwrap())[0];
        assert!(ccc
            .rows
            .iter()
            .all(|r| r == &[None, Some(BlockClass::Mover)]));
        let t = trna_sequence(&parse_bdl("DAACAA").unwrap());
        assert_eq!(t.len(), 6);
        assert_eq!(t[0].payload, Payload::GluerRight);
        let aab: Vec<Payload> = trna_sequence(&parse_bdl("AAB").unwrap())
            .iter()
            .map(|t| t.payload)
            .collect();
        assert_eq!(
            aab,
            vec![
                Payload::NormalRight,
                Payload::NormalRight,
                Payload::NormalLeft
            ]
        );
    }

    #[test]
    fn decompile_rejects_bad_rows_and_names_left_movers() {
        let f = ComponentShape {
            rows: vec![[Some(BlockClass::Mover), None]],
        };
        assert_eq!(decompile(&f).unwrap(), "F");
        let two = ComponentShape {
            rows: vec![[Some(BlockClass::Normal), Some(BlockClass::Normal)]],
        };
        assert_eq!(
            decompile(&two),
            Err(BdlError::RowCount { row: 0, count: 2 })
        );
    }

    #[test]
    fn decompile_round_trips_every_small_shape() {
        let classes = [BlockClass::Normal, BlockClass::Mover, BlockClass::Gluer];
        let mut cells: Vec<[Option<BlockClass>; 2]> = Vec::new();
        for c in classes {
            cells.push([Some(c), None]);
            cells.push([None, Some(c)]);
        }
        let mut frontier: Vec<Vec<[Option<BlockClass>; 2]>> = vec![vec![]];
        for _ in 0..5 {
            frontier = frontier
                .iter()
                .flat_map(|rows| cells.iter().map(move |c| [rows.clone(), vec![*c]].concat()))
                .collect();
            for rows in &frontier {
                let s = ComponentShape { rows: rows.clone() };
                let text = decompile(&s).unwrap();
                assert_eq!(shape_oracle(&parse_bdl(&text).unwrap()), vec![s]);
            }
        }
    }
}
