//! Rule tRNA for the block-level machine: the anticodon reads the symbol
//! (and, for composite tRNA, the state) and a peg column records the move.

use super::{Move, TuringError, TuringMachine};
use crate::codons::{alphabet, CodonPattern};

/// Which way the tape head moves after the rule fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Peg {
    Left,
    Right,
    Halt,
}

impl From<Move> for Peg {
    fn from(m: Move) -> Peg {
        match m {
            Move::Left => Peg::Left,
            Move::Right => Peg::Right,
            Move::Halt => Peg::Halt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTrna {
    pub lhs: (String, char),
    pub rhs: (String, char),
    pub peg: Peg,
    /// Codons matched against the tape: the symbol, then the state when composite.
    pub reads: Vec<CodonPattern>,
    /// Codon left on the tape in place of the one read.
    pub writes: CodonPattern,
}

impl RuleTrna {
    pub fn is_composite(&self) -> bool {
        self.reads.len() > 1
    }

    /// Width in blocks: two per 2-codon plus the peg column.
    pub fn width(&self) -> usize {
        2 * self.reads.len() + 1
    }
}

/// One tRNA per defined rule, in rule order. Symbols map to 2-codons in
/// declaration order; state codons are added only when some symbol has more
/// than one rule.
pub fn rules_to_trna(tm: &TuringMachine) -> Result<Vec<RuleTrna>, TuringError> {
    let codons = alphabet(2).expect("arity 2 is valid");
    if tm.symbols.len() > codons.len() {
        return Err(TuringError::Capacity(format!(
            "{} symbols exceed the 2-codon alphabet",
            tm.symbols.len()
        )));
    }
    let sym_codon =
        |c: char| codons[tm.symbols.iter().position(|s| *s == c).expect("validated")].clone();
    let mut seen = std::collections::BTreeSet::new();
    let composite = tm.rules.keys().any(|(_, a)| !seen.insert(*a));
    if composite && tm.states.len() > codons.len() {
        return Err(TuringError::Capacity(format!(
            "{} states exceed the 2-codon alphabet",
            tm.states.len()
        )));
    }
    let state_codon = |s: &str| {
        codons[tm
            .states
            .iter()
            .position(|(n, _)| n == s)
            .expect("validated")]
        .clone()
    };
    Ok(tm
        .rules
        .iter()
        .map(|((s, a), (t, b))| {
            let mut reads = vec![sym_codon(*a)];
            if composite {
                reads.push(state_codon(s));
            }
            RuleTrna {
                lhs: (s.clone(), *a),
                rhs: (t.clone(), *b),
                peg: tm.move_of(t).expect("validated").into(),
                reads,
                writes: sym_codon(*b),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::library;

    #[test]
    fn library_machines() {
        let c = rules_to_trna(&library::one_complement()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|t| t.peg == Peg::Left && t.width() == 3));
        let h = rules_to_trna(&library::halt()).unwrap();
        let pegs: Vec<Peg> = h.iter().map(|t| t.peg).collect();
        assert_eq!(pegs, vec![Peg::Halt, Peg::Left]);
        let t2 = rules_to_trna(&library::times_two()).unwrap();
        assert_eq!(t2.len(), 4);
        assert!(t2.iter().all(|t| t.is_composite() && t.width() == 5));
        assert!(matches!(
            rules_to_trna(&library::incrementer()),
            Err(TuringError::Capacity(_))
        ));
    }

    #[test]
    fn symbols_map_to_two_codons() {
        let c = rules_to_trna(&library::one_complement()).unwrap();
        let zero = c.iter().find(|t| t.lhs.1 == '0').unwrap();
        assert_eq!(zero.reads[0].bit_string(), "10");
        assert_eq!(zero.writes.bit_string(), "01");
    }
}
