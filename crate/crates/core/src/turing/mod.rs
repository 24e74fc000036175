//! Symbolic Turing machines with movement bound to states, their stateless
//! three-headed translation, and rule tRNA for the block-level machine.

mod stateless;
mod trna;

pub use stateless::{
    decode_tuple_tape, encode_tuple_tape, run_stateless, to_stateless, ExpandedTable, Pat,
    StatelessRun, StatelessTable, TripletRule, TupleSlot, TupleTape,
};
pub use trna::{rules_to_trna, Peg, RuleTrna};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Head movement after entering a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Right,
    Halt,
}

impl Move {
    fn parse(s: &str) -> Option<Move> {
        match s {
            "L" => Some(Move::Left),
            "R" => Some(Move::Right),
            "H" => Some(Move::Halt),
            _ => None,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Move::Left => "L",
            Move::Right => "R",
            Move::Halt => "H",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TuringError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(char),
    #[error("halting state {0:?} must only lead to halting states")]
    HaltEscapes(String),
    #[error("no step limit reached: ran {0} steps without halting")]
    MaxSteps(usize),
    #[error("malformed tape: {0}")]
    MalformedTape(String),
    #[error("machine does not fit the tRNA encoding: {0}")]
    Capacity(String),
}

/// A machine whose states each carry the move made on entering them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    pub symbols: Vec<char>,
    /// States in declaration order; the first is the start state.
    pub states: Vec<(String, Move)>,
    pub rules: BTreeMap<(String, char), (String, char)>,
    /// Symbol written into cells beyond the tape ends; without one the run
    /// stops when the head leaves the tape.
    pub blank: Option<char>,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Entered a halting state.
    Halted,
    /// No rule for the current (state, symbol).
    Stuck,
    /// The head left the tape and the machine has no blank symbol.
    OffTape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmRun {
    pub tape: Vec<char>,
    pub state: String,
    pub head: i64,
    pub outcome: Outcome,
    pub steps: usize,
    /// Head moves taken, in order.
    pub moves: Vec<Move>,
}

impl TmRun {
    pub fn tape_string(&self) -> String {
        self.tape.iter().collect()
    }

    pub fn halted(&self) -> bool {
        self.outcome == Outcome::Halted
    }
}

/// Left side of a rule: the state and the symbol read.
pub type Lhs<'a> = (&'a str, char);

impl TuringMachine {
    pub fn new(
        symbols: &[char],
        states: &[(&str, Move)],
        rules: &[(Lhs<'_>, (&str, char))],
        blank: Option<char>,
    ) -> Result<TuringMachine, TuringError> {
        let tm = TuringMachine {
            symbols: symbols.to_vec(),
            states: states.iter().map(|(s, m)| (s.to_string(), *m)).collect(),
            rules: rules
                .iter()
                .map(|((s, a), (t, b))| ((s.to_string(), *a), (t.to_string(), *b)))
                .collect(),
            blank,
        };
        tm.validate()?;
        Ok(tm)
    }

    pub fn move_of(&self, state: &str) -> Option<Move> {
        self.states
            .iter()
            .find(|(s, _)| s == state)
            .map(|(_, m)| *m)
    }

    pub fn start(&self) -> &str {
        &self.states[0].0
    }

    fn validate(&self) -> Result<(), TuringError> {
        let known = |s: &str| {
            self.move_of(s)
                .ok_or_else(|| TuringError::UnknownState(s.to_string()))
        };
        let sym = |c: char| {
            if self.symbols.contains(&c) {
                Ok(())
            } else {
                Err(TuringError::UnknownSymbol(c))
            }
        };
        if self.states.is_empty() {
            return Err(TuringError::Syntax {
                line: 0,
                msg: "no states declared".into(),
            });
        }
        if let Some(b) = self.blank {
            sym(b)?;
        }
        for ((s, a), (t, b)) in &self.rules {
            let from = known(s)?;
            let to = known(t)?;
            sym(*a)?;
            sym(*b)?;
            if from == Move::Halt && to != Move::Halt {
                return Err(TuringError::HaltEscapes(s.clone()));
            }
        }
        Ok(())
    }

    /// Parses the line format: `symbols: 0 1 #`, `states: R:R L:L H:H`,
    /// `rule: R 0 -> R 0`, optional `blank: #`. `//` starts a comment.
    pub fn parse(text: &str) -> Result<TuringMachine, TuringError> {
        let mut tm = TuringMachine {
            symbols: vec![],
            states: vec![],
            rules: BTreeMap::new(),
            blank: None,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split("//").next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| TuringError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let (key, rest) = content
                .split_once(':')
                .ok_or_else(|| err("expected `key: value`"))?;
            let single = |w: &str| -> Result<char, TuringError> {
                let mut cs = w.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(err("symbols are single characters")),
                }
            };
            match key.trim() {
                "symbols" => {
                    tm.symbols = rest
                        .split_whitespace()
                        .map(single)
                        .collect::<Result<_, _>>()?
                }
                "blank" => tm.blank = Some(single(rest.trim())?),
                "states" => {
                    for w in rest.split_whitespace() {
                        let (name, mv) = w
                            .split_once(':')
                            .ok_or_else(|| err("states are name:move"))?;
                        let mv = Move::parse(mv).ok_or_else(|| err("move must be L, R or H"))?;
                        tm.states.push((name.to_string(), mv));
                    }
                }
                "rule" => {
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| err("rule needs `->`"))?;
                    let pair = |s: &str| -> Result<(String, char), TuringError> {
                        let ws: Vec<&str> = s.split_whitespace().collect();
                        match ws.as_slice() {
                            [st, sy] => Ok((st.to_string(), single(sy)?)),
                            _ => Err(err("each side is `state symbol`")),
                        }
                    };
                    tm.rules.insert(pair(lhs)?, pair(rhs)?);
                }
                other => return Err(err(&format!("unknown key {other:?}"))),
            }
        }
        tm.validate()?;
        Ok(tm)
    }

    /// Runs from `head` in `state` until halt, stuck, off-tape or the limit.
    pub fn run(
        &self,
        tape: &str,
        state: &str,
        head: i64,
        max_steps: usize,
    ) -> Result<TmRun, TuringError> {
        let mut tape: Vec<char> = tape.chars().collect();
        if let Some(c) = tape.iter().find(|c| !self.symbols.contains(c)) {
            return Err(TuringError::UnknownSymbol(*c));
        }
        if self.move_of(state).is_none() {
            return Err(TuringError::UnknownState(state.to_string()));
        }
        let mut state = state.to_string();
        let mut head = head;
        let mut steps = 0;
        let mut moves = Vec::new();
        loop {
            if head < 0 || head as usize >= tape.len() {
                match self.blank {
                    Some(b) if head < 0 => {
                        tape.insert(0, b);
                        head = 0;
                    }
                    Some(b) => tape.push(b),
                    None => {
                        return Ok(TmRun {
                            tape,
                            state,
                            head,
                            outcome: Outcome::OffTape,
                            steps,
                            moves,
                        })
                    }
                }
            }
            if self.move_of(&state) == Some(Move::Halt) && steps > 0 {
                return Ok(TmRun {
                    tape,
                    state,
                    head,
                    outcome: Outcome::Halted,
                    steps,
                    moves,
                });
            }
            if steps >= max_steps {
                return Err(TuringError::MaxSteps(steps));
            }
            let sym = tape[head as usize];
            let Some((next, write)) = self.rules.get(&(state.clone(), sym)) else {
                return Ok(TmRun {
                    tape,
                    state,
                    head,
                    outcome: Outcome::Stuck,
                    steps,
                    moves,
                });
            };
            tape[head as usize] = *write;
            state = next.clone();
            steps += 1;
            match self.move_of(&state).expect("validated") {
                Move::Left => {
                    head -= 1;
                    moves.push(Move::Left);
                }
                Move::Right => {
                    head += 1;
                    moves.push(Move::Right);
                }
                Move::Halt => {}
            }
        }
    }

    /// Runs keyed on the symbol alone: each symbol selects the single rule
    /// whose left side reads it, whatever the current state. This is what a
    /// block machine without state codons computes.
    pub fn run_symbol_keyed(
        &self,
        tape: &str,
        head: i64,
        max_steps: usize,
    ) -> Result<TmRun, TuringError> {
        let mut by_symbol: BTreeMap<char, (String, char)> = BTreeMap::new();
        for ((_, a), rhs) in &self.rules {
            if by_symbol.insert(*a, rhs.clone()).is_some() {
                return Err(TuringError::Capacity(format!(
                    "symbol {a:?} has more than one rule"
                )));
            }
        }
        let mut tape: Vec<char> = tape.chars().collect();
        let mut head = head;
        let mut state = self.start().to_string();
        let mut steps = 0;
        let mut moves = Vec::new();
        loop {
            if head < 0 || head as usize >= tape.len() {
                return Ok(TmRun {
                    tape,
                    state,
                    head,
                    outcome: Outcome::OffTape,
                    steps,
                    moves,
                });
            }
            if steps >= max_steps {
                return Err(TuringError::MaxSteps(steps));
            }
            let Some((next, write)) = by_symbol.get(&tape[head as usize]) else {
                return Ok(TmRun {
                    tape,
                    state,
                    head,
                    outcome: Outcome::Stuck,
                    steps,
                    moves,
                });
            };
            tape[head as usize] = *write;
            state = next.clone();
            steps += 1;
            match self.move_of(&state).expect("validated") {
                Move::Left => {
                    head -= 1;
                    moves.push(Move::Left);
                }
                Move::Right => {
                    head += 1;
                    moves.push(Move::Right);
                }
                Move::Halt => {
                    return Ok(TmRun {
                        tape,
                        state,
                        head,
                        outcome: Outcome::Halted,
                        steps,
                        moves,
                    })
                }
            }
        }
    }

    /// Turns a classic machine whose rules carry their own move into one with
    /// state-bound moves, splitting each (state, move) pair into a state.
    pub fn from_five_tuples(
        symbols: &[char],
        start: &str,
        rules: &[(Lhs<'_>, (&str, char, Move))],
        blank: Option<char>,
    ) -> Result<TuringMachine, TuringError> {
        let name = |s: &str, m: Move| format!("{s}{}", m.tag());
        let mut states: Vec<(String, Move)> = Vec::new();
        let mut push = |n: String, m: Move| {
            if !states.iter().any(|(s, _)| *s == n) {
                states.push((n, m));
            }
        };
        // a synthetic start state moves nowhere and inherits the start's rules
        push(start.to_string(), Move::Halt);
        for (_, (t, _, m)) in rules {
            push(name(t, *m), *m);
        }
        let entries_of = |base: &str| -> Vec<String> {
            let mut out = vec![];
            if base == start {
                out.push(start.to_string());
            }
            for m in [Move::Left, Move::Right] {
                out.push(name(base, m));
            }
            out
        };
        let mut table = BTreeMap::new();
        for ((s, a), (t, b, m)) in rules {
            for entry in entries_of(s) {
                table.insert((entry, *a), (name(t, *m), *b));
            }
        }
        // the start state only needs a move tag of its own; reuse Left so it is not a halting state
        states[0].1 = Move::Left;
        let declared: Vec<String> = states.iter().map(|(s, _)| s.clone()).collect();
        table.retain(|(s, _), _| declared.contains(s));
        let tm = TuringMachine {
            symbols: symbols.to_vec(),
            states,
            rules: table,
            blank,
        };
        tm.validate()?;
        Ok(tm)
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms: Vec<String> = self.symbols.iter().map(|c| c.to_string()).collect();
        writeln!(f, "symbols: {}", syms.join(" "))?;
        if let Some(b) = self.blank {
            writeln!(f, "blank: {b}")?;
        }
        let states: Vec<String> = self
            .states
            .iter()
            .map(|(s, m)| format!("{s}:{}", m.tag()))
            .collect();
        writeln!(f, "states: {}", states.join(" "))?;
        for ((s, a), (t, b)) in &self.rules {
            writeln!(f, "rule: {s} {a} -> {t} {b}")?;
        }
        Ok(())
    }
}

/// Library machines.
pub mod library {
    use super::{Move, TuringMachine};

    pub fn one_complement() -> TuringMachine {
        TuringMachine::new(
            &['0', '1'],
            &[("L", Move::Left)],
            &[(("L", '0'), ("L", '1')), (("L", '1'), ("L", '0'))],
            None,
        )
        .expect("well-formed")
    }

    pub fn halt() -> TuringMachine {
        TuringMachine::new(
            &['0', '1'],
            &[("L", Move::Left), ("H", Move::Halt)],
            &[(("L", '0'), ("L", '0')), (("H", '1'), ("H", '1'))],
            None,
        )
        .expect("well-formed")
    }

    pub fn infinite_loop() -> TuringMachine {
        TuringMachine::new(
            &['0', '1'],
            &[("L", Move::Left), ("R", Move::Right)],
            &[(("L", '0'), ("R", '0')), (("R", '1'), ("L", '1'))],
            None,
        )
        .expect("well-formed")
    }

    /// Doubling a binary number, least significant bit on the right.
    pub fn times_two() -> TuringMachine {
        TuringMachine::new(
            &['0', '1'],
            &[("A", Move::Left), ("B", Move::Left)],
            &[
                (("A", '0'), ("A", '0')),
                (("A", '1'), ("B", '0')),
                (("B", '0'), ("A", '1')),
                (("B", '1'), ("B", '1')),
            ],
            None,
        )
        .expect("well-formed")
    }

    pub fn incrementer() -> TuringMachine {
        TuringMachine::new(
            &['0', '1', '#'],
            &[("R", Move::Right), ("L", Move::Left), ("H", Move::Halt)],
            &[
                (("R", '0'), ("R", '0')),
                (("R", '1'), ("R", '1')),
                (("R", '#'), ("L", '#')),
                (("L", '0'), ("H", '1')),
                (("L", '1'), ("L", '0')),
                (("L", '#'), ("H", '1')),
            ],
            Some('#'),
        )
        .expect("well-formed")
    }

    pub fn by_name(name: &str) -> Option<TuringMachine> {
        match name {
            "1complement" | "one-complement" => Some(one_complement()),
            "halt" => Some(halt()),
            "loop" | "infinite-loop" => Some(infinite_loop()),
            "times2" | "times-two" => Some(times_two()),
            "incrementer" | "increment" => Some(incrementer()),
            _ => None,
        }
    }
}

/// Increments a `#bits#` tape with the incrementer machine.
pub fn increment(tape: &str) -> Result<String, TuringError> {
    let inner = tape
        .strip_prefix('#')
        .and_then(|t| t.strip_suffix('#'))
        .filter(|t| !t.is_empty() && t.chars().all(|c| c == '0' || c == '1'))
        .ok_or_else(|| TuringError::MalformedTape(tape.to_string()))?;
    let run = library::incrementer().run(tape, "R", 1, 10 * (inner.len() + 4))?;
    Ok(run.tape_string())
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;

    #[test]
    fn one_complement_flips_everything() {
        let r = one_complement().run("0110100", "L", 6, 100).unwrap();
        assert_eq!(r.tape_string(), "1001011");
        assert_eq!(r.outcome, Outcome::OffTape);
    }

    #[test]
    fn incrementer_examples() {
        assert_eq!(increment("#011#").unwrap(), "#100#");
        assert_eq!(increment("#0#").unwrap(), "#1#");
        assert_eq!(increment("#11#").unwrap(), "100#");
        assert!(increment("011").is_err());
        assert!(increment("##").is_err());
    }

    #[test]
    fn times_two_doubles_three() {
        let r = times_two().run("011", "A", 2, 100).unwrap();
        assert_eq!(r.tape_string(), "110");
    }

    #[test]
    fn missing_rule_is_stuck_not_halted() {
        let r = halt().run("01", "L", 1, 100).unwrap();
        assert_eq!(r.outcome, Outcome::Stuck);
        assert!(!r.halted());
    }

    #[test]
    fn infinite_loop_hits_the_limit() {
        let e = infinite_loop().run("01", "L", 0, 50).unwrap_err();
        assert_eq!(e, TuringError::MaxSteps(50));
    }

    #[test]
    fn symbol_keyed_halt_machine_stops_on_a_one() {
        let r = halt().run_symbol_keyed("1000", 3, 100).unwrap();
        assert_eq!((r.outcome, r.head, r.steps), (Outcome::Halted, 0, 4));
    }

    #[test]
    fn file_format_round_trip() {
        let tm = incrementer();
        let text = tm.to_string();
        assert_eq!(TuringMachine::parse(&text).unwrap(), tm);
        assert!(matches!(
            TuringMachine::parse("symbols: 0 1\nstates: A:Q"),
            Err(TuringError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            TuringMachine::parse("symbols: 0\nstates: H:H A:L\nrule: H 0 -> A 0"),
            Err(TuringError::HaltEscapes(_))
        ));
    }

    #[test]
    fn five_tuple_import() {
        // flip bits moving right, halt on blank
        let tm = TuringMachine::from_five_tuples(
            &['0', '1', '_'],
            "s",
            &[
                (("s", '0'), ("s", '1', Move::Right)),
                (("s", '1'), ("s", '0', Move::Right)),
                (("s", '_'), ("s", '_', Move::Halt)),
            ],
            None,
        )
        .unwrap();
        let r = tm.run("0110_", "s", 0, 100).unwrap();
        assert_eq!(r.tape_string(), "1001_");
        assert!(r.halted());
    }
}
