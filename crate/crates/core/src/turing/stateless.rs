//! Three-headed stateless form: the tape holds (state, symbol) tuples, and a
//! rule rewrites the three tuples around the head.
//!
//! Tuples print as two characters, `_` for an absent state. A rule writes the
//! new symbol at the centre and hands the new state to the neighbour in the
//! move direction; the centre keeps its state unless the machine halts there.

use std::collections::HashMap;
use std::fmt;

use super::{Move, Outcome, TuringError, TuringMachine};

/// One tape cell of the tuple tape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TupleSlot {
    pub state: Option<char>,
    pub symbol: char,
}

impl TupleSlot {
    fn text(&self) -> String {
        format!("{}{}", self.state.unwrap_or('_'), self.symbol)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleTape {
    pub cells: Vec<TupleSlot>,
    pub head: Option<usize>,
}

impl TupleTape {
    pub fn symbols(&self) -> String {
        self.cells.iter().map(|c| c.symbol).collect()
    }

    /// Tuple text, with the head window in brackets when `bracket` is set.
    pub fn render(&self, bracket: bool) -> String {
        let window = self
            .head
            .filter(|_| bracket)
            .map(|h| (h.saturating_sub(1), (h + 1).min(self.cells.len() - 1)));
        let mut out = String::new();
        for (i, c) in self.cells.iter().enumerate() {
            if window.is_some_and(|(lo, _)| lo == i) {
                out.push('[');
            }
            out.push_str(&c.text());
            if window.is_some_and(|(_, hi)| hi == i) {
                out.push(']');
            }
        }
        out
    }

    fn cleared(&self) -> String {
        self.cells
            .iter()
            .map(|c| format!("_{}", c.symbol))
            .collect()
    }
}

/// Encodes a symbol tape, optionally placing `state` at `head`.
pub fn encode_tuple_tape(tape: &str, head: Option<(char, usize)>) -> String {
    tape.chars()
        .enumerate()
        .map(|(i, s)| match head {
            Some((st, h)) if h == i => format!("{st}{s}"),
            _ => format!("_{s}"),
        })
        .collect()
}

/// Parses tuple text. The head is the single stated tuple, or the centre of
/// the bracketed window when several tuples carry states.
pub fn decode_tuple_tape(text: &str) -> Result<TupleTape, TuringError> {
    let bad = || TuringError::MalformedTape(text.to_string());
    let mut open = None;
    let mut close = None;
    let mut chars = Vec::new();
    for c in text.chars() {
        match c {
            '[' if open.is_none() => open = Some(chars.len() / 2),
            ']' if close.is_none() && open.is_some() => close = Some(chars.len() / 2),
            '[' | ']' => return Err(bad()),
            c if c.is_whitespace() => return Err(bad()),
            c => chars.push(c),
        }
    }
    if chars.len() % 2 != 0 || open.is_some() != close.is_some() {
        return Err(bad());
    }
    let cells: Vec<TupleSlot> = chars
        .chunks(2)
        .map(|p| TupleSlot {
            state: (p[0] != '_').then_some(p[0]),
            symbol: p[1],
        })
        .collect();
    let stated: Vec<usize> = (0..cells.len())
        .filter(|i| cells[*i].state.is_some())
        .collect();
    let head = match (open, close) {
        (Some(lo), Some(hi)) => {
            let len = hi.checked_sub(lo).ok_or_else(bad)?;
            match len {
                3 => Some(lo + 1),
                2 if lo == 0 && stated.first() == Some(&0) => Some(0),
                2 => Some(lo + 1),
                _ => return Err(bad()),
            }
        }
        _ => match stated.as_slice() {
            [] => None,
            [h] => Some(*h),
            _ => return Err(bad()),
        },
    };
    Ok(TupleTape { cells, head })
}

/// A tuple pattern; `None` parts match anything and, on the right-hand
/// side, leave the cell unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pat {
    pub state: Option<char>,
    pub symbol: Option<char>,
}

impl Pat {
    const ANY: Pat = Pat {
        state: None,
        symbol: None,
    };

    fn text(&self) -> String {
        format!(
            "{}{}",
            self.state.unwrap_or('_'),
            self.symbol.unwrap_or('_')
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletRule {
    pub lhs: [Pat; 3],
    pub rhs: [Pat; 3],
    pub shift: Move,
}

impl fmt::Display for TripletRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rhs = self.rhs;
        if rhs[1].state.is_none() {
            rhs[1].state = self.lhs[1].state;
        }
        let side = |ps: &[Pat; 3]| ps.iter().map(Pat::text).collect::<String>();
        write!(f, "[{}] -> [{}]", side(&self.lhs), side(&rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatelessTable {
    pub rules: Vec<TripletRule>,
    /// Values a neighbour state slot can hold: `_` plus every non-halting state.
    pub state_domain: Vec<Option<char>>,
    pub symbols: Vec<char>,
    pub blank: Option<char>,
}

fn state_char(name: &str) -> Result<char, TuringError> {
    let mut cs = name.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) if c != '_' => Ok(c),
        _ => Err(TuringError::Capacity(format!(
            "state {name:?} is not a single character"
        ))),
    }
}

/// One wildcard triplet rule per machine rule, in state-then-symbol order.
pub fn to_stateless(tm: &TuringMachine) -> Result<StatelessTable, TuringError> {
    let mut rules = Vec::new();
    for (state, _) in &tm.states {
        for sym in &tm.symbols {
            let Some((next, write)) = tm.rules.get(&(state.clone(), *sym)) else {
                continue;
            };
            let s = state_char(state)?;
            let t = state_char(next)?;
            let shift = tm.move_of(next).expect("validated");
            let mut rhs = [
                Pat::ANY,
                Pat {
                    state: None,
                    symbol: Some(*write),
                },
                Pat::ANY,
            ];
            match shift {
                Move::Left => rhs[0].state = Some(t),
                Move::Right => rhs[2].state = Some(t),
                Move::Halt => rhs[1].state = Some(t),
            }
            rules.push(TripletRule {
                lhs: [
                    Pat::ANY,
                    Pat {
                        state: Some(s),
                        symbol: Some(*sym),
                    },
                    Pat::ANY,
                ],
                rhs,
                shift,
            });
        }
    }
    let mut state_domain = vec![None];
    for (s, m) in &tm.states {
        if *m != Move::Halt {
            state_domain.push(Some(state_char(s)?));
        }
    }
    Ok(StatelessTable {
        rules,
        state_domain,
        symbols: tm.symbols.clone(),
        blank: tm.blank,
    })
}

/// Wildcard-free lookup table: every concrete window maps to the rule it fires.
#[derive(Debug, Clone)]
pub struct ExpandedTable {
    pub entries: HashMap<[TupleSlot; 3], usize>,
    /// Entries generated before duplicates merged; equal to `entries.len()`
    /// when no two rules overlap.
    pub generated: usize,
}

impl StatelessTable {
    pub fn expand(&self) -> ExpandedTable {
        let mut entries = HashMap::new();
        let mut generated = 0;
        let states = |p: Pat| {
            p.state
                .map_or_else(|| self.state_domain.clone(), |s| vec![Some(s)])
        };
        let syms = |p: Pat| p.symbol.map_or_else(|| self.symbols.clone(), |s| vec![s]);
        for (i, rule) in self.rules.iter().enumerate() {
            let centre = TupleSlot {
                state: rule.lhs[1].state,
                symbol: rule.lhs[1].symbol.expect("centre is concrete"),
            };
            for ls in states(rule.lhs[0]) {
                for lc in syms(rule.lhs[0]) {
                    for rs in states(rule.lhs[2]) {
                        for rc in syms(rule.lhs[2]) {
                            let key = [
                                TupleSlot {
                                    state: ls,
                                    symbol: lc,
                                },
                                centre,
                                TupleSlot {
                                    state: rs,
                                    symbol: rc,
                                },
                            ];
                            generated += 1;
                            entries.entry(key).or_insert(i);
                        }
                    }
                }
            }
        }
        ExpandedTable { entries, generated }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatelessRun {
    /// Plain input, each window after a rewrite, then the plain output.
    pub trace: Vec<String>,
    pub tape: TupleTape,
    pub outcome: Outcome,
    pub steps: usize,
}

impl StatelessRun {
    pub fn output(&self) -> String {
        self.tape.symbols()
    }

    /// The trace joined with ` -> `.
    pub fn trace_text(&self) -> String {
        self.trace.join(" -> ")
    }
}

fn apply(p: Pat, slot: &mut TupleSlot) {
    if let Some(s) = p.state {
        slot.state = Some(s);
    }
    if let Some(c) = p.symbol {
        slot.symbol = c;
    }
}

/// Runs the expanded table from `start` at `head` over a symbol tape.
pub fn run_stateless(
    table: &StatelessTable,
    tape: &str,
    start: char,
    head: usize,
    max_steps: usize,
) -> Result<StatelessRun, TuringError> {
    let expanded = table.expand();
    let mut t = TupleTape {
        cells: tape
            .chars()
            .map(|symbol| TupleSlot {
                state: None,
                symbol,
            })
            .collect(),
        head: Some(head),
    };
    if head >= t.cells.len() {
        return Err(TuringError::MalformedTape(tape.to_string()));
    }
    if let Some(c) = tape.chars().find(|c| !table.symbols.contains(c)) {
        return Err(TuringError::UnknownSymbol(c));
    }
    let pad = TupleSlot {
        state: None,
        symbol: table.blank.unwrap_or(table.symbols[0]),
    };
    let mut trace = vec![t.cleared()];
    t.cells[head].state = Some(start);
    trace.push(t.render(true));
    let mut h = head;
    let mut steps = 0;
    let finish = |t: TupleTape, mut trace: Vec<String>, outcome, steps| {
        trace.push(t.cleared());
        Ok(StatelessRun {
            trace,
            tape: t,
            outcome,
            steps,
        })
    };
    loop {
        if steps >= max_steps {
            return Err(TuringError::MaxSteps(steps));
        }
        let left = if h == 0 { pad } else { t.cells[h - 1] };
        let right = t.cells.get(h + 1).copied().unwrap_or(pad);
        let Some(&idx) = expanded.entries.get(&[left, t.cells[h], right]) else {
            return finish(t, trace, Outcome::Stuck, steps);
        };
        let rule = &table.rules[idx];
        steps += 1;
        apply(rule.rhs[1], &mut t.cells[h]);
        if rule.rhs[0] != Pat::ANY {
            if h == 0 {
                if table.blank.is_some() {
                    let mut slot = pad;
                    apply(rule.rhs[0], &mut slot);
                    t.cells.insert(0, slot);
                    h += 1;
                }
            } else {
                apply(rule.rhs[0], &mut t.cells[h - 1]);
            }
        }
        if rule.rhs[2] != Pat::ANY {
            if h + 1 == t.cells.len() {
                if table.blank.is_some() {
                    let mut slot = pad;
                    apply(rule.rhs[2], &mut slot);
                    t.cells.push(slot);
                }
            } else {
                apply(rule.rhs[2], &mut t.cells[h + 1]);
            }
        }
        match rule.shift {
            Move::Halt => {
                t.head = Some(h);
                trace.push(t.render(true));
                return finish(t, trace, Outcome::Halted, steps);
            }
            Move::Left if h == 0 => {
                t.head = None;
                return finish(t, trace, Outcome::OffTape, steps);
            }
            Move::Right if h + 1 == t.cells.len() => {
                t.head = None;
                return finish(t, trace, Outcome::OffTape, steps);
            }
            Move::Left => h -= 1,
            Move::Right => h += 1,
        }
        t.head = Some(h);
        trace.push(t.render(true));
    }
}
