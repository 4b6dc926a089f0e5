//! Turing machines and their space-time SFTs.
//!
//! Rows are tape configurations, time runs upward. Each cell stores its
//! tape character and a marker for the head of its row: the head itself
//! (with its state and the side it arrived from), the direction toward the
//! head, or "no head in this row". A cell the head has just left also
//! remembers the head's new state so that the horizontal rule can check the
//! arriving head against it.

use std::fmt;

use thiserror::Error;

use crate::sft::{Alphabet, Relation, Sft2d, Sym};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<String>,
    tape: Vec<String>,
    blank: usize,
    init: usize,
    halting: Vec<bool>,
    delta: Vec<Option<(usize, usize, Move)>>,
}

fn plain_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TuringMachine {
    /// Builds a machine; `delta` is indexed by `state * |tape| + char` and
    /// must be defined exactly on the non-halting states.
    pub fn new(
        states: Vec<String>,
        tape: Vec<String>,
        blank: usize,
        init: usize,
        halting: Vec<bool>,
        delta: Vec<Option<(usize, usize, Move)>>,
    ) -> Result<Self, TmError> {
        let (ns, nt) = (states.len(), tape.len());
        if ns == 0 || nt == 0 {
            return Err(TmError::Invalid("states and tape must be nonempty".into()));
        }
        for n in states.iter().chain(&tape) {
            if !plain_name(n) {
                return Err(TmError::Invalid(format!("bad name {n:?}")));
            }
        }
        for names in [&states, &tape] {
            let mut sorted: Vec<_> = names.iter().collect();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != names.len() {
                return Err(TmError::Invalid("duplicate name".into()));
            }
        }
        if blank >= nt || init >= ns || halting.len() != ns || delta.len() != ns * nt {
            return Err(TmError::Invalid("index out of range".into()));
        }
        for s in 0..ns {
            for c in 0..nt {
                match (halting[s], delta[s * nt + c]) {
                    (false, None) => {
                        return Err(TmError::Invalid(format!(
                            "no transition for {} {}",
                            states[s], tape[c]
                        )))
                    }
                    (true, Some(_)) => {
                        return Err(TmError::Invalid(format!(
                            "halting state {} has a transition",
                            states[s]
                        )))
                    }
                    (_, Some((s2, c2, _))) if s2 >= ns || c2 >= nt => {
                        return Err(TmError::Invalid("transition out of range".into()))
                    }
                    _ => {}
                }
            }
        }
        Ok(TuringMachine { states, tape, blank, init, halting, delta })
    }

    /// Reads the line-oriented `.tm` format: `states:`, `tape:`, `blank:`,
    /// `init:`, `halt:` and transitions `state char -> state char L|R`.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, TmError> {
        let mut states: Option<Vec<String>> = None;
        let mut tape: Option<Vec<String>> = None;
        let mut blank: Option<String> = None;
        let mut init: Option<String> = None;
        let mut halt: Option<Vec<String>> = None;
        let mut rules: Vec<(usize, [String; 5])> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| TmError::Malformed { line: line_no, msg: msg.to_string() };
            if let Some((key, rest)) = line.split_once(':') {
                let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                let single = |w: &[String]| match w {
                    [one] => Ok(one.clone()),
                    _ => Err(err("expected exactly one name")),
                };
                let slot_taken = match key.trim() {
                    "states" => states.replace(words).is_some(),
                    "tape" => tape.replace(words).is_some(),
                    "blank" => blank.replace(single(&words)?).is_some(),
                    "init" => init.replace(single(&words)?).is_some(),
                    "halt" => halt.replace(words).is_some(),
                    other => return Err(err(&format!("unknown key {other:?}"))),
                };
                if slot_taken {
                    return Err(err("duplicate key"));
                }
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected '->'"))?;
            let l: Vec<&str> = lhs.split_whitespace().collect();
            let r: Vec<&str> = rhs.split_whitespace().collect();
            if l.len() != 2 || r.len() != 3 {
                return Err(err("expected 'state char -> state char L|R'"));
            }
            rules.push((
                line_no,
                [l[0], l[1], r[0], r[1], r[2]].map(str::to_string),
            ));
        }
        let missing = |k: &str| TmError::Invalid(format!("missing key {k}"));
        let states = states.ok_or_else(|| missing("states"))?;
        let tape = tape.ok_or_else(|| missing("tape"))?;
        let halt = halt.unwrap_or_default();
        let find = |names: &[String], n: &str, line: usize| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| TmError::Malformed { line, msg: format!("unknown name {n:?}") })
        };
        let blank = find(&tape, &blank.ok_or_else(|| missing("blank"))?, 0)?;
        let init = find(&states, &init.ok_or_else(|| missing("init"))?, 0)?;
        let mut halting = vec![false; states.len()];
        for h in &halt {
            halting[find(&states, h, 0)?] = true;
        }
        let nt = tape.len();
        let mut delta = vec![None; states.len() * nt];
        for (line, [s, c, s2, c2, d]) in rules {
            let s = find(&states, &s, line)?;
            let c = find(&tape, &c, line)?;
            let s2 = find(&states, &s2, line)?;
            let c2 = find(&tape, &c2, line)?;
            let d = match d.as_str() {
                "L" => Move::Left,
                "R" => Move::Right,
                _ => return Err(TmError::Malformed { line, msg: "direction must be L or R".into() }),
            };
            if delta[s * nt + c].replace((s2, c2, d)).is_some() {
                return Err(TmError::Malformed { line, msg: "duplicate transition".into() });
            }
        }
        Self::new(states, tape, blank, init, halting, delta)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_chars(&self) -> usize {
        self.tape.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn char_name(&self, c: usize) -> &str {
        &self.tape[c]
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn is_halting(&self, s: usize) -> bool {
        self.halting[s]
    }

    pub fn step(&self, s: usize, c: usize) -> Option<(usize, usize, Move)> {
        self.delta[s * self.tape.len() + c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Left,
    Right,
    Still,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    Head { state: usize, from: Origin },
    /// The head is to the right; `Some(s)` when it just moved there in state `s`.
    ToRight(Option<usize>),
    /// The head is to the left; `Some(s)` when it just moved there in state `s`.
    ToLeft(Option<usize>),
    NoHead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TmCell {
    pub ch: usize,
    pub marker: Marker,
}

struct CellName<'a>(&'a TuringMachine, TmCell);

impl fmt::Display for CellName<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        write!(f, "{}:", m.char_name(self.1.ch))?;
        match self.1.marker {
            Marker::Head { state, from } => {
                let o = match from {
                    Origin::Left => 'l',
                    Origin::Right => 'r',
                    Origin::Still => 's',
                };
                write!(f, "{}@{o}", m.state_name(state))
            }
            Marker::ToRight(v) | Marker::ToLeft(v) => {
                let d = if matches!(self.1.marker, Marker::ToRight(_)) { '>' } else { '<' };
                match v {
                    None => write!(f, "{d}"),
                    Some(s) => write!(f, "{d}{}", m.state_name(s)),
                }
            }
            Marker::NoHead => write!(f, "-"),
        }
    }
}

/// All cell symbols, in alphabet order.
pub fn tm_cells(m: &TuringMachine) -> Vec<TmCell> {
    let ns = m.num_states();
    let mut markers = Vec::new();
    for state in 0..ns {
        for from in [Origin::Left, Origin::Right, Origin::Still] {
            markers.push(Marker::Head { state, from });
        }
    }
    for v in std::iter::once(None).chain((0..ns).map(Some)) {
        markers.push(Marker::ToRight(v));
        markers.push(Marker::ToLeft(v));
    }
    markers.push(Marker::NoHead);
    (0..m.num_chars())
        .flat_map(|ch| markers.iter().map(move |&marker| TmCell { ch, marker }))
        .collect()
}

fn h_ok(a: Marker, b: Marker) -> bool {
    use Marker::*;
    match (a, b) {
        (NoHead, NoHead) => true,
        (ToRight(None), ToRight(_)) => true,
        (ToRight(None), Head { from, .. }) => from != Origin::Left,
        (ToRight(Some(s)), Head { state, from }) => from == Origin::Left && s == state,
        (Head { from, .. }, ToLeft(None)) => from != Origin::Right,
        (Head { state, from }, ToLeft(Some(s))) => from == Origin::Right && s == state,
        (ToLeft(_), ToLeft(None)) => true,
        _ => false,
    }
}

fn v_ok(m: &TuringMachine, below: TmCell, above: TmCell) -> bool {
    use Marker::*;
    match below.marker {
        Head { state, .. } => match m.step(state, below.ch) {
            None => above == TmCell { ch: below.ch, marker: Head { state, from: Origin::Still } },
            Some((s2, c2, d)) => {
                let marker = match d {
                    Move::Right => ToRight(Some(s2)),
                    Move::Left => ToLeft(Some(s2)),
                };
                above == TmCell { ch: c2, marker }
            }
        },
        ToRight(_) => {
            above.ch == below.ch
                && matches!(
                    above.marker,
                    ToRight(None) | Head { from: Origin::Right, .. }
                )
        }
        ToLeft(_) => {
            above.ch == below.ch
                && matches!(above.marker, ToLeft(None) | Head { from: Origin::Left, .. })
        }
        NoHead => above == TmCell { ch: below.ch, marker: NoHead },
    }
}

/// Space-time SFT of `m`. Rows hold at most one head; every row with a head
/// is the image of the row below under one machine step, except where the
/// head enters from outside a finite window.
pub fn tm_spacetime_sft(m: &TuringMachine) -> Sft2d {
    let cells = tm_cells(m);
    let n = cells.len();
    let h = Relation::from_fn(n, |a, b| h_ok(cells[a as usize].marker, cells[b as usize].marker));
    let v = Relation::from_fn(n, |a, b| v_ok(m, cells[a as usize], cells[b as usize]));
    let names = cells.iter().map(|&c| CellName(m, c).to_string()).collect();
    Sft2d::new(Alphabet::new(names).expect("machine names are plain"), h, v)
        .expect("relations sized from alphabet")
        .with_metadata(format!(
            "generator=tm\nstates={}\ntape={}",
            m.states.join(","),
            m.tape.join(",")
        ))
}

/// Symbols for a configuration: tape contents and an optional head
/// `(position, state)` marked as arrived from nowhere in particular.
/// Positions outside the row put the head to that side.
pub fn row_symbols(m: &TuringMachine, tape: &[usize], head: Option<(i64, usize)>) -> Vec<Sym> {
    let cells = tm_cells(m);
    tape.iter()
        .enumerate()
        .map(|(i, &ch)| {
            let marker = match head {
                None => Marker::NoHead,
                Some((p, state)) => match (i as i64).cmp(&p) {
                    std::cmp::Ordering::Less => Marker::ToRight(None),
                    std::cmp::Ordering::Greater => Marker::ToLeft(None),
                    std::cmp::Ordering::Equal => Marker::Head { state, from: Origin::Still },
                },
            };
            let cell = TmCell { ch, marker };
            cells.iter().position(|&c| c == cell).expect("cell exists") as Sym
        })
        .collect()
}
