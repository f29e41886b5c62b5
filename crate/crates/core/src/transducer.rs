//! Interval word transducers.
//!
//! States are tuples of `D-1` slope values for one interval; the input and
//! output alphabet is `{0, .., D-2}`. The transition function is computed
//! mechanically from the interval update rule: given the state of an
//! interval and the type of an incoming influent run, it yields the interval
//! state after the run together with the types handed to the next interval.
//!
//! For `D = 3` words over `{0, 1}` are conventionally rendered with the
//! letters `a` and `b`.

use std::collections::HashMap;
use std::fmt::Write as _;

use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sandpile::ModelParams;

pub type Letter = u8;
pub type Word = Vec<u8>;

/// Largest position holding value `D-1` once any position up to `letter`
/// does; `None` when no position up to `letter` triggers. The letter must
/// lie in the alphabet (`letter < D-1`); [`transition`] validates that.
pub fn fired_peak(state: &[u8], letter: Letter, params: &ModelParams) -> Option<u8> {
    let top = (params.d() - 1) as u8;
    let trigger = state[..=letter as usize].contains(&top);
    if !trigger {
        return None;
    }
    state
        .iter()
        .rposition(|&v| v == top)
        .map(|p| p as u8)
}

/// One transition of the interval machine: applies the update rule until no
/// position up to `letter` holds `D-1` any more, collecting one output
/// letter per zeroed position.
pub fn transition(state: &[u8], letter: Letter, params: &ModelParams) -> Result<(Vec<u8>, Word)> {
    let d1 = params.interval_len();
    debug_assert_eq!(state.len(), d1);
    if letter as usize >= d1 {
        return Err(Error::LetterOutOfAlphabet {
            letter,
            alphabet: d1 as u8,
        });
    }
    let guard = params.d_us() * d1;
    let mut current = state.to_vec();
    let mut output = Word::new();
    for _ in 0..=guard {
        match fired_peak(&current, letter, params) {
            None => {
                for v in &mut current[..=letter as usize] {
                    *v += 1;
                }
                return Ok((current, output));
            }
            Some(p) => {
                output.push(p);
                let p = p as usize;
                current[p] = 0;
                for v in &mut current[p + 1..] {
                    *v += 1;
                }
            }
        }
    }
    Err(Error::TransitionGuard(guard))
}

/// Output convention for transient states.
///
/// The update rule emits output letters from every state it passes through;
/// the suppressed convention clears the outputs of edges leaving transient
/// states. Both conventions are kept selectable and the end-to-end pipeline
/// reports which one matches simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputMode {
    AlgorithmExact,
    FigureSuppressed,
}

impl OutputMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputMode::AlgorithmExact => "algorithm-exact",
            OutputMode::FigureSuppressed => "figure-suppressed",
        }
    }
}

impl std::str::FromStr for OutputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algorithm-exact" | "exact" => Ok(OutputMode::AlgorithmExact),
            "figure-suppressed" | "suppressed" => Ok(OutputMode::FigureSuppressed),
            other => Err(Error::Parse(format!("unknown output mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for OutputMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub output: Word,
}

/// Deterministic finite-state word transducer over interval states.
///
/// Only states reachable from the all-zero initial state are materialized.
/// Construction is breadth-first, so state ids are stable for a given `D`.
#[derive(Debug, Clone)]
pub struct Machine {
    params: ModelParams,
    mode: OutputMode,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// edges[state][letter]
    edges: Vec<Vec<Edge>>,
    recurrent: Vec<bool>,
}

impl Machine {
    /// Breadth-first closure of the transition function from the all-zero
    /// state.
    pub fn build(params: &ModelParams, mode: OutputMode) -> Result<Self> {
        let d1 = params.interval_len();
        let initial = vec![0u8; d1];
        let mut states = vec![initial.clone()];
        let mut index = HashMap::from([(initial, 0usize)]);
        let mut edges: Vec<Vec<Edge>> = Vec::new();
        let mut next = 0usize;
        while next < states.len() {
            let state = states[next].clone();
            let mut row = Vec::with_capacity(d1);
            for letter in 0..d1 as u8 {
                let (target_state, output) = transition(&state, letter, params)?;
                let target = *index.entry(target_state.clone()).or_insert_with(|| {
                    states.push(target_state);
                    states.len() - 1
                });
                row.push(Edge { target, output });
            }
            edges.push(row);
            next += 1;
        }

        let recurrent = recurrent_states(&edges, states.len());
        let mut machine = Machine {
            params: *params,
            mode,
            states,
            index,
            edges,
            recurrent,
        };
        if mode == OutputMode::FigureSuppressed {
            for (id, row) in machine.edges.iter_mut().enumerate() {
                if !machine.recurrent[id] {
                    for edge in row {
                        edge.output.clear();
                    }
                }
            }
        }
        Ok(machine)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn d(&self) -> u32 {
        self.params.d()
    }

    pub fn mode(&self) -> OutputMode {
        self.mode
    }

    pub fn alphabet_len(&self) -> usize {
        self.params.interval_len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn state_tuple(&self, id: usize) -> &[u8] {
        &self.states[id]
    }

    pub fn state_id(&self, tuple: &[u8]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn is_recurrent(&self, id: usize) -> bool {
        self.recurrent[id]
    }

    pub fn recurrent_ids(&self) -> Vec<usize> {
        (0..self.state_count()).filter(|&i| self.recurrent[i]).collect()
    }

    pub fn edge(&self, state: usize, letter: Letter) -> Result<&Edge> {
        if letter as usize >= self.alphabet_len() {
            return Err(Error::LetterOutOfAlphabet {
                letter,
                alphabet: self.alphabet_len() as u8,
            });
        }
        Ok(&self.edges[state][letter as usize])
    }

    /// Folds the transition function over `word` from `from` (a state id of
    /// this machine), returning the end state and the concatenated output.
    pub fn run_from(&self, from: usize, word: &[u8]) -> Result<(usize, Word)> {
        let mut state = from;
        let mut output = Word::new();
        for &letter in word {
            let edge = self.edge(state, letter)?;
            output.extend_from_slice(&edge.output);
            state = edge.target;
        }
        Ok((state, output))
    }

    /// `t(word)`: run from the initial state.
    pub fn run(&self, word: &[u8]) -> Result<(usize, Word)> {
        self.run_from(self.initial(), word)
    }

    pub fn image(&self, word: &[u8]) -> Result<Word> {
        Ok(self.run(word)?.1)
    }

    /// n-fold application of the image map.
    pub fn iterate(&self, word: &[u8], n: usize) -> Result<Word> {
        let mut current = word.to_vec();
        for _ in 0..n {
            current = self.image(&current)?;
        }
        Ok(current)
    }

    /// DOT export: one node per state labeled with its tuple, edges labeled
    /// `letter|output`.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph transducer {{");
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(
            out,
            "  label=\"interval machine D={} ({})\";",
            self.d(),
            self.mode
        );
        for (id, tuple) in self.states.iter().enumerate() {
            let shape = if self.recurrent[id] { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  s{id} [label=\"{}\", shape={shape}];",
                render_tuple(tuple)
            );
        }
        for (id, row) in self.edges.iter().enumerate() {
            for (letter, edge) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  s{id} -> s{} [label=\"{}|{}\"];",
                    edge.target,
                    render_letter(letter as u8, self.d()),
                    if edge.output.is_empty() {
                        "ε".to_string()
                    } else {
                        render_word(&edge.output, self.d(), true)
                    }
                );
            }
        }
        let _ = writeln!(out, "}}");
        out
    }
}

fn recurrent_states(edges: &[Vec<Edge>], n: usize) -> Vec<bool> {
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for (from, row) in edges.iter().enumerate() {
        for edge in row {
            graph.add_edge(nodes[from], nodes[edge.target], ());
        }
    }
    let mut recurrent = vec![false; n];
    for scc in petgraph::algo::tarjan_scc(&graph) {
        let members: Vec<usize> = scc.iter().map(|ix| ix.index()).collect();
        let closed = members
            .iter()
            .all(|&m| edges[m].iter().all(|e| members.contains(&e.target)));
        if closed {
            for m in members {
                recurrent[m] = true;
            }
        }
    }
    recurrent
}

fn render_tuple(tuple: &[u8]) -> String {
    tuple.iter().map(|v| v.to_string()).collect()
}

fn render_letter(letter: u8, d: u32) -> String {
    if d == 3 {
        if letter == 0 { "a".into() } else { "b".into() }
    } else {
        letter.to_string()
    }
}

/// Renders a word as digits, or as `a`/`b` for `D = 3` when `ab` is set.
pub fn render_word(word: &[u8], d: u32, ab: bool) -> String {
    if ab && d == 3 {
        word.iter().map(|&l| if l == 0 { 'a' } else { 'b' }).collect()
    } else {
        word.iter()
            .map(|l| {
                char::from_digit(*l as u32, 36).expect("letters below 36")
            })
            .collect()
    }
}

/// Parses a word over the alphabet of KSPM(D); accepts digits for every `D`
/// and the `a`/`b` rendering for `D = 3`.
pub fn parse_word(input: &str, d: u32) -> Result<Word> {
    let alphabet = (d - 1) as u8;
    let mut word = Word::with_capacity(input.len());
    for ch in input.chars() {
        let letter = match ch {
            'a' if d == 3 => 0,
            'b' if d == 3 => 1,
            _ => ch
                .to_digit(36)
                .ok_or_else(|| Error::Parse(format!("invalid letter `{ch}`")))?
                as u8,
        };
        if letter >= alphabet {
            return Err(Error::LetterOutOfAlphabet { letter, alphabet });
        }
        word.push(letter);
    }
    Ok(word)
}
