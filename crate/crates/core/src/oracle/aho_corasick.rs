use crate::pattern::{Occurrence, PatternSet};
use std::collections::VecDeque;

const ROOT: u32 = 0;
const MATCH_FLAG: u32 = 1 << 31;
/// Largest dense transition table, in entries, before falling back to the
/// goto/fail walk.
const DFA_BUDGET: usize = 1 << 25;

/// Classic goto/fail/output automaton over raw bytes.
///
/// When the transition table fits [`DFA_BUDGET`] the failure transitions are
/// resolved ahead of time into a dense table over the byte classes that occur
/// in the patterns; otherwise the search follows failure links at run time.
#[derive(Debug, Clone)]
pub struct AhoCorasick {
    lens: Vec<usize>,
    goto: Vec<Vec<(u8, u32)>>,
    root: [u32; 256],
    fail: Vec<u32>,
    /// Pattern indices whose last byte ends in the state.
    own: Vec<Vec<u32>>,
    /// Nearest proper suffix state that has its own outputs, or `ROOT`.
    out_link: Vec<u32>,
    dfa: Option<Dfa>,
}

#[derive(Debug, Clone)]
struct Dfa {
    classes: [u32; 256],
    stride: usize,
    /// `next | MATCH_FLAG` when the target state reports anything.
    table: Vec<u32>,
}

impl AhoCorasick {
    pub fn new(ps: &PatternSet) -> Self {
        Self::with_dfa_budget(ps, DFA_BUDGET)
    }

    pub(crate) fn with_dfa_budget(ps: &PatternSet, budget: usize) -> Self {
        let mut goto: Vec<Vec<(u8, u32)>> = vec![Vec::new()];
        let mut own: Vec<Vec<u32>> = vec![Vec::new()];
        for (index, pattern) in ps.iter().enumerate() {
            let mut state = ROOT;
            for &b in pattern {
                state = match find(&goto[state as usize], b) {
                    Some(next) => next,
                    None => {
                        let next = goto.len() as u32;
                        goto.push(Vec::new());
                        own.push(Vec::new());
                        let edges = &mut goto[state as usize];
                        let at = edges.partition_point(|&(e, _)| e < b);
                        edges.insert(at, (b, next));
                        next
                    }
                };
            }
            own[state as usize].push(index as u32);
        }

        let mut root = [ROOT; 256];
        for &(b, next) in &goto[ROOT as usize] {
            root[b as usize] = next;
        }

        let states = goto.len();
        let mut fail = vec![ROOT; states];
        let mut out_link = vec![ROOT; states];
        let mut order = Vec::with_capacity(states);
        let mut queue: VecDeque<u32> = goto[ROOT as usize].iter().map(|&(_, s)| s).collect();
        while let Some(state) = queue.pop_front() {
            order.push(state);
            for &(b, child) in &goto[state as usize] {
                let mut f = fail[state as usize];
                let target = loop {
                    if f == ROOT {
                        break root[b as usize];
                    }
                    if let Some(next) = find(&goto[f as usize], b) {
                        break next;
                    }
                    f = fail[f as usize];
                };
                fail[child as usize] = target;
                out_link[child as usize] = if own[target as usize].is_empty() {
                    out_link[target as usize]
                } else {
                    target
                };
                queue.push_back(child);
            }
        }

        let mut ac = AhoCorasick {
            lens: ps.iter().map(<[u8]>::len).collect(),
            goto,
            root,
            fail,
            own,
            out_link,
            dfa: None,
        };
        ac.dfa = ac.build_dfa(&order, budget);
        ac
    }

    fn reports(&self, state: u32) -> bool {
        !self.own[state as usize].is_empty() || self.out_link[state as usize] != ROOT
    }

    fn build_dfa(&self, order: &[u32], budget: usize) -> Option<Dfa> {
        let mut seen = [false; 256];
        for edges in &self.goto {
            for &(b, _) in edges {
                seen[b as usize] = true;
            }
        }
        let mut classes = [0u32; 256];
        let mut reps = Vec::new();
        for b in 0..256 {
            if seen[b] {
                classes[b] = reps.len() as u32;
                reps.push(b as u8);
            }
        }
        let other = reps.len() as u32;
        for b in 0..256 {
            if !seen[b] {
                classes[b] = other;
            }
        }
        let stride = reps.len() + usize::from(reps.len() < 256);
        let states = self.goto.len();
        if states.checked_mul(stride).is_none_or(|n| n > budget) {
            return None;
        }

        let flag = |s: u32| if self.reports(s) { s | MATCH_FLAG } else { s };
        let mut table = vec![ROOT; states * stride];
        for (c, &b) in reps.iter().enumerate() {
            table[c] = flag(self.root[b as usize]);
        }
        for &state in order {
            let f = self.fail[state as usize] as usize;
            let base = state as usize * stride;
            for c in 0..stride {
                table[base + c] = table[f * stride + c];
            }
            for &(b, next) in &self.goto[state as usize] {
                table[base + classes[b as usize] as usize] = flag(next);
            }
        }
        Some(Dfa {
            classes,
            stride,
            table,
        })
    }

    fn next_state(&self, mut state: u32, b: u8) -> u32 {
        loop {
            if state == ROOT {
                return self.root[b as usize];
            }
            if let Some(next) = find(&self.goto[state as usize], b) {
                return next;
            }
            state = self.fail[state as usize];
        }
    }

    fn emit(&self, state: u32, end: usize, out: &mut Vec<Occurrence>) {
        let mut s = state;
        while s != ROOT {
            for &index in &self.own[s as usize] {
                let index = index as usize;
                out.push(Occurrence::new(index, end + 1 - self.lens[index]));
            }
            s = self.out_link[s as usize];
        }
    }

    /// All occurrences, sorted by `(offset, pattern)`.
    pub fn find_all(&self, text: &[u8]) -> Vec<Occurrence> {
        let mut out = Vec::new();
        match &self.dfa {
            Some(dfa) => {
                let mut state = ROOT;
                for (end, &b) in text.iter().enumerate() {
                    let next =
                        dfa.table[state as usize * dfa.stride + dfa.classes[b as usize] as usize];
                    state = next & !MATCH_FLAG;
                    if next & MATCH_FLAG != 0 {
                        self.emit(state, end, &mut out);
                    }
                }
            }
            None => {
                let mut state = ROOT;
                for (end, &b) in text.iter().enumerate() {
                    state = self.next_state(state, b);
                    if self.reports(state) {
                        self.emit(state, end, &mut out);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn state_count(&self) -> usize {
        self.goto.len()
    }

    pub fn is_dense(&self) -> bool {
        self.dfa.is_some()
    }
}

fn find(edges: &[(u8, u32)], b: u8) -> Option<u32> {
    edges
        .binary_search_by_key(&b, |&(e, _)| e)
        .ok()
        .map(|i| edges[i].1)
}
