//! Words, finite presentations and Tietze simplification.

use crate::error::{Error, Result};
use crate::intmat::{smith, IntMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn exponent(self) -> i64 {
        if self.inv { -1 } else { 1 }
    }
}

pub type Word = Vec<Letter>;

pub fn inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free and cyclic reduction.
pub fn cyclic_reduce(w: &[Letter]) -> Word {
    let mut v = free_reduce(w);
    while v.len() >= 2 && v[0] == v[v.len() - 1].inverse() {
        v.pop();
        v.remove(0);
    }
    v
}

fn rotate(w: &[Letter], k: usize) -> Word {
    let mut v = w[k..].to_vec();
    v.extend_from_slice(&w[..k]);
    v
}

/// Least rotation of `w` or its inverse; equal for cyclically equivalent relators.
fn canonical(w: &[Letter]) -> Word {
    let inv = inverse(w);
    (0..w.len().max(1))
        .flat_map(|k| {
            if w.is_empty() {
                vec![Vec::new()]
            } else {
                vec![rotate(w, k), rotate(&inv, k)]
            }
        })
        .min()
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    /// One label per relator, naming the 2-handle it came from.
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<String>>,
    pub labels: Vec<String>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        let labels = (0..relators.len()).map(|i| format!("r{}", i + 1)).collect();
        Presentation { generators, relators, labels }
    }

    /// Parse relators like `a b a^-1 b^-1`.
    pub fn parse(generators: &[&str], relators: &[&str]) -> Result<Self> {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let rels = relators
            .iter()
            .map(|r| parse_word(&gens, &r.split_whitespace().collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation::new(gens, rels))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        letter_name(&self.generators, l)
    }

    pub fn word_names(&self, w: &[Letter]) -> Vec<String> {
        w.iter().map(|&l| self.letter_name(l)).collect()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn to_doc(&self) -> PresentationDoc {
        PresentationDoc {
            generators: self.generators.clone(),
            relators: self.relators.iter().map(|r| self.word_names(r)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Relator-exponent matrix: rows relators, columns generators.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relators.len(), self.generators.len());
        for (i, r) in self.relators.iter().enumerate() {
            for l in r {
                m.add_to(i, l.gen, l.exponent());
            }
        }
        m
    }

    /// Abelianization as (betti, torsion).
    pub fn abelianization(&self) -> (usize, Vec<i64>) {
        let m = self.exponent_matrix();
        let d = smith(&m).diagonal;
        let torsion = d.iter().copied().filter(|&x| x > 1).collect();
        (self.generators.len() - d.len(), torsion)
    }

    pub fn is_valid(&self) -> bool {
        self.relators.iter().all(|r| r.iter().all(|l| l.gen < self.generators.len()))
            && self.labels.len() == self.relators.len()
    }
}

pub fn letter_name(gens: &[String], l: Letter) -> String {
    if l.inv {
        format!("{}^-1", gens[l.gen])
    } else {
        gens[l.gen].clone()
    }
}

pub fn parse_letter(gens: &[String], s: &str) -> Result<Letter> {
    let (name, inv) = match s.strip_suffix("^-1") {
        Some(base) => (base, true),
        None => (s, false),
    };
    let gen = gens.iter().position(|g| g == name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
    Ok(Letter::new(gen, inv))
}

pub fn parse_word(gens: &[String], letters: &[&str]) -> Result<Word> {
    letters.iter().map(|s| parse_letter(gens, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub step: usize,
    pub kind: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relator: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Simplified {
    pub presentation: Presentation,
    pub trace: Vec<Move>,
    pub exhausted: bool,
}

impl Simplified {
    /// Generators eliminated, in order.
    pub fn eliminations(&self) -> Vec<String> {
        self.trace.iter().filter(|m| m.kind == "eliminate").filter_map(|m| m.generator.clone()).collect()
    }
}

pub const DEFAULT_BUDGET: usize = 10_000;

/// Apply Tietze moves in fixed priority order until a fixpoint or until
/// `budget` moves have been made.
pub fn tietze_simplify(pr: &Presentation, budget: usize) -> Simplified {
    let mut p = pr.clone();
    let mut trace = Vec::new();
    #[cfg(debug_assertions)]
    let invariant = pr.abelianization();
    loop {
        if trace.len() >= budget {
            let exhausted = next_move(&p).is_some();
            return Simplified { presentation: p, trace, exhausted };
        }
        let Some(mv) = next_move(&p) else {
            return Simplified { presentation: p, trace, exhausted: false };
        };
        let record = apply(&mut p, mv, trace.len() + 1);
        trace.push(record);
        #[cfg(debug_assertions)]
        debug_assert_eq!(p.abelianization(), invariant, "Tietze move changed the abelianization");
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Reduce(usize),
    DeleteEmpty(usize),
    DeleteDuplicate(usize, usize),
    Eliminate { relator: usize, position: usize },
    Slide { target: usize, by: usize, replacement: Word },
}

fn next_move(p: &Presentation) -> Option<Plan> {
    if let Some(i) = p.relators.iter().position(|r| cyclic_reduce(r) != *r) {
        return Some(Plan::Reduce(i));
    }
    if let Some(i) = p.relators.iter().position(|r| r.is_empty()) {
        return Some(Plan::DeleteEmpty(i));
    }
    let canon: Vec<Word> = p.relators.iter().map(|r| canonical(r)).collect();
    for j in 0..canon.len() {
        if let Some(i) = (0..j).find(|&i| canon[i] == canon[j]) {
            return Some(Plan::DeleteDuplicate(j, i));
        }
    }
    // shortest relator with a generator occurring exactly once
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, r) in p.relators.iter().enumerate() {
        if best.is_some_and(|(len, _, _)| r.len() >= len) {
            continue;
        }
        let once = r.iter().position(|l| r.iter().filter(|m| m.gen == l.gen).count() == 1);
        if let Some(pos) = once {
            best = Some((r.len(), i, pos));
        }
    }
    if let Some((_, relator, position)) = best {
        return Some(Plan::Eliminate { relator, position });
    }
    for target in 0..p.relators.len() {
        let r = &p.relators[target];
        for by in 0..p.relators.len() {
            if by == target {
                continue;
            }
            let s = &p.relators[by];
            for a in 0..r.len() {
                let ra = rotate(r, a);
                for b in 0..s.len() {
                    for sb in [rotate(s, b), inverse(&rotate(s, b))] {
                        let mut w = ra.clone();
                        w.extend_from_slice(&sb);
                        let w = cyclic_reduce(&w);
                        if w.len() < r.len() {
                            return Some(Plan::Slide { target, by, replacement: w });
                        }
                    }
                }
            }
        }
    }
    None
}

fn apply(p: &mut Presentation, plan: Plan, step: usize) -> Move {
    match plan {
        Plan::Reduce(i) => {
            let before = p.relators[i].len();
            p.relators[i] = cyclic_reduce(&p.relators[i]);
            Move {
                step,
                kind: "reduce".into(),
                detail: format!("reduce {} from length {} to {}", p.labels[i], before, p.relators[i].len()),
                generator: None,
                relator: Some(p.labels[i].clone()),
            }
        }
        Plan::DeleteEmpty(i) => {
            let label = p.labels.remove(i);
            p.relators.remove(i);
            Move { step, kind: "delete-trivial".into(), detail: format!("delete trivial relator {label}"), generator: None, relator: Some(label) }
        }
        Plan::DeleteDuplicate(j, i) => {
            let label = p.labels.remove(j);
            p.relators.remove(j);
            Move {
                step,
                kind: "delete-duplicate".into(),
                detail: format!("delete {label}, a copy of {}", p.labels[i]),
                generator: None,
                relator: Some(label),
            }
        }
        Plan::Eliminate { relator, position } => {
            let r = rotate(&p.relators[relator], position);
            let x = r[0];
            // x^e w = 1  =>  x = w^{-1} if e = +1, x = w if e = -1
            let rest = r[1..].to_vec();
            let value = if x.inv { rest } else { inverse(&rest) };
            let name = p.generators[x.gen].clone();
            let label = p.labels.remove(relator);
            p.relators.remove(relator);
            for w in p.relators.iter_mut() {
                let mut out = Vec::with_capacity(w.len());
                for &l in w.iter() {
                    if l.gen == x.gen {
                        if l.inv {
                            out.extend(inverse(&value));
                        } else {
                            out.extend(value.iter().copied());
                        }
                    } else {
                        out.push(l);
                    }
                }
                *w = out
                    .into_iter()
                    .map(|l| Letter::new(if l.gen > x.gen { l.gen - 1 } else { l.gen }, l.inv))
                    .collect();
            }
            let shown: Vec<String> = value.iter().map(|&l| p.letter_name(l)).collect();
            p.generators.remove(x.gen);
            Move {
                step,
                kind: "eliminate".into(),
                detail: format!("{label} contains {name} once: {name} = {}", if shown.is_empty() { "1".into() } else { shown.join(" ") }),
                generator: Some(name),
                relator: Some(label),
            }
        }
        Plan::Slide { target, by, replacement } => {
            let before = p.relators[target].len();
            p.relators[target] = replacement;
            let label = format!("{}*{}", p.labels[target], p.labels[by]);
            let detail = format!("slide {} over {}: length {} to {}", p.labels[target], p.labels[by], before, p.relators[target].len());
            p.labels[target] = label.clone();
            Move { step, kind: "slide".into(), detail, generator: None, relator: Some(label) }
        }
    }
}
