//! Canonical labelling by colour refinement and individualization.
//!
//! Colours start from (kind, external index) and are refined by the
//! multiset of neighbour colours until stable. Ties are broken by
//! individualizing each vertex of the first non-singleton cell in turn; the
//! search is exhaustive, so the lexicographically smallest leaf encoding is
//! canonical and the number of leaves attaining it is the order of the
//! vertex automorphism group.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use super::graph::{FeynmanGraph, VertexKind};
use crate::error::{Error, Result};
use crate::hopf::Rational;

/// Canonical generator label of a graph, with external legs treated as
/// indistinguishable. Orders by loop number, then leg count, then text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphLabel {
    loops: u32,
    legs: u32,
    text: String,
}

/// Canonical form with external legs fixed pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub label: String,
    /// Order of the automorphism group fixing every external leg.
    pub automorphisms: u64,
}

type Encoding = Vec<(u32, u32, u32)>;

struct Search<'a> {
    mult: &'a [Vec<u32>],
    best: Option<Encoding>,
    hits: u64,
}

fn multiplicities(g: &FeynmanGraph) -> Vec<Vec<u32>> {
    let n = g.vertices().len();
    let mut m = vec![vec![0u32; n]; n];
    for &(a, b) in g.edges() {
        if a == b {
            m[a][a] += 1;
        } else {
            m[a][b] += 1;
            m[b][a] += 1;
        }
    }
    m
}

fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap() as u32).collect()
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn refine(mult: &[Vec<u32>], mut colors: Vec<u32>) -> Vec<u32> {
    let n = colors.len();
    loop {
        // (color, self-loops, sorted neighbour (color, multiplicity) pairs)
        #[allow(clippy::type_complexity)]
        let keys: Vec<(u32, u32, Vec<(u32, u32)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(u32, u32)> = (0..n)
                    .filter(|&w| w != v && mult[v][w] > 0)
                    .map(|w| (colors[w], mult[v][w]))
                    .collect();
                nb.sort_unstable();
                (colors[v], mult[v][v], nb)
            })
            .collect();
        let next = rank(&keys);
        if distinct(&next) == distinct(&colors) {
            return next;
        }
        colors = next;
    }
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<u32>) {
        let colors = refine(self.mult, colors);
        let n = colors.len();
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
            self.leaf(&colors);
            return;
        };
        for v in (0..n).filter(|&v| colors[v] as usize == target) {
            let keys: Vec<(u32, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
            self.run(rank(&keys));
        }
    }

    fn leaf(&mut self, pos: &[u32]) {
        let n = pos.len();
        let mut enc: Encoding = Vec::new();
        for a in 0..n {
            for b in a..n {
                let m = self.mult[a][b];
                if m > 0 {
                    let (x, y) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
                    enc.push((x, y, m));
                }
            }
        }
        enc.sort_unstable();
        match &self.best {
            Some(best) if *best < enc => {}
            Some(best) if *best == enc => self.hits += 1,
            _ => {
                self.best = Some(enc);
                self.hits = 1;
            }
        }
    }
}

fn search(g: &FeynmanGraph, ordered: bool) -> (Encoding, u64) {
    let mult = multiplicities(g);
    let initial: Vec<u32> = g
        .vertices()
        .iter()
        .map(|v| match v.kind {
            VertexKind::Internal => 0,
            VertexKind::External(k) if ordered => k,
            VertexKind::External(_) => 1,
        })
        .collect();
    let mut s = Search { mult: &mult, best: None, hits: 0 };
    if initial.is_empty() {
        return (Vec::new(), 1);
    }
    s.run(rank(&initial));
    (s.best.unwrap_or_default(), s.hits)
}

fn factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

fn render(g: &FeynmanGraph, enc: &Encoding) -> String {
    let mut text = format!("L{}E{}:", g.loop_number(), g.external_count());
    for (i, &(a, b, m)) in enc.iter().enumerate() {
        if i > 0 {
            text.push(',');
        }
        let _ = write!(text, "{a}-{b}");
        if m > 1 {
            let _ = write!(text, "*{m}");
        }
    }
    text
}

/// Canonical string and automorphism count, external legs fixed pointwise.
pub fn canonical_form(g: &FeynmanGraph) -> CanonicalForm {
    let (enc, vertex_aut) = search(g, true);
    let mut edge_aut = 1u64;
    for &(a, b, m) in &enc {
        edge_aut *= factorial(m);
        if a == b {
            edge_aut *= 1u64 << m;
        }
    }
    CanonicalForm { label: render(g, &enc), automorphisms: vertex_aut * edge_aut }
}

/// `1/|Aut(g)|`.
pub fn symmetry_factor(g: &FeynmanGraph) -> Rational {
    Rational::new(1, canonical_form(g).automorphisms as i128)
}

impl GraphLabel {
    /// Generator label of `g`; external legs are unordered.
    pub fn of(g: &FeynmanGraph) -> Self {
        let (enc, _) = search(g, false);
        GraphLabel {
            loops: g.loop_number(),
            legs: g.external_count() as u32,
            text: render(g, &enc),
        }
    }

    /// Parse a label string, checking that it is canonical.
    pub fn parse(text: &str) -> Result<Self> {
        let g = graph_from_text(text)?;
        let label = Self::of(&g);
        if label.text != text {
            return Err(Error::UnknownGenerator(format!("{text} is not a canonical label")));
        }
        Ok(label)
    }

    pub fn loops(&self) -> u32 {
        self.loops
    }

    pub fn legs(&self) -> u32 {
        self.legs
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Representative graph: internal vertices `0..V`, externals after them.
    pub fn graph(&self) -> FeynmanGraph {
        graph_from_text(&self.text).expect("labels are built from valid graphs")
    }
}

impl fmt::Display for GraphLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn graph_from_text(text: &str) -> Result<FeynmanGraph> {
    let bad = || Error::UnknownGenerator(format!("malformed graph label {text:?}"));
    let rest = text.strip_prefix('L').ok_or_else(bad)?;
    let (head, body) = rest.split_once(':').ok_or_else(bad)?;
    let (l, e) = head.split_once('E').ok_or_else(bad)?;
    let loops: usize = l.parse().map_err(|_| bad())?;
    let legs: usize = e.parse().map_err(|_| bad())?;
    let internal = (2 * loops + legs).checked_sub(2).ok_or_else(bad)?;
    let mut edges = Vec::new();
    for item in body.split(',').filter(|s| !s.is_empty()) {
        let (pair, m) = match item.split_once('*') {
            Some((p, m)) => (p, m.parse::<usize>().map_err(|_| bad())?),
            None => (item, 1),
        };
        let (a, b) = pair.split_once('-').ok_or_else(bad)?;
        let a: usize = a.parse().map_err(|_| bad())?;
        let b: usize = b.parse().map_err(|_| bad())?;
        if a >= internal + legs || b >= internal + legs || m > 3 {
            return Err(bad());
        }
        edges.extend(core::iter::repeat((a, b)).take(m));
    }
    let g = FeynmanGraph::from_kinds(internal, legs, edges)?;
    if g.loop_number() as usize != loops {
        return Err(bad());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures::*;

    #[test]
    fn automorphism_counts() {
        assert_eq!(canonical_form(&bubble()).automorphisms, 2);
        assert_eq!(canonical_form(&triangle()).automorphisms, 1);
        assert_eq!(canonical_form(&gamma2()).automorphisms, 2);
        assert_eq!(canonical_form(&double_insertion()).automorphisms, 8);
        assert_eq!(canonical_form(&vertex()).automorphisms, 1);
        // each tadpole: loop reversal (2)
        assert_eq!(canonical_form(&dumbbell()).automorphisms, 4);
    }

    #[test]
    fn symmetry_factors() {
        assert_eq!(symmetry_factor(&bubble()), Rational::new(1, 2));
        assert_eq!(symmetry_factor(&triangle()), Rational::new(1, 1));
    }

    #[test]
    fn unordered_labels_forget_leg_order() {
        let t = triangle();
        let swapped = t.relabeled(|id| match id {
            101 => 102,
            102 => 101,
            x => x,
        });
        assert_eq!(GraphLabel::of(&t), GraphLabel::of(&swapped));
    }

    #[test]
    fn label_roundtrip() {
        for g in [bubble(), triangle(), gamma2(), double_insertion(), square()] {
            let l = GraphLabel::of(&g);
            assert_eq!(GraphLabel::parse(l.as_str()).unwrap(), l);
            assert_eq!(GraphLabel::of(&l.graph()), l);
        }
        assert_eq!(GraphLabel::of(&bubble()).as_str(), "L1E2:0-1*2,0-2,1-3");
    }

    #[test]
    fn parse_rejects_noncanonical() {
        assert!(GraphLabel::parse("L1E2:0-1*2,0-3,1-2").is_err());
        assert!(GraphLabel::parse("garbage").is_err());
    }

    #[test]
    fn ordering_is_by_loops_first() {
        let b = GraphLabel::of(&bubble());
        let t = GraphLabel::of(&triangle());
        let g2 = GraphLabel::of(&gamma2());
        assert!(b < t && t < g2);
    }
}
