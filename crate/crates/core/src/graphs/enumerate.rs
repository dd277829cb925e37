use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::canon::GraphLabel;
use super::graph::FeynmanGraph;
use crate::error::{Error, Result};

/// Largest loop order the enumerator accepts.
pub const MAX_LOOPS: u32 = 4;
/// Largest number of external legs the enumerator accepts.
pub const MAX_LEGS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Keep graphs containing self-loops.
    pub include_tadpoles: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { include_tadpoles: true }
    }
}

struct Fill {
    n: usize,
    remaining: Vec<usize>,
    mult: Vec<Vec<usize>>,
    out: Vec<Vec<Vec<usize>>>,
}

impl Fill {
    // fill row `i` from column `j` on; self-loops of row `i` are already placed
    fn row(&mut self, i: usize, j: usize) {
        if i == self.n {
            self.out.push(self.mult.clone());
            return;
        }
        if self.remaining[i] == 0 {
            self.start(i + 1);
            return;
        }
        if j >= self.n {
            return;
        }
        let most = self.remaining[i].min(self.remaining[j]);
        for m in (0..=most).rev() {
            self.remaining[i] -= m;
            self.remaining[j] -= m;
            self.mult[i][j] = m;
            self.mult[j][i] = m;
            self.row(i, j + 1);
            self.remaining[i] += m;
            self.remaining[j] += m;
            self.mult[i][j] = 0;
            self.mult[j][i] = 0;
        }
    }

    fn start(&mut self, i: usize) {
        if i == self.n {
            self.out.push(self.mult.clone());
            return;
        }
        for l in 0..=self.remaining[i] / 2 {
            self.remaining[i] -= 2 * l;
            self.mult[i][i] = l;
            self.row(i, i + 1);
            self.remaining[i] += 2 * l;
            self.mult[i][i] = 0;
        }
    }
}

// non-increasing sequences of length `n`, entries <= 3, summing to `total`
fn leg_distributions(n: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for k in (0..=cap.min(left)).rev() {
            cur.push(k);
            go(n, left - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, total, 3, &mut Vec::new(), &mut out);
    out
}

/// One representative per isomorphism class of 1PI φ³ graphs with exactly
/// `loops` loops and `legs` external legs, sorted by label.
pub fn enumerate_exact(loops: u32, legs: u32, opts: EnumerationOptions) -> Result<Vec<FeynmanGraph>> {
    if loops > MAX_LOOPS || legs > MAX_LEGS {
        return Err(Error::Resource(format!(
            "enumeration bound is {MAX_LOOPS} loops and {MAX_LEGS} legs, got {loops} and {legs}"
        )));
    }
    if loops == 0 {
        return Ok(Vec::new());
    }
    let n = (2 * loops + legs - 2) as usize;
    let mut found: BTreeMap<GraphLabel, FeynmanGraph> = BTreeMap::new();
    for ext in leg_distributions(n, legs as usize) {
        let mut fill = Fill {
            n,
            remaining: ext.iter().map(|e| 3 - e).collect(),
            mult: vec![vec![0; n]; n],
            out: Vec::new(),
        };
        fill.start(0);
        for mult in fill.out {
            let mut edges = Vec::new();
            let mut next_ext = n;
            for (v, &e) in ext.iter().enumerate() {
                for _ in 0..e {
                    edges.push((v, next_ext));
                    next_ext += 1;
                }
            }
            for (i, row) in mult.iter().enumerate() {
                for (j, &m) in row.iter().enumerate().skip(i) {
                    edges.extend(core::iter::repeat((i, j)).take(m));
                }
            }
            let Ok(g) = FeynmanGraph::from_kinds(n, legs as usize, edges) else {
                continue;
            };
            if !g.is_one_particle_irreducible() || (!opts.include_tadpoles && g.has_self_loop()) {
                continue;
            }
            let label = GraphLabel::of(&g);
            found.entry(label.clone()).or_insert_with(|| label.graph());
        }
    }
    Ok(found.into_values().collect())
}

/// All 1PI graphs with `1..=max_loops` loops and `legs` legs, sorted by label.
pub fn enumerate_1pi_graphs(max_loops: u32, legs: u32, opts: EnumerationOptions) -> Result<Vec<FeynmanGraph>> {
    let mut out = Vec::new();
    for l in 1..=max_loops {
        out.extend(enumerate_exact(l, legs, opts)?);
    }
    Ok(out)
}
