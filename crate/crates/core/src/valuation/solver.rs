//! Backtracking with unit propagation.
//!
//! Vertices are branched on in order of decreasing degree, trying 1 before
//! 0. Setting a vertex to 1 zeroes its neighbours; a basis with one free
//! vertex and no 1 forces that vertex to 1.

use serde::Serialize;

use super::{OrthogonalityGraph, Valuation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Branching decisions.
    pub nodes: u64,
    /// Exhausted branch points.
    pub backtracks: u64,
    /// Values forced by propagation.
    pub propagations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    Sat {
        valuation: Valuation,
        stats: SearchStats,
    },
    Unsat {
        stats: SearchStats,
    },
}

impl SearchOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SearchOutcome::Sat { .. })
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            SearchOutcome::Sat { stats, .. } | SearchOutcome::Unsat { stats } => *stats,
        }
    }
}

const FREE: i8 = -1;

struct Search<'g> {
    g: &'g OrthogonalityGraph,
    order: Vec<usize>,
    bases_of: Vec<Vec<usize>>,
    vals: Vec<i8>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    stats: SearchStats,
    found: Vec<Valuation>,
    limit: usize,
}

impl<'g> Search<'g> {
    fn new(g: &'g OrthogonalityGraph, limit: usize) -> Self {
        let mut order: Vec<usize> = (0..g.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        let mut bases_of = vec![Vec::new(); g.n];
        for (b, basis) in g.bases.iter().enumerate() {
            for &v in basis {
                bases_of[v].push(b);
            }
        }
        Search {
            g,
            order,
            bases_of,
            vals: vec![FREE; g.n],
            trail: Vec::new(),
            queue: Vec::new(),
            stats: SearchStats::default(),
            found: Vec::new(),
            limit,
        }
    }

    fn assign(&mut self, v: usize, val: i8) -> bool {
        if self.vals[v] != FREE {
            return self.vals[v] == val;
        }
        self.vals[v] = val;
        self.trail.push(v);
        self.queue.push(v);
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some(v) = self.queue.pop() {
            if self.vals[v] == 1 {
                for k in 0..self.g.adjacency[v].len() {
                    let u = self.g.adjacency[v][k];
                    if !self.assign(u, 0) {
                        self.queue.clear();
                        return false;
                    }
                }
            }
            for k in 0..self.bases_of[v].len() {
                let basis = &self.g.bases[self.bases_of[v][k]];
                let mut ones = 0;
                let mut free = None;
                let mut n_free = 0;
                for &u in basis {
                    match self.vals[u] {
                        1 => ones += 1,
                        FREE => {
                            n_free += 1;
                            free = Some(u);
                        }
                        _ => {}
                    }
                }
                let ok = match (ones, n_free) {
                    (0, 0) => false,
                    (0, 1) => {
                        self.stats.propagations += 1;
                        self.assign(free.expect("one free vertex"), 1)
                    }
                    (o, _) => o <= 1,
                };
                if !ok {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.vals[v] = FREE;
        }
    }

    /// Returns true once the search should stop.
    fn solve(&mut self, from: usize) -> bool {
        let Some(pos) = (from..self.order.len()).find(|&k| self.vals[self.order[k]] == FREE) else {
            self.found.push(Valuation {
                values: self.vals.iter().map(|&x| x as u8).collect(),
            });
            return self.found.len() >= self.limit;
        };
        let v = self.order[pos];
        self.stats.nodes += 1;
        for val in [1, 0] {
            let mark = self.trail.len();
            if self.assign(v, val) && self.propagate() && self.solve(pos + 1) {
                return true;
            }
            self.undo(mark);
        }
        self.stats.backtracks += 1;
        false
    }
}

/// Decides whether `g` admits a valuation. `dim` must be the dimension of
/// the set `g` was built from.
pub fn find_valuation(g: &OrthogonalityGraph, dim: usize) -> SearchOutcome {
    assert_eq!(dim, g.dim, "graph was built in dimension {}", g.dim);
    let mut s = Search::new(g, 1);
    s.solve(0);
    match s.found.pop() {
        Some(valuation) => SearchOutcome::Sat {
            valuation,
            stats: s.stats,
        },
        None => SearchOutcome::Unsat { stats: s.stats },
    }
}

/// All valuations, in search order, up to `limit`.
pub fn enumerate_valuations(g: &OrthogonalityGraph, limit: usize) -> (Vec<Valuation>, SearchStats) {
    let mut s = Search::new(g, limit.max(1));
    s.solve(0);
    (s.found, s.stats)
}
