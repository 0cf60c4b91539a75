use serde::Serialize;

use super::{dot, VectorSet};

/// Exact orthogonality structure of a vector set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalityGraph {
    pub n: usize,
    pub dim: usize,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Pairs `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
    /// All orthogonal `dim`-cliques, each sorted, in lexicographic order.
    pub bases: Vec<Vec<usize>>,
}

impl OrthogonalityGraph {
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Graph on `n` vertices from an orthogonality predicate; bases are
    /// the orthogonal `dim`-cliques.
    pub fn from_relation(n: usize, dim: usize, orth: impl Fn(usize, usize) -> bool) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if orth(i, j) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                    edges.push((i, j));
                }
            }
        }
        let mut g = OrthogonalityGraph {
            n,
            dim,
            adjacency,
            edges,
            bases: Vec::new(),
        };
        let mut bases = Vec::new();
        let mut clique = Vec::with_capacity(dim);
        for v in 0..n {
            clique.push(v);
            let cand: Vec<usize> = g.adjacency[v].iter().copied().filter(|&u| u > v).collect();
            extend(&g, &mut clique, &cand, &mut bases);
            clique.pop();
        }
        g.bases = bases;
        g
    }
}

pub fn build_graph(set: &VectorSet) -> OrthogonalityGraph {
    let orth = |i: usize, j: usize| dot(&set.vectors[i], &set.vectors[j], set.radical).is_zero();
    OrthogonalityGraph::from_relation(set.len(), set.dim, orth)
}

fn extend(
    g: &OrthogonalityGraph,
    clique: &mut Vec<usize>,
    cand: &[usize],
    out: &mut Vec<Vec<usize>>,
) {
    if clique.len() == g.dim {
        out.push(clique.clone());
        return;
    }
    for (k, &u) in cand.iter().enumerate() {
        let next: Vec<usize> = cand[k + 1..]
            .iter()
            .copied()
            .filter(|&w| g.is_edge(u, w))
            .collect();
        clique.push(u);
        extend(g, clique, &next, out);
        clique.pop();
    }
}
