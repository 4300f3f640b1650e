//! Exact maximum clique on non-commuting graphs.
//!
//! Branch and bound with greedy-coloring upper bounds over bitset candidate
//! sets, plus centralizer-class pre-reduction and DIMACS import/export.

use crate::bits::Bits;
use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::time::{Duration, Instant};

/// Loop-free symmetric graph; edge (u,v) means u and v do NOT commute.
#[derive(Debug, Clone)]
pub struct NcGraph {
    n: usize,
    adj: Vec<Bits>,
}

impl NcGraph {
    pub fn empty(n: usize) -> NcGraph {
        NcGraph {
            n,
            adj: (0..n).map(|_| Bits::new(n)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return; // never create loops
        }
        self.adj[u].set(v);
        self.adj[v].set(u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn neighbors(&self, v: usize) -> &Bits {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|b| b.count()).sum::<usize>() / 2
    }

    /// Complement graph (still loop-free); cliques here are the abelian sets
    /// of the source relation.
    pub fn complement(&self) -> NcGraph {
        let mut g = NcGraph::empty(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        for (i, &u) in vs.iter().enumerate() {
            for &v in vs.iter().skip(i + 1) {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }
}

/// Edge (u,v) iff u != v and NOT relation(u,v). The relation value on the
/// diagonal is ignored, so a non-reflexive relation never creates loops.
pub fn build_graph<T: Sync>(
    items: &[T],
    relation: impl Fn(&T, &T) -> bool + Sync,
) -> NcGraph {
    use rayon::prelude::*;
    let n = items.len();
    let adj: Vec<Bits> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = Bits::new(n);
            for v in 0..n {
                if u != v && !relation(&items[u], &items[v]) {
                    row.set(v);
                }
            }
            row
        })
        .collect();
    let g = NcGraph { n, adj };
    debug_assert!((0..n).all(|v| !g.has_edge(v, v)));
    g
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CliqueResult {
    pub omega: usize,
    /// Vertex indices of one maximum clique, sorted ascending. Deterministic:
    /// the first maximum-size clique met in the fixed search order.
    pub witness: Vec<usize>,
    pub nodes_explored: u64,
    /// False only when a time cap interrupted the search; the result is then
    /// a valid clique but not proven maximum.
    pub exact: bool,
}

struct Solver<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Solver<'_> {
    fn expand(&mut self, r: &mut Vec<usize>, p: &Bits) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        if self.aborted {
            return;
        }
        if p.is_empty() {
            if r.len() > self.best.len() {
                self.best = r.clone();
            }
            return;
        }
        let (order, colors) = self.color_sort(p);
        let mut p = p.clone();
        for idx in (0..order.len()).rev() {
            if self.aborted {
                return;
            }
            let v = order[idx];
            if r.len() + colors[idx] <= self.best.len() {
                return; // every earlier candidate has an equal or lower bound
            }
            r.push(v);
            let next = p.intersection(&self.adj[v]);
            self.expand(r, &next);
            r.pop();
            p.clear(v);
        }
    }

    /// Greedy sequential coloring of the candidate set; returns the vertices
    /// sorted by color ascending together with their color numbers.
    fn color_sort(&self, p: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = p.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut candidates = uncolored.clone();
            while let Some(v) = candidates.first_one() {
                order.push(v);
                colors.push(color);
                uncolored.clear(v);
                candidates.clear(v);
                // remove v's neighbors from this color class
                for w in self.adj[v].iter_ones() {
                    if w < candidates.len() && candidates.get(w) {
                        candidates.clear(w);
                    }
                }
            }
        }
        (order, colors)
    }
}

/// Exact maximum clique; vertex order for branching is descending degree with
/// ties by original index. With a time cap the best clique found so far is
/// returned with `exact: false`.
pub fn max_clique(g: &NcGraph, time_cap: Option<Duration>) -> CliqueResult {
    max_clique_seeded(g, time_cap, &[])
}

/// Same as `max_clique` but starts from a known clique (vertex indices of
/// `g`), which tightens pruning and guarantees omega >= seed size.
pub fn max_clique_seeded(
    g: &NcGraph,
    time_cap: Option<Duration>,
    seed_clique: &[usize],
) -> CliqueResult {
    if g.n() == 0 {
        return CliqueResult {
            omega: 0,
            witness: vec![],
            nodes_explored: 0,
            exact: true,
        };
    }
    debug_assert!(g.is_clique(seed_clique));
    // order: descending degree, ties by original index
    let mut perm: Vec<usize> = (0..g.n()).collect();
    perm.sort_by_key(|&v| (usize::MAX - g.degree(v), v));
    let mut pos = vec![0usize; g.n()];
    for (new, &orig) in perm.iter().enumerate() {
        pos[orig] = new;
    }
    let adj: Vec<Bits> = perm
        .iter()
        .map(|&orig| {
            let mut row = Bits::new(g.n());
            for w in g.neighbors(orig).iter_ones() {
                row.set(pos[w]);
            }
            row
        })
        .collect();
    let deadline = time_cap.map(|cap| Instant::now() + cap);
    let mut solver = Solver {
        adj: &adj,
        best: seed_clique.iter().map(|&v| pos[v]).collect(),
        nodes: 0,
        deadline,
        aborted: false,
    };
    let mut all = Bits::new(g.n());
    for v in 0..g.n() {
        all.set(v);
    }
    let mut r = Vec::new();
    solver.expand(&mut r, &all);
    let mut witness: Vec<usize> = solver.best.iter().map(|&v| perm[v]).collect();
    witness.sort_unstable();
    debug_assert!(g.is_clique(&witness));
    // soundness of the root coloring bound
    #[cfg(debug_assertions)]
    {
        let tmp = Solver {
            adj: &adj,
            best: vec![],
            nodes: 0,
            deadline: None,
            aborted: false,
        };
        let (_, colors) = tmp.color_sort(&all);
        let bound = colors.last().copied().unwrap_or(0);
        debug_assert!(bound >= witness.len());
    }
    CliqueResult {
        omega: witness.len(),
        witness,
        nodes_explored: solver.nodes,
        exact: !solver.aborted,
    }
}

/// One representative item per centralizer-equality class over `ambient`.
#[derive(Debug, Clone)]
pub struct ClassReduction {
    /// Indices into `items`, one per class, ordered by first occurrence.
    pub representatives: Vec<usize>,
    /// Class id of every item.
    pub class_of: Vec<usize>,
}

/// Groups `items` by equality of their commuting profile over `ambient`
/// (the centralizer as a subset of ambient). Exact profile comparison, so
/// hash collisions cannot merge distinct classes.
pub fn reduce_by_classes<T: Sync>(
    items: &[T],
    ambient: &[T],
    relation: impl Fn(&T, &T) -> bool + Sync,
) -> ClassReduction {
    use rayon::prelude::*;
    let profiles: Vec<Bits> = items
        .par_iter()
        .map(|a| {
            let mut bits = Bits::new(ambient.len());
            for (j, b) in ambient.iter().enumerate() {
                if relation(a, b) {
                    bits.set(j);
                }
            }
            bits
        })
        .collect();
    let mut seen: HashMap<&Bits, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut class_of = vec![0usize; items.len()];
    for (i, prof) in profiles.iter().enumerate() {
        match seen.get(prof) {
            Some(&cid) => class_of[i] = cid,
            None => {
                let cid = representatives.len();
                seen.insert(prof, cid);
                representatives.push(i);
                class_of[i] = cid;
            }
        }
    }
    ClassReduction {
        representatives,
        class_of,
    }
}

/// DIMACS export: `p edge N M` then one `e u v` line per edge, 1-indexed.
pub fn write_dimacs(g: &NcGraph, w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "p edge {} {}", g.n(), g.edge_count())?;
    for u in 0..g.n() {
        for v in g.neighbors(u).iter_ones() {
            if v > u {
                writeln!(w, "e {} {}", u + 1, v + 1)?;
            }
        }
    }
    Ok(())
}

pub fn read_dimacs(r: &mut impl BufRead) -> io::Result<NcGraph> {
    let mut g: Option<NcGraph> = None;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first() {
            Some(&"p") => {
                if toks.len() < 4 || toks[1] != "edge" {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        "bad problem line",
                    ));
                }
                let n: usize = toks[2]
                    .parse()
                    .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "bad vertex count"))?;
                g = Some(NcGraph::empty(n));
            }
            Some(&"e") => {
                let g = g
                    .as_mut()
                    .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "e before p"))?;
                if toks.len() < 3 {
                    return Err(io::Error::new(io::ErrorKind::InvalidData, "bad edge line"));
                }
                let u: usize = toks[1]
                    .parse()
                    .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "bad edge"))?;
                let v: usize = toks[2]
                    .parse()
                    .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "bad edge"))?;
                if u == 0 || v == 0 || u > g.n() || v > g.n() {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        "edge endpoint out of range",
                    ));
                }
                g.add_edge(u - 1, v - 1);
            }
            _ => {}
        }
    }
    g.ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "missing problem line"))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn edgeless_graph_omega_is_one() {
        // mutually commuting items -> edgeless -> a single element still
        // counts as a (vacuous) non-commuting set
        let items = vec![1, 2, 3];
        let g = build_graph(&items, |_, _| true);
        assert_eq!(g.edge_count(), 0);
        let res = max_clique(&g, None);
        assert_eq!(res.omega, 1);
        assert!(res.exact);
    }

    #[test]
    fn empty_graph() {
        let g = NcGraph::empty(0);
        assert_eq!(max_clique(&g, None).omega, 0);
    }

    #[test]
    fn triangle() {
        let mut g = NcGraph::empty(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(0, 2);
        let res = max_clique(&g, None);
        assert_eq!(res.omega, 3);
        assert_eq!(res.witness, vec![0, 1, 2]);
    }

    #[test]
    fn four_cycle_omega_two() {
        let mut g = NcGraph::empty(4);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(2, 3);
        g.add_edge(3, 0);
        let res = max_clique(&g, None);
        assert_eq!(res.omega, 2);
        assert_eq!(res.omega, testutil::brute_force_omega(&g));
    }

    #[test]
    fn no_loops_even_for_irreflexive_relation() {
        // relation(x, x) = false must still not create loops: two equal items
        // at distinct indices get an edge, but no vertex gets a self-edge.
        let items = vec![0u8, 0];
        let g = build_graph(&items, |a, b| a != b);
        assert!(!g.has_edge(0, 0));
        assert!(!g.has_edge(1, 1));
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = SplitMix64::new(99);
        for n in [6usize, 10, 14, 16] {
            for _ in 0..8 {
                let mut g = NcGraph::empty(n);
                for u in 0..n {
                    for v in (u + 1)..n {
                        if rng.below(100) < 55 {
                            g.add_edge(u, v);
                        }
                    }
                }
                let res = max_clique(&g, None);
                assert_eq!(res.omega, testutil::brute_force_omega(&g), "n={n}");
                assert!(g.is_clique(&res.witness));
                assert_eq!(res.witness.len(), res.omega);
            }
        }
    }

    #[test]
    fn omega_invariant_under_relabeling() {
        let mut rng = SplitMix64::new(1234);
        let n = 12;
        let mut g = NcGraph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.below(10) < 6 {
                    g.add_edge(u, v);
                }
            }
        }
        let base = max_clique(&g, None).omega;
        for _ in 0..20 {
            let mut relabel: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut relabel);
            let mut h = NcGraph::empty(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if g.has_edge(u, v) {
                        h.add_edge(relabel[u], relabel[v]);
                    }
                }
            }
            assert_eq!(max_clique(&h, None).omega, base);
        }
    }

    #[test]
    fn witness_is_deterministic() {
        let mut rng = SplitMix64::new(5);
        let n = 14;
        let mut g = NcGraph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.below(10) < 5 {
                    g.add_edge(u, v);
                }
            }
        }
        let a = max_clique(&g, None);
        let b = max_clique(&g, None);
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }

    #[test]
    fn seeded_search_returns_at_least_seed() {
        let mut g = NcGraph::empty(5);
        g.add_edge(0, 1);
        g.add_edge(0, 2);
        g.add_edge(1, 2);
        g.add_edge(3, 4);
        let res = max_clique_seeded(&g, None, &[3, 4]);
        assert_eq!(res.omega, 3);
    }

    #[test]
    fn time_cap_returns_inexact_flag() {
        // A moderately large random graph with a zero-time cap must come back
        // non-exact (or exact with a tiny graph, never panicking).
        let mut rng = SplitMix64::new(17);
        let n = 60;
        let mut g = NcGraph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.below(10) < 8 {
                    g.add_edge(u, v);
                }
            }
        }
        let res = max_clique(&g, Some(Duration::from_nanos(1)));
        assert!(g.is_clique(&res.witness));
        if !res.exact {
            assert!(res.omega <= n);
        }
    }

    #[test]
    fn class_reduction_groups_equal_profiles() {
        // items 0,1 have identical relation rows; 2 differs
        let items = vec![0u8, 0, 1];
        let red = reduce_by_classes(&items, &items, |a, b| a == b);
        assert_eq!(red.representatives, vec![0, 2]);
        assert_eq!(red.class_of, vec![0, 0, 1]);
    }

    #[test]
    fn singleton_reduces_to_itself() {
        let items = vec![7u8];
        let red = reduce_by_classes(&items, &items, |_, _| true);
        assert_eq!(red.representatives, vec![0]);
    }

    #[test]
    fn dimacs_roundtrip() {
        let mut g = NcGraph::empty(5);
        g.add_edge(0, 1);
        g.add_edge(2, 4);
        g.add_edge(1, 3);
        let mut buf = Vec::new();
        write_dimacs(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p edge 5 3\n"));
        let h = read_dimacs(&mut buf.as_slice()).unwrap();
        assert_eq!(h.n(), 5);
        for u in 0..5 {
            for v in 0..5 {
                assert_eq!(g.has_edge(u, v), h.has_edge(u, v));
            }
        }
    }

    #[test]
    fn dimacs_rejects_garbage() {
        assert!(read_dimacs(&mut "e 1 2\n".as_bytes()).is_err());
        assert!(read_dimacs(&mut "p edge 2 1\ne 5 1\n".as_bytes()).is_err());
        assert!(read_dimacs(&mut "".as_bytes()).is_err());
    }
}
