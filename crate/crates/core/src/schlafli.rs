//! The 27-line graph: the graph Omega on the 27 lattice lines (edges where
//! the pairing is 1), the labelled Schläfli model Omega_X on
//! {x_1..x_6, x'_1..x'_6, pairs {i,j}}, isomorphism and automorphism search
//! by refinement-guided backtracking, clique censuses, and double sixes.

use crate::lattice::{E6Lattice, RootVector, LINE_COUNT};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchlafliError {
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("expected {expected} couples for a double six, found {found}")]
    CoupleCount { expected: usize, found: usize },
    #[error("the two graphs are not isomorphic")]
    NotIsomorphic,
}

/// Undirected graph on at most 32 vertices with bitmask adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineGraph {
    n: usize,
    adj: Vec<u32>,
}

impl LineGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= 32);
        LineGraph { n, adj: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors_mask(&self, u: usize) -> u32 {
        self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges as sorted pairs, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adjacent(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Triangles as sorted triples, lexicographic.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.adjacent(u, v) {
                    continue;
                }
                let common = self.adj[u] & self.adj[v] & !((1u64 << (v + 1)) as u32).wrapping_sub(1);
                let mut rest = common;
                while rest != 0 {
                    let w = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    out.push([u, v, w]);
                }
            }
        }
        out
    }
}

/// Counts of k-cliques for k = 1..4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueCensus {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub tetrahedra: usize,
}

pub fn clique_census(g: &LineGraph) -> CliqueCensus {
    let mut triangles = 0usize;
    let mut tetrahedra = 0usize;
    for u in 0..g.len() {
        for v in u + 1..g.len() {
            if !g.adjacent(u, v) {
                continue;
            }
            let above_v: u32 = !(((1u64 << (v + 1)) - 1) as u32);
            let common = g.adj[u] & g.adj[v] & above_v;
            triangles += common.count_ones() as usize;
            let mut rest = common;
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let above_w: u32 = !(((1u64 << (w + 1)) - 1) as u32);
                tetrahedra += (common & g.adj[w] & above_w).count_ones() as usize;
            }
        }
    }
    CliqueCensus {
        vertices: g.len(),
        edges: g.edge_count(),
        triangles,
        tetrahedra,
    }
}

/// True when every edge lies in exactly one triangle.
pub fn edges_in_unique_triangle(g: &LineGraph) -> bool {
    for u in 0..g.len() {
        for v in u + 1..g.len() {
            if g.adjacent(u, v) && (g.adj[u] & g.adj[v]).count_ones() != 1 {
                return false;
            }
        }
    }
    true
}

/// The graph Omega on the 27 lines: distinct lines adjacent when their
/// pairing equals 1.
pub fn build_omega(lat: &E6Lattice) -> LineGraph {
    let mut g = LineGraph::new(LINE_COUNT);
    for y in lat.lines() {
        for z in lat.lines() {
            if y.index < z.index && lat.q_l(&y.point, &z.point) == 1 {
                g.add_edge(y.index, z.index);
            }
        }
    }
    g
}

/// Vertex labels of the Schläfli model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchlafliLabel {
    /// x_i, 1-indexed.
    X(u8),
    /// x'_i, 1-indexed.
    Xp(u8),
    /// pair {i, j} with i < j, 1-indexed.
    Pair(u8, u8),
}

impl fmt::Display for SchlafliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchlafliLabel::X(i) => write!(f, "x{i}"),
            SchlafliLabel::Xp(i) => write!(f, "x{i}'"),
            SchlafliLabel::Pair(i, j) => write!(f, "{{{i},{j}}}"),
        }
    }
}

/// Canonical vertex order of the model: x_1..x_6, x'_1..x'_6, pairs in
/// lexicographic order.
pub fn schlafli_labels() -> Vec<SchlafliLabel> {
    let mut out = Vec::with_capacity(LINE_COUNT);
    for i in 1..=6 {
        out.push(SchlafliLabel::X(i));
    }
    for i in 1..=6 {
        out.push(SchlafliLabel::Xp(i));
    }
    for i in 1..=6u8 {
        for j in i + 1..=6 {
            out.push(SchlafliLabel::Pair(i, j));
        }
    }
    out
}

/// The labelled model graph Omega_X:
/// x_i ~ x'_j iff i != j; x_i ~ {a,b} iff i in {a,b}; x'_i ~ {a,b} iff
/// i in {a,b}; {a,b} ~ {c,d} iff disjoint; X and X' are independent sets.
pub fn build_omega_x() -> LineGraph {
    let labels = schlafli_labels();
    let mut g = LineGraph::new(LINE_COUNT);
    for (u, lu) in labels.iter().enumerate() {
        for (v, lv) in labels.iter().enumerate().skip(u + 1) {
            let adjacent = match (lu, lv) {
                (SchlafliLabel::X(i), SchlafliLabel::Xp(j))
                | (SchlafliLabel::Xp(j), SchlafliLabel::X(i)) => i != j,
                (SchlafliLabel::X(i), SchlafliLabel::Pair(a, b))
                | (SchlafliLabel::Pair(a, b), SchlafliLabel::X(i)) => i == a || i == b,
                (SchlafliLabel::Xp(i), SchlafliLabel::Pair(a, b))
                | (SchlafliLabel::Pair(a, b), SchlafliLabel::Xp(i)) => i == a || i == b,
                (SchlafliLabel::Pair(a, b), SchlafliLabel::Pair(c, d)) => {
                    a != c && a != d && b != c && b != d
                }
                _ => false,
            };
            if adjacent {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Iterated neighbor-color refinement; returns stable vertex colors.
fn refine_colors(g: &LineGraph) -> Vec<usize> {
    let n = g.len();
    let mut colors: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let mut sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n)
                    .filter(|&u| g.adjacent(v, u))
                    .map(|u| colors[u])
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq = sig.clone();
        uniq.sort();
        uniq.dedup();
        let new: Vec<usize> = sig
            .drain(..)
            .map(|s| uniq.binary_search(&s).unwrap())
            .collect();
        if new == colors {
            return colors;
        }
        colors = new;
    }
}

/// Backtracking mapper between two graphs. `count_all` enumerates every
/// isomorphism; otherwise the search stops at the first one.
struct IsoSearch<'a> {
    g1: &'a LineGraph,
    g2: &'a LineGraph,
    c1: Vec<usize>,
    c2: Vec<usize>,
    mapping: Vec<Option<usize>>,
    used: u32,
    count: u64,
    first: Option<Vec<usize>>,
    count_all: bool,
}

impl<'a> IsoSearch<'a> {
    fn new(g1: &'a LineGraph, g2: &'a LineGraph, count_all: bool) -> Self {
        IsoSearch {
            g1,
            g2,
            c1: refine_colors(g1),
            c2: refine_colors(g2),
            mapping: vec![None; g1.len()],
            used: 0,
            count: 0,
            first: None,
            count_all,
        }
    }

    /// Next vertex to map: most already-mapped neighbors, smallest index.
    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.g1.len() {
            if self.mapping[v].is_some() {
                continue;
            }
            let mapped = (0..self.g1.len())
                .filter(|&u| self.mapping[u].is_some() && self.g1.adjacent(v, u))
                .count();
            if best.map(|(m, _)| mapped > m).unwrap_or(true) {
                best = Some((mapped, v));
            }
        }
        best.map(|(_, v)| v)
    }

    fn run(&mut self) {
        let Some(v) = self.pick() else {
            self.count += 1;
            if self.first.is_none() {
                self.first = Some(self.mapping.iter().map(|m| m.unwrap()).collect());
            }
            return;
        };
        for t in 0..self.g2.len() {
            if self.used >> t & 1 == 1 || self.c1[v] != self.c2[t] {
                continue;
            }
            let ok = (0..self.g1.len()).all(|u| match self.mapping[u] {
                Some(tu) => self.g1.adjacent(v, u) == self.g2.adjacent(t, tu),
                None => true,
            });
            if !ok {
                continue;
            }
            self.mapping[v] = Some(t);
            self.used |= 1 << t;
            self.run();
            self.mapping[v] = None;
            self.used &= !(1 << t);
            if !self.count_all && self.count > 0 {
                return;
            }
        }
    }
}

/// First graph isomorphism found, as a vertex map g1 -> g2, or None.
/// Deterministic: candidates are tried in vertex order.
pub fn find_isomorphism(g1: &LineGraph, g2: &LineGraph) -> Option<Vec<usize>> {
    if g1.len() != g2.len() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let mut s = IsoSearch::new(g1, g2, false);
    s.run();
    s.first
}

/// Exact automorphism group order by exhaustive backtracking.
pub fn count_automorphisms(g: &LineGraph) -> u64 {
    let mut s = IsoSearch::new(g, g, true);
    s.run();
    s.count
}

/// A double six: the six ordered couples (y, y') of non-adjacent lines with
/// y - y' equal to the given root in L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleSix {
    pub root: RootVector,
    pub couples: [(usize, usize); 6],
}

/// Couples of the double six attached to a root: pairs of lines whose
/// difference is (0, root). The reflection in the root swaps each couple and
/// fixes the remaining 15 lines.
pub fn double_six(lat: &E6Lattice, root: &RootVector) -> Result<DoubleSix, SchlafliError> {
    if lat.roots().binary_search(root).is_err() {
        return Err(SchlafliError::NotARoot);
    }
    let rw = lat.cartan().root_to_weight(root);
    let mut couples = Vec::new();
    for y in lat.lines() {
        let diff = crate::lattice::WeightVector([
            y.point.w.0[0] - rw.0[0],
            y.point.w.0[1] - rw.0[1],
            y.point.w.0[2] - rw.0[2],
            y.point.w.0[3] - rw.0[3],
            y.point.w.0[4] - rw.0[4],
            y.point.w.0[5] - rw.0[5],
        ]);
        if let Some(j) = lat.line_index(&diff) {
            couples.push((y.index, j));
        }
    }
    if couples.len() != 6 {
        return Err(SchlafliError::CoupleCount {
            expected: 6,
            found: couples.len(),
        });
    }
    couples.sort();
    Ok(DoubleSix {
        root: *root,
        couples: couples.try_into().unwrap(),
    })
}

/// Persisted identification of Omega with the labelled model: line index i
/// carries label `labels()[to_label[i]]`.
#[derive(Debug, Clone)]
pub struct SchlafliModel {
    pub omega: LineGraph,
    /// line index -> position in `schlafli_labels()`.
    pub to_label: Vec<usize>,
    /// position in `schlafli_labels()` -> line index.
    pub from_label: Vec<usize>,
}

impl SchlafliModel {
    pub fn build(lat: &E6Lattice) -> Result<Self, SchlafliError> {
        let omega = build_omega(lat);
        let model = build_omega_x();
        let to_label = find_isomorphism(&omega, &model).ok_or(SchlafliError::NotIsomorphic)?;
        let mut from_label = vec![0; LINE_COUNT];
        for (i, &l) in to_label.iter().enumerate() {
            from_label[l] = i;
        }
        Ok(SchlafliModel {
            omega,
            to_label,
            from_label,
        })
    }

    pub fn label_of(&self, line: usize) -> SchlafliLabel {
        schlafli_labels()[self.to_label[line]]
    }

    /// Line carrying a given label.
    pub fn line_of(&self, label: SchlafliLabel) -> usize {
        let pos = schlafli_labels()
            .iter()
            .position(|&l| l == label)
            .expect("valid label");
        self.from_label[pos]
    }

    /// Lift a permutation of label positions to a permutation of lines.
    pub fn lift_label_permutation(&self, label_perm: &[usize; LINE_COUNT]) -> [u8; LINE_COUNT] {
        let mut out = [0u8; LINE_COUNT];
        for line in 0..LINE_COUNT {
            out[line] = self.from_label[label_perm[self.to_label[line]]] as u8;
        }
        out
    }
}

/// The permutation of label positions induced by a permutation sigma of
/// {1..6} acting on indices, combined (optionally) with the swap x <-> x'.
pub fn label_action(sigma: &[u8; 6], swap: bool) -> [usize; LINE_COUNT] {
    let labels = schlafli_labels();
    let apply = |l: SchlafliLabel| -> SchlafliLabel {
        let s = |i: u8| sigma[(i - 1) as usize];
        match l {
            SchlafliLabel::X(i) => {
                if swap {
                    SchlafliLabel::Xp(s(i))
                } else {
                    SchlafliLabel::X(s(i))
                }
            }
            SchlafliLabel::Xp(i) => {
                if swap {
                    SchlafliLabel::X(s(i))
                } else {
                    SchlafliLabel::Xp(s(i))
                }
            }
            SchlafliLabel::Pair(i, j) => {
                let (a, b) = (s(i), s(j));
                SchlafliLabel::Pair(a.min(b), a.max(b))
            }
        }
    };
    let mut out = [0usize; LINE_COUNT];
    let index: HashMap<SchlafliLabel, usize> =
        labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    for (i, &l) in labels.iter().enumerate() {
        out[i] = index[&apply(l)];
    }
    out
}

/// Check that a vertex permutation is a graph automorphism.
pub fn is_automorphism(g: &LineGraph, perm: &[u8; LINE_COUNT]) -> bool {
    for u in 0..g.len() {
        for v in u + 1..g.len() {
            if g.adjacent(u, v) != g.adjacent(perm[u] as usize, perm[v] as usize) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::E6Lattice;

    fn lat() -> E6Lattice {
        E6Lattice::build().unwrap()
    }

    fn k4() -> LineGraph {
        let mut g = LineGraph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn path3() -> LineGraph {
        let mut g = LineGraph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g
    }

    #[test]
    fn census_of_k4_and_path() {
        let c = clique_census(&k4());
        assert_eq!(
            c,
            CliqueCensus {
                vertices: 4,
                edges: 6,
                triangles: 4,
                tetrahedra: 1
            }
        );
        let p = clique_census(&path3());
        assert_eq!(
            p,
            CliqueCensus {
                vertices: 3,
                edges: 2,
                triangles: 0,
                tetrahedra: 0
            }
        );
    }

    #[test]
    fn automorphisms_of_small_graphs() {
        assert_eq!(count_automorphisms(&k4()), 24);
        assert_eq!(count_automorphisms(&path3()), 2);
    }

    #[test]
    fn isomorphism_respects_structure() {
        // relabelled path
        let mut g2 = LineGraph::new(3);
        g2.add_edge(2, 0);
        g2.add_edge(0, 1);
        let m = find_isomorphism(&path3(), &g2).unwrap();
        assert_eq!(m[1], 0, "middle vertex maps to middle vertex");
        // path vs triangle: none
        let mut tri = LineGraph::new(3);
        tri.add_edge(0, 1);
        tri.add_edge(1, 2);
        tri.add_edge(0, 2);
        assert!(find_isomorphism(&path3(), &tri).is_none());
    }

    #[test]
    fn omega_census_and_regularity() {
        let g = build_omega(&lat());
        let c = clique_census(&g);
        assert_eq!(
            c,
            CliqueCensus {
                vertices: 27,
                edges: 135,
                triangles: 45,
                tetrahedra: 0
            }
        );
        for v in 0..27 {
            assert_eq!(g.degree(v), 10);
        }
        assert!(edges_in_unique_triangle(&g));
    }

    #[test]
    fn model_graph_matches_census() {
        let g = build_omega_x();
        let c = clique_census(&g);
        assert_eq!(
            c,
            CliqueCensus {
                vertices: 27,
                edges: 135,
                triangles: 45,
                tetrahedra: 0
            }
        );
        assert!(edges_in_unique_triangle(&g));
    }

    #[test]
    fn omega_isomorphic_to_model() {
        let model = SchlafliModel::build(&lat()).unwrap();
        let gx = build_omega_x();
        for u in 0..27 {
            for v in u + 1..27 {
                assert_eq!(
                    model.omega.adjacent(u, v),
                    gx.adjacent(model.to_label[u], model.to_label[v])
                );
            }
        }
    }

    #[test]
    fn model_is_deterministic() {
        let l = lat();
        let m1 = SchlafliModel::build(&l).unwrap();
        let m2 = SchlafliModel::build(&l).unwrap();
        assert_eq!(m1.to_label, m2.to_label);
    }

    #[test]
    fn symmetric_group_embeds_via_labels() {
        // every transposition of {1..6} and the swap eps act as
        // automorphisms of Omega through the labelling
        let model = SchlafliModel::build(&lat()).unwrap();
        let mut gens: Vec<[usize; LINE_COUNT]> = Vec::new();
        for a in 0..6usize {
            for b in a + 1..6 {
                let mut sigma = [1u8, 2, 3, 4, 5, 6];
                sigma.swap(a, b);
                gens.push(label_action(&sigma, false));
            }
        }
        gens.push(label_action(&[1, 2, 3, 4, 5, 6], true));
        for g in gens {
            let perm = model.lift_label_permutation(&g);
            assert!(is_automorphism(&model.omega, &perm));
        }
    }

    #[test]
    fn double_sixes_count_and_structure() {
        let l = lat();
        let g = build_omega(&l);
        let mut distinct = std::collections::HashSet::new();
        let pos_roots: Vec<_> = l
            .roots()
            .iter()
            .filter(|r| r.0.iter().all(|&x| x >= 0))
            .cloned()
            .collect();
        assert_eq!(pos_roots.len(), 36);
        for r in &pos_roots {
            let ds = double_six(&l, r).unwrap();
            // couples are non-adjacent and partition 12 distinct lines
            let mut seen = std::collections::HashSet::new();
            for &(a, b) in &ds.couples {
                assert!(!g.adjacent(a, b));
                assert!(seen.insert(a) && seen.insert(b));
            }
            // the reflection swaps couples and fixes the other 15 lines
            let c = l.cartan();
            for y in l.lines() {
                let img = c.reflect_weight(r, &y.point.w);
                let j = l.line_index(&img).unwrap();
                let in_couple = ds
                    .couples
                    .iter()
                    .any(|&(a, b)| (a, b) == (y.index, j) || (a, b) == (j, y.index));
                if y.index == j {
                    assert!(!in_couple);
                } else {
                    assert!(in_couple, "moved line must sit in a couple");
                }
            }
            let fixed = l
                .lines()
                .iter()
                .filter(|y| {
                    let img = c.reflect_weight(r, &y.point.w);
                    l.line_index(&img).unwrap() == y.index
                })
                .count();
            assert_eq!(fixed, 15);
            let mut key: Vec<(usize, usize)> = ds
                .couples
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            key.sort();
            distinct.insert(key);
        }
        assert_eq!(distinct.len(), 36, "one double six per reflection");
        // negating the root keeps the unordered structure
        let neg = RootVector([
            -pos_roots[0].0[0],
            -pos_roots[0].0[1],
            -pos_roots[0].0[2],
            -pos_roots[0].0[3],
            -pos_roots[0].0[4],
            -pos_roots[0].0[5],
        ]);
        let d1 = double_six(&l, &pos_roots[0]).unwrap();
        let d2 = double_six(&l, &neg).unwrap();
        let k1: std::collections::HashSet<_> =
            d1.couples.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let k2: std::collections::HashSet<_> =
            d2.couples.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        assert_eq!(k1, k2);
        // non-roots are rejected
        assert_eq!(
            double_six(&l, &RootVector([5, 0, 0, 0, 0, 0])),
            Err(SchlafliError::NotARoot)
        );
    }

    #[test]
    fn schlafli_aut_group_order() {
        let g = build_omega(&lat());
        assert_eq!(count_automorphisms(&g), 51840);
    }
}
