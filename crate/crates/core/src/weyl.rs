//! The Weyl group of E6 realized concretely: every element is stored as its
//! permutation of the 27 lines together with its integer matrix on the root
//! lattice. The module generates the full group of order 51840 by closure,
//! classifies involutions by degree (multiplicity of the -1 eigenvalue),
//! enumerates cubes (elementary abelian 2-subgroups generated by pairwise
//! orthogonal reflections), computes normalizers of maximal cubes, and
//! decomposes the natural G-sets (lines, triangles) under subgroups.

use crate::exact;
use crate::lattice::{E6Lattice, RootVector, WeightVector, LINE_COUNT, RANK};
use crate::schlafli::{label_action, LineGraph, SchlafliModel};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("group closure exceeded the bound of {bound} elements")]
    ClosureBound { bound: usize },
    #[error("element is not an involution")]
    NotAnInvolution,
    #[error("element does not belong to the generated group")]
    NotInGroup,
    #[error("a generator does not map the point set to itself")]
    ActionNotClosed,
    #[error("the labelled generators do not produce commuting reflections")]
    BadCanonicalCube,
}

/// A group element: permutation of the 27 lines plus the matrix of its
/// action on the root lattice in alpha-coordinates (columns are images of
/// the simple roots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub perm: [u8; LINE_COUNT],
    pub mat: [[i64; RANK]; RANK],
}

impl GroupElement {
    pub fn identity() -> Self {
        let mut perm = [0u8; LINE_COUNT];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        let mut mat = [[0i64; RANK]; RANK];
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] = 1;
        }
        GroupElement { perm, mat }
    }

    /// Composition acting left to right on points: (self * other)(x) =
    /// self(other(x)).
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut perm = [0u8; LINE_COUNT];
        for i in 0..LINE_COUNT {
            perm[i] = self.perm[other.perm[i] as usize];
        }
        let mut mat = [[0i64; RANK]; RANK];
        for i in 0..RANK {
            for k in 0..RANK {
                if self.mat[i][k] != 0 {
                    for j in 0..RANK {
                        mat[i][j] += self.mat[i][k] * other.mat[k][j];
                    }
                }
            }
        }
        GroupElement { perm, mat }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.compose(self).is_identity()
    }

    pub fn trace(&self) -> i64 {
        (0..RANK).map(|i| self.mat[i][i]).sum()
    }

    /// Apply the root-lattice matrix to a root in alpha-coordinates.
    pub fn apply_root(&self, r: &RootVector) -> RootVector {
        let mut out = [0i64; RANK];
        for i in 0..RANK {
            out[i] = (0..RANK).map(|j| self.mat[i][j] * r.0[j]).sum();
        }
        RootVector(out)
    }

    /// Apply the induced weight action to omega-coordinates. For a matrix M
    /// on alpha-coordinates the weight action is (M^{-1})^T; the inverse is
    /// exact because det M = +-1.
    pub fn apply_weight(&self, w: &WeightVector) -> WeightVector {
        let m: Vec<Vec<i128>> = self
            .mat
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let det = exact::det_i128(&m);
        debug_assert!(det == 1 || det == -1);
        let adj = exact::adjugate(&m);
        // inverse = adj / det; the weight action is the inverse transpose
        let mut out = [0i64; RANK];
        for i in 0..RANK {
            let s: i128 = (0..RANK).map(|j| adj[j][i] * w.0[j] as i128).sum();
            out[i] = (s / det) as i64;
        }
        WeightVector(out)
    }

    pub fn fixed_lines(&self) -> usize {
        self.perm
            .iter()
            .enumerate()
            .filter(|&(i, &p)| p as usize == i)
            .count()
    }
}

/// Reflection in a root, as a group element.
pub fn reflection(lat: &E6Lattice, root: &RootVector) -> Result<GroupElement, GroupError> {
    if lat.roots().binary_search(root).is_err() {
        return Err(GroupError::NotARoot);
    }
    let c = lat.cartan();
    // matrix I - r (r^T A) on alpha-coordinates
    let mut mat = [[0i64; RANK]; RANK];
    let a = c.cartan();
    for i in 0..RANK {
        mat[i][i] = 1;
    }
    let mut ra = [0i64; RANK]; // r^T A
    for j in 0..RANK {
        ra[j] = (0..RANK).map(|k| root.0[k] * a[k][j]).sum();
    }
    for i in 0..RANK {
        for j in 0..RANK {
            mat[i][j] -= root.0[i] * ra[j];
        }
    }
    // permutation of lines from the weight action
    let mut perm = [0u8; LINE_COUNT];
    for y in lat.lines() {
        let img = c.reflect_weight(root, &y.point.w);
        perm[y.index] = lat.line_index(&img).ok_or(GroupError::NotARoot)? as u8;
    }
    Ok(GroupElement { perm, mat })
}

/// A group generated by closure, indexed by the line permutation (the
/// action on lines is faithful). Lookup of a product is O(1) amortized.
#[derive(Debug, Clone)]
pub struct Group {
    elements: Vec<GroupElement>,
    index: HashMap<[u8; LINE_COUNT], usize>,
}

impl Group {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn index_of(&self, perm: &[u8; LINE_COUNT]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    /// Index of element(i) * element(j).
    pub fn multiply(&self, i: usize, j: usize) -> usize {
        let mut perm = [0u8; LINE_COUNT];
        let (a, b) = (&self.elements[i].perm, &self.elements[j].perm);
        for k in 0..LINE_COUNT {
            perm[k] = a[b[k] as usize];
        }
        self.index[&perm]
    }

    pub fn inverse(&self, i: usize) -> usize {
        let mut perm = [0u8; LINE_COUNT];
        for (k, &p) in self.elements[i].perm.iter().enumerate() {
            perm[p as usize] = k as u8;
        }
        self.index[&perm]
    }

    /// Index of g * h * g^{-1} for element indices g, h.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.multiply(self.multiply(g, h), self.inverse(g))
    }

    /// Breadth-first closure of a generating set. Deterministic for a fixed
    /// generator order. Fails if the closure exceeds `bound`.
    pub fn generate(gens: &[GroupElement], bound: usize) -> Result<Group, GroupError> {
        let mut elements = vec![GroupElement::identity()];
        let mut index = HashMap::new();
        index.insert(elements[0].perm, 0);
        let mut queue = VecDeque::new();
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let prod = elements[i].compose(g);
                if !index.contains_key(&prod.perm) {
                    if elements.len() >= bound {
                        return Err(GroupError::ClosureBound { bound });
                    }
                    index.insert(prod.perm, elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        Ok(Group { elements, index })
    }
}

/// Census of involutions by degree 0..4 (degree 0 counts the identity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvolutionCensus {
    pub by_degree: [usize; 5],
}

/// A cube: a set of pairwise orthogonal reflections, stored as sorted
/// indices into the reflection table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub reflection_ids: Vec<usize>,
}

impl Cube {
    pub fn rank(&self) -> usize {
        self.reflection_ids.len()
    }
}

/// Orbit of a subgroup on a G-set, with the point stabilizer inside that
/// subgroup (both as sorted lists).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub points: Vec<usize>,
    /// element indices (into the ambient group) of the stabilizer of
    /// points[0] within the acting subgroup
    pub stabilizer: Vec<usize>,
}

/// A finite G-set whose action is induced by the permutation action on
/// lines: either the lines themselves or the triangles of Omega.
#[derive(Debug, Clone)]
pub enum GSet {
    Lines,
    Triangles {
        triples: Vec<[u8; 3]>,
        index: HashMap<[u8; 3], usize>,
    },
    /// Trivial action on n points.
    Trivial(usize),
}

impl GSet {
    pub fn lines() -> GSet {
        GSet::Lines
    }

    /// The 45 triangles of the line graph, sorted lexicographically.
    /// Fails if some generator does not map triangles to triangles.
    pub fn triangles(graph: &LineGraph, group: &Group) -> Result<GSet, GroupError> {
        let triples: Vec<[u8; 3]> = graph
            .triangles()
            .into_iter()
            .map(|t| [t[0] as u8, t[1] as u8, t[2] as u8])
            .collect();
        let index: HashMap<[u8; 3], usize> = triples
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i))
            .collect();
        let set = GSet::Triangles { triples, index };
        // action well-defined: spot-check every element of the group on
        // every triangle is closed (cheap: 51840 * 45 would be heavy, so
        // check the generators; products follow)
        for g in group.elements().iter().take(64) {
            for i in 0..set.size() {
                set.apply_checked(g, i).ok_or(GroupError::ActionNotClosed)?;
            }
        }
        Ok(set)
    }

    pub fn size(&self) -> usize {
        match self {
            GSet::Lines => LINE_COUNT,
            GSet::Triangles { triples, .. } => triples.len(),
            GSet::Trivial(n) => *n,
        }
    }

    fn apply_checked(&self, g: &GroupElement, point: usize) -> Option<usize> {
        match self {
            GSet::Lines => Some(g.perm[point] as usize),
            GSet::Triangles { triples, index } => {
                let t = triples[point];
                let mut img = [
                    g.perm[t[0] as usize],
                    g.perm[t[1] as usize],
                    g.perm[t[2] as usize],
                ];
                img.sort_unstable();
                index.get(&img).copied()
            }
            GSet::Trivial(_) => Some(point),
        }
    }

    pub fn apply(&self, g: &GroupElement, point: usize) -> usize {
        self.apply_checked(g, point).expect("action is closed")
    }

    /// Fixed points of an element.
    pub fn fixed_points(&self, g: &GroupElement) -> usize {
        (0..self.size()).filter(|&p| self.apply(g, p) == p).count()
    }
}

/// The full Weyl group with its reflection table.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    pub group: Group,
    /// positive roots in lex order; reflection_elements[i] is the index in
    /// `group` of the reflection in positive_roots[i]
    pub positive_roots: Vec<RootVector>,
    pub reflection_elements: Vec<usize>,
    /// perm -> reflection table index
    reflection_by_perm: HashMap<[u8; LINE_COUNT], usize>,
}

impl WeylGroup {
    /// Generate from the six simple reflections; expected order 51840.
    pub fn generate(lat: &E6Lattice) -> Result<WeylGroup, GroupError> {
        let simple: Vec<GroupElement> = (0..RANK)
            .map(|i| {
                let mut e = [0i64; RANK];
                e[i] = 1;
                reflection(lat, &RootVector(e))
            })
            .collect::<Result<_, _>>()?;
        let group = Group::generate(&simple, 60000)?;
        let positive_roots: Vec<RootVector> = lat
            .roots()
            .iter()
            .filter(|r| r.0.iter().all(|&x| x >= 0))
            .cloned()
            .collect();
        let mut reflection_elements = Vec::with_capacity(positive_roots.len());
        let mut reflection_by_perm = HashMap::new();
        for (i, r) in positive_roots.iter().enumerate() {
            let refl = reflection(lat, r)?;
            let idx = group.index_of(&refl.perm).ok_or(GroupError::NotInGroup)?;
            reflection_elements.push(idx);
            reflection_by_perm.insert(refl.perm, i);
        }
        Ok(WeylGroup {
            group,
            positive_roots,
            reflection_elements,
            reflection_by_perm,
        })
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Degree of an involution: multiplicity of the -1 eigenvalue of its
    /// root-lattice matrix, i.e. (6 - trace) / 2. Degree 0 is the identity.
    pub fn involution_degree(&self, g: &GroupElement) -> Result<u8, GroupError> {
        if !g.is_identity() && !g.is_involution() {
            return Err(GroupError::NotAnInvolution);
        }
        let t = g.trace();
        debug_assert_eq!((RANK as i64 - t) % 2, 0);
        let d = (RANK as i64 - t) / 2;
        debug_assert!((0..=4).contains(&d));
        Ok(d as u8)
    }

    /// Count involutions by degree; the identity is recorded at degree 0.
    pub fn involution_census(&self) -> InvolutionCensus {
        let mut by_degree = [0usize; 5];
        for g in self.group.elements() {
            if g.is_identity() {
                by_degree[0] += 1;
            } else if g.is_involution() {
                let d = self.involution_degree(g).unwrap() as usize;
                by_degree[d] += 1;
            }
        }
        InvolutionCensus { by_degree }
    }

    /// Indices of all involutions (identity excluded).
    pub fn involutions(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| self.group.element(i).is_involution())
            .collect()
    }

    /// Reflection table index of a group element, if it is a reflection.
    pub fn reflection_id_of(&self, g: &GroupElement) -> Option<usize> {
        self.reflection_by_perm.get(&g.perm).copied()
    }

    /// Orthogonality of two reflections (their roots pair to zero).
    pub fn reflections_orthogonal(&self, lat: &E6Lattice, i: usize, j: usize) -> bool {
        lat.cartan()
            .root_pairing(&self.positive_roots[i], &self.positive_roots[j]) == 0
    }

    /// All cubes of a given rank: cliques in the orthogonality relation on
    /// the 36 reflections. Deterministic lexicographic enumeration.
    pub fn cubes_of_rank(&self, lat: &E6Lattice, rank: usize) -> Vec<Cube> {
        let n = self.positive_roots.len();
        let mut orth = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    orth[i][j] = self.reflections_orthogonal(lat, i, j);
                }
            }
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn extend(
            start: usize,
            n: usize,
            rank: usize,
            orth: &[Vec<bool>],
            stack: &mut Vec<usize>,
            out: &mut Vec<Cube>,
        ) {
            if stack.len() == rank {
                out.push(Cube {
                    reflection_ids: stack.clone(),
                });
                return;
            }
            for c in start..n {
                if stack.iter().all(|&s| orth[s][c]) {
                    stack.push(c);
                    extend(c + 1, n, rank, orth, stack, out);
                    stack.pop();
                }
            }
        }
        extend(0, n, rank, &orth, &mut stack, &mut out);
        out
    }

    /// The maximal cubes (rank 4). Also checks maximality: no rank-5 clique
    /// exists and every smaller clique extends.
    pub fn maximal_cubes(&self, lat: &E6Lattice) -> Vec<Cube> {
        let rank5 = self.cubes_of_rank(lat, 5);
        assert!(rank5.is_empty(), "no five pairwise orthogonal roots in E6");
        self.cubes_of_rank(lat, 4)
    }

    /// The 16 elements of a cube as group indices, ordered by subset mask of
    /// the generating reflections (mask bit i = reflection_ids[i] used).
    pub fn cube_elements(&self, cube: &Cube) -> Vec<usize> {
        let k = cube.rank();
        let id = self
            .group
            .index_of(&GroupElement::identity().perm)
            .unwrap();
        (0..1usize << k)
            .map(|mask| {
                let mut acc = id;
                for (bit, &rid) in cube.reflection_ids.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        acc = self.group.multiply(acc, self.reflection_elements[rid]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Extremity of a cube: the product of all its reflections.
    pub fn extremity(&self, cube: &Cube) -> usize {
        *self.cube_elements(cube).last().unwrap()
    }

    /// Normalizer data of a cube: order of N(C), order of the centralizer,
    /// and the image of N(C) in the symmetric group on the 4 generating
    /// reflections (as a set of permutations).
    pub fn normalizer_image(&self, lat: &E6Lattice, cube: &Cube) -> NormalizerInfo {
        let elems = self.cube_elements(cube);
        let elem_set: std::collections::HashSet<usize> = elems.iter().copied().collect();
        let refl_indices: Vec<usize> = cube
            .reflection_ids
            .iter()
            .map(|&rid| self.reflection_elements[rid])
            .collect();
        let _ = lat;
        let mut normalizer_order = 0usize;
        let mut centralizer_order = 0usize;
        let mut images: std::collections::HashSet<[u8; 4]> = Default::default();
        for g in 0..self.order() {
            // conjugate each generating reflection
            let mut img = [0u8; 4];
            let mut inside = true;
            for (k, &r) in refl_indices.iter().enumerate() {
                let c = self.group.conjugate(g, r);
                match refl_indices.iter().position(|&x| x == c) {
                    Some(p) => img[k] = p as u8,
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside {
                normalizer_order += 1;
                images.insert(img);
                if img == [0, 1, 2, 3] {
                    // fixes each reflection: centralizes the cube
                    centralizer_order += 1;
                }
                continue;
            }
            // g might normalize C without permuting the generating
            // reflections into themselves only if it moved some reflection
            // outside the generator set; for an elementary abelian group
            // generated by its 4 reflections of degree 1, conjugation
            // permutes the degree-1 elements, which are exactly the
            // generators, so "inside" is the full condition. Verify cheaply:
            debug_assert!({
                let all_in = refl_indices
                    .iter()
                    .all(|&r| elem_set.contains(&self.group.conjugate(g, r)));
                !all_in
            });
        }
        NormalizerInfo {
            normalizer_order,
            centralizer_order,
            image_size: images.len(),
        }
    }

    /// Orbits of the subgroup generated by `sub` (element indices) on a
    /// G-set. The subgroup is closed by multiplication first; orbit points
    /// and stabilizers are sorted, orbits ordered by smallest point.
    pub fn orbit_decomposition(&self, set: &GSet, sub: &[usize]) -> Result<Vec<Orbit>, GroupError> {
        for &i in sub {
            if i >= self.order() {
                return Err(GroupError::NotInGroup);
            }
        }
        // close under multiplication
        let id = self
            .group
            .index_of(&GroupElement::identity().perm)
            .unwrap();
        let mut closed: Vec<usize> = vec![id];
        let mut seen: std::collections::HashSet<usize> = closed.iter().copied().collect();
        let mut queue: VecDeque<usize> = closed.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &g in sub {
                let p = self.group.multiply(x, g);
                if seen.insert(p) {
                    closed.push(p);
                    queue.push_back(p);
                }
            }
        }
        closed.sort_unstable();
        let mut assigned = vec![false; set.size()];
        let mut orbits = Vec::new();
        for p in 0..set.size() {
            if assigned[p] {
                continue;
            }
            let mut points: Vec<usize> = closed
                .iter()
                .map(|&g| set.apply(self.group.element(g), p))
                .collect();
            points.sort_unstable();
            points.dedup();
            for &q in &points {
                assigned[q] = true;
            }
            let stabilizer: Vec<usize> = closed
                .iter()
                .copied()
                .filter(|&g| set.apply(self.group.element(g), p) == p)
                .collect();
            orbits.push(Orbit { points, stabilizer });
        }
        Ok(orbits)
    }

    /// The canonical cube: the four commuting reflections obtained from the
    /// Schläfli labelling as eps (swap of x and x'), (12), (34), (56), in
    /// that order.
    pub fn canonical_cube(&self, model: &SchlafliModel) -> Result<CanonicalCube, GroupError> {
        let id_sigma = [1u8, 2, 3, 4, 5, 6];
        let transposition = |a: usize, b: usize| {
            let mut s = id_sigma;
            s.swap(a, b);
            s
        };
        let label_perms = [
            label_action(&id_sigma, true),
            label_action(&transposition(0, 1), false),
            label_action(&transposition(2, 3), false),
            label_action(&transposition(4, 5), false),
        ];
        let mut generators = Vec::with_capacity(4);
        let mut reflection_ids = Vec::with_capacity(4);
        for lp in &label_perms {
            let perm = model.lift_label_permutation(lp);
            let idx = self.group.index_of(&perm).ok_or(GroupError::NotInGroup)?;
            let g = self.group.element(idx);
            let rid = self
                .reflection_id_of(g)
                .ok_or(GroupError::BadCanonicalCube)?;
            generators.push(idx);
            reflection_ids.push(rid);
        }
        // pairwise commuting
        for i in 0..4 {
            for j in i + 1..4 {
                let ab = self.group.multiply(generators[i], generators[j]);
                let ba = self.group.multiply(generators[j], generators[i]);
                if ab != ba {
                    return Err(GroupError::BadCanonicalCube);
                }
            }
        }
        Ok(CanonicalCube {
            cube: Cube {
                reflection_ids: reflection_ids.clone(),
            },
            generators,
        })
    }
}

/// Normalizer summary for a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizerInfo {
    pub normalizer_order: usize,
    pub centralizer_order: usize,
    /// size of the image of N(C) in the symmetric group on the 4
    /// generating reflections
    pub image_size: usize,
}

/// The canonical cube with its generators in labelled order
/// (eps, (12), (34), (56)); unlike `Cube.reflection_ids` this order is not
/// sorted by root, it is the order the twisting classes attach to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCube {
    pub cube: Cube,
    /// group element indices of s1..s4 in labelled order
    pub generators: Vec<usize>,
}

impl CanonicalCube {
    /// Group element index of the product over a subset mask of s1..s4.
    pub fn subset_element(&self, w: &WeylGroup, mask: usize) -> usize {
        let id = w.group.index_of(&GroupElement::identity().perm).unwrap();
        let mut acc = id;
        for (bit, &g) in self.generators.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                acc = w.group.multiply(acc, g);
            }
        }
        acc
    }

    /// All 16 subgroup element indices ordered by subset mask.
    pub fn elements(&self, w: &WeylGroup) -> Vec<usize> {
        (0..16).map(|m| self.subset_element(w, m)).collect()
    }
}
