//! The E6 root system in Bourbaki numbering, its root lattice Q and weight
//! lattice P, and the rank-7 unimodular lattice L of signature (1,6) built
//! from Z x P by a mod-3 congruence. The 27 distinguished lattice classes
//! ("lines") are enumerated here; everything downstream acts on them.
//!
//! Coordinate conventions:
//! * roots are kept in alpha-coordinates (basis of simple roots);
//! * weights are kept in omega-coordinates (basis of fundamental weights);
//! * root . root goes through the Cartan matrix A;
//! * weight . weight is stored scaled by 3 via adj(A) = 3 A^{-1}, so all
//!   pairings stay in integers;
//! * weight . root is the plain dot product of coordinate vectors.

use crate::exact::{self, Rat};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

/// Rank of E6.
pub const RANK: usize = 6;

/// Number of roots.
pub const ROOT_COUNT: usize = 72;

/// Number of lines.
pub const LINE_COUNT: usize = 27;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("point ({n}, {w:?}) violates the congruence n = e(p) mod 3 (e(p) = {class})")]
    InvalidPoint { n: i64, w: [i64; RANK], class: u8 },
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("root closure produced {found} vectors instead of {expected}")]
    RootClosure { found: usize, expected: usize },
    #[error("line orbit closure produced {found} points instead of {expected}")]
    LineClosure { found: usize, expected: usize },
}

/// A vector of the root lattice Q in alpha-coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootVector(pub [i64; RANK]);

/// A vector of the weight lattice P in omega-coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightVector(pub [i64; RANK]);

/// A point (n, p) of the rank-7 lattice L, with n = e(p) mod 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub n: i64,
    pub w: WeightVector,
}

/// One of the 27 lines: a point y of L with h.y = 1 and y.y = -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineClass {
    pub index: usize,
    pub point: LatticePoint,
}

/// Cartan matrix of E6 (Bourbaki numbering: chain 1-3-4-5-6, node 2 on 4),
/// together with derived pairing data.
#[derive(Debug, Clone)]
pub struct CartanData {
    a: [[i64; RANK]; RANK],
    /// adj(A) = 3 * A^{-1}; entry (i,j) equals 3 * (omega_i . omega_j).
    b: [[i64; RANK]; RANK],
    /// e(omega_i) in Z/3, with e(omega_1) = 1 and kernel Q.
    e_vec: [u8; RANK],
}

impl CartanData {
    pub fn e6() -> Self {
        let mut a = [[0i64; RANK]; RANK];
        for i in 0..RANK {
            a[i][i] = 2;
        }
        // Dynkin edges, 1-indexed: {1,3},{3,4},{4,5},{5,6},{2,4}
        for &(i, j) in &[(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)] {
            a[i - 1][j - 1] = -1;
            a[j - 1][i - 1] = -1;
        }
        let a_i128: Vec<Vec<i128>> = a
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let det = exact::det_i128(&a_i128);
        assert_eq!(det, 3, "E6 Cartan determinant");
        let adj = exact::adjugate(&a_i128);
        let mut b = [[0i64; RANK]; RANK];
        for i in 0..RANK {
            for j in 0..RANK {
                b[i][j] = adj[i][j] as i64;
            }
        }
        // e(omega_i): the class c with omega_i = c * omega_1 mod Q, i.e.
        // row i of B congruent to c * row 1 of B mod 3.
        let mut e_vec = [0u8; RANK];
        for i in 0..RANK {
            let c = (0..3)
                .find(|&c| (0..RANK).all(|j| (b[i][j] - c * b[0][j]).rem_euclid(3) == 0))
                .expect("P/Q is cyclic of order 3 generated by omega_1");
            e_vec[i] = c as u8;
        }
        assert_eq!(e_vec[0], 1);
        CartanData { a, b, e_vec }
    }

    pub fn cartan(&self) -> &[[i64; RANK]; RANK] {
        &self.a
    }

    /// 3 * (omega_i . omega_j) as an integer matrix.
    pub fn weight_gram3(&self) -> &[[i64; RANK]; RANK] {
        &self.b
    }

    pub fn e_vector(&self) -> &[u8; RANK] {
        &self.e_vec
    }

    /// root . root.
    pub fn root_pairing(&self, x: &RootVector, y: &RootVector) -> i64 {
        let mut s = 0;
        for i in 0..RANK {
            for j in 0..RANK {
                s += x.0[i] * self.a[i][j] * y.0[j];
            }
        }
        s
    }

    /// 3 * (weight . weight).
    pub fn weight_pairing3(&self, x: &WeightVector, y: &WeightVector) -> i64 {
        let mut s = 0;
        for i in 0..RANK {
            for j in 0..RANK {
                s += x.0[i] * self.b[i][j] * y.0[j];
            }
        }
        s
    }

    /// weight . root (always an integer).
    pub fn weight_root_pairing(&self, w: &WeightVector, r: &RootVector) -> i64 {
        (0..RANK).map(|i| w.0[i] * r.0[i]).sum()
    }

    /// Class of a weight in P/Q = Z/3, normalized so e(omega_1) = 1.
    pub fn class_mod_q(&self, w: &WeightVector) -> u8 {
        let s: i64 = (0..RANK).map(|i| w.0[i] * self.e_vec[i] as i64).sum();
        s.rem_euclid(3) as u8
    }

    /// omega-coordinates of a root lattice vector.
    pub fn root_to_weight(&self, r: &RootVector) -> WeightVector {
        let mut w = [0i64; RANK];
        for i in 0..RANK {
            w[i] = (0..RANK).map(|j| self.a[i][j] * r.0[j]).sum();
        }
        WeightVector(w)
    }

    /// alpha-coordinates of a weight, if it lies in the root lattice.
    pub fn weight_to_root(&self, w: &WeightVector) -> Option<RootVector> {
        let mut r = [0i64; RANK];
        for i in 0..RANK {
            let s: i64 = (0..RANK).map(|j| self.b[i][j] * w.0[j]).sum();
            if s % 3 != 0 {
                return None;
            }
            r[i] = s / 3;
        }
        Some(RootVector(r))
    }

    /// Reflection of a weight in a root: p - (p.r) r, in omega-coordinates.
    pub fn reflect_weight(&self, r: &RootVector, w: &WeightVector) -> WeightVector {
        let c = self.weight_root_pairing(w, r);
        let rw = self.root_to_weight(r);
        let mut out = [0i64; RANK];
        for i in 0..RANK {
            out[i] = w.0[i] - c * rw.0[i];
        }
        WeightVector(out)
    }

    /// Reflection of a root in a root: x - (x.r) r, in alpha-coordinates.
    pub fn reflect_root(&self, r: &RootVector, x: &RootVector) -> RootVector {
        let c = self.root_pairing(x, r);
        let mut out = [0i64; RANK];
        for i in 0..RANK {
            out[i] = x.0[i] - c * r.0[i];
        }
        RootVector(out)
    }
}

impl LatticePoint {
    /// Validated constructor: rejects points violating n = e(p) mod 3.
    pub fn new(n: i64, w: WeightVector, cartan: &CartanData) -> Result<Self, LatticeError> {
        let class = cartan.class_mod_q(&w);
        if n.rem_euclid(3) as u8 != class {
            return Err(LatticeError::InvalidPoint { n, w: w.0, class });
        }
        Ok(LatticePoint { n, w })
    }
}

/// The built lattice artifact: Cartan data, the 72 roots and the 27 lines,
/// both in deterministic lexicographic order.
#[derive(Debug, Clone)]
pub struct E6Lattice {
    cartan: CartanData,
    roots: Vec<RootVector>,
    lines: Vec<LineClass>,
    line_index: HashMap<WeightVector, usize>,
}

impl E6Lattice {
    pub fn build() -> Result<Self, LatticeError> {
        let cartan = CartanData::e6();
        let roots = build_root_system(&cartan)?;
        let lines = enumerate_lines(&cartan)?;
        let line_index = lines
            .iter()
            .map(|l| (l.point.w, l.index))
            .collect::<HashMap<_, _>>();
        Ok(E6Lattice {
            cartan,
            roots,
            lines,
            line_index,
        })
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn roots(&self) -> &[RootVector] {
        &self.roots
    }

    pub fn lines(&self) -> &[LineClass] {
        &self.lines
    }

    pub fn line_index(&self, w: &WeightVector) -> Option<usize> {
        self.line_index.get(w).copied()
    }

    /// The hyperplane class h = (3, 0); h.h = 3.
    pub fn h(&self) -> LatticePoint {
        LatticePoint {
            n: 3,
            w: WeightVector([0; RANK]),
        }
    }

    /// The base line (1, omega_1).
    pub fn omega1_line(&self) -> LatticePoint {
        LatticePoint {
            n: 1,
            w: WeightVector([1, 0, 0, 0, 0, 0]),
        }
    }

    /// The bilinear form of L: q(u, v) = n n' / 3 - p . p'. Exact on valid
    /// lattice points; the division by 3 never truncates.
    pub fn q_l(&self, u: &LatticePoint, v: &LatticePoint) -> i64 {
        let num = u.n * v.n - self.cartan.weight_pairing3(&u.w, &v.w);
        debug_assert_eq!(num % 3, 0, "pairing of valid lattice points is integral");
        num / 3
    }

    /// A point of L is the image (0, alpha) of a root if and only if it
    /// pairs to 0 with h and has self-pairing -2.
    pub fn is_root_point(&self, u: &LatticePoint) -> bool {
        self.q_l(&self.h(), u) == 0 && self.q_l(u, u) == -2
    }

    /// Embed a root as the lattice point (0, alpha).
    pub fn root_point(&self, r: &RootVector) -> LatticePoint {
        LatticePoint {
            n: 0,
            w: self.cartan.root_to_weight(r),
        }
    }

    /// Gram matrix of L in the basis [(1, omega_1), (0, alpha_1..alpha_6)].
    pub fn gram(&self) -> [[i64; 7]; 7] {
        let basis = self.gram_basis();
        let mut g = [[0i64; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                g[i][j] = self.q_l(&basis[i], &basis[j]);
            }
        }
        g
    }

    /// The basis behind `gram`.
    pub fn gram_basis(&self) -> [LatticePoint; 7] {
        let mut basis = [self.omega1_line(); 7];
        for i in 0..RANK {
            let mut e = [0i64; RANK];
            e[i] = 1;
            basis[i + 1] = self.root_point(&RootVector(e));
        }
        basis
    }

    /// |det| of the Gram matrix (1 for a unimodular lattice) and its sign.
    pub fn gram_det(&self) -> i64 {
        let g = self.gram();
        let m: Vec<Vec<i128>> = g
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        exact::det_i128(&m) as i64
    }

    /// Signature (positive, negative) of the Gram matrix over R, computed
    /// by exact rational diagonalization.
    pub fn gram_signature(&self) -> (usize, usize) {
        let g = self.gram();
        let m: Vec<Vec<Rat>> = g
            .iter()
            .map(|r| r.iter().map(|&x| exact::rat(x as i128)).collect())
            .collect();
        let d = exact::symmetric_diagonalize(&m);
        let pos = d.iter().filter(|&&x| x > exact::rat(0)).count();
        let neg = d.iter().filter(|&&x| x < exact::rat(0)).count();
        (pos, neg)
    }
}

/// Closure of the six simple roots under the simple reflections.
/// Deterministic: breadth-first from the simple roots, result sorted.
pub fn build_root_system(cartan: &CartanData) -> Result<Vec<RootVector>, LatticeError> {
    let mut seen: HashMap<RootVector, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    for i in 0..RANK {
        let mut e = [0i64; RANK];
        e[i] = 1;
        let r = RootVector(e);
        seen.insert(r, ());
        queue.push_back(r);
    }
    let simple: Vec<RootVector> = (0..RANK)
        .map(|i| {
            let mut e = [0i64; RANK];
            e[i] = 1;
            RootVector(e)
        })
        .collect();
    while let Some(x) = queue.pop_front() {
        for s in &simple {
            let y = cartan.reflect_root(s, &x);
            if seen.insert(y, ()).is_none() {
                queue.push_back(y);
            }
        }
        if seen.len() > ROOT_COUNT {
            break;
        }
    }
    if seen.len() != ROOT_COUNT {
        return Err(LatticeError::RootClosure {
            found: seen.len(),
            expected: ROOT_COUNT,
        });
    }
    let mut roots: Vec<RootVector> = seen.into_keys().collect();
    roots.sort();
    Ok(roots)
}

/// Orbit of omega_1 under the simple reflections, as points (1, w) of L.
/// Deterministic: breadth-first, result sorted by omega-coordinates.
pub fn enumerate_lines(cartan: &CartanData) -> Result<Vec<LineClass>, LatticeError> {
    let start = WeightVector([1, 0, 0, 0, 0, 0]);
    let mut seen: HashMap<WeightVector, ()> = HashMap::new();
    seen.insert(start, ());
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(w) = queue.pop_front() {
        for i in 0..RANK {
            // s_i(p) = p - p_i * alpha_i, with alpha_i = row i of A in
            // omega-coordinates
            let mut out = w.0;
            let c = w.0[i];
            for j in 0..RANK {
                out[j] -= c * cartan.a[i][j];
            }
            let y = WeightVector(out);
            if seen.insert(y, ()).is_none() {
                queue.push_back(y);
            }
        }
        if seen.len() > LINE_COUNT {
            break;
        }
    }
    if seen.len() != LINE_COUNT {
        return Err(LatticeError::LineClosure {
            found: seen.len(),
            expected: LINE_COUNT,
        });
    }
    let mut ws: Vec<WeightVector> = seen.into_keys().collect();
    ws.sort();
    Ok(ws
        .into_iter()
        .enumerate()
        .map(|(index, w)| LineClass {
            index,
            point: LatticePoint { n: 1, w },
        })
        .collect())
}
