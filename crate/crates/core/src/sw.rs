//! Mod-2 characteristic-class computations for the twisted trace forms.
//!
//! The quadratic forms attached to a homomorphism of the Galois group onto
//! the canonical cube have total Stiefel-Whitney classes that live in a
//! small quotient of the mod-2 cohomology of the cube. This module models
//! that target ring exactly: polynomial coefficients `F2[e, t]/(te, t^2)`
//! over a basis `1, w1..w4` with a pinned multiplication table, the
//! four-term numerical vector `m = (m1..m4)` read off an involution action,
//! the solver producing the coefficient polynomials `p1..p4` of the total
//! class from `m`, graded pieces, the specialization at `e = 0`, the
//! variant total class for trace forms, and an independent interpolation
//! ring in four variables used to cross-check the solver.
//!
//! The relation `t * e = 0` in the coefficient ring encodes that 2 is a sum
//! of two squares in the ground field (over the rationals, 2 = 1 + 1),
//! which kills the product of the corresponding degree-one classes; the
//! computations in this module are therefore specific to such fields.

use std::fmt;

use thiserror::Error;

use crate::weyl::{CanonicalCube, GSet, GroupElement, WeylGroup};

/// Errors from the mod-2 class computations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SwError {
    #[error("polynomial is not divisible by x^{0}")]
    Divisibility(usize),
    #[error("element is not symmetric under permuting the four variables")]
    Symmetry,
    #[error("constant slot of a total class must be 1")]
    Basis,
    #[error("group element is neither the identity nor an involution")]
    NotInvolution,
    #[error("m-vector violates the congruences required of an involution family")]
    Congruence,
}

/// Polynomial over F2 in one variable, stored as a bitset of coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct F2Poly {
    bits: Vec<u64>,
}

impl F2Poly {
    pub fn zero() -> F2Poly {
        F2Poly::default()
    }

    pub fn one() -> F2Poly {
        F2Poly::x_pow(0)
    }

    pub fn x_pow(k: usize) -> F2Poly {
        let mut p = F2Poly::default();
        p.set(k);
        p
    }

    pub fn from_exponents(exps: &[usize]) -> F2Poly {
        let mut p = F2Poly::default();
        for &k in exps {
            p.toggle(k);
        }
        p
    }

    /// `(1 + x)^m`; the coefficient of `x^k` is odd exactly when the bits
    /// of `k` are a subset of the bits of `m`.
    pub fn one_plus_x_pow(m: u64) -> F2Poly {
        let mut p = F2Poly::default();
        for k in 0..=m {
            if k & m == k {
                p.set(k as usize);
            }
        }
        p
    }

    fn set(&mut self, k: usize) {
        let word = k / 64;
        if self.bits.len() <= word {
            self.bits.resize(word + 1, 0);
        }
        self.bits[word] |= 1 << (k % 64);
    }

    fn toggle(&mut self, k: usize) {
        let word = k / 64;
        if self.bits.len() <= word {
            self.bits.resize(word + 1, 0);
        }
        self.bits[word] ^= 1 << (k % 64);
        self.trim();
    }

    fn trim(&mut self) {
        while self.bits.last() == Some(&0) {
            self.bits.pop();
        }
    }

    pub fn coeff(&self, k: usize) -> bool {
        self.bits
            .get(k / 64)
            .is_some_and(|w| w >> (k % 64) & 1 == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn degree(&self) -> Option<usize> {
        let word = self.bits.iter().rposition(|&w| w != 0)?;
        Some(word * 64 + 63 - self.bits[word].leading_zeros() as usize)
    }

    pub fn constant_term(&self) -> bool {
        self.coeff(0)
    }

    pub fn add(&self, other: &F2Poly) -> F2Poly {
        let mut bits = vec![0u64; self.bits.len().max(other.bits.len())];
        for (i, slot) in bits.iter_mut().enumerate() {
            *slot = self.bits.get(i).copied().unwrap_or(0)
                ^ other.bits.get(i).copied().unwrap_or(0);
        }
        let mut out = F2Poly { bits };
        out.trim();
        out
    }

    pub fn mul(&self, other: &F2Poly) -> F2Poly {
        let mut out = F2Poly::default();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let deg = self.degree().unwrap_or(0);
        for k in 0..=deg {
            if self.coeff(k) {
                out = out.add(&other.shifted_up(k));
            }
        }
        out
    }

    /// Multiply by `x^k`.
    pub fn shifted_up(&self, k: usize) -> F2Poly {
        let mut out = F2Poly::default();
        if let Some(deg) = self.degree() {
            for j in 0..=deg {
                if self.coeff(j) {
                    out.set(j + k);
                }
            }
        }
        out
    }

    /// Exact division by `x^k`; errors if any lower coefficient is set.
    pub fn shifted_down(&self, k: usize) -> Result<F2Poly, SwError> {
        if (0..k).any(|j| self.coeff(j)) {
            return Err(SwError::Divisibility(k));
        }
        let mut out = F2Poly::default();
        if let Some(deg) = self.degree() {
            for j in k..=deg {
                if self.coeff(j) {
                    out.set(j - k);
                }
            }
        }
        Ok(out)
    }

    /// The single term of degree `d`, if present.
    pub fn graded_piece(&self, d: usize) -> F2Poly {
        if self.coeff(d) {
            F2Poly::x_pow(d)
        } else {
            F2Poly::zero()
        }
    }
}

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for k in (0..=self.degree().unwrap()).rev() {
            if !self.coeff(k) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Element of the coefficient ring `F2[e, t] / (te, t^2)`: a polynomial in
/// `e` plus an optional bare `t` term. Multiplication follows
/// `(p + tb)(q + tc) = pq + t(p(0)c + q(0)b)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CoeffRing {
    pub e_part: F2Poly,
    pub t_part: bool,
}

impl CoeffRing {
    pub fn zero() -> CoeffRing {
        CoeffRing::default()
    }

    pub fn one() -> CoeffRing {
        CoeffRing {
            e_part: F2Poly::one(),
            t_part: false,
        }
    }

    pub fn e_pow(k: usize) -> CoeffRing {
        CoeffRing {
            e_part: F2Poly::x_pow(k),
            t_part: false,
        }
    }

    pub fn t() -> CoeffRing {
        CoeffRing {
            e_part: F2Poly::zero(),
            t_part: true,
        }
    }

    pub fn from_poly(p: F2Poly) -> CoeffRing {
        CoeffRing {
            e_part: p,
            t_part: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e_part.is_zero() && !self.t_part
    }

    pub fn add(&self, other: &CoeffRing) -> CoeffRing {
        CoeffRing {
            e_part: self.e_part.add(&other.e_part),
            t_part: self.t_part ^ other.t_part,
        }
    }

    pub fn mul(&self, other: &CoeffRing) -> CoeffRing {
        CoeffRing {
            e_part: self.e_part.mul(&other.e_part),
            t_part: (self.e_part.constant_term() & other.t_part)
                ^ (other.e_part.constant_term() & self.t_part),
        }
    }

    /// Multiply by `e^k`; for `k >= 1` the `t` term dies since `te = 0`.
    pub fn mul_by_e_pow(&self, k: usize) -> CoeffRing {
        if k == 0 {
            return self.clone();
        }
        CoeffRing {
            e_part: self.e_part.shifted_up(k),
            t_part: false,
        }
    }

    /// Homogeneous piece of degree `d`; both `e` and `t` have degree 1.
    pub fn graded_piece(&self, d: usize) -> CoeffRing {
        CoeffRing {
            e_part: self.e_part.graded_piece(d),
            t_part: self.t_part && d == 1,
        }
    }

    /// Specialize `e` to zero; `t` survives.
    pub fn at_e_zero(&self) -> CoeffRing {
        CoeffRing {
            e_part: if self.e_part.constant_term() {
                F2Poly::one()
            } else {
                F2Poly::zero()
            },
            t_part: self.t_part,
        }
    }
}

impl fmt::Debug for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.e_part.is_zero(), self.t_part) {
            (true, false) => f.write_str("0"),
            (true, true) => f.write_str("t"),
            (false, false) => write!(f, "{}", self.e_part),
            (false, true) => write!(f, "{} + t", self.e_part),
        }
    }
}

/// Element of the invariant target ring: coefficients on the basis
/// `1, w1, w2, w3, w4`. The pairwise products of the basis classes are
/// pinned by `basis_product` and guarded by an exhaustive associativity
/// test.
#[derive(Clone, PartialEq, Eq)]
pub struct InvElement {
    pub coeffs: [CoeffRing; 5],
}

/// `w_i * w_j` for the nonzero basis classes, as `(slot, e_power)`:
/// `w_i^2 = e^i w_i`, `w1 w2 = w3`, `w1 w3 = e w3`, `w2 w3 = e^2 w3`, and
/// every product with `w4` vanishes.
fn basis_product(i: usize, j: usize) -> Option<(usize, usize)> {
    let (a, b) = (i.min(j), i.max(j));
    match (a, b) {
        (0, k) => Some((k, 0)),
        (k, l) if k == l => Some((k, k)),
        (1, 2) => Some((3, 0)),
        (1, 3) => Some((3, 1)),
        (2, 3) => Some((3, 2)),
        (_, 4) => None,
        _ => unreachable!("basis indices run over 0..=4"),
    }
}

impl InvElement {
    pub fn zero() -> InvElement {
        InvElement {
            coeffs: std::array::from_fn(|_| CoeffRing::zero()),
        }
    }

    pub fn one() -> InvElement {
        InvElement::basis(0)
    }

    /// The basis class `w_k` (with `w_0 = 1`).
    pub fn basis(k: usize) -> InvElement {
        let mut out = InvElement::zero();
        out.coeffs[k] = CoeffRing::one();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CoeffRing::is_zero)
    }

    pub fn add(&self, other: &InvElement) -> InvElement {
        InvElement {
            coeffs: std::array::from_fn(|k| self.coeffs[k].add(&other.coeffs[k])),
        }
    }

    pub fn mul(&self, other: &InvElement) -> InvElement {
        let mut out = InvElement::zero();
        for i in 0..5 {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..5 {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                if let Some((slot, e_pow)) = basis_product(i, j) {
                    let term = self.coeffs[i].mul(&other.coeffs[j]).mul_by_e_pow(e_pow);
                    out.coeffs[slot] = out.coeffs[slot].add(&term);
                }
            }
        }
        out
    }

    /// Homogeneous piece of total degree `d` (`w_k` has degree `k`).
    pub fn graded_piece(&self, d: usize) -> InvElement {
        InvElement {
            coeffs: std::array::from_fn(|k| {
                if d >= k {
                    self.coeffs[k].graded_piece(d - k)
                } else {
                    CoeffRing::zero()
                }
            }),
        }
    }

    /// Specialize `e` to zero in every coefficient.
    pub fn at_e_zero(&self) -> InvElement {
        InvElement {
            coeffs: std::array::from_fn(|k| self.coeffs[k].at_e_zero()),
        }
    }

    /// Largest total degree with a nonzero graded piece.
    pub fn max_degree(&self) -> Option<usize> {
        let mut best = None;
        for (k, c) in self.coeffs.iter().enumerate() {
            if let Some(d) = c.e_part.degree() {
                best = best.max(Some(k + d));
            }
            if c.t_part {
                best = best.max(Some(k + 1));
            }
        }
        best
    }
}

impl fmt::Debug for InvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for InvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})w{k}")?;
            }
        }
        Ok(())
    }
}

/// The four-term vector `m = (m1..m4)` attached to a compatible family of
/// involutions: `m_i` is the number of sign characters of the i-th partial
/// product, equivalently half its motion on the underlying set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MVector(pub [u64; 4]);

impl MVector {
    /// The congruences satisfied by every vector coming from an actual
    /// action: `m2` even, `m3 = m1 + m2 (mod 4)`, `m4 = 2 m2 (mod 8)`.
    pub fn satisfies_congruences(&self) -> bool {
        let [m1, m2, m3, m4] = self.0;
        m2 % 2 == 0 && (m1 + m2) % 4 == m3 % 4 && (2 * m2) % 8 == m4 % 8
    }
}

/// Half the motion `(|T| - fix) / 2` of an involution (or the identity) on
/// a finite set.
pub fn permutation_m_value(set: &GSet, g: &GroupElement) -> Result<u64, SwError> {
    if !g.is_identity() && !g.is_involution() {
        return Err(SwError::NotInvolution);
    }
    let moved = set.size() - set.fixed_points(g);
    Ok(moved as u64 / 2)
}

/// Multiplicity of the sign eigenvalue of an involution (or the identity)
/// in the six-dimensional reflection representation: `(6 - trace) / 2`.
pub fn matrix_m_value(g: &GroupElement) -> Result<u64, SwError> {
    if !g.is_identity() && !g.is_involution() {
        return Err(SwError::NotInvolution);
    }
    Ok(((6 - g.trace()) / 2) as u64)
}

fn partial_products(weyl: &WeylGroup, cube: &CanonicalCube) -> [usize; 4] {
    std::array::from_fn(|i| cube.subset_element(weyl, (1 << (i + 1)) - 1))
}

/// The m-vector of the cube acting on a finite set, from the four partial
/// products of the cube generators.
pub fn m_vector_from_action(
    weyl: &WeylGroup,
    cube: &CanonicalCube,
    set: &GSet,
) -> Result<MVector, SwError> {
    let ids = partial_products(weyl, cube);
    let mut m = [0u64; 4];
    for (i, &id) in ids.iter().enumerate() {
        m[i] = permutation_m_value(set, weyl.group.element(id))?;
    }
    Ok(MVector(m))
}

/// The m-vector of the cube in the six-dimensional reflection
/// representation.
pub fn m_vector_dim6(weyl: &WeylGroup, cube: &CanonicalCube) -> Result<MVector, SwError> {
    let ids = partial_products(weyl, cube);
    let mut m = [0u64; 4];
    for (i, &id) in ids.iter().enumerate() {
        m[i] = matrix_m_value(weyl.group.element(id))?;
    }
    Ok(MVector(m))
}

/// The m-vector of a multiset of cube characters given by their 4-bit
/// support masks: `m_i` counts the characters that are nontrivial on the
/// product of the first `i` generators, i.e. whose mask meets `{1..i}` in
/// an odd number of bits.
pub fn m_vector_from_masks<I: IntoIterator<Item = u8>>(masks: I) -> MVector {
    let mut m = [0u64; 4];
    for mask in masks {
        for (i, slot) in m.iter_mut().enumerate() {
            let window = (1u8 << (i + 1)) - 1;
            if (mask & window).count_ones() % 2 == 1 {
                *slot += 1;
            }
        }
    }
    MVector(m)
}

/// Solve for the coefficient polynomials `p1..p4` of the total class from
/// the m-vector: with `p0 = 1`, the polynomials satisfy
/// `sum_{j <= i, odd C(i,j)} x^j p_j = (1 + x)^{m_i}` for `i = 1..4`, each
/// step requiring an exact division by `x^i`. The division succeeds
/// exactly when the m-vector satisfies the involution-family congruences.
pub fn solve_p(m: &MVector) -> Result<[F2Poly; 4], SwError> {
    let mut p = vec![F2Poly::one()];
    for i in 1..=4usize {
        let mut num = F2Poly::one_plus_x_pow(m.0[i - 1]);
        for (j, pj) in p.iter().enumerate() {
            // Lucas: C(i, j) is odd exactly when the bits of j lie in i
            if j & i == j {
                num = num.add(&pj.shifted_up(j));
            }
        }
        p.push(num.shifted_down(i)?);
    }
    Ok([
        p[1].clone(),
        p[2].clone(),
        p[3].clone(),
        p[4].clone(),
    ])
}

/// Total class `1 + p1(e) w1 + p2(e) w2 + p3(e) w3 + p4(e) w4`.
pub fn total_class(m: &MVector) -> Result<InvElement, SwError> {
    let p = solve_p(m)?;
    let mut out = InvElement::one();
    for (i, pi) in p.into_iter().enumerate() {
        out.coeffs[i + 1] = CoeffRing::from_poly(pi);
    }
    Ok(out)
}

/// The specialization of the total class at `e = 0` factors as
/// `(1 + a w1)(1 + b w2)(1 + c w4)` with `a = m1 mod 2`, `b = m2/2 mod 2`,
/// `c = m4/4 mod 2`; this builds the product side.
pub fn e_zero_product(m: &MVector) -> Result<InvElement, SwError> {
    if m.0[1] % 2 != 0 || m.0[3] % 4 != 0 {
        return Err(SwError::Congruence);
    }
    let mut out = InvElement::one();
    for (slot, flag) in [
        (1usize, m.0[0] % 2 == 1),
        (2, (m.0[1] / 2) % 2 == 1),
        (4, (m.0[3] / 4) % 2 == 1),
    ] {
        if flag {
            out = out.mul(&InvElement::one().add(&InvElement::basis(slot)));
        }
    }
    Ok(out)
}

/// Total class of the trace form attached to the same data: each
/// even-degree piece gains `t` times the piece one degree below, so the
/// correction is `t` times the sum of the odd-degree pieces. Only the
/// `e`-free part of each odd piece survives, since `te = 0`.
pub fn trace_form_class(total: &InvElement) -> InvElement {
    let max = total.max_degree().unwrap_or(0);
    let mut correction = InvElement::zero();
    for d in (1..=max).step_by(2) {
        let piece = total.graded_piece(d);
        for k in 0..5 {
            correction.coeffs[k] = correction.coeffs[k].add(&piece.coeffs[k].mul(&CoeffRing::t()));
        }
    }
    total.add(&correction)
}

/// Element of the interpolation ring `F2[y][x1..x4] / (x_i^2 - x_i y)`:
/// one `F2Poly` in `y` per square-free monomial in the four variables,
/// indexed by subset mask. Monomials multiply by
/// `x^I * x^J = x^{I union J} y^{|I intersect J|}`.
#[derive(Clone, PartialEq, Eq)]
pub struct HCPrimeElement {
    pub slots: [F2Poly; 16],
}

impl HCPrimeElement {
    pub fn zero() -> HCPrimeElement {
        HCPrimeElement {
            slots: std::array::from_fn(|_| F2Poly::zero()),
        }
    }

    pub fn one() -> HCPrimeElement {
        HCPrimeElement::monomial(0)
    }

    /// The square-free monomial `x^I` for a subset mask.
    pub fn monomial(mask: u8) -> HCPrimeElement {
        let mut out = HCPrimeElement::zero();
        out.slots[mask as usize] = F2Poly::one();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(F2Poly::is_zero)
    }

    pub fn add(&self, other: &HCPrimeElement) -> HCPrimeElement {
        HCPrimeElement {
            slots: std::array::from_fn(|k| self.slots[k].add(&other.slots[k])),
        }
    }

    pub fn mul(&self, other: &HCPrimeElement) -> HCPrimeElement {
        let mut out = HCPrimeElement::zero();
        for i in 0..16usize {
            if self.slots[i].is_zero() {
                continue;
            }
            for j in 0..16usize {
                if other.slots[j].is_zero() {
                    continue;
                }
                let slot = i | j;
                let y_pow = (i & j).count_ones() as usize;
                let term = self.slots[i].mul(&other.slots[j]).shifted_up(y_pow);
                out.slots[slot] = out.slots[slot].add(&term);
            }
        }
        out
    }
}

impl fmt::Debug for HCPrimeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, p) in self.slots.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({p})")?;
            for i in 0..4 {
                if mask >> i & 1 == 1 {
                    write!(f, "x{}", i + 1)?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Total class of a multiset of cube characters in the interpolation ring:
/// the product over the multiset of `1 + sum_{i in mask} x_i`.
pub fn hcprime_total_class(masks: &[u8]) -> HCPrimeElement {
    let mut out = HCPrimeElement::one();
    for &mask in masks {
        let mut factor = HCPrimeElement::one();
        for i in 0..4 {
            if mask >> i & 1 == 1 {
                factor = factor.add(&HCPrimeElement::monomial(1 << i));
            }
        }
        out = out.mul(&factor);
    }
    out
}

/// Extract `p1..p4` from a total class that is symmetric under permuting
/// the four variables: the slot polynomial is constant on each subset-size
/// class, the empty slot must be exactly 1, and `p_i` is the common slot
/// polynomial of the size-`i` subsets (in `y`).
pub fn symmetric_extract_p(elt: &HCPrimeElement) -> Result<[F2Poly; 4], SwError> {
    let mut by_size: [Option<&F2Poly>; 5] = [None; 5];
    for mask in 0..16usize {
        let size = mask.count_ones() as usize;
        match by_size[size] {
            None => by_size[size] = Some(&elt.slots[mask]),
            Some(seen) => {
                if *seen != elt.slots[mask] {
                    return Err(SwError::Symmetry);
                }
            }
        }
    }
    if *by_size[0].expect("size 0 is always seen") != F2Poly::one() {
        return Err(SwError::Basis);
    }
    Ok(std::array::from_fn(|i| {
        by_size[i + 1].expect("all sizes occur").clone()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::E6Lattice;
    use crate::schlafli::{build_omega, SchlafliModel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    struct Setup {
        weyl: WeylGroup,
        cube: CanonicalCube,
        triangles: GSet,
        line_cform: crate::qforms::CForm,
    }

    fn setup() -> &'static Setup {
        static SETUP: OnceLock<Setup> = OnceLock::new();
        SETUP.get_or_init(|| {
            let lat = E6Lattice::build().expect("lattice builds");
            let omega = build_omega(&lat);
            let model = SchlafliModel::build(&lat).expect("labelling exists");
            let weyl = WeylGroup::generate(&lat).expect("group generates");
            let cube = weyl.canonical_cube(&model).expect("cube exists");
            let triangles = GSet::triangles(&omega, &weyl.group).expect("triangles close");
            let generators: [Vec<Vec<crate::exact::Rat>>; 4] = std::array::from_fn(|k| {
                weyl.group.element(cube.generators[k])
                    .perm
                    .iter()
                    .enumerate()
                    .fold(vec![vec![crate::exact::rat(0); 27]; 27], |mut m, (j, &img)| {
                        m[img as usize][j] = crate::exact::rat(1);
                        m
                    })
            });
            let line_cform =
                crate::qforms::isotypic_decompose(&crate::exact::mat_identity(27), &generators)
                    .expect("decomposition exists");
            Setup {
                weyl,
                cube,
                triangles,
                line_cform,
            }
        })
    }

    fn poly(exps: &[usize]) -> F2Poly {
        F2Poly::from_exponents(exps)
    }

    const M_DIM6: MVector = MVector([1, 2, 3, 4]);
    const M_LINES: MVector = MVector([6, 10, 12, 12]);
    const M_TRIANGLES: MVector = MVector([15, 20, 19, 16]);

    #[test]
    fn poly_arithmetic_basics() {
        let a = poly(&[0, 1]); // 1 + x
        assert_eq!(a.mul(&a), poly(&[0, 2]));
        assert_eq!(F2Poly::one_plus_x_pow(6), poly(&[0, 2, 4, 6]));
        assert_eq!(F2Poly::one_plus_x_pow(15).degree(), Some(15));
        assert!((0..=15).all(|k| F2Poly::one_plus_x_pow(15).coeff(k)));
        assert_eq!(poly(&[3, 5]).shifted_down(3).unwrap(), poly(&[0, 2]));
        assert_eq!(
            poly(&[1, 5]).shifted_down(2),
            Err(SwError::Divisibility(2))
        );
        assert_eq!(a.add(&a), F2Poly::zero());
        assert_eq!(format!("{}", poly(&[0, 1, 3])), "x^3 + x + 1");
        // bitset boundary: exponents straddling the 64-bit word edge
        let wide = poly(&[63, 64, 130]);
        assert_eq!(wide.degree(), Some(130));
        assert_eq!(wide.mul(&poly(&[1])), poly(&[64, 65, 131]));
    }

    #[test]
    fn coeff_ring_relations() {
        let t = CoeffRing::t();
        let e = CoeffRing::e_pow(1);
        assert!(t.mul(&t).is_zero());
        assert!(t.mul(&e).is_zero());
        assert_eq!(t.mul(&CoeffRing::one()), t);
        let mixed = CoeffRing::one().add(&t); // 1 + t
        assert_eq!(mixed.mul(&mixed), CoeffRing::one()); // (1+t)^2 = 1
        let p = CoeffRing::from_poly(poly(&[0, 2])); // 1 + e^2
        assert_eq!(
            p.mul(&t),
            CoeffRing::t(),
            "only the constant term of a polynomial survives against t"
        );
    }

    #[test]
    fn basis_table_is_associative() {
        let basis: Vec<InvElement> = (0..5).map(InvElement::basis).collect();
        for a in &basis {
            for b in &basis {
                for c in &basis {
                    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn random_elements_associate_and_distribute(seed in 0u64..512) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let random_elt = |rng: &mut ChaCha8Rng| {
                let mut elt = InvElement::zero();
                for k in 0..5 {
                    let bits: u16 = rng.gen();
                    let exps: Vec<usize> =
                        (0..8).filter(|&j| bits >> j & 1 == 1).collect();
                    elt.coeffs[k] = CoeffRing {
                        e_part: F2Poly::from_exponents(&exps),
                        t_part: bits >> 8 & 1 == 1,
                    };
                }
                elt
            };
            let a = random_elt(&mut rng);
            let b = random_elt(&mut rng);
            let c = random_elt(&mut rng);
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(
                a.mul(&b.add(&c)),
                a.mul(&b).add(&a.mul(&c))
            );
        }
    }

    #[test]
    fn m_vectors_from_real_actions() {
        let s = setup();
        assert_eq!(m_vector_dim6(&s.weyl, &s.cube).unwrap(), M_DIM6);
        assert_eq!(
            m_vector_from_action(&s.weyl, &s.cube, &GSet::Lines).unwrap(),
            M_LINES
        );
        assert_eq!(
            m_vector_from_action(&s.weyl, &s.cube, &s.triangles).unwrap(),
            M_TRIANGLES
        );
        for m in [M_DIM6, M_LINES, M_TRIANGLES] {
            assert!(m.satisfies_congruences());
        }
    }

    #[test]
    fn character_route_agrees_with_action_route() {
        let s = setup();
        // line permutation form: masks with multiplicity = component rank
        let line_masks = s.line_cform.components.iter().flat_map(|(&mask, form)| {
            std::iter::repeat(mask).take(form.rank())
        });
        assert_eq!(m_vector_from_masks(line_masks), M_LINES);
    }

    #[test]
    fn non_involutions_are_rejected() {
        let s = setup();
        // product of two reflections along adjacent simple roots has order 3
        let r0 = s.weyl.reflection_elements[0];
        let order3 = s
            .weyl
            .positive_roots
            .iter()
            .enumerate()
            .find_map(|(k, _)| {
                let g = s.weyl.group.multiply(r0, s.weyl.reflection_elements[k]);
                let elt = s.weyl.group.element(g);
                (!elt.is_identity() && !elt.is_involution()).then_some(g)
            })
            .expect("non-involution product exists");
        let elt = s.weyl.group.element(order3);
        assert_eq!(
            permutation_m_value(&GSet::Lines, elt),
            Err(SwError::NotInvolution)
        );
        assert_eq!(matrix_m_value(elt), Err(SwError::NotInvolution));
        // the identity is accepted with m = 0
        let id = crate::weyl::GroupElement::identity();
        assert_eq!(permutation_m_value(&GSet::Lines, &id), Ok(0));
        assert_eq!(matrix_m_value(&id), Ok(0));
    }

    #[test]
    fn solver_tables_are_bit_exact() {
        assert_eq!(
            solve_p(&M_DIM6).unwrap(),
            [F2Poly::one(), F2Poly::one(), F2Poly::one(), F2Poly::one()]
        );
        assert_eq!(
            solve_p(&M_LINES).unwrap(),
            [
                poly(&[1, 3, 5]),
                poly(&[0, 6, 8]),
                poly(&[3, 7, 9]),
                poly(&[0, 4, 8]),
            ]
        );
        let all_up_to_14: Vec<usize> = (0..=14).collect();
        let p3_expected: Vec<usize> = (2..=12).chain(14..=17).collect();
        assert_eq!(
            solve_p(&M_TRIANGLES).unwrap(),
            [
                poly(&all_up_to_14),
                poly(&[2, 14, 18]),
                poly(&p3_expected),
                poly(&[12]),
            ]
        );
    }

    #[test]
    fn congruences_imply_solvability() {
        // every congruence-satisfying vector is solvable, swept over a
        // grid; the converse fails (the congruences carry strictly more
        // information than polynomiality of the quotients)
        for m1 in 0..6u64 {
            for m2 in 0..6u64 {
                for m3 in 0..8u64 {
                    for m4 in 0..16u64 {
                        let m = MVector([m1, m2, m3, m4]);
                        if m.satisfies_congruences() {
                            assert!(solve_p(&m).is_ok(), "unsolvable at {m:?}");
                        }
                    }
                }
            }
        }
        // solvable, yet m4 = 4 is not congruent to 2 m2 = 0 mod 8
        let strict = MVector([0, 0, 0, 4]);
        assert!(solve_p(&strict).is_ok());
        assert!(!strict.satisfies_congruences());
        // the canonical failure witness trips the first inexact division
        assert_eq!(
            solve_p(&MVector([1, 1, 0, 0])),
            Err(SwError::Divisibility(2))
        );
    }

    #[test]
    fn graded_pieces_of_line_class() {
        let total = total_class(&M_LINES).unwrap();
        // degree 2: e w1 + w2
        let mut expected = InvElement::zero();
        expected.coeffs[1] = CoeffRing::e_pow(1);
        expected.coeffs[2] = CoeffRing::one();
        assert_eq!(total.graded_piece(2), expected);
        // odd degrees vanish
        for d in [1usize, 3, 5, 7, 9, 11, 13] {
            assert!(total.graded_piece(d).is_zero(), "degree {d}");
        }
        assert_eq!(total.max_degree(), Some(12));
        // pieces reassemble the total
        let mut sum = InvElement::zero();
        for d in 0..=12 {
            sum = sum.add(&total.graded_piece(d));
        }
        assert_eq!(sum, total);
    }

    #[test]
    fn graded_pieces_of_triangle_class() {
        let total = total_class(&M_TRIANGLES).unwrap();
        let mut expected = InvElement::zero();
        expected.coeffs[2] = CoeffRing::e_pow(18);
        expected.coeffs[3] = CoeffRing::e_pow(17);
        assert_eq!(total.graded_piece(20), expected);
        assert_eq!(total.max_degree(), Some(20));
    }

    #[test]
    fn dim6_class_has_nothing_above_degree_four() {
        let total = total_class(&M_DIM6).unwrap();
        assert_eq!(total.max_degree(), Some(4));
    }

    #[test]
    fn line_class_factors() {
        let total = total_class(&M_LINES).unwrap();
        // (1 + e w1 + w2)(1 + e^3 w1 + w4)(1 + e^6 w2 + e^4 w4)
        let f1 = {
            let mut f = InvElement::one();
            f.coeffs[1] = CoeffRing::e_pow(1);
            f.coeffs[2] = CoeffRing::one();
            f
        };
        let f2 = {
            let mut f = InvElement::one();
            f.coeffs[1] = CoeffRing::e_pow(3);
            f.coeffs[4] = CoeffRing::one();
            f
        };
        let f3 = {
            let mut f = InvElement::one();
            f.coeffs[2] = CoeffRing::e_pow(6);
            f.coeffs[4] = CoeffRing::e_pow(4);
            f
        };
        assert_eq!(f1.mul(&f2).mul(&f3), total);
    }

    #[test]
    fn e_zero_specialization_factors() {
        // product shape against direct specialization, on the three real
        // vectors and on a sweep of congruence-satisfying vectors
        for m in [M_DIM6, M_LINES, M_TRIANGLES] {
            let total = total_class(&m).unwrap();
            assert_eq!(total.at_e_zero(), e_zero_product(&m).unwrap());
        }
        let mut checked = 0;
        for m1 in 0..8u64 {
            for m2 in (0..8u64).step_by(2) {
                for m3 in 0..8u64 {
                    for m4 in (0..16u64).step_by(4) {
                        let m = MVector([m1, m2, m3, m4]);
                        if !m.satisfies_congruences() {
                            continue;
                        }
                        let total = total_class(&m).unwrap();
                        assert_eq!(total.at_e_zero(), e_zero_product(&m).unwrap(), "{m:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 20);
        // expected shapes
        let lines = total_class(&M_LINES).unwrap().at_e_zero();
        let w = InvElement::basis;
        let one = InvElement::one();
        assert_eq!(lines, one.add(&w(2)).mul(&one.add(&w(4))));
        let dim6 = total_class(&M_DIM6).unwrap().at_e_zero();
        let mut sum = one.clone();
        for k in 1..=4 {
            sum = sum.add(&w(k));
        }
        assert_eq!(dim6, sum);
        assert_eq!(e_zero_product(&MVector([1, 1, 0, 0])), Err(SwError::Congruence));
    }

    #[test]
    fn trace_form_classes() {
        // lines: no degree-1 piece, class unchanged
        let lines = total_class(&M_LINES).unwrap();
        assert_eq!(trace_form_class(&lines), lines);
        // triangles: gains exactly t w1
        let triangles = total_class(&M_TRIANGLES).unwrap();
        let kahn = trace_form_class(&triangles);
        let mut t_w1 = InvElement::zero();
        t_w1.coeffs[1] = CoeffRing::t();
        assert_eq!(kahn, triangles.add(&t_w1));
        // the dim-6 class has e-free terms in both odd degrees (on w1 and
        // w3), so its correction is t(w1 + w3)
        let dim6 = total_class(&M_DIM6).unwrap();
        let mut t_w1_w3 = t_w1.clone();
        t_w1_w3.coeffs[3] = CoeffRing::t();
        assert_eq!(trace_form_class(&dim6), dim6.add(&t_w1_w3));
    }

    #[test]
    fn hcprime_ring_relations() {
        let x1 = HCPrimeElement::monomial(0b0001);
        let x12 = HCPrimeElement::monomial(0b0011);
        // x1^2 = x1 y
        let mut x1y = HCPrimeElement::zero();
        x1y.slots[0b0001] = poly(&[1]);
        assert_eq!(x1.mul(&x1), x1y);
        // z^2 = z y^d for z = x1 x2 (d = 2)
        let mut sq = HCPrimeElement::zero();
        sq.slots[0b0011] = poly(&[2]);
        assert_eq!(x12.mul(&x12), sq);
        // one-variable substitution rule: x^n p(x) = x^n p(y) for n >= 1,
        // with p(x) meaning powers of a single variable
        let x = &x1;
        let pow = |n: usize| -> HCPrimeElement {
            let mut out = HCPrimeElement::one();
            for _ in 0..n {
                out = out.mul(x);
            }
            out
        };
        for n in 1..5usize {
            for p_exps in [vec![0, 1], vec![2], vec![0, 1, 3]] {
                // x^n * p(x)
                let mut lhs = HCPrimeElement::zero();
                for &j in &p_exps {
                    lhs = lhs.add(&pow(n + j));
                }
                // x^n * p(y)
                let mut rhs = HCPrimeElement::zero();
                for &j in &p_exps {
                    let mut term = pow(n);
                    for slot in term.slots.iter_mut() {
                        *slot = slot.shifted_up(j);
                    }
                    rhs = rhs.add(&term);
                }
                assert_eq!(lhs, rhs, "n = {n}, p = {p_exps:?}");
            }
        }
    }

    #[test]
    fn extraction_requires_symmetry_and_unit() {
        // a single pair subset is not symmetric
        let lopsided = hcprime_total_class(&[0b0011]);
        assert_eq!(symmetric_extract_p(&lopsided), Err(SwError::Symmetry));
        // symmetric but with empty slot zeroed
        let mut no_unit = hcprime_total_class(&[]);
        no_unit.slots[0] = F2Poly::zero();
        assert_eq!(symmetric_extract_p(&no_unit), Err(SwError::Basis));
    }

    fn size_class_multiset(mults: [usize; 4]) -> Vec<u8> {
        let mut masks = Vec::new();
        for mask in 1u8..16 {
            let size = mask.count_ones() as usize;
            for _ in 0..mults[size - 1] {
                masks.push(mask);
            }
        }
        masks
    }

    #[test]
    fn interpolation_matches_solver_on_seeded_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let mults: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..3));
            let masks = size_class_multiset(mults);
            let total = hcprime_total_class(&masks);
            let extracted = symmetric_extract_p(&total)
                .unwrap_or_else(|e| panic!("trial {trial} ({mults:?}): {e}"));
            let m = m_vector_from_masks(masks.iter().copied());
            assert!(m.satisfies_congruences(), "trial {trial}: {m:?}");
            let solved = solve_p(&m).unwrap();
            assert_eq!(extracted, solved, "trial {trial} ({mults:?})");
        }
    }

    #[test]
    fn interpolation_simple_cases() {
        // four singletons reproduce the dim-6 table
        let singles = hcprime_total_class(&[1, 2, 4, 8]);
        assert_eq!(
            symmetric_extract_p(&singles).unwrap(),
            solve_p(&M_DIM6).unwrap()
        );
        // all six pairs
        let pairs = hcprime_total_class(&[3, 5, 9, 6, 10, 12]);
        let m = m_vector_from_masks([3u8, 5, 9, 6, 10, 12]);
        assert_eq!(m, MVector([3, 4, 3, 0]));
        assert_eq!(symmetric_extract_p(&pairs).unwrap(), solve_p(&m).unwrap());
    }
}
