//! Exact quadratic-form arithmetic over the rationals.
//!
//! Forms are kept in diagonal shape with entries reduced to signed
//! squarefree integers (square classes). Classification over Q is decided
//! from rank, discriminant, real signature, and Hasse symbols at the
//! finitely many relevant primes; the same local data drives the isotropy
//! test. The module also provides lambda powers (exterior powers of
//! diagonal forms), trace forms of multiquadratic etale algebras, and the
//! splitting of an equivariant form into character components under four
//! commuting involutions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

use crate::exact::{column_space_basis, mat_identity, mat_mul, rat, symmetric_diagonalize, Rat};

/// Errors from quadratic-form constructions.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum QFormError {
    #[error("square classes and form entries must be nonzero")]
    ZeroEntry,
    #[error("square class magnitude {0} does not fit the supported range")]
    Overflow(i128),
    #[error("lambda power {k} is out of range for a rank-{rank} form")]
    LambdaOutOfRange { k: usize, rank: usize },
    #[error("matrix inputs must be square, symmetric, and of matching size")]
    MalformedMatrix,
    #[error("matrix is not an involution")]
    NotAnInvolution,
    #[error("the involutions do not commute")]
    NonCommuting,
    #[error("matrix does not preserve the bilinear form")]
    GramNotPreserved,
    #[error("character components are not pairwise orthogonal")]
    NonOrthogonalComponents,
    #[error("character components do not span the whole space")]
    IncompleteDecomposition,
    #[error("bilinear form is degenerate")]
    Degenerate,
}

/// A nonzero rational square class, stored as its unique signed squarefree
/// integer representative.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SquareClass(i64);

impl SquareClass {
    pub const ONE: SquareClass = SquareClass(1);
    pub const MINUS_ONE: SquareClass = SquareClass(-1);
    pub const TWO: SquareClass = SquareClass(2);

    /// Reduce a nonzero integer to its square class.
    pub fn new(n: i64) -> Result<Self, QFormError> {
        Self::from_i128(i128::from(n))
    }

    /// Square class of a nonzero rational (a/b and ab agree up to squares).
    pub fn from_rat(r: Rat) -> Result<Self, QFormError> {
        Self::from_i128(r.numer() * r.denom())
    }

    fn from_i128(n: i128) -> Result<Self, QFormError> {
        if n == 0 {
            return Err(QFormError::ZeroEntry);
        }
        let mut m = n.unsigned_abs();
        let mut out: i128 = if n < 0 { -1 } else { 1 };
        let mut d: u128 = 2;
        while d * d <= m {
            if m % d == 0 {
                let mut e = 0u32;
                while m % d == 0 {
                    m /= d;
                    e += 1;
                }
                if e % 2 == 1 {
                    out *= d as i128;
                }
            }
            d += 1;
        }
        out *= m as i128;
        i64::try_from(out)
            .map(SquareClass)
            .map_err(|_| QFormError::Overflow(out))
    }

    /// The signed squarefree representative.
    pub fn value(self) -> i64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Odd primes dividing the representative.
    pub fn odd_prime_support(self) -> Vec<u64> {
        let mut m = self.0.unsigned_abs();
        let mut out = Vec::new();
        while m % 2 == 0 {
            m /= 2;
        }
        let mut d = 3u64;
        while d * d <= m {
            if m % d == 0 {
                out.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 2;
        }
        if m > 1 {
            out.push(m);
        }
        out
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: SquareClass) -> SquareClass {
        SquareClass::from_i128(i128::from(self.0) * i128::from(rhs.0))
            .expect("product of nonzero square classes stays nonzero and in range")
    }
}

impl std::iter::Product for SquareClass {
    fn product<I: Iterator<Item = SquareClass>>(iter: I) -> Self {
        iter.fold(SquareClass::ONE, |acc, c| acc * c)
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of Q: the real place or a finite prime.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "oo"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn modpow(mut base: u128, mut exp: u128, modulus: u128) -> u128 {
    let mut acc = 1u128;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol (a|p) for an odd prime p and a prime to p.
pub fn legendre_symbol(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2 && p % 2 == 1, "p must be an odd prime");
    let a_mod = a.rem_euclid(p as i64) as u128;
    assert!(a_mod != 0, "legendre symbol requires a unit argument");
    if modpow(a_mod, u128::from((p - 1) / 2), u128::from(p)) == 1 {
        1
    } else {
        -1
    }
}

/// p-adic valuation (reduced mod 2) and remaining unit part.
fn split_valuation(n: i64, p: u64) -> (u32, i64) {
    let mut u = n;
    let mut v = 0u32;
    let p = p as i64;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    (v % 2, u)
}

fn eps2(u: i64) -> u32 {
    debug_assert!(u % 2 != 0);
    u32::from(u.rem_euclid(4) == 3)
}

fn omega2(u: i64) -> u32 {
    debug_assert!(u % 2 != 0);
    let r = u.rem_euclid(8);
    u32::from(r == 3 || r == 5)
}

/// Hilbert symbol (a, b) at a place of Q, valued in {+1, -1}.
///
/// At the real place the symbol is -1 exactly when both classes are
/// negative. At an odd prime p, writing a = p^alpha u and b = p^beta v with
/// u, v prime to p, the symbol is (-1|p)^(alpha beta) (u|p)^beta (v|p)^alpha.
/// At p = 2, writing a = 2^alpha u and b = 2^beta v with u, v odd, it is
/// (-1)^(eps(u) eps(v) + alpha omega(v) + beta omega(u)) where
/// eps(u) = (u - 1)/2 and omega(u) = (u^2 - 1)/8 taken mod 2.
pub fn hilbert_symbol(a: SquareClass, b: SquareClass, place: Place) -> i8 {
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(a.value(), 2);
            let (beta, v) = split_valuation(b.value(), 2);
            let exp = eps2(u) * eps2(v) + alpha * omega2(v) + beta * omega2(u);
            if exp % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(a.value(), p);
            let (beta, v) = split_valuation(b.value(), p);
            let mut s = 1i8;
            if alpha == 1 && beta == 1 {
                s *= legendre_symbol(-1, p);
            }
            if beta == 1 {
                s *= legendre_symbol(u, p);
            }
            if alpha == 1 {
                s *= legendre_symbol(v, p);
            }
            s
        }
    }
}

/// Brute-force local solvability of `z^2 = a x^2 + b y^2` with `(x, y, z)`
/// not all zero, decided independently of `hilbert_symbol` so the two can
/// be checked against each other.
///
/// At the real place this is `a > 0 or b > 0`. At a finite prime the
/// search runs over `Z/p^k` with `(x, y, z)` not all divisible by `p`, for
/// `k = 3` (odd `p`) or `k = 5` (`p = 2`): for squarefree `a` and `b` a
/// primitive solution at that precision lifts p-adically (the relevant
/// partial derivative `2ax`, `2by`, or `-2z` has valuation at most 2, so
/// Newton's lemma applies), and conversely any p-adic solution scales to a
/// primitive one, so the search decides solvability exactly.
pub fn local_solvability_oracle(a: SquareClass, b: SquareClass, place: Place) -> bool {
    let p = match place {
        Place::Infinity => return a.value() > 0 || b.value() > 0,
        Place::Prime(p) => p,
    };
    let k = if p == 2 { 5 } else { 3 };
    let m = (p as usize).pow(k);
    let p = p as usize;
    let mut sq_any = vec![false; m];
    let mut sq_unit = vec![false; m];
    for z in 0..m {
        let v = z * z % m;
        sq_any[v] = true;
        if z % p != 0 {
            sq_unit[v] = true;
        }
    }
    let am = a.value().rem_euclid(m as i64) as usize;
    let bm = b.value().rem_euclid(m as i64) as usize;
    let mut rhs_any = vec![false; m];
    let mut rhs_unit = vec![false; m];
    for x in 0..m {
        let ax = am * x % m * x % m;
        for y in 0..m {
            let v = (ax + bm * y % m * y) % m;
            rhs_any[v] = true;
            if x % p != 0 || y % p != 0 {
                rhs_unit[v] = true;
            }
        }
    }
    (0..m).any(|v| (sq_unit[v] && rhs_any[v]) || (sq_any[v] && rhs_unit[v]))
}

/// Whether a square class becomes a square in the completion at a place.
pub fn is_local_square(d: SquareClass, place: Place) -> bool {
    match place {
        Place::Infinity => d.value() > 0,
        Place::Prime(2) => d.value().rem_euclid(8) == 1,
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(d.value(), p);
            alpha == 0 && legendre_symbol(u, p) == 1
        }
    }
}

/// Classifying local data of a diagonal form: rank, discriminant class,
/// real signature, and the Hasse symbols at the form's relevant primes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WittInvariants {
    pub rank: usize,
    pub disc: SquareClass,
    pub signature: (usize, usize),
    pub hasse: BTreeMap<u64, i8>,
}

/// A nondegenerate quadratic form over Q in diagonal shape; entries are the
/// square classes of the diagonal Gram coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiagonalForm(Vec<SquareClass>);

impl DiagonalForm {
    pub fn new(entries: Vec<SquareClass>) -> Self {
        DiagonalForm(entries)
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self, QFormError> {
        entries
            .iter()
            .map(|&n| SquareClass::new(n))
            .collect::<Result<Vec<_>, _>>()
            .map(DiagonalForm)
    }

    /// The form <1, 1, ..., 1> of the given rank.
    pub fn unit(rank: usize) -> Self {
        DiagonalForm(vec![SquareClass::ONE; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[SquareClass] {
        &self.0
    }

    /// Orthogonal direct sum.
    pub fn orthogonal_sum(&self, other: &DiagonalForm) -> DiagonalForm {
        let mut entries = self.0.clone();
        entries.extend_from_slice(&other.0);
        DiagonalForm(entries)
    }

    /// Tensor product (all pairwise entry products, left-major order).
    pub fn tensor(&self, other: &DiagonalForm) -> DiagonalForm {
        let mut entries = Vec::with_capacity(self.0.len() * other.0.len());
        for &a in &self.0 {
            for &b in &other.0 {
                entries.push(a * b);
            }
        }
        DiagonalForm(entries)
    }

    /// Scale every entry by a square class.
    pub fn scale(&self, c: SquareClass) -> DiagonalForm {
        DiagonalForm(self.0.iter().map(|&a| a * c).collect())
    }

    /// Lambda power: entry products over all k-element subsets in
    /// lexicographic order. Defined for 1 <= k <= rank.
    pub fn lambda(&self, k: usize) -> Result<DiagonalForm, QFormError> {
        let n = self.0.len();
        if k == 0 || k > n {
            return Err(QFormError::LambdaOutOfRange { k, rank: n });
        }
        let mut entries = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            entries.push(idx.iter().map(|&i| self.0[i]).product());
            // advance to the next k-subset in lexicographic order
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                if idx[pos] != pos + n - k {
                    idx[pos] += 1;
                    for j in pos + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if pos == 0 {
                    return Ok(DiagonalForm(entries));
                }
            }
        }
    }

    /// Discriminant: the square class of the product of the entries.
    pub fn disc(&self) -> SquareClass {
        self.0.iter().copied().product()
    }

    /// Real signature (positive count, negative count).
    pub fn signature(&self) -> (usize, usize) {
        let neg = self.0.iter().filter(|c| c.is_negative()).count();
        (self.0.len() - neg, neg)
    }

    pub fn is_indefinite(&self) -> bool {
        let (pos, neg) = self.signature();
        pos > 0 && neg > 0
    }

    /// 2 together with every odd prime dividing an entry.
    pub fn bad_primes(&self) -> BTreeSet<u64> {
        let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
        for &c in &self.0 {
            primes.extend(c.odd_prime_support());
        }
        primes
    }

    /// Hasse symbol: product of the Hilbert symbols (a_i, a_j) over i < j.
    pub fn hasse_at(&self, place: Place) -> i8 {
        let mut s = 1i8;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                s *= hilbert_symbol(self.0[i], self.0[j], place);
            }
        }
        s
    }

    pub fn witt_invariants(&self) -> WittInvariants {
        WittInvariants {
            rank: self.rank(),
            disc: self.disc(),
            signature: self.signature(),
            hasse: self
                .bad_primes()
                .into_iter()
                .map(|p| (p, self.hasse_at(Place::Prime(p))))
                .collect(),
        }
    }

    /// Isometry over Q: equal rank, discriminant, signature, and Hasse
    /// symbols at every prime relevant to either form. (At all remaining
    /// primes both Hasse symbols are automatically +1.)
    pub fn is_isometric(&self, other: &DiagonalForm) -> bool {
        if self.rank() != other.rank()
            || self.disc() != other.disc()
            || self.signature() != other.signature()
        {
            return false;
        }
        let mut primes = self.bad_primes();
        primes.extend(other.bad_primes());
        primes
            .into_iter()
            .all(|p| self.hasse_at(Place::Prime(p)) == other.hasse_at(Place::Prime(p)))
    }

    fn is_locally_isotropic(&self, place: Place) -> bool {
        let d = self.disc();
        match self.rank() {
            3 => {
                let target = hilbert_symbol(SquareClass::MINUS_ONE, SquareClass::MINUS_ONE * d, place);
                self.hasse_at(place) == target
            }
            4 => {
                !is_local_square(d, place)
                    || self.hasse_at(place)
                        == hilbert_symbol(SquareClass::MINUS_ONE, SquareClass::MINUS_ONE, place)
            }
            _ => unreachable!("local test is only used for ranks 3 and 4"),
        }
    }

    /// Isotropy over Q (a nontrivial rational zero), decided locally:
    /// rank 1 forms are anisotropic; rank 2 forms are isotropic exactly for
    /// discriminant -1; ranks 3 and 4 use the local criteria at the real
    /// place and the relevant primes; rank >= 5 is isotropic iff indefinite.
    pub fn is_isotropic(&self) -> bool {
        match self.rank() {
            0 | 1 => false,
            2 => self.disc() == SquareClass::MINUS_ONE,
            3 | 4 => {
                let mut places = vec![Place::Infinity];
                places.extend(self.bad_primes().into_iter().map(Place::Prime));
                places.into_iter().all(|v| self.is_locally_isotropic(v))
            }
            _ => self.is_indefinite(),
        }
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ">")
    }
}

/// Diagonalize a symmetric rational Gram matrix into a form; errors if the
/// matrix is degenerate.
pub fn diagonalize_rational(gram: &[Vec<Rat>]) -> Result<DiagonalForm, QFormError> {
    let n = gram.len();
    if gram.iter().any(|row| row.len() != n) {
        return Err(QFormError::MalformedMatrix);
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(QFormError::MalformedMatrix);
            }
        }
    }
    let diag = symmetric_diagonalize(gram);
    diag.into_iter()
        .map(|d| {
            if d == rat(0) {
                Err(QFormError::Degenerate)
            } else {
                SquareClass::from_rat(d)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(DiagonalForm)
}

/// Trace form of the multiquadratic etale algebra Q[x_1, ..., x_m] with
/// x_i^2 = b_i, a 2^m-dimensional algebra. In the monomial basis the Gram
/// matrix is diagonal with entries 2^m prod_{i in S} b_i over subsets S, so
/// the trace form is <2^m> tensor sum_S <prod_{i in S} b_i>. The returned
/// diagonalization reduces the subset products to the subgroup of square
/// classes they generate, each repeated 2^m / |subgroup| times (an isometric
/// rewriting: a doubled form absorbs <2> factors).
pub fn multiquadratic_trace_form(gens: &[SquareClass]) -> DiagonalForm {
    let m = gens.len();
    let mut subgroup = BTreeSet::from([SquareClass::ONE]);
    for &g in gens {
        let current: Vec<SquareClass> = subgroup.iter().copied().collect();
        for c in current {
            subgroup.insert(c * g);
        }
    }
    let copies = (1usize << m) / subgroup.len();
    let scale = if m % 2 == 1 {
        SquareClass::TWO
    } else {
        SquareClass::ONE
    };
    let mut entries = Vec::with_capacity(1 << m);
    for &beta in &subgroup {
        for _ in 0..copies {
            entries.push(scale * beta);
        }
    }
    DiagonalForm::new(entries)
}

/// A form split into isotypic components for the sixteen characters of an
/// elementary abelian group of order 16. Keys are 4-bit masks: bit i set
/// means the character is nontrivial on the (i+1)-th generator. Components
/// of rank zero are omitted.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CForm {
    pub components: BTreeMap<u8, DiagonalForm>,
}

impl CForm {
    pub fn rank(&self) -> usize {
        self.components.values().map(DiagonalForm::rank).sum()
    }

    pub fn component(&self, mask: u8) -> Option<&DiagonalForm> {
        self.components.get(&mask)
    }

    /// Orthogonal sum of all components, in mask order.
    pub fn total(&self) -> DiagonalForm {
        let mut out = DiagonalForm::default();
        for form in self.components.values() {
            out = out.orthogonal_sum(form);
        }
        out
    }
}

fn mat_scale(a: &[Vec<Rat>], c: Rat) -> Vec<Vec<Rat>> {
    a.iter()
        .map(|row| row.iter().map(|&x| x * c).collect())
        .collect()
}

fn mat_add(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| x + y).collect())
        .collect()
}

/// Split a G-invariant form into its character components for the group
/// generated by four commuting involutions acting on the Gram matrix's
/// underlying space. The inputs are validated (involutive, commuting, and
/// form-preserving); the component for the character with mask m is the
/// restriction of the form to the image of the projector
/// (1/16) sum_S chi_m(S) rho(S) over the sixteen subset products rho(S).
/// Distinct components must come out orthogonal and jointly spanning.
pub fn isotypic_decompose(
    gram: &[Vec<Rat>],
    involutions: &[Vec<Vec<Rat>>; 4],
) -> Result<CForm, QFormError> {
    let n = gram.len();
    if gram.iter().any(|row| row.len() != n) {
        return Err(QFormError::MalformedMatrix);
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(QFormError::MalformedMatrix);
            }
        }
    }
    let identity = mat_identity(n);
    for m in involutions {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(QFormError::MalformedMatrix);
        }
        if mat_mul(m, m) != identity {
            return Err(QFormError::NotAnInvolution);
        }
    }
    for i in 0..4 {
        for j in 0..i {
            if mat_mul(&involutions[i], &involutions[j]) != mat_mul(&involutions[j], &involutions[i]) {
                return Err(QFormError::NonCommuting);
            }
        }
    }
    let preserves = |m: &[Vec<Rat>]| -> bool {
        let mt = crate::exact::mat_transpose(m);
        mat_mul(&mat_mul(&mt, gram), m) == gram
    };
    if !involutions.iter().all(|m| preserves(m)) {
        return Err(QFormError::GramNotPreserved);
    }

    // products rho(S) over the sixteen subsets of the generators
    let mut subset_products: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(16);
    subset_products.push(identity);
    for s in 1usize..16 {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        subset_products.push(mat_mul(&subset_products[rest], &involutions[low]));
    }

    let sixteenth = Rat::new(1, 16);
    let mut bases: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(16);
    for mask in 0u8..16 {
        let mut proj = vec![vec![rat(0); n]; n];
        for (s, product) in subset_products.iter().enumerate() {
            let sign = if (mask as usize & s).count_ones() % 2 == 0 {
                sixteenth
            } else {
                -sixteenth
            };
            proj = mat_add(&proj, &mat_scale(product, sign));
        }
        bases.push(column_space_basis(&proj));
    }

    if bases.iter().map(Vec::len).sum::<usize>() != n {
        return Err(QFormError::IncompleteDecomposition);
    }

    let pair = |u: &[Rat], v: &[Rat]| -> Rat {
        let mut acc = rat(0);
        for i in 0..n {
            for j in 0..n {
                acc += u[i] * gram[i][j] * v[j];
            }
        }
        acc
    };
    for m1 in 0..16 {
        for m2 in 0..m1 {
            for u in &bases[m1] {
                for v in &bases[m2] {
                    if pair(u, v) != rat(0) {
                        return Err(QFormError::NonOrthogonalComponents);
                    }
                }
            }
        }
    }

    let mut components = BTreeMap::new();
    for (mask, basis) in bases.iter().enumerate() {
        if basis.is_empty() {
            continue;
        }
        let k = basis.len();
        let mut restricted = vec![vec![rat(0); k]; k];
        for i in 0..k {
            for j in 0..k {
                restricted[i][j] = pair(&basis[i], &basis[j]);
            }
        }
        components.insert(mask as u8, diagonalize_rational(&restricted)?);
    }
    Ok(CForm { components })
}
