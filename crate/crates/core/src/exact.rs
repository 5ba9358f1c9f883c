//! Small exact linear algebra helpers: integer determinants and adjugates,
//! rational elimination, and symmetric diagonalization of Gram matrices.

use num_rational::Ratio;

/// Exact rational scalar used throughout. i128 keeps every intermediate
/// value in this crate far from overflow (matrix entries stay below 10^3).
pub type Rat = Ratio<i128>;

/// Rational zero.
pub fn rat(n: i128) -> Rat {
    Ratio::from_integer(n)
}

/// Determinant of a square integer matrix by fraction-free Bareiss elimination.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Adjugate of a square integer matrix: adj(A)[i][j] = cofactor C_ji,
/// so that A * adj(A) = det(A) * I.
pub fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            // minor with row j and column i removed
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * det_i128(&minor);
        }
    }
    adj
}

/// Product of two rational matrices.
pub fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    assert!(a.iter().all(|r| r.len() == k));
    let mut out = vec![vec![rat(0); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != rat(0) {
                for j in 0..m {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

/// Rational identity matrix.
pub fn mat_identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n)
        .map(|i| (0..n).map(|j| rat((i == j) as i128)).collect())
        .collect()
}

/// Transpose.
pub fn mat_transpose(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Lift an integer matrix to rationals.
pub fn mat_from_i64(a: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    a.iter()
        .map(|r| r.iter().map(|&x| rat(x as i128)).collect())
        .collect()
}

/// Basis of the column space of a rational matrix, returned as columns.
/// Deterministic: Gaussian elimination keeps the earliest independent columns.
pub fn column_space_basis(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let cols = a[0].len();
    let mut work: Vec<Vec<Rat>> = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| work[i][c] != rat(0)) else {
            continue;
        };
        work.swap(r, pr);
        let inv = work[r][c];
        for j in 0..cols {
            work[r][j] /= inv;
        }
        for i in 0..rows {
            if i != r && work[i][c] != rat(0) {
                let f = work[i][c];
                for j in 0..cols {
                    let sub = f * work[r][j];
                    work[i][j] -= sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivot_cols
        .into_iter()
        .map(|c| (0..rows).map(|i| a[i][c]).collect())
        .collect()
}

/// Diagonalize a symmetric rational matrix by simultaneous row/column
/// operations, returning the diagonal entries (zeros included for a
/// degenerate input). Pivot rule: smallest-index nonzero diagonal entry is
/// swapped into place; if the whole remaining diagonal vanishes but the
/// block is nonzero, a row+column addition creates a nonzero diagonal entry.
pub fn symmetric_diagonalize(gram: &[Vec<Rat>]) -> Vec<Rat> {
    let n = gram.len();
    assert!(gram.iter().all(|r| r.len() == n), "matrix must be square");
    for i in 0..n {
        for j in 0..n {
            assert_eq!(gram[i][j], gram[j][i], "matrix must be symmetric");
        }
    }
    let mut g: Vec<Vec<Rat>> = gram.to_vec();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if g[k][k] == rat(0) {
            if let Some(s) = (k + 1..n).find(|&i| g[i][i] != rat(0)) {
                g.swap(k, s);
                for row in g.iter_mut() {
                    row.swap(k, s);
                }
            } else if let Some((i, j)) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| g[i][j] != rat(0))
            {
                // whole remaining diagonal is zero: fold column j into column i
                for r in 0..n {
                    let add = g[r][j];
                    g[r][i] += add;
                }
                for c in 0..n {
                    let add = g[j][c];
                    g[i][c] += add;
                }
                if i != k {
                    g.swap(k, i);
                    for row in g.iter_mut() {
                        row.swap(k, i);
                    }
                }
            } else {
                // remaining block is identically zero
                for _ in k..n {
                    diag.push(rat(0));
                }
                break;
            }
        }
        let pivot = g[k][k];
        diag.push(pivot);
        for i in k + 1..n {
            if g[i][k] != rat(0) {
                let f = g[i][k] / pivot;
                for j in k..n {
                    let sub = f * g[k][j];
                    g[i][j] -= sub;
                }
                for j in k..n {
                    let sub = f * g[j][k];
                    g[j][i] -= sub;
                }
            }
        }
    }
    diag
}
