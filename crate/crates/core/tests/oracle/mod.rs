//! Reference implementations used only by tests. Nothing here calls into the
//! library's numeric code: gates are rebuilt from their textbook matrices,
//! operators are formed as explicit Kronecker products, eigenvalues come from
//! cyclic Jacobi rotations and SVM duals from active-set enumeration.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C;
use qkdefect_core::circuit::Gate;

pub type Dense = Vec<Vec<C>>;

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

pub fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|r| (0..dim).map(|c| if r == c { ONE } else { ZERO }).collect())
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![ZERO; n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|r| (0..n).map(|c| a[c][r].conj()).collect())
        .collect()
}

fn m2(a: C, b: C, c: C, d: C) -> Dense {
    vec![vec![a, b], vec![c, d]]
}

pub fn h() -> Dense {
    let s = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    m2(s, s, s, -s)
}

pub fn x() -> Dense {
    m2(ZERO, ONE, ONE, ZERO)
}

pub fn y() -> Dense {
    m2(ZERO, C::new(0.0, -1.0), C::new(0.0, 1.0), ZERO)
}

pub fn z() -> Dense {
    m2(ONE, ZERO, ZERO, -ONE)
}

/// `exp(-i t X / 2) = cos(t/2) I - i sin(t/2) X`
pub fn rx(t: f64) -> Dense {
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    m2(
        C::new(c, 0.0),
        C::new(0.0, -s),
        C::new(0.0, -s),
        C::new(c, 0.0),
    )
}

/// `exp(-i t Z / 2)`
pub fn rz(t: f64) -> Dense {
    m2(
        C::from_polar(1.0, -t / 2.0),
        ZERO,
        ZERO,
        C::from_polar(1.0, t / 2.0),
    )
}

fn proj(bit: usize) -> Dense {
    if bit == 0 {
        m2(ONE, ZERO, ZERO, ZERO)
    } else {
        m2(ZERO, ZERO, ZERO, ONE)
    }
}

/// Kronecker chain over `n` qubits with `ops[q]` on qubit `q` (identity where
/// absent). Qubit 0 is the least significant bit of the basis index, so it is
/// the rightmost factor.
pub fn chain(n: usize, ops: &[(usize, Dense)]) -> Dense {
    let mut out = vec![vec![ONE]];
    for q in (0..n).rev() {
        let factor = ops
            .iter()
            .find(|(k, _)| *k == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| identity(2));
        out = kron(&out, &factor);
    }
    out
}

pub fn embed_1q(n: usize, q: usize, g: Dense) -> Dense {
    chain(n, &[(q, g)])
}

/// `|0><0|_c (x) I + |1><1|_c (x) U_t`
pub fn controlled(n: usize, c: usize, t: usize, u: Dense) -> Dense {
    add(
        &chain(n, &[(c, proj(0))]),
        &chain(n, &[(c, proj(1)), (t, u)]),
    )
}

/// `exp(-i phi Z_i Z_j)` as a diagonal built from the computational-basis
/// eigenvalues of `Z_i Z_j`.
pub fn zz_phase(n: usize, i: usize, j: usize, phi: f64) -> Dense {
    let dim = 1 << n;
    let mut out = vec![vec![ZERO; dim]; dim];
    for (b, row) in out.iter_mut().enumerate() {
        let si = if b >> i & 1 == 0 { 1.0 } else { -1.0 };
        let sj = if b >> j & 1 == 0 { 1.0 } else { -1.0 };
        row[b] = C::from_polar(1.0, -phi * si * sj);
    }
    out
}

pub fn gate_unitary(n: usize, g: &Gate) -> Dense {
    match *g {
        Gate::H(q) => embed_1q(n, q, h()),
        Gate::X(q) => embed_1q(n, q, x()),
        Gate::Y(q) => embed_1q(n, q, y()),
        Gate::Z(q) => embed_1q(n, q, z()),
        Gate::Rx(q, t) => embed_1q(n, q, rx(t)),
        Gate::Rz(q, t) => embed_1q(n, q, rz(t)),
        Gate::Cnot(c, t) => controlled(n, c, t, x()),
        Gate::Cz(c, t) => controlled(n, c, t, z()),
        Gate::Cphase(c, t, th) => controlled(n, c, t, m2(ONE, ZERO, ZERO, C::from_polar(1.0, th))),
    }
}

/// Product of the gate unitaries, first gate rightmost.
pub fn circuit_unitary<'a>(n: usize, gates: impl IntoIterator<Item = &'a Gate>) -> Dense {
    gates
        .into_iter()
        .fold(identity(1 << n), |acc, g| matmul(&gate_unitary(n, g), &acc))
}

pub fn angle_unitary(x: &[f64]) -> Dense {
    let ops: Vec<(usize, Dense)> = x.iter().enumerate().map(|(q, &t)| (q, rx(t))).collect();
    chain(x.len(), &ops)
}

/// Layers of `H^n`, `prod_i RZ_i(2 x_i)`, `prod_{(i,j)} exp(-i x_i x_j Z_i Z_j)`.
pub fn iqp_unitary(x: &[f64], depth: usize, pairs: &[(usize, usize)]) -> Dense {
    let n = x.len();
    let hs: Vec<(usize, Dense)> = (0..n).map(|q| (q, h())).collect();
    let rzs: Vec<(usize, Dense)> = x
        .iter()
        .enumerate()
        .map(|(q, &t)| (q, rz(2.0 * t)))
        .collect();
    let mut layer = matmul(&chain(n, &rzs), &chain(n, &hs));
    for &(i, j) in pairs {
        layer = matmul(&zz_phase(n, i, j, x[i] * x[j]), &layer);
    }
    (0..depth).fold(identity(1 << n), |acc, _| matmul(&layer, &acc))
}

/// `|<0| Uz^dagger Ux |0>|^2` from the first columns.
pub fn fidelity(ux: &Dense, uz: &Dense) -> f64 {
    ux.iter()
        .zip(uz)
        .map(|(a, b)| b[0].conj() * a[0])
        .sum::<C>()
        .norm_sqr()
}

pub fn apply(u: &Dense, v: &[C]) -> Vec<C> {
    u.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn zero_state(n: usize) -> Vec<C> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

/// Closed form of the angle kernel, `prod_i cos^2((x_i - z_i) / 2)`.
pub fn angle_kernel_closed_form(x: &[f64], z: &[f64]) -> f64 {
    x.iter()
        .zip(z)
        .map(|(a, b)| ((a - b) / 2.0).cos().powi(2))
        .product()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi, ascending.
pub fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `sum a - 1/2 sum_ij y_i y_j a_i a_j K_ij`
pub fn dual_value(k: &[Vec<f64>], y: &[f64], a: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += y[i] * y[j] * a[i] * a[j] * k[i][j];
        }
    }
    a.iter().sum::<f64>() - 0.5 * quad
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
    pub bias: f64,
}

/// Global optimum of the SVM dual by enumerating which multipliers sit at 0,
/// at `c`, or strictly between (3^t cases). For each case the free block
/// solves the stationarity conditions with the equality constraint; the best
/// feasible case wins. The bias is the mean of `y_i - sum_j a_j y_j K_ij`
/// over free multipliers, or the midpoint of the feasible interval if none
/// are free.
pub fn brute_force_svm(k: &[Vec<f64>], y: &[f64], c: f64) -> QpSolution {
    let t = y.len();
    assert!(t <= 10, "enumeration is exponential");
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut state = vec![0u8; t];
    loop {
        if let Some(a) = candidate(k, y, c, &state) {
            let v = dual_value(k, y, &a);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, a));
            }
        }
        // next state in base 3
        let mut i = 0;
        while i < t && state[i] == 2 {
            state[i] = 0;
            i += 1;
        }
        if i == t {
            break;
        }
        state[i] += 1;
    }
    let (objective, alphas) = best.expect("alpha = 0 is always feasible");
    let grad: Vec<f64> = (0..t)
        .map(|i| y[i] - (0..t).map(|j| alphas[j] * y[j] * k[i][j]).sum::<f64>())
        .collect();
    let eps = 1e-8 * c.max(1.0);
    let free: Vec<usize> = (0..t)
        .filter(|&i| alphas[i] > eps && alphas[i] < c - eps)
        .collect();
    let bias = if !free.is_empty() {
        free.iter().map(|&i| grad[i]).sum::<f64>() / free.len() as f64
    } else {
        // b must satisfy y_i f_i >= 1 at a = 0 and <= 1 at a = c
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..t {
            let at_zero = alphas[i] <= eps;
            if (y[i] > 0.0) == at_zero {
                lo = lo.max(grad[i]);
            } else {
                hi = hi.min(grad[i]);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        }
    };
    QpSolution {
        alphas,
        objective,
        bias,
    }
}

fn candidate(k: &[Vec<f64>], y: &[f64], c: f64, state: &[u8]) -> Option<Vec<f64>> {
    let t = y.len();
    let free: Vec<usize> = (0..t).filter(|&i| state[i] == 2).collect();
    let mut a: Vec<f64> = state
        .iter()
        .map(|&s| if s == 1 { c } else { 0.0 })
        .collect();
    let fixed_sum: f64 = (0..t).filter(|&i| state[i] != 2).map(|i| y[i] * a[i]).sum();
    if free.is_empty() {
        return (fixed_sum.abs() < 1e-12).then_some(a);
    }
    // [Q_FF  y_F] [a_F]   [1 - Q_FB a_B]
    // [y_F^T  0 ] [nu ] = [ -y_B^T a_B ]
    let m = free.len();
    let mut mat = vec![vec![0.0; m + 1]; m + 1];
    let mut rhs = vec![0.0; m + 1];
    for (r, &i) in free.iter().enumerate() {
        for (s, &j) in free.iter().enumerate() {
            mat[r][s] = y[i] * y[j] * k[i][j];
        }
        mat[r][m] = y[i];
        mat[m][r] = y[i];
        rhs[r] = 1.0
            - (0..t)
                .filter(|&j| state[j] != 2)
                .map(|j| y[i] * y[j] * k[i][j] * a[j])
                .sum::<f64>();
    }
    rhs[m] = -fixed_sum;
    let sol = solve(mat, rhs)?;
    for (r, &i) in free.iter().enumerate() {
        if sol[r] < -1e-12 || sol[r] > c + 1e-12 {
            return None;
        }
        a[i] = sol[r].clamp(0.0, c);
    }
    Some(a)
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).exp()
}
