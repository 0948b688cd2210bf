//! Dense state-vector simulation.
//!
//! Amplitudes are stored little-endian: bit `k` of a basis index is the value
//! of qubit `k`. Gates are applied in place with strided index arithmetic; the
//! full `2^n x 2^n` operator is never built.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{arg_err, Error, Result};
use crate::rng;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2x2 or 4x4 unitary.
///
/// For two-qubit gates the local basis index is `2 * b_first + b_second`,
/// where `b_first` is the bit of the first qubit passed to
/// [`StateVector::apply_2q`] (the control, for controlled gates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One([[Complex64; 2]; 2]),
    Two([[Complex64; 4]; 4]),
}

impl GateMatrix {
    pub fn h() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        GateMatrix::One([[s, s], [s, -s]])
    }

    pub fn x() -> Self {
        GateMatrix::One([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> Self {
        GateMatrix::One([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> Self {
        GateMatrix::One([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `exp(-i theta X / 2)`.
    pub fn rx(theta: f64) -> Self {
        let c = Complex64::new(libm::cos(theta / 2.0), 0.0);
        let s = Complex64::new(0.0, -libm::sin(theta / 2.0));
        GateMatrix::One([[c, s], [s, c]])
    }

    /// `exp(-i theta Z / 2)`.
    pub fn rz(theta: f64) -> Self {
        let half = theta / 2.0;
        GateMatrix::One([
            [Complex64::new(libm::cos(half), -libm::sin(half)), ZERO],
            [ZERO, Complex64::new(libm::cos(half), libm::sin(half))],
        ])
    }

    pub fn cnot() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][1] = ONE;
        m[2][3] = ONE;
        m[3][2] = ONE;
        GateMatrix::Two(m)
    }

    pub fn cz() -> Self {
        Self::diag4([ONE, ONE, ONE, -ONE])
    }

    /// `diag(1, 1, 1, e^{i theta})`.
    pub fn cphase(theta: f64) -> Self {
        Self::diag4([ONE, ONE, ONE, Complex64::from_polar(1.0, theta)])
    }

    fn diag4(d: [Complex64; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, v) in d.into_iter().enumerate() {
            m[k][k] = v;
        }
        GateMatrix::Two(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::One(_) => 2,
            GateMatrix::Two(_) => 4,
        }
    }

    /// Entry `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        match self {
            GateMatrix::One(m) => m[r][c],
            GateMatrix::Two(m) => m[r][c],
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        match self {
            GateMatrix::One(m) => {
                let mut out = [[ZERO; 2]; 2];
                for (r, row) in out.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = m[c][r].conj();
                    }
                }
                GateMatrix::One(out)
            }
            GateMatrix::Two(m) => {
                let mut out = [[ZERO; 4]; 4];
                for (r, row) in out.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = m[c][r].conj();
                    }
                }
                GateMatrix::Two(out)
            }
        }
    }

    /// Matrix product `self * rhs` for two one-qubit gates.
    pub fn compose_1q(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        match (self, rhs) {
            (GateMatrix::One(a), GateMatrix::One(b)) => {
                let mut out = [[ZERO; 2]; 2];
                for (r, row) in out.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
                    }
                }
                Ok(GateMatrix::One(out))
            }
            _ => Err(arg_err!("compose_1q needs two 2x2 matrices")),
        }
    }

    /// `M^dagger M == I` elementwise within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| {
            (0..d).all(|c| {
                let s: Complex64 = (0..d).map(|k| self.get(k, r).conj() * self.get(k, c)).sum();
                let target = if r == c { ONE } else { ZERO };
                (s - target).norm() <= tol
            })
        })
    }

    fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.get(r, c) == ZERO))
    }
}

/// Dense amplitudes of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(arg_err!("amplitude count {len} is not a power of two >= 2"));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_capacity(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(arg_err!(
                "register sizes differ: {} vs {}",
                self.n_qubits,
                other.n_qubits
            ));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(arg_err!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            ));
        }
        Ok(())
    }

    /// Applies a 2x2 gate to qubit `q`.
    pub fn apply_1q(&mut self, gate: &GateMatrix, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let m = match gate {
            GateMatrix::One(m) => m,
            GateMatrix::Two(_) => return Err(arg_err!("apply_1q needs a 2x2 gate")),
        };
        let stride = 1usize << q;
        if gate.is_diagonal() {
            let (d0, d1) = (m[0][0], m[1][1]);
            for block in self.amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                lo.iter_mut().for_each(|a| *a *= d0);
                hi.iter_mut().for_each(|a| *a *= d1);
            }
            return Ok(());
        }
        let [[m00, m01], [m10, m11]] = *m;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m00 * x + m01 * y;
                *b = m10 * x + m11 * y;
            }
        }
        Ok(())
    }

    /// Applies a 4x4 gate to the ordered pair `(q_first, q_second)`.
    pub fn apply_2q(&mut self, gate: &GateMatrix, q_first: usize, q_second: usize) -> Result<()> {
        self.check_qubit(q_first)?;
        self.check_qubit(q_second)?;
        if q_first == q_second {
            return Err(arg_err!("two-qubit gate on repeated qubit {q_first}"));
        }
        let m = match gate {
            GateMatrix::Two(m) => m,
            GateMatrix::One(_) => return Err(arg_err!("apply_2q needs a 4x4 gate")),
        };
        let bit_f = 1usize << q_first;
        let bit_s = 1usize << q_second;
        let (low, high) = if q_first < q_second {
            (q_first, q_second)
        } else {
            (q_second, q_first)
        };
        let groups = self.amps.len() >> 2;
        let diagonal = gate.is_diagonal();
        for g in 0..groups {
            // insert zero bits at positions `low` and `high`
            let mut base = g;
            base = ((base >> low) << (low + 1)) | (base & ((1 << low) - 1));
            base = ((base >> high) << (high + 1)) | (base & ((1 << high) - 1));
            let idx = [base, base | bit_s, base | bit_f, base | bit_f | bit_s];
            if diagonal {
                for (k, &i) in idx.iter().enumerate() {
                    self.amps[i] *= m[k][k];
                }
                continue;
            }
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
        Ok(())
    }

    /// Probability of reading out `|0...0>`.
    pub fn prob_all_zeros(&self) -> f64 {
        self.amps[0].norm_sqr()
    }

    /// Number of all-zeros outcomes in `shots` independent readouts.
    pub fn sample_all_zeros(&self, shots: u64, seed: u64) -> Result<u64> {
        if shots == 0 {
            return Err(arg_err!("shots must be >= 1"));
        }
        let p = self.prob_all_zeros();
        let mut rng = rng::readout_stream(seed);
        Ok((0..shots).filter(|_| rng.random::<f64>() < p).count() as u64)
    }
}
