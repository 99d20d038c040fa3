//! Pauli words, real-weighted Pauli sums and their matrix-free action on
//! dense state vectors.
//!
//! Basis state `|b>` carries bit `i` of `b` for qubit `i`, with
//! `Z|0> = |0>` and `Z|1> = -|1>`. A word is stored as `(x, z)` masks and
//! represents `i^{|x & z|} X^x Z^z`, so a site with both bits set is `Y`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AqcError;

/// Largest qubit count for dense state vectors.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliWord {
    pub x: u64,
    pub z: u64,
}

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn single(site: usize, p: Pauli) -> Self {
        Self::from_ops(&[(site, p)])
    }

    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        let mut w = Self::IDENTITY;
        for &(site, p) in ops {
            let bit = 1u64 << site;
            match p {
                Pauli::X => w.x ^= bit,
                Pauli::Z => w.z ^= bit,
                Pauli::Y => {
                    w.x ^= bit;
                    w.z ^= bit;
                }
            }
        }
        w
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        !parity((self.x & other.z) ^ (self.z & other.x))
    }

    /// `self * other = i^k * word`; returns `(k mod 4, word)`.
    pub fn mul(&self, other: &PauliWord) -> (u32, PauliWord) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let mut k = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            - (x & z).count_ones() as i64;
        // Moving X^{x2} left past Z^{z1}.
        k += 2 * (self.z & other.x).count_ones() as i64;
        (k.rem_euclid(4) as u32, PauliWord { x, z })
    }

    /// `<b ^ x| P |b>`.
    pub fn amplitude(&self, b: u64) -> Complex64 {
        let k = (self.x & self.z).count_ones() + 2 * (b & self.z).count_ones();
        I_POW[(k % 4) as usize]
    }
}

/// Hermitian operator `sum_j c_j P_j` with real `c_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinHamiltonian {
    pub n: usize,
    pub terms: Vec<(PauliWord, f64)>,
}

impl SpinHamiltonian {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    /// Builds from terms, merging repeated words and dropping zero weights.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliWord, f64)>) -> Result<Self, AqcError> {
        if n > 64 {
            return Err(AqcError::TooManyQubits { n, cap: 64 });
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut merged: BTreeMap<PauliWord, f64> = BTreeMap::new();
        for (w, c) in terms {
            if w.support() & !mask != 0 {
                return Err(AqcError::Invalid(format!("term acts outside {n} qubits")));
            }
            *merged.entry(w).or_insert(0.0) += c;
        }
        Ok(Self {
            n,
            terms: merged.into_iter().filter(|(_, c)| *c != 0.0).collect(),
        })
    }

    /// `sum_i Z_i`, the conserved magnetization of the XY scheme.
    pub fn sigma_z_total(n: usize) -> Self {
        Self::from_terms(n, (0..n).map(|i| (PauliWord::single(i, Pauli::Z), 1.0)))
            .expect("valid sites")
    }

    /// `sum_j |c_j|`, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs()).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_diagonal())
    }

    /// `a * self + b * other`, term by term.
    pub fn affine(&self, a: f64, other: &SpinHamiltonian, b: f64) -> Result<Self, AqcError> {
        if self.n != other.n {
            return Err(AqcError::DimensionMismatch(self.n, other.n));
        }
        let terms = self
            .terms
            .iter()
            .map(|&(w, c)| (w, a * c))
            .chain(other.terms.iter().map(|&(w, c)| (w, b * c)));
        Self::from_terms(self.n, terms)
    }

    /// Commutator `[self, other]` as a Pauli sum with complex weights;
    /// empty when the operators commute.
    pub fn commutator(&self, other: &SpinHamiltonian) -> Vec<(PauliWord, Complex64)> {
        let mut acc: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for &(p, a) in &self.terms {
            for &(q, b) in &other.terms {
                if p.commutes_with(&q) {
                    continue;
                }
                let (k, w) = p.mul(&q);
                *acc.entry(w).or_insert(Complex64::new(0.0, 0.0)) += I_POW[k as usize] * (2.0 * a * b);
            }
        }
        acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect()
    }

    pub fn commutes_with(&self, other: &SpinHamiltonian) -> bool {
        self.commutator(other).is_empty()
    }

    pub fn compile(&self) -> Result<CompiledOperator, AqcError> {
        CompiledOperator::new(self)
    }

    /// Dense matrix, row-major, for small `n`.
    pub fn to_dense(&self) -> Result<Vec<Complex64>, AqcError> {
        if self.n > 12 {
            return Err(AqcError::TooManyQubits { n: self.n, cap: 12 });
        }
        let dim = 1usize << self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for &(w, c) in &self.terms {
            for b in 0..dim as u64 {
                let row = (b ^ w.x) as usize;
                m[row * dim + b as usize] += w.amplitude(b) * c;
            }
        }
        Ok(m)
    }
}

/// Matrix-free form: the diagonal as a vector plus off-diagonal words
/// grouped by their flip mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledOperator {
    pub n: usize,
    pub diagonal: Vec<f64>,
    groups: Vec<(u64, Vec<(u64, Complex64)>)>,
}

impl CompiledOperator {
    fn new(h: &SpinHamiltonian) -> Result<Self, AqcError> {
        if h.n > MAX_QUBITS {
            return Err(AqcError::TooManyQubits { n: h.n, cap: MAX_QUBITS });
        }
        let dim = 1usize << h.n;
        let mut diagonal = vec![0.0; dim];
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for &(w, c) in &h.terms {
            if w.is_diagonal() {
                for (b, d) in diagonal.iter_mut().enumerate() {
                    if parity(b as u64 & w.z) {
                        *d -= c;
                    } else {
                        *d += c;
                    }
                }
            } else {
                let phase = I_POW[((w.x & w.z).count_ones() % 4) as usize];
                groups.entry(w.x).or_default().push((w.z, phase * c));
            }
        }
        Ok(Self {
            n: h.n,
            diagonal,
            groups: groups.into_iter().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for ((o, &d), &x) in out.iter_mut().zip(&self.diagonal).zip(v) {
            *o = x * d;
        }
        for (x, terms) in &self.groups {
            for (b, &vb) in v.iter().enumerate() {
                if vb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b = b as u64;
                let mut amp = Complex64::new(0.0, 0.0);
                for &(z, c) in terms {
                    if parity(b & z) {
                        amp -= c;
                    } else {
                        amp += c;
                    }
                }
                out[(b ^ x) as usize] += amp * vb;
            }
        }
    }

    /// Off-diagonal entries `(b ^ x, <b ^ x| H |b>)` of column `b`.
    pub(crate) fn column(&self, b: u64, mut f: impl FnMut(u64, Complex64)) {
        for (x, terms) in &self.groups {
            let mut amp = Complex64::new(0.0, 0.0);
            for &(z, c) in terms {
                if parity(b & z) {
                    amp -= c;
                } else {
                    amp += c;
                }
            }
            if amp != Complex64::new(0.0, 0.0) {
                f(b ^ x, amp);
            }
        }
    }

    /// Whether every matrix element is real.
    pub fn is_real(&self) -> bool {
        self.groups.iter().all(|(_, t)| t.iter().all(|(_, c)| c.im == 0.0))
    }

    /// `<a| H |b>`.
    pub fn expectation(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut hb = vec![Complex64::new(0.0, 0.0); b.len()];
        self.apply(b, &mut hb);
        a.iter().zip(&hb).map(|(x, y)| x.conj() * y).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_single(p: Pauli) -> [[Complex64; 2]; 2] {
        let (o, l, i) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        );
        match p {
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    #[test]
    fn single_site_matrices() {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let h = SpinHamiltonian::from_terms(1, [(PauliWord::single(0, p), 1.0)]).unwrap();
            let m = h.to_dense().unwrap();
            let e = dense_single(p);
            for r in 0..2 {
                for c in 0..2 {
                    assert_eq!(m[r * 2 + c], e[r][c], "{p:?} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn products_match_dense() {
        let ops = [Pauli::X, Pauli::Y, Pauli::Z];
        for &a in &ops {
            for &b in &ops {
                let pa = PauliWord::single(0, a);
                let pb = PauliWord::single(0, b);
                let (k, w) = pa.mul(&pb);
                let ma = dense_single(a);
                let mb = dense_single(b);
                let prod: Vec<Complex64> = (0..4)
                    .map(|rc| (0..2).map(|j| ma[rc / 2][j] * mb[j][rc % 2]).sum())
                    .collect();
                let h = SpinHamiltonian { n: 1, terms: vec![(w, 1.0)] };
                let mw = if w == PauliWord::IDENTITY {
                    vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
                } else {
                    h.to_dense().unwrap()
                };
                for rc in 0..4 {
                    assert!((prod[rc] - I_POW[k as usize] * mw[rc]).norm() < 1e-15, "{a:?}{b:?}");
                }
            }
        }
    }

    #[test]
    fn matrix_free_matches_dense() {
        let terms = vec![
            (PauliWord::from_ops(&[(0, Pauli::X), (2, Pauli::Y)]), 0.7),
            (PauliWord::from_ops(&[(1, Pauli::Z), (2, Pauli::Z)]), -1.3),
            (PauliWord::from_ops(&[(0, Pauli::Y), (1, Pauli::Y)]), 0.4),
            (PauliWord::single(1, Pauli::X), 0.25),
            (PauliWord::single(0, Pauli::Z), 2.0),
        ];
        let h = SpinHamiltonian::from_terms(3, terms).unwrap();
        let dense = h.to_dense().unwrap();
        let op = h.compile().unwrap();
        let v: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i * i) as f64 * 0.1)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); 8];
        op.apply(&v, &mut out);
        for r in 0..8 {
            let expect: Complex64 = (0..8).map(|c| dense[r * 8 + c] * v[c]).sum();
            assert!((out[r] - expect).norm() < 1e-13);
        }
        // Hermitian
        for r in 0..8 {
            for c in 0..8 {
                assert!((dense[r * 8 + c] - dense[c * 8 + r].conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn commutators() {
        let sz = SpinHamiltonian::sigma_z_total(2);
        let xy = SpinHamiltonian::from_terms(
            2,
            [
                (PauliWord::from_ops(&[(0, Pauli::X), (1, Pauli::X)]), 1.0),
                (PauliWord::from_ops(&[(0, Pauli::Y), (1, Pauli::Y)]), 1.0),
            ],
        )
        .unwrap();
        assert!(xy.commutes_with(&sz));
        let xx = SpinHamiltonian::from_terms(2, [(PauliWord::from_ops(&[(0, Pauli::X), (1, Pauli::X)]), 1.0)]).unwrap();
        assert!(!xx.commutes_with(&sz));
        // [X, Z] = -2iY
        let x = SpinHamiltonian::from_terms(1, [(PauliWord::single(0, Pauli::X), 1.0)]).unwrap();
        let z = SpinHamiltonian::from_terms(1, [(PauliWord::single(0, Pauli::Z), 1.0)]).unwrap();
        let c = x.commutator(&z);
        assert_eq!(c, vec![(PauliWord::single(0, Pauli::Y), Complex64::new(0.0, -2.0))]);
    }

    #[test]
    fn affine_endpoints_are_exact() {
        let a = SpinHamiltonian::from_terms(2, [(PauliWord::single(0, Pauli::X), 0.3)]).unwrap();
        let b = SpinHamiltonian::from_terms(2, [(PauliWord::single(1, Pauli::Z), 1.7), (PauliWord::single(0, Pauli::X), 0.1)]).unwrap();
        assert_eq!(a.affine(1.0, &b, 0.0).unwrap(), a);
        assert_eq!(a.affine(0.0, &b, 1.0).unwrap(), b);
        assert!(matches!(a.affine(1.0, &SpinHamiltonian::zero(3), 1.0), Err(AqcError::DimensionMismatch(2, 3))));
    }
}
