//! Exact cover 3 instances and the Hamiltonians built from them.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliWord, SpinHamiltonian};
use super::AqcError;

/// Largest `n` for brute-force enumeration of assignments.
pub const BRUTE_FORCE_CAP: usize = 24;
/// Draws attempted before `random_ec3_instance` gives up on uniqueness.
pub const REJECTION_BUDGET: usize = 100_000;

/// Clauses `z_a + z_b + z_c = 1` over `n` bits. Variables are numbered
/// from 0; each triple is strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EC3Instance {
    pub n: usize,
    pub clauses: Vec<[usize; 3]>,
}

impl EC3Instance {
    pub fn new(n: usize, clauses: Vec<[usize; 3]>) -> Result<Self, AqcError> {
        let inst = Self { n, clauses };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), AqcError> {
        if self.n > 64 {
            return Err(AqcError::TooManyQubits { n: self.n, cap: 64 });
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if !(c[0] < c[1] && c[1] < c[2] && c[2] < self.n) {
                return Err(AqcError::Invalid(format!("clause {c:?} is not an increasing triple below {}", self.n)));
            }
            if self.clauses[..i].contains(c) {
                return Err(AqcError::Invalid(format!("duplicate clause {c:?}")));
            }
        }
        Ok(())
    }

    /// Number of violated clauses weighted as `4 (sum z - 1)^2`.
    pub fn penalty(&self, z: u64) -> u64 {
        self.clauses
            .iter()
            .map(|c| {
                let s = c.iter().filter(|&&i| z >> i & 1 == 1).count() as i64 - 1;
                (4 * s * s) as u64
            })
            .sum()
    }

    pub fn is_satisfied_by(&self, z: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|&&i| z >> i & 1 == 1).count() == 1)
    }

    /// Counts satisfying assignments, stopping once `limit` is reached.
    pub fn count_solutions(&self, limit: usize) -> Result<usize, AqcError> {
        if self.n > BRUTE_FORCE_CAP {
            return Err(AqcError::TooManyQubits { n: self.n, cap: BRUTE_FORCE_CAP });
        }
        let mut count = 0;
        for z in 0..1u64 << self.n {
            if self.is_satisfied_by(z) {
                count += 1;
                if count >= limit {
                    break;
                }
            }
        }
        Ok(count)
    }

    /// Satisfying assignments in increasing order.
    pub fn solutions(&self) -> Result<Vec<u64>, AqcError> {
        if self.n > BRUTE_FORCE_CAP {
            return Err(AqcError::TooManyQubits { n: self.n, cap: BRUTE_FORCE_CAP });
        }
        Ok((0..1u64 << self.n).filter(|&z| self.is_satisfied_by(z)).collect())
    }

    /// Clauses containing each variable.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for c in &self.clauses {
            for &i in c {
                d[i] += 1;
            }
        }
        d
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Triple with lexicographic rank `r` among increasing triples below `n`.
fn unrank_triple(n: usize, mut r: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut start = 0;
    for (slot, o) in out.iter_mut().enumerate() {
        let left = 2 - slot;
        let mut v = start;
        loop {
            let block = binomial(n - v - 1, left);
            if r < block {
                break;
            }
            r -= block;
            v += 1;
        }
        *o = v;
        start = v + 1;
    }
    out
}

/// Draws `m` distinct clauses uniformly. With `require_unique`, redraws
/// until the instance has exactly one satisfying assignment.
pub fn random_ec3_instance(n: usize, m: usize, seed: u64, require_unique: bool) -> Result<EC3Instance, AqcError> {
    if n < 3 {
        return Err(AqcError::Invalid(format!("n = {n} < 3")));
    }
    if n > 64 {
        return Err(AqcError::TooManyQubits { n, cap: 64 });
    }
    let total = binomial(n, 3);
    if m > total {
        return Err(AqcError::Invalid(format!("m = {m} exceeds C({n},3) = {total}")));
    }
    if require_unique && n > BRUTE_FORCE_CAP {
        return Err(AqcError::TooManyQubits { n, cap: BRUTE_FORCE_CAP });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = if require_unique { REJECTION_BUDGET } else { 1 };
    for _ in 0..attempts {
        let mut clauses: Vec<[usize; 3]> = index::sample(&mut rng, total, m)
            .into_iter()
            .map(|r| unrank_triple(n, r))
            .collect();
        clauses.sort_unstable();
        let inst = EC3Instance { n, clauses };
        if !require_unique || inst.count_solutions(2)? == 1 {
            return Ok(inst);
        }
    }
    Err(AqcError::RejectionBudget { attempts })
}

/// `sum_clauses (Z_a + Z_b + Z_c + 1)^2`, expanded as
/// `4 + 2 (Z_a Z_b + Z_a Z_c + Z_b Z_c) + 2 (Z_a + Z_b + Z_c)`.
/// Assignment `z` sits at basis index [`assignment_index`], where its
/// diagonal entry is `sum_clauses 4 (z_a + z_b + z_c - 1)^2`.
pub fn build_h_out(inst: &EC3Instance) -> SpinHamiltonian {
    let mut terms = Vec::with_capacity(inst.clauses.len() * 7);
    for &[a, b, c] in &inst.clauses {
        terms.push((PauliWord::IDENTITY, 4.0));
        for (i, j) in [(a, b), (a, c), (b, c)] {
            terms.push((PauliWord::from_ops(&[(i, Pauli::Z), (j, Pauli::Z)]), 2.0));
        }
        for i in [a, b, c] {
            terms.push((PauliWord::single(i, Pauli::Z), 2.0));
        }
    }
    SpinHamiltonian::from_terms(inst.n, terms).expect("validated instance")
}

/// Basis index of assignment `z`: `z_i = 0` is the `Z_i = -1` state, which
/// is bit value 1.
pub fn assignment_index(n: usize, z: u64) -> usize {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (!z & mask) as usize
}

/// `Z`-sum eigenvalue `sum_i (2 z_i - 1)` of assignment `z`.
pub fn assignment_magnetization(n: usize, z: u64) -> i32 {
    2 * z.count_ones() as i32 - n as i32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WeightRule {
    Unit,
    #[default]
    ClauseDegree,
}

/// `sum_i L_i X_i`.
pub fn build_h_in_x(inst: &EC3Instance, rule: WeightRule) -> Result<SpinHamiltonian, AqcError> {
    let weights: Vec<f64> = match rule {
        WeightRule::Unit => vec![1.0; inst.n],
        WeightRule::ClauseDegree => {
            let d = inst.degrees();
            if let Some(i) = d.iter().position(|&x| x == 0) {
                return Err(AqcError::IsolatedVariable(i));
            }
            d.into_iter().map(|x| x as f64).collect()
        }
    };
    SpinHamiltonian::from_terms(
        inst.n,
        weights
            .into_iter()
            .enumerate()
            .map(|(i, l)| (PauliWord::single(i, Pauli::X), l)),
    )
}

/// `-sum_{i<j} M_ij (X_i X_j + Y_i Y_j)` with `M_ij` the number of clauses
/// containing both `i` and `j`.
pub fn build_h_in_xy(inst: &EC3Instance) -> SpinHamiltonian {
    let mut terms = Vec::with_capacity(inst.clauses.len() * 6);
    for &[a, b, c] in &inst.clauses {
        for (i, j) in [(a, b), (a, c), (b, c)] {
            terms.push((PauliWord::from_ops(&[(i, Pauli::X), (j, Pauli::X)]), -1.0));
            terms.push((PauliWord::from_ops(&[(i, Pauli::Y), (j, Pauli::Y)]), -1.0));
        }
    }
    let h = SpinHamiltonian::from_terms(inst.n, terms).expect("validated instance");
    if inst.n <= 10 {
        assert!(
            h.commutes_with(&SpinHamiltonian::sigma_z_total(inst.n)),
            "XY network must conserve the Z sum"
        );
    }
    h
}

/// `(1 - g) h_in + g h_out`.
pub fn interpolate(h_in: &SpinHamiltonian, h_out: &SpinHamiltonian, g: f64) -> Result<SpinHamiltonian, AqcError> {
    h_in.affine(1.0 - g, h_out, g)
}
