//! Lowest eigenpairs of a Pauli sum by Lanczos iteration with full
//! reorthogonalization and explicit locking of converged Ritz pairs.
//!
//! The operator is assembled as a sparse matrix on the basis states of the
//! requested sector, in real arithmetic whenever all its entries are real.

use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{PauliWord, SpinHamiltonian};
use super::AqcError;

/// Symmetry sector of the state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// Eigenvalue of `sum_i Z_i`.
    Magnetization(i32),
    /// Eigenvalue of `prod_i Z_i` (`true` for `+1`).
    Parity(bool),
}

impl Sector {
    pub fn contains(&self, n: usize, b: u64) -> bool {
        match *self {
            Sector::Magnetization(m) => n as i32 - 2 * b.count_ones() as i32 == m,
            Sector::Parity(even) => (b.count_ones() % 2 == 0) == even,
        }
    }

    fn conserved_by(&self, h: &SpinHamiltonian) -> bool {
        match self {
            Sector::Magnetization(_) => h.commutes_with(&SpinHamiltonian::sigma_z_total(h.n)),
            Sector::Parity(_) => {
                let p = PauliWord { x: 0, z: if h.n == 64 { u64::MAX } else { (1u64 << h.n) - 1 } };
                h.terms.iter().all(|(w, _)| w.commutes_with(&p))
            }
        }
    }
}

/// Memory budget for the Krylov basis.
const MAX_BASIS_BYTES: usize = 1 << 29;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Krylov dimension per restart.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Eigenvalue accuracy relative to the norm bound.
    pub tol: f64,
    /// Relative level spacing below which levels are flagged degenerate.
    pub degeneracy_tol: f64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            krylov: 160,
            max_restarts: 400,
            tol: 1e-11,
            degeneracy_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Levels {
    /// Ascending.
    pub values: Vec<f64>,
    /// `degenerate[i]`: level `i` lies within the degeneracy tolerance of
    /// a neighbour.
    pub degenerate: Vec<bool>,
    /// Normalized eigenvectors on the full `2^n` space.
    pub vectors: Vec<Vec<Complex64>>,
    pub norm: f64,
    pub sector: Option<Sector>,
}

impl Levels {
    pub fn gap(&self) -> Option<f64> {
        (self.values.len() >= 2).then(|| self.values[1] - self.values[0])
    }
}

trait Scalar:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + AddAssign
{
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn real(self) -> f64;
    fn scaled(self, s: f64) -> Self;
    fn from_complex(c: Complex64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn real(self) -> f64 {
        self
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn real(self) -> f64 {
        self.re
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn from_complex(c: Complex64) -> Self {
        c
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::default(), |acc, (x, y)| acc + x.conj() * *y)
}

fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(y: &mut [T], a: T, x: &[T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

fn normalize<T: Scalar>(v: &mut [T]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|c| *c = c.scaled(1.0 / n));
    }
    n
}

/// Classical Gram-Schmidt against both sets, twice.
fn orthogonalize<T: Scalar>(v: &mut [T], locked: &[Vec<T>], basis: &[Vec<T>]) {
    for _ in 0..2 {
        for q in locked.iter().chain(basis) {
            let c = dot(q, v);
            axpy(v, T::default() - c, q);
        }
    }
}

/// Deterministic start vector with generic overlaps. Each run needs a
/// fresh one: an earlier start vector's projection onto a degenerate
/// eigenspace is exactly the vector already locked there.
fn start_vector<T: Scalar>(dim: usize, salt: u64) -> Vec<T> {
    (0..dim as u64)
        .map(|i| {
            let h = crate::exec::splitmix64((i ^ 0xA5A5_5A5A).wrapping_add(salt << 32));
            let re = (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            let im = (h & 0x7FF) as f64 / 2048.0 - 0.5;
            T::from_complex(Complex64::new(1.0 + re, 0.25 * im))
        })
        .collect()
}

/// Row-compressed matrix on the basis states of a sector.
struct Csr<T> {
    diag: Vec<f64>,
    start: Vec<usize>,
    col: Vec<u32>,
    val: Vec<T>,
}

impl<T: Scalar> Csr<T> {
    fn new(h: &SpinHamiltonian, states: &[u64]) -> Result<Self, AqcError> {
        let op = h.compile()?;
        let mut pos = vec![u32::MAX; op.dim()];
        for (i, &b) in states.iter().enumerate() {
            pos[b as usize] = i as u32;
        }
        let mut m = Csr {
            diag: states.iter().map(|&b| op.diagonal[b as usize]).collect(),
            start: Vec::with_capacity(states.len() + 1),
            col: Vec::new(),
            val: Vec::new(),
        };
        m.start.push(0);
        for &b in states {
            // Row b holds <b|H|c> = conj(<c|H|b>) for the columns c = b ^ x.
            op.column(b, |c, amp| {
                let j = pos[c as usize];
                if j != u32::MAX {
                    m.col.push(j);
                    m.val.push(T::from_complex(amp.conj()));
                }
            });
            m.start.push(m.col.len());
        }
        Ok(m)
    }

    fn apply(&self, v: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = v[i].scaled(self.diag[i]);
            for k in self.start[i]..self.start[i + 1] {
                acc += self.val[k] * v[self.col[k] as usize];
            }
            *o = acc;
        }
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e` by implicit QL; returns ascending eigenvalues
/// and column eigenvectors `z[row][col]`.
pub(crate) fn tridiagonal_eigen(d: &[f64], e: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).take(n).collect();
    let mut z: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let t = row[i + 1];
                    row[i + 1] = s * row[i] + c * t;
                    row[i] = c * row[i] - s * t;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.iter().map(|row| order.iter().map(|&i| row[i]).collect()).collect();
    (values, vectors)
}

struct Solver<'a, T> {
    m: &'a Csr<T>,
    scale: f64,
    cfg: &'a LanczosConfig,
    runs: u64,
}

impl<T: Scalar> Solver<'_, T> {
    fn converged(&self, res: f64, spacing: f64) -> bool {
        let tol = self.cfg.tol * self.scale;
        res <= tol || (res <= 1e-5 * self.scale && res * res <= tol * spacing)
    }

    /// One restarted Lanczos run on the complement of `locked`. Returns the
    /// leading Ritz pairs that converged, in ascending order, up to `want`.
    fn run(&mut self, locked: &[Vec<T>], want: usize) -> Result<Vec<(f64, Vec<T>)>, AqcError> {
        let dim = self.m.diag.len();
        let free = dim - locked.len();
        let fits = (MAX_BASIS_BYTES / (dim * std::mem::size_of::<T>())).max(8);
        let krylov = self.cfg.krylov.min(fits).min(free).max(1);
        let mut hv = vec![T::default(); dim];
        self.runs += 1;
        let mut x: Vec<T> = start_vector(dim, self.runs);
        for restart in 0..self.cfg.max_restarts {
            orthogonalize(&mut x, locked, &[]);
            if normalize(&mut x) == 0.0 {
                return Err(AqcError::NoConvergence("start vector lies in the locked space".into()));
            }
            let mut basis: Vec<Vec<T>> = vec![x.clone()];
            let mut alpha = Vec::with_capacity(krylov);
            let mut beta = Vec::with_capacity(krylov);
            loop {
                let q = basis.last().unwrap();
                self.m.apply(q, &mut hv);
                alpha.push(dot(q, &hv).real());
                if alpha.len() == krylov {
                    break;
                }
                let mut w = hv.clone();
                orthogonalize(&mut w, locked, &basis);
                let hn = norm(&hv).max(f64::MIN_POSITIVE);
                let mut b = normalize(&mut w);
                if b <= 1e-10 * hn {
                    // Invariant subspace: continue from a fresh direction.
                    w = start_vector(dim, (self.runs << 20) + basis.len() as u64 + 1);
                    orthogonalize(&mut w, locked, &basis);
                    if normalize(&mut w) <= 1e-10 {
                        break;
                    }
                    b = 0.0;
                } else if b < 1e-3 * hn {
                    orthogonalize(&mut w, locked, &basis);
                    normalize(&mut w);
                }
                beta.push(b);
                basis.push(w);
            }
            let (theta, s) = tridiagonal_eigen(&alpha, &beta);
            let k = theta.len();
            let mut done = Vec::new();
            let mut restart_vec = vec![T::default(); dim];
            for j in 0..want.min(k) {
                let mut y = vec![T::default(); dim];
                for (i, q) in basis.iter().enumerate() {
                    axpy(&mut y, T::from_complex(Complex64::new(s[i][j], 0.0)), q);
                }
                orthogonalize(&mut y, locked, &[]);
                normalize(&mut y);
                self.m.apply(&y, &mut hv);
                let e = dot(&y, &hv).real();
                axpy(&mut hv, T::from_complex(Complex64::new(-e, 0.0)), &y);
                let res = norm(&hv);
                let spacing = (1..k)
                    .filter(|&i| i != j)
                    .map(|i| (theta[i] - theta[j]).abs())
                    .fold(f64::INFINITY, f64::min);
                let exhausted = k == free && restart > 0;
                if done.len() == j && (self.converged(res, spacing) || exhausted) {
                    done.push((e, y));
                } else {
                    axpy(&mut restart_vec, T::from_complex(Complex64::new(1.0, 0.0)), &y);
                }
            }
            if !done.is_empty() {
                return Ok(done);
            }
            x = restart_vec;
        }
        Err(AqcError::NoConvergence(format!(
            "no Ritz pair converged after {} restarts",
            self.cfg.max_restarts
        )))
    }

    fn lowest(&mut self, count: usize) -> Result<Vec<(f64, Vec<T>)>, AqcError> {
        let dim = self.m.diag.len();
        let tol = self.cfg.degeneracy_tol * self.scale;
        let mut pairs: Vec<(f64, Vec<T>)> = Vec::new();
        loop {
            let locked: Vec<Vec<T>> = pairs.iter().map(|p| p.1.clone()).collect();
            if locked.len() == dim {
                break;
            }
            let have = pairs.len() >= count;
            let found = self.run(&locked, if have { 1 } else { count - pairs.len() })?;
            let top = if have { pairs[count - 1].0 } else { f64::INFINITY };
            let below: Vec<_> = found.into_iter().filter(|p| p.0 < top - tol || !have).collect();
            if have && below.is_empty() {
                break;
            }
            pairs.extend(below);
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        pairs.truncate(count);
        Ok(pairs)
    }
}

/// The `count` lowest eigenvalues of `h`, optionally within a sector.
pub fn lowest_levels(h: &SpinHamiltonian, count: usize, sector: Option<Sector>) -> Result<Levels, AqcError> {
    lowest_levels_with(h, count, sector, &LanczosConfig::default())
}

pub fn lowest_levels_with(
    h: &SpinHamiltonian,
    count: usize,
    sector: Option<Sector>,
    cfg: &LanczosConfig,
) -> Result<Levels, AqcError> {
    if let Some(s) = sector {
        if !s.conserved_by(h) {
            return Err(AqcError::SectorNotConserved(s));
        }
    }
    if h.n > super::pauli::MAX_QUBITS {
        return Err(AqcError::TooManyQubits { n: h.n, cap: super::pauli::MAX_QUBITS });
    }
    let states: Vec<u64> = (0..1u64 << h.n)
        .filter(|&b| sector.map_or(true, |s| s.contains(h.n, b)))
        .collect();
    if count == 0 || count > states.len() {
        return Err(AqcError::Invalid(format!(
            "requested {count} levels from a {}-dimensional space",
            states.len()
        )));
    }
    let scale = h.norm_bound().max(1e-300);
    let real = h.compile()?.is_real();
    let embed = |v: Vec<Complex64>| {
        let mut full = vec![Complex64::new(0.0, 0.0); 1usize << h.n];
        for (&b, c) in states.iter().zip(v) {
            full[b as usize] = c;
        }
        full
    };
    let pairs: Vec<(f64, Vec<Complex64>)> = if real {
        let m = Csr::<f64>::new(h, &states)?;
        let mut s = Solver { m: &m, scale, cfg, runs: 0 };
        s.lowest(count)?
            .into_iter()
            .map(|(e, v)| (e, v.into_iter().map(Scalar::to_complex).collect()))
            .collect()
    } else {
        let m = Csr::<Complex64>::new(h, &states)?;
        let mut s = Solver { m: &m, scale, cfg, runs: 0 };
        s.lowest(count)?
    };
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let tol = cfg.degeneracy_tol * scale;
    let degenerate = (0..count)
        .map(|i| (i > 0 && values[i] - values[i - 1] < tol) || (i + 1 < count && values[i + 1] - values[i] < tol))
        .collect();
    Ok(Levels {
        values,
        degenerate,
        vectors: pairs.into_iter().map(|p| embed(p.1)).collect(),
        norm: scale,
        sector,
    })
}
