//! Gap scans along `H(g) = (1 - g) H_in + g H_out`, adiabatic runtime
//! estimates and the X versus XY scheme comparison.

use serde::{Deserialize, Serialize};

use super::ec3::{build_h_in_x, build_h_in_xy, build_h_out, interpolate, EC3Instance, WeightRule};
use super::lanczos::{lowest_levels_with, LanczosConfig, Levels, Sector};
use super::pauli::SpinHamiltonian;
use super::AqcError;
use crate::exec;

/// Starting point of the scan when the sector ground state is degenerate
/// at `g = 0`.
pub const DEGENERATE_START: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SectorPolicy {
    Full,
    Fixed(Sector),
    /// Magnetization sector holding the ground state of `h_in`.
    InitialGroundState,
    /// Magnetization sector holding the ground state of `h_out`.
    ProblemGroundState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Coarse grid size, at least 16.
    pub points: usize,
    /// Width of the final bracket around the minimum.
    pub refine_tol: f64,
    pub matrix_elements: bool,
    /// Also record the full-space gap when scanning inside a sector.
    pub full_gap: bool,
    pub lanczos: LanczosConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            points: 33,
            refine_tol: 1e-3,
            matrix_elements: true,
            full_gap: true,
            lanczos: LanczosConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub g: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    /// `|<1| H_out - H_in |0>|`, summed in quadrature over a degenerate
    /// first excited level.
    pub matrix_element: Option<f64>,
    pub full_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    /// Sorted by `g`.
    pub points: Vec<GapPoint>,
    pub g_min: f64,
    pub min_gap: f64,
    pub full_min_gap: Option<f64>,
    pub sector: Option<Sector>,
    /// Gaps at or below this count as level crossings.
    pub zero_tol: f64,
}

struct Problem<'a> {
    h_in: &'a SpinHamiltonian,
    h_out: &'a SpinHamiltonian,
    v: SpinHamiltonian,
    sector: Option<Sector>,
    cfg: &'a ScanConfig,
}

impl Problem<'_> {
    fn levels(&self, g: f64, count: usize, sector: Option<Sector>) -> Result<Levels, AqcError> {
        let h = interpolate(self.h_in, self.h_out, g)?;
        let dim = (0..1u64 << h.n)
            .filter(|&b| sector.map_or(true, |s| s.contains(h.n, b)))
            .count();
        lowest_levels_with(&h, count.min(dim), sector, &self.cfg.lanczos)
    }

    fn point(&self, g: f64) -> Result<GapPoint, AqcError> {
        let want = if self.cfg.matrix_elements { 3 } else { 2 };
        let lv = self.levels(g, want, self.sector)?;
        if lv.values.len() < 2 {
            return Err(AqcError::Invalid("sector holds a single state".into()));
        }
        let (e0, e1) = (lv.values[0], lv.values[1]);
        let matrix_element = if self.cfg.matrix_elements {
            let op = self.v.compile()?;
            let tol = self.cfg.lanczos.degeneracy_tol * lv.norm;
            let sq: f64 = lv
                .values
                .iter()
                .zip(&lv.vectors)
                .skip(1)
                .filter(|(e, _)| **e - e1 < tol)
                .map(|(_, v)| op.expectation(v, &lv.vectors[0]).norm_sqr())
                .sum();
            Some(sq.sqrt())
        } else {
            None
        };
        let full_gap = match (self.sector, self.cfg.full_gap) {
            (Some(_), true) => self.levels(g, 2, None)?.gap(),
            (None, _) => Some(e1 - e0),
            _ => None,
        };
        Ok(GapPoint {
            g,
            e0,
            e1,
            gap: (e1 - e0).max(0.0),
            matrix_element,
            full_gap: full_gap.map(|x| x.max(0.0)),
        })
    }
}

/// Magnetization sector of the ground state of `h`, preferring the
/// smallest `|m|` (then positive `m`) among degenerate sectors.
pub fn ground_sector(h: &SpinHamiltonian, cfg: &LanczosConfig) -> Result<Sector, AqcError> {
    let n = h.n as i32;
    let mut best: Option<(f64, i32)> = None;
    let tol = cfg.degeneracy_tol * h.norm_bound().max(1e-300);
    let mut order: Vec<i32> = (-n..=n).step_by(2).collect();
    order.sort_by_key(|&m| (m.abs(), -m));
    for m in order {
        let e = lowest_levels_with(h, 1, Some(Sector::Magnetization(m)), cfg)?.values[0];
        if best.map_or(true, |(b, _)| e < b - tol) {
            best = Some((e, m));
        }
    }
    Ok(Sector::Magnetization(best.expect("at least one sector").1))
}

fn resolve_sector(h_in: &SpinHamiltonian, h_out: &SpinHamiltonian, policy: SectorPolicy, cfg: &LanczosConfig) -> Result<Option<Sector>, AqcError> {
    Ok(match policy {
        SectorPolicy::Full => None,
        SectorPolicy::Fixed(s) => Some(s),
        SectorPolicy::InitialGroundState => Some(ground_sector(h_in, cfg)?),
        SectorPolicy::ProblemGroundState => Some(ground_sector(h_out, cfg)?),
    })
}

/// Scans `points` evenly spaced values of `g` in `[0, 1]`, then narrows the
/// bracket around the coarse minimum by golden-section search.
pub fn gap_scan(h_in: &SpinHamiltonian, h_out: &SpinHamiltonian, policy: SectorPolicy, cfg: &ScanConfig) -> Result<GapScan, AqcError> {
    if h_in.n != h_out.n {
        return Err(AqcError::DimensionMismatch(h_in.n, h_out.n));
    }
    if cfg.points < 16 {
        return Err(AqcError::Invalid(format!("grid of {} points, need at least 16", cfg.points)));
    }
    let sector = resolve_sector(h_in, h_out, policy, &cfg.lanczos)?;
    let problem = Problem {
        h_in,
        h_out,
        v: h_out.affine(1.0, h_in, -1.0)?,
        sector,
        cfg,
    };
    let zero_tol = cfg.lanczos.degeneracy_tol * h_in.norm_bound().max(h_out.norm_bound()).max(1e-300);

    let first = problem.point(0.0)?;
    let start = if first.gap <= zero_tol { DEGENERATE_START } else { 0.0 };
    let grid: Vec<f64> = (0..cfg.points)
        .map(|i| start + (1.0 - start) * i as f64 / (cfg.points - 1) as f64)
        .collect();
    let mut points: Vec<GapPoint> = if start == 0.0 {
        let mut rest = exec::try_map(&grid[1..], |&g| problem.point(g))?;
        rest.insert(0, first);
        rest
    } else {
        exec::try_map(&grid, |&g| problem.point(g))?
    };

    let imin = argmin(&points);
    let mut lo = points[imin.saturating_sub(1)].g;
    let mut hi = points[(imin + 1).min(points.len() - 1)].g;
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut pa = problem.point(a)?;
    let mut pb = problem.point(b)?;
    while hi - lo > cfg.refine_tol {
        if pa.gap <= pb.gap {
            hi = b;
            points.push(pb);
            b = a;
            pb = pa;
            a = hi - INV_PHI * (hi - lo);
            pa = problem.point(a)?;
        } else {
            lo = a;
            points.push(pa);
            a = b;
            pa = pb;
            b = lo + INV_PHI * (hi - lo);
            pb = problem.point(b)?;
        }
    }
    points.push(pa);
    points.push(pb);
    points.sort_by(|x, y| x.g.total_cmp(&y.g));
    points.dedup_by(|x, y| x.g == y.g);

    let imin = argmin(&points);
    let full_min_gap = points
        .iter()
        .map(|p| p.full_gap)
        .try_fold(f64::INFINITY, |acc, x| x.map(|x| acc.min(x)));
    Ok(GapScan {
        g_min: points[imin].g,
        min_gap: points[imin].gap,
        full_min_gap,
        points,
        sector,
        zero_tol,
    })
}

fn argmin(points: &[GapPoint]) -> usize {
    points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))
        .map(|(i, _)| i)
        .expect("non-empty scan")
}

/// `max_g |<1| H_out - H_in |0>| / gap^2`.
pub fn runtime_estimate(scan: &GapScan) -> Result<f64, AqcError> {
    let mut worst: f64 = 0.0;
    let mut any_coupling = false;
    for p in &scan.points {
        let m = p.matrix_element.ok_or(AqcError::MissingMatrixElements)?;
        if p.gap <= scan.zero_tol {
            return Err(AqcError::ZeroGap { g: p.g });
        }
        any_coupling |= m > scan.zero_tol;
        worst = worst.max(m / (p.gap * p.gap));
    }
    if !any_coupling {
        return Err(AqcError::ExactCrossing);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub min_gap: f64,
    pub g_min: f64,
    pub runtime: f64,
    /// Smallest gap over the whole spectrum, when scanned in a sector.
    pub full_min_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub index: usize,
    pub n: usize,
    pub clauses: usize,
    pub x: SchemeResult,
    pub xy: SchemeResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeComparison {
    pub rows: Vec<ComparisonRow>,
    pub x_median_runtime: f64,
    pub xy_median_runtime: f64,
    pub x_median_gap: f64,
    pub xy_median_gap: f64,
    /// Instances where the XY runtime is strictly smaller.
    pub xy_wins: usize,
    pub x_wins: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareConfig {
    pub scan: ScanConfig,
    pub weight_rule: WeightRule,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            scan: ScanConfig::default(),
            weight_rule: WeightRule::ClauseDegree,
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn scheme(h_in: &SpinHamiltonian, h_out: &SpinHamiltonian, policy: SectorPolicy, scan: &ScanConfig) -> Result<SchemeResult, AqcError> {
    let s = gap_scan(h_in, h_out, policy, scan)?;
    Ok(SchemeResult {
        min_gap: s.min_gap,
        g_min: s.g_min,
        runtime: runtime_estimate(&s)?,
        full_min_gap: s.sector.and(s.full_min_gap),
    })
}

/// Runs both schemes on every instance. The X scheme scans the full space;
/// the XY scheme scans the magnetization sector of the problem's ground
/// state, the only sector in which the adiabatic path can reach it.
pub fn compare_schemes(batch: &[EC3Instance], cfg: &CompareConfig) -> Result<SchemeComparison, AqcError> {
    let indexed: Vec<(usize, &EC3Instance)> = batch.iter().enumerate().collect();
    let rows = exec::try_map(&indexed, |&(index, inst)| {
        inst.validate()?;
        let h_out = build_h_out(inst);
        let x = scheme(&build_h_in_x(inst, cfg.weight_rule)?, &h_out, SectorPolicy::Full, &cfg.scan)?;
        let xy = scheme(&build_h_in_xy(inst), &h_out, SectorPolicy::ProblemGroundState, &cfg.scan)?;
        Ok::<_, AqcError>(ComparisonRow {
            index,
            n: inst.n,
            clauses: inst.clauses.len(),
            x,
            xy,
        })
    })?;
    let col = |f: &dyn Fn(&ComparisonRow) -> f64| median(&rows.iter().map(f).collect::<Vec<_>>());
    let (mut xy_wins, mut x_wins, mut ties) = (0, 0, 0);
    for r in &rows {
        match r.xy.runtime.total_cmp(&r.x.runtime) {
            std::cmp::Ordering::Less => xy_wins += 1,
            std::cmp::Ordering::Greater => x_wins += 1,
            std::cmp::Ordering::Equal => ties += 1,
        }
    }
    Ok(SchemeComparison {
        x_median_runtime: col(&|r| r.x.runtime),
        xy_median_runtime: col(&|r| r.xy.runtime),
        x_median_gap: col(&|r| r.x.min_gap),
        xy_median_gap: col(&|r| r.xy.min_gap),
        rows,
        xy_wins,
        x_wins,
        ties,
    })
}
