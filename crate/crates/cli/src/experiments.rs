//! Experiment catalogue: parameter schemas and the runners that turn a
//! parameter block into result tables.
//!
//! Column schemas (one table per name):
//!
//! | experiment    | table            | columns |
//! |---------------|------------------|---------|
//! | horizon       | horizon          | t, c, horizon, kind, shrink_rate, identity_residual |
//! | bh-sweep      | modes            | k, late_time, frozen_pp, final_t, final_pp |
//! |               | summary          | late_time, horizon_kind, horizon |
//! | bh-variance   | variance         | nu, variance |
//! | dispersion    | classification   | t, kind, k_min, omega_sq_min |
//! |               | spectrum         | k, omega_sq |
//! |               | modes            | k, omega_sq_final, squeeze_r, squeeze_phi, wronskian, determinant |
//! |               | mixture          | g_plus, g_minus, phase |
//! | spinor        | winding          | radius, n_mean, n_mean_se, n_sq_mean, n_sq_se |
//! |               | fit              | model, amplitude, chi_sq, best, loglog_slope |
//! |               | checks           | samples, identity_checks, identity_failures, neutrality_failures |
//! | aqc-compare   | instances        | index, n, clauses, x_min_gap, x_g_min, x_runtime, xy_min_gap, xy_g_min, xy_runtime, xy_full_min_gap |
//! |               | summary          | instances, x_median_runtime, xy_median_runtime, x_median_gap, xy_median_gap, xy_wins, x_wins, ties |
//! | aqc-scan      | scan             | g, e0, e1, gap, matrix_element, full_gap |
//! |               | summary          | scheme, n, clauses, min_gap, g_min, runtime |
//! | scaling       | tfim             | n, gap, n_gap, n_gap_over_2pi_j |
//! |               | first_order      | n, gap, ln_gap |
//! |               | dense            | n, closed_form, dense, rel_diff |
//! | decoherence   | report           | model, n, gap, error |
//! |               | trends           | model, trend |
//!
//! The `dispersion` modes table and the mixture table only appear when
//! `k_modes` and the coupling `g11, g22, g12` are given.

use qsweep_core::aqc::{
    build_h_in_x, build_h_in_xy, build_h_out, compare_schemes, gap_scan, random_ec3_instance, runtime_estimate,
    CompareConfig, ScanConfig, SectorPolicy, WeightRule,
};
use qsweep_core::bosehubbard::{frozen_number_variance, simulate_bh_sweep, BhParams, BhSweepConfig, LateTime};
use qsweep_core::dispersion::{
    classify_dispersion, coupling_eigenvalues, horizon_shrink_rate, horizon_size, phase_of_mixture, CouplingMatrix,
    DispersionRelation, Horizon, InstabilityKind,
};
use qsweep_core::exec::derive_seed;
use qsweep_core::modes::{evolve_mode, squeeze_parameters, Initial, ModeConfig};
use qsweep_core::scaling::{
    first_order_gap, scheme_vulnerability_report, tfim_gap, tfim_sector_gap, BathSpectrum, FirstOrderModel,
    GapModel, Trend,
};
use qsweep_core::spinor::{scaling_fit, winding_statistics, SpinorQuenchParams};
use serde_json::{Map, Value};

use crate::config::{Kind, Param, Params, Presence};
use crate::error::CliError;
use crate::table::{Cell, Table};

use Presence::{Default as D, Optional as O, Required as R};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Horizon,
    BhSweep,
    BhVariance,
    Dispersion,
    Spinor,
    AqcCompare,
    AqcScan,
    Scaling,
    Decoherence,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Horizon,
        Experiment::BhSweep,
        Experiment::BhVariance,
        Experiment::Dispersion,
        Experiment::Spinor,
        Experiment::AqcCompare,
        Experiment::AqcScan,
        Experiment::Scaling,
        Experiment::Decoherence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Horizon => "horizon",
            Experiment::BhSweep => "bh-sweep",
            Experiment::BhVariance => "bh-variance",
            Experiment::Dispersion => "dispersion",
            Experiment::Spinor => "spinor",
            Experiment::AqcCompare => "aqc-compare",
            Experiment::AqcScan => "aqc-scan",
            Experiment::Scaling => "scaling",
            Experiment::Decoherence => "decoherence",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|e| e.name()).collect()
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::Horizon => "analogue horizon size and shrink rate of a sound-speed profile",
            Experiment::BhSweep => "Bose-Hubbard Goldstone-mode sweep and late-time classification",
            Experiment::BhVariance => "frozen on-site number variance against the adiabaticity parameter",
            Experiment::Dispersion => "instability class, spectrum and mode squeezing of a dispersion",
            Experiment::Spinor => "winding-number statistics after a spinor quench",
            Experiment::AqcCompare => "X versus XY driver on random exact-cover instances",
            Experiment::AqcScan => "gap scan of one exact-cover instance",
            Experiment::Scaling => "transverse-field Ising and first-order gap scaling",
            Experiment::Decoherence => "bath error scale for first- and second-order gaps",
        }
    }

    pub fn params(self) -> &'static [Param] {
        match self {
            Experiment::Horizon => HORIZON,
            Experiment::BhSweep => BH_SWEEP,
            Experiment::BhVariance => BH_VARIANCE,
            Experiment::Dispersion => DISPERSION,
            Experiment::Spinor => SPINOR,
            Experiment::AqcCompare => AQC_COMPARE,
            Experiment::AqcScan => AQC_SCAN,
            Experiment::Scaling => SCALING,
            Experiment::Decoherence => DECOHERENCE,
        }
    }

    pub fn run(self, parameters: &Map<String, Value>, seed: u64) -> Result<Vec<Table>, CliError> {
        let p = Params::new(self.params(), parameters);
        match self {
            Experiment::Horizon => horizon(&p),
            Experiment::BhSweep => bh_sweep(&p),
            Experiment::BhVariance => bh_variance(&p),
            Experiment::Dispersion => dispersion(&p),
            Experiment::Spinor => spinor(&p, seed),
            Experiment::AqcCompare => aqc_compare(&p, seed),
            Experiment::AqcScan => aqc_scan(&p, seed),
            Experiment::Scaling => scaling(&p),
            Experiment::Decoherence => decoherence(&p),
        }
    }
}

const WEIGHT_RULES: &[&str] = &["clause_degree", "unit"];

const HORIZON: &[Param] = &[
    Param::new("speed", Kind::Profile, R, "sound speed c(t)"),
    Param::new("times", Kind::NumberList, R, "evaluation times"),
    Param::new("t_end", Kind::Number, O, "upper limit (default: end of the profile domain)"),
    Param::new("step", Kind::Number, D("1e-4"), "finite-difference step of the shrink rate"),
];

const BH_SWEEP: &[Param] = &[
    Param::new("hopping", Kind::Profile, R, "hopping J(t)"),
    Param::new("n", Kind::Number, D("1.0"), "filling"),
    Param::new("u", Kind::Number, D("1.0"), "on-site repulsion"),
    Param::new("ell", Kind::Number, D("1.0"), "lattice spacing"),
    Param::new("k", Kind::NumberList, D("[0.5, 0.7, 1.0]"), "mode wavenumbers"),
    Param::new("t0", Kind::Number, D("1.0"), "start time"),
    Param::new("t1", Kind::Number, D("1e4"), "end time"),
];

const BH_VARIANCE: &[Param] = &[
    Param::new("n", Kind::Number, R, "filling"),
    Param::new("nu", Kind::NumberList, R, "adiabaticity parameters"),
];

const DISPERSION: &[Param] = &[
    Param::new("relation", Kind::Text(&["quadratic", "roton"]), D("\"quadratic\""), "dispersion template"),
    Param::new("mass_sq", Kind::NumberOrProfile, D("1.0"), "quadratic: m^2(t)"),
    Param::new("stiffness", Kind::NumberOrProfile, D("1.0"), "quadratic: c^2(t)"),
    Param::new("k_crit", Kind::NumberOrProfile, D("1.0"), "roton: dip position"),
    Param::new("delta", Kind::NumberOrProfile, D("0.5"), "roton: dip depth omega^2(k_crit)"),
    Param::new("curvature", Kind::NumberOrProfile, D("1.0"), "roton: curvature"),
    Param::new("t", Kind::Number, D("0.0"), "classification time"),
    Param::new("k_max", Kind::Number, R, "largest wavenumber"),
    Param::new("points", Kind::Integer, D("65"), "spectrum grid size"),
    Param::new("k_modes", Kind::NumberList, O, "wavenumbers to evolve"),
    Param::new("t0", Kind::Number, D("0.0"), "mode start time"),
    Param::new("t1", Kind::Number, D("10.0"), "mode end time"),
    Param::new("g11", Kind::Number, O, "coupling matrix entry"),
    Param::new("g22", Kind::Number, O, "coupling matrix entry"),
    Param::new("g12", Kind::Number, O, "coupling matrix entry"),
];

const SPINOR: &[Param] = &[
    Param::new("l", Kind::Integer, D("64"), "sites per side"),
    Param::new("a", Kind::Number, D("1.0"), "lattice spacing"),
    Param::new("q_initial", Kind::Number, D("2.0"), "quadratic Zeeman energy before the quench"),
    Param::new("q_final", Kind::Number, D("0.0"), "quadratic Zeeman energy after the quench"),
    Param::new("c2", Kind::Number, D("-0.5"), "spin interaction"),
    Param::new("rho", Kind::Number, D("1.0"), "density"),
    Param::new("stiffness", Kind::Number, D("1.0"), "transverse-mode stiffness"),
    Param::new("t_grow", Kind::Number, D("6.0"), "growth time after the quench"),
    Param::new("cutoff_k", Kind::Number, O, "momentum above which modes are not grown"),
    Param::new("radii", Kind::NumberList, D("[1.5, 2, 3, 4, 6, 8, 12, 16, 24]"), "disc radii"),
    Param::new("samples", Kind::Integer, D("200"), "Monte Carlo samples"),
];

const AQC_COMPARE: &[Param] = &[
    Param::new("n", Kind::Integer, D("10"), "qubits"),
    Param::new("clauses", Kind::Integer, D("9"), "clauses per instance"),
    Param::new("instances", Kind::Integer, D("50"), "unique-solution instances"),
    Param::new("weight_rule", Kind::Text(WEIGHT_RULES), D("\"clause_degree\""), "X-driver weights"),
    Param::new("points", Kind::Integer, D("33"), "coarse grid points per scan"),
];

const AQC_SCAN: &[Param] = &[
    Param::new("n", Kind::Integer, D("8"), "qubits"),
    Param::new("clauses", Kind::Integer, D("7"), "clauses"),
    Param::new("scheme", Kind::Text(&["x", "xy"]), D("\"xy\""), "driver"),
    Param::new("weight_rule", Kind::Text(WEIGHT_RULES), D("\"clause_degree\""), "X-driver weights"),
    Param::new("points", Kind::Integer, D("33"), "coarse grid points"),
];

const SCALING: &[Param] = &[
    Param::new("sizes", Kind::IntegerList, D("[8, 16, 32, 64, 128, 256, 512]"), "chain lengths"),
    Param::new("g", Kind::Number, D("1.0"), "transverse field ratio"),
    Param::new("j", Kind::Number, D("1.0"), "Ising coupling"),
    Param::new("overlap_decay", Kind::Number, D("0.9"), "first-order overlap per site"),
    Param::new("norm_poly_degree", Kind::Integer, D("1"), "first-order polynomial degree"),
    Param::new("dense_sizes", Kind::IntegerList, D("[4, 6, 8]"), "sizes for the dense cross-check"),
];

const DECOHERENCE: &[Param] = &[
    Param::new("eta", Kind::Number, D("1.0"), "bath coupling"),
    Param::new("exponent", Kind::Number, D("1.0"), "bath exponent s in f = eta w^s"),
    Param::new("cutoff", Kind::Number, O, "bath cutoff (default: none)"),
    Param::new("prefactor", Kind::Number, D("1.0"), "error-scale prefactor"),
    Param::new("sizes", Kind::IntegerList, D("[4, 8, 16, 32, 64]"), "system sizes"),
    Param::new("overlap_decay", Kind::Number, D("0.9"), "first-order overlap per site"),
    Param::new("norm_poly_degree", Kind::Integer, D("1"), "first-order polynomial degree"),
    Param::new("j", Kind::Number, D("1.0"), "Ising coupling of the second-order gap"),
];

fn invalid(key: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Invalid {
        key: format!("parameters.{key}"),
        message: message.to_string(),
    }
}

fn horizon(p: &Params) -> Result<Vec<Table>, CliError> {
    let c = p.profile("speed")?;
    let times = p.f64_list("times")?;
    let t_end = p.opt_f64("t_end")?.unwrap_or(c.domain.end);
    let step = p.f64("step")?;
    let err = |e| CliError::module("dispersion", e);
    let mut t = Table::new("horizon", &["t", "c", "horizon", "kind", "shrink_rate", "identity_residual"]);
    for &time in &times {
        let speed = c.eval(time).map_err(err_profile)?;
        let row = match horizon_size(&c, time, t_end).map_err(err)? {
            Horizon::Finite(h) => {
                // The centered difference needs both neighbours inside the domain.
                let rate = if c.domain.contains(time - step) && time + step <= t_end {
                    horizon_shrink_rate(&c, time, step, t_end).map_err(err)?
                } else {
                    f64::NAN
                };
                vec![time.into(), speed.into(), h.into(), "finite".into(), rate.into(), ((rate + speed).abs() / speed).into()]
            }
            Horizon::Divergent => vec![
                time.into(),
                speed.into(),
                f64::INFINITY.into(),
                "divergent".into(),
                f64::NAN.into(),
                f64::NAN.into(),
            ],
        };
        t.push(row);
    }
    Ok(vec![t])
}

fn err_profile(e: qsweep_core::ProfileError) -> CliError {
    CliError::module("profile", e)
}

fn late_time_name(l: &LateTime) -> &'static str {
    match l {
        LateTime::FrozenAt(_) => "frozen",
        LateTime::Oscillating => "oscillating",
        LateTime::DecayingToZero => "decaying_to_zero",
    }
}

fn bh_sweep(p: &Params) -> Result<Vec<Table>, CliError> {
    let params = BhParams {
        n: p.f64("n")?,
        u: p.f64("u")?,
        ell: p.f64("ell")?,
        j: p.profile("hopping")?,
    };
    let ks = p.f64_list("k")?;
    let (t0, t1) = (p.f64("t0")?, p.f64("t1")?);
    let sweep = simulate_bh_sweep(&params, &ks, t0, t1, &BhSweepConfig::default())
        .map_err(|e| CliError::module("bosehubbard", e))?;
    let mut modes = Table::new("modes", &["k", "late_time", "frozen_pp", "final_t", "final_pp"]);
    for m in &sweep.modes {
        let frozen = match m.late_time {
            LateTime::FrozenAt(v) => v,
            _ => f64::NAN,
        };
        let last = m.trajectory.last();
        modes.push(vec![
            m.k.into(),
            late_time_name(&m.late_time).into(),
            frozen.into(),
            last.t.into(),
            last.moments.pp.into(),
        ]);
    }
    let c = params.sound_speed_squared_profile().sqrt().map_err(err_profile)?;
    let h = horizon_size(&c, t0, c.domain.end).map_err(|e| CliError::module("dispersion", e))?;
    let mut summary = Table::new("summary", &["late_time", "horizon_kind", "horizon"]);
    summary.push(vec![
        late_time_name(&sweep.summary).into(),
        if h.finite().is_some() { "finite" } else { "divergent" }.into(),
        h.finite().unwrap_or(f64::INFINITY).into(),
    ]);
    Ok(vec![modes, summary])
}

fn bh_variance(p: &Params) -> Result<Vec<Table>, CliError> {
    let n = p.f64("n")?;
    let mut t = Table::new("variance", &["nu", "variance"]);
    for nu in p.f64_list("nu")? {
        let v = frozen_number_variance(n, nu).map_err(|e| CliError::module("bosehubbard", e))?;
        t.push(vec![nu.into(), v.into()]);
    }
    Ok(vec![t])
}

fn instability_name(k: &InstabilityKind) -> &'static str {
    match k {
        InstabilityKind::Stable => "stable",
        InstabilityKind::RotonInstability { .. } => "roton_instability",
        InstabilityKind::MassGapInstability => "mass_gap_instability",
        InstabilityKind::StiffnessInstability => "stiffness_instability",
    }
}

fn dispersion(p: &Params) -> Result<Vec<Table>, CliError> {
    let d = match p.text("relation")?.as_str() {
        "quadratic" => DispersionRelation::Quadratic {
            mass_sq: p.number_or_profile("mass_sq")?,
            stiffness: p.number_or_profile("stiffness")?,
        },
        _ => DispersionRelation::Roton {
            k_crit: p.number_or_profile("k_crit")?,
            delta: p.number_or_profile("delta")?,
            curvature: p.number_or_profile("curvature")?,
        },
    };
    let err = |e| CliError::module("dispersion", e);
    let t = p.f64("t")?;
    let k_max = p.f64("k_max")?;
    let points = p.usize("points")?;
    if points < 2 {
        return Err(invalid("points", "need at least 2 grid points"));
    }
    let class = classify_dispersion(&d, t, k_max).map_err(err)?;
    let mut classification = Table::new("classification", &["t", "kind", "k_min", "omega_sq_min"]);
    classification.push(vec![
        t.into(),
        instability_name(&class.kind).into(),
        class.k_min.into(),
        class.omega_sq_min.into(),
    ]);
    let mut spectrum = Table::new("spectrum", &["k", "omega_sq"]);
    for i in 0..points {
        let k = k_max * i as f64 / (points - 1) as f64;
        spectrum.push(vec![k.into(), d.omega_sq(k * k, t).map_err(err)?.into()]);
    }
    let mut tables = vec![classification, spectrum];

    if let Some(ks) = p.opt_f64_list("k_modes")? {
        let (t0, t1) = (p.f64("t0")?, p.f64("t1")?);
        let cfg = ModeConfig::default();
        let rows = qsweep_core::exec::try_map(&ks, |&k| {
            let tr = evolve_mode(&d, k, t0, t1, Initial::GroundState, &cfg)?;
            let last = tr.last();
            let w2 = d.omega_sq(k * k, t1)?;
            let (r, phi) = if w2 > 0.0 {
                squeeze_parameters(&last, w2.sqrt())?
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok::<_, qsweep_core::modes::ModeError>(vec![
                Cell::from(k),
                w2.into(),
                r.into(),
                phi.into(),
                last.wronskian().into(),
                last.moments.determinant().into(),
            ])
        })
        .map_err(|e| CliError::module("modes", e))?;
        let mut modes = Table::new(
            "modes",
            &["k", "omega_sq_final", "squeeze_r", "squeeze_phi", "wronskian", "determinant"],
        );
        rows.into_iter().for_each(|r| modes.push(r));
        tables.push(modes);
    }

    match (p.opt_f64("g11")?, p.opt_f64("g22")?, p.opt_f64("g12")?) {
        (Some(g11), Some(g22), Some(g12)) => {
            let g = CouplingMatrix { g11, g22, g12 };
            let (gp, gm) = coupling_eigenvalues(&g);
            let mut mixture = Table::new("mixture", &["g_plus", "g_minus", "phase"]);
            mixture.push(vec![gp.into(), gm.into(), format!("{:?}", phase_of_mixture(&g)).into()]);
            tables.push(mixture);
        }
        (None, None, None) => {}
        _ => return Err(invalid("g11", "the coupling needs all of g11, g22 and g12")),
    }
    Ok(tables)
}

fn spinor(p: &Params, seed: u64) -> Result<Vec<Table>, CliError> {
    let params = SpinorQuenchParams {
        l: p.usize("l")?,
        a: p.f64("a")?,
        q_initial: p.f64("q_initial")?,
        q_final: p.f64("q_final")?,
        c2: p.f64("c2")?,
        rho: p.f64("rho")?,
        stiffness: p.f64("stiffness")?,
        t_grow: p.f64("t_grow")?,
        seed,
        cutoff_k: p.opt_f64("cutoff_k")?,
    };
    let radii = p.f64_list("radii")?;
    let err = |e| CliError::module("spinor", e);
    let report = winding_statistics(&params, &radii, p.usize("samples")?, seed).map_err(err)?;
    let fit = scaling_fit(&report).map_err(err)?;

    let mut winding = Table::new("winding", &["radius", "n_mean", "n_mean_se", "n_sq_mean", "n_sq_se"]);
    for i in 0..report.radii.len() {
        winding.push(vec![
            report.radii[i].into(),
            report.n_mean[i].into(),
            report.n_mean_se[i].into(),
            report.n_sq_mean[i].into(),
            report.n_sq_se[i].into(),
        ]);
    }
    let mut fits = Table::new("fit", &["model", "amplitude", "chi_sq", "best", "loglog_slope"]);
    for f in &fit.fits {
        fits.push(vec![
            f.model.name().into(),
            f.amplitude.into(),
            f.chi_sq.into(),
            (f.model == fit.best).into(),
            fit.loglog_slope.into(),
        ]);
    }
    let mut checks = Table::new(
        "checks",
        &["samples", "identity_checks", "identity_failures", "neutrality_failures"],
    );
    checks.push(vec![
        report.samples.into(),
        report.identity_checks.into(),
        report.identity_failures.into(),
        report.neutrality_failures.into(),
    ]);
    Ok(vec![winding, fits, checks])
}

fn weight_rule(p: &Params) -> Result<WeightRule, CliError> {
    Ok(match p.text("weight_rule")?.as_str() {
        "unit" => WeightRule::Unit,
        _ => WeightRule::ClauseDegree,
    })
}

fn scan_config(p: &Params) -> Result<ScanConfig, CliError> {
    let points = p.usize("points")?;
    if points < 16 {
        return Err(invalid("points", "need at least 16 grid points"));
    }
    Ok(ScanConfig {
        points,
        ..ScanConfig::default()
    })
}

fn aqc_compare(p: &Params, seed: u64) -> Result<Vec<Table>, CliError> {
    let (n, m, count) = (p.usize("n")?, p.usize("clauses")?, p.usize("instances")?);
    if count == 0 {
        return Err(invalid("instances", "need at least one instance"));
    }
    let err = |e| CliError::module("aqc", e);
    let batch = qsweep_core::exec::map_range(count, |i| random_ec3_instance(n, m, derive_seed(seed, i as u64), true))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let cfg = CompareConfig {
        scan: scan_config(p)?,
        weight_rule: weight_rule(p)?,
    };
    let c = compare_schemes(&batch, &cfg).map_err(err)?;
    let mut rows = Table::new(
        "instances",
        &[
            "index",
            "n",
            "clauses",
            "x_min_gap",
            "x_g_min",
            "x_runtime",
            "xy_min_gap",
            "xy_g_min",
            "xy_runtime",
            "xy_full_min_gap",
        ],
    );
    for r in &c.rows {
        rows.push(vec![
            r.index.into(),
            r.n.into(),
            r.clauses.into(),
            r.x.min_gap.into(),
            r.x.g_min.into(),
            r.x.runtime.into(),
            r.xy.min_gap.into(),
            r.xy.g_min.into(),
            r.xy.runtime.into(),
            r.xy.full_min_gap.unwrap_or(f64::NAN).into(),
        ]);
    }
    let mut summary = Table::new(
        "summary",
        &[
            "instances",
            "x_median_runtime",
            "xy_median_runtime",
            "x_median_gap",
            "xy_median_gap",
            "xy_wins",
            "x_wins",
            "ties",
        ],
    );
    summary.push(vec![
        c.rows.len().into(),
        c.x_median_runtime.into(),
        c.xy_median_runtime.into(),
        c.x_median_gap.into(),
        c.xy_median_gap.into(),
        c.xy_wins.into(),
        c.x_wins.into(),
        c.ties.into(),
    ]);
    Ok(vec![rows, summary])
}

fn aqc_scan(p: &Params, seed: u64) -> Result<Vec<Table>, CliError> {
    let err = |e| CliError::module("aqc", e);
    let (n, m) = (p.usize("n")?, p.usize("clauses")?);
    let inst = random_ec3_instance(n, m, seed, true).map_err(err)?;
    let h_out = build_h_out(&inst);
    let scheme = p.text("scheme")?;
    let (h_in, policy) = if scheme == "x" {
        (build_h_in_x(&inst, weight_rule(p)?).map_err(err)?, SectorPolicy::Full)
    } else {
        (build_h_in_xy(&inst), SectorPolicy::ProblemGroundState)
    };
    let scan = gap_scan(&h_in, &h_out, policy, &scan_config(p)?).map_err(err)?;
    let runtime = runtime_estimate(&scan).map_err(err)?;
    let mut points = Table::new("scan", &["g", "e0", "e1", "gap", "matrix_element", "full_gap"]);
    for pt in &scan.points {
        points.push(vec![
            pt.g.into(),
            pt.e0.into(),
            pt.e1.into(),
            pt.gap.into(),
            pt.matrix_element.unwrap_or(f64::NAN).into(),
            pt.full_gap.unwrap_or(f64::NAN).into(),
        ]);
    }
    let mut summary = Table::new("summary", &["scheme", "n", "clauses", "min_gap", "g_min", "runtime"]);
    summary.push(vec![
        scheme.into(),
        n.into(),
        m.into(),
        scan.min_gap.into(),
        scan.g_min.into(),
        runtime.into(),
    ]);
    Ok(vec![points, summary])
}

fn first_order_model(p: &Params) -> Result<FirstOrderModel, CliError> {
    let degree = u32::try_from(p.usize("norm_poly_degree")?).map_err(|e| invalid("norm_poly_degree", e))?;
    FirstOrderModel::new(p.f64("overlap_decay")?, degree).map_err(|e| CliError::module("scaling", e))
}

fn scaling(p: &Params) -> Result<Vec<Table>, CliError> {
    let (g, j) = (p.f64("g")?, p.f64("j")?);
    let model = first_order_model(p)?;
    let sizes = p.usize_list("sizes")?;
    if let Some(&bad) = sizes.iter().find(|&&n| n < 2) {
        return Err(invalid("sizes", format!("chain of {bad} sites")));
    }
    let two_pi_j = 2.0 * std::f64::consts::PI * j;
    let mut tfim = Table::new("tfim", &["n", "gap", "n_gap", "n_gap_over_2pi_j"]);
    let mut first = Table::new("first_order", &["n", "gap", "ln_gap"]);
    for &n in &sizes {
        let gap = tfim_gap(n, g, j);
        let ng = n as f64 * gap;
        tfim.push(vec![n.into(), gap.into(), ng.into(), (ng / two_pi_j).into()]);
        let fo = first_order_gap(&model, n as u32);
        first.push(vec![n.into(), fo.into(), fo.ln().into()]);
    }
    let dense_sizes = p.usize_list("dense_sizes")?;
    let dense_vals =
        qsweep_core::exec::try_map(&dense_sizes, |&n| tfim_sector_gap(n, g, j)).map_err(|e| CliError::module("scaling", e))?;
    let mut dense = Table::new("dense", &["n", "closed_form", "dense", "rel_diff"]);
    for (&n, d) in dense_sizes.iter().zip(dense_vals) {
        let exact = tfim_gap(n, g, j);
        dense.push(vec![n.into(), exact.into(), d.into(), ((d - exact).abs() / exact).into()]);
    }
    Ok(vec![tfim, first, dense])
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::Decaying => "decaying",
        Trend::Bounded => "bounded",
        Trend::Growing => "growing",
    }
}

fn model_name(m: GapModel) -> &'static str {
    match m {
        GapModel::FirstOrder => "first_order",
        GapModel::SecondOrder => "second_order",
    }
}

fn decoherence(p: &Params) -> Result<Vec<Table>, CliError> {
    let err = |e| CliError::module("scaling", e);
    let bath = BathSpectrum::power_law(
        p.f64("eta")?,
        p.f64("exponent")?,
        p.opt_f64("cutoff")?.unwrap_or(f64::INFINITY),
    )
    .map_err(err)?;
    let model = first_order_model(p)?;
    let j = p.f64("j")?;
    let sizes = p.usize_list("sizes")?;
    let report = scheme_vulnerability_report(&model, |n| tfim_gap(n, 1.0, j), &bath, &sizes, p.f64("prefactor")?)
        .map_err(err)?;
    let mut rows = Table::new("report", &["model", "n", "gap", "error"]);
    for r in &report.rows {
        rows.push(vec![model_name(r.model).into(), r.n.into(), r.gap.into(), r.error.into()]);
    }
    let mut trends = Table::new("trends", &["model", "trend"]);
    trends.push(vec![model_name(GapModel::FirstOrder).into(), trend_name(report.first_order_trend).into()]);
    trends.push(vec![model_name(GapModel::SecondOrder).into(), trend_name(report.second_order_trend).into()]);
    Ok(vec![rows, trends])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
        assert_eq!(Experiment::from_name("nope"), None);
    }

    #[test]
    fn schema_defaults_parse() {
        for e in Experiment::ALL {
            for p in e.params() {
                if let Presence::Default(lit) = p.default {
                    let v: Value = serde_json::from_str(lit).unwrap();
                    assert!(p.accepts(&v).is_ok(), "{}.{}", e.name(), p.key);
                }
            }
        }
    }
}
