use qsweep_core::aqc::*;

fn unique(n: usize, m: usize, seed: u64) -> EC3Instance {
    random_ec3_instance(n, m, seed, true).unwrap()
}

#[test]
fn problem_ground_state_is_the_solution() {
    let inst = unique(7, 6, 3);
    let sol = inst.solutions().unwrap();
    assert_eq!(sol.len(), 1);
    let h = build_h_out(&inst);
    let lv = lowest_levels(&h, 2, None).unwrap();
    assert!(lv.values[0].abs() < 1e-9);
    assert!(lv.values[1] >= 4.0 - 1e-9);
    let idx = assignment_index(inst.n, sol[0]);
    assert!((lv.vectors[0][idx].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn xy_driver_conserves_magnetization() {
    let inst = unique(6, 5, 8);
    let h_in = build_h_in_xy(&inst);
    assert!(h_in.commutes_with(&SpinHamiltonian::sigma_z_total(inst.n)));
    let h_out = build_h_out(&inst);
    let sol = inst.solutions().unwrap()[0];
    let sector = Sector::Magnetization(assignment_magnetization(inst.n, sol));
    assert_eq!(ground_sector(&h_out, &LanczosConfig::default()).unwrap(), sector);
    let h = interpolate(&h_in, &h_out, 0.4).unwrap();
    let inside = lowest_levels(&h, 1, Some(sector)).unwrap();
    let full = lowest_levels(&h, 1, None).unwrap();
    assert!(inside.values[0] >= full.values[0] - 1e-9);
}

#[test]
fn scans_of_both_schemes_end_in_the_solution() {
    let inst = unique(6, 5, 12);
    let h_out = build_h_out(&inst);
    let cfg = ScanConfig {
        points: 16,
        ..ScanConfig::default()
    };
    let x = gap_scan(&build_h_in_x(&inst, WeightRule::ClauseDegree).unwrap(), &h_out, SectorPolicy::Full, &cfg).unwrap();
    let xy = gap_scan(&build_h_in_xy(&inst), &h_out, SectorPolicy::ProblemGroundState, &cfg).unwrap();
    for s in [&x, &xy] {
        let last = s.points.iter().max_by(|a, b| a.g.total_cmp(&b.g)).unwrap();
        assert_eq!(last.g, 1.0);
        assert!(last.e0.abs() < 1e-9);
        assert!(s.min_gap > 0.0 && s.min_gap <= last.gap + 1e-12);
        assert!(runtime_estimate(s).unwrap().is_finite());
    }
    assert!(x.sector.is_none());
    assert!(matches!(xy.sector, Some(Sector::Magnetization(_))));
    assert!(xy.full_min_gap.unwrap() <= xy.min_gap + 1e-12);
}

#[test]
fn comparison_is_order_preserving_and_consistent() {
    let batch: Vec<_> = (0..3).map(|i| unique(5, 4, 40 + i)).collect();
    let cfg = CompareConfig {
        scan: ScanConfig {
            points: 16,
            ..ScanConfig::default()
        },
        ..CompareConfig::default()
    };
    let c = compare_schemes(&batch, &cfg).unwrap();
    assert_eq!(c.rows.len(), 3);
    for (i, r) in c.rows.iter().enumerate() {
        assert_eq!(r.index, i);
        assert_eq!(r.clauses, batch[i].clauses.len());
    }
    assert_eq!(c.xy_wins + c.x_wins + c.ties, 3);
    let runtimes: Vec<f64> = c.rows.iter().map(|r| r.x.runtime).collect();
    assert_eq!(c.x_median_runtime, median(&runtimes));
}

#[test]
fn unsatisfiable_instance_has_positive_ground_energy() {
    // Every variable sits in exactly two clauses; whether an exact cover
    // exists must agree with whether the penalty reaches zero.
    let inst = EC3Instance::new(6, vec![[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]).unwrap();
    let count = inst.count_solutions(10).unwrap();
    let e0 = lowest_levels(&build_h_out(&inst), 1, None).unwrap().values[0];
    assert_eq!(e0.abs() < 1e-9, count > 0);
}
