use lambda2_demo::*;

#[test]
fn sweep_matches_the_family_results() {
    for g in ["T1", "T2", "W1", "W2"] {
        let r = feasibility_sweep(g, 0.0, 0.0, 1.0).unwrap();
        assert_eq!((r.feasible, r.infeasible), (0, 720), "{g}");
    }
    let r = feasibility_sweep("T_less", 0.0, 0.0, 1.0).unwrap();
    assert_eq!(r.feasible, 720);
    assert!(r.example.is_some());
    assert!(feasibility_sweep("T1", 0.0, 0.0, 0.0).is_err());
    assert!(feasibility_sweep("K4", 0.0, 0.0, 1.0).is_err());
}

#[test]
fn grid_integrates_to_one() {
    let (rows, cols) = (180, 360);
    let grid = density_grid([1.0, 1.0, 0.0], 8.0, false, rows, cols).unwrap();
    let mut mass = 0.0;
    for r in 0..rows {
        let theta = std::f64::consts::PI * (r as f64 + 0.5) / rows as f64;
        let band: f64 = grid[r * cols..(r + 1) * cols].iter().sum();
        mass += band * theta.sin();
    }
    mass *= (std::f64::consts::PI / rows as f64) * (std::f64::consts::TAU / cols as f64) / (4.0 * std::f64::consts::PI);
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    let even = density_grid([0.0, 0.0, 1.0], 3.0, true, 4, 2).unwrap();
    assert!((even[0] - even[7]).abs() < 1e-12);
    assert!(density_grid([0.0, 0.0, 1.0], -1.0, false, 2, 2).is_err());
}

#[test]
fn summary_is_green() {
    let v = weights_and_ledger();
    assert_eq!(v["weights"]["tetra"], "1");
    assert_eq!(v["weights"]["double_theta"], "2");
    assert_eq!(v["ledger"]["all_green"], true);
}
