use dtmf_web::{diagram_svg, dtm_grid, point_weights, radius_curve, sample_cloud};

#[test]
fn sample_is_seeded_and_flat() {
    let a = sample_cloud("circle-with-outliers", 40, 5, 9).unwrap();
    assert_eq!(a.len(), 90);
    assert_eq!(a, sample_cloud("circle-with-outliers", 40, 5, 9).unwrap());
    assert!(sample_cloud("torus", 10, 0, 0).is_err());
}

#[test]
fn weights_vanish_on_isolated_masses() {
    let w = point_weights(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0], 0.25).unwrap();
    assert_eq!(w, vec![0.0; 4]);
    assert!(point_weights(&[0.0, 0.0], 1.5).is_err());
}

#[test]
fn diagram_of_a_circle_has_a_loop() {
    let x = sample_cloud("circle", 60, 0, 2).unwrap();
    let svg = diagram_svg(&x, 0.05, 1.0).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("#2ca02c"));
    assert_eq!(svg, diagram_svg(&x, 0.05, 1.0).unwrap());
    assert!(diagram_svg(&x, 0.05, 0.5).is_err());
    assert!(diagram_svg(&x, 0.05, f64::INFINITY).is_ok());
}

#[test]
fn grid_is_row_major_from_top_left() {
    // One point at the top-left corner of the grid.
    let g = dtm_grid(&[-1.0, 1.0], 0.5, 3, 1.0).unwrap();
    assert_eq!(g.len(), 9);
    assert_eq!(g[0], 0.0);
    assert!((g[8] - 8f64.sqrt()).abs() < 1e-12);
    assert!(dtm_grid(&[0.0, 0.0], 0.5, 1, 1.0).is_err());
}

#[test]
fn radius_curve_starts_at_the_weight() {
    let r = radius_curve(0.5, 2.0, 1.0, 5).unwrap();
    assert!(r[0].is_nan() && r[1].is_nan());
    assert_eq!(r[2], 0.0);
    assert!((r[4] - 0.75f64.sqrt()).abs() < 1e-15);
    let inf = radius_curve(0.5, f64::INFINITY, 1.0, 3).unwrap();
    assert_eq!(inf[2], 1.0);
}
