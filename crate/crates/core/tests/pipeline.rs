//! Scan, allocation and interference checking working together.

use sbs_core::array_geometry::Direction;
use sbs_core::frame_scheduler::{
    allocate, check_interference_free, Assignment, BeamId, ResourceGrid, UserRequest, Violation,
};
use sbs_core::link_budget::{max_sensing_range, RadioParams};
use sbs_core::scanning::{scanning_period, BeamWidths, SceneGeometry};

fn dcbs() -> Vec<Direction<f64>> {
    [-120.0, -60.0, 60.0, 120.0].map(|p| Direction::new(p, 45.0).unwrap()).to_vec()
}

fn geometry() -> SceneGeometry<f64> {
    let r = max_sensing_range(&RadioParams::ism_24ghz(0.0)).unwrap();
    SceneGeometry::with_range(r).unwrap()
}

#[test]
fn avoiding_scan_is_clean_and_naive_scan_is_not() {
    let widths = BeamWidths::new(2.0, 3.0).unwrap();
    let grid = ResourceGrid::for_subcarriers(4, 20, 1024).unwrap();

    let avoiding = scanning_period(&geometry(), &widths, &dcbs()).unwrap().dwells().unwrap();
    assert!(check_interference_free(&grid, &avoiding, &dcbs(), &widths).is_empty());

    let naive = scanning_period(&geometry(), &widths, &[]).unwrap().dwells().unwrap();
    let hits = check_interference_free(&grid, &naive, &dcbs(), &widths);
    assert!(!hits.is_empty());
    assert!(hits.iter().all(|v| matches!(v, Violation::FdbOnDcb { .. })));
    assert_eq!(naive.len() - avoiding.len(), hits.len());
}

#[test]
fn hand_built_schedules_are_caught() {
    let widths = BeamWidths::new(2.0, 3.0).unwrap();
    let mut grid = ResourceGrid::new(4, 2, 2).unwrap();
    let cell = |user, beam| Assignment { user, beam: BeamId(beam), subframe: 1, block: 0 };
    grid.assign_unchecked(cell(1, 2)).unwrap();
    grid.assign_unchecked(cell(2, 2)).unwrap();
    grid.assign_unchecked(cell(3, 0)).unwrap();
    let v = check_interference_free::<f64>(&grid, &[], &dcbs(), &widths);
    assert_eq!(v.len(), 2);
    assert!(v.contains(&Violation::UserOnFdb { user: 3, subframe: 1, block: 0 }));
    assert!(v.contains(&Violation::DoubleBooked { beam: BeamId(2), subframe: 1, block: 0, users: vec![1, 2] }));
}

#[test]
fn oversubscribed_beam_fills_exactly() {
    let mut grid = ResourceGrid::new(4, 20, 16).unwrap();
    let cap = grid.capacity_per_beam();
    let reqs: Vec<_> = (0..5).map(|u| UserRequest { user: u, beam: BeamId(3), demand: cap / 3 }).collect();
    let report = allocate(&mut grid, &reqs);
    let total: usize = (0..5).map(|u| grid.granted(u)).sum();
    assert_eq!(total, cap);
    assert_eq!(report.shortfalls.len(), 2);
    assert_eq!(report.shortfalls.iter().map(|s| s.missing()).sum::<usize>(), 5 * (cap / 3) - cap);
    assert!(check_interference_free::<f64>(&grid, &[], &dcbs(), &BeamWidths::new(2.0, 3.0).unwrap()).is_empty());
}

#[test]
fn fine_beams_still_terminate() {
    let widths = BeamWidths::new(0.1, 0.1).unwrap();
    let geom = SceneGeometry::new(10.0, 20.0, 60.0, 0.01).unwrap();
    let scan = scanning_period(&geom, &widths, &dcbs()).unwrap();
    assert!(scan.dwell_count > 0);
    assert_eq!(scan.dwell_count as f64 * 0.01, scan.t_sc);
}
