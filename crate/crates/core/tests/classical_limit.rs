use cpi_core::dynamics::{
    classical_propagator, liouville_evolve, BuiltinModel, Distribution, FlowOptions, Grid, LiouvilleOptions,
};
use cpi_core::quantum::{semiclassical_concentration, QuantumModel, SemiclassicalOptions};
use nalgebra::DVector;

#[test]
fn narrow_density_peak_follows_the_trajectory() {
    let grid = Grid::new((-2.0, 2.0), (-2.0, 2.0), 128, 128).unwrap();
    let phi = DVector::from_row_slice(&[0.8, 0.3]);
    for model in [BuiltinModel::Harmonic, BuiltinModel::Pendulum, BuiltinModel::Quartic] {
        let d = Distribution::gaussian(grid, (phi[0], phi[1]), (0.08, 0.08)).unwrap();
        let r = liouville_evolve(&d, &model, 1.5, &LiouvilleOptions::default()).unwrap();
        let end = classical_propagator(&model, &phi, 0.0, 1.5, &FlowOptions::default()).unwrap().phi_final;
        let (_, _, q, p) = r.distribution.peak_cell();
        assert!((q - end[0]).abs() <= grid.dq() && (p - end[1]).abs() <= grid.dp(), "{model:?}");
    }
}

#[test]
fn quantum_peak_and_classical_density_agree() {
    // the ħ → 0 packet and the classical density both sit on the same endpoint
    let phi = DVector::from_row_slice(&[1.0, 0.0]);
    let rows = semiclassical_concentration(QuantumModel::Harmonic, &phi, 0.9, &[1e-3], &SemiclassicalOptions::default())
        .unwrap();
    let grid = Grid::new((-2.0, 2.0), (-2.0, 2.0), 128, 128).unwrap();
    let d = Distribution::gaussian(grid, (1.0, 0.0), (0.05, 0.05)).unwrap();
    let r = liouville_evolve(&d, &BuiltinModel::Harmonic, 0.9, &LiouvilleOptions::default()).unwrap();
    let (mq, _) = r.distribution.mean();
    assert!((rows[0].peak - mq).abs() < 1e-3);
}
