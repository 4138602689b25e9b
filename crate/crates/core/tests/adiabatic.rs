mod common;

use egqft::adiabatic::*;
use egqft::fock::{DiscreteKernel, MomentumGrid, Statistics};
use egqft::qed::{Normalization, SelfEnergy, VacuumPolarization};
use num_complex::Complex64;

fn schedule(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.125 * 0.5f64.powi(k as i32)).collect()
}

#[test]
fn classification_of_synthetic_sequences() {
    let eps = schedule(12);
    let conv: Vec<Complex64> = eps.iter().map(|e| Complex64::new(0.7 + 3.0 * e * e, 0.0)).collect();
    let c = classify(&eps, &conv);
    assert_eq!(c.verdict, Verdict::Converged);
    assert!((c.limit_estimate.unwrap().re - 0.7).abs() < 1e-9);

    let div: Vec<Complex64> = eps.iter().map(|e| Complex64::new(0.2 / e + 1.0, 0.0)).collect();
    let c = classify(&eps, &div);
    assert_eq!(c.verdict, Verdict::Diverged);
    assert!((c.exponent + 1.0).abs() < 0.05, "{}", c.exponent);

    let log: Vec<Complex64> = eps.iter().map(|e| Complex64::new(-e.ln() / e, 0.0)).collect();
    assert_eq!(classify(&eps, &log).verdict, Verdict::Diverged);

    let zero = vec![Complex64::new(0.0, 0.0); eps.len()];
    assert_eq!(classify(&eps, &zero).verdict, Verdict::Converged);

    assert_eq!(classify(&eps[..2], &conv[..2]).verdict, Verdict::Inconclusive);
}

#[test]
fn schedules_are_validated() {
    assert!(ScalingFamily::new(Profile::Gaussian, 1.0, vec![]).is_err());
    assert!(ScalingFamily::new(Profile::Gaussian, 1.0, vec![0.1, 0.2]).is_err());
    assert!(ScalingFamily::new(Profile::Gaussian, 1.0, vec![0.1, 1e-9]).is_err());
    let d = ScalingFamily::default_schedule();
    assert_eq!(d.len(), 12);
    assert_eq!(d[0], 0.125);
    assert_eq!(*d.last().unwrap(), 2f64.powi(-14));
}

#[test]
fn profiles_share_the_value_at_the_origin() {
    // g(0) = int ghat / 2pi
    for p in Profile::ALL {
        let s = common::simpson(|k| p.transform(Complex64::new(k, 0.0)), -40.0, 40.0, 40_000);
        assert!((s.re / (2.0 * std::f64::consts::PI) - 1.0).abs() < 1e-10, "{p:?}");
        assert!(s.im.abs() < 1e-12);
    }
}

#[test]
fn massless_on_shell_sigma_has_no_limit_setup() {
    assert!(SelfEnergy::build(0.0, 0.1, Normalization::OnShell).is_err());
}

#[test]
fn current_channel_converges_to_the_smearing_free_value() {
    let vp = VacuumPolarization::build(1.0, Normalization::OnShell).unwrap();
    let fam = ScalingFamily::new(Profile::Gaussian, 1.0, schedule(8)).unwrap();
    let data = TestData::default();
    let r = sweep(Channel::PiIntoCurrent, Insertion::Pi(&vp), &data, &fam).unwrap();
    assert_eq!(r.verdict, Verdict::Converged);
    let free = r.epsilon_free.unwrap();
    assert!((r.limit_estimate.unwrap() - free).norm() <= 1e-6, "{:?} vs {free}", r.limit_estimate);
    assert!(free.norm() > 1e-5);
}

#[test]
fn thread_count_does_not_change_results() {
    let se = SelfEnergy::build(1.0, 0.1, Normalization::OnShell).unwrap();
    let fam = ScalingFamily::new(Profile::Modulated, 1.0, schedule(3)).unwrap();
    let data = TestData::default();
    let a = sweep_with_threads(Channel::SigmaIntoPsi, Insertion::Sigma(&se), &data, &fam, 1).unwrap();
    let b = sweep_with_threads(Channel::SigmaIntoPsi, Insertion::Sigma(&se), &data, &fam, 3).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn channel_must_match_insertion() {
    let se = SelfEnergy::build(1.0, 0.1, Normalization::OnShell).unwrap();
    let fam = ScalingFamily::new(Profile::Gaussian, 1.0, schedule(2)).unwrap();
    assert!(smeared_contribution(Channel::PiIntoA, Insertion::Sigma(&se), &TestData::default(), &fam, 0.1).is_err());
}

#[test]
fn weak_limit_orders() {
    let fam = ScalingFamily::new(Profile::Gaussian, 1.0, schedule(3)).unwrap();
    let first = weak_limit_vacuum(1, &fam, 1.0, [0.0; 3]).unwrap();
    assert!(first.values.iter().all(|v| v.norm() == 0.0));
    assert!(matches!(weak_limit_vacuum(3, &fam, 1.0, [0.0; 3]), Err(AdiabaticError::Unsupported(3))));
    assert!(VacuumGraph::build(0.0, [0.0; 3]).is_err());
}

#[test]
fn vacuum_graph_is_normalized_at_zero() {
    let g = VacuumGraph::build(1.0, [0.0; 3]).unwrap();
    assert!(g.eval(0.0).unwrap().norm() < 1e-14);
    // three subtractions: t(s) = O(s^3) near the origin
    let r = g.eval(-0.02).unwrap().norm() / g.eval(-0.01).unwrap().norm();
    assert!((r - 8.0).abs() < 0.1, "{r}");
}

#[test]
fn limit_operators_multiply_like_kernels() {
    let grid = MomentumGrid::with_weights(vec![0.5, 0.7, 1.0, 0.2], Statistics::Bose).unwrap();
    let a = DiscreteKernel::from_fn(1, 1, 4, |t| Complex64::new(t[0] as f64 - t[1] as f64, 0.3));
    let b = DiscreteKernel::from_fn(1, 1, 4, |t| Complex64::new(0.5, t[0] as f64 * t[1] as f64));
    let ks = product_of_limits(&grid, &a, &b).unwrap();
    assert_eq!(ks.len(), 2);
    assert_eq!((ks[0].l, ks[0].m), (2, 2));
    assert_eq!((ks[1].l, ks[1].m), (1, 1));
}
