mod common;

use std::f64::consts::PI;

use common::rel_close;
use wgeig::analysis::{
    direct_rows, eigen_diagnostics, energy_error, exact_laplacian_spectrum, fit_orders, laplacian_targets,
    lower_bound_check, rate_fit, references, ExactEigen,
};
use wgeig::eigsolve::{smallest_eigs, EigenCluster, EigenOptions};
use wgeig::field::{ScalarField, SineMode};
use wgeig::wg::{qh_project, Discretization, ProblemKind};
use wgeig::WgError;

#[test]
fn spectrum_matches_brute_force_enumeration() {
    let mut sums: Vec<u64> = (1..=40u64).flat_map(|m| (1..=40u64).map(move |n| m * m + n * n)).collect();
    sums.sort_unstable();
    let mut distinct: Vec<(u64, usize)> = Vec::new();
    for s in sums {
        match distinct.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => distinct.push((s, 1)),
        }
    }
    let spectrum = exact_laplacian_spectrum(30).unwrap();
    assert_eq!(spectrum.len(), 30);
    for (e, (s, mult)) in spectrum.iter().zip(distinct) {
        assert!(rel_close(e.value, s as f64 * PI * PI, 1e-15));
        assert_eq!(e.multiplicity, mult, "{s}");
        for &(m, n) in &e.modes {
            assert_eq!((m * m + n * n) as u64, s);
        }
    }
}

#[test]
fn targets_repeat_multiple_eigenvalues() {
    let t = laplacian_targets(6).unwrap();
    let values: Vec<f64> = t.iter().map(|e| e.value / (PI * PI)).collect();
    for (v, want) in values.iter().zip([2.0, 5.0, 5.0, 8.0, 10.0, 10.0]) {
        assert!((v - want).abs() < 1e-12);
    }
    assert!(matches!(exact_laplacian_spectrum(0), Err(WgError::InvalidConfig(_))));
}

fn cluster(level: u32, m: usize) -> (Discretization, Vec<EigenCluster>) {
    let d = Discretization::new(ProblemKind::Laplacian, level, 1, 0.1).unwrap();
    let pairs = smallest_eigs(&d.forms, m, &EigenOptions::default()).unwrap();
    (d, EigenCluster::group(pairs, 1e-6))
}

#[test]
fn multiplicity_mismatch_is_reported() {
    let (d, clusters) = cluster(3, 3);
    let wrong = ExactEigen {
        value: 2.0 * PI * PI,
        multiplicity: 2,
        modes: vec![(1, 1), (1, 2)],
    };
    assert_eq!(
        eigen_diagnostics(&clusters[0], &wrong, &d),
        Err(WgError::MultiplicityMismatch { computed: 1, exact: 2 })
    );
}

#[test]
fn diagnostics_are_ordered_and_decay() {
    let spectrum = exact_laplacian_spectrum(2).unwrap();
    let mut deltas = Vec::new();
    for level in 3..=5 {
        let (d, clusters) = cluster(level, 3);
        let diag = eigen_diagnostics(&clusters[1], &spectrum[1], &d).unwrap();
        assert!(diag.sigma <= diag.delta);
        assert!(diag.eta.unwrap() > 0.0 && diag.gamma.unwrap() > 0.0);
        deltas.push(diag.delta);
    }
    for w in deltas.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{deltas:?}");
    }
}

/// Energy distance from `uh` to the best multiple of `Q_h(cos t u1 + sin t u2)`.
fn distance_at(d: &Discretization, p1: &[f64], p2: &[f64], uh: &[f64], t: f64) -> f64 {
    let w: Vec<f64> = p1.iter().zip(p2).map(|(a, b)| t.cos() * a + t.sin() * b).collect();
    let a = &d.forms.stiffness;
    let s = a.bilinear(&w, uh) / a.quad_form(&w);
    let diff: Vec<f64> = w.iter().zip(uh).map(|(x, y)| s * x - y).collect();
    a.quad_form(&diff).max(0.0).sqrt()
}

#[test]
fn energy_error_matches_angle_sweep() {
    let (d, clusters) = cluster(4, 3);
    let gens = [SineMode::normalized(1, 2), SineMode::normalized(2, 1)];
    let p1 = qh_project(&gens[0], &d.space).into_coeffs();
    let p2 = qh_project(&gens[1], &d.space).into_coeffs();
    let refs: Vec<&dyn ScalarField> = gens.iter().map(|g| g as &dyn ScalarField).collect();
    for pair in &clusters[1].pairs {
        let got = energy_error(&d, &pair.vector, &refs).unwrap();

        let mut best = (f64::INFINITY, 0.0);
        for i in 0..721 {
            let t = PI * i as f64 / 720.0;
            let v = distance_at(&d, &p1, &p2, &pair.vector, t);
            if v < best.0 {
                best = (v, t);
            }
        }
        let mut step = PI / 720.0;
        for _ in 0..60 {
            for t in [best.1 - step, best.1 + step] {
                let v = distance_at(&d, &p1, &p2, &pair.vector, t);
                if v < best.0 {
                    best = (v, t);
                }
            }
            step *= 0.5;
        }
        assert!(rel_close(got, best.0, 1e-6), "{got} vs {}", best.0);
    }
}

#[test]
fn energy_error_ignores_sign_and_generator_order() {
    let (d, clusters) = cluster(4, 3);
    let gens = [SineMode::normalized(1, 2), SineMode::normalized(2, 1)];
    let fwd: Vec<&dyn ScalarField> = vec![&gens[0], &gens[1]];
    let rev: Vec<&dyn ScalarField> = vec![&gens[1], &gens[0]];
    let v = &clusters[1].pairs[0].vector;
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let base = energy_error(&d, v, &fwd).unwrap();
    assert!((energy_error(&d, &neg, &fwd).unwrap() - base).abs() <= 1e-12 * base);
    assert!((energy_error(&d, v, &rev).unwrap() - base).abs() <= 1e-12 * base);
}

#[test]
fn study_rows_and_orders() {
    let mut rows = Vec::new();
    for level in 3..=5 {
        let d = Discretization::new(ProblemKind::Laplacian, level, 1, 0.1).unwrap();
        let pairs = smallest_eigs(&d.forms, 3, &EigenOptions::default()).unwrap();
        let r = direct_rows(&d, &pairs).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().map(|r| r.index).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(r.iter().all(|r| r.lower_bound == Some(true)));
        rows.extend(r);
    }
    let orders = fit_orders(&rows);
    let first = orders
        .iter()
        .find(|o| o.quantity == "err_direct" && o.index == 1)
        .unwrap();
    assert!((1.7..2.1).contains(&first.order), "{}", first.order);
    let energy = orders.iter().find(|o| o.quantity == "energy_err" && o.index == 1).unwrap();
    assert!((0.7..1.1).contains(&energy.order), "{}", energy.order);
}

#[test]
fn biharmonic_reference_only_for_the_first_value() {
    let r = references(ProblemKind::Biharmonic, 3).unwrap();
    assert!(r[0].is_some() && r[1].is_none() && r[2].is_none());
}

#[test]
fn rate_fit_and_lower_bound_helpers() {
    let h = [0.5, 0.25, 0.125];
    let e: Vec<f64> = h.iter().map(|h: &f64| 7.0 * h.powi(3)).collect();
    assert!((rate_fit(&h, &e).unwrap() - 3.0).abs() < 1e-12);
    assert!(matches!(rate_fit(&h, &[1.0, 0.0, 1.0]), Err(WgError::NonPositive(_))));
    assert!(rate_fit(&[0.5], &[1.0]).is_err());
    assert_eq!(lower_bound_check(&[1e-3, 0.0, -1e-9]), vec![true, true, false]);
}
