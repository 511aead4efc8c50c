//! Independent checks of the Fock-space numerics: quadrature for the
//! reproducing property, an inertia/bisection eigenvalue oracle, and
//! ring-by-ring lattice sums for the Gershgorin floor.

#![allow(clippy::needless_range_loop, clippy::manual_range_contains)]

use std::f64::consts::PI;

use circlefock::fock::{
    conditioning_sweep, eig_extremes, evaluate, gershgorin_riesz_lower_bound, gram, interpolate, kernel,
    HermitianMatrix,
};
use circlefock::lattice::hexagonal_patch;
use circlefock::{Point, PointSet};
use num_complex::Complex64;
use proptest::prelude::*;

/// `(alpha / pi) * integral f(z) conj(K(z, w)) exp(-alpha |z|^2) dA(z)` in
/// polar coordinates: trapezoid in angle, composite Simpson in radius.
fn reproduce(alpha: f64, w: Point, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let n_theta = 128;
    let n_rho = 4000; // even
    let rho_max = 9.0 / alpha.sqrt();
    let h = rho_max / n_rho as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..=n_rho {
        let rho = i as f64 * h;
        let simpson = if i == 0 || i == n_rho {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let mut ring = Complex64::new(0.0, 0.0);
        for j in 0..n_theta {
            let theta = 2.0 * PI * j as f64 / n_theta as f64;
            let z = Complex64::from_polar(rho, theta);
            let k = kernel(alpha, Point::new(z.re, z.im), w).unwrap();
            ring += f(z) * k.conj();
        }
        ring *= 2.0 * PI / n_theta as f64;
        total += ring * (simpson * rho * (-alpha * rho * rho).exp());
    }
    total * (h / 3.0) * (alpha / PI)
}

#[test]
fn kernel_reproduces_monomials() {
    let alpha = 1.0;
    for w in [Point::new(0.0, 0.0), Point::new(0.6, -0.3), Point::new(-0.2, 0.9)] {
        let wc = Complex64::new(w.x, w.y);
        for k in 0..=4 {
            let got = reproduce(alpha, w, |z| z.powi(k));
            let want = wc.powi(k);
            let err = (got - want).norm();
            assert!(err <= 1e-6 * want.norm().max(1e-3), "k={k} w={w:?}: {got} vs {want}");
        }
    }
}

/// Number of eigenvalues below `x`, from the signs of the LDL^H pivots of
/// `A - x I` (Sylvester's law of inertia).
fn count_below(a: &HermitianMatrix, x: f64) -> usize {
    let n = a.dim();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j) - if i == j { x } else { 0.0 }).collect())
        .collect();
    let mut negatives = 0;
    for k in 0..n {
        let mut d = m[k][k].re;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = m[i][k] / d;
            for j in k + 1..n {
                let mkj = m[k][j];
                m[i][j] -= l * mkj;
            }
        }
    }
    negatives
}

fn bisect(a: &HermitianMatrix, which: usize) -> f64 {
    // eigenvalue number `which` (0-based, ascending); Gram spectra lie in [0, n]
    let (mut lo, mut hi) = (-1.0, a.dim() as f64 + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(a, mid) > which {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn small_sets() -> impl Strategy<Value = (PointSet, f64)> {
    (prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2..=8), 0.3..3.0f64).prop_filter_map("distinct", |(v, a)| {
        let ps = PointSet::new(v.into_iter().map(|(x, y)| Point::new(x, y)).collect()).ok()?;
        (circlefock::geometry::min_separation(&ps).ok()? > 0.05).then_some((ps, a))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eig_extremes_agree_with_bisection(case in small_sets()) {
        let (ps, alpha) = case;
        let g = gram(alpha, &ps).unwrap();
        let (lo, hi) = eig_extremes(&g, 1e-14).unwrap();
        let n = g.n();
        prop_assert!((lo - bisect(&g.entries, 0)).abs() < 1e-8, "{} vs {}", lo, bisect(&g.entries, 0));
        prop_assert!((hi - bisect(&g.entries, n - 1)).abs() < 1e-8);
    }

    #[test]
    fn gram_structure(case in small_sets()) {
        let (ps, alpha) = case;
        let g = gram(alpha, &ps).unwrap();
        let n = g.n();
        for m in 0..n {
            prop_assert_eq!(g.get(m, m), Complex64::new(1.0, 0.0));
            for k in 0..n {
                prop_assert_eq!(g.get(m, k), g.get(k, m).conj());
                let d2 = ps.points()[m].dist2(ps.points()[k]);
                prop_assert!((g.get(m, k).norm() - (-alpha * d2 / 2.0).exp()).abs() < 1e-15);
                prop_assert!(g.get(m, k).norm() <= 1.0);
            }
        }
        prop_assert_eq!(g.entries.trace(), n as f64);
        let (lo, hi) = eig_extremes(&g, 1e-14).unwrap();
        prop_assert!(lo >= -1e-12 && lo <= 1.0 + 1e-12 && hi >= 1.0 - 1e-12);
        prop_assert!(lo >= gershgorin_riesz_lower_bound(&g) - 1e-12);
    }

    #[test]
    fn pair_closed_form(d in 0.05..6.0f64, alpha in 0.2..4.0f64, x in -5.0..5.0f64, y in -5.0..5.0f64, phi in 0.0..6.3f64) {
        let a = Point::new(x, y);
        let b = Point::new(x + d * phi.cos(), y + d * phi.sin());
        let g = gram(alpha, &PointSet::new(vec![a, b]).unwrap()).unwrap();
        let m = (-alpha * d * d / 2.0).exp();
        let (lo, hi) = eig_extremes(&g, 1e-14).unwrap();
        prop_assert!((lo - (1.0 - m)).abs() < 1e-8);
        prop_assert!((hi - (1.0 + m)).abs() < 1e-8);
    }

    #[test]
    fn translation_leaves_spectrum_invariant(case in small_sets(), dx in -6.0..6.0f64, dy in -6.0..6.0f64) {
        let (ps, alpha) = case;
        let moved = ps.map(|p| p.translate(dx, dy)).unwrap();
        let (g, h) = (gram(alpha, &ps).unwrap(), gram(alpha, &moved).unwrap());
        for m in 0..g.n() {
            for k in 0..g.n() {
                prop_assert!((g.get(m, k).norm() - h.get(m, k).norm()).abs() < 1e-14);
            }
        }
        let (a, b) = (eig_extremes(&g, 1e-14).unwrap(), eig_extremes(&h, 1e-14).unwrap());
        prop_assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
    }
}

/// Sum of `exp(-alpha |v|^2 / 2)` over nonzero hexagonal lattice vectors
/// within `rings` hexagonal steps, grouped by squared norm `a^2 + ab + b^2`.
fn ring_sum(alpha: f64, sigma: f64, rings: i64) -> f64 {
    let mut by_norm = std::collections::BTreeMap::<i64, usize>::new();
    for a in -rings..=rings {
        for b in -rings..=rings {
            if (a, b) != (0, 0) && a.abs().max(b.abs()).max((a + b).abs()) <= rings {
                *by_norm.entry(a * a + a * b + b * b).or_default() += 1;
            }
        }
    }
    by_norm
        .into_iter()
        .map(|(q, mult)| mult as f64 * (-alpha * sigma * sigma * q as f64 / 2.0).exp())
        .sum()
}

#[test]
fn ring_sum_oracle_leading_terms() {
    // 6 e^-2 + 6 e^-6 + 6 e^-8 + 12 e^-14 + ... for sigma = 2, alpha = 1
    let leading = 6.0 * (-2.0f64).exp() + 6.0 * (-6.0f64).exp() + 6.0 * (-8.0f64).exp() + 12.0 * (-14.0f64).exp();
    let s = ring_sum(1.0, 2.0, 4);
    assert!(s > leading && s - leading < 1e-7, "{s} {leading}");
    assert!((s - 0.829).abs() < 1e-3);
}

#[test]
fn hexagonal_patch_gershgorin_floor_and_interpolation() {
    let ps = hexagonal_patch(2.0, 4).unwrap();
    assert_eq!(ps.len(), 61);
    let g = gram(1.0, &ps).unwrap();
    let row = g.max_off_diagonal_row_sum();
    assert!((row - ring_sum(1.0, 2.0, 4)).abs() < 1e-12, "the centre row sees the whole patch");
    let floor = gershgorin_riesz_lower_bound(&g);
    assert!((floor - 0.171).abs() < 1e-3, "{floor}");
    assert!(floor >= 1.0 - ring_sum(1.0, 2.0, 30) - 1e-14);

    let centre = ps.points().iter().position(|p| *p == Point::ORIGIN).unwrap();
    let mut targets = vec![Complex64::new(0.0, 0.0); ps.len()];
    targets[centre] = Complex64::new(1.0, 0.0);
    let sol = interpolate(1.0, &ps, &targets).unwrap();
    assert!(sol.residual_inf <= 1e-10, "{}", sol.residual_inf);
    assert!(sol.lambda_min >= floor);
    assert!(sol.lambda_max <= 1.0 + row);
    assert!(sol.condition <= (1.0 + row) / floor, "{}", sol.condition);
    assert!(sol.condition <= 11.0);
    assert!(sol.lambda_min <= 1.0 && sol.lambda_max >= 1.0);

    // round trip through direct evaluation
    for (p, v) in ps.points().iter().zip(&targets) {
        let f = evaluate(1.0, &ps, &sol.coefficients, *p).unwrap();
        let weight = (-0.5 * p.dist2(Point::ORIGIN)).exp();
        assert!(((f - v) * weight).norm() <= sol.residual_inf + 1e-15);
    }
}

#[test]
fn well_conditioned_residual_is_relative_to_targets() {
    let ps = hexagonal_patch(2.2, 3).unwrap();
    let targets: Vec<Complex64> = (0..ps.len())
        .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()) * (0.5 * ps.points()[k].dist2(Point::ORIGIN)).exp())
        .collect();
    let sol = interpolate(1.0, &ps, &targets).unwrap();
    let wnorm = ps
        .points()
        .iter()
        .zip(&targets)
        .map(|(p, v)| (v * (-0.5 * p.dist2(Point::ORIGIN)).exp()).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(sol.condition <= 1e4);
    assert!(sol.residual_inf <= 1e-8 * wnorm);
}

#[test]
fn conditioning_degrades_as_spacing_shrinks() {
    let rows = conditioning_sweep(1.0, &[2.2, 2.0, 1.8, 1.6], 4).unwrap();
    for pair in rows.windows(2) {
        // rows ascend in sigma, so lambda_min must ascend strictly
        assert!(pair[0].lambda_min < pair[1].lambda_min, "{pair:?}");
    }
    for (sigma, row) in [(1.6, &rows[0]), (2.2, &rows[3])] {
        let g = gram(1.0, &hexagonal_patch(sigma, 4).unwrap()).unwrap();
        assert!(row.lambda_min >= gershgorin_riesz_lower_bound(&g) - 1e-12);
    }
    let collapse = conditioning_sweep(1.0, &[0.5], 4).unwrap();
    assert!(collapse[0].lambda_min < 1e-6, "{:?}", collapse[0]);
}
