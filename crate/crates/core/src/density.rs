//! Empirical Beurling densities and circle packing/covering densities.
//!
//! The limits `r -> inf` and the sup/inf over every centre in the plane are
//! replaced by a finite radius ladder and a grid sweep of centres. Each
//! sweep yields a [`DensityProfile`]; the limit is then extrapolated by a
//! least-squares fit `ratio(r) ~ c + d / r`, where the `d / r` term absorbs
//! the boundary layer of the disk.
//!
//! Point data must extend at least `r_max` (plus the circle radius for
//! packings) beyond the sweep region. This is checked, because an unpadded
//! window silently biases every ratio downward.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{covering_scan, min_separation, GridSpec, Point, PointSet, Region};

/// Which centres were sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaSweep {
    pub region: Region,
    pub step: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub radii: Vec<f64>,
    pub sup_ratio: Vec<f64>,
    pub inf_ratio: Vec<f64>,
    pub zeta_sweep: ZetaSweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub raw_at_rmax: f64,
    pub fit_residual: f64,
    pub kind: DensityKind,
}

/// Equal circles of radius `r0` centred at the points of `centers`.
#[derive(Clone, Debug)]
pub struct PackingConfig {
    pub centers: PointSet,
    pub r0: f64,
}

impl PackingConfig {
    pub fn new(centers: PointSet, r0: f64) -> Result<Self> {
        check_positive("r0", r0)?;
        Ok(PackingConfig { centers, r0 })
    }
}

/// Radius ladder `{10, 15, 20, 30, 40} * sigma`.
pub fn default_radii(sigma: f64) -> Vec<f64> {
    [10.0, 15.0, 20.0, 30.0, 40.0].iter().map(|k| k * sigma).collect()
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidRadii("empty"));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidRadii("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRadii("radii must be strictly increasing"));
    }
    Ok(())
}

fn check_padding(ps: &PointSet, zeta_region: &Region, reach: f64) -> Result<()> {
    let fits = match (ps.populated_window(), zeta_region.expand(reach)) {
        (Some(window), Ok(needed)) => window.contains_region(&needed),
        _ => false,
    };
    if fits {
        Ok(())
    } else {
        Err(Error::WindowTooSmall { r_max: reach })
    }
}

/// Sweeps every sampled centre and every radius through `ratio`, keeping
/// the per-radius maximum and minimum.
fn sweep<F>(radii: &[f64], zeta_region: &Region, zeta_grid: &GridSpec, ratio: F) -> Result<DensityProfile>
where
    F: Fn(Point, f64) -> f64 + Sync,
{
    zeta_grid.validate_for(zeta_region)?;
    let samples = zeta_grid.samples(zeta_region);
    let m = radii.len();
    let (sup, inf) = samples
        .par_iter()
        .map(|&zeta| {
            let v: Vec<f64> = radii.iter().map(|&r| ratio(zeta, r)).collect();
            (v.clone(), v)
        })
        .reduce(
            || (vec![f64::NEG_INFINITY; m], vec![f64::INFINITY; m]),
            |(mut s1, mut i1), (s2, i2)| {
                for k in 0..m {
                    s1[k] = s1[k].max(s2[k]);
                    i1[k] = i1[k].min(i2[k]);
                }
                (s1, i1)
            },
        );
    Ok(DensityProfile {
        radii: radii.to_vec(),
        sup_ratio: sup,
        inf_ratio: inf,
        zeta_sweep: ZetaSweep {
            region: *zeta_region,
            step: zeta_grid.step,
            samples: samples.len(),
        },
    })
}

/// `n(Z, B(zeta, r)) / (pi r^2)`.
pub fn disk_ratio(ps: &PointSet, zeta: Point, r: f64) -> f64 {
    ps.index().count_within(ps.points(), zeta, r, false) as f64 / (PI * r * r)
}

pub fn density_profile(
    ps: &PointSet,
    radii: &[f64],
    zeta_region: &Region,
    zeta_grid: &GridSpec,
) -> Result<DensityProfile> {
    validate_radii(radii)?;
    check_padding(ps, zeta_region, *radii.last().unwrap())?;
    sweep(radii, zeta_region, zeta_grid, |zeta, r| disk_ratio(ps, zeta, r))
}

/// Least-squares fit `y ~ c + d / r`; returns `(c, d, rms misfit)`.
pub fn fit_inverse_radius(radii: &[f64], values: &[f64]) -> Result<(f64, f64, f64)> {
    if radii.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: radii.len(),
            got: values.len(),
        });
    }
    if radii.len() < 3 {
        return Err(Error::InvalidRadii("extrapolation needs at least 3 radii"));
    }
    let n = radii.len() as f64;
    // shifting by the first value makes constant data fit exactly
    let y0 = values[0];
    let xs: Vec<f64> = radii.iter().map(|r| 1.0 / r).collect();
    let ys: Vec<f64> = values.iter().map(|v| v - y0).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let d = sxy / sxx;
    let c = ym - d * xm;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c - d * x).powi(2)).sum();
    Ok((y0 + c, d, (rss / n).sqrt()))
}

fn extrapolate(radii: &[f64], values: &[f64], kind: DensityKind) -> Result<DensityEstimate> {
    let (c, _, rms) = fit_inverse_radius(radii, values)?;
    Ok(DensityEstimate {
        value: c.max(0.0),
        raw_at_rmax: *values.last().unwrap(),
        fit_residual: rms,
        kind,
    })
}

/// Extrapolated `D+` from the sup ratios.
pub fn estimate_upper_density(profile: &DensityProfile) -> Result<DensityEstimate> {
    extrapolate(&profile.radii, &profile.sup_ratio, DensityKind::Upper)
}

/// Extrapolated `D-` from the inf ratios.
pub fn estimate_lower_density(profile: &DensityProfile) -> Result<DensityEstimate> {
    extrapolate(&profile.radii, &profile.inf_ratio, DensityKind::Lower)
}

/// Packing ratio profile: circles meeting `B(zeta, r)`, i.e. centres with
/// `|z - zeta| < r + r0`, each contributing area `pi r0^2`.
pub fn packing_profile(
    cfg: &PackingConfig,
    radii: &[f64],
    zeta_region: &Region,
    zeta_grid: &GridSpec,
) -> Result<DensityProfile> {
    validate_radii(radii)?;
    let separation = min_separation(&cfg.centers)?;
    // relative slack so lattices built at exactly 2 r0 still qualify
    if separation < 2.0 * cfg.r0 * (1.0 - 1e-9) {
        return Err(Error::NotAPacking {
            separation,
            r0: cfg.r0,
        });
    }
    let r0 = cfg.r0;
    check_padding(&cfg.centers, zeta_region, radii.last().unwrap() + r0)?;
    let ps = &cfg.centers;
    sweep(radii, zeta_region, zeta_grid, |zeta, r| {
        let n = ps.index().count_within(ps.points(), zeta, r + r0, false);
        n as f64 * r0 * r0 / (r * r)
    })
}

pub fn packing_density(
    cfg: &PackingConfig,
    radii: &[f64],
    zeta_region: &Region,
    zeta_grid: &GridSpec,
) -> Result<DensityEstimate> {
    estimate_upper_density(&packing_profile(cfg, radii, zeta_region, zeta_grid)?)
}

/// Covering ratio profile: circles contained in `B(zeta, r)`, i.e. centres
/// with `|z - zeta| <= r - r0`.
///
/// The precondition is that the circles cover the swept area: the grid
/// estimate of the covering radius over `zeta_region` padded by `r_max`
/// must not exceed `r0`. The check has no half-diagonal margin, since the
/// extremal hexagonal covering is exactly tight; it rejects any gap larger
/// than the grid resolution.
pub fn covering_profile(
    cfg: &PackingConfig,
    radii: &[f64],
    zeta_region: &Region,
    zeta_grid: &GridSpec,
) -> Result<DensityProfile> {
    validate_radii(radii)?;
    let r0 = cfg.r0;
    if radii[0] <= r0 {
        return Err(Error::InvalidRadii("covering radii must exceed r0"));
    }
    let r_max = *radii.last().unwrap();
    check_padding(&cfg.centers, zeta_region, r_max)?;
    let working = zeta_region.expand(r_max)?;
    let scan_grid = GridSpec::new(zeta_grid.step.min(r0 / 4.0))?;
    let scan = covering_scan(&cfg.centers, &working, &scan_grid)?;
    if scan.radius > r0 * (1.0 + 1e-9) {
        return Err(Error::NotACovering {
            radius: scan.radius,
            r0,
            x: scan.deepest.x,
            y: scan.deepest.y,
        });
    }
    let ps = &cfg.centers;
    sweep(radii, zeta_region, zeta_grid, |zeta, r| {
        let n = ps.index().count_within(ps.points(), zeta, r - r0, true);
        n as f64 * r0 * r0 / (r * r)
    })
}

pub fn covering_density(
    cfg: &PackingConfig,
    radii: &[f64],
    zeta_region: &Region,
    zeta_grid: &GridSpec,
) -> Result<DensityEstimate> {
    estimate_lower_density(&covering_profile(cfg, radii, zeta_region, zeta_grid)?)
}

/// `2 / (sqrt(3) sigma^2)`: upper bound on `D+` for a `sigma`-separated set,
/// from the hexagonal packing bound applied to circles of radius `sigma / 2`.
pub fn separation_density_bound(sigma: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    Ok(2.0 / (3f64.sqrt() * sigma * sigma))
}

/// `2 / (3 sqrt(3) sigma^2)`: lower bound on `D-` for a set whose
/// `sigma`-circles cover the plane, from the hexagonal covering bound.
pub fn covering_density_bound(sigma: f64) -> Result<f64> {
    check_positive("sigma", sigma)?;
    Ok(2.0 / (3.0 * 3f64.sqrt() * sigma * sigma))
}
