//! Planar primitives: points, rectangular windows, disks and the point-set
//! container with its uniform-grid index.
//!
//! Disks are open, `B(z, r) = {w : |z - w| < r}`. Every count in the crate
//! goes through [`PointSet::count_in_disk`] or its closed sibling, both of
//! which agree exactly with a linear scan.

mod index;
pub mod io;

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use index::GridIndex;

use crate::error::{check_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotation by `angle` radians about `center`.
    pub fn rotate_about(self, center: Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }

    pub fn translate(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    pub fn scale(self, t: f64) -> Point {
        Point::new(self.x * t, self.y * t)
    }
}

/// Open disk `B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_positive("disk radius", radius)?;
        Ok(Disk { center, radius })
    }

    /// Strict containment, matching the open-disk convention.
    pub fn contains(&self, p: Point) -> bool {
        p.dist2(self.center) < self.radius * self.radius
    }
}

/// Axis-aligned rectangle standing in for a finite window of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Region {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmin >= xmax || ymin >= ymax {
            return Err(Error::InvalidRegion {
                xmin,
                xmax,
                ymin,
                ymax,
            });
        }
        Ok(Region {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    /// Square of the given side length centred at `center`.
    pub fn square(center: Point, side: f64) -> Result<Self> {
        check_positive("window side", side)?;
        let h = side / 2.0;
        Region::new(center.x - h, center.x + h, center.y - h, center.y + h)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Grows (or, for negative `margin`, shrinks) every side by `margin`.
    pub fn expand(&self, margin: f64) -> Result<Region> {
        Region::new(
            self.xmin - margin,
            self.xmax + margin,
            self.ymin - margin,
            self.ymax + margin,
        )
    }

    /// `other` lies inside `self`, up to a relative slack of 1e-9 of the
    /// larger extent.
    pub fn contains_region(&self, other: &Region) -> bool {
        let slack = 1e-9 * self.width().max(self.height()).max(1.0);
        other.xmin >= self.xmin - slack
            && other.xmax <= self.xmax + slack
            && other.ymin >= self.ymin - slack
            && other.ymax <= self.ymax + slack
    }

    pub fn bounding(points: &[Point]) -> Option<Region> {
        let first = points.first()?;
        let mut r = Region {
            xmin: first.x,
            xmax: first.x,
            ymin: first.y,
            ymax: first.y,
        };
        for p in &points[1..] {
            r.xmin = r.xmin.min(p.x);
            r.xmax = r.xmax.max(p.x);
            r.ymin = r.ymin.min(p.y);
            r.ymax = r.ymax.max(p.y);
        }
        Some(r)
    }
}

/// Sample spacing for scans over a [`Region`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        check_positive("grid step", step)?;
        Ok(GridSpec { step })
    }

    /// The step must be smaller than half the region's shorter side.
    pub fn validate_for(&self, region: &Region) -> Result<()> {
        if self.step < 0.5 * region.width().min(region.height()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "grid step",
                value: self.step,
                reason: "must be smaller than half the region's shorter side",
            })
        }
    }

    /// Half a cell diagonal: the most an interstitial point can be from
    /// the nearest sample.
    pub fn half_diagonal(&self) -> f64 {
        self.step * SQRT_2 / 2.0
    }

    /// Samples of `region` in row-major order, both edges included.
    pub fn samples(&self, region: &Region) -> Vec<Point> {
        let xs = axis_samples(region.xmin, region.xmax, self.step);
        let ys = axis_samples(region.ymin, region.ymax, self.step);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &y in &ys {
            for &x in &xs {
                out.push(Point::new(x, y));
            }
        }
        out
    }
}

fn axis_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * step })
        .collect()
}

/// Finite set of distinct points, indexed by a uniform grid.
///
/// `window` is the region the points were drawn from, when known. Density
/// sweeps use it (falling back to the bounding box) to decide whether a disk
/// lies inside the populated part of the plane.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
    index: GridIndex,
    window: Option<Region>,
}

impl PointSet {
    /// Rejects non-finite coordinates and duplicates.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        let index = GridIndex::build(&points);
        if let Some((_, j)) = index.find_duplicate(&points) {
            let p = points[j];
            return Err(Error::DuplicatePoint {
                index: j,
                x: p.x,
                y: p.y,
            });
        }
        Ok(PointSet {
            points,
            index,
            window: None,
        })
    }

    pub fn empty() -> Self {
        PointSet {
            points: Vec::new(),
            index: GridIndex::build(&[]),
            window: None,
        }
    }

    pub fn with_window(mut self, window: Region) -> Self {
        self.window = Some(window);
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self) -> &GridIndex {
        &self.index
    }

    pub fn window(&self) -> Option<Region> {
        self.window
    }

    pub fn bounding_box(&self) -> Option<Region> {
        Region::bounding(&self.points)
    }

    /// Declared window if any, else the bounding box.
    pub fn populated_window(&self) -> Option<Region> {
        self.window.or_else(|| self.bounding_box())
    }

    /// Keeps the points accepted by `keep`; the declared window is retained.
    pub fn filter(&self, mut keep: impl FnMut(&Point) -> bool) -> PointSet {
        let points: Vec<Point> = self.points.iter().copied().filter(|p| keep(p)).collect();
        PointSet {
            index: GridIndex::build(&points),
            points,
            window: self.window,
        }
    }

    /// Applies an injective map to every point; the window is dropped.
    pub fn map(&self, f: impl FnMut(&Point) -> Point) -> Result<PointSet> {
        PointSet::new(self.points.iter().map(f).collect())
    }

    /// Adds one point, rebuilding the index.
    pub fn with_point(&self, p: Point) -> Result<PointSet> {
        let mut pts = self.points.clone();
        pts.push(p);
        let mut out = PointSet::new(pts)?;
        out.window = self.window;
        Ok(out)
    }

    /// Number of points strictly inside the open disk.
    pub fn count_in_disk(&self, disk: &Disk) -> usize {
        self.index
            .count_within(&self.points, disk.center, disk.radius, false)
    }

    /// Number of points with `|p - center| <= radius`.
    pub fn count_in_closed_disk(&self, center: Point, radius: f64) -> usize {
        self.index.count_within(&self.points, center, radius, true)
    }

    /// Nearest point to `q` and its distance.
    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        self.index.nearest(&self.points, q, None)
    }
}

const BRUTE_FORCE_CUTOFF: usize = 48;

/// Minimum pairwise distance.
pub fn min_separation(ps: &PointSet) -> Result<f64> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::SeparationUndefined(n));
    }
    let pts = ps.points();
    if n <= BRUTE_FORCE_CUTOFF {
        return Ok(brute_force_separation(pts));
    }
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            ps.index
                .nearest(pts, pts[i], Some(i))
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

fn brute_force_separation(pts: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pts[i].dist(pts[j]));
        }
    }
    best
}

/// Grid estimate of the covering radius over `region`, with the sample
/// point that attains it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringScan {
    pub radius: f64,
    pub deepest: Point,
    pub samples: usize,
}

/// `max_q min_n |q - z_n|` over the grid samples of `region`.
///
/// This underestimates the true covering radius of the region by at most
/// [`GridSpec::half_diagonal`].
pub fn covering_radius(ps: &PointSet, region: &Region, grid: &GridSpec) -> Result<f64> {
    covering_scan(ps, region, grid).map(|s| s.radius)
}

pub fn covering_scan(ps: &PointSet, region: &Region, grid: &GridSpec) -> Result<CoveringScan> {
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    grid.validate_for(region)?;
    let samples = grid.samples(region);
    // ties resolve to the earliest sample so the witness is schedule-independent
    let (radius, at) = samples
        .par_iter()
        .enumerate()
        .map(|(i, &q)| (ps.nearest(q).map(|(_, d)| d).unwrap_or(f64::INFINITY), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(CoveringScan {
        radius,
        deepest: samples[at],
        samples: samples.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Coverage {
    Covered { radius: f64 },
    Uncovered { witness: Point, radius: f64 },
}

impl Coverage {
    pub fn is_covered(&self) -> bool {
        matches!(self, Coverage::Covered { .. })
    }
}

/// Conservative covering test: certifies only when the grid estimate plus
/// half a cell diagonal is within `sigma`.
pub fn is_covering(ps: &PointSet, sigma: f64, region: &Region, grid: &GridSpec) -> Result<Coverage> {
    check_positive("sigma", sigma)?;
    let scan = covering_scan(ps, region, grid)?;
    if scan.radius + grid.half_diagonal() <= sigma {
        Ok(Coverage::Covered {
            radius: scan.radius,
        })
    } else {
        Ok(Coverage::Uncovered {
            witness: scan.deepest,
            radius: scan.radius,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(pts: &[Point], d: &Disk) -> usize {
        pts.iter().filter(|p| d.contains(**p)).count()
    }

    fn hex(spacing: f64, half: i32) -> Vec<Point> {
        let h = spacing * 3f64.sqrt() / 2.0;
        let mut v = Vec::new();
        for b in -half..=half {
            for a in -half..=half {
                v.push(Point::new(a as f64 * spacing + b as f64 * spacing / 2.0, b as f64 * h));
            }
        }
        v
    }

    #[test]
    fn separation_of_345_pair() {
        let ps = PointSet::new(vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)]).unwrap();
        assert_eq!(min_separation(&ps).unwrap(), 5.0);
    }

    #[test]
    fn separation_of_singleton_is_undefined() {
        let ps = PointSet::new(vec![Point::ORIGIN]).unwrap();
        let err = min_separation(&ps).unwrap_err();
        assert!(err.to_string().contains("separation undefined"));
    }

    #[test]
    fn separation_matches_brute_force_on_hex() {
        let pts = hex(2.0, 15);
        let ps = PointSet::new(pts.clone()).unwrap();
        let fast = min_separation(&ps).unwrap();
        assert_eq!(fast, brute_force_separation(&pts));
        assert!((fast - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_are_rejected() {
        let err = PointSet::new(vec![Point::new(1.0, 2.0), Point::new(0.0, 0.0), Point::new(1.0, 2.0)])
            .unwrap_err();
        assert!(matches!(err, Error::DuplicatePoint { index: 2, .. }));
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(matches!(
            PointSet::new(vec![Point::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn open_disk_convention() {
        let d = Disk::new(Point::ORIGIN, 1.0).unwrap();
        assert_eq!(PointSet::empty().count_in_disk(&d), 0);
        assert_eq!(PointSet::new(vec![Point::ORIGIN]).unwrap().count_in_disk(&d), 1);
        assert_eq!(PointSet::new(vec![Point::new(1.0, 0.0)]).unwrap().count_in_disk(&d), 0);
        assert_eq!(
            PointSet::new(vec![Point::new(1.0, 0.0)])
                .unwrap()
                .count_in_closed_disk(Point::ORIGIN, 1.0),
            1
        );
    }

    #[test]
    fn hex_count_in_radius_10_disk() {
        let pts = hex(1.0, 30);
        let ps = PointSet::new(pts.clone()).unwrap();
        let d = Disk::new(Point::ORIGIN, 10.0).unwrap();
        let n = ps.count_in_disk(&d);
        assert_eq!(n, brute_count(&pts, &d));
        let expected = std::f64::consts::PI * 100.0 * 2.0 / 3f64.sqrt();
        assert!((n as f64 - expected).abs() <= 80.0 * 2.0 / 3f64.sqrt(), "{n}");
    }

    #[test]
    fn covering_radius_of_single_point_is_corner_distance() {
        let ps = PointSet::new(vec![Point::ORIGIN]).unwrap();
        let region = Region::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let grid = GridSpec::new(0.01).unwrap();
        let r = covering_radius(&ps, &region, &grid).unwrap();
        assert!((r - SQRT_2).abs() <= grid.half_diagonal());
        assert!(is_covering(&ps, 10.0, &region, &grid).unwrap().is_covered());
    }

    #[test]
    fn covering_radius_of_square_lattice() {
        let mut pts = Vec::new();
        for i in -10..=10 {
            for j in -10..=10 {
                pts.push(Point::new(i as f64, j as f64));
            }
        }
        let ps = PointSet::new(pts).unwrap();
        let region = Region::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let grid = GridSpec::new(0.01).unwrap();
        let r = covering_radius(&ps, &region, &grid).unwrap();
        assert!((r - SQRT_2 / 2.0).abs() <= grid.half_diagonal(), "{r}");
    }

    #[test]
    fn covering_scan_on_empty_set_errors() {
        let region = Region::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let grid = GridSpec::new(0.1).unwrap();
        assert!(matches!(
            covering_radius(&PointSet::empty(), &region, &grid),
            Err(Error::EmptyPointSet)
        ));
    }

    #[test]
    fn grid_step_must_be_below_half_short_side() {
        let region = Region::new(0.0, 1.0, 0.0, 4.0).unwrap();
        assert!(GridSpec::new(0.5).unwrap().validate_for(&region).is_err());
        assert!(GridSpec::new(0.49).unwrap().validate_for(&region).is_ok());
        assert!(GridSpec::new(0.0).is_err());
    }

    #[test]
    fn region_validation() {
        assert!(Region::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Region::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Region::new(0.0, f64::INFINITY, 0.0, 1.0).is_err());
    }

    #[test]
    fn samples_include_both_edges() {
        let region = Region::new(0.0, 1.0, 0.0, 0.5).unwrap();
        let s = GridSpec::new(0.3).unwrap().samples(&region);
        assert_eq!(s.len(), 5 * 3);
        assert_eq!(s.last().copied(), Some(Point::new(1.0, 0.5)));
    }
}
