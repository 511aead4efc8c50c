//! Hexagonal and square lattices parameterised by nearest-neighbour spacing,
//! and seeded random perturbations of point sets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::{Point, PointSet, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Hexagonal,
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    /// Nearest-neighbour distance.
    pub spacing: f64,
    pub offset: Point,
    /// Radians, about `offset`.
    pub rotation: f64,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, spacing: f64) -> Result<Self> {
        check_positive("lattice spacing", spacing)?;
        Ok(LatticeSpec {
            kind,
            spacing,
            offset: Point::ORIGIN,
            rotation: 0.0,
        })
    }

    pub fn hexagonal(spacing: f64) -> Result<Self> {
        Self::new(LatticeKind::Hexagonal, spacing)
    }

    pub fn square(spacing: f64) -> Result<Self> {
        Self::new(LatticeKind::Square, spacing)
    }

    pub fn with_offset(mut self, offset: Point) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_rotation(mut self, rotation: f64) -> Self {
        self.rotation = rotation;
        self
    }

    /// Basis vectors after rotation.
    pub fn basis(&self) -> (Point, Point) {
        let s = self.spacing;
        let (v1, v2) = match self.kind {
            LatticeKind::Hexagonal => (Point::new(s, 0.0), Point::new(s / 2.0, s * 3f64.sqrt() / 2.0)),
            LatticeKind::Square => (Point::new(s, 0.0), Point::new(0.0, s)),
        };
        if self.rotation == 0.0 {
            (v1, v2)
        } else {
            (
                v1.rotate_about(Point::ORIGIN, self.rotation),
                v2.rotate_about(Point::ORIGIN, self.rotation),
            )
        }
    }

    /// Area of a fundamental cell.
    pub fn cell_area(&self) -> f64 {
        match self.kind {
            LatticeKind::Hexagonal => 3f64.sqrt() / 2.0 * self.spacing * self.spacing,
            LatticeKind::Square => self.spacing * self.spacing,
        }
    }

    /// Points per unit area.
    pub fn density(&self) -> f64 {
        1.0 / self.cell_area()
    }

    /// Exact covering radius: circumradius of the Delaunay triangle for the
    /// hexagonal lattice, half the cell diagonal for the square one.
    pub fn covering_radius(&self) -> f64 {
        match self.kind {
            LatticeKind::Hexagonal => self.spacing / 3f64.sqrt(),
            LatticeKind::Square => self.spacing / 2f64.sqrt(),
        }
    }

    fn point(&self, a: i64, b: i64, basis: (Point, Point)) -> Point {
        let (v1, v2) = basis;
        let (a, b) = (a as f64, b as f64);
        Point::new(
            self.offset.x + a * v1.x + b * v2.x,
            self.offset.y + a * v1.y + b * v2.y,
        )
    }

    /// Bounding box of the fundamental parallelogram at the offset. Sweeping
    /// a sample point over it visits every translation class.
    pub fn translation_cell(&self) -> Region {
        let (v1, v2) = self.basis();
        let o = self.offset;
        let corners = [o, o.translate(v1.x, v1.y), o.translate(v2.x, v2.y), o.translate(v1.x + v2.x, v1.y + v2.y)];
        Region::bounding(&corners).expect("four corners")
    }
}

/// All lattice points inside `region` (edges included).
///
/// The integer ranges come from mapping the region's corners through the
/// inverse basis, padded by 2.
pub fn generate(spec: &LatticeSpec, region: &Region) -> Result<PointSet> {
    check_positive("lattice spacing", spec.spacing)?;
    let basis = spec.basis();
    let (v1, v2) = basis;
    let det = v1.x * v2.y - v1.y * v2.x;
    let corners = [
        Point::new(region.xmin, region.ymin),
        Point::new(region.xmax, region.ymin),
        Point::new(region.xmin, region.ymax),
        Point::new(region.xmax, region.ymax),
    ];
    let (mut amin, mut amax, mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in corners {
        let dx = c.x - spec.offset.x;
        let dy = c.y - spec.offset.y;
        let a = (dx * v2.y - dy * v2.x) / det;
        let b = (v1.x * dy - v1.y * dx) / det;
        amin = amin.min(a);
        amax = amax.max(a);
        bmin = bmin.min(b);
        bmax = bmax.max(b);
    }
    let (a0, a1) = (amin.floor() as i64 - 2, amax.ceil() as i64 + 2);
    let (b0, b1) = (bmin.floor() as i64 - 2, bmax.ceil() as i64 + 2);
    let mut points = Vec::new();
    for b in b0..=b1 {
        for a in a0..=a1 {
            let p = spec.point(a, b, basis);
            if region.contains(p) {
                points.push(p);
            }
        }
    }
    Ok(PointSet::new(points)?.with_window(*region))
}

/// Hexagonal patch of all lattice points within `rings` hexagonal steps of
/// the origin: `3 rings (rings + 1) + 1` points.
pub fn hexagonal_patch(spacing: f64, rings: u32) -> Result<PointSet> {
    let spec = LatticeSpec::hexagonal(spacing)?;
    let basis = spec.basis();
    let k = i64::from(rings);
    let mut points = Vec::new();
    for b in -k..=k {
        for a in -k..=k {
            if a.abs().max(b.abs()).max((a + b).abs()) <= k {
                points.push(spec.point(a, b, basis));
            }
        }
    }
    PointSet::new(points)
}

const MAX_PERTURB_ATTEMPTS: u64 = 100;

/// Displaces each point by an independent uniform vector in the disk of
/// radius `magnitude`. Deterministic in `seed`; on coincident output points
/// the draw is repeated with a derived sub-seed.
pub fn perturb(ps: &PointSet, magnitude: f64, seed: u64) -> Result<PointSet> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "perturbation magnitude",
            value: magnitude,
            reason: "must be finite and non-negative",
        });
    }
    for attempt in 0..MAX_PERTURB_ATTEMPTS {
        let sub_seed = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
        let moved: Vec<Point> = ps
            .points()
            .iter()
            .map(|p| {
                let u: f64 = rng.gen();
                let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
                let r = magnitude * u.sqrt();
                Point::new(p.x + r * theta.cos(), p.y + r * theta.sin())
            })
            .collect();
        match PointSet::new(moved) {
            Ok(out) => return Ok(match ps.window() {
                Some(w) => out.with_window(w),
                None => out,
            }),
            Err(Error::DuplicatePoint { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PerturbCollision(MAX_PERTURB_ATTEMPTS as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::min_separation;

    fn brute_separation(ps: &PointSet) -> f64 {
        let p = ps.points();
        let mut best = f64::INFINITY;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                best = best.min(p[i].dist(p[j]));
            }
        }
        best
    }

    #[test]
    fn hexagonal_separation_is_the_spacing() {
        let region = Region::square(Point::ORIGIN, 20.0).unwrap();
        let ps = generate(&LatticeSpec::hexagonal(1.0).unwrap(), &region).unwrap();
        let sep = min_separation(&ps).unwrap();
        assert_eq!(sep, brute_separation(&ps));
        assert!((sep - 1.0).abs() < 1e-12, "{sep}");

        let ps2 = generate(&LatticeSpec::hexagonal(2.0).unwrap(), &region).unwrap();
        assert!((min_separation(&ps2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hexagonal_interior_points_have_six_unit_neighbours() {
        let region = Region::square(Point::ORIGIN, 20.0).unwrap();
        let ps = generate(&LatticeSpec::hexagonal(1.0).unwrap(), &region).unwrap();
        let inner = region.expand(-2.0).unwrap();
        let mut checked = 0;
        for &p in ps.points().iter().filter(|p| inner.contains(**p)) {
            let near = ps.points().iter().filter(|q| (q.dist(p) - 1.0).abs() < 1e-9).count();
            let closer = ps.points().iter().filter(|q| **q != p && q.dist(p) < 1.0 - 1e-9).count();
            assert_eq!(near, 6);
            assert_eq!(closer, 0);
            checked += 1;
        }
        assert!(checked > 200);
    }

    #[test]
    fn square_three_by_three() {
        let region = Region::new(0.0, 2.0, 0.0, 2.0).unwrap();
        let ps = generate(&LatticeSpec::square(1.0).unwrap(), &region).unwrap();
        assert_eq!(ps.len(), 9);
    }

    #[test]
    fn tiny_region_yields_empty_set() {
        let region = Region::new(0.1, 0.2, 0.1, 0.2).unwrap();
        let ps = generate(&LatticeSpec::square(1.0).unwrap(), &region).unwrap();
        assert!(ps.is_empty());
    }

    #[test]
    fn hexagonal_density_converges() {
        // windows in generic position; a lattice-aligned closed window picks
        // up a whole extra boundary row on each side
        let target = 2.0 / 3f64.sqrt();
        for (side, cx, cy) in [(40.0, 0.37, 0.21), (40.0, -0.13, 0.58), (60.0, 0.5, 0.0), (80.0, 0.11, 0.29)] {
            let region = Region::square(Point::new(cx, cy), side).unwrap();
            let ps = generate(&LatticeSpec::hexagonal(1.0).unwrap(), &region).unwrap();
            let ratio = ps.len() as f64 / region.area();
            assert!((ratio - target).abs() / target < 0.02, "side {side}: {ratio}");
        }
    }

    #[test]
    fn rotation_is_equivariant_about_the_offset() {
        let offset = Point::new(0.3, -0.2);
        let theta = 0.37;
        let spec = LatticeSpec::hexagonal(1.0).unwrap().with_offset(offset);
        let region = Region::square(offset, 30.0).unwrap();
        // 62.5 is not a squared lattice distance, so no point sits on the cut
        let inside = |p: &Point| p.dist2(offset) < 62.5;
        let base = generate(&spec, &region).unwrap().filter(inside);
        let rotated = generate(&spec.with_rotation(theta), &region).unwrap().filter(inside);
        assert_eq!(base.len(), rotated.len());
        for p in base.points() {
            let q = p.rotate_about(offset, theta);
            let (_, d) = rotated.nearest(q).unwrap();
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn patch_sizes() {
        for (rings, n) in [(0, 1), (1, 7), (2, 19), (4, 61)] {
            assert_eq!(hexagonal_patch(2.0, rings).unwrap().len(), n);
        }
        let p = hexagonal_patch(2.0, 4).unwrap();
        let max = p.points().iter().map(|q| q.dist(Point::ORIGIN)).fold(0.0, f64::max);
        assert!((max - 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let region = Region::square(Point::ORIGIN, 10.0).unwrap();
        let ps = generate(&LatticeSpec::hexagonal(1.0).unwrap(), &region).unwrap();
        let out = perturb(&ps, 0.0, 42).unwrap();
        assert_eq!(out.points(), ps.points());
    }

    #[test]
    fn perturbation_bounds_separation_and_is_deterministic() {
        let region = Region::square(Point::ORIGIN, 30.0).unwrap();
        let ps = generate(&LatticeSpec::hexagonal(2.0).unwrap(), &region).unwrap();
        let a = perturb(&ps, 0.1, 7).unwrap();
        let b = perturb(&ps, 0.1, 7).unwrap();
        assert_eq!(a.points(), b.points());
        let sep = min_separation(&a).unwrap();
        assert!((1.8..=2.2).contains(&sep), "{sep}");
        for (p, q) in ps.points().iter().zip(a.points()) {
            assert!(p.dist(*q) <= 0.1 + 1e-12);
        }
        assert_ne!(perturb(&ps, 0.1, 8).unwrap().points(), a.points());
    }

    #[test]
    fn negative_magnitude_is_rejected() {
        let ps = PointSet::new(vec![Point::ORIGIN]).unwrap();
        assert!(perturb(&ps, -1.0, 0).is_err());
    }
}
