use super::{Point, Region};

/// Dense uniform grid over the bounding box, stored CSR-style: the points of
/// cell `k` are `order[start[k]..start[k + 1]]`.
#[derive(Clone, Debug)]
pub struct GridIndex {
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    start: Vec<u32>,
    order: Vec<u32>,
}

const MAX_CELLS_PER_POINT: usize = 4;

impl GridIndex {
    /// Cell side is the typical spacing `sqrt(bbox area / n)`, widened when
    /// that would produce more than a few cells per point.
    pub fn build(points: &[Point]) -> Self {
        let Some(bbox) = Region::bounding(points) else {
            return GridIndex {
                origin: Point::ORIGIN,
                cell: 1.0,
                cols: 1,
                rows: 1,
                start: vec![0, 0],
                order: Vec::new(),
            };
        };
        let n = points.len();
        let w = bbox.xmax - bbox.xmin;
        let h = bbox.ymax - bbox.ymin;
        let mut cell = (w * h / n as f64).sqrt();
        let extent = w.max(h);
        if !(cell.is_finite() && cell > 0.0) {
            // collinear or single point
            cell = if extent > 0.0 { extent / n as f64 } else { 1.0 };
        }
        let max_cells = (MAX_CELLS_PER_POINT * n).max(16) as f64;
        while ((w / cell).floor() + 1.0) * ((h / cell).floor() + 1.0) > max_cells {
            cell *= 1.5;
        }
        let cols = (w / cell).floor() as usize + 1;
        let rows = (h / cell).floor() as usize + 1;
        let origin = Point::new(bbox.xmin, bbox.ymin);

        let mut keys = Vec::with_capacity(n);
        let mut start = vec![0u32; cols * rows + 1];
        for p in points {
            let k = Self::key_for(origin, cell, cols, rows, *p);
            keys.push(k);
            start[k + 1] += 1;
        }
        for k in 0..cols * rows {
            start[k + 1] += start[k];
        }
        let mut fill = start.clone();
        let mut order = vec![0u32; n];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        GridIndex {
            origin,
            cell,
            cols,
            rows,
            start,
            order,
        }
    }

    fn key_for(origin: Point, cell: f64, cols: usize, rows: usize, p: Point) -> usize {
        let cx = (((p.x - origin.x) / cell).floor() as isize).clamp(0, cols as isize - 1) as usize;
        let cy = (((p.y - origin.y) / cell).floor() as isize).clamp(0, rows as isize - 1) as usize;
        cy * cols + cx
    }

    pub fn cell_side(&self) -> f64 {
        self.cell
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    /// Indices of the points stored in cell `(cx, cy)`.
    pub fn cell_points(&self, cx: usize, cy: usize) -> &[u32] {
        let k = cy * self.cols + cx;
        &self.order[self.start[k] as usize..self.start[k + 1] as usize]
    }

    /// Closed rectangle of cell `(cx, cy)`. The last row and column absorb
    /// the bounding-box edge.
    pub fn cell_rect(&self, cx: usize, cy: usize) -> (f64, f64, f64, f64) {
        let x0 = self.origin.x + cx as f64 * self.cell;
        let y0 = self.origin.y + cy as f64 * self.cell;
        (x0, x0 + self.cell, y0, y0 + self.cell)
    }

    fn cell_range(&self, lo: f64, hi: f64, origin: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin) / self.cell).floor();
        let b = ((hi - origin) / self.cell).floor();
        if b < 0.0 || a > (n - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    }

    /// Counts points within `radius` of `center`: strictly (`< r`) for an
    /// open disk, or `<= r` when `closed`. Cells entirely inside the disk are
    /// counted wholesale; only boundary cells are scanned.
    pub fn count_within(&self, points: &[Point], center: Point, radius: f64, closed: bool) -> usize {
        if points.is_empty() || !(radius > 0.0) {
            return 0;
        }
        let Some((x0, x1)) = self.cell_range(center.x - radius, center.x + radius, self.origin.x, self.cols)
        else {
            return 0;
        };
        let Some((y0, y1)) = self.cell_range(center.y - radius, center.y + radius, self.origin.y, self.rows)
        else {
            return 0;
        };
        let r2 = radius * radius;
        let pad = 1e-7 * self.cell;
        let inside = r2 * (1.0 - 1e-12);
        let outside = r2 * (1.0 + 1e-12);
        let mut count = 0usize;
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                let ids = self.cell_points(cx, cy);
                if ids.is_empty() {
                    continue;
                }
                let (ax, bx, ay, by) = self.cell_rect(cx, cy);
                let (ax, bx, ay, by) = (ax - pad, bx + pad, ay - pad, by + pad);
                let fx = (center.x - ax).abs().max((center.x - bx).abs());
                let fy = (center.y - ay).abs().max((center.y - by).abs());
                // points clamped into edge cells can sit outside the nominal rect
                let edge = cx == 0 || cy == 0 || cx == self.cols - 1 || cy == self.rows - 1;
                if !edge && fx * fx + fy * fy < inside {
                    count += ids.len();
                    continue;
                }
                let nx = (ax - center.x).max(0.0).max(center.x - bx);
                let ny = (ay - center.y).max(0.0).max(center.y - by);
                if !edge && nx * nx + ny * ny > outside {
                    continue;
                }
                count += ids
                    .iter()
                    .filter(|&&i| {
                        let d2 = points[i as usize].dist2(center);
                        if closed {
                            d2 <= r2
                        } else {
                            d2 < r2
                        }
                    })
                    .count();
            }
        }
        count
    }

    /// Nearest indexed point to `q`, optionally skipping index `skip`.
    /// Rings of cells are searched outward until no unsearched cell can hold
    /// a closer point.
    pub fn nearest(&self, points: &[Point], q: Point, skip: Option<usize>) -> Option<(usize, f64)> {
        let available = points.len() - usize::from(skip.is_some());
        if available == 0 {
            return None;
        }
        let fx = ((q.x - self.origin.x) / self.cell).floor();
        let fy = ((q.y - self.origin.y) / self.cell).floor();
        let cx = fx.clamp(0.0, (self.cols - 1) as f64) as isize;
        let cy = fy.clamp(0.0, (self.rows - 1) as f64) as isize;
        let mut best: Option<(usize, f64)> = None;
        let max_ring = self.cols.max(self.rows) as isize;
        for ring in 0..=max_ring {
            for (x, y) in ring_cells(cx, cy, ring) {
                if x < 0 || y < 0 || x >= self.cols as isize || y >= self.rows as isize {
                    continue;
                }
                for &i in self.cell_points(x as usize, y as usize) {
                    let i = i as usize;
                    if Some(i) == skip {
                        continue;
                    }
                    let d2 = points[i].dist2(q);
                    match best {
                        Some((bi, bd)) if d2 > bd || (d2 == bd && i > bi) => {}
                        _ => best = Some((i, d2)),
                    }
                }
            }
            // lower bound on the distance to any cell outside this block
            let bx0 = self.origin.x + (cx - ring) as f64 * self.cell;
            let bx1 = self.origin.x + (cx + ring + 1) as f64 * self.cell;
            let by0 = self.origin.y + (cy - ring) as f64 * self.cell;
            let by1 = self.origin.y + (cy + ring + 1) as f64 * self.cell;
            let covers_grid = cx - ring <= 0
                && cy - ring <= 0
                && cx + ring >= self.cols as isize - 1
                && cy + ring >= self.rows as isize - 1;
            if covers_grid {
                break;
            }
            if let Some((_, bd)) = best {
                let gap = (q.x - bx0).min(bx1 - q.x).min(q.y - by0).min(by1 - q.y);
                if gap > 0.0 && bd <= gap * gap * (1.0 - 1e-12) {
                    break;
                }
            }
        }
        best.map(|(i, d2)| (i, d2.sqrt()))
    }

    /// First pair `(i, j)` with `i < j` and identical coordinates.
    pub(crate) fn find_duplicate(&self, points: &[Point]) -> Option<(usize, usize)> {
        let mut found: Option<(usize, usize)> = None;
        for k in 0..self.cols * self.rows {
            let ids = &self.order[self.start[k] as usize..self.start[k + 1] as usize];
            for (a, &i) in ids.iter().enumerate() {
                for &j in &ids[a + 1..] {
                    if points[i as usize] == points[j as usize] {
                        let pair = (i.min(j) as usize, i.max(j) as usize);
                        if found.is_none_or(|f| pair.1 < f.1) {
                            found = Some(pair);
                        }
                    }
                }
            }
        }
        found
    }
}

fn ring_cells(cx: isize, cy: isize, ring: isize) -> impl Iterator<Item = (isize, isize)> {
    let side = 2 * ring + 1;
    let count = if ring == 0 { 1 } else { 4 * (side - 1) };
    (0..count).map(move |k| {
        if ring == 0 {
            return (cx, cy);
        }
        let s = side - 1;
        let (dx, dy) = match k / s {
            0 => (k % s, 0),
            1 => (s, k % s),
            2 => (s - k % s, s),
            _ => (0, s - k % s),
        };
        (cx - ring + dx, cy - ring + dy)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter(n: usize, seed: u64) -> Vec<Point> {
        // xorshift keeps this test free of the rand dependency
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n).map(|_| Point::new(next() * 20.0 - 7.0, next() * 5.0 + 1.0)).collect()
    }

    #[test]
    fn ring_cells_cover_the_ring_once() {
        for ring in 0..4isize {
            let cells: Vec<_> = ring_cells(0, 0, ring).collect();
            let expected = if ring == 0 { 1 } else { 8 * ring as usize };
            assert_eq!(cells.len(), expected);
            let mut dedup = cells.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), expected);
            assert!(cells.iter().all(|&(x, y)| x.abs().max(y.abs()) == ring));
        }
    }

    #[test]
    fn cell_lookup_returns_points_inside_the_cell() {
        let pts = scatter(500, 7);
        let idx = GridIndex::build(&pts);
        let (cols, rows) = idx.dims();
        let mut seen = 0;
        for cy in 0..rows {
            for cx in 0..cols {
                let (x0, x1, y0, y1) = idx.cell_rect(cx, cy);
                for &i in idx.cell_points(cx, cy) {
                    let p = pts[i as usize];
                    let tol = 1e-9;
                    assert!(p.x >= x0 - tol && (p.x < x1 + tol || cx == cols - 1));
                    assert!(p.y >= y0 - tol && (p.y < y1 + tol || cy == rows - 1));
                    seen += 1;
                }
            }
        }
        assert_eq!(seen, pts.len());
    }

    #[test]
    fn nearest_matches_linear_scan() {
        let pts = scatter(300, 11);
        let idx = GridIndex::build(&pts);
        for q in scatter(200, 99).into_iter().chain([Point::new(-50.0, 40.0), Point::new(100.0, -3.0)]) {
            let (i, d) = idx.nearest(&pts, q, None).unwrap();
            let brute = pts.iter().map(|p| p.dist(q)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);
            assert_eq!(pts[i].dist(q), brute);
        }
    }

    #[test]
    fn count_matches_linear_scan() {
        let pts = scatter(400, 3);
        let idx = GridIndex::build(&pts);
        for (k, c) in scatter(50, 5).into_iter().enumerate() {
            let r = 0.3 + k as f64 * 0.2;
            let open = pts.iter().filter(|p| p.dist2(c) < r * r).count();
            let closed = pts.iter().filter(|p| p.dist2(c) <= r * r).count();
            assert_eq!(idx.count_within(&pts, c, r, false), open);
            assert_eq!(idx.count_within(&pts, c, r, true), closed);
        }
    }

    #[test]
    fn collinear_points_get_a_usable_grid() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0)).collect();
        let idx = GridIndex::build(&pts);
        assert!(idx.cell_side() > 0.0);
        assert_eq!(idx.nearest(&pts, Point::new(4.2, 0.0), None).unwrap().0, 4);
        assert_eq!(idx.nearest(&pts, pts[4], Some(4)).unwrap().1, 1.0);
    }
}
