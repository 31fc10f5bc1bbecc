//! Uniform rectangular grids in one and two dimensions, node classification
//! masks, grid functions, and second-order discrete calculus.
//!
//! A [`Grid`] owns the geometry (origin, spacing, shape) and a per-node
//! classification into interior, boundary and exterior nodes. The interior is
//! defined so that every interior node has its full Chebyshev-1 neighborhood
//! inside the domain, which is exactly what the widest stencil in this crate
//! (a 3x3 block) needs.

use std::sync::Arc;

use crate::error::{Error, Result};

/// A point in the plane. One-dimensional grids use `[x, 0.0]`.
pub type Point = [f64; 2];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeClass {
    Interior,
    Boundary,
    Exterior,
}

/// Boolean node subset, indexed like grid nodes.
pub type NodeMask = Vec<bool>;

#[derive(Debug)]
pub struct Grid {
    dim: usize,
    shape: [usize; 2],
    origin: [f64; 2],
    spacing: [f64; 2],
    class: Vec<NodeClass>,
    diam: f64,
}

impl Grid {
    /// 1D grid on `[a, b]` with `n` nodes; the whole segment is the domain.
    pub fn line(a: f64, b: f64, n: usize) -> Arc<Grid> {
        assert!(n >= 2 && b > a);
        let h = (b - a) / (n - 1) as f64;
        let mut g = Grid {
            dim: 1,
            shape: [n, 1],
            origin: [a, 0.0],
            spacing: [h, h],
            class: vec![NodeClass::Interior; n],
            diam: 0.0,
        };
        g.classify(|_| true);
        Arc::new(g)
    }

    /// 2D grid over the box `[lo, hi]` with `shape` nodes per axis; the whole
    /// box is the domain.
    pub fn rect(lo: Point, hi: Point, shape: [usize; 2]) -> Arc<Grid> {
        Self::rect_masked(lo, hi, shape, |_| true)
    }

    /// 2D grid over the box with the domain given by an inside predicate.
    pub fn rect_masked(
        lo: Point,
        hi: Point,
        shape: [usize; 2],
        inside: impl Fn(Point) -> bool,
    ) -> Arc<Grid> {
        assert!(shape[0] >= 2 && shape[1] >= 2);
        assert!(hi[0] > lo[0] && hi[1] > lo[1]);
        let hx = (hi[0] - lo[0]) / (shape[0] - 1) as f64;
        let hy = (hi[1] - lo[1]) / (shape[1] - 1) as f64;
        let mut g = Grid {
            dim: 2,
            shape,
            origin: lo,
            spacing: [hx, hy],
            class: vec![NodeClass::Exterior; shape[0] * shape[1]],
            diam: 0.0,
        };
        g.classify(inside);
        Arc::new(g)
    }

    /// Square grid over `[lo, hi]^2` with `n` nodes per axis, domain = box.
    pub fn square(lo: f64, hi: f64, n: usize) -> Arc<Grid> {
        Self::rect([lo, lo], [hi, hi], [n, n])
    }

    /// Square bounding grid carrying a ball domain `|x - center| <= radius`.
    ///
    /// The membership radius is inflated by `h * sqrt(dim) / 2` so that the
    /// boundary ring straddles the continuum sphere instead of sitting one
    /// full cell inside it; this keeps the Dirichlet staircase error at
    /// `~h/2` rather than `~h`.
    pub fn ball_domain(center: Point, radius: f64, lo: f64, hi: f64, n: usize) -> Arc<Grid> {
        let h = (hi - lo) / (n - 1) as f64;
        let r_eff = radius + h * (2.0f64).sqrt() / 2.0;
        Self::rect_masked([lo, lo], [hi, hi], [n, n], move |p| {
            let dx = p[0] - center[0];
            let dy = p[1] - center[1];
            (dx * dx + dy * dy).sqrt() <= r_eff
        })
    }

    /// Unit-disc domain on a square bounding grid with one exterior margin
    /// ring of at least two cells.
    pub fn unit_disc(n: usize) -> Arc<Grid> {
        // [-1.02, 1.02] leaves a thin exterior collar around the disc.
        Self::ball_domain([0.0, 0.0], 1.0, -1.02, 1.02, n)
    }

    fn classify(&mut self, inside: impl Fn(Point) -> bool) {
        let (nx, ny) = (self.shape[0], self.shape[1]);
        let mut is_in = vec![false; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                is_in[ix + iy * nx] = inside(self.coords_of(ix, iy));
            }
        }
        for iy in 0..ny {
            for ix in 0..nx {
                let id = ix + iy * nx;
                if !is_in[id] {
                    self.class[id] = NodeClass::Exterior;
                    continue;
                }
                let mut interior = true;
                let (jlo, jhi) = if self.dim == 2 { (-1i64, 1i64) } else { (0, 0) };
                'nb: for dy in jlo..=jhi {
                    for dx in -1i64..=1 {
                        let jx = ix as i64 + dx;
                        let jy = iy as i64 + dy;
                        if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                            interior = false;
                            break 'nb;
                        }
                        if !is_in[jx as usize + jy as usize * nx] {
                            interior = false;
                            break 'nb;
                        }
                    }
                }
                self.class[id] = if interior {
                    NodeClass::Interior
                } else {
                    NodeClass::Boundary
                };
            }
        }
        self.diam = self.compute_diam();
    }

    fn compute_diam(&self) -> f64 {
        let pts: Vec<Point> = self.omega_nodes().map(|id| self.coords(id)).collect();
        if pts.len() < 2 {
            return 0.0;
        }
        if self.dim == 1 {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            return hi - lo;
        }
        let hull = convex_hull_2d(&pts);
        diameter_calipers(&hull)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }
    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }
    pub fn spacing_min(&self) -> f64 {
        if self.dim == 1 {
            self.spacing[0]
        } else {
            self.spacing[0].min(self.spacing[1])
        }
    }
    pub fn spacing_max(&self) -> f64 {
        if self.dim == 1 {
            self.spacing[0]
        } else {
            self.spacing[0].max(self.spacing[1])
        }
    }
    pub fn origin(&self) -> Point {
        self.origin
    }

    /// Max pairwise distance over the domain nodes.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn index_of(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.shape[0] && iy < self.shape[1]);
        ix + iy * self.shape[0]
    }

    pub fn ij_of(&self, id: usize) -> (usize, usize) {
        (id % self.shape[0], id / self.shape[0])
    }

    pub fn coords_of(&self, ix: usize, iy: usize) -> Point {
        [
            self.origin[0] + ix as f64 * self.spacing[0],
            if self.dim == 2 {
                self.origin[1] + iy as f64 * self.spacing[1]
            } else {
                0.0
            },
        ]
    }

    pub fn coords(&self, id: usize) -> Point {
        let (ix, iy) = self.ij_of(id);
        self.coords_of(ix, iy)
    }

    pub fn class(&self, id: usize) -> NodeClass {
        self.class[id]
    }
    pub fn is_interior(&self, id: usize) -> bool {
        self.class[id] == NodeClass::Interior
    }
    pub fn is_boundary(&self, id: usize) -> bool {
        self.class[id] == NodeClass::Boundary
    }
    /// Domain membership: interior or boundary.
    pub fn in_omega(&self, id: usize) -> bool {
        self.class[id] != NodeClass::Exterior
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        0..self.len()
    }
    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes().filter(move |&id| self.is_interior(id))
    }
    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes().filter(move |&id| self.is_boundary(id))
    }
    pub fn omega_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes().filter(move |&id| self.in_omega(id))
    }

    /// Chebyshev distance (in cells) from the node to the bounding-box edge.
    pub fn edge_distance(&self, id: usize) -> usize {
        let (ix, iy) = self.ij_of(id);
        let dx = ix.min(self.shape[0] - 1 - ix);
        if self.dim == 1 {
            dx
        } else {
            dx.min(iy.min(self.shape[1] - 1 - iy))
        }
    }

    /// Euclidean distance from a node to the nearest boundary node.
    pub fn dist_to_boundary(&self, id: usize) -> f64 {
        let p = self.coords(id);
        let mut best = f64::INFINITY;
        for b in self.boundary_nodes() {
            let q = self.coords(b);
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            if d < best {
                best = d;
            }
        }
        best
    }
}

/// Scalar field on a grid: one value per node.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    label: String,
}

impl GridFunction {
    pub fn zeros(grid: Arc<Grid>, label: &str) -> GridFunction {
        GridFunction {
            values: vec![0.0; grid.len()],
            grid,
            label: label.to_string(),
        }
    }

    pub fn from_fn(
        grid: Arc<Grid>,
        label: &str,
        mut f: impl FnMut(Point) -> f64,
    ) -> Result<GridFunction> {
        let values: Vec<f64> = grid.nodes().map(|id| f(grid.coords(id))).collect();
        Self::from_values(grid, label, values)
    }

    pub fn from_values(grid: Arc<Grid>, label: &str, values: Vec<f64>) -> Result<GridFunction> {
        assert_eq!(values.len(), grid.len());
        let gf = GridFunction {
            grid,
            values,
            label: label.to_string(),
        };
        gf.check_finite()?;
        Ok(gf)
    }

    pub fn check_finite(&self) -> Result<()> {
        for (id, v) in self.values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    label: self.label.clone(),
                    node: id,
                });
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn get(&self, id: usize) -> f64 {
        self.values[id]
    }
    pub fn set(&mut self, id: usize, v: f64) {
        self.values[id] = v;
    }

    /// max(u, 0) on the domain, zero on every node outside it.
    pub fn positive_part_extend(&self) -> GridFunction {
        let mut out = GridFunction::zeros(self.grid.clone(), &format!("{}+", self.label));
        for id in self.grid.omega_nodes() {
            out.values[id] = self.values[id].max(0.0);
        }
        out
    }

    /// Exact maximum over a node mask.
    pub fn sup_over(&self, mask: &NodeMask) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        let mut seen = false;
        for id in self.grid.nodes() {
            if mask[id] {
                seen = true;
                if self.values[id] > best {
                    best = self.values[id];
                }
            }
        }
        if !seen {
            return Err(Error::EmptyMask("sup_over"));
        }
        Ok(best)
    }

    /// Maximum over the domain nodes.
    pub fn sup_omega(&self) -> Result<f64> {
        let mask: NodeMask = self.grid.nodes().map(|id| self.grid.in_omega(id)).collect();
        self.sup_over(&mask)
    }

    /// Maximum over the boundary nodes.
    pub fn boundary_sup(&self) -> Result<f64> {
        let mask: NodeMask = self
            .grid
            .nodes()
            .map(|id| self.grid.is_boundary(id))
            .collect();
        self.sup_over(&mask)
    }

    pub fn scale_add(&self, alpha: f64, other: &GridFunction, beta: f64) -> GridFunction {
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        GridFunction {
            grid: self.grid.clone(),
            values,
            label: self.label.clone(),
        }
    }
}

/// Second-order central gradient at an interior node.
pub fn gradient_central(u: &GridFunction, id: usize) -> Result<[f64; 2]> {
    let g = u.grid();
    if !g.is_interior(id) {
        return Err(Error::NotInterior(id));
    }
    let (ix, iy) = g.ij_of(id);
    let [hx, hy] = g.spacing();
    let nx = g.shape()[0];
    let v = u.values();
    let gx = (v[ix + 1 + iy * nx] - v[ix - 1 + iy * nx]) / (2.0 * hx);
    let gy = if g.dim() == 2 {
        (v[ix + (iy + 1) * nx] - v[ix + (iy - 1) * nx]) / (2.0 * hy)
    } else {
        0.0
    };
    Ok([gx, gy])
}

/// Second-order central Hessian at an interior node; symmetric by construction.
pub fn hessian_central(u: &GridFunction, id: usize) -> Result<[[f64; 2]; 2]> {
    let g = u.grid();
    if !g.is_interior(id) {
        return Err(Error::NotInterior(id));
    }
    let (ix, iy) = g.ij_of(id);
    let [hx, hy] = g.spacing();
    let nx = g.shape()[0];
    let v = u.values();
    let c = v[ix + iy * nx];
    let dxx = (v[ix + 1 + iy * nx] - 2.0 * c + v[ix - 1 + iy * nx]) / (hx * hx);
    if g.dim() == 1 {
        return Ok([[dxx, 0.0], [0.0, 0.0]]);
    }
    let dyy = (v[ix + (iy + 1) * nx] - 2.0 * c + v[ix + (iy - 1) * nx]) / (hy * hy);
    let dxy = (v[ix + 1 + (iy + 1) * nx] - v[ix - 1 + (iy + 1) * nx] - v[ix + 1 + (iy - 1) * nx]
        + v[ix - 1 + (iy - 1) * nx])
        / (4.0 * hx * hy);
    Ok([[dxx, dxy], [dxy, dyy]])
}

pub fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Convex hull of a 2D point set (monotone chain), counter-clockwise,
/// without the repeated first point. Collinear points are dropped.
pub fn convex_hull_2d(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<Point> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Hull diameter by rotating calipers.
pub fn diameter_calipers(hull: &[Point]) -> f64 {
    let n = hull.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return dist(hull[0], hull[1]);
    }
    let area2 = |a: Point, b: Point, c: Point| -> f64 {
        ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
    };
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        while area2(hull[i], hull[ni], hull[(j + 1) % n]) > area2(hull[i], hull[ni], hull[j]) {
            j = (j + 1) % n;
        }
        best = best.max(dist(hull[i], hull[j])).max(dist(hull[ni], hull[j]));
    }
    best
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
