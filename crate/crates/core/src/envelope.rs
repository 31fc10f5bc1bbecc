//! Concave envelopes on the bounding grid, contact sets, level-band
//! suprema, and the discrete curvature geometry used by the sup-bound
//! estimates.
//!
//! The concave envelope of `u⁺` over a convex set is the pointwise infimum
//! of affine functions that majorize `u⁺`. On a grid that infimum is, at
//! each query node, a tiny linear program in the plane coefficients
//! `(a, b)`:
//!
//! ```text
//! Γ(q) = min { a·q + b  :  a·x_i + b >= u⁺(x_i) for every node x_i }.
//! ```
//!
//! The `hull` method solves that LP exactly per node with Seidel's
//! randomized incremental algorithm (expected linear time in the number of
//! constraints), which evaluates the upper hull of the lifted point cloud
//! without building facets. Only nodes with `u⁺ > 0` and the bounding-box
//! corners constrain the plane: a plane is nonnegative on the whole box iff
//! it is nonnegative at the corners.
//!
//! The `iterative` method is the damped obstacle-style fixed point
//! `Γ <- max(u⁺, max over direction pairs of neighbor averages)` started
//! from the constant `sup u⁺`; it converges from above to the majorant that
//! is concave along the stencil directions. (Concavity means `Γ` dominates
//! every pair average and is linear along some direction off the contact
//! set, so the fixed-point operator takes the largest pair average; the
//! `min` form is the mirrored convex-envelope iteration and collapses
//! below the envelope.)

use crate::error::{Error, Result};
use crate::grid::{
    convex_hull_2d, gradient_central, norm2, GridFunction, NodeMask, Point,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeMethod {
    Hull,
    Iterative,
}

/// Concave envelope of `u⁺` with its contact set.
#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    pub gamma: GridFunction,
    pub contact: NodeMask,
    /// Nodes of the convex set the envelope was computed over; outside it
    /// `gamma` equals `u⁺` and contact is not defined.
    pub domain: NodeMask,
    pub tol_c: f64,
    pub method: EnvelopeMethod,
    /// `u⁺ ≡ 0`: the envelope is identically zero and contact is everywhere.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Nodes inside the convex hull of the domain nodes — the discrete
/// `Ω* = conv(Ω)` the estimates integrate over. For a ball or box domain
/// this is the domain node set itself.
pub fn omega_hull_mask(grid: &std::sync::Arc<crate::grid::Grid>) -> NodeMask {
    let pts: Vec<Point> = grid.omega_nodes().map(|id| grid.coords(id)).collect();
    if grid.dim() == 1 {
        let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return grid
            .nodes()
            .map(|id| {
                let x = grid.coords(id)[0];
                x >= lo - 1e-12 && x <= hi + 1e-12
            })
            .collect();
    }
    let hull = convex_hull_2d(&pts);
    let tol = 1e-12 * (1.0 + grid.diam());
    grid.nodes()
        .map(|id| {
            if grid.in_omega(id) {
                return true;
            }
            let q = grid.coords(id);
            if hull.len() < 3 {
                return false;
            }
            hull.iter().enumerate().all(|(i, &a)| {
                let b = hull[(i + 1) % hull.len()];
                (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) >= -tol
            })
        })
        .collect()
}

/// splitmix64; deterministic shuffle source for the per-node LP.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn shuffle<T>(v: &mut [T], seed: u64) {
    let mut s = seed ^ 0x51ab_3c4d_9e0f_7721;
    for i in (1..v.len()).rev() {
        let j = (splitmix64(&mut s) % (i as u64 + 1)) as usize;
        v.swap(i, j);
    }
}

/// One affine-majorant constraint `n · z >= r` with `n = (x, y, 1)`.
#[derive(Clone, Copy)]
struct Plane {
    n: [f64; 3],
    r: f64,
}

/// Minimize `c · z` over `n_i · z >= r_i` intersected with the box
/// `|z_j| <= bound_j`. Seidel's algorithm, dimensions 3 -> 2 -> 1.
fn seidel3(cons: &[Plane], c: [f64; 3], bounds: [f64; 3]) -> f64 {
    let mut z = [0.0f64; 3];
    for j in 0..3 {
        z[j] = if c[j] > 0.0 { -bounds[j] } else { bounds[j] };
    }
    for i in 0..cons.len() {
        let p = cons[i];
        if dot3(p.n, z) >= p.r {
            continue;
        }
        // Optimum moves onto the hyperplane n·z = r. Eliminate the variable
        // with the largest |n| component.
        let k = argmax_abs3(p.n);
        if p.n[k] == 0.0 {
            continue; // degenerate constraint, cannot bind
        }
        // z_k = (r - sum_{j != k} n_j z_j) / n_k
        let (a0, a1) = other_axes(k);
        let inv = 1.0 / p.n[k];
        // Objective restricted to the plane: c' over (z_{a0}, z_{a1}).
        let c2 = [
            c[a0] - c[k] * p.n[a0] * inv,
            c[a1] - c[k] * p.n[a1] * inv,
        ];
        // Constraints 0..i restricted to the plane, plus the box bounds on
        // z_{a0}, z_{a1}, plus the bound on the eliminated variable.
        let mut cons2: Vec<([f64; 2], f64)> = Vec::with_capacity(i + 6);
        for q in &cons[..i] {
            let m = [
                q.n[a0] - q.n[k] * p.n[a0] * inv,
                q.n[a1] - q.n[k] * p.n[a1] * inv,
            ];
            let s = q.r - q.n[k] * p.r * inv;
            cons2.push((m, s));
        }
        // |z_k| <= bound_k as two inequalities in the plane coordinates.
        //  z_k = inv (r - n_{a0} z_{a0} - n_{a1} z_{a1})
        cons2.push(([-p.n[a0] * inv, -p.n[a1] * inv], -bounds[k] - p.r * inv));
        cons2.push(([p.n[a0] * inv, p.n[a1] * inv], p.r * inv - bounds[k]));
        let y = seidel2(&cons2, c2, [bounds[a0], bounds[a1]]);
        z[a0] = y[0];
        z[a1] = y[1];
        z[k] = (p.r - p.n[a0] * y[0] - p.n[a1] * y[1]) * inv;
    }
    dot3(c, z)
}

fn seidel2(cons: &[([f64; 2], f64)], c: [f64; 2], bounds: [f64; 2]) -> [f64; 2] {
    let mut z = [
        if c[0] > 0.0 { -bounds[0] } else { bounds[0] },
        if c[1] > 0.0 { -bounds[1] } else { bounds[1] },
    ];
    for i in 0..cons.len() {
        let (n, r) = cons[i];
        if n[0] * z[0] + n[1] * z[1] >= r {
            continue;
        }
        let k = if n[0].abs() >= n[1].abs() { 0 } else { 1 };
        if n[k] == 0.0 {
            continue;
        }
        let o = 1 - k;
        let inv = 1.0 / n[k];
        // z_k = inv (r - n_o z_o); objective slope in z_o:
        let slope = c[o] - c[k] * n[o] * inv;
        // 1D feasible interval for z_o.
        let mut lo = -bounds[o];
        let mut hi = bounds[o];
        let clip = |lo: &mut f64, hi: &mut f64, a: f64, b: f64| {
            // constraint a * z_o >= b
            if a > 0.0 {
                *lo = lo.max(b / a);
            } else if a < 0.0 {
                *hi = hi.min(b / a);
            }
            // a == 0: constraint is a constant sign condition; the LPs we
            // build are always feasible, so nothing to clip.
        };
        for (m, s) in &cons[..i] {
            let a = m[o] - m[k] * n[o] * inv;
            let b = s - m[k] * r * inv;
            clip(&mut lo, &mut hi, a, b);
        }
        // |z_k| <= bound_k
        clip(&mut lo, &mut hi, -n[o] * inv, -bounds[k] - r * inv);
        clip(&mut lo, &mut hi, n[o] * inv, r * inv - bounds[k]);
        if lo > hi {
            // Round-off infeasibility at a degenerate vertex; keep the
            // midpoint, the caller clamps the value.
            let m = 0.5 * (lo + hi);
            z[o] = m;
        } else {
            z[o] = if slope > 0.0 { lo } else { hi };
        }
        z[k] = (r - n[o] * z[o]) * inv;
    }
    z
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn argmax_abs3(v: [f64; 3]) -> usize {
    let mut k = 0;
    for j in 1..3 {
        if v[j].abs() > v[k].abs() {
            k = j;
        }
    }
    k
}

fn other_axes(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Exact concave envelope by per-node LP over the lifted point cloud.
fn envelope_hull(u_plus: &GridFunction, domain: &NodeMask, seed: u64) -> GridFunction {
    let g = u_plus.grid();
    let sup = u_plus.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let mut gamma = u_plus.clone();
    if sup == 0.0 {
        return gamma;
    }
    // Constraint points: strictly positive domain nodes plus the extreme
    // points of the domain node set. An affine function is nonnegative on
    // the convex domain iff it is nonnegative at the extreme points, so
    // the zero nodes in between never bind.
    let dom_pts: Vec<Point> = g
        .nodes()
        .filter(|&id| domain[id])
        .map(|id| g.coords(id))
        .collect();
    let extremes: Vec<Point> = if g.dim() == 1 {
        let lo = dom_pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = dom_pts
            .iter()
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        vec![[lo, 0.0], [hi, 0.0]]
    } else {
        convex_hull_2d(&dom_pts)
    };
    let mut planes: Vec<Plane> = Vec::new();
    for id in g.nodes() {
        let v = u_plus.get(id);
        if domain[id] && v > 0.0 {
            let p = g.coords(id);
            planes.push(Plane {
                n: [p[0], p[1], 1.0],
                r: v,
            });
        }
    }
    for p in extremes {
        planes.push(Plane {
            n: [p[0], p[1], 1.0],
            r: 0.0,
        });
    }
    let h = g.spacing_min();
    let [nx, ny] = g.shape();
    let slope_bound = 4.0 * sup / h + 1.0;
    let box_radius = norm2([
        (nx - 1) as f64 * g.spacing()[0],
        (ny - 1) as f64 * g.spacing()[1],
    ]) + norm2(g.origin());
    let offset_bound = sup + slope_bound * (box_radius + 1.0) + 1.0;
    let bounds = [slope_bound, slope_bound, offset_bound];

    let mut order: Vec<usize> = (0..planes.len()).collect();
    for id in g.nodes() {
        if !domain[id] {
            continue;
        }
        let q = g.coords(id);
        shuffle(&mut order, seed ^ (id as u64).wrapping_mul(0x9e37_79b9));
        let shuffled: Vec<Plane> = order.iter().map(|&i| planes[i]).collect();
        let val = seidel3(&shuffled, [q[0], q[1], 1.0], bounds);
        // The envelope lies between the data and its supremum.
        gamma.set(id, val.clamp(u_plus.get(id), sup));
    }
    gamma
}

/// Direction pairs for the iterative scheme: axes, diagonals, and the four
/// knight lines. More lines shrink the angular gap to the exact envelope.
fn iter_pairs(dim: usize) -> Vec<(i64, i64)> {
    if dim == 1 {
        vec![(1, 0)]
    } else {
        vec![
            (1, 0),
            (0, 1),
            (1, 1),
            (1, -1),
            (2, 1),
            (1, 2),
            (2, -1),
            (1, -2),
        ]
    }
}

fn envelope_iterative(
    u_plus: &GridFunction,
    domain: &NodeMask,
    tol: f64,
    max_iters: usize,
) -> Result<GridFunction> {
    let g = u_plus.grid();
    let sup = u_plus.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let mut gamma = u_plus.clone();
    for id in g.nodes() {
        if domain[id] {
            gamma.set(id, sup);
        }
    }
    let pairs = iter_pairs(g.dim());
    let [nx, ny] = g.shape();
    let mut next = gamma.clone();
    for it in 0..max_iters {
        let mut delta = 0.0f64;
        for id in g.nodes() {
            if !domain[id] {
                continue;
            }
            let (ix, iy) = g.ij_of(id);
            let mut best = f64::NEG_INFINITY;
            for &(dx, dy) in &pairs {
                let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                let (kx, ky) = (ix as i64 - dx, iy as i64 - dy);
                let inb = |x: i64, y: i64| {
                    x >= 0
                        && y >= 0
                        && x < nx as i64
                        && y < ny as i64
                        && domain[x as usize + y as usize * nx]
                };
                if inb(jx, jy) && inb(kx, ky) {
                    let a = gamma.get(jx as usize + jy as usize * nx);
                    let b = gamma.get(kx as usize + ky as usize * nx);
                    best = best.max(0.5 * (a + b));
                }
            }
            let v = if best.is_finite() {
                u_plus.get(id).max(best)
            } else {
                u_plus.get(id)
            };
            delta = delta.max((gamma.get(id) - v).abs());
            next.set(id, v);
        }
        std::mem::swap(&mut gamma, &mut next);
        if delta <= tol {
            return Ok(gamma);
        }
        if it + 1 == max_iters {
            return Err(Error::Validation(format!(
                "iterative envelope did not reach tolerance {tol} in {max_iters} sweeps (last decrement {delta})"
            )));
        }
    }
    Ok(gamma)
}

/// Concave envelope of `u⁺` (nonnegative, zero-extended) over the whole
/// bounding grid.
pub fn concave_envelope(u_plus: &GridFunction, method: EnvelopeMethod) -> Result<EnvelopeResult> {
    let domain = vec![true; u_plus.grid().len()];
    concave_envelope_over(u_plus, &domain, method, 0)
}

/// Concave envelope over the convex hull of the domain nodes — the set the
/// sup-bound estimates integrate over.
pub fn concave_envelope_omega_hull(
    u_plus: &GridFunction,
    method: EnvelopeMethod,
) -> Result<EnvelopeResult> {
    let domain = omega_hull_mask(u_plus.grid());
    concave_envelope_over(u_plus, &domain, method, 0)
}

/// Envelope over an arbitrary convex node set; `domain` must be the node
/// trace of a convex region for the result to be meaningful.
pub fn concave_envelope_over(
    u_plus: &GridFunction,
    domain: &NodeMask,
    method: EnvelopeMethod,
    seed: u64,
) -> Result<EnvelopeResult> {
    if let Some(id) = u_plus.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "concave_envelope expects nonnegative data; node {id} carries {}",
            u_plus.get(id)
        )));
    }
    if !domain.iter().any(|&d| d) {
        return Err(Error::EmptyMask("envelope domain"));
    }
    let sup = u_plus.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let mut warnings = Vec::new();
    let degenerate = sup == 0.0;
    if degenerate {
        warnings.push("u+ vanishes identically; contact set is the whole domain".into());
    }
    let (gamma, tol_c) = match method {
        EnvelopeMethod::Hull => {
            // Floor for LP round-off on top of the relative tolerance.
            let tol = 10.0 * f64::EPSILON * sup + 1e-12 * (1.0 + sup);
            (envelope_hull(u_plus, domain, seed), tol)
        }
        EnvelopeMethod::Iterative => {
            let tol = 1e-8 * sup.max(1e-30);
            let iters = 40 * (u_plus.grid().len() + 100);
            (
                envelope_iterative(u_plus, domain, tol * 0.5, iters)?,
                1e-8 * (1.0 + sup),
            )
        }
    };
    let contact = contact_mask(&gamma, u_plus, domain, tol_c);
    Ok(EnvelopeResult {
        gamma,
        contact,
        domain: domain.clone(),
        tol_c,
        method,
        degenerate,
        warnings,
    })
}

fn contact_mask(
    gamma: &GridFunction,
    u_plus: &GridFunction,
    domain: &NodeMask,
    tol_c: f64,
) -> NodeMask {
    gamma
        .values()
        .iter()
        .zip(u_plus.values())
        .zip(domain.iter())
        .map(|((g, u), &d)| d && (g - u).abs() <= tol_c)
        .collect()
}

/// Contact set of a computed envelope; always contains the argmax of `u⁺`.
pub fn contact_set(env: &EnvelopeResult) -> NodeMask {
    env.contact.clone()
}

/// Supremum of `w` over the level band `{ |u⁺ - τ| <= δ }` intersected with
/// a mask. An empty band contributes zero and is reported by the caller.
pub fn level_band_sup(
    w: &GridFunction,
    u_plus: &GridFunction,
    tau: f64,
    delta: f64,
    mask: &NodeMask,
) -> Result<(f64, bool)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("band half-width must be positive".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut nonempty = false;
    for id in 0..u_plus.values().len() {
        if mask[id] && (u_plus.get(id) - tau).abs() <= delta {
            nonempty = true;
            best = best.max(w.get(id));
        }
    }
    if nonempty {
        Ok((best, true))
    } else {
        Ok((0.0, false))
    }
}

/// Central-difference divergence of the normalized gradient field of `Γ`.
/// For a concave envelope this is `-Σ κ_i <= 0` up to O(h).
pub fn curvature_divergence(gamma: &GridFunction, id: usize, eps_grad: f64) -> Result<f64> {
    let g = gamma.grid();
    if g.edge_distance(id) < 2 {
        return Err(Error::NearEdge(id));
    }
    let (ix, iy) = g.ij_of(id);
    let nx = g.shape()[0];
    let [hx, hy] = g.spacing();
    let unit_at = |jd: usize| -> Result<[f64; 2]> {
        let gr = gradient_central(gamma, jd).or_else(|_| {
            // Off-interior nodes still have array-interior stencils here.
            let (jx, jy) = g.ij_of(jd);
            let v = gamma.values();
            let gx = (v[jx + 1 + jy * nx] - v[jx - 1 + jy * nx]) / (2.0 * hx);
            let gy = if g.dim() == 2 {
                (v[jx + (jy + 1) * nx] - v[jx + (jy - 1) * nx]) / (2.0 * hy)
            } else {
                0.0
            };
            Ok::<[f64; 2], Error>([gx, gy])
        })?;
        let n = norm2(gr);
        if n < eps_grad {
            return Err(Error::VanishingGradient(jd));
        }
        Ok([gr[0] / n, gr[1] / n])
    };
    let e = unit_at(ix + 1 + iy * nx)?;
    let w = unit_at(ix - 1 + iy * nx)?;
    let mut div = (e[0] - w[0]) / (2.0 * hx);
    if g.dim() == 2 {
        let nn = unit_at(ix + (iy + 1) * nx)?;
        let ss = unit_at(ix + (iy - 1) * nx)?;
        div += (nn[1] - ss[1]) / (2.0 * hy);
    }
    Ok(div)
}

/// Sum of exterior turning angles of a convex polygon; equals `2π` (the
/// measure of the unit circle) for any simple convex polygon.
pub fn gauss_bonnet_turning_sum(hull: &[Point]) -> Result<f64> {
    if hull.len() < 3 {
        return Err(Error::DegeneratePolygon("fewer than 3 vertices"));
    }
    let n = hull.len();
    let mut sum = 0.0;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let c = hull[(i + 2) % n];
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        if norm2(e1) == 0.0 || norm2(e2) == 0.0 {
            return Err(Error::DegeneratePolygon("repeated vertex"));
        }
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        let dot = e1[0] * e2[0] + e1[1] * e2[1];
        let turn = cross.atan2(dot);
        if turn < -1e-12 {
            return Err(Error::DegeneratePolygon("polygon is not convex"));
        }
        sum += turn;
    }
    Ok(sum)
}

/// Convex hull polygon of the contact set in the plane.
pub fn contact_hull_polygon(env: &EnvelopeResult) -> Result<Vec<Point>> {
    let g = env.gamma.grid();
    let pts: Vec<Point> = g
        .nodes()
        .filter(|&id| env.contact[id])
        .map(|id| g.coords(id))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyMask("contact set"));
    }
    Ok(convex_hull_2d(&pts))
}

/// Discrete concavity along axis and diagonal grid lines, within `tol`.
pub fn is_discretely_concave(gamma: &GridFunction, tol: f64) -> bool {
    let g = gamma.grid();
    let [nx, ny] = g.shape();
    for id in g.nodes() {
        let (ix, iy) = g.ij_of(id);
        for (dx, dy) in iter_pairs(g.dim()) {
            let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
            let (kx, ky) = (ix as i64 - dx, iy as i64 - dy);
            let inb = |x: i64, y: i64| x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64;
            if inb(jx, jy) && inb(kx, ky) {
                let a = gamma.get(jx as usize + jy as usize * nx);
                let b = gamma.get(kx as usize + ky as usize * nx);
                if gamma.get(id) < 0.5 * (a + b) - tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Level-regularity diagnostic: every level band of `Γ` strictly between 0
/// and its maximum is nonempty, and the gradient at band nodes away from
/// the argmax stays above `h * slope_floor`.
#[derive(Clone, Debug)]
pub struct LevelRegularityReport {
    pub empty_levels: Vec<f64>,
    pub weak_gradient_nodes: Vec<(f64, usize, f64)>,
}

pub fn envelope_level_regularity(
    env: &EnvelopeResult,
    levels: usize,
    slope_floor: f64,
) -> LevelRegularityReport {
    let gamma = &env.gamma;
    let g = gamma.grid();
    let sup = gamma.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let argmax = (0..g.len())
        .max_by(|&a, &b| gamma.get(a).total_cmp(&gamma.get(b)))
        .unwrap();
    let h = g.spacing_max();
    let eps = h * slope_floor;
    let delta = sup / levels as f64;
    let mut empty_levels = Vec::new();
    let mut weak = Vec::new();
    for k in 1..levels {
        let tau = k as f64 * delta;
        let mut any = false;
        for id in g.nodes() {
            if (gamma.get(id) - tau).abs() <= 0.5 * delta {
                any = true;
                if g.edge_distance(id) < 2 {
                    continue;
                }
                let far = {
                    let p = g.coords(id);
                    let q = g.coords(argmax);
                    norm2([p[0] - q[0], p[1] - q[1]]) > 3.0 * h
                };
                if far {
                    if let Ok(gr) = gradient_central(gamma, id) {
                        let n = norm2(gr);
                        if n < eps {
                            weak.push((tau, id, n));
                        }
                    }
                }
            }
        }
        if !any {
            empty_levels.push(tau);
        }
    }
    LevelRegularityReport {
        empty_levels,
        weak_gradient_nodes: weak,
    }
}

#[cfg(test)]
pub mod oracle {
    //! Brute-force affine-majorant oracle, independent of the LP path.
    //!
    //! In 1D the candidate planes run over node pairs, in 2D over node
    //! triples; a candidate that majorizes every node contributes its value
    //! at each query node, and the envelope is the minimum contribution.

    use super::*;

    pub fn envelope_brute(u_plus: &GridFunction) -> GridFunction {
        let g = u_plus.grid();
        let pts: Vec<Point> = g.nodes().map(|id| g.coords(id)).collect();
        let vals = u_plus.values();
        let n = pts.len();
        let sup = vals.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut gamma = vec![sup; n];
        let majorizes = |a: f64, b: f64, c: f64| -> bool {
            for k in 0..n {
                if a * pts[k][0] + b * pts[k][1] + c < vals[k] - 1e-12 * (1.0 + sup) {
                    return false;
                }
            }
            true
        };
        if g.dim() == 1 {
            for i in 0..n {
                for j in i + 1..n {
                    let dx = pts[j][0] - pts[i][0];
                    if dx == 0.0 {
                        continue;
                    }
                    let a = (vals[j] - vals[i]) / dx;
                    let c = vals[i] - a * pts[i][0];
                    if majorizes(a, 0.0, c) {
                        for (k, gk) in gamma.iter_mut().enumerate() {
                            *gk = gk.min(a * pts[k][0] + c);
                        }
                    }
                }
            }
        } else {
            for i in 0..n {
                for j in i + 1..n {
                    for l in j + 1..n {
                        let (p1, p2, p3) = (pts[i], pts[j], pts[l]);
                        let det = (p2[0] - p1[0]) * (p3[1] - p1[1])
                            - (p2[1] - p1[1]) * (p3[0] - p1[0]);
                        if det.abs() < 1e-14 {
                            continue;
                        }
                        let (v1, v2, v3) = (vals[i], vals[j], vals[l]);
                        let a = ((v2 - v1) * (p3[1] - p1[1]) - (v3 - v1) * (p2[1] - p1[1])) / det;
                        let b = ((v3 - v1) * (p2[0] - p1[0]) - (v2 - v1) * (p3[0] - p1[0])) / det;
                        let c = v1 - a * p1[0] - b * p1[1];
                        if majorizes(a, b, c) {
                            for (k, gk) in gamma.iter_mut().enumerate() {
                                *gk = gk.min(a * pts[k][0] + b * pts[k][1] + c);
                            }
                        }
                    }
                }
            }
        }
        // Clamp as the hull method does.
        for (k, gk) in gamma.iter_mut().enumerate() {
            *gk = gk.max(vals[k]).min(sup);
        }
        GridFunction::from_values(g.clone(), "oracle", gamma).unwrap()
    }
}
