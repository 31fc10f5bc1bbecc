//! Sup-convolution `u^ε(x) = sup_y { u(y) - |x-y|^2 / (2ε) }`, its
//! semiconvexity certificate, and the shrunken-domain transfer check.
//!
//! Two evaluation paths share every floating-point subexpression so their
//! outputs agree bit for bit: `brute` maximizes over all domain nodes
//! directly, `separable` splits the quadratic penalty per axis and runs the
//! linear-time upper-envelope-of-parabolas recurrence along rows, then
//! columns. Rounding is monotone, so subtracting the same per-axis penalty
//! before or after taking a maximum produces identical bits.

use crate::error::{Error, Result};
use crate::grid::{gradient_central, norm2, GridFunction, NodeMask};
use crate::operators::diffusion_value;
use crate::fields::{ham_eval, psi_eval};
use crate::solver::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupConvMethod {
    Brute,
    Separable,
}

#[derive(Clone, Debug)]
pub struct SupConvResult {
    pub u_eps: GridFunction,
    pub eps: f64,
    /// `r_ε = 2 sqrt(ε ||u||_∞)`.
    pub r_eps: f64,
    /// Domain nodes at distance more than `r_ε` from the boundary.
    pub omega_eps: NodeMask,
    /// For each node, a maximizing `y` node.
    pub argmax: Vec<usize>,
}

/// Upper envelope of the parabolas `q -> g[i] - (q - v[i])^2 * inv2e` over
/// the finite entries, evaluated at every `v[j]`; returns values and the
/// winning parabola index per query. Entries with `g = -inf` are skipped.
fn parabola_envelope_max(v: &[f64], g: &[f64], inv2e: f64) -> (Vec<f64>, Vec<usize>) {
    let n = v.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut win = vec![usize::MAX; n];
    // Hull of parabola indices and right breakpoints.
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    for i in 0..n {
        if g[i] == f64::NEG_INFINITY {
            continue;
        }
        if hull.is_empty() {
            hull.push(i);
            z.push(f64::INFINITY);
            continue;
        }
        loop {
            let j = *hull.last().unwrap();
            // Intersection of parabolas j and i (v[j] < v[i]).
            let s = ((g[i] - inv2e * v[i] * v[i]) - (g[j] - inv2e * v[j] * v[j]))
                / (2.0 * inv2e * (v[j] - v[i]));
            let z_prev = if hull.len() == 1 {
                f64::NEG_INFINITY
            } else {
                z[hull.len() - 2]
            };
            if s <= z_prev && hull.len() > 1 {
                hull.pop();
                z.pop();
            } else {
                *z.last_mut().unwrap() = s;
                hull.push(i);
                z.push(f64::INFINITY);
                break;
            }
        }
    }
    if hull.is_empty() {
        return (out, win);
    }
    let mut k = 0usize;
    for (q, &vq) in v.iter().enumerate() {
        while k + 1 < hull.len() && z[k] < vq {
            k += 1;
        }
        let i = hull[k];
        let d = vq - v[i];
        out[q] = g[i] - d * d * inv2e;
        win[q] = i;
    }
    (out, win)
}

fn brute_force(
    u: &GridFunction,
    mask: &NodeMask,
    inv2e: f64,
) -> (Vec<f64>, Vec<usize>) {
    let g = u.grid();
    let n = g.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut arg = vec![usize::MAX; n];
    let ys: Vec<usize> = g.nodes().filter(|&id| mask[id]).collect();
    for x in g.nodes() {
        let px = g.coords(x);
        let mut best = f64::NEG_INFINITY;
        let mut besty = usize::MAX;
        for &y in &ys {
            let py = g.coords(y);
            let d2 = px[1] - py[1];
            let d1 = px[0] - py[0];
            // Same associativity as the separable passes: axis 2 first.
            let cand = (u.get(y) - d2 * d2 * inv2e) - d1 * d1 * inv2e;
            if cand > best {
                best = cand;
                besty = y;
            }
        }
        out[x] = best;
        arg[x] = besty;
    }
    (out, arg)
}

fn separable(
    u: &GridFunction,
    mask: &NodeMask,
    inv2e: f64,
) -> (Vec<f64>, Vec<usize>) {
    let g = u.grid();
    let [nx, ny] = g.shape();
    let xs: Vec<f64> = (0..nx).map(|i| g.coords_of(i, 0)[0]).collect();
    let ys: Vec<f64> = (0..ny).map(|j| g.coords(j * nx)[1]).collect();

    // Pass 1 along axis 2 (columns within each row of constant y1 = row x):
    // for each grid row iy fixed? The penalty splits as
    //   (x1-y1)^2 + (x2-y2)^2 with axis 1 = x-coordinate, axis 2 = y.
    // First maximize over y2 for each (y1, x2).
    let mut mid = vec![f64::NEG_INFINITY; nx * ny];
    let mut win2 = vec![usize::MAX; nx * ny];
    if g.dim() == 1 {
        for i in 0..nx {
            mid[i] = if mask[i] { u.get(i) } else { f64::NEG_INFINITY };
        }
    } else {
        let mut col_g = vec![f64::NEG_INFINITY; ny];
        for ix in 0..nx {
            for iy in 0..ny {
                let id = ix + iy * nx;
                col_g[iy] = if mask[id] { u.get(id) } else { f64::NEG_INFINITY };
            }
            let (vals, win) = parabola_envelope_max(&ys, &col_g, inv2e);
            for iy in 0..ny {
                mid[ix + iy * nx] = vals[iy];
                win2[ix + iy * nx] = win[iy];
            }
        }
    }

    // Pass 2 along axis 1.
    let mut out = vec![f64::NEG_INFINITY; nx * ny];
    let mut arg = vec![usize::MAX; nx * ny];
    let mut row_g = vec![f64::NEG_INFINITY; nx];
    for iy in 0..ny {
        for ix in 0..nx {
            row_g[ix] = mid[ix + iy * nx];
        }
        let (vals, win) = parabola_envelope_max(&xs, &row_g, inv2e);
        for ix in 0..nx {
            let id = ix + iy * nx;
            out[id] = vals[ix];
            let w1 = win[ix];
            if w1 != usize::MAX {
                arg[id] = if g.dim() == 1 {
                    w1
                } else {
                    let wy = win2[w1 + iy * nx];
                    w1 + wy * nx
                };
            }
        }
    }
    (out, arg)
}

/// Compute the sup-convolution of `u` over the domain nodes.
pub fn sup_convolution(u: &GridFunction, eps: f64, method: SupConvMethod) -> Result<SupConvResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    u.check_finite()?;
    let g = u.grid();
    let mask: NodeMask = g.nodes().map(|id| g.in_omega(id)).collect();
    if !mask.iter().any(|&m| m) {
        return Err(Error::EmptyMask("sup_convolution domain"));
    }
    let inv2e = 1.0 / (2.0 * eps);
    let (vals, argmax) = match method {
        SupConvMethod::Brute => brute_force(u, &mask, inv2e),
        SupConvMethod::Separable => separable(u, &mask, inv2e),
    };
    let u_eps = GridFunction::from_values(
        g.clone(),
        &format!("{}^eps", u.label()),
        vals,
    )?;
    let sup_abs = g
        .nodes()
        .filter(|&id| mask[id])
        .map(|id| u.get(id).abs())
        .fold(0.0f64, f64::max);
    let r_eps = 2.0 * (eps * sup_abs).sqrt();
    let omega_eps: NodeMask = g
        .nodes()
        .map(|id| g.in_omega(id) && g.dist_to_boundary(id) > r_eps)
        .collect();
    Ok(SupConvResult {
        u_eps,
        eps,
        r_eps,
        omega_eps,
        argmax,
    })
}

/// Worst second-difference witness of a semiconvexity check.
#[derive(Clone, Copy, Debug)]
pub struct SemiconvexWitness {
    pub node: usize,
    pub direction: (i64, i64),
    pub second_difference: f64,
}

/// True iff every axis/diagonal second difference at interior nodes is at
/// least `-lambda - tol`.
pub fn semiconvexity_check(
    w: &GridFunction,
    lambda: f64,
    tol: f64,
) -> (bool, Option<SemiconvexWitness>) {
    let g = w.grid();
    let [hx, hy] = g.spacing();
    let dirs: Vec<((i64, i64), f64)> = if g.dim() == 1 {
        vec![((1, 0), hx * hx)]
    } else {
        vec![
            ((1, 0), hx * hx),
            ((0, 1), hy * hy),
            ((1, 1), hx * hx + hy * hy),
            ((1, -1), hx * hx + hy * hy),
        ]
    };
    let [nx, ny] = g.shape();
    let mut worst: Option<SemiconvexWitness> = None;
    for id in g.nodes() {
        let (ix, iy) = g.ij_of(id);
        for &((dx, dy), len2) in &dirs {
            let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
            let (kx, ky) = (ix as i64 - dx, iy as i64 - dy);
            let inb = |x: i64, y: i64| x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64;
            if !inb(jx, jy) || !inb(kx, ky) {
                continue;
            }
            let a = w.get(jx as usize + jy as usize * nx);
            let b = w.get(kx as usize + ky as usize * nx);
            let dd = (a + b - 2.0 * w.get(id)) / len2;
            if worst.map_or(true, |ww| dd < ww.second_difference) {
                worst = Some(SemiconvexWitness {
                    node: id,
                    direction: (dx, dy),
                    second_difference: dd,
                });
            }
        }
    }
    let ok = worst.map_or(true, |ww| ww.second_difference >= -lambda - tol);
    (ok, worst)
}

/// Outcome of the shrunken-domain subsolution transfer.
#[derive(Clone, Debug)]
pub struct TransferReport {
    pub eps: f64,
    pub r_eps: f64,
    pub nodes_checked: usize,
    pub nodes_passed: usize,
    pub pass_fraction: f64,
    /// Coefficients are frozen at the evaluation node and only the datum is
    /// inflated to `sup f` over the `r_ε` ball; the coefficient shift is
    /// O(r_ε) for continuous data and folds into the tolerance.
    pub note: &'static str,
}

/// Check that the sup-convolution of a discrete subsolution stays a
/// subsolution against the inflated datum `f_ε(x) = sup over the r_ε ball
/// of f` on the shrunken domain.
pub fn subsolution_transfer_check(
    ps: &ProblemSpec,
    u: &GridFunction,
    eps: f64,
    tol: f64,
) -> Result<TransferReport> {
    let sc = sup_convolution(u, eps, SupConvMethod::Separable)?;
    let g = ps.grid.clone();
    if !sc.omega_eps.iter().any(|&m| m) {
        return Err(Error::EmptyShrunkenDomain { r_eps: sc.r_eps });
    }
    let [hx, hy] = g.spacing();
    let (wx, wy) = (
        (sc.r_eps / hx).ceil() as i64,
        (sc.r_eps / hy).ceil() as i64,
    );
    let [nx, ny] = g.shape();
    let mut checked = 0usize;
    let mut passed = 0usize;
    for id in g.interior_nodes() {
        if !sc.omega_eps[id] {
            continue;
        }
        let x = g.coords(id);
        // f_eps: max of f over the discrete r_eps ball.
        let (ix, iy) = g.ij_of(id);
        let mut f_eps = f64::NEG_INFINITY;
        for dy in -wy..=wy {
            for dx in -wx..=wx {
                let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                    continue;
                }
                let j = jx as usize + jy as usize * nx;
                if !g.in_omega(j) {
                    continue;
                }
                let q = g.coords(j);
                if norm2([q[0] - x[0], q[1] - x[1]]) <= sc.r_eps {
                    f_eps = f_eps.max(ps.f.eval(q));
                }
            }
        }
        let grad = gradient_central(&sc.u_eps, id)?;
        let gn = norm2(grad).max(ps.op.eps_grad);
        let d = diffusion_value(&sc.u_eps, id, &ps.op)?;
        let lhs = -psi_eval(&ps.psi, x, gn)? * d + ham_eval(&ps.ham, x, grad);
        checked += 1;
        if lhs <= f_eps + tol {
            passed += 1;
        }
    }
    Ok(TransferReport {
        eps,
        r_eps: sc.r_eps,
        nodes_checked: checked,
        nodes_passed: passed,
        pass_fraction: if checked == 0 {
            0.0
        } else {
            passed as f64 / checked as f64
        },
        note: "coefficients frozen at the evaluation node; only f inflated over the r_eps ball",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Hamiltonian, PsiField, ScalarField};
    use crate::grid::Grid;
    use crate::operators::OperatorConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_fixed() {
        let g = Grid::square(-1.0, 1.0, 21);
        let u = GridFunction::from_fn(g.clone(), "c", |_| 0.7).unwrap();
        let sc = sup_convolution(&u, 0.1, SupConvMethod::Brute).unwrap();
        for id in g.omega_nodes() {
            assert_eq!(sc.u_eps.get(id), 0.7);
            assert_eq!(sc.argmax[id], id);
        }
    }

    #[test]
    fn quadratic_closed_form_1d() {
        // u = -x^2/2 has u^eps = -x^2 / (2 (1 + eps)).
        let g = Grid::line(-1.0, 1.0, 401);
        let u = GridFunction::from_fn(g.clone(), "q", |p| -p[0] * p[0] / 2.0).unwrap();
        let eps = 1.0;
        let sc = sup_convolution(&u, eps, SupConvMethod::Separable).unwrap();
        for id in g.nodes() {
            let x = g.coords(id)[0];
            if x.abs() > 0.9 {
                continue;
            }
            let exact = -x * x / (2.0 * (1.0 + eps));
            assert!(
                (sc.u_eps.get(id) - exact).abs() < 1e-4,
                "x = {x}: {} vs {exact}",
                sc.u_eps.get(id)
            );
        }
    }

    #[test]
    fn brute_equals_separable_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..3 {
            let g = Grid::square(-1.0, 1.0, 32);
            let u = GridFunction::from_fn(g.clone(), "r", |_| rng.gen_range(-1.0..1.0)).unwrap();
            let eps = [1e-3, 1e-2, 0.3][trial];
            let a = sup_convolution(&u, eps, SupConvMethod::Brute).unwrap();
            let b = sup_convolution(&u, eps, SupConvMethod::Separable).unwrap();
            for id in g.nodes() {
                assert!(
                    a.u_eps.get(id).to_bits() == b.u_eps.get(id).to_bits(),
                    "trial {trial} node {id}: {:e} vs {:e}",
                    a.u_eps.get(id),
                    b.u_eps.get(id)
                );
            }
        }
    }

    #[test]
    fn dominates_and_preserves_sup() {
        let g = Grid::unit_disc(41);
        let u = GridFunction::from_fn(g.clone(), "u", |p| {
            (1.0 - p[0] * p[0] - p[1] * p[1]) / 2.0
        })
        .unwrap();
        let sc = sup_convolution(&u, 1e-2, SupConvMethod::Separable).unwrap();
        for id in g.omega_nodes() {
            assert!(sc.u_eps.get(id) >= u.get(id));
        }
        let sup_u = u.sup_omega().unwrap();
        let sup_ue = sc.u_eps.sup_omega().unwrap();
        assert_eq!(sup_u, sup_ue);
    }

    #[test]
    fn monotone_in_eps() {
        let g = Grid::square(-1.0, 1.0, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = GridFunction::from_fn(g.clone(), "u", |_| rng.gen_range(-1.0..1.0)).unwrap();
        let a = sup_convolution(&u, 0.01, SupConvMethod::Separable).unwrap();
        let b = sup_convolution(&u, 0.1, SupConvMethod::Separable).unwrap();
        for id in g.nodes() {
            assert!(a.u_eps.get(id) <= b.u_eps.get(id) + 1e-15);
        }
    }

    #[test]
    fn uniform_convergence_surrogate() {
        // Lipschitz u: ||u^eps - u|| <= (Lip^2/2 + 1) sqrt(eps).
        let g = Grid::square(-1.0, 1.0, 41);
        let u = GridFunction::from_fn(g.clone(), "lip", |p| {
            (p[0].abs() + 0.5 * p[1]).min(0.8)
        })
        .unwrap();
        let lip = 1.5f64;
        for eps in [1e-3, 1e-2, 1e-1] {
            let sc = sup_convolution(&u, eps, SupConvMethod::Separable).unwrap();
            let mut gap = 0.0f64;
            for id in g.omega_nodes() {
                gap = gap.max(sc.u_eps.get(id) - u.get(id));
            }
            assert!(
                gap <= (0.5 * lip * lip + 1.0) * eps.sqrt(),
                "eps {eps}: gap {gap}"
            );
        }
    }

    #[test]
    fn semiconvexity_examples() {
        let g = Grid::square(-1.0, 1.0, 31);
        let bowl = GridFunction::from_fn(g.clone(), "b", |p| p[0] * p[0] + p[1] * p[1]).unwrap();
        assert!(semiconvexity_check(&bowl, 0.0, 1e-10).0);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = GridFunction::from_fn(g.clone(), "r", |_| rng.gen_range(-1.0..1.0)).unwrap();
        let eps = 0.05;
        let sc = sup_convolution(&u, eps, SupConvMethod::Separable).unwrap();
        let (ok, worst) = semiconvexity_check(&sc.u_eps, 1.0 / eps, 1e-9);
        assert!(ok, "worst {:?}", worst);

        // A tent fails for any finite lambda once h is small enough.
        let g1 = Grid::line(-1.0, 1.0, 201);
        let tent = GridFunction::from_fn(g1, "t", |p| -p[0].abs()).unwrap();
        let (ok, worst) = semiconvexity_check(&tent, 50.0, 1e-9);
        assert!(!ok);
        assert!(worst.unwrap().second_difference < -100.0);
    }

    #[test]
    fn transfer_const_exact() {
        let g = Grid::unit_disc(31);
        let ps = ProblemSpec {
            grid: g.clone(),
            psi: PsiField::one(),
            ham: Hamiltonian::zero(),
            op: OperatorConfig::infinity(),
            f: ScalarField::Const(0.0),
            g: ScalarField::Const(0.0),
        };
        let u = GridFunction::from_fn(g, "c", |_| 1.0).unwrap();
        let rep = subsolution_transfer_check(&ps, &u, 1e-4, 1e-12).unwrap();
        assert_eq!(rep.pass_fraction, 1.0);
    }

    #[test]
    fn omega_eps_empty_error() {
        let g = Grid::unit_disc(21);
        let u = GridFunction::from_fn(g.clone(), "u", |p| 1.0 - norm2(p)).unwrap();
        // eps so large that r_eps exceeds the inradius
        let err = sup_convolution(&u, 10.0, SupConvMethod::Separable)
            .and_then(|sc| {
                if sc.omega_eps.iter().any(|&m| m) {
                    Ok(())
                } else {
                    Err(Error::EmptyShrunkenDomain { r_eps: sc.r_eps })
                }
            })
            .unwrap_err();
        assert!(matches!(err, Error::EmptyShrunkenDomain { .. }));
    }
}
