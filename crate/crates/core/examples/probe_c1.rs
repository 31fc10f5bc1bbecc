use degelliptic::fields::{Hamiltonian, PsiField, ScalarField};
use degelliptic::grid::{Grid, GridFunction};
use degelliptic::operators::{Convention, OperatorConfig};
use degelliptic::solver::{solve_dirichlet, ProblemSpec, SolveParams};
use std::time::Instant;

fn solve_disc(n: usize) -> (f64, f64, bool, usize) {
    let ps = ProblemSpec {
        grid: Grid::unit_disc(n),
        psi: PsiField::one(),
        ham: Hamiltonian::zero(),
        op: OperatorConfig::p_finite(3.0).with_convention(Convention::Mean),
        f: ScalarField::Const(1.0),
        g: ScalarField::Const(0.0),
    };
    let params = SolveParams { tol: 5e-4, safety: 1.0, max_iters: 120_000, ..Default::default() };
    let t0 = Instant::now();
    let out = solve_dirichlet(&ps, &params).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let exact = GridFunction::from_fn(ps.grid.clone(), "ex", |p| (1.0 - p[0]*p[0] - p[1]*p[1]) / 2.0).unwrap();
    let mut err = 0.0f64;
    for id in ps.grid.omega_nodes() {
        err = err.max((out.u.get(id) - exact.get(id)).abs());
    }
    (err, secs, out.converged, out.iterations)
}

fn main() {
    let (e51, t51, c51, i51) = solve_disc(51);
    println!("51^2 : err {e51:.5} time {t51:.1}s converged {c51} iters {i51}");
    let (e101, t101, c101, i101) = solve_disc(101);
    println!("101^2: err {e101:.5} time {t101:.1}s converged {c101} iters {i101}");
    println!("ratio e51/e101 = {:.3}", e51 / e101);
}
