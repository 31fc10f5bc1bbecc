use degelliptic::cli::build_battery;
use degelliptic::solver::solve_dirichlet;
use degelliptic::grid::norm2;

fn main() {
    for inst in build_battery(51, 16) {
        if inst.name != "log-double-phase-two-power-h1" { continue; }
        let out = solve_dirichlet(&inst.spec, &inst.solve).unwrap();
        println!("converged {} iters {} res {}", out.converged, out.iterations, out.final_residual);
        let g = inst.spec.grid.clone();
        // cross-section along y = 0
        let (nx, ny) = (g.shape()[0], g.shape()[1]);
        let iy = ny / 2;
        for ix in (0..nx).step_by(2) {
            let id = ix + iy * nx;
            let p = g.coords(id);
            if g.in_omega(id) {
                println!("x={:+.3} r={:.3} u={:.4}", p[0], norm2(p), out.u.get(id));
            }
        }
        let m = out.u.sup_omega().unwrap();
        println!("M = {m}");
    }
}
