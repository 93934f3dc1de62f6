// quick Example 2 sanity probe
use orbitflow::flows::{multi_restart, FlowConfig, OrbitKind, OrbitProblem};
use orbitflow::matcore::{CMatrix, C64};

fn main() {
    let a = CMatrix::from_real(3, 3, &[2.,5.,11., 5.,8.,15., 11.,15.,16.]).unwrap();
    let b = CMatrix::from_real(3, 3, &[6.,8.,9., 8.,12.,10., 9.,10.,0.]).unwrap();
    let c = CMatrix::from_real(3, 3, &[1.,11.,3., 6.,9.,3., 8.,9.,2.]).unwrap();
    let ib = b.scale(C64::new(0.0, 1.0));
    let p = OrbitProblem::new(OrbitKind::Similarity, c, vec![a, ib]).unwrap();
    for obj_tol in [1e-13, 1e-15] {
        let config = FlowConfig { restarts: 20, seed: 0, obj_tol, ..FlowConfig::default() };
        let t0 = std::time::Instant::now();
        let res = multi_restart(&p, &config).unwrap();
        let best_sq = res.best().best_objective.powi(2);
        println!("obj_tol={obj_tol:.0e}: best^2 = {best_sq:.13}, mean = {:.13e}, rmsd = {:.3e}", res.stats.mean_sq, res.stats.rmsd_sq);
        println!("  |best - 605.8521310913004| = {:.3e}  iters max {:?} elapsed {:?}",
            (best_sq - 605.8521310913004f64).abs(),
            res.results.iter().map(|r| r.iterations()).max(),
            t0.elapsed());
        println!("  statuses: grad={} obj={} budget={}",
            res.results.iter().filter(|r| r.status == orbitflow::flows::FlowStatus::ConvergedGradient).count(),
            res.results.iter().filter(|r| r.status == orbitflow::flows::FlowStatus::ConvergedObjective).count(),
            res.results.iter().filter(|r| r.status == orbitflow::flows::FlowStatus::BudgetExhausted).count());
    }
}
