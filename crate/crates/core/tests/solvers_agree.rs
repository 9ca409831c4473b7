use sprrp_core::heuristic::{solve_heuristic, HeuristicConfig};
use sprrp_core::oracle::{enumerate_all, DEFAULT_LIMIT};
use sprrp_core::random::{random_instance, RandomSpec};
use sprrp_core::solution::audit;
use sprrp_core::{expand, solve_exact, SolveStatus, SolverConfig};

#[test]
fn exact_matches_oracle_on_small_instances() {
    let spec = RandomSpec::default();
    let mut nonzero = 0;
    for seed in 0..200 {
        let inst = random_instance(seed, &spec);
        let graph = expand(&inst).unwrap();
        let exact = solve_exact(&inst, &SolverConfig::default()).unwrap();
        let (oracle, _) = enumerate_all(&inst, DEFAULT_LIMIT).unwrap();
        assert_eq!(exact.status, SolveStatus::Optimal);
        assert_eq!(exact.objective, oracle.objective, "seed {seed}");
        audit(&inst, &graph, &exact).unwrap();
        audit(&inst, &graph, &oracle).unwrap();
        if exact.objective > 0.0 {
            nonzero += 1;
        }
    }
    assert!(nonzero > 100, "only {nonzero} instances with positive optimum");
}

#[test]
fn heuristic_stays_close_to_exact() {
    let spec = RandomSpec::default();
    let mut worst = 1.0f64;
    for seed in 0..200 {
        let inst = random_instance(seed, &spec);
        let exact = solve_exact(&inst, &SolverConfig::default()).unwrap();
        let heur = solve_heuristic(&inst, &HeuristicConfig { seed, ..Default::default() }).unwrap();
        assert!(heur.objective <= exact.objective, "seed {seed}");
        if exact.objective > 0.0 {
            worst = worst.min(heur.objective / exact.objective);
        }
    }
    eprintln!("worst heuristic ratio {worst}");
    assert!(worst >= 0.9);
}
