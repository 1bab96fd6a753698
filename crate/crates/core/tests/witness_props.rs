use pwd_core::blocks::*;
use pwd_core::engines::*;
use pwd_core::renewal::*;
use pwd_core::witness::*;

fn free_damping(ratio: f64) -> WitnessFunctions {
    let grid = TimeGrid::new(20.0, 20000).unwrap();
    let traj = MapTrajectory::free(&TimedMapSpec::Damping(DampingParams::new(1.0, ratio).unwrap()), grid).unwrap();
    witness_functions(&traj, DEFAULT_EPS_GROWTH).unwrap()
}

#[test]
fn free_damping_markovianity_threshold() {
    for ratio in [0.1, 0.4] {
        assert!(!free_damping(ratio).detected, "ratio {ratio}");
    }
    for ratio in [0.6, 1.0, 3.0] {
        assert!(free_damping(ratio).detected, "ratio {ratio}");
    }
}

#[test]
fn pair_search_is_reproducible_and_finds_revivals() {
    let grid = TimeGrid::new(10.0, 1000).unwrap();
    let p = ProcessSpec::new(
        TimedMapSpec::Dephasing(DephasingProfile::cosine(1.0).unwrap()),
        ChannelSpec::Pauli(PauliIndex::X),
        WaitingTimeDist::erlang(3, 0.5).unwrap(),
        grid,
    )
    .unwrap();
    let traj = solve_volterra_map(&p).unwrap();
    let a = pair_search(&traj, 8, 3, DEFAULT_EPS_GROWTH).unwrap();
    let b = pair_search(&traj, 8, 3, DEFAULT_EPS_GROWTH).unwrap();
    assert!(a.detected);
    assert_eq!(a.nm_measure, b.nm_measure);
    assert_eq!(a.pairs.len(), 3 + 8);
    assert!(a.pairs.iter().all(|r| r.d_values.iter().all(|d| (0.0..=1.0 + 1e-12).contains(d))));
}

#[test]
fn fast_jumps_suppress_d_minus_but_not_q() {
    let mut sp = SurfaceParams::defaults(SurfaceExample::Dephasing);
    sp.ratios = vec![0.5, 20.0];
    let s = sweep_surface(&sp).unwrap();
    let dm: Vec<f64> = s.growth_of("d_minus").map(|g| g.nm_measure).collect();
    assert!(dm[1] < dm[0]);
    assert!(s.growth_of("q").all(|g| g.detected));
    assert_eq!(s.layer("q").unwrap().values.len(), 2);
}
