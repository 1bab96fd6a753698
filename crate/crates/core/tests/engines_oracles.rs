use pwd_core::blocks::*;
use pwd_core::engines::*;
use pwd_core::qstate::*;
use pwd_core::renewal::*;

fn builtins(rate: f64) -> [WaitingTimeDist; 3] {
    [
        WaitingTimeDist::exponential(rate).unwrap(),
        WaitingTimeDist::erlang(2, rate).unwrap(),
        WaitingTimeDist::erlang(3, rate).unwrap(),
    ]
}

#[test]
fn semigroup_is_recovered_for_every_waiting_time() {
    let sg = TimedMapSpec::semigroup(LindbladSpec::pure_dephasing(0.4).unwrap());
    let grid = TimeGrid::new(5.0, 5000).unwrap();
    for w in builtins(1.3) {
        let p = ProcessSpec::new(sg.clone(), ChannelSpec::Pauli(PauliIndex::I), w, grid).unwrap();
        let traj = solve_volterra_map(&p).unwrap();
        for (t, m) in grid.nodes().zip(&traj.maps) {
            assert!(m.max_abs_diff(&eval_f(&sg, t).unwrap()) <= 1e-6);
        }
    }
}

#[test]
fn closed_form_matches_volterra_for_all_pauli_channels() {
    let grid = TimeGrid::new(4.0, 800).unwrap();
    let d = DephasingProfile::cosine(1.3).unwrap();
    let damp = DampingParams::new(1.0, 0.4).unwrap();
    for w in builtins(0.8) {
        for pi in PauliIndex::ALL {
            let c = ChannelSpec::Pauli(pi);
            let a = assemble_lambda_dephasing(&d, &w, &c, &grid).unwrap();
            let v = solve_volterra_map(&ProcessSpec::new(TimedMapSpec::Dephasing(d.clone()), c.clone(), w, grid).unwrap()).unwrap();
            assert!(a.trajectory.max_abs_diff(&v) <= 1e-8);
            let a = assemble_lambda_damping(&damp, &w, &c, &grid).unwrap();
            let v = solve_volterra_map(&ProcessSpec::new(TimedMapSpec::Damping(damp), c, w, grid).unwrap()).unwrap();
            assert!(a.trajectory.max_abs_diff(&v) <= 1e-8);
            assert!(a.corner_check.unwrap() <= 1e-10);
        }
    }
}

#[test]
fn master_equation_tracks_the_map_for_a_kraus_channel() {
    let grid = TimeGrid::new(3.0, 3000).unwrap();
    let p = ProcessSpec::new(
        TimedMapSpec::Damping(DampingParams::new(1.0, 3.0).unwrap()),
        ChannelSpec::amplitude_damping(0.6).unwrap(),
        WaitingTimeDist::erlang(2, 1.0).unwrap(),
        grid,
    )
    .unwrap();
    let rho0 = DensityMatrix::from_bloch(0.2, 0.7, -0.4).unwrap();
    let traj = solve_volterra_map(&p).unwrap();
    let states = integrate_master_equation(&p, &rho0).unwrap();
    let v0 = to_pauli_vec(&rho0);
    let exact: Vec<_> = traj.maps.iter().map(|m| m.apply_vec(&v0).unwrap().into_coeffs()).collect();
    assert!(states.max_abs_diff_from(&exact) <= 1e-4);
}

#[test]
fn monte_carlo_agrees_with_volterra() {
    let coarse = TimeGrid::new(2.0, 20).unwrap();
    let sg = TimedMapSpec::semigroup(LindbladSpec::precession(1.0));
    let p = ProcessSpec::new(sg, ChannelSpec::Pauli(PauliIndex::Y), WaitingTimeDist::erlang(3, 2.0).unwrap(), coarse).unwrap();
    let mc = simulate_monte_carlo(&p, 20_000, 5).unwrap();
    let v = solve_volterra_map(&p.with_grid(coarse.refine(100)).unwrap()).unwrap();
    for (n, (m, se)) in mc.trajectory.maps.iter().zip(&mc.stderr).enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                let tol = (4.0 * se.get(i, j)).max(1e-2);
                assert!((m.get(i, j) - v.maps[n * 100].get(i, j)).abs() <= tol);
            }
        }
    }
}

#[test]
fn erlang2_kernel_and_budini_limit() {
    let grid = TimeGrid::new(5.0, 20000).unwrap();
    let k = renewal_kernel_k(&WaitingTimeDist::erlang(2, 1.0).unwrap(), &grid).unwrap();
    let worst = grid.nodes().zip(&k.regular.values).map(|(t, v)| (v - (-2.0 * t).exp()).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");
    assert_eq!(k.point_mass, 0.0);

    // Budini evolution equals the Volterra solution with F the semigroup
    let l = LindbladSpec::pure_dephasing(0.2).unwrap();
    let g = TimeGrid::new(3.0, 3000).unwrap();
    let w = WaitingTimeDist::erlang(2, 1.0).unwrap();
    let c = ChannelSpec::Pauli(PauliIndex::X);
    let rho0 = DensityMatrix::from_bloch(0.3, 0.3, 0.3).unwrap();
    let b = integrate_budini(&l, &c, &w, &rho0, &g).unwrap();
    let v = solve_volterra_map(&ProcessSpec::new(TimedMapSpec::semigroup(l), c, w, g).unwrap()).unwrap();
    let v0 = to_pauli_vec(&rho0);
    let exact: Vec<_> = v.maps.iter().map(|m| m.apply_vec(&v0).unwrap().into_coeffs()).collect();
    assert!(b.max_abs_diff_from(&exact) <= 1e-6);
}

#[test]
fn reset_residual_is_small_for_identity_channel() {
    let grid = TimeGrid::new(5.0, 5000).unwrap();
    let damping = TimedMapSpec::Damping(DampingParams::new(1.0, 3.0).unwrap());
    for w in builtins(1.0) {
        let traj = solve_volterra_map(&ProcessSpec::new(damping.clone(), ChannelSpec::Pauli(PauliIndex::I), w, grid).unwrap()).unwrap();
        let r = reset_equation_residual(&damping, &w, &traj).unwrap();
        assert!(r.iter().all(|x| *x <= 1e-4));
    }
}

#[test]
fn engine_errors_are_typed() {
    let grid = TimeGrid::new(1.0, 10).unwrap();
    let c = ChannelSpec::amplitude_damping(0.5).unwrap();
    let err = assemble_lambda_dephasing(&DephasingProfile::cosine(1.0).unwrap(), &WaitingTimeDist::exponential(1.0).unwrap(), &c, &grid);
    assert!(err.is_err());
    // step too coarse for the implicit coefficient
    let w = WaitingTimeDist::exponential(100.0).unwrap();
    assert!(ProcessSpec::new(TimedMapSpec::Identity { dim: 2 }, ChannelSpec::Pauli(PauliIndex::X), w, grid).is_err());
}
