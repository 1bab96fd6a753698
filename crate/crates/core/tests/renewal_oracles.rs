use pwd_core::renewal::*;

#[test]
fn poisson_counting_probabilities() {
    // second-order rule; 1e-8 needs h = 2.5e-4 on t ≤ 5
    let rate = 1.0;
    let grid = TimeGrid::new(5.0, 20000).unwrap();
    let table = counting_probabilities(&WaitingTimeDist::exponential(rate).unwrap(), &grid, DEFAULT_K_MAX);
    let mut worst: f64 = 0.0;
    for (n, t) in grid.nodes().enumerate() {
        let mut pk = (-rate * t).exp();
        for k in 0..=10 {
            worst = worst.max((table.p(k, n) - pk).abs());
            pk *= rate * t / (k + 1) as f64;
        }
    }
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn exponential_parity_is_exp_minus_two_gamma_t() {
    for rate in [0.5, 2.0] {
        let grid = TimeGrid::new(5.0 / rate, 20000).unwrap();
        let q = parity_q(&WaitingTimeDist::exponential(rate).unwrap(), &grid);
        let worst = grid.nodes().zip(&q).map(|(t, q)| (q - (-2.0 * rate * t).exp()).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "rate {rate}: {worst}");
    }
}

#[test]
fn parity_equals_alternating_sum_for_every_builtin() {
    let grid = TimeGrid::new(5.0, 5000).unwrap();
    for w in [
        WaitingTimeDist::exponential(1.0).unwrap(),
        WaitingTimeDist::erlang(2, 1.0).unwrap(),
        WaitingTimeDist::erlang(3, 2.0).unwrap(),
    ] {
        let q = parity_q(&w, &grid);
        let alt = counting_probabilities(&w, &grid, DEFAULT_K_MAX).parity_sum();
        let worst = q.iter().zip(&alt).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{w:?}: {worst}");
    }
}

#[test]
fn counting_probabilities_sum_to_one() {
    let grid = TimeGrid::new(5.0, 1000).unwrap();
    let table = counting_probabilities(&WaitingTimeDist::erlang(2, 1.0).unwrap(), &grid, DEFAULT_K_MAX);
    for n in 0..grid.len() {
        assert!((table.total(n) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn weights_rows_sum_to_distribution_function() {
    let grid = TimeGrid::new(3.0, 300).unwrap();
    let w = WaitingTimeDist::erlang(3, 1.5).unwrap();
    let pw = ProductWeights::new(&w, &grid);
    for n in 1..grid.len() {
        let s: f64 = pw.row(n).iter().sum();
        assert!((s - (1.0 - w.survival(grid.t(n)).unwrap())).abs() < 1e-14);
    }
}

#[test]
fn sampled_mean_waiting_time() {
    let w = WaitingTimeDist::erlang(2, 2.0).unwrap();
    let traj = sample_trajectory(&w, 20000.0, 11).unwrap();
    let mean = 20000.0 / traj.jump_times.len() as f64;
    assert!((mean - w.mean()).abs() < 0.02, "{mean}");
}
