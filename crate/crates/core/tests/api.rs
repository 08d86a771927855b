use fq_core::dynamics::{analyze_prime, fixed_point_distribution, orbit_brent};
use fq_core::prng::{
    concentration_count, star_discrepancy_1d, star_discrepancy_nd, star_discrepancy_nd_estimate,
    PointSet, QuotientSequence,
};
use fq_core::{
    build_lookup, generate_table, graph_stats, make_context, orbit, qp_lookup, table_stream_fold,
    FqError, U0Policy,
};

#[test]
fn streamed_and_stored_tables_agree() {
    for p in [3u64, 101, 7919, 65537] {
        let ctx = make_context(p, true).unwrap();
        let table = generate_table(&ctx).unwrap();
        let fixed = table_stream_fold(&ctx, 0u64, |n, u, q| n + (u != 0 && q.0 as u64 == u) as u64)
            .unwrap();
        assert_eq!(fixed, graph_stats(&table).fixed_points_excl0, "p = {p}");
    }
}

#[test]
fn lookup_agrees_with_table() {
    let ctx = make_context(7919, true).unwrap();
    let table = generate_table(&ctx).unwrap();
    let lookup = build_lookup(&ctx, 89.0).unwrap();
    for u in 0..7919 {
        assert_eq!(qp_lookup(&lookup, u), table.get(u));
    }
}

#[test]
fn orbit_paths_agree() {
    let ctx = make_context(10007, true).unwrap();
    let table = generate_table(&ctx).unwrap();
    for u0 in [0u64, 1, 2, 3, 5000, 10006] {
        let a = orbit(&ctx, u0, Some(&table)).unwrap();
        let b = orbit(&ctx, u0, None).unwrap();
        let c = orbit_brent(|u| ctx.eval_unsigned(u).0 as u64, u0);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
    let other = generate_table(&make_context(10009, true).unwrap()).unwrap();
    assert!(matches!(
        orbit(&ctx, 2, Some(&other)),
        Err(FqError::BadParameter(_))
    ));
}

#[test]
fn sweep_rows_are_policy_consistent() {
    let row = analyze_prime(1009, U0Policy::Fixed(2)).unwrap();
    let ctx = make_context(1009, true).unwrap();
    let o = orbit(&ctx, 2, None).unwrap();
    assert_eq!((row.rho, row.mu, row.u0), (o.rho, o.mu, 2));
    let seeded = analyze_prime(1009, U0Policy::SeededRandom(3)).unwrap();
    assert!((1..1009).contains(&seeded.u0));
    assert_eq!(
        seeded,
        analyze_prime(1009, U0Policy::SeededRandom(3)).unwrap()
    );

    let dist = fixed_point_distribution(3, 2000).unwrap();
    assert_eq!(dist.values().sum::<u64>(), 302);
}

#[test]
fn concentration_windows_cover_the_table() {
    let ctx = make_context(1009, true).unwrap();
    let table = generate_table(&ctx).unwrap();
    let total: u64 = (0..1009 / 10 + 1)
        .map(|i| concentration_count(&table, i * 10 - 1, 10))
        .sum::<u64>();
    // 102 windows of width 10 cover 1020 residues, i.e. 11 residues twice.
    assert!(total >= 1009);
    assert_eq!(concentration_count(&table, 0, 1009), 1009);
}

#[test]
fn discrepancy_of_quotient_points() {
    let seq = QuotientSequence::for_context(&make_context(1009, true).unwrap()).unwrap();
    let one = PointSet::from_quotients(&seq, 0, 1009, 1).unwrap();
    let xs: Vec<f64> = (0..one.len()).map(|i| one.point(i)[0]).collect();
    let d1 = star_discrepancy_1d(&xs).unwrap();
    assert_eq!(d1, star_discrepancy_nd(&one).unwrap());
    assert!(d1 > 0.0 && d1 < 1.0);

    let two = PointSet::from_quotients(&seq, 5, 800, 2).unwrap();
    let exact = star_discrepancy_nd(&two).unwrap();
    let estimate = star_discrepancy_nd_estimate(&two, 5000, 1).unwrap();
    assert!(estimate <= exact + 1e-12);
    assert!(exact >= 1.0 / 800.0);
}
