use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use kasteleyn::format::{parse, serialize};
use kasteleyn::generate::{
    generate_random_disc_graph, random_immersion, random_weights, RandomGraphParams,
};
use kasteleyn::geometry::{orient, roots_in_open_unit_interval, Point, QuadNum, QuadPoly, Sign};
use kasteleyn::graph::{EdgeWeights, GraphWithBoundary, Mode};
use kasteleyn::immersion::{is_embedding, is_generic, is_immersion, Configuration};
use kasteleyn::linalg::{det, pfaffian, RatMatrix, SkewMatrix};
use kasteleyn::measure::{kasteleyn_matrix, skew_kasteleyn_matrix, MeasurementTable};
use kasteleyn::oracle::{oracle_table, signed_sum, subset_of_mask};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn point() -> impl Strategy<Value = Point> {
    (-20i64..=20, 1i64..=4, -20i64..=20, 1i64..=4)
        .prop_map(|(xn, xd, yn, yd)| Point::from_fracs(xn, xd, yn, yd))
}

fn int_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        if n == 0 {
            return RatMatrix::zeros(0, 0);
        }
        RatMatrix::from_rows(
            v.chunks(n)
                .map(|r| r.iter().map(|&x| q(x, 1)).collect())
                .collect(),
        )
        .expect("square rows")
    })
}

fn skew(n: usize) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec((-4i64..=4, 1i64..=3), n * (n.saturating_sub(1)) / 2).prop_map(move |v| {
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        SkewMatrix::from_upper(n, pairs.zip(v).map(|(ij, (a, b))| (ij, q(a, b))))
    })
}

/// Independent determinant by cofactor expansion along the first row.
fn cofactor_det(m: &RatMatrix) -> BigRational {
    let n = m.rows();
    if n == 0 {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let term = &m[(0, j)] * cofactor_det(&m.select(&rows, &cols).expect("in range"));
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn small_disc(
    mode: Mode,
    seed: u64,
    internal: usize,
    boundary: usize,
) -> Option<(GraphWithBoundary, Configuration)> {
    let params = RandomGraphParams {
        mode,
        internal,
        excess: if mode == Mode::Bipartite {
            2.min(boundary)
        } else {
            0
        },
        boundary,
        keep_probability: 0.85,
    };
    generate_random_disc_graph(&params, seed).ok()
}

fn table(
    g: &GraphWithBoundary,
    c: &Configuration,
    mode: Mode,
    w: Option<&EdgeWeights>,
    seed: u64,
) -> MeasurementTable {
    match mode {
        Mode::Bipartite => MeasurementTable::from_kasteleyn(
            &kasteleyn_matrix(g, c, w, seed, 32).expect("transport"),
        )
        .expect("table"),
        Mode::General => MeasurementTable::from_skew(
            &skew_kasteleyn_matrix(g, c, w, seed, 32).expect("transport"),
        )
        .expect("table"),
    }
}

fn mode_strategy() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Bipartite), Just(Mode::General)]
}

proptest! {
    #[test]
    fn orient_is_antisymmetric_and_cyclic(p in point(), r in point(), s in point()) {
        let o = orient(&p, &r, &s);
        prop_assert_eq!(orient(&r, &p, &s), o.negate());
        prop_assert_eq!(orient(&r, &s, &p), o);
        prop_assert_eq!(orient(&p, &p, &s), Sign::Zero);
    }

    #[test]
    fn roots_satisfy_vieta(c2 in -9i64..=9, c1 in -30i64..=30, c0 in -30i64..=30, scale in 1i64..=12) {
        let p = QuadPoly::new(q(c2, scale), q(c1, scale), q(c0, scale));
        prop_assume!(!p.is_zero());
        let roots = roots_in_open_unit_interval(&p).unwrap();
        let zero = QuadNum::rational(BigRational::zero());
        let one = QuadNum::rational(BigRational::one());
        for r in &roots {
            prop_assert_eq!(p.sign_at(&r.value), Sign::Zero);
            prop_assert_eq!(r.value.sub(&zero).sign(), Sign::Positive);
            prop_assert_eq!(one.sub(&r.value).sign(), Sign::Positive);
        }
        // Every sign change of p on a grid of (0, 1) brackets a reported root.
        let grid: Vec<BigRational> = (1..64).map(|i| q(i, 64)).collect();
        for pair in grid.windows(2) {
            let (a, b) = (p.eval(&pair[0]), p.eval(&pair[1]));
            if a.is_positive() && b.is_negative() || a.is_negative() && b.is_positive() {
                let lo = QuadNum::rational(pair[0].clone());
                let hi = QuadNum::rational(pair[1].clone());
                let inside = roots.iter().any(|r| r.value.sub(&lo).sign() == Sign::Positive && hi.sub(&r.value).sign() == Sign::Positive);
                prop_assert!(inside, "sign change in {:?} not reported", pair);
            }
        }
        if roots.len() == 2 && !p.coeffs()[0].is_zero() {
            let sum = roots[0].value.add(&roots[1].value);
            let product = roots[0].value.mul(&roots[1].value);
            let [a2, a1, a0] = p.coeffs();
            prop_assert_eq!(sum, QuadNum::rational(-a1 / &a2));
            prop_assert_eq!(product, QuadNum::rational(a0 / a2));
        }
    }

    #[test]
    fn det_matches_cofactor_expansion(m in (0usize..=5).prop_flat_map(int_matrix)) {
        prop_assert_eq!(det(&m).unwrap(), cofactor_det(&m));
    }

    #[test]
    fn pfaffian_squares_to_determinant(x in (0usize..=4).prop_flat_map(|h| skew(2 * h))) {
        let pf = pfaffian(&x);
        prop_assert_eq!(&pf * &pf, det(x.matrix()).unwrap());
    }

    #[test]
    fn odd_pfaffian_is_zero(x in (0usize..=3).prop_flat_map(|h| skew(2 * h + 1))) {
        prop_assert!(pfaffian(&x).is_zero());
    }

    #[test]
    fn pfaffian_of_congruence(
        (x, a) in (1usize..=3).prop_flat_map(|h| (skew(2 * h), int_matrix(2 * h)))
    ) {
        let lhs = pfaffian(&x.congruence(&a).unwrap());
        prop_assert_eq!(lhs, det(&a).unwrap() * pfaffian(&x));
    }

    #[test]
    fn format_round_trips(seed in 0u64..500, mode in mode_strategy(), internal in 0usize..=3, boundary in 0usize..=5, weighted: bool) {
        let Some((mut g, c)) = small_disc(mode, seed, internal, boundary) else { return Ok(()) };
        // Weights are written per edge, so an edgeless file cannot carry them.
        if weighted && g.edge_count() > 0 {
            g.set_weights(Some(random_weights(g.edge_count(), seed))).unwrap();
        }
        let text = serialize(&g, &c);
        let (g2, c2) = parse(&text).unwrap();
        prop_assert_eq!(&g2, &g);
        prop_assert_eq!(&c2, &c);
        prop_assert_eq!(serialize(&g2, &c2), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// At an embedding every matching has sign +1, so minors are plain counts,
    /// whichever gauge the seed selects.
    #[test]
    fn embedded_minors_are_counts(seed in 0u64..400, gauge in 0u64..1000, mode in mode_strategy(), internal in 0usize..=2, boundary in 2usize..=5) {
        let Some((g, c)) = small_disc(mode, seed, internal, boundary) else { return Ok(()) };
        prop_assume!(is_embedding(&g, &c));
        let t = table(&g, &c, mode, None, gauge);
        let oracle = oracle_table(&g, None, 24).unwrap();
        prop_assert_eq!(t.values, oracle);
    }

    #[test]
    fn signed_sum_is_bounded_by_count(seed in 0u64..400, placement in 0u64..1000, mode in mode_strategy(), internal in 1usize..=3, boundary in 2usize..=5) {
        let Some((g, c)) = small_disc(mode, seed, internal, boundary) else { return Ok(()) };
        let drawing = random_immersion(&g, &c, placement);
        prop_assume!(is_immersion(&g, &drawing) && is_generic(&g, &drawing));
        let oracle = oracle_table(&g, None, 24).unwrap();
        for (mask, count) in oracle.iter().enumerate() {
            let s = signed_sum(&g, &drawing, &subset_of_mask(&g, mask), None).unwrap();
            prop_assert!(s.abs() <= *count);
            // Parity: the signed and unsigned sums differ by twice the negative part.
            prop_assert!(((count - &s) / BigRational::from_integer(2.into())).is_integer());
        }
    }

    /// Every matching covers each internal vertex once, so scaling the
    /// weights around one internal vertex scales every measurement.
    #[test]
    fn vertex_weight_scaling(seed in 0u64..400, wseed in 0u64..1000, mode in mode_strategy(), lambda in (1i64..=7, 1i64..=7), internal in 1usize..=2, boundary in 2usize..=5) {
        let Some((g, c)) = small_disc(mode, seed, internal, boundary) else { return Ok(()) };
        prop_assume!(is_embedding(&g, &c));
        let v = g.internal_vertices()[wseed as usize % g.internal_vertices().len()];
        let lambda = q(lambda.0, lambda.1);
        let w = random_weights(g.edge_count(), wseed);
        let mut scaled = w.clone();
        for (e, edge) in g.edges().iter().enumerate() {
            if edge.0 == v || edge.1 == v {
                scaled.0[e] = &scaled.0[e] * &lambda;
            }
        }
        let base = table(&g, &c, mode, Some(&w), 0);
        let after = table(&g, &c, mode, Some(&scaled), 0);
        for (a, b) in base.values.iter().zip(&after.values) {
            prop_assert_eq!(a * &lambda, b.clone());
        }
    }
}
