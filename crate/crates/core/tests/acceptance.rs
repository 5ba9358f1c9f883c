//! Acceptance suite: eleven end-to-end criteria, one test (and one
//! printed pass line) per criterion, each with a pinned wall-clock
//! budget. Run with `--nocapture` to see the lines on success.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use e6v_core::lattice::E6Lattice;
use e6v_core::qforms::{hilbert_symbol, local_solvability_oracle, Place, SquareClass};
use e6v_core::schlafli::{build_omega, clique_census, double_six, edges_in_unique_triangle};
use e6v_core::sw::{
    hcprime_total_class, m_vector_dim6, m_vector_from_action, m_vector_from_masks, solve_p,
    symmetric_extract_p, total_class, trace_form_class, CoeffRing, F2Poly, InvElement, MVector,
    SwError,
};
use e6v_core::twisting::{
    q27_routes_agree, randomized_suite, sample_twists, verify_identity, CheckKind, IdentityName,
    TwistSpec,
};
use e6v_core::weyl::{GSet, WeylGroup};
use e6v_core::VerifyContext;

static CTX: OnceLock<VerifyContext> = OnceLock::new();

fn ctx() -> &'static VerifyContext {
    CTX.get_or_init(|| VerifyContext::build().expect("shared context builds"))
}

/// Print the criterion's pass line and enforce its time budget.
fn pass(criterion: usize, what: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("criterion {criterion:2}: pass - {what} ({elapsed:.2?}, budget {budget:?})");
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_01_lattice_and_graph_census() {
    let start = Instant::now();
    let lat = E6Lattice::build().expect("lattice builds");
    assert_eq!(lat.gram_det(), 1);
    assert_eq!(lat.gram_signature(), (1, 6));
    assert_eq!(lat.roots().len(), 72);
    assert_eq!(lat.lines().len(), 27);
    let h = lat.h();
    assert_eq!(lat.q_l(&h, &h), 3);
    for line in lat.lines() {
        assert_eq!(lat.q_l(&h, &line.point), 1);
        assert_eq!(lat.q_l(&line.point, &line.point), -1);
    }
    let graph = build_omega(&lat);
    let census = clique_census(&graph);
    assert_eq!(
        (census.vertices, census.edges, census.triangles, census.tetrahedra),
        (27, 135, 45, 0)
    );
    assert!((0..27).all(|v| graph.degree(v) == 10));
    assert!(edges_in_unique_triangle(&graph));
    let weyl = WeylGroup::generate(&lat).expect("group generates");
    let sixes: BTreeSet<Vec<(usize, usize)>> = weyl
        .positive_roots
        .iter()
        .map(|root| {
            let mut couples = double_six(&lat, root).expect("double six").couples.to_vec();
            couples.sort_unstable();
            couples
        })
        .collect();
    assert_eq!(sixes.len(), 36);
    pass(
        1,
        "lattice invariants, graph census, and 36 double sixes from scratch",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_02_involution_and_cube_taxonomy() {
    let c = ctx();
    let start = Instant::now();
    let lat = E6Lattice::build().expect("lattice builds");
    let weyl = WeylGroup::generate(&lat).expect("group generates");
    assert_eq!(weyl.order(), 51840);
    assert_eq!(weyl.involution_census().by_degree, [1, 36, 270, 540, 45]);
    let counts: Vec<usize> = (1..=5)
        .map(|rank| weyl.cubes_of_rank(&lat, rank).len())
        .collect();
    assert_eq!(counts, [36, 270, 540, 135, 0]);
    let maximal = weyl.maximal_cubes(&lat);
    assert_eq!(maximal.len(), 135);
    for cube in &maximal {
        let mut profile = [0usize; 5];
        for id in weyl.cube_elements(cube) {
            let d = weyl.involution_degree(weyl.group.element(id)).expect("involution");
            profile[d as usize] += 1;
        }
        assert_eq!(profile, [1, 4, 6, 4, 1]);
    }
    let info = c.weyl.normalizer_image(&c.lattice, &c.cube.cube);
    assert_eq!(
        (info.normalizer_order, info.centralizer_order, info.image_size),
        (384, 16, 24)
    );
    pass(
        2,
        "group order, involution census, cube counts, maximal profiles, normalizer",
        start,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_03_cube_orbit_structure() {
    let c = ctx();
    let start = Instant::now();
    let mut line_sizes: Vec<usize> = c.line_orbits.iter().map(|o| o.len()).collect();
    line_sizes.sort_unstable();
    assert_eq!(line_sizes, [1, 1, 1, 4, 4, 4, 4, 4, 4]);
    let tops: BTreeSet<u8> = c
        .line_orbits
        .iter()
        .filter(|o| o.len() == 4)
        .map(|o| *o.stabilizer_masks.iter().max().expect("nonempty"))
        .collect();
    assert_eq!(tops, BTreeSet::from([3, 5, 6, 9, 10, 12]));
    for orbit in c.line_orbits.iter().filter(|o| o.len() == 4) {
        assert_eq!(orbit.stabilizer_masks.len(), 4, "order-4 stabilizer");
    }
    let mut tri_sizes: Vec<usize> = c.triangle_orbits.iter().map(|o| o.len()).collect();
    tri_sizes.sort_unstable();
    assert_eq!(tri_sizes, [1, 2, 2, 2, 2, 2, 2, 8, 8, 8, 8]);
    pass(
        3,
        "line orbits 3x1 + 6x4 with the six order-4 stabilizers; triangle orbits 1 + 6x2 + 4x8",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_04_component_decompositions() {
    let c = ctx();
    let start = Instant::now();
    // verify_identity checks the pinned character components entry by
    // entry for these three identities before comparing the two sides.
    for twist in [
        TwistSpec::TRIVIAL,
        TwistSpec::from_ints([-1, 2, 3, 5]).expect("twist"),
    ] {
        for name in [
            IdentityName::Thm2_44,
            IdentityName::Thm2_45,
            IdentityName::Thm2_46,
        ] {
            let report = verify_identity(c, name, &twist).expect("identity evaluates");
            assert!(report.verdict, "{name} fails at {twist}");
        }
    }
    assert_eq!(c.q6_cform.components.len(), 5);
    assert_eq!(c.q7_cform.components.len(), 5);
    assert_eq!(c.q27_cform.components.len(), 11);
    pass(
        4,
        "character components pinned entry by entry and all three isometries hold",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_05_randomized_identity_suite() {
    let c = ctx();
    let start = Instant::now();
    let reports = randomized_suite(c, 0, 50).expect("suite runs");
    assert_eq!(reports.len(), 50 * 19);
    assert!(reports.iter().all(|r| r.verdict));
    assert!(
        reports.iter().any(|r| r.kind == CheckKind::Isotropy),
        "suite includes the isotropy identity"
    );
    pass(
        5,
        "all 19 twisted identities hold at 50 seeded twists",
        start,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_06_q27_two_routes() {
    let c = ctx();
    let start = Instant::now();
    for twist in sample_twists(0, 50).expect("twists sample") {
        assert!(q27_routes_agree(c, &twist), "routes differ at {twist}");
    }
    pass(
        6,
        "character-sum and orbit-trace constructions of the 27-dimensional twist agree",
        start,
        Duration::from_secs(30),
    );
}

const M_DIM6: MVector = MVector([1, 2, 3, 4]);
const M_LINES: MVector = MVector([6, 10, 12, 12]);
const M_TRIANGLES: MVector = MVector([15, 20, 19, 16]);

fn real_m_vectors(c: &VerifyContext) -> (MVector, MVector, MVector) {
    (
        m_vector_dim6(&c.weyl, &c.cube).expect("involutions"),
        m_vector_from_action(&c.weyl, &c.cube, &GSet::lines()).expect("involutions"),
        m_vector_from_action(&c.weyl, &c.cube, &c.triangles).expect("involutions"),
    )
}

#[test]
fn criterion_07_class_tables() {
    let c = ctx();
    let start = Instant::now();
    let (dim6, lines, triangles) = real_m_vectors(c);
    assert_eq!((dim6, lines, triangles), (M_DIM6, M_LINES, M_TRIANGLES));

    let one = F2Poly::one();
    assert_eq!(solve_p(&dim6).expect("solvable"), [one.clone(), one.clone(), one.clone(), one]);
    assert_eq!(
        solve_p(&lines).expect("solvable"),
        [
            F2Poly::from_exponents(&[1, 3, 5]),
            F2Poly::from_exponents(&[0, 6, 8]),
            F2Poly::from_exponents(&[3, 7, 9]),
            F2Poly::from_exponents(&[0, 4, 8]),
        ]
    );
    let p3: Vec<usize> = (2..=12).chain(14..=17).collect();
    assert_eq!(
        solve_p(&triangles).expect("solvable"),
        [
            F2Poly::from_exponents(&(0..=14).collect::<Vec<_>>()),
            F2Poly::from_exponents(&[2, 14, 18]),
            F2Poly::from_exponents(&p3),
            F2Poly::from_exponents(&[12]),
        ]
    );

    let line_total = total_class(&lines).expect("total class");
    let mut deg2 = InvElement::zero();
    deg2.coeffs[1] = CoeffRing::e_pow(1);
    deg2.coeffs[2] = CoeffRing::one();
    assert_eq!(line_total.graded_piece(2), deg2);
    assert!((1..=13).step_by(2).all(|d| line_total.graded_piece(d).is_zero()));
    assert_eq!(line_total.max_degree(), Some(12));

    let mut f1 = InvElement::one();
    f1.coeffs[1] = CoeffRing::e_pow(1);
    f1.coeffs[2] = CoeffRing::one();
    let mut f2 = InvElement::one();
    f2.coeffs[1] = CoeffRing::e_pow(3);
    f2.coeffs[4] = CoeffRing::one();
    let mut f3 = InvElement::one();
    f3.coeffs[2] = CoeffRing::e_pow(6);
    f3.coeffs[4] = CoeffRing::e_pow(4);
    assert_eq!(f1.mul(&f2).mul(&f3), line_total);

    let tri_total = total_class(&triangles).expect("total class");
    let mut deg20 = InvElement::zero();
    deg20.coeffs[2] = CoeffRing::e_pow(18);
    deg20.coeffs[3] = CoeffRing::e_pow(17);
    assert_eq!(tri_total.graded_piece(20), deg20);
    assert_eq!(tri_total.max_degree(), Some(20));
    assert_eq!(total_class(&dim6).expect("total class").max_degree(), Some(4));
    pass(
        7,
        "m-vectors from the real actions; class tables bit-exact; graded pieces and factorization",
        start,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_08_interpolation() {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for _ in 0..200 {
        let mults: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..3));
        let mut masks = Vec::new();
        for mask in 1u8..16 {
            for _ in 0..mults[mask.count_ones() as usize - 1] {
                masks.push(mask);
            }
        }
        let extracted = symmetric_extract_p(&hcprime_total_class(&masks)).expect("symmetric");
        let solved = solve_p(&m_vector_from_masks(masks.iter().copied())).expect("solvable");
        assert_eq!(extracted, solved);
    }
    pass(
        8,
        "interpolation-ring extraction equals the solver on 200 seeded symmetric multisets",
        start,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_09_congruences_and_witness() {
    let c = ctx();
    let start = Instant::now();
    let (dim6, lines, triangles) = real_m_vectors(c);
    for m in [dim6, lines, triangles] {
        assert!(m.satisfies_congruences(), "{m:?}");
    }
    assert_eq!(solve_p(&MVector([1, 1, 0, 0])), Err(SwError::Divisibility(2)));
    pass(
        9,
        "congruences hold for the real m-vectors; witness (1,1,0,0) trips the divisibility error",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_10_trace_form_corrections() {
    let start = Instant::now();
    let lines = total_class(&M_LINES).expect("total class");
    assert_eq!(trace_form_class(&lines), lines);
    let triangles = total_class(&M_TRIANGLES).expect("total class");
    let mut t_w1 = InvElement::zero();
    t_w1.coeffs[1] = CoeffRing::t();
    assert_eq!(trace_form_class(&triangles), triangles.add(&t_w1));
    pass(
        10,
        "trace-form classes: lines unchanged, triangles gain exactly t on the w1 slot",
        start,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_11_local_symbols() {
    let start = Instant::now();
    let values: Vec<SquareClass> = [1i64, -1, 2, -2, 3, -3, 5, -5, 7, -7]
        .into_iter()
        .map(|v| SquareClass::new(v).expect("nonzero"))
        .collect();
    let places = [
        Place::Infinity,
        Place::Prime(2),
        Place::Prime(3),
        Place::Prime(5),
        Place::Prime(7),
    ];
    for &a in &values {
        for &b in &values {
            let mut product = 1i32;
            for &place in &places {
                let symbol = hilbert_symbol(a, b, place);
                assert_eq!(
                    symbol == 1,
                    local_solvability_oracle(a, b, place),
                    "({a}, {b}) at {place}"
                );
                product *= i32::from(symbol);
            }
            assert_eq!(product, 1, "reciprocity fails for ({a}, {b})");
        }
    }
    pass(
        11,
        "closed-form symbols match the brute-force oracle and multiply to 1 over all places",
        start,
        Duration::from_secs(30),
    );
}
