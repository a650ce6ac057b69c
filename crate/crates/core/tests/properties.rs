//! Invariants over randomized inputs.

mod common;

use common::*;
use gpt_recon::algebra::Side;
use gpt_recon::body::{membership, mix};
use gpt_recon::dual::embed_theory;
use gpt_recon::instances::{self, from_document, to_document};
use gpt_recon::linalg::{self, CMatrix, CVector, C64};
use gpt_recon::pipeline::run_instance;
use gpt_recon::report::{parse_report, render_report, Format};
use gpt_recon::schema::TheoryDocument;
use gpt_recon::star;
use gpt_recon::stats::{self, OperationalStatistics};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7, 0usize..4, any::<u64>()).prop_map(|(m, n, dups, seed)| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        planted_table(&mut r, m, n, 6, dups)
    })
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

fn complex_vec(n: usize) -> impl Strategy<Value = CVector> {
    proptest::collection::vec(complex(), n).prop_map(CVector::from_vec)
}

fn hermitian2() -> impl Strategy<Value = CMatrix> {
    (-1.0f64..1.0, -1.0f64..1.0, complex()).prop_map(|(a, d, b)| {
        CMatrix::from_row_slice(2, 2, &[C64::from(a), b * 0.5, (b * 0.5).conj(), C64::from(d)])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_is_a_partition_and_idempotent(t in table_strategy()) {
        let s = OperationalStatistics::unlabeled(&to_f64(&t, 6)).unwrap();
        for q in [stats::quotient_ensembles(&s, 1e-12), stats::quotient_effects(&s, 1e-12)] {
            let mut all: Vec<usize> = q.classes.iter().flatten().copied().collect();
            all.sort_unstable();
            let n = all.len();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert_eq!(q.representatives.clone(), q.classes.iter().map(|c| c[0]).collect::<Vec<_>>());
        }
        let once = stats::reduce(&s, 1e-12);
        prop_assert!(stats::check_separation(&once, 1e-12));
        prop_assert_eq!(stats::reduce(&once, 1e-12), once);
    }

    #[test]
    fn embedding_round_trips(t in table_strategy()) {
        let s = stats::reduce(&OperationalStatistics::unlabeled(&to_f64(&t, 6)).unwrap(), 1e-12);
        if t.iter().flatten().all(|&x| x == 0) {
            prop_assert!(embed_theory(&s).is_err());
        } else {
            let emb = embed_theory(&s).unwrap();
            prop_assert_eq!(emb.pair.state_dim(), exact_rank(&to_ints(&s)));
            prop_assert!(emb.round_trip_residual(s.table()) <= 1e-12);
        }
    }

    #[test]
    fn pairing_is_sesquilinear(w1 in complex_vec(4), w2 in complex_vec(4), e1 in complex_vec(4), e2 in complex_vec(4), a in complex(), b in complex()) {
        let q = instances::qubit().unwrap();
        let p = q.pair();
        let f = |w: &CVector, e: &CVector| p.pairing(w, e).unwrap();
        let scale = 1.0 + f(&w1, &e1).norm() + f(&w2, &e1).norm() + f(&w1, &e2).norm();
        let left = f(&(&w1 * a + &w2 * b), &e1) - (a.conj() * f(&w1, &e1) + b.conj() * f(&w2, &e1));
        let right = f(&w1, &(&e1 * a + &e2 * b)) - (a * f(&w1, &e1) + b * f(&w1, &e2));
        prop_assert!(left.norm() <= 1e-12 * scale * 16.0);
        prop_assert!(right.norm() <= 1e-12 * scale * 16.0);
    }

    #[test]
    fn mixtures_stay_in_the_state_body(w in proptest::collection::vec(0.0f64..1.0, 4)) {
        let g = instances::gbit().unwrap();
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-6);
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let m = mix(g.state_body().vertices().unwrap(), &w).unwrap();
        prop_assert!(membership(g.state_body(), &m, 1e-9));
        prop_assert!((g.engine.state_norm(&m).unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn right_representation_reverses_products(f in hermitian2(), g in hermitian2()) {
        let alg = instances::qubit().unwrap().algebra.unwrap();
        let r = |x: &CMatrix| alg.mult_operator(Side::Right, &vec_of(x)).unwrap().matrix;
        let fg = &f * &g;
        prop_assert!(linalg::max_abs_matrix(&(r(&fg) - r(&g) * r(&f))) <= 1e-14);
    }

    #[test]
    fn operator_norm_is_bounded_by_effect_norm(f in hermitian2()) {
        let alg = instances::qubit().unwrap().algebra.unwrap();
        let fv = vec_of(&f);
        let op = alg.mult_operator(Side::Right, &fv).unwrap();
        prop_assert!(alg.operator_norm(&op).unwrap() <= alg.effect_norm(&fv) + 1e-9);
    }

    #[test]
    fn complements_of_projections_are_projections(n in 1usize..5) {
        let c = instances::classical(n).unwrap();
        let alg = c.algebra.as_ref().unwrap();
        let found = alg.detect_projections(&c.projection_candidates(), 1e-12);
        for p in &found {
            let q = alg.complement(p).unwrap();
            prop_assert!(found.contains(&q));
            prop_assert_eq!(alg.complement(&q).unwrap(), p.clone());
        }
    }

    #[test]
    fn decomposition_is_additive_and_idempotent(a in complex_vec(3), bits in proptest::collection::vec(any::<bool>(), 3)) {
        let alg = instances::classical(3).unwrap().algebra.unwrap();
        let m = real(&bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        let (am, rest) = alg.decompose(&a, &m).unwrap();
        prop_assert!(linalg::max_abs(&(&am + &rest - &a)) <= 1e-15);
        let (again, none) = alg.decompose(&am, &m).unwrap();
        prop_assert_eq!(again, am);
        prop_assert!(linalg::max_abs(&none) == 0.0);
    }

    #[test]
    fn star_preserves_the_norm(t in complex_vec(4)) {
        let model = instances::qubit().unwrap().star.unwrap();
        let alg = model.base();
        let (a, b) = (alg.effect_norm(&t), alg.effect_norm(&model.star(&t)));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn classical_support_is_minimal(weights in proptest::collection::vec(0u8..3, 4)) {
        prop_assume!(weights.iter().any(|&w| w > 0));
        let c = instances::classical(4).unwrap();
        let model = c.star.as_ref().unwrap();
        let total: f64 = weights.iter().map(|&w| w as f64).sum();
        let rho = real(&weights.iter().map(|&w| w as f64 / total).collect::<Vec<_>>());
        let got = star::support_projection(model, &rho).unwrap().projection;
        // brute force: smallest indicator P with <rho|P> = 1
        let best = (0u32..16)
            .filter(|mask| (0..4).filter(|k| mask >> k & 1 == 1).map(|k| rho[k].re).sum::<f64>() > 1.0 - 1e-12)
            .min_by_key(|mask| mask.count_ones())
            .unwrap();
        let want = real(&(0..4).map(|k| (best >> k & 1) as f64).collect::<Vec<_>>());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pipeline_report_is_deterministic_and_round_trips(n in 1usize..4, seed in any::<u64>()) {
        let c = instances::classical(n).unwrap();
        let a = run_instance(&c, 1e-9, 10, seed).unwrap();
        let b = run_instance(&c, 1e-9, 10, seed).unwrap();
        let bytes = render_report(&a, Format::Json);
        prop_assert_eq!(&bytes, &render_report(&b, Format::Json));
        prop_assert_eq!(parse_report(&bytes).unwrap(), a);
    }

    #[test]
    fn documents_round_trip(t in table_strategy()) {
        prop_assume!(t.iter().flatten().any(|&x| x != 0));
        let s = OperationalStatistics::unlabeled(&to_f64(&t, 6)).unwrap();
        let doc = TheoryDocument {
            preparations: s.prep_labels().to_vec(),
            outcomes: s.outcome_labels().to_vec(),
            statistics: s.to_rows(),
            product: None,
            involution: None,
            unit_column: None,
        };
        let text = serde_json::to_string(&doc).unwrap();
        let back: TheoryDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        let inst = from_document(&back, "t", 1e-9).unwrap();
        prop_assert_eq!(inst.stats.to_rows(), s.to_rows());
    }
}

fn to_ints(s: &OperationalStatistics) -> Vec<Vec<i64>> {
    s.to_rows().iter().map(|r| r.iter().map(|&x| (6.0 * x).round() as i64).collect()).collect()
}

#[test]
fn exported_builtins_reimport_with_the_same_structure() {
    for inst in [instances::classical(3).unwrap(), instances::qubit().unwrap(), instances::gbit().unwrap()] {
        let doc = to_document(&inst, 1e-9).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back = from_document(&serde_json::from_str(&text).unwrap(), &inst.name, 1e-9).unwrap();
        let (a, b) = (run_instance(&inst, 1e-9, 20, 5).unwrap(), run_instance(&back, 1e-9, 20, 5).unwrap());
        // a table only knows its own effects: the reimported qubit has a polytope
        // effect body, so verdicts are comparable for polytope models only
        if inst.effect_body().vertices().is_some() {
            for (x, y) in a.stages.iter().zip(&b.stages) {
                assert_eq!(x.verdict, y.verdict, "{} {:?}", inst.name, x.stage);
            }
        }
        // products agree on the table's effects
        let (p, q) = (inst.algebra.as_ref().unwrap(), back.algebra.as_ref().unwrap());
        let emb = embed_theory(&back.stats).unwrap();
        let d = p.dim();
        for i in 0..d {
            for j in 0..d {
                let (ei, ej) = (&emb.effects[emb.basis_cols[i]], &emb.effects[emb.basis_cols[j]]);
                let prod = q.multiply(ei, ej).unwrap();
                // pair the product with every row and compare against the original model
                for (row, w) in emb.states.iter().enumerate() {
                    let orig_i = &inst.column_effects[emb.basis_cols[i]];
                    let orig_j = &inst.column_effects[emb.basis_cols[j]];
                    let want = inst.pair().pairing(&inst.row_states[row], &p.multiply(orig_i, orig_j).unwrap()).unwrap();
                    let got = emb.pair.pairing(w, &prod).unwrap();
                    assert!((want - got).norm() < 1e-9, "{} {i} {j} {row}", inst.name);
                }
            }
        }
    }
}
