use spincert::arith::{int, rat};
use spincert::certify::assembly_mismatches;
use spincert::classes::{
    exceptional_multiplicity, gen_weierstrass_class, scaled_canonical_class, wplus_class,
    ClassForm, EffectiveDivisor, Stratum,
};
use spincert::graph::InvariantOptions;
use spincert::identities::sample_ys;
use spincert::pullback::{gamma1_bounds, wplus_derivation_check, xi_identity_check};

fn atlas(g: i64) -> Stratum {
    Stratum::minimal_atlas(g, InvariantOptions::default()).unwrap()
}

#[test]
fn raw_and_reduced_forms_agree() {
    for g in 4..=8 {
        let s = atlas(g);
        let raw = wplus_class(&s, ClassForm::Raw).unwrap();
        assert_eq!(
            raw.reduce(&s).unwrap(),
            wplus_class(&s, ClassForm::Reduced).unwrap(),
            "g={g}"
        );
        assert!(!raw.is_reduced());
        let raw = gen_weierstrass_class(&s, &[g - 1], ClassForm::Raw).unwrap();
        assert_eq!(
            raw.reduce(&s).unwrap(),
            gen_weierstrass_class(&s, &[g - 1], ClassForm::Reduced).unwrap(),
            "g={g}"
        );
    }
}

#[test]
fn assembled_combination_over_full_atlases() {
    for g in 5..=9 {
        let s = atlas(g);
        for y in sample_ys() {
            let bad = assembly_mismatches(&s, &y, EffectiveDivisor::auto(g)).unwrap();
            assert!(bad.is_empty(), "g={g} y={y}: {bad:?}");
        }
    }
}

#[test]
fn canonical_class_horizontal_and_lambda() {
    for g in 2..=7 {
        let k = scaled_canonical_class(&atlas(g)).unwrap();
        assert_eq!(k.lambda, int(12));
        assert_eq!(k.d_h, -(int(1) + rat(2 * g - 2, 2 * g - 1)));
    }
}

#[test]
fn pullback_reproduces_the_raw_weierstrass_class() {
    for g in 4..=8 {
        let report = wplus_derivation_check(g, &[g, g], 1).unwrap();
        assert!(report.matched, "g={g}: {:?}", report.coordinate_diffs);
        assert!(xi_identity_check(g, &[g, g]).unwrap());
    }
}

#[test]
fn exceptional_graph_multiplicity_exceeds_its_bound_by_one() {
    for g in 3..=12 {
        let (bound, mult) = gamma1_bounds(g, &[g, g]).unwrap();
        assert_eq!(bound, rat(g * (g - 1), 2));
        assert_eq!(mult, &bound + int(1));
        assert_eq!(mult, exceptional_multiplicity(g));
    }
}
