//! Exact sparse exterior algebra over an ordered set of anticommuting
//! generators.
//!
//! Monomials are 64-bit sets, so one table addresses at most 64 generators.
//! A `1`-DOF lattice of `N` slices with θ, θ̄ and four ghosts per slice
//! needs `2 + 4(N + 1)` generators, which covers every suite up to `N = 15`.

mod coefficient;
mod element;
mod json;
mod monomial;
mod table;

use thiserror::Error;

pub use coefficient::{Coefficient, CoefficientMode, Exact};
pub use element::{Algebra, GrassmannElement};
pub use monomial::Monomial;
pub use table::{
    create_algebra, GeneratorRole, GeneratorTable, DEFAULT_FLOAT_THRESHOLD, MAX_GENERATORS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrassmannError {
    #[error("duplicate generator name {0:?}")]
    DuplicateName(String),
    #[error("{requested} generators exceed capacity {capacity}")]
    CapacityExceeded { requested: usize, capacity: usize },
    #[error("capacity must be in 1..=64, got {0}")]
    InvalidCapacity(usize),
    #[error("generator table must not be empty")]
    EmptyTable,
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("operands live on different generator tables")]
    TableMismatch,
    #[error("table is in {table:?} mode but {requested:?} coefficients were requested")]
    ModeMismatch {
        table: CoefficientMode,
        requested: CoefficientMode,
    },
    #[error("monomial indices {0:?} are not strictly ascending")]
    NonCanonical(Vec<usize>),
    #[error("element is not even and nilpotent")]
    NotNilpotent,
    #[error("table has no generator with role {0:?}")]
    MissingRole(GeneratorRole),
    #[error("invalid element document: {0}")]
    InvalidJson(String),
}

/// Indices of the θ and θ̄ generators of a table.
pub fn theta_pair(table: &GeneratorTable) -> Result<(usize, usize), GrassmannError> {
    let theta = table
        .find_role(GeneratorRole::Theta)
        .ok_or(GrassmannError::MissingRole(GeneratorRole::Theta))?;
    let thetabar = table
        .find_role(GeneratorRole::ThetaBar)
        .ok_or(GrassmannError::MissingRole(GeneratorRole::ThetaBar))?;
    Ok((theta, thetabar))
}

/// The composite measure ∫ i dθ dθ̄, normalised so that
/// ∫ i dθ dθ̄ (i θ θ̄ X) = X for X free of θ and θ̄.
pub fn theta_measure<C: Coefficient>(
    e: &GrassmannElement<C>,
) -> Result<GrassmannElement<C>, GrassmannError> {
    let (theta, thetabar) = theta_pair(e.table())?;
    Ok(e.berezin(&[theta, thetabar])?.scale(&C::imag_unit()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use GeneratorRole::*;

    fn theta_algebra() -> Algebra<Exact> {
        let t = create_algebra(CoefficientMode::Exact, &[("θ", Theta), ("θ̄", ThetaBar), ("x", GhostC)])
            .unwrap();
        Algebra::new(t).unwrap()
    }

    fn ex(n: i64) -> Exact {
        Exact::from_i64(n)
    }

    #[test]
    fn mul_examples() {
        let a = theta_algebra();
        let th = a.named("θ").unwrap();
        let tb = a.named("θ̄").unwrap();
        let tt = Monomial::from_canonical(&[0, 1]).unwrap();
        assert_eq!((&th * &tb).coefficient_of(tt), ex(1));
        assert_eq!((&tb * &th).coefficient_of(tt), ex(-1));
        let lhs = (&a.one() + &th) * (&a.one() + &tb);
        let rhs = a.one() + th.clone() + tb.clone() + &th * &tb;
        assert_eq!(lhs, rhs);
        assert!((&th * &th).is_zero());
    }

    #[test]
    fn left_derivative_examples() {
        let a = theta_algebra();
        let th = a.named("θ").unwrap();
        let tb = a.named("θ̄").unwrap();
        let prod = &th * &tb;
        assert_eq!(prod.left_derivative(0).unwrap(), tb);
        assert_eq!(prod.left_derivative(1).unwrap(), -&th);
        assert!(tb.left_derivative(0).unwrap().is_zero());
        assert!(matches!(
            prod.left_derivative(7),
            Err(GrassmannError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn berezin_examples() {
        let a = theta_algebra();
        let th = a.named("θ").unwrap();
        let tb = a.named("θ̄").unwrap();
        let x = a.named("x").unwrap();
        // ∫dθ (a + bθ) = b
        let e = a.scalar(ex(3)) + th.scale(&ex(5));
        assert_eq!(e.berezin(&[0]).unwrap(), a.scalar(ex(5)));
        // ∫ i dθ dθ̄ (iθθ̄ X) = X
        let i = Exact::imag_unit();
        let for_x = (&th * &tb * x.clone()).scale(&i);
        assert_eq!(theta_measure(&for_x).unwrap(), x);
        let calib = (&th * &tb).scale(&i);
        assert_eq!(theta_measure(&calib).unwrap(), a.one());
        assert!(theta_measure(&th).unwrap().is_zero());
        assert!(e.berezin_named(&["nope"]).is_err());
    }

    #[test]
    fn berezin_sign_table() {
        // Single integrals agree with left derivatives (sign +1) and the
        // ordered double integral of θθ̄ is −1.
        let a = theta_algebra();
        let th = a.named("θ").unwrap();
        let tb = a.named("θ̄").unwrap();
        let tt = &th * &tb;
        for g in 0..2 {
            assert_eq!(tt.berezin(&[g]).unwrap(), tt.left_derivative(g).unwrap());
        }
        assert_eq!(tt.berezin(&[0, 1]).unwrap(), a.scalar(ex(-1)));
        assert_eq!(tt.berezin(&[1, 0]).unwrap(), a.scalar(ex(1)));
    }

    #[test]
    fn coefficient_examples() {
        let a = theta_algebra();
        let th = a.named("θ").unwrap();
        let tb = a.named("θ̄").unwrap();
        let tt = Monomial::from_canonical(&[0, 1]).unwrap();
        let e = a.one() + (&th * &tb).scale(&ex(2));
        assert_eq!(e.coefficient_of(tt), ex(2));
        assert_eq!(th.coefficient_of(Monomial::ONE), ex(0));
        assert_eq!((&tb * &th).coefficient_of(tt), ex(-1));
    }

    #[test]
    fn table_and_mode_mismatch() {
        let a = theta_algebra();
        let b = theta_algebra();
        // equal tables compare equal even when allocated separately
        assert!(a.one().try_mul(&b.one()).is_ok());
        let other = Algebra::<Exact>::new(
            create_algebra(CoefficientMode::Exact, &[("y", GhostC)]).unwrap(),
        )
        .unwrap();
        assert_eq!(a.one().try_mul(&other.one()), Err(GrassmannError::TableMismatch));
        let float_table = create_algebra(CoefficientMode::Float, &[("y", GhostC)]).unwrap();
        assert!(matches!(
            Algebra::<Exact>::new(float_table),
            Err(GrassmannError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn exp_of_bilinear() {
        let t = create_algebra(
            CoefficientMode::Exact,
            &[("a", GhostC), ("b", GhostC), ("c", GhostC), ("d", GhostC)],
        )
        .unwrap();
        let alg = Algebra::<Exact>::new(t).unwrap();
        let g = |n| alg.named(n).unwrap();
        let b = &g("a") * &g("b") + &g("c") * &g("d");
        let e = b.exp().unwrap();
        let expected = alg.one() + b.clone() + &(&g("a") * &g("b")) * &(&g("c") * &g("d"));
        assert_eq!(e, expected);
        assert_eq!(g("a").exp(), Err(GrassmannError::NotNilpotent));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let a = theta_algebra();
        let half = Exact::from_ratio(1, 2);
        let e = a.scalar(half) + (&a.named("θ").unwrap() * &a.named("x").unwrap());
        let text = e.to_json();
        assert!(text.contains("\"mono\":[0,2]"));
        assert_eq!(GrassmannElement::from_json(&a, &text).unwrap(), e);
        let bad = r#"{"generators":["θ","θ̄","x"],"terms":[{"mono":[2,0],"re":"1","im":"0"}]}"#;
        assert!(matches!(
            GrassmannElement::from_json(&a, bad),
            Err(GrassmannError::NonCanonical(_))
        ));
        let wrong_names = r#"{"generators":["a"],"terms":[]}"#;
        assert!(GrassmannElement::from_json(&a, wrong_names).is_err());

        let ft = create_algebra(CoefficientMode::Float, &[("u", GhostC), ("v", GhostC)]).unwrap();
        let fa = Algebra::<Complex64>::new(ft).unwrap();
        let fe = fa.named("u").unwrap().scale(&Complex64::new(0.25, -1.5));
        assert_eq!(GrassmannElement::from_json(&fa, &fe.to_json()).unwrap(), fe);
    }

    // --- property tests -------------------------------------------------

    const NGEN: usize = 5;

    fn small_algebra() -> Algebra<Exact> {
        let names: Vec<(String, GeneratorRole)> =
            (0..NGEN).map(|i| (format!("g{i}"), GhostC)).collect();
        Algebra::new(create_algebra(CoefficientMode::Exact, &names).unwrap()).unwrap()
    }

    fn float_algebra() -> Algebra<Complex64> {
        let names: Vec<(String, GeneratorRole)> =
            (0..NGEN).map(|i| (format!("g{i}"), GhostC)).collect();
        Algebra::new(create_algebra(CoefficientMode::Float, &names).unwrap()).unwrap()
    }

    fn exact_element() -> impl Strategy<Value = Vec<(u64, i64, i64)>> {
        prop::collection::vec((0u64..(1 << NGEN), -5i64..=5, -3i64..=3), 0..8)
    }

    fn build(alg: &Algebra<Exact>, raw: &[(u64, i64, i64)]) -> GrassmannElement<Exact> {
        alg.from_terms(raw.iter().map(|&(m, re, im)| {
            (
                Monomial::from_bits(m),
                Exact::from_i64(re) + Exact::imag_unit() * Exact::from_i64(im),
            )
        }))
        .unwrap()
    }

    fn build_float(alg: &Algebra<Complex64>, raw: &[(u64, f64, f64)]) -> GrassmannElement<Complex64> {
        alg.from_terms(
            raw.iter()
                .map(|&(m, re, im)| (Monomial::from_bits(m), Complex64::new(re, im))),
        )
        .unwrap()
    }

    fn float_element() -> impl Strategy<Value = Vec<(u64, f64, f64)>> {
        prop::collection::vec((0u64..(1 << NGEN), -2.0f64..2.0, -2.0f64..2.0), 0..8)
    }

    proptest! {
        #[test]
        fn generators_are_nilpotent(raw in exact_element(), g in 0..NGEN) {
            let alg = small_algebra();
            let e = build(&alg, &raw);
            let gen = alg.generator(g).unwrap();
            prop_assert!((&(&gen * &e) * &gen).is_zero());
            prop_assert!((&gen * &gen).is_zero());
        }

        #[test]
        fn exact_associative_and_distributive(a in exact_element(), b in exact_element(), c in exact_element()) {
            let alg = small_algebra();
            let (a, b, c) = (build(&alg, &a), build(&alg, &b), build(&alg, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn float_associative(a in float_element(), b in float_element(), c in float_element()) {
            let alg = float_algebra();
            let (a, b, c) = (build_float(&alg, &a), build_float(&alg, &b), build_float(&alg, &c));
            let lhs = &(&a * &b) * &c;
            let rhs = &a * &(&b * &c);
            prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12);
            let dl = &a * &(&b + &c);
            let dr = &(&a * &b) + &(&a * &c);
            prop_assert!(dl.distance(&dr).unwrap() <= 1e-12);
        }

        #[test]
        fn graded_commutativity(a in exact_element(), b in exact_element(), p in 0u32..=3, q in 0u32..=3) {
            let alg = small_algebra();
            let a = build(&alg, &a).grade(p);
            let b = build(&alg, &b).grade(q);
            let ab = &a * &b;
            let ba = &b * &a;
            let expect = if (p * q) % 2 == 1 { -ba } else { ba };
            prop_assert_eq!(ab, expect);
        }

        #[test]
        fn left_derivative_is_antiderivation(a in exact_element(), b in exact_element(), p in 0u32..=3, g in 0..NGEN) {
            let alg = small_algebra();
            let a = build(&alg, &a).grade(p);
            let b = build(&alg, &b);
            let lhs = (&a * &b).left_derivative(g).unwrap();
            let first = &a.left_derivative(g).unwrap() * &b;
            let second = &a * &b.left_derivative(g).unwrap();
            let rhs = if p % 2 == 1 { first - second } else { first + second };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn berezin_matches_left_derivative(a in exact_element(), g in 0..NGEN, h in 0..NGEN) {
            let alg = small_algebra();
            let a = build(&alg, &a);
            prop_assert_eq!(a.berezin(&[g]).unwrap(), a.left_derivative(g).unwrap());
            let nested = a.left_derivative(h).unwrap().left_derivative(g).unwrap();
            prop_assert_eq!(a.berezin(&[g, h]).unwrap(), nested);
        }

        #[test]
        fn conjugation_is_anti_involution(a in exact_element(), b in exact_element()) {
            let alg = small_algebra();
            let (a, b) = (build(&alg, &a), build(&alg, &b));
            prop_assert_eq!(a.conjugate().conjugate(), a.clone());
            prop_assert_eq!((&a * &b).conjugate(), &b.conjugate() * &a.conjugate());
        }

        #[test]
        fn json_round_trip(a in exact_element()) {
            let alg = small_algebra();
            let a = build(&alg, &a);
            prop_assert_eq!(GrassmannElement::from_json(&alg, &a.to_json()).unwrap(), a);
        }
    }

    #[test]
    fn float_zero_threshold_prunes() {
        let alg = float_algebra();
        let g = alg.generator(0).unwrap();
        let e = &g.scale(&Complex64::new(1.0, 0.0)) - &g.scale(&Complex64::new(1.0 - 1e-16, 0.0));
        assert!(e.is_zero());
        let strict = Algebra::<Complex64>::new(alg.table().with_zero_threshold(0.0)).unwrap();
        let g = strict.generator(0).unwrap();
        let e = &g - &g.scale(&Complex64::new(1.0 - 1e-16, 0.0));
        assert!(!e.is_zero());
    }
}
