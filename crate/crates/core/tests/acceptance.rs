//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see
//! every line as it completes.

use levy_reset_core::validation;

macro_rules! criterion_test {
    ($name:ident, $runner:path) => {
        #[test]
        fn $name() {
            let result = $runner();
            println!("{}", result.line());
            assert!(result.passed, "{}", result.line());
        }
    };
}

criterion_test!(criterion_01_spline_moment_identity, validation::criterion_01);
criterion_test!(criterion_02_moment_recursion, validation::criterion_02);
criterion_test!(criterion_03_mu_t_cross_formula, validation::criterion_03);
criterion_test!(criterion_04_limit_measure, validation::criterion_04);
criterion_test!(criterion_05_representation_equivalence, validation::criterion_05);
criterion_test!(criterion_06_monte_carlo_concordance, validation::criterion_06);
criterion_test!(criterion_07_ergodic_convergence, validation::criterion_07);
criterion_test!(criterion_08_stationary_density, validation::criterion_08);
criterion_test!(criterion_09_fokker_planck, validation::criterion_09);
criterion_test!(criterion_10_tail_asymptotics, validation::criterion_10);
criterion_test!(criterion_11_bulk_asymptotics, validation::criterion_11);
criterion_test!(criterion_12_stable_ratios, validation::criterion_12);
