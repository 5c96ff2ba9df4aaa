use orbifrob::frobenius::FrobeniusAlgebra;
use orbifrob::gfrob::invariants;
use orbifrob::sympow::SymmetricPowerAlgebra;

#[test]
fn reports_pass_for_small_cases() {
    for (m, n) in [(2usize, 3usize), (3, 3), (2, 4)] {
        for p in 0..2u8 {
            let a = FrobeniusAlgebra::truncated(m);
            let s = SymmetricPowerAlgebra::build(&a, n, p, None).unwrap();
            for r in [s.verify(), s.ls_compare().unwrap(), s.triple_check(), s.trace_report().report] {
                assert!(r.passed(), "m={m} n={n} p={p}\n{}", r.to_text());
            }
        }
    }
}

#[test]
fn invariant_counts() {
    let a = FrobeniusAlgebra::truncated(2);
    for (p, want) in [(0u8, 5usize), (1, 3)] {
        let s = SymmetricPowerAlgebra::build(&a, 2, p, None).unwrap();
        assert_eq!(invariants(s.algebra()).dim(), want);
    }
}
