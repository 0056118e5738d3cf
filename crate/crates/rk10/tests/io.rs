mod common;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rk10::family::reference_method;
use rk10::field::FieldElement as FE;
use rk10::io::{
    embedded_golden, parse_decimal, parse_exact, parse_tableau, read_tableau, reference_listing, write_decimal,
    write_exact, write_tableau, IoError, Mode, TableauFile,
};
use rk10::tableau::ButcherTableau;

#[test]
fn embedded_listing_reads_as_fifteen_stages() {
    let t = reference_listing();
    assert_eq!(t.stages(), 15);
    assert!(t.is_explicit());
    assert!(rk10::field::Real::from_rational(&t.c()[6], 400).to_fixed(9) == "+0.642615758");
    let (listing, rows) = embedded_golden();
    assert_eq!(listing.split_whitespace().count(), 135);
    assert_eq!(rows.len(), 63);
    assert!(listing.split_whitespace().next().unwrap().trim_start_matches('+').chars().all(|ch| ch == '0' || ch == '.'));
    assert!(listing.split_whitespace().last().unwrap().starts_with("+0.666905070061557"));
}

#[test]
fn decimal_round_trip_is_byte_identical() {
    let (listing, _) = embedded_golden();
    let file = parse_tableau(listing, Mode::Auto).unwrap();
    assert!(matches!(file, TableauFile::Decimal(_)));
    assert_eq!(write_tableau(&file, 90), listing);
}

#[test]
fn reference_construction_prints_the_listing() {
    let (listing, _) = embedded_golden();
    assert_eq!(write_decimal(&reference_method().tableau, 90), listing);
}

#[test]
fn exact_round_trip_preserves_coordinates() {
    let t = &reference_method().tableau;
    let text = write_exact(t);
    assert!(text.starts_with("s=15 mode=exact\n"));
    let back = parse_exact(&text).unwrap();
    assert_eq!(back.a(), t.a());
    assert_eq!(back.b(), t.b());
    assert_eq!(back.c(), t.c());
    assert_eq!(write_exact(&back), text);
    assert!(matches!(parse_tableau(&text, Mode::Auto).unwrap(), TableauFile::Exact(_)));
}

#[test]
fn exact_input_accepts_nine_integers_and_rationals() {
    let text = "s=2 mode=exact\n0\n1 0 0 0 0 0 0 0 2\n1/2\n0 0 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 0 2\n";
    let t = parse_exact(text).unwrap();
    assert_eq!(t.c()[1], FE::ratio(1, 2));
    assert_eq!(t.b()[1], FE::zero());
    assert_eq!(t.a()[1][0], FE::ratio(1, 2));
}

#[test]
fn full_matrices_are_accepted() {
    let t = rk10::tableau::known::implicit_midpoint();
    let text = write_decimal(&t, 5);
    assert_eq!(text.lines().count(), 3);
    let back = parse_decimal(&text).unwrap();
    assert_eq!(back.a(), t.a());
}

#[test]
fn errors_carry_line_numbers() {
    assert_eq!(parse_decimal("+0.5\n").unwrap_err(), IoError::StageCount { count: 1 });
    assert!(parse_decimal("+0.5\n").unwrap_err().to_string().contains("cannot infer stage count"));
    match parse_decimal("0\n1\n0.5x\n").unwrap_err() {
        IoError::Malformed { line, .. } => assert_eq!(line, 3),
        e => panic!("{e}"),
    }
    match parse_exact("s=2 mode=exact\n0\n1/2\n").unwrap_err() {
        IoError::CountMismatch { line, s, found, .. } => assert_eq!((line, s, found), (3, 2, 2)),
        e => panic!("{e}"),
    }
    match parse_exact("s=2 mode=exact\n0\nxi: 1/0\n").unwrap_err() {
        IoError::Malformed { line, .. } => assert_eq!(line, 3),
        e => panic!("{e}"),
    }
    assert!(matches!(parse_exact("mode=decimal\n"), Err(IoError::Malformed { line: 1, .. })));
}

#[test]
fn files_are_read_from_disk() {
    let dir = std::env::temp_dir().join(format!("rk10-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("euler.txt");
    std::fs::write(&path, "# forward Euler\n0\n\n1\n").unwrap();
    let t = read_tableau(&path, Mode::Decimal).unwrap();
    assert_eq!(t.stages(), 1);
    assert_eq!(t.to_field().b()[0], FE::one());
    assert!(matches!(read_tableau(&dir.join("missing.txt"), Mode::Auto), Err(IoError::File { .. })));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn decimal_tableau(seed: u64, s: usize) -> ButcherTableau<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = common::random_explicit(&mut rng, s);
    // Snap to 12-digit decimals so the printed text is exact.
    let scale = BigRational::from_integer(num_bigint::BigInt::from(10u64.pow(12)));
    let snap = |x: &BigRational| (x * &scale).round() / &scale;
    t.map_entries((), snap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn decimal_write_read_write_is_stable(seed in any::<u64>(), s in 1usize..7) {
        let t = decimal_tableau(seed, s);
        let text = write_decimal(&t, 12);
        let back = parse_decimal(&text).unwrap();
        prop_assert_eq!(back.a(), t.a());
        prop_assert_eq!(back.c(), t.c());
        prop_assert_eq!(write_decimal(&back, 12), text);
    }
}
