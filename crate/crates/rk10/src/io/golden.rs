//! Published reference data, embedded verbatim: the 90-digit decimal listing
//! of the reference method and the block of exact constants printed as rows
//! of nine integers (eight basis numerators and a common denominator).

use num_bigint::BigInt;

use crate::field::FieldElement;

const DECIMAL: &str = include_str!("golden/reference_decimal.txt");
const CONSTANTS: &str = include_str!("golden/constants.txt");

/// The decimal listing: 15 nodes, 15 weights, then the strictly lower
/// triangle of A row by row (135 lines).
pub fn decimal_listing() -> &'static str {
    DECIMAL
}

/// The listing split into its 135 numbers.
pub fn decimal_numbers() -> Vec<&'static str> {
    DECIMAL.split_whitespace().collect()
}

/// The constants block as raw integer rows.
pub fn constant_rows() -> Vec<[BigInt; 9]> {
    CONSTANTS
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<BigInt> = l.split_whitespace().map(|t| t.parse().expect("embedded integer")).collect();
            v.try_into().expect("nine integers per row")
        })
        .collect()
}

/// The constants block decoded into field elements, in print order.
pub fn constant_values() -> Vec<FieldElement> {
    constant_rows().iter().map(|r| FieldElement::from_nine_integers(r).expect("nonzero denominator")).collect()
}
