//! Builds the reference member of the order-10 family and a second member
//! from other parameters, verifying both exactly.

use rk10::family::{construct_detailed, reference_method, FamilyParams};
use rk10::io::write_decimal;
use rk10::FieldElement as FE;

fn main() {
    let r = reference_method();
    println!("reference: c6 = {}", r.c6.to_real(200).to_fixed(30));
    println!("first rows of the 90-digit listing:");
    for line in write_decimal(&r.tableau, 90).lines().take(3) {
        println!("  {line}");
    }

    let params = FamilyParams { c2: FE::ratio(1, 7), c4: FE::ratio(1, 3), c5: FE::ratio(3, 5), ..FamilyParams::reference() };
    match construct_detailed(&params) {
        Ok(m) => println!("member with c2 = 1/7, c4 = 1/3, c5 = 3/5: order 10 verified, c6 = {}", m.c6.to_real(200).to_fixed(30)),
        Err(e) => println!("construction failed: {e}"),
    }
}
