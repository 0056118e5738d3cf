//! Error coefficients, stability interval and zeros of the stability
//! polynomial for the reference method.

use rk10::analysis::{error_coefficient_table, polynomial_zeros, stability_interval, stability_polynomial};
use rk10::field::digits_to_prec;
use rk10::io::reference_listing;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tab = reference_listing();
    for rep in error_coefficient_table(&tab, 11..=13, 40) {
        println!("T{} = {}", rep.p, rep.tp.to_sci(5));
    }
    println!("z_R = {}", stability_interval(&tab, 30)?.to_fixed(10));
    let coeffs = stability_polynomial(&tab)?.to_real(digits_to_prec(60));
    let zeros = polynomial_zeros(&coeffs, 20)?;
    let real: Vec<String> = zeros.iter().filter(|z| z.im.to_f64().abs() < 1e-15).map(|z| z.re.to_fixed(6)).collect();
    println!("{} zeros, real ones: {}", zeros.len(), real.join(", "));
    Ok(())
}
