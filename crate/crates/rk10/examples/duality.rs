//! Forms dual methods and checks how B, C and D transform.

use rk10::duality::{check_duality_measured, dualize};
use rk10::tableau::known::{classic_rk4, heun2};

fn main() {
    for (name, tab) in [("classic RK4", classic_rk4()), ("Heun", heun2())] {
        match dualize(&tab) {
            Ok(d) => {
                println!("{name}: self-dual = {}", d.self_dual);
                if let Ok(rep) = check_duality_measured(&tab) {
                    println!("  method {}  dual {}  swap holds: {}", rep.original, rep.dual, rep.holds);
                }
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
    match dualize(&rk10::io::reference_listing()) {
        Ok(_) => println!("reference method: dual exists"),
        Err(e) => println!("reference method: {e}"),
    }
}
