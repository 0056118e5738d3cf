//! Stage orders and node clusters of the reference method (numeric, 60
//! digits).

use rk10::field::digits_to_prec;
use rk10::io::reference_listing;
use rk10::tableau::cluster_analysis;

fn main() {
    let tab = reference_listing().to_real(digits_to_prec(60));
    let rep = cluster_analysis(&tab);
    for c in &rep.clusters {
        println!("{c}");
    }
    println!("dimension identity holds on every cluster: {}", rep.dimension_identity_holds());
}
