//! Checks the order conditions of classical methods exactly and of a
//! rounded copy numerically.

use rk10::tableau::known::{classic_rk4, three_eighths};
use rk10::tableau::{check_bcd, verify_order};

fn main() {
    for (name, tab) in [("classic RK4", classic_rk4()), ("3/8 rule", three_eighths())] {
        let rep = verify_order(&tab, 5, None);
        println!("{name}: order {} (B/C/D: {})", rep.achieved_order, check_bcd(&tab));
        for (t, r) in rep.residuals.iter().filter(|(_, r)| *r != num_rational::BigRational::from_integer(0.into())).take(3) {
            println!("  residual at {t}: {r}");
        }
    }
    let rounded = classic_rk4().to_real(rk10::field::digits_to_prec(30));
    let rep = verify_order(&rounded, 4, None);
    match rep.max_abs_log10 {
        Some(l) => println!("30-digit RK4: order {}, largest residual 1e{l:.1}", rep.achieved_order),
        None => println!("30-digit RK4: order {}, all residuals round to zero", rep.achieved_order),
    }
}
