//! Enumerates rooted trees through order 10 and prints the statistics of
//! the small ones.

use rk10::trees::{q_map, Forest, RootedTree};

fn main() {
    let forest = Forest::new(10);
    println!("trees per order: {:?} (total {})", forest.counts(), forest.len());
    println!("{:<12} {:>3} {:>5} {:>3} {:>3}", "tree", "|t|", "t!", "σ", "α");
    for i in forest.up_to(4) {
        let t = forest.tree(i);
        println!("{:<12} {:>3} {:>5} {:>3} {:>3}", t.to_string(), t.order(), forest.density(i), forest.symmetry(i), forest.labelings(i));
    }
    let t = RootedTree::parse("[[][]]").expect("valid bracket");
    println!("Q-map of {t}: {}", q_map(&t));
}
