//! Writes a tableau in both file formats and reads it back.

use rk10::io::{parse_tableau, write_decimal, write_exact, Mode};
use rk10::tableau::known::classic_rk4;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exact = classic_rk4().to_field();
    let text = write_exact(&exact);
    print!("{text}");
    let back = parse_tableau(&text, Mode::Auto)?;
    println!("exact round trip preserves entries: {}", back.to_field() == exact);

    let decimal = write_decimal(&exact, 20);
    let again = parse_tableau(&decimal, Mode::Decimal)?;
    println!("decimal listing ({} lines) reads back as {} stages", decimal.lines().count(), again.stages());
    Ok(())
}
