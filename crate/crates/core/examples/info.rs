//! Prints the self-similar exponents and the hypothesis verdict of a medium.
//!
//! cargo run --example info -- 2 3

use apme::cli::info;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let (table, _) = info(if m.is_empty() { &[2.0, 3.0] } else { &m });
    print!("{table}");
    Ok(())
}
