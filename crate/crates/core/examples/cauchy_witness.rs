//! Index pairs showing a sequence is not Cauchy.
//!
//! cargo run --example cauchy_witness

use ratfix::{find_cauchy_witness, RealBoxSpace};

fn main() -> ratfix::Result<()> {
    // Harmonic partial sums diverge, so every eps0 > 0 has a witness.
    let mut h = 0.0;
    let seq: Vec<Vec<f64>> = (0..1000)
        .map(|i| {
            if i > 0 {
                h += 1.0 / i as f64;
            }
            vec![h]
        })
        .collect();
    let line = RealBoxSpace::interval(0.0, 100.0)?;

    let w = find_cauchy_witness(&line, &seq, 0.5, 200)?.expect("harmonic sums are not Cauchy");
    for ix in w.indices.iter().take(5) {
        println!("k={:3}  n(k)={:3}  m(k)={:3}", ix.k, ix.n, ix.m);
    }
    let last = w.indices.last().unwrap();
    println!("k={:3}  n(k)={:3}  m(k)={:3}", last.k, last.n, last.m);
    println!("limits at k = {}: {:?}", last.k, w.limits);

    let geometric: Vec<Vec<f64>> = (0..200).map(|n| vec![0.5f64.powi(n)]).collect();
    println!(
        "geometric: {:?}",
        find_cauchy_witness(&line, &geometric, 0.5, 100)?
    );
    Ok(())
}
