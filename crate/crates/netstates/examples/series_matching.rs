//! Best-rotation matching between two connection series.
//!
//! Both bit vectors are rolled into rings; the longer ring rotates past the
//! fixed shorter one, and the similarity is the best match count over the
//! ring length. Rotation makes the score phase invariant: two series with
//! the same on/off rhythm match perfectly no matter how they are shifted.
//!
//! Run with: cargo run --example series_matching

use netstates::prelude::*;
use netstates::window::ConnectionSeries;

fn show_all_rotations(a: &ConnectionSeries, b: &ConnectionSeries) {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let l = outer.len();
    println!(
        "outer ring {} (len {l}), inner ring {} (len {})",
        outer.to_bitstring(),
        inner.to_bitstring(),
        inner.len()
    );
    for p in 0..l {
        let rotated: String = (0..l)
            .map(|i| if outer.get((i + p) % l) { '1' } else { '0' })
            .collect();
        let matched = (0..inner.len())
            .filter(|&i| outer.get((i + p) % l) == inner.get(i))
            .count();
        let inner_padded: String = (0..l)
            .map(|i| {
                if i < inner.len() {
                    if inner.get(i) { '1' } else { '0' }
                } else {
                    '.' // empty slot, never matches
                }
            })
            .collect();
        println!("  rotation {p}: {rotated} vs {inner_padded} -> {matched} matched");
    }
}

fn main() -> Result<()> {
    let a = ConnectionSeries::from_bitstring("11100")?;
    let b = ConnectionSeries::from_bitstring("00101")?;
    println!("== equal lengths ==");
    show_all_rotations(&a, &b);
    let best = best_alignment(&a, &b)?;
    println!(
        "best: rotation {} with {} of 5 matched -> similarity {}",
        best.offset,
        best.matched,
        series_similarity(&a, &b)?
    );

    println!("\n== unequal lengths (inner ring padded with an empty slot) ==");
    let c = ConnectionSeries::from_bitstring("0010")?;
    show_all_rotations(&a, &c);
    let best = best_alignment(&a, &c)?;
    println!(
        "best: rotation {} with {} of 5 matched -> similarity {}",
        best.offset,
        best.matched,
        series_similarity(&a, &c)?
    );

    println!("\n== phase invariance ==");
    let wave = ConnectionSeries::from_bitstring("110011001100")?;
    let shifted = ConnectionSeries::from_bitstring("011001100110")?;
    println!(
        "{} vs {} -> similarity {}",
        wave.to_bitstring(),
        shifted.to_bitstring(),
        series_similarity(&wave, &shifted)?
    );
    Ok(())
}
