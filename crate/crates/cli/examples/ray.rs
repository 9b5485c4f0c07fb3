//! Traces single locus rays: `cargo run --release --example ray -- 1 0.5`
//! takes angles in multiples of pi.

use basmajian::locus::{trace_ray, LocusParams};

fn main() {
    let p = LocusParams::default();
    for a in std::env::args().skip(1) {
        let Ok(x) = a.parse::<f64>() else {
            eprintln!("not a number: {a}");
            continue;
        };
        let start = std::time::Instant::now();
        let pt = trace_ray(x * std::f64::consts::PI, &p);
        println!("{a} pi: {pt:?} ({:.2?})", start.elapsed());
    }
}
