// Density of the difference of two independent Laplace draws, printed as
// CSV next to a numerical self-convolution of the Laplace density.

use tapaudit::distributions::{diff_pdf, laplace_pdf, NoiseScale};

fn convolve(u: f64, scale: NoiseScale) -> f64 {
    let b = scale.get();
    let (lo, hi) = (-40.0 * b + u.min(0.0), 40.0 * b + u.max(0.0));
    let steps = 200_000;
    let h = (hi - lo) / steps as f64;
    (0..steps)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * h;
            laplace_pdf(x, scale).unwrap() * laplace_pdf(x - u, scale).unwrap() * h
        })
        .sum()
}

fn run_example() -> tapaudit::Result<()> {
    let scale = NoiseScale::new(1.4)?;
    println!("u,diff_pdf,convolution");
    for i in -8..=8 {
        let u = f64::from(i);
        println!("{u},{:.8},{:.8}", diff_pdf(u, scale), convolve(u, scale));
    }
    Ok(())
}

fn main() -> tapaudit::Result<()> {
    run_example()
}
