//! Bessel and Hankel functions and the exact field of a pulsating circle.

use fembae::analytic::{bessel_j, bessel_y, hankel1, CircleProblem};
use num_complex::Complex64;

fn main() -> fembae::Result<()> {
    for x in [0.5, 1.0, 5.0, 20.0] {
        let z = Complex64::new(x, 0.0);
        let (j0, y0) = (bessel_j(0, z)?, bessel_y(0, z)?);
        let (j1, y1) = (bessel_j(1, z)?, bessel_y(1, z)?);
        let wronskian = j1 * y0 - j0 * y1;
        println!("x={x:<4} J0={:+.12} Y0={:+.12} W·πx/2={:.12}", j0.re, y0.re, wronskian.re * std::f64::consts::PI * x / 2.0);
    }
    let h = hankel1(2, Complex64::new(3.0, 0.1))?;
    println!("H2(3+0.1i) = {h:.10}");

    let problem = CircleProblem::new(10.0, Complex64::new(0.5, 0.0), 1)?;
    for phi in [0.0, 0.5, 1.0] {
        println!("u(R, φ={phi}) = {:.6}", problem.field(10.0, phi)?);
    }
    Ok(())
}
