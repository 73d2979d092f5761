//! Bessel and Hankel functions of integer order and complex argument, and
//! the exact field radiated by a circle with harmonic Neumann data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ARGUMENT: f64 = 100.0;
const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 20.0;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_range(z: Complex64) -> Result<()> {
    if !z.is_finite() || z.norm() > MAX_ARGUMENT {
        return Err(Error::Unsupported(format!(
            "Bessel argument {z} outside the supported range |z| ≤ {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

fn reflect(order: i32, v: Complex64) -> Complex64 {
    if order < 0 && order % 2 != 0 {
        -v
    } else {
        v
    }
}

fn series_j(n: u32, z: Complex64) -> Complex64 {
    let half = z / 2.0;
    let mut term = c(1.0);
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `J_0..=J_top` by downward recurrence normalised with `J_0 + 2ΣJ_2k = 1`.
fn miller(top: usize, z: Complex64) -> Vec<Complex64> {
    let a = z.norm();
    let start = top.max(a as usize) + 20 + (40.0 * top.max(a as usize).max(1) as f64).sqrt() as usize;
    let start = start + start % 2;
    let mut vals = vec![c(0.0); start + 2];
    vals[start] = c(1.0);
    for k in (1..=start).rev() {
        vals[k - 1] = vals[k] * (2.0 * k as f64) / z - vals[k + 1];
        if vals[k - 1].norm() > 1e100 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-100;
            }
        }
    }
    let norm: Complex64 = vals[0] + 2.0 * (2..=start).step_by(2).map(|k| vals[k]).sum::<Complex64>();
    vals.truncate(top + 1);
    vals.iter().map(|v| v / norm).collect()
}

/// `H⁽¹⁾_n` and `H⁽²⁾_n` for `n ∈ {0, 1}` and large `|z|`.
fn hankel_asymptotic(n: u32, z: Complex64) -> (Complex64, Complex64) {
    let mu = 4.0 * (n * n) as f64;
    let omega = z - (n as f64) * PI / 2.0 - PI / 4.0;
    let pre = (c(2.0) / (PI * z)).sqrt();
    let i = Complex64::i();
    let mut s1 = c(1.0);
    let mut s2 = c(1.0);
    let mut a = c(1.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0) / z;
        let size = a.norm();
        if size > last || size < 1e-18 {
            break;
        }
        last = size;
        s1 += a * i.powu(k as u32);
        s2 += a * (-i).powu(k as u32);
    }
    let e = (i * omega).exp();
    (pre * e * s1, pre / e * s2)
}

/// Bessel function of the first kind `J_n(z)`.
pub fn bessel_j(order: i32, z: Complex64) -> Result<Complex64> {
    check_range(z)?;
    let n = order.unsigned_abs();
    let v = if z.norm() == 0.0 {
        c(if n == 0 { 1.0 } else { 0.0 })
    } else if z.norm() <= SERIES_LIMIT {
        series_j(n, z)
    } else {
        miller(n as usize, z)[n as usize]
    };
    Ok(reflect(order, v))
}

fn y01(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() >= ASYMPTOTIC_LIMIT {
        let i = Complex64::i();
        let (h10, h20) = hankel_asymptotic(0, z);
        let (h11, h21) = hankel_asymptotic(1, z);
        return ((h10 - h20) / (2.0 * i), (h11 - h21) / (2.0 * i));
    }
    let top = 2 * (z.norm() as usize + 30);
    let j = if z.norm() <= SERIES_LIMIT {
        (0..=top).map(|k| series_j(k as u32, z)).collect::<Vec<_>>()
    } else {
        miller(top, z)
    };
    let log = (z / 2.0).ln() + EULER_GAMMA;
    let mut s0 = c(0.0);
    let mut s1 = c(0.0);
    for k in 1..top / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (2 * k + 1) as f64 * j[2 * k + 1] / (k * (k + 1)) as f64;
    }
    let y0 = (log * j[0] - 2.0 * s0) * (2.0 / PI);
    let y1 = (-j[0] / z + (log - 1.0) * j[1] - s1) * (2.0 / PI);
    (y0, y1)
}

/// Bessel function of the second kind `Y_n(z)`, `Re z > 0`.
pub fn bessel_y(order: i32, z: Complex64) -> Result<Complex64> {
    check_range(z)?;
    if !(z.re > 0.0) {
        return Err(Error::Unsupported(format!("Y_n needs Re z > 0, got {z}")));
    }
    let n = order.unsigned_abs();
    let (mut y0, mut y1) = y01(z);
    if n == 0 {
        return Ok(y0);
    }
    for k in 1..n {
        let y2 = y1 * (2.0 * k as f64) / z - y0;
        y0 = y1;
        y1 = y2;
    }
    Ok(reflect(order, y1))
}

/// Hankel function of the first kind `H⁽¹⁾_n(z) = J_n(z) + i·Y_n(z)`, `Re z > 0`.
pub fn hankel1(order: i32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j(order, z)? + Complex64::i() * bessel_y(order, z)?)
}

/// Circle of radius `R` radiating the single harmonic `cos(Nφ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleProblem {
    pub radius: f64,
    pub wavenumber: Complex64,
    pub harmonic: u32,
}

impl CircleProblem {
    pub fn new(radius: f64, wavenumber: Complex64, harmonic: u32) -> Result<CircleProblem> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if !(wavenumber.re > 0.0) {
            return Err(Error::InvalidParameter(format!("wavenumber needs Re K > 0, got {wavenumber}")));
        }
        Ok(CircleProblem {
            radius,
            wavenumber,
            harmonic,
        })
    }

    /// `2H_N(KR) / (H_{N−1}(KR) − H_{N+1}(KR))`, the surface amplitude for `∂u/∂r = K·cos(Nφ)`.
    pub fn amplitude(&self) -> Result<Complex64> {
        let z = self.wavenumber * self.radius;
        let n = self.harmonic as i32;
        Ok(2.0 * hankel1(n, z)? / (hankel1(n - 1, z)? - hankel1(n + 1, z)?))
    }

    /// Outgoing field at `(r, φ)`, `r ≥ R`, continuing the surface value.
    pub fn field(&self, r: f64, phi: f64) -> Result<Complex64> {
        let n = self.harmonic as i32;
        let k = self.wavenumber;
        let radial = if r == self.radius {
            c(1.0)
        } else {
            hankel1(n, k * r)? / hankel1(n, k * self.radius)?
        };
        Ok(self.amplitude()? * radial * (self.harmonic as f64 * phi).cos())
    }
}

/// Exact field on the circle.
pub fn exact_scattered_field(problem: &CircleProblem, phi: f64) -> Result<Complex64> {
    problem.field(problem.radius, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn values_against_high_precision_references() {
        let real = [
            (0, 0.5, 0.938_469_807_240_812_9, -0.444_518_733_506_706_56),
            (1, 1.0, 0.440_050_585_744_933_5, -0.781_212_821_300_288_7),
            (3, 5.0, 0.364_831_230_613_667, 0.146_267_162_693_192_77),
            (5, 20.0, 0.151_169_767_982_394_97, -0.100_035_767_889_532_43),
            (2, 30.0, 0.078_451_246_073_265_35, 0.122_924_103_064_113_84),
            (10, 7.5, 0.038_998_257_889_412_21, -1.276_941_928_052_437_5),
            (0, 70.0, 0.094_908_726_483_013_54, 0.009_309_666_458_940_975),
            (1, 99.0, -0.059_122_942_553_074_07, 0.054_177_730_033_470_98),
        ];
        for (n, x, j, y) in real {
            let z = c(x);
            assert!(close(bessel_j(n, z).unwrap(), c(j), 1e-12), "J_{n}({x})");
            assert!(close(bessel_y(n, z).unwrap(), c(y), 1e-12), "Y_{n}({x})");
        }
        let cplx = [
            (0, (3.0, 0.3), (-0.276_949_836_480_519_5, -0.102_516_709_717_409_38), (0.388_974_426_938_691_9, -0.099_109_087_572_190_94)),
            (2, (10.0, 1.0), (0.386_229_699_217_527_6, -0.012_724_258_858_473_628), (0.005_444_473_136_608_436, 0.291_328_745_898_892_56)),
            (1, (25.0, 0.5), (-0.140_792_913_300_219_15, 0.052_872_978_794_913_08), (-0.112_063_612_213_658_93, -0.064_152_295_852_633_92)),
            (4, (0.7, 0.2), (0.000_324_963_869_837_617, 0.000_637_129_088_738_622_8), (-52.305_637_703_205_6, 100.127_017_938_535_34)),
        ];
        for (n, (x, t), (jr, ji), (yr, yi)) in cplx {
            let z = Complex64::new(x, t);
            assert!(close(bessel_j(n, z).unwrap(), Complex64::new(jr, ji), 1e-11), "J_{n}({z})");
            assert!(close(bessel_y(n, z).unwrap(), Complex64::new(yr, yi), 1e-11), "Y_{n}({z})");
        }
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0, c(0.0)).unwrap(), c(1.0));
        assert_eq!(bessel_j(1, c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(bessel_j(0, c(2.404_825_557_7)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn wronskian() {
        for x in [0.5, 1.0, 5.0, 20.0] {
            for n in 0..6 {
                let z = c(x);
                let w = bessel_j(n + 1, z).unwrap() * bessel_y(n, z).unwrap()
                    - bessel_j(n, z).unwrap() * bessel_y(n + 1, z).unwrap();
                assert!((w.re - 2.0 / (PI * x)).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn reflection_and_domain() {
        let z = Complex64::new(3.3, 0.1);
        assert!(close(hankel1(-1, z).unwrap(), -hankel1(1, z).unwrap(), 1e-15));
        assert!(matches!(hankel1(0, c(-1.0)), Err(Error::Unsupported(_))));
        assert!(matches!(bessel_j(0, c(150.0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn large_argument_magnitude() {
        let h = hankel1(0, c(50.0)).unwrap().norm();
        let a = (2.0 / (PI * 50.0)).sqrt();
        assert!((h - a).abs() < 0.02 * a);
    }

    #[test]
    fn recurrence_and_derivative_identities() {
        for x in [0.3, 1.0, 2.5, 7.0, 19.9, 20.1, 45.0] {
            for t in [0.0, 0.05] {
                let z = Complex64::new(x, t);
                for n in 0..8 {
                    let hm = hankel1(n - 1, z).unwrap();
                    let h = hankel1(n, z).unwrap();
                    let hp = hankel1(n + 1, z).unwrap();
                    assert!(close(hm + hp, h * (2.0 * n as f64) / z, 1e-10) || (hm + hp - h * (2.0 * n as f64) / z).norm() < 1e-10);
                    // centred difference of H_n against (H_{n−1} − H_{n+1})/2
                    let d = 1e-5;
                    let fd = (hankel1(n, z + d).unwrap() - hankel1(n, z - d).unwrap()) / (2.0 * d);
                    assert!(close(fd, (hm - hp) / 2.0, 1e-7), "n={n} z={z}");
                }
            }
        }
    }

    #[test]
    fn exact_field_properties() {
        let p = CircleProblem::new(10.0, c(0.5), 1).unwrap();
        assert!(exact_scattered_field(&p, PI / 2.0).unwrap().norm() < 1e-15);

        let p0 = CircleProblem::new(10.0, c(0.5), 0).unwrap();
        let z = c(5.0);
        let want = -hankel1(0, z).unwrap() / hankel1(1, z).unwrap();
        assert!(close(p0.amplitude().unwrap(), want, 1e-13));
        assert_eq!(exact_scattered_field(&p0, 0.3).unwrap(), exact_scattered_field(&p0, 2.0).unwrap());

        for n in 0..4 {
            let p = CircleProblem::new(3.0, c(0.8), n).unwrap();
            let d = 1e-5;
            let fd = (p.field(p.radius + d, 0.0).unwrap() - p.field(p.radius - d, 0.0).unwrap()) / (2.0 * d);
            assert!(close(fd / p.wavenumber, c(1.0), 1e-6), "N={n}: {fd}");
        }

        let damped = CircleProblem::new(3.0, Complex64::new(0.8, 0.1), 2).unwrap();
        let mut last = f64::INFINITY;
        for r in [3.0, 5.0, 10.0, 20.0, 40.0] {
            let v = damped.field(r, 0.0).unwrap().norm();
            assert!(v < last);
            last = v;
        }
    }
}
