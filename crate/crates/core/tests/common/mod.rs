#![allow(dead_code)]

use fembae::lattice::{LatticeNode, UniformStencil};
use num_complex::Complex64;

/// Solution of `Σ β u = s` on the box `|x|, |y| ≤ half` with zero values outside,
/// by banded Gaussian elimination.
pub struct BoxField {
    half: i32,
    values: Vec<Complex64>,
}

impl BoxField {
    pub fn solve(stencil: &UniformStencil, half: i32, sources: &[(LatticeNode, Complex64)]) -> BoxField {
        let side = (2 * half + 1) as usize;
        let n = side * side;
        let w = side + 1;
        let width = 2 * w + 1;
        let index = |x: i32, y: i32| (x + half) as usize * side + (y + half) as usize;
        let mut band = vec![Complex64::default(); n * width];
        let at = |i: usize, j: usize| i * width + (j + w - i);
        for x in -half..=half {
            for y in -half..=half {
                let i = index(x, y);
                for (o, beta) in stencil.entries() {
                    let (px, py) = (x + o.0, y + o.1);
                    if px.abs() <= half && py.abs() <= half {
                        band[at(i, index(px, py))] += beta;
                    }
                }
            }
        }
        let mut rhs = vec![Complex64::default(); n];
        for &(node, v) in sources {
            rhs[index(node.0, node.1)] += v;
        }
        for k in 0..n {
            let pivot = band[at(k, k)];
            for i in k + 1..n.min(k + w + 1) {
                let l = band[at(i, k)] / pivot;
                if l == Complex64::default() {
                    continue;
                }
                for j in k..n.min(k + w + 1) {
                    let v = band[at(k, j)];
                    band[at(i, j)] -= l * v;
                }
                let r = rhs[k];
                rhs[i] -= l * r;
            }
        }
        for k in (0..n).rev() {
            let mut acc = rhs[k];
            for j in k + 1..n.min(k + w + 1) {
                acc -= band[at(k, j)] * rhs[j];
            }
            rhs[k] = acc / band[at(k, k)];
        }
        BoxField { half, values: rhs }
    }

    pub fn get(&self, n: LatticeNode) -> Complex64 {
        let side = (2 * self.half + 1) as usize;
        if n.0.abs() > self.half || n.1.abs() > self.half {
            return Complex64::default();
        }
        self.values[(n.0 + self.half) as usize * side + (n.1 + self.half) as usize]
    }
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
