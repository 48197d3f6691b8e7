//! Quadrature rules and adaptive integrators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Affine map from `[-1, 1]` to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> Rule {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        Rule {
            nodes: self.nodes.iter().map(|x| m + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`
/// (Golub-Welsch).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 || !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Gauss-Jacobi needs n > 0 and exponents > -1, got n = {n}, ({alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        t[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let ratio = if k == 0 {
                // (j + ab) / (s - 1) = 1 at j = 1, which is 0/0 when ab = -1
                4.0 * (1.0 + alpha) * (1.0 + beta) / (s * s * (s + 1.0))
            } else {
                4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = ratio.sqrt();
            t[(k, k + 1)] = off;
            t[(k + 1, k)] = off;
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Integral estimate with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = fc * GK15_WK[7];
    let mut g = fc * GK15_WG[3];
    for j in 0..7 {
        let x = h * GK15_NODES[j];
        let s = f(c - x) + f(c + x);
        k += GK15_WK[j] * s;
        if j % 2 == 1 {
            g += GK15_WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration over `[a, b]`, with
/// optional interior break points where the integrand is known to be rough.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    const MAX_SEGMENTS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    for pair in breaks.windows(2) {
        let (value, error) = gk15(&mut f, pair[0], pair[1]);
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value,
            error,
        });
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Convergence {
                what: "adaptive Gauss-Kronrod".into(),
                achieved: error,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval exhausted in floating point; accept what we have
            let (value, error) = heap
                .iter()
                .fold((worst.value, worst.error), |(v, e), s| (v + s.value, e + s.error));
            return Ok(Estimate { value, error });
        }
        for (a, b) in [(worst.a, m), (m, worst.b)] {
            let (value, error) = gk15(&mut f, a, b);
            heap.push(Segment { a, b, value, error });
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

struct Cell {
    rect: Rect,
    coarse: f64,
    fine: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive tensor Gauss-Legendre cubature over a union of rectangles.
///
/// Each cell is estimated once with the base rule and once as the sum over
/// its four quarters; the difference is the error indicator. The cell with
/// the largest indicator is split until the summed indicator meets the
/// tolerance.
pub struct Cubature {
    rule: Rule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_cells: usize,
}

impl Cubature {
    pub fn new(order: usize, abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            rule: gauss_legendre(order),
            abs_tol,
            rel_tol,
            max_cells: 400_000,
        }
    }

    fn base(&self, f: &mut impl FnMut(f64, f64) -> f64, r: &Rect) -> f64 {
        let rx = self.rule.on(r.x0, r.x1);
        let ry = self.rule.on(r.y0, r.y1);
        let mut s = 0.0;
        for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
            let mut inner = 0.0;
            for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                inner += wy * f(x, y);
            }
            s += wx * inner;
        }
        s
    }

    fn cell(&self, f: &mut impl FnMut(f64, f64) -> f64, rect: Rect, coarse: f64) -> Cell {
        let fine: f64 = rect.quarters().iter().map(|q| self.base(f, q)).sum();
        Cell {
            rect,
            coarse,
            fine,
            error: (fine - coarse).abs(),
        }
    }

    pub fn integrate(
        &self,
        mut f: impl FnMut(f64, f64) -> f64,
        regions: &[Rect],
    ) -> Result<Estimate> {
        let mut heap = BinaryHeap::new();
        for &r in regions {
            let coarse = self.base(&mut f, &r);
            heap.push(self.cell(&mut f, r, coarse));
        }
        loop {
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), c| (v + c.fine, e + c.error));
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                return Ok(Estimate { value, error });
            }
            if heap.len() >= self.max_cells {
                return Err(Error::Convergence {
                    what: "adaptive cubature".into(),
                    achieved: error,
                });
            }
            let worst = heap.pop().expect("non-empty heap");
            let _ = worst.coarse;
            for q in worst.rect.quarters() {
                let coarse = self.base(&mut f, &q);
                heap.push(self.cell(&mut f, q, coarse));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(7);
        // degree 13 is exact for 7 nodes
        let v = r.on(0.0, 2.0).apply(|x| x.powi(13));
        assert!((v - 2f64.powi(14) / 14.0).abs() < 1e-10);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_weight_moments() {
        // int_{-1}^{1} (1-x)^{1/2} (1+x)^{1/2} dx = pi/2
        let r = gauss_jacobi(12, 0.5, 0.5).unwrap();
        assert!((r.apply(|_| 1.0) - PI / 2.0).abs() < 1e-13);
        // int (1-x)^{-1/2} (1+x)^{1/2} x dx = -pi/2
        let r = gauss_jacobi(12, -0.5, 0.5).unwrap();
        assert!((r.apply(|x| x) - PI / 2.0).abs() < 1e-13);
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }

    #[test]
    fn adaptive_handles_endpoint_log() {
        // int_0^1 ln x dx = -1
        let e = integrate(|x| x.ln(), &[0.0, 1.0], 1e-13, 1e-13).unwrap();
        assert!((e.value + 1.0).abs() < 1e-12, "{e:?}");
    }

    #[test]
    fn cubature_with_point_singularity() {
        // int over unit square of ln(x^2 + y^2)
        let exact = -3.0 + PI / 2.0 + 2f64.ln();
        let c = Cubature::new(8, 1e-11, 0.0);
        let e = c
            .integrate(|x, y| (x * x + y * y).ln(), &[Rect::new(0.0, 1.0, 0.0, 1.0)])
            .unwrap();
        assert!((e.value - exact).abs() < 1e-10, "{} vs {exact}", e.value);
    }
}
