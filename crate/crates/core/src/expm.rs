//! Matrix exponential and zero-order-hold integrals for 2x2 systems.
//!
//! The closed forms use the two eigenvalues of `A` (Sylvester's formula in
//! divided-difference form). When the eigenvalues nearly coincide the
//! divided differences cancel catastrophically, so those matrices go through a
//! scaling-and-squaring Taylor series on the augmented `[[A, B], [0, 0]]`
//! block instead.

use nalgebra::{Matrix2, Matrix3, SMatrix, Vector2};
use num_complex::Complex64;

/// Relative discriminant below which a 2x2 matrix is treated as defective.
pub const DEFECTIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Spectrum {
    /// `hi >= lo`.
    Real {
        hi: f64,
        lo: f64,
    },
    /// `re ± i·im`, `im > 0`.
    Complex {
        re: f64,
        im: f64,
    },
    NearlyDefective,
}

fn spectrum(a: &Matrix2<f64>) -> Spectrum {
    let tr = a.trace();
    let det = a.determinant();
    let disc = tr * tr - 4.0 * det;
    let scale = (tr * tr).max(a.norm_squared());
    if disc.abs() <= DEFECTIVE_TOL * scale {
        return Spectrum::NearlyDefective;
    }
    let half = 0.5 * tr;
    if disc > 0.0 {
        let q = 0.5 * disc.sqrt();
        // Stable root pair: the large-magnitude root first, the other from det.
        let big = if half >= 0.0 { half + q } else { half - q };
        let other = if big != 0.0 { det / big } else { half - q };
        let (hi, lo) = if big >= other {
            (big, other)
        } else {
            (other, big)
        };
        Spectrum::Real { hi, lo }
    } else {
        Spectrum::Complex {
            re: half,
            im: 0.5 * (-disc).sqrt(),
        }
    }
}

/// Eigenvalues of a real 2x2 matrix, larger real part first.
pub fn eigenvalues(a: &Matrix2<f64>) -> [Complex64; 2] {
    let tr = a.trace();
    let det = a.determinant();
    let disc = tr * tr - 4.0 * det;
    let half = 0.5 * tr;
    if disc >= 0.0 {
        let q = 0.5 * disc.sqrt();
        let big = if half >= 0.0 { half + q } else { half - q };
        let other = if big != 0.0 { det / big } else { half - q };
        let (hi, lo) = if big >= other {
            (big, other)
        } else {
            (other, big)
        };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(half, im), Complex64::new(half, -im)]
    }
}

/// `(e^z - 1) / z`, accurate near zero.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

fn phi1_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `exp(A·t)`.
pub fn expm(a: &Matrix2<f64>, t: f64) -> Matrix2<f64> {
    let id = Matrix2::identity();
    match spectrum(a) {
        Spectrum::Real { hi, lo } => {
            let gap = lo - hi;
            let dd = (hi * t).exp() * t * phi1(gap * t);
            id * (hi * t).exp() + (a - id * hi) * dd
        }
        Spectrum::Complex { re, im } => {
            let f = Complex64::new(re * t, im * t).exp();
            id * f.re + (a - id * re) * (f.im / im)
        }
        Spectrum::NearlyDefective => expm_series(&(a * t)),
    }
}

/// Zero-order-hold pair `(Φ, Γ)`: `Φ = exp(A·t)` and `Γ = ∫₀ᵗ exp(A·σ) dσ · B`.
pub fn zoh(a: &Matrix2<f64>, b: &Vector2<f64>, t: f64) -> (Matrix2<f64>, Vector2<f64>) {
    let id = Matrix2::identity();
    match spectrum(a) {
        Spectrum::Real { hi, lo } => {
            let phi = expm(a, t);
            let g = |x: f64| t * phi1(x * t);
            let dd = (g(lo) - g(hi)) / (lo - hi);
            let psi = id * g(hi) + (a - id * hi) * dd;
            (phi, psi * b)
        }
        Spectrum::Complex { re, im } => {
            let phi = expm(a, t);
            let lambda = Complex64::new(re, im);
            let g = phi1_complex(lambda * t) * t;
            let psi = id * g.re + (a - id * re) * (g.im / im);
            (phi, psi * b)
        }
        Spectrum::NearlyDefective => {
            let mut aug = Matrix3::zeros();
            aug.fixed_view_mut::<2, 2>(0, 0).copy_from(&(a * t));
            aug.fixed_view_mut::<2, 1>(0, 2).copy_from(&(b * t));
            let e = expm_series(&aug);
            (
                e.fixed_view::<2, 2>(0, 0).into_owned(),
                e.fixed_view::<2, 1>(0, 2).into_owned(),
            )
        }
    }
}

/// Scaling-and-squaring Taylor series for a small fixed-size matrix.
pub fn expm_series<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = m.abs().row_sum().max();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = m / 2f64.powi(squarings as i32);

    let mut sum = SMatrix::<f64, N, N>::identity();
    let mut term = SMatrix::<f64, N, N>::identity();
    for k in 1..=20 {
        term = term * scaled / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
