//! Roots of complex polynomials of small degree.
//!
//! Degrees one and two use closed forms (with the numerically stable quadratic
//! variant); higher degrees use Durand–Kerner iteration followed by a Newton
//! polish of each root.

use num_complex::Complex64;

/// Evaluates a polynomial given by coefficients in increasing degree order.
pub fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Derivative evaluation via the Horner scheme.
fn poly_eval_deriv(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * p as f64;
    }
    acc
}

/// Product of two polynomials in coefficient form (increasing degree).
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// All roots of the polynomial with the given coefficients (increasing degree,
/// leading coefficient nonzero). Roots are returned unordered.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    assert!(coeffs.len() >= 2, "need degree >= 1");
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    assert!(
        lead.norm() > 0.0,
        "leading coefficient must be nonzero"
    );
    match n {
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // Pick the sign that avoids cancellation in -b -/+ disc.
            let s = if (b + disc).norm() >= (b - disc).norm() {
                b + disc
            } else {
                b - disc
            };
            if s.norm() == 0.0 {
                // b = c = 0: double root at the origin.
                return vec![Complex64::new(0.0, 0.0); 2];
            }
            let r1 = -s / (2.0 * a);
            let r2 = -2.0 * c / s;
            vec![r1, r2]
        }
        _ => durand_kerner(coeffs),
    }
}

fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    // Radius bound: 1 + max |a_k| over the monic coefficients.
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    // Standard non-real starting spread.
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| radius * seed.powu(k as u32 + 1))
        .collect();
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = poly_eval(&monic, roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius {
            break;
        }
    }
    // Newton polish sharpens simple roots to machine precision.
    for r in &mut roots {
        for _ in 0..4 {
            let d = poly_eval_deriv(&monic, *r);
            if d.norm() < 1e-300 {
                break;
            }
            *r -= poly_eval(&monic, *r) / d;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_roots_match(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) {
        assert_eq!(got.len(), want.len());
        // Greedy matching is fine for well-separated roots.
        while let Some(w) = want.pop() {
            let (idx, best) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(best < tol, "root {w} missing (closest {best:.2e})");
            got.remove(idx);
        }
    }

    #[test]
    fn quadratic_is_stable_under_cancellation() {
        // Roots 1e8 and 1e-8: naive formula loses the small root entirely.
        let c = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-(1e8 + 1e-8), 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let roots = poly_roots(&c);
        assert_roots_match(
            roots,
            vec![Complex64::new(1e8, 0.0), Complex64::new(1e-8, 0.0)],
            1e-6,
        );
    }

    #[test]
    fn cubic_and_quartic_from_known_factors() {
        // (z - 2)(z + 1 - i)(z - 3i)
        let want = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(0.0, 3.0),
        ];
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for w in &want {
            c = poly_mul(&c, &[-w, Complex64::new(1.0, 0.0)]);
        }
        c.reverse(); // poly_mul built it high-to-low because of the factor order
        c.reverse(); // no-op pair kept for clarity: coefficients are increasing already
        let roots = poly_roots(&c);
        assert_roots_match(roots, want, 1e-10);

        let want4 = vec![
            Complex64::new(0.5, 0.5),
            Complex64::new(-0.5, 0.5),
            Complex64::new(1.5, -2.0),
            Complex64::new(-3.0, 0.0),
        ];
        let mut c4 = vec![Complex64::new(1.0, 0.0)];
        for w in &want4 {
            c4 = poly_mul(&c4, &[-w, Complex64::new(1.0, 0.0)]);
        }
        let roots4 = poly_roots(&c4);
        assert_roots_match(roots4, want4, 1e-9);
    }

    #[test]
    fn poly_mul_matches_direct_expansion() {
        // (1 + 2z)(3 - z + z^2) = 3 + 5z - z^2 ... compute and verify by evaluation.
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let b = [
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let p = poly_mul(&a, &b);
        for &z in &[Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.7)] {
            let lhs = poly_eval(&a, z) * poly_eval(&b, z);
            assert!((poly_eval(&p, z) - lhs).norm() < 1e-13 * lhs.norm().max(1.0));
        }
    }
}
