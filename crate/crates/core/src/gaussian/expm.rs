use nalgebra::DMatrix;

// Padé [6/6] coefficients b_k = (12-k)! 6! / (12! k! (6-k)!).
const PADE6: [f64; 7] = [
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Exact exponential of a nilpotent matrix as a terminating Taylor sum.
///
/// Returns `None` when no power up to the matrix dimension vanishes.
pub fn nilpotent_exp(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let scale = max_abs(a);
    let mut sum = DMatrix::identity(n, n);
    if scale == 0.0 {
        return Some(sum);
    }
    let mut term = DMatrix::identity(n, n);
    for k in 1..=n {
        term = &term * a / k as f64;
        if max_abs(&term) <= 1e-15 * scale.powi(k as i32) {
            return Some(sum);
        }
        sum += &term;
    }
    None
}

fn pade6(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let odd = a * (&a4 * PADE6[5] + &a2 * PADE6[3] + &id * PADE6[1]);
    let even = &a6 * PADE6[6] + &a4 * PADE6[4] + &a2 * PADE6[2] + &id * PADE6[0];
    let numer = &even + &odd;
    let denom = &even - &odd;
    denom
        .lu()
        .solve(&numer)
        .expect("Padé denominator is nonsingular for ‖A‖ ≤ 1/2")
}

/// Matrix exponential.
///
/// Nilpotent generators (all QND couplings) are summed exactly; anything
/// else goes through scaling and squaring around a Padé [6/6] approximant,
/// which is accurate to ~1e-16 relative once ‖A/2ˢ‖∞ ≤ 1/2.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm of a non-square matrix");
    if let Some(e) = nilpotent_exp(a) {
        return e;
    }
    let norm = inf_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut e = pade6(&scaled);
    for _ in 0..squarings {
        e = &e * &e;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_matrix() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z), DMatrix::identity(4, 4));
    }

    #[test]
    fn rotation_generator() {
        let t = 2.7;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], t.cos(), epsilon = 1e-14);
        assert_relative_eq!(e[(0, 1)], t.sin(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 0)], -t.sin(), epsilon = 1e-14);
    }

    #[test]
    fn diagonal_and_large_norm() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -2.0, 0.1]));
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], 3f64.exp(), max_relative = 1e-13);
        assert_relative_eq!(e[(1, 1)], (-2f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(e[(2, 2)], 0.1f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn nilpotent_terminates() {
        // strictly upper triangular ⇒ nilpotent
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let e = nilpotent_exp(&a).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 3.5, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0]);
        assert_eq!(e, expected);
        assert!(nilpotent_exp(&DMatrix::<f64>::identity(2, 2)).is_none());
    }

    #[test]
    fn pade_agrees_with_taylor_on_general_matrix() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, -1.2, 0.5, 0.7, 0.1, -0.4, -0.2, 0.9, -0.6]);
        // brute-force Taylor series, 60 terms
        let mut sum = DMatrix::<f64>::identity(3, 3);
        let mut term = DMatrix::<f64>::identity(3, 3);
        for k in 1..60 {
            term = &term * &a / k as f64;
            sum += &term;
        }
        let e = expm(&a);
        for (x, y) in e.iter().zip(sum.iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-13);
        }
    }
}
