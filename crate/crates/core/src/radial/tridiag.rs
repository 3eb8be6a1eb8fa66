use crate::error::{Error, Result};

/// Thomas algorithm for `a_i x_{i−1} + b_i x_i + c_i x_{i+1} = d_i`.
/// `a[0]` and `c[n−1]` are ignored.
pub fn thomas_solve(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let mut x = vec![0.0; d.len()];
    let mut scratch = vec![0.0; d.len()];
    thomas_solve_into(a, b, c, d, &mut x, &mut scratch)?;
    Ok(x)
}

pub(crate) fn thomas_solve_into(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
    x: &mut [f64],
    c_prime: &mut [f64],
) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    if b[0] == 0.0 {
        return Err(Error::LinearSolveFailure { row: 0 });
    }
    c_prime[0] = c[0] / b[0];
    x[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * c_prime[i - 1];
        if den == 0.0 || !den.is_finite() {
            return Err(Error::LinearSolveFailure { row: i });
        }
        c_prime[i] = if i + 1 < n { c[i] / den } else { 0.0 };
        x[i] = (d[i] - a[i] * x[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_identity() {
        let d = [1.0, 2.0, 3.0];
        let x = thomas_solve(&[0.0; 3], &[1.0; 3], &[0.0; 3], &d).unwrap();
        assert_eq!(x, d.to_vec());
    }

    #[test]
    fn solves_second_difference_system() {
        // [2 -1 0 0; -1 2 -1 0; 0 -1 2 -1; 0 0 -1 2] x = [1 0 0 1] has x = 1
        let a = [0.0, -1.0, -1.0, -1.0];
        let b = [2.0; 4];
        let c = [-1.0, -1.0, -1.0, 0.0];
        let x = thomas_solve(&a, &b, &c, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reports_zero_pivot() {
        let err = thomas_solve(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::LinearSolveFailure { row: 1 });
        assert!(thomas_solve(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
    }
}
