//! Least-squares polynomial fits for latency curves.

/// Fitted coefficients (constant term first) and coefficient of
/// determination.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

impl Fit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

/// Fits a polynomial of the given degree by solving the normal equations.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Option<Fit> {
    let m = degree + 1;
    if x.len() != y.len() || x.len() < m {
        return None;
    }
    // Scale x to [0, 1] for conditioning.
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&xi, &yi) in x.iter().zip(y) {
        let xs = xi / scale;
        let powers: Vec<f64> = (0..2 * m).map(|p| xs.powi(p as i32)).collect();
        for row in 0..m {
            for col in 0..m {
                a[row][col] += powers[row + col];
            }
            a[row][m] += powers[row] * yi;
        }
    }
    let mut coeffs = solve(a)?;
    for (p, c) in coeffs.iter_mut().enumerate() {
        *c /= scale.powi(p as i32);
    }
    let fit = Fit {
        coefficients: coeffs,
        r_squared: 0.0,
    };
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(&xi, &yi)| (yi - fit.eval(xi)).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(Fit { r_squared, ..fit })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic() {
        let x: Vec<f64> = (1..=20).map(|v| v as f64 * 500.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 + 0.5 * v + 2e-4 * v * v).collect();
        let fit = polyfit(&x, &y, 2).unwrap();
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        assert!((fit.coefficients[2] - 2e-4).abs() < 1e-10);
        let line = polyfit(&x, &y, 1).unwrap();
        assert!(line.r_squared < 1.0);
    }

    #[test]
    fn linear_data() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.1, 5.9, 8.0];
        let fit = polyfit(&x, &y, 1).unwrap();
        assert!(fit.r_squared > 0.99);
        assert!((fit.eval(5.0) - 9.95).abs() < 0.2);
    }

    #[test]
    fn too_few_points() {
        assert!(polyfit(&[1.0, 2.0], &[1.0, 2.0], 2).is_none());
    }
}
