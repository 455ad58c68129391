//! Small symbolic matrix helpers (cofactor expansion; charts are tiny).

use crate::expr::ScalarExpr;

pub type SymMatrix = Vec<Vec<ScalarExpr>>;

fn minor(a: &SymMatrix, row: usize, col: usize) -> SymMatrix {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

pub fn det(a: &SymMatrix) -> ScalarExpr {
    match a.len() {
        0 => ScalarExpr::one(),
        1 => a[0][0].clone(),
        2 => &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]),
        n => ScalarExpr::sum((0..n).filter(|j| !a[0][*j].is_zero()).map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            (&a[0][j] * &det(&minor(a, 0, j))).scale(sign)
        })),
    }
}

/// Inverse via adjugate over determinant, with the determinant returned too.
pub fn inverse(a: &SymMatrix) -> (SymMatrix, ScalarExpr) {
    let n = a.len();
    let d = det(a);
    if n == 1 {
        return (vec![vec![d.recip()]], d);
    }
    let inv_d = d.recip();
    let inv = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // (A^{-1})_{ij} = cofactor_{ji} / det
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let c = det(&minor(a, j, i));
                    (&c * &inv_d).scale(sign)
                })
                .collect()
        })
        .collect();
    (inv, d)
}

pub fn eval_matrix(a: &SymMatrix, p: &[f64]) -> crate::Result<Vec<Vec<f64>>> {
    a.iter()
        .map(|r| r.iter().map(|e| e.eval(p)).collect())
        .collect()
}

/// Cholesky-based positive-definiteness test for a small dense matrix.
pub fn is_positive_definite(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = m[i][i] - s;
                if v <= 1e-14 || !v.is_finite() {
                    return false;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    true
}

pub fn det_numeric(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|x, y| a[*x][c].abs().total_cmp(&a[*y][c].abs()))
            .unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_diagonal() {
        let x = ScalarExpr::coord(0);
        let a = vec![
            vec![ScalarExpr::one(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), x.sin().powi(2)],
        ];
        let (inv, d) = inverse(&a);
        assert_eq!(d, x.sin().powi(2));
        assert!(inv[0][1].is_zero() && inv[1][0].is_zero());
        assert!(inv[0][0].is_one());
        assert_eq!(inv[1][1], x.sin().powi(-2));
    }

    #[test]
    fn numeric_helpers() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        assert!((det_numeric(&m) - 3.0).abs() < 1e-15);
        assert!(is_positive_definite(&m));
        assert!(!is_positive_definite(&[vec![1.0, 2.0], vec![2.0, 1.0]]));
    }
}
