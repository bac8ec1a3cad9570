use crate::scalar::Scalar;

/// Determinant by Bareiss elimination.
///
/// Exact domains pivot on the first nonzero entry; the numeric domain uses
/// partial pivoting on magnitude. An empty matrix has determinant 1.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    if n == 0 {
        return S::one();
    }
    let mut sign_flip = false;
    let mut prev = S::one();
    for k in 0..n - 1 {
        let pivot_row = if S::EXACT {
            (k..n).find(|&r| !m[r][k].is_zero())
        } else {
            (k..n)
                .filter(|&r| !m[r][k].is_zero())
                .max_by(|&a, &b| m[a][k].magnitude().total_cmp(&m[b][k].magnitude()))
        };
        let Some(p) = pivot_row else {
            return S::zero();
        };
        if p != k {
            m.swap(p, k);
            sign_flip = !sign_flip;
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = pivot.clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v / prev.clone();
            }
            m[i][k] = S::zero();
        }
        prev = pivot;
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};
    use num_complex::Complex64;

    fn cofactor(m: &[Vec<Rational>]) -> Rational {
        if m.is_empty() {
            return int(1);
        }
        let n = m.len();
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].clone() * cofactor(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .fold(int(0), |a, b| a + b)
    }

    #[test]
    fn matches_cofactor_expansion() {
        let m = vec![
            vec![int(0), int(2), rat(1, 3), int(-1)],
            vec![int(1), int(0), int(4), int(2)],
            vec![rat(-1, 2), int(3), int(0), int(5)],
            vec![int(2), int(1), int(1), int(0)],
        ];
        assert_eq!(determinant(m.clone()), cofactor(&m));
    }

    #[test]
    fn singular_and_numeric() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(determinant(m), int(0));
        let c = |x: f64| Complex64::new(x, 0.0);
        let m = vec![vec![c(1e-20), c(1.0)], vec![c(1.0), c(1.0)]];
        assert!((determinant(m) - c(-1.0)).norm() < 1e-15);
    }
}
