//! Exact dense linear algebra over ℚ(i).

use crate::scalar::Gq;

/// Row-reduces `m` in place to reduced row echelon form, returning pivot columns.
pub fn rref(m: &mut [Vec<Gq>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&k| !m[k][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for k in 0..rows {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                let (pivot_row, other) = if k < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[k])
                } else {
                    let (a, b) = m.split_at_mut(k);
                    (&a[r], &mut b[0])
                };
                for (dst, src) in other.iter_mut().zip(pivot_row.iter()) {
                    if !src.is_zero() {
                        *dst = &*dst - &(&f * src);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Gq>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Determinant by Gaussian elimination in exact arithmetic.
pub fn det(m: &[Vec<Gq>]) -> Gq {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Gq::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&k| !a[k][c].is_zero()) else {
            return Gq::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d = &d * &piv;
        let inv = piv.inv().expect("nonzero pivot");
        for k in c + 1..n {
            if a[k][c].is_zero() {
                continue;
            }
            let f = &a[k][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[k][j] = &a[k][j] - &t;
            }
        }
    }
    d
}

pub fn inverse(m: &[Vec<Gq>]) -> Option<Vec<Vec<Gq>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Gq>> = m
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|c| if c == r { Gq::one() } else { Gq::zero() }));
            v
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `a x = b`; returns one solution (free variables set to zero) or `None`.
pub fn solve(a: &[Vec<Gq>], b: &[Gq]) -> Option<Vec<Gq>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<Gq>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Gq::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Gq>> {
        rows.iter().map(|r| r.iter().map(|&v| Gq::int(v)).collect()).collect()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), Gq::int(18));
        let inv = inverse(&a).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let mut s = Gq::zero();
                for k in 0..3 {
                    s += &(&a[r][k] * &inv[k][c]);
                }
                assert_eq!(s, if r == c { Gq::one() } else { Gq::zero() });
            }
        }
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[Gq::int(1), Gq::int(3)]).is_none());
        let x = solve(&a, &[Gq::int(1), Gq::int(2)]).unwrap();
        assert_eq!(&x[0] + &x[1], Gq::int(1));
        assert_eq!(rank(&a), 1);
    }
}
