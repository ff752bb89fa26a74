//! Small dense helpers for planar systems.

use num_complex::Complex64;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

/// Frobenius norm.
pub fn norm(m: &Mat2) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn mul_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn dist(a: &Vec2, b: &Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn inf_norm(v: &Vec2) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Eigenvalues of a 2x2 matrix. Real pairs come back in ascending order,
/// complex pairs with the negative imaginary part first.
pub fn eigenvalues(m: &Mat2) -> [Complex64; 2] {
    let half = 0.5 * trace(m);
    let d = det(m);
    let disc = half * half - d;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { d / big } else { 0.0 };
        let (lo, hi) = if big < small { (big, small) } else { (small, big) };
        [Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)]
    } else {
        let w = (-disc).sqrt();
        [Complex64::new(half, -w), Complex64::new(half, w)]
    }
}

/// Unit eigenvector for a real eigenvalue `lambda`.
pub fn eigenvector(m: &Mat2, lambda: f64) -> Vec2 {
    let a = [m[0][1], lambda - m[0][0]];
    let b = [lambda - m[1][1], m[1][0]];
    let pick = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    let n = pick[0].hypot(pick[1]);
    if n == 0.0 {
        // scalar multiple of the identity: any direction works
        [1.0, 0.0]
    } else {
        [pick[0] / n, pick[1] / n]
    }
}

/// Solve `m x = b`, `None` when `m` is singular to working precision.
pub fn solve(m: &Mat2, b: &Vec2) -> Option<Vec2> {
    let d = det(m);
    let scale = norm(m).powi(2);
    if d == 0.0 || d.abs() <= 1e-300 + 1e-15 * scale {
        return None;
    }
    Some([
        (b[0] * m[1][1] - m[0][1] * b[1]) / d,
        (m[0][0] * b[1] - b[0] * m[1][0]) / d,
    ])
}

/// Symmetric `p` with `aᵀp + pa = -q`; `None` when the operator is singular.
pub fn lyapunov(a: &Mat2, q: &Mat2) -> Option<Mat2> {
    // unknowns p11, p12, p22
    let (a11, a12, a21, a22) = (a[0][0], a[0][1], a[1][0], a[1][1]);
    let m = [
        [2.0 * a11, 2.0 * a21, 0.0],
        [a12, a11 + a22, a21],
        [0.0, 2.0 * a12, 2.0 * a22],
    ];
    let rhs = [-q[0][0], -0.5 * (q[0][1] + q[1][0]), -q[1][1]];
    let p = solve3(m, rhs)?;
    Some([[p[0], p[1]], [p[1], p[2]]])
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_pairs() {
        let m = [[-1.0, 1.0], [0.16, -0.4]];
        let ev = eigenvalues(&m);
        assert!((ev[0].re + 1.2).abs() < 1e-12 && (ev[1].re + 0.2).abs() < 1e-12);
        for l in [ev[0].re, ev[1].re] {
            let v = eigenvector(&m, l);
            let mv = mul_vec(&m, &v);
            assert!((mv[0] - l * v[0]).abs() < 1e-12 && (mv[1] - l * v[1]).abs() < 1e-12);
        }
        let rot = [[0.5, -2.0], [2.0, 0.5]];
        let ev = eigenvalues(&rot);
        assert_eq!(ev[1], Complex64::new(0.5, 2.0));
    }

    #[test]
    fn lyapunov_residual() {
        let a = [[-0.1, -0.8], [0.0, -0.18714286]];
        let q = [[1.0, 0.0], [0.0, 100.0]];
        let p = lyapunov(&a, &q).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let r: f64 = (0..2).map(|k| a[k][i] * p[k][j] + p[i][k] * a[k][j]).sum();
                assert!((r + q[i][j]).abs() < 1e-9, "{r}");
            }
        }
        assert!(p[0][0] > 0.0 && det(&p) > 0.0);
    }
}
