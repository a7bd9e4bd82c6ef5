//! Spherical Bessel functions of real argument.

/// `j_0..=j_lmax` at `x >= 0` by downward recurrence, normalized through
/// `sum (2l+1) j_l^2 = 1`.
pub fn spherical_j(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = lmax + x.ceil() as usize + 30 + (4.0 * x.sqrt()).ceil() as usize;
    let mut f = vec![0.0; start + 2];
    f[start] = 1.0;
    for l in (1..=start).rev() {
        f[l - 1] = (2 * l + 1) as f64 / x * f[l] - f[l + 1];
        if f[l - 1].abs() > 1e100 {
            for v in f[l - 1..].iter_mut() {
                *v *= 1e-100;
            }
        }
    }
    let norm: f64 = f.iter().enumerate().rev().map(|(l, v)| (2 * l + 1) as f64 * v * v).sum::<f64>().sqrt();
    // fix the sign from whichever of j_0, j_1 is better conditioned
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let sign = if j0.abs() >= j1.abs() {
        j0.signum() * f[0].signum()
    } else {
        j1.signum() * f[1].signum()
    };
    for (o, v) in out.iter_mut().zip(&f) {
        *o = sign * v / norm;
    }
    out
}

/// `y_0..=y_lmax` at `x > 0` by upward recurrence.
pub fn spherical_y(lmax: usize, x: f64) -> Vec<f64> {
    let mut y = vec![0.0; lmax + 1];
    y[0] = -x.cos() / x;
    if lmax >= 1 {
        y[1] = -x.cos() / (x * x) - x.sin() / x;
    }
    for l in 1..lmax {
        y[l + 1] = (2 * l + 1) as f64 / x * y[l] - y[l - 1];
    }
    y
}

/// Derivatives from `f_l' = f_{l-1} - (l+1) f_l / x`, `f_0' = -f_1`; `f` must
/// hold orders up to `lmax + 1`.
pub fn derivatives(f: &[f64], x: f64) -> Vec<f64> {
    let lmax = f.len() - 2;
    (0..=lmax)
        .map(|l| {
            if l == 0 {
                -f[1]
            } else {
                f[l - 1] - (l + 1) as f64 / x * f[l]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders_match_closed_forms() {
        for x in [1e-3, 0.05, 0.7, 3.0, 25.0] {
            let j = spherical_j(3, x);
            let y = spherical_y(3, x);
            let (s, c) = x.sin_cos();
            let j2 = if x < 0.1 {
                x * x / 15.0 * (1.0 - x * x / 14.0 + x.powi(4) / 504.0)
            } else {
                (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x)
            };
            let y2 = -(3.0 / (x * x) - 1.0) * c / x - 3.0 * s / (x * x);
            assert!((j[0] - s / x).abs() < 1e-13 * (s / x).abs().max(1e-3));
            assert!((j[2] - j2).abs() < 1e-10 * j2.abs().max(1e-12), "{x}: {} vs {j2}", j[2]);
            assert!((y[2] - y2).abs() < 1e-12 * y2.abs());
        }
    }

    #[test]
    fn wronskian() {
        for x in [0.02, 1.3, 9.0] {
            let j = spherical_j(21, x);
            let y = spherical_y(21, x);
            let dj = derivatives(&j, x);
            let dy = derivatives(&y, x);
            for l in 0..=12 {
                let w = j[l] * dy[l] - dj[l] * y[l];
                assert!((w * x * x - 1.0).abs() < 1e-10, "l={l} x={x}: {w}");
            }
        }
    }
}
