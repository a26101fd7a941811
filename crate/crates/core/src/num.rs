//! Small numeric helpers shared by the solver and diagnostics.

/// `x^e` for `x >= 0`, specializing small integer and half-integer
/// exponents to multiplications. The gamma-law exponents sit in hot
/// per-cell loops where `powf` dominates the step cost.
#[inline]
pub fn powr(x: f64, e: f64) -> f64 {
    let r = e.round();
    if e == r && r.abs() <= 8.0 {
        return powi_small(x, r as i32);
    }
    let half = (2.0 * e).round();
    if 2.0 * e == half && half.abs() <= 15.0 {
        // e = k + 1/2
        return x.sqrt() * powi_small(x, (half as i32 - 1) / 2);
    }
    x.powf(e)
}

#[inline]
fn powi_small(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi_small(x, -n);
    }
    let mut acc = 1.0;
    let mut base = x;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// Max of |f_i|.
#[inline]
pub fn max_abs(field: &[f64]) -> f64 {
    field.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

pub fn all_finite(field: &[f64]) -> bool {
    field.iter().all(|x| x.is_finite())
}
