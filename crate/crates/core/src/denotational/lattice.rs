//! Operations on the unit interval used by the semantics.

use super::EvalError;

fn check_unit(x: f64) -> Result<f64, EvalError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(EvalError::Domain(x))
    }
}

/// `x ⊙ y = x + y − xy`, exact on the unit `0` and the absorbing `1`.
pub(crate) fn coprod_unit(x: f64, y: f64) -> f64 {
    if x == 1.0 || y == 1.0 {
        1.0
    } else if x == 0.0 {
        y
    } else if y == 0.0 {
        x
    } else {
        (x + y - x * y).clamp(0.0, 1.0)
    }
}

/// Independent coproduct on `[0,1]`.
pub fn coproduct(x: f64, y: f64) -> Result<f64, EvalError> {
    Ok(coprod_unit(check_unit(x)?, check_unit(y)?))
}

/// Independent product on `[0,1]`.
pub fn product(x: f64, y: f64) -> Result<f64, EvalError> {
    Ok(check_unit(x)? * check_unit(y)?)
}

/// `2^(2^n + 1)`; defined for `n ≤ 6`.
pub fn approx_weight(n: u32) -> Result<u128, EvalError> {
    if n > 6 {
        return Err(EvalError::Overflow(n));
    }
    Ok(1u128 << ((1u32 << n) + 1))
}

/// `1 / 2^(2^n + 1)` as a float; underflows to `0` for large `n`.
pub fn approx_weight_inverse(n: u32) -> f64 {
    if n >= 11 {
        return 0.0;
    }
    0.5f64.powi((1i32 << n) + 1)
}

/// Left fold of `·` (or `⊙` when `coprod`) over `xs`. Empty product is `1`,
/// empty coproduct is `0`.
pub fn partial_product(xs: &[f64], coprod: bool) -> f64 {
    if coprod {
        xs.iter().fold(0.0, |acc, &x| coprod_unit(acc, x))
    } else {
        xs.iter().fold(1.0, |acc, &x| acc * x)
    }
}
