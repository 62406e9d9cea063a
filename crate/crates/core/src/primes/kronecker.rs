//! Kronecker symbol `(d/n)` for signed `d` and positive `n`.

/// Jacobi symbol `(a/n)` for odd `n` and `0 <= a < n`.
fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1 && a < n);
    let mut t = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Kronecker symbol `(d/n)`, completely multiplicative in `n`.
///
/// The factor at 2 is `(d/2) = 0` for even `d`, `+1` for `d = ±1 (mod 8)` and
/// `-1` for `d = ±3 (mod 8)`. For `n = 0` the symbol is 1 when `d = ±1` and 0
/// otherwise.
pub fn kronecker_symbol(d: i64, n: u64) -> i8 {
    if n == 0 {
        return i8::from(d == 1 || d == -1);
    }
    let v = n.trailing_zeros();
    let odd = n >> v;
    let mut sign = 1i8;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            sign = -1;
        }
    }
    if odd == 1 {
        return sign;
    }
    let a = (d as i128).rem_euclid(odd as i128) as u64;
    sign * jacobi(a, odd)
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Whether `d` is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        return matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs());
    }
    false
}
