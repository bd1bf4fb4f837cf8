//! Angular-momentum algebra for fine-structure dipole transitions.
//!
//! Angular momenta are passed doubled (`two_j = 2 j`) so half-integers stay exact.

fn ln_factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Triangle coefficient Delta(abc), doubled arguments. `None` if the triad is not coupled.
fn ln_triangle(ta: i32, tb: i32, tc: i32) -> Option<f64> {
    if ta < 0 || tb < 0 || tc < 0 {
        return None;
    }
    if (ta + tb + tc) % 2 != 0 {
        return None;
    }
    let (x, y, z) = ((ta + tb - tc), (ta - tb + tc), (-ta + tb + tc));
    if x < 0 || y < 0 || z < 0 {
        return None;
    }
    let s = (ta + tb + tc) / 2;
    Some(ln_factorial(x / 2) + ln_factorial(y / 2) + ln_factorial(z / 2) - ln_factorial(s + 1))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}` via the Racah formula.
///
/// Arguments are doubled angular momenta. Returns 0 when any triad fails the
/// triangle condition.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    let triads = [
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    ];
    let mut ln_pref = 0.0;
    for &(a, b, c) in &triads {
        match ln_triangle(a, b, c) {
            Some(v) => ln_pref += 0.5 * v,
            None => return 0.0,
        }
    }
    let a1 = (tj1 + tj2 + tj3) / 2;
    let a2 = (tj1 + tj5 + tj6) / 2;
    let a3 = (tj4 + tj2 + tj6) / 2;
    let a4 = (tj4 + tj5 + tj3) / 2;
    let b1 = (tj1 + tj2 + tj4 + tj5) / 2;
    let b2 = (tj2 + tj3 + tj5 + tj6) / 2;
    let b3 = (tj3 + tj1 + tj6 + tj4) / 2;
    let lo = a1.max(a2).max(a3).max(a4);
    let hi = b1.min(b2).min(b3);
    let mut sum = 0.0;
    for t in lo..=hi {
        let ln_term = ln_factorial(t + 1)
            - ln_factorial(t - a1)
            - ln_factorial(t - a2)
            - ln_factorial(t - a3)
            - ln_factorial(t - a4)
            - ln_factorial(b1 - t)
            - ln_factorial(b2 - t)
            - ln_factorial(b3 - t);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_term + ln_pref).exp();
    }
    sum
}

/// Angular part of the dipole line strength between `|l j>` and `|l' j'>` for one electron
/// with spin 1/2:
///
/// ```text
/// S / |<r>|^2 = (2j+1)(2j'+1) max(l, l') {l j 1/2; j' l' 1}^2
/// ```
///
/// Summed over all magnetic sublevels of both states, so it is symmetric in the pair.
pub fn line_strength_factor(l: u32, two_j: u32, l_prime: u32, two_j_prime: u32) -> f64 {
    let six_j = wigner_6j(
        2 * l as i32,
        two_j as i32,
        1,
        two_j_prime as i32,
        2 * l_prime as i32,
        2,
    );
    let g = ((two_j + 1) * (two_j_prime + 1)) as f64;
    g * l.max(l_prime) as f64 * six_j * six_j
}
