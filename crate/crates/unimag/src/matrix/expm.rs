//! Matrix exponential by scaling-and-squaring with the diagonal Padé
//! approximant of order 13 and norm-based scaling.

use num_complex::Complex64 as C64;

use super::inv::solve;
use super::ComplexMatrix;

/// 1-norm threshold for the order-13 approximant.
const THETA_13: f64 = 5.371920351148152;

/// Numerator coefficients of the [13/13] Padé approximant to exp.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential. `expm(0) = I`; bounded matrices always have one.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let x = a.scale_re(0.5f64.powi(s as i32));

    let eye = ComplexMatrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x2 * &x4;

    let c = |k: usize| C64::new(B[k], 0.0);
    let u_inner = &(&x6.scale(c(13)) + &x4.scale(c(11))) + &x2.scale(c(9));
    let u_poly = &(&(&(&x6 * &u_inner) + &x6.scale(c(7))) + &x4.scale(c(5)))
        + &(&x2.scale(c(3)) + &eye.scale(c(1)));
    let u = &x * &u_poly;
    let v_inner = &(&x6.scale(c(12)) + &x4.scale(c(10))) + &x2.scale(c(8));
    let v = &(&(&(&x6 * &v_inner) + &x6.scale(c(6))) + &x4.scale(c(4)))
        + &(&x2.scale(c(2)) + &eye.scale(c(0)));

    // (V - U) R = (V + U); V - U is nonsingular for the scaled argument
    let mut r = solve(&(&v - &u), &(&v + &u)).expect("Pade denominator singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
