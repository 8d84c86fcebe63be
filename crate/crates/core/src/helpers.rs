//! Arithmetic helpers shared by the algorithms: scalar and 2x2 matrix
//! exponentiation by repeated squaring, the Q-matrix multiply, negafibonacci
//! sign adjustment and rounding.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Float, FromPrimitive, Num, One, RefNum, Zero};

use crate::error::{DepthGuard, FibError, FloatOverflow};

/// Row-major 2x2 matrix. `m01` is the top-right entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2<T> {
    pub m00: T,
    pub m01: T,
    pub m10: T,
    pub m11: T,
}

impl<T> Mat2<T> {
    pub const fn new(m00: T, m01: T, m10: T, m11: T) -> Self {
        Self { m00, m01, m10, m11 }
    }
}

impl<T: Zero + One> Mat2<T> {
    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    /// The Fibonacci Q-matrix `[[1,1],[1,0]]`.
    pub fn q() -> Self {
        Self::new(T::one(), T::one(), T::one(), T::zero())
    }
}

impl<T: PartialEq> Mat2<T> {
    pub fn is_symmetric(&self) -> bool {
        self.m01 == self.m10
    }
}

impl<T: fmt::Display> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m00, self.m01, self.m10, self.m11)
    }
}

/// Full 2x2 product: eight multiplications, four additions.
pub fn mat_mul<T>(m1: &Mat2<T>, m2: &Mat2<T>) -> Mat2<T>
where
    T: Num,
    for<'a> &'a T: RefNum<T>,
{
    Mat2 {
        m00: &m1.m00 * &m2.m00 + &m1.m01 * &m2.m10,
        m01: &m1.m00 * &m2.m01 + &m1.m01 * &m2.m11,
        m10: &m1.m10 * &m2.m00 + &m1.m11 * &m2.m10,
        m11: &m1.m10 * &m2.m01 + &m1.m11 * &m2.m11,
    }
}

/// `m1 * Q` without multiplications: `[[a+b, a], [c+d, c]]`.
pub fn mat_mul_opt<T>(m1: &Mat2<T>) -> Mat2<T>
where
    T: Num + Clone,
    for<'a> &'a T: RefNum<T>,
{
    Mat2 {
        m00: &m1.m00 + &m1.m01,
        m01: m1.m00.clone(),
        m10: &m1.m10 + &m1.m11,
        m11: m1.m10.clone(),
    }
}

/// In-place form of [`mat_mul_opt`], used by the linear Q-matrix walk.
pub(crate) fn mat_mul_opt_in_place<T>(m: &mut Mat2<T>)
where
    T: Num + Clone,
    for<'a> &'a T: RefNum<T>,
{
    let top = &m.m00 + &m.m01;
    let bottom = &m.m10 + &m.m11;
    m.m11 = std::mem::replace(&mut m.m10, bottom);
    m.m01 = std::mem::replace(&mut m.m00, top);
}

/// Runs a recursive step, moving onto a fresh heap-allocated stack segment
/// when the current one runs low. Recursion depth is bounded by
/// [`DepthGuard`], not by the native stack.
#[inline]
pub(crate) fn on_stack<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, f)
}

/// `m^n` by recursive repeated squaring. Each level of recursion is charged
/// against `guard`; the depth consumed is the bit length of `n` plus one.
pub fn mat_pow_recur<T>(m: &Mat2<T>, n: u64, guard: &mut DepthGuard) -> Result<Mat2<T>, FibError>
where
    T: Num + Clone,
    for<'a> &'a T: RefNum<T>,
{
    guard.enter()?;
    let result = if n == 0 {
        Mat2::identity()
    } else if n == 1 {
        m.clone()
    } else {
        let half = on_stack(|| mat_pow_recur(m, n / 2, guard))?;
        let squared = mat_mul(&half, &half);
        if n % 2 == 1 {
            mat_mul(&squared, m)
        } else {
            squared
        }
    };
    guard.leave();
    Ok(result)
}

/// `m^n` by iterating over the bits of `n`, least significant first.
pub fn mat_pow_iter<T>(m: &Mat2<T>, mut n: u64) -> Mat2<T>
where
    T: Num + Clone,
    for<'a> &'a T: RefNum<T>,
{
    let mut result = Mat2::identity();
    if n == 0 {
        return result;
    }
    let mut base = m.clone();
    loop {
        if n & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        n >>= 1;
        if n == 0 {
            return result;
        }
        base = mat_mul(&base, &base);
    }
}

/// `a^n` for floating-point `a` by repeated squaring over the bits of `n`.
///
/// Overflow to infinity is reported as [`FloatOverflow`] rather than
/// returned as a value.
pub fn num_pow_iter<T: Float>(a: T, mut n: u64) -> Result<T, FloatOverflow> {
    let mut result = T::one();
    let mut base = a;
    while n > 0 {
        if n & 1 == 1 {
            result = result * base;
        }
        n >>= 1;
        if n > 0 {
            base = base * base;
        }
    }
    if result.is_finite() {
        Ok(result)
    } else {
        Err(FloatOverflow)
    }
}

/// `F_{-n} = (-1)^{n+1} F_n`.
pub fn negafib(n: u64, fib_n: BigInt) -> BigInt {
    if n.is_multiple_of(2) {
        -fib_n
    } else {
        fib_n
    }
}

/// Nearest integer, with exact halves rounded away from zero.
pub fn round_half_away<T: Float>(x: T) -> Result<BigInt, FibError> {
    if !x.is_finite() {
        return Err(FibError::NotFinite);
    }
    float_to_bigint(x.round())
}

/// Exact conversion of an integral, finite float.
pub(crate) fn float_to_bigint<T: Float>(x: T) -> Result<BigInt, FibError> {
    // f32 and f64 both widen losslessly to f64.
    let wide = num_traits::ToPrimitive::to_f64(&x).ok_or(FibError::NotFinite)?;
    BigInt::from_f64(wide).ok_or(FibError::NotFinite)
}

/// Golden-ratio constants for a float type.
#[derive(Debug, Clone, Copy)]
pub struct GoldenConstants<T> {
    pub sqrt5: T,
    pub phi: T,
    pub psi: T,
}

impl<T: Float> GoldenConstants<T> {
    pub fn new() -> Self {
        let one = T::one();
        let two = one + one;
        let sqrt5 = (two + two + one).sqrt();
        Self {
            sqrt5,
            phi: (one + sqrt5) / two,
            psi: (one - sqrt5) / two,
        }
    }
}

impl<T: Float> Default for GoldenConstants<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: [i64; 4]) -> Mat2<BigInt> {
        Mat2::new(m[0].into(), m[1].into(), m[2].into(), m[3].into())
    }

    fn unguarded() -> DepthGuard {
        DepthGuard::new(1000)
    }

    #[test]
    fn num_pow_iter_examples() {
        assert_eq!(num_pow_iter(2.0_f64, 10), Ok(1024.0));
        assert_eq!(num_pow_iter(1.618033988749895_f64, 0), Ok(1.0));

        let phi = 1.618033988749895_f64;
        let naive = (0..11).fold(1.0, |acc, _| acc * phi);
        let fast = num_pow_iter(phi, 11).unwrap();
        assert!(((fast - naive) / naive).abs() < 1e-9);
        assert!((fast - 199.005).abs() < 1e-3);
    }

    #[test]
    fn num_pow_iter_flags_overflow() {
        assert_eq!(num_pow_iter(10.0_f64, 400), Err(FloatOverflow));
        assert_eq!(num_pow_iter(10.0_f32, 40), Err(FloatOverflow));
        assert_eq!(num_pow_iter(10.0_f32, 30).map(|v| v > 1e29), Ok(true));
    }

    #[test]
    fn mat_mul_examples() {
        let q = Mat2::<BigInt>::q();
        let x = big([7, -3, 11, 2]);
        assert_eq!(mat_mul(&Mat2::identity(), &x), x);
        assert_eq!(mat_mul(&q, &q), big([2, 1, 1, 1]));
        assert_eq!(mat_mul(&big([2, 1, 1, 1]), &q), big([3, 2, 2, 1]));
    }

    #[test]
    fn mat_mul_opt_examples() {
        assert_eq!(mat_mul_opt(&Mat2::<BigInt>::identity()), Mat2::q());
        assert_eq!(mat_mul_opt(&Mat2::<BigInt>::q()), big([2, 1, 1, 1]));
        assert_eq!(mat_mul_opt(&big([5, 3, 3, 2])), big([8, 5, 5, 3]));

        let mut m = big([5, 3, 3, 2]);
        mat_mul_opt_in_place(&mut m);
        assert_eq!(m, big([8, 5, 5, 3]));
    }

    #[test]
    fn mat_pow_examples() {
        let q = Mat2::<BigInt>::q();
        let mut guard = unguarded();
        assert_eq!(mat_pow_recur(&q, 0, &mut guard).unwrap(), Mat2::identity());
        assert_eq!(mat_pow_recur(&q, 5, &mut guard).unwrap(), big([8, 5, 5, 3]));
        assert_eq!(guard.depth(), 0);

        assert_eq!(mat_pow_iter(&q, 0), Mat2::identity());
        assert_eq!(mat_pow_iter(&q, 1), q);
        assert_eq!(mat_pow_iter(&q, 5), big([8, 5, 5, 3]));

        let any = big([2, -1, 4, 3]);
        assert_eq!(mat_pow_iter(&any, 3), mat_mul(&mat_mul(&any, &any), &any));
    }

    #[test]
    fn mat_pow_recur_q64_matches_linear_walk() {
        let q = Mat2::<BigInt>::q();
        let linear = (0..64).fold(Mat2::identity(), |m, _| mat_mul_opt(&m));
        assert_eq!(mat_pow_recur(&q, 64, &mut unguarded()).unwrap(), linear);
    }

    #[test]
    fn mat_pow_recur_charges_depth() {
        let q = Mat2::<BigInt>::q();
        // 2^20 recurses through 21 levels
        assert!(mat_pow_recur(&q, 1 << 20, &mut DepthGuard::new(21)).is_ok());
        assert_eq!(
            mat_pow_recur(&q, 1 << 20, &mut DepthGuard::new(20)),
            Err(FibError::RecursionDepthExceeded { limit: 20 })
        );
    }

    #[test]
    fn mat2_works_over_machine_integers() {
        let q = Mat2::<u64>::q();
        assert_eq!(mat_pow_iter(&q, 10), Mat2::new(89, 55, 55, 34));
        let mut guard = unguarded();
        assert_eq!(mat_pow_recur(&q, 10, &mut guard).unwrap(), mat_pow_iter(&q, 10));
    }

    #[test]
    fn negafib_examples() {
        assert_eq!(negafib(1, 1.into()), BigInt::from(1));
        assert_eq!(negafib(2, 1.into()), BigInt::from(-1));
        assert_eq!(negafib(0, 0.into()), BigInt::zero());
    }

    #[test]
    fn round_half_away_examples() {
        assert_eq!(round_half_away(0.4_f64).unwrap(), BigInt::zero());
        assert_eq!(round_half_away(-0.6_f64).unwrap(), BigInt::from(-1));
        assert_eq!(round_half_away(2.5_f64).unwrap(), BigInt::from(3));
        assert_eq!(round_half_away(-2.5_f64).unwrap(), BigInt::from(-3));
        assert_eq!(round_half_away(f64::INFINITY), Err(FibError::NotFinite));
        assert_eq!(round_half_away(f64::NAN), Err(FibError::NotFinite));

        let c = GoldenConstants::<f64>::new();
        let x = c.phi.powi(11) / c.sqrt5;
        assert!((x - 88.99775).abs() < 1e-4);
        assert_eq!(round_half_away(x).unwrap(), BigInt::from(89));
    }

    #[test]
    fn round_half_away_is_exact_for_large_integral_floats() {
        let x = 2f64.powi(80) + 2f64.powi(30);
        let expected = (BigInt::one() << 80u32) + (BigInt::one() << 30u32);
        assert_eq!(round_half_away(x).unwrap(), expected);
        assert_eq!(round_half_away(-x).unwrap(), -expected);
    }

    #[test]
    fn golden_constants() {
        let c64 = GoldenConstants::<f64>::new();
        assert!((c64.phi - 1.618033988749895).abs() < 1e-15);
        assert!((c64.psi + 0.6180339887498949).abs() < 1e-15);
        assert!((c64.phi * c64.psi + 1.0).abs() < 1e-15);
        let c32 = GoldenConstants::<f32>::new();
        assert!((c32.phi - 1.618034).abs() < 1e-6);
    }
}
