//! High-precision binary floating point for logarithms and square roots.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub type HpFloat = FBig<HalfEven, 2>;

/// Working precision in bits (about 77 decimal digits).
pub const PRECISION: usize = 256;

pub fn from_u128(n: u128) -> HpFloat {
    HpFloat::from(n).with_precision(PRECISION).value()
}

pub fn from_i128(n: i128) -> HpFloat {
    HpFloat::from(n).with_precision(PRECISION).value()
}

pub fn ratio(num: u128, den: u128) -> HpFloat {
    from_u128(num) / from_u128(den)
}

/// Exact conversion of an arbitrary-size non-negative integer.
pub fn from_biguint(n: &num_bigint::BigUint) -> HpFloat {
    let base = from_u128(1u128 << 64);
    n.to_u64_digits()
        .iter()
        .rev()
        .fold(zero(), |acc, &limb| acc * base.clone() + from_u128(u128::from(limb)))
}

/// A non-negative big rational as a high-precision float.
pub fn from_bigrational(r: &num_rational::BigRational) -> HpFloat {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let v = from_biguint(num) / from_biguint(den);
    if r.numer().sign() == num_bigint::Sign::Minus {
        -v
    } else {
        v
    }
}

pub fn ln_u128(n: u128) -> HpFloat {
    from_u128(n).ln()
}

pub fn ln2() -> HpFloat {
    ln_u128(2)
}

pub fn zero() -> HpFloat {
    from_u128(0)
}

pub fn to_f64(x: &HpFloat) -> f64 {
    x.to_f64().value()
}

/// `⌈x⌉` for a non-negative value that fits in `u64`.
pub fn ceil_u64(x: &HpFloat) -> u64 {
    let c = x.ceil().to_int().value();
    u64::try_from(c).expect("ceiling fits in u64")
}
