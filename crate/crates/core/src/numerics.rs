//! Bit-exact software emulation of the accelerator's number formats.
//!
//! Five hardware formats are modeled: two IEEE binary floating-point widths
//! (FP16, FP32) and three fixed-point widths (FX16, FX24, FX32) laid out as
//! 1 sign bit, 1 integer bit, and the remaining bits of fraction, covering
//! [-2, 2). A sixth [`Reference`](NumberFormat::Reference) format is the
//! host's `f64` and serves as the accuracy baseline.
//!
//! Every arithmetic primitive computes the exact real result and re-rounds
//! it to the operand format, so a circuit executed at a given format sees
//! exactly one rounding per hardware operation. Fixed-point overflow
//! saturates; it never wraps.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Rounding applied when a value is re-quantized to a format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Rounding {
    /// Round to nearest, ties to even (the default for both FX and FP).
    #[default]
    NearestEven,
    /// Drop the extra bits of the double-precision intermediate: toward
    /// minus infinity for fixed point (two's-complement bit truncation),
    /// toward zero for floating point (sign-magnitude bit truncation).
    Truncate,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericsError {
    #[error("NaN cannot be quantized to fixed-point format {0}")]
    NanToFixedPoint(NumberFormat),
}

/// Whether a format stores a scaled integer or a packed float.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatKind {
    FloatingPoint,
    FixedPoint,
    Reference,
}

/// One of the emulator's numeric formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumberFormat {
    Fp16,
    Fp32,
    Fx16,
    Fx24,
    Fx32,
    /// Host double precision; the oracle the hardware formats are judged
    /// against. Arithmetic in this format is exactly host `f64` arithmetic.
    Reference,
}

impl NumberFormat {
    /// All formats, Reference last.
    pub const ALL: [NumberFormat; 6] = [
        NumberFormat::Fp16,
        NumberFormat::Fp32,
        NumberFormat::Fx16,
        NumberFormat::Fx24,
        NumberFormat::Fx32,
        NumberFormat::Reference,
    ];

    /// The five formats implemented by the hardware.
    pub const HARDWARE: [NumberFormat; 5] = [
        NumberFormat::Fp16,
        NumberFormat::Fp32,
        NumberFormat::Fx16,
        NumberFormat::Fx24,
        NumberFormat::Fx32,
    ];

    pub fn kind(self) -> FormatKind {
        match self {
            NumberFormat::Fp16 | NumberFormat::Fp32 => FormatKind::FloatingPoint,
            NumberFormat::Fx16 | NumberFormat::Fx24 | NumberFormat::Fx32 => FormatKind::FixedPoint,
            NumberFormat::Reference => FormatKind::Reference,
        }
    }

    pub fn is_fixed_point(self) -> bool {
        self.kind() == FormatKind::FixedPoint
    }

    pub fn total_bits(self) -> u32 {
        match self {
            NumberFormat::Fp16 | NumberFormat::Fx16 => 16,
            NumberFormat::Fx24 => 24,
            NumberFormat::Fp32 | NumberFormat::Fx32 => 32,
            NumberFormat::Reference => 64,
        }
    }

    /// Fractional bits of a fixed-point format (1 sign + 1 integer + f fraction).
    pub fn fraction_bits(self) -> Option<u32> {
        match self {
            NumberFormat::Fx16 => Some(14),
            NumberFormat::Fx24 => Some(22),
            NumberFormat::Fx32 => Some(30),
            _ => None,
        }
    }

    pub fn exponent_bits(self) -> Option<u32> {
        match self {
            NumberFormat::Fp16 => Some(5),
            NumberFormat::Fp32 => Some(8),
            NumberFormat::Reference => Some(11),
            _ => None,
        }
    }

    pub fn mantissa_bits(self) -> Option<u32> {
        match self {
            NumberFormat::Fp16 => Some(10),
            NumberFormat::Fp32 => Some(23),
            NumberFormat::Reference => Some(52),
            _ => None,
        }
    }

    /// Quantization step of a fixed-point format (one fractional ulp).
    pub fn quantization_step(self) -> Option<f64> {
        self.fraction_bits().map(|f| exp2i(-(f as i32)))
    }

    /// Largest qubit count the hardware buffers hold at this width:
    /// 18 for the 16-bit formats, 17 otherwise.
    pub fn qubit_cap(self) -> u32 {
        if self.total_bits() == 16 {
            18
        } else {
            17
        }
    }

    /// Nearest representable value under the given rounding mode.
    /// Fixed-point inputs outside [-2, 2) saturate to the format extremes.
    pub fn quantize_with(self, x: f64, rounding: Rounding) -> Result<Scalar, NumericsError> {
        match self {
            NumberFormat::Reference => Ok(Scalar::Reference(x.to_bits())),
            NumberFormat::Fp16 => Ok(Scalar::Fp16(f64_to_packed(x, FP16_LAYOUT, rounding) as u16)),
            NumberFormat::Fp32 => Ok(Scalar::Fp32(f64_to_packed(x, FP32_LAYOUT, rounding) as u32)),
            NumberFormat::Fx16 => Ok(Scalar::Fx16(fx_quantize(x, self, rounding)? as i16)),
            NumberFormat::Fx24 => Ok(Scalar::Fx24(fx_quantize(x, self, rounding)? as i32)),
            NumberFormat::Fx32 => Ok(Scalar::Fx32(fx_quantize(x, self, rounding)? as i32)),
        }
    }

    /// [`quantize_with`](Self::quantize_with) under round-to-nearest-even.
    pub fn quantize(self, x: f64) -> Result<Scalar, NumericsError> {
        self.quantize_with(x, Rounding::NearestEven)
    }

    pub fn zero(self) -> Scalar {
        match self {
            NumberFormat::Fp16 => Scalar::Fp16(0),
            NumberFormat::Fp32 => Scalar::Fp32(0),
            NumberFormat::Fx16 => Scalar::Fx16(0),
            NumberFormat::Fx24 => Scalar::Fx24(0),
            NumberFormat::Fx32 => Scalar::Fx32(0),
            NumberFormat::Reference => Scalar::Reference(0),
        }
    }

    /// 1.0, exactly representable in every format.
    pub fn one(self) -> Scalar {
        self.quantize(1.0).expect("1.0 is finite")
    }

    /// Reconstruct a scalar from its canonical raw bit pattern.
    pub fn scalar_from_bits(self, bits: u64) -> Scalar {
        match self {
            NumberFormat::Fp16 => Scalar::Fp16(bits as u16),
            NumberFormat::Fp32 => Scalar::Fp32(bits as u32),
            NumberFormat::Fx16 => Scalar::Fx16(bits as u16 as i16),
            NumberFormat::Fx24 => {
                // sign-extend the 24-bit pattern
                Scalar::Fx24((((bits as u32) & 0x00ff_ffff) << 8) as i32 >> 8)
            }
            NumberFormat::Fx32 => Scalar::Fx32(bits as u32 as i32),
            NumberFormat::Reference => Scalar::Reference(bits),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NumberFormat::Fp16 => "fp16",
            NumberFormat::Fp32 => "fp32",
            NumberFormat::Fx16 => "fx16",
            NumberFormat::Fx24 => "fx24",
            NumberFormat::Fx32 => "fx32",
            NumberFormat::Reference => "ref",
        }
    }
}

impl fmt::Display for NumberFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NumberFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fp16" => Ok(NumberFormat::Fp16),
            "fp32" => Ok(NumberFormat::Fp32),
            "fx16" => Ok(NumberFormat::Fx16),
            "fx24" => Ok(NumberFormat::Fx24),
            "fx32" => Ok(NumberFormat::Fx32),
            "ref" | "reference" | "fp64" => Ok(NumberFormat::Reference),
            other => Err(format!(
                "unknown number format `{other}` (expected fp16, fp32, fx16, fx24, fx32 or ref)"
            )),
        }
    }
}

/// A value in one of the emulator formats, stored as its exact bit pattern.
/// Equality is bit equality between same-format scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp16(u16),
    Fp32(u32),
    /// 16-bit integer scaled by 2^-14.
    Fx16(i16),
    /// Sign-extended 24-bit integer scaled by 2^-22, carried in an i32.
    Fx24(i32),
    /// 32-bit integer scaled by 2^-30.
    Fx32(i32),
    Reference(u64),
}

impl Scalar {
    pub fn format(self) -> NumberFormat {
        match self {
            Scalar::Fp16(_) => NumberFormat::Fp16,
            Scalar::Fp32(_) => NumberFormat::Fp32,
            Scalar::Fx16(_) => NumberFormat::Fx16,
            Scalar::Fx24(_) => NumberFormat::Fx24,
            Scalar::Fx32(_) => NumberFormat::Fx32,
            Scalar::Reference(_) => NumberFormat::Reference,
        }
    }

    /// Exact widening to host double; every format value is representable.
    #[inline]
    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Fp16(b) => packed_to_f64(b as u64, FP16_LAYOUT),
            Scalar::Fp32(b) => f32::from_bits(b) as f64,
            Scalar::Fx16(v) => v as f64 * exp2i(-14),
            Scalar::Fx24(v) => v as f64 * exp2i(-22),
            Scalar::Fx32(v) => v as f64 * exp2i(-30),
            Scalar::Reference(b) => f64::from_bits(b),
        }
    }

    /// Canonical raw pattern in the low `total_bits` of the result.
    pub fn bits(self) -> u64 {
        match self {
            Scalar::Fp16(b) => b as u64,
            Scalar::Fp32(b) => b as u64,
            Scalar::Fx16(v) => v as u16 as u64,
            Scalar::Fx24(v) => (v as u32 & 0x00ff_ffff) as u64,
            Scalar::Fx32(v) => v as u32 as u64,
            Scalar::Reference(b) => b,
        }
    }

    pub fn is_zero(self) -> bool {
        self.bits() == 0
    }
}

/// Exact product, re-rounded once to the shared format.
#[inline]
pub fn mul(a: Scalar, b: Scalar, rounding: Rounding) -> Scalar {
    match (a, b) {
        (Scalar::Reference(x), Scalar::Reference(y)) => {
            Scalar::Reference((f64::from_bits(x) * f64::from_bits(y)).to_bits())
        }
        (Scalar::Fp32(x), Scalar::Fp32(y)) => {
            // The f64 product of two binary32 values is exact (48 < 53 bits),
            // so the narrowing below is the only rounding.
            let z = f32::from_bits(x) as f64 * f32::from_bits(y) as f64;
            Scalar::Fp32(f64_to_packed(z, FP32_LAYOUT, rounding) as u32)
        }
        (Scalar::Fp16(x), Scalar::Fp16(y)) => {
            let z = packed_to_f64(x as u64, FP16_LAYOUT) * packed_to_f64(y as u64, FP16_LAYOUT);
            Scalar::Fp16(f64_to_packed(z, FP16_LAYOUT, rounding) as u16)
        }
        (Scalar::Fx16(x), Scalar::Fx16(y)) => {
            Scalar::Fx16(fx_mul(x as i64, y as i64, 14, 16, rounding) as i16)
        }
        (Scalar::Fx24(x), Scalar::Fx24(y)) => {
            Scalar::Fx24(fx_mul(x as i64, y as i64, 22, 24, rounding) as i32)
        }
        (Scalar::Fx32(x), Scalar::Fx32(y)) => {
            Scalar::Fx32(fx_mul(x as i64, y as i64, 30, 32, rounding) as i32)
        }
        _ => panic!("format mismatch: {:?} * {:?}", a.format(), b.format()),
    }
}

/// Exact sum, re-rounded to the shared format. Fixed-point addition is exact
/// up to saturation; only the floating-point formats round here.
#[inline]
pub fn add(a: Scalar, b: Scalar, rounding: Rounding) -> Scalar {
    match (a, b) {
        (Scalar::Reference(x), Scalar::Reference(y)) => {
            Scalar::Reference((f64::from_bits(x) + f64::from_bits(y)).to_bits())
        }
        (Scalar::Fp32(x), Scalar::Fp32(y)) => {
            let z = f32::from_bits(x) as f64 + f32::from_bits(y) as f64;
            Scalar::Fp32(f64_to_packed(z, FP32_LAYOUT, rounding) as u32)
        }
        (Scalar::Fp16(x), Scalar::Fp16(y)) => {
            let z = packed_to_f64(x as u64, FP16_LAYOUT) + packed_to_f64(y as u64, FP16_LAYOUT);
            Scalar::Fp16(f64_to_packed(z, FP16_LAYOUT, rounding) as u16)
        }
        (Scalar::Fx16(x), Scalar::Fx16(y)) => {
            Scalar::Fx16(fx_saturate(x as i64 + y as i64, 16) as i16)
        }
        (Scalar::Fx24(x), Scalar::Fx24(y)) => {
            Scalar::Fx24(fx_saturate(x as i64 + y as i64, 24) as i32)
        }
        (Scalar::Fx32(x), Scalar::Fx32(y)) => {
            Scalar::Fx32(fx_saturate(x as i64 + y as i64, 32) as i32)
        }
        _ => panic!("format mismatch: {:?} + {:?}", a.format(), b.format()),
    }
}

/// Exact difference, re-rounded to the shared format.
#[inline]
pub fn sub(a: Scalar, b: Scalar, rounding: Rounding) -> Scalar {
    match (a, b) {
        (Scalar::Reference(x), Scalar::Reference(y)) => {
            Scalar::Reference((f64::from_bits(x) - f64::from_bits(y)).to_bits())
        }
        (Scalar::Fp32(x), Scalar::Fp32(y)) => {
            let z = f32::from_bits(x) as f64 - f32::from_bits(y) as f64;
            Scalar::Fp32(f64_to_packed(z, FP32_LAYOUT, rounding) as u32)
        }
        (Scalar::Fp16(x), Scalar::Fp16(y)) => {
            let z = packed_to_f64(x as u64, FP16_LAYOUT) - packed_to_f64(y as u64, FP16_LAYOUT);
            Scalar::Fp16(f64_to_packed(z, FP16_LAYOUT, rounding) as u16)
        }
        (Scalar::Fx16(x), Scalar::Fx16(y)) => {
            Scalar::Fx16(fx_saturate(x as i64 - y as i64, 16) as i16)
        }
        (Scalar::Fx24(x), Scalar::Fx24(y)) => {
            Scalar::Fx24(fx_saturate(x as i64 - y as i64, 24) as i32)
        }
        (Scalar::Fx32(x), Scalar::Fx32(y)) => {
            Scalar::Fx32(fx_saturate(x as i64 - y as i64, 32) as i32)
        }
        _ => panic!("format mismatch: {:?} - {:?}", a.format(), b.format()),
    }
}

/// Exact negation (saturating at the fixed-point minimum).
#[inline]
pub fn neg(a: Scalar) -> Scalar {
    match a {
        Scalar::Reference(x) => Scalar::Reference((-f64::from_bits(x)).to_bits()),
        Scalar::Fp32(x) => Scalar::Fp32(x ^ 0x8000_0000),
        Scalar::Fp16(x) => Scalar::Fp16(x ^ 0x8000),
        Scalar::Fx16(x) => Scalar::Fx16(fx_saturate(-(x as i64), 16) as i16),
        Scalar::Fx24(x) => Scalar::Fx24(fx_saturate(-(x as i64), 24) as i32),
        Scalar::Fx32(x) => Scalar::Fx32(fx_saturate(-(x as i64), 32) as i32),
    }
}

/// A complex amplitude stored as a (real, imaginary) scalar pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl ComplexScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        debug_assert_eq!(re.format(), im.format());
        ComplexScalar { re, im }
    }

    pub fn zero(format: NumberFormat) -> Self {
        ComplexScalar {
            re: format.zero(),
            im: format.zero(),
        }
    }

    pub fn format(self) -> NumberFormat {
        self.re.format()
    }

    pub fn to_complex64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// |z|^2 accumulated at Reference precision.
    pub fn prob(self) -> f64 {
        let re = self.re.to_f64();
        let im = self.im.to_f64();
        re * re + im * im
    }

    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// Complex product with the fixed evaluation order
/// (ac, bd, ad, bc; then ac - bd, ad + bc), each step rounded independently,
/// so results are bit-reproducible across runs and platforms.
#[inline]
pub fn cmul(a: ComplexScalar, b: ComplexScalar, rounding: Rounding) -> ComplexScalar {
    let ac = mul(a.re, b.re, rounding);
    let bd = mul(a.im, b.im, rounding);
    let ad = mul(a.re, b.im, rounding);
    let bc = mul(a.im, b.re, rounding);
    ComplexScalar {
        re: sub(ac, bd, rounding),
        im: add(ad, bc, rounding),
    }
}

/// Componentwise complex addition.
#[inline]
pub fn cadd(a: ComplexScalar, b: ComplexScalar, rounding: Rounding) -> ComplexScalar {
    ComplexScalar {
        re: add(a.re, b.re, rounding),
        im: add(a.im, b.im, rounding),
    }
}

// ---------------------------------------------------------------------------
// fixed-point internals

#[inline]
fn fx_limits(total_bits: u32) -> (i64, i64) {
    let max = (1i64 << (total_bits - 1)) - 1;
    (-max - 1, max)
}

#[inline]
fn fx_saturate(v: i64, total_bits: u32) -> i64 {
    let (min, max) = fx_limits(total_bits);
    v.clamp(min, max)
}

/// Round `v / 2^k` to an integer under the given mode. Truncation is the
/// two's-complement arithmetic shift.
#[inline]
fn fx_shift_round(v: i64, k: u32, rounding: Rounding) -> i64 {
    match rounding {
        Rounding::Truncate => v >> k,
        Rounding::NearestEven => {
            let floor = v >> k;
            let rem = v - (floor << k);
            let half = 1i64 << (k - 1);
            if rem > half {
                floor + 1
            } else if rem < half {
                floor
            } else {
                floor + (floor & 1)
            }
        }
    }
}

#[inline]
fn fx_mul(a: i64, b: i64, fraction_bits: u32, total_bits: u32, rounding: Rounding) -> i64 {
    // |a|, |b| <= 2^31 so the wide product fits an i64 exactly.
    fx_saturate(fx_shift_round(a * b, fraction_bits, rounding), total_bits)
}

fn fx_quantize(x: f64, format: NumberFormat, rounding: Rounding) -> Result<i64, NumericsError> {
    if x.is_nan() {
        return Err(NumericsError::NanToFixedPoint(format));
    }
    let fraction_bits = format.fraction_bits().expect("fixed-point format");
    let (min, max) = fx_limits(format.total_bits());
    // Power-of-two scaling is exact; infinities fall to the clamp below.
    let scaled = x * exp2i(fraction_bits as i32);
    let rounded = match rounding {
        Rounding::NearestEven => scaled.round_ties_even(),
        Rounding::Truncate => scaled.floor(),
    };
    Ok(rounded.clamp(min as f64, max as f64) as i64)
}

// ---------------------------------------------------------------------------
// packed floating-point internals

#[derive(Clone, Copy)]
struct FpLayout {
    exp_bits: u32,
    man_bits: u32,
}

const FP16_LAYOUT: FpLayout = FpLayout {
    exp_bits: 5,
    man_bits: 10,
};
const FP32_LAYOUT: FpLayout = FpLayout {
    exp_bits: 8,
    man_bits: 23,
};

impl FpLayout {
    #[inline]
    fn bias(self) -> i32 {
        (1 << (self.exp_bits - 1)) - 1
    }

    #[inline]
    fn exp_field_mask(self) -> u64 {
        ((1u64 << self.exp_bits) - 1) << self.man_bits
    }

    #[inline]
    fn man_field_mask(self) -> u64 {
        (1u64 << self.man_bits) - 1
    }

    /// Canonical quiet NaN: exponent all ones, top mantissa bit set, sign 0.
    #[inline]
    fn quiet_nan(self) -> u64 {
        self.exp_field_mask() | (1u64 << (self.man_bits - 1))
    }

    #[inline]
    fn max_finite(self) -> u64 {
        (self.exp_field_mask() - (1 << self.man_bits)) | self.man_field_mask()
    }
}

/// 2^k as f64 for k in the normal exponent range.
#[inline]
fn exp2i(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

#[inline]
fn round_unsigned(v: f64, rounding: Rounding) -> u64 {
    match rounding {
        Rounding::NearestEven => v.round_ties_even() as u64,
        Rounding::Truncate => v.trunc() as u64,
    }
}

/// Narrow a host double to a packed small float. NaNs collapse to the
/// canonical quiet NaN so results stay bit-deterministic across hosts.
fn f64_to_packed(x: f64, layout: FpLayout, rounding: Rounding) -> u64 {
    let sign = if x.is_sign_negative() {
        1u64 << (layout.exp_bits + layout.man_bits)
    } else {
        0
    };
    if x.is_nan() {
        return layout.quiet_nan();
    }
    if x.is_infinite() {
        return sign | layout.exp_field_mask();
    }
    let ax = x.abs();
    if ax == 0.0 {
        return sign;
    }
    let emin = 1 - layout.bias();
    if ax < exp2i(emin) {
        // Subnormal range: after scaling, one ulp of the target equals 1.
        // r == 2^man_bits rolls over into the minimum normal encoding.
        let scaled = ax * exp2i(layout.man_bits as i32 - emin);
        return sign | round_unsigned(scaled, rounding);
    }
    // ax >= the target's minimum normal, so it is a normal f64 and the
    // exponent can be read straight from the bits.
    let mut e = ((ax.to_bits() >> 52) & 0x7ff) as i32 - 1023;
    let scaled = ax * exp2i(layout.man_bits as i32 - e);
    let mut r = round_unsigned(scaled, rounding);
    if r == 1u64 << (layout.man_bits + 1) {
        r >>= 1;
        e += 1;
    }
    if e > layout.bias() {
        return match rounding {
            Rounding::NearestEven => sign | layout.exp_field_mask(),
            Rounding::Truncate => sign | layout.max_finite(),
        };
    }
    sign | (((e + layout.bias()) as u64) << layout.man_bits) | (r & layout.man_field_mask())
}

/// Exact widening of a packed small float to host double.
fn packed_to_f64(bits: u64, layout: FpLayout) -> f64 {
    let sign = if bits >> (layout.exp_bits + layout.man_bits) & 1 == 1 {
        -1.0
    } else {
        1.0
    };
    let e = (bits >> layout.man_bits) & ((1 << layout.exp_bits) - 1);
    let m = bits & layout.man_field_mask();
    if e == (1 << layout.exp_bits) - 1 {
        return if m == 0 { sign * f64::INFINITY } else { f64::NAN };
    }
    if e == 0 {
        sign * m as f64 * exp2i(1 - layout.bias() - layout.man_bits as i32)
    } else {
        sign * (m + (1 << layout.man_bits)) as f64
            * exp2i(e as i32 - layout.bias() - layout.man_bits as i32)
    }
}
