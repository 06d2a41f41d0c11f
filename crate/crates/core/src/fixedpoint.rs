//! b-bit fixed-point arithmetic for on-the-fly interaction phases.
//!
//! A [`FixedPointValue`] represents `mantissa · 2^(scale − bits)` with
//! `mantissa < 2^bits`. The online propagators use it to model the finite
//! precision of the coherent arithmetic that computes `1/d(p, q)` before the
//! phase is kicked back onto the state. The scratch register itself is never
//! simulated: the computed angle is applied directly and uncomputation is
//! implicit.

use crate::lattice::LatticeSpec;
use crate::{Error, Result};

/// Largest supported bit count; mantissas stay exactly representable in `f64`.
pub const MAX_BITS: u32 = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointValue {
    bits: u32,
    mantissa: u64,
    scale: i32,
}

impl FixedPointValue {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> u64 {
        self.mantissa
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    /// Size of one unit in the last place.
    pub fn ulp(&self) -> f64 {
        pow2(self.scale - self.bits as i32)
    }

    pub fn value(&self) -> f64 {
        self.mantissa as f64 * self.ulp()
    }
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidArgument(format!(
            "bit count must be in 1..={MAX_BITS}, got {bits}"
        )));
    }
    Ok(())
}

/// Rounds `x ≥ 0` to the nearest multiple of `2^(scale − bits)`, ties to even.
pub fn quantize_with_scale(x: f64, bits: u32, scale: i32) -> Result<FixedPointValue> {
    check_bits(bits)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("cannot quantize {x}")));
    }
    let scaled = x * pow2(bits as i32 - scale);
    let mantissa = scaled.round_ties_even();
    if mantissa >= pow2(bits as i32) {
        return Err(Error::InvalidArgument(format!(
            "{x} does not fit in {bits} bits at scale {scale}"
        )));
    }
    Ok(FixedPointValue {
        bits,
        mantissa: mantissa as u64,
        scale,
    })
}

/// Rounds `x ≥ 0` to `bits` bits using the smallest nonnegative scale whose
/// range holds the rounded value. Values below one get `bits` fractional bits.
pub fn quantize(x: f64, bits: u32) -> Result<FixedPointValue> {
    check_bits(bits)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("cannot quantize {x}")));
    }
    let mut scale = 0i32;
    while x >= pow2(scale) {
        scale += 1;
    }
    match quantize_with_scale(x, bits, scale) {
        Ok(v) => Ok(v),
        // rounding carried into the next binade
        Err(_) => quantize_with_scale(x, bits, scale + 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvSqrt {
    pub value: FixedPointValue,
    pub iterations: u32,
}

/// Seeds for `1/√m` on the four sub-intervals of `m ∈ [1, 4)` selected by the
/// top two bits of the normalized operand. Each seed is `2/(√lo + √hi)`,
/// which bounds the relative seed error by 0.1.
const SEED_TABLE: [(f64, f64); 4] = [(1.0, 1.5), (1.5, 2.0), (2.0, 3.0), (3.0, 4.0)];

fn seed(m: f64) -> f64 {
    let slot = if m < 2.0 {
        usize::from(m >= 1.5)
    } else {
        2 + usize::from(m >= 3.0)
    };
    let (lo, hi) = SEED_TABLE[slot];
    2.0 / (lo.sqrt() + hi.sqrt())
}

/// Upper bound on Newton-Raphson iterations for `bits` of precision.
pub fn inv_sqrt_iteration_cap(bits: u32) -> u32 {
    (bits as f64).log2().ceil() as u32 + 2
}

/// `1/√x` by Newton-Raphson, `y ← y(3 − x y²)/2`, on a `bits`-bit grid.
///
/// The operand is normalized to `m · 4^e` with `m ∈ [1, 4)` so the iterate lives
/// in `(1/2, 1]`. Every iterate is rounded to `bits` bits; iteration stops when
/// two successive rounded iterates agree. The exponent is folded back into the
/// scale, which keeps the rescaling exact.
pub fn inv_sqrt(x: f64, bits: u32) -> Result<InvSqrt> {
    check_bits(bits)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("inverse square root needs x > 0, got {x}")));
    }
    let mut e = (x.log2() / 2.0).floor() as i32;
    let mut m = x * pow2(-2 * e);
    while m >= 4.0 {
        m /= 4.0;
        e += 1;
    }
    while m < 1.0 {
        m *= 4.0;
        e -= 1;
    }

    let cap = inv_sqrt_iteration_cap(bits);
    let mut y = quantize(seed(m), bits)?;
    let mut iterations = 0;
    while iterations < cap {
        let yv = y.value();
        let next = quantize(yv * (3.0 - m * yv * yv) / 2.0, bits)?;
        iterations += 1;
        if next == y {
            break;
        }
        y = next;
    }
    Ok(InvSqrt {
        value: FixedPointValue {
            scale: y.scale - e,
            ..y
        },
        iterations,
    })
}

/// How `1/d` is formed by the coherent arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InvDistancePath {
    /// Quantize `1/d` directly; a 1D lattice needs no square root.
    #[default]
    Direct,
    /// `1/√(d²)` through Newton-Raphson.
    NewtonRaphson,
}

impl InvDistancePath {
    pub fn name(self) -> &'static str {
        match self {
            InvDistancePath::Direct => "direct",
            InvDistancePath::NewtonRaphson => "newton",
        }
    }
}

impl std::str::FromStr for InvDistancePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(InvDistancePath::Direct),
            "newton" => Ok(InvDistancePath::NewtonRaphson),
            other => Err(Error::InvalidArgument(format!("unknown inverse-distance path `{other}`"))),
        }
    }
}

/// Bit budget and arithmetic route for fixed-point interaction phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseBits {
    pub bits: u32,
    pub path: InvDistancePath,
}

impl PhaseBits {
    pub fn new(bits: u32) -> Self {
        Self {
            bits,
            path: InvDistancePath::Direct,
        }
    }

    pub fn with_path(bits: u32, path: InvDistancePath) -> Self {
        Self { bits, path }
    }
}

/// `bits`-bit approximation of `1/distance(p, q)`.
pub fn inv_distance(
    spec: &LatticeSpec,
    p: usize,
    q: usize,
    bits: u32,
    path: InvDistancePath,
) -> Result<FixedPointValue> {
    if p == q {
        return Err(Error::InvalidArgument(format!("inverse distance of a site to itself ({p})")));
    }
    let d = spec.distance(p, q)?;
    match path {
        InvDistancePath::Direct => quantize(1.0 / d, bits),
        InvDistancePath::NewtonRaphson => Ok(inv_sqrt(d * d, bits)?.value),
    }
}
