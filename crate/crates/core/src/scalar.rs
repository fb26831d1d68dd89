//! Scalar abstractions.
//!
//! Every numerical routine in this crate is generic over a [`Real`] precision
//! (`f32` or `f64`) and, where coefficients live in 𝕂 = ℝ or ℂ, over a
//! [`Scalar`] which is either a real float or a `Complex` of one.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// The scalar field 𝕂 a form or constant lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }
}

impl Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScalarField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(ScalarField::Real),
            "complex" | "c" => Ok(ScalarField::Complex),
            other => Err(format!("unknown scalar field `{other}` (expected real|complex)")),
        }
    }
}

/// Floating point precision used for norms, exponents and constants.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient type of a multilinear form: a real float or a complex number
/// over one.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Default
    + Zero
    + One
    + Send
    + Sync
    + 'static
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::AddAssign
    + Sum
{
    type Real: Real;

    const FIELD: ScalarField;

    fn from_real(r: Self::Real) -> Self;
    /// Builds a scalar from a real and an imaginary part. Real scalars reject
    /// a nonzero imaginary part by returning `None`.
    fn from_parts(re: Self::Real, im: Self::Real) -> Option<Self>;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    /// |x|.
    fn modulus(self) -> Self::Real;
    fn conj(self) -> Self;
    /// x/|x|, with 1 for x = 0.
    fn phase(self) -> Self;
    fn scale(self, r: Self::Real) -> Self;
    fn is_finite(self) -> bool;

    /// Standard normal in ℝ, standard circular normal in ℂ (E|z|² = 1).
    fn sample_gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self;
    /// Uniform on the unit sphere of 𝕂: ±1 in ℝ, the unit circle in ℂ.
    fn sample_unimodular<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

macro_rules! impl_real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;

            const FIELD: ScalarField = ScalarField::Real;

            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            fn from_parts(re: $t, im: $t) -> Option<Self> {
                (im == 0.0).then_some(re)
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn phase(self) -> Self {
                if self < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            fn sample_gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self {
                StandardNormal.sample(rng)
            }
            fn sample_unimodular<G: Rng + ?Sized>(rng: &mut G) -> Self {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    };
}

impl_real_scalar!(f32);
impl_real_scalar!(f64);

impl<R> Scalar for Complex<R>
where
    R: Real,
    StandardNormal: Distribution<R>,
{
    type Real = R;

    const FIELD: ScalarField = ScalarField::Complex;

    #[inline]
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    fn from_parts(re: R, im: R) -> Option<Self> {
        Some(Complex::new(re, im))
    }
    #[inline]
    fn re(self) -> R {
        self.re
    }
    #[inline]
    fn im(self) -> R {
        self.im
    }
    #[inline]
    fn modulus(self) -> R {
        self.norm()
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == R::zero() {
            Complex::new(R::one(), R::zero())
        } else {
            self.unscale(r)
        }
    }
    #[inline]
    fn scale(self, r: R) -> Self {
        Complex::scale(&self, r)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn sample_gaussian<G: Rng + ?Sized>(rng: &mut G) -> Self {
        let h = R::FRAC_1_SQRT_2();
        let re: R = StandardNormal.sample(rng);
        let im: R = StandardNormal.sample(rng);
        Complex::new(re * h, im * h)
    }
    fn sample_unimodular<G: Rng + ?Sized>(rng: &mut G) -> Self {
        let theta = R::lit(rng.random::<f64>()) * R::TAU();
        Complex::new(theta.cos(), theta.sin())
    }
}

/// ℓ_r norm of moduli, r ∈ [1, ∞].
pub fn lp_norm<S: Scalar>(v: &[S], r: S::Real) -> S::Real {
    if r.is_infinite() {
        v.iter().map(|x| x.modulus()).fold(S::Real::zero(), S::Real::max)
    } else if r == S::Real::one() {
        v.iter().map(|x| x.modulus()).sum()
    } else {
        let scale = v.iter().map(|x| x.modulus()).fold(S::Real::zero(), S::Real::max);
        if scale == S::Real::zero() {
            return scale;
        }
        // Rescaled to keep |x|^r in range for large r.
        let acc: S::Real = v.iter().map(|x| (x.modulus() / scale).powf(r)).sum();
        scale * acc.powf(r.recip())
    }
}

/// Dual exponent r' = r/(r−1), with 1' = ∞ and ∞' = 1.
pub fn conjugate_exponent<R: Real>(r: R) -> R {
    if r.is_infinite() {
        R::one()
    } else if r == R::one() {
        R::infinity()
    } else {
        r / (r - R::one())
    }
}
