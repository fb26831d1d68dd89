//! Dense coefficient tensors of m-linear forms on 𝕂ⁿ × ⋯ × 𝕂ⁿ.
//!
//! Coefficients are stored flat in row-major order: the first slot j₁ is the
//! slowest index and the last slot j_m the fastest, so
//! `coeffs[j₁·n^{m−1} + ⋯ + j_m] = T(e_{j₁}, …, e_{j_m})`. Slot indices are
//! 0-based throughout the library.

use num_complex::Complex64;
use num_traits::{Float, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar, ScalarField};
use crate::seed::rng_from_seed;

/// Default cap on n^m for generated tensors.
pub const DEFAULT_ENTRY_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FormTensor<S> {
    m: usize,
    n: usize,
    coeffs: Vec<S>,
}

/// n^m, or `None` on overflow.
pub fn entry_count(m: usize, n: usize) -> Option<usize> {
    let mut acc = 1usize;
    for _ in 0..m {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}

impl<S: Scalar> FormTensor<S> {
    pub fn new(m: usize, n: usize, coeffs: Vec<S>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!("need m, n >= 1, got m = {m}, n = {n}")));
        }
        let len = entry_count(m, n).ok_or_else(|| Error::Domain(format!("n^m overflows for n = {n}, m = {m}")))?;
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: coeffs.len(),
            });
        }
        if let Some(pos) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("coefficient {pos} is not finite")));
        }
        Ok(FormTensor { m, n, coeffs })
    }

    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        let len = entry_count(m, n).ok_or_else(|| Error::Domain(format!("n^m overflows for n = {n}, m = {m}")))?;
        Self::new(m, n, vec![S::zero(); len])
    }

    /// Builds a tensor from a function of the multi-index.
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        let len = entry_count(m, n).ok_or_else(|| Error::Domain(format!("n^m overflows for n = {n}, m = {m}")))?;
        let mut idx = vec![0usize; m];
        let mut coeffs = Vec::with_capacity(len);
        for flat in 0..len {
            decode_index(flat, n, &mut idx);
            coeffs.push(f(&idx));
        }
        Self::new(m, n, coeffs)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn field(&self) -> ScalarField {
        S::FIELD
    }

    #[inline]
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.m);
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.coeffs[self.flat_index(idx)]
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        FormTensor {
            m: self.m,
            n: self.n,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn scaled(&self, c: S) -> Self {
        self.map(|x| x * c)
    }

    /// Largest coefficient modulus.
    pub fn max_modulus(&self) -> S::Real {
        self.coeffs
            .iter()
            .map(|c| c.modulus())
            .fold(S::Real::zero(), S::Real::max)
    }

    /// Exchanges slots `a` and `b`.
    pub fn swap_axes(&self, a: usize, b: usize) -> Self {
        assert!(a < self.m && b < self.m, "axis out of range");
        if a == b {
            return self.clone();
        }
        let mut idx = vec![0usize; self.m];
        let mut out = vec![S::zero(); self.coeffs.len()];
        for (flat, &c) in self.coeffs.iter().enumerate() {
            decode_index(flat, self.n, &mut idx);
            idx.swap(a, b);
            out[self.flat_index(&idx)] = c;
        }
        FormTensor {
            m: self.m,
            n: self.n,
            coeffs: out,
        }
    }

    fn check_vector(&self, x: &[S]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// T(x₁, …, x_m) = Σ_J coeff[J] x₁[j₁] ⋯ x_m[j_m].
    pub fn evaluate(&self, xs: &[&[S]]) -> Result<S> {
        if xs.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: xs.len(),
            });
        }
        for x in xs {
            self.check_vector(x)?;
        }
        let mut data = contract_last(&self.coeffs, self.n, xs[self.m - 1]);
        for x in xs[..self.m - 1].iter().rev() {
            data = contract_last(&data, self.n, x);
        }
        Ok(data[0])
    }

    /// The linear functional left in slot `k` after fixing every other slot:
    /// c_j = T(x₁, …, e_j, …, x_m). Entry `k` of `xs` is ignored.
    pub fn partial_contraction(&self, k: usize, xs: &[&[S]]) -> Result<Vec<S>> {
        if k >= self.m || xs.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: xs.len(),
            });
        }
        for (l, x) in xs.iter().enumerate() {
            if l != k {
                self.check_vector(x)?;
            }
        }
        let mut data = self.coeffs.clone();
        for x in xs[k + 1..].iter().rev() {
            data = contract_last(&data, self.n, x);
        }
        for x in &xs[..k] {
            data = contract_first(&data, self.n, x);
        }
        debug_assert_eq!(data.len(), self.n);
        Ok(data)
    }

    /// Mixed (s, α) norm with slot `spec.fixed_index` outermost:
    /// (Σ_{j_i} (Σ_{ĵ_i} |T(e_J)|^s)^{α/s})^{1/α}.
    pub fn mixed_norm(&self, spec: &MixedNormSpec<S::Real>) -> Result<S::Real> {
        if spec.fixed_index >= self.m {
            return Err(Error::Domain(format!(
                "fixed index {} out of range for an order-{} form",
                spec.fixed_index, self.m
            )));
        }
        Ok(self.mixed_norm_unchecked(spec.fixed_index, spec.inner, spec.outer))
    }

    pub(crate) fn mixed_norm_unchecked(&self, fixed: usize, inner: S::Real, outer: S::Real) -> S::Real {
        let scale = self.max_modulus();
        if scale == S::Real::zero() {
            return scale;
        }
        let n = self.n;
        // Stride of slot `fixed` in the flat layout.
        let stride = entry_count(self.m - 1 - fixed, n).expect("fits");
        let mut sums = vec![S::Real::zero(); n];
        for (flat, c) in self.coeffs.iter().enumerate() {
            let j = (flat / stride) % n;
            sums[j] += (c.modulus() / scale).powf(inner);
        }
        let ratio = outer / inner;
        let total: S::Real = sums.iter().map(|&v| v.powf(ratio)).sum();
        scale * total.powf(outer.recip())
    }

    /// Largest mixed norm over every choice of outermost slot.
    pub fn max_mixed_norm(&self, inner: S::Real, outer: S::Real) -> S::Real {
        (0..self.m)
            .map(|i| self.mixed_norm_unchecked(i, inner, outer))
            .fold(S::Real::zero(), S::Real::max)
    }

    /// ℓ_r norm of the flattened coefficient array.
    pub fn entry_norm(&self, r: S::Real) -> S::Real {
        crate::scalar::lp_norm(&self.coeffs, r)
    }
}

/// Writes the multi-index of `flat` into `idx` (row-major, first slot
/// slowest).
pub fn decode_index(mut flat: usize, n: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// Contracts the fastest index: out[i] = Σ_j data[i·n + j]·x[j].
pub(crate) fn contract_last<S: Scalar>(data: &[S], n: usize, x: &[S]) -> Vec<S> {
    data.chunks_exact(n)
        .map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// Contracts the slowest index: out[r] = Σ_i x[i]·data[i·rest + r].
pub(crate) fn contract_first<S: Scalar>(data: &[S], n: usize, x: &[S]) -> Vec<S> {
    let rest = data.len() / n;
    let mut out = vec![S::zero(); rest];
    for (block, &xi) in data.chunks_exact(rest).zip(x) {
        for (o, &a) in out.iter_mut().zip(block) {
            *o += a * xi;
        }
    }
    out
}

/// Exponents and outer slot of a mixed norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec<R> {
    /// 0-based slot summed outermost.
    pub fixed_index: usize,
    /// Exponent of the inner sum over all slots but `fixed_index`.
    pub inner: R,
    /// Exponent of the outer sum.
    pub outer: R,
}

impl<R: Real> MixedNormSpec<R> {
    pub fn new(fixed_index: usize, inner: R, outer: R) -> Result<Self> {
        for (name, v) in [("inner", inner), ("outer", outer)] {
            if !(v >= R::one()) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "mixed-norm {name} exponent must be finite and >= 1, got {v}"
                )));
            }
        }
        Ok(MixedNormSpec {
            fixed_index,
            inner,
            outer,
        })
    }
}

/// Coefficient distributions for generated forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorKind {
    /// Independent standard normals (circular normals over ℂ).
    Gaussian,
    /// Independent ±1.
    Signs,
    /// A single coefficient equal to 1 at a random position.
    SparseUnit,
    /// Independent unimodular scalars (uniform on the circle over ℂ, ±1 over ℝ).
    Steinhaus,
}

impl TensorKind {
    pub const ALL: [TensorKind; 4] = [
        TensorKind::Gaussian,
        TensorKind::Signs,
        TensorKind::SparseUnit,
        TensorKind::Steinhaus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TensorKind::Gaussian => "gaussian",
            TensorKind::Signs => "signs",
            TensorKind::SparseUnit => "sparse_unit",
            TensorKind::Steinhaus => "steinhaus",
        }
    }
}

impl std::str::FromStr for TensorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        TensorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == key)
            .ok_or_else(|| format!("unknown tensor kind `{s}`"))
    }
}

/// Deterministic random form of the given kind.
pub fn generate<S: Scalar>(kind: TensorKind, m: usize, n: usize, seed: u64) -> Result<FormTensor<S>> {
    generate_with_budget(kind, m, n, seed, DEFAULT_ENTRY_BUDGET)
}

pub fn generate_with_budget<S: Scalar>(
    kind: TensorKind,
    m: usize,
    n: usize,
    seed: u64,
    budget: usize,
) -> Result<FormTensor<S>> {
    let len = entry_count(m, n).unwrap_or(usize::MAX);
    if len > budget {
        return Err(Error::BudgetExceeded {
            what: "tensor entries",
            needed: len as u128,
            limit: budget as u128,
        });
    }
    let mut rng = rng_from_seed(seed);
    let coeffs = match kind {
        TensorKind::Gaussian => (0..len).map(|_| S::sample_gaussian(&mut rng)).collect(),
        TensorKind::Steinhaus => (0..len).map(|_| S::sample_unimodular(&mut rng)).collect(),
        TensorKind::Signs => {
            use rand::Rng;
            (0..len)
                .map(|_| if rng.random::<bool>() { S::one() } else { -S::one() })
                .collect()
        }
        TensorKind::SparseUnit => {
            use rand::Rng;
            let mut v = vec![S::zero(); len];
            v[rng.random_range(0..len)] = S::one();
            v
        }
    };
    FormTensor::new(m, n, coeffs)
}

/// A coefficient as it appears in the JSON interchange format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonCoeff {
    Real(f64),
    Complex([f64; 2]),
}

/// JSON interchange: `{m, n, field, coeffs}` with coefficients in row-major
/// order, complex entries as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub m: usize,
    pub n: usize,
    pub field: ScalarField,
    pub coeffs: Vec<JsonCoeff>,
}

impl<S: Scalar> FormTensor<S> {
    pub fn to_file(&self) -> TensorFile {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let re = c.re().to_f64().unwrap_or(f64::NAN);
                match S::FIELD {
                    ScalarField::Real => JsonCoeff::Real(re),
                    ScalarField::Complex => JsonCoeff::Complex([re, c.im().to_f64().unwrap_or(f64::NAN)]),
                }
            })
            .collect();
        TensorFile {
            m: self.m,
            n: self.n,
            field: S::FIELD,
            coeffs,
        }
    }

    pub fn from_file(file: &TensorFile) -> Result<Self> {
        if file.field != S::FIELD {
            return Err(Error::Format(format!(
                "expected a {} tensor, file declares {}",
                S::FIELD,
                file.field
            )));
        }
        let coeffs = file
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let (re, im) = match *c {
                    JsonCoeff::Real(re) => (re, 0.0),
                    JsonCoeff::Complex([re, im]) => (re, im),
                };
                S::from_parts(S::Real::lit(re), S::Real::lit(im))
                    .ok_or_else(|| Error::Format(format!("coefficient {k} has an imaginary part in a real tensor")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.m, file.n, coeffs).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("tensor serializes")
    }
}

/// A form whose field is only known at run time (e.g. read from disk).
#[derive(Debug, Clone, PartialEq)]
pub enum AnyForm {
    Real(FormTensor<f64>),
    Complex(FormTensor<Complex64>),
}

impl AnyForm {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TensorFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match file.field {
            ScalarField::Real => FormTensor::from_file(&file).map(AnyForm::Real),
            ScalarField::Complex => FormTensor::from_file(&file).map(AnyForm::Complex),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyForm::Real(t) => t.to_json(),
            AnyForm::Complex(t) => t.to_json(),
        }
    }

    pub fn field(&self) -> ScalarField {
        match self {
            AnyForm::Real(_) => ScalarField::Real,
            AnyForm::Complex(_) => ScalarField::Complex,
        }
    }

    pub fn generate(kind: TensorKind, m: usize, n: usize, field: ScalarField, seed: u64) -> Result<Self> {
        Ok(match field {
            ScalarField::Real => AnyForm::Real(generate(kind, m, n, seed)?),
            ScalarField::Complex => AnyForm::Complex(generate(kind, m, n, seed)?),
        })
    }
}

impl<S: Scalar> FormTensor<S> {
    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.modulus().is_zero())
    }
}
