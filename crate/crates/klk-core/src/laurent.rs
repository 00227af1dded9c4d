//! Integer Laurent polynomials in one variable `v`.
//!
//! All graded multiplicities in the engine live in this ring. Values are
//! kept canonical: terms sorted by exponent, no zero coefficients stored,
//! so structural equality is ring equality.

use std::fmt;

/// Sparse Laurent polynomial over the integers.
///
/// Coefficients are checked `i64`; an overflow aborts with a capacity
/// panic rather than wrapping. Degrees in this crate stay below the
/// length of the longest element (15 for S₆), coefficients stay tiny.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentPoly {
    /// `(exponent, coefficient)` pairs, sorted by exponent, coefficients nonzero.
    terms: Vec<(i32, i64)>,
}

fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("Laurent coefficient overflow")
}

fn checked_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("Laurent coefficient overflow")
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// The variable `v` itself.
    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    /// `v + v⁻¹`, the Hecke-algebra loop value; appears often enough to name.
    pub fn gauss() -> Self {
        LaurentPoly {
            terms: vec![(-1, 1), (1, 1)],
        }
    }

    pub fn monomial(exp: i32, coeff: i64) -> Self {
        if coeff == 0 {
            Self::zero()
        } else {
            LaurentPoly {
                terms: vec![(exp, coeff)],
            }
        }
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial(0, c)
    }

    /// Builds from arbitrary pairs; merges duplicates and drops zeros.
    pub fn from_terms(pairs: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut terms: Vec<(i32, i64)> = pairs.into_iter().collect();
        terms.sort_by_key(|&(e, _)| e);
        let mut out: Vec<(i32, i64)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc = checked_add(*lc, c),
                _ => out.push((e, c)),
            }
        }
        out.retain(|&(_, c)| c != 0);
        LaurentPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms == [(0, 1)]
    }

    pub fn terms(&self) -> &[(i32, i64)] {
        &self.terms
    }

    pub fn coeff(&self, exp: i32) -> i64 {
        match self.terms.binary_search_by_key(&exp, |&(e, _)| e) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    /// Lowest exponent; `None` on the zero polynomial.
    pub fn min_deg(&self) -> Option<i32> {
        self.terms.first().map(|&(e, _)| e)
    }

    /// Highest exponent; `None` on the zero polynomial.
    pub fn max_deg(&self) -> Option<i32> {
        self.terms.last().map(|&(e, _)| e)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = self.terms[i];
            let (eb, cb) = other.terms[j];
            match ea.cmp(&eb) {
                std::cmp::Ordering::Less => {
                    out.push((ea, ca));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((eb, cb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = checked_add(ca, cb);
                    if c != 0 {
                        out.push((ea, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        LaurentPoly { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.negate())
    }

    /// In-place `self += scale · v^shift · other`. This is the inner loop of
    /// the KL recursion, hence the dedicated form.
    pub fn add_scaled_shifted(&mut self, other: &Self, scale: i64, shift: i32) {
        if scale == 0 || other.is_zero() {
            return;
        }
        let shifted = other
            .terms
            .iter()
            .map(|&(e, c)| (e + shift, checked_mul(c, scale)));
        *self = self.add(&LaurentPoly {
            terms: shifted.collect(),
        });
    }

    pub fn negate(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|&(e, c)| (e, -c)).collect(),
        }
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|&(e, k)| (e, checked_mul(k, c)))
                .collect(),
        }
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|&(e, c)| (e + k, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut acc = Self::zero();
        for &(e, c) in &other.terms {
            acc.add_scaled_shifted(self, c, e);
        }
        acc
    }

    /// The bar involution `v ↦ v⁻¹`.
    pub fn bar(&self) -> Self {
        let mut terms: Vec<(i32, i64)> = self.terms.iter().map(|&(e, c)| (-e, c)).collect();
        terms.reverse();
        LaurentPoly { terms }
    }

    /// True iff invariant under bar.
    pub fn is_palindromic(&self) -> bool {
        self.bar() == *self
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|&(_, c)| c >= 0)
    }

    /// Sum of coefficients, i.e. evaluation at v = 1.
    pub fn eval_at_one(&self) -> i64 {
        self.terms.iter().fold(0, |acc, &(_, c)| checked_add(acc, c))
    }
}

impl fmt::Display for LaurentPoly {
    /// Ascending exponents: `v^-2 + 2 + v^2`, `-v + 3v^4`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match e {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag == 1 {
                        write!(f, "v")?;
                    } else {
                        write!(f, "{mag}v")?;
                    }
                }
                _ => {
                    if mag == 1 {
                        write!(f, "v^{e}")?;
                    } else {
                        write!(f, "{mag}v^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Classical polynomial in `q`, used only to present KL polynomials in
/// their traditional form (`P_{x,w}(q)`; `h_{x,w}(v) = v^{ℓ(w)-ℓ(x)} P_{x,w}(v⁻²)`).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct QPoly {
    /// Coefficient of q^i at index i; no trailing zeros.
    pub coeffs: Vec<i64>,
}

impl QPoly {
    pub fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "{mag}q")?;
                    }
                }
                _ => {
                    if mag == 1 {
                        write!(f, "q^{k}")?;
                    } else {
                        write!(f, "{mag}q^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
