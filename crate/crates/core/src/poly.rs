//! Univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored ascending with no trailing zeros. Beyond ring
//! arithmetic this module provides Lagrange interpolation (used to assemble
//! characteristic polynomials from determinant evaluations) and Sturm-chain
//! real root isolation with multiplicities, which lets float spectra be
//! checked against exact polynomials without ever trusting the float side.

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{format_rat, parse_rat, rat, rat_to_f64, Rat};
use crate::{Error, Result};

/// Polynomial `c₀ + c₁t + … + c_d t^d`; `coeffs` ascending and trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c · t^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// Trims trailing zeros.
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// `Σ |cₖ|·max(1,|x|)^k`; the natural scale for `|p(x)|` residuals.
    pub fn residual_scale(&self, x: f64) -> f64 {
        let base = x.abs().max(1.0);
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * base + rat_to_f64(c).abs();
        }
        acc.max(1.0)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * rat(k as i64, 1))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let d = divisor.degree().expect("nonzero divisor");
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Rat::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let factor = &rem[k] / &lead;
            if factor.is_zero() {
                continue;
            }
            for j in 0..=d {
                let t = &factor * &divisor.coeffs[j];
                rem[k - d + j] = &rem[k - d + j] - &t;
            }
            quo[k - d] = factor;
        }
        (Self::from_coeffs(quo), Self::from_coeffs(rem))
    }

    /// Leading coefficient scaled to 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lead) => {
                let inv = Rat::one() / lead;
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = x.divrem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }

    /// Product of `(t − root)` over distinct roots, monic.
    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Self::gcd(self, &self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Interpolates through `points`; the nodes must be pairwise distinct.
    pub fn lagrange_interpolate(points: &[(Rat, Rat)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Self::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let dx = xi - xj;
                assert!(!dx.is_zero(), "interpolation nodes must be distinct");
                let factor = Self::from_coeffs(vec![-xj / &dx, Rat::one() / &dx]);
                basis = basis.mul(&factor);
            }
            acc = acc.add(&basis);
        }
        acc
    }

    /// Real roots in ascending order with multiplicities, isolated and
    /// refined entirely in exact arithmetic (returned as nearest doubles).
    pub fn real_roots(&self) -> Vec<(f64, usize)> {
        assert!(!self.is_zero(), "zero polynomial has no root list");
        if self.degree() == Some(0) {
            return Vec::new();
        }
        // h[k+1] = gcd(h[k], h[k]'): a root of multiplicity m in h[0] appears
        // in exactly h[0..m].
        let mut chain = vec![self.monic()];
        while chain.last().unwrap().degree().unwrap_or(0) >= 1 {
            let last = chain.last().unwrap();
            chain.push(Self::gcd(last, &last.derivative()));
        }
        let squarefree: Vec<RatPoly> = (0..chain.len() - 1)
            .map(|k| chain[k].divrem(&chain[k + 1]).0.monic())
            .collect();
        let q = &squarefree[0];
        let sturm = sturm_chain(q);
        let bound = cauchy_bound(q);
        let lo = -bound.clone();
        let hi = bound;
        let mut roots: Vec<(Rat, Rat)> = Vec::new();
        isolate(q, &sturm, lo, hi, &mut roots);
        let mut out: Vec<(f64, usize)> = roots
            .into_iter()
            .map(|(a, b)| {
                let mult = multiplicity_in(&chain, &squarefree, &a, &b);
                let value = if a == b {
                    rat_to_f64(&a)
                } else {
                    rat_to_f64(&((&a + &b) / rat(2, 1)))
                };
                (value, mult)
            })
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        let total: usize = out.iter().map(|(_, m)| m).sum();
        assert!(
            total <= self.degree().unwrap_or(0),
            "root multiplicities exceed the degree"
        );
        out
    }
}

/// `1 + max |cᵢ/c_d|`: strictly exceeds the absolute value of every root.
fn cauchy_bound(p: &RatPoly) -> Rat {
    let lead = p.leading().expect("nonzero polynomial");
    let mut max = Rat::zero();
    for c in &p.coeffs[..p.coeffs.len() - 1] {
        let ratio = (c / lead).abs();
        if ratio > max {
            max = ratio;
        }
    }
    max + Rat::one()
}

fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].divrem(&chain[n - 1]).1;
        if r.is_zero() {
            break;
        }
        chain.push(r.neg());
    }
    chain
}

fn sign_variations(chain: &[RatPoly], x: &Rat) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for p in chain {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let sign = v.is_positive();
        if let Some(prev) = last {
            if prev != sign {
                count += 1;
            }
        }
        last = Some(sign);
    }
    count
}

/// Distinct roots of squarefree `q` in the open interval `(a, b)`;
/// both endpoints must be non-roots.
fn count_roots(sturm: &[RatPoly], a: &Rat, b: &Rat) -> usize {
    sign_variations(sturm, a) - sign_variations(sturm, b)
}

/// Nudges away from `x` until `q` is nonzero, moving toward `toward`.
fn non_root_near(q: &RatPoly, x: &Rat, toward: &Rat) -> Rat {
    let mut step = (toward - x) / rat(2, 1);
    loop {
        let candidate = x + &step;
        if !q.eval(&candidate).is_zero() {
            return candidate;
        }
        step /= rat(2, 1);
    }
}

/// Splits `(lo, hi)` until each piece holds one root of squarefree `q`, then
/// narrows it. Emitted pairs are either an exact rational root `(r, r)` or a
/// bracket `(a, b)` of width below 2⁻⁶⁰ with a sign change across it.
/// Both endpoints are always non-roots; split points are nudged off roots.
fn isolate(q: &RatPoly, sturm: &[RatPoly], lo: Rat, hi: Rat, out: &mut Vec<(Rat, Rat)>) {
    let n = count_roots(sturm, &lo, &hi);
    if n == 0 {
        return;
    }
    let mut mid = (&lo + &hi) / rat(2, 1);
    if q.eval(&mid).is_zero() {
        mid = non_root_near(q, &mid, &hi);
    }
    if n == 1 {
        out.push(refine(q, lo, hi, mid));
        return;
    }
    isolate(q, sturm, lo, mid.clone(), out);
    isolate(q, sturm, mid, hi, out);
}

/// Sign-change bisection on a squarefree polynomial with exactly one root in
/// `(lo, hi)`; `mid` is a precomputed non-root midpoint.
fn refine(q: &RatPoly, lo: Rat, hi: Rat, mid: Rat) -> (Rat, Rat) {
    let tiny = rat(1, 1 << 30) * rat(1, 1 << 30);
    let mut lo = lo;
    let mut hi = hi;
    let mut lo_sign = q.eval(&lo).is_positive();
    let mut mid = mid;
    loop {
        let mid_val = q.eval(&mid);
        if mid_val.is_zero() {
            return (mid.clone(), mid);
        }
        if mid_val.is_positive() == lo_sign {
            lo = mid;
            lo_sign = q.eval(&lo).is_positive();
        } else {
            hi = mid;
        }
        if (&hi - &lo) < tiny {
            if let Some(exact) = snap_to_rational_root(q, &lo, &hi) {
                return (exact.clone(), exact);
            }
            return (lo, hi);
        }
        mid = (&lo + &hi) / rat(2, 1);
    }
}

/// Checks the continued-fraction convergents of the bracket midpoint for an
/// exact rational root of `q` inside `(lo, hi)`. Recognises roots like 0 or
/// 1/2 that bisection alone would only approximate.
fn snap_to_rational_root(q: &RatPoly, lo: &Rat, hi: &Rat) -> Option<Rat> {
    let x = rat_to_f64(&((lo + hi) / rat(2, 1)));
    let verify = |p: i128, qden: i128| -> Option<Rat> {
        let c = Rat::new(BigInt::from(p), BigInt::from(qden));
        (&c > lo && &c < hi && q.eval(&c).is_zero()).then_some(c)
    };
    let mut frac = x;
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut qd) = (frac.floor() as i128, 1i128);
    for _ in 0..48 {
        if let Some(c) = verify(p, qd) {
            return Some(c);
        }
        let rem = frac - frac.floor();
        if rem.abs() < 1e-15 || qd > (1 << 31) {
            return None;
        }
        frac = 1.0 / rem;
        let a = frac.floor();
        if !a.is_finite() || a.abs() > 9e15 {
            return None;
        }
        let a = a as i128;
        let np = a.checked_mul(p)?.checked_add(p_prev)?;
        let nq = a.checked_mul(qd)?.checked_add(q_prev)?;
        (p_prev, q_prev) = (p, qd);
        (p, qd) = (np, nq);
    }
    None
}

/// Multiplicity of the single root captured by `(a, b)` (or the exact root
/// `a == b`), read off the gcd chain.
fn multiplicity_in(chain: &[RatPoly], squarefree: &[RatPoly], a: &Rat, b: &Rat) -> usize {
    if a == b {
        return chain.iter().take_while(|h| h.eval(a).is_zero()).count();
    }
    let mut mult = 0;
    for q in squarefree {
        let sa = q.eval(a);
        let sb = q.eval(b);
        if sa.is_positive() != sb.is_positive() && !sa.is_zero() && !sb.is_zero() {
            mult += 1;
        } else {
            break;
        }
    }
    mult.max(1)
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    coeffs: Vec<String>,
}

/// Parses `{"coeffs":["p/q",...]}`, ascending.
pub fn parse_poly(document: &str) -> Result<RatPoly> {
    let doc: PolyDoc =
        serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let coeffs = doc
        .coeffs
        .iter()
        .map(|s| parse_rat(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly::from_coeffs(coeffs))
}

/// Serialises as `{"coeffs":["p/q",...]}`, ascending and trimmed.
pub fn serialize_poly(p: &RatPoly) -> String {
    let doc = PolyDoc {
        coeffs: p.coeffs().iter().map(format_rat).collect(),
    };
    serde_json::to_string(&doc).expect("polynomial document serialises")
}
