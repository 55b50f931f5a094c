//! Exact rational functions over Q in a fixed, ordered list of parameters.
//!
//! Every [`FieldElement`] belongs to a [`Context`] that declares the parameter
//! names. Elements of different contexts never mix: the checked operations
//! return [`FieldError::ContextMismatch`] and the operator impls panic.

mod format;
pub mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use poly::{Monomial, Poly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown parameter `{0}`")]
    UnknownVariable(String),
    #[error("elements belong to different parameter contexts")]
    ContextMismatch,
    #[error("pole at {0} = 0")]
    Pole(String),
    #[error("denominator vanishes under the substitution")]
    VanishingDenominator,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
struct ContextInner {
    id: u64,
    names: Vec<String>,
}

/// Declared parameter list shared by a family of field elements.
#[derive(Clone, Debug)]
pub struct Context(Arc<ContextInner>);

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Context {}

impl Context {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Context(Arc::new(ContextInner {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        }))
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FieldError> {
        self.0
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FieldError::UnknownVariable(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Result<FieldElement, FieldError> {
        let i = self.index_of(name)?;
        Ok(self.from_poly(Poly::var(self.nvars(), i)))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_poly(Poly::zero(self.nvars()))
    }

    pub fn one(&self) -> FieldElement {
        self.from_poly(Poly::one(self.nvars()))
    }

    pub fn int(&self, n: i64) -> FieldElement {
        self.rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(&self, n: i64, d: i64) -> FieldElement {
        self.rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(&self, q: BigRational) -> FieldElement {
        self.from_poly(Poly::constant(self.nvars(), q))
    }

    pub fn from_poly(&self, p: Poly) -> FieldElement {
        assert_eq!(p.nvars(), self.nvars());
        FieldElement {
            ctx: self.clone(),
            den: Poly::one(self.nvars()),
            num: p,
        }
    }

    /// Canonical `num/den`; fails if `den` is zero.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<FieldElement, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElement::canonical(self.clone(), num, den))
    }

    pub fn parse(&self, s: &str) -> Result<FieldElement, FieldError> {
        format::parse(self, s)
    }
}

/// Exact element of Q(params) in canonical form: coprime numerator and
/// denominator, denominator with leading coefficient 1.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Context,
    num: Poly,
    den: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Apply a field operation with full error reporting.
pub fn field_arith(
    a: &FieldElement,
    b: &FieldElement,
    op: ArithOp,
) -> Result<FieldElement, FieldError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

impl FieldElement {
    fn canonical(ctx: Context, num: Poly, den: Poly) -> FieldElement {
        let n = ctx.nvars();
        if num.is_zero() {
            return FieldElement {
                ctx,
                num: Poly::zero(n),
                den: Poly::one(n),
            };
        }
        if let Some(c) = den.as_constant() {
            return FieldElement {
                num: num.scale(&c.recip()),
                den: Poly::one(n),
                ctx,
            };
        }
        let g = poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            FieldElement { ctx, num, den }
        } else {
            let inv = lc.recip();
            FieldElement {
                ctx,
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The rational value if this element does not depend on any parameter.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(other, true))
    }

    fn add_unchecked(&self, other: &FieldElement, negate: bool) -> FieldElement {
        let combine = |a: &Poly, b: &Poly| if negate { a.sub(b) } else { a.add(b) };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg_ref() } else { other.clone() };
        }
        if self.den == other.den {
            let num = combine(&self.num, &other.num);
            if self.den.is_one() {
                return FieldElement {
                    ctx: self.ctx.clone(),
                    num,
                    den: self.den.clone(),
                };
            }
            return FieldElement::canonical(self.ctx.clone(), num, self.den.clone());
        }
        let g = poly::gcd(&self.den, &other.den);
        let d1 = self.den.exact_div(&g).unwrap();
        let d2 = other.den.exact_div(&g).unwrap();
        let num = combine(&self.num.mul(&d2), &other.num.mul(&d1));
        let den = self.den.mul(&d2);
        FieldElement::canonical(self.ctx.clone(), num, den)
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &FieldElement) -> FieldElement {
        if self.is_zero() || other.is_zero() {
            return self.ctx.zero();
        }
        if let Some(c) = other.as_rational() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_rational() {
            return other.scale(&c);
        }
        // Cross-cancel so the product is already reduced.
        let g1 = poly::gcd(&self.num, &other.den);
        let g2 = poly::gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).unwrap();
        let d2 = other.den.exact_div(&g1).unwrap();
        let n2 = other.num.exact_div(&g2).unwrap();
        let d1 = self.den.exact_div(&g2).unwrap();
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let lc = den.leading_coeff();
        let inv = lc.recip();
        FieldElement {
            ctx: self.ctx.clone(),
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        let inv = other.inv()?;
        Ok(self.mul_unchecked(&inv))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let lc = self.num.leading_coeff();
        let s = lc.recip();
        Ok(FieldElement {
            ctx: self.ctx.clone(),
            num: self.den.scale(&s),
            den: self.num.scale(&s),
        })
    }

    pub fn scale(&self, c: &BigRational) -> FieldElement {
        if c.is_zero() {
            return self.ctx.zero();
        }
        FieldElement {
            ctx: self.ctx.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    fn neg_ref(&self) -> FieldElement {
        FieldElement {
            ctx: self.ctx.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i32) -> Result<FieldElement, FieldError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Ok(FieldElement {
            ctx: self.ctx.clone(),
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    /// Partial derivative by the quotient rule.
    pub fn differentiate(&self, var: &str) -> Result<FieldElement, FieldError> {
        let i = self.ctx.index_of(var)?;
        let dn = self.num.derivative(i);
        if self.den.is_one() {
            return Ok(self.ctx.from_poly(dn));
        }
        let dd = self.den.derivative(i);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Ok(FieldElement::canonical(
            self.ctx.clone(),
            num,
            self.den.mul(&self.den),
        ))
    }

    /// Substitute field elements for some parameters.
    pub fn evaluate(
        &self,
        bindings: &BTreeMap<String, FieldElement>,
    ) -> Result<FieldElement, FieldError> {
        let mut idx = vec![None; self.ctx.nvars()];
        for (name, val) in bindings {
            self.check(val)?;
            idx[self.ctx.index_of(name)?] = Some(val.clone());
        }
        let num = self.eval_poly(&self.num, &idx)?;
        let den = self.eval_poly(&self.den, &idx)?;
        if den.is_zero() {
            return Err(FieldError::VanishingDenominator);
        }
        num.checked_div(&den)
    }

    fn eval_poly(
        &self,
        p: &Poly,
        vals: &[Option<FieldElement>],
    ) -> Result<FieldElement, FieldError> {
        let n = self.ctx.nvars();
        let mut acc = self.ctx.zero();
        let mut powers: Vec<Vec<FieldElement>> = vals
            .iter()
            .map(|v| v.iter().map(|_| self.ctx.one()).collect())
            .collect();
        for (m, c) in p.terms() {
            let mut free = Monomial::one(n);
            let mut term = self.ctx.rational(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &vals[i] {
                    None => free.0[i] = e,
                    Some(v) => {
                        let cache = &mut powers[i];
                        while cache.len() <= e as usize {
                            let next = cache.last().unwrap().mul_unchecked(v);
                            cache.push(next);
                        }
                        term = term.mul_unchecked(&cache[e as usize]);
                    }
                }
            }
            let fm = self
                .ctx
                .from_poly(Poly::from_term(free, BigRational::one()));
            acc = acc.add_unchecked(&term.mul_unchecked(&fm), false);
        }
        Ok(acc)
    }

    /// Taylor coefficients in `var` up to `var^order`.
    pub fn series_expand(&self, var: &str, order: usize) -> Result<SeriesCoefficients, FieldError> {
        let i = self.ctx.index_of(var)?;
        if self.den.min_degree_in(i) > 0 {
            return Err(FieldError::Pole(var.to_string()));
        }
        let lift = |p: &Poly| -> Vec<FieldElement> {
            p.coefficients_in(i)
                .into_iter()
                .map(|c| self.ctx.from_poly(c))
                .collect()
        };
        let pn = lift(&self.num);
        let qn = lift(&self.den);
        let q0_inv = qn[0].inv()?;
        let mut coeffs: Vec<FieldElement> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = pn.get(k).cloned().unwrap_or_else(|| self.ctx.zero());
            for j in 1..=k.min(qn.len() - 1) {
                acc = acc.add_unchecked(&qn[j].mul_unchecked(&coeffs[k - j]), true);
            }
            coeffs.push(acc.mul_unchecked(&q0_inv));
        }
        Ok(SeriesCoefficients {
            var: var.to_string(),
            coeffs,
        })
    }
}

/// Truncated expansion `Σ coeffs[k] var^k`, coefficients free of `var`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoefficients {
    pub var: String,
    pub coeffs: Vec<FieldElement>,
}

impl SeriesCoefficients {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Resum the truncation back into a single element.
    pub fn resum(&self) -> Result<FieldElement, FieldError> {
        let ctx = self.coeffs[0].context();
        let v = ctx.var(&self.var)?;
        let mut acc = ctx.zero();
        let mut p = ctx.one();
        for c in &self.coeffs {
            acc = acc.checked_add(&c.checked_mul(&p)?)?;
            p = p.checked_mul(&v)?;
        }
        Ok(acc)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.num == other.num && self.den == other.den
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::render(self))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!("field arithmetic failed: {e}"))
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(&["lambda", "hbar", "t1"])
    }

    #[test]
    fn inverses() {
        let c = ctx();
        let l = c.var("lambda").unwrap();
        assert!((&l + &(-&l)).is_zero());
        assert!((&l.inv().unwrap() * &l).is_one());
    }

    #[test]
    fn product_of_inverses_matches_cross_multiplication() {
        let c = ctx();
        let l = c.var("lambda").unwrap();
        let h = c.var("hbar").unwrap();
        let direct = c.one() / (&l * &(&l - &h));
        let split = &l.inv().unwrap() * &(&l - &h).inv().unwrap();
        assert_eq!(direct, split);
        // cross-multiplication: direct * l * (l - h) == 1
        assert!((&direct * &l * (&l - &h)).is_one());
    }

    #[test]
    fn derivative_examples() {
        let c = ctx();
        let l = c.var("lambda").unwrap();
        let h = c.var("hbar").unwrap();
        let d = l.inv().unwrap().differentiate("lambda").unwrap();
        assert_eq!(d, -(&l * &l).inv().unwrap());
        assert!(c.int(7).differentiate("lambda").unwrap().is_zero());
        let f = (&l * &(&l - &h)).inv().unwrap();
        let lh = &l - &h;
        let expected = -(&(&c.int(2) * &l) - &h) / (&l * &l * &lh * &lh);
        assert_eq!(f.differentiate("lambda").unwrap(), expected);
        assert!(matches!(
            l.differentiate("mu"),
            Err(FieldError::UnknownVariable(_))
        ));
    }

    #[test]
    fn series_examples() {
        let c = ctx();
        let l = c.var("lambda").unwrap();
        let h = c.var("hbar").unwrap();
        let s = (&l - &h).inv().unwrap().series_expand("hbar", 2).unwrap();
        let li = l.inv().unwrap();
        assert_eq!(
            s.coeffs,
            vec![li.clone(), li.pow(2).unwrap(), li.pow(3).unwrap()]
        );
        let s = l.series_expand("hbar", 3).unwrap();
        assert_eq!(s.coeffs, vec![l.clone(), c.zero(), c.zero(), c.zero()]);
        assert_eq!(
            h.inv().unwrap().series_expand("hbar", 2),
            Err(FieldError::Pole("hbar".into()))
        );
    }

    #[test]
    fn evaluate_examples() {
        let c = ctx();
        let l = c.var("lambda").unwrap();
        let h = c.var("hbar").unwrap();
        let t = c.var("t1").unwrap();
        let mut b = BTreeMap::new();
        b.insert("hbar".to_string(), c.one());
        assert_eq!((&h * &h / &l).evaluate(&b).unwrap(), l.inv().unwrap());

        let mut b = BTreeMap::new();
        b.insert("t1".to_string(), c.one());
        let f = (&t + &c.one()) / (&t - &c.one());
        assert_eq!(f.evaluate(&b), Err(FieldError::VanishingDenominator));

        let mut b = BTreeMap::new();
        b.insert("lambda".to_string(), c.int(3));
        let f = &l * &(&l + &c.int(2)) / c.int(2);
        assert_eq!(f.evaluate(&b).unwrap(), c.frac(15, 2));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = Context::new(&["lambda"]).var("lambda").unwrap();
        let b = Context::new(&["lambda"]).var("lambda").unwrap();
        assert_eq!(a.checked_add(&b), Err(FieldError::ContextMismatch));
        assert_eq!(
            field_arith(&a, &a.context().zero(), ArithOp::Div),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let c = ctx();
        let t = c.var("t1").unwrap();
        let f = c.one() / (&c.int(2) * &t - &c.int(2));
        assert!(f.denom().leading_coeff().is_one());
        assert_eq!(f.to_string(), "1/(2*(t1-1))");
    }
}
