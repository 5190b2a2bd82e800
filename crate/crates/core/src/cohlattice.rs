//! Exact arithmetic on the numerical cohomology ring `Q[ℓ]/(ℓ^{g+1})` of a
//! polarized abelian variety of dimension `g` with `ℓ^g = n`.
//!
//! A [`CohClass`] stores the coefficients `c_0, …, c_g` of `Σ c_i ℓ^i`. On an
//! abelian variety the Todd class is trivial, so the same vector serves as
//! Chern character and Mukai vector.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, factorial, int, Q};

/// Dimension and polarization degree of an abelian variety.
///
/// Equality compares `(g, n)` only; the label is for display.
#[derive(Clone, Debug)]
pub struct AbelianContext {
    g: usize,
    n: Q,
    label: String,
}

impl AbelianContext {
    pub fn new(g: usize, n: Q, label: impl Into<String>) -> Result<Arc<Self>> {
        if g == 0 {
            return Err(Error::InvalidContext(
                "dimension g must be at least 1".into(),
            ));
        }
        if !n.is_positive() {
            return Err(Error::InvalidContext(format!(
                "degree n = ℓ^g must be positive, got {}",
                rational::format_short(&n)
            )));
        }
        Ok(Arc::new(Self {
            g,
            n,
            label: label.into(),
        }))
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// The degree `ℓ^g`.
    pub fn n(&self) -> &Q {
        &self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Euler characteristic `χ = ℓ^g / g!` of the polarizing class.
    pub fn chi(&self) -> Q {
        &self.n / factorial(self.g)
    }

    /// Advisory only: a genuine polarization has integral `χ`.
    pub fn chi_is_integral(&self) -> bool {
        rational::is_integer(&self.chi())
    }

    pub fn ensure_same(&self, other: &AbelianContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.label.clone(),
                left_g: self.g,
                left_n: rational::format_short(&self.n),
                right: other.label.clone(),
                right_g: other.g,
                right_n: rational::format_short(&other.n),
            })
        }
    }
}

impl PartialEq for AbelianContext {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.n == other.n
    }
}

impl Eq for AbelianContext {}

impl fmt::Display for AbelianContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(g={}, n={})",
            self.label,
            self.g,
            rational::format_short(&self.n)
        )
    }
}

/// A class `Σ c_i ℓ^i` in `Q[ℓ]/(ℓ^{g+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohClass {
    ctx: Arc<AbelianContext>,
    c: Vec<Q>,
}

impl CohClass {
    pub fn new(ctx: &Arc<AbelianContext>, c: Vec<Q>) -> Result<Self> {
        if c.len() != ctx.g + 1 {
            return Err(Error::ClassLength {
                expected: ctx.g + 1,
                got: c.len(),
            });
        }
        Ok(Self {
            ctx: ctx.clone(),
            c,
        })
    }

    pub fn zero(ctx: &Arc<AbelianContext>) -> Self {
        Self {
            ctx: ctx.clone(),
            c: vec![Q::zero(); ctx.g + 1],
        }
    }

    /// `scale · ℓ^i`.
    pub fn monomial(ctx: &Arc<AbelianContext>, i: usize, scale: Q) -> Result<Self> {
        if i > ctx.g {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: format!("{i} > g = {}", ctx.g),
            });
        }
        let mut out = Self::zero(ctx);
        out.c[i] = scale;
        Ok(out)
    }

    /// The divided power `ℓ^i / i!`.
    pub fn divided_power(ctx: &Arc<AbelianContext>, i: usize) -> Result<Self> {
        Self::monomial(ctx, i, factorial(i).recip())
    }

    /// The basis `{ℓ^i / i!}` for `i = 0..=g`.
    pub fn divided_power_basis(ctx: &Arc<AbelianContext>) -> Vec<Self> {
        (0..=ctx.g)
            .map(|i| Self::divided_power(ctx, i).expect("degree within range"))
            .collect()
    }

    pub fn parse(ctx: &Arc<AbelianContext>, literal: &str) -> Result<Self> {
        let c = literal
            .split(',')
            .map(rational::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, c)
    }

    pub fn ctx(&self) -> &Arc<AbelianContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> &Q {
        &self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &CohClass) -> Result<CohClass> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &CohClass) -> Result<CohClass> {
        self.ctx.ensure_same(&other.ctx)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, s: &Q) -> CohClass {
        self.map(|_, x| x * s)
    }

    pub fn neg(&self) -> CohClass {
        self.map(|_, x| -x)
    }

    /// Cup product, truncated above degree `g`.
    pub fn mul(&self, other: &CohClass) -> Result<CohClass> {
        self.ctx.ensure_same(&other.ctx)?;
        let g = self.ctx.g;
        let mut c = vec![Q::zero(); g + 1];
        for (i, a) in self.c.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.c[..=g - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Ok(CohClass {
            ctx: self.ctx.clone(),
            c,
        })
    }

    /// `∫_X`, the top coefficient times `ℓ^g = n`.
    pub fn integrate(&self) -> Q {
        &self.c[self.ctx.g] * &self.ctx.n
    }

    /// `e^{bℓ}`.
    pub fn exp_div(ctx: &Arc<AbelianContext>, b: &Q) -> CohClass {
        let mut c = Vec::with_capacity(ctx.g + 1);
        let mut term = Q::one();
        for i in 0..=ctx.g {
            if i > 0 {
                term = term * b / int(i as i64);
            }
            c.push(term.clone());
        }
        CohClass {
            ctx: ctx.clone(),
            c,
        }
    }

    /// The `B = bℓ` twisted class `e^{−bℓ}·a`.
    pub fn twist(&self, b: &Q) -> CohClass {
        if b.is_zero() {
            return self.clone();
        }
        Self::exp_div(&self.ctx, &-b)
            .mul(self)
            .expect("same context by construction")
    }

    /// `v* = Σ (−1)^i v_i`.
    pub fn mukai_dual(&self) -> CohClass {
        self.map(|i, x| if i % 2 == 1 { -x } else { x.clone() })
    }

    /// `⟨a, b⟩ = −∫ a*·b`.
    pub fn mukai_pairing(&self, other: &CohClass) -> Result<Q> {
        Ok(-self.mukai_dual().mul(other)?.integrate())
    }

    /// Keeps `c_0..=c_k` and zeroes higher degrees.
    pub fn truncate(&self, k: usize) -> CohClass {
        self.map(|i, x| if i <= k { x.clone() } else { Q::zero() })
    }

    /// Coordinates `v_i = i!·ℓ^{g−i}·ch^B_i = i!·n·c^B_i` for `B = bℓ`.
    pub fn v_vector(&self, b: &Q) -> VVector {
        let twisted = self.twist(b);
        let entries = twisted
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| factorial(i) * &self.ctx.n * x)
            .collect();
        VVector {
            ctx: self.ctx.clone(),
            twist: b.clone(),
            entries,
        }
    }

    pub fn from_v_vector(v: &VVector) -> CohClass {
        let twisted = CohClass {
            ctx: v.ctx.clone(),
            c: v.entries
                .iter()
                .enumerate()
                .map(|(i, x)| x / (factorial(i) * &v.ctx.n))
                .collect(),
        };
        twisted.twist(&-&v.twist)
    }

    /// `O_X`.
    pub fn structure_sheaf(ctx: &Arc<AbelianContext>) -> CohClass {
        Self::monomial(ctx, 0, Q::one()).expect("degree 0")
    }

    /// `O_x`, the point class `ℓ^g / n`.
    pub fn skyscraper(ctx: &Arc<AbelianContext>) -> CohClass {
        Self::monomial(ctx, ctx.g, ctx.n.recip()).expect("degree g")
    }

    /// A line bundle with `c_1 = dℓ`.
    pub fn line_bundle(ctx: &Arc<AbelianContext>, d: &Q) -> CohClass {
        Self::exp_div(ctx, d)
    }

    /// A simple semihomogeneous bundle `r·e^{dℓ}`.
    pub fn semihomogeneous(ctx: &Arc<AbelianContext>, r: i64, d: &Q) -> Result<CohClass> {
        if r <= 0 {
            return Err(Error::OutOfRange {
                what: "rank",
                detail: format!("semihomogeneous rank must be positive, got {r}"),
            });
        }
        Ok(Self::exp_div(ctx, d).scale(&int(r)))
    }

    fn map(&self, f: impl Fn(usize, &Q) -> Q) -> CohClass {
        CohClass {
            ctx: self.ctx.clone(),
            c: self.c.iter().enumerate().map(|(i, x)| f(i, x)).collect(),
        }
    }

    fn zip_with(&self, other: &CohClass, f: impl Fn(&Q, &Q) -> Q) -> CohClass {
        CohClass {
            ctx: self.ctx.clone(),
            c: self.c.iter().zip(&other.c).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(rational::format_short).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Twisted coordinates `v^{B,ℓ}` of a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VVector {
    ctx: Arc<AbelianContext>,
    twist: Q,
    entries: Vec<Q>,
}

impl VVector {
    pub fn new(ctx: &Arc<AbelianContext>, twist: Q, entries: Vec<Q>) -> Result<Self> {
        if entries.len() != ctx.g + 1 {
            return Err(Error::ClassLength {
                expected: ctx.g + 1,
                got: entries.len(),
            });
        }
        Ok(Self {
            ctx: ctx.clone(),
            twist,
            entries,
        })
    }

    pub fn ctx(&self) -> &Arc<AbelianContext> {
        &self.ctx
    }

    pub fn twist(&self) -> &Q {
        &self.twist
    }

    pub fn entries(&self) -> &[Q] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn ctx(g: usize, n: i64) -> Arc<AbelianContext> {
        AbelianContext::new(g, int(n), "X").unwrap()
    }

    fn class(ctx: &Arc<AbelianContext>, lit: &str) -> CohClass {
        CohClass::parse(ctx, lit).unwrap()
    }

    #[test]
    fn rejects_bad_contexts_and_lengths() {
        assert!(AbelianContext::new(0, int(1), "X").is_err());
        assert!(AbelianContext::new(2, int(0), "X").is_err());
        assert!(AbelianContext::new(2, frac(-1, 2), "X").is_err());
        let x = ctx(2, 2);
        assert_eq!(
            CohClass::parse(&x, "1,2").unwrap_err(),
            Error::ClassLength {
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn chi_advisory() {
        assert!(ctx(2, 2).chi_is_integral());
        assert!(!ctx(3, 3).chi_is_integral());
    }

    #[test]
    fn products() {
        let x = ctx(2, 2);
        assert_eq!(
            class(&x, "1,1,0").mul(&class(&x, "1,1,0")).unwrap(),
            class(&x, "1,2,1")
        );
        let a = class(&x, "3/5,-2,7");
        assert_eq!(CohClass::structure_sheaf(&x).mul(&a).unwrap(), a);
        let c = ctx(1, 1);
        assert_eq!(
            class(&c, "0,1").mul(&class(&c, "0,1")).unwrap(),
            class(&c, "0,0")
        );
    }

    #[test]
    fn products_across_contexts_fail() {
        let a = CohClass::structure_sheaf(&ctx(2, 2));
        let b = CohClass::structure_sheaf(&ctx(2, 4));
        assert!(matches!(a.mul(&b), Err(Error::ContextMismatch { .. })));
        assert!(a.mukai_pairing(&b).is_err());
        // Labels do not matter, only (g, n).
        let c = CohClass::structure_sheaf(&AbelianContext::new(2, int(2), "Y").unwrap());
        assert!(a.mul(&c).is_ok());
    }

    #[test]
    fn integration() {
        let x = ctx(2, 2);
        assert_eq!(class(&x, "0,0,1/2").integrate(), int(1));
        // e^ℓ: top coefficient 1/2 times n = 2
        assert_eq!(class(&x, "1,1,1/2").integrate(), int(1));
        assert_eq!(CohClass::structure_sheaf(&ctx(3, 6)).integrate(), int(0));
    }

    #[test]
    fn exponentials() {
        assert_eq!(
            CohClass::exp_div(&ctx(2, 2), &int(1)),
            class(&ctx(2, 2), "1,1,1/2")
        );
        let y = ctx(3, 6);
        assert_eq!(CohClass::exp_div(&y, &int(0)), class(&y, "1,0,0,0"));
        // (−2)^i / i!
        assert_eq!(CohClass::exp_div(&y, &int(-2)), class(&y, "1,-2,2,-4/3"));
    }

    #[test]
    fn twists() {
        let x = ctx(2, 2);
        assert_eq!(class(&x, "1,1,1/2").twist(&int(1)), class(&x, "1,0,0"));
        let a = class(&x, "2,-1/3,5");
        assert_eq!(a.twist(&int(0)), a);
        assert_eq!(class(&x, "1,0,0").twist(&int(1)), class(&x, "1,-1,1/2"));
        assert_eq!(a.twist(&frac(2, 7)).twist(&frac(-2, 7)), a);
    }

    #[test]
    fn mukai_duality() {
        let x = ctx(2, 2);
        assert_eq!(class(&x, "1,1,1/2").mukai_dual(), class(&x, "1,-1,1/2"));
        let y = ctx(3, 6);
        assert_eq!(class(&y, "0,0,0,1/6").mukai_dual(), class(&y, "0,0,0,-1/6"));
        let a = class(&y, "1,2,3,4");
        assert_eq!(a.mukai_dual().mukai_dual(), a);
    }

    #[test]
    fn pairing_values() {
        let x = ctx(2, 2);
        let o = class(&x, "1,0,0");
        let pt = class(&x, "0,0,1/2");
        assert_eq!(o.mukai_pairing(&pt).unwrap(), int(-1));
        assert_eq!(o.mukai_pairing(&CohClass::zero(&x)).unwrap(), int(0));
        let e = class(&x, "1,1,1/2");
        assert_eq!(e.mukai_pairing(&e).unwrap(), int(0));
    }

    #[test]
    fn pairing_parity_under_swap() {
        // ⟨a,b⟩ = (−1)^g ⟨b,a⟩ on the ℓ-sublattice.
        for (g, n) in [(1, 1), (2, 2), (3, 6), (4, 24)] {
            let x = ctx(g, n);
            let a = CohClass::new(&x, (0..=g).map(|i| frac(i as i64 + 2, 3)).collect()).unwrap();
            let b =
                CohClass::new(&x, (0..=g).map(|i| frac(1 - 2 * i as i64, 5)).collect()).unwrap();
            let ab = a.mukai_pairing(&b).unwrap();
            let ba = b.mukai_pairing(&a).unwrap();
            assert_eq!(ab, rational::sign_power(g) * ba, "g = {g}");
        }
    }

    #[test]
    fn v_vectors() {
        let x = ctx(2, 2);
        let zero = int(0);
        let ents = |c: &CohClass| c.v_vector(&zero).entries().to_vec();
        assert_eq!(ents(&class(&x, "1,1,1/2")), vec![int(2), int(2), int(2)]);
        assert_eq!(ents(&class(&x, "1,0,0")), vec![int(2), int(0), int(0)]);
        assert_eq!(ents(&class(&x, "0,0,1/2")), vec![int(0), int(0), int(2)]);
    }

    #[test]
    fn v_vector_inverse() {
        let x = ctx(2, 2);
        let a = class(&x, "1,1,1/2");
        assert_eq!(CohClass::from_v_vector(&a.v_vector(&frac(3, 7))), a);
        let v = VVector::new(&x, int(0), vec![int(2), int(0), int(0)]).unwrap();
        assert_eq!(CohClass::from_v_vector(&v), class(&x, "1,0,0"));
        let v = VVector::new(&x, int(0), vec![int(0), int(0), int(2)]).unwrap();
        assert_eq!(CohClass::from_v_vector(&v), class(&x, "0,0,1/2"));
    }

    #[test]
    fn builders() {
        let x = ctx(2, 2);
        let pt = CohClass::skyscraper(&x);
        assert_eq!(pt, class(&x, "0,0,1/2"));
        assert_eq!(pt.integrate(), int(1));
        assert_eq!(
            CohClass::semihomogeneous(&x, 2, &frac(1, 2)).unwrap(),
            class(&x, "2,1,1/4")
        );
        let d = frac(-5, 3);
        assert_eq!(
            CohClass::semihomogeneous(&x, 1, &d).unwrap(),
            CohClass::line_bundle(&x, &d)
        );
        assert!(CohClass::semihomogeneous(&x, 0, &d).is_err());
        assert!(CohClass::semihomogeneous(&x, -2, &d).is_err());
    }

    #[test]
    fn display_uses_class_literal_syntax() {
        let x = ctx(2, 2);
        assert_eq!(class(&x, "1,-2/4,3").to_string(), "1,-1/2,3");
    }
}
