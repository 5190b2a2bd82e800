//! Cohomological Fourier-Mukai transforms with a universal semihomogeneous
//! kernel, restricted to the `ℓ`-sublattice.
//!
//! In twisted coordinates the transform is anti-diagonal:
//! `v^{D_Y,ℓ_Y}(Φ(E)) = g!/(r·ℓ_X^g) · Adiag(1, −1, …, (−1)^g) · v^{−D_X,ℓ_X}(E)`.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::cohlattice::{AbelianContext, CohClass, VVector};
use crate::error::{Error, Result};
use crate::rational::{self, factorial, int, sign_power, Q};

/// Numerical data of `Φ_E^{X→Y}`: fibers of the kernel have Chern characters
/// `r·e^{D_X}` on `X` and `r·e^{D_Y}` on `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMTransformSpec {
    src: Arc<AbelianContext>,
    dst: Arc<AbelianContext>,
    r: u64,
    d_x: Q,
    d_y: Q,
}

impl FMTransformSpec {
    /// Validates dimension equality and degree reciprocity
    /// `(n_X/g!)·(n_Y/g!) = 1/r²`.
    pub fn new(
        src: Arc<AbelianContext>,
        dst: Arc<AbelianContext>,
        r: u64,
        d_x: Q,
        d_y: Q,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSpec(
                "rank r must be a positive integer".into(),
            ));
        }
        if src.g() != dst.g() {
            return Err(Error::InvalidSpec(format!(
                "dimension mismatch: source g = {}, target g = {}",
                src.g(),
                dst.g()
            )));
        }
        let lhs = src.chi() * dst.chi();
        let rhs = int(1) / int(r as i64 * r as i64);
        if lhs != rhs {
            return Err(Error::InvalidSpec(format!(
                "degree reciprocity violated: (n_X/g!)(n_Y/g!) = {} but 1/r^2 = {}",
                rational::format_short(&lhs),
                rational::format_short(&rhs)
            )));
        }
        Ok(Self {
            src,
            dst,
            r,
            d_x,
            d_y,
        })
    }

    /// The target degree forced by reciprocity: `n_Y = (g!)² / (r²·n_X)`.
    pub fn dual_degree(g: usize, n_x: &Q, r: u64) -> Q {
        let gf = factorial(g);
        &gf * &gf / (int(r as i64 * r as i64) * n_x)
    }

    /// Builds a spec whose target degree is derived from reciprocity.
    pub fn with_derived_target(
        src: Arc<AbelianContext>,
        target_label: &str,
        r: u64,
        d_x: Q,
        d_y: Q,
    ) -> Result<Self> {
        let n_y = Self::dual_degree(src.g(), src.n(), r.max(1));
        let dst = AbelianContext::new(src.g(), n_y, target_label)?;
        Self::new(src, dst, r, d_x, d_y)
    }

    /// The classical Poincaré transform `X → X̂` (`r = 1`, no twists).
    pub fn poincare(g: usize, n_x: Q) -> Result<Self> {
        let src = AbelianContext::new(g, n_x, "X")?;
        Self::with_derived_target(src, "Xhat", 1, Q::zero(), Q::zero())
    }

    pub fn src(&self) -> &Arc<AbelianContext> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<AbelianContext> {
        &self.dst
    }

    pub fn g(&self) -> usize {
        self.src.g()
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn d_x(&self) -> &Q {
        &self.d_x
    }

    pub fn d_y(&self) -> &Q {
        &self.d_y
    }

    /// `g!/(r·n_X)`.
    pub fn prefactor(&self) -> Q {
        factorial(self.g()) / (int(self.r as i64) * self.src.n())
    }

    /// Row `i` has its single entry in column `g − i`, equal to
    /// `prefactor·(−1)^i`.
    pub fn antidiag_matrix(&self) -> Vec<Vec<Q>> {
        let g = self.g();
        let p = self.prefactor();
        (0..=g)
            .map(|i| {
                let mut row = vec![Q::zero(); g + 1];
                row[g - i] = &p * sign_power(i);
                row
            })
            .collect()
    }

    /// The cohomological transform of a class on the source.
    pub fn apply(&self, e: &CohClass) -> Result<CohClass> {
        self.src.ensure_same(e.ctx())?;
        let g = self.g();
        let p = self.prefactor();
        let v = e.v_vector(&-&self.d_x);
        let entries = (0..=g)
            .map(|i| &p * sign_power(i) * &v.entries()[g - i])
            .collect();
        let w = VVector::new(&self.dst, self.d_y.clone(), entries)?;
        Ok(CohClass::from_v_vector(&w))
    }

    /// `e^{−D_Y}·Φ(e^{−D_X}·x)`.
    pub fn apply_normalized(&self, x: &CohClass) -> Result<CohClass> {
        Ok(self.apply(&x.twist(&self.d_x))?.twist(&self.d_y))
    }

    /// Image of a class under `Ξ`: tensor with the dual of the kernel fiber
    /// on `X`, transform, tensor with the dual of the kernel fiber on `Y`.
    /// Each dual fiber acts as `r·e^{−D}`.
    pub fn xi_image(&self, x: &CohClass) -> Result<CohClass> {
        let r = int(self.r as i64);
        Ok(self
            .apply(&x.twist(&self.d_x).scale(&r))?
            .twist(&self.d_y)
            .scale(&r))
    }

    /// The quasi-inverse `Φ_{Σ*E^∨}^{Y→X}[g]`. The dual kernel has fibers
    /// `r·e^{−D_Y}` on `Y` and `r·e^{−D_X}` on `X`.
    pub fn quasi_inverse(&self) -> QuasiInverse {
        let spec = Self {
            src: self.dst.clone(),
            dst: self.src.clone(),
            r: self.r,
            d_x: -&self.d_y,
            d_y: -&self.d_x,
        };
        QuasiInverse {
            spec,
            shift: self.g() as i64,
        }
    }

    /// Checks `⟨Φ_{E_L}(u), v⟩_X = ⟨u, Φ(v)⟩_Y` with `Φ_{E_L}` the shifted
    /// quasi-inverse.
    pub fn adjoint_pairing_check(&self, u: &CohClass, v: &CohClass) -> Result<bool> {
        let inv = self.quasi_inverse();
        let left_arg = inv.apply(&ShiftedClass::new(u.clone(), 0))?.flatten();
        let lhs = left_arg.mukai_pairing(v)?;
        let rhs = u.mukai_pairing(&self.apply(v)?)?;
        Ok(lhs == rhs)
    }

    pub fn gamma_action(&self, i: usize) -> Result<GammaAction> {
        if i > self.g() {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: format!("{i} > g = {}", self.g()),
            });
        }
        let r = int(self.r as i64);
        Ok(GammaAction {
            forward: r.clone(),
            backward: &r * &r * &r,
            dual_degree: &r * &r * self.src.n(),
        })
    }

    /// Whether `−c_1(Ξ(L))` is ample for `L` numerically `e^{mℓ_X}`.
    pub fn polarization_image_check(&self, m: &Q) -> Result<bool> {
        Ok(self.polarization_image(m)?.ample)
    }

    pub fn polarization_image(&self, m: &Q) -> Result<PolarizationImage> {
        if !m.is_positive() {
            return Err(Error::OutOfRange {
                what: "polarization multiple",
                detail: format!("m must be positive, got {}", rational::format_short(m)),
            });
        }
        let image = self.xi_image(&CohClass::exp_div(&self.src, m))?;
        let c1 = image.coeff(1).clone();
        Ok(PolarizationImage {
            ample: c1.is_negative(),
            rank: image.coeff(0).clone(),
            image,
            c1,
        })
    }
}

impl fmt::Display for FMTransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Phi: {} -> {} (r={}, dX={}, dY={})",
            self.src,
            self.dst,
            self.r,
            rational::format_short(&self.d_x),
            rational::format_short(&self.d_y)
        )
    }
}

/// A class together with a homological shift `[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedClass {
    pub cls: CohClass,
    pub shift: i64,
}

impl ShiftedClass {
    pub fn new(cls: CohClass, shift: i64) -> Self {
        Self { cls, shift }
    }

    /// The class in cohomology: `[k]` acts as `(−1)^k`.
    pub fn flatten(&self) -> CohClass {
        if self.shift.rem_euclid(2) == 0 {
            self.cls.clone()
        } else {
            self.cls.neg()
        }
    }
}

/// Reverse transform plus the shift that makes it a quasi-inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiInverse {
    pub spec: FMTransformSpec,
    pub shift: i64,
}

impl QuasiInverse {
    /// Applies the reverse transform and records the shift.
    pub fn apply(&self, e: &ShiftedClass) -> Result<ShiftedClass> {
        Ok(ShiftedClass::new(
            self.spec.apply(&e.cls)?,
            e.shift + self.shift,
        ))
    }
}

/// Scalars by which `Γ` and `Γ̂` act on `ℓ^i`, and the degree of `ℓ_Ŷ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaAction {
    pub forward: Q,
    pub backward: Q,
    pub dual_degree: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizationImage {
    pub image: CohClass,
    pub rank: Q,
    pub c1: Q,
    pub ample: bool,
}
