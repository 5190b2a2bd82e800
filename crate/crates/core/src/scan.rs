//! Wall-and-chamber scanning over the `(b, t)` upper half-plane.
//!
//! The charge `Z^{(k)}_{bℓ+itℓ}(v)` is a polynomial in `b` and `t`, so the
//! wall between `v` and a candidate `w`,
//! `Re Z(w)·Im Z(v) − Re Z(v)·Im Z(w) = 0`, is a real algebraic curve. The
//! scanner expands that polynomial once, evaluates it exactly at every
//! rational grid node, and reports the cells that contain a zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cohlattice::{AbelianContext, CohClass};
use crate::error::{Error, Result};
use crate::rational::{self, binomial, factorial, int, Q};

/// Polynomial in `b` and `t` with rational coefficients, keyed by
/// `(deg_b, deg_t)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(usize, usize), Q>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, deg: (usize, usize), c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(deg).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&deg);
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&d, c) in &other.terms {
            out.add_term(d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> Poly2 {
        let mut out = Poly2::zero();
        for (&d, c) in &self.terms {
            out.add_term(d, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(p1, q1), a) in &self.terms {
            for (&(p2, q2), b) in &other.terms {
                out.add_term((p1 + p2, q1 + q2), a * b);
            }
        }
        out
    }

    pub fn eval(&self, b: &Q, t: &Q) -> Q {
        self.terms
            .iter()
            .map(|(&(p, q), c)| c * rational::pow(b, p) * rational::pow(t, q))
            .sum()
    }

    fn degree_t(&self) -> usize {
        self.terms.keys().map(|&(_, q)| q).max().unwrap_or(0)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(p, q), c)) in self.terms.iter().rev().enumerate() {
            match (n, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}", rational::format_short(&c.abs()))?;
            for (var, e) in [("b", p), ("t", q)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{var}")?,
                    _ => write!(f, "*{var}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Real and imaginary parts of `Z^{(k)}_{bℓ+itℓ}(e)` as polynomials in `(b, t)`.
pub fn charge_polynomials(ctx: &AbelianContext, k: usize, e: &CohClass) -> Result<(Poly2, Poly2)> {
    ctx.ensure_same(e.ctx())?;
    let g = ctx.g();
    if k == 0 || k > g {
        return Err(Error::OutOfRange {
            what: "truncation level",
            detail: format!("k = {k} not in 1..={g}"),
        });
    }
    // ∫ e^{−(b+it)ℓ}·ch_{≤k} = n·Σ_j c_j·(−1)^m/m!·Σ_s C(m,s) b^{m−s} (it)^s, m = g − j.
    let (mut re, mut im) = (Poly2::zero(), Poly2::zero());
    for (j, c) in e.coeffs().iter().enumerate().take(k + 1) {
        if c.is_zero() {
            continue;
        }
        let m = g - j;
        let base = c * rational::sign_power(m) / factorial(m) * ctx.n();
        for s in 0..=m {
            let coef = &base * binomial(m, s);
            match s % 4 {
                0 => re.add_term((m - s, s), coef),
                1 => im.add_term((m - s, s), coef),
                2 => re.add_term((m - s, s), -coef),
                _ => im.add_term((m - s, s), -coef),
            }
        }
    }
    // Multiply by −i^{g−k}.
    let (re, im) = match (g - k) % 4 {
        0 => (re, im),
        1 => (im.scale(&-Q::one()), re),
        2 => (re.scale(&-Q::one()), im.scale(&-Q::one())),
        _ => (im, re.scale(&-Q::one())),
    };
    Ok((re.scale(&-Q::one()), im.scale(&-Q::one())))
}

/// `Re Z(w)·Im Z(v) − Re Z(v)·Im Z(w)`.
pub fn wall_polynomial(
    ctx: &AbelianContext,
    k: usize,
    v: &CohClass,
    w: &CohClass,
) -> Result<Poly2> {
    let (vr, vi) = charge_polynomials(ctx, k, v)?;
    let (wr, wi) = charge_polynomials(ctx, k, w)?;
    Ok(wr.mul(&vi).sub(&vr.mul(&wi)))
}

#[derive(Clone, Debug)]
pub struct ScanRequest {
    pub ctx: Arc<AbelianContext>,
    pub k: usize,
    pub v: CohClass,
    pub walls: Vec<CohClass>,
    pub b_range: (Q, Q),
    pub t_range: (Q, Q),
    /// Grid nodes along `b` and `t`.
    pub resolution: (usize, usize),
}

impl ScanRequest {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| {
            Err(Error::OutOfRange {
                what: "scan request",
                detail,
            })
        };
        if !self.t_range.0.is_positive() {
            return bad("t-range must be strictly positive".into());
        }
        if self.t_range.1 <= self.t_range.0 || self.b_range.1 <= self.b_range.0 {
            return bad("ranges must be non-empty intervals lo < hi".into());
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return bad("resolution must be at least 2 along each axis".into());
        }
        if self.k == 0 || self.k > self.ctx.g() {
            return bad(format!("k = {} not in 1..={}", self.k, self.ctx.g()));
        }
        self.ctx.ensure_same(self.v.ctx())?;
        for w in &self.walls {
            self.ctx.ensure_same(w.ctx())?;
        }
        Ok(())
    }

    pub fn b_step(&self) -> Q {
        (&self.b_range.1 - &self.b_range.0) / int(self.resolution.0 as i64 - 1)
    }

    pub fn t_step(&self) -> Q {
        (&self.t_range.1 - &self.t_range.0) / int(self.resolution.1 as i64 - 1)
    }

    pub fn b_nodes(&self) -> Vec<Q> {
        let step = self.b_step();
        (0..self.resolution.0)
            .map(|i| &self.b_range.0 + &step * int(i as i64))
            .collect()
    }

    pub fn t_nodes(&self) -> Vec<Q> {
        let step = self.t_step();
        (0..self.resolution.1)
            .map(|j| &self.t_range.0 + &step * int(j as i64))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallInfo {
    pub index: usize,
    pub class: CohClass,
    pub polynomial: Poly2,
    /// The wall polynomial vanishes identically.
    pub trivial: bool,
    pub cells: usize,
}

/// A grid cell `[b, b + Δb] × [t, t + Δt]` containing a zero of the wall polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallSample {
    pub w_index: usize,
    pub b: Q,
    pub t: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallDataset {
    pub k: usize,
    pub v: CohClass,
    pub b_range: (Q, Q),
    pub t_range: (Q, Q),
    pub resolution: (usize, usize),
    pub b_step: Q,
    pub t_step: Q,
    pub walls: Vec<WallInfo>,
    pub samples: Vec<WallSample>,
    /// `Z(v) = 0` at every grid node.
    pub degenerate_v: bool,
}

/// Least common multiple of the denominators of `xs`.
fn common_denominator<'a>(xs: impl Iterator<Item = &'a Q>) -> BigInt {
    xs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    }
}

/// `Σ e_c·T^c·d^{C−c}` in `i128`, or `None` on overflow.
fn horner_i128(e: &[i128], t: i128, d: i128) -> Option<i128> {
    let mut acc = *e.last()?;
    let mut d_pow: i128 = 1;
    for c in e[..e.len() - 1].iter().rev() {
        d_pow = d_pow.checked_mul(d)?;
        acc = acc.checked_mul(t)?.checked_add(c.checked_mul(d_pow)?)?;
    }
    Some(acc)
}

fn horner_big(e: &[BigInt], t: &BigInt, d: &BigInt) -> BigInt {
    let mut acc = e.last().cloned().unwrap_or_default();
    let mut d_pow = BigInt::one();
    for c in e[..e.len() - 1].iter().rev() {
        d_pow *= d;
        acc = acc * t + c * &d_pow;
    }
    acc
}

/// Signs of a polynomial on the grid, row-major in `b`.
///
/// Denominators are cleared first: with `b = B/d_b`, `t = T/d_t` and `L` the
/// coefficient denominator, `L·d_b^{A}·d_t^{C}·P(b, t)` is an integer
/// polynomial in `(B, T)` with the same sign. Evaluation runs in `i128` and
/// falls back to big integers on overflow.
fn grid_signs(poly: &Poly2, b_nodes: &[Q], t_nodes: &[Q]) -> Vec<Vec<i8>> {
    if poly.is_zero() {
        return vec![vec![0; t_nodes.len()]; b_nodes.len()];
    }
    let db = common_denominator(b_nodes.iter());
    let dt = common_denominator(t_nodes.iter());
    let l = common_denominator(poly.terms.values());
    let deg_b = poly.terms.keys().map(|&(p, _)| p).max().unwrap_or(0);
    let deg_t = poly.degree_t();
    // Integer coefficients L·c·d_b^{A−a}, indexed [c][a]; the d_t powers are
    // applied during Horner evaluation.
    let mut coeffs = vec![vec![BigInt::zero(); deg_b + 1]; deg_t + 1];
    for (&(a, c), q) in &poly.terms {
        let scaled = q * Q::from_integer(l.clone());
        coeffs[c][a] = scaled.to_integer() * Pow::pow(&db, deg_b - a);
    }
    let t_big: Vec<BigInt> = t_nodes
        .iter()
        .map(|t| (t * Q::from_integer(dt.clone())).to_integer())
        .collect();
    let t_small: Vec<Option<i128>> = t_big.iter().map(|t| t.to_i128()).collect();
    let dt_small = dt.to_i128();

    b_nodes
        .par_iter()
        .map(|b| {
            let big_b = (b * Q::from_integer(db.clone())).to_integer();
            let e: Vec<BigInt> = coeffs
                .iter()
                .map(|row| {
                    let mut acc = BigInt::zero();
                    for c in row.iter().rev() {
                        acc = acc * &big_b + c;
                    }
                    acc
                })
                .collect();
            let e_small: Option<Vec<i128>> = e.iter().map(|x| x.to_i128()).collect();
            t_big
                .iter()
                .zip(&t_small)
                .map(|(t, ts)| {
                    let fast = match (&e_small, ts, dt_small) {
                        (Some(es), Some(ts), Some(d)) => horner_i128(es, *ts, d),
                        _ => None,
                    };
                    match fast {
                        Some(v) => v.signum() as i8,
                        None => sign_of(&horner_big(&e, t, &dt)),
                    }
                })
                .collect()
        })
        .collect()
}

/// A cell contains a zero when its corners take both signs or one corner vanishes.
pub fn cell_has_zero(corners: [i8; 4]) -> bool {
    corners.contains(&0) || (corners.contains(&1) && corners.contains(&-1))
}

pub fn scan_walls(req: &ScanRequest) -> Result<WallDataset> {
    req.validate()?;
    let b_nodes = req.b_nodes();
    let t_nodes = req.t_nodes();

    let (vr, vi) = charge_polynomials(&req.ctx, req.k, &req.v)?;
    let degenerate_v = {
        let re = grid_signs(&vr, &b_nodes, &t_nodes);
        let im = grid_signs(&vi, &b_nodes, &t_nodes);
        re.iter()
            .flatten()
            .chain(im.iter().flatten())
            .all(|&s| s == 0)
    };

    let mut walls = Vec::with_capacity(req.walls.len());
    let mut samples = Vec::new();
    for (index, w) in req.walls.iter().enumerate() {
        let polynomial = wall_polynomial(&req.ctx, req.k, &req.v, w)?;
        let trivial = polynomial.is_zero();
        let mut cells = 0;
        if !trivial {
            let signs = grid_signs(&polynomial, &b_nodes, &t_nodes);
            for i in 0..b_nodes.len() - 1 {
                for j in 0..t_nodes.len() - 1 {
                    let corners = [
                        signs[i][j],
                        signs[i + 1][j],
                        signs[i][j + 1],
                        signs[i + 1][j + 1],
                    ];
                    if cell_has_zero(corners) {
                        cells += 1;
                        samples.push(WallSample {
                            w_index: index,
                            b: b_nodes[i].clone(),
                            t: t_nodes[j].clone(),
                        });
                    }
                }
            }
        }
        walls.push(WallInfo {
            index,
            class: w.clone(),
            polynomial,
            trivial,
            cells,
        });
    }

    Ok(WallDataset {
        k: req.k,
        v: req.v.clone(),
        b_range: req.b_range.clone(),
        t_range: req.t_range.clone(),
        resolution: req.resolution,
        b_step: req.b_step(),
        t_step: req.t_step(),
        walls,
        samples,
        degenerate_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Real;
    use crate::rational::frac;
    use crate::stability::central_charge;

    fn ctx(g: usize, n: i64) -> Arc<AbelianContext> {
        AbelianContext::new(g, int(n), "X").unwrap()
    }

    fn request(
        x: &Arc<AbelianContext>,
        v: CohClass,
        walls: Vec<CohClass>,
        res: usize,
    ) -> ScanRequest {
        ScanRequest {
            ctx: x.clone(),
            k: x.g(),
            v,
            walls,
            b_range: (int(-2), int(2)),
            t_range: (frac(1, 4), int(2)),
            resolution: (res, res),
        }
    }

    #[test]
    fn polynomials_agree_with_direct_charge() {
        let x = ctx(3, 6);
        let e = CohClass::parse(&x, "2,-1/3,5/4,7").unwrap();
        for k in 1..=3 {
            let (re, im) = charge_polynomials(&x, k, &e).unwrap();
            for (b, t) in [(frac(1, 2), int(3)), (int(-2), frac(2, 7))] {
                let z = central_charge(
                    &x,
                    k,
                    &Real::rational(b.clone()),
                    &Real::rational(t.clone()),
                    &e,
                )
                .unwrap();
                assert_eq!(z.re.as_rational().unwrap(), &re.eval(&b, &t), "k={k}");
                assert_eq!(z.im.as_rational().unwrap(), &im.eval(&b, &t), "k={k}");
            }
        }
    }

    #[test]
    fn self_wall_is_trivial() {
        let x = ctx(2, 2);
        let v = CohClass::parse(&x, "1,1/2,-1").unwrap();
        let ds = scan_walls(&request(&x, v.clone(), vec![v], 9)).unwrap();
        assert!(ds.walls[0].trivial);
        assert!(ds.samples.is_empty());
    }

    #[test]
    fn structure_sheaf_against_point_has_wall_at_b_zero() {
        let x = ctx(2, 2);
        let v = CohClass::structure_sheaf(&x);
        let w = CohClass::skyscraper(&x);
        let poly = wall_polynomial(&x, 2, &v, &w).unwrap();
        // Z(O) = t² − b² − 2ibt, Z(O_x) = −1: the wall is Im Z(O) = 0, i.e. 2bt = 0.
        let mut expected = Poly2::zero();
        expected.add_term((1, 1), int(2));
        assert_eq!(poly, expected);
        let ds = scan_walls(&request(&x, v, vec![w], 9)).unwrap();
        assert!(!ds.samples.is_empty());
        assert!(ds
            .samples
            .iter()
            .all(|s| s.b <= int(0) && &s.b + &ds.b_step >= int(0)));
        // Every t-row has the line b = 0.
        assert_eq!(ds.samples.len(), 2 * 8);
    }

    #[test]
    fn scaling_candidate_preserves_wall_set() {
        let x = ctx(2, 2);
        let v = CohClass::parse(&x, "2,1,-1/2").unwrap();
        let w = CohClass::parse(&x, "1,-1,1/3").unwrap();
        let a = scan_walls(&request(&x, v.clone(), vec![w.clone()], 21)).unwrap();
        let b = scan_walls(&request(&x, v, vec![w.scale(&int(2))], 21)).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn empty_candidate_list() {
        let x = ctx(2, 2);
        let ds = scan_walls(&request(&x, CohClass::structure_sheaf(&x), vec![], 5)).unwrap();
        assert!(ds.walls.is_empty() && ds.samples.is_empty());
    }

    #[test]
    fn degenerate_class_is_flagged() {
        let x = ctx(2, 2);
        let ds = scan_walls(&request(
            &x,
            CohClass::zero(&x),
            vec![CohClass::skyscraper(&x)],
            5,
        ))
        .unwrap();
        assert!(ds.degenerate_v);
        assert!(ds.walls[0].trivial);
    }

    #[test]
    fn request_validation() {
        let x = ctx(2, 2);
        let mut req = request(&x, CohClass::structure_sheaf(&x), vec![], 5);
        req.t_range = (int(0), int(1));
        assert!(scan_walls(&req).is_err());
        let mut req = request(&x, CohClass::structure_sheaf(&x), vec![], 1);
        req.resolution = (1, 5);
        assert!(scan_walls(&req).is_err());
        let mut req = request(&x, CohClass::structure_sheaf(&x), vec![], 5);
        req.b_range = (int(1), int(1));
        assert!(scan_walls(&req).is_err());
    }

    #[test]
    fn polynomial_display() {
        let mut p = Poly2::zero();
        p.add_term((1, 1), int(-2));
        p.add_term((0, 2), frac(1, 2));
        p.add_term((0, 0), int(3));
        assert_eq!(p.to_string(), "-2*b*t + 1/2*t^2 + 3");
        assert_eq!(Poly2::zero().to_string(), "0");
    }

    #[test]
    fn integer_grid_signs_match_rational_evaluation() {
        let mut p = Poly2::zero();
        p.add_term((2, 1), frac(3, 7));
        p.add_term((0, 3), frac(-5, 2));
        p.add_term((1, 0), int(4));
        p.add_term((0, 0), frac(1, 9));
        let b_nodes: Vec<Q> = (0..13).map(|i| frac(-3, 2) + frac(i, 4)).collect();
        let t_nodes: Vec<Q> = (0..11).map(|j| frac(1, 10) + frac(j, 3)).collect();
        let signs = grid_signs(&p, &b_nodes, &t_nodes);
        for (i, b) in b_nodes.iter().enumerate() {
            for (j, t) in t_nodes.iter().enumerate() {
                let v = p.eval(b, t);
                let expected = if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                };
                assert_eq!(signs[i][j], expected, "b = {b}, t = {t}");
            }
        }
    }

    #[test]
    fn big_integer_fallback() {
        let mut p = Poly2::zero();
        p.add_term((6, 6), frac(1, 1_000_000_007));
        p.add_term((0, 0), int(-1));
        let b_nodes = vec![frac(999_983, 7), frac(1, 999_979)];
        let t_nodes = vec![frac(1_000_003, 11), frac(1, 13)];
        let signs = grid_signs(&p, &b_nodes, &t_nodes);
        for (i, b) in b_nodes.iter().enumerate() {
            for (j, t) in t_nodes.iter().enumerate() {
                let v = p.eval(b, t);
                assert_eq!(signs[i][j], if v.is_positive() { 1 } else { -1 });
            }
        }
    }
}
