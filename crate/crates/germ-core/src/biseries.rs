//! Truncated power series in two variables (x, y) over a field context.
//!
//! Terms live in a sparse map keyed by exponent pairs; the precision
//! bound is on total degree: every monomial x^i y^j with i + j < prec is
//! known. The blow-up substitution x -> x*y maps the known region into
//! itself, so it preserves total-degree precision exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ffield::{Embedding, FieldCtx, FieldElt};
use crate::series::{sadd, Series1, PREC_EXACT};

/// Two-variable series with nonnegative exponents and total-degree precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    ctx: FieldCtx,
    terms: BTreeMap<(i64, i64), FieldElt>,
    prec: i64,
}

impl BiSeries {
    /// Build from raw terms, dropping zeros and anything beyond precision.
    pub fn new(ctx: FieldCtx, terms: BTreeMap<(i64, i64), FieldElt>, prec: i64) -> Self {
        let mut s = BiSeries { ctx, terms, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let prec = self.prec;
        self.terms.retain(|&(i, j), c| {
            assert!(i >= 0 && j >= 0, "negative exponent in a two-variable series");
            !c.is_zero() && (prec >= PREC_EXACT || i + j < prec)
        });
    }

    /// Zero, known below the given total degree.
    pub fn zero(ctx: &FieldCtx, prec: i64) -> Self {
        BiSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            prec,
        }
    }

    /// Exact constant.
    pub fn constant(c: FieldElt) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// Exact monomial c * x^i y^j.
    pub fn monomial(c: FieldElt, i: i64, j: i64) -> Self {
        let ctx = c.ctx().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiSeries::new(ctx, terms, PREC_EXACT)
    }

    /// Owning context.
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Total-degree precision bound.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when every coefficient is known.
    pub fn is_exact(&self) -> bool {
        self.prec == PREC_EXACT
    }

    /// Stored nonzero terms.
    pub fn iter_terms(&self) -> impl Iterator<Item = (&(i64, i64), &FieldElt)> {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Total-degree valuation; None when zero to precision.
    pub fn ord(&self) -> Option<i64> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    /// Valuation, or the precision bound when zero to precision.
    pub fn ord_or_prec(&self) -> i64 {
        self.ord().unwrap_or(self.prec)
    }

    /// True when no known term is nonzero.
    pub fn is_zero_to_prec(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of x^i y^j; the monomial must be inside the known region.
    pub fn coeff(&self, i: i64, j: i64) -> FieldElt {
        assert!(
            i + j < self.prec,
            "coefficient of x^{i} y^{j} is beyond the known total degree"
        );
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    /// Value at the origin (coefficient of 1).
    pub fn eval_origin(&self) -> FieldElt {
        assert!(self.prec > 0, "origin value requested at zero precision");
        self.terms
            .get(&(0, 0))
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    /// True when the constant term is nonzero (invertible).
    pub fn is_unit(&self) -> bool {
        self.prec > 0 && self.terms.get(&(0, 0)).map_or(false, |c| !c.is_zero())
    }

    fn same_ctx(&self, other: &Self) {
        assert!(self.ctx == other.ctx, "series over different field contexts");
    }

    /// Sum; precision is the weaker bound.
    pub fn add(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let prec = self.prec.min(other.prec);
        let mut terms = self.terms.clone();
        for (&k, c) in &other.terms {
            let entry = terms.entry(k).or_insert_with(|| self.ctx.zero());
            *entry = entry.add(c);
        }
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        BiSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, c.neg()))
                .collect(),
            prec: self.prec,
        }
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product; known below min(prec_a + ord_b, prec_b + ord_a).
    pub fn mul(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let prec = sadd(self.prec, other.ord_or_prec())
            .min(sadd(other.prec, self.ord_or_prec()));
        if self.terms.is_empty() || other.terms.is_empty() {
            return BiSeries::new(self.ctx.clone(), BTreeMap::new(), prec);
        }
        // Supports are typically dense triangles below the precision line,
        // so accumulate over a bounded grid instead of a map when the grid
        // is not much larger than the work itself; fall back to the map
        // for very sparse high-degree supports.
        let bound = |s: &Self, pick: fn(&(i64, i64)) -> i64| -> i64 {
            s.terms.keys().map(pick).max().unwrap_or(0)
        };
        let mut imax = bound(self, |k| k.0) + bound(other, |k| k.0);
        let mut jmax = bound(self, |k| k.1) + bound(other, |k| k.1);
        if prec < PREC_EXACT {
            imax = imax.min(prec - 1);
            jmax = jmax.min(prec - 1);
        }
        let cells = (imax + 1).saturating_mul(jmax + 1);
        let pairs = (self.terms.len() as i64).saturating_mul(other.terms.len() as i64);
        let width = self.ctx.raw_width() as i64;
        if imax >= 0 && jmax >= 0 && cells <= (8 * pairs + 256).min((1 << 22) / width) {
            return self.mul_grid(other, prec, imax, jmax);
        }
        let mut terms: BTreeMap<(i64, i64), FieldElt> = BTreeMap::new();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &other.terms {
                let k = (i1 + i2, j1 + j2);
                if prec < PREC_EXACT && k.0 + k.1 >= prec {
                    continue;
                }
                let entry = terms.entry(k).or_insert_with(|| self.ctx.zero());
                *entry = entry.add(&a.mul(b));
            }
        }
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Grid-accumulated product over exponents [0, imax] x [0, jmax].
    /// Prime fields accumulate raw residues; extensions accumulate
    /// elements, but both avoid map lookups in the inner loop.
    fn mul_grid(&self, other: &Self, prec: i64, imax: i64, jmax: i64) -> Self {
        let w = (jmax + 1) as usize;
        let idx = |i: i64, j: i64| -> usize { i as usize * w + j as usize };
        let n_cells = (imax + 1) as usize * w;
        let mut terms: BTreeMap<(i64, i64), FieldElt> = BTreeMap::new();
        if self.ctx.degree() == 1 {
            let p = self.ctx.p() as u128;
            let mut grid: Vec<u64> = vec![0; n_cells];
            for (&(i1, j1), a) in &self.terms {
                let av = a.coeffs()[0] as u128;
                for (&(i2, j2), b) in &other.terms {
                    let (i, j) = (i1 + i2, j1 + j2);
                    if i > imax || j > jmax || (prec < PREC_EXACT && i + j >= prec) {
                        continue;
                    }
                    let cell = &mut grid[idx(i, j)];
                    *cell = ((*cell as u128 + av * b.coeffs()[0] as u128) % p) as u64;
                }
            }
            for i in 0..=imax {
                for j in 0..=jmax {
                    let v = grid[idx(i, j)];
                    if v != 0 {
                        terms.insert((i, j), self.ctx.from_scalar(v));
                    }
                }
            }
        } else {
            // Extension field: accumulate unreduced coefficient products
            // per cell and reduce each cell once at the end, so the inner
            // loop does no allocation and no modular arithmetic.
            let width = self.ctx.raw_width();
            let mut grid: Vec<u128> = vec![0; n_cells * width];
            for (&(i1, j1), a) in &self.terms {
                for (&(i2, j2), b) in &other.terms {
                    let (i, j) = (i1 + i2, j1 + j2);
                    if i > imax || j > jmax || (prec < PREC_EXACT && i + j >= prec) {
                        continue;
                    }
                    let base = idx(i, j) * width;
                    a.mul_into_raw(b, &mut grid[base..base + width]);
                }
            }
            for i in 0..=imax {
                for j in 0..=jmax {
                    let base = idx(i, j) * width;
                    let slots = &grid[base..base + width];
                    if slots.iter().any(|&x| x != 0) {
                        let v = self.ctx.raw_reduce(slots);
                        if !v.is_zero() {
                            terms.insert((i, j), v);
                        }
                    }
                }
            }
        }
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Scale by a field element.
    pub fn scale(&self, c: &FieldElt) -> Self {
        if c.is_zero() {
            return BiSeries::zero(&self.ctx, self.prec);
        }
        BiSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&k, a)| (k, a.mul(c)))
                .collect(),
            prec: self.prec,
        }
    }

    /// p-th power, computed as the Frobenius endomorphism of k[[x,y]]:
    /// in characteristic p, (sum c x^i y^j)^p = sum c^p x^{pi} y^{pj}.
    /// A term unknown beyond total degree N contributes only beyond pN,
    /// so the result is guaranteed below p times the input precision.
    pub fn pow_char(&self) -> Self {
        let p = self.ctx.p() as i64;
        let prec = if self.is_exact() {
            PREC_EXACT
        } else {
            self.prec.saturating_mul(p).min(PREC_EXACT - 1)
        };
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i * p, j * p), c.pow(p as u128)))
            .collect();
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Multiply by x^i y^j.
    pub fn mul_monomial(&self, i: i64, j: i64) -> Self {
        assert!(i >= 0 && j >= 0);
        BiSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + i, b + j), c.clone()))
                .collect(),
            prec: sadd(self.prec, i + j),
        }
    }

    /// Weaken the precision bound.
    pub fn truncate(&self, new_prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(new_prec);
        s.normalize();
        s
    }

    /// Inverse of a unit via the geometric series; precision preserved.
    pub fn invert_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit(
                "two-variable series has no invertible constant term".into(),
            ));
        }
        if self.is_exact() && self.terms.len() > 1 {
            return Err(Error::Precision(
                "inverse of an exact non-constant series is infinite; truncate to a working precision first".into(),
            ));
        }
        let c0 = self.eval_origin();
        let c0inv = c0.inv()?;
        if self.terms.len() == 1 {
            return Ok(BiSeries::new(
                self.ctx.clone(),
                BTreeMap::from([((0, 0), c0inv)]),
                self.prec,
            ));
        }
        // self = c0 (1 - t) with ord(t) >= 1; inverse = c0^{-1} sum t^k.
        let t = BiSeries::constant(self.ctx.one())
            .sub(&self.scale(&c0inv))
            .truncate(self.prec);
        let mut acc = BiSeries::constant(self.ctx.one()).truncate(self.prec);
        let mut pw = BiSeries::constant(self.ctx.one()).truncate(self.prec);
        for _ in 1..self.prec.max(1) {
            pw = pw.mul(&t);
            if pw.is_zero_to_prec() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&c0inv))
    }

    /// Blow-up substitution x -> x*y: x^i y^j becomes x^i y^{i+j}.
    /// Total-degree precision is preserved (the preimage of any known
    /// output monomial is a known input monomial).
    pub fn substitute_blowup(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i, i + j), c.clone()))
            .collect();
        BiSeries::new(self.ctx.clone(), terms, self.prec)
    }

    /// Substitute x -> x^p (exponent dilation in the first variable).
    pub fn substitute_x_pow(&self, p: i64) -> Self {
        assert!(p >= 1);
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i * p, j), c.clone()))
            .collect();
        BiSeries::new(self.ctx.clone(), terms, self.prec)
    }

    /// Exact division by y^k; errors if any known term has a smaller
    /// y-exponent.
    pub fn divide_out_y(&self, k: i64) -> Result<Self> {
        assert!(k >= 0);
        if self.terms.keys().any(|&(_, j)| j < k) {
            return Err(Error::YDivisibility(k));
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(i, j), c)| ((i, j - k), c.clone()))
            .collect();
        Ok(BiSeries::new(
            self.ctx.clone(),
            terms,
            if self.is_exact() { PREC_EXACT } else { self.prec - k },
        ))
    }

    /// The coefficient of y^j as a series in x. Known below total prec - j.
    pub fn y_slice(&self, j: i64) -> Series1 {
        let prec = if self.is_exact() {
            PREC_EXACT
        } else {
            self.prec - j
        };
        let mut lo = i64::MAX;
        let mut entries: Vec<(i64, FieldElt)> = Vec::new();
        for (&(i, jj), c) in &self.terms {
            if jj == j {
                lo = lo.min(i);
                entries.push((i, c.clone()));
            }
        }
        if entries.is_empty() {
            return Series1::zero(&self.ctx, prec);
        }
        let hi = entries.iter().map(|&(i, _)| i).max().unwrap();
        let mut coeffs = vec![self.ctx.zero(); (hi - lo + 1) as usize];
        for (i, c) in entries {
            coeffs[(i - lo) as usize] = c;
        }
        Series1::new(self.ctx.clone(), lo, coeffs, prec)
    }

    /// Largest stored y-exponent, if any term is known.
    pub fn max_y_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Largest stored x-exponent, if any term is known.
    pub fn max_x_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    /// Build from a one-variable series in x (y-degree zero).
    pub fn from_series_x(s: &Series1) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in s.iter_terms() {
            assert!(e >= 0, "x-series with a pole cannot become a power series");
            terms.insert((e, 0), c.clone());
        }
        BiSeries::new(s.ctx().clone(), terms, s.prec())
    }

    /// Build from a one-variable series interpreted in y.
    pub fn from_series_y(s: &Series1) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in s.iter_terms() {
            assert!(e >= 0, "y-series with a pole cannot become a power series");
            terms.insert((0, e), c.clone());
        }
        BiSeries::new(s.ctx().clone(), terms, s.prec())
    }

    /// Partial derivative in x; costs one order of total degree.
    pub fn derive_x(&self) -> Self {
        let p = self.ctx.p();
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, _), _)| i > 0)
            .map(|(&(i, j), c)| ((i - 1, j), c.scale((i % p as i64) as u64)))
            .collect();
        let prec = if self.is_exact() { PREC_EXACT } else { self.prec - 1 };
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Partial derivative in y; costs one order of total degree.
    pub fn derive_y(&self) -> Self {
        let p = self.ctx.p();
        let terms = self
            .terms
            .iter()
            .filter(|(&(_, j), _)| j > 0)
            .map(|(&(i, j), c)| ((i, j - 1), c.scale((j % p as i64) as u64)))
            .collect();
        let prec = if self.is_exact() { PREC_EXACT } else { self.prec - 1 };
        BiSeries::new(self.ctx.clone(), terms, prec)
    }

    /// Map all coefficients through a field embedding.
    pub fn map_ctx(&self, emb: &Embedding) -> Self {
        BiSeries {
            ctx: emb.to_ctx().clone(),
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, emb.map(c)))
                .collect(),
            prec: self.prec,
        }
    }

    /// Equality of all coefficients below the weaker precision bound.
    pub fn eq_to_joint_prec(&self, other: &Self) -> bool {
        let prec = self.prec.min(other.prec);
        self.truncate(prec) == other.truncate(prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldCtx {
        FieldCtx::prime(5).unwrap()
    }

    fn b(ctx: &FieldCtx, terms: &[(i64, i64, u64)], prec: i64) -> BiSeries {
        let map = terms
            .iter()
            .map(|&(i, j, c)| ((i, j), ctx.from_scalar(c)))
            .collect();
        BiSeries::new(ctx.clone(), map, prec)
    }

    #[test]
    fn blowup_preserves_total_degree_precision() {
        let ctx = f5();
        // f = x^2 + 3xy + y^3, prec 6
        let f = b(&ctx, &[(2, 0, 1), (1, 1, 3), (0, 3, 1)], 6);
        let g = f.substitute_blowup();
        assert_eq!(g.prec(), 6);
        // x^2 -> x^2 y^2, xy -> x y^2, y^3 stays.
        assert_eq!(g.coeff(2, 2), ctx.from_scalar(1));
        assert_eq!(g.coeff(1, 2), ctx.from_scalar(3));
        assert_eq!(g.coeff(0, 3), ctx.from_scalar(1));
    }

    #[test]
    fn blowup_is_multiplicative() {
        let ctx = f5();
        let f = b(&ctx, &[(1, 0, 2), (0, 1, 1), (0, 0, 3)], 7);
        let g = b(&ctx, &[(2, 1, 4), (1, 1, 1), (0, 0, 1)], 7);
        let lhs = f.mul(&g).substitute_blowup();
        let rhs = f.substitute_blowup().mul(&g.substitute_blowup());
        assert!(lhs.eq_to_joint_prec(&rhs));
    }

    #[test]
    fn unit_inverse_round_trip() {
        let ctx = f5();
        let u = b(&ctx, &[(0, 0, 2), (1, 0, 1), (0, 1, 3), (1, 1, 4)], 8);
        let inv = u.invert_unit().unwrap();
        let prod = u.mul(&inv);
        assert!(prod.eq_to_joint_prec(&BiSeries::constant(ctx.one())));
        assert_eq!(prod.prec(), 8);
    }

    #[test]
    fn y_division_checks_support() {
        let ctx = f5();
        let f = b(&ctx, &[(0, 2, 1), (1, 3, 2)], 9);
        let q = f.divide_out_y(2).unwrap();
        assert_eq!(q.prec(), 7);
        assert_eq!(q.coeff(0, 0), ctx.from_scalar(1));
        assert!(matches!(f.divide_out_y(3), Err(Error::YDivisibility(3))));
    }

    #[test]
    fn slices_carry_reduced_precision() {
        let ctx = f5();
        let f = b(&ctx, &[(0, 1, 1), (2, 1, 4), (3, 0, 2)], 10);
        let s1 = f.y_slice(1);
        assert_eq!(s1.prec(), 9);
        assert_eq!(s1.coeff(2), ctx.from_scalar(4));
        let s0 = f.y_slice(0);
        assert_eq!(s0.prec(), 10);
        assert_eq!(s0.coeff(3), ctx.from_scalar(2));
    }
}
