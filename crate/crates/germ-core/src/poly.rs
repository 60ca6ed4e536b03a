//! Dense univariate polynomials over a finite-field context.
//!
//! Provides exact division, gcd, modular powering, distinct-degree
//! analysis, and deterministic root extraction. Root finding uses an
//! equal-degree split with a fixed shift schedule, so results are
//! reproducible bit for bit.

use crate::error::{Error, Result};
use crate::ffield::{Embedding, FieldCtx, FieldElt};

/// Polynomial with dense coefficients from degree 0; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    ctx: FieldCtx,
    coeffs: Vec<FieldElt>,
}

impl Poly {
    /// Build from dense coefficients (trailing zeros trimmed).
    pub fn new(ctx: FieldCtx, mut coeffs: Vec<FieldElt>) -> Self {
        while coeffs.last().map_or(false, FieldElt::is_zero) {
            coeffs.pop();
        }
        Poly { ctx, coeffs }
    }

    /// The zero polynomial.
    pub fn zero(ctx: FieldCtx) -> Self {
        Poly {
            ctx,
            coeffs: Vec::new(),
        }
    }

    /// The monomial c * T^k.
    pub fn monomial(c: FieldElt, k: usize) -> Self {
        let ctx = c.ctx().clone();
        if c.is_zero() {
            return Poly::zero(ctx);
        }
        let mut coeffs = vec![ctx.zero(); k + 1];
        coeffs[k] = c;
        Poly { ctx, coeffs }
    }

    /// Owning context.
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Dense coefficients from degree 0.
    pub fn coeffs(&self) -> &[FieldElt] {
        &self.coeffs
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of T^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> FieldElt {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// Map every coefficient through an embedding.
    pub fn map_ctx(&self, emb: &Embedding) -> Poly {
        Poly {
            ctx: emb.to_ctx().clone(),
            coeffs: self.coeffs.iter().map(|c| emb.map(c)).collect(),
        }
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k).add(&other.coeff(k)));
        }
        Poly::new(self.ctx.clone(), coeffs)
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k).sub(&other.coeff(k)));
        }
        Poly::new(self.ctx.clone(), coeffs)
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.ctx.clone());
        }
        let mut coeffs = vec![self.ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Poly::new(self.ctx.clone(), coeffs)
    }

    /// Scale by a field element.
    pub fn scale(&self, c: &FieldElt) -> Self {
        Poly::new(
            self.ctx.clone(),
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.degree().unwrap();
        let lead_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![self.ctx.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let factor = rem[k].mul(&lead_inv);
            if !factor.is_zero() {
                quo[k - dd] = factor.clone();
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[k - dd + i] = rem[k - dd + i].sub(&factor.mul(c));
                }
            }
            while rem.last().map_or(false, FieldElt::is_zero) {
                rem.pop();
            }
            if rem.len() == k + 1 {
                // Leading term survived only if it was already zero; trim.
                rem.pop();
            }
        }
        Ok((
            Poly::new(self.ctx.clone(), quo),
            Poly::new(self.ctx.clone(), rem),
        ))
    }

    /// Remainder modulo a nonzero divisor.
    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Monic normalization (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.degree() {
            None => self.clone(),
            Some(d) => {
                let inv = self.coeffs[d].inv().expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
        }
    }

    /// Greatest common divisor, monic.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let p = self.ctx.p();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale((k as u64) % p))
            .collect();
        Poly::new(self.ctx.clone(), coeffs)
    }

    /// Evaluate at a point via Horner.
    pub fn eval(&self, x: &FieldElt) -> FieldElt {
        let mut acc = self.ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// self^e modulo a monic polynomial.
    pub fn powmod(&self, mut e: u128, modulus: &Self) -> Result<Self> {
        let mut acc = Poly::monomial(self.ctx.one(), 0);
        let mut b = self.rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b).rem(modulus)?;
            }
            b = b.mul(&b).rem(modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// T^{q^d} mod self, where q = |ctx|, built by iterating the p-power
    /// map so exponents never overflow machine integers.
    fn frobenius_power(&self, d: usize) -> Result<Self> {
        let t = Poly::monomial(self.ctx.one(), 1);
        let p = self.ctx.p() as u128;
        let m = self.ctx.degree();
        let mut acc = t.rem(self)?;
        for _ in 0..(m * d) {
            acc = acc.powmod(p, self)?;
        }
        Ok(acc)
    }

    /// Strip p-th-power structure: when the derivative vanishes the
    /// polynomial is g(T^p) with g recoverable by inverse Frobenius on the
    /// coefficients; roots are preserved. Iterates until the derivative is
    /// nonzero or the degree is zero.
    fn devolve_pth_powers(&self) -> Poly {
        let mut f = self.clone();
        let p = self.ctx.p() as usize;
        loop {
            match f.degree() {
                None | Some(0) => return f,
                Some(_) => {}
            }
            if !f.derivative().is_zero() {
                return f;
            }
            let mut coeffs = Vec::with_capacity(f.coeffs.len() / p + 1);
            for (k, c) in f.coeffs.iter().enumerate() {
                if k % p == 0 {
                    coeffs.push(c.frobenius_inv());
                } else {
                    debug_assert!(c.is_zero());
                }
            }
            f = Poly::new(self.ctx.clone(), coeffs);
        }
    }

    /// Squarefree part: f / gcd(f, f'), with p-th-power layers devolved
    /// first so the result has the same root set, each root simple.
    pub fn squarefree_part(&self) -> Poly {
        let f = self.devolve_pth_powers();
        match f.degree() {
            None | Some(0) => return f,
            Some(_) => {}
        }
        let g = f.gcd(&f.derivative());
        if g.degree() == Some(0) {
            return f.monic();
        }
        let (q, r) = f.div_rem(&g).expect("gcd divides");
        debug_assert!(r.is_zero());
        // The quotient can still carry p-th powers when f mixed separable
        // and inseparable parts; recurse to flush them.
        if q.derivative().is_zero() && q.degree().map_or(false, |d| d > 0) {
            return q.squarefree_part();
        }
        q.monic()
    }

    /// All roots in the coefficient context, distinct and sorted
    /// lexicographically. Deterministic.
    pub fn roots_in_ctx(&self) -> Result<Vec<FieldElt>> {
        if self.is_zero() {
            return Err(Error::BadInput("root finding on the zero polynomial".into()));
        }
        let sf = self.squarefree_part();
        if sf.degree() == Some(0) {
            return Ok(Vec::new());
        }
        // Split part: gcd(sf, T^q - T) has exactly the roots in this field.
        let tq = sf.frobenius_power(1)?;
        let t = Poly::monomial(self.ctx.one(), 1).rem(&sf)?;
        let split = sf.gcd(&tq.sub(&t));
        let mut roots = Vec::new();
        collect_roots(&split, &mut roots)?;
        roots.sort();
        Ok(roots)
    }

    /// Smallest degree of an irreducible factor (distinct-degree scan).
    pub fn min_factor_degree(&self) -> Result<usize> {
        let sf = self.squarefree_part();
        let deg = sf
            .degree()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::BadInput("constant polynomial has no factors".into()))?;
        let r = sf;
        for d in 1..=deg {
            let tqd = r.frobenius_power(d)?;
            let t = Poly::monomial(self.ctx.one(), 1).rem(&r)?;
            let cd = r.gcd(&tqd.sub(&t));
            if cd.degree().map_or(false, |dd| dd > 0) {
                return Ok(d);
            }
            if r.degree() == Some(d) {
                // Remaining factor is irreducible of this degree.
                return Ok(d);
            }
        }
        unreachable!("distinct-degree scan exhausts the degree")
    }

    /// Distinct-degree split of the squarefree part: pairs (d, g_d) where
    /// g_d is the monic product of the irreducible factors of degree d,
    /// in increasing d, constants omitted.
    pub fn distinct_degree_split(&self) -> Result<Vec<(usize, Poly)>> {
        let mut r = self.squarefree_part();
        let mut out = Vec::new();
        let mut d = 0usize;
        while r.degree().map_or(false, |deg| deg > 0) {
            d += 1;
            let deg = r.degree().unwrap();
            if 2 * d > deg {
                // What remains is irreducible of its own degree.
                out.push((deg, r.monic()));
                break;
            }
            let tqd = r.frobenius_power(d)?;
            let t = Poly::monomial(self.ctx.one(), 1).rem(&r)?;
            let gd = r.gcd(&tqd.sub(&t)).monic();
            if gd.degree().map_or(false, |dd| dd > 0) {
                let (q, rem) = r.div_rem(&gd)?;
                debug_assert!(rem.is_zero());
                out.push((d, gd));
                r = q;
            }
        }
        Ok(out)
    }

    /// Lexicographically least root in the smallest field extension that
    /// contains one: returns the root, its context, and the embedding of
    /// the coefficient context into it.
    pub fn least_root_with_extension(&self) -> Result<(FieldElt, FieldCtx, Embedding)> {
        let d = self.min_factor_degree()?;
        if d == 1 {
            let roots = self.roots_in_ctx()?;
            let root = roots.into_iter().min().expect("degree-1 factor has a root");
            return Ok((root, self.ctx.clone(), Embedding::identity(&self.ctx)));
        }
        let (big, emb) = self.ctx.extend(d)?;
        let lifted = self.map_ctx(&emb);
        let roots = lifted.roots_in_ctx()?;
        let root = roots
            .into_iter()
            .min()
            .expect("extension of the minimal factor degree contains a root");
        Ok((root, big, emb))
    }
}

/// Equal-degree splitting of a monic squarefree product of linears.
/// Deterministic: shifts walk the canonical element enumeration and the
/// splitting exponent is (q-1)/2.
fn collect_roots(f: &Poly, out: &mut Vec<FieldElt>) -> Result<()> {
    let ctx = f.ctx().clone();
    match f.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            // Root of c1*T + c0 is -c0/c1.
            let root = f.coeff(0).neg().mul(&f.coeff(1).inv()?);
            out.push(root);
            return Ok(());
        }
        Some(_) => {}
    }
    assert!(ctx.p() > 2, "odd characteristic required for the quadratic split");
    let half = (ctx.order() - 1) / 2;
    let f = f.monic();
    let mut shift_index = 0u128;
    loop {
        let a = ctx.element_from_index(shift_index);
        shift_index += 1;
        // g = (T + a)^{(q-1)/2} - 1 mod f
        let shifted = Poly::new(ctx.clone(), vec![a, ctx.one()]);
        let pw = shifted.powmod(half, &f)?;
        let g = pw.sub(&Poly::monomial(ctx.one(), 0));
        let h = f.gcd(&g);
        let hd = h.degree().unwrap_or(0);
        if hd > 0 && hd < f.degree().unwrap() {
            let (q, r) = f.div_rem(&h)?;
            debug_assert!(r.is_zero());
            collect_roots(&h, out)?;
            collect_roots(&q, out)?;
            return Ok(());
        }
        assert!(
            shift_index < ctx.order() * 2,
            "equal-degree split failed to separate a split polynomial"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldCtx {
        FieldCtx::prime(5).unwrap()
    }

    fn poly_from_scalars(ctx: &FieldCtx, cs: &[u64]) -> Poly {
        Poly::new(
            ctx.clone(),
            cs.iter().map(|&c| ctx.from_scalar(c)).collect(),
        )
    }

    #[test]
    fn division_round_trip() {
        let ctx = f5();
        let a = poly_from_scalars(&ctx, &[1, 2, 3, 4, 1]);
        let b = poly_from_scalars(&ctx, &[2, 0, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn roots_of_split_cubic() {
        let ctx = f5();
        // (T-1)(T-2)(T-3) = T^3 - 6T^2 + 11T - 6 = T^3 + 4T^2 + T + 4 over F_5.
        let f = poly_from_scalars(&ctx, &[4, 1, 4, 1]);
        let roots = f.roots_in_ctx().unwrap();
        let expect: Vec<_> = [1u64, 2, 3].iter().map(|&c| ctx.from_scalar(c)).collect();
        assert_eq!(roots, expect);
    }

    #[test]
    fn irreducible_quadratic_has_no_roots_and_degree_two() {
        let ctx = f5();
        // T^2 + T + 1 is irreducible over F_5.
        let f = poly_from_scalars(&ctx, &[1, 1, 1]);
        assert!(f.roots_in_ctx().unwrap().is_empty());
        assert_eq!(f.min_factor_degree().unwrap(), 2);
        let (root, big, emb) = f.least_root_with_extension().unwrap();
        assert_eq!(big.degree(), 2);
        let lifted = f.map_ctx(&emb);
        assert!(lifted.eval(&root).is_zero());
    }

    #[test]
    fn repeated_roots_are_reported_once() {
        let ctx = f5();
        // (T-2)^2 (T-3)
        let f = poly_from_scalars(&ctx, &[2, 1])
            .mul(&poly_from_scalars(&ctx, &[3, 1]))
            .mul(&poly_from_scalars(&ctx, &[3, 1]));
        let roots = f.roots_in_ctx().unwrap();
        assert_eq!(
            roots,
            vec![ctx.from_scalar(2), ctx.from_scalar(3)]
        );
    }

    #[test]
    fn pth_power_polynomial_roots() {
        let ctx = f5();
        // T^5 - 1 = (T - 1)^5 over F_5.
        let mut cs = vec![0u64; 6];
        cs[0] = 4;
        cs[5] = 1;
        let f = poly_from_scalars(&ctx, &cs);
        assert_eq!(f.roots_in_ctx().unwrap(), vec![ctx.from_scalar(1)]);
    }
}
