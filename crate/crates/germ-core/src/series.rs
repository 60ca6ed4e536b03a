//! Truncated formal (Laurent) series in one variable over a field context.
//!
//! A series stores a valuation, dense coefficients from that valuation,
//! and a precision bound: coefficients of every exponent strictly below
//! the bound are known. Exact polynomials carry the sentinel precision
//! `PREC_EXACT`, and all precision arithmetic saturates there, so
//! polynomials and truncated series share one code path. Every operation
//! propagates the weakest guarantee of its inputs; nothing is ever
//! reported beyond what the inputs support.

use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElt};

/// Sentinel precision for exactly known polynomials. Saturating
/// arithmetic keeps it fixed under shifts and sums.
pub const PREC_EXACT: i64 = i64::MAX / 4;

/// Saturating precision addition, capped at the exact sentinel.
pub(crate) fn sadd(a: i64, b: i64) -> i64 {
    // The exact sentinel is absorbing: shifting or re-indexing a series
    // whose coefficients are all known keeps them all known.
    if a >= PREC_EXACT || b >= PREC_EXACT {
        return PREC_EXACT;
    }
    a.saturating_add(b).min(PREC_EXACT)
}

/// One-variable series with explicit precision.
///
/// Invariants: if `coeffs` is empty the series is zero up to `prec` and
/// `val == prec`; otherwise `coeffs[0]` is nonzero and
/// `val + coeffs.len() <= prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series1 {
    ctx: FieldCtx,
    val: i64,
    coeffs: Vec<FieldElt>,
    prec: i64,
}

impl Series1 {
    /// Build from a valuation and dense coefficients, normalizing.
    pub fn new(ctx: FieldCtx, val: i64, coeffs: Vec<FieldElt>, prec: i64) -> Self {
        let mut s = Series1 {
            ctx,
            val,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        // Drop leading zeros, advancing the valuation.
        let lead = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        // Truncate beyond the precision bound.
        if self.prec < PREC_EXACT {
            let keep = (self.prec - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        // Drop trailing zeros (harmless, keeps representations canonical).
        while self.coeffs.last().map_or(false, FieldElt::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = self.prec;
        }
        assert!(
            self.prec >= self.val || self.coeffs.is_empty(),
            "series precision below its valuation"
        );
    }

    /// Zero, known up to the given precision.
    pub fn zero(ctx: &FieldCtx, prec: i64) -> Self {
        Series1 {
            ctx: ctx.clone(),
            val: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    /// The exact zero polynomial.
    pub fn zero_exact(ctx: &FieldCtx) -> Self {
        Self::zero(ctx, PREC_EXACT)
    }

    /// The exact constant 1.
    pub fn one(ctx: &FieldCtx) -> Self {
        Self::monomial(ctx.one(), 0)
    }

    /// The exact monomial c * x^k (Laurent exponents allowed).
    pub fn monomial(c: FieldElt, k: i64) -> Self {
        let ctx = c.ctx().clone();
        Series1::new(ctx, k, vec![c], PREC_EXACT)
    }

    /// Exact polynomial from dense coefficients starting at x^0.
    pub fn from_poly(ctx: &FieldCtx, coeffs: Vec<FieldElt>) -> Self {
        Series1::new(ctx.clone(), 0, coeffs, PREC_EXACT)
    }

    /// Owning context.
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Precision bound: coefficients below this exponent are known.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when every coefficient is known exactly.
    pub fn is_exact(&self) -> bool {
        self.prec == PREC_EXACT
    }

    /// Valuation, None when the series is zero to its precision.
    pub fn ord(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Valuation, or the precision bound when zero to precision. This is
    /// the exponent below which the series is certainly zero.
    pub fn ord_or_prec(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            self.val
        }
    }

    /// True when zero up to the precision bound.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored terms (exponent, coefficient), nonzero only.
    pub fn iter_terms(&self) -> impl Iterator<Item = (i64, &FieldElt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.val + k as i64, c))
    }

    /// Coefficient of x^k; k must be below the precision bound.
    pub fn coeff(&self, k: i64) -> FieldElt {
        assert!(k < self.prec, "coefficient of x^{k} is beyond the known precision");
        if k < self.val || k - self.val >= self.coeffs.len() as i64 {
            return self.ctx.zero();
        }
        self.coeffs[(k - self.val) as usize].clone()
    }

    /// Constant term; errors if the series has a pole or zero precision.
    pub fn constant_term(&self) -> Result<FieldElt> {
        if let Some(v) = self.ord() {
            if v < 0 {
                return Err(Error::InexactPolarDivision(format!(
                    "series has a pole of order {}",
                    -v
                )));
            }
        }
        if self.prec <= 0 {
            return Err(Error::Precision(
                "constant term requested from a series of nonpositive precision".into(),
            ));
        }
        Ok(self.coeff(0))
    }

    fn same_ctx(&self, other: &Self) {
        assert!(
            self.ctx == other.ctx,
            "series over different field contexts"
        );
    }

    /// Sum; precision is the weaker bound.
    pub fn add(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let prec = self.prec.min(other.prec);
        let lo = self.ord_or_prec().min(other.ord_or_prec()).min(prec);
        if lo >= prec {
            return Series1::zero(&self.ctx, prec);
        }
        // Stored range [lo, hi): hi is the largest stored exponent + 1,
        // clamped at the precision bound. Zero operands contribute nothing.
        let mut hi = lo;
        if !self.coeffs.is_empty() {
            hi = hi.max(self.val + self.coeffs.len() as i64);
        }
        if !other.coeffs.is_empty() {
            hi = hi.max(other.val + other.coeffs.len() as i64);
        }
        hi = hi.min(prec);
        let n = (hi - lo).max(0);
        let mut coeffs = vec![self.ctx.zero(); n as usize];
        for (e, c) in self.iter_terms() {
            if e >= prec {
                break;
            }
            let idx = (e - lo) as usize;
            if idx < coeffs.len() {
                coeffs[idx] = coeffs[idx].add(c);
            }
        }
        for (e, c) in other.iter_terms() {
            if e >= prec {
                break;
            }
            let idx = (e - lo) as usize;
            if idx < coeffs.len() {
                coeffs[idx] = coeffs[idx].add(c);
            }
        }
        Series1::new(self.ctx.clone(), lo, coeffs, prec)
    }

    /// Additive inverse.
    pub fn neg(&self) -> Self {
        Series1 {
            ctx: self.ctx.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(FieldElt::neg).collect(),
            prec: self.prec,
        }
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product; the result is known below min(prec_a + ord_b, prec_b + ord_a).
    pub fn mul(&self, other: &Self) -> Self {
        self.same_ctx(other);
        let prec = sadd(self.prec, other.ord_or_prec())
            .min(sadd(other.prec, self.ord_or_prec()));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Series1::zero(&self.ctx, prec);
        }
        let lo = self.val + other.val;
        let n = if prec >= PREC_EXACT {
            (self.coeffs.len() + other.coeffs.len() - 1) as i64
        } else {
            (prec - lo).max(0)
        };
        let mut coeffs = vec![self.ctx.zero(); n as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if (k as i64) >= n {
                    break;
                }
                coeffs[k] = coeffs[k].add(&a.mul(b));
            }
        }
        Series1::new(self.ctx.clone(), lo, coeffs, prec)
    }

    /// Scale by a field element.
    pub fn scale(&self, c: &FieldElt) -> Self {
        if c.is_zero() {
            return Series1::zero(&self.ctx, self.prec);
        }
        Series1::new(
            self.ctx.clone(),
            self.val,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
            self.prec,
        )
    }

    /// Multiply by x^k (k may be negative).
    pub fn shift(&self, k: i64) -> Self {
        Series1 {
            ctx: self.ctx.clone(),
            val: sadd(self.val, k),
            coeffs: self.coeffs.clone(),
            prec: sadd(self.prec, k),
        }
    }

    /// Divide by x^k, requiring the division to be exact on known terms.
    pub fn try_div_x_pow(&self, k: i64) -> Result<Self> {
        if let Some(v) = self.ord() {
            if v < k {
                return Err(Error::InexactPolarDivision(format!(
                    "valuation {v} is below the divisor exponent {k}"
                )));
            }
        }
        Ok(self.shift(-k))
    }

    /// Weaken the precision bound.
    pub fn truncate(&self, new_prec: i64) -> Self {
        let mut s = self.clone();
        s.prec = s.prec.min(new_prec);
        s.normalize();
        s
    }

    /// Multiplicative inverse of a unit (nonzero leading coefficient).
    /// The result is known below prec - 2*ord. Inverting an exact
    /// non-monomial requires truncating to a working precision first.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NonUnit(
                "series is zero to its precision; no invertible leading term".into(),
            ));
        }
        let c0inv = self.coeffs[0].inv()?;
        if self.coeffs.len() == 1 {
            // Monomial: exact inverse.
            return Ok(Series1 {
                ctx: self.ctx.clone(),
                val: -self.val,
                coeffs: vec![c0inv],
                prec: if self.is_exact() {
                    PREC_EXACT
                } else {
                    sadd(self.prec, -2 * self.val)
                },
            });
        }
        if self.is_exact() {
            return Err(Error::Precision(
                "inverse of an exact non-monomial is an infinite series; truncate to a working precision first".into(),
            ));
        }
        // Write self = c0 x^v (1 + t) and invert 1 + t by the recurrence
        // b_0 = 1, b_k = -sum_{j=1..k} t_j b_{k-j}.
        let n = (self.prec - self.val) as usize;
        let t: Vec<FieldElt> = (0..n)
            .map(|k| self.coeffs.get(k).cloned().unwrap_or_else(|| self.ctx.zero()).mul(&c0inv))
            .collect();
        let mut b = vec![self.ctx.zero(); n];
        b[0] = self.ctx.one();
        for k in 1..n {
            let mut acc = self.ctx.zero();
            for j in 1..=k {
                if !t[j].is_zero() && !b[k - j].is_zero() {
                    acc = acc.add(&t[j].mul(&b[k - j]));
                }
            }
            b[k] = acc.neg();
        }
        let coeffs = b.into_iter().map(|c| c.mul(&c0inv)).collect();
        Ok(Series1::new(
            self.ctx.clone(),
            -self.val,
            coeffs,
            sadd(self.prec, -2 * self.val),
        ))
    }

    /// Quotient by a unit.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let inv = if other.is_exact() && other.coeffs.len() > 1 {
            if self.is_exact() {
                return Err(Error::Precision(
                    "quotient of exact polynomials is generally not a polynomial; truncate first".into(),
                ));
            }
            // Give the exact denominator enough precision that the
            // quotient's bound comes from the numerator alone.
            let w = sadd(self.prec, 2 * other.val.abs() + 2);
            other.truncate(w).invert_unit()?
        } else {
            other.invert_unit()?
        };
        Ok(self.mul(&inv))
    }

    /// Derivative d/dx; costs one order of precision.
    pub fn derive_x(&self) -> Self {
        let p = self.ctx.p();
        let coeffs: Vec<FieldElt> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = self.val + k as i64;
                c.scale(e.rem_euclid(p as i64) as u64)
            })
            .collect();
        let prec = if self.is_exact() { PREC_EXACT } else { self.prec - 1 };
        Series1::new(self.ctx.clone(), self.val - 1, coeffs, prec)
    }

    /// Logarithmic derivative operator x d/dx; precision-preserving.
    pub fn derive_log(&self) -> Self {
        let p = self.ctx.p();
        let coeffs: Vec<FieldElt> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = self.val + k as i64;
                c.scale(e.rem_euclid(p as i64) as u64)
            })
            .collect();
        Series1::new(self.ctx.clone(), self.val, coeffs, self.prec)
    }

    /// Substitute x -> x^p: exponents scale by p; the gaps are known zero,
    /// so the bound improves to p*(prec-1)+1.
    pub fn substitute_x_pow(&self, p: i64) -> Self {
        assert!(p >= 1);
        if self.coeffs.is_empty() {
            let prec = if self.is_exact() {
                PREC_EXACT
            } else {
                sadd(p * (self.prec - 1), 1)
            };
            return Series1::zero(&self.ctx, prec);
        }
        let mut coeffs = vec![self.ctx.zero(); (self.coeffs.len() - 1) * p as usize + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * p as usize] = c.clone();
        }
        let prec = if self.is_exact() {
            PREC_EXACT
        } else {
            sadd(p * (self.prec - 1), 1)
        };
        Series1::new(self.ctx.clone(), self.val * p, coeffs, prec)
    }

    /// True when every stored exponent is divisible by d.
    pub fn exponents_divisible_by(&self, d: i64) -> bool {
        self.iter_terms().all(|(e, _)| e.rem_euclid(d) == 0)
    }

    /// Inverse of `substitute_x_pow` with coefficientwise p-th roots:
    /// returns d with d(x^p) (after raising coefficients to the p) equal
    /// to self. Errors when a stored exponent is not divisible by p.
    pub fn frobenius_descend(&self) -> Result<Self> {
        let p = self.ctx.p() as i64;
        if !self.exponents_divisible_by(p) {
            return Err(Error::NotDescended(
                "a stored exponent is not divisible by p".into(),
            ));
        }
        let out_prec = if self.is_exact() {
            PREC_EXACT
        } else {
            // Exponents pk < prec are known, so k < ceil(prec / p).
            (self.prec + p - 1).div_euclid(p)
        };
        let terms: Vec<(i64, FieldElt)> = self
            .iter_terms()
            .map(|(e, c)| (e.div_euclid(p), c.frobenius_inv()))
            .collect();
        let mut out = Series1::zero(&self.ctx, out_prec);
        for (e, c) in terms {
            out = out.add(&Series1::monomial(c, e).truncate(out_prec));
        }
        Ok(out.truncate(out_prec))
    }

    /// Map all coefficients into a larger field along an embedding.
    pub fn map_ctx(&self, emb: &crate::ffield::Embedding) -> Self {
        Series1 {
            ctx: emb.to_ctx().clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| emb.map(c)).collect(),
            prec: self.prec,
        }
    }

    /// Map coefficients through the field Frobenius (exponents unchanged).
    pub fn map_coeffs_frobenius(&self) -> Self {
        Series1 {
            ctx: self.ctx.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(FieldElt::frobenius).collect(),
            prec: self.prec,
        }
    }

    /// Equality of all coefficients below the weaker precision bound.
    pub fn eq_to_joint_prec(&self, other: &Self) -> bool {
        let prec = self.prec.min(other.prec);
        self.truncate(prec) == other.truncate(prec)
    }

    /// Small non-negative power.
    pub fn pow_usize(&self, e: usize) -> Series1 {
        let mut acc = Series1::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}
