//! Spectral-curve germs: assembly from Hitchin coefficients, blow-up
//! normalization with branch tracking, and the delta invariant.
//!
//! A germ in the open staircase class factors into smooth branches
//! y^l + a(x,y) x with a(0,0) a unit. Each blow-up substitutes x <- x y
//! on the cofactor and lowers l by one; a branch with l = 1 leaves the
//! origin at the next step, crossing the fresh exceptional line at
//! -a(0,0)^{-1}. The delta invariant is the sum of pairwise contact
//! orders, read off resultants of Weierstrass forms.

use crate::biseries::BiSeries;
use crate::error::{Error, Result};
use crate::ffield::{Embedding, FieldCtx, FieldElt};
use crate::parabolic::{hensel_factor, Branch, Partition};
use crate::series::Series1;
use crate::ypoly::{resultant_y, weierstrass_prepare};

/// Assemble the germ y^n + sum b_i(x) y^{n-i} from coefficient series.
pub fn spectral_germ_from_hitchin(ctx: &FieldCtx, coeffs: &[Series1]) -> Result<BiSeries> {
    let n = coeffs.len() as i64;
    if n == 0 {
        return Err(Error::BadInput("need at least one coefficient".into()));
    }
    let mut germ = BiSeries::monomial(ctx.one(), 0, n);
    for (idx, b) in coeffs.iter().enumerate() {
        if b.ctx() != ctx {
            return Err(Error::IncompatibleFields(
                "coefficient series in a different field".into(),
            ));
        }
        if b.ord().map_or(false, |v| v < 0) {
            return Err(Error::BadInput(
                "coefficient series must be regular at x = 0".into(),
            ));
        }
        let i = idx as i64 + 1;
        germ = germ.add(&BiSeries::from_series_x(b).mul_monomial(0, n - i));
    }
    Ok(germ)
}

/// One branch followed through the blow-up tower.
#[derive(Clone, Debug)]
pub struct BranchTrack {
    /// y-degree of the branch factor.
    pub lambda: usize,
    /// Constant of the branch cofactor (invariant under blow-up).
    pub constant: FieldElt,
    /// Blow-up step at which the branch left the origin (1-based);
    /// `None` if it was still attached when the tower stopped.
    pub detach_step: Option<i64>,
    /// Coordinate on the exceptional line where the branch crossed it.
    pub detach_point: Option<FieldElt>,
}

/// Result of the blow-up tower on a factored germ.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// Field all branch data lives in.
    pub ctx: FieldCtx,
    /// Embedding of the input field into `ctx`.
    pub embedding: Embedding,
    /// Number of blow-ups performed.
    pub steps_used: i64,
    /// Per-branch trace, in factorization order.
    pub tracks: Vec<BranchTrack>,
    /// Delta invariant (sum of pairwise contact orders).
    pub delta: i64,
}

/// Factor the germ and run the blow-up tower until at most one branch
/// stays attached to the origin, verifying at each detachment that the
/// strict transform is exactly linear along the exceptional line (hence
/// smooth and transverse) and that simultaneous detachments land at
/// pairwise distinct points.
pub fn normalize_by_blowups(
    f: &BiSeries,
    lambda: &Partition,
    budget: i64,
) -> Result<Resolution> {
    let fac = hensel_factor(f, lambda)?;
    let delta = delta_invariant(&fac.branches)?;
    struct State {
        lam: usize,
        cof: BiSeries,
        idx: usize,
    }
    let mut tracks: Vec<BranchTrack> = fac
        .branches
        .iter()
        .map(|b| BranchTrack {
            lambda: b.lambda,
            constant: b.constant(),
            detach_step: None,
            detach_point: None,
        })
        .collect();
    let mut live: Vec<State> = fac
        .branches
        .iter()
        .enumerate()
        .map(|(idx, b)| State {
            lam: b.lambda,
            cof: b.tail.clone(),
            idx,
        })
        .collect();
    let mut step = 0i64;
    while live.len() > 1 {
        step += 1;
        if step > budget {
            return Err(Error::SeparationExceeded { budget });
        }
        let mut still = Vec::new();
        let mut crossings: Vec<FieldElt> = Vec::new();
        for st in live {
            let pulled = st.cof.substitute_blowup();
            if st.lam >= 2 {
                still.push(State {
                    lam: st.lam - 1,
                    cof: pulled,
                    idx: st.idx,
                });
                continue;
            }
            // Detachment: the strict transform restricted to the
            // exceptional line y = 0 must be exactly 1 + a(0,0) x.
            let slice = pulled.y_slice(0);
            let slope = slice.coeff(0);
            let linear = slice
                .iter_terms()
                .all(|(e, c)| e == 0 || c.is_zero());
            if !linear || slope.is_zero() {
                return Err(Error::NotInClass(
                    "strict transform fails to cross the exceptional line transversally"
                        .into(),
                ));
            }
            let point = slope.inv()?.neg();
            if crossings.contains(&point) {
                return Err(Error::NotInClass(
                    "two branches cross the exceptional line at the same point".into(),
                ));
            }
            crossings.push(point.clone());
            tracks[st.idx].detach_step = Some(step);
            tracks[st.idx].detach_point = Some(point);
        }
        live = still;
    }
    Ok(Resolution {
        ctx: fac.ctx,
        embedding: fac.embedding,
        steps_used: step,
        tracks,
        delta,
    })
}

/// Delta invariant of a branch collection: the sum over pairs of the
/// x-order of the resultant of their Weierstrass forms. Errors when two
/// branches are indistinguishable at the working precision.
pub fn delta_invariant(branches: &[Branch]) -> Result<i64> {
    let forms: Vec<_> = branches
        .iter()
        .map(|b| weierstrass_prepare(&b.to_biseries(), b.lambda))
        .collect::<Result<Vec<_>>>()?;
    let mut delta = 0i64;
    for i in 0..forms.len() {
        for j in (i + 1)..forms.len() {
            let res = resultant_y(&forms[i], &forms[j]);
            match res.ord() {
                Some(v) => delta += v,
                None => {
                    return Err(Error::Precision(format!(
                        "branches {i} and {j} are indistinguishable at precision {}",
                        res.prec()
                    )))
                }
            }
        }
    }
    Ok(delta)
}

/// Expected delta for an open-class germ: pairwise minima of the parts.
pub fn expected_delta(lambda: &Partition) -> i64 {
    let parts = lambda.parts();
    let mut d = 0i64;
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            d += parts[i].min(parts[j]) as i64;
        }
    }
    d
}
