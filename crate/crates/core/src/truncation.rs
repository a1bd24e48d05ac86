//! Truncation operators as exact predicates on torus monomials.
//!
//! Every predicate is a sign condition on an exact pairing between a root
//! or fundamental weight and a projection of the exponent vector. The
//! graph pictures are provided for display and for the path conditions.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Result, StrataError};
use crate::polygons::{contracted_parabolic, NewtonPoint};
use crate::rational::{dot, int, positive_ratio, Rat, Vector};
use crate::root_data::{
    block_means, dominant_rep, orbit_under, project, ParabolicType, RootDatum,
};
use crate::satake::{Invariance, SphericalFunction};

fn to_rat(e: &[i64]) -> Vector {
    e.iter().map(|&x| int(x)).collect()
}

/// Path of a monomial and its averaged path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialGraph {
    /// Vertices of the partial sums of the reversed exponent vector.
    pub path: Vec<(Rat, Rat)>,
    /// Same construction applied to the block averages, i.e. chords of
    /// `path` between consecutive block boundaries.
    pub averaged: Vec<(Rat, Rat)>,
}

fn reversed_partial_sums(v: &[Rat]) -> Vec<(Rat, Rat)> {
    let mut y = Rat::zero();
    let mut out = vec![(Rat::zero(), Rat::zero())];
    for (i, x) in v.iter().rev().enumerate() {
        y += x;
        out.push((int(i as i64 + 1), y));
    }
    out
}

/// Forward partial sums `S_0 = 0, S_i = e_1 + … + e_i`.
pub fn forward_partial_sums(v: &[Rat]) -> Vector {
    let mut y = Rat::zero();
    let mut out = vec![y];
    for x in v {
        y += x;
        out.push(y);
    }
    out
}

pub fn monomial_graphs(rd: &RootDatum, e: &[i64], p: &ParabolicType) -> Result<MonomialGraph> {
    rd.check_dim(e.len())?;
    let x = to_rat(e);
    let avg = block_means(&p.composition(rd), &x);
    Ok(MonomialGraph { path: reversed_partial_sums(&x), averaged: reversed_partial_sums(&avg) })
}

/// `χ_N` for `P`: the `P`-average of `e` is strictly positive on every
/// simple root outside the Levi.
pub fn filter_chi_n(rd: &RootDatum, p: &ParabolicType, e: &[i64]) -> bool {
    let x = to_rat(e);
    let pi = block_means(&p.composition(rd), &x);
    (0..rd.rank()).filter(|a| !p.contains(*a)).all(|a| dot(&rd.simple_roots[a], &pi).is_positive())
}

/// `χ̂` for the Borel of the Levi `levi`: every fundamental weight of the
/// Levi is positive (closed: non-negative) on `e`.
pub fn filter_hat_chi(rd: &RootDatum, levi: &ParabolicType, e: &[i64], closed: bool) -> bool {
    let x = to_rat(e);
    rd.fundamental_weights_for(&levi.levi_roots).iter().all(|w| {
        let v = dot(w, &x);
        if closed {
            !v.is_negative()
        } else {
            v.is_positive()
        }
    })
}

/// Whether `π_P(x)` lies on the open ray through `nu` (the origin when `nu = 0`).
fn on_ray(pi: &[Rat], nu: &[Rat]) -> bool {
    positive_ratio(pi, nu).is_some()
}

/// Memoises orbit searches, keyed by the dominant representative.
#[derive(Debug, Default, Clone)]
pub struct OrbitCache {
    eta: BTreeMap<(Vector, Vec<i64>), bool>,
}

/// `η_b`: some Weyl conjugate of `e` has `P_b`-average on the ray of `ν̄_b`.
pub fn filter_eta(rd: &RootDatum, b: &NewtonPoint, e: &[i64]) -> bool {
    filter_eta_cached(rd, b, e, &mut OrbitCache::default())
}

pub fn filter_eta_cached(rd: &RootDatum, b: &NewtonPoint, e: &[i64], cache: &mut OrbitCache) -> bool {
    let key = (b.slopes.clone(), dominant_rep(rd, e));
    if let Some(v) = cache.eta.get(&key) {
        return *v;
    }
    let comp = contracted_parabolic(rd, b).composition(rd);
    let holds = orbit_under(&rd.reflections, e)
        .iter()
        .any(|w| on_ray(&block_means(&comp, &to_rat(w)), &b.slopes));
    cache.eta.insert(key, holds);
    holds
}

/// The raw stratum filter used for principal series: the dominant
/// representative of `e` lies on the ray of `ν̄_b` (central when `ν̄_b = 0`).
pub fn filter_principal_series(rd: &RootDatum, b: &NewtonPoint, e: &[i64]) -> bool {
    let d = to_rat(&dominant_rep(rd, e));
    if b.slopes.iter().all(|x| x.is_zero()) {
        return rd.simple_roots.iter().all(|a| dot(a, &d).is_zero());
    }
    on_ray(&d, &b.slopes)
}

/// Conditions (S1) and (S2) for the parabolic `Q` and scale `β`.
pub fn filter_s1s2(rd: &RootDatum, b: &NewtonPoint, q: &ParabolicType, beta: Rat, e: &[i64]) -> bool {
    let x = to_rat(e);
    let (pi, pr) = project(rd, q, &x).expect("dimension checked by caller");
    let target: Vector = b.slopes.iter().map(|s| s * beta).collect();
    pi == target
        && rd
            .fundamental_weights_for(&q.levi_roots)
            .iter()
            .all(|w| dot(w, &pr).is_positive())
}

/// The standard parabolic whose open chamber contains the dominant
/// representative of `e`.
pub fn casselman_stratum_of(rd: &RootDatum, e: &[i64]) -> ParabolicType {
    rd.centralizer_parabolic(&to_rat(&dominant_rep(rd, e)))
}

pub fn casselman_filter(rd: &RootDatum, p: &ParabolicType, e: &[i64]) -> bool {
    &casselman_stratum_of(rd, e) == p
}

/// Which composite truncation to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiVariant {
    /// Strict Levi chamber condition; used against the Steinberg representation.
    Steinberg,
    /// Closed Levi chamber condition; used against the trivial representation.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncationFilter {
    ChiN(ParabolicType),
    HatChi { levi: ParabolicType, closed: bool },
    Eta(NewtonPoint),
    Xi { b: NewtonPoint, variant: XiVariant },
    PrincipalSeries(NewtonPoint),
    S1S2 { b: NewtonPoint, q: ParabolicType, beta: Rat },
    Casselman(ParabolicType),
}

pub fn compose_xi(b: &NewtonPoint, variant: XiVariant) -> TruncationFilter {
    TruncationFilter::Xi { b: b.clone(), variant }
}

impl TruncationFilter {
    pub fn accepts(&self, rd: &RootDatum, e: &[i64], cache: &mut OrbitCache) -> bool {
        match self {
            TruncationFilter::ChiN(p) => filter_chi_n(rd, p, e),
            TruncationFilter::HatChi { levi, closed } => filter_hat_chi(rd, levi, e, *closed),
            TruncationFilter::Eta(b) => filter_eta_cached(rd, b, e, cache),
            TruncationFilter::Xi { b, variant } => {
                let pb = contracted_parabolic(rd, b);
                filter_hat_chi(rd, &pb, e, *variant == XiVariant::Trivial)
                    && filter_chi_n(rd, &pb, e)
                    && filter_eta_cached(rd, b, e, cache)
            }
            TruncationFilter::PrincipalSeries(b) => filter_principal_series(rd, b, e),
            TruncationFilter::S1S2 { b, q, beta } => filter_s1s2(rd, b, q, *beta, e),
            TruncationFilter::Casselman(p) => casselman_filter(rd, p, e),
        }
    }

    /// Keeps the monomials of a torus-level function that pass the filter.
    pub fn apply(&self, rd: &RootDatum, f: &SphericalFunction) -> Result<SphericalFunction> {
        let torus_level = match &f.invariance {
            Invariance::Torus => true,
            Invariance::Levi(p) => p.levi_roots.is_empty(),
            Invariance::Group => false,
        };
        if !torus_level {
            return Err(StrataError::InvalidInput(
                "truncation filters apply to constant terms along the Borel".into(),
            ));
        }
        rd.check_dim(f.dim)?;
        let mut cache = OrbitCache::default();
        Ok(f.filtered(|e| self.accepts(rd, e, &mut cache)))
    }
}

/// Sufficient path conditions for the Steinberg filter: `λ𝒢_X` meets `𝒢_b`
/// at the block boundaries of `P_b` and stays strictly below it elsewhere,
/// with `𝒢` the forward partial sums.
pub fn path_conditions(rd: &RootDatum, b: &NewtonPoint, e: &[i64]) -> bool {
    let gx = forward_partial_sums(&to_rat(e));
    let gb = forward_partial_sums(&b.slopes);
    let n = e.len();
    let lambda = match positive_ratio(&[gb[n]], &[gx[n]]) {
        Some(Some(l)) => l,
        _ => return false,
    };
    let comp = contracted_parabolic(rd, b).composition(rd);
    let mut boundaries = vec![0usize];
    for len in &comp {
        boundaries.push(boundaries.last().unwrap() + len);
    }
    (0..=n).all(|x| {
        let scaled = lambda * gx[x];
        if boundaries.contains(&x) {
            scaled == gb[x]
        } else {
            scaled < gb[x]
        }
    })
}

/// The path conditions with strict-below replaced by "averaged path of `X`
/// itself is `λ·𝒢_b`".
pub fn path_conditions_averaged(rd: &RootDatum, b: &NewtonPoint, e: &[i64]) -> bool {
    let x = to_rat(e);
    let pb = contracted_parabolic(rd, b);
    let pi = block_means(&pb.composition(rd), &x);
    on_ray(&pi, &b.slopes) && filter_chi_n(rd, &pb, e) && filter_hat_chi(rd, &pb, e, false)
}
