//! Truncated traces of spherical functions on Steinberg, trivial,
//! unramified principal-series and induced-Steinberg representations,
//! computed at the torus level after descent to the Borel.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Result, StrataError};
use crate::laurent::TraceValue;
use crate::nonvanish::divisibility_threshold;
use crate::polygons::{contracted_parabolic, NewtonPoint};
use crate::rational::{dot, int, positive_ratio, scale, sub, Rat, Vector};
use crate::root_data::{block_means, orbit_under, ParabolicType, Reflection, RootDatum};
use crate::satake::{constant_term, evaluate, Invariance, SphericalFunction, UnramifiedCharacter};
use crate::truncation::{
    casselman_stratum_of, compose_xi, filter_principal_series, XiVariant,
};

/// Whether to insist that the degree `α` is a multiple of the group's
/// divisibility threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divisibility {
    Unchecked,
    Assert { alpha: usize },
}

impl Divisibility {
    fn check(self, rd: &RootDatum) -> Result<()> {
        if let Divisibility::Assert { alpha } = self {
            let m = divisibility_threshold(&rd.desc);
            if alpha == 0 || alpha % m != 0 {
                return Err(StrataError::Infeasible(format!(
                    "α = {alpha} is not divisible by the threshold {m} of {}",
                    rd.desc
                )));
            }
        }
        Ok(())
    }
}

/// A trace value with the monomials that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceResult {
    pub value: TraceValue,
    /// Surviving exponent vectors with their sign.
    pub survivors: Vec<(Vec<i64>, i64)>,
}

impl TraceResult {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

fn torus_level(rd: &RootDatum, f: &SphericalFunction) -> Result<SphericalFunction> {
    rd.check_dim(f.dim)?;
    constant_term(f, &ParabolicType::borel())
}

fn signed_evaluation(f: &SphericalFunction, chi: &UnramifiedCharacter, sign: i64) -> Result<TraceResult> {
    let value = evaluate(f, chi)?.scale(int(sign));
    let survivors = f.monomials().map(|e| (e.clone(), sign)).collect();
    Ok(TraceResult { value, survivors })
}

/// `ε · Tr` on the Steinberg representation twisted by `χ`: the Borel
/// constant term filtered by `ξ_b^St`, evaluated at `χ δ_{P_b}^{-1/2} δ_{P₀∩M_b}^{1/2}`.
pub fn trace_truncated_steinberg(
    rd: &RootDatum,
    b: &NewtonPoint,
    f: &SphericalFunction,
    chi: &UnramifiedCharacter,
    div: Divisibility,
) -> Result<TraceResult> {
    div.check(rd)?;
    let ct = torus_level(rd, f)?;
    let kept = compose_xi(b, XiVariant::Steinberg).apply(rd, &ct)?;
    let pb = contracted_parabolic(rd, b);
    let shift = sub(&scale(int(2), &rd.rho_levi(&pb)), &rd.rho);
    let sign = if pb.levi_roots.len().is_multiple_of(2) { 1 } else { -1 };
    signed_evaluation(&kept, &chi.with_shift(&shift), sign)
}

/// Trace on the trivial representation twisted by `χ`: filter `ξ_b^1`,
/// twist `δ_{P₀}^{-1/2}`, no sign.
pub fn trace_truncated_trivial(
    rd: &RootDatum,
    b: &NewtonPoint,
    f: &SphericalFunction,
    chi: &UnramifiedCharacter,
    div: Divisibility,
) -> Result<TraceResult> {
    div.check(rd)?;
    let ct = torus_level(rd, f)?;
    let kept = compose_xi(b, XiVariant::Trivial).apply(rd, &ct)?;
    let shift = scale(-int(1), &rd.rho);
    signed_evaluation(&kept, &chi.with_shift(&shift), 1)
}

/// Trace on the unramified principal series of `χ`, truncated to the stratum of `b`.
pub fn trace_truncated_principal_series(
    rd: &RootDatum,
    b: &NewtonPoint,
    f: &SphericalFunction,
    chi: &UnramifiedCharacter,
    div: Divisibility,
) -> Result<TraceResult> {
    div.check(rd)?;
    let ct = torus_level(rd, f)?;
    let kept = ct.filtered(|e| filter_principal_series(rd, b, e));
    signed_evaluation(&kept, &chi.with_shift(&scale(-int(1), &rd.rho)), 1)
}

/// Untruncated principal-series trace: `f^{(P₀)}` at `χ δ_{P₀}^{-1/2}`.
pub fn trace_principal_series(rd: &RootDatum, f: &SphericalFunction, chi: &UnramifiedCharacter) -> Result<TraceValue> {
    let ct = torus_level(rd, f)?;
    evaluate(&ct, &chi.with_shift(&scale(-int(1), &rd.rho)))
}

/// Splits the principal-series trace over the Casselman strata.
pub fn casselman_decomposition(
    rd: &RootDatum,
    f: &SphericalFunction,
    chi: &UnramifiedCharacter,
) -> Result<BTreeMap<ParabolicType, TraceValue>> {
    let ct = torus_level(rd, f)?;
    let twisted = chi.with_shift(&scale(-int(1), &rd.rho));
    let mut buckets: BTreeMap<ParabolicType, SphericalFunction> = rd
        .standard_parabolics()
        .into_iter()
        .map(|p| (p, SphericalFunction::zero(rd.dim, Invariance::Torus)))
        .collect();
    for (e, c) in &ct.terms {
        buckets
            .get_mut(&casselman_stratum_of(rd, e))
            .expect("strata are standard parabolics")
            .add_term(e.clone(), c);
    }
    buckets.into_iter().map(|(p, g)| Ok((p, evaluate(&g, &twisted)?))).collect()
}

/// A representation parabolically induced from a standard Levi `L`, whose
/// simple roots split into a Steinberg part and a generic principal-series part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepresentationSpec {
    Steinberg,
    Trivial,
    PrincipalSeries,
    /// `Ind_Q^G(σ ⊗ St)`: `q` is the Levi, `steinberg_roots ⊆ q.levi_roots`
    /// carry Steinberg factors, the remaining Levi roots generic principal series.
    InducedSteinberg { q: ParabolicType, steinberg_roots: Vec<usize> },
}

/// `ρ` of the Levi with the given simple roots.
fn rho_of(rd: &RootDatum, roots: &[usize]) -> Vector {
    rd.rho_levi(&ParabolicType::from_roots(roots.to_vec()))
}

fn levi_generators(rd: &RootDatum, roots: &[usize]) -> Vec<Reflection> {
    roots.iter().map(|&r| rd.reflections[r].clone()).collect()
}

/// Distinct Weyl translates of `nu` that are dominant for the Levi `roots`.
pub fn levi_dominant_translates(rd: &RootDatum, nu: &[Rat], roots: &[usize]) -> Vec<Vector> {
    orbit_under(&rd.reflections, nu)
        .into_iter()
        .filter(|x| roots.iter().all(|&r| dot(&rd.simple_roots[r], x) >= Rat::zero()))
        .collect()
}

/// Truncated trace on `Ind_Q^G(σ ⊗ St_L(χ))`.
///
/// Descends to the Levi `L` of `Q`, splits the stratum of `b` into the
/// `L`-dominant translates `ν_L` of `ν̄_b`, and on each translate applies the
/// Levi-level Steinberg truncation on the Steinberg roots and the
/// principal-series condition on the rest.
pub fn trace_truncated_induced_steinberg(
    rd: &RootDatum,
    b: &NewtonPoint,
    f: &SphericalFunction,
    chi: &UnramifiedCharacter,
    spec: &RepresentationSpec,
    div: Divisibility,
) -> Result<TraceResult> {
    let (q, st_roots) = match spec {
        RepresentationSpec::Steinberg => return trace_truncated_steinberg(rd, b, f, chi, div),
        RepresentationSpec::Trivial => return trace_truncated_trivial(rd, b, f, chi, div),
        RepresentationSpec::PrincipalSeries => {
            return trace_truncated_principal_series(rd, b, f, chi, div)
        }
        RepresentationSpec::InducedSteinberg { q, steinberg_roots } => (q, steinberg_roots),
    };
    div.check(rd)?;
    if !st_roots.iter().all(|r| q.contains(*r)) {
        return Err(StrataError::InvalidInput("Steinberg roots must lie in the Levi".into()));
    }
    let ct = torus_level(rd, f)?;
    let levi = &q.levi_roots;

    let mut value = TraceValue::zero();
    let mut survivors = Vec::new();
    for nu_l in levi_dominant_translates(rd, &b.slopes, levi) {
        let term = InducedTranslate::new(rd, &nu_l, levi, st_roots);
        let kept = ct.filtered(|e| term.accepts(rd, e));
        let part = evaluate(&kept, &chi.with_shift(&term.shift))?.scale(int(term.sign));
        value += &part;
        survivors.extend(kept.monomials().map(|e| (e.clone(), term.sign)));
    }
    Ok(TraceResult { value, survivors })
}

/// The Levi-level truncation attached to one `L`-dominant translate `ν_L`.
struct InducedTranslate {
    nu_l: Vector,
    comp: Vec<usize>,
    weights: Vec<Vector>,
    outside: Vec<usize>,
    gens: Vec<Reflection>,
    sign: i64,
    shift: Vector,
}

impl InducedTranslate {
    fn new(rd: &RootDatum, nu_l: &[Rat], levi: &[usize], st_roots: &[usize]) -> Self {
        let st: BTreeSet<usize> = st_roots.iter().copied().collect();
        let jb: Vec<usize> = levi.iter().copied().filter(|&a| dot(&rd.simple_roots[a], nu_l).is_zero()).collect();
        let jb_st: Vec<usize> = jb.iter().copied().filter(|a| st.contains(a)).collect();
        Self {
            nu_l: nu_l.to_vec(),
            comp: ParabolicType::from_roots(jb_st.clone()).composition(rd),
            weights: rd.fundamental_weights_for(&jb_st),
            outside: st.iter().copied().filter(|a| !jb.contains(a)).collect(),
            gens: levi_generators(rd, levi),
            sign: if jb_st.len().is_multiple_of(2) { 1 } else { -1 },
            shift: sub(&scale(int(2), &rho_of(rd, &jb_st)), &rho_of(rd, levi)),
        }
    }

    fn accepts(&self, rd: &RootDatum, e: &[i64]) -> bool {
        let x: Vector = e.iter().map(|&v| int(v)).collect();
        let pi = block_means(&self.comp, &x);
        let chamber = self.outside.iter().all(|&a| dot(&rd.simple_roots[a], &pi) > Rat::zero())
            && self.weights.iter().all(|w| dot(w, &x) > Rat::zero());
        chamber
            && orbit_under(&self.gens, e).iter().any(|w| {
                let wx: Vector = w.iter().map(|&v| int(v)).collect();
                positive_ratio(&block_means(&self.comp, &wx), &self.nu_l).is_some()
            })
    }
}

/// Whether `e` passes the induced-Steinberg truncation for the translate `nu_l`.
pub fn induced_translate_accepts(rd: &RootDatum, nu_l: &[Rat], levi: &[usize], st_roots: &[usize], e: &[i64]) -> bool {
    InducedTranslate::new(rd, nu_l, levi, st_roots).accepts(rd, e)
}
