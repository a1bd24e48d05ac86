//! Non-vanishing certificates: admissible lattice paths, the ordinary path,
//! Chai witnesses, and replayable verdicts for Steinberg and class-`R(b)`
//! representations.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, StrataError};
use crate::polygons::{contracted_parabolic, is_admissible, refined_parabolic_q, NewtonPoint};
use crate::rational::{int, rat, scale, serde_vector, to_ints, Rat, Vector};
use crate::root_data::{
    block_means, build_root_datum, norm_map, norm_map_int, weyl_orbit, Family, GroupDescriptor,
    ParabolicType, RootDatum, WeylKind,
};
use crate::satake::{constant_term, kottwitz_function, KottwitzSide, PrefactorSign, UnramifiedCharacter};
use crate::traces::{
    induced_translate_accepts, levi_dominant_translates, trace_truncated_induced_steinberg,
    trace_truncated_steinberg, Divisibility, RepresentationSpec,
};
use crate::truncation::{compose_xi, filter_s1s2, OrbitCache, XiVariant};

/// Least `M` such that every `α` divisible by `M` splits the group over the
/// degree-`α` extension and merges its Galois orbits.
pub fn divisibility_threshold(desc: &GroupDescriptor) -> usize {
    match desc.family {
        Family::GeneralLinear { d, .. } => d,
        Family::Unitary { d, .. } => 2 * d,
        Family::SymplecticSimilitude { .. } | Family::SplitClassical { .. } => 1,
    }
}

/// A 0/1 step sequence `wμ` together with the monomial it contributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePath {
    pub steps: Vec<i64>,
    /// `𝒩(wμ)` at the splitting degree.
    pub monomial: Vec<i64>,
}

impl LatticePath {
    /// Steps grouped by the blocks of `P_b`, e.g. `00001|0011|011`.
    pub fn render(&self, comp: &[usize]) -> String {
        let mut out = String::new();
        let mut start = 0;
        for (i, len) in comp.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            for s in &self.steps[start..start + len] {
                out.push_str(&s.to_string());
            }
            start += len;
        }
        out
    }
}

fn splitting_degree(rd: &RootDatum) -> usize {
    rd.theta_order
}

fn lattice_path(rd: &RootDatum, steps: Vec<i64>) -> LatticePath {
    let monomial = norm_map_int(rd, &steps, splitting_degree(rd));
    LatticePath { steps, monomial }
}

/// Every path `wμ`, `w` in the absolute Weyl group, whose monomial passes
/// the Steinberg filter of `b`. Exhaustive over the orbit.
pub fn admissible_paths(rd: &RootDatum, b: &NewtonPoint, mu: &[Rat]) -> Result<Vec<LatticePath>> {
    if !is_admissible(rd, b, mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    let filter = compose_xi(b, XiVariant::Steinberg);
    let mut cache = OrbitCache::default();
    let kind = WeylKind::Relative { alpha: splitting_degree(rd) };
    let mut out = Vec::new();
    for x in weyl_orbit(rd, mu, kind)? {
        let steps = to_ints(&x).ok_or_else(|| StrataError::InvalidInput("μ must be integral".into()))?;
        let path = lattice_path(rd, steps);
        if filter.accepts(rd, &path.monomial, &mut cache) {
            out.push(path);
        }
    }
    Ok(out)
}

/// The path taking, inside each constant-slope block, all horizontal steps
/// before the diagonal ones. `None` when a block's rise is not integral.
pub fn ordinary_path(rd: &RootDatum, b: &NewtonPoint, mu: &[Rat]) -> Result<Option<LatticePath>> {
    if !is_admissible(rd, b, mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    if rd.desc.is_unitary() || rd.desc.is_gsp() || !rd.desc.is_linear() {
        return Ok(None);
    }
    let comp = contracted_parabolic(rd, b).composition(rd);
    let mut steps = Vec::with_capacity(rd.dim);
    let mut start = 0;
    for len in comp {
        let rise = b.slopes[start] * int(len as i64);
        if !rise.is_integer() || rise.is_negative() || rise > int(len as i64) {
            return Ok(None);
        }
        let ones = rise.to_integer() as usize;
        steps.extend(std::iter::repeat_n(0, len - ones));
        steps.extend(std::iter::repeat_n(1, ones));
        start += len;
    }
    if dominant_rep_sorted(&steps) != to_ints(mu).unwrap_or_default() {
        return Ok(None);
    }
    Ok(Some(lattice_path(rd, steps)))
}

fn dominant_rep_sorted(v: &[i64]) -> Vec<i64> {
    let mut s = v.to_vec();
    s.sort();
    s
}

/// The first `X ∈ W·μ` (lexicographically) whose normalised norm averages to
/// `ν̄_b` over the blocks of `P_b`.
pub fn chai_witness(rd: &RootDatum, mu: &[Rat], b: &NewtonPoint) -> Result<Option<Vector>> {
    Ok(chai_witnesses(rd, mu, b)?.into_iter().next())
}

/// All such `X`, lexicographically.
pub fn chai_witnesses(rd: &RootDatum, mu: &[Rat], b: &NewtonPoint) -> Result<Vec<Vector>> {
    let m = splitting_degree(rd);
    let comp = contracted_parabolic(rd, b).composition(rd);
    let mut out = Vec::new();
    for x in weyl_orbit(rd, mu, WeylKind::Relative { alpha: m })? {
        let y = scale(rat(1, m as i64), &norm_map(rd, &x, m)?);
        if block_means(&comp, &y) == b.slopes {
            out.push(x);
        }
    }
    Ok(out)
}

/// Which representation a certificate is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationClass {
    Steinberg,
    #[serde(rename = "R_b")]
    RB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nonzero,
    Zero,
}

/// The induced representation used for a class-`R(b)` certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedData {
    pub composition: Vec<usize>,
    pub levi_roots: Vec<usize>,
    pub steinberg_roots: Vec<usize>,
}

/// A replayable non-vanishing verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub group: GroupDescriptor,
    #[serde(with = "serde_vector")]
    pub mu: Vector,
    #[serde(with = "serde_vector")]
    pub slopes: Vector,
    pub class: RepresentationClass,
    pub verdict: Verdict,
    pub criterion: String,
    /// Surviving torus monomials of the truncated trace at degree `alpha`.
    pub witnesses: Vec<Vec<i64>>,
    pub alpha: usize,
    pub alpha_threshold: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induced: Option<InducedData>,
    /// For symplectic groups: a Weyl translate of `μ` whose norm satisfies
    /// (S1) and (S2) for `Q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s1s2_witness: Option<Vec<i64>>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialise")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| StrataError::InvalidInput(format!("certificate: {e}")))
    }
}

fn multiplicity(slopes: &[Rat], value: Rat) -> usize {
    slopes.iter().filter(|s| **s == value).count()
}

/// The slope-multiplicity verdict for Steinberg, where one is known.
///
/// Linear groups: slopes 0 and 1 each occur at most once. This is exactly
/// the existence of a path touching `𝒢_b` only at its breakpoints; the
/// exact Steinberg filter is weaker and also keeps some paths when it fails.
/// Unitary groups: no slope in the excluded set. The stated set `{0, ½}` and
/// the set `{-½, 0, ½}` used in the argument are both checked; they select
/// the same isocrystals because the slopes are symmetric. The unitary
/// condition is only sufficient, so `Some(false)` there means "no claim".
fn steinberg_criterion(rd: &RootDatum, b: &NewtonPoint) -> Option<(bool, String)> {
    match rd.desc.family {
        Family::GeneralLinear { d: 1, .. } => {
            let ok = multiplicity(&b.slopes, int(0)) <= 1 && multiplicity(&b.slopes, int(1)) <= 1;
            Some((ok, "linear: slopes 0 and 1 each of multiplicity at most 1".into()))
        }
        Family::Unitary { d: 1, .. } => {
            let half = rat(1, 2);
            let stated = b.slopes.iter().all(|s| !s.is_zero() && *s != half);
            let argued = b.slopes.iter().all(|s| !s.is_zero() && s.abs() != half);
            debug_assert_eq!(stated, argued);
            Some((stated, "unitary: no slope in {0, 1/2} (equivalently {-1/2, 0, 1/2}); sufficient only".into()))
        }
        _ => None,
    }
}

/// Steinberg roots of the Levi `q` whose reflections only move coordinates in `range`.
fn roots_within(rd: &RootDatum, q: &ParabolicType, range: std::ops::Range<usize>) -> Vec<usize> {
    q.levi_roots
        .iter()
        .copied()
        .filter(|&r| rd.reflections[r].iter().all(|&(a, c)| range.contains(&a) && range.contains(&c)))
        .collect()
}

/// The induced representation defining class `R(b)`.
pub fn class_rb_representation(rd: &RootDatum, b: &NewtonPoint, mu: &[Rat]) -> Result<InducedData> {
    let n = rd.dim;
    match rd.desc.family {
        Family::GeneralLinear { d: 1, .. } => {
            let m0 = multiplicity(&b.slopes, int(0));
            let m1 = multiplicity(&b.slopes, int(1));
            let m = n - m0 - m1;
            let comp: Vec<usize> = [m0, m, m1].into_iter().filter(|x| *x > 0).collect();
            let q = ParabolicType::from_composition(rd, &comp)?;
            let st = roots_within(rd, &q, m0..m0 + m);
            Ok(InducedData { composition: comp, levi_roots: q.levi_roots.clone(), steinberg_roots: st })
        }
        Family::Unitary { d: 1, .. } => {
            let half = rat(1, 2);
            let m1 = multiplicity(&b.slopes, -half);
            let m3 = multiplicity(&b.slopes, half);
            if m1 != m3 {
                return Err(StrataError::InvalidInput("unitary slopes are not symmetric".into()));
            }
            let m2 = n - m1 - m3;
            let comp: Vec<usize> = [m1, m2, m3].into_iter().filter(|x| *x > 0).collect();
            let q = ParabolicType::from_composition(rd, &comp)?;
            let st = roots_within(rd, &q, m1..m1 + m2);
            Ok(InducedData { composition: comp, levi_roots: q.levi_roots.clone(), steinberg_roots: st })
        }
        Family::SymplecticSimilitude { .. } => {
            let q = refined_parabolic_q(rd, b, mu)?;
            Ok(InducedData {
                composition: q.composition(rd),
                levi_roots: q.levi_roots.clone(),
                steinberg_roots: q.levi_roots.clone(),
            })
        }
        _ => Err(StrataError::Unsupported(format!("class R(b) for {}", rd.desc))),
    }
}

fn kottwitz(rd: &RootDatum, mu: &[Rat], alpha: usize) -> Result<crate::satake::SphericalFunction> {
    kottwitz_function(rd, mu, alpha, KottwitzSide::BaseChanged, PrefactorSign::Negative)
}

/// A (S1)/(S2) witness for symplectic groups: among the Chai witnesses `X`,
/// the first whose norm `M·X` satisfies both conditions for `Q` with `β = M`.
pub fn s1s2_witness(rd: &RootDatum, mu: &[Rat], b: &NewtonPoint) -> Result<Option<Vec<i64>>> {
    let q = refined_parabolic_q(rd, b, mu)?;
    let m = splitting_degree(rd);
    for x in chai_witnesses(rd, mu, b)? {
        let y = to_ints(&norm_map(rd, &x, m)?).expect("integral orbit");
        if filter_s1s2(rd, b, &q, int(m as i64), &y) {
            return Ok(Some(to_ints(&x).expect("integral orbit")));
        }
    }
    Ok(None)
}

/// Certifies (non-)vanishing of the truncated trace of the Kottwitz function
/// at degree `alpha` (default: the divisibility threshold) against the given
/// class, for a generic symbolic unramified character.
pub fn certify_nonvanishing(
    rd: &RootDatum,
    b: &NewtonPoint,
    mu: &[Rat],
    class: RepresentationClass,
    alpha: Option<usize>,
) -> Result<Certificate> {
    if !is_admissible(rd, b, mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    let threshold = divisibility_threshold(&rd.desc);
    let alpha = alpha.unwrap_or(threshold);
    let div = Divisibility::Assert { alpha };
    let f = kottwitz(rd, mu, alpha)?;
    let chi = UnramifiedCharacter::symbolic(rd.dim);
    let (result, criterion, induced, s1s2) = match class {
        RepresentationClass::Steinberg => {
            let t = trace_truncated_steinberg(rd, b, &f, &chi, div)?;
            let nonzero = !t.is_zero();
            let brute = !admissible_paths(rd, b, mu)?.is_empty();
            if brute != nonzero {
                return Err(StrataError::Infeasible(format!(
                    "path enumeration and trace disagree for {}",
                    b.label()
                )));
            }
            let criterion = match steinberg_criterion(rd, b) {
                Some((holds, name)) => {
                    let note = match (holds, nonzero) {
                        (true, true) => "holds",
                        (true, false) => "holds but the brute-force trace vanishes",
                        (false, false) => "fails",
                        (false, true) => "fails but the exact filter keeps a path",
                    };
                    format!("{name}; criterion {note}")
                }
                None => "brute force over the Weyl orbit".into(),
            };
            (t, criterion, None, None)
        }
        RepresentationClass::RB => {
            let data = class_rb_representation(rd, b, mu)?;
            let spec = RepresentationSpec::InducedSteinberg {
                q: ParabolicType::from_roots(data.levi_roots.clone()),
                steinberg_roots: data.steinberg_roots.clone(),
            };
            let t = trace_truncated_induced_steinberg(rd, b, &f, &chi, &spec, div)?;
            let (criterion, s1s2) = if rd.desc.is_gsp() {
                let w = s1s2_witness(rd, mu, b)?;
                if w.is_none() {
                    return Err(StrataError::Infeasible(format!("no (S1)/(S2) witness for {}", b.label())));
                }
                ("symplectic: Steinberg induced from Q, (S1)/(S2) witness from the Weyl orbit".to_string(), w)
            } else if rd.desc.is_unitary() {
                ("unitary: generic principal series on the ±1/2 blocks, Steinberg in the middle".to_string(), None)
            } else {
                ("linear: generic principal series on the slope 0 and 1 blocks, Steinberg in the middle".to_string(), None)
            };
            (t, criterion, Some(data), s1s2)
        }
    };
    let mut witnesses: Vec<Vec<i64>> = result.survivors.iter().map(|(e, _)| e.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    witnesses.sort();
    Ok(Certificate {
        group: rd.desc,
        mu: mu.to_vec(),
        slopes: b.slopes.clone(),
        class,
        verdict: if result.is_zero() { Verdict::Zero } else { Verdict::Nonzero },
        criterion,
        witnesses,
        alpha,
        alpha_threshold: threshold,
        induced,
        s1s2_witness: s1s2,
    })
}

/// Re-checks a certificate. A nonzero verdict is confirmed by checking each
/// stored witness against the Kottwitz function and the class filter, without
/// searching. A zero verdict is confirmed by recomputing the trace.
pub fn replay_certificate(cert: &Certificate) -> Result<bool> {
    let rd = build_root_datum(&cert.group)?;
    let b = NewtonPoint::new(&rd, cert.slopes.clone())?;
    if !is_admissible(&rd, &b, &cert.mu)? {
        return Ok(false);
    }
    let f = kottwitz(&rd, &cert.mu, cert.alpha)?;
    let ct = constant_term(&f, &ParabolicType::borel())?;
    match cert.verdict {
        Verdict::Zero => {
            let again = certify_nonvanishing(&rd, &b, &cert.mu, cert.class, Some(cert.alpha))?;
            Ok(again.verdict == Verdict::Zero && cert.witnesses.is_empty())
        }
        Verdict::Nonzero => {
            if cert.witnesses.is_empty() {
                return Ok(false);
            }
            let mut cache = OrbitCache::default();
            let steinberg = compose_xi(&b, XiVariant::Steinberg);
            for e in &cert.witnesses {
                if !ct.terms.contains_key(e) {
                    return Ok(false);
                }
                let ok = match (&cert.class, &cert.induced) {
                    (RepresentationClass::Steinberg, _) => steinberg.accepts(&rd, e, &mut cache),
                    (RepresentationClass::RB, Some(data)) => levi_dominant_translates(&rd, &b.slopes, &data.levi_roots)
                        .iter()
                        .any(|nu_l| induced_translate_accepts(&rd, nu_l, &data.levi_roots, &data.steinberg_roots, e)),
                    (RepresentationClass::RB, None) => false,
                };
                if !ok {
                    return Ok(false);
                }
            }
            if let Some(x) = &cert.s1s2_witness {
                let q = refined_parabolic_q(&rd, &b, &cert.mu)?;
                let m = splitting_degree(&rd);
                let xr: Vector = x.iter().map(|&v| int(v)).collect();
                let y = to_ints(&norm_map(&rd, &xr, m)?).unwrap_or_default();
                if !filter_s1s2(&rd, &b, &q, int(m as i64), &y) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
