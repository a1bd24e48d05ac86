//! Spherical functions on the Satake side: Weyl-invariant Laurent
//! polynomials in torus monomials with coefficients in `Q(q^{1/2})`.
//!
//! A monomial with exponent vector `e` stands for the torus elements whose
//! coordinates have absolute values `q^{e_i}`; every chamber inequality in
//! the crate is phrased in these exponents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Result, StrataError};
use crate::laurent::{QPoly, TraceValue};
use crate::polygons::check_mu;
use crate::rational::{dot, fmt_rat, int, rat, scale, Rat, Vector};
use crate::root_data::{
    dominant_rep, norm_map_int, orbit_under, Family, ParabolicType, Reflection, RootDatum, WeylKind,
};

/// Which Weyl group a spherical function is declared invariant under.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Invariance {
    /// The Weyl group of the group itself.
    Group,
    /// The Weyl group of a standard Levi.
    Levi(ParabolicType),
    /// No symmetry: a function on the torus.
    Torus,
}

/// Sign of the exponent in the Kottwitz prefactor `q^{∓α⟨ρ, μ⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PrefactorSign {
    #[default]
    Negative,
    Positive,
}

impl PrefactorSign {
    fn factor(self) -> Rat {
        match self {
            PrefactorSign::Negative => -Rat::one(),
            PrefactorSign::Positive => Rat::one(),
        }
    }
}

/// Where a Kottwitz function lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KottwitzSide {
    /// On the group over the degree-`α` unramified extension.
    OverExtension,
    /// Transported to the group over the base by base change.
    BaseChanged,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalFunction {
    pub dim: usize,
    pub terms: BTreeMap<Vec<i64>, QPoly>,
    pub invariance: Invariance,
}

impl SphericalFunction {
    pub fn zero(dim: usize, invariance: Invariance) -> Self {
        Self { dim, terms: BTreeMap::new(), invariance }
    }

    /// The unit of the Hecke algebra: the trivial double coset.
    pub fn unit(dim: usize) -> Self {
        let mut f = Self::zero(dim, Invariance::Group);
        f.add_term(vec![0; dim], &QPoly::one());
        f
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: &QPoly) {
        let entry = self.terms.entry(e.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.terms.keys()
    }

    /// Whether the coefficients are unchanged by every generator.
    pub fn is_invariant_under(&self, gens: &[Reflection]) -> bool {
        gens.iter().all(|g| {
            self.terms
                .iter()
                .all(|(e, c)| self.terms.get(&RootDatum::apply_reflection(g, e)) == Some(c))
        })
    }

    /// Keeps the monomials accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&[i64]) -> bool) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
            invariance: Invariance::Torus,
        }
    }

    /// Applies an exponent map monomial by monomial.
    pub fn map_exponents(&self, dim: usize, invariance: Invariance, f: impl Fn(&[i64]) -> Vec<i64>) -> Self {
        let mut out = Self::zero(dim, invariance);
        for (e, c) in &self.terms {
            out.add_term(f(e), c);
        }
        out
    }

    /// Canonical JSON: `{dim, invariance, terms: [{exponents, coeff: [{qhalf_power, rational}]}]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coeff: Vec<Value> = c
                    .terms()
                    .map(|(p, v)| {
                        let twice = p * int(2);
                        let power = if twice.is_integer() {
                            json!(twice.to_integer())
                        } else {
                            json!(fmt_rat(&twice))
                        };
                        json!({"qhalf_power": power, "rational": fmt_rat(v)})
                    })
                    .collect();
                json!({"exponents": e, "coeff": coeff})
            })
            .collect();
        let invariance = match &self.invariance {
            Invariance::Group => json!("group"),
            Invariance::Torus => json!("torus"),
            Invariance::Levi(p) => json!({"levi_roots": p.levi_roots}),
        };
        json!({"dim": self.dim, "invariance": invariance, "terms": terms})
    }
}

impl fmt::Display for SphericalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono = format!("[{}]", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                if c == &QPoly::one() {
                    mono
                } else {
                    format!("({c})*{mono}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Exact product (convolution on the Hecke side).
pub fn multiply(f: &SphericalFunction, g: &SphericalFunction) -> Result<SphericalFunction> {
    if f.dim != g.dim {
        return Err(StrataError::DimensionMismatch { expected: f.dim, got: g.dim });
    }
    if f.invariance != g.invariance {
        return Err(StrataError::InvalidInput(format!(
            "cannot multiply functions invariant under {:?} and {:?}",
            f.invariance, g.invariance
        )));
    }
    let mut out = SphericalFunction::zero(f.dim, f.invariance.clone());
    for (a, c) in &f.terms {
        for (b, d) in &g.terms {
            let e: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            out.add_term(e, &(c * d));
        }
    }
    Ok(out)
}

/// The Weyl group of the group over the degree-`α` extension.
fn weyl_over_extension(rd: &RootDatum, alpha: usize) -> Result<Vec<Reflection>> {
    rd.weyl_generators(WeylKind::Relative { alpha })
}

/// Orbit sum `q^{∓α⟨ρ, μ⟩} Σ [x]`, `x` over the orbit of `μ` under `gens`,
/// with exponents multiplied by `exponent_scale`.
fn orbit_sum(
    rho: &[Rat],
    mu: &[i64],
    gens: &[Reflection],
    alpha: usize,
    exponent_scale: i64,
    sign: PrefactorSign,
    invariance: Invariance,
) -> SphericalFunction {
    let mu_q: Vector = mu.iter().map(|&x| int(x)).collect();
    let pre = QPoly::q_power(sign.factor() * int(alpha as i64) * dot(rho, &mu_q));
    let mut f = SphericalFunction::zero(mu.len(), invariance);
    for x in orbit_under(gens, mu) {
        f.add_term(x.iter().map(|v| v * exponent_scale).collect(), &pre);
    }
    f
}

fn integral(mu: &[Rat]) -> Result<Vec<i64>> {
    crate::rational::to_ints(mu)
        .ok_or_else(|| StrataError::InvalidInput("cocharacter must be integral".into()))
}

/// The Kottwitz function of `(G, μ)` at degree `α`.
///
/// On the extension side it is the normalised orbit sum of `μ`. On the base
/// side it is the base change of that function, except for linear groups
/// over a proper extension `d > 1`, where it is the product over Frobenius
/// orbits of embeddings of elementary `GL_n` functions, in the `n` relative
/// Satake variables.
pub fn kottwitz_function(
    rd: &RootDatum,
    mu: &[Rat],
    alpha: usize,
    side: KottwitzSide,
    sign: PrefactorSign,
) -> Result<SphericalFunction> {
    if alpha == 0 {
        return Err(StrataError::InvalidInput("degree α must be positive".into()));
    }
    check_mu_any_base(rd, mu)?;
    if rd.desc.is_unitary() && alpha % 2 == 1 {
        return Err(StrataError::Infeasible(format!(
            "even degree required for the unitary group {} (got α = {alpha})",
            rd.desc
        )));
    }
    let mu_i = integral(mu)?;
    let gens = weyl_over_extension(rd, alpha)?;
    let over = orbit_sum(&rd.rho, &mu_i, &gens, alpha, 1, sign, Invariance::Group);
    match side {
        KottwitzSide::OverExtension => Ok(over),
        KottwitzSide::BaseChanged => match rd.desc.family {
            Family::GeneralLinear { n, d } if d > 1 => gl_orbit_product(n, d, &mu_i, alpha, sign),
            _ => Ok(base_change(&over, alpha, rd)),
        },
    }
}

/// `μ` checks for groups over any base: the cocharacter is dominant,
/// minuscule and, blockwise, of the standard shape.
fn check_mu_any_base(rd: &RootDatum, mu: &[Rat]) -> Result<()> {
    if rd.desc.base_degree() == 1 {
        return check_mu(rd, mu);
    }
    rd.check_dim(mu.len())?;
    integral(mu)?;
    if dominant_rep(rd, mu) != mu {
        return Err(StrataError::InvalidInput("cocharacter is not dominant".into()));
    }
    if !rd.is_minuscule(mu) {
        return Err(StrataError::NonMinuscule(crate::rational::fmt_vector(mu)));
    }
    Ok(())
}

/// `Π_v f_{n, α_v, s_v}` over the `gcd(d, α)` Frobenius orbits of the `d`
/// embeddings, each of degree `α_v = lcm(d, α)`.
fn gl_orbit_product(n: usize, d: usize, mu: &[i64], alpha: usize, sign: PrefactorSign) -> Result<SphericalFunction> {
    let g = d.gcd(&alpha);
    let alpha_v = d.lcm(&alpha);
    let gl = crate::root_data::build_root_datum(&crate::root_data::GroupDescriptor::gl(n))?;
    let mut acc = SphericalFunction::unit(n);
    for r in 0..g {
        let blocks: Vec<usize> = (r..d).step_by(g).collect();
        let counts: BTreeSet<i64> = blocks.iter().map(|b| mu[b * n..(b + 1) * n].iter().sum()).collect();
        if counts.len() != 1 {
            return Err(StrataError::Infeasible(format!(
                "μ is not constant on the Frobenius orbit {blocks:?} of embeddings at α = {alpha}"
            )));
        }
        let block = &mu[blocks[0] * n..(blocks[0] + 1) * n];
        let f = orbit_sum(&gl.rho, block, &gl.reflections, alpha_v, alpha_v as i64, sign, Invariance::Group);
        acc = multiply(&acc, &f)?;
    }
    Ok(acc)
}

/// Base change to the base field: `[X] ↦ [𝒩(X)]`.
pub fn base_change(f: &SphericalFunction, alpha: usize, rd: &RootDatum) -> SphericalFunction {
    f.map_exponents(f.dim, Invariance::Group, |e| norm_map_int(rd, e, alpha))
}

/// Base change assembled from its stages: split stages multiply exponents
/// by their degree, and the final stage of degree `θ`-order sums Galois
/// translates (for unitary groups this is the quadratic map `Y ↦ Y + θY`).
/// Requires the group to split over the degree-`α` extension.
pub fn base_change_staged(f: &SphericalFunction, alpha: usize, rd: &RootDatum) -> Result<SphericalFunction> {
    let t = rd.theta_order;
    if !alpha.is_multiple_of(t) {
        return Err(StrataError::Infeasible(format!(
            "staged base change needs the splitting degree {t} to divide α = {alpha}"
        )));
    }
    let split_degree = (alpha / t) as i64;
    Ok(f.map_exponents(f.dim, Invariance::Group, |e| {
        let scaled: Vec<i64> = e.iter().map(|x| x * split_degree).collect();
        norm_map_int(rd, &scaled, t)
    }))
}

/// Rewrites a `θ`-antisymmetric exponent vector of a unitary group in the
/// `⌊n/2⌋` variables of the quadratic base change: `Z_j = Y_j − Y_{n+1−j}`.
pub fn psi_reduce(y: &[i64]) -> Vec<i64> {
    let n = y.len();
    (0..n / 2).map(|j| y[j] - y[n - 1 - j]).collect()
}

/// The quadratic unitary base-change map on a single Satake variable
/// `X_i` (0-indexed): lower half kept, middle sent to `1`, upper half
/// inverted onto its mirror.
pub fn psi_on_generator(n: usize, i: usize) -> Vec<i64> {
    let m = n / 2;
    let mut z = vec![0; m];
    if i < m {
        z[i] = 1;
    } else if n % 2 == 1 && i == m {
        // middle variable goes to 1
    } else {
        z[n - 1 - i] = -1;
    }
    z
}

/// `f ↦ f^{(P)}`: on the Satake side the same polynomial, re-declared
/// invariant under the Levi.
pub fn constant_term(f: &SphericalFunction, p: &ParabolicType) -> Result<SphericalFunction> {
    if f.invariance != Invariance::Group {
        return Err(StrataError::InvalidInput("constant terms need a function invariant under the group".into()));
    }
    let mut g = f.clone();
    g.invariance = Invariance::Levi(p.clone());
    Ok(g)
}

/// One summand of the coset decomposition of a constant term.
#[derive(Debug, Clone)]
pub struct ConstantTermCoset {
    /// Levi-dominant representative `ν` of the Levi orbit.
    pub levi_dominant: Vec<i64>,
    /// Prefactor multiplying the Levi's Kottwitz function of `ν`.
    pub prefactor: QPoly,
    /// The Levi's Kottwitz function of `ν` (base changed).
    pub levi_function: SphericalFunction,
}

/// Decomposes the Weyl orbit of `μ` into Levi orbits, each summand being
/// `q^{∓α(⟨ρ_G, μ⟩ − ⟨ρ_M, ν⟩)} · f_{M, ν, α}`. Only for groups split over the base.
pub fn constant_term_cosets(
    rd: &RootDatum,
    mu: &[Rat],
    alpha: usize,
    p: &ParabolicType,
    sign: PrefactorSign,
) -> Result<Vec<ConstantTermCoset>> {
    if rd.theta_order != 1 {
        return Err(StrataError::Unsupported("constant-term decomposition for non-split groups".into()));
    }
    check_mu(rd, mu)?;
    let mu_i = integral(mu)?;
    let rho_m = rd.rho_levi(p);
    let levi_gens: Vec<Reflection> = p.levi_roots.iter().map(|&r| rd.reflections[r].clone()).collect();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut out = Vec::new();
    let rho_g_mu = dot(&rd.rho, mu);
    for x in orbit_under(&rd.reflections, &mu_i) {
        if seen.contains(&x) {
            continue;
        }
        let levi_orbit = orbit_under(&levi_gens, &x);
        seen.extend(levi_orbit.iter().cloned());
        let nu = levi_orbit
            .iter()
            .find(|y| {
                let yq: Vector = y.iter().map(|&v| int(v)).collect();
                p.levi_roots.iter().all(|&r| dot(&rd.simple_roots[r], &yq) >= Rat::zero())
            })
            .expect("every Levi orbit meets the Levi-dominant chamber")
            .clone();
        let nu_q: Vector = nu.iter().map(|&v| int(v)).collect();
        let a = int(alpha as i64);
        let prefactor = QPoly::q_power(sign.factor() * a * (rho_g_mu - dot(&rho_m, &nu_q)));
        let levi_function = orbit_sum(&rho_m, &nu, &levi_gens, alpha, alpha as i64, sign, Invariance::Levi(p.clone()));
        out.push(ConstantTermCoset { levi_dominant: nu, prefactor, levi_function });
    }
    Ok(out)
}

/// Assembles `Σ prefactor · f_{M, ν, α}` from the cosets.
pub fn constant_term_from_cosets(dim: usize, p: &ParabolicType, cosets: &[ConstantTermCoset]) -> SphericalFunction {
    let mut out = SphericalFunction::zero(dim, Invariance::Levi(p.clone()));
    for c in cosets {
        for (e, coeff) in &c.levi_function.terms {
            out.add_term(e.clone(), &(&c.prefactor * coeff));
        }
    }
    out
}

/// The decomposition with one uniform prefactor `q^{∓α⟨ρ_G − ρ_M, μ⟩}` for
/// every coset. Kept for comparison: it agrees with the constant term only
/// when every coset has `⟨ρ_M, ν⟩ = ⟨ρ_M, μ⟩`.
pub fn constant_term_uniform_prefactor(
    rd: &RootDatum,
    mu: &[Rat],
    alpha: usize,
    p: &ParabolicType,
    sign: PrefactorSign,
) -> Result<SphericalFunction> {
    let cosets = constant_term_cosets(rd, mu, alpha, p, sign)?;
    let rho_m = rd.rho_levi(p);
    let uniform = QPoly::q_power(
        sign.factor() * int(alpha as i64) * dot(&crate::rational::sub(&rd.rho, &rho_m), mu),
    );
    let mut out = SphericalFunction::zero(rd.dim, Invariance::Levi(p.clone()));
    for c in &cosets {
        for (e, coeff) in &c.levi_function.terms {
            out.add_term(e.clone(), &(&uniform * coeff));
        }
    }
    Ok(out)
}

/// Hecke parameters of an unramified character of the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeckeParameters {
    /// Formal variables `z_1, …, z_n`.
    Symbolic,
    /// Exact nonzero values.
    Values(Vector),
}

/// An unramified character `e ↦ q^{⟨shift, e⟩} z^e`; the shift carries the
/// modulus-character twists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnramifiedCharacter {
    pub z: HeckeParameters,
    pub shift: Vector,
}

impl UnramifiedCharacter {
    pub fn symbolic(dim: usize) -> Self {
        Self { z: HeckeParameters::Symbolic, shift: vec![Rat::zero(); dim] }
    }

    pub fn trivial(dim: usize) -> Self {
        Self { z: HeckeParameters::Values(vec![Rat::one(); dim]), shift: vec![Rat::zero(); dim] }
    }

    pub fn with_shift(&self, extra: &[Rat]) -> Self {
        Self { z: self.z.clone(), shift: crate::rational::add(&self.shift, extra) }
    }

    /// Twists by `δ_P^s`, where `δ_P(e) = q^{⟨2ρ_P, e⟩}`.
    pub fn twisted_by_delta(&self, rd: &RootDatum, p: &ParabolicType, s: Rat) -> Self {
        self.with_shift(&scale(s, &rd.two_rho_parabolic(p)))
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }
}

/// `Σ_e c_e(q) · q^{⟨shift, e⟩} · z^e`.
pub fn evaluate(f: &SphericalFunction, chi: &UnramifiedCharacter) -> Result<TraceValue> {
    if chi.dim() != f.dim {
        return Err(StrataError::DimensionMismatch { expected: f.dim, got: chi.dim() });
    }
    let mut out = TraceValue::zero();
    for (e, c) in &f.terms {
        let eq: Vector = e.iter().map(|&v| int(v)).collect();
        let shift = dot(&chi.shift, &eq);
        let (zexp, zval) = match &chi.z {
            HeckeParameters::Symbolic => (e.clone(), Rat::one()),
            HeckeParameters::Values(v) => {
                let mut prod = Rat::one();
                for (k, z) in e.iter().zip(v) {
                    if z.is_zero() {
                        return Err(StrataError::InvalidInput("Hecke parameters must be nonzero".into()));
                    }
                    prod *= z.pow(*k as i32);
                }
                (Vec::new(), prod)
            }
        };
        for (p, a) in c.terms() {
            out.add_term(p + shift, zexp.clone(), a * zval);
        }
    }
    Ok(out)
}

/// `⟨ρ, μ⟩`, the exponent scale of the Kottwitz prefactor.
pub fn rho_pairing(rd: &RootDatum, mu: &[Rat]) -> Rat {
    dot(&rd.rho, mu)
}

/// Half of `q`: the symbol `q^{1/2}` as a [`QPoly`].
pub fn q_half() -> QPoly {
    QPoly::q_power(rat(1, 2))
}
