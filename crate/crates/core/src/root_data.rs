//! Root data, Weyl groups, parabolic subgroups, projections and the Galois
//! action for the supported group families.
//!
//! Coordinates are those of a maximal torus over an extension splitting the
//! group. The dominant chamber is "coordinates non-decreasing": the simple
//! roots are `H_{i+1} - H_i` (suitably symmetrised for the non-linear
//! families), so dominant slope vectors read `λ_1 ≤ … ≤ λ_n`.
//!
//! Every Weyl group that occurs acts on coordinates by permutations: the
//! sign changes of types B/C become swaps of mirrored coordinates once the
//! constraint defining the relevant subspace is kept instead of eliminated.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, StrataError};
use crate::rational::{add, dot, int, invert, rat, scale, sub, unit, zeros, Rat, Vector};

/// A cocharacter-space vector (a rational point of `X_*(T) ⊗ Q`).
pub type CocharVector = Vector;

/// The split classical Dynkin types offered by the `split` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassicalType {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `GL_n` over an unramified extension of degree `d`, restricted to the prime field.
    GeneralLinear { n: usize, d: usize },
    /// Unramified unitary group in `n` variables over a degree-`d` base.
    Unitary { n: usize, d: usize },
    /// `GSp_{2g}`.
    SymplecticSimilitude { g: usize },
    /// A split group of classical type and the given rank.
    SplitClassical { kind: ClassicalType, rank: usize },
}

/// Which group to build. The residue field size is always the formal symbol `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupDescriptor {
    pub family: Family,
}

impl GroupDescriptor {
    pub fn gl(n: usize) -> Self {
        Self::gl_over(n, 1)
    }

    pub fn gl_over(n: usize, d: usize) -> Self {
        Self { family: Family::GeneralLinear { n, d } }
    }

    pub fn unitary(n: usize) -> Self {
        Self::unitary_over(n, 1)
    }

    pub fn unitary_over(n: usize, d: usize) -> Self {
        Self { family: Family::Unitary { n, d } }
    }

    pub fn gsp(g: usize) -> Self {
        Self { family: Family::SymplecticSimilitude { g } }
    }

    pub fn split(kind: ClassicalType, rank: usize) -> Self {
        Self { family: Family::SplitClassical { kind, rank } }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(StrataError::InvalidDescriptor(m.to_string()));
        match self.family {
            Family::GeneralLinear { n, d } | Family::Unitary { n, d } => {
                if n == 0 {
                    return bad("n must be at least 1");
                }
                if d == 0 {
                    return bad("d must be at least 1");
                }
            }
            Family::SymplecticSimilitude { g } => {
                if g == 0 {
                    return bad("g must be at least 1");
                }
            }
            Family::SplitClassical { rank, .. } => {
                if rank == 0 {
                    return bad("rank must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// Degree of the unramified base field.
    pub fn base_degree(&self) -> usize {
        match self.family {
            Family::GeneralLinear { d, .. } | Family::Unitary { d, .. } => d,
            _ => 1,
        }
    }

    /// Number of coordinates of one block (the `n` of `GL_n`, `2g` for `GSp_{2g}`).
    pub fn block_len(&self) -> usize {
        match self.family {
            Family::GeneralLinear { n, .. } | Family::Unitary { n, .. } => n,
            Family::SymplecticSimilitude { g } => 2 * g,
            Family::SplitClassical { kind, rank } => match kind {
                ClassicalType::A => rank + 1,
                ClassicalType::B => 2 * rank + 1,
                ClassicalType::C => 2 * rank,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.block_len() * self.base_degree()
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self.family, Family::Unitary { .. })
    }

    pub fn is_gsp(&self) -> bool {
        matches!(self.family, Family::SymplecticSimilitude { .. })
    }

    pub fn is_linear(&self) -> bool {
        matches!(
            self.family,
            Family::GeneralLinear { .. } | Family::SplitClassical { kind: ClassicalType::A, .. }
        )
    }

    /// Human-readable name such as `GL_4`, `U_3`, `GSp_4`, `GL_2(d=2)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::GeneralLinear { n, d: 1 } => format!("GL_{n}"),
            Family::GeneralLinear { n, d } => format!("GL_{n}(d={d})"),
            Family::Unitary { n, d: 1 } => format!("U_{n}"),
            Family::Unitary { n, d } => format!("U_{n}(d={d})"),
            Family::SymplecticSimilitude { g } => format!("GSp_{}", 2 * g),
            Family::SplitClassical { kind, rank } => format!("{kind:?}_{rank}"),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)
            .map_err(|e| StrataError::InvalidDescriptor(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g: Option<usize>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut j = DescriptorJson { family: String::new(), n: None, d: None, g: None, kind: None, rank: None };
        match self.family {
            Family::GeneralLinear { n, d } => {
                j.family = "GL".into();
                j.n = Some(n);
                j.d = Some(d);
            }
            Family::Unitary { n, d } => {
                j.family = "U".into();
                j.n = Some(n);
                j.d = Some(d);
            }
            Family::SymplecticSimilitude { g } => {
                j.family = "GSp".into();
                j.g = Some(g);
            }
            Family::SplitClassical { kind, rank } => {
                j.family = "split".into();
                j.kind = Some(format!("{kind:?}"));
                j.rank = Some(rank);
            }
        }
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let j = DescriptorJson::deserialize(de)?;
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| D::Error::custom(format!("family {} requires field {name:?}", j.family)))
        };
        let family = match j.family.as_str() {
            "GL" => Family::GeneralLinear { n: need(j.n, "n")?, d: j.d.unwrap_or(1) },
            "U" => Family::Unitary { n: need(j.n, "n")?, d: j.d.unwrap_or(1) },
            "GSp" => Family::SymplecticSimilitude { g: need(j.g, "g")? },
            "split" => {
                let kind = match j.kind.as_deref() {
                    Some("A") => ClassicalType::A,
                    Some("B") => ClassicalType::B,
                    Some("C") => ClassicalType::C,
                    other => return Err(D::Error::custom(format!("unknown split type {other:?}"))),
                };
                Family::SplitClassical { kind, rank: need(j.rank, "rank")? }
            }
            other => return Err(D::Error::custom(format!("unknown family {other:?}"))),
        };
        Ok(GroupDescriptor { family })
    }
}

/// A coordinate permutation written as a product of disjoint transpositions.
pub type Reflection = Vec<(usize, usize)>;

/// Signed coordinate permutation `x ↦ (sign_i · x_{source_i})_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    pub source: Vec<usize>,
    pub sign: Vec<i64>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self { source: (0..n).collect(), sign: vec![1; n] }
    }

    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Clone + std::ops::Neg<Output = T>,
    {
        self.source
            .iter()
            .zip(&self.sign)
            .map(|(&j, &s)| if s < 0 { -x[j].clone() } else { x[j].clone() })
            .collect()
    }
}

/// Which Weyl group an orbit is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylKind {
    /// The Weyl group of the split form (all coordinate blocks permuted independently).
    Absolute,
    /// The Weyl group relative to the unramified extension of the given degree.
    Relative { alpha: usize },
}

/// Standard parabolic subgroup, recorded by the simple roots of its Levi.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParabolicType {
    pub levi_roots: Vec<usize>,
}

impl ParabolicType {
    pub fn borel() -> Self {
        Self { levi_roots: Vec::new() }
    }

    pub fn whole(rd: &RootDatum) -> Self {
        Self { levi_roots: (0..rd.rank()).collect() }
    }

    pub fn from_roots(mut roots: Vec<usize>) -> Self {
        roots.sort_unstable();
        roots.dedup();
        Self { levi_roots: roots }
    }

    pub fn contains(&self, root: usize) -> bool {
        self.levi_roots.binary_search(&root).is_ok()
    }

    pub fn is_subset_of(&self, other: &ParabolicType) -> bool {
        self.levi_roots.iter().all(|r| other.contains(*r))
    }

    /// Block sizes of the Levi in coordinate order.
    pub fn composition(&self, rd: &RootDatum) -> Vec<usize> {
        let n = rd.dim;
        let mut cut = vec![true; n + 1];
        for &r in &self.levi_roots {
            for &(a, b) in &rd.reflections[r] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                for c in cut.iter_mut().take(hi + 1).skip(lo + 1) {
                    *c = false;
                }
            }
        }
        let mut comp = Vec::new();
        let mut last = 0;
        for (k, &is_cut) in cut.iter().enumerate().take(n + 1).skip(1) {
            if is_cut {
                comp.push(k - last);
                last = k;
            }
        }
        comp
    }

    /// The standard parabolic with the given block sizes, if there is one.
    pub fn from_composition(rd: &RootDatum, comp: &[usize]) -> Result<Self> {
        if comp.iter().sum::<usize>() != rd.dim || comp.contains(&0) {
            return Err(StrataError::InvalidInput(format!(
                "composition {comp:?} does not partition {} coordinates",
                rd.dim
            )));
        }
        let mut block_of = Vec::with_capacity(rd.dim);
        for (b, &len) in comp.iter().enumerate() {
            block_of.extend(std::iter::repeat_n(b, len));
        }
        let roots: Vec<usize> = (0..rd.rank())
            .filter(|&r| rd.reflections[r].iter().all(|&(a, b)| block_of[a] == block_of[b]))
            .collect();
        let p = ParabolicType::from_roots(roots);
        if p.composition(rd) != comp {
            return Err(StrataError::InvalidInput(format!(
                "composition {comp:?} is not a standard parabolic of {}",
                rd.desc
            )));
        }
        Ok(p)
    }
}

/// Everything the rest of the crate needs to know about a group.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub desc: GroupDescriptor,
    pub dim: usize,
    /// Simple roots as functionals on the coordinate space (dot product pairing).
    pub simple_roots: Vec<Vector>,
    pub coroots: Vec<Vector>,
    /// Simple reflections as coordinate permutations.
    pub reflections: Vec<Reflection>,
    /// Positive roots with multiplicity, used for `ρ` and modular characters.
    pub positive_roots: Vec<Vector>,
    pub rho: Vector,
    /// Fundamental weights of the whole group, aligned with `simple_roots`.
    pub fundamental_weights: Vec<Vector>,
    pub theta: SignedPermutation,
    pub theta_order: usize,
    /// Basis of the subspace where relative cocharacters live.
    pub subspace_basis: Vec<Vector>,
    pub center_basis: Vec<Vector>,
}

/// Builds the root datum of a validated descriptor.
pub fn build_root_datum(desc: &GroupDescriptor) -> Result<RootDatum> {
    desc.validate()?;
    let dim = desc.dim();
    let blocks = desc.base_degree();
    let len = desc.block_len();

    let mut simple_roots = Vec::new();
    let mut coroots = Vec::new();
    let mut reflections = Vec::new();

    match desc.family {
        Family::GeneralLinear { .. }
        | Family::Unitary { d: 2.., .. }
        | Family::SplitClassical { kind: ClassicalType::A, .. } => {
            for b in 0..blocks {
                for i in 0..len - 1 {
                    let (x, y) = (b * len + i, b * len + i + 1);
                    simple_roots.push(sub(&unit(dim, y), &unit(dim, x)));
                    coroots.push(sub(&unit(dim, y), &unit(dim, x)));
                    reflections.push(vec![(x, y)]);
                }
            }
        }
        Family::Unitary { .. }
        | Family::SymplecticSimilitude { .. }
        | Family::SplitClassical { .. } => {
            mirrored_simple_roots(dim, &mut simple_roots, &mut coroots, &mut reflections);
        }
    }

    let subspace_basis = subspace_basis(desc);
    let center_basis = center_basis(desc);
    let positive_roots = positive_roots(desc, &subspace_basis);
    let rho = scale(rat(1, 2), &positive_roots.iter().fold(zeros(dim), |acc, r| add(&acc, r)));
    let (theta, theta_order) = theta_for(desc);

    let mut rd = RootDatum {
        desc: *desc,
        dim,
        simple_roots,
        coroots,
        reflections,
        positive_roots,
        rho,
        fundamental_weights: Vec::new(),
        theta,
        theta_order,
        subspace_basis,
        center_basis,
    };
    let all: Vec<usize> = (0..rd.rank()).collect();
    rd.fundamental_weights = rd.fundamental_weights_for(&all);
    Ok(rd)
}

/// Simple roots for the families whose torus carries a mirror symmetry
/// `i ↔ N-1-i` (unitary, symplectic, split B and C).
fn mirrored_simple_roots(
    dim: usize,
    roots: &mut Vec<Vector>,
    coroots: &mut Vec<Vector>,
    reflections: &mut Vec<Reflection>,
) {
    let m = dim / 2;
    let mirror = |i: usize| dim - 1 - i;
    let e = |i: usize| unit(dim, i);
    for i in 0..m.saturating_sub(1) {
        let lower = sub(&e(i + 1), &e(i));
        let upper = sub(&e(mirror(i)), &e(mirror(i + 1)));
        roots.push(scale(rat(1, 2), &add(&lower, &upper)));
        coroots.push(add(&lower, &upper));
        reflections.push(vec![(i, i + 1), (mirror(i + 1), mirror(i))]);
    }
    if m == 0 {
        return;
    }
    if dim.is_multiple_of(2) {
        roots.push(sub(&e(m), &e(m - 1)));
        coroots.push(sub(&e(m), &e(m - 1)));
        reflections.push(vec![(m - 1, m)]);
    } else {
        // Odd length: the middle coordinate is fixed and the last simple
        // reflection swaps the two coordinates around it.
        roots.push(scale(rat(1, 2), &sub(&e(m + 1), &e(m - 1))));
        coroots.push(scale(int(2), &sub(&e(m + 1), &e(m - 1))));
        reflections.push(vec![(m - 1, m + 1)]);
    }
}

fn subspace_basis(desc: &GroupDescriptor) -> Vec<Vector> {
    let dim = desc.dim();
    match desc.family {
        Family::GeneralLinear { .. } | Family::SplitClassical { kind: ClassicalType::A, .. } => {
            (0..dim).map(|i| unit(dim, i)).collect()
        }
        Family::Unitary { d, .. } if d > 1 => (0..dim).map(|i| unit(dim, i)).collect(),
        Family::SymplecticSimilitude { .. } => {
            let mut b: Vec<Vector> = (0..dim / 2)
                .map(|i| sub(&unit(dim, i), &unit(dim, dim - 1 - i)))
                .collect();
            b.push(vec![Rat::one(); dim]);
            b
        }
        Family::Unitary { .. } | Family::SplitClassical { .. } => (0..dim / 2)
            .map(|i| sub(&unit(dim, i), &unit(dim, dim - 1 - i)))
            .collect(),
    }
}

fn center_basis(desc: &GroupDescriptor) -> Vec<Vector> {
    let dim = desc.dim();
    match desc.family {
        Family::GeneralLinear { n, d } | Family::Unitary { n, d } if d > 1 || matches!(desc.family, Family::GeneralLinear { .. }) => {
            (0..d)
                .map(|b| {
                    let mut v = zeros(dim);
                    for x in v.iter_mut().skip(b * n).take(n) {
                        *x = Rat::one();
                    }
                    v
                })
                .collect()
        }
        Family::SplitClassical { kind: ClassicalType::A, .. } | Family::SymplecticSimilitude { .. } => {
            vec![vec![Rat::one(); dim]]
        }
        _ => Vec::new(),
    }
}

/// Positive roots as restrictions of the ascending roots of `GL_N`.
///
/// For the unitary family the restrictions are kept with multiplicity (they
/// are the relative roots weighted by root-space dimension). For the
/// symplectic and split B/C families, distinct restrictions are the roots;
/// type B additionally drops the doubled roots `2x_i`.
fn positive_roots(desc: &GroupDescriptor, basis: &[Vector]) -> Vec<Vector> {
    let dim = desc.dim();
    let len = desc.block_len();
    let mut raw: Vec<Vector> = Vec::new();
    for b in 0..desc.base_degree() {
        for i in 0..len {
            for j in i + 1..len {
                raw.push(sub(&unit(dim, b * len + j), &unit(dim, b * len + i)));
            }
        }
    }
    let dedupe = matches!(
        desc.family,
        Family::SymplecticSimilitude { .. }
            | Family::SplitClassical { kind: ClassicalType::B | ClassicalType::C, .. }
    );
    if !dedupe {
        return raw;
    }
    let key = |r: &Vector| -> Vec<Rat> { basis.iter().map(|b| dot(r, b)).collect() };
    let mut groups: BTreeMap<Vec<Rat>, Vec<Vector>> = BTreeMap::new();
    for r in raw {
        groups.entry(key(&r)).or_default().push(r);
    }
    let keys: BTreeSet<Vec<Rat>> = groups.keys().cloned().collect();
    let drop_doubles = matches!(desc.family, Family::SplitClassical { kind: ClassicalType::B, .. });
    groups
        .into_iter()
        .filter(|(k, _)| {
            !(drop_doubles && keys.contains(&k.iter().map(|x| x / int(2)).collect::<Vec<_>>()))
        })
        .map(|(_, members)| {
            let total = members.iter().fold(zeros(dim), |acc, r| add(&acc, r));
            scale(Rat::new(1, members.len() as i64), &total)
        })
        .collect()
}

fn theta_for(desc: &GroupDescriptor) -> (SignedPermutation, usize) {
    let dim = desc.dim();
    match desc.family {
        Family::GeneralLinear { n, d } => {
            let source = (0..dim).map(|i| ((i / n + d - 1) % d) * n + i % n).collect();
            (SignedPermutation { source, sign: vec![1; dim] }, d)
        }
        Family::Unitary { n, d } => {
            let mut source = Vec::with_capacity(dim);
            let mut sign = Vec::with_capacity(dim);
            for i in 0..dim {
                let (b, j) = (i / n, i % n);
                if b == 0 {
                    source.push((d - 1) * n + (n - 1 - j));
                    sign.push(-1);
                } else {
                    source.push((b - 1) * n + j);
                    sign.push(1);
                }
            }
            (SignedPermutation { source, sign }, 2 * d)
        }
        _ => (SignedPermutation::identity(dim), 1),
    }
}

impl RootDatum {
    /// Semisimple rank of the relative root system.
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    /// True when relative structures (Newton points, truncations, traces)
    /// are available: these need the base field to be the prime field.
    pub fn require_prime_base(&self) -> Result<()> {
        if self.desc.base_degree() == 1 {
            Ok(())
        } else {
            Err(StrataError::Unsupported(format!(
                "{} is a restriction of scalars; only orbit, norm and Kottwitz-function operations support d > 1",
                self.desc
            )))
        }
    }

    pub fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(StrataError::DimensionMismatch { expected: self.dim, got: len })
        }
    }

    pub fn pair(&self, functional: &[Rat], x: &[Rat]) -> Rat {
        dot(functional, x)
    }

    /// Whether `x` lies in the subspace of relative cocharacters.
    pub fn in_subspace(&self, x: &[Rat]) -> bool {
        let n = self.dim;
        match self.desc.family {
            Family::GeneralLinear { .. } | Family::SplitClassical { kind: ClassicalType::A, .. } => true,
            Family::Unitary { d, .. } if d > 1 => true,
            Family::SymplecticSimilitude { .. } => {
                let c = x[0] + x[n - 1];
                (0..n).all(|i| x[i] + x[n - 1 - i] == c)
            }
            _ => (0..n).all(|i| x[i] == -x[n - 1 - i]),
        }
    }

    pub fn is_dominant(&self, x: &[Rat]) -> bool {
        self.simple_roots.iter().all(|a| !dot(a, x).is_negative())
    }

    /// Weyl group generators of the requested kind.
    pub fn weyl_generators(&self, kind: WeylKind) -> Result<Vec<Reflection>> {
        let len = self.desc.block_len();
        let block_transpositions = |blocks: &[Vec<usize>]| -> Vec<Reflection> {
            let mut gens = Vec::new();
            for class in blocks {
                for i in 0..len - 1 {
                    gens.push(class.iter().map(|b| (b * len + i, b * len + i + 1)).collect());
                }
            }
            gens
        };
        match (self.desc.family, kind) {
            (Family::GeneralLinear { d, .. }, WeylKind::Absolute)
            | (Family::Unitary { d, .. }, WeylKind::Absolute) => {
                let classes: Vec<Vec<usize>> = (0..d).map(|b| vec![b]).collect();
                Ok(block_transpositions(&classes))
            }
            (Family::GeneralLinear { d, .. }, WeylKind::Relative { alpha }) => {
                // Centraliser of θ^α: permutations repeated along the orbits of
                // block rotation by α.
                let g = d.gcd(&alpha.max(1));
                let classes: Vec<Vec<usize>> = (0..g).map(|r| (r..d).step_by(g).collect()).collect();
                Ok(block_transpositions(&classes))
            }
            (Family::Unitary { d, .. }, WeylKind::Relative { alpha }) => {
                if alpha % (2 * d) == 0 {
                    self.weyl_generators(WeylKind::Absolute)
                } else if d == 1 {
                    Ok(self.reflections.clone())
                } else {
                    Err(StrataError::Unsupported(
                        "relative Weyl group of a restricted unitary group below its splitting degree".into(),
                    ))
                }
            }
            _ => Ok(self.reflections.clone()),
        }
    }

    /// Builds a signed permutation from a list of transpositions.
    pub fn apply_reflection<T: Clone>(r: &Reflection, x: &[T]) -> Vec<T> {
        let mut y = x.to_vec();
        for &(a, b) in r {
            y.swap(a, b);
        }
        y
    }

    /// Fundamental weights of the Levi whose simple roots are `roots`,
    /// aligned with `roots`. They pair to `δ` with the coroots and vanish on
    /// the centre of that Levi.
    pub fn fundamental_weights_for(&self, roots: &[usize]) -> Vec<Vector> {
        if roots.is_empty() {
            return Vec::new();
        }
        let cartan: Vec<Vector> = roots
            .iter()
            .map(|&i| roots.iter().map(|&j| dot(&self.simple_roots[i], &self.coroots[j])).collect())
            .collect();
        let inv = invert(&cartan).expect("Cartan matrices are invertible");
        inv.iter()
            .map(|row| {
                roots
                    .iter()
                    .zip(row)
                    .fold(zeros(self.dim), |acc, (&j, c)| add(&acc, &scale(*c, &self.simple_roots[j])))
            })
            .collect()
    }

    /// Half the sum of the positive roots of the Levi with simple roots `roots`.
    pub fn rho_levi(&self, levi: &ParabolicType) -> Vector {
        let comp = levi.composition(self);
        let projected: Vec<Vector> = self
            .subspace_basis
            .iter()
            .map(|b| block_means(&comp, b))
            .collect();
        let total = self
            .positive_roots
            .iter()
            .filter(|r| projected.iter().all(|p| dot(r, p).is_zero()))
            .fold(zeros(self.dim), |acc, r| add(&acc, r));
        scale(rat(1, 2), &total)
    }

    /// `2ρ_P = 2ρ_G − 2ρ_M`: `δ_P` at exponent `e` is `q^{⟨2ρ_P, e⟩}`.
    pub fn two_rho_parabolic(&self, p: &ParabolicType) -> Vector {
        scale(int(2), &sub(&self.rho, &self.rho_levi(p)))
    }

    /// `ε_P = (−1)^{dim A_P/A_G}`.
    pub fn epsilon(&self, p: &ParabolicType) -> i64 {
        if (self.rank() - p.levi_roots.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All standard parabolic subgroups, smallest Levi first.
    pub fn standard_parabolics(&self) -> Vec<ParabolicType> {
        let r = self.rank();
        let mut out: Vec<ParabolicType> = (0u32..(1 << r))
            .map(|mask| ParabolicType::from_roots((0..r).filter(|i| mask & (1 << i) != 0).collect()))
            .collect();
        out.sort_by(|a, b| a.levi_roots.len().cmp(&b.levi_roots.len()).then(a.cmp(b)));
        out
    }

    /// The parabolic whose Levi roots are exactly those vanishing on `x`.
    pub fn centralizer_parabolic(&self, x: &[Rat]) -> ParabolicType {
        ParabolicType::from_roots(
            (0..self.rank()).filter(|&i| dot(&self.simple_roots[i], x).is_zero()).collect(),
        )
    }

    pub fn theta_apply(&self, x: &[Rat]) -> Vector {
        self.theta.apply(x)
    }

    /// Whether `μ` pairs with every root to `-1`, `0` or `1`.
    pub fn is_minuscule(&self, mu: &[Rat]) -> bool {
        self.positive_roots.iter().all(|r| {
            let v = dot(r, mu);
            v.is_integer() && v.abs() <= Rat::one()
        })
    }

    /// Dominant minuscule cocharacters offered for the family, including the
    /// central ones.
    pub fn minuscule_cocharacters(&self) -> Result<Vec<CocharVector>> {
        self.require_prime_base()?;
        let n = self.dim;
        let step = |s: usize| -> Vector {
            (0..n).map(|i| if i >= n - s { Rat::one() } else { Rat::zero() }).collect()
        };
        let out = match self.desc.family {
            Family::GeneralLinear { .. }
            | Family::Unitary { .. }
            | Family::SplitClassical { kind: ClassicalType::A, .. } => (0..=n).map(step).collect(),
            Family::SymplecticSimilitude { g } => vec![zeros(n), step(g), step(n)],
            Family::SplitClassical { kind: ClassicalType::B, .. } => {
                let mut v = zeros(n);
                v[0] = -Rat::one();
                v[n - 1] = Rat::one();
                vec![zeros(n), v]
            }
            Family::SplitClassical { kind: ClassicalType::C, .. } => vec![zeros(n)],
        };
        Ok(out)
    }

    /// The standard minuscule cocharacter `(0^{n-s}, 1^s)` (or `(0^g, 1^g)` for `GSp`).
    pub fn mu_standard(&self, s: usize) -> Result<CocharVector> {
        let n = self.desc.block_len();
        if s > n {
            return Err(StrataError::InvalidInput(format!("s = {s} exceeds n = {n}")));
        }
        let block: Vector = (0..n).map(|i| if i >= n - s { Rat::one() } else { Rat::zero() }).collect();
        Ok(block.iter().cycle().take(self.dim).cloned().collect())
    }
}

/// Orbit of `x` under the group generated by `gens`, deduplicated and sorted.
pub fn orbit_under<T: Clone + Ord>(gens: &[Reflection], x: &[T]) -> Vec<Vec<T>> {
    let mut seen: BTreeSet<Vec<T>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x.to_vec());
    queue.push_back(x.to_vec());
    while let Some(y) = queue.pop_front() {
        for g in gens {
            let z = RootDatum::apply_reflection(g, &y);
            if !seen.contains(&z) {
                seen.insert(z.clone());
                queue.push_back(z);
            }
        }
    }
    seen.into_iter().collect()
}

/// Weyl orbit of `x`, in lexicographic order.
pub fn weyl_orbit(rd: &RootDatum, x: &[Rat], kind: WeylKind) -> Result<Vec<CocharVector>> {
    rd.check_dim(x.len())?;
    Ok(orbit_under(&rd.weyl_generators(kind)?, x))
}

/// The representative of the absolute Weyl orbit of `x` in the closed
/// dominant chamber: each coordinate block sorted ascending.
pub fn dominant_rep<T: Clone + Ord>(rd: &RootDatum, x: &[T]) -> Vec<T> {
    let len = match rd.desc.family {
        Family::GeneralLinear { n, .. } | Family::Unitary { n, .. } => n,
        _ => rd.dim,
    };
    let mut y = x.to_vec();
    for chunk in y.chunks_mut(len) {
        chunk.sort();
    }
    y
}

/// Replaces every block of the composition by its mean.
pub fn block_means(comp: &[usize], x: &[Rat]) -> Vector {
    let mut out = Vec::with_capacity(x.len());
    let mut start = 0;
    for &len in comp {
        let block = &x[start..start + len];
        let mean = block.iter().sum::<Rat>() / int(len as i64);
        out.extend(std::iter::repeat_n(mean, len));
        start += len;
    }
    out
}

/// Splits `x = π_P(x) + Pr_P(x)`, with `π_P` the average under the Levi's Weyl group.
pub fn project(rd: &RootDatum, p: &ParabolicType, x: &[Rat]) -> Result<(CocharVector, CocharVector)> {
    rd.check_dim(x.len())?;
    let pi = block_means(&p.composition(rd), x);
    let pr = sub(x, &pi);
    Ok((pi, pr))
}

/// The norm `Σ_{i<α} θ^i(x)` of the degree-`α` unramified extension.
pub fn norm_map(rd: &RootDatum, x: &[Rat], alpha: usize) -> Result<CocharVector> {
    rd.check_dim(x.len())?;
    if alpha == 0 {
        return Err(StrataError::InvalidInput("degree α must be positive".into()));
    }
    let mut acc = zeros(rd.dim);
    let mut cur = x.to_vec();
    for _ in 0..alpha {
        acc = add(&acc, &cur);
        cur = rd.theta_apply(&cur);
    }
    Ok(acc)
}

/// Integer-exponent version of [`norm_map`], used on monomials.
pub fn norm_map_int(rd: &RootDatum, x: &[i64], alpha: usize) -> Vec<i64> {
    let mut acc = vec![0i64; x.len()];
    let mut cur = x.to_vec();
    for _ in 0..alpha {
        for (a, c) in acc.iter_mut().zip(&cur) {
            *a += c;
        }
        cur = rd.theta.apply(&cur);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ints;

    fn gl(n: usize) -> RootDatum {
        build_root_datum(&GroupDescriptor::gl(n)).unwrap()
    }

    #[test]
    fn gl2_rho_is_minus_half_half() {
        assert_eq!(gl(2).rho, vec![rat(-1, 2), rat(1, 2)]);
    }

    #[test]
    fn gl_fundamental_weights_match_partial_sum_formula() {
        // In the ascending convention the weight of α_i is the negative of
        // H_1 + … + H_i − (i/n)(H_1 + … + H_n).
        for n in 2..6 {
            let rd = gl(n);
            for i in 0..n - 1 {
                let k = i + 1;
                let expected: Vector = (0..n)
                    .map(|j| {
                        let head = if j < k { Rat::one() } else { Rat::zero() };
                        -(head - rat(k as i64, n as i64))
                    })
                    .collect();
                assert_eq!(rd.fundamental_weights[i], expected);
            }
        }
    }

    #[test]
    fn gl3_first_weight_vanishes_on_centre() {
        let rd = gl(3);
        assert!(dot(&rd.fundamental_weights[0], &ints(&[1, 1, 1])).is_zero());
    }

    #[test]
    fn dual_basis_property_all_families() {
        let descs = [
            GroupDescriptor::gl(4),
            GroupDescriptor::unitary(5),
            GroupDescriptor::unitary(6),
            GroupDescriptor::gsp(3),
            GroupDescriptor::split(ClassicalType::B, 3),
            GroupDescriptor::split(ClassicalType::C, 2),
        ];
        for desc in descs {
            let rd = build_root_datum(&desc).unwrap();
            for (i, w) in rd.fundamental_weights.iter().enumerate() {
                for (j, c) in rd.coroots.iter().enumerate() {
                    let expect = if i == j { Rat::one() } else { Rat::zero() };
                    assert_eq!(dot(w, c), expect, "{desc} weight {i} coroot {j}");
                }
                for z in &rd.center_basis {
                    assert!(dot(w, z).is_zero());
                }
            }
            for (a, c) in rd.simple_roots.iter().zip(&rd.coroots) {
                assert_eq!(dot(a, c), int(2));
            }
        }
    }

    #[test]
    fn unitary_theta_is_the_flip() {
        let rd = build_root_datum(&GroupDescriptor::unitary(10)).unwrap();
        let x = ints(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let t = rd.theta_apply(&x);
        assert_eq!(t, ints(&[-10, -9, -8, -7, -6, -5, -4, -3, -2, -1]));
        assert_eq!(rd.theta_apply(&t), x);
        assert_eq!(rd.theta_order, 2);
    }

    #[test]
    fn theta_permutes_simple_roots() {
        for desc in [GroupDescriptor::gl_over(3, 3), GroupDescriptor::unitary(5)] {
            let rd = build_root_datum(&desc).unwrap();
            // θ acts on functionals through the inverse of its action on vectors;
            // test on coroots, which live in the same space as cocharacters.
            let set: BTreeSet<Vector> = rd.coroots.iter().cloned().collect();
            for c in &rd.coroots {
                let image = rd.theta_apply(c);
                if desc.is_unitary() {
                    // Relative coroots are θ-fixed.
                    assert_eq!(&image, c);
                } else {
                    assert!(set.contains(&image));
                }
            }
            let mut x: Vector = (0..rd.dim).map(|i| int(i as i64)).collect();
            let original = x.clone();
            for _ in 0..rd.theta_order {
                x = rd.theta_apply(&x);
            }
            assert_eq!(x, original);
        }
    }

    #[test]
    fn orbit_sizes() {
        let rd = gl(2);
        let o = weyl_orbit(&rd, &ints(&[0, 1]), WeylKind::Absolute).unwrap();
        assert_eq!(o, vec![ints(&[0, 1]), ints(&[1, 0])]);
        assert_eq!(weyl_orbit(&gl(3), &ints(&[0, 0, 1]), WeylKind::Absolute).unwrap().len(), 3);
        let gsp = build_root_datum(&GroupDescriptor::gsp(2)).unwrap();
        let o = weyl_orbit(&gsp, &ints(&[0, 0, 1, 1]), WeylKind::Relative { alpha: 1 }).unwrap();
        assert_eq!(o.len(), 4);
        for v in &o {
            assert!(gsp.in_subspace(v));
        }
    }

    #[test]
    fn gsp4_weyl_group_has_eight_elements() {
        let gsp = build_root_datum(&GroupDescriptor::gsp(2)).unwrap();
        let labels: Vec<usize> = (0..4).collect();
        let elems = orbit_under(&gsp.reflections, &labels);
        assert_eq!(elems.len(), 8);
    }

    #[test]
    fn dominant_representatives() {
        assert_eq!(dominant_rep(&gl(3), &ints(&[2, 0, 1])), ints(&[0, 1, 2]));
        let gsp = build_root_datum(&GroupDescriptor::gsp(2)).unwrap();
        assert_eq!(dominant_rep(&gsp, &ints(&[1, 0, 1, 0])), ints(&[0, 0, 1, 1]));
        let lexmin = weyl_orbit(&gsp, &ints(&[1, 0, 1, 0]), WeylKind::Absolute).unwrap()[0].clone();
        assert_eq!(lexmin, ints(&[0, 0, 1, 1]));
    }

    #[test]
    fn projections() {
        let rd = gl(4);
        let p = ParabolicType::from_composition(&rd, &[2, 2]).unwrap();
        let (pi, pr) = project(&rd, &p, &ints(&[0, 1, 1, 2])).unwrap();
        assert_eq!(pi, vec![rat(1, 2), rat(1, 2), rat(3, 2), rat(3, 2)]);
        assert_eq!(pr, vec![rat(-1, 2), rat(1, 2), rat(-1, 2), rat(1, 2)]);
        let (pi, _) = project(&rd, &ParabolicType::whole(&rd), &ints(&[0, 1, 1, 2])).unwrap();
        assert_eq!(pi, vec![int(1); 4]);
        let (pi, pr) = project(&rd, &ParabolicType::borel(), &ints(&[0, 1, 1, 2])).unwrap();
        assert_eq!(pi, ints(&[0, 1, 1, 2]));
        assert!(pr.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn compositions_round_trip() {
        let gsp = build_root_datum(&GroupDescriptor::gsp(2)).unwrap();
        let comps: BTreeSet<Vec<usize>> =
            gsp.standard_parabolics().iter().map(|p| p.composition(&gsp)).collect();
        let expected: BTreeSet<Vec<usize>> =
            [vec![1, 1, 1, 1], vec![2, 2], vec![1, 2, 1], vec![4]].into_iter().collect();
        assert_eq!(comps, expected);
        assert!(ParabolicType::from_composition(&gsp, &[1, 3]).is_err());
        let u5 = build_root_datum(&GroupDescriptor::unitary(5)).unwrap();
        let comps: BTreeSet<Vec<usize>> =
            u5.standard_parabolics().iter().map(|p| p.composition(&u5)).collect();
        assert!(comps.contains(&vec![1, 3, 1]));
        assert!(comps.contains(&vec![2, 1, 2]));
        assert_eq!(comps.len(), 4);
    }

    #[test]
    fn norm_examples() {
        let rd = gl(2);
        assert_eq!(norm_map(&rd, &ints(&[1, 0]), 3).unwrap(), ints(&[3, 0]));
        let u2 = build_root_datum(&GroupDescriptor::unitary(2)).unwrap();
        assert_eq!(norm_map(&u2, &ints(&[1, 0]), 2).unwrap(), ints(&[1, -1]));
    }

    #[test]
    fn epsilon_of_borel_times_whole() {
        for desc in [GroupDescriptor::gl(4), GroupDescriptor::gsp(2), GroupDescriptor::unitary(5)] {
            let rd = build_root_datum(&desc).unwrap();
            let prod = rd.epsilon(&ParabolicType::borel()) * rd.epsilon(&ParabolicType::whole(&rd));
            assert_eq!(prod, if rd.rank().is_multiple_of(2) { 1 } else { -1 });
        }
    }

    #[test]
    fn gsp_roots_and_rho() {
        let gsp = build_root_datum(&GroupDescriptor::gsp(2)).unwrap();
        assert_eq!(gsp.positive_roots.len(), 4);
        // ⟨ρ, μ⟩ for μ = (0,0,1,1) is half the number of roots pairing to 1.
        assert_eq!(dot(&gsp.rho, &ints(&[0, 0, 1, 1])), rat(3, 2));
        let b3 = build_root_datum(&GroupDescriptor::split(ClassicalType::B, 3)).unwrap();
        assert_eq!(b3.positive_roots.len(), 9);
        let c3 = build_root_datum(&GroupDescriptor::split(ClassicalType::C, 3)).unwrap();
        assert_eq!(c3.positive_roots.len(), 9);
    }

    #[test]
    fn descriptor_json_round_trip() {
        for desc in [
            GroupDescriptor::gl_over(3, 2),
            GroupDescriptor::unitary(4),
            GroupDescriptor::gsp(2),
            GroupDescriptor::split(ClassicalType::B, 2),
        ] {
            let s = serde_json::to_string(&desc).unwrap();
            assert_eq!(GroupDescriptor::from_json_str(&s).unwrap(), desc);
        }
        assert!(GroupDescriptor::from_json_str(r#"{"family":"GSp","g":0}"#).is_err());
        assert!(GroupDescriptor::from_json_str(r#"{"family":"GL"}"#).is_err());
    }
}
