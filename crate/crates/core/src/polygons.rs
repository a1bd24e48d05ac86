//! Newton points, Newton and Hodge polygons, the admissible set `B(G, μ)`
//! and the parabolics attached to an isocrystal.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, StrataError};
use crate::rational::{add, dot, int, rat, scale, serde_vector, sub, to_ints, Rat, Vector};
use crate::root_data::{
    dominant_rep, norm_map, weyl_orbit, ClassicalType, Family, GroupDescriptor, ParabolicType,
    RootDatum, WeylKind,
};

/// The slope vector of an isocrystal, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NewtonPoint {
    #[serde(with = "serde_vector")]
    pub slopes: Vector,
    pub group: GroupDescriptor,
}

impl NewtonPoint {
    /// Validates dominance and the family's symmetry constraint.
    pub fn new(rd: &RootDatum, slopes: Vector) -> Result<Self> {
        rd.check_dim(slopes.len())?;
        if !rd.is_dominant(&slopes) {
            return Err(StrataError::InvalidInput(format!(
                "slope vector {} is not dominant",
                crate::rational::fmt_vector(&slopes)
            )));
        }
        if !rd.in_subspace(&slopes) {
            return Err(StrataError::InvalidInput(format!(
                "slope vector {} violates the symmetry of {}",
                crate::rational::fmt_vector(&slopes),
                rd.desc
            )));
        }
        Ok(Self { slopes, group: rd.desc })
    }

    /// Parses `a/b*k` slope-list syntax.
    pub fn parse(rd: &RootDatum, text: &str) -> Result<Self> {
        Self::new(rd, crate::rational::parse_slope_list(text)?)
    }

    pub fn is_basic(&self, rd: &RootDatum) -> bool {
        rd.simple_roots.iter().all(|a| dot(a, &self.slopes).is_zero())
    }

    pub fn label(&self) -> String {
        crate::rational::fmt_slope_list(&self.slopes)
    }
}

/// A piecewise-linear graph sampled at the integers `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    pub vertices: Vec<(Rat, Rat)>,
}

impl Polygon {
    pub fn from_steps(steps: &[Rat]) -> Self {
        let mut y = Rat::zero();
        let mut vertices = vec![(Rat::zero(), Rat::zero())];
        for (i, s) in steps.iter().enumerate() {
            y += s;
            vertices.push((int(i as i64 + 1), y));
        }
        Self { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn y(&self, x: usize) -> Rat {
        self.vertices[x].1
    }

    pub fn endpoint(&self) -> (Rat, Rat) {
        *self.vertices.last().expect("polygons have a start vertex")
    }

    /// Interior abscissae where the slope changes.
    pub fn breakpoints(&self) -> Vec<usize> {
        (1..self.len())
            .filter(|&x| {
                let left = self.y(x) - self.y(x - 1);
                let right = self.y(x + 1) - self.y(x);
                left != right
            })
            .collect()
    }

    /// Pointwise comparison `self ≥ other`.
    pub fn lies_on_or_above(&self, other: &Polygon) -> bool {
        self.len() == other.len() && (0..=self.len()).all(|x| self.y(x) >= other.y(x))
    }
}

pub fn newton_polygon(b: &NewtonPoint) -> Polygon {
    Polygon::from_steps(&b.slopes)
}

/// The dominant representative of the Galois average of `μ`: for unitary
/// groups `½(μ + θμ)`, otherwise `μ` itself.
pub fn mu_bar(rd: &RootDatum, mu: &[Rat]) -> Vector {
    let averaged = if rd.desc.is_unitary() {
        scale(rat(1, 2), &add(mu, &rd.theta_apply(mu)))
    } else {
        mu.to_vec()
    };
    dominant_rep(rd, &averaged)
}

pub fn hodge_polygon(rd: &RootDatum, mu: &[Rat]) -> Result<Polygon> {
    rd.check_dim(mu.len())?;
    Ok(Polygon::from_steps(&mu_bar(rd, mu)))
}

/// Breakpoints of a Newton polygon must land in `(1/scale)·Z`.
fn breakpoint_scale(rd: &RootDatum) -> i64 {
    if rd.desc.is_unitary() {
        2
    } else {
        1
    }
}

fn is_scaled_integral(y: Rat, k: i64) -> bool {
    (y * int(k)).is_integer()
}

/// Newton on or above Hodge, equal endpoints, integral breakpoints.
pub fn is_admissible(rd: &RootDatum, b: &NewtonPoint, mu: &[Rat]) -> Result<bool> {
    rd.check_dim(b.slopes.len())?;
    rd.check_dim(mu.len())?;
    if !rd.is_dominant(&b.slopes) || !rd.in_subspace(&b.slopes) {
        return Ok(false);
    }
    let hodge = mu_bar(rd, mu);
    let diff = sub(&hodge, &b.slopes);
    if rd.center_basis.iter().any(|z| !dot(z, &diff).is_zero()) {
        return Ok(false);
    }
    if diff.iter().sum::<Rat>() != Rat::zero() {
        return Ok(false);
    }
    if rd.fundamental_weights.iter().any(|w| dot(w, &diff).is_negative()) {
        return Ok(false);
    }
    if !matches!(
        rd.desc.family,
        Family::SplitClassical { kind: ClassicalType::B | ClassicalType::C, .. }
    ) {
        let poly = newton_polygon(b);
        let k = breakpoint_scale(rd);
        if poly.breakpoints().iter().any(|&x| !is_scaled_integral(poly.y(x), k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `μ` is a dominant minuscule cocharacter of the group.
pub fn check_mu(rd: &RootDatum, mu: &[Rat]) -> Result<()> {
    rd.check_dim(mu.len())?;
    // Unitary cocharacters are defined over the splitting field, so they are
    // arbitrary integer vectors and dominance is the absolute one.
    let unitary = rd.desc.is_unitary();
    if to_ints(mu).is_none() || (!unitary && !rd.in_subspace(mu)) {
        return Err(StrataError::InvalidInput(format!(
            "{} is not a cocharacter of {}",
            crate::rational::fmt_vector(mu),
            rd.desc
        )));
    }
    let dominant = if unitary { dominant_rep(rd, mu) == mu } else { rd.is_dominant(mu) };
    if !dominant {
        return Err(StrataError::InvalidInput(format!(
            "{} is not dominant (coordinates must be non-decreasing)",
            crate::rational::fmt_vector(mu)
        )));
    }
    if !rd.is_minuscule(mu) {
        return Err(StrataError::NonMinuscule(crate::rational::fmt_vector(mu)));
    }
    Ok(())
}

/// All `μ`-admissible Newton points in lexicographic order.
///
/// The search walks compositions of the coordinates left to right, giving
/// each block a slope whose scaled block sum is an integer and which
/// exceeds the slope of the previous block.
pub fn enumerate_b(rd: &RootDatum, mu: &[Rat]) -> Result<Vec<NewtonPoint>> {
    rd.require_prime_base()?;
    if matches!(
        rd.desc.family,
        Family::SplitClassical { kind: ClassicalType::B | ClassicalType::C, .. }
    ) {
        return Err(StrataError::Unsupported(
            "B(G, μ) enumeration for split types B and C".into(),
        ));
    }
    check_mu(rd, mu)?;
    let hodge = mu_bar(rd, mu);
    let lo = hodge[0];
    let hi = hodge[hodge.len() - 1];
    let k = breakpoint_scale(rd);
    let mut found = BTreeSet::new();
    let mut slopes = Vec::with_capacity(rd.dim);
    search_blocks(rd, mu, lo, hi, k, None, &mut slopes, &mut found)?;
    Ok(found.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn search_blocks(
    rd: &RootDatum,
    mu: &[Rat],
    lo: Rat,
    hi: Rat,
    k: i64,
    prev: Option<Rat>,
    slopes: &mut Vector,
    found: &mut BTreeSet<NewtonPoint>,
) -> Result<()> {
    let x = slopes.len();
    if x == rd.dim {
        if rd.in_subspace(slopes) {
            let b = NewtonPoint { slopes: slopes.clone(), group: rd.desc };
            if is_admissible(rd, &b, mu)? {
                found.insert(b);
            }
        }
        return Ok(());
    }
    for m in 1..=rd.dim - x {
        let scale_m = int(k * m as i64);
        let y_lo = (lo * scale_m).ceil().to_integer();
        let y_hi = (hi * scale_m).floor().to_integer();
        for y in y_lo..=y_hi {
            let slope = Rat::new(y, k * m as i64);
            if prev.is_some_and(|p| slope <= p) {
                continue;
            }
            slopes.extend(std::iter::repeat_n(slope, m));
            search_blocks(rd, mu, lo, hi, k, Some(slope), slopes, found)?;
            slopes.truncate(x);
        }
    }
    Ok(())
}

/// The μ-ordinary point: the dominant Galois average of `μ`.
pub fn ordinary_point(rd: &RootDatum, mu: &[Rat]) -> NewtonPoint {
    NewtonPoint { slopes: mu_bar(rd, mu), group: rd.desc }
}

/// The basic point: the central projection of `μ̄`.
pub fn basic_point(rd: &RootDatum, mu: &[Rat]) -> NewtonPoint {
    let whole = ParabolicType::whole(rd);
    let (pi, _) = crate::root_data::project(rd, &whole, &mu_bar(rd, mu)).expect("dimension checked");
    NewtonPoint { slopes: pi, group: rd.desc }
}

/// `P_b`: the standard parabolic whose Levi is the centraliser of the slope vector.
pub fn contracted_parabolic(rd: &RootDatum, b: &NewtonPoint) -> ParabolicType {
    rd.centralizer_parabolic(&b.slopes)
}

/// Galois-normalised directions `𝒩(wμ)/M` for `w` in the Weyl group, at the
/// splitting degree `M` of the group. These are the vectors the general
/// criterion for `Q` and the witness searches compare against `ν̄_b`.
pub fn normalized_norm_directions(rd: &RootDatum, mu: &[Rat]) -> Result<Vec<Vector>> {
    let m = rd.theta_order;
    let mut out = BTreeSet::new();
    for x in weyl_orbit(rd, mu, WeylKind::Relative { alpha: m })? {
        out.insert(scale(Rat::new(1, m as i64), &norm_map(rd, &x, m)?));
    }
    Ok(out.into_iter().collect())
}

/// `Q` by marking the points of `𝒢_b` in the breakpoint lattice.
pub fn refined_parabolic_q_by_marking(rd: &RootDatum, b: &NewtonPoint) -> Result<ParabolicType> {
    let poly = newton_polygon(b);
    let k = breakpoint_scale(rd);
    let mut comp = Vec::new();
    let mut last = 0;
    for x in 1..=rd.dim {
        if is_scaled_integral(poly.y(x), k) {
            comp.push(x - last);
            last = x;
        }
    }
    if last != rd.dim {
        return Err(StrataError::InvalidInput("Newton polygon endpoint is not integral".into()));
    }
    ParabolicType::from_composition(rd, &comp)
}

/// `Q` by the root-theoretic criterion: a simple root of `P_b` is removed
/// when its fundamental weight takes the same value on `ν̄_b` and on some
/// normalised norm `𝒩(wμ)`.
pub fn refined_parabolic_q_by_criterion(
    rd: &RootDatum,
    b: &NewtonPoint,
    mu: &[Rat],
) -> Result<ParabolicType> {
    let pb = contracted_parabolic(rd, b);
    let dirs = normalized_norm_directions(rd, mu)?;
    let kept = pb
        .levi_roots
        .iter()
        .copied()
        .filter(|&a| {
            let w = &rd.fundamental_weights[a];
            !dirs.iter().any(|d| dot(w, &sub(d, &b.slopes)).is_zero())
        })
        .collect();
    Ok(ParabolicType::from_roots(kept))
}

/// The parabolic `Q ⊆ P_b` of an admissible isocrystal.
///
/// For linear and symplectic groups both constructions are computed and must
/// coincide. For unitary groups the half-integral marking is coarser than the
/// root criterion (a parity constraint on `𝒩(wμ)` can forbid contact at a
/// half-integral point), so the criterion alone defines `Q`.
pub fn refined_parabolic_q(rd: &RootDatum, b: &NewtonPoint, mu: &[Rat]) -> Result<ParabolicType> {
    rd.require_prime_base()?;
    if !is_admissible(rd, b, mu)? {
        return Err(StrataError::NotAdmissible(b.label()));
    }
    let criterion = refined_parabolic_q_by_criterion(rd, b, mu)?;
    if rd.desc.is_unitary() {
        return Ok(criterion);
    }
    let marked = refined_parabolic_q_by_marking(rd, b)?;
    if marked != criterion {
        return Err(StrataError::Infeasible(format!(
            "integral marking {:?} and root criterion {:?} disagree for {}",
            marked.composition(rd),
            criterion.composition(rd),
            b.label()
        )));
    }
    Ok(marked)
}

/// Slopes of the isocrystal of a diagonal Frobenius twist with exponent
/// vector `e` over the degree-`α` extension: `dominant(𝒩(e))/α`.
pub fn slopes_from_twisted_diagonal(rd: &RootDatum, e: &[i64], alpha: usize) -> Result<NewtonPoint> {
    rd.check_dim(e.len())?;
    let x: Vector = e.iter().map(|&v| int(v)).collect();
    let n = norm_map(rd, &x, alpha)?;
    let slopes = scale(Rat::new(1, alpha as i64), &dominant_rep(rd, &n));
    Ok(NewtonPoint { slopes, group: rd.desc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ints, parse_slope_list};
    use crate::root_data::build_root_datum;

    fn rd(desc: GroupDescriptor) -> RootDatum {
        build_root_datum(&desc).unwrap()
    }

    fn point(r: &RootDatum, s: &str) -> NewtonPoint {
        NewtonPoint::parse(r, s).unwrap()
    }

    /// Independent enumeration: every ascending vector whose entries have
    /// denominators at most the dimension, kept when each run of equal
    /// slopes has a length divisible by the slope's denominator (scaled for
    /// unitary groups) and the dominance inequalities hold.
    fn oracle_enumerate(r: &RootDatum, mu: &[Rat]) -> BTreeSet<Vector> {
        let n = r.dim;
        let hodge = mu_bar(r, mu);
        let (lo, hi) = (hodge[0], hodge[n - 1]);
        let k = breakpoint_scale(r);
        let mut values = BTreeSet::new();
        for den in 1..=(n as i64 * k) {
            for num in (lo * int(den)).ceil().to_integer()..=(hi * int(den)).floor().to_integer() {
                values.insert(Rat::new(num, den));
            }
        }
        let values: Vec<Rat> = values.into_iter().collect();
        let mut out = BTreeSet::new();
        let mut cur = Vec::new();
        fn rec(
            r: &RootDatum,
            values: &[Rat],
            start: usize,
            cur: &mut Vec<Rat>,
            hodge: &[Rat],
            k: i64,
            out: &mut BTreeSet<Vector>,
        ) {
            if cur.len() == r.dim {
                let total: Rat = cur.iter().sum();
                if total != hodge.iter().sum::<Rat>() || !r.in_subspace(cur) {
                    return;
                }
                let mut i = 0;
                while i < cur.len() {
                    let mut j = i;
                    while j < cur.len() && cur[j] == cur[i] {
                        j += 1;
                    }
                    if !(cur[i] * int(k * (j - i) as i64)).is_integer() {
                        return;
                    }
                    i = j;
                }
                let mut s = Rat::zero();
                let mut h = Rat::zero();
                for (a, b) in cur.iter().zip(hodge) {
                    s += a;
                    h += b;
                    if s < h {
                        return;
                    }
                }
                out.insert(cur.clone());
                return;
            }
            for (idx, v) in values.iter().enumerate().skip(start) {
                cur.push(*v);
                rec(r, values, idx, cur, hodge, k, out);
                cur.pop();
            }
        }
        rec(r, &values, 0, &mut cur, &hodge, k, &mut out);
        out
    }

    #[test]
    fn polygon_examples() {
        let gl2 = rd(GroupDescriptor::gl(2));
        let p = newton_polygon(&point(&gl2, "1/2*2"));
        assert_eq!(p.vertices, vec![(int(0), int(0)), (int(1), rat(1, 2)), (int(2), int(1))]);
        let u10 = rd(GroupDescriptor::unitary(10));
        let p = newton_polygon(&point(&u10, "0*10"));
        assert!(p.vertices.iter().all(|(_, y)| y.is_zero()));
        for s in 0..=10 {
            let mu = u10.mu_standard(s).unwrap();
            let sp = s.min(10 - s);
            let mut expected = vec![rat(-1, 2); sp];
            expected.extend(vec![Rat::zero(); 10 - 2 * sp]);
            expected.extend(vec![rat(1, 2); sp]);
            assert_eq!(mu_bar(&u10, &mu), expected);
        }
    }

    #[test]
    fn admissibility_examples() {
        let gl2 = rd(GroupDescriptor::gl(2));
        let mu = ints(&[0, 1]);
        assert!(is_admissible(&gl2, &point(&gl2, "0,1"), &mu).unwrap());
        assert!(is_admissible(&gl2, &point(&gl2, "1/2*2"), &mu).unwrap());
        assert!(!is_admissible(&gl2, &point(&gl2, "1/3,2/3"), &mu).unwrap());
        let gsp = rd(GroupDescriptor::gsp(2));
        let mu = ints(&[0, 0, 1, 1]);
        assert!(!is_admissible(&gsp, &point(&gsp, "1/3*2,2/3*2"), &mu).unwrap());
    }

    #[test]
    fn enumeration_matches_oracle() {
        let cases = [
            (GroupDescriptor::gl(2), 1),
            (GroupDescriptor::gl(4), 2),
            (GroupDescriptor::gl(5), 2),
            (GroupDescriptor::gsp(2), 2),
            (GroupDescriptor::gsp(3), 3),
            (GroupDescriptor::unitary(2), 1),
            (GroupDescriptor::unitary(3), 1),
            (GroupDescriptor::unitary(4), 1),
            (GroupDescriptor::unitary(5), 2),
        ];
        for (desc, s) in cases {
            let r = rd(desc);
            let mu = r.mu_standard(s).unwrap();
            let got: BTreeSet<Vector> =
                enumerate_b(&r, &mu).unwrap().into_iter().map(|b| b.slopes).collect();
            assert_eq!(got, oracle_enumerate(&r, &mu), "{desc} s={s}");
            assert!(got.contains(&ordinary_point(&r, &mu).slopes));
            assert!(got.contains(&basic_point(&r, &mu).slopes));
        }
    }

    #[test]
    fn enumeration_sizes() {
        let gl2 = rd(GroupDescriptor::gl(2));
        assert_eq!(enumerate_b(&gl2, &ints(&[0, 1])).unwrap().len(), 2);
        let gsp = rd(GroupDescriptor::gsp(2));
        let b = enumerate_b(&gsp, &ints(&[0, 0, 1, 1])).unwrap();
        let slopes: Vec<String> = b.iter().map(|p| p.label()).collect();
        assert_eq!(slopes, vec!["0*2,1*2", "0,1/2*2,1", "1/2*4"]);
        let u4 = rd(GroupDescriptor::unitary(4));
        assert_eq!(enumerate_b(&u4, &u4.mu_standard(1).unwrap()).unwrap().len(), 3);
        assert!(matches!(
            enumerate_b(&gl2, &ints(&[0, 2])),
            Err(StrataError::NonMinuscule(_))
        ));
    }

    #[test]
    fn contracted_parabolics() {
        let gl4 = rd(GroupDescriptor::gl(4));
        assert_eq!(contracted_parabolic(&gl4, &point(&gl4, "0,1/2*2,1")).composition(&gl4), vec![1, 2, 1]);
        assert_eq!(contracted_parabolic(&gl4, &point(&gl4, "1/2*4")).composition(&gl4), vec![4]);
        let gl12 = rd(GroupDescriptor::gl(12));
        let fig = point(&gl12, "1/5*5,1/2*4,2/3*3");
        assert_eq!(contracted_parabolic(&gl12, &fig).composition(&gl12), vec![5, 4, 3]);
    }

    #[test]
    fn refined_parabolics() {
        let gsp = rd(GroupDescriptor::gsp(2));
        let mu = ints(&[0, 0, 1, 1]);
        let q = refined_parabolic_q(&gsp, &point(&gsp, "1/2*4"), &mu).unwrap();
        assert_eq!(q.composition(&gsp), vec![2, 2]);
        let gl12 = rd(GroupDescriptor::gl(12));
        let mu = gl12.mu_standard(5).unwrap();
        let q = refined_parabolic_q(&gl12, &point(&gl12, "1/5*5,1/2*4,2/3*3"), &mu).unwrap();
        assert_eq!(q.composition(&gl12), vec![5, 2, 2, 3]);
        let gl4 = rd(GroupDescriptor::gl(4));
        let q = refined_parabolic_q(&gl4, &point(&gl4, "0*2,1*2"), &ints(&[0, 0, 1, 1])).unwrap();
        assert_eq!(q, ParabolicType::borel());
    }

    #[test]
    fn marking_and_criterion_agree_on_all_strata() {
        let mut cases = Vec::new();
        for n in 1..=8 {
            for s in 0..=n {
                cases.push((GroupDescriptor::gl(n), s));
            }
        }
        for g in 1..=3 {
            cases.push((GroupDescriptor::gsp(g), g));
        }
        for n in 2..=6 {
            for s in 0..=n {
                cases.push((GroupDescriptor::unitary(n), s));
            }
        }
        for (desc, s) in cases {
            let r = rd(desc);
            let mu = if desc.is_gsp() { r.mu_standard(r.dim / 2).unwrap() } else { r.mu_standard(s).unwrap() };
            for b in enumerate_b(&r, &mu).unwrap() {
                let q = refined_parabolic_q(&r, &b, &mu).unwrap_or_else(|e| panic!("{desc} s={s}: {e}"));
                assert!(q.is_subset_of(&contracted_parabolic(&r, &b)));
                if desc.is_unitary() {
                    let marked = refined_parabolic_q_by_marking(&r, &b).unwrap();
                    assert!(marked.is_subset_of(&q), "marking must cut at least where the criterion does");
                }
            }
        }
    }

    #[test]
    fn twisted_diagonal_slopes() {
        let gl2 = rd(GroupDescriptor::gl(2));
        assert_eq!(slopes_from_twisted_diagonal(&gl2, &[0, 1], 1).unwrap().slopes, ints(&[0, 1]));
        assert_eq!(slopes_from_twisted_diagonal(&gl2, &[0, 1], 2).unwrap().slopes, ints(&[0, 1]));
        let gl1 = rd(GroupDescriptor::gl(1));
        assert_eq!(slopes_from_twisted_diagonal(&gl1, &[3], 2).unwrap().slopes, ints(&[3]));
        assert_eq!(parse_slope_list("3").unwrap(), ints(&[3]));
    }
}
