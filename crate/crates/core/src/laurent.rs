//! Coefficient rings: Laurent polynomials in a formal `q` with rational
//! exponents, and the scalars `Q(q^{1/2})[z^{±1}]` produced by character
//! evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{fmt_rat, Rat};

/// Finite sum `Σ c_p q^p`, keyed by the exponent `p`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QPoly {
    terms: BTreeMap<Rat, Rat>,
}

impl QPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::zero(), Rat::one())
    }

    /// `c · q^p`.
    pub fn monomial(p: Rat, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(p, c);
        }
        Self { terms }
    }

    pub fn q_power(p: Rat) -> Self {
        Self::monomial(p, Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Rat) -> Self {
        let mut out = Self::zero();
        for (p, v) in &self.terms {
            out.add_term(*p, v * c);
        }
        out
    }

    /// Multiplies by `q^p`.
    pub fn shift(&self, p: Rat) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k + p, *v)).collect() }
    }

    pub fn add_term(&mut self, p: Rat, c: Rat) {
        let e = self.terms.entry(p).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    /// Whether every coefficient has the same strict sign.
    pub fn single_sign(&self) -> Option<i32> {
        let mut sign = None;
        for c in self.terms.values() {
            let s = if c.is_positive() { 1 } else { -1 };
            match sign {
                None => sign = Some(s),
                Some(t) if t != s => return None,
                _ => {}
            }
        }
        sign
    }

    /// Numeric value at a positive real `q`, for display only.
    pub fn approx(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| c.to_f64().unwrap_or(f64::NAN) * q.powf(p.to_f64().unwrap_or(f64::NAN)))
            .sum()
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        out += other;
        out
    }
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, other: &QPoly) {
        for (p, c) in &other.terms {
            self.add_term(*p, *c);
        }
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, other: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (p, c) in &self.terms {
            for (r, d) in &other.terms {
                out.add_term(p + r, c * d);
            }
        }
        out
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.scale(-Rat::one())
    }
}

fn fmt_q_power(p: &Rat) -> String {
    if p.is_zero() {
        String::new()
    } else if p.is_one() {
        "q".to_string()
    } else {
        format!("q^({})", fmt_rat(p))
    }
}

fn join_signed(parts: Vec<(bool, String)>) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (negative, body)) in parts.into_iter().enumerate() {
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

fn term_body(c: &Rat, factors: Vec<String>) -> (bool, String) {
    let factors: Vec<String> = factors.into_iter().filter(|f| !f.is_empty()).collect();
    let a = c.abs();
    let body = match (a.is_one(), factors.is_empty()) {
        (true, true) => "1".to_string(),
        (true, false) => factors.join("*"),
        (false, true) => fmt_rat(&a),
        (false, false) => format!("{}*{}", fmt_rat(&a), factors.join("*")),
    };
    (c.is_negative(), body)
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(p, c)| term_body(c, vec![fmt_q_power(p)])).collect();
        f.write_str(&join_signed(parts))
    }
}

/// An exact value `Σ c · q^p · z^e`: the result of evaluating a spherical
/// function at an unramified character. When the character has numeric
/// Hecke parameters every `e` is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceValue {
    terms: BTreeMap<(Rat, Vec<i64>), Rat>,
}

impl TraceValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        let mut t = Self::zero();
        t.add_term(Rat::zero(), Vec::new(), Rat::one());
        t
    }

    pub fn add_term(&mut self, q_power: Rat, z: Vec<i64>, c: Rat) {
        if c.is_zero() {
            return;
        }
        // A trivial z-monomial is stored as the empty exponent so symbolic
        // and numeric evaluations of constants compare equal.
        let z = if z.iter().all(|k| *k == 0) { Vec::new() } else { z };
        let key = (q_power, z);
        let e = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Rat, Vec<i64>), &Rat)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Rat) -> Self {
        let mut out = Self::zero();
        for ((p, z), v) in &self.terms {
            out.add_term(*p, z.clone(), v * c);
        }
        out
    }

    /// Distinct `z`-exponents that occur.
    pub fn z_support(&self) -> Vec<Vec<i64>> {
        let mut s: Vec<Vec<i64>> = self.terms.keys().map(|(_, z)| z.clone()).collect();
        s.sort();
        s.dedup();
        s
    }

    /// Numeric value at a positive `q` and numeric `z`, for display only.
    pub fn approx(&self, q: f64, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|((p, e), c)| {
                let zp: f64 = e.iter().zip(z).map(|(k, v)| v.powi(*k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * q.powf(p.to_f64().unwrap_or(f64::NAN)) * zp
            })
            .sum()
    }
}

impl AddAssign<&TraceValue> for TraceValue {
    fn add_assign(&mut self, other: &TraceValue) {
        for ((p, z), c) in &other.terms {
            self.add_term(*p, z.clone(), *c);
        }
    }
}

impl Add for &TraceValue {
    type Output = TraceValue;
    fn add(self, other: &TraceValue) -> TraceValue {
        let mut out = self.clone();
        out += other;
        out
    }
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .terms
            .iter()
            .map(|((p, z), c)| {
                let mut factors = vec![fmt_q_power(p)];
                for (i, k) in z.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => factors.push(format!("z{}", i + 1)),
                        _ => factors.push(format!("z{}^({})", i + 1, k)),
                    }
                }
                term_body(c, factors)
            })
            .collect();
        f.write_str(&join_signed(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn qpoly_arithmetic() {
        let a = &QPoly::q_power(rat(1, 2)) + &QPoly::one();
        let sq = &a * &a;
        assert_eq!(sq.to_string(), "1 + 2*q^(1/2) + q");
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(QPoly::monomial(rat(-1, 2), int(-3)).to_string(), "-3*q^(-1/2)");
    }

    #[test]
    fn trace_value_display_and_cancellation() {
        let mut t = TraceValue::zero();
        t.add_term(rat(1, 2), vec![1, 0], int(1));
        t.add_term(int(0), vec![0, 2], int(-2));
        assert_eq!(t.to_string(), "-2*z2^(2) + q^(1/2)*z1");
        t.add_term(rat(1, 2), vec![1, 0], int(-1));
        assert_eq!(t.len(), 1);
        assert!(TraceValue::zero().to_string() == "0");
    }
}
