//! Exact rational scalars and the small amount of vector algebra the crate needs.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, StrataError};

/// Exact rational number. Every quantity in the crate is built from these.
pub type Rat = Ratio<i64>;

/// A rational vector, used for cocharacters, slope vectors and functionals.
pub type Vector = Vec<Rat>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// Parses `"a"`, `"-a"` or `"a/b"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || StrataError::InvalidInput(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => s.parse::<i64>().map(Rat::from_integer).map_err(|_| bad()),
    }
}

/// Canonical text form: integers print bare, everything else as `a/b`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| int(x)).collect()
}

pub fn zeros(n: usize) -> Vector {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: Rat, a: &[Rat]) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Converts an integral rational vector to machine integers.
pub fn to_ints(a: &[Rat]) -> Option<Vec<i64>> {
    a.iter()
        .map(|x| if x.is_integer() { Some(*x.numer()) } else { None })
        .collect()
}

/// The positive scalar `λ` with `a = λ·b`, if one exists.
///
/// When `b` is zero the relation only holds for `a = 0`, and then every
/// `λ` works; this is reported as `Some(None)`.
pub fn positive_ratio(a: &[Rat], b: &[Rat]) -> Option<Option<Rat>> {
    let Some(k) = b.iter().position(|x| !x.is_zero()) else {
        return if is_zero_vec(a) { Some(None) } else { None };
    };
    let lambda = a[k] / b[k];
    if !lambda.is_positive() {
        return None;
    }
    if a.iter().zip(b).all(|(x, y)| *x == lambda * y) {
        Some(Some(lambda))
    } else {
        None
    }
}

/// Inverts a square rational matrix by Gauss-Jordan elimination.
pub fn invert(m: &[Vector]) -> Option<Vec<Vector>> {
    let n = m.len();
    let mut a: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Parses a slope list such as `"1/5*5,1/2*4,2/3*3"` (value times
/// multiplicity, comma separated) and returns it sorted ascending.
pub fn parse_slope_list(s: &str) -> Result<Vector> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (value, mult) = match item.split_once('*') {
            Some((v, k)) => {
                let k: usize = k.trim().parse().map_err(|_| {
                    StrataError::InvalidInput(format!("bad multiplicity in {item:?}"))
                })?;
                (parse_rat(v)?, k)
            }
            None => (parse_rat(item)?, 1),
        };
        out.extend(std::iter::repeat_n(value, mult));
    }
    if out.is_empty() {
        return Err(StrataError::InvalidInput("empty slope list".into()));
    }
    out.sort();
    Ok(out)
}

/// Compact slope-list text, the inverse of [`parse_slope_list`].
pub fn fmt_slope_list(v: &[Rat]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if j - i == 1 {
            parts.push(fmt_rat(&v[i]));
        } else {
            parts.push(format!("{}*{}", fmt_rat(&v[i]), j - i));
        }
        i = j;
    }
    parts.join(",")
}

pub fn fmt_vector(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(","))
}

/// Absolute value helper kept here so callers need not import `Signed`.
pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// Serde adapter writing rational vectors as lists of `"a/b"` strings.
pub mod serde_vector {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vector, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
