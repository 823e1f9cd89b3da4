//! Laurent polynomials with coefficients in a finite group.
//!
//! A [`GroupLaurent`] is a finitely supported map from exponents to group
//! elements, multiplied componentwise. These are the elements of
//! `G[t, t^-1]` and serve as finite representatives of `G((t))`.
//!
//! The ultrametric is handled through the [`Valuation`]: the norm of a
//! series is `e^-N` where `N` is its least non-identity exponent, so norms
//! are compared by comparing valuations in reverse order. The real number
//! is only produced for display.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup};

/// Least exponent with a non-identity coefficient; `Infinite` for the
/// identity series. Larger valuation means smaller norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    /// `e^-N`, or `0` for the identity series. Display only.
    pub fn norm(self) -> f64 {
        match self {
            Valuation::Finite(n) => (-(n as f64)).exp(),
            Valuation::Infinite => 0.0,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(n) => Some(n),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(n) => write!(f, "{n}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone)]
pub struct GroupLaurent {
    group: Arc<FiniteGroup>,
    // sorted by exponent, no identity coefficients
    coeffs: Vec<(i64, Elem)>,
}

pub(crate) fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupLaurent {
    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        GroupLaurent { group, coeffs: Vec::new() }
    }

    /// Builds a series from `(exponent, element)` pairs. Identity entries are
    /// dropped; a repeated exponent or an element outside the group is an
    /// error.
    pub fn from_pairs(group: Arc<FiniteGroup>, pairs: impl IntoIterator<Item = (i64, Elem)>) -> Result<Self> {
        let mut coeffs: Vec<(i64, Elem)> = pairs.into_iter().collect();
        coeffs.sort_unstable_by_key(|&(i, _)| i);
        for w in coeffs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("exponent {} given twice", w[0].0)));
            }
        }
        if let Some(&(i, g)) = coeffs.iter().find(|&&(_, g)| !group.contains(g)) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {g} at exponent {i} is not an element of a group of order {}",
                group.order()
            )));
        }
        coeffs.retain(|&(_, g)| g != 0);
        Ok(GroupLaurent { group, coeffs })
    }

    /// Internal constructor for already canonical, sorted data.
    pub(crate) fn from_sorted(group: Arc<FiniteGroup>, coeffs: Vec<(i64, Elem)>) -> Self {
        debug_assert!(coeffs.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(coeffs.iter().all(|&(_, g)| g != 0 && group.contains(g)));
        GroupLaurent { group, coeffs }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Non-identity coefficients in ascending exponent order.
    pub fn terms(&self) -> &[(i64, Elem)] {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> Elem {
        match self.coeffs.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(pos) => self.coeffs[pos].1,
            Err(_) => 0,
        }
    }

    pub fn min_index(&self) -> Option<i64> {
        self.coeffs.first().map(|&(i, _)| i)
    }

    pub fn max_index(&self) -> Option<i64> {
        self.coeffs.last().map(|&(i, _)| i)
    }

    pub fn valuation(&self) -> Valuation {
        match self.min_index() {
            Some(n) => Valuation::Finite(n),
            None => Valuation::Infinite,
        }
    }

    fn check_same_group(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::IncompatibleOperands("series over different coefficient groups"))
        }
    }

    /// Componentwise product `sum a_i b_i t^i`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_group(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let g = &self.group;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(ia, ga)), Some(&(ib, gb))) => match ia.cmp(&ib) {
                    Ordering::Less => {
                        i += 1;
                        (ia, ga)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (ib, gb)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (ia, g.mul(ga, gb))
                    }
                },
                (Some(&t), None) => {
                    i += 1;
                    t
                }
                (None, Some(&t)) => {
                    j += 1;
                    t
                }
                (None, None) => unreachable!(),
            };
            if next.1 != 0 {
                out.push(next);
            }
        }
        GroupLaurent { group: self.group.clone(), coeffs: out }
    }

    pub fn inv(&self) -> Self {
        let g = &self.group;
        let coeffs = self.coeffs.iter().map(|&(i, x)| (i, g.inv(x))).collect();
        GroupLaurent { group: self.group.clone(), coeffs }
    }

    /// Valuation of `a^-1 b`; the distance is `e^-N` of this value.
    pub fn dist(&self, other: &Self) -> Result<Valuation> {
        self.check_same_group(other)?;
        // The first exponent where the two differ is the valuation of a^-1 b.
        let (a, b) = (&self.coeffs, &other.coeffs);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ok(Valuation::Infinite),
                (Some(&(ia, _)), None) => return Ok(Valuation::Finite(ia)),
                (None, Some(&(ib, _))) => return Ok(Valuation::Finite(ib)),
                (Some(&(ia, ga)), Some(&(ib, gb))) => match ia.cmp(&ib) {
                    Ordering::Less => return Ok(Valuation::Finite(ia)),
                    Ordering::Greater => return Ok(Valuation::Finite(ib)),
                    Ordering::Equal if ga != gb => return Ok(Valuation::Finite(ia)),
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// `n . sum g_i t^i = sum g_i t^(i-n)`.
    pub fn shift(&self, n: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|&(i, g)| (i - n, g)).collect();
        GroupLaurent { group: self.group.clone(), coeffs }
    }

    /// `sum g_i t^i -> sum g_i t^-i`.
    pub fn reverse(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|&(i, g)| (-i, g)).collect();
        GroupLaurent { group: self.group.clone(), coeffs }
    }

    /// Parses the text form `{i:g, j:h}`.
    pub fn parse(group: Arc<FiniteGroup>, s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected {{..}} around series, got {s:?}")))?;
        let pairs = parse_terms(body)?;
        Self::from_pairs(group, pairs)
    }
}

pub(crate) fn parse_terms(body: &str) -> Result<Vec<(i64, Elem)>> {
    body.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (i, g) = t.split_once(':').ok_or_else(|| Error::Parse(format!("term {t:?} is not of the form i:g")))?;
            let i = i.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            let g = g.trim().parse::<Elem>().map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            Ok((i, g))
        })
        .collect()
}

pub(crate) fn write_terms(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (i64, Elem)>) -> fmt::Result {
    for (n, (i, g)) in terms.enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{i}:{g}")?;
    }
    Ok(())
}

impl fmt::Display for GroupLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        write_terms(f, self.coeffs.iter().copied())?;
        f.write_str("}")
    }
}

impl fmt::Debug for GroupLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for GroupLaurent {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_group(&self.group, &other.group)
    }
}

impl Eq for GroupLaurent {}

impl Hash for GroupLaurent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for GroupLaurent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Fixed total order: by support size, then lexicographically on the
/// ascending `(exponent, element)` list.
impl Ord for GroupLaurent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}
