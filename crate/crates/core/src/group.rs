//! Finite groups given by multiplication tables.
//!
//! Elements are the indices `0..order` and the identity is always `0`, so
//! every enumeration built on top of a group (children of a tree vertex,
//! lamp configurations, generating sets) has a fixed order.

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, Error, Result};

/// Element index inside a [`FiniteGroup`].
pub type Elem = u32;

/// Largest supported group order. Tables are dense `order * order` arrays.
pub const MAX_ORDER: usize = 1 << 12;

/// Orders up to this bound are checked for associativity on every triple.
const FULL_ASSOC_CHECK: usize = 16;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Elem>,
    inverses: Vec<Elem>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    order: usize,
    table: Vec<Vec<Elem>>,
}

impl FiniteGroup {
    /// The cyclic group of order `q` under addition mod `q`.
    pub fn cyclic(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidOrder(q));
        }
        check_capacity(q as u128)?;
        let table = (0..q).flat_map(|a| (0..q).map(move |b| ((a + b) % q) as Elem)).collect();
        let inverses = (0..q).map(|a| ((q - a) % q) as Elem).collect();
        Ok(FiniteGroup { order: q, table, inverses })
    }

    /// Validates a square table and derives identity and inverses from it.
    ///
    /// The identity must sit at index 0. On failure the error names the
    /// violated axiom together with a witness triple `(a, b, c)`.
    pub fn from_table(rows: &[Vec<Elem>]) -> Result<Self> {
        let q = rows.len();
        if q == 0 {
            return Err(Error::InvalidOrder(0));
        }
        check_capacity(q as u128)?;
        let mut table = Vec::with_capacity(q * q);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(Error::MalformedTable(format!("row {a} has {} entries, expected {q}", row.len())));
            }
            for (b, &c) in row.iter().enumerate() {
                if c as usize >= q {
                    return Err(Error::NotAGroup { axiom: Axiom::Closure, witness: (a as Elem, b as Elem, c) });
                }
            }
            table.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| table[a * q + b];

        for x in 0..q {
            if at(0, x) as usize != x {
                return Err(Error::NotAGroup { axiom: Axiom::Identity, witness: (0, x as Elem, at(0, x)) });
            }
            if at(x, 0) as usize != x {
                return Err(Error::NotAGroup { axiom: Axiom::Identity, witness: (x as Elem, 0, at(x, 0)) });
            }
        }

        let mut inverses = Vec::with_capacity(q);
        for a in 0..q {
            let inv = (0..q).find(|&b| at(a, b) == 0 && at(b, a) == 0);
            match inv {
                Some(b) => inverses.push(b as Elem),
                None => {
                    return Err(Error::NotAGroup { axiom: Axiom::Inverse, witness: (a as Elem, a as Elem, at(a, a)) })
                }
            }
        }

        let group = FiniteGroup { order: q, table, inverses };
        if let Some((a, b, c)) = group.associativity_witness() {
            return Err(Error::NotAGroup { axiom: Axiom::Associativity, witness: (a, b, c) });
        }
        Ok(group)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(s)?;
        if file.order != file.table.len() {
            return Err(Error::MalformedTable(format!(
                "declared order {} but table has {} rows",
                file.order,
                file.table.len()
            )));
        }
        Self::from_table(&file.table)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let file = TableFile { order: self.order, table: self.rows() };
        serde_json::to_string(&file).expect("table serializes")
    }

    /// `G^k` with componentwise multiplication. The element with components
    /// `(c_0, .., c_{k-1})` has index `sum c_i * q^i`.
    pub fn direct_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("direct power exponent must be at least 1".into()));
        }
        let q = self.order;
        let n = (q as u128).checked_pow(k as u32).ok_or(Error::Capacity { projected: u128::MAX, limit: MAX_ORDER })?;
        check_capacity(n)?;
        let n = n as usize;
        let mut table = Vec::with_capacity(n * n);
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let ca = decode_tuple(q, k, a as Elem);
            inverses.push(encode_tuple(q, ca.iter().map(|&x| self.inv(x))));
            for b in 0..n {
                let cb = decode_tuple(q, k, b as Elem);
                table.push(encode_tuple(q, ca.iter().zip(&cb).map(|(&x, &y)| self.mul(x, y))));
            }
        }
        Ok(FiniteGroup { order: n, table, inverses })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> Elem {
        0
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a as usize]
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Returns a triple `(a, b, c)` with `(ab)c != a(bc)`, if any.
    fn associativity_witness(&self) -> Option<(Elem, Elem, Elem)> {
        let q = self.order;
        if q <= FULL_ASSOC_CHECK {
            for a in self.elements() {
                for b in self.elements() {
                    for c in self.elements() {
                        if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                            return Some((a, b, c));
                        }
                    }
                }
            }
            return None;
        }
        // Light's test: the elements g with (xg)y = x(gy) for all x, y are
        // closed under the operation, so testing a generating set suffices.
        for g in self.generating_set() {
            for x in self.elements() {
                let xg = self.mul(x, g);
                for y in self.elements() {
                    if self.mul(xg, y) != self.mul(x, self.mul(g, y)) {
                        return Some((x, g, y));
                    }
                }
            }
        }
        None
    }

    /// Greedy generating set: repeatedly adds the least element outside the
    /// closure of the current generators.
    fn generating_set(&self) -> Vec<Elem> {
        let q = self.order;
        let mut inside = vec![false; q];
        inside[0] = true;
        let mut members = vec![0];
        let mut gens = Vec::new();
        while let Some(g) = (0..q).find(|&x| !inside[x]) {
            gens.push(g as Elem);
            inside[g] = true;
            members.push(g as Elem);
            let mut i = 0;
            while i < members.len() {
                let m = members[i];
                for &s in &gens {
                    for p in [self.mul(m, s), self.mul(s, m)] {
                        if !inside[p as usize] {
                            inside[p as usize] = true;
                            members.push(p);
                        }
                    }
                }
                i += 1;
            }
        }
        gens
    }
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.order)
    }
}

fn check_capacity(n: u128) -> Result<()> {
    if n > MAX_ORDER as u128 {
        Err(Error::Capacity { projected: n, limit: MAX_ORDER })
    } else {
        Ok(())
    }
}

/// Packs components into a direct-power index: `sum c_i * q^i`.
pub fn encode_tuple(q: usize, comps: impl IntoIterator<Item = Elem>) -> Elem {
    let mut idx = 0u64;
    let mut base = 1u64;
    for c in comps {
        idx += c as u64 * base;
        base *= q as u64;
    }
    idx as Elem
}

/// Inverse of [`encode_tuple`] for a `k`-fold power.
pub fn decode_tuple(q: usize, k: usize, mut idx: Elem) -> Vec<Elem> {
    let q = q as Elem;
    (0..k)
        .map(|_| {
            let c = idx % q;
            idx /= q;
            c
        })
        .collect()
}
