//! Finitely generated abelian groups in canonical invariant-factor form, and
//! the formal expressions used for table cells and K-groups.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{factor, smith_normal_form, split_prime_power, IntMatrix};

/// A finite abelian group `Z/d_1 ⊕ … ⊕ Z/d_k` with `d_1 | d_2 | … | d_k`
/// and every `d_i ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<BigUint>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: impl Into<BigUint>) -> Self {
        Self::from_orders([n.into()])
    }

    /// Direct sum of cyclic groups of the given orders. Orders of 0 are not
    /// finite and are rejected by [`Self::try_from_orders`]; here they panic.
    pub fn from_orders(orders: impl IntoIterator<Item = BigUint>) -> Self {
        Self::try_from_orders(orders).expect("cyclic orders must be positive")
    }

    pub fn try_from_orders(orders: impl IntoIterator<Item = BigUint>) -> Result<Self> {
        let mut v: Vec<BigUint> = orders.into_iter().collect();
        if v.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("Z/0 is not a finite group".into()));
        }
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let g = v[i].gcd(&v[j]);
                let l = &v[i] / &g * &v[j];
                v[i] = g;
                v[j] = l;
            }
        }
        v.retain(|d| !d.is_one());
        Ok(Self {
            invariant_factors: v,
        })
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    pub fn order(&self) -> BigUint {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> BigUint {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigUint::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_orders(
            self.invariant_factors
                .iter()
                .chain(&other.invariant_factors)
                .cloned(),
        )
    }

    /// `G^{⊕k}`.
    pub fn power(&self, k: usize) -> Self {
        Self::from_orders(std::iter::repeat_n(self.invariant_factors.iter().cloned(), k).flatten())
    }

    pub fn ell_primary_part(&self, ell: &BigUint) -> Self {
        Self::from_orders(
            self.invariant_factors
                .iter()
                .map(|d| ell.pow(split_prime_power(d, ell).1)),
        )
    }

    /// Removes the `p`-primary part, keeping the prime-to-`p` part.
    pub fn prime_to(&self, p: &BigUint) -> Self {
        Self::from_orders(
            self.invariant_factors
                .iter()
                .map(|d| split_prime_power(d, p).0),
        )
    }

    /// Prime-power (elementary divisor) decomposition, sorted by prime.
    pub fn primary_decomposition(&self) -> Result<Vec<(BigUint, Self)>> {
        let primes = factor(&self.exponent())?;
        Ok(primes
            .into_iter()
            .map(|(p, _)| (p.clone(), self.ell_primary_part(&p)))
            .collect())
    }

    /// `|G[n]|`, the number of elements killed by `n`.
    pub fn torsion_count(&self, n: &BigUint) -> BigUint {
        self.invariant_factors.iter().map(|d| d.gcd(n)).product()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        GroupExpr::Finite(self.clone()).fmt(f)
    }
}

/// Cells the theory leaves as named groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    ZX,
    Pic,
    Ch0,
}

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::Pic => "Pic(X)",
            Symbol::Ch0 => "CH_0(X)",
            Symbol::ZX => "Z(X)",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Symbol::Pic, Symbol::Ch0, Symbol::ZX]
            .into_iter()
            .find(|x| x.name() == s)
    }
}

/// A table cell or K-group.
///
/// Values are kept normalized by [`GroupExpr::direct_sum`]: known parts are
/// merged into one finitely generated group, order-only parts are merged
/// into one, and symbolic terms stay formal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupExpr {
    Finite(FiniteAbelianGroup),
    FreePlusFinite {
        rank: u32,
        torsion: FiniteAbelianGroup,
    },
    /// A finite group of known order and unknown structure.
    OrderOnly(BigUint),
    Symbolic(Symbol),
    Sum(Vec<GroupExpr>),
}

impl Default for GroupExpr {
    fn default() -> Self {
        Self::trivial()
    }
}

impl From<FiniteAbelianGroup> for GroupExpr {
    fn from(g: FiniteAbelianGroup) -> Self {
        GroupExpr::Finite(g)
    }
}

#[derive(Default)]
struct Parts {
    rank: u32,
    torsion: FiniteAbelianGroup,
    unknown: Option<BigUint>,
    symbols: Vec<Symbol>,
}

impl Parts {
    fn absorb(&mut self, g: &GroupExpr) {
        match g {
            GroupExpr::Finite(t) => self.torsion = self.torsion.direct_sum(t),
            GroupExpr::FreePlusFinite { rank, torsion } => {
                self.rank += rank;
                self.torsion = self.torsion.direct_sum(torsion);
            }
            GroupExpr::OrderOnly(n) => {
                self.unknown = Some(self.unknown.take().unwrap_or_else(BigUint::one) * n)
            }
            GroupExpr::Symbolic(s) => self.symbols.push(*s),
            GroupExpr::Sum(terms) => terms.iter().for_each(|t| self.absorb(t)),
        }
    }

    fn build(mut self) -> GroupExpr {
        self.symbols.sort();
        let known = GroupExpr::free_plus(self.rank, self.torsion);
        let mut terms = Vec::new();
        if !known.is_trivial() {
            terms.push(known);
        }
        if let Some(n) = self.unknown.filter(|n| !n.is_one()) {
            terms.push(GroupExpr::OrderOnly(n));
        }
        terms.extend(self.symbols.into_iter().map(GroupExpr::Symbolic));
        match terms.len() {
            0 => GroupExpr::trivial(),
            1 => terms.pop().unwrap(),
            _ => GroupExpr::Sum(terms),
        }
    }
}

impl GroupExpr {
    pub fn trivial() -> Self {
        GroupExpr::Finite(FiniteAbelianGroup::trivial())
    }

    pub fn cyclic(n: impl Into<BigUint>) -> Self {
        GroupExpr::Finite(FiniteAbelianGroup::cyclic(n))
    }

    pub fn free(rank: u32) -> Self {
        Self::free_plus(rank, FiniteAbelianGroup::trivial())
    }

    pub fn free_plus(rank: u32, torsion: FiniteAbelianGroup) -> Self {
        if rank == 0 {
            GroupExpr::Finite(torsion)
        } else {
            GroupExpr::FreePlusFinite { rank, torsion }
        }
    }

    /// Order-only group; a squarefree order (or 1) forces the group to be cyclic.
    pub fn of_order(n: BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidInput("a group order must be positive".into()));
        }
        let squarefree = factor(&n)?.iter().all(|(_, e)| *e == 1);
        Ok(if squarefree {
            Self::cyclic(n)
        } else {
            GroupExpr::OrderOnly(n)
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::sum_all([self, other])
    }

    pub fn sum_all<'a>(terms: impl IntoIterator<Item = &'a GroupExpr>) -> Self {
        let mut parts = Parts::default();
        for t in terms {
            parts.absorb(t);
        }
        parts.build()
    }

    pub fn power(&self, k: usize) -> Self {
        Self::sum_all(std::iter::repeat_n(self, k))
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, GroupExpr::Finite(g) if g.is_trivial())
    }

    /// Order when the group is known to be finite.
    pub fn order(&self) -> Option<BigUint> {
        match self {
            GroupExpr::Finite(g) => Some(g.order()),
            GroupExpr::OrderOnly(n) => Some(n.clone()),
            GroupExpr::FreePlusFinite { .. } | GroupExpr::Symbolic(_) => None,
            GroupExpr::Sum(terms) => terms.iter().map(GroupExpr::order).product(),
        }
    }

    pub fn free_rank(&self) -> Option<u32> {
        match self {
            GroupExpr::Finite(_) | GroupExpr::OrderOnly(_) => Some(0),
            GroupExpr::FreePlusFinite { rank, .. } => Some(*rank),
            GroupExpr::Symbolic(_) => None,
            GroupExpr::Sum(terms) => terms.iter().map(GroupExpr::free_rank).sum(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteAbelianGroup> {
        match self {
            GroupExpr::Finite(g) => Some(g),
            _ => None,
        }
    }

    pub fn has_unknown_structure(&self) -> bool {
        match self {
            GroupExpr::OrderOnly(_) => true,
            GroupExpr::Sum(terms) => terms.iter().any(GroupExpr::has_unknown_structure),
            _ => false,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        match self {
            GroupExpr::Symbolic(_) => true,
            GroupExpr::Sum(terms) => terms.iter().any(GroupExpr::is_symbolic),
            _ => false,
        }
    }
}

/// Cokernel of `m: Z^cols → Z^rows`, dropping the `excluded_prime`-part of
/// every torsion factor.
pub fn cokernel_group(m: &IntMatrix, excluded_prime: Option<u64>) -> GroupExpr {
    let snf = smith_normal_form(m);
    let p = excluded_prime.map(BigUint::from);
    let torsion = FiniteAbelianGroup::from_orders(snf.nonzero().map(|d| {
        let d = d.magnitude().clone();
        match &p {
            Some(p) => split_prime_power(&d, p).0,
            None => d,
        }
    }));
    GroupExpr::free_plus(snf.rank_free as u32, torsion)
}

/// `direct_sum` over [`GroupExpr`] values.
pub fn direct_sum(a: &GroupExpr, b: &GroupExpr) -> GroupExpr {
    a.direct_sum(b)
}

pub fn ell_primary_part(g: &FiniteAbelianGroup, ell: u64) -> FiniteAbelianGroup {
    g.ell_primary_part(&BigUint::from(ell))
}

fn fmt_torsion(g: &FiniteAbelianGroup, out: &mut Vec<String>) {
    let f = g.invariant_factors();
    let mut i = 0;
    while i < f.len() {
        let j = (i..f.len()).find(|&j| f[j] != f[i]).unwrap_or(f.len());
        let k = j - i;
        if k == 1 {
            out.push(format!("Z/{}Z", f[i]));
        } else {
            out.push(format!("(Z/{}Z)^{k}", f[i]));
        }
        i = j;
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        self.collect_tokens(&mut parts);
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl GroupExpr {
    fn collect_tokens(&self, out: &mut Vec<String>) {
        match self {
            GroupExpr::Finite(g) => fmt_torsion(g, out),
            GroupExpr::FreePlusFinite { rank, torsion } => {
                out.push(if *rank == 1 {
                    "Z".into()
                } else {
                    format!("Z^{rank}")
                });
                fmt_torsion(torsion, out);
            }
            GroupExpr::OrderOnly(n) => out.push(format!("[order {n}]")),
            GroupExpr::Symbolic(s) => out.push(s.name().into()),
            GroupExpr::Sum(terms) => terms.iter().for_each(|t| t.collect_tokens(out)),
        }
    }
}

impl FromStr for GroupExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse group `{s}`"));
        let num = |t: &str| t.trim().parse::<BigUint>().map_err(|_| bad());
        let mut terms = Vec::new();
        for tok in s.split('⊕').map(str::trim) {
            let g = if tok == "0" {
                GroupExpr::trivial()
            } else if tok == "Z" {
                GroupExpr::free(1)
            } else if let Some(r) = tok.strip_prefix("Z^") {
                GroupExpr::free(r.parse().map_err(|_| bad())?)
            } else if let Some(n) = tok
                .strip_prefix("[order ")
                .and_then(|t| t.strip_suffix(']'))
            {
                GroupExpr::OrderOnly(num(n)?)
            } else if let Some(sym) = Symbol::parse(tok) {
                GroupExpr::Symbolic(sym)
            } else if let Some(rest) = tok.strip_prefix("(Z/") {
                let (n, k) = rest.split_once("Z)^").ok_or_else(bad)?;
                let k: usize = k.parse().map_err(|_| bad())?;
                GroupExpr::Finite(FiniteAbelianGroup::try_from_orders(vec![num(n)?; k])?)
            } else if let Some(n) = tok.strip_prefix("Z/").and_then(|t| t.strip_suffix('Z')) {
                GroupExpr::Finite(FiniteAbelianGroup::try_from_orders([num(n)?])?)
            } else {
                return Err(bad());
            };
            terms.push(g);
        }
        Ok(GroupExpr::sum_all(&terms))
    }
}
