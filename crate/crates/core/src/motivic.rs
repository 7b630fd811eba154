//! Motivic cohomology tables `H^i_M(X, Z(n))` for `0 ≤ i ≤ 6`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::abgroup::{cokernel_group, FiniteAbelianGroup, GroupExpr, Symbol};
use crate::catalog::{ClassTag, ParshinStatus};
use crate::error::{Error, Result};
use crate::exactalg::{reversed_char_poly, IntMatrix};
use crate::weil::{off_diagonal_order, p_part_order_32, WeilPolynomial, CONVENTION_NOTE};

/// Search bound when checking that a Galois action has finite order.
pub const ORDER_BOUND: u64 = 5000;

/// Frobenius on an odd-degree cohomology group `H^1` or `H^3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaleModel {
    CharPoly(WeilPolynomial),
    /// Geometric Frobenius on a `Z_l`-lattice.
    Lattice(IntMatrix),
}

impl EtaleModel {
    /// Prime-to-`p` coinvariants of the twist by `n`.
    pub fn coinvariants(&self, n: u32, q: u64, p: u64) -> Result<(GroupExpr, bool)> {
        match self {
            EtaleModel::CharPoly(wp) => {
                let ord = off_diagonal_order(wp, n)?;
                Ok((GroupExpr::of_order(ord.total)?, true))
            }
            EtaleModel::Lattice(f) => Ok((lattice_coinvariants(f, n, q, p)?, false)),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            EtaleModel::CharPoly(wp) => wp.degree(),
            EtaleModel::Lattice(f) => f.rows(),
        }
    }
}

/// Frobenius data on `H^2`, or the Galois action on `Pic` of the geometric surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrobeniusModel {
    CharPolyOnly(WeilPolynomial),
    /// Geometric Frobenius on `H^2(X̄, Z_l)`; eigenvalues of modulus `q`.
    H2Lattice(IntMatrix),
    /// Arithmetic Galois action of finite order on the free part of
    /// `Pic(X̄)`, plus torsion summands with trivial action.
    PicardLattice {
        action: IntMatrix,
        torsion: Vec<u64>,
    },
}

impl FrobeniusModel {
    pub fn rank(&self) -> usize {
        match self {
            FrobeniusModel::CharPolyOnly(wp) => wp.degree(),
            FrobeniusModel::H2Lattice(f) => f.rows(),
            FrobeniusModel::PicardLattice { action, .. } => action.rows(),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            FrobeniusModel::CharPolyOnly(_) => "charpoly",
            FrobeniusModel::H2Lattice(_) => "h2lattice",
            FrobeniusModel::PicardLattice { .. } => "picard",
        }
    }

    /// Order of the Galois action for a Picard lattice.
    pub fn action_order(&self) -> Result<Option<u64>> {
        match self {
            FrobeniusModel::PicardLattice { action, .. } => {
                match action.multiplicative_order(ORDER_BOUND)? {
                    Some(k) => Ok(Some(k)),
                    None => Err(Error::InvalidInput(format!(
                        "Galois action has no finite order up to {ORDER_BOUND}"
                    ))),
                }
            }
            _ => Ok(None),
        }
    }

    /// `q·R^{-1}` for a Picard lattice; the matrix itself for an `H^2` lattice.
    pub fn h2_matrix(&self, q: u64) -> Result<Option<IntMatrix>> {
        match self {
            FrobeniusModel::H2Lattice(f) => Ok(Some(f.clone())),
            FrobeniusModel::PicardLattice { action, .. } => {
                let k = self.action_order()?.expect("picard lattices have an order");
                let inverse = action.pow(k - 1)?;
                Ok(Some(inverse.scale(&BigInt::from(q))))
            }
            FrobeniusModel::CharPolyOnly(_) => Ok(None),
        }
    }

    /// `P_2(T)` on the free part.
    pub fn weil_polynomial(&self, q: u64) -> Result<WeilPolynomial> {
        match self {
            FrobeniusModel::CharPolyOnly(wp) => Ok(wp.clone()),
            _ => {
                let f = self.h2_matrix(q)?.expect("lattice model");
                WeilPolynomial::new(reversed_char_poly(&f)?, 2, q)
            }
        }
    }

    pub fn validate(&self, q: u64) -> Result<()> {
        match self {
            FrobeniusModel::CharPolyOnly(wp) => {
                if wp.weight != 2 || wp.q != q {
                    return Err(Error::InvalidInput(format!(
                        "expected a weight-2 polynomial over F_{q}, got weight {} over F_{}",
                        wp.weight, wp.q
                    )));
                }
                wp.validate().into_result().map(|_| ())
            }
            FrobeniusModel::H2Lattice(f) => {
                if !f.is_square() {
                    return Err(Error::Dimension("H^2 lattice matrix must be square".into()));
                }
                self.weil_polynomial(q)?
                    .validate()
                    .into_result()
                    .map(|_| ())
            }
            FrobeniusModel::PicardLattice { action, torsion } => {
                if !action.is_square() {
                    return Err(Error::Dimension(
                        "Picard action matrix must be square".into(),
                    ));
                }
                if torsion.iter().any(|&t| t < 2) {
                    return Err(Error::InvalidInput(
                        "torsion orders must be at least 2".into(),
                    ));
                }
                self.action_order().map(|_| ())
            }
        }
    }
}

/// Prime-to-`p` part of `coker(F - q^n I)`; a nontrivial kernel means the
/// twist meets an eigenvalue.
pub fn lattice_coinvariants(f: &IntMatrix, n: u32, q: u64, p: u64) -> Result<GroupExpr> {
    let m = f.sub_scalar(&BigInt::from(q).pow(n))?;
    let g = cokernel_group(&m, Some(p));
    if g.free_rank() != Some(0) {
        return Err(Error::OnDiagonalTwist { twist: n });
    }
    Ok(g)
}

/// `coker(q^k R - I)` prime to `p`, plus `Z/gcd(t, q^k - 1)` for each
/// torsion summand `Z/t` with trivial action.
pub fn picard_twisted_coinvariants(
    action: &IntMatrix,
    torsion: &[u64],
    k: u32,
    q: u64,
    p: u64,
) -> Result<GroupExpr> {
    let qk = BigInt::from(q).pow(k);
    let m = action.scale(&qk).sub_scalar(&BigInt::one())?;
    let free = cokernel_group(&m, Some(p));
    if free.free_rank() != Some(0) {
        return Err(Error::OnDiagonalTwist { twist: k + 1 });
    }
    Ok(free.direct_sum(&torsion_coinvariants(torsion, k, q, p)))
}

/// Prime-to-`p` coinvariants of `H^2(X̄, Z_l(n))` (for a Picard lattice:
/// of `Pic(X̄) ⊗ Z_l(n-1)`).
pub fn coinvariants(model: &FrobeniusModel, n: u32, q: u64, p: u64) -> Result<GroupExpr> {
    match model {
        FrobeniusModel::CharPolyOnly(wp) => GroupExpr::of_order(off_diagonal_order(wp, n)?.total),
        FrobeniusModel::H2Lattice(f) => lattice_coinvariants(f, n, q, p),
        FrobeniusModel::PicardLattice { action, torsion } => {
            if n == 0 {
                return Err(Error::InvalidInput(
                    "Picard coinvariants need a twist n >= 1".into(),
                ));
            }
            picard_twisted_coinvariants(action, torsion, n - 1, q, p)
        }
    }
}

/// Input to the table and K-theory computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDescriptor {
    pub q: u64,
    pub p: u64,
    pub class: ClassTag,
    pub frobenius: FrobeniusModel,
    pub b2: usize,
    pub pic: GroupExpr,
    pub ch0: GroupExpr,
    pub geometrically_irreducible: bool,
    pub torsion_free_cohomology: bool,
    pub enriques: bool,
    pub h1: Option<EtaleModel>,
    pub h3: Option<EtaleModel>,
    pub parshin: ParshinStatus,
    /// Notes the builder wants carried into every report.
    pub notes: Vec<String>,
}

impl SurfaceDescriptor {
    pub fn validate(&self) -> Result<()> {
        let (p, _) = crate::weil::prime_power_base(self.q)?;
        if p != self.p {
            return Err(Error::InvalidInput(format!(
                "q = {} is not a power of p = {}",
                self.q, self.p
            )));
        }
        if self.enriques == self.torsion_free_cohomology {
            return Err(Error::Ineligible(
                "exactly one of the torsion-free and Enriques modes must be selected".into(),
            ));
        }
        if self.enriques {
            if self.p == 2 {
                return Err(Error::Ineligible(
                    "Enriques surfaces are only supported in characteristic p > 2".into(),
                ));
            }
            match &self.frobenius {
                FrobeniusModel::PicardLattice { action, torsion }
                    if action.rows() == 10 && torsion.as_slice() == [2] => {}
                _ => {
                    return Err(Error::Ineligible(
                        "an Enriques descriptor needs a 10x10 Picard action with torsion [2]"
                            .into(),
                    ))
                }
            }
        }
        if self.frobenius.rank() != self.b2 {
            return Err(Error::Dimension(format!(
                "Frobenius model has rank {} but b2 = {}",
                self.frobenius.rank(),
                self.b2
            )));
        }
        self.frobenius.validate(self.q)?;
        for (w, m) in [(1u32, &self.h1), (3, &self.h3)] {
            if let Some(EtaleModel::CharPoly(wp)) = m {
                if wp.weight != w || wp.q != self.q {
                    return Err(Error::InvalidInput(format!(
                        "H^{w} polynomial must have weight {w} over F_{}",
                        self.q
                    )));
                }
                wp.validate().into_result()?;
            }
            if let Some(EtaleModel::Lattice(f)) = m {
                let wp = WeilPolynomial::new(reversed_char_poly(f)?, w, self.q)?;
                wp.validate().into_result()?;
            }
        }
        Ok(())
    }

    /// The weight-2 polynomial of the free part of `H^2`.
    pub fn p2(&self) -> Result<WeilPolynomial> {
        self.frobenius.weil_polynomial(self.q)
    }

    pub fn mode(&self) -> TableMode {
        if self.enriques {
            TableMode::Enriques
        } else {
            TableMode::TorsionFree
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableMode {
    TorsionFree,
    Enriques,
}

/// A labelled direct summand of a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub label: String,
    pub group: GroupExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicEntry {
    pub group: GroupExpr,
    pub parts: Vec<Summand>,
    pub provenance: String,
    /// True when the value relies on Parshin's conjecture for this surface.
    pub conditional: bool,
    /// True when the order comes from a twisted Weil value.
    pub uses_convention: bool,
}

impl MotivicEntry {
    fn new(provenance: impl Into<String>, parts: Vec<Summand>) -> Self {
        let group = GroupExpr::sum_all(parts.iter().map(|s| &s.group));
        Self {
            group,
            parts,
            provenance: provenance.into(),
            conditional: false,
            uses_convention: false,
        }
    }

    fn single(provenance: &str, label: &str, group: GroupExpr) -> Self {
        Self::new(
            provenance,
            vec![Summand {
                label: label.into(),
                group,
            }],
        )
    }

    fn zero(provenance: &str) -> Self {
        Self::new(provenance, Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicTable {
    pub mode: TableMode,
    pub n_max: u32,
    /// Keyed by `(n, i)`.
    pub cells: BTreeMap<(u32, u32), MotivicEntry>,
    pub notes: Vec<String>,
}

impl MotivicTable {
    pub fn get(&self, i: u32, n: u32) -> Option<&MotivicEntry> {
        self.cells.get(&(n, i))
    }

    pub fn group(&self, i: u32, n: u32) -> Option<&GroupExpr> {
        self.get(i, n).map(|e| &e.group)
    }
}

pub const MAX_DEGREE: u32 = 6;

pub const BOTT_SUMMAND: &str = "Bott summand";
pub const POINT_SUMMAND: &str = "point summand";

fn cyclic_qn_minus_1(q: u64, n: u32) -> GroupExpr {
    let v = BigUint::from(q).pow(n) - BigUint::one();
    if v.is_zero() {
        GroupExpr::free(1)
    } else {
        GroupExpr::cyclic(v)
    }
}

fn label_cyclic(n: u32) -> String {
    match n {
        0 => "Z/(q^0-1)".into(),
        1 => "Z/(q-1)".into(),
        _ => format!("Z/(q^{n}-1)"),
    }
}

pub fn motivic_table(desc: &SurfaceDescriptor, n_max: u32) -> Result<MotivicTable> {
    desc.validate()?;
    let mut cells = BTreeMap::new();
    let mut notes = desc.notes.clone();
    let conditional = matches!(desc.parshin, ParshinStatus::Conjectural);
    let mut used_convention = false;

    for n in 0..=n_max {
        for i in 0..=MAX_DEGREE {
            let mut entry = if i > (n + 2).min(2 * n) {
                MotivicEntry::zero("vanishes for i > min(n+2, 2n)")
            } else {
                match desc.mode() {
                    TableMode::TorsionFree => torsion_free_cell(desc, i, n)?,
                    TableMode::Enriques => enriques_cell(desc, i, n)?,
                }
            };
            if conditional && n >= 2 && i != 2 * n && !entry.group.is_trivial() {
                entry.conditional = true;
            }
            used_convention |= entry.uses_convention;
            cells.insert((n, i), entry);
        }
    }
    if used_convention {
        notes.push(CONVENTION_NOTE.into());
    }
    if conditional {
        notes.push("off-diagonal cells marked * are conditional on Parshin's conjecture".into());
    }
    Ok(MotivicTable {
        mode: desc.mode(),
        n_max,
        cells,
        notes,
    })
}

fn zx(desc: &SurfaceDescriptor) -> GroupExpr {
    if desc.geometrically_irreducible {
        GroupExpr::free(1)
    } else {
        GroupExpr::Symbolic(Symbol::ZX)
    }
}

fn odd_coinvariants(
    model: &Option<EtaleModel>,
    degree: u32,
    n: u32,
    q: u64,
    p: u64,
) -> Result<MotivicEntry> {
    let prov = format!("H^{degree} coinvariants, twist {n}");
    let label = format!("H^{degree} coinvariants");
    Ok(match model {
        None => MotivicEntry::single(&prov, &label, GroupExpr::trivial()),
        Some(m) => {
            let (g, conv) = m.coinvariants(n, q, p)?;
            let mut e = MotivicEntry::single(&prov, &label, g);
            e.uses_convention = conv;
            e
        }
    })
}

fn h2_coinvariants(desc: &SurfaceDescriptor, n: u32) -> Result<(GroupExpr, bool)> {
    let conv = matches!(desc.frobenius, FrobeniusModel::CharPolyOnly(_));
    Ok((coinvariants(&desc.frobenius, n, desc.q, desc.p)?, conv))
}

fn torsion_free_cell(desc: &SurfaceDescriptor, i: u32, n: u32) -> Result<MotivicEntry> {
    let (q, p) = (desc.q, desc.p);
    Ok(match (n, i) {
        (0, 0) => MotivicEntry::single("Z(X)", "Z(X)", zx(desc)),
        (1, 1) => MotivicEntry::single("O*(X) = Z/(q-1)", BOTT_SUMMAND, cyclic_qn_minus_1(q, 1)),
        (1, 2) => MotivicEntry::single("Pic(X)", "Pic(X)", desc.pic.clone()),
        (_, 1) => MotivicEntry::single(&label_cyclic(n), BOTT_SUMMAND, cyclic_qn_minus_1(q, n)),
        (_, 2) => odd_coinvariants(&desc.h1, 1, n, q, p)?,
        (2, 3) => {
            let wp = desc.p2()?;
            let pp = p_part_order_32(&wp)?;
            let (coinv, conv) = h2_coinvariants(desc, 2)?;
            let mut e = MotivicEntry::new(
                "p-part of order p^v_p(P_2(1)) plus H^2 coinvariants, twist 2",
                vec![
                    Summand {
                        label: "p-part".into(),
                        group: GroupExpr::of_order(pp)?,
                    },
                    Summand {
                        label: "H^2 coinvariants".into(),
                        group: coinv,
                    },
                ],
            );
            e.uses_convention = conv;
            e
        }
        (_, 3) => {
            let (coinv, conv) = h2_coinvariants(desc, n)?;
            let mut e = MotivicEntry::single(
                &format!("H^2 coinvariants, twist {n}"),
                "H^2 coinvariants",
                coinv,
            );
            e.uses_convention = conv;
            e
        }
        (2, 4) => MotivicEntry::single("CH_0(X)", "CH_0(X)", desc.ch0.clone()),
        (_, 4) => odd_coinvariants(&desc.h3, 3, n, q, p)?,
        (_, 5) => MotivicEntry::single(
            &label_cyclic(n - 2),
            POINT_SUMMAND,
            cyclic_qn_minus_1(q, n - 2),
        ),
        _ => MotivicEntry::zero("vanishes"),
    })
}

fn enriques_cell(desc: &SurfaceDescriptor, i: u32, n: u32) -> Result<MotivicEntry> {
    let q = desc.q;
    let FrobeniusModel::PicardLattice { action, torsion } = &desc.frobenius else {
        return Err(Error::Ineligible(
            "Enriques mode needs a Picard lattice".into(),
        ));
    };
    Ok(match (n, i) {
        (0, 0) => MotivicEntry::single("Z(X)", "Z(X)", zx(desc)),
        (1, 1) => MotivicEntry::single("O*(X) = Z/(q-1)", BOTT_SUMMAND, cyclic_qn_minus_1(q, 1)),
        (1, 2) => MotivicEntry::single("Pic(X)", "Pic(X)", desc.pic.clone()),
        (_, 1) => MotivicEntry::single(&label_cyclic(n), BOTT_SUMMAND, cyclic_qn_minus_1(q, n)),
        (_, 2) => MotivicEntry::zero("H^1 of the geometric surface vanishes"),
        (_, 3) => {
            let free = picard_twisted_coinvariants(action, &[], n - 1, q, desc.p)?;
            let torsion_part = torsion_coinvariants(torsion, n - 1, q, desc.p);
            MotivicEntry::new(
                format!(
                    "(Pic(X̄) ⊗ Z_l({}))_Γ = coker(q^{} R - I) plus torsion",
                    n - 1,
                    n - 1
                ),
                vec![
                    Summand {
                        label: "Pic coinvariants".into(),
                        group: free,
                    },
                    Summand {
                        label: "canonical class torsion".into(),
                        group: torsion_part,
                    },
                ],
            )
        }
        (2, 4) => MotivicEntry::single("CH_0(X)", "CH_0(X)", desc.ch0.clone()),
        (_, 4) => MotivicEntry::single(
            &format!("Z/gcd(2, q^{}-1)", n - 1),
            "H^3 torsion",
            torsion_coinvariants(&[2], n - 1, q, desc.p),
        ),
        (_, 5) => MotivicEntry::single(
            &label_cyclic(n - 2),
            POINT_SUMMAND,
            cyclic_qn_minus_1(q, n - 2),
        ),
        _ => MotivicEntry::zero("vanishes"),
    })
}

/// `⊕ Z/gcd(t, q^k - 1)` prime to `p`.
pub fn torsion_coinvariants(torsion: &[u64], k: u32, q: u64, p: u64) -> GroupExpr {
    let qk1 = BigUint::from(q).pow(k) - BigUint::one();
    GroupExpr::Finite(
        FiniteAbelianGroup::from_orders(torsion.iter().map(|&t| {
            if qk1.is_zero() {
                BigUint::from(t)
            } else {
                BigUint::from(t).gcd(&qk1)
            }
        }))
        .prime_to(&BigUint::from(p)),
    )
}
