//! Named surface classes, descriptor construction, and the rule set that
//! decides whether Parshin's conjecture is known for a class.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::abgroup::{FiniteAbelianGroup, GroupExpr, Symbol};
use crate::error::{Error, Result};
use crate::exactalg::{IntMatrix, IntPolynomial};
use crate::ffcount::{
    build_field, counts_series_with, hypersurface_counts_series, Budget, CountMethod,
    HomogeneousForm, Term,
};
use crate::motivic::{EtaleModel, FrobeniusModel, SurfaceDescriptor};
use crate::weil::{prime_power_base, reconstruct_p2_from_counts, PointCounts, WeilPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParshinReason {
    AbelianTypeDimAtMost3,
    Unirational,
    RationalDiagonalDecomposition,
    SingularK3,
    SupersingularK3Rank22,
    FiniteFieldBase,
}

impl ParshinReason {
    pub fn tag(self) -> &'static str {
        match self {
            ParshinReason::AbelianTypeDimAtMost3 => "abelian-type-dim<=3",
            ParshinReason::Unirational => "unirational",
            ParshinReason::RationalDiagonalDecomposition => "rational-diagonal-decomposition",
            ParshinReason::SingularK3 => "singular-k3",
            ParshinReason::SupersingularK3Rank22 => "supersingular-k3-rank22",
            ParshinReason::FiniteFieldBase => "finite-field-base",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParshinStatus {
    Known {
        reason: ParshinReason,
        rule: &'static str,
    },
    Conjectural,
}

impl ParshinStatus {
    fn known(reason: ParshinReason, rule: &'static str) -> Self {
        ParshinStatus::Known { reason, rule }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, ParshinStatus::Known { .. })
    }
}

impl fmt::Display for ParshinStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParshinStatus::Known { reason, rule } => {
                write!(f, "unconditional ({}; {rule})", reason.tag())
            }
            ParshinStatus::Conjectural => write!(f, "conditional on Parshin's conjecture"),
        }
    }
}

/// User-supplied facts that the calculator cannot decide.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assertions {
    pub rational_diagonal_decomposition: bool,
    pub abelian_type: bool,
    pub unirational: bool,
    pub shioda_supersingular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomSurface {
    pub frobenius: FrobeniusModel,
    pub pic: GroupExpr,
    pub ch0: GroupExpr,
    pub h1: Option<EtaleModel>,
    pub h3: Option<EtaleModel>,
    pub geometrically_irreducible: bool,
    pub assertions: Assertions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceClass {
    ProjectivePlane,
    SmoothQuadric,
    FermatSurface {
        d: u32,
    },
    /// A smooth surface in `P^3` given by a form over `F_q`.
    HypersurfaceP3 {
        form: HomogeneousForm,
        assertions: Assertions,
    },
    K3 {
        model: FrobeniusModel,
        rho_geometric: Option<u32>,
        assertions: Assertions,
    },
    Enriques {
        action: IntMatrix,
    },
    CurveFromZeta {
        p1: WeilPolynomial,
        tate: Option<IntMatrix>,
    },
    Custom(Box<CustomSurface>),
}

/// Short class name carried by descriptors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassTag {
    ProjectivePlane,
    SmoothQuadric,
    Fermat(u32),
    Hypersurface(u32),
    K3,
    Enriques,
    Custom,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::ProjectivePlane => write!(f, "projective plane"),
            ClassTag::SmoothQuadric => write!(f, "smooth quadric"),
            ClassTag::Fermat(d) => write!(f, "Fermat surface of degree {d}"),
            ClassTag::Hypersurface(d) => write!(f, "surface of degree {d} in P^3"),
            ClassTag::K3 => write!(f, "K3 surface"),
            ClassTag::Enriques => write!(f, "Enriques surface"),
            ClassTag::Custom => write!(f, "custom surface"),
        }
    }
}

/// Second Betti number of a smooth degree-`d` surface in `P^3`.
pub fn fermat_b2(d: u32) -> usize {
    let d = d as i64;
    (d * d * d - 4 * d * d + 6 * d - 2) as usize
}

/// Multiplicative order of `p` modulo `d` (for `gcd(p, d) = 1`, `d ≥ 2`).
fn mult_order(p: u64, d: u64) -> u64 {
    let mut x = p % d;
    let mut k = 1;
    while x != 1 {
        x = x * (p % d) % d;
        k += 1;
    }
    k
}

/// Whether `p^ν ≡ -1 (mod d)` for some `ν` up to the order of `p` mod `d`.
pub fn fermat_is_supersingular_type(d: u32, p: u64) -> bool {
    let d = u64::from(d);
    if d <= 2 {
        return true;
    }
    if p.is_multiple_of(d) || num_integer::gcd(p, d) != 1 {
        return false;
    }
    let mut x = 1u64;
    for _ in 0..mult_order(p, d) {
        x = x * (p % d) % d;
        if x == d - 1 {
            return true;
        }
    }
    false
}

fn k3_rank(model: &FrobeniusModel, rho_geometric: Option<u32>) -> Option<u32> {
    rho_geometric.or_else(|| match model {
        FrobeniusModel::PicardLattice { action, .. } => Some(action.rows() as u32),
        _ => None,
    })
}

/// First matching rule wins; the order is fixed.
pub fn classify_parshin(class: &SurfaceClass, q: u64, p: u64) -> ParshinStatus {
    use ParshinReason::*;
    let _ = q;
    match class {
        SurfaceClass::ProjectivePlane | SurfaceClass::SmoothQuadric => {
            return ParshinStatus::known(Unirational, "rule 1: rational surface")
        }
        SurfaceClass::FermatSurface { d } if fermat_is_supersingular_type(*d, p) => {
            return ParshinStatus::known(Unirational, "rule 2: Fermat surface with p^v = -1 mod d")
        }
        SurfaceClass::FermatSurface { d } if *d <= 3 => {
            return ParshinStatus::known(
                Unirational,
                "rule 3: geometrically rational surface of degree <= 3",
            )
        }
        SurfaceClass::HypersurfaceP3 { form, .. } if form.degree() <= 3 => {
            return ParshinStatus::known(
                Unirational,
                "rule 3: geometrically rational surface of degree <= 3",
            )
        }
        SurfaceClass::Enriques { .. } => {
            return ParshinStatus::known(AbelianTypeDimAtMost3, "rule 4: Enriques surface, p > 2")
        }
        _ => {}
    }
    let assertions = match class {
        SurfaceClass::HypersurfaceP3 { assertions, .. } | SurfaceClass::K3 { assertions, .. } => {
            *assertions
        }
        SurfaceClass::Custom(c) => c.assertions,
        _ => Assertions::default(),
    };
    if assertions.rational_diagonal_decomposition {
        return ParshinStatus::known(
            RationalDiagonalDecomposition,
            "rule 5: asserted rational decomposition of the diagonal",
        );
    }
    if let SurfaceClass::K3 {
        model,
        rho_geometric,
        ..
    } = class
    {
        match k3_rank(model, *rho_geometric) {
            Some(20) if p >= 3 => {
                return ParshinStatus::known(
                    SingularK3,
                    "rule 6: K3 with geometric Picard number 20 and p >= 3",
                )
            }
            Some(22) if assertions.unirational => {
                return ParshinStatus::known(
                    Unirational,
                    "rule 7: asserted unirational supersingular K3",
                )
            }
            Some(22) if p == 2 => {
                return ParshinStatus::known(
                    SupersingularK3Rank22,
                    "rule 7: supersingular K3 in characteristic 2 is unirational",
                )
            }
            _ => {}
        }
    }
    if let SurfaceClass::CurveFromZeta { .. } = class {
        return ParshinStatus::known(AbelianTypeDimAtMost3, "rule 8: curve");
    }
    if assertions.abelian_type {
        return ParshinStatus::known(
            AbelianTypeDimAtMost3,
            "rule 9: asserted abelian-type motive of dimension <= 3",
        );
    }
    if assertions.unirational {
        return ParshinStatus::known(Unirational, "rule 10: asserted unirational");
    }
    ParshinStatus::Conjectural
}

/// Status for the point `Spec F_q`.
pub fn finite_field_status() -> ParshinStatus {
    ParshinStatus::known(ParshinReason::FiniteFieldBase, "finite field")
}

fn qi(q: u64, n: usize) -> Result<IntMatrix> {
    IntMatrix::scalar(n, BigInt::from(q))
}

fn base_descriptor(
    q: u64,
    class: ClassTag,
    frobenius: FrobeniusModel,
    status: ParshinStatus,
) -> Result<SurfaceDescriptor> {
    let (p, _) = prime_power_base(q)?;
    Ok(SurfaceDescriptor {
        q,
        p,
        class,
        b2: frobenius.rank(),
        frobenius,
        pic: GroupExpr::Symbolic(Symbol::Pic),
        ch0: GroupExpr::Symbolic(Symbol::Ch0),
        geometrically_irreducible: true,
        torsion_free_cohomology: true,
        enriques: false,
        h1: None,
        h3: None,
        parshin: status,
        notes: Vec::new(),
    })
}

/// Replaces a reconstructed `P_2 = (1 - qT)^{b2}` by the lattice `q·I`;
/// any other polynomial stays char-poly only.
fn model_from_p2(wp: WeilPolynomial) -> Result<(FrobeniusModel, bool)> {
    let q = BigInt::from(wp.q);
    let b2 = wp.degree();
    if wp.poly == IntPolynomial::one_minus(&q).pow(b2 as u32) {
        Ok((FrobeniusModel::H2Lattice(qi(wp.q, b2)?), true))
    } else {
        Ok((FrobeniusModel::CharPolyOnly(wp), false))
    }
}

pub fn build_descriptor(class: &SurfaceClass, q: u64) -> Result<SurfaceDescriptor> {
    build_descriptor_with(class, q, &Budget::default())
}

pub fn build_descriptor_with(
    class: &SurfaceClass,
    q: u64,
    budget: &Budget,
) -> Result<SurfaceDescriptor> {
    let (p, s) = prime_power_base(q)?;
    let status = classify_parshin(class, q, p);
    let desc = match class {
        SurfaceClass::ProjectivePlane => {
            let mut d = base_descriptor(
                q,
                ClassTag::ProjectivePlane,
                FrobeniusModel::H2Lattice(qi(q, 1)?),
                status,
            )?;
            d.pic = GroupExpr::free(1);
            d.ch0 = GroupExpr::free(1);
            d
        }
        SurfaceClass::SmoothQuadric => {
            let mut d = base_descriptor(
                q,
                ClassTag::SmoothQuadric,
                FrobeniusModel::H2Lattice(qi(q, 2)?),
                status,
            )?;
            d.pic = GroupExpr::free(2);
            d.ch0 = GroupExpr::free(1);
            d
        }
        SurfaceClass::FermatSurface { d } => {
            if u64::from(*d) % p == 0 || *d == 0 {
                return Err(Error::UnsupportedDegree { d: *d, p });
            }
            let b2 = fermat_b2(*d);
            let counts = counts_series_with(*d, p, s, b2 as u32, CountMethod::Convolution, budget)?;
            let wp = reconstruct_p2_from_counts(&counts, b2)?;
            let (model, trivial) = model_from_p2(wp)?;
            let mut desc = base_descriptor(q, ClassTag::Fermat(*d), model, status)?;
            if trivial {
                desc.pic = GroupExpr::free(b2 as u32);
            }
            if *d <= 3 {
                desc.ch0 = GroupExpr::free(1);
            }
            desc
        }
        SurfaceClass::HypersurfaceP3 { form, .. } => {
            let deg = form.degree();
            let b2 = fermat_b2(deg);
            let base = build_field(p, s)?;
            let counts = hypersurface_counts_series(form, &base, b2 as u32, budget)?;
            let wp = reconstruct_p2_from_counts(&counts, b2)?;
            let (model, trivial) = model_from_p2(wp)?;
            let mut desc = base_descriptor(q, ClassTag::Hypersurface(deg), model, status)?;
            if trivial {
                desc.pic = GroupExpr::free(b2 as u32);
            }
            if deg <= 3 {
                desc.ch0 = GroupExpr::free(1);
            }
            desc
        }
        SurfaceClass::K3 {
            model, assertions, ..
        } => {
            if matches!(model, FrobeniusModel::PicardLattice { .. })
                && !assertions.shioda_supersingular
            {
                return Err(Error::Ineligible(
                    "a Picard-lattice model of H^2 needs the shioda_supersingular assertion".into(),
                ));
            }
            if model.rank() != 22 {
                return Err(Error::Ineligible(format!(
                    "a K3 model must have rank 22, got {}",
                    model.rank()
                )));
            }
            let frobenius = match model {
                FrobeniusModel::PicardLattice { torsion, .. } if !torsion.is_empty() => {
                    return Err(Error::Ineligible(
                        "K3 surfaces have torsion-free Picard groups".into(),
                    ))
                }
                FrobeniusModel::PicardLattice { .. } => {
                    FrobeniusModel::H2Lattice(model.h2_matrix(q)?.expect("lattice"))
                }
                other => other.clone(),
            };
            let (rho, note) = k3_picard_number(model, q)?;
            let mut desc = base_descriptor(q, ClassTag::K3, frobenius, status)?;
            desc.pic = GroupExpr::free(rho);
            desc.ch0 = GroupExpr::free(1);
            desc.notes.push(note);
            desc
        }
        SurfaceClass::Enriques { action } => {
            if p == 2 {
                return Err(Error::Ineligible(
                    "Enriques surfaces are only supported in characteristic p > 2".into(),
                ));
            }
            if action.rows() != 10 || !action.is_square() {
                return Err(Error::Dimension(
                    "an Enriques Picard action is 10x10".into(),
                ));
            }
            let model = FrobeniusModel::PicardLattice {
                action: action.clone(),
                torsion: vec![2],
            };
            model.validate(q)?;
            let fixed = 10 - action.sub_scalar(&BigInt::one())?.rank() as u32;
            let mut desc = base_descriptor(q, ClassTag::Enriques, model, status)?;
            desc.pic = GroupExpr::free_plus(fixed, FiniteAbelianGroup::cyclic(2u32));
            desc.ch0 = GroupExpr::free(1);
            desc.torsion_free_cohomology = false;
            desc.enriques = true;
            desc
        }
        SurfaceClass::CurveFromZeta { .. } => {
            return Err(Error::Ineligible(
                "curves are handled by the curve K-theory routine".into(),
            ))
        }
        SurfaceClass::Custom(c) => {
            let mut desc = base_descriptor(q, ClassTag::Custom, c.frobenius.clone(), status)?;
            desc.pic = c.pic.clone();
            desc.ch0 = c.ch0.clone();
            desc.h1 = c.h1.clone();
            desc.h3 = c.h3.clone();
            desc.geometrically_irreducible = c.geometrically_irreducible;
            desc
        }
    };
    desc.validate()?;
    Ok(desc)
}

/// Arithmetic Picard number of a K3 surface and how it was obtained.
pub fn k3_picard_number(model: &FrobeniusModel, q: u64) -> Result<(u32, String)> {
    let qb = BigInt::from(q);
    Ok(match model {
        FrobeniusModel::PicardLattice { action, .. } => {
            let rho = action.rows() - action.sub_scalar(&BigInt::one())?.rank();
            (
                rho as u32,
                format!("rho(X) = {rho}: rank of the sublattice fixed by the Galois action"),
            )
        }
        FrobeniusModel::H2Lattice(f) => {
            let rho = f.rows() - f.sub_scalar(&qb)?.rank();
            (
                rho as u32,
                format!("rho(X) = {rho}: rank of ker(F - qI) on H^2"),
            )
        }
        FrobeniusModel::CharPolyOnly(wp) => {
            let rho = wp.poly.multiplicity_of_reciprocal_root(&qb);
            (
                rho as u32,
                format!("rho(X) = {rho}: multiplicity of 1 - qT in P_2 (Tate-conjecture reading)"),
            )
        }
    })
}

/// Forms whose zero loci are the classes counted naively.
pub fn defining_form(class: &SurfaceClass, p: u64) -> Result<HomogeneousForm> {
    match class {
        SurfaceClass::ProjectivePlane => HomogeneousForm::new(vec![Term {
            coeff: 1,
            exps: [1, 0, 0, 0],
        }]),
        SurfaceClass::SmoothQuadric => HomogeneousForm::new(vec![
            Term {
                coeff: 1,
                exps: [1, 1, 0, 0],
            },
            Term {
                coeff: (p - 1) as u32,
                exps: [0, 0, 1, 1],
            },
        ]),
        SurfaceClass::FermatSurface { d } => Ok(HomogeneousForm::fermat(*d)),
        SurfaceClass::HypersurfaceP3 { form, .. } => Ok(form.clone()),
        _ => Err(Error::Ineligible(
            "class has no defining form in P^3".into(),
        )),
    }
}

/// Naive point counts of a class over `F_{q^r}` for `r = 1..=r_max`.
pub fn naive_counts(
    class: &SurfaceClass,
    q: u64,
    r_max: u32,
    budget: &Budget,
) -> Result<PointCounts> {
    let (p, s) = prime_power_base(q)?;
    let form = defining_form(class, p)?;
    hypersurface_counts_series(&form, &build_field(p, s)?, r_max, budget)
}

/// Descriptor driven only by point counts: `P_2` is reconstructed and the
/// lattice `q·I` is used when every count matches the trivial action.
pub fn descriptor_from_counts(
    class: &SurfaceClass,
    counts: &PointCounts,
) -> Result<SurfaceDescriptor> {
    let (b2, tag) = match class {
        SurfaceClass::ProjectivePlane => (1, ClassTag::ProjectivePlane),
        SurfaceClass::SmoothQuadric => (2, ClassTag::SmoothQuadric),
        SurfaceClass::FermatSurface { d } => (fermat_b2(*d), ClassTag::Fermat(*d)),
        SurfaceClass::HypersurfaceP3 { form, .. } => (
            fermat_b2(form.degree()),
            ClassTag::Hypersurface(form.degree()),
        ),
        _ => {
            return Err(Error::Ineligible(
                "class is not determined by point counts".into(),
            ))
        }
    };
    let wp = reconstruct_p2_from_counts(counts, b2)?;
    let (model, trivial) = model_from_p2(wp)?;
    let status = classify_parshin(class, counts.q, counts.p);
    let mut desc = base_descriptor(counts.q, tag, model, status)?;
    if trivial {
        desc.pic = GroupExpr::free(b2 as u32);
    }
    let rational = match class {
        SurfaceClass::FermatSurface { d } => *d <= 3,
        SurfaceClass::HypersurfaceP3 { form, .. } => form.degree() <= 3,
        _ => true,
    };
    if rational {
        desc.ch0 = GroupExpr::free(1);
    }
    desc.validate()?;
    Ok(desc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parshin_rules() {
        let st = classify_parshin(&SurfaceClass::FermatSurface { d: 3 }, 2, 2);
        assert!(matches!(
            st,
            ParshinStatus::Known {
                reason: ParshinReason::Unirational,
                ..
            }
        ));
        let k3 = |rho: u32| SurfaceClass::K3 {
            model: FrobeniusModel::H2Lattice(IntMatrix::scalar(22, BigInt::from(5)).unwrap()),
            rho_geometric: Some(rho),
            assertions: Assertions::default(),
        };
        assert!(matches!(
            classify_parshin(&k3(20), 5, 5),
            ParshinStatus::Known {
                reason: ParshinReason::SingularK3,
                ..
            }
        ));
        assert_eq!(classify_parshin(&k3(2), 5, 5), ParshinStatus::Conjectural);
        assert!(matches!(
            classify_parshin(&k3(22), 2, 2),
            ParshinStatus::Known {
                reason: ParshinReason::SupersingularK3Rank22,
                ..
            }
        ));
        // d = 5, p = 2: 2^2 = 4 = -1 mod 5
        assert!(fermat_is_supersingular_type(5, 2));
        // d = 7, p = 2: powers of 2 mod 7 are 2, 4, 1
        assert!(!fermat_is_supersingular_type(7, 2));
        assert_eq!(
            classify_parshin(&SurfaceClass::FermatSurface { d: 7 }, 2, 2),
            ParshinStatus::Conjectural
        );
    }

    #[test]
    fn fermat_b2_values() {
        assert_eq!(
            (1..=4).map(fermat_b2).collect::<Vec<_>>(),
            vec![1, 2, 7, 22]
        );
    }

    #[test]
    fn simple_descriptors() {
        let d = build_descriptor(&SurfaceClass::ProjectivePlane, 3).unwrap();
        assert_eq!(d.p2().unwrap().poly, IntPolynomial::from_i64(&[1, -3]));
        assert_eq!(d.pic, GroupExpr::free(1));
        let f = build_descriptor(&SurfaceClass::FermatSurface { d: 3 }, 4).unwrap();
        assert_eq!(f.b2, 7);
        assert_eq!(
            f.p2().unwrap().poly,
            IntPolynomial::from_i64(&[1, -4]).pow(7)
        );
        assert!(f.parshin.is_known());
        let e = build_descriptor(
            &SurfaceClass::Enriques {
                action: IntMatrix::identity(10).unwrap(),
            },
            3,
        )
        .unwrap();
        assert_eq!(e.pic.to_string(), "Z^10 ⊕ Z/2Z");
        assert!(matches!(
            build_descriptor(
                &SurfaceClass::Enriques {
                    action: IntMatrix::identity(10).unwrap()
                },
                4
            ),
            Err(Error::Ineligible(_))
        ));
        let k3 = |shioda| SurfaceClass::K3 {
            model: FrobeniusModel::PicardLattice {
                action: IntMatrix::identity(22).unwrap(),
                torsion: vec![],
            },
            rho_geometric: None,
            assertions: Assertions {
                shioda_supersingular: shioda,
                ..Default::default()
            },
        };
        assert!(build_descriptor(&k3(false), 3).is_err());
        let d = build_descriptor(&k3(true), 3).unwrap();
        assert_eq!(d.pic, GroupExpr::free(22));
    }

    #[test]
    fn counts_driven_descriptors_match() {
        let budget = Budget::default();
        for class in [SurfaceClass::ProjectivePlane, SurfaceClass::SmoothQuadric] {
            let counts = naive_counts(&class, 2, 4, &budget).unwrap();
            let from_counts = descriptor_from_counts(&class, &counts).unwrap();
            let direct = build_descriptor(&class, 2).unwrap();
            assert_eq!(from_counts, direct);
        }
    }
}
