//! Twisting the cube-equivariant forms by quadratic characters, and the
//! registry of form identities that the toolkit verifies.
//!
//! A Galois homomorphism into the canonical cube C (the elementary abelian
//! group of order 16 generated by four commuting reflections) is encoded by
//! four square classes, one per generator: the character of C with support
//! mask S pulls back to the class of the product of the selected entries.
//! Twisting a form that is isotypically decomposed under C multiplies each
//! character component by that character's class. The 27-line and
//! 45-triangle forms are also built a second, independent way, as trace
//! forms of the etale algebras read off the cube's orbit structure, so the
//! registry can compare the two constructions against each other and
//! against closed-form expressions in the rank-4 and rank-5 base forms.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::{rat, Rat};
use crate::lattice::{E6Lattice, LatticeError, WeightVector, RANK};
use crate::qforms::{
    diagonalize_rational, isotypic_decompose, multiquadratic_trace_form, CForm, DiagonalForm,
    QFormError, SquareClass, WittInvariants,
};
use crate::schlafli::{build_omega, LineGraph, SchlafliError, SchlafliModel};
use crate::weyl::{CanonicalCube, GSet, GroupError, Orbit, WeylGroup};

/// Errors from context construction, twisting, and identity verification.
#[derive(Debug, Error)]
pub enum TwistError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Schlafli(#[from] SchlafliError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    QForm(#[from] QFormError),
    #[error("the first fundamental weight must move inside the root lattice")]
    SevenEmbedding,
    #[error("an orbit stabilizer contains an element outside the cube")]
    StabilizerOutsideCube,
    #[error("unknown identity name {0:?}")]
    UnknownIdentity(String),
    #[error("at least one trial is required")]
    NoTrials,
}

/// Four square classes attached to the cube generators s1..s4; the
/// character with support mask S has class equal to the product of the
/// selected entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwistSpec(pub [SquareClass; 4]);

impl TwistSpec {
    pub const TRIVIAL: TwistSpec = TwistSpec([SquareClass::ONE; 4]);

    pub fn from_ints(classes: [i64; 4]) -> Result<TwistSpec, QFormError> {
        Ok(TwistSpec([
            SquareClass::new(classes[0])?,
            SquareClass::new(classes[1])?,
            SquareClass::new(classes[2])?,
            SquareClass::new(classes[3])?,
        ]))
    }

    pub fn classes(&self) -> &[SquareClass; 4] {
        &self.0
    }

    /// Product of the entries selected by a 4-bit character mask.
    pub fn class_of_mask(&self, mask: u8) -> SquareClass {
        (0..4)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.0[i])
            .product()
    }
}

impl fmt::Display for TwistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// Twist an isotypically decomposed form: each character component is
/// scaled by its character's class. The trivial twist returns the
/// underlying form.
pub fn twist_cform(form: &CForm, t: &TwistSpec) -> DiagonalForm {
    let mut out = DiagonalForm::default();
    for (&mask, component) in &form.components {
        out = out.orthogonal_sum(&component.scale(t.class_of_mask(mask)));
    }
    out
}

/// An orbit of the canonical cube together with its point stabilizer,
/// recorded as subset masks of the cube generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeOrbit {
    pub points: Vec<usize>,
    pub stabilizer_masks: Vec<u8>,
}

impl CubeOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Masks of the characters of the cube trivial on the stabilizer; their
    /// count equals the orbit size.
    pub fn trivial_characters(&self) -> Vec<u8> {
        (0u8..16)
            .filter(|c| {
                self.stabilizer_masks
                    .iter()
                    .all(|h| (c & h).count_ones() % 2 == 0)
            })
            .collect()
    }
}

/// Greedy F2-independent basis of a set of 4-bit masks (ascending scan).
fn f2_basis(masks: &[u8]) -> Vec<u8> {
    let mut span = vec![false; 16];
    span[0] = true;
    let mut basis = Vec::new();
    let mut sorted = masks.to_vec();
    sorted.sort_unstable();
    for &m in &sorted {
        if span[m as usize] {
            continue;
        }
        basis.push(m);
        let current: Vec<u8> = (0u8..16).filter(|&s| span[s as usize]).collect();
        for s in current {
            span[(s ^ m) as usize] = true;
        }
    }
    basis
}

/// Trace form of the etale algebra attached to a family of cube orbits:
/// each orbit contributes the trace form of the multiquadratic algebra
/// whose characters are the cube characters trivial on the orbit
/// stabilizer, pulled back to square classes through the twist.
pub fn etale_trace_form(orbits: &[CubeOrbit], t: &TwistSpec) -> DiagonalForm {
    let mut out = DiagonalForm::default();
    for orbit in orbits {
        let characters = orbit.trivial_characters();
        debug_assert_eq!(characters.len(), orbit.len());
        let gens: Vec<SquareClass> = f2_basis(&characters)
            .into_iter()
            .map(|m| t.class_of_mask(m))
            .collect();
        out = out.orthogonal_sum(&multiquadratic_trace_form(&gens));
    }
    out
}

/// The six twisted forms built from one twist: the rank-4 and rank-5 base
/// forms from the raw classes, the rank-6 and rank-7 forms by twisting
/// their character decompositions, and the 27- and 45-point trace forms by
/// the direct etale-orbit route.
#[derive(Debug, Clone)]
pub struct TwistedFamily {
    pub q4: DiagonalForm,
    pub q5: DiagonalForm,
    pub q6: DiagonalForm,
    pub q7: DiagonalForm,
    pub q27_direct: DiagonalForm,
    pub q45_direct: DiagonalForm,
}

/// Everything the verifications share: the lattice, the line graph and its
/// labelling, the reflection group, the canonical cube, the character
/// decompositions of the three equivariant forms, and the cube's orbit
/// structure on lines and triangles.
pub struct VerifyContext {
    pub lattice: E6Lattice,
    pub omega: LineGraph,
    pub model: SchlafliModel,
    pub weyl: WeylGroup,
    pub cube: CanonicalCube,
    pub q6_cform: CForm,
    pub q7_cform: CForm,
    pub q27_cform: CForm,
    pub line_orbits: Vec<CubeOrbit>,
    pub triangle_orbits: Vec<CubeOrbit>,
    pub triangles: GSet,
}

/// 7x7 matrix of a group element acting on the rank-7 lattice in the basis
/// (first basis vector the distinguished degree vector's companion line,
/// then the six simple roots): the first column records how the companion
/// line moves by a root-lattice vector, the rest is the root-coordinate
/// matrix.
fn embed_seven(
    lat: &E6Lattice,
    g: &crate::weyl::GroupElement,
) -> Result<Vec<Vec<Rat>>, TwistError> {
    let omega1 = lat.omega1_line().w;
    let moved = g.apply_weight(&omega1);
    let diff = WeightVector([
        moved.0[0] - omega1.0[0],
        moved.0[1] - omega1.0[1],
        moved.0[2] - omega1.0[2],
        moved.0[3] - omega1.0[3],
        moved.0[4] - omega1.0[4],
        moved.0[5] - omega1.0[5],
    ]);
    let shift = lat
        .cartan()
        .weight_to_root(&diff)
        .ok_or(TwistError::SevenEmbedding)?;
    let mut m = vec![vec![rat(0); 7]; 7];
    m[0][0] = rat(1);
    for i in 0..RANK {
        m[i + 1][0] = rat(i128::from(shift.0[i]));
        for j in 0..RANK {
            m[i + 1][j + 1] = rat(i128::from(g.mat[i][j]));
        }
    }
    Ok(m)
}

impl VerifyContext {
    /// Build the shared context once: lattice, graph, labelling, group,
    /// canonical cube, isotypic decompositions, and cube orbits.
    pub fn build() -> Result<VerifyContext, TwistError> {
        let lattice = E6Lattice::build()?;
        let omega = build_omega(&lattice);
        let model = SchlafliModel::build(&lattice)?;
        let weyl = WeylGroup::generate(&lattice)?;
        let cube = weyl.canonical_cube(&model)?;
        let generators: Vec<&crate::weyl::GroupElement> = cube
            .generators
            .iter()
            .map(|&i| weyl.group.element(i))
            .collect();

        // rank-6 form: half the root-pairing Gram in simple-root coordinates
        let gram6: Vec<Vec<Rat>> = lattice
            .cartan()
            .cartan()
            .iter()
            .map(|row| row.iter().map(|&x| Ratio::new(i128::from(x), 2)).collect())
            .collect();
        let mats6: [Vec<Vec<Rat>>; 4] = std::array::from_fn(|k| {
            generators[k]
                .mat
                .iter()
                .map(|row| row.iter().map(|&x| rat(i128::from(x))).collect())
                .collect()
        });
        let q6_cform = isotypic_decompose(&gram6, &mats6)?;

        // rank-7 form: the unimodular Gram of the full lattice
        let gram7: Vec<Vec<Rat>> = lattice
            .gram()
            .iter()
            .map(|row| row.iter().map(|&x| rat(i128::from(x))).collect())
            .collect();
        let mut mats7: [Vec<Vec<Rat>>; 4] = std::array::from_fn(|_| Vec::new());
        for (k, g) in generators.iter().enumerate() {
            mats7[k] = embed_seven(&lattice, g)?;
        }
        let q7_cform = isotypic_decompose(&gram7, &mats7)?;

        // 27-point permutation form
        let gram27 = crate::exact::mat_identity(27);
        let mats27: [Vec<Vec<Rat>>; 4] = std::array::from_fn(|k| {
            let mut m = vec![vec![rat(0); 27]; 27];
            for (j, &img) in generators[k].perm.iter().enumerate() {
                m[img as usize][j] = rat(1);
            }
            m
        });
        let q27_cform = isotypic_decompose(&gram27, &mats27)?;

        let element_mask: HashMap<usize, u8> = (0u8..16)
            .map(|m| (cube.subset_element(&weyl, m as usize), m))
            .collect();
        let to_cube_orbits = |orbits: Vec<Orbit>| -> Result<Vec<CubeOrbit>, TwistError> {
            orbits
                .into_iter()
                .map(|o| {
                    let stabilizer_masks = o
                        .stabilizer
                        .iter()
                        .map(|e| {
                            element_mask
                                .get(e)
                                .copied()
                                .ok_or(TwistError::StabilizerOutsideCube)
                        })
                        .collect::<Result<Vec<u8>, _>>()?;
                    Ok(CubeOrbit {
                        points: o.points,
                        stabilizer_masks,
                    })
                })
                .collect()
        };

        let line_orbits =
            to_cube_orbits(weyl.orbit_decomposition(&GSet::Lines, &cube.generators)?)?;
        let triangles = GSet::triangles(&omega, &weyl.group)?;
        let triangle_orbits =
            to_cube_orbits(weyl.orbit_decomposition(&triangles, &cube.generators)?)?;

        Ok(VerifyContext {
            lattice,
            omega,
            model,
            weyl,
            cube,
            q6_cform,
            q7_cform,
            q27_cform,
            line_orbits,
            triangle_orbits,
            triangles,
        })
    }

    /// Build all six twisted forms for one twist.
    pub fn twisted_family(&self, t: &TwistSpec) -> TwistedFamily {
        let q4 = DiagonalForm::new(t.classes().to_vec());
        let q5 = q4.orthogonal_sum(&DiagonalForm::new(vec![SquareClass::TWO]));
        TwistedFamily {
            q6: twist_cform(&self.q6_cform, t),
            q7: twist_cform(&self.q7_cform, t),
            q27_direct: etale_trace_form(&self.line_orbits, t),
            q45_direct: etale_trace_form(&self.triangle_orbits, t),
            q4,
            q5,
        }
    }
}

/// The named identities the registry can verify. Names are stable check
/// identifiers; `untwisted` marks the one identity that takes no twist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityName {
    Thm2_44,
    Thm2_45,
    Thm2_46,
    Thm3,
    Cor51,
    Cor52,
    Cor53,
    Thm4_55,
    Eq56,
    Eq57,
    Eq61,
    Eq62,
    Eq63,
    Eq64,
    Eq65,
    Eq66,
    Eq67,
    Eq610,
    Eq611,
    Eq42,
}

impl IdentityName {
    pub const ALL: [IdentityName; 20] = [
        IdentityName::Thm2_44,
        IdentityName::Thm2_45,
        IdentityName::Thm2_46,
        IdentityName::Thm3,
        IdentityName::Cor51,
        IdentityName::Cor52,
        IdentityName::Cor53,
        IdentityName::Thm4_55,
        IdentityName::Eq56,
        IdentityName::Eq57,
        IdentityName::Eq61,
        IdentityName::Eq62,
        IdentityName::Eq63,
        IdentityName::Eq64,
        IdentityName::Eq65,
        IdentityName::Eq66,
        IdentityName::Eq67,
        IdentityName::Eq610,
        IdentityName::Eq611,
        IdentityName::Eq42,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityName::Thm2_44 => "thm2_44",
            IdentityName::Thm2_45 => "thm2_45",
            IdentityName::Thm2_46 => "thm2_46",
            IdentityName::Thm3 => "thm3",
            IdentityName::Cor51 => "cor51",
            IdentityName::Cor52 => "cor52",
            IdentityName::Cor53 => "cor53",
            IdentityName::Thm4_55 => "thm4_55",
            IdentityName::Eq56 => "eq56",
            IdentityName::Eq57 => "eq57",
            IdentityName::Eq61 => "eq61",
            IdentityName::Eq62 => "eq62",
            IdentityName::Eq63 => "eq63",
            IdentityName::Eq64 => "eq64",
            IdentityName::Eq65 => "eq65",
            IdentityName::Eq66 => "eq66",
            IdentityName::Eq67 => "eq67",
            IdentityName::Eq610 => "eq610",
            IdentityName::Eq611 => "eq611",
            IdentityName::Eq42 => "eq42",
        }
    }

    pub fn from_name(name: &str) -> Option<IdentityName> {
        IdentityName::ALL.into_iter().find(|i| i.name() == name)
    }

    /// Whether the identity depends on the twist; the one untwisted entry
    /// is checked once, not per trial.
    pub fn is_twisted(self) -> bool {
        self != IdentityName::Eq42
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a report's verdict was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Isometry,
    Isotropy,
}

/// Outcome of one identity at one twist: both sides, their classifying
/// invariants, any common form added to both sides to clear virtual terms,
/// and the verdict.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub identity: IdentityName,
    pub twist: TwistSpec,
    pub kind: CheckKind,
    pub lhs: DiagonalForm,
    pub rhs: DiagonalForm,
    pub lhs_invariants: WittInvariants,
    pub rhs_invariants: WittInvariants,
    pub common_added: Option<DiagonalForm>,
    pub verdict: bool,
}

fn d(entries: &[i64]) -> DiagonalForm {
    DiagonalForm::from_ints(entries).expect("static nonzero entries")
}

fn sc(value: i64) -> SquareClass {
    SquareClass::new(value).expect("static nonzero class")
}

fn component_matches(cform: &CForm, mask: u8, expected: &DiagonalForm) -> bool {
    cform
        .component(mask)
        .is_some_and(|f| f.is_isometric(expected))
}

/// Character-by-character expectations for the untwisted rank-6 form:
/// trivial character <2,6>, the four single-generator characters <1>.
pub fn q6_components_expected(cform: &CForm) -> bool {
    cform.components.len() == 5
        && component_matches(cform, 0, &d(&[2, 6]))
        && [1u8, 2, 4, 8]
            .iter()
            .all(|&m| component_matches(cform, m, &d(&[1])))
}

/// Character-by-character expectations for the untwisted rank-7 form:
/// trivial character <-1,-1,1>, the four single-generator characters <-2>.
pub fn q7_components_expected(cform: &CForm) -> bool {
    cform.components.len() == 5
        && component_matches(cform, 0, &d(&[-1, -1, 1]))
        && [1u8, 2, 4, 8]
            .iter()
            .all(|&m| component_matches(cform, m, &d(&[-2])))
}

/// Character-by-character expectations for the untwisted 27-point form:
/// trivial character 9<1>, single-generator characters 3<1>, two-generator
/// characters <1>, nothing in higher support.
pub fn q27_components_expected(cform: &CForm) -> bool {
    cform.components.len() == 11
        && component_matches(cform, 0, &DiagonalForm::unit(9))
        && [1u8, 2, 4, 8]
            .iter()
            .all(|&m| component_matches(cform, m, &DiagonalForm::unit(3)))
        && [3u8, 5, 6, 9, 10, 12]
            .iter()
            .all(|&m| component_matches(cform, m, &DiagonalForm::unit(1)))
}

/// Verify one named identity at one twist. Both sides are always built
/// independently: the etale-orbit route never reuses the closed-form
/// expression under test, and the rank-6/7 twists come from the character
/// decompositions of the actual lattice forms.
pub fn verify_identity(
    ctx: &VerifyContext,
    name: IdentityName,
    t: &TwistSpec,
) -> Result<VerificationReport, TwistError> {
    let fam = ctx.twisted_family(t);
    let two = DiagonalForm::new(vec![SquareClass::TWO]);
    let minus_two = d(&[-2]);
    let mut kind = CheckKind::Isometry;
    let mut common_added = None;
    let mut extra_ok = true;

    let (lhs, rhs) = match name {
        IdentityName::Thm2_44 => {
            extra_ok = q6_components_expected(&ctx.q6_cform);
            (fam.q6.clone(), fam.q4.orthogonal_sum(&d(&[2, 6])))
        }
        IdentityName::Thm2_45 => {
            extra_ok = q7_components_expected(&ctx.q7_cform);
            (
                fam.q7.clone(),
                fam.q4.scale(sc(-2)).orthogonal_sum(&d(&[-1, -1, 1])),
            )
        }
        IdentityName::Thm2_46 => {
            extra_ok = q27_components_expected(&ctx.q27_cform);
            (
                fam.q27_direct.clone(),
                fam.q4
                    .lambda(2)?
                    .orthogonal_sum(&DiagonalForm::unit(3).tensor(&fam.q4))
                    .orthogonal_sum(&DiagonalForm::unit(9)),
            )
        }
        IdentityName::Thm3 => {
            kind = CheckKind::Isotropy;
            (fam.q7.clone(), DiagonalForm::default())
        }
        IdentityName::Cor51 | IdentityName::Eq64 => (
            fam.q7.clone(),
            fam.q5
                .scale(sc(-2))
                .orthogonal_sum(&d(&[1, -1])),
        ),
        IdentityName::Cor52 => (fam.q6.clone(), fam.q5.orthogonal_sum(&d(&[6]))),
        IdentityName::Cor53 => (
            fam.q7.clone(),
            fam.q6
                .scale(sc(-2))
                .orthogonal_sum(&d(&[3])),
        ),
        IdentityName::Thm4_55 => (
            fam.q27_direct.clone(),
            fam.q5
                .lambda(2)?
                .orthogonal_sum(&d(&[1, 2]).tensor(&fam.q5))
                .orthogonal_sum(&DiagonalForm::unit(6))
                .orthogonal_sum(&two),
        ),
        IdentityName::Eq56 => (
            fam.q27_direct.clone(),
            fam.q6
                .lambda(2)?
                .orthogonal_sum(&fam.q6.scale(sc(3)))
                .orthogonal_sum(&DiagonalForm::unit(6)),
        ),
        IdentityName::Eq57 => {
            let common = two.tensor(&fam.q7).orthogonal_sum(&minus_two);
            common_added = Some(common.clone());
            (
                fam.q27_direct.orthogonal_sum(&common),
                fam.q7
                    .lambda(2)?
                    .orthogonal_sum(&fam.q7.scale(SquareClass::MINUS_ONE))
                    .orthogonal_sum(&DiagonalForm::unit(7)),
            )
        }
        IdentityName::Eq61 => (
            fam.q7.clone(),
            fam.q4
                .scale(sc(-2))
                .orthogonal_sum(&d(&[-1, -1, 1])),
        ),
        IdentityName::Eq62 => (
            fam.q27_direct.clone(),
            fam.q4
                .lambda(2)?
                .orthogonal_sum(&DiagonalForm::unit(3).tensor(&fam.q4))
                .orthogonal_sum(&DiagonalForm::unit(9)),
        ),
        IdentityName::Eq63 => (
            fam.q27_direct.clone(),
            fam.q4
                .lambda(2)?
                .orthogonal_sum(&d(&[1, 2, 2]).tensor(&fam.q4))
                .orthogonal_sum(&DiagonalForm::unit(9)),
        ),
        IdentityName::Eq65 => (
            fam.q6.clone(),
            fam.q4.orthogonal_sum(&two).orthogonal_sum(&d(&[6])),
        ),
        IdentityName::Eq66 => (
            fam.q5.lambda(2)?,
            fam.q4.lambda(2)?.orthogonal_sum(&two.tensor(&fam.q4)),
        ),
        IdentityName::Eq67 => {
            let common = two.tensor(&fam.q4);
            common_added = Some(common.clone());
            (
                fam.q27_direct.orthogonal_sum(&common),
                fam.q5
                    .lambda(2)?
                    .orthogonal_sum(&d(&[1, 2, 2]).tensor(&fam.q4))
                    .orthogonal_sum(&DiagonalForm::unit(9)),
            )
        }
        IdentityName::Eq610 => (
            fam.q45_direct.clone(),
            DiagonalForm::unit(11)
                .orthogonal_sum(&d(&[1, 1, 2]).tensor(&fam.q4))
                .orthogonal_sum(&d(&[1, 1, 2]).tensor(&fam.q4.lambda(2)?))
                .orthogonal_sum(&two.tensor(&fam.q4.lambda(3)?)),
        ),
        IdentityName::Eq611 => (
            fam.q45_direct.clone(),
            DiagonalForm::unit(9)
                .orthogonal_sum(&two)
                .orthogonal_sum(&fam.q5)
                .orthogonal_sum(&d(&[1, 2]).tensor(&fam.q5.lambda(2)?))
                .orthogonal_sum(&two.tensor(&fam.q5.lambda(3)?)),
        ),
        IdentityName::Eq42 => {
            let gram7: Vec<Vec<Rat>> = ctx
                .lattice
                .gram()
                .iter()
                .map(|row| row.iter().map(|&x| rat(i128::from(x))).collect())
                .collect();
            let gram6: Vec<Vec<Rat>> = ctx
                .lattice
                .cartan()
                .cartan()
                .iter()
                .map(|row| row.iter().map(|&x| Ratio::new(i128::from(x), 2)).collect())
                .collect();
            let q7 = diagonalize_rational(&gram7)?;
            let q6 = diagonalize_rational(&gram6)?;
            (
                q7,
                d(&[3]).orthogonal_sum(&q6.scale(sc(-2))),
            )
        }
    };

    let verdict = extra_ok
        && match kind {
            CheckKind::Isometry => lhs.is_isometric(&rhs),
            CheckKind::Isotropy => lhs.is_isotropic(),
        };
    Ok(VerificationReport {
        identity: name,
        twist: *t,
        kind,
        lhs_invariants: lhs.witt_invariants(),
        rhs_invariants: rhs.witt_invariants(),
        lhs,
        rhs,
        common_added,
        verdict,
    })
}

/// Independent consistency check of the two 27-point constructions:
/// twisting the character decomposition against the etale-orbit route.
pub fn q27_routes_agree(ctx: &VerifyContext, t: &TwistSpec) -> bool {
    twist_cform(&ctx.q27_cform, t).is_isometric(&etale_trace_form(&ctx.line_orbits, t))
}

/// Draw one square class from the 128-element group {+-1} x subsets of
/// {2, 3, 5, 7, 11, 13}.
fn sample_class<R: Rng>(rng: &mut R) -> SquareClass {
    const PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];
    let bits: u32 = rng.gen_range(0..128);
    let mut value: i64 = if bits & 64 != 0 { -1 } else { 1 };
    for (i, &p) in PRIMES.iter().enumerate() {
        if bits >> i & 1 == 1 {
            value *= p;
        }
    }
    SquareClass::new(value).expect("sampled class is nonzero")
}

/// The seeded twist sequence used by the randomized checks: one twist per
/// trial, four classes drawn per twist in order.
pub fn sample_twists(seed: u64, trials: usize) -> Result<Vec<TwistSpec>, TwistError> {
    if trials == 0 {
        return Err(TwistError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials)
        .map(|_| {
            TwistSpec([
                sample_class(&mut rng),
                sample_class(&mut rng),
                sample_class(&mut rng),
                sample_class(&mut rng),
            ])
        })
        .collect())
}

/// Run every twist-dependent identity over seeded random twists; reports
/// come back in trial order, identities in registry order within each
/// trial.
pub fn randomized_suite(
    ctx: &VerifyContext,
    seed: u64,
    trials: usize,
) -> Result<Vec<VerificationReport>, TwistError> {
    let twists = sample_twists(seed, trials)?;
    let mut reports = Vec::with_capacity(trials * 19);
    for t in &twists {
        for name in IdentityName::ALL {
            if name.is_twisted() {
                reports.push(verify_identity(ctx, name, t)?);
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{column_space_basis, mat_identity};
    use std::sync::OnceLock;

    fn ctx() -> &'static VerifyContext {
        static CTX: OnceLock<VerifyContext> = OnceLock::new();
        CTX.get_or_init(|| VerifyContext::build().expect("context builds"))
    }

    fn spec(classes: [i64; 4]) -> TwistSpec {
        TwistSpec::from_ints(classes).unwrap()
    }

    #[test]
    fn untwisted_component_expectations_hold() {
        let c = ctx();
        assert!(q6_components_expected(&c.q6_cform));
        assert!(q7_components_expected(&c.q7_cform));
        assert!(q27_components_expected(&c.q27_cform));
        assert_eq!(c.q6_cform.rank(), 6);
        assert_eq!(c.q7_cform.rank(), 7);
        assert_eq!(c.q27_cform.rank(), 27);
    }

    #[test]
    fn line_orbits_match_lemma_profile() {
        let c = ctx();
        let sizes: Vec<usize> = c.line_orbits.iter().map(CubeOrbit::len).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 4).count(), 6);
        assert_eq!(sizes.iter().sum::<usize>(), 27);
        // each size-4 orbit is stabilized by an order-4 subgroup generated
        // by two of the four generators; all six such subgroups occur
        let mut top_masks: Vec<u8> = c
            .line_orbits
            .iter()
            .filter(|o| o.len() == 4)
            .map(|o| {
                assert_eq!(o.stabilizer_masks.len(), 4);
                let top = *o.stabilizer_masks.iter().max().unwrap();
                assert_eq!(top.count_ones(), 2);
                let lo = top & top.wrapping_neg();
                let hi = top ^ lo;
                let mut sorted = o.stabilizer_masks.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, vec![0, lo, hi, top]);
                top
            })
            .collect();
        top_masks.sort_unstable();
        assert_eq!(top_masks, vec![3, 5, 6, 9, 10, 12]);
    }

    #[test]
    fn triangle_orbits_match_lemma_profile() {
        let c = ctx();
        let mut sizes: Vec<usize> = c.triangle_orbits.iter().map(CubeOrbit::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 2, 2, 2, 2, 2, 8, 8, 8, 8]);
    }

    #[test]
    fn trivial_twist_returns_untwisted_forms() {
        let c = ctx();
        let fam = c.twisted_family(&TwistSpec::TRIVIAL);
        assert_eq!(fam.q4, DiagonalForm::unit(4));
        assert_eq!(fam.q27_direct, DiagonalForm::unit(27));
        assert_eq!(fam.q45_direct.rank(), 45);
        assert!(fam.q6.is_isometric(&d(&[1, 1, 1, 1, 2, 6])));
        assert!(fam.q7.is_isometric(&twist_cform(&c.q7_cform, &TwistSpec::TRIVIAL)));
        assert_eq!(twist_cform(&c.q27_cform, &TwistSpec::TRIVIAL), c.q27_cform.total());
    }

    /// Fixed-space oracle for twisting by a single involution: over the
    /// quadratic extension with class a, the fixed space of the twisted
    /// semilinear action has Gram (restriction to the +1 eigenspace) plus a
    /// times (restriction to the -1 eigenspace).
    fn fixed_space_twist(
        gram: &[Vec<Rat>],
        involution: &[Vec<Rat>],
        a: SquareClass,
    ) -> DiagonalForm {
        let n = gram.len();
        let pair = |u: &[Rat], v: &[Rat]| -> Rat {
            let mut acc = rat(0);
            for i in 0..n {
                for j in 0..n {
                    acc += u[i] * gram[i][j] * v[j];
                }
            }
            acc
        };
        let mut plus = vec![vec![rat(0); n]; n];
        let mut minus = vec![vec![rat(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { rat(1) } else { rat(0) };
                plus[i][j] = id + involution[i][j];
                minus[i][j] = id - involution[i][j];
            }
        }
        let mut out = DiagonalForm::default();
        for (basis, scale) in [
            (column_space_basis(&plus), SquareClass::ONE),
            (column_space_basis(&minus), a),
        ] {
            if basis.is_empty() {
                continue;
            }
            let k = basis.len();
            let mut g = vec![vec![rat(0); k]; k];
            for i in 0..k {
                for j in 0..k {
                    g[i][j] = pair(&basis[i], &basis[j]);
                }
            }
            out = out.orthogonal_sum(&diagonalize_rational(&g).unwrap().scale(scale));
        }
        out
    }

    #[test]
    fn twist_cform_matches_fixed_space_oracle_small() {
        // swap on the pairing c(x1*y2 + x2*y1): eigenvectors (1,1) and
        // (1,-1) give components <2c> and <-2c>; twisting the second by a
        // gives <2c> + <-2ca>, matching the fixed-space computation
        for (c_val, a_val) in [(1i64, 3i64), (2, -1), (5, 7), (3, 3)] {
            let gram = vec![
                vec![rat(0), rat(i128::from(c_val))],
                vec![rat(i128::from(c_val)), rat(0)],
            ];
            let swap = vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]];
            let id2 = mat_identity(2);
            let a = SquareClass::new(a_val).unwrap();
            let cform = isotypic_decompose(
                &gram,
                &[swap.clone(), id2.clone(), id2.clone(), id2.clone()],
            )
            .unwrap();
            let twisted = twist_cform(&cform, &spec([a_val, 1, 1, 1]));
            let oracle = fixed_space_twist(&gram, &swap, a);
            assert!(
                twisted.is_isometric(&oracle),
                "c={c_val} a={a_val}: {twisted} vs {oracle}"
            );
        }
    }

    #[test]
    fn twist_cform_matches_fixed_space_oracle_on_lattice_forms() {
        let c = ctx();
        let gram6: Vec<Vec<Rat>> = c
            .lattice
            .cartan()
            .cartan()
            .iter()
            .map(|row| row.iter().map(|&x| Ratio::new(i128::from(x), 2)).collect())
            .collect();
        for (gen, a_val) in [(0usize, -3i64), (1, 5), (2, -1), (3, 2)] {
            let g = c.weyl.group.element(c.cube.generators[gen]);
            let m: Vec<Vec<Rat>> = g
                .mat
                .iter()
                .map(|row| row.iter().map(|&x| rat(i128::from(x))).collect())
                .collect();
            let mut classes = [1i64; 4];
            classes[gen] = a_val;
            let twisted = twist_cform(&c.q6_cform, &spec(classes));
            let oracle = fixed_space_twist(&gram6, &m, SquareClass::new(a_val).unwrap());
            assert!(
                twisted.is_isometric(&oracle),
                "generator {gen}, class {a_val}"
            );
        }
    }

    #[test]
    fn all_identities_hold_on_sample_twists() {
        let c = ctx();
        let twists = [
            spec([1, 1, 1, 1]),
            spec([-1, 2, 3, 5]),
            spec([2, 2, 6, 3]),
            spec([-7, 1, -7, 13]),
            spec([30, -30, 11, 1]),
        ];
        for t in &twists {
            for name in IdentityName::ALL {
                let report = verify_identity(c, name, t).unwrap();
                assert!(
                    report.verdict,
                    "{name} fails at {t}: {} vs {}",
                    report.lhs, report.rhs
                );
            }
            assert!(q27_routes_agree(c, t), "route mismatch at {t}");
        }
    }

    #[test]
    fn thm4_example_twist_verifies() {
        let c = ctx();
        let report = verify_identity(c, IdentityName::Thm4_55, &spec([-1, 2, 3, 5])).unwrap();
        assert!(report.verdict);
        assert_eq!(report.kind, CheckKind::Isometry);
        assert_eq!(report.lhs.rank(), 27);
        assert_eq!(report.rhs.rank(), 27);
    }

    #[test]
    fn trivial_twist_thm4_sides_are_split() {
        let c = ctx();
        let report = verify_identity(c, IdentityName::Thm4_55, &TwistSpec::TRIVIAL).unwrap();
        assert!(report.verdict);
        assert!(report.lhs.is_isometric(&DiagonalForm::unit(27)));
        assert!(report.rhs.is_isometric(&DiagonalForm::unit(27)));
    }

    #[test]
    fn isotropy_of_twisted_rank_seven_form() {
        let c = ctx();
        for t in [spec([1, 1, 1, 1]), spec([-13, 11, -7, 5]), spec([2, 3, 5, 7])] {
            let report = verify_identity(c, IdentityName::Thm3, &t).unwrap();
            assert_eq!(report.kind, CheckKind::Isotropy);
            assert!(report.verdict);
        }
    }

    #[test]
    fn virtual_identities_record_the_common_form() {
        let c = ctx();
        let t = spec([-1, 2, 3, 5]);
        let eq57 = verify_identity(c, IdentityName::Eq57, &t).unwrap();
        assert!(eq57.common_added.is_some());
        assert_eq!(eq57.lhs.rank(), 35);
        let eq67 = verify_identity(c, IdentityName::Eq67, &t).unwrap();
        assert!(eq67.common_added.is_some());
        assert_eq!(eq67.lhs.rank(), 31);
        let plain = verify_identity(c, IdentityName::Eq62, &t).unwrap();
        assert!(plain.common_added.is_none());
    }

    #[test]
    fn randomized_suite_is_deterministic_and_passes() {
        let c = ctx();
        let first = randomized_suite(c, 0, 2).unwrap();
        let second = randomized_suite(c, 0, 2).unwrap();
        assert_eq!(first.len(), 38);
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a.identity, b.identity);
            assert_eq!(a.twist, b.twist);
            assert_eq!(a.verdict, b.verdict);
            assert_eq!(a.lhs, b.lhs);
        }
        assert!(first.iter().all(|r| r.verdict));
        let other_seed = randomized_suite(c, 1, 1).unwrap();
        assert!(other_seed.iter().any(|r| r.twist != first[0].twist));
    }

    #[test]
    fn zero_trials_is_an_error() {
        let c = ctx();
        assert!(matches!(
            randomized_suite(c, 0, 0),
            Err(TwistError::NoTrials)
        ));
    }

    #[test]
    fn identity_names_round_trip() {
        for name in IdentityName::ALL {
            assert_eq!(IdentityName::from_name(name.name()), Some(name));
        }
        assert_eq!(IdentityName::from_name("nosuch"), None);
        assert!(!IdentityName::Eq42.is_twisted());
        assert_eq!(IdentityName::ALL.iter().filter(|i| i.is_twisted()).count(), 19);
    }
}
