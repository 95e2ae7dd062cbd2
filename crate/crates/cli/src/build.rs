//! JSON specifications of algebras, states, cocycles, charges, graded
//! systems, groups, fusion rings and doubles, and their construction.

use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use modindex::category::{self, FusionRing, Group, RepObject};
use modindex::charge::{Charge, CovariantCharge};
use modindex::cocycle::{connes_cocycle, connes_cocycle_physical, UnitaryCocycle};
use modindex::double::DoubleSpec;
use modindex::linalg::{self, CMat};
use modindex::qsys::{gibbs_state, Dynamics, Element, MatrixAlgebra, State};
use modindex::susy::GradedSystem;
use modindex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::run::Ctx;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Re(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(&self) -> Complex64 {
        match *self {
            Scalar::Re(x) => Complex64::new(x, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<Scalar>>),
    Named(NamedMatrix),
    Tagged(TaggedMatrix),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMatrix {
    SigmaX,
    SigmaY,
    SigmaZ,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TaggedMatrix {
    Diag(Vec<f64>),
    Identity(usize),
    Zeros([usize; 2]),
    RandomHermitian(usize),
    RandomRealSymmetric(usize),
    RandomUnitary(usize),
    RandomOrthogonal(usize),
    RandomComplex([usize; 2]),
    Scaled { matrix: Box<MatrixSpec>, factor: Scalar },
}

impl MatrixSpec {
    pub fn build(&self, ctx: &mut Ctx) -> Result<CMat> {
        Ok(match self {
            MatrixSpec::Rows(rows) => {
                let r = rows.len();
                let cols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|row| row.len() != cols) {
                    bail!("ragged matrix rows");
                }
                CMat::from_fn(r, cols, |i, j| rows[i][j].value())
            }
            MatrixSpec::Named(NamedMatrix::SigmaX) => linalg::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            MatrixSpec::Named(NamedMatrix::SigmaY) => {
                CMat::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)])
            }
            MatrixSpec::Named(NamedMatrix::SigmaZ) => linalg::diag_real(&[1.0, -1.0]),
            MatrixSpec::Tagged(t) => match t {
                TaggedMatrix::Diag(d) => linalg::diag_real(d),
                TaggedMatrix::Identity(n) => linalg::eye(*n),
                TaggedMatrix::Zeros([r, c]) => CMat::zeros(*r, *c),
                TaggedMatrix::RandomHermitian(n) => linalg::random_hermitian(&mut ctx.rng, *n),
                TaggedMatrix::RandomRealSymmetric(n) => linalg::random_real_symmetric(&mut ctx.rng, *n),
                TaggedMatrix::RandomUnitary(n) => linalg::random_unitary(&mut ctx.rng, *n),
                TaggedMatrix::RandomOrthogonal(n) => linalg::random_orthogonal(&mut ctx.rng, *n),
                TaggedMatrix::RandomComplex([r, c]) => linalg::random_complex(&mut ctx.rng, *r, *c),
                TaggedMatrix::Scaled { matrix, factor } => matrix.build(ctx)? * factor.value(),
            },
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Full(usize),
    Blocks { blocks: Vec<usize> },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<MatrixAlgebra> {
        Ok(match self {
            AlgebraSpec::Full(n) => MatrixAlgebra::new(vec![*n])?,
            AlgebraSpec::Blocks { blocks } => MatrixAlgebra::new(blocks.clone())?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Matrix(MatrixSpec),
    Blocks { blocks: Vec<MatrixSpec> },
    Tagged(TaggedElement),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TaggedElement {
    Random(AlgebraSpec),
    RandomHermitian(AlgebraSpec),
    RandomUnitary(AlgebraSpec),
    Seeded { seed: u64, element: Box<ElementSpec> },
}

impl ElementSpec {
    pub fn build(&self, ctx: &mut Ctx) -> Result<Element> {
        Ok(match self {
            ElementSpec::Matrix(m) => Element::from_matrix(m.build(ctx)?),
            ElementSpec::Blocks { blocks } => {
                let mats = blocks.iter().map(|b| b.build(ctx)).collect::<Result<Vec<_>>>()?;
                let alg = MatrixAlgebra::new(mats.iter().map(|m| m.nrows()).collect())?;
                Element::new(&alg, mats)?
            }
            ElementSpec::Tagged(TaggedElement::Random(a)) => Element::random(&mut ctx.rng, &a.build()?),
            ElementSpec::Tagged(TaggedElement::RandomHermitian(a)) => Element::random_hermitian(&mut ctx.rng, &a.build()?),
            ElementSpec::Tagged(TaggedElement::RandomUnitary(a)) => Element::random_unitary(&mut ctx.rng, &a.build()?),
            ElementSpec::Tagged(TaggedElement::Seeded { seed, element }) => ctx.with_seed(*seed, |c| element.build(c))?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Gibbs { h: ElementSpec, beta: f64 },
    Density(ElementSpec),
    RandomFaithful(AlgebraSpec),
    Scaled { state: Box<StateSpec>, factor: f64 },
    Seeded { seed: u64, state: Box<StateSpec> },
}

impl StateSpec {
    pub fn build(&self, ctx: &mut Ctx) -> Result<State> {
        Ok(match self {
            StateSpec::Gibbs { h, beta } => gibbs_state(&h.build(ctx)?, *beta)?,
            StateSpec::Density(e) => {
                let el = e.build(ctx)?;
                State::new(el.algebra(), el.blocks().to_vec())?
            }
            StateSpec::RandomFaithful(a) => State::random_faithful(&mut ctx.rng, &a.build()?),
            StateSpec::Scaled { state, factor } => state.build(ctx)?.scaled(*factor),
            StateSpec::Seeded { seed, state } => ctx.with_seed(*seed, |c| state.build(c))?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub h: ElementSpec,
    pub beta: f64,
}

impl DynamicsSpec {
    pub fn build(&self, ctx: &mut Ctx) -> Result<Dynamics> {
        Ok(Dynamics::new(self.h.build(ctx)?, self.beta)?)
    }
}

/// The dynamics and reference state of a check. With only a state, the
/// dynamics is its modular group at `β = 1`; with only a dynamics, the state
/// is its Gibbs state.
pub fn thermal(ctx: &mut Ctx, dynamics: &Option<DynamicsSpec>, state: &Option<StateSpec>) -> Result<(Dynamics, State)> {
    match (dynamics, state) {
        (Some(d), s) => {
            let dy = d.build(ctx)?;
            let phi = match s {
                Some(s) => s.build(ctx)?,
                None => dy.gibbs(),
            };
            if phi.algebra() != dy.algebra() {
                bail!("state and dynamics live on different algebras");
            }
            Ok((dy, phi))
        }
        (None, Some(s)) => {
            let phi = s.build(ctx)?;
            phi.require_faithful("modular dynamics")?;
            let h = phi.density_element().map_blocks(|_, d| linalg::Spectral::new(d).log() * Complex64::new(-1.0, 0.0));
            Ok((Dynamics::new(h, 1.0)?, phi))
        }
        (None, None) => bail!("either `dynamics` or `state` is required"),
    }
}

/// A cocycle for the dynamics of a check, relative to its reference state.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CocycleSpec {
    /// `(Dψ:Dφ)` in the modular time of φ.
    Connes { psi: StateSpec },
    /// `(Dψ:Dφ)` in the physical time of the dynamics.
    ConnesPhysical { psi: StateSpec },
    Phase { c: f64 },
    Identity,
    Conjugation { v: ElementSpec },
    Perturbation { h1: ElementSpec },
    /// `e^{itA} e^{itB}`, a cocycle only in special cases.
    Exponentials { a: ElementSpec, b: ElementSpec },
    Covariance { charge: ChargeSpec },
    Dual { charge: ChargeSpec },
    WithPhase { cocycle: Box<CocycleSpec>, delta: f64 },
    Composite(Vec<CocycleSpec>),
}

impl CocycleSpec {
    pub fn build(&self, ctx: &mut Ctx, dy: &Dynamics, phi: &State) -> Result<UnitaryCocycle> {
        Ok(match self {
            CocycleSpec::Connes { psi } => connes_cocycle(&psi.build(ctx)?, phi)?,
            CocycleSpec::ConnesPhysical { psi } => connes_cocycle_physical(&psi.build(ctx)?, phi, dy)?,
            CocycleSpec::Phase { c } => UnitaryCocycle::phase(dy, *c),
            CocycleSpec::Identity => UnitaryCocycle::identity(dy),
            CocycleSpec::Conjugation { v } => UnitaryCocycle::conjugation(dy, &v.build(ctx)?)?,
            CocycleSpec::Perturbation { h1 } => UnitaryCocycle::perturbation(dy, &h1.build(ctx)?)?,
            CocycleSpec::Exponentials { a, b } => UnitaryCocycle::exp_product(dy, &a.build(ctx)?, &b.build(ctx)?)?,
            CocycleSpec::Covariance { charge } => charge.build(ctx, dy.algebra(), phi)?.cocycle(phi, dy)?,
            CocycleSpec::Dual { charge } => charge.build(ctx, dy.algebra(), phi)?.dual_cocycle(phi, dy)?,
            CocycleSpec::WithPhase { cocycle, delta } => cocycle.build(ctx, dy, phi)?.with_phase(*delta)?,
            CocycleSpec::Composite(parts) => {
                UnitaryCocycle::composite(parts.iter().map(|p| p.build(ctx, dy, phi)).collect::<Result<Vec<_>>>()?)?
            }
        })
    }
}

/// A covariant charge; `multiplicity` needs the reference state to build
/// its surrogate.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChargeSpec {
    Abelian { v: ElementSpec, #[serde(default)] c: f64 },
    Identity { #[serde(default)] c: f64 },
    Multiplicity { d: usize, #[serde(default)] c: f64 },
}

impl ChargeSpec {
    pub fn build(&self, ctx: &mut Ctx, algebra: &MatrixAlgebra, phi: &State) -> Result<CovariantCharge> {
        Ok(match self {
            ChargeSpec::Abelian { v, c } => {
                let v = v.build(ctx)?;
                if v.algebra() != algebra {
                    bail!("charge unitary lives on another algebra");
                }
                CovariantCharge::new(Charge::abelian(&v)?, *c)
            }
            ChargeSpec::Identity { c } => CovariantCharge::new(Charge::identity(algebra), *c),
            ChargeSpec::Multiplicity { d, c } => CovariantCharge::exact_multiplicity(algebra, *d, phi, *c)?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GradedSpec {
    Explicit { gamma: Vec<i8>, q: MatrixSpec },
    /// `Q_+ : H_+ → H_−`.
    Block(MatrixSpec),
    Random { p: usize, q: usize, #[serde(default = "one")] scale: f64 },
    /// Random sector sizes `p, q ≥ 1` with `p + q ≤ max_dim`.
    RandomDims { max_dim: usize, #[serde(default = "one")] scale: f64 },
    Seeded { seed: u64, system: Box<GradedSpec> },
}

fn one() -> f64 {
    1.0
}

impl GradedSpec {
    pub fn build(&self, ctx: &mut Ctx) -> Result<GradedSystem> {
        Ok(match self {
            GradedSpec::Explicit { gamma, q } => GradedSystem::new(gamma.clone(), q.build(ctx)?)?,
            GradedSpec::Block(m) => GradedSystem::from_block(&m.build(ctx)?),
            GradedSpec::Random { p, q, scale } => GradedSystem::random(&mut ctx.rng, *p, *q).scaled(*scale),
            GradedSpec::RandomDims { max_dim, scale } => {
                if *max_dim < 2 {
                    bail!("`max_dim` must be at least 2");
                }
                let p = ctx.rng.random_range(1..*max_dim);
                let q = ctx.rng.random_range(1..=max_dim - p);
                GradedSystem::random(&mut ctx.rng, p, q).scaled(*scale)
            }
            GradedSpec::Seeded { seed, system } => ctx.with_seed(*seed, |c| system.build(c))?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    /// `Z<n>`, `S<n>`, `D<n>` (order 2n) or `Q8`.
    Named(String),
    Table { table: Vec<Vec<usize>> },
    Permutations { permutations: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<Group> {
        match self {
            GroupSpec::Named(s) => named_group(s),
            GroupSpec::Table { table } => Ok(Group::new(table.clone())?),
            GroupSpec::Permutations { permutations } => Ok(Group::from_permutations(permutations)?),
        }
    }
}

fn named_group(s: &str) -> Result<Group> {
    if s == "Q8" {
        return Ok(Group::quaternion());
    }
    let (head, tail) = s.split_at(1.min(s.len()));
    let n: usize = tail.parse().map_err(|_| anyhow!("unknown group {s:?}"))?;
    match head {
        "Z" if n >= 1 => Ok(Group::cyclic(n)),
        "S" if (1..=5).contains(&n) => Ok(Group::symmetric(n)),
        "D" if n >= 2 => Ok(Group::dihedral(n)),
        _ => bail!("unknown group {s:?}"),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RingSpec {
    /// `fibonacci`, `ising`, `trivial` or `pointed:<n>`.
    Named(String),
    Rep { rep_of: GroupSpec },
    Table { labels: Vec<String>, dual: Vec<usize>, entries: Vec<(usize, usize, usize, u32)> },
}

impl RingSpec {
    pub fn build(&self) -> Result<FusionRing> {
        Ok(match self {
            RingSpec::Named(s) => match s.as_str() {
                "fibonacci" => FusionRing::fibonacci(),
                "ising" => FusionRing::ising(),
                "trivial" => FusionRing::trivial(),
                other => {
                    let n = other.strip_prefix("pointed:").and_then(|x| x.parse().ok()).ok_or_else(|| anyhow!("unknown fusion ring {other:?}"))?;
                    FusionRing::pointed(n)
                }
            },
            RingSpec::Rep { rep_of } => category::rep_fusion_ring(&rep_of.build()?)?,
            RingSpec::Table { labels, dual, entries } => FusionRing::from_entries(labels.clone(), dual.clone(), entries)?,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum LabelSpec {
    Index(usize),
    Name(String),
}

impl LabelSpec {
    pub fn resolve(&self, ring: &FusionRing) -> Result<usize> {
        match self {
            LabelSpec::Index(i) if *i < ring.rank() => Ok(*i),
            LabelSpec::Index(i) => bail!("label {i} outside a ring of rank {}", ring.rank()),
            LabelSpec::Name(s) => ring.label_index(s).ok_or_else(|| anyhow!("no label {s:?} in the ring")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RepSpec {
    /// `s3_standard` or `quaternion`.
    Named(String),
    Tagged(TaggedRep),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TaggedRep {
    CyclicCharacter([usize; 2]),
    Trivial(GroupSpec),
    DirectSum(Vec<RepSpec>),
    Tensor(Vec<RepSpec>),
    Conjugate(Box<RepSpec>),
}

impl RepSpec {
    pub fn build(&self) -> Result<RepObject> {
        match self {
            RepSpec::Named(s) => match s.as_str() {
                "s3_standard" => Ok(category::s3_standard_rep()),
                "quaternion" => Ok(category::quaternion_rep()),
                other => bail!("unknown representation {other:?}"),
            },
            RepSpec::Tagged(TaggedRep::CyclicCharacter([n, k])) => Ok(category::cyclic_character_rep(*n, *k)),
            RepSpec::Tagged(TaggedRep::Trivial(g)) => Ok(RepObject::trivial(Arc::new(g.build()?))),
            RepSpec::Tagged(TaggedRep::DirectSum(parts)) | RepSpec::Tagged(TaggedRep::Tensor(parts)) => {
                let tensor = matches!(self, RepSpec::Tagged(TaggedRep::Tensor(_)));
                let mut it = parts.iter();
                let mut acc = it.next().ok_or_else(|| anyhow!("empty list of representations"))?.build()?;
                for p in it {
                    let next = p.build()?;
                    let same = Arc::ptr_eq(acc.group(), next.group()) || acc.group().table() == next.group().table();
                    if !same {
                        bail!("representations of different groups");
                    }
                    // share the group handle so the library sees one group
                    let next = RepObject::new(acc.group().clone(), next.matrices().to_vec())?;
                    acc = if tensor { acc.tensor(&next) } else { acc.direct_sum(&next) };
                }
                Ok(acc)
            }
            RepSpec::Tagged(TaggedRep::Conjugate(r)) => Ok(r.build()?.conjugate()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleDecl {
    #[serde(default)]
    pub pointed: Option<usize>,
    #[serde(default)]
    pub trivial: Option<usize>,
    /// Multiplies one structure constant `C^k_{ij}` by a scalar.
    #[serde(default)]
    pub scale_constant: Option<ScaleConstant>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub factor: Scalar,
}

impl DoubleDecl {
    pub fn build(&self) -> Result<DoubleSpec> {
        let base = match (self.pointed, self.trivial) {
            (Some(n), None) => DoubleSpec::pointed(n)?,
            (None, Some(n)) => DoubleSpec::trivial(n)?,
            _ => bail!("a double is either `pointed` or `trivial`"),
        };
        Ok(match &self.scale_constant {
            Some(s) => base.with_scaled_constant(s.i, s.j, s.k, s.factor.value())?,
            None => base,
        })
    }
}

pub fn seeded_rng(base: u64, local: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(base, local))
}

/// SplitMix64 finalizer over the pair.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
