//! Registry of check operations. Each operation has typed parameters that
//! are validated before anything runs.

use serde_json::Value;

use crate::run::Ctx;

mod category;
mod charge;
mod cocycle;
mod double;
mod qsys;
mod susy;

pub struct OpDef {
    pub name: &'static str,
    pub module: &'static str,
    pub about: &'static str,
    pub validate: fn(&Value) -> Result<(), String>,
    pub run: fn(&Value, &mut Ctx) -> anyhow::Result<()>,
}

macro_rules! registry {
    ($($module:ident :: $name:ident ($params:ty) $about:literal;)*) => {
        pub static OPS: &[OpDef] = &[$(
            OpDef {
                name: stringify!($name),
                module: stringify!($module),
                about: $about,
                validate: |v| serde_json::from_value::<$params>(v.clone()).map(|_| ()).map_err(|e| e.to_string()),
                run: |v, ctx| {
                    let p: $params = serde_json::from_value(v.clone())?;
                    $module::$name(p, ctx)
                },
            },
        )*];
    };
}

registry! {
    qsys::gibbs_state(qsys::GibbsParams) "Gibbs state: normalization, faithfulness and the KMS condition";
    qsys::kms_check(qsys::KmsParams) "KMS boundary residual, or a witness that it fails";
    qsys::gns(qsys::GnsParams) "GNS space: cyclicity, modular group, GNS Hamiltonian spectrum";
    qsys::relative_entropy(qsys::EntropyParams) "relative entropy: value, positivity, Pinsker bound, unitary invariance";
    qsys::quasi_equivalent(qsys::QuasiParams) "quasi-equivalence of representation descriptors";
    cocycle::connes_cocycle(cocycle::ConnesParams) "Connes cocycle: cocycle identity, unitarity, chain rule";
    cocycle::eval_complex(cocycle::EvalParams) "normalized expectation of a cocycle at a complex time";
    cocycle::holomorphic_dimension(cocycle::HolParams) "holomorphic dimension and its phase law";
    cocycle::cocycle_identity_residual(cocycle::IdentityParams) "u(t+s) = u(t) α_t(u(s)), or a witness that it fails";
    charge::covariance_cocycle(charge::CovParams) "covariance of the charge cocycle and the two-variable law";
    charge::frobenius_dual_cocycle(charge::DualParams) "dual cocycle: covariance for the conjugate, gauge and phase laws";
    charge::geometric_dimension(charge::GeoParams) "geometric dimension and its phase and gauge invariance";
    charge::chemical_potential(charge::MuParams) "chemical potential and its conjugation asymmetry";
    charge::free_energy(charge::FreeParams) "free energy by the GNS, cocycle and entropy routes";
    charge::conditional_entropy(charge::CondParams) "conditional entropy and its free-energy identity";
    charge::black_hole_identity(charge::HorizonParams) "relative free energy at the Hawking temperature";
    category::pf_dimension(category::PfParams) "Perron-Frobenius dimension and the dimension character";
    category::amenability_check(category::AmenParams) "PF dimension against the fusion-matrix norm";
    category::rep_fusion_ring(category::RepRingParams) "fusion ring of a finite group's representations";
    category::solve_conjugate(category::ConjParams) "standard solution of the conjugate equations";
    category::intrinsic_dimension(category::IntrinsicParams) "intrinsic dimension: gauge invariance and additivity";
    category::frobenius_map(category::FrobParams) "conjugation of intertwiners: anti-linearity and gauge independence";
    category::canonical_endo_check(category::EndoParams) "canonical endomorphism relations and its expectation";
    double::star_product(double::DoubleParams) "double multiplication: unit, associativity, matrix model";
    double::star_involution(double::DoubleParams) "double involution: involutive and anti-multiplicative";
    double::expectation(double::DoubleParams) "expectation onto the coefficient algebra";
    double::relations_check(double::RelParams) "generator relations of the double";
    double::group_double_dimensions(double::GroupDoubleParams) "irreducible dimensions of a group double";
    susy::witten_index(susy::WittenParams) "supertrace index: integrality, temperature independence, rank formula";
    susy::relative_index(susy::RelIndexParams) "continued relative index against the supertrace ratio";
    susy::graded_kms_reduce(susy::ReduceParams) "graded functional as a Gibbs state times the grading";
    susy::perturbation_cocycle(susy::PertParams) "perturbation cocycle: ODE and continuation to the perturbed index";
    susy::deformation_invariance(susy::DeformParams) "index under odd deformations, or an even witness";
    susy::jlo_eval(susy::JloParams) "JLO cocycle: trivial values, closedness, exact versus quadrature";
    susy::jlo_charged(susy::JloChargedParams) "charged JLO form against the factorized form";
    susy::coboundary(susy::CoboundaryParams) "b and B on explicit cochains, and the square of b+B";
    susy::sector_supercharge(susy::SectorParams) "sector supercharge index and square";
    susy::tensor_supercharge(susy::TensorParams) "tensor supercharge: oddness, square and index product";
}

/// Whether an identity is expected to hold or to fail on the given input.
#[derive(Clone, Copy, Debug, Default, serde::Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    #[default]
    Holds,
    Fails,
}

fn one() -> usize {
    1
}

fn ten() -> usize {
    10
}

pub fn find(name: &str) -> Option<&'static OpDef> {
    OPS.iter().find(|o| o.name == name)
}
