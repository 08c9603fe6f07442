//! Samplers for every random object: scalar Gamma/Beta/stable variates,
//! Dirichlet, Gamma and Beta-Gamma processes, urn schemes and the
//! auxiliary draws of the mixture representation.

mod auxiliary;
mod process;
mod scalar;
mod urn;

pub use auxiliary::{
    default_n, sample_constraint_sides, sample_remark25_u, sample_rhs_eq18, sample_stable_form_unpowered,
    AuxiliaryDraws, MixtureSampler,
};
pub use process::{
    sample_base, sample_beta_gamma, sample_dirichlet_sb, sample_gamma_process, stick_count, BetaGammaSampler,
    DirichletSampler,
};
pub use scalar::{sample_beta, sample_gamma, sample_positive_stable};
pub use urn::{
    enumerate_partitions, ewens_log_prob, sample_blackwell_macqueen, sample_crp, Partitions, MAX_ENUMERATION,
};

pub(crate) use scalar::{beta, gamma};
pub(crate) use urn::{ewens_log_prob_sizes, urn_values};
