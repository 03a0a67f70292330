//! Error and obstruction types shared across the crate.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("morphism is not admissible: {0}")]
    NotAdmissible(Obstruction),
    #[error("map is not an admissible epimorphism")]
    NotEpi,
    #[error("complex is not acyclic: {0}")]
    NotAcyclic(AcyclicityObstruction),
    #[error("complex is not exact outside the window at degree {degree}")]
    NotExactOutsideWindow { degree: i64 },
    #[error("membership violation: {0}")]
    MembershipViolation(String),
    #[error("gluing matrix at node {node} is not invertible")]
    NonInvertibleGluing { node: usize },
    #[error("rank mismatch: gluing is {given}x{given} but the pulled-back bundle has rank {expected}")]
    RankMismatch { given: usize, expected: usize },
    #[error("complex is not acyclic for the split structure")]
    NotSplitAcyclic,
    #[error("endomorphism is not homotopy idempotent")]
    NotHomotopyIdempotent,
    #[error("{0}")]
    Invalid(String),
}

/// Why a morphism failed to be an admissible mono/epi or to factor.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Obstruction {
    #[error("not injective (kernel has rank {kernel_rank})")]
    NotInjective { kernel_rank: usize },
    #[error("not surjective")]
    NotSurjective,
    #[error("injective but the cokernel has torsion of length {length}")]
    TorsionCokernel { length: i64 },
    #[error("the image is not a subbundle: torsion defect of length {length}")]
    ImageNotSubbundle { length: i64 },
    #[error("no retraction exists in the split structure")]
    NoRetraction,
    #[error("no section exists in the split structure")]
    NoSection,
    #[error("neither injective nor surjective (rank {rank} of {src_rank}->{dst_rank})")]
    NeitherMonoNorEpi { rank: usize, src_rank: usize, dst_rank: usize },
}

/// First failure found while certifying acyclicity.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AcyclicityObstruction {
    #[error("differential at degree {degree} admits no admissible factorization: {reason}")]
    NotAdmissibleAt { degree: i64, reason: Obstruction },
    #[error("complex fails exactness at degree {degree}")]
    NotExactAt { degree: i64 },
}
