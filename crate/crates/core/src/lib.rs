//! Sampling and exact reconstruction of bandlimited joint time-vertex graph
//! signals.
//!
//! A joint signal lives on the Cartesian product of a time cycle and a vertex
//! graph. When its joint spectrum has `K` non-zero coefficients spread over
//! `K_T` time frequencies and `K_G` graph frequencies, [`critical_sampling_set`]
//! finds `K` samples touching exactly `K_T` time slots and `K_G` vertices from
//! which the whole signal is recovered by [`reconstruct`].

pub mod bandlimit;
pub mod bench;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod reference;
pub mod sampling;
pub mod spectral;

pub use bandlimit::{detect_support, is_sbl, restrict_bases, synth_signal, SpectralSupport};
pub use error::{Error, Result};
pub use graph::{cartesian_laplacian, cycle_graph, laplacian, Graph, Laplacian};
pub use par::Execution;
pub use sampling::{
    critical_sampling_set, max_lin_indep_rows, qualify, reconstruct, sample, separate_sampling,
    QualificationReport, ReducedBases, SamplingPlan,
};
pub use spectral::{eig_sym, gft, igft, ijft, jft, joint_basis_columns, EigenBasis, JointSignal};
