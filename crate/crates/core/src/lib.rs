//! Classical simulation of analog quantum-walk algorithms on reversible
//! Markov chains: interpolated chains and discriminants, hitting and mixing
//! times, the edge-walk Hamiltonian, von Neumann pointer post-selection,
//! spatial search, coherent stationary-state preparation, time-averaged
//! quantum mixing and Erdos-Renyi spectral statistics.

pub mod algorithms;
pub mod classical;
pub mod error;
pub mod generators;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod pointer;
pub mod policy;
pub mod qlsamp;
pub mod random_graphs;
pub mod rng;

pub use algorithms::{
    cost_total, qssamp_prepare, spatial_search, CostModel, PointerSizing, QSSampOutcome,
    SearchOptions, SearchOutcome,
};
pub use classical::{
    classical_mixing_time, extended_hitting_time, hitting_time_montecarlo, hitting_time_spectral,
    ClassicalMixingReport, ExtendedHittingTimeReport, HitMethod, HittingTimeReport,
};
pub use error::{Error, Result, ValidationReport};
pub use hamiltonian::{build_effective, build_full, EdgeWalkHamiltonian, FullHamiltonian};
pub use linalg::SpectralDecomposition;
pub use markov::{
    check_ergodic_reversible, discriminant, interpolate, make_lazy, stationary_of_interpolated,
    u_m_split, ChainReport, Discriminant, InterpolatedChain, MarkedSet, StationaryDistribution,
    StochasticMatrix, UmSplit,
};
pub use pointer::{
    evolve_block, pointer_zero_amplitude, run_blocks_postselect, CompositeState, PointerConfig,
    PostSelected,
};
pub use policy::{policy, set_policy, NumericPolicy};
pub use qlsamp::{
    edge_walk_gap_map, gap_statistics, limiting_distribution, mixing_time_bound, mixing_trace,
    time_averaged_distribution, GapMap, GapStatistics, LimitingDistribution, MixingTrace,
    TimeAveragedDistribution,
};
pub use random_graphs::{
    classical_locations, mixing_exponent_experiment, rmt_report, sample_gnp,
    sigma_scaling_experiment, GnpSample, MixingExponentResult, RmtReport, SemicircleModel,
    SigmaRow,
};
