//! Symmetry-reduced moment/SOS relaxations for polynomial optimization.
//!
//! The crate is organized as a pipeline:
//!
//! * [`polyring`] — exact rational polynomial arithmetic with group actions
//!   (symmetric and cyclic), the Reynolds symmetrization operator, orbit-basis
//!   conversions and power-sum rewriting.
//! * [`symcomb`] — partitions, Young tableaux, Kostka numbers and (generalized)
//!   Specht polynomials: the combinatorics behind the block decomposition.
//! * [`symadapt`] — symmetry-adapted moment and localizing blocks; builds the
//!   block-diagonal relaxation that replaces one large moment matrix.
//! * [`sdpcore`] — a dense primal-dual interior-point SDP solver, SOS
//!   feasibility with rational Gram certificates, and SDPA sparse-format I/O.
//! * [`degredux`] — the degree principle: symmetric problems restricted to few
//!   distinct coordinate values, degree-4 nonnegativity certification, and the
//!   closed-form analysis of symmetric quadratics.
//! * [`orbitpmi`] — power-sum (orbit-space) relaxations: Newton identities,
//!   Hankel positivity, lower/upper bounds for power-sum problems and point
//!   recovery from optimal moment vectors.

pub mod degredux;
pub mod orbitpmi;
pub mod polyring;
pub mod sdpcore;
pub mod symadapt;
pub mod symcomb;

pub use degredux::RPartition;
pub use orbitpmi::{NewtonState, PowerSumProblem};
pub use polyring::{Group, Monomial, Perm, Polynomial, Rational};
pub use sdpcore::{SdpProblem, SdpSolution};
pub use symadapt::{BlockRelaxation, BlockStructure, LinearMomentForm, MomentIndex};
pub use symcomb::Partition;
