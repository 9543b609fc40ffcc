//! Neon to RISC-V Vector intrinsic translation driven by LLM agents.
//!
//! The crate is organized as a pipeline:
//!
//! * [`corpus`] loads translation cases from disk.
//! * [`rvv_front`] parses RVV intrinsic C into a statement IR and CFG.
//! * [`liveness`] solves backward liveness and computes LMUL-weighted
//!   vector register pressure.
//! * [`agents`] builds prompts and talks to an LLM (remote or replayed).
//! * [`executors`] compiles and runs candidates through external tools.
//! * [`orchestrator`] drives each case through the translate/optimize state machine.
//! * [`metrics`] aggregates outcomes into pass rate, efficiency score and speedups.
//! * [`cli`] wires configuration, corpus, orchestrator and reports together.

pub mod rvv_front;
pub mod corpus;
pub mod liveness;
pub mod rational;
pub mod agents;
pub mod executors;
pub mod orchestrator;
pub mod metrics;
pub mod cli;
