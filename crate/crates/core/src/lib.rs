//! Dense rewards for reinforcement learning from a generated sequence of
//! expert key frames.
//!
//! Each step the current multi-view observation is compared with a reference
//! sequence of `H` frames:
//!
//! * the **distance** term is the best weighted cosine similarity against the
//!   frames reached so far,
//! * the **progress** term is `α · h*` (the index of that best frame) plus a
//!   terminal bonus, either "similar to the last frame" or the environment's
//!   own sparse success signal,
//! * the **exploration** term is a normalized random-network-distillation
//!   bonus.
//!
//! A reached-frame counter advances one frame at a time when the observation
//! matches the next unreached frame, so the agent cannot skip ahead.
//!
//! Around the reward engine the crate ships toy planar manipulation tasks
//! with three feature "views", an oracle sequence provider built on scripted
//! experts (plus a binary file format for externally generated sequences),
//! corruption protocols for robustness studies, a tabular Q-learner, and an
//! experiment harness. See `examples/` for one runnable program per piece.

pub mod agent;
pub mod baseline;
pub mod env;
pub mod error;
pub mod harness;
pub mod latent;
pub mod reward;
pub mod rnd;
pub mod sequence;

pub use error::{Error, Result};
