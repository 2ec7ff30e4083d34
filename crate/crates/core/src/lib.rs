// SPDX-License-Identifier: Apache-2.0

//! Quantum tori and twisted group algebras over free abelian groups: exact
//! lattice tools, commutator pairings, and the dimension of the algebra.

pub mod harness;
pub mod instance;
mod json;
pub mod lattice;
pub mod pairing;
pub mod solver;
pub mod twisted;
pub mod value_group;
