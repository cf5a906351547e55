//! Exact evaluation of graph homomorphism partition functions `Z_A(G)` for
//! symmetric matrices whose entries are rationals times roots of unity, and a
//! decision procedure that classifies each matrix as polynomial-time tractable
//! (with a certificate driving a fast evaluator) or #P-hard.

pub mod arith;
pub mod corpus;
pub mod cyclotomic;
pub mod dichotomy;
pub mod fasteval;
pub mod formats;
pub mod gausssum;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod oracle;
