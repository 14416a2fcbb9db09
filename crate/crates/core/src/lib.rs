//! Quadratic equations over free groups.

pub mod freewords;
pub mod symbols;
pub mod quadratic;
pub mod hypreduce;
pub mod npreduce;
pub mod makanin;
pub mod oracle;
pub mod corpus;
pub mod intlin;
pub mod standard;
pub mod surfaces;
