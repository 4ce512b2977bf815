pub mod arith;
pub mod enumerate;
pub mod exactlin;
pub mod fitting;
pub mod invariants;
pub mod oracle;
pub mod pairspec;
