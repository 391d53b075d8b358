pub mod cfa;
pub mod exec;
pub mod history;
pub mod minic;
pub mod testgen;
pub mod compare;
pub mod reduce;
pub mod mutate;
pub mod pipeline;
pub mod cli;
