pub mod num;
pub mod poly;
pub mod trop;
pub mod lp;
pub mod complex;
pub mod pwa;
pub mod synth;
pub mod bary;
pub mod cli;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod plot;

/// Size limits applied to constructions whose output can grow exponentially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_dim: usize,
    pub max_cells: usize,
    pub max_hyperplanes: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { max_dim: 8, max_cells: 10_000, max_hyperplanes: 64 }
    }
}
