//! Reference solvers for the full transmission problem: the partial-wave
//! series for one sphere and a boundary integral solver for up to five
//! spheres.

pub mod bem;
pub mod mie;
pub mod special;

pub use bem::{bem_solve, BemSolution, BubbleDensities};
pub use mie::{mie_sphere, MieProblem, PartialWaveSolution};

use crate::fields::{cross_section, FarFieldPattern};
use crate::numerics::{Vec3, C64};

pub const SOURCE_MIE: &str = "oracle:mie";
pub const SOURCE_BEM: &str = "oracle:bem";

#[derive(Debug, Clone)]
pub enum OracleSolution {
    PartialWave(PartialWaveSolution),
    Bem(BemSolution),
}

impl OracleSolution {
    pub fn far_field_values(&self, dirs: &[Vec3]) -> Vec<C64> {
        match self {
            OracleSolution::PartialWave(s) => s.far_field_values(dirs),
            OracleSolution::Bem(s) => s.far_field_values(dirs),
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            OracleSolution::PartialWave(_) => SOURCE_MIE,
            OracleSolution::Bem(_) => SOURCE_BEM,
        }
    }

    fn theta(&self) -> Vec3 {
        match self {
            OracleSolution::PartialWave(s) => s.theta,
            OracleSolution::Bem(s) => s.theta,
        }
    }

    fn bubbles(&self) -> usize {
        match self {
            OracleSolution::PartialWave(_) => 1,
            OracleSolution::Bem(s) => s.densities.len(),
        }
    }
}

/// Far-field pattern of an oracle solution in the same normalization as the
/// point-interaction model.
pub fn oracle_far_field(solution: &OracleSolution, directions: &[Vec3], omega: f64) -> FarFieldPattern {
    FarFieldPattern {
        directions: directions.to_vec(),
        theta: solution.theta(),
        values: solution.far_field_values(directions),
        cross_section: cross_section(|d| solution.far_field_values(d)),
        omega,
        m: solution.bubbles(),
        source: solution.source().into(),
    }
}
