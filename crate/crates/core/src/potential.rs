use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};

/// Time-independent potential V(q).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Free,
    Constant { value: f64 },
    /// V = k (q − c)² / 2.
    Harmonic { stiffness: f64, center: f64 },
    /// V = −s / √((q − c)² + ε²) where s = Z e².
    SoftCoulomb { strength: f64, softening: f64, center: f64 },
    /// Nodal values on `grid`; linear in between, clamped to the end nodes outside.
    Tabulated { grid: Grid1D, values: Vec<f64> },
    /// V(q1) + V(q2) plus an optional interaction table on the product grid.
    TwoParticle {
        one_body: Box<PotentialSpec>,
        #[serde(default)]
        interaction: Option<Vec<f64>>,
    },
}

impl PotentialSpec {
    pub fn harmonic(omega: f64, mass: f64, center: f64) -> Self {
        PotentialSpec::Harmonic { stiffness: mass * omega * omega, center }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("potential: {what}")));
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Constant { value } if !value.is_finite() => bad("constant value must be finite"),
            PotentialSpec::Harmonic { stiffness, center } if !(stiffness.is_finite() && center.is_finite()) => {
                bad("harmonic parameters must be finite")
            }
            PotentialSpec::SoftCoulomb { strength, softening, center } => {
                if !(strength.is_finite() && center.is_finite() && softening.is_finite() && *softening > 0.0) {
                    bad("soft-Coulomb needs finite strength/center and positive softening")
                } else {
                    Ok(())
                }
            }
            PotentialSpec::Tabulated { grid, values } => {
                if values.len() != grid.len() {
                    return Err(Error::LengthMismatch { expected: grid.len(), found: values.len() });
                }
                match values.iter().position(|v| !v.is_finite()) {
                    Some(i) => Err(Error::NonFinite(i)),
                    None => Ok(()),
                }
            }
            PotentialSpec::TwoParticle { one_body, interaction } => {
                if matches!(**one_body, PotentialSpec::TwoParticle { .. }) {
                    return bad("two-particle potentials cannot nest");
                }
                one_body.validate()?;
                match interaction.as_ref().and_then(|t| t.iter().position(|v| !v.is_finite())) {
                    Some(i) => Err(Error::NonFinite(i)),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// V at an arbitrary position. Two-particle potentials report their one-body term.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Free => 0.0,
            PotentialSpec::Constant { value } => *value,
            PotentialSpec::Harmonic { stiffness, center } => 0.5 * stiffness * (x - center).powi(2),
            PotentialSpec::SoftCoulomb { strength, softening, center } => {
                -strength / ((x - center).powi(2) + softening * softening).sqrt()
            }
            PotentialSpec::Tabulated { grid, values } => {
                let xc = x.clamp(grid.x_min(), grid.x_max());
                grid.interpolate(values, xc)
            }
            PotentialSpec::TwoParticle { one_body, .. } => one_body.value(x),
        }
    }

    /// −dV/dq at an arbitrary position.
    pub fn force(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Free | PotentialSpec::Constant { .. } => 0.0,
            PotentialSpec::Harmonic { stiffness, center } => -stiffness * (x - center),
            PotentialSpec::SoftCoulomb { strength, softening, center } => {
                let d = x - center;
                -strength * d / (d * d + softening * softening).powf(1.5)
            }
            PotentialSpec::Tabulated { grid, values } => match grid.locate(x) {
                Some((i, _)) => -(values[i + 1] - values[i]) / grid.dx(),
                None => 0.0,
            },
            PotentialSpec::TwoParticle { one_body, .. } => one_body.force(x),
        }
    }

    /// Nodal values on `grid`. Tabulated potentials must be defined on that exact grid.
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        self.validate()?;
        if let PotentialSpec::Tabulated { grid: own, values } = self {
            if !own.same_as(grid) {
                return Err(Error::InvalidGrid("tabulated potential is defined on a different grid".into()));
            }
            return Ok(values.clone());
        }
        Ok(grid.nodes().map(|x| self.value(x)).collect())
    }

    /// V(q1) + V(q2) + W(q1, q2) on the product grid.
    pub fn sample_2d(&self, grid: &Grid2D) -> Result<Vec<f64>> {
        self.validate()?;
        let (one_body, interaction) = match self {
            PotentialSpec::TwoParticle { one_body, interaction } => (one_body.as_ref(), interaction.as_deref()),
            other => (other, None),
        };
        let v1 = one_body.sample(&grid.q1)?;
        let v2 = one_body.sample(&grid.q2)?;
        if let Some(table) = interaction {
            if table.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: table.len() });
            }
        }
        let mut out = Vec::with_capacity(grid.len());
        for (i, a) in v1.iter().enumerate() {
            for (j, b) in v2.iter().enumerate() {
                let w = interaction.map_or(0.0, |t| t[grid.index(i, j)]);
                out.push(a + b + w);
            }
        }
        Ok(out)
    }

    /// The value if V is the same everywhere.
    pub fn uniform_value(&self) -> Option<f64> {
        match self {
            PotentialSpec::Free => Some(0.0),
            PotentialSpec::Constant { value } => Some(*value),
            PotentialSpec::Harmonic { stiffness, .. } if *stiffness == 0.0 => Some(0.0),
            _ => None,
        }
    }
}
