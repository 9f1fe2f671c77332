use crate::error::{Error, Result};
use crate::sht::{CoeffTable, Direction, WignerPi2Table};
use crate::Vec3;

use super::{fb5_coeffs, Fb5Density, Fb5Params, TruncationPolicy};

/// Weighted sum of FB5 densities with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    components: Vec<(f64, Fb5Params)>,
}

impl MixtureModel {
    pub fn new(components: Vec<(f64, Fb5Params)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Constraint("a mixture needs at least one component".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Constraint(format!("mixture weights must be positive, got {w}")));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Constraint(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(MixtureModel { components })
    }

    pub fn single(params: Fb5Params) -> Self {
        MixtureModel { components: vec![(1.0, params)] }
    }

    pub fn components(&self) -> &[(f64, Fb5Params)] {
        &self.components
    }

    /// Pointwise evaluator for the mixture density.
    pub fn density(&self) -> Result<MixtureDensity> {
        let parts = self
            .components
            .iter()
            .map(|(w, p)| Ok((*w, Fb5Density::new(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixtureDensity { parts })
    }

    /// Coefficient table up to degree `L`, building the Wigner table internally.
    pub fn coefficients(&self, l: usize) -> Result<CoeffTable> {
        mixture_coeffs(self, l, &WignerPi2Table::new(l))
    }
}

#[derive(Debug, Clone)]
pub struct MixtureDensity {
    parts: Vec<(f64, Fb5Density)>,
}

impl MixtureDensity {
    pub fn pdf_at(&self, x: &Vec3) -> f64 {
        self.parts.iter().map(|(w, d)| w * d.pdf_at(x)).sum()
    }

    pub fn pdf(&self, dir: Direction) -> f64 {
        self.pdf_at(&dir.unit_vector())
    }
}

/// `Σ_w K_w · fb5_coeffs(component_w)`, each with its own default truncation.
pub fn mixture_coeffs(model: &MixtureModel, l: usize, table: &WignerPi2Table) -> Result<CoeffTable> {
    let mut out = CoeffTable::zeros(l);
    for (w, p) in &model.components {
        let c = fb5_coeffs(p, l, table, TruncationPolicy::for_params(p.kappa(), p.beta()))?;
        out.add_scaled(&c, *w);
    }
    Ok(out)
}
