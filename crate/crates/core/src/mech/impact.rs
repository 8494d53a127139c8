//! Worst-case point load that deflects the winding by a given amount.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Exec};

use super::frame::{FrameModel, DOF_PER_NODE};
use super::solver::FactoredFrame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactResult {
    /// Force (N) that brings the most compliant node to the limit.
    pub force: f64,
    /// Node where the unit load deflects most.
    pub critical_node: usize,
    /// Out-of-plane deflection of that node under 1 N, m/N.
    pub max_unit_deflection: f64,
}

/// Scans a unit vertical load over every free winding node. By linearity
/// the limiting force is `deflection_limit / max|uz|`, where `uz` is read at
/// any winding node (not just the loaded one).
pub fn max_impact_force(model: &FrameModel, deflection_limit: f64, exec: Exec) -> Result<ImpactResult> {
    if !(deflection_limit > 0.0 && deflection_limit.is_finite()) {
        return Err(Error::Domain {
            what: "deflection_limit",
            detail: format!("must be positive, got {deflection_limit:e}"),
        });
    }
    if model.winding_nodes.is_empty() {
        return Err(Error::InvalidFrame("no free winding nodes to load".into()));
    }
    let frame = FactoredFrame::new(model)?;
    let n = model.dof_count();
    let per_node = map_ordered(exec, &model.winding_nodes, |&node| -> Result<f64> {
        let mut f = vec![0.0; n];
        f[DOF_PER_NODE * node + 2] = 1.0;
        let sol = frame.solve(&f)?;
        Ok(model
            .winding_nodes
            .iter()
            .map(|&m| sol.uz(m).abs())
            .fold(0.0, f64::max))
    });
    let mut best = (0usize, 0.0f64);
    for (node, d) in model.winding_nodes.iter().zip(per_node) {
        let d = d?;
        // Strict comparison keeps the lowest node index on ties.
        if d > best.1 {
            best = (*node, d);
        }
    }
    if !(best.1 > 0.0) {
        return Err(Error::InvalidFrame("unit loads produce no out-of-plane deflection".into()));
    }
    Ok(ImpactResult {
        force: deflection_limit / best.1,
        critical_node: best.0,
        max_unit_deflection: best.1,
    })
}
