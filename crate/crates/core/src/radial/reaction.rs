//! Exact integration of the absorption ODE `u′ = −u^(−ν)`:
//! `u(t + dt) = (u^(1+ν) − (1+ν) dt)^(1/(1+ν))`.

/// Outcome of a reaction substep at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NodeReaction {
    Alive(f64),
    /// Reached the floor; carries the time offset within the substep at
    /// which the exact trajectory crosses the floor.
    Extinct { after: f64 },
}

pub(crate) fn react_node(u: f64, nu: f64, dt: f64, floor: f64) -> NodeReaction {
    let e = 1.0 + nu;
    let energy = u.powf(e);
    let floor_energy = floor.powf(e);
    let remaining = energy - e * dt;
    if remaining <= floor_energy {
        let after = ((energy - floor_energy) / e).clamp(0.0, dt);
        NodeReaction::Extinct { after }
    } else {
        NodeReaction::Alive(remaining.powf(1.0 / e))
    }
}

/// Advances every node by `dt` along the exact ODE flow. Nodes whose
/// trajectory reaches `floor` within the substep are clamped to `floor` and
/// reported.
pub fn reaction_substep(values: &[f64], nu: f64, dt: f64, floor: f64) -> (Vec<f64>, Vec<usize>) {
    let mut out = Vec::with_capacity(values.len());
    let mut extinct = Vec::new();
    for (j, &u) in values.iter().enumerate() {
        if dt == 0.0 {
            out.push(u);
            continue;
        }
        match react_node(u, nu, dt, floor) {
            NodeReaction::Alive(v) => out.push(v),
            NodeReaction::Extinct { .. } => {
                out.push(floor);
                extinct.push(j);
            }
        }
    }
    (out, extinct)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_step() {
        let (v, ext) = reaction_substep(&[1.0], 1.0, 0.125, 1e-8);
        assert!((v[0] - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((v[0] - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!(ext.is_empty());
    }

    #[test]
    fn exact_extinction() {
        let (v, ext) = reaction_substep(&[1.0, 2.0], 1.0, 0.5, 1e-8);
        assert_eq!(ext, vec![0]);
        assert_eq!(v[0], 1e-8);
        assert!((v[1] - 3f64.sqrt()).abs() < 1e-15);
        match react_node(1.0, 1.0, 0.7, 1e-8) {
            NodeReaction::Extinct { after } => assert!((after - 0.5).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let vals = [0.3, 1.0, 7.5];
        let (v, ext) = reaction_substep(&vals, 2.0, 0.0, 1e-8);
        assert_eq!(v, vals.to_vec());
        assert!(ext.is_empty());
    }

    #[test]
    fn composition_matches_single_step() {
        let (a, _) = reaction_substep(&[1.3], 0.7, 0.1, 1e-8);
        let (b, _) = reaction_substep(&a, 0.7, 0.15, 1e-8);
        let (c, _) = reaction_substep(&[1.3], 0.7, 0.25, 1e-8);
        assert!((b[0] - c[0]).abs() < 1e-14);
    }
}
