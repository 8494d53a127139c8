use std::collections::BTreeSet;

use approx::assert_relative_eq;
use nalgebra::Point3;

use super::frame::DOF_PER_NODE;
use super::solver::rcm_order;
use super::*;
use crate::geometry::SpiralSpec;
use crate::material::Material;

const E_CU: f64 = 130e9;

fn straight_beam(length: f64, n: usize, w: f64, t: f64) -> FrameModel {
    let nodes: Vec<Point3<f64>> = (0..=n)
        .map(|i| Point3::new(length * i as f64 / n as f64, 0.0, 0.0))
        .collect();
    let section = BeamSection::homogeneous(w, t, &Material::copper());
    let elements = (0..n)
        .map(|i| Element {
            nodes: [i, i + 1],
            section: section.clone(),
            kind: ElementKind::Winding,
        })
        .collect();
    FrameModel {
        loads: vec![0.0; DOF_PER_NODE * (n + 1)],
        nodes,
        elements,
        constraints: BTreeSet::new(),
        winding_nodes: (1..=n).collect(),
    }
}

#[test]
fn cantilever_tip_deflection() {
    let (l, w, t, f) = (340e-6, 10e-6, 1e-6, 1e-9);
    let mut m = straight_beam(l, 8, w, t);
    m.fix_node(0);
    m.add_vertical_load(8, f);
    let sol = solve_static(&m).unwrap();
    let i = w * t.powi(3) / 12.0;
    let expect = f * l.powi(3) / (3.0 * E_CU * i);
    assert_relative_eq!(sol.uz(8), expect, max_relative = 0.01);
    assert!(sol.residual < 1e-8);
}

#[test]
fn fem_strip_matches_closed_form_stiffness() {
    let (l, w, t) = (330e-6, 10e-6, 1e-6);
    let mut m = straight_beam(l, 8, w, t);
    m.fix_node(0);
    m.add_vertical_load(8, 1.0);
    let k_fem = 1.0 / solve_static(&m).unwrap().uz(8);
    assert_relative_eq!(k_fem, cantilever_stiffness(E_CU, w, t, l), max_relative = 0.01);
}

#[test]
fn simply_supported_center_load() {
    let (l, w, t, f) = (200e-6, 10e-6, 1e-6, -2e-9);
    let mut m = straight_beam(l, 8, w, t);
    for k in 0..4 {
        m.constraints.insert(k);
    }
    m.constraints.insert(DOF_PER_NODE * 8 + 1);
    m.constraints.insert(DOF_PER_NODE * 8 + 2);
    m.add_vertical_load(4, f);
    let sol = solve_static(&m).unwrap();
    let i = w * t.powi(3) / 12.0;
    assert_relative_eq!(sol.uz(4), f * l.powi(3) / (48.0 * E_CU * i), max_relative = 0.01);
}

#[test]
fn in_plane_bending_uses_wide_inertia() {
    let (l, w, t) = (100e-6, 10e-6, 1e-6);
    let mut m = straight_beam(l, 4, w, t);
    m.fix_node(0);
    m.loads[DOF_PER_NODE * 4 + 1] = 1e-6;
    let sol = solve_static(&m).unwrap();
    let expect = 1e-6 * l.powi(3) / (3.0 * E_CU * t * w.powi(3) / 12.0);
    assert_relative_eq!(sol.displacements[DOF_PER_NODE * 4 + 1], expect, max_relative = 1e-6);
}

#[test]
fn torsion_of_a_bar() {
    let (l, w, t) = (100e-6, 10e-6, 1e-6);
    let mut m = straight_beam(l, 3, w, t);
    m.fix_node(0);
    m.loads[DOF_PER_NODE * 3 + 3] = 1e-12;
    let sol = solve_static(&m).unwrap();
    let gj = Material::copper().shear_modulus() * section::torsion_constant(w, t);
    assert_relative_eq!(sol.displacements[DOF_PER_NODE * 3 + 3], 1e-12 * l / gj, max_relative = 1e-9);
}

#[test]
fn rotated_beam_gives_same_deflection() {
    // Same cantilever laid along y instead of x.
    let (l, w, t) = (150e-6, 10e-6, 1e-6);
    let mut a = straight_beam(l, 4, w, t);
    let mut b = a.clone();
    for p in b.nodes.iter_mut() {
        *p = Point3::new(0.0, p.x, 0.0);
    }
    for m in [&mut a, &mut b] {
        m.fix_node(0);
        m.add_vertical_load(4, 1e-9);
    }
    assert_relative_eq!(
        solve_static(&a).unwrap().uz(4),
        solve_static(&b).unwrap().uz(4),
        max_relative = 1e-10
    );
}

#[test]
fn global_stiffness_is_symmetric() {
    let spec = SpiralSpec::reference_device();
    for xb in [false, true] {
        let m = frame_for(&spec, xb, 2).unwrap();
        let k = assemble_dense(&m);
        let scale = k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let asym = (&k - k.transpose()).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(asym <= 1e-10 * scale, "asymmetry {asym:e} vs {scale:e}");
    }
}

#[test]
fn band_solve_matches_dense_solve() {
    let spec = SpiralSpec {
        turns: 2,
        ..SpiralSpec::reference_device()
    };
    let mut m = frame_for(&spec, true, 2).unwrap();
    for (k, &n) in m.winding_nodes.clone().iter().enumerate() {
        m.add_vertical_load(n, 1e-9 * (1.0 + k as f64 * 0.1));
    }
    let band = solve_static(&m).unwrap();
    let k = assemble_dense(&m);
    let free: Vec<usize> = (0..m.dof_count()).filter(|d| !m.constraints.contains(d)).collect();
    let kr = nalgebra::DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let fr = nalgebra::DVector::from_fn(free.len(), |i, _| m.loads[free[i]]);
    let ub = nalgebra::DVector::from_fn(free.len(), |i, _| band.displacements[free[i]]);
    assert!((&kr * &ub - &fr).norm() / fr.norm() < 1e-8);
    // Dense reference, Jacobi scaled like the band solver.
    let d = nalgebra::DVector::from_fn(free.len(), |i, _| 1.0 / kr[(i, i)].sqrt());
    let ks = nalgebra::DMatrix::from_fn(free.len(), free.len(), |i, j| kr[(i, j)] * d[i] * d[j]);
    let ur = ks.lu().solve(&fr.component_mul(&d)).unwrap().component_mul(&d);
    let uz_max = m.winding_nodes.iter().map(|&n| band.uz(n).abs()).fold(0.0, f64::max);
    for (i, &g) in free.iter().enumerate() {
        if g % DOF_PER_NODE == 2 {
            assert!((band.displacements[g] - ur[i]).abs() <= 1e-9 * uz_max, "{}", frame::dof_name(g));
        }
    }
}

#[test]
fn doubled_load_doubles_displacement() {
    let mut m = frame_for(&SpiralSpec::reference_device(), false, 2).unwrap();
    let node = *m.winding_nodes.last().unwrap();
    m.add_vertical_load(node, 1e-9);
    let a = solve_static(&m).unwrap();
    m.add_vertical_load(node, 1e-9);
    let b = solve_static(&m).unwrap();
    for (x, y) in a.displacements.iter().zip(&b.displacements) {
        assert_relative_eq!(2.0 * x, *y, max_relative = 1e-9, epsilon = 1e-30);
    }
}

#[test]
fn one_segment_four_elements() {
    let spec = SpiralSpec::reference_device();
    let mut layout = crate::geometry::generate_layout(&spec).unwrap();
    layout.segments.truncate(1);
    layout.links.clear();
    layout.anchors = vec![layout.segments[0].start];
    let m = build_frame(&spec, &layout, 4).unwrap();
    assert_eq!((m.nodes.len(), m.elements.len()), (5, 4));
}

#[test]
fn reference_device_counts() {
    let spec = SpiralSpec::reference_device();
    // 4·turns·n + 1 winding nodes and n + 1 lead nodes; the via adds an element.
    let m = frame_for(&spec, false, 4).unwrap();
    assert_eq!(m.nodes.len(), 166);
    assert_eq!(m.elements.len(), 165);
    let x = frame_for(&spec, true, 4).unwrap();
    assert!(x.elements.len() > m.elements.len());
}

#[test]
fn no_anchors_is_rejected() {
    let spec = SpiralSpec::reference_device();
    let mut layout = crate::geometry::generate_layout(&spec).unwrap();
    layout.anchors.clear();
    assert!(matches!(build_frame(&spec, &layout, 4), Err(Error::Unconstrained)));
    let mut m = frame_for(&spec, false, 4).unwrap();
    m.constraints.clear();
    assert!(matches!(solve_static(&m), Err(Error::Unconstrained)));
}

#[test]
fn mechanism_is_reported_with_dof_names() {
    let mut m = straight_beam(100e-6, 2, 10e-6, 1e-6);
    // Pinned in translation only: the beam can spin about its own axis.
    for k in 0..3 {
        m.constraints.insert(k);
    }
    m.add_vertical_load(2, 1e-9);
    match solve_static(&m) {
        Err(Error::Singular(dofs)) => assert!(dofs.iter().any(|d| d.starts_with("node")), "{dofs:?}"),
        other => panic!("expected singular, got {other:?}"),
    }
}

#[test]
fn mesh_convergence() {
    let spec = SpiralSpec::reference_device();
    let s = MechSettings::default();
    let coarse = impact_force(&spec, false, &MechSettings { elements_per_segment: 4, ..s }, Exec::default()).unwrap();
    let fine = impact_force(&spec, false, &MechSettings { elements_per_segment: 8, ..s }, Exec::default()).unwrap();
    let change = (coarse.max_unit_deflection - fine.max_unit_deflection).abs() / fine.max_unit_deflection;
    assert!(change < 0.02, "change {change}");
}

#[test]
fn stiffer_material_doubles_force() {
    let spec = SpiralSpec::reference_device();
    let mut stiff = spec.clone();
    stiff.conductor.youngs_modulus *= 2.0;
    let s = MechSettings::default();
    let a = impact_force(&spec, false, &s, Exec::Sequential).unwrap();
    let b = impact_force(&stiff, false, &s, Exec::Sequential).unwrap();
    assert_relative_eq!(b.force, 2.0 * a.force, max_relative = 1e-9);
}

#[test]
fn force_scales_with_limit() {
    let m = frame_for(&SpiralSpec::reference_device(), false, 2).unwrap();
    let a = max_impact_force(&m, 1e-6, Exec::Sequential).unwrap();
    let b = max_impact_force(&m, 3e-6, Exec::Sequential).unwrap();
    assert_relative_eq!(b.force, 3.0 * a.force, max_relative = 1e-12);
    assert!(max_impact_force(&m, 0.0, Exec::Sequential).is_err());
}

#[test]
fn parallel_scan_matches_sequential() {
    let m = frame_for(&SpiralSpec::reference_device(), true, 2).unwrap();
    let a = max_impact_force(&m, 1e-6, Exec::Sequential).unwrap();
    let b = max_impact_force(&m, 1e-6, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rcm_is_a_permutation_and_narrows_a_path() {
    // Path graph numbered badly.
    let order_in = [0usize, 5, 1, 4, 2, 3];
    let mut adj = vec![Vec::new(); 6];
    for w in order_in.windows(2) {
        adj[w[0]].push(w[1]);
        adj[w[1]].push(w[0]);
    }
    let order = rcm_order(&adj);
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    let mut pos = [0; 6];
    for (i, &n) in order.iter().enumerate() {
        pos[n] = i;
    }
    for w in order_in.windows(2) {
        assert_eq!(pos[w[0]].abs_diff(pos[w[1]]), 1);
    }
}

#[test]
fn strip_estimates_for_reference_device() {
    let (outer, inner) = strip_estimates(&SpiralSpec::reference_device(), 20.0 * G_ACCEL);
    assert_relative_eq!(outer.span, 330e-6, max_relative = 1e-12);
    assert_relative_eq!(inner.span, 90e-6, max_relative = 1e-12);
    assert_relative_eq!(outer.kappa, 130e9 * 10e-6 * 1e-18 / (4.0 * 330e-6f64.powi(3)), max_relative = 1e-12);
    assert_relative_eq!(outer.mass, 8960.0 * 10e-6 * 1e-6 * 330e-6, max_relative = 1e-12);
}

#[test]
fn xbeam_mode_parses() {
    assert_eq!("Both".parse::<XBeamMode>().unwrap(), XBeamMode::Both);
    assert!("maybe".parse::<XBeamMode>().is_err());
}
