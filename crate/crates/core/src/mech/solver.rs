//! Linear static solution of a frame model.
//!
//! 12-DOF Euler-Bernoulli space-frame elements are assembled into a banded
//! symmetric matrix after eliminating fixed DOFs. Nodes are renumbered by
//! reverse Cuthill-McKee to keep the band narrow, the matrix is Jacobi
//! scaled (translations and rotations differ by many decades) and factored
//! with a band Cholesky.

use std::collections::VecDeque;

use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};

use crate::error::{Error, Result};

use super::frame::{dof_name, Element, FrameModel, DOF_PER_NODE};

pub type Mat12 = SMatrix<f64, 12, 12>;

/// Relative residual `|K·u − F| / |F|` a solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-11;

const REFINE_STEPS: usize = 3;

/// Element stiffness in local axes (x along the element, z out of plane).
pub fn local_stiffness(e: &Element, length: f64) -> Mat12 {
    let s = e.section.stiffness();
    let l = length;
    let (l2, l3) = (l * l, l * l * l);
    let mut k = Mat12::zeros();
    let mut put = |i: usize, j: usize, v: f64| {
        k[(i, j)] = v;
        k[(j, i)] = v;
    };
    let ax = s.ea / l;
    put(0, 0, ax);
    put(6, 6, ax);
    put(0, 6, -ax);
    let tq = s.gj / l;
    put(3, 3, tq);
    put(9, 9, tq);
    put(3, 9, -tq);
    // v / θz: bending in the local xy plane.
    let b = s.ei_in;
    put(1, 1, 12.0 * b / l3);
    put(7, 7, 12.0 * b / l3);
    put(1, 7, -12.0 * b / l3);
    put(1, 5, 6.0 * b / l2);
    put(1, 11, 6.0 * b / l2);
    put(5, 7, -6.0 * b / l2);
    put(7, 11, -6.0 * b / l2);
    put(5, 5, 4.0 * b / l);
    put(11, 11, 4.0 * b / l);
    put(5, 11, 2.0 * b / l);
    // w / θy: bending in the local xz plane.
    let b = s.ei_out;
    put(2, 2, 12.0 * b / l3);
    put(8, 8, 12.0 * b / l3);
    put(2, 8, -12.0 * b / l3);
    put(2, 4, -6.0 * b / l2);
    put(2, 10, -6.0 * b / l2);
    put(4, 8, 6.0 * b / l2);
    put(8, 10, 6.0 * b / l2);
    put(4, 4, 4.0 * b / l);
    put(10, 10, 4.0 * b / l);
    put(4, 10, 2.0 * b / l);
    k
}

/// Rows are the local x, y, z axes in global coordinates. Local z is the
/// wafer normal for in-plane elements; vertical elements use global x as
/// their local z.
pub fn local_axes(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    let ex = (b - a).normalize();
    let gz = Vector3::z();
    let ey = if ex.dot(&gz).abs() < 0.999 {
        gz.cross(&ex).normalize()
    } else {
        ex.cross(&Vector3::x()).normalize()
    };
    let ez = ex.cross(&ey);
    Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()])
}

pub fn global_stiffness(model: &FrameModel, e: &Element) -> Mat12 {
    let a = model.nodes[e.nodes[0]].coords;
    let b = model.nodes[e.nodes[1]].coords;
    let r = local_axes(&a, &b);
    let mut t = Mat12::zeros();
    for blk in 0..4 {
        t.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(&r);
    }
    t.transpose() * local_stiffness(e, (b - a).norm()) * t
}

fn element_dofs(e: &Element) -> [usize; 12] {
    let mut d = [0; 12];
    for (side, &n) in e.nodes.iter().enumerate() {
        for k in 0..DOF_PER_NODE {
            d[side * DOF_PER_NODE + k] = DOF_PER_NODE * n + k;
        }
    }
    d
}

/// Full unconstrained global stiffness matrix (for inspection and tests).
pub fn assemble_dense(model: &FrameModel) -> DMatrix<f64> {
    let n = model.dof_count();
    let mut k = DMatrix::zeros(n, n);
    for e in &model.elements {
        let ke = global_stiffness(model, e);
        let dofs = element_dofs(e);
        for i in 0..12 {
            for j in 0..12 {
                k[(dofs[i], dofs[j])] += ke[(i, j)];
            }
        }
    }
    k
}

/// Reverse Cuthill-McKee ordering of the node graph.
pub fn rcm_order(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree = |i: usize| adjacency[i].len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, visited: &[bool]| -> Vec<Vec<usize>> {
        let mut seen = visited.to_vec();
        seen[start] = true;
        let mut levels = vec![vec![start]];
        loop {
            let mut next = Vec::new();
            for &u in levels.last().unwrap() {
                for &v in &adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    };

    while order.len() < n {
        let mut start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree(i), i))
            .unwrap();
        // Pseudo-peripheral start: walk to the far end of the level structure.
        let mut depth = 0;
        for _ in 0..4 {
            let levels = bfs_levels(start, &visited);
            if levels.len() <= depth {
                break;
            }
            depth = levels.len();
            start = *levels
                .last()
                .unwrap()
                .iter()
                .min_by_key(|&&i| (degree(i), i))
                .unwrap();
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adjacency[u].iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_by_key(|&v| (degree(v), v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Lower band of a symmetric matrix, row-major.
#[derive(Debug, Clone)]
struct Band {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl Band {
    fn zeros(n: usize, bw: usize) -> Self {
        Band {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw - (i - j)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                if i != j {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky; returns the first row whose pivot vanished.
    fn factor(&mut self) -> std::result::Result<(), usize> {
        let bw = self.bw;
        for i in 0..self.n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let mut sum = self.get(i, j);
                let ri = self.idx(i, lo);
                let rj = self.idx(j, lo);
                for k in 0..(j - lo) {
                    sum -= self.data[ri + k] * self.data[rj + k];
                }
                let dst = self.idx(i, j);
                if i == j {
                    if !(sum > PIVOT_TOL) {
                        return Err(i);
                    }
                    self.data[dst] = sum.sqrt();
                } else {
                    self.data[dst] = sum / self.get(j, j);
                }
            }
        }
        Ok(())
    }

    fn solve_factored(&self, b: &mut [f64]) {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for k in lo..i {
                s -= self.get(i, k) * b[k];
            }
            b[i] = s / self.get(i, i);
        }
        for i in (0..self.n).rev() {
            let hi = (i + bw).min(self.n - 1);
            let mut s = b[i];
            for k in i + 1..=hi {
                s -= self.get(k, i) * b[k];
            }
            b[i] = s / self.get(i, i);
        }
    }
}

/// A frame model with its constrained stiffness factored, ready for any
/// number of load cases.
#[derive(Debug, Clone)]
pub struct FactoredFrame {
    dof_count: usize,
    /// Global DOF → reduced index.
    reduced: Vec<Option<usize>>,
    scale: Vec<f64>,
    stiffness: Band,
    factor: Band,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSolution {
    /// 6 per node: ux, uy, uz (m), rx, ry, rz (rad).
    pub displacements: Vec<f64>,
    pub residual: f64,
}

impl StaticSolution {
    pub fn uz(&self, node: usize) -> f64 {
        self.displacements[DOF_PER_NODE * node + 2]
    }

    pub fn max_abs_uz(&self) -> f64 {
        (0..self.displacements.len() / DOF_PER_NODE)
            .map(|n| self.uz(n).abs())
            .fold(0.0, f64::max)
    }
}

impl FactoredFrame {
    pub fn new(model: &FrameModel) -> Result<Self> {
        model.validate()?;
        let nn = model.nodes.len();
        let mut adjacency = vec![Vec::new(); nn];
        for e in &model.elements {
            let [a, b] = e.nodes;
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for a in adjacency.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let order = rcm_order(&adjacency);

        let mut reduced = vec![None; model.dof_count()];
        let mut free = Vec::new();
        for &node in &order {
            for k in 0..DOF_PER_NODE {
                let g = DOF_PER_NODE * node + k;
                if !model.constraints.contains(&g) {
                    reduced[g] = Some(free.len());
                    free.push(g);
                }
            }
        }
        let n = free.len();
        if n == 0 {
            return Err(Error::InvalidFrame("every DOF is fixed".into()));
        }

        let mut bw = 0;
        for e in &model.elements {
            let r: Vec<usize> = element_dofs(e).iter().filter_map(|&g| reduced[g]).collect();
            if let (Some(lo), Some(hi)) = (r.iter().min(), r.iter().max()) {
                bw = bw.max(hi - lo);
            }
        }

        let mut stiffness = Band::zeros(n, bw);
        for e in &model.elements {
            let ke = global_stiffness(model, e);
            let dofs = element_dofs(e);
            for i in 0..12 {
                let Some(ri) = reduced[dofs[i]] else { continue };
                for j in 0..=i {
                    let Some(rj) = reduced[dofs[j]] else { continue };
                    stiffness.add(ri, rj, ke[(i, j)]);
                    if i != j && ri == rj {
                        // Both ends on one DOF only happens for degenerate input.
                        stiffness.add(ri, rj, ke[(i, j)]);
                    }
                }
            }
        }

        let diag: Vec<f64> = (0..n).map(|i| stiffness.get(i, i)).collect();
        let dead: Vec<String> = (0..n)
            .filter(|&i| !(diag[i] > 0.0))
            .map(|i| dof_name(free[i]))
            .collect();
        if !dead.is_empty() {
            return Err(Error::Singular(dead));
        }
        let scale: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut factor = stiffness.clone();
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let k = factor.idx(i, j);
                factor.data[k] *= scale[i] * scale[j];
            }
        }
        factor
            .factor()
            .map_err(|row| Error::Singular(vec![dof_name(free[row])]))?;

        Ok(FactoredFrame {
            dof_count: model.dof_count(),
            reduced,
            scale,
            stiffness,
            factor,
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.factor.bw
    }

    pub fn free_dof_count(&self) -> usize {
        self.factor.n
    }

    /// Solves for a full-length global load vector; loads on fixed DOFs are
    /// reactions and are ignored.
    pub fn solve(&self, loads: &[f64]) -> Result<StaticSolution> {
        assert_eq!(loads.len(), self.dof_count, "load vector length");
        let n = self.factor.n;
        let mut f = vec![0.0; n];
        for (g, r) in self.reduced.iter().enumerate() {
            if let Some(r) = r {
                f[*r] = loads[g];
            }
        }
        let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x = vec![0.0; n];
        let mut r = f.clone();
        let mut residual = if fnorm == 0.0 { 0.0 } else { 1.0 };
        // Connector elements are orders of magnitude stiffer than the spans;
        // a couple of refinement sweeps recover the digits lost to that.
        for _ in 0..=REFINE_STEPS {
            if residual < RESIDUAL_TOL * 1e-3 {
                break;
            }
            let mut dx: Vec<f64> = r.iter().zip(&self.scale).map(|(r, s)| r * s).collect();
            self.factor.solve_factored(&mut dx);
            for ((xi, d), s) in x.iter_mut().zip(&dx).zip(&self.scale) {
                *xi += d * s;
            }
            let ku = self.stiffness.matvec(&x);
            r = f.iter().zip(&ku).map(|(a, b)| a - b).collect();
            residual = r.iter().map(|v| v * v).sum::<f64>().sqrt() / fnorm;
        }
        if !(residual < RESIDUAL_TOL) {
            return Err(Error::Residual(residual));
        }
        let mut displacements = vec![0.0; self.dof_count];
        for (g, r) in self.reduced.iter().enumerate() {
            if let Some(r) = r {
                displacements[g] = x[*r];
            }
        }
        Ok(StaticSolution {
            displacements,
            residual,
        })
    }
}

/// Assembles, constrains, factors and solves the model's own load vector.
pub fn solve_static(model: &FrameModel) -> Result<StaticSolution> {
    FactoredFrame::new(model)?.solve(&model.loads)
}
