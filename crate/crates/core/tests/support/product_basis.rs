//! Brute-force coupled basis of `I ⊗ J` built with dense matrices.

use deltacpt::atomic::SpinOp;
use deltacpt::HalfInt;
use nalgebra::{DMatrix, DVector};

pub fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

/// `J_z`, `J_+` for spin `j` in the basis `m = j, j−1, …, −j`.
fn spin_matrices(j: HalfInt) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = (j.twice() + 1) as usize;
    let jf = j.as_f64();
    let m = |k: usize| jf - k as f64;
    let jz = DMatrix::from_fn(n, n, |r, c| if r == c { m(r) } else { 0.0 });
    let jp = DMatrix::from_fn(n, n, |r, c| if r + 1 == c { (jf * (jf + 1.0) - m(c) * (m(c) + 1.0)).sqrt() } else { 0.0 });
    (jz, jp)
}

/// Coupled states `|F m⟩` of `I ⊗ J` built from the stretched state by
/// repeated lowering. The stretched state of each `F` is the `F_z = F`
/// vector orthogonal to all higher `F`, phased so that its component with
/// `m_I = I` is positive.
pub struct Coupled {
    pub states: Vec<(HalfInt, HalfInt, DVector<f64>)>,
    jz: DMatrix<f64>,
    jp: DMatrix<f64>,
}

impl Coupled {
    pub fn new(i: HalfInt, j: HalfInt) -> Self {
        let (iz, ip) = spin_matrices(i);
        let (jz1, jp1) = spin_matrices(j);
        let (ni, nj) = (iz.nrows(), jz1.nrows());
        let id_i = DMatrix::<f64>::identity(ni, ni);
        let id_j = DMatrix::<f64>::identity(nj, nj);
        let fm = ip.transpose().kronecker(&id_j) + id_i.kronecker(&jp1.transpose());
        let index = |mi: HalfInt, mj: HalfInt| {
            let a = ((i.twice() - mi.twice()) / 2) as usize;
            let b = ((j.twice() - mj.twice()) / 2) as usize;
            a * nj + b
        };
        let mut states: Vec<(HalfInt, HalfInt, DVector<f64>)> = Vec::new();
        let fmax = i.twice() + j.twice();
        let fmin = (i.twice() - j.twice()).abs();
        for f2 in (fmin..=fmax).rev().step_by(2) {
            let f = h(f2);
            // F_z = F subspace
            let mut v = DVector::<f64>::zeros(ni * nj);
            let basis: Vec<usize> = i
                .projections()
                .filter_map(|mi| {
                    let mj = h(f2 - mi.twice());
                    (mj.abs().twice() <= j.twice()).then(|| index(mi, mj))
                })
                .collect();
            // Gram-Schmidt against the higher-F states with the same m
            for &b in &basis {
                let mut e = DVector::<f64>::zeros(ni * nj);
                e[b] = 1.0;
                for (_, m, s) in &states {
                    if m.twice() == f2 {
                        let overlap = s.dot(&e);
                        e -= s * overlap;
                    }
                }
                if e.norm() > 1e-8 {
                    v = e.normalize();
                    break;
                }
            }
            let top = index(i, h(f2 - i.twice()));
            if v[top] < 0.0 {
                v = -v;
            }
            let mut m = f;
            let mut cur = v;
            loop {
                states.push((f, m, cur.clone()));
                if m.twice() == -f2 {
                    break;
                }
                let next = &fm * &cur;
                cur = next.normalize();
                m = h(m.twice() - 2);
            }
        }
        Coupled { states, jz: id_i.kronecker(&jz1), jp: id_i.kronecker(&jp1) }
    }

    pub fn state(&self, f: HalfInt, m: HalfInt) -> &DVector<f64> {
        &self.states.iter().find(|s| s.0 == f && s.1 == m).unwrap().2
    }

    pub fn element(&self, f2: HalfInt, m2: HalfInt, op: SpinOp, f1: HalfInt, m1: HalfInt) -> f64 {
        let a = match op {
            SpinOp::Jz => &self.jz * self.state(f1, m1),
            SpinOp::JPlus => &self.jp * self.state(f1, m1),
            SpinOp::JMinus => self.jp.transpose() * self.state(f1, m1),
        };
        self.state(f2, m2).dot(&a)
    }
}
