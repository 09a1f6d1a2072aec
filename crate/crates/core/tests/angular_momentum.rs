//! Clebsch–Gordan coefficients and hyperfine matrix elements against a
//! brute-force construction in the uncoupled product basis.

use deltacpt::atomic::{cg_coefficient, cg_exact, hyperfine_element, SpinOp};
use deltacpt::HalfInt;

mod support;
use support::product_basis::{h, Coupled};

#[test]
fn cg_orthogonality_up_to_seven_halves() {
    for j1 in 0..=7 {
        for j2 in 0..=7 {
            let (j1, j2) = (h(j1), h(j2));
            let js: Vec<HalfInt> = ((j1.twice() - j2.twice()).abs()..=j1.twice() + j2.twice()).step_by(2).map(h).collect();
            for &ja in &js {
                for &jb in &js {
                    for m in ja.projections() {
                        if m.abs() > jb {
                            continue;
                        }
                        let mut sum = 0.0;
                        for m1 in j1.projections() {
                            let m2 = h(m.twice() - m1.twice());
                            if m2.abs() > j2 {
                                continue;
                            }
                            let a: f64 = cg_coefficient(j1, m1, j2, m2, ja, m).unwrap();
                            let b: f64 = cg_coefficient(j1, m1, j2, m2, jb, m).unwrap();
                            sum += a * b;
                        }
                        let want = if ja == jb { 1.0 } else { 0.0 };
                        assert!((sum - want).abs() < 1e-12, "j1={j1} j2={j2} J={ja},{jb} m={m}: {sum}");
                    }
                }
            }
        }
    }
}

#[test]
fn cg_matches_product_basis_construction() {
    for (i2, j2) in [(1, 1), (3, 1), (5, 1), (5, 3), (7, 3), (4, 2)] {
        let (i, j) = (h(i2), h(j2));
        let c = Coupled::new(i, j);
        let nj = (j2 + 1) as usize;
        for (f, m, v) in &c.states {
            for mi in i.projections() {
                let mj = h(m.twice() - mi.twice());
                if mj.abs() > j {
                    continue;
                }
                let idx = ((i.twice() - mi.twice()) / 2) as usize * nj + ((j.twice() - mj.twice()) / 2) as usize;
                let cg: f64 = cg_coefficient(i, mi, j, mj, *f, *m).unwrap();
                assert!((cg - v[idx]).abs() < 1e-12, "I={i} J={j} F={f} m={m} mI={mi}: {cg} vs {}", v[idx]);
            }
        }
    }
}

#[test]
fn hyperfine_elements_match_oracle() {
    for (i2, j2) in [(5, 1), (3, 1), (7, 1), (5, 3)] {
        let (i, j) = (h(i2), h(j2));
        let c = Coupled::new(i, j);
        for (f1, m1, _) in &c.states {
            for (f2, m2, _) in &c.states {
                for op in [SpinOp::Jz, SpinOp::JPlus, SpinOp::JMinus] {
                    let got = hyperfine_element(i, j, *f1, *m1, *f2, *m2, op).unwrap();
                    let want = c.element(*f2, *m2, op, *f1, *m1);
                    assert!((got - want).abs() < 1e-12, "I={i} J={j} <{f2} {m2}|{op:?}|{f1} {m1}>: {got} vs {want}");
                    let dm = m2.twice() - m1.twice();
                    let allowed = match op {
                        SpinOp::Jz => dm == 0,
                        SpinOp::JPlus => dm == 2,
                        SpinOp::JMinus => dm == -2,
                    };
                    if !allowed {
                        assert_eq!(got, 0.0);
                    }
                }
            }
        }
    }
}

#[test]
fn exact_squares_are_rational() {
    // ⟨1/2 1/2; 1/2 −1/2 | 1 0⟩² = 1/2
    let c = cg_exact(h(1), h(1), h(1), h(-1), h(2), h(0)).unwrap();
    assert_eq!(c.square, num_rational::BigRational::new(1.into(), 2.into()));
    assert!(!c.negative);
    // ⟨1/2 −1/2; 1/2 1/2 | 0 0⟩ = −1/√2
    assert!(cg_exact(h(1), h(-1), h(1), h(1), h(0), h(0)).unwrap().negative);
}
