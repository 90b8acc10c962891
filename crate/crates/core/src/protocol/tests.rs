use super::*;
use crate::engine::mhz_to_rad_per_ns;
use crate::C64;
use nalgebra::DMatrix;

fn spec(name: &str) -> ProtocolSpec {
    ProtocolSpec::from_graph(QubitGraph::preset(name).unwrap(), mhz_to_rad_per_ns(3.0))
}

/// exp(−iHt) by scaling and squaring of a Taylor series; independent of the
/// spectral path used by the engine.
fn expm_oracle(h: &DMatrix<f64>, t: f64) -> DMatrix<C64> {
    let a = h.map(|x| C64::new(0.0, -x * t));
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let a = a / C64::new(2f64.powi(squarings as i32), 0.0);
    let n = h.nrows();
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn trivial_points_vanish() {
    let s = spec("n6").with_random_masks(3, 5, false);
    for mask in &s.masks {
        assert!(run_sensing_abstract(&s, 0.0, 0.0, mask).unwrap().abs() < 1e-12);
        assert!(run_sensing_hardware(&s, 0.0, 0.0, mask).unwrap().abs() < 1e-12);
    }
}

#[test]
fn single_qubit_ramsey_limit() {
    // dense single-qubit oracle: σx expectation of e^{−iφZ/2} L |0⟩
    let oracle = |phi: f64, sign: f64| {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a0 = C64::new(r, 0.0) * C64::from_polar(1.0, -phi / 2.0);
        let a1 = C64::new(0.0, sign * r) * C64::from_polar(1.0, phi / 2.0);
        2.0 * (a0.conj() * a1).re
    };
    for sign in [LvSign::Plus, LvSign::Minus] {
        let s = spec("single").with_lv_sign(sign);
        let mask = XMask::none(1);
        for k in 0..9 {
            let phi = -PI + k as f64 * PI / 4.0;
            for t in [0.0, 50.0] {
                let v = run_sensing_abstract(&s, t, phi, &mask).unwrap();
                assert!((v - oracle(phi, sign.value())).abs() < 1e-12);
                assert!((v + sign.value() * phi.sin()).abs() < 1e-12);
                let hw = run_sensing_hardware(&s, t, phi, &mask).unwrap();
                assert!((hw - v).abs() < 1e-12);
            }
            // with the single qubit flipped the result is unchanged
            let flipped = run_sensing_abstract(&s, 10.0, phi, &XMask::from_bits(1, 1)).unwrap();
            assert!((flipped + sign.value() * phi.sin()).abs() < 1e-12);
        }
    }
}

#[test]
fn hardware_matches_abstract_on_chain() {
    for sign in [LvSign::Plus, LvSign::Minus] {
        let s = spec("chain4").with_lv_sign(sign);
        let masks: Vec<XMask> = (0..16).map(|b| XMask::from_bits(4, b)).collect();
        let mut worst = 0.0f64;
        for mask in &masks {
            for &t in &[0.0, 17.0, 40.0, 93.0, 160.0] {
                for &phi in &[-2.5, -0.4, 0.0, 0.3, 1.9] {
                    let a = run_sensing_abstract(&s, t, phi, mask).unwrap();
                    let h = run_sensing_hardware(&s, t, phi, mask).unwrap();
                    worst = worst.max((a - h).abs());
                }
            }
        }
        assert!(worst < 1e-8, "max deviation {worst}");
    }
}

#[test]
fn hardware_matches_abstract_with_red_center() {
    let mut g = QubitGraph::preset("n6").unwrap();
    g.flip_colors();
    assert_eq!(g.color(g.center()), Color::Red);
    let s = ProtocolSpec::from_graph(g, mhz_to_rad_per_ns(3.0)).with_random_masks(3, 11, false);
    for mask in &s.masks {
        for &t in &[0.0, 30.0, 75.0] {
            for &phi in &[-1.0, 0.2, 2.0] {
                let a = run_sensing_abstract(&s, t, phi, mask).unwrap();
                let h = run_sensing_hardware(&s, t, phi, mask).unwrap();
                assert!((a - h).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn sensing_curve_matches_pointwise() {
    for mode in [Mode::Abstract, Mode::Hardware] {
        let s = spec("n6").with_random_masks(2, 3, false).with_mode(mode);
        let phis = uniform_phis(9);
        for mask in &s.masks {
            let curve = sensing_curve(&s, 48.0, mask, &phis).unwrap();
            for (phi, v) in phis.iter().zip(&curve) {
                assert!((run_sensing(&s, 48.0, *phi, mask).unwrap() - v).abs() < 1e-12);
                assert!(v.abs() <= 1.0 + 1e-9);
            }
        }
    }
}

#[test]
fn encoding_angle_cases() {
    assert_eq!(encoding_angle(Color::Blue, false, 0.3), 0.3);
    assert_eq!(encoding_angle(Color::Blue, true, 0.3), -0.3);
    assert!((encoding_angle(Color::Red, true, 0.3) - (PI - 0.3)).abs() < 1e-15);
    assert_eq!(encoding_angle(Color::Red, false, 0.0), PI);
}

#[test]
fn otoc_initial_values() {
    for mode in [Mode::Abstract, Mode::Hardware] {
        let s = spec("n6").with_random_masks(4, 2, false).with_mode(mode);
        for mask in &s.masks {
            let o = run_otoc_all(&s, 0.0, mask).unwrap();
            for (q, v) in o.iter().enumerate() {
                let want = if q == s.center() { -1.0 } else { 1.0 };
                assert!((v - want).abs() < 1e-12);
                assert!((run_otoc(&s, 0.0, q, mask).unwrap() - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn otoc_pair_matches_matrix_exponential() {
    let s = spec("pair");
    let t = 20.0;
    let u = expm_oracle(&s.hamiltonian().dense(), t);
    let x0 = {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        for i in 0..4usize {
            m[(i ^ (1 << s.center()), i)] = C64::new(1.0, 0.0);
        }
        m
    };
    let z1 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        (0..4usize).map(|i| C64::new(if i & 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
    ));
    let vt = u.adjoint() * &x0 * &u;
    let expected = (&vt * &z1 * &vt * &z1)[(0, 0)].re;
    for mode in [Mode::Abstract, Mode::Hardware] {
        let got = run_otoc(&s.clone().with_mode(mode), t, 1, &XMask::none(2)).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }
    assert!(expected < 1.0 - 1e-3);
}

#[test]
fn reference_is_identity_without_noise() {
    for name in ["n6", "n8", "chain5"] {
        for mode in [Mode::Abstract, Mode::Hardware] {
            let s = spec(name).with_random_masks(3, 9, false).with_mode(mode);
            for mask in &s.masks {
                for &t in &[0.0, 24.0, 80.0, 160.0] {
                    let r = run_reference(&s, t, mask).unwrap();
                    assert!((r - 1.0).abs() < 1e-9, "{name} {mode:?} t={t}: {r}");
                }
            }
        }
    }
}

#[test]
fn butterfly_state_properties() {
    let s = spec("n6").with_insert(InsertGate::RxPlusHalfPi).with_random_masks(3, 4, false);
    for mask in &s.masks {
        let b0 = butterfly_state(&s, 0.0, mask).unwrap();
        // local gate on a product state: only center qubit is in superposition
        let pops: Vec<f64> = (0..6).map(|q| b0.excited_population(q)).collect();
        for (q, p) in pops.iter().enumerate() {
            if q == s.center() {
                assert!((p - 0.5).abs() < 1e-12);
            } else {
                assert!(p.abs() < 1e-12);
            }
        }
        for &t in &[40.0, 120.0] {
            assert!((butterfly_state(&s, t, mask).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn butterfly_overlap_with_polarized_state_at_late_time() {
    let s = spec("n6").with_random_masks(10, 2024, false);
    let mut total = 0.0;
    for mask in &s.masks {
        let b = butterfly_state(&s, 160.0, mask).unwrap();
        total += b.amplitudes()[0].norm_sqr();
    }
    let mean = total / s.masks.len() as f64;
    assert!((0.4..=0.6).contains(&mean), "mean overlap {mean}");
}

#[test]
fn sz_equals_half_otoc_sum() {
    let s = spec("n6").with_random_masks(5, 77, false);
    for mask in &s.masks {
        for &t in &[0.0, 16.0, 56.0, 128.0] {
            let psi = scrambled_state(&s, t, mask).unwrap();
            let o = run_otoc_all(&s, t, mask).unwrap();
            let half_sum = 0.5 * o.iter().sum::<f64>();
            assert!((psi.expect_sz() - half_sum).abs() < 1e-9);
        }
    }
}

#[test]
fn mask_length_is_validated() {
    let s = spec("n6");
    assert!(run_sensing_abstract(&s, 1.0, 0.0, &XMask::none(4)).is_err());
    let mut bad = s.clone();
    bad.times.push(-1.0);
    assert!(bad.validate().is_err());
}

#[test]
fn excluded_center_never_flipped() {
    let s = spec("n8").with_random_masks(200, 3, true);
    assert!(s.masks.iter().all(|m| !m.get(s.center())));
}
