use matterwave::chain1d::{phi_between_coefficients, ChainSpec, Slot};
use matterwave::foldy::{solve_exciting_fields, AmplitudeModel, PlaneWave, ScattererSpec};
use matterwave::greens::{green1d, green3d};
use matterwave::packet::{synthesize, PacketSpec, SpectrumWeight};
use matterwave::quad::QuadOptions;
use matterwave::slab::{slab_match, transmission_amplitude, SlabParams};
use matterwave::{GreenKind, GreenVariant, WaveNumber};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex(bound: f64) -> impl Strategy<Value = Complex64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex64::new(re, im))
}

fn wave_number() -> impl Strategy<Value = f64> {
    prop_oneof![0.1f64..10.0, -10.0f64..-0.1]
}

proptest! {
    #[test]
    fn isotropic_1d_kernels_are_even(k in wave_number(), x in 0.01f64..20.0) {
        let wk = WaveNumber::new(k).unwrap();
        for v in [GreenVariant::Outgoing, GreenVariant::Ingoing, GreenVariant::CosStationary, GreenVariant::SinStationary] {
            let kind = GreenKind::one_d(v);
            let a = green1d(kind, wk, x).unwrap();
            let b = green1d(kind, wk, -x).unwrap();
            prop_assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
        }
    }

    #[test]
    fn outgoing_and_ingoing_are_conjugate(k in wave_number(), r in prop::array::uniform3(-5.0f64..5.0)) {
        prop_assume!(r.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let wk = WaveNumber::new(k).unwrap();
        let out = green3d(GreenKind::three_d(GreenVariant::Outgoing).unwrap(), wk, r).unwrap();
        let inc = green3d(GreenKind::three_d(GreenVariant::Ingoing).unwrap(), wk, r).unwrap();
        prop_assert!((out - inc.conj()).norm() <= 1e-15 * out.norm().max(1.0));
    }

    #[test]
    fn chain_coefficients_are_multilinear(slot_idx in 0usize..8, lambda in complex(3.0)) {
        let slot = Slot::ALL[slot_idx];
        let base = ChainSpec::electron_example();
        let mut scaled = base.clone();
        scaled.set(slot, base.get(slot).unwrap() * lambda);
        let w0 = phi_between_coefficients(&base).unwrap();
        let w1 = phi_between_coefficients(&scaled).unwrap();
        let t_la = base.get(Slot::TLA).unwrap();
        let r_lb = base.get(Slot::RLB).unwrap();
        let r_ra = base.get(Slot::RRA).unwrap();
        let second = t_la * base.get(Slot::TLB).unwrap() * base.get(Slot::RLC).unwrap() * base.get(Slot::TRB).unwrap();
        let (fwd, bwd) = match slot {
            Slot::TLA => (w0.forward * lambda, w0.backward * lambda),
            Slot::RLB => (t_la + t_la * r_lb * r_ra * lambda, t_la * r_lb * lambda + second),
            Slot::RRA => (t_la + t_la * r_lb * r_ra * lambda, w0.backward),
            Slot::TLB | Slot::TRB | Slot::RLC => (w0.forward, t_la * r_lb + second * lambda),
            Slot::RLA | Slot::TRA => (w0.forward, w0.backward),
        };
        prop_assert!((w1.forward - fwd).norm() < 1e-13);
        prop_assert!((w1.backward - bwd).norm() < 1e-13);
    }

    #[test]
    fn chain_coefficients_ignore_positions(a in -5.0f64..0.0, gap1 in 0.01f64..3.0, gap2 in 0.01f64..3.0) {
        let base = ChainSpec::electron_example();
        let mut moved = base.clone();
        moved.positions = vec![a, a + gap1, a + gap1 + gap2];
        prop_assert_eq!(phi_between_coefficients(&base).unwrap(), phi_between_coefficients(&moved).unwrap());
    }

    #[test]
    fn slab_closed_form_matches_matching(n in complex(3.0), c in -5.0f64..5.0) {
        prop_assume!(n.norm() <= 3.0 && n.norm() > 1e-3 && c.abs() > 1e-3);
        let p = SlabParams::from_index(n, c, 1.0).unwrap();
        prop_assume!(p.denominator().norm() > 1e-6);
        let t = transmission_amplitude(&p).unwrap();
        let s = slab_match(&p).unwrap();
        prop_assert!((t - s.t).norm() < 1e-10 * t.norm().max(1.0));
    }

    #[test]
    fn lossless_slab_conserves_flux(n in 0.05f64..3.0, sign in prop::bool::ANY, c in 0.1f64..5.0) {
        let n = if sign { n } else { -n };
        let s = slab_match(&SlabParams::from_index(Complex64::new(n, 0.0), c, 1.0).unwrap()).unwrap();
        prop_assert!((s.reflectance() + s.transmittance() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn foldy_solution_is_linear(lambda in complex(4.0), f in complex(0.5)) {
        let k = 1.1;
        let green = GreenKind::one_d(GreenVariant::Outgoing);
        let s: Vec<_> = [-0.7, 0.4, 1.9]
            .iter()
            .map(|&x| ScattererSpec { position: [x, 0.0, 0.0], amplitude: AmplitudeModel::Constant(f), green })
            .collect();
        let wk = WaveNumber::new(k).unwrap();
        let inc = PlaneWave::new([k, 0.0, 0.0]);
        let a = solve_exciting_fields(&s, &inc, wk).unwrap();
        let b = solve_exciting_fields(&s, &inc.scaled(lambda), wk).unwrap();
        for (x, y) in a.xi.iter().zip(&b.xi) {
            prop_assert!((y - lambda * x).norm() < 1e-12 * y.norm().max(1.0));
        }
    }

    #[test]
    fn packet_is_linear_in_spectrum(a in complex(2.0), b in complex(2.0), x in -6.0f64..6.0) {
        let opts = QuadOptions::with_tolerances(1e-14, 1e-12);
        let g1 = SpectrumWeight::gaussian_1d(1.0, 0.5, Complex64::new(1.0, 0.0));
        let g2 = SpectrumWeight::gaussian_1d(1.0, 0.5, Complex64::new(0.0, 1.0));
        let psi = |g: SpectrumWeight| synthesize(&PacketSpec::new(g, 1).unwrap(), &[x], 0.7, &opts).unwrap().value;
        let lhs = psi(g1.scaled(a)) + psi(g2.scaled(b));
        let combined = SpectrumWeight::gaussian_1d(1.0, 0.5, a + Complex64::new(0.0, 1.0) * b);
        prop_assert!((lhs - psi(combined)).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}
