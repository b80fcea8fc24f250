use ite_core::dtn::{dirichlet_a_spectrum, dirichlet_spectrum, f_mode, fa_mode, ExtReal};
use ite_core::media::{Media, RadialDomain};
use proptest::prelude::*;

fn unit() -> RadialDomain {
    RadialDomain::disk(1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn medium_map_is_a_rescaled_laplace_map(m in 0u32..=15, lambda in 0.01f64..150.0, a in 0.2f64..4.0, n in 0.1f64..6.0) {
        let media = Media::new(a, n, 2).unwrap();
        let fa = fa_mode(m, lambda, &media, &unit()).unwrap();
        let f = f_mode(m, n / a * lambda, &unit()).unwrap();
        if let (ExtReal::Finite(x), ExtReal::Finite(y)) = (fa, f) {
            prop_assert!((x - a * y).abs() <= 1e-10 * (1.0 + x.abs()), "{} vs {}", x, a * y);
        } else {
            prop_assert_eq!(fa.is_pole(), f.is_pole());
        }
    }

    #[test]
    fn radius_scaling(m in 0u32..=10, lambda in 0.01f64..80.0, r in 0.3f64..3.0) {
        // f on radius r at lambda equals f on the unit disk at r^2 lambda, divided by r
        let big = f_mode(m, lambda, &RadialDomain::disk(r).unwrap()).unwrap();
        let small = f_mode(m, r * r * lambda, &unit()).unwrap();
        if let (ExtReal::Finite(x), ExtReal::Finite(y)) = (big, small) {
            prop_assert!((x - y / r).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }
}

/// Between consecutive Dirichlet eigenvalues the DtN value decreases.
#[test]
fn monotone_between_poles() {
    let media = Media::new(0.5, 0.25, 2).unwrap();
    let ann = RadialDomain::new(1.0, 0.3).unwrap();
    for m in 0..8 {
        for (domain, lap) in [(unit(), true), (ann, false)] {
            let table = if lap {
                dirichlet_spectrum(&domain, 120.0).unwrap()
            } else {
                dirichlet_a_spectrum(&media, &domain, 120.0).unwrap()
            };
            let mut edges = vec![0.0];
            edges.extend(table.mode_values(m));
            edges.push(120.0);
            for w in edges.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let span = hi - lo;
                let mut prev = f64::INFINITY;
                for i in 1..60 {
                    let l = lo + span * (0.002 + 0.996 * i as f64 / 60.0);
                    let v = if lap { f_mode(m, l, &domain) } else { fa_mode(m, l, &media, &domain) };
                    let v = v.unwrap().finite().unwrap();
                    assert!(v < prev, "mode {m}: not decreasing at {l}");
                    prev = v;
                }
            }
        }
    }
}

/// Poles of the DtN values sit exactly at the tabulated Dirichlet eigenvalues.
#[test]
fn pole_set_matches_tables() {
    let media = Media::new(2.0, 3.0, 2).unwrap();
    let ann = RadialDomain::new(1.0, 0.3).unwrap();
    let lap = dirichlet_spectrum(&ann, 150.0).unwrap();
    let med = dirichlet_a_spectrum(&media, &ann, 150.0).unwrap();
    for e in &lap.entries {
        assert!(f_mode(e.mode.0, e.lambda, &ann).unwrap().is_pole(), "{e:?}");
        assert!(!f_mode(e.mode.0, e.lambda * (1.0 + 1e-4), &ann).unwrap().is_pole());
    }
    for e in &med.entries {
        assert!(fa_mode(e.mode.0, e.lambda, &media, &ann).unwrap().is_pole(), "{e:?}");
    }
    // the obstacle leaves the Laplace table untouched
    assert_eq!(lap.entries, dirichlet_spectrum(&unit(), 150.0).unwrap().entries);
}
