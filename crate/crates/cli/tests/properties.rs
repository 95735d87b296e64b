use proptest::prelude::*;

use legalrisk::config;
use legalrisk::output::fmt_g;
use legalrisk::sweep::SweepGrid;

proptest! {
    #[test]
    fn g12_keeps_twelve_digits(x in -1e30f64..1e30) {
        let s = fmt_g(x, 12);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs(), "{} -> {}", x, s);
    }

    #[test]
    fn config_render_round_trips(beta in 0.0f64..0.5, p in 1.0f64..8.0, t in 0.1f64..5.0, n in 1u64..1000, w in 0.05f64..0.95) {
        let text = format!("beta={beta}\np={p}\nT={t}\nN={n}\nsupport=0:{w},2:{}\n", 1.0 - w);
        if let Ok(c) = config::parse(&text) {
            prop_assert_eq!(config::parse(&c.render().join("\n")).unwrap(), c);
        }
    }

    #[test]
    fn range_grid_endpoints(lo in -5.0f64..5.0, span in 0.1f64..5.0, n in 2usize..30) {
        let g = SweepGrid::parse(&format!("p={lo}:{}:{n}", lo + span)).unwrap();
        let v = g.values("fig1", "p", &[]);
        prop_assert_eq!(v.len(), n);
        prop_assert_eq!(v[0], lo);
        prop_assert!((v[n - 1] - (lo + span)).abs() < 1e-12);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
