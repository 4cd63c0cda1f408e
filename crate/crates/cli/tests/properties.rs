use aer_cli::{CsvMatrix, RawConfig};
use aer_core::{Grid2D, PartialField};
use proptest::prelude::*;

fn cell() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => Just(-0.0),
        1 => Just(f64::MIN_POSITIVE / 8.0),
    ]
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(n in 2usize..8, m in 2usize..8, a in 0.1..5.0f64, seed_cells in prop::collection::vec(cell(), 81)) {
        let g = Grid2D::new(-a, a, a, n, m).unwrap();
        let values: Vec<f64> = (0..g.len()).map(|i| seed_cells[i % seed_cells.len()]).collect();
        let field = PartialField::new(g, values).unwrap();
        let mut buf = Vec::new();
        CsvMatrix::from_partial("u", &field).write(&mut buf).unwrap();
        let back = CsvMatrix::read(buf.as_slice()).unwrap().to_partial(&g).unwrap();
        for (p, q) in back.values().iter().zip(field.values()) {
            prop_assert!(p.to_bits() == q.to_bits() || p.is_nan() && q.is_nan());
        }
    }

    #[test]
    fn resolved_config_embeds_seed(seed in any::<u64>(), delta in 0.0..0.1f64) {
        let raw = RawConfig::parse(&format!("[inverse]\ndelta = {delta:e}\n"), "<prop>").unwrap();
        let cfg = raw.resolve(None, Some(seed)).unwrap();
        let aer = cfg.aer().unwrap();
        prop_assert_eq!(aer.seed, seed);
        prop_assert_eq!(aer.delta, delta);
        let json = serde_json::to_value(&cfg).unwrap();
        prop_assert_eq!(json["inverse"]["seed"].as_u64(), Some(seed));
    }
}
