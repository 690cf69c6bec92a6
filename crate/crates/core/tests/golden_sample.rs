use perron::directionsets::{generate, read_sample_csv, Generator, GeneratorSpec};

const GOLDEN: &str = include_str!("golden/rand_lac_16_seed42.csv");

#[test]
fn rand_lac_sample_matches_golden_file() {
    let s = generate(&GeneratorSpec::new(Generator::RandLac, 16, Some(42))).unwrap();
    if std::env::var_os("PERRON_BLESS").is_some() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/rand_lac_16_seed42.csv");
        std::fs::write(path, s.to_csv()).unwrap();
        return;
    }
    assert_eq!(s.to_csv(), GOLDEN);
    let rows = read_sample_csv(GOLDEN).unwrap();
    assert_eq!(rows.len(), 16);
    for (row, d) in rows.iter().zip(&s.directions) {
        assert_eq!(row.index, d.index);
        assert_eq!(row.value.to_bits(), d.angle().to_bits());
    }
}
