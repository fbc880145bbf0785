use ::clinr::clifford::{sample_clifford, synthesize, CliffordElement};
use ::clinr::{parse_circuit, schedule_layers, serialize_circuit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Synthesized size stays below `SIZE_CONSTANT · n² + 6n`.
const SIZE_CONSTANT: f64 = 1.5;

#[test]
fn synthesized_size_is_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in [5usize, 10, 15, 20, 25, 30] {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let c = synthesize(&sample_clifford(n, &mut rng).unwrap());
            worst = worst.max(c.size() as f64 / (n * n) as f64);
            if n >= 15 {
                // Tail folding keeps wide circuits well parallelized.
                assert!(schedule_layers(&c).depth() * 5 < c.size() * 3, "n = {n}");
            }
        }
        println!("n = {n}: max s/n² = {worst:.3}");
        let slack = 6.0 / n as f64;
        assert!(worst <= SIZE_CONSTANT + slack, "n = {n}: s/n² = {worst}");
    }
}

#[test]
fn text_round_trip_preserves_the_element() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 1..=8 {
        let e = sample_clifford(n, &mut rng).unwrap();
        let text = serialize_circuit(&synthesize(&e));
        let back = parse_circuit(&text).unwrap();
        assert_eq!(serialize_circuit(&back), text);
        assert_eq!(CliffordElement::from_circuit(&back).unwrap(), e);
    }
}
