use hedgehog::qtensor::{bulk_density, compose, h_plus_of, OrthFrame, QTensor, ScalingParams, SQRT6};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_q(rng: &mut ChaCha8Rng, max_norm: f64) -> QTensor {
    let c: [f64; 5] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let q = QTensor::new(c);
    let r = max_norm * rng.random::<f64>();
    (r / q.norm2().sqrt()) * q
}

#[test]
fn bulk_density_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in [0.0, 1.0, 10.0, 100.0] {
        let p = ScalingParams::new(t).unwrap();
        let mut worst = f64::INFINITY;
        for _ in 0..250_000 {
            let q = random_q(&mut rng, 3.0);
            let f = bulk_density(&q, &p);
            worst = worst.min(f);
            if f < 1e-12 {
                assert!((q.norm2() - 1.0).abs() < 1e-4 && (q.tr_cube() - 1.0 / SQRT6).abs() < 1e-4);
            }
        }
        assert!(worst >= -1e-12, "t = {t}: {worst}");
    }
}

#[test]
fn minimizing_set_is_uniaxial_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in [0.0, 1.0, 10.0, 100.0] {
        let p = ScalingParams::new(t).unwrap();
        for _ in 0..100 {
            let n = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)).normalize();
            let q = QTensor::uniaxial((1.5f64).sqrt(), &n);
            assert!((q.norm2() - 1.0).abs() < 1e-13);
            assert!((q.tr_cube() - 1.0 / SQRT6).abs() < 1e-9);
            assert!(bulk_density(&q, &p).abs() < 1e-12);
        }
    }
}

#[test]
fn composed_boundary_tensor_is_a_minimizer() {
    let p = ScalingParams::new(5.0).unwrap();
    for (th, ph) in [(0.3, 1.0), (2.0, 4.0), (0.0, 0.0)] {
        let fr = OrthFrame::from_angles(th, ph);
        let q = compose(&[(1.5f64).sqrt(), 0.0, 0.0, 0.0, 0.0], &fr);
        assert!(bulk_density(&q, &p).abs() < 1e-12);
    }
}

#[test]
fn h_plus_identity_on_random_temperatures() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let t = 1e6 * rng.random::<f64>();
        let h = h_plus_of(t);
        assert!((2.0 * h * h - 3.0 * h - t).abs() <= 1e-12 * (1.0 + t));
    }
}
