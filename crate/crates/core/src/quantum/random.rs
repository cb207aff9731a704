//! Seeded samplers for states and unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use super::vector::UnitVector;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitVector {
    loop {
        let amps: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(v) = UnitVector::normalized(amps) {
            return v;
        }
    }
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let z = DMatrix::<Complex64>::from_fn(d, d, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rkk = r[(k, k)];
        let ph = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= ph;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Random point of the probability simplex (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn samples_are_valid() {
        let mut rng = StdRng::seed_from_u64(7);
        for d in 1..6 {
            assert!(random_unitary(d, &mut rng).is_unitary(1e-12));
            assert_eq!(random_state(d, &mut rng).dim(), d);
            let p = random_simplex(d, &mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
