//! Haar-distributed unitary matrices: QR of a complex Ginibre matrix with the
//! R-diagonal phase correction that removes the QR gauge ambiguity.

use ndarray::Array2;
use ndarray_linalg::{c64, QRSquare};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn ginibre<R: Rng>(n: usize, rng: &mut R) -> Array2<c64> {
    let scale = 1.0 / 2.0f64.sqrt();
    Array2::from_shape_fn((n, n), |_| {
        c64::new(
            rng.sample::<f64, _>(StandardNormal) * scale,
            rng.sample::<f64, _>(StandardNormal) * scale,
        )
    })
}

/// Haar unitary of size `n` drawn from `rng`.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> Array2<c64> {
    let g = ginibre(n, rng);
    let (q, r) = g.qr_square().expect("QR of a Ginibre matrix");
    // multiply column j of Q by phase(R_jj)
    let mut u = q;
    for j in 0..n {
        let d = r[[j, j]];
        let phase = if d.norm() == 0.0 { c64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..n {
            u[[i, j]] *= phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_case_is_a_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(1, &mut rng);
        assert!((u[[0, 0]].norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn unitarity_at_n_200() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = haar_unitary(200, &mut rng);
        let uhu = u.t().mapv(|z| z.conj()).dot(&u);
        let mut max_dev = 0.0f64;
        for i in 0..200 {
            for j in 0..200 {
                let want = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((uhu[[i, j]] - c64::new(want, 0.0)).norm());
            }
        }
        assert!(max_dev <= 1e-10, "deviation {max_dev}");
    }

    #[test]
    fn first_entry_moment() {
        // E |U_11|^2 = 1/n for Haar measure
        let n = 16;
        let draws = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..draws)
            .map(|_| haar_unitary(n, &mut rng)[[0, 0]].norm_sqr())
            .collect();
        let mean: f64 = vals.iter().sum::<f64>() / draws as f64;
        let var: f64 =
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (draws - 1) as f64;
        let stderr = (var / draws as f64).sqrt();
        assert!(
            (mean - 1.0 / n as f64).abs() <= 3.0 * stderr,
            "mean {mean}, expected {} +- {stderr}",
            1.0 / n as f64
        );
    }
}
