//! Fixtures shared by the kernel benchmarks.

use ifsmeasure::{bernoulli_family, bernoulli_potential, similarity_family, IfsFamily, Interval, Potential};

/// `{x/3, x/3 + 2/3}` on `[0, 1]`.
pub fn cantor() -> IfsFamily {
    similarity_family(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0], Interval::new(0.0, 1.0).unwrap()).unwrap()
}

/// Place-dependent Bernoulli convolution family with `ρ = 0.2`.
pub fn bernoulli() -> (IfsFamily, Potential) {
    let fam = bernoulli_family(Interval::new(0.5, 0.7).unwrap()).unwrap();
    let pot = bernoulli_potential(0.2, &fam).unwrap();
    (fam, pot)
}
