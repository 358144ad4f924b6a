//! Seeded generation of random test elements. The same seed always yields
//! the same sequence, independent of threading.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{CoeffRing, Coefficient, GaussianRational, Monomial, Poly};
use crate::matrix::StarMatrix;
use crate::series::FormalSeries;

pub struct Sampler {
    rng: ChaCha8Rng,
    /// Maximal total degree of sampled polynomials.
    pub max_degree: u16,
    /// Maximal number of terms of sampled polynomials.
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), max_degree: 3, max_terms: 3 }
    }

    fn small_int(&mut self) -> i64 {
        loop {
            let k = self.rng.gen_range(-3..=3);
            if k != 0 {
                return k;
            }
        }
    }

    pub fn gaussian(&mut self) -> GaussianRational {
        let re = self.small_int();
        if self.rng.gen_bool(0.3) {
            GaussianRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(self.small_int().into()))
        } else {
            GaussianRational::from_int(re)
        }
    }

    pub fn real(&mut self) -> GaussianRational {
        GaussianRational::from_int(self.small_int())
    }

    fn monomial(&mut self, nvars: usize) -> Monomial {
        let mut m = Monomial::one();
        let deg = self.rng.gen_range(0..=self.max_degree);
        for _ in 0..deg {
            if nvars > 0 {
                m.0[self.rng.gen_range(0..nvars)] += 1;
            }
        }
        m
    }

    pub fn poly(&mut self, nvars: usize) -> Poly {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut list = Vec::with_capacity(terms);
        for _ in 0..terms {
            let m = self.monomial(nvars);
            let c = self.gaussian();
            list.push((m, c));
        }
        Poly::from_terms(nvars, list)
    }

    /// A random polynomial element of the ring (no denominators).
    pub fn coefficient(&mut self, ring: CoeffRing) -> Coefficient {
        ring.from_poly(self.poly(ring.nvars))
    }

    /// A polynomial element with real coefficients.
    pub fn real_coefficient(&mut self, ring: CoeffRing) -> Coefficient {
        let c = self.coefficient(ring);
        c.try_add(&c.conj()).expect("same ring")
    }

    /// A series whose higher coefficients are nonzero with probability 1/2.
    pub fn series(&mut self, ring: CoeffRing, order: usize) -> FormalSeries {
        let mut s = FormalSeries::constant(self.coefficient(ring), order);
        for r in 1..=order {
            if self.rng.gen_bool(0.5) {
                s.set_coeff(r, self.coefficient(ring));
            }
        }
        s
    }

    pub fn matrix(&mut self, ring: CoeffRing, order: usize, rows: usize, cols: usize) -> StarMatrix {
        let entries = (0..rows * cols).map(|_| self.series(ring, order)).collect();
        StarMatrix::new(rows, cols, entries).expect("consistent shapes")
    }

    pub fn classical_matrix(&mut self, ring: CoeffRing, order: usize, rows: usize, cols: usize) -> StarMatrix {
        let entries = (0..rows * cols).map(|_| self.coefficient(ring)).collect();
        StarMatrix::from_classical(rows, cols, entries, order).expect("consistent shapes")
    }

    /// A Hermitian matrix `1 + sum_{r>=1} S_r l^r`.
    pub fn hermitian_near_identity(&mut self, ring: CoeffRing, order: usize, n: usize) -> StarMatrix {
        let m = self.matrix(ring, order, n, n);
        let mut s = m.try_add(&m.adjoint()).expect("square");
        s.set_coefficient_matrix(0, &StarMatrix::identity(ring, order, n));
        s
    }

    /// A rational point with small numerators and denominators.
    pub fn point(&mut self, nvars: usize) -> Vec<BigRational> {
        (0..nvars)
            .map(|_| BigRational::new(self.rng.gen_range(-5..=5).into(), self.rng.gen_range(1..=4).into()))
            .collect()
    }
}
